#include "icmaxent/synth.hpp"

#include <random>

#include "icmaxent/errors.hpp"

namespace icmaxent {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

double uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

void check_cpt(const std::vector<double>& cpt, std::size_t n_parents, const std::string& what) {
  if (cpt.size() != (std::size_t{1} << n_parents)) {
    throw DomainError(what + ": CPT needs " + std::to_string(std::size_t{1} << n_parents) +
                      " entries, got " + std::to_string(cpt.size()));
  }
  for (double p : cpt) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError(what + ": CPT entries must lie in [0,1]");
  }
}

}  // namespace

ScmInstance::ScmInstance(GraphSpec graph, std::vector<std::vector<double>> latent_cpts,
                         std::vector<std::vector<double>> cause_cpts, std::vector<double> y_cpt)
    : graph_(std::move(graph)) {
  if (!graph_.y_parents()) throw DomainError("SCM: the graph must fix the parents of Y");
  const std::size_t n_lat = graph_.confounders().size();
  const std::size_t d = graph_.n_causes();
  if (n_lat + d + 1 > 64) throw CapacityError("SCM: more than 64 nodes");
  if (latent_cpts.size() != n_lat) throw DomainError("SCM: one CPT per latent confounder required");
  if (cause_cpts.size() != d) throw DomainError("SCM: one CPT per cause required");

  for (std::size_t g = 0; g < n_lat; ++g) {
    check_cpt(latent_cpts[g], 0, "latent U" + std::to_string(g + 1));
    nodes_.push_back({ScmNode::Role::latent, {}, std::move(latent_cpts[g])});
  }
  for (std::uint32_t i = 0; i < d; ++i) {
    ScmNode node{ScmNode::Role::cause, {}, {}};
    for (std::size_t g = 0; g < n_lat; ++g) {
      if (contains(graph_.confounders()[g], VarId{i})) node.parents.push_back(g);
    }
    for (auto p : graph_.parents(VarId{i})) node.parents.push_back(n_lat + p.index);
    check_cpt(cause_cpts[i], node.parents.size(), "cause X" + std::to_string(i + 1));
    node.cpt = std::move(cause_cpts[i]);
    nodes_.push_back(std::move(node));
  }
  ScmNode effect{ScmNode::Role::effect, {}, {}};
  for (auto p : *graph_.y_parents()) effect.parents.push_back(n_lat + p.index);
  check_cpt(y_cpt, effect.parents.size(), "effect Y");
  effect.cpt = std::move(y_cpt);
  nodes_.push_back(std::move(effect));

  for (std::size_t g = 0; g < n_lat; ++g) order_.push_back(g);
  for (auto v : graph_.topological_order()) order_.push_back(n_lat + v.index);
  order_.push_back(nodes_.size() - 1);
  y_parent_labels_ = *graph_.y_parents();
}

double ScmInstance::p_one(std::size_t node, std::uint64_t assignment) const {
  const auto& n = nodes_[node];
  std::size_t local = 0;
  for (std::size_t k = 0; k < n.parents.size(); ++k) local |= ((assignment >> n.parents[k]) & 1u) << k;
  return n.cpt[local];
}

ScmInstance ScmInstance::relabeled(VarSet y_parent_labels) const {
  validate_varset(y_parent_labels, n_causes(), "y_parent labels");
  ScmInstance copy = *this;
  copy.y_parent_labels_ = std::move(y_parent_labels);
  return copy;
}

ScmInstance sample_scm(const GraphSpec& structure, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t d = structure.n_causes();
  VarSet y_parents;
  if (structure.y_parents()) {
    y_parents = *structure.y_parents();
  } else {
    if (d < 2) throw DomainError("sample_scm: a random parent set of Y needs at least two causes");
    for (;;) {
      y_parents.clear();
      for (std::uint32_t i = 0; i < d; ++i) {
        if (uniform01(rng) < 0.5) y_parents.emplace_back(i);
      }
      if (!y_parents.empty() && y_parents.size() < d) break;
    }
  }
  GraphSpec graph = structure.with_y_parents(y_parents);

  std::uniform_real_distribution<double> cpt_entry(0.1, 0.9);
  auto draw = [&](std::size_t n_parents) {
    std::vector<double> cpt(std::size_t{1} << n_parents);
    for (double& p : cpt) p = cpt_entry(rng);
    return cpt;
  };
  std::vector<std::vector<double>> latent_cpts;
  for (std::size_t g = 0; g < graph.confounders().size(); ++g) latent_cpts.push_back(draw(0));
  std::vector<std::vector<double>> cause_cpts;
  for (std::uint32_t i = 0; i < d; ++i) {
    std::size_t n_parents = graph.parents(VarId{i}).size();
    for (const auto& group : graph.confounders()) n_parents += contains(group, VarId{i}) ? 1 : 0;
    cause_cpts.push_back(draw(n_parents));
  }
  auto y_cpt = draw(y_parents.size());
  return ScmInstance(std::move(graph), std::move(latent_cpts), std::move(cause_cpts), std::move(y_cpt));
}

// ---------------------------------------------------------------------------

Dataset::Dataset(std::size_t n_causes, std::optional<Intervention> intervention)
    : n_causes_(n_causes), intervention_(std::move(intervention)) {
  if (n_causes_ == 0 || n_causes_ > kMaxCauses) throw DomainError("dataset: invalid number of causes");
  if (intervention_) {
    intervention_->config().validate(n_causes_);
    if (intervention_->vars.empty()) throw DomainError("dataset: empty intervention");
    clamp_mask_ = var_mask(intervention_->vars);
    clamp_bits_ = embed(intervention_->config().local_index(), intervention_->vars);
  }
}

std::vector<std::string> Dataset::columns() const {
  std::vector<std::string> cols;
  for (std::size_t i = 0; i < n_causes_; ++i) cols.push_back("X" + std::to_string(i + 1));
  cols.emplace_back("Y");
  return cols;
}

void Dataset::add_row(std::uint32_t x, std::uint8_t y) {
  if (x >= (std::uint32_t{1} << n_causes_) || y > 1) throw DomainError("dataset: row out of range");
  if ((x & clamp_mask_) != clamp_bits_) {
    throw DomainError("dataset: intervened column differs from its clamped value");
  }
  x_.push_back(x);
  y_.push_back(y);
}

Dataset ancestral_sample(const ScmInstance& scm, std::size_t n,
                         const std::optional<Intervention>& intervention, std::uint64_t seed) {
  if (n == 0) throw DomainError("ancestral_sample: n must be >= 1");
  Dataset ds(scm.n_causes(), intervention);
  std::uint64_t clamp_mask = 0;
  std::uint64_t clamp_bits = 0;
  if (intervention) {
    for (std::size_t k = 0; k < intervention->vars.size(); ++k) {
      const std::size_t node = scm.cause_node(intervention->vars[k]);
      clamp_mask |= std::uint64_t{1} << node;
      clamp_bits |= std::uint64_t{intervention->values[k]} << node;
    }
  }
  const std::size_t lat = scm.n_latents();
  const std::uint64_t cause_mask = (std::uint64_t{1} << scm.n_causes()) - 1;
  std::mt19937_64 rng(seed);
  for (std::size_t row = 0; row < n; ++row) {
    std::uint64_t a = 0;
    for (std::size_t node : scm.order()) {
      const std::uint64_t bit = std::uint64_t{1} << node;
      if (clamp_mask & bit) {
        a |= clamp_bits & bit;
      } else if (uniform01(rng) < scm.p_one(node, a)) {
        a |= bit;
      }
    }
    ds.add_row(static_cast<std::uint32_t>((a >> lat) & cause_mask),
               static_cast<std::uint8_t>((a >> scm.effect_node()) & 1u));
  }
  return ds;
}

// ---------------------------------------------------------------------------

ConstraintSpec empirical_averages(std::span<const Dataset> datasets, const ConstraintTemplate& shape) {
  if (datasets.empty()) throw InsufficientDataError("empirical_averages: no datasets");
  const std::size_t d = datasets.front().n_causes();
  for (const auto& ds : datasets) {
    if (ds.n_causes() != d) throw DomainError("empirical_averages: datasets disagree on the causes");
    const bool interventional = shape.kind == ConstraintKind::interventional;
    if (!interventional && ds.intervention()) {
      throw DomainError("empirical_averages: " + std::string(to_string(shape.kind)) +
                        " averages need observational data");
    }
    if (interventional && (!ds.intervention() || ds.intervention()->vars != shape.int_set)) {
      throw DomainError("empirical_averages: dataset intervention does not match int_set");
    }
  }
  validate_varset(shape.cond_set, d, "template cond_set");
  validate_varset(shape.int_set, d, "template int_set");

  if (shape.kind == ConstraintKind::marginal) {
    validate_varset(shape.statistic.scope(), d, "template statistic");
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& ds : datasets) {
      for (std::size_t i = 0; i < ds.size(); ++i) total += shape.statistic.at_full(ds.y(i), ds.x(i));
      n += ds.size();
    }
    if (n == 0) throw InsufficientDataError("empirical_averages: no rows");
    return ConstraintSpec::marginal(shape.statistic, total / static_cast<double>(n));
  }

  const VarSet scope = set_union(shape.int_set, shape.cond_set);
  std::vector<double> sums(std::size_t{1} << scope.size(), 0.0);
  std::vector<std::size_t> counts(sums.size(), 0);
  for (const auto& ds : datasets) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const std::uint32_t local = project(ds.x(i), scope);
      sums[local] += ds.y(i);
      counts[local] += 1;
    }
  }
  for (std::uint32_t c = 0; c < sums.size(); ++c) {
    if (counts[c] == 0) {
      throw InsufficientDataError("empirical_averages: no rows for configuration " +
                                  to_bitstring(c, scope.size()) + " of the constraint scope");
    }
    sums[c] /= static_cast<double>(counts[c]);
  }
  if (shape.kind == ConstraintKind::conditional) return ConstraintSpec::conditional(shape.cond_set, std::move(sums));
  return ConstraintSpec::interventional(shape.int_set, shape.cond_set, std::move(sums));
}

double exact_query(const ScmInstance& scm, const Config& c_int, const Config& c_cond) {
  c_int.validate(scm.n_causes());
  c_cond.validate(scm.n_causes());
  if (intersects(c_int.vars, c_cond.vars)) {
    throw DomainError("exact_query: intervened and conditioned sets must be disjoint");
  }
  const std::size_t lat = scm.n_latents();
  const std::size_t bits = lat + scm.n_causes();
  const std::uint64_t int_mask = std::uint64_t{var_mask(c_int.vars)} << lat;
  const std::uint64_t int_bits = std::uint64_t{embed(c_int.local_index(), c_int.vars)} << lat;
  const std::uint64_t cond_mask = std::uint64_t{var_mask(c_cond.vars)} << lat;
  const std::uint64_t cond_bits = std::uint64_t{embed(c_cond.local_index(), c_cond.vars)} << lat;

  double num = 0.0;
  double den = 0.0;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << bits); ++a) {
    if ((a & int_mask) != int_bits || (a & cond_mask) != cond_bits) continue;
    double w = 1.0;
    for (std::size_t node = 0; node < bits; ++node) {
      if ((int_mask >> node) & 1u) continue;  // truncated factor
      const double p1 = scm.p_one(node, a);
      w *= ((a >> node) & 1u) ? p1 : 1.0 - p1;
    }
    den += w;
    num += w * scm.p_one(scm.effect_node(), a);
  }
  if (!(den > 0.0)) {
    throw PositivityError("exact_query: conditioning event x=" + c_cond.bitstring() + " has zero probability");
  }
  return num / den;
}

JointTable exact_joint_X(const ScmInstance& scm) {
  const std::size_t lat = scm.n_latents();
  const std::size_t bits = lat + scm.n_causes();
  std::vector<double> table(std::size_t{1} << scm.n_causes(), 0.0);
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << bits); ++a) {
    double w = 1.0;
    for (std::size_t node = 0; node < bits; ++node) {
      const double p1 = scm.p_one(node, a);
      w *= ((a >> node) & 1u) ? p1 : 1.0 - p1;
    }
    table[a >> lat] += w;
  }
  return JointTable(scm.n_causes(), std::move(table));
}

std::vector<double> exact_effect_table(const ScmInstance& scm) {
  std::vector<double> out(std::size_t{1} << scm.n_causes());
  for (std::uint64_t x = 0; x < out.size(); ++x) {
    out[x] = scm.p_one(scm.effect_node(), x << scm.n_latents());
  }
  return out;
}

}  // namespace icmaxent
