#include "bench/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

#include "bench/io.hpp"
#include "icmaxent/errors.hpp"
#include "icmaxent/identify.hpp"
#include "icmaxent/model.hpp"

namespace icmaxent::bench {

namespace {

constexpr int kMaxObservationalAttempts = 10;

std::string var_name(VarId v) { return "X" + std::to_string(v.index + 1); }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_parent(const VarSet& parents, VarId v) { return contains(parents, v); }

// Linear interpolation between order statistics.
double quantile_of_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

GraphSpec default_structure(char name) {
  const std::vector<VarSet> two_groups{make_varset({0, 1, 2}), make_varset({3, 4})};
  switch (name) {
    case 'a':
      return GraphSpec(5, {}, two_groups);
    case 'b':
      return GraphSpec(5, {}, {make_varset({0, 1, 2, 3, 4})});
    case 'c':
      return GraphSpec(5, {{VarId{0}, VarId{1}}}, two_groups);
    default:
      throw DomainError(std::string("unknown structure '") + name + "'");
  }
}

GraphSpec resolve_structure(const std::string& name) {
  if (name.size() == 1 && (name[0] == 'a' || name[0] == 'b' || name[0] == 'c')) {
    return default_structure(name[0]);
  }
  return io::load(name, io::graph_from_json).graph;
}

std::string_view to_string(PxMode mode) { return mode == PxMode::exact ? "exact" : "marginals"; }
std::string_view to_string(Method method) { return method == Method::icmaxent ? "icmaxent" : "cmaxent"; }

PxMode parse_px_mode(std::string_view name) {
  if (name == "exact") return PxMode::exact;
  if (name == "marginals") return PxMode::marginals;
  throw DomainError("unknown P(X) mode '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (n_graphs < 1) throw DomainError("n_graphs must be >= 1");
  if (n_samples < 1) throw DomainError("n_samples must be >= 1");
  if (structure.n_causes() < 2) throw DomainError("the structure needs at least two causes");
  solver.validate();
}

Dataset ScmSource::observe(std::size_t n, std::uint64_t seed) const {
  return ancestral_sample(scm_, n, std::nullopt, seed);
}

Dataset ScmSource::intervene(const Intervention& iv, std::size_t n, std::uint64_t seed) const {
  return ancestral_sample(scm_, n, iv, seed);
}

JointTable observational_px(const SampleSource& source, PxMode mode) {
  JointTable joint = source.joint_x();
  if (mode == PxMode::marginals) {
    std::vector<double> marginals;
    for (std::uint32_t i = 0; i < joint.n_causes(); ++i) {
      marginals.push_back(joint.probability(Config{{VarId{i}}, {1}}));
    }
    joint = merge_marginals_maxent(marginals);
  }
  if (!joint.strictly_positive()) joint = smooth_joint(joint, SolverOptions{}.epsilon_smoothing);
  return joint;
}

// --- constraint factory ----------------------------------------------------

ConstraintFactory::ConstraintFactory(const SampleSource& source, std::size_t n_samples,
                                     std::uint64_t seed)
    : source_(source), n_samples_(n_samples), seed_(seed) {}

const Dataset& ConstraintFactory::observational(const VarSet& vars) {
  for (int attempt = 0; attempt < kMaxObservationalAttempts; ++attempt) {
    if (observational_.size() <= static_cast<std::size_t>(attempt)) {
      observational_.push_back(source_.observe(n_samples_, mix_seed(mix_seed(seed_, 0), attempt)));
    }
    const Dataset& ds = observational_[attempt];
    std::vector<bool> seen(std::size_t{1} << vars.size(), false);
    for (std::size_t r = 0; r < ds.size(); ++r) seen[project(ds.x(r), vars)] = true;
    if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) return ds;
  }
  throw InsufficientDataError("no observational sample covers every configuration of the conditioning set after " +
                              std::to_string(kMaxObservationalAttempts) + " attempts");
}

ConstraintSpec ConstraintFactory::conditional(const VarSet& vars) {
  const Dataset& ds = observational(vars);
  return empirical_averages(std::span<const Dataset>(&ds, 1),
                            ConstraintTemplate{ConstraintKind::conditional, vars, {}, {}});
}

ConstraintSpec ConstraintFactory::interventional(const VarSet& vars) {
  auto it = std::find_if(interventional_.begin(), interventional_.end(),
                         [&](const auto& entry) { return entry.first == vars; });
  if (it == interventional_.end()) {
    std::vector<Dataset> data;
    const std::uint64_t base = mix_seed(seed_, var_mask(vars));
    for (std::uint32_t c = 0; c < (std::uint32_t{1} << vars.size()); ++c) {
      const Config cfg = Config::from_local(vars, c);
      data.push_back(source_.intervene(Intervention{cfg.vars, cfg.values}, n_samples_, mix_seed(base, c + 1)));
    }
    interventional_.emplace_back(vars, std::move(data));
    it = std::prev(interventional_.end());
  }
  return empirical_averages(it->second, ConstraintTemplate{ConstraintKind::interventional, {}, vars, {}});
}

std::vector<ConstraintSpec> single_variable_constraints(ConstraintFactory& factory,
                                                        const GraphSpec& structure,
                                                        const VarSet& intervened,
                                                        bool allow_unidentifiable) {
  std::vector<ConstraintSpec> out;
  for (std::uint32_t i = 0; i < structure.n_causes(); ++i) {
    const VarId v{i};
    const bool use_do =
        contains(intervened, v) && (allow_unidentifiable || intervenable(structure, v).admissible);
    out.push_back(use_do ? factory.interventional({v}) : factory.conditional({v}));
  }
  return out;
}

VarSet admissible_pool(const GraphSpec& structure) {
  VarSet pool;
  for (std::uint32_t i = 0; i < structure.n_causes(); ++i) {
    if (intervenable(structure, VarId{i}).admissible) pool.emplace_back(i);
  }
  return pool;
}

PipelineScores fit_and_score(std::vector<ConstraintSpec> constraints, const JointTable& px,
                             const GraphSpec& structure, const SolverOptions& options) {
  const FitResult result = fit(std::move(constraints), px, structure, options);
  return {score_all(result.model).scores, result.report.converged};
}

// --- setting 1 -------------------------------------------------------------

std::vector<Setting1Row> setting1_graph(const SampleSource& source, const GraphSpec& structure,
                                        const ExperimentConfig& config, std::uint64_t data_seed) {
  ConstraintFactory factory(source, config.n_samples, data_seed);
  const bool allow = config.solver.allow_unidentifiable;
  const auto icm = single_variable_constraints(factory, structure, all_vars(structure.n_causes()), allow);
  const auto cm = single_variable_constraints(factory, structure, {}, allow);

  std::vector<Setting1Row> rows;
  for (const Method method : {Method::icmaxent, Method::cmaxent}) {
    for (const PxMode px : {PxMode::exact, PxMode::marginals}) {
      const auto result = fit_and_score(method == Method::icmaxent ? icm : cm, observational_px(source, px),
                                        structure, config.solver);
      for (const auto& s : result.scores) {
        rows.push_back({0, s.var, s.theta, false, method, px, result.converged});
      }
    }
  }
  return rows;
}

namespace {

// Per-graph ground truth and data streams shared by every driver.
template <typename Row, typename PerGraph>
std::vector<Row> drive(const ExperimentConfig& config, const char* name, PerGraph per_graph) {
  config.validate();
  const GraphSpec structure = config.structure.with_y_parents(std::nullopt);
  std::vector<Row> rows;
  for (std::size_t g = 0; g < config.n_graphs; ++g) {
    const ScmInstance scm = sample_scm(config.structure, mix_seed(config.seed, 2 * g));
    const ScmSource source(scm);
    auto graph_rows = per_graph(scm, source, structure, mix_seed(config.seed, 2 * g + 1));
    bool converged = true;
    for (auto& row : graph_rows) {
      row.graph_id = g;
      converged = converged && row.converged;
    }
    if (!converged && config.log) *config.log << name << ": graph " << g << ": a fit did not converge\n";
    rows.insert(rows.end(), graph_rows.begin(), graph_rows.end());
  }
  return rows;
}

}  // namespace

std::vector<Setting1Row> run_setting1(const ExperimentConfig& config) {
  return drive<Setting1Row>(config, "setting1",
                            [&](const ScmInstance& scm, const SampleSource& source, const GraphSpec& structure,
                                std::uint64_t seed) {
                              auto rows = setting1_graph(source, structure, config, seed);
                              for (auto& r : rows) r.is_parent = is_parent(scm.y_parents(), r.var);
                              return rows;
                            });
}

// --- setting 2 -------------------------------------------------------------

std::vector<Setting2Row> setting2_graph(const SampleSource& source, const GraphSpec& structure,
                                        const ExperimentConfig& config, std::uint64_t data_seed) {
  ConstraintFactory factory(source, config.n_samples, data_seed);
  const JointTable px = observational_px(source, config.px);
  const VarSet pool = admissible_pool(structure);
  std::vector<Setting2Row> rows;
  for (std::size_t k = 0; k <= pool.size(); ++k) {
    const VarSet intervened(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    auto constraints = single_variable_constraints(factory, structure, intervened, false);
    const auto result = fit_and_score(std::move(constraints), px, structure, config.solver);
    for (const auto& s : result.scores) rows.push_back({0, s.var, s.theta, false, k, result.converged});
  }
  return rows;
}

std::vector<Setting2Row> run_setting2(const ExperimentConfig& config) {
  return drive<Setting2Row>(config, "setting2",
                            [&](const ScmInstance& scm, const SampleSource& source, const GraphSpec& structure,
                                std::uint64_t seed) {
                              auto rows = setting2_graph(source, structure, config, seed);
                              for (auto& r : rows) r.is_parent = is_parent(scm.y_parents(), r.var);
                              return rows;
                            });
}

// --- joint interventional --------------------------------------------------

std::vector<ConstraintSpec> joint_scenario(int scenario, ConstraintFactory& factory,
                                           const GraphSpec& structure, VarId i, VarId j,
                                           bool allow_unidentifiable) {
  const std::size_t d = structure.n_causes();
  const VarSet pair = set_union({i}, {j});
  std::vector<ConstraintSpec> out;
  switch (scenario) {
    case 1: {
      out.push_back(factory.conditional(pair));
      const VarSet rest = set_difference(all_vars(d), pair);
      for (const auto& c : single_variable_constraints(factory, structure, rest, allow_unidentifiable)) {
        const VarId v = c.kind == ConstraintKind::interventional ? c.int_set.front() : c.cond_set.front();
        if (!contains(pair, v)) out.push_back(c);
      }
      break;
    }
    case 2:
      out.push_back(factory.conditional(pair));
      break;
    case 3:
      out = single_variable_constraints(factory, structure, all_vars(d), allow_unidentifiable);
      break;
    case 4:
      out = single_variable_constraints(factory, structure, {}, allow_unidentifiable);
      break;
    case 5:
      break;
    default:
      throw DomainError("joint scenario must be in 1..5");
  }
  return out;
}

std::vector<JointRow> joint_graph(const SampleSource& source, const GraphSpec& structure,
                                  const ExperimentConfig& config, std::uint64_t data_seed) {
  const VarSet query = make_varset({0, 1});
  const IdentifiabilityVerdict verdict = config.solver.allow_unidentifiable
                                             ? IdentifiabilityVerdict::forced(query, structure.n_causes())
                                             : intervenable_set(structure, query);
  if (!verdict.admissible) {
    throw IdentifiabilityError("do(X1, X2) is not identifiable in this structure (" + verdict.reason + ")");
  }

  // The pair for scenarios 1 and 2.
  std::mt19937_64 rng(mix_seed(data_seed, 0x7061697275));
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(structure.n_causes() - 1));
  const VarId i{pick(rng)};
  VarId j = i;
  while (j == i) j = VarId{pick(rng)};

  ConstraintFactory factory(source, config.n_samples, data_seed);
  const JointTable px = observational_px(source, config.px);
  std::vector<JointRow> rows;
  for (int scenario = 1; scenario <= kJointScenarios; ++scenario) {
    auto constraints = joint_scenario(scenario, factory, structure, i, j, config.solver.allow_unidentifiable);
    const FitResult result = fit(std::move(constraints), px, structure, config.solver);
    for (std::uint32_t c = 0; c < 4; ++c) {
      const Config c_int = Config::from_local(query, c);
      const double est = interventional_expectation(result.model, px, verdict, c_int, Config{});
      rows.push_back({0, scenario, c_int.values[0], c_int.values[1], est, 0.0, 0.0, result.report.converged});
    }
  }
  return rows;
}

std::vector<JointRow> run_joint(const ExperimentConfig& config) {
  return drive<JointRow>(config, "joint",
                         [&](const ScmInstance& scm, const SampleSource& source, const GraphSpec& structure,
                             std::uint64_t seed) {
                           auto rows = joint_graph(source, structure, config, seed);
                           for (auto& r : rows) {
                             const Config c_int{make_varset({0, 1}),
                                                {static_cast<std::uint8_t>(r.x1), static_cast<std::uint8_t>(r.x2)}};
                             r.truth = exact_query(scm, c_int, Config{});
                             r.residual = r.estimated - r.truth;
                           }
                           return rows;
                         });
}

// --- summaries -------------------------------------------------------------

double auc(const std::vector<Setting1Row>& rows, Method method, PxMode px) {
  std::vector<LabeledScore> scores;
  for (const auto& r : rows) {
    if (r.method == method && r.px == px) scores.push_back({r.theta, r.is_parent});
  }
  return roc(scores).auc;
}

double auc(const std::vector<Setting2Row>& rows, std::size_t n_interventional) {
  std::vector<LabeledScore> scores;
  for (const auto& r : rows) {
    if (r.n_interventional == n_interventional) scores.push_back({r.theta, r.is_parent});
  }
  return roc(scores).auc;
}

Interval bootstrap_auc_difference(const std::vector<Setting1Row>& rows, Method a, Method b, PxMode px,
                                  std::size_t n_resamples, std::uint64_t seed) {
  std::map<std::size_t, std::pair<std::vector<LabeledScore>, std::vector<LabeledScore>>> by_graph;
  for (const auto& r : rows) {
    if (r.px != px) continue;
    if (r.method == a) by_graph[r.graph_id].first.push_back({r.theta, r.is_parent});
    if (r.method == b) by_graph[r.graph_id].second.push_back({r.theta, r.is_parent});
  }
  std::vector<const std::pair<std::vector<LabeledScore>, std::vector<LabeledScore>>*> graphs;
  for (const auto& [id, s] : by_graph) graphs.push_back(&s);
  if (graphs.empty()) throw DomainError("bootstrap: no rows for the requested methods");

  auto difference = [&](const std::vector<std::size_t>& pick) {
    std::vector<LabeledScore> sa;
    std::vector<LabeledScore> sb;
    for (const auto k : pick) {
      sa.insert(sa.end(), graphs[k]->first.begin(), graphs[k]->first.end());
      sb.insert(sb.end(), graphs[k]->second.begin(), graphs[k]->second.end());
    }
    return roc(sa).auc - roc(sb).auc;
  };

  std::vector<std::size_t> identity(graphs.size());
  std::iota(identity.begin(), identity.end(), 0);
  Interval out;
  out.estimate = difference(identity);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> draw(0, graphs.size() - 1);
  std::vector<double> diffs;
  std::vector<std::size_t> pick(graphs.size());
  for (std::size_t s = 0; s < n_resamples; ++s) {
    for (auto& k : pick) k = draw(rng);
    try {
      diffs.push_back(difference(pick));
    } catch (const DegenerateLabelsError&) {
    }
  }
  if (diffs.empty()) throw DomainError("bootstrap: every resample had a single label class");
  std::sort(diffs.begin(), diffs.end());
  out.lower = quantile_of_sorted(diffs, 0.025);
  out.upper = quantile_of_sorted(diffs, 0.975);
  return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
    for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = r;
    i = j;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("spearman: need two equal-length samples of size >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty sample");
  std::sort(values.begin(), values.end());
  return quantile_of_sorted(values, 0.5);
}

double interquartile_range(std::vector<double> values) {
  if (values.empty()) throw DomainError("interquartile range of an empty sample");
  std::sort(values.begin(), values.end());
  return quantile_of_sorted(values, 0.75) - quantile_of_sorted(values, 0.25);
}

// --- CSV -------------------------------------------------------------------

void write_setting1_csv(std::ostream& os, const std::vector<Setting1Row>& rows) {
  os << "graph_id,variable,theta,is_parent,method,px_mode,converged\n";
  for (const auto& r : rows) {
    os << r.graph_id << ',' << var_name(r.var) << ',' << format_double(r.theta) << ',' << int(r.is_parent) << ','
       << to_string(r.method) << ',' << to_string(r.px) << ',' << int(r.converged) << '\n';
  }
}

void write_setting2_csv(std::ostream& os, const std::vector<Setting2Row>& rows) {
  os << "graph_id,variable,theta,is_parent,n_interventional,converged\n";
  for (const auto& r : rows) {
    os << r.graph_id << ',' << var_name(r.var) << ',' << format_double(r.theta) << ',' << int(r.is_parent) << ','
       << r.n_interventional << ',' << int(r.converged) << '\n';
  }
}

void write_joint_csv(std::ostream& os, const std::vector<JointRow>& rows) {
  os << "graph_id,scenario,x1,x2,estimated,true,residual,converged\n";
  for (const auto& r : rows) {
    os << r.graph_id << ',' << r.scenario << ',' << r.x1 << ',' << r.x2 << ',' << format_double(r.estimated) << ','
       << format_double(r.truth) << ',' << format_double(r.residual) << ',' << int(r.converged) << '\n';
  }
}

}  // namespace icmaxent::bench
