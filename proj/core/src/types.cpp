#include "icmaxent/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "icmaxent/errors.hpp"

namespace icmaxent {

VarSet make_varset(std::initializer_list<std::uint32_t> indices) {
  VarSet out;
  for (auto i : indices) out.emplace_back(i);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

VarSet all_vars(std::size_t n_causes) {
  VarSet out;
  out.reserve(n_causes);
  for (std::uint32_t i = 0; i < n_causes; ++i) out.emplace_back(i);
  return out;
}

VarSet set_union(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VarSet set_difference(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool intersects(const VarSet& a, const VarSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i; else ++j;
  }
  return false;
}

bool contains(const VarSet& s, VarId v) { return std::binary_search(s.begin(), s.end(), v); }

void validate_varset(const VarSet& s, std::size_t n_causes, std::string_view what) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k].index >= n_causes) {
      throw DomainError(std::string(what) + ": variable index " + std::to_string(s[k].index) +
                        " out of range for " + std::to_string(n_causes) + " causes");
    }
    if (k > 0 && !(s[k - 1] < s[k])) {
      throw DomainError(std::string(what) + ": variable set must be strictly increasing");
    }
  }
}

std::uint32_t var_mask(const VarSet& s) {
  std::uint32_t m = 0;
  for (auto v : s) m |= 1u << v.index;
  return m;
}

std::uint32_t project(std::uint32_t full, const VarSet& vars) {
  std::uint32_t local = 0;
  for (std::size_t k = 0; k < vars.size(); ++k) local |= ((full >> vars[k].index) & 1u) << k;
  return local;
}

std::uint32_t embed(std::uint32_t local, const VarSet& vars) {
  std::uint32_t full = 0;
  for (std::size_t k = 0; k < vars.size(); ++k) full |= ((local >> k) & 1u) << vars[k].index;
  return full;
}

std::string to_bitstring(std::uint32_t local, std::size_t width) {
  std::string s(width, '0');
  for (std::size_t k = 0; k < width; ++k) s[k] = ((local >> k) & 1u) ? '1' : '0';
  return s;
}

std::uint32_t parse_bitstring(std::string_view bits) {
  if (bits.size() > 31) throw DomainError("bitstring too long: " + std::string(bits));
  std::uint32_t local = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k] == '1') {
      local |= 1u << k;
    } else if (bits[k] != '0') {
      throw DomainError("bitstring must contain only '0' and '1': \"" + std::string(bits) + "\"");
    }
  }
  return local;
}

// ---------------------------------------------------------------------------

Config Config::from_local(const VarSet& vars, std::uint32_t local) {
  Config c{vars, std::vector<std::uint8_t>(vars.size())};
  for (std::size_t k = 0; k < vars.size(); ++k) c.values[k] = (local >> k) & 1u;
  return c;
}

Config Config::full(std::size_t n_causes, std::uint32_t index) {
  return from_local(all_vars(n_causes), index);
}

Config Config::from_bitstring(const VarSet& vars, std::string_view bits) {
  if (bits.size() != vars.size()) {
    throw DomainError("bitstring \"" + std::string(bits) + "\" has " + std::to_string(bits.size()) +
                      " characters, expected " + std::to_string(vars.size()));
  }
  return from_local(vars, parse_bitstring(bits));
}

std::uint32_t Config::local_index() const {
  std::uint32_t local = 0;
  for (std::size_t k = 0; k < values.size(); ++k) local |= static_cast<std::uint32_t>(values[k] & 1u) << k;
  return local;
}

std::string Config::bitstring() const { return to_bitstring(local_index(), values.size()); }

void Config::validate(std::size_t n_causes) const {
  validate_varset(vars, n_causes, "config");
  if (values.size() != vars.size()) throw DomainError("config: one value per variable required");
  for (auto v : values) {
    if (v > 1) throw DomainError("config: values must be binary");
  }
}

// ---------------------------------------------------------------------------

GraphSpec::GraphSpec(std::size_t n_causes, std::vector<Edge> directed_edges,
                     std::vector<VarSet> confounders, std::optional<VarSet> y_parents)
    : n_causes_(n_causes),
      directed_(std::move(directed_edges)),
      confounders_(std::move(confounders)),
      y_parents_(std::move(y_parents)) {
  if (n_causes_ == 0) throw DomainError("graph: at least one cause required");
  if (n_causes_ > kMaxCauses) {
    throw CapacityError("graph: " + std::to_string(n_causes_) + " causes exceed the ceiling of " +
                        std::to_string(kMaxCauses));
  }
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const auto& e : directed_) {
    if (e.from.index >= n_causes_ || e.to.index >= n_causes_) {
      throw DomainError("graph: directed edge endpoint out of range");
    }
    if (e.from == e.to) throw DomainError("graph: self loop on cause " + std::to_string(e.from.index));
    if (!seen.emplace(e.from.index, e.to.index).second) {
      throw DomainError("graph: duplicate directed edge");
    }
  }
  for (const auto& group : confounders_) {
    validate_varset(group, n_causes_, "graph confounder");
    if (group.size() < 2) throw DomainError("graph: a confounder must reach at least two causes");
  }
  if (y_parents_) validate_varset(*y_parents_, n_causes_, "graph y_parents");
  if (topological_order().size() != n_causes_) {
    throw DomainError("graph: directed edges among causes contain a cycle");
  }
}

std::vector<std::pair<VarId, VarId>> GraphSpec::confounder_pairs() const {
  std::set<std::pair<VarId, VarId>> pairs;
  for (const auto& g : confounders_) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = i + 1; j < g.size(); ++j) pairs.emplace(g[i], g[j]);
    }
  }
  return {pairs.begin(), pairs.end()};
}

VarSet GraphSpec::children(VarId v) const {
  VarSet out;
  for (const auto& e : directed_) {
    if (e.from == v) out.push_back(e.to);
  }
  std::sort(out.begin(), out.end());
  return out;
}

VarSet GraphSpec::parents(VarId v) const {
  VarSet out;
  for (const auto& e : directed_) {
    if (e.to == v) out.push_back(e.from);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VarId> GraphSpec::topological_order() const {
  std::vector<int> indegree(n_causes_, 0);
  for (const auto& e : directed_) ++indegree[e.to.index];
  std::vector<VarId> order;
  std::vector<bool> done(n_causes_, false);
  // Kahn's algorithm, always taking the smallest ready index.
  while (order.size() < n_causes_) {
    std::size_t pick = n_causes_;
    for (std::size_t i = 0; i < n_causes_; ++i) {
      if (!done[i] && indegree[i] == 0) {
        pick = i;
        break;
      }
    }
    if (pick == n_causes_) break;
    done[pick] = true;
    order.emplace_back(static_cast<std::uint32_t>(pick));
    for (const auto& e : directed_) {
      if (e.from.index == pick) --indegree[e.to.index];
    }
  }
  return order;
}

GraphSpec GraphSpec::with_y_parents(std::optional<VarSet> parents) const {
  return GraphSpec(n_causes_, directed_, confounders_, std::move(parents));
}

GraphSpec GraphSpec::with_edge(Edge e) const {
  auto edges = directed_;
  edges.push_back(e);
  return GraphSpec(n_causes_, std::move(edges), confounders_, y_parents_);
}

// ---------------------------------------------------------------------------

JointTable::JointTable(std::size_t n_causes, std::vector<double> probs)
    : n_causes_(n_causes), probs_(std::move(probs)) {
  if (n_causes_ > kMaxCauses) {
    throw CapacityError("joint table: " + std::to_string(n_causes_) +
                        " causes exceed the ceiling of " + std::to_string(kMaxCauses));
  }
  if (probs_.size() != (std::size_t{1} << n_causes_)) {
    throw DomainError("joint table: expected " + std::to_string(std::size_t{1} << n_causes_) +
                      " entries, got " + std::to_string(probs_.size()));
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw DomainError("joint table: entries must be finite and >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream os;
    os.precision(17);
    os << "joint table: entries sum to " << total << ", expected 1";
    throw DomainError(os.str());
  }
}

JointTable JointTable::uniform(std::size_t n_causes) {
  const std::size_t n = std::size_t{1} << n_causes;
  return JointTable(n_causes, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

bool JointTable::strictly_positive() const {
  return std::all_of(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; });
}

double JointTable::probability(const Config& c) const {
  c.validate(n_causes_);
  const std::uint32_t mask = var_mask(c.vars);
  const std::uint32_t want = embed(c.local_index(), c.vars);
  double total = 0.0;
  for (std::uint32_t x = 0; x < probs_.size(); ++x) {
    if ((x & mask) == want) total += probs_[x];
  }
  return total;
}

JointTable JointTable::marginal(const VarSet& keep) const {
  validate_varset(keep, n_causes_, "marginal");
  std::vector<double> out(std::size_t{1} << keep.size(), 0.0);
  for (std::uint32_t x = 0; x < probs_.size(); ++x) out[project(x, keep)] += probs_[x];
  JointTable t;
  t.n_causes_ = keep.size();
  t.probs_ = std::move(out);
  return t;
}

// ---------------------------------------------------------------------------

StatisticTable::StatisticTable(VarSet scope, std::vector<double> values)
    : scope_(std::move(scope)), values_(std::move(values)) {
  validate_varset(scope_, kMaxCauses, "statistic scope");
  if (values_.size() != (std::size_t{2} << scope_.size())) {
    throw DomainError("statistic: expected " + std::to_string(std::size_t{2} << scope_.size()) +
                      " values, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("statistic: values must be finite");
  }
}

StatisticTable StatisticTable::identity_y() { return StatisticTable(VarSet{}, {0.0, 1.0}); }

bool StatisticTable::is_identity_y() const {
  const std::size_t half = std::size_t{1} << scope_.size();
  for (std::size_t i = 0; i < half; ++i) {
    if (values_[i] != 0.0 || values_[half + i] != 1.0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::marginal: return "marginal";
    case ConstraintKind::conditional: return "conditional";
    case ConstraintKind::interventional: return "interventional";
  }
  return "unknown";
}

ConstraintKind parse_constraint_kind(std::string_view name) {
  if (name == "marginal") return ConstraintKind::marginal;
  if (name == "conditional") return ConstraintKind::conditional;
  if (name == "interventional") return ConstraintKind::interventional;
  throw DomainError("unknown constraint kind \"" + std::string(name) + "\"");
}

ConstraintSpec ConstraintSpec::marginal(StatisticTable statistic, double target) {
  ConstraintSpec c;
  c.kind = ConstraintKind::marginal;
  c.statistic = std::move(statistic);
  c.targets = {target};
  return c;
}

ConstraintSpec ConstraintSpec::conditional(VarSet cond_set, std::vector<double> targets) {
  ConstraintSpec c;
  c.kind = ConstraintKind::conditional;
  c.cond_set = std::move(cond_set);
  c.targets = std::move(targets);
  return c;
}

ConstraintSpec ConstraintSpec::interventional(VarSet int_set, VarSet cond_set,
                                              std::vector<double> targets) {
  ConstraintSpec c;
  c.kind = ConstraintKind::interventional;
  c.int_set = std::move(int_set);
  c.cond_set = std::move(cond_set);
  c.targets = std::move(targets);
  return c;
}

VarSet ConstraintSpec::scope() const {
  if (kind == ConstraintKind::marginal) return statistic.scope();
  return set_union(int_set, cond_set);
}

void ConstraintSpec::validate(std::size_t n_causes) const {
  validate_varset(cond_set, n_causes, "constraint cond_set");
  validate_varset(int_set, n_causes, "constraint int_set");
  for (double t : targets) {
    if (!std::isfinite(t)) throw DomainError("constraint: targets must be finite");
  }
  switch (kind) {
    case ConstraintKind::marginal:
      validate_varset(statistic.scope(), n_causes, "constraint statistic scope");
      if (!cond_set.empty() || !int_set.empty()) {
        throw DomainError("marginal constraint: cond_set and int_set must be empty");
      }
      if (targets.size() != 1) throw DomainError("marginal constraint: exactly one target required");
      return;
    case ConstraintKind::conditional:
      if (!int_set.empty()) throw DomainError("conditional constraint: int_set must be empty");
      break;
    case ConstraintKind::interventional:
      if (int_set.empty()) throw DomainError("interventional constraint: int_set must be nonempty");
      if (intersects(int_set, cond_set)) {
        throw DomainError("interventional constraint: int_set and cond_set must be disjoint");
      }
      break;
  }
  if (!statistic.is_identity_y() || !statistic.scope().empty()) {
    throw DomainError(std::string(to_string(kind)) + " constraint: only the default statistic f(y)=y is supported");
  }
  const std::size_t expected = std::size_t{1} << scope().size();
  if (targets.size() != expected) {
    throw DomainError(std::string(to_string(kind)) + " constraint: expected " +
                      std::to_string(expected) + " targets, got " + std::to_string(targets.size()));
  }
  for (double t : targets) {
    if (t < 0.0 || t > 1.0) {
      throw DomainError(std::string(to_string(kind)) + " constraint: targets must lie in [0,1]");
    }
  }
}

std::vector<MultiplierSlot> multiplier_layout(std::span<const ConstraintSpec> constraints) {
  std::vector<MultiplierSlot> slots;
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    for (std::uint32_t c = 0; c < constraints[k].n_targets(); ++c) slots.push_back({k, c});
  }
  return slots;
}

std::size_t count_multipliers(std::span<const ConstraintSpec> constraints) {
  return std::accumulate(constraints.begin(), constraints.end(), std::size_t{0},
                         [](std::size_t acc, const ConstraintSpec& c) { return acc + c.n_targets(); });
}

IdentifiabilityVerdict IdentifiabilityVerdict::forced(VarSet vars, std::size_t n_causes) {
  IdentifiabilityVerdict v;
  v.adjustment_set = set_difference(all_vars(n_causes), vars);
  v.vars = std::move(vars);
  v.admissible = true;
  v.reason = "override";
  v.overridden = true;
  return v;
}

}  // namespace icmaxent
