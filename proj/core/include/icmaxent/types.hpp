#pragma once

// Domain types shared by every module: variable identifiers, configurations,
// causal structure, dense joint tables and constraint specifications.
//
// Bit conventions. A full configuration of D binary causes is an index in
// [0, 2^D) where bit i holds the value of cause i. A configuration restricted
// to an ordered variable set S is a "local" index in [0, 2^|S|) where bit k
// holds the value of S[k].

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace icmaxent {

/// Dense enumeration ceiling on the number of causes.
inline constexpr std::size_t kMaxCauses = 20;

struct VarId {
  std::uint32_t index = 0;

  constexpr VarId() = default;
  constexpr explicit VarId(std::uint32_t i) : index(i) {}

  friend constexpr auto operator<=>(VarId, VarId) = default;
};

/// Ordered set of distinct variables, strictly increasing by index.
using VarSet = std::vector<VarId>;

VarSet make_varset(std::initializer_list<std::uint32_t> indices);
VarSet all_vars(std::size_t n_causes);
VarSet set_union(const VarSet& a, const VarSet& b);
VarSet set_difference(const VarSet& a, const VarSet& b);
bool intersects(const VarSet& a, const VarSet& b);
bool contains(const VarSet& s, VarId v);

/// Throws DomainError unless `s` is strictly increasing with every index < n_causes.
void validate_varset(const VarSet& s, std::size_t n_causes, std::string_view what);

/// Bitmask of the variables in `s` within a full configuration index.
std::uint32_t var_mask(const VarSet& s);

/// Gather the bits of `full` at positions `vars` into a local index.
std::uint32_t project(std::uint32_t full, const VarSet& vars);

/// Scatter a local index over `vars` into full-configuration bit positions.
std::uint32_t embed(std::uint32_t local, const VarSet& vars);

/// Assignment of binary values to an ordered variable set.
struct Config {
  VarSet vars;
  std::vector<std::uint8_t> values;

  static Config from_local(const VarSet& vars, std::uint32_t local);
  static Config full(std::size_t n_causes, std::uint32_t index);
  /// Characters '0'/'1'; character k is the value of vars[k].
  static Config from_bitstring(const VarSet& vars, std::string_view bits);

  std::uint32_t local_index() const;
  std::string bitstring() const;
  void validate(std::size_t n_causes) const;

  friend bool operator==(const Config&, const Config&) = default;
};

std::string to_bitstring(std::uint32_t local, std::size_t width);
std::uint32_t parse_bitstring(std::string_view bits);

struct Edge {
  VarId from;
  VarId to;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Known structure among the potential causes. Y is implicit and always a sink.
/// Each confounder group is one latent root with an edge into every member.
class GraphSpec {
 public:
  GraphSpec() = default;
  GraphSpec(std::size_t n_causes, std::vector<Edge> directed_edges,
            std::vector<VarSet> confounders = {},
            std::optional<VarSet> y_parents = std::nullopt);

  std::size_t n_causes() const { return n_causes_; }
  const std::vector<Edge>& directed_edges() const { return directed_; }
  const std::vector<VarSet>& confounders() const { return confounders_; }
  const std::optional<VarSet>& y_parents() const { return y_parents_; }

  /// Unordered latent-confounder pairs (first < second) implied by the groups.
  std::vector<std::pair<VarId, VarId>> confounder_pairs() const;
  VarSet children(VarId v) const;
  VarSet parents(VarId v) const;
  /// Causes in a topological order of the directed part; ties by index.
  std::vector<VarId> topological_order() const;

  GraphSpec with_y_parents(std::optional<VarSet> parents) const;
  GraphSpec with_edge(Edge e) const;

  friend bool operator==(const GraphSpec&, const GraphSpec&) = default;

 private:
  std::size_t n_causes_ = 0;
  std::vector<Edge> directed_;
  std::vector<VarSet> confounders_;
  std::optional<VarSet> y_parents_;
};

/// P(X) as a dense table over 2^D configurations.
class JointTable {
 public:
  JointTable() = default;
  /// Validates: size 2^D, entries >= 0, sum 1 within 1e-9.
  JointTable(std::size_t n_causes, std::vector<double> probs);

  static JointTable uniform(std::size_t n_causes);

  std::size_t n_causes() const { return n_causes_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::uint32_t x) const { return probs_[x]; }
  std::span<const double> probs() const { return probs_; }

  bool strictly_positive() const;
  /// Probability of a partial configuration.
  double probability(const Config& c) const;
  /// Marginal table over `keep`; its variable k is keep[k].
  JointTable marginal(const VarSet& keep) const;

  friend bool operator==(const JointTable&, const JointTable&) = default;

 private:
  std::size_t n_causes_ = 0;
  std::vector<double> probs_;
};

/// f_k : Y x X_S -> R stored densely; entry (y, local) at y * 2^|S| + local.
class StatisticTable {
 public:
  StatisticTable() : StatisticTable(identity_y()) {}
  StatisticTable(VarSet scope, std::vector<double> values);

  /// f(y, .) = y.
  static StatisticTable identity_y();

  const VarSet& scope() const { return scope_; }
  std::span<const double> values() const { return values_; }
  double operator()(int y, std::uint32_t local) const {
    return values_[(static_cast<std::size_t>(y) << scope_.size()) + local];
  }
  /// Value at a full configuration index.
  double at_full(int y, std::uint32_t full) const { return (*this)(y, project(full, scope_)); }
  bool is_identity_y() const;

  friend bool operator==(const StatisticTable&, const StatisticTable&) = default;

 private:
  VarSet scope_;
  std::vector<double> values_;
};

enum class ConstraintKind { marginal, conditional, interventional };

std::string_view to_string(ConstraintKind kind);
ConstraintKind parse_constraint_kind(std::string_view name);

/// One constraint with its empirical averages.
///
/// Targets are indexed by local configuration over scope(): the statistic scope
/// is irrelevant for marginal constraints (one scalar target), and for the other
/// kinds scope() is the sorted union of int_set and cond_set.
struct ConstraintSpec {
  ConstraintKind kind = ConstraintKind::conditional;
  StatisticTable statistic;
  VarSet cond_set;
  VarSet int_set;
  std::vector<double> targets;

  static ConstraintSpec marginal(StatisticTable statistic, double target);
  static ConstraintSpec conditional(VarSet cond_set, std::vector<double> targets);
  static ConstraintSpec interventional(VarSet int_set, VarSet cond_set,
                                       std::vector<double> targets);

  VarSet scope() const;
  std::size_t n_targets() const { return targets.size(); }
  void validate(std::size_t n_causes) const;

  friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;
};

/// Position of one multiplier: constraints in declaration order, then local
/// configurations in ascending order.
struct MultiplierSlot {
  std::size_t constraint = 0;
  std::uint32_t config = 0;
};

std::vector<MultiplierSlot> multiplier_layout(std::span<const ConstraintSpec> constraints);
std::size_t count_multipliers(std::span<const ConstraintSpec> constraints);

struct MultiplierVector {
  std::vector<double> entries;

  std::size_t size() const { return entries.size(); }
  double operator[](std::size_t i) const { return entries[i]; }

  friend bool operator==(const MultiplierVector&, const MultiplierVector&) = default;
};

struct FitReport {
  double residual_norm = 0.0;  ///< sum of squared residuals
  int restarts = 0;
  bool converged = false;
  bool optimizer_success = false;
  int iterations = 0;
  double conditional_entropy = 0.0;  ///< nats
  std::vector<double> norm_history;  ///< residual norm after each run
};

struct IdentifiabilityVerdict {
  VarSet vars;
  bool admissible = false;
  VarSet adjustment_set;
  std::string reason;
  bool overridden = false;

  /// Verdict forced admissible by an explicit caller override.
  static IdentifiabilityVerdict forced(VarSet vars, std::size_t n_causes);
};

}  // namespace icmaxent
