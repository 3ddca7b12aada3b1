#pragma once

// Three-level synthetic structural causal models: latent confounders U over the
// causes X, directed edges among X, and Y with a random parent set drawn from X.
// Every variable is Bernoulli with P(Z=1 | PA_Z) tabulated per parent configuration.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "icmaxent/types.hpp"

namespace icmaxent {

/// splitmix64 of (seed, stream): independent generator streams per replicate.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct ScmNode {
  enum class Role { latent, cause, effect };
  Role role = Role::cause;
  /// Node indices of the parents; bit k of a CPT index is the value of parents[k].
  std::vector<std::size_t> parents;
  /// P(node = 1 | parent configuration).
  std::vector<double> cpt;
};

/// Node layout: latents [0, L), causes [L, L + D) in cause order, then Y.
class ScmInstance {
 public:
  /// Parent lists follow from the graph: for a cause, the latent groups that reach it
  /// (in group order) then its directed parents (ascending); for Y, graph.y_parents().
  /// CPT sizes must match; entries must lie in [0, 1].
  ScmInstance(GraphSpec graph, std::vector<std::vector<double>> latent_cpts,
              std::vector<std::vector<double>> cause_cpts, std::vector<double> y_cpt);

  const GraphSpec& graph() const { return graph_; }
  std::size_t n_causes() const { return graph_.n_causes(); }
  std::size_t n_latents() const { return graph_.confounders().size(); }
  std::size_t n_nodes() const { return nodes_.size(); }
  const std::vector<ScmNode>& nodes() const { return nodes_; }
  std::size_t cause_node(VarId v) const { return n_latents() + v.index; }
  std::size_t effect_node() const { return nodes_.size() - 1; }
  /// Ground-truth parent labels of Y (metadata for scoring).
  const VarSet& y_parents() const { return y_parent_labels_; }
  /// Node indices in an order where every parent precedes its children.
  const std::vector<std::size_t>& order() const { return order_; }

  /// P(node = 1) given a bitmask assignment of every node (bit = node index).
  double p_one(std::size_t node, std::uint64_t assignment) const;

  /// Same mechanisms with different ground-truth labels; used to check that fitting never
  /// consults the labels.
  ScmInstance relabeled(VarSet y_parent_labels) const;

 private:
  GraphSpec graph_;
  std::vector<ScmNode> nodes_;
  std::vector<std::size_t> order_;
  VarSet y_parent_labels_;
};

/// CPT entries i.i.d. Uniform(0.1, 0.9). Unless the template fixes y_parents, each cause
/// joins Y's parents with probability 0.5, redrawn until there is at least one parent and
/// at least one non-parent (requires D >= 2).
ScmInstance sample_scm(const GraphSpec& structure, std::uint64_t seed);

struct Intervention {
  VarSet vars;
  std::vector<std::uint8_t> values;

  Config config() const { return Config{vars, values}; }
  friend bool operator==(const Intervention&, const Intervention&) = default;
};

/// Rows of binary records over X_1..X_D and Y; latents are never recorded.
class Dataset {
 public:
  explicit Dataset(std::size_t n_causes, std::optional<Intervention> intervention = std::nullopt);

  std::size_t n_causes() const { return n_causes_; }
  std::size_t size() const { return y_.size(); }
  const std::optional<Intervention>& intervention() const { return intervention_; }
  std::vector<std::string> columns() const;

  /// Full configuration index of the causes in row i.
  std::uint32_t x(std::size_t i) const { return x_[i]; }
  std::uint8_t y(std::size_t i) const { return y_[i]; }
  /// Throws DomainError when a clamped column disagrees with the intervention.
  void add_row(std::uint32_t x, std::uint8_t y);

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t n_causes_ = 0;
  std::optional<Intervention> intervention_;
  std::uint32_t clamp_mask_ = 0;
  std::uint32_t clamp_bits_ = 0;
  std::vector<std::uint32_t> x_;
  std::vector<std::uint8_t> y_;
};

/// Topological Bernoulli sampling; intervened causes are clamped and their CPTs ignored.
Dataset ancestral_sample(const ScmInstance& scm, std::size_t n,
                         const std::optional<Intervention>& intervention, std::uint64_t seed);

/// Shape of a constraint whose targets are to be estimated from data.
struct ConstraintTemplate {
  ConstraintKind kind = ConstraintKind::conditional;
  VarSet cond_set;
  VarSet int_set;
  StatisticTable statistic;
};

/// Sample means of Y (or of the statistic) per configuration.
/// Marginal and conditional templates read observational datasets (pooled); interventional
/// templates read datasets whose intervention is on exactly int_set, one or more per
/// intervened configuration. Throws InsufficientDataError naming the first empty cell.
ConstraintSpec empirical_averages(std::span<const Dataset> datasets, const ConstraintTemplate& shape);

/// Exact P(Y=1 | do(c_int), c_cond) by truncated factorization over U and X.
double exact_query(const ScmInstance& scm, const Config& c_int, const Config& c_cond);

/// Exact P(X) with the latents summed out.
JointTable exact_joint_X(const ScmInstance& scm);

/// P(Y=1 | x) for every full configuration x of the causes.
std::vector<double> exact_effect_table(const ScmInstance& scm);

}  // namespace icmaxent
