#pragma once

// Experiment pipelines behind the CLI: causal feature selection with all causes
// intervened (setting 1), with a growing share of intervened causes (setting 2),
// and joint interventional estimation from single-variable data (joint).
//
// Pipelines see the ground truth only through SampleSource, which exposes data
// and P(X) but not the parents of Y. Labels are attached by the drivers after
// scoring.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "icmaxent/select.hpp"
#include "icmaxent/solver.hpp"
#include "icmaxent/synth.hpp"
#include "icmaxent/types.hpp"

namespace icmaxent::bench {

/// Built-in structures over five causes. (a) latent U1 -> {X1,X2,X3}, U2 -> {X4,X5};
/// (b) one latent over all five; (c) = (a) plus X1 -> X2.
GraphSpec default_structure(char name);

/// "a", "b", "c" or the path of a graph file.
GraphSpec resolve_structure(const std::string& name);

enum class PxMode { exact, marginals };
enum class Method { icmaxent, cmaxent };

std::string_view to_string(PxMode mode);
std::string_view to_string(Method method);
PxMode parse_px_mode(std::string_view name);

struct ExperimentConfig {
  GraphSpec structure;
  std::size_t n_graphs = 200;
  std::size_t n_samples = 100;  ///< per dataset; interventional data per clamped configuration
  std::uint64_t seed = 0;
  SolverOptions solver;
  PxMode px = PxMode::exact;
  /// Per-graph notes (non-convergence); nullptr silences them.
  std::ostream* log = nullptr;

  void validate() const;
};

/// What a pipeline may learn about the system under study.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual std::size_t n_causes() const = 0;
  virtual Dataset observe(std::size_t n, std::uint64_t seed) const = 0;
  virtual Dataset intervene(const Intervention& iv, std::size_t n, std::uint64_t seed) const = 0;
  virtual JointTable joint_x() const = 0;
};

class ScmSource : public SampleSource {
 public:
  explicit ScmSource(const ScmInstance& scm) : scm_(scm) {}

  std::size_t n_causes() const override { return scm_.n_causes(); }
  Dataset observe(std::size_t n, std::uint64_t seed) const override;
  Dataset intervene(const Intervention& iv, std::size_t n, std::uint64_t seed) const override;
  JointTable joint_x() const override { return exact_joint_X(scm_); }

 private:
  const ScmInstance& scm_;
};

/// P(X) handed to the solver: the exact joint, or the product of its marginals.
JointTable observational_px(const SampleSource& source, PxMode mode);

/// Empirical constraints for one graph. Datasets are drawn lazily and cached, so every
/// pipeline run on the same graph sees the same samples. An observational sample with an
/// empty cell is redrawn from a fresh stream (at most 10 attempts).
class ConstraintFactory {
 public:
  ConstraintFactory(const SampleSource& source, std::size_t n_samples, std::uint64_t seed);

  ConstraintSpec conditional(const VarSet& vars);
  ConstraintSpec interventional(const VarSet& vars);

 private:
  const Dataset& observational(const VarSet& vars);

  const SampleSource& source_;
  std::size_t n_samples_;
  std::uint64_t seed_;
  std::vector<Dataset> observational_;
  std::vector<std::pair<VarSet, std::vector<Dataset>>> interventional_;
};

/// Single-variable constraints for every cause: interventional for the causes in
/// `intervened` that pass the gate (or all of them under allow_unidentifiable), conditional
/// otherwise.
std::vector<ConstraintSpec> single_variable_constraints(ConstraintFactory& factory,
                                                        const GraphSpec& structure,
                                                        const VarSet& intervened,
                                                        bool allow_unidentifiable);

/// Causes whose atomic intervention passes the gate, lowest index first.
VarSet admissible_pool(const GraphSpec& structure);

struct PipelineScores {
  std::vector<ThetaScore> scores;
  bool converged = false;
};

/// Fits one constraint set and scores every cause.
PipelineScores fit_and_score(std::vector<ConstraintSpec> constraints, const JointTable& px,
                             const GraphSpec& structure, const SolverOptions& options);

// --- setting 1 -------------------------------------------------------------

struct Setting1Row {
  std::size_t graph_id = 0;
  VarId var;
  double theta = 0.0;
  bool is_parent = false;
  Method method = Method::icmaxent;
  PxMode px = PxMode::exact;
  bool converged = false;
};

/// Unlabeled rows (is_parent false) for one graph: 2 methods x 2 P(X) modes.
std::vector<Setting1Row> setting1_graph(const SampleSource& source, const GraphSpec& structure,
                                        const ExperimentConfig& config, std::uint64_t data_seed);
std::vector<Setting1Row> run_setting1(const ExperimentConfig& config);

// --- setting 2 -------------------------------------------------------------

struct Setting2Row {
  std::size_t graph_id = 0;
  VarId var;
  double theta = 0.0;
  bool is_parent = false;
  std::size_t n_interventional = 0;
  bool converged = false;
};

/// k = 0 .. |admissible pool|; the first k admissible causes get interventional constraints.
std::vector<Setting2Row> setting2_graph(const SampleSource& source, const GraphSpec& structure,
                                        const ExperimentConfig& config, std::uint64_t data_seed);
std::vector<Setting2Row> run_setting2(const ExperimentConfig& config);

// --- joint interventional --------------------------------------------------

inline constexpr int kJointScenarios = 5;

struct JointRow {
  std::size_t graph_id = 0;
  int scenario = 1;
  int x1 = 0;
  int x2 = 0;
  double estimated = 0.0;
  double truth = 0.0;
  double residual = 0.0;
  bool converged = false;
};

/// Constraint sets of the five scenarios for a chosen pair (i, j):
/// 1 conditional on the pair plus single interventionals for the rest, 2 the pair only,
/// 3 single interventionals for all causes, 4 single conditionals for all, 5 none.
/// Interventional constraints go through the same gate as single_variable_constraints.
std::vector<ConstraintSpec> joint_scenario(int scenario, ConstraintFactory& factory,
                                           const GraphSpec& structure, VarId i, VarId j,
                                           bool allow_unidentifiable);

/// Estimated P(Y=1 | do(X1, X2)) for the four configurations; truth left at zero.
std::vector<JointRow> joint_graph(const SampleSource& source, const GraphSpec& structure,
                                  const ExperimentConfig& config, std::uint64_t data_seed);
std::vector<JointRow> run_joint(const ExperimentConfig& config);

// --- summaries -------------------------------------------------------------

double auc(const std::vector<Setting1Row>& rows, Method method, PxMode px);
double auc(const std::vector<Setting2Row>& rows, std::size_t n_interventional);

struct Interval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// AUC(a) - AUC(b) with a 95% percentile interval from resampling graphs with replacement.
Interval bootstrap_auc_difference(const std::vector<Setting1Row>& rows, Method a, Method b, PxMode px,
                                  std::size_t n_resamples, std::uint64_t seed);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> values);
double interquartile_range(std::vector<double> values);

// --- CSV -------------------------------------------------------------------

void write_setting1_csv(std::ostream& os, const std::vector<Setting1Row>& rows);
void write_setting2_csv(std::ostream& os, const std::vector<Setting2Row>& rows);
void write_joint_csv(std::ostream& os, const std::vector<JointRow>& rows);

}  // namespace icmaxent::bench
