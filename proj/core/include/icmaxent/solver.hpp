#pragma once

// Fitting the multipliers: minimize the sum of squared residuals between the
// empirical averages and the model expectations, restarting from the last
// multipliers while the residual norm stays above tolerance.

#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "icmaxent/model.hpp"
#include "icmaxent/types.hpp"

namespace icmaxent {

struct SolverOptions {
  double tolerance = 0.01;  ///< on the sum of squared residuals
  int max_restarts = 10;
  int max_iterations = 500;  ///< per run
  double epsilon_smoothing = std::numeric_limits<double>::epsilon();
  double gradient_tolerance = 1e-9;
  /// Admit interventional constraints that fail the identifiability gate.
  bool allow_unidentifiable = false;

  void validate() const;
};

/// (p_i + eps) / sum_j (p_j + eps).
JointTable smooth_joint(const JointTable& p, double eps);

/// Maximum-entropy joint under single-variable marginal constraints: the product table.
/// Each value is P(X_i = 1) and must lie strictly inside (0, 1).
JointTable merge_marginals_maxent(std::span<const double> marginals);

/// r = target - model expectation, one entry per multiplier slot, evaluated through the
/// model-core expectation operations.
std::vector<double> assemble_residuals(const MultiplierVector& lambda,
                                       std::span<const ConstraintSpec> constraints,
                                       const JointTable& p, const GraphSpec& graph,
                                       bool allow_unidentifiable = false);

/// The squared residual norm as a smooth function of lambda with its analytic gradient.
///
/// Every expectation is linear in P_lambda(Y=1 | x), which is a logistic function of
/// sum_m lambda_m * delta_m(x). With A the expectation weights, D the feature deltas
/// and v(x) = p1(x) (1 - p1(x)):  grad ||r||^2 = -2 D diag(v) A^T r.
class DualObjective {
 public:
  DualObjective(std::span<const ConstraintSpec> constraints, const JointTable& p);

  std::size_t size() const { return static_cast<std::size_t>(targets_.size()); }
  double value(const Eigen::VectorXd& lambda, Eigen::VectorXd* gradient = nullptr) const;
  Eigen::VectorXd residuals(const Eigen::VectorXd& lambda) const;

 private:
  Eigen::MatrixXd weights_;   // targets x configs
  Eigen::MatrixXd features_;  // multipliers x configs
  Eigen::VectorXd offsets_;
  Eigen::VectorXd targets_;
};

struct FitResult {
  MultiplierVector lambda;
  ConditionalModel model;
  FitReport report;
};

/// Non-convergence is reported through FitReport::converged, never thrown.
/// Throws IdentifiabilityError for inadmissible interventional constraints (unless
/// overridden), PositivityError for zero-probability conditioning events and
/// NumericError when the objective turns NaN.
FitResult fit(std::vector<ConstraintSpec> constraints, const JointTable& p, const GraphSpec& graph,
              const SolverOptions& options = {});

}  // namespace icmaxent
