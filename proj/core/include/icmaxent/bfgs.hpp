#pragma once

#include <functional>

#include <Eigen/Dense>

namespace icmaxent {

struct BfgsOptions {
  int max_iterations = 500;
  /// Success when the infinity norm of the gradient falls to this value.
  double gradient_tolerance = 1e-9;
  /// Sufficient-decrease constant of the Armijo backtracking line search.
  double armijo = 1e-4;
  int max_backtracks = 60;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  bool success = false;
};

/// Returns f(x) and writes the gradient into *grad.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

/// Dense BFGS on the inverse Hessian with a monotone backtracking line search.
/// Deterministic: no randomized steps. The returned value never exceeds f(x0).
BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options = {});

}  // namespace icmaxent
