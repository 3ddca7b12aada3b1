#include "icmaxent/bfgs.hpp"

#include <cmath>

#include "icmaxent/errors.hpp"

namespace icmaxent {

BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options) {
  const Eigen::Index n = x0.size();
  BfgsResult r;
  r.x = std::move(x0);
  r.gradient = Eigen::VectorXd::Zero(n);
  r.value = f(r.x, &r.gradient);
  if (!std::isfinite(r.value) || !r.gradient.allFinite()) {
    throw NumericError("objective is not finite at the starting point");
  }
  if (n == 0) {
    r.success = true;
    return r;
  }

  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  bool h_is_identity = true;
  Eigen::VectorXd trial_grad(n);

  for (; r.iterations < options.max_iterations; ++r.iterations) {
    if (r.gradient.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
      r.success = true;
      return r;
    }
    Eigen::VectorXd dir = -h * r.gradient;
    double slope = r.gradient.dot(dir);
    if (!(slope < 0.0)) {
      h.setIdentity();
      h_is_identity = true;
      dir = -r.gradient;
      slope = r.gradient.dot(dir);
    }

    double step = 1.0;
    double trial_value = 0.0;
    Eigen::VectorXd trial;
    bool accepted = false;
    for (int b = 0; b < options.max_backtracks; ++b, step *= 0.5) {
      trial = r.x + step * dir;
      trial_value = f(trial, &trial_grad);
      if (std::isfinite(trial_value) && trial_grad.allFinite() &&
          trial_value <= r.value + options.armijo * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (h_is_identity) return r;  // steepest descent cannot make progress
      h.setIdentity();
      h_is_identity = true;
      continue;
    }

    const Eigen::VectorXd s = trial - r.x;
    const Eigen::VectorXd y = trial_grad - r.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (h_is_identity) h *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = h * y;
      // H+ = (I - rho s y^T) H (I - rho y s^T) + rho s s^T, expanded.
      h += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
      h_is_identity = false;
    }
    r.x = std::move(trial);
    r.value = trial_value;
    r.gradient = trial_grad;
  }
  r.success = r.gradient.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance;
  return r;
}

}  // namespace icmaxent
