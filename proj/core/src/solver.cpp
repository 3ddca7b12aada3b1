#include "icmaxent/solver.hpp"

#include <cmath>
#include <string>

#include "icmaxent/bfgs.hpp"
#include "icmaxent/errors.hpp"
#include "icmaxent/identify.hpp"

namespace icmaxent {

void SolverOptions::validate() const {
  if (!(tolerance > 0.0)) throw DomainError("solver tolerance must be > 0");
  if (max_restarts < 1) throw DomainError("solver max_restarts must be >= 1");
  if (max_iterations < 1) throw DomainError("solver max_iterations must be >= 1");
  if (!(epsilon_smoothing > 0.0)) throw DomainError("smoothing epsilon must be > 0");
}

JointTable smooth_joint(const JointTable& p, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("smoothing epsilon must be finite and > 0");
  std::vector<double> out(p.probs().begin(), p.probs().end());
  double total = 0.0;
  for (double& v : out) {
    v += eps;
    total += v;
  }
  for (double& v : out) v /= total;
  return JointTable(p.n_causes(), std::move(out));
}

JointTable merge_marginals_maxent(std::span<const double> marginals) {
  if (marginals.size() > kMaxCauses) {
    throw CapacityError(std::to_string(marginals.size()) + " marginals exceed the ceiling of " +
                        std::to_string(kMaxCauses));
  }
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    if (!(marginals[i] > 0.0 && marginals[i] < 1.0)) {
      throw DomainError("marginal P(X" + std::to_string(i + 1) + "=1) must lie in (0,1)");
    }
  }
  const std::size_t n = std::size_t{1} << marginals.size();
  std::vector<double> probs(n, 1.0);
  for (std::uint32_t x = 0; x < n; ++x) {
    for (std::size_t i = 0; i < marginals.size(); ++i) {
      probs[x] *= ((x >> i) & 1u) ? marginals[i] : 1.0 - marginals[i];
    }
  }
  return JointTable(marginals.size(), std::move(probs));
}

namespace {

IdentifiabilityVerdict gate(const GraphSpec& graph, const ConstraintSpec& c, bool allow_unidentifiable) {
  auto verdict = intervenable_set(graph, c.int_set);
  if (!verdict.admissible && allow_unidentifiable) {
    return IdentifiabilityVerdict::forced(c.int_set, graph.n_causes());
  }
  return verdict;
}

void check_problem(std::span<const ConstraintSpec> constraints, const JointTable& p,
                   const GraphSpec& graph, bool allow_unidentifiable) {
  if (p.n_causes() != graph.n_causes()) {
    throw DomainError("P(X) covers " + std::to_string(p.n_causes()) + " causes but the graph has " +
                      std::to_string(graph.n_causes()));
  }
  for (const auto& c : constraints) c.validate(graph.n_causes());
  if (allow_unidentifiable) return;
  const auto verdicts = validate_constraints(graph, constraints);
  for (std::size_t k = 0; k < verdicts.size(); ++k) {
    if (!verdicts[k].admissible) {
      throw IdentifiabilityError("constraint " + std::to_string(k) +
                                 ": interventional distribution is not identifiable from the known "
                                 "structure (" + verdicts[k].reason + ")");
    }
  }
}

}  // namespace

std::vector<double> assemble_residuals(const MultiplierVector& lambda,
                                       std::span<const ConstraintSpec> constraints,
                                       const JointTable& p, const GraphSpec& graph,
                                       bool allow_unidentifiable) {
  check_problem(constraints, p, graph, allow_unidentifiable);
  const auto model = normalize(graph.n_causes(),
                               std::vector<ConstraintSpec>(constraints.begin(), constraints.end()),
                               lambda);
  std::vector<double> r;
  r.reserve(lambda.size());
  for (const auto& c : constraints) {
    switch (c.kind) {
      case ConstraintKind::marginal:
        r.push_back(c.targets[0] - marginal_expectation(model, p, c.statistic));
        break;
      case ConstraintKind::conditional:
        for (std::uint32_t local = 0; local < c.n_targets(); ++local) {
          r.push_back(c.targets[local] -
                      conditional_expectation(model, p, Config::from_local(c.cond_set, local)));
        }
        break;
      case ConstraintKind::interventional: {
        const VarSet scope = c.scope();
        const auto verdict = gate(graph, c, allow_unidentifiable);
        for (std::uint32_t local = 0; local < c.n_targets(); ++local) {
          const std::uint32_t full = embed(local, scope);
          const Config c_int = Config::from_local(c.int_set, project(full, c.int_set));
          const Config c_cond = Config::from_local(c.cond_set, project(full, c.cond_set));
          r.push_back(c.targets[local] - interventional_expectation(model, p, verdict, c_int, c_cond));
        }
        break;
      }
    }
  }
  return r;
}

DualObjective::DualObjective(std::span<const ConstraintSpec> constraints, const JointTable& p) {
  const auto slots = multiplier_layout(constraints);
  const auto n_configs = static_cast<Eigen::Index>(p.size());
  const auto m = static_cast<Eigen::Index>(slots.size());
  weights_.resize(m, n_configs);
  features_.resize(m, n_configs);
  offsets_.resize(m);
  targets_.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& c = constraints[slots[i].constraint];
    const auto f = expectation_functional(c, slots[i].config, p);
    offsets_[i] = f.offset;
    targets_[i] = c.targets[slots[i].config];
    for (Eigen::Index x = 0; x < n_configs; ++x) {
      weights_(i, x) = f.weights[x];
      features_(i, x) = feature_delta(c, slots[i].config, static_cast<std::uint32_t>(x));
    }
  }
}

Eigen::VectorXd DualObjective::residuals(const Eigen::VectorXd& lambda) const {
  const Eigen::ArrayXd logits = features_.transpose() * lambda;
  const Eigen::VectorXd p1 = (1.0 / (1.0 + (-logits).exp())).matrix();
  return targets_ - offsets_ - weights_ * p1;
}

double DualObjective::value(const Eigen::VectorXd& lambda, Eigen::VectorXd* gradient) const {
  const Eigen::ArrayXd logits = features_.transpose() * lambda;
  const Eigen::ArrayXd p1 = 1.0 / (1.0 + (-logits).exp());
  const Eigen::VectorXd r = targets_ - offsets_ - weights_ * p1.matrix();
  const double f = r.squaredNorm();
  if (std::isnan(f)) throw NumericError("residual norm evaluated to NaN");
  if (gradient != nullptr) {
    const Eigen::ArrayXd v = p1 * (1.0 - p1);
    const Eigen::ArrayXd q = (weights_.transpose() * r).array();
    *gradient = -2.0 * features_ * (v * q).matrix();
  }
  return f;
}

FitResult fit(std::vector<ConstraintSpec> constraints, const JointTable& p, const GraphSpec& graph,
              const SolverOptions& options) {
  options.validate();
  check_problem(constraints, p, graph, options.allow_unidentifiable);

  const DualObjective objective(constraints, p);
  const Objective f = [&objective](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    return objective.value(x, g);
  };
  BfgsOptions bfgs;
  bfgs.max_iterations = options.max_iterations;
  bfgs.gradient_tolerance = options.gradient_tolerance;

  FitReport report;
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(objective.size()));
  for (int run = 0;; ++run) {
    const auto result = minimize_bfgs(f, lambda, bfgs);
    lambda = result.x;
    report.iterations += result.iterations;
    report.optimizer_success = result.success;
    report.residual_norm = result.value;
    report.norm_history.push_back(result.value);
    report.restarts = run;
    if (result.value < options.tolerance || run >= options.max_restarts) break;
  }
  report.converged = report.residual_norm < options.tolerance;

  FitResult out;
  out.lambda.entries.assign(lambda.data(), lambda.data() + lambda.size());
  out.model = normalize(graph.n_causes(), std::move(constraints), out.lambda);
  out.report = std::move(report);
  out.report.conditional_entropy = conditional_entropy(out.model, p);
  return out;
}

}  // namespace icmaxent
