#pragma once

// The maximum-entropy conditional P_lambda(Y | X) over binary Y and its
// expectations under a known P(X), all by exact enumeration over 2^D configs.
//
//   P_lambda(y | x) = exp( sum_m lambda_m * phi_m(y, x) + beta(x) )
//   beta(x)         = -log sum_y exp( sum_m lambda_m * phi_m(y, x) )
//
// A marginal constraint contributes phi(y, x) = f(y, x_S). A conditional or
// interventional constraint contributes one multiplier per configuration c of
// its scope with phi(y, x) = y * [x_scope == c].

#include <cstdint>
#include <span>
#include <vector>

#include "icmaxent/types.hpp"

namespace icmaxent {

class ConditionalModel {
 public:
  /// Unpopulated; every evaluation throws InvalidModelError.
  ConditionalModel() = default;

  std::size_t n_causes() const { return n_causes_; }
  const std::vector<ConstraintSpec>& constraints() const { return constraints_; }
  const MultiplierVector& lambda() const { return lambda_; }
  std::span<const double> log_norm() const { return log_norm_; }
  bool populated() const { return !log_norm_.empty(); }

  /// P_lambda(Y = y | x) for a full configuration index.
  double prob(int y, std::uint32_t x) const;
  double prob_y1(std::uint32_t x) const { return prob(1, x); }
  /// Unnormalized log-score sum_m lambda_m * phi_m(y, x).
  double score(int y, std::uint32_t x) const;

 private:
  friend ConditionalModel normalize(std::size_t, std::vector<ConstraintSpec>, MultiplierVector,
                                    std::size_t);
  void require_populated() const;

  std::size_t n_causes_ = 0;
  std::vector<ConstraintSpec> constraints_;
  MultiplierVector lambda_;
  std::vector<double> log_norm_;
  std::vector<double> score0_;
  std::vector<double> score1_;
};

/// Computes beta(x) for every configuration. Throws CapacityError when
/// n_causes > max_causes and DomainError on invalid constraints or a lambda of
/// the wrong length.
ConditionalModel normalize(std::size_t n_causes, std::vector<ConstraintSpec> constraints,
                           MultiplierVector lambda, std::size_t max_causes = kMaxCauses);

/// phi_m(1, x) - phi_m(0, x) for the multiplier of `constraint` at local config `local`.
double feature_delta(const ConstraintSpec& constraint, std::uint32_t local, std::uint32_t x);

/// P_lambda(Y = 1 | x); `x` must assign every cause.
double eval_conditional(const ConditionalModel& model, const Config& x);

/// P(x_rest | c) as a table over the causes not in c.vars (in increasing order).
JointTable condition_joint(const JointTable& p, const Config& c);

/// E[Y | x_S = c] = sum_{x_rest} P_lambda(Y=1 | c, x_rest) P(x_rest | c), S = c.vars.
double conditional_expectation(const ConditionalModel& model, const JointTable& p, const Config& c);

/// E[Y | do(x_I = c_int), x_C = c_cond] by back-door adjustment over the remaining causes R:
/// sum_{x_R} P_lambda(Y=1 | c_int, c_cond, x_R) P(x_R | c_cond). The verdict must cover
/// exactly c_int.vars and be admissible, otherwise IdentifiabilityError.
double interventional_expectation(const ConditionalModel& model, const JointTable& p,
                                  const IdentifiabilityVerdict& verdict, const Config& c_int,
                                  const Config& c_cond);

/// The adjustment sum above without the identifiability gate.
double adjusted_expectation(const ConditionalModel& model, const JointTable& p, const Config& c_int,
                            const Config& c_cond);

/// sum_{y,x} P_lambda(y | x) P(x) f(y, x_S).
double marginal_expectation(const ConditionalModel& model, const JointTable& p,
                            const StatisticTable& statistic);

/// H(Y | X) in nats.
double conditional_entropy(const ConditionalModel& model, const JointTable& p);

/// A constraint expectation written as a linear functional of P_lambda(Y=1 | .):
///   E = offset + sum_x weights[x] * P_lambda(Y=1 | x).
struct ExpectationFunctional {
  double offset = 0.0;
  std::vector<double> weights;
};

/// Linear form of the model expectation behind target `local` of `constraint`.
ExpectationFunctional expectation_functional(const ConstraintSpec& constraint, std::uint32_t local,
                                             const JointTable& p);

}  // namespace icmaxent
