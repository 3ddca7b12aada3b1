#include "icmaxent/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "icmaxent/errors.hpp"

namespace icmaxent {

namespace {

void require_same_size(const ConditionalModel& model, const JointTable& p) {
  if (model.n_causes() != p.n_causes()) {
    throw DomainError("model has " + std::to_string(model.n_causes()) + " causes but P(X) has " +
                      std::to_string(p.n_causes()));
  }
}

[[noreturn]] void throw_positivity(const Config& c) {
  throw PositivityError("conditioning event x_S=" + c.bitstring() +
                        " has zero probability; P(x) > 0 is required for every x (smooth P(X) first)");
}

}  // namespace

void ConditionalModel::require_populated() const {
  if (!populated()) throw InvalidModelError("conditional model has no populated normalizer");
}

double ConditionalModel::score(int y, std::uint32_t x) const {
  require_populated();
  return y == 1 ? score1_[x] : score0_[x];
}

double ConditionalModel::prob(int y, std::uint32_t x) const {
  require_populated();
  if (x >= log_norm_.size()) throw DomainError("configuration index out of range");
  return std::exp((y == 1 ? score1_[x] : score0_[x]) + log_norm_[x]);
}

ConditionalModel normalize(std::size_t n_causes, std::vector<ConstraintSpec> constraints,
                           MultiplierVector lambda, std::size_t max_causes) {
  if (n_causes > max_causes) {
    throw CapacityError(std::to_string(n_causes) + " causes exceed the enumeration ceiling of " +
                        std::to_string(max_causes));
  }
  for (const auto& c : constraints) c.validate(n_causes);
  if (lambda.size() != count_multipliers(constraints)) {
    throw DomainError("multiplier vector has " + std::to_string(lambda.size()) + " entries, expected " +
                      std::to_string(count_multipliers(constraints)));
  }
  for (double l : lambda.entries) {
    if (!std::isfinite(l)) throw NumericError("multiplier vector contains a non-finite entry");
  }

  const std::size_t n = std::size_t{1} << n_causes;
  std::vector<VarSet> scopes;
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const auto& c : constraints) {
    scopes.push_back(c.scope());
    offsets.push_back(offset);
    offset += c.n_targets();
  }

  ConditionalModel m;
  m.n_causes_ = n_causes;
  m.score0_.assign(n, 0.0);
  m.score1_.assign(n, 0.0);
  m.log_norm_.assign(n, 0.0);
  for (std::uint32_t x = 0; x < n; ++x) {
    double s0 = 0.0;
    double s1 = 0.0;
    for (std::size_t k = 0; k < constraints.size(); ++k) {
      const auto& c = constraints[k];
      const std::uint32_t local = project(x, scopes[k]);
      if (c.kind == ConstraintKind::marginal) {
        const double l = lambda[offsets[k]];
        s0 += l * c.statistic(0, local);
        s1 += l * c.statistic(1, local);
      } else {
        s1 += lambda[offsets[k] + local];
      }
    }
    const double hi = std::max(s0, s1);
    m.score0_[x] = s0;
    m.score1_[x] = s1;
    m.log_norm_[x] = -(hi + std::log(std::exp(s0 - hi) + std::exp(s1 - hi)));
  }
  m.constraints_ = std::move(constraints);
  m.lambda_ = std::move(lambda);
  return m;
}

double feature_delta(const ConstraintSpec& constraint, std::uint32_t local, std::uint32_t x) {
  if (constraint.kind == ConstraintKind::marginal) {
    return constraint.statistic.at_full(1, x) - constraint.statistic.at_full(0, x);
  }
  return project(x, constraint.scope()) == local ? 1.0 : 0.0;
}

double eval_conditional(const ConditionalModel& model, const Config& x) {
  if (!model.populated()) throw InvalidModelError("conditional model has no populated normalizer");
  x.validate(model.n_causes());
  if (x.vars.size() != model.n_causes()) {
    throw DomainError("eval_conditional needs a configuration of all " +
                      std::to_string(model.n_causes()) + " causes");
  }
  return model.prob_y1(x.local_index());
}

JointTable condition_joint(const JointTable& p, const Config& c) {
  c.validate(p.n_causes());
  const VarSet rest = set_difference(all_vars(p.n_causes()), c.vars);
  const std::uint32_t mask = var_mask(c.vars);
  const std::uint32_t want = embed(c.local_index(), c.vars);
  std::vector<double> out(std::size_t{1} << rest.size(), 0.0);
  double total = 0.0;
  for (std::uint32_t x = 0; x < p.size(); ++x) {
    if ((x & mask) != want) continue;
    out[project(x, rest)] += p[x];
    total += p[x];
  }
  if (!(total > 0.0)) throw_positivity(c);
  for (double& v : out) v /= total;
  return JointTable(rest.size(), std::move(out));
}

double conditional_expectation(const ConditionalModel& model, const JointTable& p, const Config& c) {
  require_same_size(model, p);
  c.validate(p.n_causes());
  const std::uint32_t mask = var_mask(c.vars);
  const std::uint32_t want = embed(c.local_index(), c.vars);
  double num = 0.0;
  double den = 0.0;
  for (std::uint32_t x = 0; x < p.size(); ++x) {
    if ((x & mask) != want) continue;
    num += p[x] * model.prob_y1(x);
    den += p[x];
  }
  if (!(den > 0.0)) throw_positivity(c);
  return num / den;
}

double adjusted_expectation(const ConditionalModel& model, const JointTable& p, const Config& c_int,
                            const Config& c_cond) {
  require_same_size(model, p);
  c_int.validate(p.n_causes());
  c_cond.validate(p.n_causes());
  if (intersects(c_int.vars, c_cond.vars)) {
    throw DomainError("intervened and conditioned variable sets must be disjoint");
  }
  // P(x_R, x_C) is the marginal over every cause that is not intervened on.
  const VarSet keep = set_difference(all_vars(p.n_causes()), c_int.vars);
  const JointTable kept = p.marginal(keep);
  const std::uint32_t mask = var_mask(c_int.vars) | var_mask(c_cond.vars);
  const std::uint32_t want = embed(c_int.local_index(), c_int.vars) |
                             embed(c_cond.local_index(), c_cond.vars);
  double num = 0.0;
  double den = 0.0;
  for (std::uint32_t x = 0; x < p.size(); ++x) {
    if ((x & mask) != want) continue;
    const double w = kept[project(x, keep)];
    num += w * model.prob_y1(x);
    den += w;
  }
  if (!(den > 0.0)) throw_positivity(c_cond);
  return num / den;
}

double interventional_expectation(const ConditionalModel& model, const JointTable& p,
                                  const IdentifiabilityVerdict& verdict, const Config& c_int,
                                  const Config& c_cond) {
  if (verdict.vars != c_int.vars) {
    throw IdentifiabilityError("identifiability verdict does not cover the intervened set");
  }
  if (!verdict.admissible) {
    throw IdentifiabilityError("interventional query is not identifiable from the known structure (" +
                               verdict.reason + ")");
  }
  return adjusted_expectation(model, p, c_int, c_cond);
}

double marginal_expectation(const ConditionalModel& model, const JointTable& p,
                            const StatisticTable& statistic) {
  require_same_size(model, p);
  validate_varset(statistic.scope(), p.n_causes(), "statistic scope");
  double total = 0.0;
  for (std::uint32_t x = 0; x < p.size(); ++x) {
    const double p1 = model.prob_y1(x);
    total += p[x] * ((1.0 - p1) * statistic.at_full(0, x) + p1 * statistic.at_full(1, x));
  }
  return total;
}

double conditional_entropy(const ConditionalModel& model, const JointTable& p) {
  require_same_size(model, p);
  double h = 0.0;
  for (std::uint32_t x = 0; x < p.size(); ++x) {
    for (int y = 0; y < 2; ++y) {
      const double q = model.prob(y, x);
      if (q > 0.0) h -= p[x] * q * std::log(q);
    }
  }
  return h;
}

ExpectationFunctional expectation_functional(const ConstraintSpec& constraint, std::uint32_t local,
                                             const JointTable& p) {
  ExpectationFunctional f;
  f.weights.assign(p.size(), 0.0);
  switch (constraint.kind) {
    case ConstraintKind::marginal: {
      const auto& stat = constraint.statistic;
      for (std::uint32_t x = 0; x < p.size(); ++x) {
        f.offset += p[x] * stat.at_full(0, x);
        f.weights[x] = p[x] * (stat.at_full(1, x) - stat.at_full(0, x));
      }
      return f;
    }
    case ConstraintKind::conditional: {
      const VarSet& s = constraint.cond_set;
      const std::uint32_t mask = var_mask(s);
      const std::uint32_t want = embed(local, s);
      double den = 0.0;
      for (std::uint32_t x = 0; x < p.size(); ++x) {
        if ((x & mask) == want) {
          f.weights[x] = p[x];
          den += p[x];
        }
      }
      if (!(den > 0.0)) throw_positivity(Config::from_local(s, local));
      for (double& w : f.weights) w /= den;
      return f;
    }
    case ConstraintKind::interventional: {
      const VarSet scope = constraint.scope();
      const VarSet keep = set_difference(all_vars(p.n_causes()), constraint.int_set);
      const JointTable kept = p.marginal(keep);
      const std::uint32_t mask = var_mask(scope);
      const std::uint32_t want = embed(local, scope);
      double den = 0.0;
      for (std::uint32_t x = 0; x < p.size(); ++x) {
        if ((x & mask) == want) {
          f.weights[x] = kept[project(x, keep)];
          den += f.weights[x];
        }
      }
      if (!(den > 0.0)) throw_positivity(Config::from_local(scope, local));
      for (double& w : f.weights) w /= den;
      return f;
    }
  }
  return f;
}

}  // namespace icmaxent
