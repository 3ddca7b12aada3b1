#include "icmaxent/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "icmaxent/errors.hpp"

namespace icmaxent {

double theta(double l1, double l2) {
  if (!std::isfinite(l1) || !std::isfinite(l2)) throw DomainError("theta: multipliers must be finite");
  const double diff = std::abs(l1 - l2);
  return diff / std::max({std::abs(l1), std::abs(l2), diff, 1.0});
}

namespace {

// True for a conditional or interventional constraint on exactly one cause.
bool single_variable(const ConstraintSpec& c, VarId& var) {
  if (c.kind == ConstraintKind::conditional && c.cond_set.size() == 1) {
    var = c.cond_set.front();
    return true;
  }
  if (c.kind == ConstraintKind::interventional && c.int_set.size() == 1 && c.cond_set.empty()) {
    var = c.int_set.front();
    return true;
  }
  return false;
}

}  // namespace

ScoreSet score_all(const ConditionalModel& model) {
  if (!model.populated()) throw InvalidModelError("score_all: model has no populated normalizer");
  const auto& constraints = model.constraints();
  std::map<std::uint32_t, std::size_t> offset_of;  // cause -> first multiplier index
  std::size_t offset = 0;
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    VarId var;
    if (single_variable(constraints[k], var)) {
      if (!offset_of.emplace(var.index, offset).second) {
        throw AmbiguityError("cause " + std::to_string(var.index) +
                             " carries more than one single-variable constraint");
      }
    }
    offset += constraints[k].n_targets();
  }

  ScoreSet out;
  const auto& lambda = model.lambda();
  for (std::uint32_t i = 0; i < model.n_causes(); ++i) {
    const auto it = offset_of.find(i);
    if (it == offset_of.end()) {
      out.warnings.push_back({VarId{i}, "no single-variable conditional or interventional constraint"});
      continue;
    }
    const double l0 = lambda[it->second];
    const double l1 = lambda[it->second + 1];
    out.scores.push_back({VarId{i}, theta(l0, l1), {l0, l1}});
  }
  return out;
}

RocCurve roc(std::span<const LabeledScore> scores) {
  std::size_t positives = 0;
  for (const auto& s : scores) {
    if (!std::isfinite(s.theta)) throw DomainError("roc: scores must be finite");
    positives += s.is_parent ? 1 : 0;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw DegenerateLabelsError("roc: need at least one positive and one negative label");
  }

  std::vector<LabeledScore> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore& a, const LabeledScore& b) { return a.theta > b.theta; });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double threshold = sorted[i].theta;
    for (; i < sorted.size() && sorted[i].theta == threshold; ++i) {
      (sorted[i].is_parent ? tp : fp) += 1;
    }
    const RocPoint next{threshold, static_cast<double>(fp) / static_cast<double>(negatives),
                        static_cast<double>(tp) / static_cast<double>(positives)};
    const RocPoint& prev = curve.points.back();
    curve.auc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) / 2.0;
    curve.points.push_back(next);
  }
  return curve;
}

RocCurve roc(const std::vector<std::vector<LabeledScore>>& per_graph) {
  std::vector<LabeledScore> pooled;
  for (const auto& g : per_graph) pooled.insert(pooled.end(), g.begin(), g.end());
  return roc(pooled);
}

}  // namespace icmaxent
