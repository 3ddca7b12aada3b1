#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "icmaxent/model.hpp"
#include "icmaxent/types.hpp"

namespace icmaxent {

/// Relative difference |l1 - l2| / max{|l1|, |l2|, |l1 - l2|, 1}, in [0, 1].
double theta(double l1, double l2);

struct ThetaScore {
  VarId var;
  double theta = 0.0;
  std::pair<double, double> lambda_pair;  ///< (lambda at x_i = 0, lambda at x_i = 1)
};

struct ScoreWarning {
  VarId var;
  std::string message;
};

struct ScoreSet {
  std::vector<ThetaScore> scores;  ///< ordered by variable
  std::vector<ScoreWarning> warnings;
};

/// Scores every cause that carries exactly one single-variable conditional or
/// interventional constraint. Causes without one are reported as warnings;
/// causes with two throw AmbiguityError.
ScoreSet score_all(const ConditionalModel& model);

struct LabeledScore {
  double theta = 0.0;
  bool is_parent = false;
};

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  ///< from (inf, 0, 0) to (min theta, 1, 1)
  double auc = 0.0;
};

/// Threshold sweep over the pooled scores (predict parent when theta >= threshold);
/// tied scores enter at the same step. AUC by the trapezoid rule.
/// Throws DegenerateLabelsError unless both classes are present.
RocCurve roc(std::span<const LabeledScore> scores);
RocCurve roc(const std::vector<std::vector<LabeledScore>>& per_graph);

}  // namespace icmaxent
