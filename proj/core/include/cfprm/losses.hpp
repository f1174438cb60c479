#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "cfprm/scorer.hpp"
#include "cfprm/types.hpp"

namespace cfprm {

enum class LossKind { kBce, kMse, kQRanking };

std::string_view to_string(LossKind k) noexcept;
LossKind loss_kind_from_string(std::string_view s);

/// Loss value and its gradient with respect to each raw (pre-sigmoid) score.
struct LossGrad {
  double value = 0.0;
  std::vector<double> grad;
};

/// Negated Bernoulli log-likelihood summed over steps:
///   -sum_t [ y_t log r_t + (1 - y_t) log(1 - r_t) ],  d/draw_t = r_t - y_t.
/// Evaluated through softplus so saturated scores stay finite.
LossGrad loss_bce(std::span<const StepScore> scores, std::span<const double> labels);

/// sum_t (r_t - y_t)^2 with r_t = sigmoid(raw_t).
LossGrad loss_mse(std::span<const StepScore> scores, std::span<const double> labels);

/// Gradients of the Q-ranking loss, split by input group.
struct QRankingGrad {
  double value = 0.0;
  std::vector<double> correct_grad;
  std::vector<double> negative_grad;
};

/// Listwise ranking loss over the correct steps c_0..c_{n-1} (trajectory
/// order) against negatives W:
///
///   L = -1/N sum_t log( exp(r_{c_t}) /
///         (sum_{q<=t} exp(r_{c_q}) + sum_w exp(Q_w + margin)) )
///
/// Q_w is the raw score of negative w. N is the number of correct steps, or
/// correct + negative steps under QRankNormalization::kAllSteps. Throws
/// NoCorrectStepsError when `correct_raw` is empty.
QRankingGrad loss_qranking(std::span<const double> correct_raw,
                           std::span<const double> negative_raw, const QRankingConfig& cfg);

}  // namespace cfprm
