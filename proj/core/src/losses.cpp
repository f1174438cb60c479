#include "cfprm/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cfprm/errors.hpp"

namespace cfprm {

std::string_view to_string(LossKind k) noexcept {
  switch (k) {
    case LossKind::kBce: return "bce";
    case LossKind::kMse: return "mse";
    case LossKind::kQRanking: return "qranking";
  }
  return "?";
}

LossKind loss_kind_from_string(std::string_view s) {
  if (s == "bce") return LossKind::kBce;
  if (s == "mse") return LossKind::kMse;
  if (s == "qranking") return LossKind::kQRanking;
  throw ConfigError("unknown loss \"" + std::string(s) + "\"");
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

void check_pointwise(std::span<const StepScore> scores, std::span<const double> labels) {
  if (scores.empty()) throw DimensionMismatch("loss needs at least one step");
  if (scores.size() != labels.size()) {
    throw DimensionMismatch("scores and labels differ in length (" +
                            std::to_string(scores.size()) + " vs " +
                            std::to_string(labels.size()) + ")");
  }
}

}  // namespace

LossGrad loss_bce(std::span<const StepScore> scores, std::span<const double> labels) {
  check_pointwise(scores, labels);
  LossGrad out;
  out.grad.resize(scores.size());
  for (std::size_t t = 0; t < scores.size(); ++t) {
    const double raw = scores[t].raw;
    const double y = labels[t];
    // -log r = softplus(-raw), -log(1 - r) = softplus(raw)
    out.value += y * softplus(-raw) + (1.0 - y) * softplus(raw);
    out.grad[t] = sigmoid(raw) - y;
  }
  return out;
}

LossGrad loss_mse(std::span<const StepScore> scores, std::span<const double> labels) {
  check_pointwise(scores, labels);
  LossGrad out;
  out.grad.resize(scores.size());
  for (std::size_t t = 0; t < scores.size(); ++t) {
    const double r = sigmoid(scores[t].raw);
    const double diff = r - labels[t];
    out.value += diff * diff;
    out.grad[t] = 2.0 * diff * r * (1.0 - r);
  }
  return out;
}

QRankingGrad loss_qranking(std::span<const double> correct_raw,
                           std::span<const double> negative_raw, const QRankingConfig& cfg) {
  if (correct_raw.empty()) throw NoCorrectStepsError("Q-ranking loss needs a correct step");
  const std::size_t n = correct_raw.size();
  const double norm =
      static_cast<double>(cfg.normalization == QRankNormalization::kAllSteps
                              ? n + negative_raw.size()
                              : n);

  double log_neg = kNegInf;
  for (double q : negative_raw) log_neg = log_add_exp(log_neg, q + cfg.margin);

  // log S_t = log( sum_{q<=t} exp r_q + sum_w exp(Q_w + margin) )
  std::vector<double> log_denom(n);
  double acc = log_neg;
  double total = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    acc = log_add_exp(acc, correct_raw[t]);
    log_denom[t] = acc;
    total += acc - correct_raw[t];
  }

  QRankingGrad out;
  out.value = total / norm;

  // dL/dr_k = (exp(r_k) * sum_{t>=k} 1/S_t - 1) / N, suffix sums kept in log space.
  out.correct_grad.resize(n);
  double log_suffix = kNegInf;
  for (std::size_t k = n; k-- > 0;) {
    log_suffix = log_add_exp(log_suffix, -log_denom[k]);
    out.correct_grad[k] = (std::exp(correct_raw[k] + log_suffix) - 1.0) / norm;
  }
  // dL/dQ_w = exp(Q_w + margin) * sum_t 1/S_t / N
  out.negative_grad.resize(negative_raw.size());
  for (std::size_t w = 0; w < negative_raw.size(); ++w) {
    out.negative_grad[w] = std::exp(negative_raw[w] + cfg.margin + log_suffix) / norm;
  }
  return out;
}

}  // namespace cfprm
