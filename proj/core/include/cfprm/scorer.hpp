#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cfprm/features.hpp"
#include "cfprm/types.hpp"

namespace cfprm {

enum class Arch : std::uint32_t { kLinear = 0, kMlp1 = 1 };

std::string_view to_string(Arch a) noexcept;
Arch arch_from_string(std::string_view s);

inline constexpr std::size_t kDefaultHiddenDim = 64;

/// Weights of the reward model, stored flat.
///
/// linear: [w (D), b]
/// mlp1:   [W1 (D x H, feature-major: W1[j*H + h]), b1 (H), w2 (H), b2]
///         raw = w2 . tanh(W1^T x + b1) + b2
struct ScorerParams {
  Arch arch = Arch::kLinear;
  std::size_t dim = kDefaultFeatureDim;
  std::size_t hidden = 0;  // 0 for linear
  std::vector<double> weights;

  static std::size_t param_count(Arch arch, std::size_t dim, std::size_t hidden) noexcept;
  std::size_t param_count() const noexcept { return param_count(arch, dim, hidden); }

  /// All-zero parameters.
  static ScorerParams zeros(Arch arch, std::size_t dim = kDefaultFeatureDim,
                            std::size_t hidden = kDefaultHiddenDim);
  /// linear: zeros. mlp1: every weight uniform in [-0.01, 0.01] from `seed`.
  static ScorerParams initial(Arch arch, std::uint64_t seed, std::size_t dim = kDefaultFeatureDim,
                              std::size_t hidden = kDefaultHiddenDim);

  /// Throws DimensionMismatch when the weight vector does not fit the shape.
  void check_shape() const;

  friend bool operator==(const ScorerParams&, const ScorerParams&) = default;
};

struct StepScore {
  double raw = 0.0;
  double reward = 0.5;
};

inline double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline StepScore make_score(double raw) noexcept { return {raw, sigmoid(raw)}; }

/// Pre-activation output for one feature vector.
double forward(const ScorerParams& params, const FeatureVector& x);

inline StepScore score(const ScorerParams& params, const FeatureVector& x) {
  return make_score(forward(params, x));
}

/// Adds `dloss_draw * d raw / d params` into `grad` (length param_count()).
void accumulate_gradient(const ScorerParams& params, const FeatureVector& x, double dloss_draw,
                         std::span<double> grad);

/// r(s_{1:t}, x): featurizes the query with the concatenation of `prefix`.
StepScore score_step(const ScorerParams& params, std::string_view query,
                     std::span<const Step> prefix);

}  // namespace cfprm
