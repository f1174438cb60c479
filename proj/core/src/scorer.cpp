#include "cfprm/scorer.hpp"

#include <string>

#include "cfprm/errors.hpp"
#include "cfprm/rng.hpp"

namespace cfprm {

std::string_view to_string(Arch a) noexcept { return a == Arch::kLinear ? "linear" : "mlp1"; }

Arch arch_from_string(std::string_view s) {
  if (s == "linear") return Arch::kLinear;
  if (s == "mlp1") return Arch::kMlp1;
  throw ConfigError("unknown scorer architecture \"" + std::string(s) + "\"");
}

std::size_t ScorerParams::param_count(Arch arch, std::size_t dim, std::size_t hidden) noexcept {
  return arch == Arch::kLinear ? dim + 1 : dim * hidden + hidden + hidden + 1;
}

ScorerParams ScorerParams::zeros(Arch arch, std::size_t dim, std::size_t hidden) {
  ScorerParams p;
  p.arch = arch;
  p.dim = dim;
  p.hidden = arch == Arch::kLinear ? 0 : hidden;
  p.weights.assign(param_count(arch, dim, p.hidden), 0.0);
  return p;
}

ScorerParams ScorerParams::initial(Arch arch, std::uint64_t seed, std::size_t dim,
                                   std::size_t hidden) {
  ScorerParams p = zeros(arch, dim, hidden);
  if (arch == Arch::kMlp1) {
    Rng rng = Rng(seed).split("scorer-init");
    for (double& w : p.weights) w = rng.uniform(-0.01, 0.01);
  }
  return p;
}

void ScorerParams::check_shape() const {
  if (arch == Arch::kMlp1 && hidden == 0) throw DimensionMismatch("mlp1 requires hidden > 0");
  if (weights.size() != param_count()) {
    throw DimensionMismatch("expected " + std::to_string(param_count()) + " weights for " +
                            std::string(to_string(arch)) + " D=" + std::to_string(dim) +
                            ", found " + std::to_string(weights.size()));
  }
}

namespace {

void check_input(const ScorerParams& params, const FeatureVector& x) {
  if (x.dim() != params.dim) {
    throw DimensionMismatch("feature dimension " + std::to_string(x.dim()) +
                            " does not match scorer dimension " + std::to_string(params.dim));
  }
}

// Hidden pre-activations W1^T x + b1.
std::vector<double> hidden_preact(const ScorerParams& p, const FeatureVector& x) {
  const std::size_t H = p.hidden;
  const double* b1 = p.weights.data() + p.dim * H;
  std::vector<double> z(b1, b1 + H);
  for (const auto& e : x.entries()) {
    const double* col = p.weights.data() + static_cast<std::size_t>(e.index) * H;
    for (std::size_t h = 0; h < H; ++h) z[h] += col[h] * e.value;
  }
  return z;
}

}  // namespace

double forward(const ScorerParams& params, const FeatureVector& x) {
  check_input(params, x);
  const auto& w = params.weights;
  if (params.arch == Arch::kLinear) {
    double raw = w[params.dim];
    for (const auto& e : x.entries()) raw += w[e.index] * e.value;
    return raw;
  }
  const std::size_t H = params.hidden;
  const auto z = hidden_preact(params, x);
  const double* w2 = w.data() + params.dim * H + H;
  double raw = w2[H];
  for (std::size_t h = 0; h < H; ++h) raw += w2[h] * std::tanh(z[h]);
  return raw;
}

void accumulate_gradient(const ScorerParams& params, const FeatureVector& x, double dloss_draw,
                         std::span<double> grad) {
  check_input(params, x);
  if (grad.size() != params.param_count()) {
    throw DimensionMismatch("gradient buffer has wrong length");
  }
  if (params.arch == Arch::kLinear) {
    for (const auto& e : x.entries()) grad[e.index] += dloss_draw * e.value;
    grad[params.dim] += dloss_draw;
    return;
  }
  const std::size_t H = params.hidden;
  const std::size_t b1_off = params.dim * H;
  const std::size_t w2_off = b1_off + H;
  const auto z = hidden_preact(params, x);
  std::vector<double> dz(H);
  for (std::size_t h = 0; h < H; ++h) {
    const double a = std::tanh(z[h]);
    grad[w2_off + h] += dloss_draw * a;
    dz[h] = dloss_draw * params.weights[w2_off + h] * (1.0 - a * a);
    grad[b1_off + h] += dz[h];
  }
  grad[w2_off + H] += dloss_draw;
  for (const auto& e : x.entries()) {
    double* col = grad.data() + static_cast<std::size_t>(e.index) * H;
    for (std::size_t h = 0; h < H; ++h) col[h] += dz[h] * e.value;
  }
}

StepScore score_step(const ScorerParams& params, std::string_view query,
                     std::span<const Step> prefix) {
  if (prefix.empty()) throw EmptyTrajectoryError("score_step needs at least one step");
  std::string partial;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (i) partial += kStepSeparator;
    partial += prefix[i].text;
  }
  return score(params, featurize(query, partial, params.dim));
}

}  // namespace cfprm
