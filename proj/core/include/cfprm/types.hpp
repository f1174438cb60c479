#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cfprm {

enum class StepLabel : unsigned char { kNegative = 0, kPositive = 1 };

/// "+" / "-" as stored in corpora.
std::string_view to_symbol(StepLabel label) noexcept;
/// Throws std::invalid_argument for anything but "+" or "-".
StepLabel label_from_symbol(std::string_view symbol);

/// Regression target y in {0.0, 1.0}.
constexpr double to_target(StepLabel label) noexcept {
  return label == StepLabel::kPositive ? 1.0 : 0.0;
}
/// Inverse of to_target; anything >= 0.5 is positive.
constexpr StepLabel label_from_target(double y) noexcept {
  return y >= 0.5 ? StepLabel::kPositive : StepLabel::kNegative;
}

struct Step {
  std::size_t index = 1;  // 1-based position in the trajectory
  std::string text;
  StepLabel label = StepLabel::kPositive;

  friend bool operator==(const Step&, const Step&) = default;
};

struct Trajectory {
  std::string query;
  std::vector<Step> steps;
  std::optional<bool> answer_correct;

  std::size_t size() const noexcept { return steps.size(); }
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Separator placed between step texts whenever steps are concatenated.
inline constexpr std::string_view kStepSeparator = "\n";

/// Concatenates steps [first, last] (1-based, inclusive) with kStepSeparator.
std::string join_steps(const Trajectory& t, std::size_t first, std::size_t last);

/// A contiguous span of steps treated as one holistic step. The label is
/// inherited from the step at span_end.
struct MergedSample {
  std::string query;
  std::size_t span_start = 1;
  std::size_t span_end = 1;
  std::string text;     // steps span_start..span_end joined
  std::string context;  // steps 1..span_start-1 joined; empty when span_start == 1
  StepLabel label = StepLabel::kPositive;
  std::size_t granularity = 1;
  std::size_t source_id = 0;  // position of the source trajectory in the input

  std::size_t length() const noexcept { return span_end - span_start + 1; }
  /// The partial solution s_{1:span_end} the scorer sees for this sample.
  std::string partial_solution() const;

  friend bool operator==(const MergedSample&, const MergedSample&) = default;
};

/// Per-granularity sample sets D_C. Traversed from the largest C down.
struct GranularCorpus {
  std::map<std::size_t, std::vector<MergedSample>, std::greater<>> buckets;
  std::size_t c_max = 1;

  std::size_t total_samples() const noexcept;
  /// Bucket keys in curriculum order (descending C).
  std::vector<std::size_t> traversal_order() const;
  const std::vector<MergedSample>& bucket(std::size_t c) const;

  friend bool operator==(const GranularCorpus&, const GranularCorpus&) = default;
};

/// Candidate solutions sampled for one query, for best-of-N selection.
struct CandidatePool {
  std::string query;
  std::vector<Trajectory> candidates;

  friend bool operator==(const CandidatePool&, const CandidatePool&) = default;
};

/// Which count normalizes the Q-ranking sum.
enum class QRankNormalization { kCorrectSteps, kAllSteps };

struct QRankingConfig {
  static constexpr double kDefaultMargin = 0.1;

  double margin = kDefaultMargin;  // zeta
  QRankNormalization normalization = QRankNormalization::kCorrectSteps;
  // Q_w is always the scorer's raw pre-activation output on the negative step.
};

std::string_view to_string(QRankNormalization n) noexcept;

/// Returns `t` unchanged when every invariant holds, otherwise throws
/// EmptyTrajectoryError, EmptyStepError or ContiguityError.
const Trajectory& validate_trajectory(const Trajectory& t);

/// Builds a trajectory from (text, label) pairs with indices 1..T.
Trajectory make_trajectory(std::string query,
                           std::span<const std::pair<std::string, StepLabel>> steps,
                           std::optional<bool> answer_correct = std::nullopt);

}  // namespace cfprm
