#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "cfprm/types.hpp"

namespace cfprm {

/// What to do with the trailing window when C does not divide T.
enum class TailPolicy {
  kDrop,         // never emit a partial window
  kKeepIfGe2,    // emit it when it holds at least two steps
};

std::string_view to_string(TailPolicy p) noexcept;
/// Accepts "drop" and "keep_if_ge_2".
TailPolicy tail_policy_from_string(std::string_view s);

struct MergeConfig {
  std::size_t c_max = 2;
  std::size_t c_min = 1;
  TailPolicy tail_policy = TailPolicy::kKeepIfGe2;

  /// Throws ConfigError unless 1 <= c_min <= c_max.
  void validate() const;
};

/// Non-overlapping stride-`c` windows over `t`, starting at step 1. Each
/// window becomes one MergedSample labeled by its last step. `source_id` is
/// copied into every emitted sample.
std::vector<MergedSample> merge_at_granularity(const Trajectory& t, std::size_t c,
                                               TailPolicy tail_policy,
                                               std::size_t source_id = 0);

/// Buckets D_C for C = c_max down to c_min, each the concatenation of
/// merge_at_granularity over `trajectories` in input order.
GranularCorpus build_granular_corpus(std::span<const Trajectory> trajectories,
                                     const MergeConfig& cfg);

/// Closed-form |merge_at_granularity| for a T-step trajectory.
constexpr std::size_t count_samples(std::size_t n_steps, std::size_t c,
                                    TailPolicy tail_policy) noexcept {
  const std::size_t full = n_steps / c;
  const std::size_t tail = n_steps % c;
  return full + ((tail_policy == TailPolicy::kKeepIfGe2 && tail >= 2) ? 1 : 0);
}

}  // namespace cfprm
