#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfprm/types.hpp"

namespace cfprm {

/// Simulated reasoning policy over integer arithmetic chains.
struct SynthConfig {
  std::size_t n_queries = 2000;
  std::size_t n_eval_queries = 200;
  // Number of operation steps per task; redundant restatements come on top.
  std::size_t min_ops = 4;
  std::size_t max_ops = 8;
  double p_error = 0.25;
  double p_recover = 0.3;
  double p_redundant = 0.4;
  std::size_t candidates_per_query = 64;
  // Every value on the correct track stays within [0, max_value].
  std::int64_t max_value = 12;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
};

enum class OpKind { kAdd, kSubtract, kMultiply };

struct ChainOp {
  OpKind kind = OpKind::kAdd;
  std::int64_t operand = 0;
  friend bool operator==(const ChainOp&, const ChainOp&) = default;
};

std::int64_t apply(const ChainOp& op, std::int64_t value) noexcept;

struct SynthTask {
  std::string query;  // "start with 7; add 5; multiply by 3; ..."
  std::int64_t start = 0;
  std::vector<ChainOp> ops;
  std::int64_t answer = 0;
};

/// One sampled trajectory with its generation trace.
struct SampledTrajectory {
  Trajectory trajectory;
  std::vector<std::int64_t> stated;     // value each step claims
  std::vector<std::int64_t> reference;  // correct value at the same point
  std::vector<bool> redundant;          // restatement steps
};

SynthTask gen_task(std::uint64_t seed, const SynthConfig& cfg);

/// Walks the chain: wrong steps offset the value by a nonzero amount, wrong
/// chains continue from their wrong value unless a recovery fires, and a
/// restatement of the current value may follow any operation but the last.
/// A step is positive iff its stated value is on the correct track.
SampledTrajectory sample_trajectory_traced(const SynthTask& task, const SynthConfig& cfg,
                                           std::uint64_t seed);

inline Trajectory sample_trajectory(const SynthTask& task, const SynthConfig& cfg,
                                    std::uint64_t seed) {
  return sample_trajectory_traced(task, cfg, seed).trajectory;
}

/// candidates_per_query independent samples of `task`.
CandidatePool gen_bon_pool(const SynthTask& task, const SynthConfig& cfg, std::uint64_t seed);

/// n_queries tasks with one sampled trajectory each.
std::vector<Trajectory> gen_training_set(const SynthConfig& cfg);

/// n_eval_queries tasks, disjoint seed stream from gen_training_set.
std::vector<CandidatePool> gen_eval_pools(const SynthConfig& cfg);

}  // namespace cfprm
