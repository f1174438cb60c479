#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfprm/bon.hpp"
#include "cfprm/merge.hpp"
#include "cfprm/trainer.hpp"

namespace cfprm {

struct ExperimentConfig {
  TrainConfig train;
  Arch arch = Arch::kLinear;
  std::size_t dim = kDefaultFeatureDim;
  std::size_t hidden = kDefaultHiddenDim;
  TailPolicy tail_policy = TailPolicy::kKeepIfGe2;
  BonOptions bon;
};

/// Corpus for a single coarse granularity: bucket C next to the fine bucket,
/// intermediate buckets left empty. c == 1 gives the fine-only corpus.
GranularCorpus corpus_with_granularity(std::span<const Trajectory> trajectories, std::size_t c,
                                       TailPolicy tail_policy);

struct SweepRow {
  std::size_t c = 1;  // 1 is the fine-grained baseline
  BonReport report;
  RunManifest manifest;
};

/// Trains one scorer per C in {1} + `cs` from the same initialization and
/// evaluates each on `pools`.
std::vector<SweepRow> run_c_sweep(std::span<const Trajectory> train_set,
                                  std::span<const CandidatePool> pools,
                                  const ExperimentConfig& cfg, std::span<const std::size_t> cs);

nlohmann::json sweep_to_json(std::span<const SweepRow> rows);
/// One row per C, columns @N and Avg.
std::string sweep_to_table(std::span<const SweepRow> rows);

}  // namespace cfprm
