#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfprm/scorer.hpp"
#include "cfprm/types.hpp"

namespace cfprm {

/// How per-step rewards collapse into one candidate score.
enum class AggregationRule { kMin, kLast, kMean, kProd };

std::string_view to_string(AggregationRule r) noexcept;
AggregationRule aggregation_from_string(std::string_view s);

/// Throws EmptyTrajectoryError on an empty list.
double aggregate(std::span<const double> rewards, AggregationRule rule);

inline const std::vector<std::size_t> kDefaultBonNs = {8, 16, 32, 64};
inline constexpr std::size_t kDefaultBonRepeats = 5;

/// Per-step rewards for a candidate. Anything satisfying this can drive the
/// evaluation, e.g. a trained scorer or a label oracle.
using CandidateScorer = std::function<std::vector<double>(const Trajectory&)>;

/// Element k is score_step(params, query, s_{1:k}).reward.
std::vector<double> score_trajectory(const ScorerParams& params, const Trajectory& t);

CandidateScorer make_model_scorer(const ScorerParams& params);

/// Argmax of the aggregate over the first `n` candidates; ties go to the
/// lowest index. Throws EmptyPoolError when there is nothing to choose from.
std::size_t select_best(std::span<const std::vector<double>> candidate_rewards,
                        AggregationRule rule, std::size_t n);

std::size_t select_best(const CandidatePool& pool, const ScorerParams& params,
                        AggregationRule rule, std::size_t n);

struct BonReport {
  std::vector<std::size_t> ns;
  std::vector<double> accuracy;                  // mean over repeats, per N
  double average = 0.0;                          // mean of `accuracy`
  std::vector<std::vector<double>> per_repeat;   // [repeat][N]
  std::vector<std::vector<std::size_t>> correct; // [repeat][N] selected-correct counts
  std::size_t n_queries = 0;
  std::size_t repeats = 0;
  std::uint64_t seed = 0;
  AggregationRule rule = AggregationRule::kMin;
  std::string scorer_id;

  nlohmann::json to_json() const;
  /// Aligned text table: one row per repeat plus the mean, columns @N and Avg.
  std::string to_table() const;
};

struct BonOptions {
  std::vector<std::size_t> ns = kDefaultBonNs;
  std::size_t repeats = kDefaultBonRepeats;
  std::uint64_t seed = 0;
  AggregationRule rule = AggregationRule::kMin;
};

/// For each repeat, every pool is put in a seeded random order; the first N
/// candidates of that order form the N-subsample, so subsamples are nested
/// across N. Within a subsample, ties go to the lowest candidate index.
/// accuracy@N is the fraction of queries whose selected candidate has
/// answer_correct == true. Throws InsufficientPoolError when a pool has
/// fewer than max(ns) candidates.
BonReport evaluate(std::span<const CandidatePool> pools, const CandidateScorer& scorer,
                   const BonOptions& opts, std::string scorer_id = "");

BonReport evaluate(std::span<const CandidatePool> pools, const ScorerParams& params,
                   const BonOptions& opts);

}  // namespace cfprm
