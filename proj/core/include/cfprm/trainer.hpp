#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfprm/features.hpp"
#include "cfprm/losses.hpp"
#include "cfprm/scorer.hpp"
#include "cfprm/types.hpp"

namespace cfprm {

struct TrainConfig {
  LossKind loss = LossKind::kBce;
  double learning_rate = 0.05;
  std::size_t batch_size = 32;
  std::size_t epochs_per_bucket = 1;
  std::uint64_t seed = 0;
  QRankingConfig qranking;

  /// Throws ConfigError unless learning_rate > 0 (finite) and batch_size >= 1.
  void validate() const;
  nlohmann::json to_json() const;
};

/// The thing a single loss term is computed over. BCE/MSE units hold one
/// step; Q-ranking units hold every sample of one source trajectory at one
/// granularity, in span order.
struct TrainingUnit {
  std::vector<FeatureVector> features;
  std::vector<StepLabel> labels;
  std::size_t source_id = 0;
};

/// Groups `samples` into units for `loss`. Q-ranking units without a positive
/// sample are dropped (the loss is undefined for them).
std::vector<TrainingUnit> make_units(std::span<const MergedSample> samples, LossKind loss,
                                     std::size_t dim);

/// Loss of one unit plus the gradient w.r.t. its raw scores.
LossGrad unit_loss(std::span<const double> raw, std::span<const StepLabel> labels,
                   LossKind loss, const QRankingConfig& qcfg);

struct Objective {
  double loss = 0.0;
  std::vector<double> grad;  // d mean-loss / d params
};

/// Mean loss over `units` and its parameter gradient.
Objective batch_objective(const ScorerParams& params, std::span<const TrainingUnit> units,
                          LossKind loss, const QRankingConfig& qcfg);

struct BucketRecord {
  std::size_t granularity = 0;
  std::size_t samples = 0;
  std::size_t units = 0;
  std::size_t skipped = 0;  // Q-ranking trajectories with no positive sample
  std::size_t updates = 0;
  std::vector<double> epoch_loss;  // mean loss over the bucket after each epoch
  double final_loss = 0.0;
  std::string checksum;
};

struct RunManifest {
  TrainConfig config;
  Arch arch = Arch::kLinear;
  std::size_t dim = 0;
  std::size_t hidden = 0;
  std::size_t c_max = 0;
  std::vector<std::size_t> bucket_order;
  std::vector<BucketRecord> buckets;
  std::string corpus_checksum;
  std::string init_id;
  std::string final_id;
  double wall_clock_seconds = 0.0;

  nlohmann::json to_json() const;
};

/// FNV-1a 64 (hex) over the canonical encoding of a bucket's samples.
std::string bucket_checksum(std::span<const MergedSample> samples);

/// Coarse-to-fine SGD: buckets in descending C, each shuffled per epoch by a
/// generator derived from (seed, C, epoch), batched, and stepped with plain
/// SGD on the batch-mean loss. Throws EmptyCorpusError for an empty corpus and
/// NonFiniteLossError (with the partial manifest) when a loss diverges.
std::pair<ScorerParams, RunManifest> train(const GranularCorpus& corpus, const TrainConfig& cfg,
                                           ScorerParams init);

/// train() restricted to the fine-grained bucket C = 1.
std::pair<ScorerParams, RunManifest> train_baseline(const GranularCorpus& corpus,
                                                    const TrainConfig& cfg, ScorerParams init);

struct GradcheckOptions {
  double epsilon = 1e-5;
  // Models with more parameters than this are checked on the parameters the
  // batch touches plus a random `subset_fraction` of the rest.
  std::size_t full_check_limit = 5000;
  double subset_fraction = 0.01;
  // Denominator floor of the relative error.
  double abs_floor = 1e-6;
  std::uint64_t seed = 0;
};

struct GradcheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

/// Analytic gradient of batch_objective vs central finite differences.
GradcheckResult gradcheck(const ScorerParams& params, std::span<const MergedSample> batch,
                          LossKind loss, const QRankingConfig& qcfg = {},
                          const GradcheckOptions& opts = {});

}  // namespace cfprm
