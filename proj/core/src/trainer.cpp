#include "cfprm/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "cfprm/checkpoint.hpp"
#include "cfprm/errors.hpp"
#include "cfprm/rng.hpp"

namespace cfprm {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be a finite value > 0");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!std::isfinite(qranking.margin)) throw ConfigError("Q-ranking margin must be finite");
}

nlohmann::json TrainConfig::to_json() const {
  return {
      {"loss", to_string(loss)},
      {"learning_rate", learning_rate},
      {"batch_size", batch_size},
      {"epochs_per_bucket", epochs_per_bucket},
      {"seed", seed},
      {"qranking",
       {{"margin", qranking.margin},
        {"normalization", to_string(qranking.normalization)},
        {"negative_value_source", "raw_score"}}},
      {"optimizer", "sgd"},
  };
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json buckets_json = nlohmann::json::array();
  for (const auto& b : buckets) {
    buckets_json.push_back({{"granularity", b.granularity},
                            {"samples", b.samples},
                            {"units", b.units},
                            {"skipped", b.skipped},
                            {"updates", b.updates},
                            {"epoch_loss", b.epoch_loss},
                            {"final_loss", b.final_loss},
                            {"checksum", b.checksum}});
  }
  return {
      {"config", config.to_json()},
      {"scorer", {{"arch", to_string(arch)}, {"dim", dim}, {"hidden", hidden}}},
      {"c_max", c_max},
      {"bucket_order", bucket_order},
      {"buckets", buckets_json},
      {"corpus_checksum", corpus_checksum},
      {"init_checkpoint_id", init_id},
      {"final_checkpoint_id", final_id},
      {"wall_clock_seconds", wall_clock_seconds},
  };
}

namespace {

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool is_pointwise(LossKind k) { return k != LossKind::kQRanking; }

}  // namespace

std::string bucket_checksum(std::span<const MergedSample> samples) {
  std::uint64_t h = kFnvOffsetBasis;
  for (const auto& s : samples) {
    const std::string fields[] = {std::to_string(s.source_id), std::to_string(s.span_start),
                                  std::to_string(s.span_end),  std::to_string(s.granularity),
                                  std::string(to_symbol(s.label)), s.query,
                                  s.context, s.text};
    for (const auto& f : fields) {
      h = fnv1a64(f, h);
      h = fnv1a64("\x1f", h);
    }
    h = fnv1a64("\x1e", h);
  }
  return hex64(h);
}

std::vector<TrainingUnit> make_units(std::span<const MergedSample> samples, LossKind loss,
                                     std::size_t dim) {
  std::vector<TrainingUnit> units;
  if (is_pointwise(loss)) {
    units.reserve(samples.size());
    for (const auto& s : samples) {
      units.push_back({{featurize(s.query, s.partial_solution(), dim)}, {s.label}, s.source_id});
    }
    return units;
  }
  // Samples of one trajectory are contiguous within a bucket; a change of
  // source_id (or span restarting) starts a new unit.
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i + 1;
    while (j < samples.size() && samples[j].source_id == samples[i].source_id &&
           samples[j].span_start > samples[j - 1].span_end) {
      ++j;
    }
    TrainingUnit unit;
    unit.source_id = samples[i].source_id;
    bool any_positive = false;
    for (std::size_t k = i; k < j; ++k) {
      unit.features.push_back(featurize(samples[k].query, samples[k].partial_solution(), dim));
      unit.labels.push_back(samples[k].label);
      any_positive |= samples[k].label == StepLabel::kPositive;
    }
    if (any_positive) units.push_back(std::move(unit));
    i = j;
  }
  return units;
}

LossGrad unit_loss(std::span<const double> raw, std::span<const StepLabel> labels, LossKind loss,
                   const QRankingConfig& qcfg) {
  if (loss == LossKind::kQRanking) {
    std::vector<double> correct, negative;
    for (std::size_t t = 0; t < raw.size(); ++t) {
      (labels[t] == StepLabel::kPositive ? correct : negative).push_back(raw[t]);
    }
    const auto q = loss_qranking(correct, negative, qcfg);
    LossGrad out{q.value, std::vector<double>(raw.size())};
    std::size_t ci = 0, ni = 0;
    for (std::size_t t = 0; t < raw.size(); ++t) {
      out.grad[t] = labels[t] == StepLabel::kPositive ? q.correct_grad[ci++] : q.negative_grad[ni++];
    }
    return out;
  }
  std::vector<StepScore> scores;
  std::vector<double> targets;
  scores.reserve(raw.size());
  targets.reserve(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t) {
    scores.push_back(make_score(raw[t]));
    targets.push_back(to_target(labels[t]));
  }
  return loss == LossKind::kBce ? loss_bce(scores, targets) : loss_mse(scores, targets);
}

namespace {

template <typename UnitAt>
Objective objective_impl(const ScorerParams& params, std::size_t count, UnitAt unit_at,
                         LossKind loss, const QRankingConfig& qcfg) {
  Objective obj;
  obj.grad.assign(params.param_count(), 0.0);
  if (count == 0) return obj;
  const double inv = 1.0 / static_cast<double>(count);
  std::vector<double> raw;
  for (std::size_t u = 0; u < count; ++u) {
    const TrainingUnit& unit = unit_at(u);
    raw.resize(unit.features.size());
    for (std::size_t t = 0; t < raw.size(); ++t) raw[t] = forward(params, unit.features[t]);
    const auto lg = unit_loss(raw, unit.labels, loss, qcfg);
    obj.loss += lg.value * inv;
    for (std::size_t t = 0; t < raw.size(); ++t) {
      if (lg.grad[t] != 0.0) {
        accumulate_gradient(params, unit.features[t], lg.grad[t] * inv, obj.grad);
      }
    }
  }
  return obj;
}

}  // namespace

Objective batch_objective(const ScorerParams& params, std::span<const TrainingUnit> units,
                          LossKind loss, const QRankingConfig& qcfg) {
  return objective_impl(
      params, units.size(), [&](std::size_t u) -> const TrainingUnit& { return units[u]; }, loss,
      qcfg);
}

namespace {

double mean_loss(const ScorerParams& params, std::span<const TrainingUnit> units, LossKind loss,
                 const QRankingConfig& qcfg) {
  if (units.empty()) return 0.0;
  double total = 0.0;
  std::vector<double> raw;
  for (const auto& unit : units) {
    raw.resize(unit.features.size());
    for (std::size_t t = 0; t < raw.size(); ++t) raw[t] = forward(params, unit.features[t]);
    total += unit_loss(raw, unit.labels, loss, qcfg).value;
  }
  return total / static_cast<double>(units.size());
}

std::pair<ScorerParams, RunManifest> train_buckets(const GranularCorpus& corpus,
                                                   std::span<const std::size_t> order,
                                                   const TrainConfig& cfg, ScorerParams params) {
  const auto started = std::chrono::steady_clock::now();
  cfg.validate();
  params.check_shape();

  RunManifest manifest;
  manifest.config = cfg;
  manifest.arch = params.arch;
  manifest.dim = params.dim;
  manifest.hidden = params.hidden;
  manifest.c_max = order.empty() ? 0 : order.front();
  manifest.init_id = checkpoint_id(params);

  std::size_t total = 0;
  for (std::size_t c : order) total += corpus.bucket(c).size();
  if (total == 0) throw EmptyCorpusError("no training samples in the selected buckets");

  std::uint64_t corpus_hash = kFnvOffsetBasis;
  const Rng root = Rng(cfg.seed).split("train");
  std::vector<double> grad;

  for (std::size_t c : order) {
    const auto& samples = corpus.bucket(c);
    BucketRecord rec;
    rec.granularity = c;
    rec.samples = samples.size();
    rec.checksum = bucket_checksum(samples);
    corpus_hash = fnv1a64(rec.checksum, corpus_hash);
    manifest.bucket_order.push_back(c);

    const auto units = make_units(samples, cfg.loss, params.dim);
    rec.units = units.size();
    if (cfg.loss == LossKind::kQRanking) {
      std::set<std::size_t> sources;
      for (const auto& s : samples) sources.insert(s.source_id);
      rec.skipped = sources.size() > units.size() ? sources.size() - units.size() : 0;
    }

    std::vector<std::size_t> perm(units.size());
    for (std::size_t epoch = 0; epoch < cfg.epochs_per_bucket && !units.empty(); ++epoch) {
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      Rng rng = root.split(c).split(epoch);
      rng.shuffle(std::span<std::size_t>(perm));

      for (std::size_t b = 0; b < perm.size(); b += cfg.batch_size) {
        const std::size_t e = std::min(perm.size(), b + cfg.batch_size);
        const auto obj = objective_impl(
            params, e - b,
            [&](std::size_t k) -> const TrainingUnit& { return units[perm[b + k]]; }, cfg.loss,
            cfg.qranking);
        if (!std::isfinite(obj.loss)) {
          manifest.buckets.push_back(rec);
          throw NonFiniteLossError("non-finite loss in bucket C=" + std::to_string(c) +
                                       " epoch " + std::to_string(epoch),
                                   manifest.to_json().dump());
        }
        for (std::size_t i = 0; i < params.weights.size(); ++i) {
          params.weights[i] -= cfg.learning_rate * obj.grad[i];
        }
        ++rec.updates;
      }
      rec.epoch_loss.push_back(mean_loss(params, units, cfg.loss, cfg.qranking));
    }
    rec.final_loss = rec.epoch_loss.empty() ? mean_loss(params, units, cfg.loss, cfg.qranking)
                                            : rec.epoch_loss.back();
    if (!std::isfinite(rec.final_loss)) {
      manifest.buckets.push_back(rec);
      throw NonFiniteLossError("non-finite loss after bucket C=" + std::to_string(c),
                               manifest.to_json().dump());
    }
    manifest.buckets.push_back(std::move(rec));
  }

  manifest.corpus_checksum = hex64(corpus_hash);
  manifest.final_id = checkpoint_id(params);
  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {std::move(params), std::move(manifest)};
}

}  // namespace

std::pair<ScorerParams, RunManifest> train(const GranularCorpus& corpus, const TrainConfig& cfg,
                                           ScorerParams init) {
  const auto order = corpus.traversal_order();
  return train_buckets(corpus, order, cfg, std::move(init));
}

std::pair<ScorerParams, RunManifest> train_baseline(const GranularCorpus& corpus,
                                                    const TrainConfig& cfg, ScorerParams init) {
  const std::size_t fine[] = {1};
  return train_buckets(corpus, fine, cfg, std::move(init));
}

GradcheckResult gradcheck(const ScorerParams& params, std::span<const MergedSample> batch,
                          LossKind loss, const QRankingConfig& qcfg,
                          const GradcheckOptions& opts) {
  params.check_shape();
  const auto units = make_units(batch, loss, params.dim);
  const auto analytic = batch_objective(params, units, loss, qcfg);

  std::vector<std::size_t> coords;
  const std::size_t n = params.param_count();
  if (n <= opts.full_check_limit) {
    coords.resize(n);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
  } else {
    // Parameters wired to an active feature, plus the output bias and a
    // random sample of everything else.
    std::set<std::size_t> chosen;
    const std::size_t per_feature = params.arch == Arch::kLinear ? 1 : params.hidden;
    for (const auto& u : units) {
      for (const auto& x : u.features) {
        for (const auto& e : x.entries()) {
          for (std::size_t h = 0; h < per_feature; ++h) chosen.insert(e.index * per_feature + h);
        }
      }
    }
    for (std::size_t i = params.dim * per_feature; i < n; ++i) chosen.insert(i);
    Rng rng = Rng(opts.seed).split("gradcheck");
    const auto extra = static_cast<std::size_t>(std::ceil(opts.subset_fraction * n));
    for (std::size_t k = 0; k < extra; ++k) chosen.insert(rng.below(n));
    coords.assign(chosen.begin(), chosen.end());
  }

  GradcheckResult result;
  ScorerParams probe = params;
  for (std::size_t i : coords) {
    const double w = probe.weights[i];
    probe.weights[i] = w + opts.epsilon;
    const double up = mean_loss(probe, units, loss, qcfg);
    probe.weights[i] = w - opts.epsilon;
    const double down = mean_loss(probe, units, loss, qcfg);
    probe.weights[i] = w;
    const double numeric = (up - down) / (2.0 * opts.epsilon);
    const double a = analytic.grad[i];
    const double denom = std::max({std::abs(a), std::abs(numeric), opts.abs_floor});
    result.max_rel_error = std::max(result.max_rel_error, std::abs(a - numeric) / denom);
    ++result.checked;
  }
  return result;
}

}  // namespace cfprm
