#include "cfprm/bon.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "cfprm/checkpoint.hpp"
#include "cfprm/errors.hpp"
#include "cfprm/rng.hpp"

namespace cfprm {

std::string_view to_string(AggregationRule r) noexcept {
  switch (r) {
    case AggregationRule::kMin: return "min";
    case AggregationRule::kLast: return "last";
    case AggregationRule::kMean: return "mean";
    case AggregationRule::kProd: return "prod";
  }
  return "?";
}

AggregationRule aggregation_from_string(std::string_view s) {
  if (s == "min") return AggregationRule::kMin;
  if (s == "last") return AggregationRule::kLast;
  if (s == "mean") return AggregationRule::kMean;
  if (s == "prod") return AggregationRule::kProd;
  throw ConfigError("unknown aggregation rule \"" + std::string(s) + "\"");
}

double aggregate(std::span<const double> rewards, AggregationRule rule) {
  if (rewards.empty()) throw EmptyTrajectoryError("cannot aggregate an empty score list");
  switch (rule) {
    case AggregationRule::kMin: return *std::min_element(rewards.begin(), rewards.end());
    case AggregationRule::kLast: return rewards.back();
    case AggregationRule::kMean:
      return std::accumulate(rewards.begin(), rewards.end(), 0.0) /
             static_cast<double>(rewards.size());
    case AggregationRule::kProd:
      return std::accumulate(rewards.begin(), rewards.end(), 1.0, std::multiplies<>());
  }
  return 0.0;
}

std::vector<double> score_trajectory(const ScorerParams& params, const Trajectory& t) {
  if (t.steps.empty()) throw EmptyTrajectoryError("cannot score a trajectory without steps");
  std::vector<double> rewards;
  rewards.reserve(t.steps.size());
  std::string prefix;
  for (const auto& step : t.steps) {
    if (!prefix.empty()) prefix += kStepSeparator;
    prefix += step.text;
    rewards.push_back(score(params, featurize(t.query, prefix, params.dim)).reward);
  }
  return rewards;
}

CandidateScorer make_model_scorer(const ScorerParams& params) {
  return [&params](const Trajectory& t) { return score_trajectory(params, t); };
}

std::size_t select_best(std::span<const std::vector<double>> candidate_rewards,
                        AggregationRule rule, std::size_t n) {
  n = std::min(n, candidate_rewards.size());
  if (n == 0) throw EmptyPoolError("best-of-n selection over an empty pool");
  std::size_t best = 0;
  double best_score = aggregate(candidate_rewards[0], rule);
  for (std::size_t i = 1; i < n; ++i) {
    const double s = aggregate(candidate_rewards[i], rule);
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

std::size_t select_best(const CandidatePool& pool, const ScorerParams& params,
                        AggregationRule rule, std::size_t n) {
  if (pool.candidates.empty()) throw EmptyPoolError("pool has no candidates");
  if (n > pool.candidates.size()) {
    throw InsufficientPoolError("asked for best of " + std::to_string(n) + " from a pool of " +
                                std::to_string(pool.candidates.size()));
  }
  std::vector<std::vector<double>> rewards;
  rewards.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rewards.push_back(score_trajectory(params, pool.candidates[i]));
  return select_best(rewards, rule, n);
}

BonReport evaluate(std::span<const CandidatePool> pools, const CandidateScorer& scorer,
                   const BonOptions& opts, std::string scorer_id) {
  if (opts.ns.empty()) throw ConfigError("need at least one N");
  if (opts.repeats < 1) throw ConfigError("need at least one repeat");
  const std::size_t max_n = *std::max_element(opts.ns.begin(), opts.ns.end());
  if (std::find(opts.ns.begin(), opts.ns.end(), 0) != opts.ns.end()) {
    throw ConfigError("N must be >= 1");
  }
  for (std::size_t q = 0; q < pools.size(); ++q) {
    if (pools[q].candidates.size() < max_n) {
      throw InsufficientPoolError("pool " + std::to_string(q) + " has " +
                                  std::to_string(pools[q].candidates.size()) +
                                  " candidates, need " + std::to_string(max_n));
    }
  }

  // Candidate scores do not depend on the subsample, so compute them once.
  std::vector<std::vector<double>> agg(pools.size());
  std::vector<std::vector<bool>> correct(pools.size());
  for (std::size_t q = 0; q < pools.size(); ++q) {
    for (const auto& cand : pools[q].candidates) {
      agg[q].push_back(aggregate(scorer(cand), opts.rule));
      correct[q].push_back(cand.answer_correct.value_or(false));
    }
  }

  BonReport report;
  report.ns = opts.ns;
  report.n_queries = pools.size();
  report.repeats = opts.repeats;
  report.seed = opts.seed;
  report.rule = opts.rule;
  report.scorer_id = std::move(scorer_id);

  const Rng root = Rng(opts.seed).split("bon");
  std::vector<std::size_t> totals(opts.ns.size(), 0);
  std::vector<std::size_t> order;
  for (std::size_t r = 0; r < opts.repeats; ++r) {
    std::vector<std::size_t> hits(opts.ns.size(), 0);
    const Rng repeat_rng = root.split(r);
    for (std::size_t q = 0; q < pools.size(); ++q) {
      order.resize(pools[q].candidates.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng rng = repeat_rng.split(q);
      rng.shuffle(std::span<std::size_t>(order));
      for (std::size_t k = 0; k < opts.ns.size(); ++k) {
        std::size_t best = order[0];
        for (std::size_t pos = 1; pos < opts.ns[k]; ++pos) {
          const std::size_t c = order[pos];
          if (agg[q][c] > agg[q][best] || (agg[q][c] == agg[q][best] && c < best)) best = c;
        }
        if (correct[q][best]) ++hits[k];
      }
    }
    std::vector<double> acc(opts.ns.size());
    for (std::size_t k = 0; k < opts.ns.size(); ++k) {
      acc[k] = pools.empty() ? 0.0
                             : static_cast<double>(hits[k]) / static_cast<double>(pools.size());
      totals[k] += hits[k];
    }
    report.per_repeat.push_back(std::move(acc));
    report.correct.push_back(std::move(hits));
  }

  const double denom = static_cast<double>(opts.repeats * pools.size());
  report.accuracy.resize(opts.ns.size());
  for (std::size_t k = 0; k < opts.ns.size(); ++k) {
    report.accuracy[k] = pools.empty() ? 0.0 : static_cast<double>(totals[k]) / denom;
  }
  report.average = std::accumulate(report.accuracy.begin(), report.accuracy.end(), 0.0) /
                   static_cast<double>(report.accuracy.size());
  return report;
}

BonReport evaluate(std::span<const CandidatePool> pools, const ScorerParams& params,
                   const BonOptions& opts) {
  return evaluate(pools, make_model_scorer(params), opts, checkpoint_id(params));
}

nlohmann::json BonReport::to_json() const {
  nlohmann::json per_n = nlohmann::json::object();
  for (std::size_t k = 0; k < ns.size(); ++k) per_n["@" + std::to_string(ns[k])] = accuracy[k];
  return {
      {"ns", ns},
      {"accuracy", per_n},
      {"avg", average},
      {"per_repeat", per_repeat},
      {"correct_counts", correct},
      {"n_queries", n_queries},
      {"repeats", repeats},
      {"seed", seed},
      {"aggregation", to_string(rule)},
      {"scorer_id", scorer_id},
  };
}

namespace {

std::string pct(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

void row(std::ostringstream& os, const std::string& name, std::span<const double> values) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%-10s", name.c_str());
  os << buf;
  double sum = 0.0;
  for (double v : values) {
    std::snprintf(buf, sizeof buf, " %7s", pct(v).c_str());
    os << buf;
    sum += v;
  }
  std::snprintf(buf, sizeof buf, " %7s", pct(sum / static_cast<double>(values.size())).c_str());
  os << buf << '\n';
}

}  // namespace

std::string BonReport::to_table() const {
  std::ostringstream os;
  os << "# best-of-n accuracy (%)  agg=" << to_string(rule) << "  queries=" << n_queries
     << "  scorer=" << (scorer_id.empty() ? "-" : scorer_id) << '\n';
  char buf[32];
  std::snprintf(buf, sizeof buf, "%-10s", "repeat");
  os << buf;
  for (std::size_t n : ns) {
    std::snprintf(buf, sizeof buf, " %7s", ("@" + std::to_string(n)).c_str());
    os << buf;
  }
  std::snprintf(buf, sizeof buf, " %7s", "Avg.");
  os << buf << '\n';
  for (std::size_t r = 0; r < per_repeat.size(); ++r) row(os, std::to_string(r), per_repeat[r]);
  row(os, "mean", accuracy);
  return os.str();
}

}  // namespace cfprm
