#include "cfprm/merge.hpp"

#include <algorithm>
#include <iterator>
#include <string>

#include "cfprm/errors.hpp"

namespace cfprm {

std::string_view to_string(TailPolicy p) noexcept {
  return p == TailPolicy::kDrop ? "drop" : "keep_if_ge_2";
}

TailPolicy tail_policy_from_string(std::string_view s) {
  if (s == "drop") return TailPolicy::kDrop;
  if (s == "keep_if_ge_2") return TailPolicy::kKeepIfGe2;
  throw ConfigError("unknown tail policy \"" + std::string(s) + "\"");
}

void MergeConfig::validate() const {
  if (c_min < 1 || c_min > c_max) {
    throw ConfigError("merge window sizes must satisfy 1 <= c_min <= c_max (got c_min=" +
                      std::to_string(c_min) + ", c_max=" + std::to_string(c_max) + ")");
  }
}

std::vector<MergedSample> merge_at_granularity(const Trajectory& t, std::size_t c,
                                               TailPolicy tail_policy, std::size_t source_id) {
  if (c < 1) throw ConfigError("window size must be >= 1");
  const std::size_t n = t.size();
  std::vector<MergedSample> out;
  out.reserve(count_samples(n, c, tail_policy));

  // Context grows window by window so each sample carries s_{1:i-1}.
  std::string context;
  for (std::size_t start = 1; start <= n; start += c) {
    const std::size_t end = std::min(start + c - 1, n);
    const std::size_t len = end - start + 1;
    if (len < c && !(tail_policy == TailPolicy::kKeepIfGe2 && len >= 2)) break;

    MergedSample s;
    s.query = t.query;
    s.span_start = start;
    s.span_end = end;
    s.text = join_steps(t, start, end);
    s.context = context;
    s.label = t.steps[end - 1].label;
    s.granularity = c;
    s.source_id = source_id;

    if (!context.empty()) context += kStepSeparator;
    context += s.text;
    out.push_back(std::move(s));
  }
  return out;
}

GranularCorpus build_granular_corpus(std::span<const Trajectory> trajectories,
                                     const MergeConfig& cfg) {
  cfg.validate();
  for (const auto& t : trajectories) validate_trajectory(t);

  GranularCorpus corpus;
  corpus.c_max = cfg.c_max;
  for (std::size_t c = cfg.c_max; c >= cfg.c_min; --c) {
    auto& bucket = corpus.buckets[c];
    for (std::size_t id = 0; id < trajectories.size(); ++id) {
      auto samples = merge_at_granularity(trajectories[id], c, cfg.tail_policy, id);
      bucket.insert(bucket.end(), std::make_move_iterator(samples.begin()),
                    std::make_move_iterator(samples.end()));
    }
    if (c == 1) break;
  }
  return corpus;
}

}  // namespace cfprm
