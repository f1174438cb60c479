#include "cfprm/experiment.hpp"

#include <cstdio>
#include <sstream>

namespace cfprm {

GranularCorpus corpus_with_granularity(std::span<const Trajectory> trajectories, std::size_t c,
                                       TailPolicy tail_policy) {
  GranularCorpus corpus = build_granular_corpus(trajectories, MergeConfig{1, 1, tail_policy});
  if (c <= 1) return corpus;
  auto& coarse = corpus.buckets[c];
  for (std::size_t id = 0; id < trajectories.size(); ++id) {
    auto samples = merge_at_granularity(trajectories[id], c, tail_policy, id);
    coarse.insert(coarse.end(), samples.begin(), samples.end());
  }
  for (std::size_t mid = 2; mid < c; ++mid) corpus.buckets[mid];
  corpus.c_max = c;
  return corpus;
}

std::vector<SweepRow> run_c_sweep(std::span<const Trajectory> train_set,
                                  std::span<const CandidatePool> pools,
                                  const ExperimentConfig& cfg, std::span<const std::size_t> cs) {
  std::vector<std::size_t> all = {1};
  all.insert(all.end(), cs.begin(), cs.end());

  const ScorerParams init = ScorerParams::initial(cfg.arch, cfg.train.seed, cfg.dim, cfg.hidden);
  std::vector<SweepRow> rows;
  for (std::size_t c : all) {
    const auto corpus = corpus_with_granularity(train_set, c, cfg.tail_policy);
    auto [params, manifest] = train(corpus, cfg.train, init);
    SweepRow row;
    row.c = c;
    row.report = evaluate(pools, params, cfg.bon);
    row.manifest = std::move(manifest);
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json sweep_to_json(std::span<const SweepRow> rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"c", r.c},
                   {"baseline", r.c == 1},
                   {"report", r.report.to_json()},
                   {"bucket_order", r.manifest.bucket_order},
                   {"corpus_checksum", r.manifest.corpus_checksum}});
  }
  return out;
}

std::string sweep_to_table(std::span<const SweepRow> rows) {
  std::ostringstream os;
  if (rows.empty()) return {};
  char buf[32];
  os << "# accuracy (%) by merge window C  agg=" << to_string(rows.front().report.rule) << '\n';
  std::snprintf(buf, sizeof buf, "%-10s", "C");
  os << buf;
  for (std::size_t n : rows.front().report.ns) {
    std::snprintf(buf, sizeof buf, " %7s", ("@" + std::to_string(n)).c_str());
    os << buf;
  }
  std::snprintf(buf, sizeof buf, " %7s", "Avg.");
  os << buf << '\n';
  for (const auto& r : rows) {
    const std::string name = r.c == 1 ? "1 (fine)" : std::to_string(r.c);
    std::snprintf(buf, sizeof buf, "%-10s", name.c_str());
    os << buf;
    for (double a : r.report.accuracy) {
      std::snprintf(buf, sizeof buf, " %7.1f", 100.0 * a);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, " %7.1f", 100.0 * r.report.average);
    os << buf << '\n';
  }
  return os.str();
}

}  // namespace cfprm
