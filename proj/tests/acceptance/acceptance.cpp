// Acceptance gate: one PASS/FAIL line per criterion; exit status is the
// number of failed criteria.
//
//   cfprm_acceptance [--cli PATH] [--workdir DIR] [--only N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfprm/bon.hpp"
#include "cfprm/checkpoint.hpp"
#include "cfprm/fixtures.hpp"
#include "cfprm/losses.hpp"
#include "cfprm/merge.hpp"
#include "cfprm/rng.hpp"
#include "cfprm/synth.hpp"
#include "cfprm/trainer.hpp"

#ifndef CFPRM_CLI_PATH
#define CFPRM_CLI_PATH "cfprm"
#endif

namespace fs = std::filesystem;
using namespace cfprm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct Ctx {
  std::string cli = CFPRM_CLI_PATH;
  fs::path workdir;
};

int run(const std::string& cmd) {
  const std::string full = cmd + " > /dev/null 2>&1";
  return std::system(full.c_str());
}

// ---------------------------------------------------------------------------
// 1. merge vs brute-force window enumeration

std::vector<MergedSample> enumerate_windows(const Trajectory& t, std::size_t c, TailPolicy tp) {
  // Every span (i, j) is tested for membership rather than walked by stride.
  const std::size_t T = t.steps.size();
  std::vector<MergedSample> out;
  for (std::size_t i = 1; i <= T; ++i) {
    if ((i - 1) % c != 0) continue;
    for (std::size_t j = i; j <= T; ++j) {
      const std::size_t len = j - i + 1;
      const bool full = len == c;
      const bool tail = tp == TailPolicy::kKeepIfGe2 && j == T && len < c && len >= 2;
      if (!full && !tail) continue;
      MergedSample s;
      s.query = t.query;
      s.span_start = i;
      s.span_end = j;
      for (std::size_t k = i; k <= j; ++k) {
        if (k > i) s.text += "\n";
        s.text += t.steps[k - 1].text;
      }
      for (std::size_t k = 1; k < i; ++k) {
        if (k > 1) s.context += "\n";
        s.context += t.steps[k - 1].text;
      }
      s.label = t.steps[j - 1].label;
      s.granularity = c;
      out.push_back(std::move(s));
    }
  }
  return out;
}

bool same_sample(const MergedSample& a, const MergedSample& b) {
  return a.query == b.query && a.span_start == b.span_start && a.span_end == b.span_end &&
         a.text == b.text && a.context == b.context && a.label == b.label &&
         a.granularity == b.granularity;
}

Outcome criterion_merge_oracle(const Ctx&) {
  const auto t0 = Clock::now();
  std::size_t cases = 0, mismatches = 0;
  for (std::size_t T = 1; T <= 12; ++T) {
    for (std::uint32_t mask = 0; mask < (1u << T); ++mask) {
      Trajectory t;
      t.query = "q" + std::to_string(T);
      for (std::size_t k = 0; k < T; ++k) {
        t.steps.push_back(
            {k + 1, "step " + std::to_string(k + 1),
             (mask >> k) & 1u ? StepLabel::kPositive : StepLabel::kNegative});
      }
      for (std::size_t c = 1; c <= T; ++c) {
        for (TailPolicy tp : {TailPolicy::kDrop, TailPolicy::kKeepIfGe2}) {
          ++cases;
          const auto got = merge_at_granularity(t, c, tp);
          const auto want = enumerate_windows(t, c, tp);
          bool ok = got.size() == want.size() && got.size() == count_samples(T, c, tp);
          for (std::size_t k = 0; ok && k < got.size(); ++k) ok = same_sample(got[k], want[k]);
          if (!ok) ++mismatches;
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 5.0,
          fmt("%zu/%zu cases agree, %.2fs (limit 5s)", cases - mismatches, cases, secs)};
}

// ---------------------------------------------------------------------------
// 2. worked seven-step example

Outcome criterion_fixture(const Ctx&) {
  const Trajectory t = redundant_steps_example();
  struct Want {
    std::size_t i, j;
    StepLabel label;
  };
  auto check = [&](std::size_t c, const std::vector<Want>& want) {
    const auto got = merge_at_granularity(t, c, TailPolicy::kKeepIfGe2);
    if (got.size() != want.size()) return false;
    for (std::size_t k = 0; k < got.size(); ++k) {
      if (got[k].span_start != want[k].i || got[k].span_end != want[k].j ||
          got[k].label != want[k].label)
        return false;
    }
    return true;
  };
  using enum StepLabel;
  const bool c4 = check(4, {{1, 4, kNegative}, {5, 7, kNegative}});
  const bool c2 = check(2, {{1, 2, kPositive}, {3, 4, kNegative}, {5, 6, kPositive}});
  return {c4 && c2, fmt("C=4 %s, C=2 %s", c4 ? "match" : "MISMATCH", c2 ? "match" : "MISMATCH")};
}

// ---------------------------------------------------------------------------
// 3. analytic vs finite-difference gradients

Outcome criterion_gradcheck(const Ctx&) {
  const auto t0 = Clock::now();
  SynthConfig scfg;
  scfg.seed = 77;
  std::string detail;
  bool pass = true;
  for (LossKind loss : {LossKind::kBce, LossKind::kMse, LossKind::kQRanking}) {
    double worst = 0.0;
    std::size_t instances = 0;
    for (std::uint64_t inst = 0; inst < 100; ++inst) {
      Rng rng = Rng(2024).split(to_string(loss)).split(inst);
      // Alternate architectures; keep the mlp small enough for a full check
      // on most instances and use the default size on every tenth.
      const Arch arch = inst % 2 == 0 ? Arch::kLinear : Arch::kMlp1;
      const std::size_t dim = inst % 10 == 9 ? kDefaultFeatureDim : 256;
      const std::size_t hidden = 8;
      ScorerParams params = ScorerParams::zeros(arch, dim, hidden);
      for (double& w : params.weights) w = rng.uniform(-0.4, 0.4);

      const SynthTask task = gen_task(rng.next(), scfg);
      std::vector<MergedSample> batch;
      const std::size_t n_traj = 1 + rng.below(3);
      for (std::size_t k = 0; k < n_traj; ++k) {
        const Trajectory tr = sample_trajectory(task, scfg, rng.next());
        const std::size_t c = 1 + rng.below(3);
        auto s = merge_at_granularity(tr, c, TailPolicy::kKeepIfGe2, k);
        batch.insert(batch.end(), s.begin(), s.end());
      }
      if (loss == LossKind::kQRanking) {
        // Guarantee at least one scorable unit.
        bool any_pos = false;
        for (const auto& s : batch) any_pos = any_pos || s.label == StepLabel::kPositive;
        if (!any_pos) batch.front().label = StepLabel::kPositive;
      }
      QRankingConfig q;
      q.normalization = inst % 3 == 0 ? QRankNormalization::kAllSteps
                                      : QRankNormalization::kCorrectSteps;
      GradcheckOptions gopt;
      gopt.seed = inst;
      const auto res = gradcheck(params, batch, loss, q, gopt);
      worst = std::max(worst, res.max_rel_error);
      ++instances;
    }
    pass = pass && worst < 1e-4;
    detail += fmt("%s max rel %.2e over %zu; ", std::string(to_string(loss)).c_str(), worst,
                  instances);
  }
  const double secs = seconds_since(t0);
  pass = pass && secs < 30.0;
  detail += fmt("%.1fs (limit 30s)", secs);
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 4. Q-ranking closed forms

Outcome criterion_qrank_closed_forms(const Ctx&) {
  const QRankingConfig q;
  const std::vector<double> none;
  const double one = loss_qranking(std::vector<double>{0.37}, none, q).value;
  const double two = loss_qranking(std::vector<double>{1.25, 1.25}, none, q).value;
  const double want = std::numbers::ln2 / 2.0;
  const bool pass = one == 0.0 && std::abs(two - want) <= 1e-12;
  return {pass, fmt("single=%.17g (want 0), pair=%.17g (want %.17g, |d|=%.1e)", one, two, want,
                    std::abs(two - want))};
}

// ---------------------------------------------------------------------------
// 5. end-to-end determinism through the CLI

Outcome criterion_determinism(const Ctx& ctx) {
  const std::string& cli = ctx.cli;
  std::vector<std::string> ckpts, reports;
  for (int r = 0; r < 2; ++r) {
    const fs::path d = ctx.workdir / ("determinism_" + std::to_string(r));
    fs::remove_all(d);
    fs::create_directories(d);
    const std::string p = d.string() + "/";
    const std::vector<std::string> cmds = {
        cli + " gen --seed 11 --n-queries 400 --n-eval-queries 40 --train-out " + p +
            "train.jsonl --pools-out " + p + "pools.jsonl",
        cli + " merge --input " + p + "train.jsonl --c-max 2 --output " + p + "merged.jsonl",
        cli + " train --corpus " + p + "merged.jsonl --loss qranking --arch mlp1 --hidden 8" +
            " --seed 5 --out " + p + "model.ckpt",
        cli + " eval --checkpoint " + p + "model.ckpt --pools " + p + "pools.jsonl --seed 3" +
            " --out " + p + "report.json --table " + p + "report.txt",
    };
    for (const auto& c : cmds) {
      if (run(c) != 0) return {false, "command failed: " + c};
    }
    ckpts.push_back(slurp(d / "model.ckpt"));
    reports.push_back(slurp(d / "report.json") + slurp(d / "report.txt"));
  }
  const bool same_ckpt = !ckpts[0].empty() && ckpts[0] == ckpts[1];
  const bool same_report = !reports[0].empty() && reports[0] == reports[1];
  return {same_ckpt && same_report,
          fmt("checkpoint %s (%zu bytes), report %s", same_ckpt ? "identical" : "DIFFERS",
              ckpts[0].size(), same_report ? "identical" : "DIFFERS")};
}

// ---------------------------------------------------------------------------
// 6. oracle best-of-n is monotone in N

Outcome criterion_oracle_monotone(const Ctx&) {
  const CandidateScorer oracle = [](const Trajectory& t) {
    std::vector<double> r;
    for (const auto& s : t.steps) r.push_back(s.label == StepLabel::kPositive ? 1.0 : 0.0);
    return r;
  };
  std::size_t held = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.n_eval_queries = 200;
    cfg.candidates_per_query = 64;
    const auto pools = gen_eval_pools(cfg);
    BonOptions opt;
    opt.seed = seed;
    const auto rep = evaluate(pools, oracle, opt, "oracle");
    bool mono = true;
    for (std::size_t r = 0; r < rep.repeats; ++r) {
      for (std::size_t k = 1; k < rep.ns.size(); ++k)
        mono = mono && rep.correct[r][k - 1] <= rep.correct[r][k];
    }
    for (std::size_t k = 1; k < rep.accuracy.size(); ++k)
      mono = mono && rep.accuracy[k - 1] <= rep.accuracy[k];
    held += mono;
    detail += fmt("s%llu %.3f/%.3f/%.3f/%.3f%s; ", static_cast<unsigned long long>(seed),
                  rep.accuracy[0], rep.accuracy[1], rep.accuracy[2], rep.accuracy[3],
                  mono ? "" : " (!)");
  }
  detail += fmt("monotone in %zu/5 seeds", held);
  return {held == 5, detail};
}

// ---------------------------------------------------------------------------
// 7. merged corpus vs fine-only baseline on synthetic data

Outcome criterion_trend(const Ctx&) {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (LossKind loss : {LossKind::kBce, LossKind::kMse, LossKind::kQRanking}) {
    std::size_t wins = 0;
    std::string diffs;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SynthConfig scfg;
      scfg.seed = seed;
      scfg.p_redundant = 0.4;
      scfg.p_error = 0.25;
      scfg.n_queries = 2000;
      scfg.n_eval_queries = 200;
      scfg.candidates_per_query = 64;
      const auto train_set = gen_training_set(scfg);
      const auto pools = gen_eval_pools(scfg);

      TrainConfig tcfg;
      tcfg.loss = loss;
      tcfg.seed = seed;
      const ScorerParams init = ScorerParams::initial(Arch::kLinear, seed);
      const auto corpus = build_granular_corpus(train_set, MergeConfig{2, 1});
      const auto merged = train(corpus, tcfg, init).first;
      const auto fine = train_baseline(corpus, tcfg, init).first;

      BonOptions opt;
      opt.seed = seed;
      const double a = evaluate(pools, merged, opt).average;
      const double b = evaluate(pools, fine, opt).average;
      wins += a >= b;
      diffs += fmt(" %+.1f", 100.0 * (a - b));
    }
    pass = pass && wins >= 4;
    detail += fmt("%s %zu/5 [%s ]; ", std::string(to_string(loss)).c_str(), wins,
                  diffs.c_str());
  }
  const double secs = seconds_since(t0);
  pass = pass && secs < 600.0;
  detail += fmt("%.0fs (limit 600s)", secs);
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 8. C sweep through the CLI

Outcome criterion_sweep(const Ctx& ctx) {
  const fs::path d = ctx.workdir / "sweep";
  fs::remove_all(d);
  fs::create_directories(d);
  const std::string p = d.string() + "/";
  const std::vector<std::string> cmds = {
      ctx.cli + " gen --seed 3 --n-queries 600 --n-eval-queries 60 --train-out " + p +
          "train.jsonl --pools-out " + p + "pools.jsonl",
      ctx.cli + " eval --sweep-c 2,3,4 --train " + p + "train.jsonl --pools " + p +
          "pools.jsonl --out " + p + "sweep.json --table " + p + "sweep.txt",
  };
  for (const auto& c : cmds) {
    if (run(c) != 0) return {false, "command failed: " + c};
  }
  const auto rows = nlohmann::json::parse(slurp(d / "sweep.json"));
  std::vector<std::size_t> seen;
  std::size_t cells = 0;
  bool finite = true;
  for (const auto& row : rows) {
    seen.push_back(row.at("c").get<std::size_t>());
    const auto& rep = row.at("report");
    for (const auto& a : rep.at("accuracy")) {
      finite = finite && std::isfinite(a.get<double>());
      ++cells;
    }
    finite = finite && std::isfinite(rep.at("avg").get<double>());
    ++cells;
  }
  // Table: header lines plus one line per C.
  std::istringstream table(slurp(d / "sweep.txt"));
  std::size_t table_rows = 0;
  for (std::string line; std::getline(table, line);) {
    if (!line.empty() && line[0] != '#' && line[0] != 'C') ++table_rows;
  }
  const bool pass = seen == std::vector<std::size_t>{1, 2, 3, 4} && cells == 4 * 5 && finite &&
                    table_rows == 4;
  return {pass, fmt("rows for C=1..4: %zu, cells %zu/20, table rows %zu", seen.size(), cells,
                    table_rows)};
}

}  // namespace

int main(int argc, char** argv) {
  Ctx ctx;
  ctx.workdir = fs::temp_directory_path() / "cfprm_acceptance";
  int only = 0;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") ctx.cli = argv[i + 1];
    else if (flag == "--workdir") ctx.workdir = argv[i + 1];
    else if (flag == "--only") only = std::atoi(argv[i + 1]);
  }
  fs::create_directories(ctx.workdir);

  const std::vector<std::pair<const char*, std::function<Outcome(const Ctx&)>>> criteria = {
      {"merge matches brute-force window enumeration", criterion_merge_oracle},
      {"seven-step worked example", criterion_fixture},
      {"gradient check", criterion_gradcheck},
      {"q-ranking closed forms", criterion_qrank_closed_forms},
      {"end-to-end determinism", criterion_determinism},
      {"oracle best-of-n monotone in N", criterion_oracle_monotone},
      {"merged corpus >= fine-only baseline", criterion_trend},
      {"C sweep harness", criterion_sweep},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<std::size_t>(only) != k + 1) continue;
    Outcome o;
    try {
      o = criteria[k].second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
