// cfprm: coarse-to-fine process reward data pipeline.
//
//   cfprm gen      synthetic trajectories + best-of-n candidate pools
//   cfprm merge    step corpus -> merged multi-granularity corpus
//   cfprm train    merged corpus -> scorer checkpoint + run manifest
//   cfprm eval     checkpoint + pools -> best-of-n report (or a C sweep)
//   cfprm inspect  show a trajectory and its merged views
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure. Failures
// print one JSON object on stderr: {"error": kind, "message": text}.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cfprm/bon.hpp"
#include "cfprm/checkpoint.hpp"
#include "cfprm/corpus_io.hpp"
#include "cfprm/errors.hpp"
#include "cfprm/experiment.hpp"
#include "cfprm/fixtures.hpp"
#include "cfprm/merge.hpp"
#include "cfprm/synth.hpp"
#include "cfprm/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

void fail_line(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw cfprm::Error("IOError", "cannot open " + path.string() + " for writing");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

void write_manifest(const fs::path& path, const std::string& command, json body) {
  body["command"] = command;
  body["tool_version"] = "0.1.0";
  write_text(path, body.dump(2) + "\n");
}

fs::path default_manifest(const fs::path& output) {
  return fs::path(output.string() + ".manifest.json");
}

std::vector<std::size_t> parse_list(const std::string& csv) {
  std::vector<std::size_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const unsigned long v = std::stoul(item, &pos);
    if (pos != item.size()) throw cfprm::ConfigError("bad list element \"" + item + "\"");
    out.push_back(v);
  }
  if (out.empty()) throw cfprm::ConfigError("empty list \"" + csv + "\"");
  return out;
}

// ---------------------------------------------------------------- options

struct GenArgs {
  cfprm::SynthConfig synth;
  fs::path train_out = "train.jsonl";
  fs::path pools_out = "pools.jsonl";
  fs::path manifest;
};

struct MergeArgs {
  fs::path input;
  std::string format = "native";
  bool lenient = false;
  std::size_t c_max = 2;
  std::size_t c_min = 1;
  std::string tail_policy = "keep_if_ge_2";
  fs::path output = "merged.jsonl";
  fs::path manifest;
};

struct TrainArgs {
  std::string loss = "bce";
  double lr = 0.05;
  std::size_t batch_size = 32;
  std::size_t epochs_per_bucket = 1;
  std::uint64_t seed = 0;
  double zeta = cfprm::QRankingConfig::kDefaultMargin;
  std::string qrank_norm = "correct_steps";
  std::string arch = "linear";
  std::size_t hidden = cfprm::kDefaultHiddenDim;
  std::size_t dim = cfprm::kDefaultFeatureDim;

  cfprm::TrainConfig config() const {
    cfprm::TrainConfig cfg;
    cfg.loss = cfprm::loss_kind_from_string(loss);
    cfg.learning_rate = lr;
    cfg.batch_size = batch_size;
    cfg.epochs_per_bucket = epochs_per_bucket;
    cfg.seed = seed;
    cfg.qranking.margin = zeta;
    if (qrank_norm == "correct_steps") {
      cfg.qranking.normalization = cfprm::QRankNormalization::kCorrectSteps;
    } else if (qrank_norm == "all_steps") {
      cfg.qranking.normalization = cfprm::QRankNormalization::kAllSteps;
    } else {
      throw cfprm::ConfigError("unknown --qrank-norm \"" + qrank_norm + "\"");
    }
    cfg.validate();
    return cfg;
  }
};

void add_train_options(CLI::App* app, TrainArgs& a, const std::string& seed_flag = "--seed") {
  app->add_option("--loss", a.loss, "bce | mse | qranking")->capture_default_str();
  app->add_option("--lr", a.lr, "SGD learning rate")->capture_default_str();
  app->add_option("--batch-size", a.batch_size)->capture_default_str();
  app->add_option("--epochs-per-bucket", a.epochs_per_bucket)->capture_default_str();
  app->add_option(seed_flag, a.seed, "training seed")->capture_default_str();
  app->add_option("--zeta", a.zeta, "Q-ranking margin")->capture_default_str();
  app->add_option("--qrank-norm", a.qrank_norm, "correct_steps | all_steps")
      ->capture_default_str();
  app->add_option("--arch", a.arch, "linear | mlp1")->capture_default_str();
  app->add_option("--hidden", a.hidden, "mlp1 hidden width")->capture_default_str();
  app->add_option("--dim", a.dim, "hashed feature dimension")->capture_default_str();
}

json train_args_json(const TrainArgs& a) {
  return {{"loss", a.loss},   {"lr", a.lr},     {"batch_size", a.batch_size},
          {"epochs_per_bucket", a.epochs_per_bucket},
          {"seed", a.seed},   {"zeta", a.zeta}, {"qrank_norm", a.qrank_norm},
          {"arch", a.arch},   {"hidden", a.hidden}, {"dim", a.dim}};
}

struct EvalArgs {
  fs::path checkpoint;
  fs::path pools;
  std::string agg = "min";
  std::string ns = "8,16,32,64";
  std::size_t repeats = cfprm::kDefaultBonRepeats;
  std::uint64_t seed = 0;
  fs::path out = "report.json";
  fs::path table;
  fs::path manifest;
  // C sweep
  std::string sweep_c;
  fs::path train_data;
  std::string tail_policy = "keep_if_ge_2";
  TrainArgs train;
};

struct InspectArgs {
  fs::path input;
  std::size_t index = 0;
  bool example = false;
  std::size_t c_max = 4;
  std::string tail_policy = "keep_if_ge_2";
};

// --------------------------------------------------------------- commands

int run_gen(const GenArgs& a) {
  a.synth.validate();
  const auto train = cfprm::gen_training_set(a.synth);
  const auto pools = cfprm::gen_eval_pools(a.synth);

  std::vector<cfprm::CorpusRecord> records;
  records.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    records.push_back(cfprm::make_record(train[i], {{"task", i}, {"source", "synth"}}));
  }
  {
    auto out = open_out(a.train_out);
    cfprm::write_records(out, records);
  }
  {
    auto out = open_out(a.pools_out);
    cfprm::write_pools(out, pools);
  }
  write_manifest(a.manifest.empty() ? default_manifest(a.train_out) : a.manifest, "gen",
                 {{"synth", a.synth.to_json()},
                  {"train_out", a.train_out.string()},
                  {"pools_out", a.pools_out.string()},
                  {"train_trajectories", train.size()},
                  {"pools", pools.size()}});
  std::cout << json{{"train_trajectories", train.size()}, {"pools", pools.size()},
                    {"candidates_per_pool", a.synth.candidates_per_query}}
                   .dump()
            << '\n';
  return kExitOk;
}

int run_merge(const MergeArgs& a) {
  cfprm::MergeConfig cfg{a.c_max, a.c_min, cfprm::tail_policy_from_string(a.tail_policy)};
  cfg.validate();
  cfprm::IngestOptions opts;
  opts.format = cfprm::input_format_from_string(a.format);
  opts.strict = !a.lenient;
  const auto ingested = cfprm::ingest(a.input, opts);
  const auto trajectories = cfprm::trajectories_of(ingested.records);
  const auto corpus = cfprm::build_granular_corpus(trajectories, cfg);
  {
    auto out = open_out(a.output);
    cfprm::write_merged_corpus(out, corpus);
  }

  json sizes = json::object();
  json expected = json::object();
  bool consistent = true;
  for (const auto& [c, samples] : corpus.buckets) {
    std::size_t want = 0;
    for (const auto& t : trajectories) want += cfprm::count_samples(t.size(), c, cfg.tail_policy);
    sizes[std::to_string(c)] = samples.size();
    expected[std::to_string(c)] = want;
    consistent &= want == samples.size();
  }
  const json summary = {{"buckets", sizes},
                        {"expected", expected},
                        {"consistent", consistent},
                        {"trajectories", trajectories.size()},
                        {"skipped_lines", ingested.skipped}};
  write_manifest(a.manifest.empty() ? default_manifest(a.output) : a.manifest, "merge",
                 {{"input", a.input.string()},
                  {"format", a.format},
                  {"strict", !a.lenient},
                  {"c_max", a.c_max},
                  {"c_min", a.c_min},
                  {"tail_policy", a.tail_policy},
                  {"output", a.output.string()},
                  {"merge_policy", {{"stride", "window"}, {"separator", "\\n"}}},
                  {"summary", summary},
                  {"ingest_errors", ingested.errors}});
  for (const auto& e : ingested.errors) std::cerr << "skipped " << e << '\n';
  std::cout << summary.dump() << '\n';
  if (!consistent) {
    fail_line("CountMismatch", "bucket sizes disagree with the closed-form count");
    return kExitData;
  }
  return kExitOk;
}

struct TrainCommand {
  fs::path corpus;
  bool fine_only = false;
  fs::path out = "model.ckpt";
  fs::path manifest;
  TrainArgs train;
};

int run_train(const TrainCommand& a) {
  const auto cfg = a.train.config();
  const auto corpus = cfprm::read_merged_corpus(a.corpus);
  const auto init = cfprm::ScorerParams::initial(cfprm::arch_from_string(a.train.arch), cfg.seed,
                                                 a.train.dim, a.train.hidden);
  const fs::path manifest_path = a.manifest.empty() ? default_manifest(a.out) : a.manifest;
  json args = {{"corpus", a.corpus.string()},
               {"fine_only", a.fine_only},
               {"out", a.out.string()},
               {"train", train_args_json(a.train)}};
  try {
    auto [params, manifest] =
        a.fine_only ? cfprm::train_baseline(corpus, cfg, init) : cfprm::train(corpus, cfg, init);
    cfprm::save_checkpoint(params, a.out);
    args["run"] = manifest.to_json();
    args["checkpoint_id"] = cfprm::checkpoint_id(params);
    write_manifest(manifest_path, "train", args);
    std::cout << json{{"checkpoint", a.out.string()},
                      {"checkpoint_id", cfprm::checkpoint_id(params)},
                      {"bucket_order", manifest.bucket_order}}
                     .dump()
              << '\n';
  } catch (const cfprm::NonFiniteLossError& e) {
    args["run"] = json::parse(e.manifest_json());
    args["aborted"] = e.what();
    write_manifest(manifest_path, "train", args);
    throw;
  }
  return kExitOk;
}

int run_eval(const EvalArgs& a) {
  cfprm::BonOptions opts;
  opts.ns = parse_list(a.ns);
  opts.repeats = a.repeats;
  opts.seed = a.seed;
  opts.rule = cfprm::aggregation_from_string(a.agg);
  const auto pools = cfprm::read_pools(a.pools);
  const fs::path manifest_path = a.manifest.empty() ? default_manifest(a.out) : a.manifest;
  json args = {{"pools", a.pools.string()}, {"agg", a.agg},   {"ns", opts.ns},
               {"repeats", a.repeats},      {"seed", a.seed}, {"out", a.out.string()}};

  std::string table;
  if (!a.sweep_c.empty()) {
    if (a.train_data.empty()) throw cfprm::ConfigError("--sweep-c needs --train");
    const auto cs = parse_list(a.sweep_c);
    const auto records = cfprm::ingest(a.train_data).records;
    const auto train_set = cfprm::trajectories_of(records);
    cfprm::ExperimentConfig cfg;
    cfg.train = a.train.config();
    cfg.arch = cfprm::arch_from_string(a.train.arch);
    cfg.dim = a.train.dim;
    cfg.hidden = a.train.hidden;
    cfg.tail_policy = cfprm::tail_policy_from_string(a.tail_policy);
    cfg.bon = opts;
    const auto rows = cfprm::run_c_sweep(train_set, pools, cfg, cs);
    write_text(a.out, cfprm::sweep_to_json(rows).dump(2) + "\n");
    table = cfprm::sweep_to_table(rows);
    args["sweep_c"] = cs;
    args["train_data"] = a.train_data.string();
    args["tail_policy"] = a.tail_policy;
    args["train"] = train_args_json(a.train);
  } else {
    if (a.checkpoint.empty()) throw cfprm::ConfigError("eval needs --checkpoint or --sweep-c");
    const auto params = cfprm::load_checkpoint(a.checkpoint);
    const auto report = cfprm::evaluate(pools, params, opts);
    write_text(a.out, report.to_json().dump(2) + "\n");
    table = report.to_table();
    args["checkpoint"] = a.checkpoint.string();
    args["checkpoint_id"] = report.scorer_id;
  }
  if (!a.table.empty()) write_text(a.table, table);
  write_manifest(manifest_path, "eval", args);
  std::cout << table;
  return kExitOk;
}

int run_inspect(const InspectArgs& a) {
  cfprm::Trajectory t;
  if (a.example || a.input.empty()) {
    t = cfprm::redundant_steps_example();
  } else {
    const auto records = cfprm::ingest(a.input).records;
    if (a.index >= records.size()) {
      throw cfprm::ConfigError("--index " + std::to_string(a.index) + " out of range (" +
                               std::to_string(records.size()) + " records)");
    }
    t = records[a.index].trajectory;
  }
  cfprm::validate_trajectory(t);
  const auto policy = cfprm::tail_policy_from_string(a.tail_policy);
  const std::size_t c_max = std::max<std::size_t>(1, a.c_max);

  std::cout << "query: " << t.query << '\n';
  if (t.answer_correct) std::cout << "answer_correct: " << (*t.answer_correct ? "true" : "false") << '\n';
  std::cout << "steps (" << t.size() << "):\n";
  for (const auto& s : t.steps) {
    std::cout << "  s" << s.index << "  " << cfprm::to_symbol(s.label) << "  " << s.text << '\n';
  }
  for (std::size_t c = c_max; c >= 1; --c) {
    const auto merged = cfprm::merge_at_granularity(t, c, policy);
    std::cout << "\nC=" << c << "  (" << merged.size() << " samples, tail=" << a.tail_policy
              << ")\n";
    for (const auto& m : merged) {
      std::string flat = m.text;
      for (char& ch : flat) {
        if (ch == '\n') ch = ' ';
      }
      std::cout << "  s" << m.span_start << ":" << m.span_end << "  " << cfprm::to_symbol(m.label)
                << (m.length() < c ? "  [tail]" : "") << "  " << flat << '\n';
    }
    if (c == 1) break;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cfprm: coarse-to-fine process reward data pipeline"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate synthetic trajectories and BoN pools");
  gen_cmd->add_option("--n-queries", gen.synth.n_queries, "training trajectories")
      ->capture_default_str();
  gen_cmd->add_option("--n-eval-queries", gen.synth.n_eval_queries, "queries with BoN pools")
      ->capture_default_str();
  gen_cmd->add_option("--min-ops", gen.synth.min_ops)->capture_default_str();
  gen_cmd->add_option("--max-ops", gen.synth.max_ops)->capture_default_str();
  gen_cmd->add_option("--p-error", gen.synth.p_error)->capture_default_str();
  gen_cmd->add_option("--p-recover", gen.synth.p_recover)->capture_default_str();
  gen_cmd->add_option("--p-redundant", gen.synth.p_redundant)->capture_default_str();
  gen_cmd->add_option("--candidates", gen.synth.candidates_per_query)->capture_default_str();
  gen_cmd->add_option("--max-value", gen.synth.max_value)->capture_default_str();
  gen_cmd->add_option("--seed", gen.synth.seed)->capture_default_str();
  gen_cmd->add_option("--train-out", gen.train_out)->capture_default_str();
  gen_cmd->add_option("--pools-out", gen.pools_out)->capture_default_str();
  gen_cmd->add_option("--manifest", gen.manifest);

  MergeArgs merge;
  auto* merge_cmd = app.add_subcommand("merge", "build the multi-granularity merged corpus");
  merge_cmd->add_option("--input", merge.input)->required();
  merge_cmd->add_option("--format", merge.format, "native | prm800k")->capture_default_str();
  merge_cmd->add_flag("--lenient", merge.lenient, "skip malformed lines instead of aborting");
  merge_cmd->add_option("--c-max", merge.c_max)->capture_default_str();
  merge_cmd->add_option("--c-min", merge.c_min)->capture_default_str();
  merge_cmd->add_option("--tail-policy", merge.tail_policy, "drop | keep_if_ge_2")
      ->capture_default_str();
  merge_cmd->add_option("--output", merge.output)->capture_default_str();
  merge_cmd->add_option("--manifest", merge.manifest);

  TrainCommand train;
  auto* train_cmd = app.add_subcommand("train", "train a scorer over a merged corpus");
  train_cmd->add_option("--corpus", train.corpus)->required();
  train_cmd->add_flag("--fine-only", train.fine_only, "train on the C=1 bucket only");
  train_cmd->add_option("--out", train.out)->capture_default_str();
  train_cmd->add_option("--manifest", train.manifest);
  add_train_options(train_cmd, train.train);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "best-of-n evaluation");
  eval_cmd->add_option("--checkpoint", eval.checkpoint);
  eval_cmd->add_option("--pools", eval.pools)->required();
  eval_cmd->add_option("--agg", eval.agg, "min | last | mean | prod")->capture_default_str();
  eval_cmd->add_option("--ns", eval.ns)->capture_default_str();
  eval_cmd->add_option("--repeats", eval.repeats)->capture_default_str();
  eval_cmd->add_option("--seed", eval.seed)->capture_default_str();
  eval_cmd->add_option("--out", eval.out)->capture_default_str();
  eval_cmd->add_option("--table", eval.table, "also write the text table here");
  eval_cmd->add_option("--manifest", eval.manifest);
  eval_cmd->add_option("--sweep-c", eval.sweep_c, "train and evaluate one scorer per C, e.g. 2,3,4");
  eval_cmd->add_option("--train", eval.train_data, "training trajectories for --sweep-c");
  eval_cmd->add_option("--tail-policy", eval.tail_policy)->capture_default_str();
  add_train_options(eval_cmd, eval.train, "--train-seed");

  InspectArgs inspect;
  auto* inspect_cmd = app.add_subcommand("inspect", "print a trajectory and its merged views");
  inspect_cmd->add_option("--input", inspect.input, "trajectory JSONL (default: built-in example)");
  inspect_cmd->add_option("--index", inspect.index)->capture_default_str();
  inspect_cmd->add_flag("--example", inspect.example, "use the built-in 7-step example");
  inspect_cmd->add_option("--c-max", inspect.c_max)->capture_default_str();
  inspect_cmd->add_option("--tail-policy", inspect.tail_policy)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail_line("UsageError", e.what());
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*merge_cmd) return run_merge(merge);
    if (*train_cmd) return run_train(train);
    if (*eval_cmd) return run_eval(eval);
    if (*inspect_cmd) return run_inspect(inspect);
  } catch (const cfprm::Error& e) {
    fail_line(e.kind(), e.what());
    switch (e.category()) {
      case cfprm::ErrorCategory::kUsage: return kExitUsage;
      case cfprm::ErrorCategory::kNumeric: return kExitNumeric;
      case cfprm::ErrorCategory::kData: return kExitData;
    }
  } catch (const std::exception& e) {
    fail_line("InternalError", e.what());
    return kExitData;
  }
  return kExitUsage;
}
