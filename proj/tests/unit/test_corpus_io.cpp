#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfprm/corpus_io.hpp"
#include "cfprm/errors.hpp"
#include "cfprm/fixtures.hpp"
#include "cfprm/merge.hpp"
#include "cfprm/synth.hpp"

using namespace cfprm;
using nlohmann::json;

namespace {

IngestResult ingest_text(const std::string& text, IngestOptions opts = {}) {
  std::istringstream in(text);
  return ingest(in, opts);
}

}  // namespace

TEST(Native, RoundTrip) {
  const auto rec = make_record(redundant_steps_example(), json{{"source", "fixture"}});
  const std::string line = encode_record(rec);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const auto back = parse_record(line, 1);
  EXPECT_EQ(back.trajectory, rec.trajectory);
  EXPECT_EQ(back.meta, rec.meta);
  EXPECT_EQ(encode_record(back), line);
}

TEST(Native, UnknownFieldsArePreserved) {
  const std::string line =
      R"({"query":"q","steps":[{"text":"a","label":"+","score":0.7},{"text":"b","label":"-"}],)"
      R"("answer_correct":false,"origin":{"k":[1,2]},"meta":{"m":1}})";
  const auto rec = parse_record(line, 3);
  EXPECT_EQ(rec.extra.at("origin"), (json{{"k", {1, 2}}}));
  EXPECT_EQ(rec.step_extra.at(0).at("score"), 0.7);
  EXPECT_EQ(json::parse(encode_record(rec)), json::parse(line));
}

TEST(Native, Errors) {
  EXPECT_THROW(parse_record("{not json", 1), ParseError);
  EXPECT_THROW(parse_record(R"({"steps":[]})", 1), ParseError);
  EXPECT_THROW(parse_record(R"({"query":"q","steps":[]})", 1), ParseError);
  EXPECT_THROW(parse_record(R"({"query":"q","steps":[{"text":"","label":"+"}]})", 1), ParseError);
  try {
    parse_record(R"({"query":"q","steps":[{"text":"a","label":"?"}]})", 7);
    ADD_FAILURE();
  } catch (const LabelDomainError& e) {
    EXPECT_EQ(e.line(), 7u);
  }
}

TEST(Ingest, StrictAbortsLenientSkips) {
  const std::string text =
      R"({"query":"q","steps":[{"text":"a","label":"+"}]})"
      "\n\n"
      R"({"query":"q","steps":[{"text":"a","label":"x"}]})"
      "\n"
      R"({"query":"q2","steps":[{"text":"b","label":"-"}]})"
      "\n";
  try {
    ingest_text(text);
    ADD_FAILURE();
  } catch (const LineError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  const auto lenient = ingest_text(text, {InputFormat::kNative, false});
  EXPECT_EQ(lenient.records.size(), 2u);
  EXPECT_EQ(lenient.skipped, 1u);
  ASSERT_EQ(lenient.errors.size(), 1u);
  EXPECT_NE(lenient.errors[0].find("line 3"), std::string::npos);
}

TEST(Ingest, EmptyInput) {
  EXPECT_TRUE(ingest_text("").records.empty());
  EXPECT_TRUE(ingest_text("\n  \n").records.empty());
  EXPECT_THROW(ingest(std::filesystem::path("/nonexistent/cfprm.jsonl")), ParseError);
}

TEST(Prm800k, RatingMapping) {
  EXPECT_EQ(prm800k_label(1), StepLabel::kPositive);
  EXPECT_EQ(prm800k_label(0), StepLabel::kPositive);
  EXPECT_EQ(prm800k_label(-1), StepLabel::kNegative);
  EXPECT_EQ(prm800k_label("0"), StepLabel::kPositive);
  EXPECT_EQ(prm800k_label("-1"), StepLabel::kNegative);
  EXPECT_THROW(prm800k_label(2), std::invalid_argument);
  EXPECT_THROW(prm800k_label("neutral?"), std::invalid_argument);
  EXPECT_THROW(prm800k_label(json(nullptr)), std::invalid_argument);
}

TEST(Prm800k, SampleFile) {
  const auto res = ingest(std::filesystem::path(CFPRM_TEST_DATA) / "prm800k_sample.jsonl",
                          {InputFormat::kPrm800k, true});
  ASSERT_EQ(res.records.size(), 3u);

  const auto& a = res.records[0];
  EXPECT_EQ(a.trajectory.query, "What is 2 + 3 * 4?");
  ASSERT_EQ(a.trajectory.size(), 3u);
  EXPECT_EQ(a.trajectory.steps[0].text, "Multiply first: 3 * 4 = 12.");
  EXPECT_EQ(a.trajectory.steps[2].label, StepLabel::kPositive);  // neutral
  EXPECT_FALSE(a.trajectory.answer_correct.has_value());
  EXPECT_EQ(a.meta.at("ground_truth_answer"), "14");
  EXPECT_EQ(a.meta.at("labeler"), "l-01");

  // No chosen completion: first -1 rating; then the human rewrite.
  const auto& b = res.records[1];
  EXPECT_EQ(b.trajectory.steps[1].text, "4 - 3 = 1, so 10 - 1 = 9.");
  EXPECT_EQ(b.trajectory.steps[1].label, StepLabel::kNegative);
  EXPECT_EQ(b.trajectory.steps[2].text, "6 - 3 = 3.");
  EXPECT_EQ(b.trajectory.steps[2].label, StepLabel::kPositive);

  const auto& c = res.records[2];
  EXPECT_EQ(c.trajectory.query, "Flat form: what is 1+1?");
  EXPECT_EQ(c.trajectory.steps[1].label, StepLabel::kPositive);
}

TEST(Prm800k, BadRating) {
  const std::string line = R"({"question":"q","steps":[{"text":"a","rating":5}]})";
  EXPECT_THROW(parse_record(line, 1, InputFormat::kPrm800k), LabelDomainError);
}

TEST(Merged, LineRoundTrip) {
  const auto samples = merge_at_granularity(redundant_steps_example(), 2, TailPolicy::kKeepIfGe2, 4);
  for (const auto& s : samples) {
    const auto line = encode_merged(s);
    const auto j = json::parse(line);
    EXPECT_EQ(j.at("span"), (json{s.span_start, s.span_end}));
    EXPECT_EQ(parse_merged(line, 1), s);
  }
  EXPECT_THROW(parse_merged(R"({"query":"q","text":"t","label":"+","granularity":3,"span":[1,1],"source_id":0})", 2),
               ParseError);
}

TEST(Merged, CorpusRoundTrip) {
  SynthConfig cfg;
  cfg.n_queries = 30;
  const auto trajs = gen_training_set(cfg);
  const auto corpus = build_granular_corpus(trajs, MergeConfig{3, 1});
  std::stringstream buf;
  write_merged_corpus(buf, corpus);
  const auto back = read_merged_corpus(buf);
  EXPECT_EQ(back.traversal_order(), corpus.traversal_order());
  for (std::size_t c : corpus.traversal_order()) EXPECT_EQ(back.bucket(c), corpus.bucket(c));
}

TEST(Merged, MissingBucketsAreFilled) {
  MergedSample s;
  s.query = "q";
  s.text = "a\nb\nc";
  s.span_start = 1;
  s.span_end = 3;
  s.granularity = 3;
  std::stringstream buf(encode_merged(s) + "\n");
  const auto corpus = read_merged_corpus(buf);
  EXPECT_EQ(corpus.traversal_order(), (std::vector<std::size_t>{3, 2, 1}));
  EXPECT_TRUE(corpus.bucket(2).empty());
}

TEST(Pools, RoundTrip) {
  SynthConfig cfg;
  cfg.n_eval_queries = 4;
  cfg.candidates_per_query = 8;
  const auto pools = gen_eval_pools(cfg);
  std::stringstream buf;
  write_pools(buf, pools);
  EXPECT_EQ(read_pools(buf), pools);
}
