#include "cfprm/corpus_io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "cfprm/errors.hpp"

namespace cfprm {

using nlohmann::json;

CorpusRecord make_record(Trajectory t, json meta) {
  CorpusRecord r;
  r.step_extra.assign(t.steps.size(), json::object());
  r.trajectory = std::move(t);
  r.meta = std::move(meta);
  return r;
}

InputFormat input_format_from_string(std::string_view s) {
  if (s == "native") return InputFormat::kNative;
  if (s == "prm800k") return InputFormat::kPrm800k;
  throw ConfigError("unknown input format \"" + std::string(s) + "\"");
}

StepLabel prm800k_label(const json& rating) {
  int v = 0;
  if (rating.is_number_integer()) {
    v = rating.get<int>();
  } else if (rating.is_string()) {
    const auto& s = rating.get_ref<const std::string&>();
    if (s == "1" || s == "+1") v = 1;
    else if (s == "0") v = 0;
    else if (s == "-1") v = -1;
    else throw std::invalid_argument("rating \"" + s + "\" is not one of -1, 0, 1");
  } else {
    throw std::invalid_argument("rating must be -1, 0 or 1, got " + rating.dump());
  }
  if (v == 1 || v == 0) return StepLabel::kPositive;
  if (v == -1) return StepLabel::kNegative;
  throw std::invalid_argument("rating " + std::to_string(v) + " is not one of -1, 0, 1");
}

namespace {

json parse_json(std::string_view line, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_no, e.what());
  }
}

const json& require(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line_no, std::string("missing field \"") + key + "\"");
  return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t line_no) {
  const json& v = require(obj, key, line_no);
  if (!v.is_string()) throw ParseError(line_no, std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

std::size_t require_index(const json& v, const char* what, std::size_t line_no) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ParseError(line_no, std::string(what) + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

CorpusRecord parse_native(const json& doc, std::size_t line_no) {
  if (!doc.is_object()) throw ParseError(line_no, "record must be a JSON object");
  CorpusRecord rec;
  rec.trajectory.query = require_string(doc, "query", line_no);
  const json& steps = require(doc, "steps", line_no);
  if (!steps.is_array()) throw ParseError(line_no, "\"steps\" must be an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const json& s = steps[i];
    if (!s.is_object()) throw ParseError(line_no, "each step must be an object");
    Step step;
    step.index = i + 1;
    step.text = require_string(s, "text", line_no);
    const json& label = require(s, "label", line_no);
    if (!label.is_string()) throw LabelDomainError(line_no, "label must be \"+\" or \"-\"");
    try {
      step.label = label_from_symbol(label.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw LabelDomainError(line_no, e.what());
    }
    json extra = json::object();
    for (auto it = s.begin(); it != s.end(); ++it) {
      if (it.key() != "text" && it.key() != "label") extra[it.key()] = it.value();
    }
    rec.trajectory.steps.push_back(std::move(step));
    rec.step_extra.push_back(std::move(extra));
  }
  if (auto it = doc.find("answer_correct"); it != doc.end() && !it->is_null()) {
    if (!it->is_boolean()) throw ParseError(line_no, "\"answer_correct\" must be a boolean");
    rec.trajectory.answer_correct = it->get<bool>();
  }
  if (auto it = doc.find("meta"); it != doc.end()) rec.meta = *it;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& k = it.key();
    if (k != "query" && k != "steps" && k != "answer_correct" && k != "meta") {
      rec.extra[k] = it.value();
    }
  }
  return rec;
}

// Picks the completion PRM800K settled on for one step: the chosen one, else
// the human rewrite, else the first completion rated -1, else the first.
struct Completion {
  const json* doc;
  bool human;
};

Completion pick_completion(const json& step, std::size_t line_no) {
  if (auto it = step.find("chosen_completion"); it != step.end() && it->is_number_integer()) {
    const auto& completions = require(step, "completions", line_no);
    const auto idx = it->get<std::int64_t>();
    if (!completions.is_array() || idx < 0 || static_cast<std::size_t>(idx) >= completions.size()) {
      throw ParseError(line_no, "chosen_completion out of range");
    }
    return {&completions[static_cast<std::size_t>(idx)], false};
  }
  if (auto it = step.find("human_completion"); it != step.end() && it->is_object()) {
    return {&*it, true};
  }
  const auto& completions = require(step, "completions", line_no);
  if (!completions.is_array() || completions.empty()) {
    throw ParseError(line_no, "step has no completions");
  }
  for (const auto& c : completions) {
    if (auto r = c.find("rating"); r != c.end() && r->is_number_integer() && r->get<int>() == -1) {
      return {&c, false};
    }
  }
  return {&completions[0], false};
}

CorpusRecord parse_prm800k(const json& doc, std::size_t line_no) {
  if (!doc.is_object()) throw ParseError(line_no, "record must be a JSON object");
  CorpusRecord rec;
  json meta = json::object();

  const json* steps = nullptr;
  bool nested = false;
  if (auto q = doc.find("question"); q != doc.end() && q->is_object()) {
    rec.trajectory.query = require_string(*q, "problem", line_no);
    if (auto a = q->find("ground_truth_answer"); a != q->end()) meta["ground_truth_answer"] = *a;
  } else {
    rec.trajectory.query = require_string(doc, "question", line_no);
  }
  if (auto l = doc.find("label"); l != doc.end() && l->is_object()) {
    steps = &require(*l, "steps", line_no);
    nested = true;
    if (auto f = l->find("finish_reason"); f != l->end()) meta["finish_reason"] = *f;
  } else {
    steps = &require(doc, "steps", line_no);
  }
  if (!steps->is_array()) throw ParseError(line_no, "steps must be an array");

  for (std::size_t i = 0; i < steps->size(); ++i) {
    const json& s = (*steps)[i];
    if (!s.is_object()) throw ParseError(line_no, "each step must be an object");
    const Completion picked = nested ? pick_completion(s, line_no) : Completion{&s, false};
    const json& chosen = *picked.doc;
    Step step;
    step.index = i + 1;
    step.text = require_string(chosen, "text", line_no);
    const json* rating = nullptr;
    if (auto r = chosen.find("rating"); r != chosen.end()) rating = &*r;
    else if (auto lb = chosen.find("label"); lb != chosen.end()) rating = &*lb;
    const bool human = picked.human;
    try {
      if (rating == nullptr || rating->is_null()) {
        // Human rewrites carry no rating and are correct by construction.
        if (!human) throw std::invalid_argument("step " + std::to_string(i + 1) + " has no rating");
        step.label = StepLabel::kPositive;
      } else {
        step.label = prm800k_label(*rating);
      }
    } catch (const std::invalid_argument& e) {
      throw LabelDomainError(line_no, e.what());
    }
    json extra = json::object();
    if (rating != nullptr) extra["rating"] = *rating;
    rec.trajectory.steps.push_back(std::move(step));
    rec.step_extra.push_back(std::move(extra));
  }
  for (const char* key : {"labeler", "timestamp", "generation"}) {
    if (auto it = doc.find(key); it != doc.end()) meta[key] = *it;
  }
  meta["source_format"] = "prm800k";
  rec.meta = std::move(meta);
  return rec;
}

bool blank_line(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

CorpusRecord parse_record(std::string_view line, std::size_t line_no, InputFormat format) {
  const json doc = parse_json(line, line_no);
  CorpusRecord rec = format == InputFormat::kNative ? parse_native(doc, line_no)
                                                    : parse_prm800k(doc, line_no);
  try {
    validate_trajectory(rec.trajectory);
  } catch (const Error& e) {
    throw ParseError(line_no, e.kind() + ": " + e.what());
  }
  return rec;
}

IngestResult ingest(std::istream& in, const IngestOptions& opts) {
  IngestResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_line(line)) continue;
    try {
      result.records.push_back(parse_record(line, line_no, opts.format));
    } catch (const LineError& e) {
      if (opts.strict) throw;
      ++result.skipped;
      result.errors.push_back(e.what());
    }
  }
  return result;
}

IngestResult ingest(const std::filesystem::path& path, const IngestOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  return ingest(in, opts);
}

std::vector<Trajectory> trajectories_of(std::span<const CorpusRecord> records) {
  std::vector<Trajectory> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.trajectory);
  return out;
}

std::string encode_record(const CorpusRecord& record) {
  json doc = record.extra.is_object() ? record.extra : json::object();
  doc["query"] = record.trajectory.query;
  json steps = json::array();
  for (std::size_t i = 0; i < record.trajectory.steps.size(); ++i) {
    const auto& s = record.trajectory.steps[i];
    json step = (i < record.step_extra.size() && record.step_extra[i].is_object())
                    ? record.step_extra[i]
                    : json::object();
    step["text"] = s.text;
    step["label"] = to_symbol(s.label);
    steps.push_back(std::move(step));
  }
  doc["steps"] = std::move(steps);
  if (record.trajectory.answer_correct) doc["answer_correct"] = *record.trajectory.answer_correct;
  if (!record.meta.is_null()) doc["meta"] = record.meta;
  return doc.dump();
}

void write_records(std::ostream& out, std::span<const CorpusRecord> records) {
  for (const auto& r : records) out << encode_record(r) << '\n';
}

std::string encode_merged(const MergedSample& s) {
  json doc = {{"query", s.query},
              {"text", s.text},
              {"context", s.context},
              {"label", to_symbol(s.label)},
              {"granularity", s.granularity},
              {"span", {s.span_start, s.span_end}},
              {"source_id", s.source_id}};
  return doc.dump();
}

MergedSample parse_merged(std::string_view line, std::size_t line_no) {
  const json doc = parse_json(line, line_no);
  if (!doc.is_object()) throw ParseError(line_no, "record must be a JSON object");
  MergedSample s;
  s.query = require_string(doc, "query", line_no);
  s.text = require_string(doc, "text", line_no);
  if (auto it = doc.find("context"); it != doc.end()) {
    if (!it->is_string()) throw ParseError(line_no, "\"context\" must be a string");
    s.context = it->get<std::string>();
  }
  const json& label = require(doc, "label", line_no);
  if (!label.is_string()) throw LabelDomainError(line_no, "label must be \"+\" or \"-\"");
  try {
    s.label = label_from_symbol(label.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw LabelDomainError(line_no, e.what());
  }
  s.granularity = require_index(require(doc, "granularity", line_no), "granularity", line_no);
  const json& span = require(doc, "span", line_no);
  if (!span.is_array() || span.size() != 2) throw ParseError(line_no, "span must be [start, end]");
  s.span_start = require_index(span[0], "span start", line_no);
  s.span_end = require_index(span[1], "span end", line_no);
  s.source_id = require_index(require(doc, "source_id", line_no), "source_id", line_no);
  // Full windows span exactly C steps; tail windows span 2..C-1.
  if (s.granularity < 1 || s.span_start < 1 || s.span_end < s.span_start ||
      s.length() > s.granularity || (s.length() < s.granularity && s.length() < 2)) {
    throw ParseError(line_no, "inconsistent span/granularity");
  }
  return s;
}

void write_merged_corpus(std::ostream& out, const GranularCorpus& corpus) {
  for (const auto& [c, samples] : corpus.buckets) {
    for (const auto& s : samples) out << encode_merged(s) << '\n';
  }
}

GranularCorpus read_merged_corpus(std::istream& in) {
  GranularCorpus corpus;
  corpus.c_max = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_line(line)) continue;
    MergedSample s = parse_merged(line, line_no);
    corpus.c_max = std::max(corpus.c_max, s.granularity);
    corpus.buckets[s.granularity].push_back(std::move(s));
  }
  for (std::size_t c = 1; c <= corpus.c_max; ++c) corpus.buckets[c];
  if (corpus.c_max == 0) corpus.c_max = 1;
  return corpus;
}

GranularCorpus read_merged_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  return read_merged_corpus(in);
}

void write_pools(std::ostream& out, std::span<const CandidatePool> pools) {
  for (std::size_t q = 0; q < pools.size(); ++q) {
    for (std::size_t j = 0; j < pools[q].candidates.size(); ++j) {
      out << encode_record(make_record(pools[q].candidates[j], {{"pool", q}, {"candidate", j}}))
          << '\n';
    }
  }
}

std::vector<CandidatePool> read_pools(std::istream& in) {
  std::vector<CandidatePool> pools;
  std::map<std::string, std::size_t> slot;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_line(line)) continue;
    CorpusRecord rec = parse_record(line, line_no);
    if (!rec.meta.is_object() || !rec.meta.contains("pool")) {
      throw ParseError(line_no, "pool record needs meta.pool");
    }
    const std::string key = rec.meta["pool"].dump();
    auto [it, inserted] = slot.try_emplace(key, pools.size());
    if (inserted) pools.push_back(CandidatePool{rec.trajectory.query, {}});
    pools[it->second].candidates.push_back(std::move(rec.trajectory));
  }
  return pools;
}

std::vector<CandidatePool> read_pools(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  return read_pools(in);
}

}  // namespace cfprm
