#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfprm/types.hpp"

namespace cfprm {

/// One JSONL line of a step-labeled corpus:
///   {"query": str, "steps": [{"text": str, "label": "+"|"-"}, ...],
///    "answer_correct": bool?, "meta": object?}
/// Unknown top-level and per-step fields are kept and written back verbatim.
struct CorpusRecord {
  Trajectory trajectory;
  nlohmann::json meta;                     // null when absent
  nlohmann::json extra = nlohmann::json::object();
  std::vector<nlohmann::json> step_extra;  // one object per step

  friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

CorpusRecord make_record(Trajectory t, nlohmann::json meta = nullptr);

enum class InputFormat { kNative, kPrm800k };
InputFormat input_format_from_string(std::string_view s);

/// Maps a PRM800K rating (-1, 0, 1, or the same as strings) to a binary
/// label. Neutral (0) counts as positive. Throws std::invalid_argument.
StepLabel prm800k_label(const nlohmann::json& rating);

struct IngestOptions {
  InputFormat format = InputFormat::kNative;
  bool strict = true;  // abort on the first bad line; otherwise skip and count
};

struct IngestResult {
  std::vector<CorpusRecord> records;
  std::size_t skipped = 0;
  std::vector<std::string> errors;  // "line N: ..." for each skipped line
};

/// Parses one line. Throws ParseError / LabelDomainError (tagged with
/// `line_no`) or the trajectory validation errors.
CorpusRecord parse_record(std::string_view line, std::size_t line_no,
                          InputFormat format = InputFormat::kNative);

IngestResult ingest(std::istream& in, const IngestOptions& opts = {});
IngestResult ingest(const std::filesystem::path& path, const IngestOptions& opts = {});

std::vector<Trajectory> trajectories_of(std::span<const CorpusRecord> records);

/// Single-line JSON without trailing newline.
std::string encode_record(const CorpusRecord& record);
void write_records(std::ostream& out, std::span<const CorpusRecord> records);

/// Merged-sample line:
///   {"query", "text", "context", "label", "granularity", "span": [i, j],
///    "source_id"}
/// `context` holds steps 1..i-1 so the scorer input can be rebuilt.
std::string encode_merged(const MergedSample& sample);
MergedSample parse_merged(std::string_view line, std::size_t line_no);

/// Writes buckets in curriculum order.
void write_merged_corpus(std::ostream& out, const GranularCorpus& corpus);
/// Every bucket key 1..max granularity is present (possibly empty).
GranularCorpus read_merged_corpus(std::istream& in);
GranularCorpus read_merged_corpus(const std::filesystem::path& path);

/// Pools are flattened to corpus records with meta {"pool": q, "candidate": j}.
void write_pools(std::ostream& out, std::span<const CandidatePool> pools);
/// Groups records by meta.pool in order of first appearance.
std::vector<CandidatePool> read_pools(std::istream& in);
std::vector<CandidatePool> read_pools(const std::filesystem::path& path);

}  // namespace cfprm
