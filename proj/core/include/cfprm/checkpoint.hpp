#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "cfprm/scorer.hpp"

namespace cfprm {

inline constexpr std::string_view kCheckpointMagic = "CFPRMCKP";
inline constexpr std::uint32_t kCheckpointVersion = 1;
/// Identifies the hashed unigram+bigram featurizer in features.hpp.
inline constexpr std::uint32_t kFeaturizerScheme = 1;
inline constexpr std::uint32_t kFeaturizerNgramOrder = 2;

/// Byte layout (all integers little-endian, weights IEEE-754 binary64):
///
///   offset  size  field
///   0       8     magic "CFPRMCKP"
///   8       4     u32 format version (1)
///   12      4     u32 arch (0 linear, 1 mlp1)
///   16      8     u64 feature dimension D
///   24      8     u64 hidden dimension H (0 for linear)
///   32      4     u32 featurizer scheme (1)
///   36      4     u32 featurizer n-gram order (2)
///   40      8     u64 weight count n
///   48      8n    f64 weights, in ScorerParams::weights order
///   48+8n   8     u64 FNV-1a 64 of bytes [0, 48+8n)
std::string encode_checkpoint(const ScorerParams& params);

/// Throws CheckpointError on bad magic, version, shape or checksum.
ScorerParams decode_checkpoint(std::string_view bytes);

void save_checkpoint(const ScorerParams& params, const std::filesystem::path& path);
ScorerParams load_checkpoint(const std::filesystem::path& path);

/// 16 hex digits of FNV-1a 64 over the encoded checkpoint.
std::string checkpoint_id(const ScorerParams& params);

}  // namespace cfprm
