#include "cfprm/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cfprm/errors.hpp"
#include "cfprm/rng.hpp"

namespace cfprm {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr std::size_t kHeaderSize = 48;

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(std::string_view bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

}  // namespace

std::string encode_checkpoint(const ScorerParams& params) {
  params.check_shape();
  std::string out;
  out.reserve(kHeaderSize + 8 * params.weights.size() + 8);
  out.append(kCheckpointMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.arch));
  put<std::uint64_t>(out, params.dim);
  put<std::uint64_t>(out, params.hidden);
  put<std::uint32_t>(out, kFeaturizerScheme);
  put<std::uint32_t>(out, kFeaturizerNgramOrder);
  put<std::uint64_t>(out, params.weights.size());
  for (double w : params.weights) put<double>(out, w);
  put<std::uint64_t>(out, fnv1a64(out));
  return out;
}

ScorerParams decode_checkpoint(std::string_view bytes) {
  if (bytes.size() < kHeaderSize + 8 || bytes.substr(0, 8) != kCheckpointMagic) {
    throw CheckpointError("not a checkpoint (bad magic or truncated header)");
  }
  if (get<std::uint32_t>(bytes, 8) != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " +
                          std::to_string(get<std::uint32_t>(bytes, 8)));
  }
  const auto arch = get<std::uint32_t>(bytes, 12);
  if (arch > 1) throw CheckpointError("unknown arch id " + std::to_string(arch));
  if (get<std::uint32_t>(bytes, 32) != kFeaturizerScheme ||
      get<std::uint32_t>(bytes, 36) != kFeaturizerNgramOrder) {
    throw CheckpointError("checkpoint was written for a different featurizer");
  }
  const auto n = get<std::uint64_t>(bytes, 40);
  if (bytes.size() != kHeaderSize + 8 * n + 8) {
    throw CheckpointError("checkpoint length does not match its weight count");
  }
  const std::size_t body = kHeaderSize + 8 * n;
  if (get<std::uint64_t>(bytes, body) != fnv1a64(bytes.substr(0, body))) {
    throw CheckpointError("checkpoint checksum mismatch");
  }

  ScorerParams p;
  p.arch = static_cast<Arch>(arch);
  p.dim = get<std::uint64_t>(bytes, 16);
  p.hidden = get<std::uint64_t>(bytes, 24);
  p.weights.resize(n);
  std::memcpy(p.weights.data(), bytes.data() + kHeaderSize, 8 * n);
  try {
    p.check_shape();
  } catch (const DimensionMismatch& e) {
    throw CheckpointError(e.what());
  }
  return p;
}

void save_checkpoint(const ScorerParams& params, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("failed writing " + path.string());
}

ScorerParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_checkpoint(ss.str());
}

std::string checkpoint_id(const ScorerParams& params) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(encode_checkpoint(params))));
  return buf;
}

}  // namespace cfprm
