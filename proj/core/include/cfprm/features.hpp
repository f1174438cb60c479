#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cfprm {

inline constexpr std::size_t kDefaultFeatureDim = 4096;

/// Hashed bag of unigrams and bigrams over (query, partial solution).
///
/// Stored sparsely: `entries` is sorted by index with no duplicates and no
/// zero values. Logically it is a dense vector of length `dim`.
class FeatureVector {
 public:
  struct Entry {
    std::uint32_t index;
    double value;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  FeatureVector() = default;
  FeatureVector(std::size_t dim, std::vector<Entry> entries)
      : dim_(dim), entries_(std::move(entries)) {}

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  std::vector<double> dense() const;
  /// Little-endian IEEE-754 doubles of dense(); used to compare featurizations
  /// across processes.
  std::string dense_bytes() const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
};

/// Token keys fed to the hash. Query tokens are namespaced "q:" and solution
/// tokens "s:"; a bigram key is "<ns><a> <b>". Exposed for tests.
std::vector<std::string> feature_keys(std::string_view query, std::string_view partial_solution);

/// Lowercases ASCII and splits on ASCII whitespace.
std::vector<std::string> tokenize(std::string_view text);

/// Every key is hashed with FNV-1a 64 and bucketed modulo `dim`; counts are
/// scaled by 1/sqrt(1 + number of unigram tokens).
FeatureVector featurize(std::string_view query, std::string_view partial_solution,
                        std::size_t dim = kDefaultFeatureDim);

}  // namespace cfprm
