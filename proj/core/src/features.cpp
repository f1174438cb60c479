#include "cfprm/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>

#include "cfprm/rng.hpp"

namespace cfprm {

std::vector<double> FeatureVector::dense() const {
  std::vector<double> out(dim_, 0.0);
  for (const auto& e : entries_) out[e.index] = e.value;
  return out;
}

std::string FeatureVector::dense_bytes() const {
  static_assert(std::endian::native == std::endian::little, "little-endian host expected");
  const auto values = dense();
  std::string out(values.size() * sizeof(double), '\0');
  std::memcpy(out.data(), values.data(), out.size());
  return out;
}

namespace {

constexpr bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

constexpr char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

void append_keys(std::vector<std::string>& keys, std::string_view ns,
                 const std::vector<std::string>& tokens) {
  for (const auto& tok : tokens) keys.push_back(std::string(ns) + tok);
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    keys.push_back(std::string(ns) + tokens[i - 1] + ' ' + tokens[i]);
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) {
      std::string tok(text.substr(i, j - i));
      std::transform(tok.begin(), tok.end(), tok.begin(), ascii_lower);
      tokens.push_back(std::move(tok));
    }
    i = j;
  }
  return tokens;
}

std::vector<std::string> feature_keys(std::string_view query, std::string_view partial_solution) {
  std::vector<std::string> keys;
  append_keys(keys, "q:", tokenize(query));
  append_keys(keys, "s:", tokenize(partial_solution));
  return keys;
}

FeatureVector featurize(std::string_view query, std::string_view partial_solution,
                        std::size_t dim) {
  const auto q_tokens = tokenize(query);
  const auto s_tokens = tokenize(partial_solution);
  const std::size_t n_tokens = q_tokens.size() + s_tokens.size();
  if (n_tokens == 0 || dim == 0) return FeatureVector(dim, {});

  std::vector<std::string> keys;
  append_keys(keys, "q:", q_tokens);
  append_keys(keys, "s:", s_tokens);

  std::map<std::uint32_t, double> counts;
  for (const auto& key : keys) {
    counts[static_cast<std::uint32_t>(fnv1a64(key) % dim)] += 1.0;
  }

  const double scale = 1.0 / std::sqrt(1.0 + static_cast<double>(n_tokens));
  std::vector<FeatureVector::Entry> entries;
  entries.reserve(counts.size());
  for (const auto& [index, count] : counts) entries.push_back({index, count * scale});
  return FeatureVector(dim, std::move(entries));
}

}  // namespace cfprm
