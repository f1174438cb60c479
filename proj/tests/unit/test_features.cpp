#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>

#include "cfprm/features.hpp"

using namespace cfprm;

namespace {

// Independent reference: istringstream tokenization, hand-written FNV-1a.
std::uint64_t fnv(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<double> reference(const std::string& q, const std::string& s, std::size_t dim) {
  auto toks = [](std::string text) {
    for (char& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::istringstream in(text);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
  };
  const auto qt = toks(q), st = toks(s);
  std::vector<double> v(dim, 0.0);
  auto add = [&](const std::string& ns, const std::vector<std::string>& t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      v[fnv(ns + t[i]) % dim] += 1.0;
      if (i > 0) v[fnv(ns + t[i - 1] + " " + t[i]) % dim] += 1.0;
    }
  };
  add("q:", qt);
  add("s:", st);
  const double scale = 1.0 / std::sqrt(1.0 + static_cast<double>(qt.size() + st.size()));
  for (double& x : v) x *= scale;
  return v;
}

}  // namespace

TEST(Tokenize, LowercasesAndSplits) {
  EXPECT_EQ(tokenize("  Add 5\tGIVES\n7+5=12 "),
            (std::vector<std::string>{"add", "5", "gives", "7+5=12"}));
  EXPECT_TRUE(tokenize(" \n\t ").empty());
}

TEST(FeatureKeys, NamespacesAndBigrams) {
  EXPECT_EQ(feature_keys("a b", "c"),
            (std::vector<std::string>{"q:a", "q:b", "q:a b", "s:c"}));
}

TEST(Featurize, MatchesReference) {
  const std::string cases[][2] = {
      {"start with 7; add 5", "add 5 gives 7+5=12"},
      {"What is 2^10 mod 7?", "First, 2^3 = 8 = 1 mod 7.\nSo 2^9 = 1."},
      {"", "only solution"},
      {"repeat repeat repeat", "x x x x"},
  };
  for (const auto& c : cases) {
    for (std::size_t dim : {16u, 4096u}) {
      const auto got = featurize(c[0], c[1], dim).dense();
      const auto want = reference(c[0], c[1], dim);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < dim; ++i) EXPECT_DOUBLE_EQ(got[i], want[i]) << i;
    }
  }
}

TEST(Featurize, SparseEntriesAreSortedAndNonZero) {
  const auto f = featurize("start with 7; add 5", "add 5 gives 7+5=12\nso the value is 12", 64);
  ASSERT_FALSE(f.empty());
  for (std::size_t i = 0; i < f.entries().size(); ++i) {
    EXPECT_NE(f.entries()[i].value, 0.0);
    EXPECT_LT(f.entries()[i].index, 64u);
    if (i > 0) EXPECT_LT(f.entries()[i - 1].index, f.entries()[i].index);
  }
}

TEST(Featurize, DeterministicBytes) {
  const auto a = featurize("q text", "s text here").dense_bytes();
  const auto b = featurize("q text", "s text here").dense_bytes();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), kDefaultFeatureDim * sizeof(double));
}

TEST(Featurize, BigramOrderMatters) {
  EXPECT_NE(featurize("q", "a b c"), featurize("q", "c b a"));
}

TEST(Featurize, QueryAndSolutionAreSeparated) {
  EXPECT_NE(featurize("alpha", "beta"), featurize("beta", "alpha"));
}

TEST(Featurize, CaseInsensitive) {
  EXPECT_EQ(featurize("Start With", "ADD"), featurize("start with", "add"));
}

TEST(Featurize, EmptyInput) {
  const auto f = featurize("", "", 32);
  EXPECT_TRUE(f.empty());
  EXPECT_EQ(f.dim(), 32u);
}
