#include <gtest/gtest.h>

#include <array>
#include <set>

#include "mpbandits/rng.hpp"

using namespace mpbandits;

TEST(Rng, MatchesReferenceOutputsFromKnownState) {
  Rng rng(std::array<std::uint64_t, 4>{1, 2, 3, 4});
  EXPECT_EQ(rng(), 11520ULL);
  EXPECT_EQ(rng(), 0ULL);
  EXPECT_EQ(rng(), 1509978240ULL);
  EXPECT_EQ(rng(), 1215971899390074240ULL);
}

TEST(Rng, SplitMixMatchesReferenceSequence) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(splitmix64(0x9e3779b97f4a7c15ULL), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(splitmix64(2 * 0x9e3779b97f4a7c15ULL), 0x06c45d188009454fULL);
}

TEST(Rng, SeedingFillsStateFromSplitMix) {
  Rng seeded(0);
  Rng manual(std::array<std::uint64_t, 4>{splitmix64(0), splitmix64(0x9e3779b97f4a7c15ULL),
                                          splitmix64(2 * 0x9e3779b97f4a7c15ULL),
                                          splitmix64(3 * 0x9e3779b97f4a7c15ULL)});
  EXPECT_EQ(seeded, manual);
  EXPECT_EQ(Rng::kName, "xoshiro256**");
}

TEST(Rng, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(42, i));
  EXPECT_EQ(seen.size(), 10000U);
}

TEST(Rng, UniformStaysInUnitInterval) {
  Rng rng(7);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(Rng, BelowIsInRangeAndRoughlyUniform) {
  Rng rng(11);
  std::array<int, 7> counts{};
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7U);
    ++counts[v];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  // 6 degrees of freedom; 22.5 is the 0.999 quantile.
  EXPECT_LT(chi2, 22.5);
  EXPECT_EQ(rng.below(1), 0U);
}
