#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "test_support.hpp"

using namespace salsum;
using namespace salsum::testing;

TEST(RgbToHsv, AnchorPoints) {
  const Hsv red = rgb_to_hsv(kRed);
  EXPECT_DOUBLE_EQ(red.h, 0.0);
  EXPECT_DOUBLE_EQ(red.s, 1.0);
  EXPECT_DOUBLE_EQ(red.v, 1.0);

  const Hsv gray = rgb_to_hsv(Rgb{128, 128, 128});
  EXPECT_DOUBLE_EQ(gray.s, 0.0);
  EXPECT_NEAR(gray.v, 0.502, 1e-3);
  EXPECT_DOUBLE_EQ(gray.h, 0.0);

  EXPECT_DOUBLE_EQ(rgb_to_hsv(kGreen).h, 120.0);
  EXPECT_DOUBLE_EQ(rgb_to_hsv(kBlue).h, 240.0);
  EXPECT_NEAR(rgb_to_hsv(Rgb{255, 0, 128}).h, 360.0 - 128.0 / 255.0 * 60.0, 1e-9);
}

TEST(RgbToHsv, RangesOverAllCubeSamples) {
  for (int r = 0; r < 256; r += 15)
    for (int g = 0; g < 256; g += 15)
      for (int b = 0; b < 256; b += 15) {
        const Hsv hsv = rgb_to_hsv(Rgb{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)});
        ASSERT_GE(hsv.h, 0.0);
        ASSERT_LT(hsv.h, 360.0);
        ASSERT_GE(hsv.s, 0.0);
        ASSERT_LE(hsv.s, 1.0);
        ASSERT_GE(hsv.v, 0.0);
        ASSERT_LE(hsv.v, 1.0);
      }
}

TEST(HueHistogram, SingleHue) {
  const auto h = hue_histogram(solid(5, 4, kRed), 8);
  EXPECT_EQ(h.bins, (std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0}));
}

TEST(HueHistogram, HalfRedHalfGreen) {
  RgbImage img(4, 2, kRed);
  for (int x = 0; x < 4; ++x) img(x, 1) = kGreen;
  const auto h = hue_histogram(img, 4);
  EXPECT_EQ(h.bins, (std::vector<double>{0.5, 0.5, 0, 0}));
}

TEST(HueHistogram, BadBinCount) {
  EXPECT_THROW(hue_histogram(solid(2, 2, kRed), 5), Error);
  try {
    hue_histogram(solid(2, 2, kRed), 5);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadBinCount);
  }
}

TEST(HueHistogram, SumsToOneOnRandomImages) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int trial = 0; trial < 20; ++trial) {
    RgbImage img(13, 7);
    for (auto& p : img.pixels()) p = Rgb{static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng))};
    for (int n : kAllowedHueBins) {
      const auto h = hue_histogram(img, n);
      EXPECT_NEAR(std::accumulate(h.bins.begin(), h.bins.end(), 0.0), 1.0, 1e-9);
    }
  }
}

TEST(HistogramDissimilarity, HandValues) {
  const HueHistogram a{{0.5, 0.5}};
  EXPECT_EQ(histogram_dissimilarity(a, a), 0.0);
  EXPECT_DOUBLE_EQ(histogram_dissimilarity(HueHistogram{{1, 0}}, HueHistogram{{0, 1}}), 1.0);
  EXPECT_NEAR(histogram_dissimilarity(a, HueHistogram{{0.25, 0.75}}), 1.0 - (0.5 + 2.0 / 3.0) / 2.0, 1e-12);
  EXPECT_NEAR(histogram_dissimilarity(a, HueHistogram{{0.25, 0.75}}), 0.4167, 1e-4);
}

TEST(HistogramDissimilarity, DisjointSolidColoursAreMaximallyDissimilar) {
  for (int n : kAllowedHueBins)
    EXPECT_DOUBLE_EQ(histogram_dissimilarity(hue_histogram(solid(3, 3, kRed), n), hue_histogram(solid(3, 3, kGreen), n)), 1.0)
        << n;
}

TEST(HistogramDissimilarity, BinMismatch) {
  try {
    histogram_dissimilarity(HueHistogram{{1, 0}}, HueHistogram{{1, 0, 0, 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BinMismatch);
  }
}

TEST(HistogramDissimilarity, MetricAxiomsOnRandomPairs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = kAllowedHueBins[static_cast<std::size_t>(trial) % kAllowedHueBins.size()];
    const auto a = random_histogram(rng, n);
    const auto b = random_histogram(rng, n);
    const double dab = histogram_dissimilarity(a, b);
    EXPECT_EQ(dab, histogram_dissimilarity(b, a));
    EXPECT_GE(dab, 0.0);
    EXPECT_LE(dab, 1.0);
    EXPECT_EQ(histogram_dissimilarity(a, a), 0.0);
    if (a.bins != b.bins) {
      EXPECT_GT(dab, 0.0);
    }
  }
}

TEST(StaticScore, IdenticalFramesGiveZeros) {
  const auto seq = sequence_of(std::vector<RgbImage>(10, solid(4, 4, Rgb{12, 200, 90})));
  const auto s = static_score(seq, 8);
  ASSERT_EQ(s.size(), 9u);
  for (double v : s.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(s.label, "hue8");
  EXPECT_EQ(s.pair_indices.front(), (std::pair<int, int>{0, 1}));
}

TEST(StaticScore, RedRedGreen) {
  const auto seq = sequence_of({solid(4, 4, kRed), solid(4, 4, kRed), solid(4, 4, kGreen)});
  EXPECT_EQ(static_score(seq, 4).values, (std::vector<double>{0.0, 1.0}));
}

TEST(StaticScore, IgnoresPixelGeometry) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<RgbImage> frames, shuffled;
  for (int f = 0; f < 4; ++f) {
    RgbImage img(9, 5);
    for (auto& p : img.pixels()) p = Rgb{static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng)), 0};
    RgbImage perm = img;
    std::shuffle(perm.pixels().begin(), perm.pixels().end(), rng);
    frames.push_back(img);
    shuffled.push_back(perm);
  }
  EXPECT_EQ(static_score(sequence_of(frames), 16).values, static_score(sequence_of(shuffled), 16).values);
}
