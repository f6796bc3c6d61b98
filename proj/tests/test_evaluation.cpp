#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace salsum;
using namespace salsum::testing;

namespace {

Rgb hue_colour(double hue) {
  // Fully saturated colour of the given hue, via the hexcone sectors.
  const double h = hue / 60.0;
  const double x = 1.0 - std::abs(std::fmod(h, 2.0) - 1.0);
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h) % 6) {
    case 0: r = 1, g = x; break;
    case 1: r = x, g = 1; break;
    case 2: g = 1, b = x; break;
    case 3: g = x, b = 1; break;
    case 4: r = x, b = 1; break;
    default: r = 1, b = x; break;
  }
  auto q = [](double c) { return static_cast<std::uint8_t>(std::lround(c * 255)); };
  return Rgb{q(r), q(g), q(b)};
}

GroundTruthSet gt_of(std::vector<RgbImage> frames, std::string user = "u") {
  GroundTruthSet gt;
  gt.user_id = std::move(user);
  for (std::size_t i = 0; i < frames.size(); ++i) gt.frame_indices.push_back(static_cast<int>(i));
  gt.frames = std::move(frames);
  return gt;
}

}  // namespace

TEST(Metrics, Precision) {
  EXPECT_DOUBLE_EQ(precision(3, 5), 0.6);
  EXPECT_DOUBLE_EQ(precision(0, 5), 0.0);
  EXPECT_DOUBLE_EQ(precision(5, 5), 1.0);
  try {
    precision(0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroCandidates);
  }
}

TEST(Metrics, Recall) {
  EXPECT_DOUBLE_EQ(recall(3, 6), 0.5);
  EXPECT_DOUBLE_EQ(recall(0, 4), 0.0);
  EXPECT_DOUBLE_EQ(recall(4, 4), 1.0);
  try {
    recall(0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroGroundTruth);
  }
}

TEST(Metrics, FMeasure) {
  EXPECT_DOUBLE_EQ(f_measure(0.8, 0.8), 0.8);
  EXPECT_DOUBLE_EQ(f_measure(1.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(f_measure(0.0, 0.0), 0.0);
  EXPECT_NEAR(f_measure(0.6, 0.75), 2.0 / 3.0, 1e-15);
}

TEST(Metrics, FMeasureBounds) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 1000; ++t) {
    const double p = u(rng), r = u(rng);
    const double f = f_measure(p, r);
    EXPECT_EQ(f, f_measure(r, p));
    EXPECT_LE(f, (p + r) / 2 + 1e-15);
    EXPECT_LE(f, 1.0);
    EXPECT_GE(f, 0.0);
  }
}

TEST(MatchCount, SelfMatchIsComplete) {
  std::vector<RgbImage> frames;
  for (double h : {0.0, 60.0, 130.0, 250.0}) frames.push_back(solid(6, 6, hue_colour(h)));
  EXPECT_EQ(match_count(frames, gt_of(frames), 0.5), 4);
}

TEST(MatchCount, RedVersusGreenNeverMatch) {
  EXPECT_EQ(match_count({solid(4, 4, kRed)}, gt_of({solid(4, 4, kGreen)}), 0.5), 0);
}

TEST(MatchCount, ThreeAutoFiveGtTwoAdmissible) {
  // Auto hues 0, 120, 240; GT hues chosen so exactly two pairs fall in the same 16-bin.
  const std::vector<RgbImage> autos{solid(4, 4, hue_colour(0)), solid(4, 4, hue_colour(120)), solid(4, 4, hue_colour(240))};
  const std::vector<RgbImage> gts{solid(4, 4, hue_colour(5)), solid(4, 4, hue_colour(60)), solid(4, 4, hue_colour(125)),
                                  solid(4, 4, hue_colour(180)), solid(4, 4, hue_colour(300))};
  const auto d = match_distances(autos, gts);
  int admissible = 0;
  for (const auto& row : d)
    for (double x : row) admissible += x < 0.5 ? 1 : 0;
  ASSERT_EQ(admissible, 2);
  EXPECT_EQ(match_count(autos, gt_of(gts), 0.5), 2);
  EXPECT_EQ(brute_force_max_matching(d, 0.5), 2);
}

TEST(MatchCount, GreedyAugmentedReachesMaximum) {
  // Pure greedy would take (0,0) and strand both remaining pairs.
  const DistanceMatrix d{{0.1, 0.2}, {0.3, 0.9}};
  EXPECT_EQ(greedy_match(d, 0.5).size(), 1u);
  EXPECT_EQ(match_count_from_distances(d, 0.5), 2);
  EXPECT_EQ(brute_force_max_matching(d, 0.5), 2);
}

TEST(MatchCount, NeverExceedsEitherSide) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 300; ++t) {
    const std::size_t rows = 1 + t % 6, cols = 1 + (t / 6) % 6;
    DistanceMatrix d(rows, std::vector<double>(cols));
    for (auto& row : d)
      for (double& x : row) x = u(rng);
    const int n = match_count_from_distances(d, 0.5);
    EXPECT_LE(n, static_cast<int>(std::min(rows, cols)));
    EXPECT_EQ(n, brute_force_max_matching(d, 0.5));
    EXPECT_LE(static_cast<int>(greedy_match(d, 0.5).size()), n);
  }
}

TEST(EvaluateVideo, IdenticalAndDisjoint) {
  FrameSequence seq = sequence_of({solid(4, 4, kRed), solid(4, 4, kGreen), solid(4, 4, kBlue)});
  KeyframeSet keys;
  keys.frame_indices = {1, 2};
  keys.k_requested = 2;
  const std::vector<GroundTruthSet> same{gt_of({solid(4, 4, kGreen), solid(4, 4, kBlue)}, "a"),
                                         gt_of({solid(4, 4, kBlue), solid(4, 4, kGreen)}, "b")};
  const auto r = evaluate_video(keys, seq, same, 0.5);
  EXPECT_DOUBLE_EQ(r.mean_f, 1.0);
  ASSERT_EQ(r.per_user.size(), 2u);
  EXPECT_EQ(r.per_user[1].user_id, "b");

  const std::vector<GroundTruthSet> other{gt_of({solid(4, 4, kRed)}, "a"), gt_of({solid(4, 4, hue_colour(300))}, "b")};
  EXPECT_DOUBLE_EQ(evaluate_video(keys, seq, other, 0.5).mean_f, 0.0);
}

TEST(EvaluateVideo, MeanIsArithmeticOverUsers) {
  FrameSequence seq = sequence_of({solid(4, 4, kRed), solid(4, 4, kGreen)});
  KeyframeSet keys;
  keys.frame_indices = {0, 1};
  const std::vector<GroundTruthSet> gts{gt_of({solid(4, 4, kRed)}, "a"),                            // p=.5 r=1
                                        gt_of({solid(4, 4, kRed), solid(4, 4, kGreen)}, "b"),       // 1
                                        gt_of({solid(4, 4, kBlue)}, "c")};                          // 0
  const auto r = evaluate_video(keys, seq, gts, 0.5);
  EXPECT_NEAR(r.per_user[0].f_measure, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.mean_f, (2.0 / 3.0 + 1.0 + 0.0) / 3.0, 1e-12);
}

TEST(EvaluateVideo, EmptySummaryScoresZero) {
  FrameSequence seq = sequence_of({solid(4, 4, kRed), solid(4, 4, kGreen)});
  KeyframeSet keys;
  keys.k_requested = 3;
  const auto r = evaluate_video(keys, seq, {gt_of({solid(4, 4, kRed)})}, 0.5);
  EXPECT_EQ(r.mean_f, 0.0);
  EXPECT_EQ(r.per_user[0].n_candidate, 0);
}

TEST(EvaluateVideo, RequiresGroundTruth) {
  FrameSequence seq = sequence_of({solid(4, 4, kRed), solid(4, 4, kGreen)});
  EXPECT_THROW(evaluate_video(KeyframeSet{}, seq, {}, 0.5), Error);
}
