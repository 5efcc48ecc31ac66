#include "detbench/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "detbench/protocol.hpp"
#include "oracles.hpp"

using detbench::Philox;
using detbench::RandParams;
using detbench::Region;

namespace {

TEST(Philox, KnownAnswerZeroKey) {
  // Published verification vector for the 10-round, 4x32 configuration with
  // all-zero key and counter.
  Philox rng(0);
  EXPECT_EQ(rng.next_u32(), 0x6627e8d5u);
  EXPECT_EQ(rng.next_u32(), 0xe169c58du);
  EXPECT_EQ(rng.next_u32(), 0xbc57ac4cu);
  EXPECT_EQ(rng.next_u32(), 0x9b00dbd8u);
}

TEST(Philox, StreamsAreReproducibleAndSeedSensitive) {
  Philox a(12345), b(12345), c(12346);
  bool any_differ = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint32_t va = a.next_u32();
    EXPECT_EQ(va, b.next_u32());
    any_differ = any_differ || va != c.next_u32();
  }
  EXPECT_TRUE(any_differ);
}

TEST(Philox, UniformDoublesStayInRange) {
  Philox rng(7);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_double();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.01);
  Philox r2(7);
  const double x = r2.uniform(-3.0, 5.0);
  EXPECT_GE(x, -3.0);
  EXPECT_LT(x, 5.0);
}

TEST(Philox, NormalDrawsMatchGaussianLaw) {
  Philox rng(99);
  const int n = 20000;
  std::vector<double> ours;
  ours.reserve(n);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal(3.0, 2.0);
    ours.push_back(v);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  EXPECT_NEAR(mean, 3.0, 0.06);
  EXPECT_NEAR(std::sqrt(var), 2.0, 0.06);

  std::mt19937_64 ref_rng(5);
  std::normal_distribution<double> ref_dist(3.0, 2.0);
  std::vector<double> reference;
  reference.reserve(n);
  for (int i = 0; i < n; ++i) reference.push_back(ref_dist(ref_rng));
  EXPECT_GT(oracle::ks2_pvalue(ours, reference), 0.01);
}

TEST(DeriveSeed, SeparatesLabelsAndMasters) {
  const auto s = detbench::derive_seed(1, "rand-t", "seq/3");
  EXPECT_EQ(s, detbench::derive_seed(1, "rand-t", "seq/3"));
  EXPECT_NE(s, detbench::derive_seed(2, "rand-t", "seq/3"));
  EXPECT_NE(s, detbench::derive_seed(1, "rand-s", "seq/3"));
  EXPECT_NE(s, detbench::derive_seed(1, "rand-t", "seq/4"));
  // The separator byte keeps label boundaries unambiguous.
  EXPECT_NE(detbench::derive_seed(1, "ab", "c"), detbench::derive_seed(1, "a", "bc"));
}

double chi_square_stat_8x8(const std::vector<Eigen::Vector2d>& points, double lo_x, double hi_x,
                           double lo_y, double hi_y) {
  std::array<int, 64> counts{};
  for (const auto& p : points) {
    int ix = static_cast<int>((p.x() - lo_x) / (hi_x - lo_x) * 8.0);
    int iy = static_cast<int>((p.y() - lo_y) / (hi_y - lo_y) * 8.0);
    ix = std::clamp(ix, 0, 7);
    iy = std::clamp(iy, 0, 7);
    ++counts[iy * 8 + ix];
  }
  const double expected = static_cast<double>(points.size()) / 64.0;
  double stat = 0.0;
  for (const int c : counts) stat += (c - expected) * (c - expected) / expected;
  return stat;
}

TEST(RandT, CentersStayInsideMarginAndAreUniform) {
  RandParams params;
  std::vector<Eigen::Vector2d> pooled;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    params.seed = seed;
    const auto sample = detbench::sample_rand_t(640, 480, 1000, params);
    ASSERT_EQ(sample.size(), 1000u);
    for (const auto& r : sample) {
      ASSERT_GE(r.center.x(), 10.0);
      ASSERT_LE(r.center.x(), 630.0);
      ASSERT_GE(r.center.y(), 10.0);
      ASSERT_LE(r.center.y(), 470.0);
      pooled.push_back(r.center);
    }
  }
  const double stat = chi_square_stat_8x8(pooled, 10.0, 630.0, 10.0, 470.0);
  EXPECT_GT(oracle::chi_square_pvalue(stat, 63.0), 0.01);
}

TEST(RandT, ScoresAreDescendingRanks) {
  RandParams params;
  params.seed = 3;
  const auto sample = detbench::sample_rand_t(320, 240, 50, params);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sample[i].score, 50.0 - i);
}

TEST(RandT, TruncationKeepsPrefixOfTheStream) {
  RandParams params;
  params.seed = 17;
  const auto full = detbench::sample_rand_t(640, 480, 1000, params);
  const auto small = detbench::sample_rand_t(640, 480, 100, params);
  const auto top = detbench::select_top_n(full, 100);
  ASSERT_EQ(top.size(), small.size());
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(top[i].center, small[i].center);
    EXPECT_EQ(top[i].shape, small[i].shape);
  }
}

TEST(RandT, SameSeedBitIdenticalAndErrors) {
  RandParams params;
  params.seed = 8;
  const auto a = detbench::sample_rand_t(320, 240, 200, params);
  const auto b = detbench::sample_rand_t(320, 240, 200, params);
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(a[i].center, b[i].center);
    EXPECT_EQ(a[i].score, b[i].score);
  }
  params.seed = 9;
  const auto c = detbench::sample_rand_t(320, 240, 200, params);
  bool differs = false;
  for (int i = 0; i < 200; ++i) differs = differs || a[i].center != c[i].center;
  EXPECT_TRUE(differs);

  EXPECT_THROW(detbench::sample_rand_t(15, 240, 10, params), detbench::InvalidParameterError);
  EXPECT_THROW(detbench::sample_rand_t(320, 240, 0, params), detbench::InvalidParameterError);
  RandParams bad;
  bad.s_min = 60.0;
  EXPECT_THROW(detbench::sample_rand_t(320, 240, 10, bad), detbench::InvalidParameterError);
}

TEST(ScalePrior, ClampFractionAndMeanMatchClosedForm) {
  RandParams params;
  params.seed = 555;
  Philox rng(params.seed);
  const int n = 1000000;
  const double sigma = (params.s_max - params.s_min) / 2.0;
  int clamped = 0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = detbench::sample_scale(params, rng);
    ASSERT_GT(s, 0.0);
    ASSERT_LE(s, params.s_max);
    clamped += s == params.s_max;
    sum += s;
  }
  const double expected_fraction = oracle::clamp_probability(params.s_min, sigma, params.s_max);
  EXPECT_NEAR(static_cast<double>(clamped) / n, expected_fraction, 0.005);
  const double expected_mean = oracle::clamped_folded_mean(params.s_min, sigma, params.s_max);
  EXPECT_NEAR(sum / n, expected_mean, 0.2);
}

TEST(RandS, RegionsFitInsideTheImage) {
  RandParams params;
  params.seed = 21;
  int rejections = 0;
  const auto sample = detbench::sample_rand_s(640, 480, 10000, params, &rejections);
  EXPECT_EQ(rejections, 0);  // s_max = 50 always fits in 640x480
  for (const auto& r : sample) {
    const double radius = detbench::excircle_radius(r);
    EXPECT_GE(r.center.x() - radius, -1e-9);
    EXPECT_LE(r.center.x() + radius, 640.0 + 1e-9);
    EXPECT_GE(r.center.y() - radius, -1e-9);
    EXPECT_LE(r.center.y() + radius, 480.0 + 1e-9);
  }
}

TEST(RandS, RadiiFollowTheScalePrior) {
  RandParams params;
  params.seed = 31;
  const auto sample = detbench::sample_rand_s(640, 480, 10000, params);
  std::vector<double> radii;
  for (const auto& r : sample) radii.push_back(detbench::excircle_radius(r));

  Philox direct_rng(4096);
  RandParams direct = params;
  std::vector<double> direct_draws;
  for (int i = 0; i < 10000; ++i) direct_draws.push_back(detbench::sample_scale(direct, direct_rng));
  EXPECT_GT(oracle::ks2_pvalue(radii, direct_draws), 0.01);
}

TEST(RandS, SmallDomainRejectsAndEventuallyErrors) {
  RandParams params;
  params.seed = 77;
  int rejections = 0;
  const auto sample = detbench::sample_rand_s(12, 12, 50, params, &rejections);
  EXPECT_GT(rejections, 0);
  for (const auto& r : sample) {
    const double radius = detbench::excircle_radius(r);
    EXPECT_LT(radius, 6.0);
    EXPECT_GE(r.center.x() - radius, -1e-9);
    EXPECT_LE(r.center.x() + radius, 12.0 + 1e-9);
  }

  // A prior that essentially never fits the domain: the resampling loop must
  // give up with an error after the rejection cap instead of spinning.
  RandParams hopeless;
  hopeless.s_min = 0.4;
  hopeless.s_max = 1e9;
  hopeless.seed = 4242;
  int streak_rejections = 0;
  EXPECT_THROW(detbench::sample_rand_s(1, 1, 1, hopeless, &streak_rejections),
               detbench::InvalidParameterError);
  EXPECT_EQ(streak_rejections, 10001);
}

TEST(RandS, SameSeedBitIdentical) {
  RandParams params;
  params.seed = 20260819;
  const auto a = detbench::sample_rand_s(320, 240, 300, params);
  const auto b = detbench::sample_rand_s(320, 240, 300, params);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].center, b[i].center);
    EXPECT_EQ(a[i].shape, b[i].shape);
    EXPECT_EQ(a[i].score, b[i].score);
  }
}

TEST(EllipseShape, AreaCarriesTheScale) {
  for (const auto& [s, theta, a] : std::vector<std::tuple<double, double, double>>{
           {0.5, 0.3, 1.7}, {3.0, -2.1, 0.33}, {17.0, 1.0, 2.0}}) {
    Region region;
    region.center = {0.0, 0.0};
    region.shape = detbench::ellipse_shape_from_affine(s, theta, a);
    const double expected_area = M_PI * s * s;
    EXPECT_NEAR(detbench::area(region), expected_area, 1e-9 * expected_area)
        << "s=" << s << " theta=" << theta << " a=" << a;
  }
}

TEST(EllipseShape, ZeroAnisotropyGivesACircle) {
  const Eigen::Matrix2d shape = detbench::ellipse_shape_from_affine(4.0, 1.234, 0.0);
  EXPECT_NEAR(shape(0, 0), 1.0 / 16.0, 1e-12);
  EXPECT_NEAR(shape(1, 1), 1.0 / 16.0, 1e-12);
  EXPECT_NEAR(shape(0, 1), 0.0, 1e-12);
}

TEST(EllipseShape, AxisRatioAndExcircleFollowTheAnisotropy) {
  const double s = 2.5, theta = 0.8, a = 1.4;
  Region region;
  region.center = {0.0, 0.0};
  region.shape = detbench::ellipse_shape_from_affine(s, theta, a);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(region.shape);
  const double semi_major = 1.0 / std::sqrt(eig.eigenvalues()(0));
  const double semi_minor = 1.0 / std::sqrt(eig.eigenvalues()(1));
  EXPECT_NEAR(semi_major / semi_minor, std::exp2(a), 1e-9 * std::exp2(a));
  EXPECT_NEAR(detbench::excircle_radius(region), s * std::exp2(a / 2.0),
              1e-9 * s * std::exp2(a / 2.0));
}

TEST(RandA, EllipsesAreValidAndContained) {
  RandParams params;
  params.seed = 61;
  const auto sample = detbench::sample_rand_a(640, 480, 5000, params);
  ASSERT_EQ(sample.size(), 5000u);
  for (const auto& r : sample) {
    ASSERT_TRUE(detbench::is_valid(r));
    const double radius = detbench::excircle_radius(r);
    EXPECT_GE(r.center.x() - radius, -1e-6);
    EXPECT_LE(r.center.x() + radius, 640.0 + 1e-6);
    EXPECT_GE(r.center.y() - radius, -1e-6);
    EXPECT_LE(r.center.y() + radius, 480.0 + 1e-6);
  }
}

TEST(RandA, AnisotropyIsLogUniform) {
  RandParams params;
  params.seed = 71;
  const auto sample = detbench::sample_rand_a(640, 480, 10000, params);
  std::vector<double> anisotropies;
  for (const auto& r : sample) {
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(r.shape);
    const double ratio = eig.eigenvalues()(1) / eig.eigenvalues()(0);
    anisotropies.push_back(0.5 * std::log2(ratio));
  }
  std::mt19937_64 ref_rng(11);
  std::uniform_real_distribution<double> ref_dist(0.0, 2.0);
  std::vector<double> reference;
  for (int i = 0; i < 10000; ++i) reference.push_back(ref_dist(ref_rng));
  EXPECT_GT(oracle::ks2_pvalue(anisotropies, reference), 0.01);
}

TEST(RandA, DeterministicPerSeed) {
  RandParams params;
  params.seed = 81;
  const auto a = detbench::sample_rand_a(320, 240, 100, params);
  const auto b = detbench::sample_rand_a(320, 240, 100, params);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a[i].center, b[i].center);
    EXPECT_EQ(a[i].shape, b[i].shape);
    EXPECT_EQ(a[i].score, 100.0 - i);
  }
  params.seed = 82;
  const auto c = detbench::sample_rand_a(320, 240, 100, params);
  bool differs = false;
  for (int i = 0; i < 100; ++i) differs = differs || a[i].center != c[i].center;
  EXPECT_TRUE(differs);
}

}  // namespace
