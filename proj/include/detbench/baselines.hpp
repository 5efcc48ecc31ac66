#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "detbench/geometry.hpp"
#include "detbench/rng.hpp"

namespace detbench {

// Sampling parameters for the random baseline detectors. The scale prior is
// min{ |N(s_min, ((s_max - s_min)/2)^2)|, s_max }: most mass at small scales,
// hard-capped at s_max. With s_min = 0.1 the normal is almost centered, so
// the magnitude is effectively half-normal; the formula is implemented as
// written.
struct RandParams {
  double s_min = 0.1;
  double s_max = 50.0;
  double point_radius = 10.0;  // RAND-T only
  std::uint64_t seed = 0;
};

inline void validate(const RandParams& p) {
  if (!(p.s_min > 0.0 && p.s_min < p.s_max))
    throw InvalidParameterError("scale bounds must satisfy 0 < s_min < s_max");
  if (!(p.point_radius > 0.0)) throw InvalidParameterError("point radius must be > 0");
}

// One draw from the scale prior; always in (0, s_max].
inline double sample_scale(const RandParams& params, Philox& rng) {
  double s;
  do {
    const double g = rng.normal(params.s_min, (params.s_max - params.s_min) / 2.0);
    s = std::min(std::abs(g), params.s_max);
  } while (!(s > 0.0));
  return s;
}

namespace detail {

constexpr int kMaxConsecutiveRejections = 10000;

inline void check_feature_count(int n) {
  if (n < 1) throw InvalidParameterError("feature count must be >= 1");
}

// Centers are drawn uniformly on [margin, width - margin] x [margin,
// height - margin], so the feature (bounded by its excircle) stays inside
// the image without clamping.
inline Eigen::Vector2d sample_center(double width, double height, double margin, Philox& rng) {
  const double x = rng.uniform(margin, width - margin);
  const double y = rng.uniform(margin, height - margin);
  return {x, y};
}

}  // namespace detail

// RAND-T: n uniformly placed points, stored as circles of the configured
// point radius. Scores are the descending rank n..1, so truncating to a
// smaller n keeps a prefix of the same sample stream.
inline std::vector<Region> sample_rand_t(int width, int height, int n, const RandParams& params) {
  validate(params);
  detail::check_feature_count(n);
  if (!(width > 2.0 * params.point_radius && height > 2.0 * params.point_radius))
    throw InvalidParameterError("image domain too small for the configured point radius");

  Philox rng(params.seed);
  std::vector<Region> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d c = detail::sample_center(width, height, params.point_radius, rng);
    out.push_back(Region::circle(c.x(), c.y(), params.point_radius, static_cast<double>(n - i)));
  }
  return out;
}

// RAND-S: circles with radius drawn from the scale prior. Draws too large to
// fit in the image are rejected and resampled; a long rejection streak means
// the domain cannot host the prior and is reported as an error.
inline std::vector<Region> sample_rand_s(int width, int height, int n, const RandParams& params,
                                         int* rejections = nullptr) {
  validate(params);
  detail::check_feature_count(n);
  if (!(std::min(width, height) > 2.0 * params.s_min))
    throw InvalidParameterError("image domain too small for the minimum scale");

  Philox rng(params.seed);
  const double limit = std::min(width, height) / 2.0;
  std::vector<Region> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    double s;
    int streak = 0;
    while (true) {
      s = sample_scale(params, rng);
      if (s < limit) break;
      if (rejections) ++*rejections;
      if (++streak > detail::kMaxConsecutiveRejections)
        throw InvalidParameterError("scale sampling rejected too often; domain too small");
    }
    const Eigen::Vector2d c = detail::sample_center(width, height, s, rng);
    out.push_back(Region::circle(c.x(), c.y(), s, static_cast<double>(n - i)));
  }
  return out;
}

// Shape matrix of the ellipse that is the image of the unit disk under
// A = R(theta) * diag(s * 2^(-a/2), s * 2^(a/2)), i.e. M = (A A^T)^-1.
// sqrt(det A) = s, so s keeps its meaning as scale; the semi-axes are
// s * 2^(±a/2) and the axis ratio is 2^a.
inline Eigen::Matrix2d ellipse_shape_from_affine(double s, double theta, double a) {
  Eigen::Matrix2d rotation;
  rotation << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  Eigen::Matrix2d diag = Eigen::Matrix2d::Zero();
  diag(0, 0) = s * std::exp2(-a / 2.0);
  diag(1, 1) = s * std::exp2(a / 2.0);
  const Eigen::Matrix2d affine = rotation * diag;
  const Eigen::Matrix2d cov = affine * affine.transpose();
  Eigen::Matrix2d shape = cov.inverse();
  return 0.5 * (shape + shape.transpose());
}

// RAND-A: ellipses from a random affine map with uniform orientation and
// log-uniform axis ratio in [1, 4]. The center margin is the excircle radius
// s * 2^(a/2); oversized (s, theta, a) triples are rejected as a whole.
inline std::vector<Region> sample_rand_a(int width, int height, int n, const RandParams& params,
                                         int* rejections = nullptr) {
  validate(params);
  detail::check_feature_count(n);
  if (!(std::min(width, height) > 2.0 * params.s_min))
    throw InvalidParameterError("image domain too small for the minimum scale");

  Philox rng(params.seed);
  const double limit = std::min(width, height) / 2.0;
  std::vector<Region> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    double s, theta, a, margin;
    int streak = 0;
    while (true) {
      s = sample_scale(params, rng);
      theta = rng.uniform(-M_PI, M_PI);
      a = rng.uniform(0.0, 2.0);
      margin = s * std::exp2(a / 2.0);
      if (margin < limit) break;
      if (rejections) ++*rejections;
      if (++streak > detail::kMaxConsecutiveRejections)
        throw InvalidParameterError("scale sampling rejected too often; domain too small");
    }
    const Eigen::Vector2d c = detail::sample_center(width, height, margin, rng);
    Region region;
    region.center = c;
    region.shape = ellipse_shape_from_affine(s, theta, a);
    region.score = static_cast<double>(n - i);
    out.push_back(region);
  }
  return out;
}

}  // namespace detbench
