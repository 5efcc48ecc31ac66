#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "detbench/error.hpp"

namespace detbench {

// Area of the normalisation reference: regions are rescaled so the reference
// region covers 30^2 px^2 before overlap is measured.
inline constexpr double kDefaultNormArea = 900.0;

// An elliptical detection {p : (p-c)^T M (p-c) <= 1} with detection strength
// `score`. M is symmetric positive-definite; a circle of radius r has
// M = I / r^2. Point detections are stored as circles of a configured radius.
struct Region {
  Eigen::Vector2d center{0.0, 0.0};
  Eigen::Matrix2d shape{Eigen::Matrix2d::Identity()};
  double score = 0.0;

  static Region circle(double x, double y, double radius, double score = 0.0) {
    Region r;
    r.center = {x, y};
    r.shape = Eigen::Matrix2d::Identity() / (radius * radius);
    r.score = score;
    return r;
  }
};

inline bool is_valid(const Region& r) {
  if (!r.center.allFinite() || !r.shape.allFinite() || !std::isfinite(r.score)) return false;
  const double asym = std::abs(r.shape(0, 1) - r.shape(1, 0));
  const double scale = r.shape.cwiseAbs().maxCoeff();
  if (asym > 1e-9 * std::max(scale, 1.0)) return false;
  // SPD for a symmetric 2x2: positive trace and determinant.
  return r.shape.trace() > 0.0 && r.shape.determinant() > 0.0;
}

inline void validate(const Region& r) {
  if (!is_valid(r)) throw InvalidRegionError("region shape matrix is not symmetric positive-definite");
}

inline double area(const Region& r) {
  validate(r);
  return M_PI / std::sqrt(r.shape.determinant());
}

// Radius of the smallest circle enclosing the region: 1/sqrt(lambda_min(M)).
inline double excircle_radius(const Region& r) {
  validate(r);
  const double tr = r.shape.trace();
  const double det = r.shape.determinant();
  const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
  const double lambda_min = 0.5 * (tr - disc);
  return 1.0 / std::sqrt(lambda_min);
}

// Scale the region by `gamma` about its own center; area grows by gamma^2.
inline Region magnify(const Region& r, double gamma) {
  if (!(gamma > 0.0)) throw InvalidParameterError("magnification factor must be > 0");
  Region out = r;
  out.shape = r.shape / (gamma * gamma);
  return out;
}

// Plane projective map with a declared direction: reference-image coordinates
// to target-image coordinates. The matrix is kept as given; validation and
// the horizon test are scale-invariant.
class Homography {
 public:
  Homography() : matrix_(Eigen::Matrix3d::Identity()) {}

  explicit Homography(const Eigen::Matrix3d& m) : matrix_(m) {
    const double norm = m.norm();
    if (!m.allFinite() || norm == 0.0) throw ValidationError("homography matrix is not finite");
    const Eigen::Matrix3d unit = m / norm;
    if (std::abs(unit.determinant()) <= 1e-12) throw ValidationError("homography matrix is singular");
  }

  static Homography identity() { return Homography(Eigen::Matrix3d::Identity()); }

  const Eigen::Matrix3d& matrix() const { return matrix_; }

  Homography inverse() const { return Homography(matrix_.inverse().eval()); }

  // Projective image of a point; throws if p lies on the horizon line.
  Eigen::Vector2d apply(const Eigen::Vector2d& p) const {
    const Eigen::Vector3d q = matrix_ * Eigen::Vector3d(p.x(), p.y(), 1.0);
    if (std::abs(q.z()) <= 1e-12 * matrix_.norm())
      throw DegenerateWarpError("point maps to the horizon line");
    return {q.x() / q.z(), q.y() / q.z()};
  }

 private:
  Eigen::Matrix3d matrix_;
};

// First-order (Jacobian) approximation of the projective map at p, used to
// transport conics between images.
inline Eigen::Matrix2d affine_approx(const Homography& h, const Eigen::Vector2d& p) {
  const Eigen::Matrix3d& m = h.matrix();
  const Eigen::Vector3d q = m * Eigen::Vector3d(p.x(), p.y(), 1.0);
  if (std::abs(q.z()) <= 1e-12 * m.norm())
    throw DegenerateWarpError("affine approximation undefined on the horizon line");
  const double u = q.x() / q.z();
  const double v = q.y() / q.z();
  Eigen::Matrix2d jac;
  jac << m(0, 0) - u * m(2, 0), m(0, 1) - u * m(2, 1),
         m(1, 0) - v * m(2, 0), m(1, 1) - v * m(2, 1);
  return jac / q.z();
}

// Map a region through a homography: the center moves projectively and the
// shape is transported by the local affine approximation A as A^-T M A^-1.
inline Region warp_region(const Region& r, const Homography& h) {
  validate(r);
  Region out;
  out.center = h.apply(r.center);
  const Eigen::Matrix2d jac = affine_approx(h, r.center);
  const double det = jac.determinant();
  if (std::abs(det) <= 1e-15) throw DegenerateWarpError("affine approximation is singular");
  Eigen::Matrix2d inv;
  inv << jac(1, 1), -jac(0, 1), -jac(1, 0), jac(0, 0);
  inv /= det;
  Eigen::Matrix2d shape = inv.transpose() * r.shape * inv;
  out.shape = 0.5 * (shape + shape.transpose());
  out.score = r.score;
  return out;
}

namespace detail {

struct Bounds {
  double lo_x, hi_x, lo_y, hi_y;
};

// Axis-aligned bounding box of the ellipse: half-extents are the square roots
// of the diagonal of M^-1.
inline Bounds bounding_box(const Region& r) {
  const double det = r.shape.determinant();
  const double hx = std::sqrt(r.shape(1, 1) / det);
  const double hy = std::sqrt(r.shape(0, 0) / det);
  return {r.center.x() - hx, r.center.x() + hx, r.center.y() - hy, r.center.y() + hy};
}

inline bool contains(const Region& r, double x, double y) {
  const double dx = x - r.center.x();
  const double dy = y - r.center.y();
  const Eigen::Matrix2d& m = r.shape;
  return m(0, 0) * dx * dx + 2.0 * m(0, 1) * dx * dy + m(1, 1) * dy * dy <= 1.0;
}

}  // namespace detail

// Numerical intersection-over-union on a regular grid spanning the union of
// the two bounding boxes. The grid step is (smaller excircle diameter)/64
// clamped to [0.05, 1.0] px; a cell counts as inside a region when its
// center satisfies the quadratic inequality. The grid depends only on the
// unordered pair, so raster_overlap(a, b) == raster_overlap(b, a) bit-exactly.
inline double raster_overlap(const Region& a, const Region& b) {
  validate(a);
  validate(b);
  if (a.center == b.center && a.shape == b.shape) return 1.0;

  const double diam = 2.0 * std::min(excircle_radius(a), excircle_radius(b));
  const double step = std::clamp(diam / 64.0, 0.05, 1.0);

  const detail::Bounds ba = detail::bounding_box(a);
  const detail::Bounds bb = detail::bounding_box(b);
  const double lo_x = std::min(ba.lo_x, bb.lo_x);
  const double hi_x = std::max(ba.hi_x, bb.hi_x);
  const double lo_y = std::min(ba.lo_y, bb.lo_y);
  const double hi_y = std::max(ba.hi_y, bb.hi_y);

  const long nx = static_cast<long>(std::ceil((hi_x - lo_x) / step));
  const long ny = static_cast<long>(std::ceil((hi_y - lo_y) / step));

  long in_a = 0, in_b = 0, in_both = 0;
  for (long j = 0; j < ny; ++j) {
    const double y = lo_y + (static_cast<double>(j) + 0.5) * step;
    for (long i = 0; i < nx; ++i) {
      const double x = lo_x + (static_cast<double>(i) + 0.5) * step;
      const bool inside_a = detail::contains(a, x, y);
      const bool inside_b = detail::contains(b, x, y);
      in_a += inside_a;
      in_b += inside_b;
      in_both += inside_a && inside_b;
    }
  }
  const long in_union = in_a + in_b - in_both;
  if (in_union == 0) return 0.0;
  return static_cast<double>(in_both) / static_cast<double>(in_union);
}

// Normalised overlap of a reference region and a target region already
// expressed in the reference frame. Both regions are rescaled about their own
// centers by sqrt(norm_area / area(ref)), so the reference ends up with area
// `norm_area`; pairs whose rescaled excircles cannot intersect return 0
// without rasterisation. `legacy_quick_reject` applies the excircle test
// before normalisation instead, reproducing the magnification-dependent
// behaviour of the historical implementation (test and sweep use only).
inline double normalized_overlap(const Region& ref, const Region& warped_target,
                                 double norm_area = kDefaultNormArea,
                                 bool legacy_quick_reject = false) {
  const double gamma = std::sqrt(norm_area / area(ref));
  const double radius_sum = legacy_quick_reject
                                ? excircle_radius(ref) + excircle_radius(warped_target)
                                : gamma * (excircle_radius(ref) + excircle_radius(warped_target));
  if ((ref.center - warped_target.center).squaredNorm() > radius_sum * radius_sum) return 0.0;
  return raster_overlap(magnify(ref, gamma), magnify(warped_target, gamma));
}

}  // namespace detbench
