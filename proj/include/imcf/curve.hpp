#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "imcf/common.hpp"

namespace imcf {

/// Planar profile (x, r) of an axisymmetric hypersurface in R^{n+1}.
///
/// Ordered counterclockwise: index 0 is the right pole (largest x), the last
/// index is the left pole, and r > 0 strictly in between.
template <typename Scalar>
class GeneratingCurve {
 public:
  using Index = Eigen::Index;

  GeneratingCurve() = default;

  GeneratingCurve(PointArray<Scalar> points, int dimension)
      : points_(std::move(points)), dimension_(dimension) {
    validate();
  }

  /// Skips validation; callers that build curves in bulk check invariants themselves.
  static GeneratingCurve unchecked(PointArray<Scalar> points, int dimension) {
    GeneratingCurve c;
    c.points_ = std::move(points);
    c.dimension_ = dimension;
    return c;
  }

  Index size() const { return points_.rows(); }
  int dimension() const { return dimension_; }

  const PointArray<Scalar>& points() const { return points_; }
  auto x() const { return points_.col(0); }
  auto r() const { return points_.col(1); }
  Point<Scalar> point(Index i) const { return points_.row(i).transpose(); }

  Vec<Scalar> chord_lengths() const {
    const Index m = size();
    Vec<Scalar> h(m > 0 ? m - 1 : 0);
    for (Index i = 0; i + 1 < m; ++i) h(i) = (points_.row(i + 1) - points_.row(i)).norm();
    return h;
  }

  Scalar length() const { return chord_lengths().sum(); }

  Scalar nominal_spacing() const { return length() / Scalar(size() - 1); }

  /// max chord / min chord - 1
  Scalar spacing_deviation() const {
    const Vec<Scalar> h = chord_lengths();
    return h.maxCoeff() / h.minCoeff() - Scalar(1);
  }

  GeneratingCurve translated(Scalar dx) const {
    PointArray<Scalar> p = points_;
    p.col(0).array() += dx;
    return unchecked(std::move(p), dimension_);
  }

  GeneratingCurve scaled(Scalar factor) const {
    return unchecked(points_ * factor, dimension_);
  }

 private:
  void validate() const {
    using std::isfinite;
    if (dimension_ < 2) throw Error(ErrorKind::kInvalidParameter, "dimension n must be >= 2");
    const Index m = size();
    if (m < 3) throw Error(ErrorKind::kDegenerateInput, "curve needs at least 3 samples");
    if (!points_.allFinite()) throw Error(ErrorKind::kDegenerateInput, "non-finite sample");
    if (length() < Scalar(1e-12)) throw Error(ErrorKind::kDegenerateInput, "curve length below 1e-12");
    if (points_(0, 1) != Scalar(0) || points_(m - 1, 1) != Scalar(0)) {
      throw Error(ErrorKind::kDegenerateInput, "endpoints must lie on the axis (r = 0)");
    }
    for (Index i = 1; i + 1 < m; ++i) {
      if (!(points_(i, 1) > Scalar(0))) {
        throw Error(ErrorKind::kDegenerateInput,
                    "interior sample " + std::to_string(i) + " is not strictly off-axis");
      }
    }
  }

  PointArray<Scalar> points_;
  int dimension_ = 2;
};

namespace detail {

template <typename Scalar>
Scalar cross2(const Point<Scalar>& a, const Point<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

template <typename Scalar>
bool segments_intersect(const Point<Scalar>& p1, const Point<Scalar>& p2,
                        const Point<Scalar>& q1, const Point<Scalar>& q2) {
  const Point<Scalar> d1 = p2 - p1;
  const Point<Scalar> d2 = q2 - q1;
  const Scalar o1 = cross2<Scalar>(d1, q1 - p1);
  const Scalar o2 = cross2<Scalar>(d1, q2 - p1);
  const Scalar o3 = cross2<Scalar>(d2, p1 - q1);
  const Scalar o4 = cross2<Scalar>(d2, p2 - q1);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 &&
         o4 != 0;
}

}  // namespace detail

/// True when the profile polyline has no self-intersections. Strictly decreasing x
/// (a graph over the axis) is accepted in O(M); otherwise a full segment sweep runs.
template <typename Scalar>
bool is_simple(const GeneratingCurve<Scalar>& curve) {
  using Index = Eigen::Index;
  const Index m = curve.size();
  bool monotone = true;
  for (Index i = 0; i + 1 < m && monotone; ++i) monotone = curve.x()(i + 1) < curve.x()(i);
  if (monotone) return true;
  for (Index i = 0; i + 1 < m; ++i) {
    for (Index j = i + 2; j + 1 < m; ++j) {
      if (detail::segments_intersect<Scalar>(curve.point(i), curve.point(i + 1), curve.point(j),
                                             curve.point(j + 1))) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace imcf
