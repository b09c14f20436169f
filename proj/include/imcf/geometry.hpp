#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "imcf/curve.hpp"

namespace imcf {

/// Per-sample differential geometry of the revolved hypersurface.
template <typename Scalar>
struct GeometrySamples {
  using Index = Eigen::Index;

  int dimension = 2;
  PointArray<Scalar> position;
  PointArray<Scalar> tangent;
  PointArray<Scalar> normal;  // outward, (T_r, -T_x)
  Vec<Scalar> k;              // profile curvature
  Vec<Scalar> p;              // rotational curvature
  Vec<Scalar> H;
  Vec<Scalar> u;        // height, = r
  Vec<Scalar> utilde;   // <F, e1>, = x
  Vec<Scalar> v;        // 1 / <nu, w>; NaN where undefined
  Eigen::Array<bool, Eigen::Dynamic, 1> v_defined;
  Vec<Scalar> A2;       // k^2 + (n-1) p^2
  Scalar spacing = 0;   // nominal arc-length spacing

  Index size() const { return position.rows(); }
  auto nu_axial() const { return normal.col(0); }   // <nu, e1>
  auto nu_radial() const { return normal.col(1); }  // <nu, w>
  Scalar min_H() const { return H.minCoeff(); }
  bool mean_convex() const { return min_H() > Scalar(0); }

  /// min <nu, w> over interior samples
  Scalar embeddedness_margin() const {
    return size() > 2 ? normal.col(1).segment(1, size() - 2).minCoeff() : Scalar(0);
  }
};

/// Samples whose index is within this distance of a pole never report v.
inline constexpr Eigen::Index kPoleExclusion = 2;

/// Maximum relative chord-length spread accepted as "uniformly sampled".
inline constexpr double kMaxSpacingDeviation = 0.5;

namespace detail {

template <typename Scalar>
struct LocalFrame {
  Point<Scalar> tangent;
  Scalar curvature;
};

// Tangent and curvature of the circle through three consecutive samples. Exact for
// circular arcs at any spacing; reduces to the chord direction on straight runs.
template <typename Scalar>
LocalFrame<Scalar> circle_frame(const Point<Scalar>& prev, const Point<Scalar>& here,
                                const Point<Scalar>& next) {
  using std::hypot;
  const Point<Scalar> a = here - prev;
  const Point<Scalar> b = next - here;
  const Scalar la = a.norm();
  const Scalar lb = b.norm();
  const Point<Scalar> ah = a / la;
  const Point<Scalar> bh = b / lb;
  const Scalar sin_turn = cross2<Scalar>(ah, bh);
  const Scalar cos_turn = ah.dot(bh);
  const Scalar c = lb + la * cos_turn;
  const Scalar s = la * sin_turn;
  const Scalar nrm = hypot(c, s);
  const Scalar ca = c / nrm;
  const Scalar sa = s / nrm;
  Point<Scalar> t(ah.x() * ca - ah.y() * sa, ah.x() * sa + ah.y() * ca);
  return {t, Scalar(2) * sin_turn / (next - prev).norm()};
}

template <typename Scalar>
Point<Scalar> ghost_before(const GeneratingCurve<Scalar>& c) {
  return Point<Scalar>(c.x()(1), -c.r()(1));
}

template <typename Scalar>
Point<Scalar> ghost_after(const GeneratingCurve<Scalar>& c) {
  const auto m = c.size();
  return Point<Scalar>(c.x()(m - 2), -c.r()(m - 2));
}

}  // namespace detail

template <typename Scalar>
GeometrySamples<Scalar> pointwise_geometry(const GeneratingCurve<Scalar>& curve) {
  using Index = Eigen::Index;
  const Index m = curve.size();
  const int n = curve.dimension();
  if (curve.spacing_deviation() > Scalar(kMaxSpacingDeviation)) {
    throw Error(ErrorKind::kPrecondition, "curve is not uniformly sampled; resample first");
  }

  GeometrySamples<Scalar> g;
  g.dimension = n;
  g.position = curve.points();
  g.tangent.resize(m, 2);
  g.normal.resize(m, 2);
  g.k.resize(m);
  g.p.resize(m);
  g.H.resize(m);
  g.u = curve.r();
  g.utilde = curve.x();
  g.v.resize(m);
  g.v_defined.resize(m);
  g.A2.resize(m);
  g.spacing = curve.nominal_spacing();

  for (Index i = 0; i < m; ++i) {
    const Point<Scalar> prev = i == 0 ? detail::ghost_before(curve) : curve.point(i - 1);
    const Point<Scalar> next = i == m - 1 ? detail::ghost_after(curve) : curve.point(i + 1);
    auto frame = detail::circle_frame<Scalar>(prev, curve.point(i), next);
    if (i == 0) frame.tangent = Point<Scalar>(0, 1);
    if (i == m - 1) frame.tangent = Point<Scalar>(0, -1);
    g.tangent.row(i) = frame.tangent.transpose();
    g.normal(i, 0) = frame.tangent.y();
    g.normal(i, 1) = -frame.tangent.x();
    g.k(i) = frame.curvature;
  }

  const Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();
  for (Index i = 0; i < m; ++i) {
    const bool pole = i == 0 || i == m - 1;
    g.p(i) = pole ? g.k(i) : g.normal(i, 1) / g.u(i);
    g.H(i) = g.k(i) + Scalar(n - 1) * g.p(i);
    g.A2(i) = g.k(i) * g.k(i) + Scalar(n - 1) * g.p(i) * g.p(i);
    const bool near_pole = i <= kPoleExclusion || i >= m - 1 - kPoleExclusion;
    g.v_defined(i) = !near_pole && g.normal(i, 1) > Scalar(1e-8);
    g.v(i) = g.v_defined(i) ? Scalar(1) / g.normal(i, 1) : nan;
  }
  return g;
}

/// Axisymmetric Laplace-Beltrami operator f'' + (n-1)(r'/r) f' in arc length.
/// At the poles the smooth limit n f'' is taken with the even reflection of f.
template <typename Scalar, typename Derived>
Vec<Scalar> surface_laplacian(const GeneratingCurve<Scalar>& curve, const Eigen::MatrixBase<Derived>& f) {
  using Index = Eigen::Index;
  const Index m = curve.size();
  if (f.size() != m) throw Error(ErrorKind::kPrecondition, "sample count mismatch in surface_laplacian");
  const int n = curve.dimension();
  const Vec<Scalar> h = curve.chord_lengths();
  const auto r = curve.r();
  Vec<Scalar> out(m);

  out(0) = Scalar(n) * Scalar(2) * (f(1) - f(0)) / (h(0) * h(0));
  out(m - 1) = Scalar(n) * Scalar(2) * (f(m - 2) - f(m - 1)) / (h(m - 2) * h(m - 2));
  for (Index i = 1; i + 1 < m; ++i) {
    const Scalar hm = h(i - 1);
    const Scalar hp = h(i);
    const Scalar denom = hm * hp * (hm + hp);
    const Scalar dfp = f(i + 1) - f(i);
    const Scalar dfm = f(i) - f(i - 1);
    const Scalar fss = Scalar(2) * (hm * dfp - hp * dfm) / denom;
    const Scalar fs = (hm * hm * dfp + hp * hp * dfm) / denom;
    const Scalar rs = (hm * hm * (r(i + 1) - r(i)) + hp * hp * (r(i) - r(i - 1))) / denom;
    out(i) = fss + Scalar(n - 1) * rs / r(i) * fs;
  }
  return out;
}

/// Arc-length derivative by the nonuniform three-point stencil; zero at the poles
/// (f even across the axis).
template <typename Scalar, typename Derived>
Vec<Scalar> arc_derivative(const GeneratingCurve<Scalar>& curve, const Eigen::MatrixBase<Derived>& f) {
  const Eigen::Index m = curve.size();
  if (f.size() != m) throw Error(ErrorKind::kPrecondition, "sample count mismatch in arc_derivative");
  const Vec<Scalar> h = curve.chord_lengths();
  Vec<Scalar> out = Vec<Scalar>::Zero(m);
  for (Eigen::Index i = 1; i + 1 < m; ++i) {
    const Scalar hm = h(i - 1);
    const Scalar hp = h(i);
    out(i) = (hm * hm * (f(i + 1) - f(i)) + hp * hp * (f(i) - f(i - 1))) / (hm * hp * (hm + hp));
  }
  return out;
}

/// Index ranges of right cap [0, right_end], bridge, and left cap [left_begin, M-1].
template <typename Scalar>
struct RegionDecomposition {
  using Index = Eigen::Index;

  Index right_end = 0;
  Index left_begin = 1;
  Scalar a = 0;  // abscissa of the left cap boundary
  Scalar b = 0;  // abscissa of the right cap boundary

  bool bridge_empty() const { return left_begin <= right_end + 1; }
  Index bridge_begin() const { return right_end + 1; }
  Index bridge_end() const { return left_begin - 1; }  // inclusive
  Index bridge_size() const { return bridge_empty() ? 0 : left_begin - right_end - 1; }
  bool in_bridge(Index i) const { return i > right_end && i < left_begin; }
  bool in_right_cap(Index i) const { return i <= right_end; }
  bool in_left_cap(Index i) const { return i >= left_begin; }
};

template <typename Scalar>
RegionDecomposition<Scalar> decompose_regions(const GeometrySamples<Scalar>& geom) {
  using Index = Eigen::Index;
  const Index m = geom.size();
  const auto e1 = geom.nu_axial();
  const auto& x = geom.utilde;

  RegionDecomposition<Scalar> rd;
  Index re = 0;
  while (re + 1 < m && e1(re + 1) >= Scalar(0)) ++re;
  Index lb = m - 1;
  while (lb - 1 > 0 && e1(lb - 1) <= Scalar(0)) --lb;

  auto crossing = [&](Index i, Index j) {
    const Scalar fi = e1(i);
    const Scalar fj = e1(j);
    if (fi == fj) return x(i);
    return x(i) + (x(j) - x(i)) * fi / (fi - fj);
  };

  if (lb <= re + 1) {
    // Caps meet; samples claimed by both go to the right cap.
    rd.right_end = std::min(re, m - 2);
    rd.left_begin = rd.right_end + 1;
    rd.a = rd.b = crossing(rd.right_end, rd.left_begin);
  } else {
    rd.right_end = re;
    rd.left_begin = lb;
    rd.b = crossing(re, re + 1);
    rd.a = crossing(lb - 1, lb);
  }
  return rd;
}

/// Number of sign changes of <nu, e1> along the profile, ignoring |<nu, e1>| <= zero_tol.
/// Equals the number of critical points of the generating graph.
template <typename Scalar>
int critical_count(const GeometrySamples<Scalar>& geom, Scalar zero_tol = Scalar(1e-9)) {
  int last = 0;
  int changes = 0;
  const auto e1 = geom.nu_axial();
  for (Eigen::Index i = 0; i < geom.size(); ++i) {
    const int s = e1(i) > zero_tol ? 1 : (e1(i) < -zero_tol ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

/// Area of the unit sphere S^{d}.
template <typename Scalar>
Scalar unit_sphere_area(int d) {
  using std::pow;
  using std::tgamma;
  const Scalar half = Scalar(d + 1) / Scalar(2);
  return Scalar(2) * pow(std::numbers::pi_v<Scalar>, half) / tgamma(half);
}

template <typename Scalar>
Scalar area(const GeneratingCurve<Scalar>& curve) {
  using std::pow;
  const int n = curve.dimension();
  const Vec<Scalar> h = curve.chord_lengths();
  Scalar sum = 0;
  for (Eigen::Index i = 0; i + 1 < curve.size(); ++i) {
    sum += h(i) * (pow(curve.r()(i), n - 1) + pow(curve.r()(i + 1), n - 1)) / Scalar(2);
  }
  return unit_sphere_area<Scalar>(n - 1) * sum;
}

/// Extrinsic diameter; opposite meridians (r_i + r_j) realize the maximum.
template <typename Scalar>
Scalar diameter(const GeneratingCurve<Scalar>& curve) {
  const auto x = curve.x();
  const auto r = curve.r();
  Scalar best2 = 0;
  for (Eigen::Index i = 0; i < curve.size(); ++i) {
    for (Eigen::Index j = i; j < curve.size(); ++j) {
      const Scalar dx = x(i) - x(j);
      const Scalar sr = r(i) + r(j);
      best2 = std::max(best2, dx * dx + sr * sr);
    }
  }
  using std::sqrt;
  return sqrt(best2);
}

namespace detail {

template <typename Scalar>
Scalar point_segment_distance(const Point<Scalar>& q, const Point<Scalar>& a, const Point<Scalar>& b) {
  const Point<Scalar> d = b - a;
  const Scalar len2 = d.squaredNorm();
  Scalar t = len2 > Scalar(0) ? (q - a).dot(d) / len2 : Scalar(0);
  t = std::clamp(t, Scalar(0), Scalar(1));
  return (q - (a + t * d)).norm();
}

template <typename Scalar>
Scalar distance_to_profile(const GeneratingCurve<Scalar>& curve, const Point<Scalar>& q) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i + 1 < curve.size(); ++i) {
    best = std::min(best, point_segment_distance<Scalar>(q, curve.point(i), curve.point(i + 1)));
  }
  return best;
}

// Golden-section maximization of f on [lo, hi].
template <typename Scalar, typename F>
Scalar golden_maximize(F&& f, Scalar lo, Scalar hi, int iterations = 80) {
  const Scalar g = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar c = hi - g * (hi - lo);
  Scalar d = lo + g * (hi - lo);
  Scalar fc = f(c);
  Scalar fd = f(d);
  for (int it = 0; it < iterations && hi - lo > Scalar(1e-14) * (Scalar(1) + std::abs(lo)); ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  return fc > fd ? c : d;
}

// Grid scan followed by golden-section refinement around the best grid cell.
template <typename Scalar, typename F>
std::pair<Scalar, Scalar> scan_maximize(F&& f, Scalar lo, Scalar hi, int grid) {
  Scalar best_x = lo;
  Scalar best_f = -std::numeric_limits<Scalar>::infinity();
  const Scalar step = (hi - lo) / Scalar(grid);
  for (int i = 0; i <= grid; ++i) {
    const Scalar xc = lo + step * Scalar(i);
    const Scalar fx = f(xc);
    if (fx > best_f) {
      best_f = fx;
      best_x = xc;
    }
  }
  const Scalar a = std::max(lo, best_x - step);
  const Scalar b = std::min(hi, best_x + step);
  const Scalar xr = golden_maximize<Scalar>(f, a, b);
  const Scalar fr = f(xr);
  if (fr > best_f) return {xr, fr};
  return {best_x, best_f};
}

}  // namespace detail

template <typename Scalar>
struct Inradius {
  Scalar radius;
  Scalar center;  // axial coordinate of the ball center
};

/// Largest ball centered on the axis that fits inside the revolved surface.
template <typename Scalar>
Inradius<Scalar> inradius(const GeneratingCurve<Scalar>& curve) {
  const Scalar lo = curve.x().minCoeff();
  const Scalar hi = curve.x().maxCoeff();
  auto dist = [&](Scalar xc) { return detail::distance_to_profile(curve, Point<Scalar>(xc, 0)); };
  const auto [xc, rad] = detail::scan_maximize<Scalar>(dist, lo, hi, 256);
  return {rad, xc};
}

/// min over samples of <F - center, nu> for a center on the axis.
template <typename Scalar>
Scalar star_shaped(const GeometrySamples<Scalar>& geom, Scalar center) {
  const auto& P = geom.position;
  const auto& N = geom.normal;
  return ((P.col(0).array() - center) * N.col(0).array() + P.col(1).array() * N.col(1).array()).minCoeff();
}

/// An axis point with positive support margin, if one exists. The margin is a
/// minimum of affine functions of the center, hence concave.
template <typename Scalar>
std::optional<Scalar> star_center_exists(const GeometrySamples<Scalar>& geom) {
  const Scalar lo = geom.utilde.minCoeff();
  const Scalar hi = geom.utilde.maxCoeff();
  auto margin = [&](Scalar c) { return star_shaped(geom, c); };
  const auto [c, value] = detail::scan_maximize<Scalar>(margin, lo, hi, 64);
  if (value > Scalar(0)) return c;
  return std::nullopt;
}

/// Distance between coaxial profiles: point-to-segment in both directions.
template <typename Scalar>
Scalar curve_distance(const GeneratingCurve<Scalar>& a, const GeneratingCurve<Scalar>& b) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < a.size(); ++i) best = std::min(best, detail::distance_to_profile(b, a.point(i)));
  for (Eigen::Index j = 0; j < b.size(); ++j) best = std::min(best, detail::distance_to_profile(a, b.point(j)));
  return best;
}

/// Height of a graph-like profile at axial coordinate xq (linear interpolation);
/// nullopt outside the axial extent.
template <typename Scalar>
std::optional<Scalar> profile_height(const GeneratingCurve<Scalar>& c, Scalar xq) {
  const auto x = c.x();
  const Eigen::Index m = c.size();
  if (!(xq <= x(0) && xq >= x(m - 1))) return std::nullopt;
  Eigen::Index lo = 0;
  Eigen::Index hi = m - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    if (x(mid) >= xq) lo = mid; else hi = mid;
  }
  const Scalar span = x(lo) - x(hi);
  const Scalar t = span > Scalar(0) ? (x(lo) - xq) / span : Scalar(0);
  return c.r()(lo) + t * (c.r()(hi) - c.r()(lo));
}

/// True when the region enclosed by `inner` lies strictly inside the one enclosed by `outer`.
template <typename Scalar>
bool strictly_contains(const GeneratingCurve<Scalar>& outer, const GeneratingCurve<Scalar>& inner) {
  for (Eigen::Index i = 0; i < inner.size(); ++i) {
    const auto h = profile_height(outer, inner.x()(i));
    if (!h || !(inner.r()(i) < *h)) return false;
  }
  return curve_distance(outer, inner) > Scalar(0);
}

}  // namespace imcf
