#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "imcf/geometry.hpp"
#include "imcf/resample.hpp"

namespace imcf {

enum class CutoffKind {
  kAsymmetric,        // fast rise, long plateau in phi'', short braking interval
  kQuinticSmoothstep  // 6t^5 - 15t^4 + 10t^3
};

/// C^2 monotone cutoff phi: [0,1] -> [0,1], identically 0 on [0, 1/4] and 1 on [1/2, 1].
///
/// Internally phi(s) = psi(4s - 1) with psi a ramp on [0, 1]. The asymmetric ramp has
/// piecewise-linear psi''; its two amplitudes are fixed by psi'(1) = 0 and psi(1) = 1.
template <typename Scalar>
class CutoffRamp {
 public:
  explicit CutoffRamp(CutoffKind kind = CutoffKind::kAsymmetric) : kind_(kind) {
    if (kind_ == CutoffKind::kAsymmetric) build_asymmetric();
  }

  CutoffKind kind() const { return kind_; }

  /// phi and its first two derivatives
  Scalar operator()(Scalar s, int order = 0) const {
    const Scalar t = Scalar(4) * s - Scalar(1);
    if (t <= Scalar(0)) return Scalar(0);
    if (t >= Scalar(1)) return order == 0 ? Scalar(1) : Scalar(0);
    Scalar scale = 1;
    for (int i = 0; i < order; ++i) scale *= Scalar(4);
    return scale * psi(t, order);
  }

  /// psi on [0, 1]
  Scalar psi(Scalar t, int order) const {
    if (kind_ == CutoffKind::kQuinticSmoothstep) {
      const Scalar t2 = t * t;
      switch (order) {
        case 0: return t2 * t * (Scalar(10) - Scalar(15) * t + Scalar(6) * t2);
        case 1: return Scalar(30) * t2 * (Scalar(1) - t) * (Scalar(1) - t);
        default: return Scalar(60) * t * (Scalar(1) - t) * (Scalar(1) - Scalar(2) * t);
      }
    }
    std::size_t j = 0;
    while (j + 2 < knots_.size() && t > knots_[j + 1]) ++j;
    const Scalar h = knots_[j + 1] - knots_[j];
    const Scalar tau = t - knots_[j];
    const Scalar a = second_[j];
    const Scalar slope = (second_[j + 1] - a) / h;
    switch (order) {
      case 0:
        return value_[j] + first_[j] * tau + a * tau * tau / Scalar(2) + slope * tau * tau * tau / Scalar(6);
      case 1: return first_[j] + a * tau + slope * tau * tau / Scalar(2);
      default: return a + slope * tau;
    }
  }

 private:
  static constexpr std::size_t kKnots = 5;

  // Integrate psi'' (piecewise linear through `second`) from psi(0) = psi'(0) = 0.
  static void integrate(const std::array<Scalar, kKnots>& t, const std::array<Scalar, kKnots>& second,
                        std::array<Scalar, kKnots>& first, std::array<Scalar, kKnots>& value) {
    first[0] = value[0] = 0;
    for (std::size_t j = 0; j + 1 < kKnots; ++j) {
      const Scalar h = t[j + 1] - t[j];
      const Scalar a = second[j];
      const Scalar b = second[j + 1];
      value[j + 1] = value[j] + first[j] * h + h * h * (Scalar(2) * a + b) / Scalar(6);
      first[j + 1] = first[j] + h * (a + b) / Scalar(2);
    }
  }

  void build_asymmetric() {
    knots_ = {Scalar(0), Scalar(0.05), Scalar(0.70), Scalar(0.96), Scalar(1)};
    const std::array<Scalar, kKnots> rise = {0, 1, 1, 0, 0};
    const std::array<Scalar, kKnots> brake = {0, 0, 0, -1, 0};
    std::array<Scalar, kKnots> f1, v1, f2, v2;
    integrate(knots_, rise, f1, v1);
    integrate(knots_, brake, f2, v2);
    // A * f1 + D * f2 = 0 and A * v1 + D * v2 = 1 at t = 1
    const Scalar det = f1.back() * v2.back() - f2.back() * v1.back();
    const Scalar amp_rise = -f2.back() / det;
    const Scalar amp_brake = f1.back() / det;
    for (std::size_t j = 0; j < kKnots; ++j) second_[j] = amp_rise * rise[j] + amp_brake * brake[j];
    integrate(knots_, second_, first_, value_);
  }

  CutoffKind kind_;
  std::array<Scalar, kKnots> knots_{};
  std::array<Scalar, kKnots> second_{};
  std::array<Scalar, kKnots> first_{};
  std::array<Scalar, kKnots> value_{};
};

template <typename Scalar>
struct TubeSpheresParams {
  Scalar ell = 8;    // neck half-length
  Scalar c = 0.6;    // tube radius
  int dimension = 2;
  Eigen::Index samples = 1200;
  CutoffKind cutoff = CutoffKind::kAsymmetric;

  void validate() const {
    if (!(c > Scalar(0.5) && c < Scalar(1))) {
      throw Error(ErrorKind::kInvalidParameter, "tube radius c must lie in (0.5, 1)");
    }
    if (!(ell >= Scalar(4))) throw Error(ErrorKind::kInvalidParameter, "neck half-length ell must be >= 4");
    if (dimension < 2) throw Error(ErrorKind::kInvalidParameter, "dimension n must be >= 2");
    if (samples < 16) throw Error(ErrorKind::kInvalidParameter, "sample count must be >= 16");
  }
};

/// Two unit spheres centered at x = +-(ell + 1) joined by a tube of radius c, as
/// the graph y(x) over [-(ell + 2), ell + 2]. Exposes y, y', y'' and the graph
/// mean curvature for direct evaluation without sampling.
template <typename Scalar>
class TubeSpheresProfile {
 public:
  explicit TubeSpheresProfile(const TubeSpheresParams<Scalar>& params)
      : params_(params), ramp_(params.cutoff) {
    params_.validate();
    const Scalar l = params_.ell;
    l2_ = l * l;
    l4_ = l2_ * l2_;
    center_ = l + Scalar(1);
    tube_end_ = center_ * params_.c;
    x0_ = center_ - std::numbers::pi_v<Scalar> / (Scalar(2) * l2_);
    ramp_width_ = center_ * (Scalar(1) - params_.c);
  }

  const TubeSpheresParams<Scalar>& params() const { return params_; }
  Scalar sphere_center() const { return center_; }  // ell + 1
  Scalar tube_end() const { return tube_end_; }     // (ell + 1) c
  Scalar tangent_point() const { return x0_; }
  Scalar half_extent() const { return center_ + Scalar(1); }
  /// abscissae where the cutoff starts and finishes rising
  Scalar ramp_begin() const { return tube_end_ + ramp_width_ / Scalar(4); }
  Scalar ramp_end() const { return tube_end_ + ramp_width_ / Scalar(2); }

  /// h(x) = ell^-4 cos(ell^2 (x - (ell+1))) - ell^-4 + (1 - c)
  Scalar h(Scalar x, int order = 0) const {
    using std::cos;
    using std::sin;
    const Scalar arg = l2_ * (x - center_);
    switch (order) {
      case 0: return cos(arg) / l4_ - Scalar(1) / l4_ + (Scalar(1) - params_.c);
      case 1: return -sin(arg) / l2_;
      default: return -cos(arg);
    }
  }

  /// tangent line of h at x0
  Scalar tangent_line(Scalar x, int order = 0) const {
    switch (order) {
      case 0: return (x - x0_) / l2_ + (Scalar(1) - params_.c) - Scalar(1) / l4_;
      case 1: return Scalar(1) / l2_;
      default: return Scalar(0);
    }
  }

  Scalar htilde(Scalar x, int order = 0) const { return x <= x0_ ? tangent_line(x, order) : h(x, order); }

  Scalar phitilde(Scalar x, int order = 0) const {
    const Scalar s = (x - tube_end_) / ramp_width_;
    Scalar scale = 1;
    for (int i = 0; i < order; ++i) scale /= ramp_width_;
    return scale * ramp_(s, order);
  }

  /// f = phitilde * htilde + c and derivatives, on [(ell+1)c, ell+1]
  Scalar f(Scalar x, int order = 0) const {
    const Scalar a0 = phitilde(x, 0);
    const Scalar b0 = htilde(x, 0);
    if (order == 0) return a0 * b0 + params_.c;
    const Scalar a1 = phitilde(x, 1);
    const Scalar b1 = htilde(x, 1);
    if (order == 1) return a1 * b0 + a0 * b1;
    return phitilde(x, 2) * b0 + Scalar(2) * a1 * b1 + a0 * htilde(x, 2);
  }

  /// y and derivatives for |x| <= ell + 2
  Scalar y(Scalar x, int order = 0) const {
    using std::abs;
    using std::sqrt;
    const Scalar ax = abs(x);
    const Scalar sign = (order == 1 && x < Scalar(0)) ? Scalar(-1) : Scalar(1);
    if (ax <= tube_end_) return order == 0 ? params_.c : Scalar(0);
    if (ax <= center_) return sign * f(ax, order);
    const Scalar d = ax - center_;
    const Scalar q = std::max(Scalar(1) - d * d, Scalar(0));
    switch (order) {
      case 0: return sqrt(q);
      case 1: return sign * (-d / sqrt(q));
      default: return -Scalar(1) / (q * sqrt(q));
    }
  }

  Scalar gradient_factor(Scalar x) const {
    using std::sqrt;
    const Scalar yp = y(x, 1);
    return sqrt(Scalar(1) + yp * yp);
  }

  /// (n-1)/(v y) - y''/v^3 with outward normal
  Scalar mean_curvature(Scalar x) const {
    const Scalar v = gradient_factor(x);
    return Scalar(params_.dimension - 1) / (v * y(x)) - y(x, 2) / (v * v * v);
  }

  /// min H over a uniform grid of the graph part [0, ell + 1]; the sphere caps have H = n.
  Scalar min_mean_curvature(int grid = 20000) const {
    Scalar best = Scalar(params_.dimension);
    for (int i = 0; i <= grid; ++i) best = std::min(best, mean_curvature(center_ * Scalar(i) / Scalar(grid)));
    return best;
  }

  /// max(y v) / min(y v) over [-(ell+1), ell+1], i.e. max p / min p on the initial bridge closure.
  Scalar curvature_ratio(int grid = 20000) const {
    Scalar lo = std::numeric_limits<Scalar>::infinity();
    Scalar hi = 0;
    for (int i = 0; i <= grid; ++i) {
      const Scalar x = center_ * Scalar(i) / Scalar(grid);
      const Scalar w = y(x) * gradient_factor(x);
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    return hi / lo;
  }

  /// Mismatch of one-sided second differences with step `step` at the two junctions
  /// (ell+1)c and ell+1, where the profile changes formula.
  Scalar junction_mismatch(Scalar step) const {
    using std::abs;
    Scalar worst = 0;
    for (const Scalar xj : {tube_end_, center_}) {
      const Scalar left = (y(xj) - Scalar(2) * y(xj - step) + y(xj - Scalar(2) * step)) / (step * step);
      const Scalar right = (y(xj + Scalar(2) * step) - Scalar(2) * y(xj + step) + y(xj)) / (step * step);
      worst = std::max(worst, abs(left - right));
    }
    return worst;
  }

 private:
  TubeSpheresParams<Scalar> params_;
  CutoffRamp<Scalar> ramp_;
  Scalar l2_ = 0, l4_ = 0, center_ = 0, tube_end_ = 0, x0_ = 0, ramp_width_ = 0;
};

template <typename Scalar>
GeneratingCurve<Scalar> make_sphere(Scalar radius, Scalar center_x, Eigen::Index samples, int dimension = 2) {
  using std::cos;
  using std::sin;
  if (!(radius > Scalar(0))) throw Error(ErrorKind::kInvalidParameter, "sphere radius must be positive");
  if (samples < 16) throw Error(ErrorKind::kInvalidParameter, "sample count must be >= 16");
  PointArray<Scalar> p(samples, 2);
  for (Eigen::Index i = 0; i < samples; ++i) {
    // Fill symmetric pairs from the same angle so the profile is mirror-exact.
    const Eigen::Index j = samples - 1 - i;
    if (j < i) break;
    const Scalar th = std::numbers::pi_v<Scalar> * Scalar(i) / Scalar(samples - 1);
    const Scalar dx = radius * cos(th);
    const Scalar r = radius * sin(th);
    p(i, 0) = center_x + dx;
    p(i, 1) = r;
    p(j, 0) = center_x - dx;
    p(j, 1) = r;
    if (i == j) p(i, 0) = center_x;
  }
  p(0, 1) = Scalar(0);
  p(samples - 1, 1) = Scalar(0);
  return GeneratingCurve<Scalar>(std::move(p), dimension);
}

namespace detail {

// Arc of the circle centered at (cx, 0) from polar angle `from` to `to`, excluding `from`.
template <typename Scalar>
void append_arc(std::vector<Point<Scalar>>& out, Scalar cx, Scalar radius, Scalar from, Scalar to, int pieces) {
  using std::cos;
  using std::sin;
  for (int k = 1; k <= pieces; ++k) {
    const Scalar th = from + (to - from) * Scalar(k) / Scalar(pieces);
    out.emplace_back(cx + radius * cos(th), radius * sin(th));
  }
}

}  // namespace detail

/// Surface generated by the graph y over [x_left, x_right]. Dense samples of y are
/// given in increasing x with y = 0 at both ends. Near each end, where the graph
/// steepens, the profile is replaced by the axis-centered circle tangent to it at
/// the last sample with |y'| <= 1.
template <typename Scalar>
GeneratingCurve<Scalar> make_graph_surface(const Eigen::Ref<const Vec<Scalar>>& xs,
                                           const Eigen::Ref<const Vec<Scalar>>& ys, Eigen::Index samples,
                                           int dimension = 2) {
  using Index = Eigen::Index;
  using std::abs;
  using std::atan2;
  using std::sqrt;
  const Index m = xs.size();
  if (m < 5 || ys.size() != m) throw Error(ErrorKind::kInvalidProfile, "need at least 5 matching (x, y) samples");
  for (Index i = 1; i < m; ++i) {
    if (!(xs(i) > xs(i - 1))) throw Error(ErrorKind::kInvalidProfile, "x samples must be strictly increasing");
  }
  if (!xs.allFinite() || !ys.allFinite()) throw Error(ErrorKind::kInvalidProfile, "non-finite profile sample");
  for (Index i = 1; i + 1 < m; ++i) {
    if (!(ys(i) > Scalar(0))) throw Error(ErrorKind::kInvalidProfile, "profile must be positive in the interior");
  }

  Vec<Scalar> slope(m);
  for (Index i = 1; i + 1 < m; ++i) {
    const Scalar hm = xs(i) - xs(i - 1);
    const Scalar hp = xs(i + 1) - xs(i);
    slope(i) = (hm * hm * (ys(i + 1) - ys(i)) + hp * hp * (ys(i) - ys(i - 1))) / (hm * hp * (hm + hp));
  }
  Index first = 1;
  while (first + 1 < m && abs(slope(first)) > Scalar(1)) ++first;
  Index last = m - 2;
  while (last > first && abs(slope(last)) > Scalar(1)) --last;
  if (last - first < 2) throw Error(ErrorKind::kInvalidProfile, "profile too steep to fit end caps");

  auto cap = [&](Index i) {
    const Scalar cx = xs(i) + ys(i) * slope(i);
    const Scalar radius = ys(i) * sqrt(Scalar(1) + slope(i) * slope(i));
    const Scalar angle = atan2(ys(i), xs(i) - cx);
    return std::array<Scalar, 3>{cx, radius, angle};
  };
  const auto right = cap(last);
  const auto left = cap(first);
  const Scalar spacing = (xs(last) - xs(first)) / Scalar(last - first);
  auto pieces = [&](Scalar radius, Scalar sweep) { return std::max(8, int(std::ceil(radius * sweep / spacing))); };

  std::vector<Point<Scalar>> pts;
  pts.emplace_back(right[0] + right[1], Scalar(0));
  detail::append_arc<Scalar>(pts, right[0], right[1], Scalar(0), right[2], pieces(right[1], right[2]));
  pts.pop_back();  // the junction sample itself comes from the graph
  for (Index i = last; i >= first; --i) pts.emplace_back(xs(i), ys(i));
  const Scalar pi = std::numbers::pi_v<Scalar>;
  detail::append_arc<Scalar>(pts, left[0], left[1], left[2], pi, pieces(left[1], pi - left[2]));
  pts.back() = Point<Scalar>(left[0] - left[1], Scalar(0));

  PointArray<Scalar> poly(Index(pts.size()), 2);
  for (Index i = 0; i < poly.rows(); ++i) poly.row(i) = pts[std::size_t(i)].transpose();
  GeneratingCurve<Scalar> dense;
  try {
    dense = GeneratingCurve<Scalar>(std::move(poly), dimension);
  } catch (const Error& e) {
    throw Error(ErrorKind::kNotAGraph, std::string("capped profile is not a valid generating curve: ") + e.what());
  }
  if (!is_simple(dense)) throw Error(ErrorKind::kNotAGraph, "capped profile self-intersects");
  auto curve = resample_uniform(dense, samples);
  const auto geom = pointwise_geometry(curve);
  if (!(geom.embeddedness_margin() > Scalar(0))) {
    throw Error(ErrorKind::kNotAGraph, "normal turns away from the axis direction somewhere on the profile");
  }
  return curve;
}

/// Samples the tube-spheres profile at uniform arc length. The right half is computed
/// and mirrored, so the output is exactly symmetric under x -> -x.
template <typename Scalar>
GeneratingCurve<Scalar> make_tube_spheres(const TubeSpheresParams<Scalar>& params) {
  using Index = Eigen::Index;
  using Gauss = boost::math::quadrature::gauss<Scalar, 7>;
  using std::cos;
  using std::sin;
  const TubeSpheresProfile<Scalar> prof(params);
  const Scalar a = prof.tube_end();
  const Scalar b = prof.sphere_center();

  if (prof.tangent_line(a) < Scalar(0)) {
    throw Error(ErrorKind::kConstructionFailed, "tangent line is negative at the tube end; increase ell");
  }
  if (prof.tangent_point() < prof.ramp_end()) {
    throw Error(ErrorKind::kConstructionFailed, "cosine section starts inside the cutoff ramp; increase ell");
  }
  const Scalar hmin = prof.min_mean_curvature();
  if (!(hmin > Scalar(0))) {
    throw Error(ErrorKind::kConstructionFailed,
                "profile is not mean convex (min H = " + std::to_string(double(hmin)) + "); increase ell");
  }

  // Arc-length table for the graph section [a, b], with breakpoints at every
  // abscissa where y'' changes formula.
  auto speed = [&](Scalar x) { return prof.gradient_factor(x); };
  std::vector<Scalar> breaks = {a, prof.ramp_begin(), prof.ramp_end(), prof.tangent_point(), b};
  constexpr int kPiecesPerSection = 1024;
  std::vector<Scalar> tx;
  std::vector<Scalar> ts;
  tx.push_back(a);
  ts.push_back(a);  // the flat tube [0, a] has arc length a
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    for (int j = 1; j <= kPiecesPerSection; ++j) {
      const Scalar x1 = breaks[k] + (breaks[k + 1] - breaks[k]) * Scalar(j) / Scalar(kPiecesPerSection);
      ts.push_back(ts.back() + Gauss::integrate(speed, tx.back(), x1));
      tx.push_back(x1);
    }
  }
  const Scalar graph_len = ts.back();
  const Scalar half_len = graph_len + std::numbers::pi_v<Scalar> / Scalar(2);

  // point at arc length s >= 0 measured from the tube midpoint
  auto point_at = [&](Scalar s) -> Point<Scalar> {
    if (s <= a) return Point<Scalar>(s, params.c);
    if (s < graph_len) {
      const auto it = std::upper_bound(ts.begin(), ts.end(), s);
      const std::size_t j = std::size_t(it - ts.begin()) - 1;
      const Scalar x0 = tx[j];
      const Scalar x1 = tx[std::min(j + 1, tx.size() - 1)];
      Scalar x = x0 + (s - ts[j]) / speed(x0);
      for (int it_n = 0; it_n < 6; ++it_n) {
        x = std::clamp(x - (ts[j] + Gauss::integrate(speed, x0, x) - s) / speed(x), x0, x1);
      }
      return Point<Scalar>(x, prof.y(x));
    }
    const Scalar alpha = std::min(s - graph_len, std::numbers::pi_v<Scalar> / Scalar(2));
    return Point<Scalar>(b + sin(alpha), cos(alpha));
  };

  const Index m = params.samples;
  const Scalar total = Scalar(2) * half_len;
  PointArray<Scalar> pts(m, 2);
  for (Index i = 0; 2 * i <= m - 1; ++i) {
    const Index j = m - 1 - i;
    const Scalar s = half_len - total * Scalar(i) / Scalar(m - 1);
    Point<Scalar> q = i == 0 ? Point<Scalar>(b + Scalar(1), Scalar(0)) : point_at(s);
    if (i == j) q.x() = Scalar(0);
    pts.row(i) = q.transpose();
    pts(j, 0) = -q.x();
    pts(j, 1) = q.y();
  }

  // The cosine section is only pi / (2 ell^2) wide, so the stencil uses a step much
  // finer than the sampling; the acceptance tolerance stays tied to ds.
  const Scalar ds = total / Scalar(m - 1);
  const Scalar mismatch = prof.junction_mismatch(ds / Scalar(64));
  if (!(mismatch < Scalar(10) * ds)) {
    throw Error(ErrorKind::kConstructionFailed,
                "second-derivative mismatch " + std::to_string(double(mismatch)) + " at a junction");
  }
  return GeneratingCurve<Scalar>(std::move(pts), params.dimension);
}

template <typename Scalar>
struct AdmissibilityReport {
  Scalar ratio = 1;      // max p / min p over the closure of the initial bridge
  Scalar threshold = 0;  // n^{n / (2(n-1))}
  Scalar min_H = 0;
  Scalar embeddedness_margin = 0;
  bool bridge_empty = true;
  bool admissible = false;
  bool star_shaped = false;
  std::optional<Scalar> star_center;
};

template <typename Scalar>
Scalar admissibility_threshold(int n) {
  using std::pow;
  return pow(Scalar(n), Scalar(n) / (Scalar(2) * Scalar(n - 1)));
}

template <typename Scalar>
AdmissibilityReport<Scalar> check_admissible(const GeneratingCurve<Scalar>& curve) {
  const auto geom = pointwise_geometry(curve);
  const auto regions = decompose_regions(geom);
  AdmissibilityReport<Scalar> rep;
  rep.threshold = admissibility_threshold<Scalar>(curve.dimension());
  rep.min_H = geom.min_H();
  rep.embeddedness_margin = geom.embeddedness_margin();
  rep.bridge_empty = regions.bridge_empty();
  if (!rep.bridge_empty) {
    const auto closure = geom.p.segment(regions.right_end, regions.left_begin - regions.right_end + 1);
    rep.ratio = closure.maxCoeff() / closure.minCoeff();
  }
  rep.admissible = rep.ratio < rep.threshold && rep.min_H > Scalar(0) && rep.embeddedness_margin > Scalar(0);
  rep.star_center = star_center_exists(geom);
  rep.star_shaped = rep.star_center.has_value();
  return rep;
}

}  // namespace imcf
