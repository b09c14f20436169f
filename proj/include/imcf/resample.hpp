#pragma once

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "imcf/curve.hpp"
#include "imcf/spline.hpp"

namespace imcf {

/// Cubic-spline reparametrization of the profile at `target` points equally spaced in
/// arc length. The data are reflected across both poles ((x, r) -> (x, -r)) before
/// fitting, so the spline sees the smooth closed profile rather than a natural end.
template <typename Scalar>
GeneratingCurve<Scalar> resample_uniform(const GeneratingCurve<Scalar>& curve, Eigen::Index target) {
  using Index = Eigen::Index;
  using std::hypot;
  using Gauss = boost::math::quadrature::gauss<Scalar, 7>;

  if (target < 16) throw Error(ErrorKind::kPrecondition, "resample target must be >= 16");
  const Index m = curve.size();
  const Vec<Scalar> h = curve.chord_lengths();
  const Scalar total_chord = h.sum();
  if (!(total_chord >= Scalar(1e-12))) throw Error(ErrorKind::kDegenerateInput, "curve length below 1e-12");

  const Index ghosts = std::min<Index>(8, m - 1);
  const Index ext = m + 2 * ghosts;
  Vec<Scalar> s(ext), xs(ext), rs(ext);
  for (Index i = 0; i < m; ++i) {
    s(ghosts + i) = i == 0 ? Scalar(0) : s(ghosts + i - 1) + h(i - 1);
    xs(ghosts + i) = curve.x()(i);
    rs(ghosts + i) = curve.r()(i);
  }
  for (Index g = 1; g <= ghosts; ++g) {
    s(ghosts - g) = -s(ghosts + g);
    xs(ghosts - g) = curve.x()(g);
    rs(ghosts - g) = -curve.r()(g);
    const Index last = ghosts + m - 1;
    s(last + g) = Scalar(2) * s(last) - s(last - g);
    xs(last + g) = curve.x()(m - 1 - g);
    rs(last + g) = -curve.r()(m - 1 - g);
  }
  for (Index i = 1; i < ext; ++i) {
    if (!(s(i) > s(i - 1))) throw Error(ErrorKind::kDegenerateInput, "repeated sample in curve");
  }

  const CubicSpline<Scalar> sx(s, xs);
  const CubicSpline<Scalar> sr(s, rs);
  auto speed_on = [&](Index j) {
    return [&, j](Scalar q) { return hypot(sx.eval(j, q, 1), sr.eval(j, q, 1)); };
  };

  // Arc length of the spline over each real interval.
  Vec<Scalar> arc(m);
  arc(0) = Scalar(0);
  for (Index j = 0; j + 1 < m; ++j) {
    const Index e = ghosts + j;
    arc(j + 1) = arc(j) + Gauss::integrate(speed_on(e), s(e), s(e + 1));
  }
  const Scalar total = arc(m - 1);

  PointArray<Scalar> out(target, 2);
  out.row(0) = curve.points().row(0);
  out.row(target - 1) = curve.points().row(m - 1);
  Index j = 0;
  for (Index k = 1; k + 1 < target; ++k) {
    const Scalar want = total * Scalar(k) / Scalar(target - 1);
    while (j + 2 < m && arc(j + 1) < want) ++j;
    const Index e = ghosts + j;
    const Scalar s0 = s(e);
    const Scalar s1 = s(e + 1);
    const Scalar seg = arc(j + 1) - arc(j);
    Scalar q = s0 + (s1 - s0) * std::clamp((want - arc(j)) / seg, Scalar(0), Scalar(1));
    const auto speed = speed_on(e);
    for (int it = 0; it < 4; ++it) {
      const Scalar f = arc(j) + Gauss::integrate(speed, s0, q) - want;
      q = std::clamp(q - f / speed(q), s0, s1);
    }
    out(k, 0) = sx.eval(e, q, 0);
    out(k, 1) = std::max(sr.eval(e, q, 0), Scalar(0));
  }
  out(0, 1) = Scalar(0);
  out(target - 1, 1) = Scalar(0);
  return GeneratingCurve<Scalar>(std::move(out), curve.dimension());
}

}  // namespace imcf
