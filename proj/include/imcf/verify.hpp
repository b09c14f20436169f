#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "imcf/flow.hpp"
#include "imcf/geometry.hpp"
#include "imcf/initial_data.hpp"

namespace imcf {

/// kNotApplicable: the estimate's setting is absent (no bridge, no second trajectory).
/// kSkipped: the trajectory is too short or too coarse to decide.
enum class CheckStatus { kPass, kFail, kSkipped, kNotApplicable };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass: return "pass";
    case CheckStatus::kFail: return "fail";
    case CheckStatus::kSkipped: return "skipped";
    case CheckStatus::kNotApplicable: return "not_applicable";
  }
  return "unknown";
}

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::kSkipped;
  double margin = std::numeric_limits<double>::quiet_NaN();
  double t_worst = std::numeric_limits<double>::quiet_NaN();
  long i_worst = -1;
  std::string reason;
  std::map<std::string, double> details;

  bool passed() const { return status == CheckStatus::kPass; }
};

struct EstimateReport {
  std::vector<CheckResult> checks;

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }

  /// 0 all decided checks pass, 2 any failure, 3 only skips besides passes.
  int exit_code() const {
    bool skipped = false;
    for (const auto& c : checks) {
      if (c.status == CheckStatus::kFail) return 2;
      skipped = skipped || c.status == CheckStatus::kSkipped;
    }
    return skipped ? 3 : 0;
  }
};

struct VerifyConfig {
  double bound_tol = 1e-3;        // width/height, relative to the initial scale
  double boundary_rel = 1e-2;     // boundary speed
  double envelope_rel = 1e-3;     // rotational curvature envelope
  double monotone_rel = 1e-3;     // ratio monotonicity, per snapshot
  double area_rel = 1e-2;
  double avoidance_slack = 1e-6;  // times scale, per snapshot
  double witness_rel = 1e-3;
  int witness_band = 2;           // samples from the cap boundary
  double min_order = 1.5;
  double residual_floor = 1e-9;   // relative residual treated as exact
};

/// Geometry of every snapshot, computed once and shared by the checks.
template <typename Scalar>
struct TrajectoryView {
  std::vector<Scalar> t;
  std::vector<const GeneratingCurve<Scalar>*> curves;
  std::vector<GeometrySamples<Scalar>> geom;
  std::vector<RegionDecomposition<Scalar>> regions;
  int n = 2;

  /// Snapshots are split across `threads` workers; each result slot is written by
  /// exactly one worker, so the view does not depend on the thread count.
  explicit TrajectoryView(const Trajectory<Scalar>& traj, int threads = 1) {
    const std::size_t count = traj.snapshots.size();
    geom.resize(count);
    regions.resize(count);
    for (const auto& s : traj.snapshots) {
      t.push_back(s.t);
      curves.push_back(&s.curve);
    }
    auto work = [&](std::size_t begin, std::size_t stride) {
      for (std::size_t k = begin; k < count; k += stride) {
        geom[k] = pointwise_geometry(*curves[k]);
        regions[k] = decompose_regions(geom[k]);
      }
    };
    const std::size_t workers = std::clamp<std::size_t>(std::size_t(std::max(threads, 1)), 1, std::max<std::size_t>(count, 1));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, w, workers);
    work(0, workers);
    for (auto& th : pool) th.join();
    if (!curves.empty()) n = curves.front()->dimension();
  }

  std::size_t size() const { return t.size(); }
  Scalar max_radius0() const { return geom.front().position.rowwise().norm().maxCoeff(); }
  Scalar max_u0() const { return geom.front().u.maxCoeff(); }
};

namespace detail {

inline CheckResult skipped(std::string name, std::string reason, CheckStatus status = CheckStatus::kSkipped) {
  CheckResult r;
  r.name = std::move(name);
  r.status = status;
  r.reason = std::move(reason);
  return r;
}

// Tracks the smallest margin seen and where it happened.
struct WorstMargin {
  double margin = std::numeric_limits<double>::infinity();
  double t = std::numeric_limits<double>::quiet_NaN();
  long i = -1;

  void update(double m, double time, long index) {
    if (m < margin) {
      margin = m;
      t = time;
      i = index;
    }
  }

  CheckResult finish(std::string name, double pass_above) const {
    CheckResult r;
    r.name = std::move(name);
    r.margin = margin;
    r.t_worst = t;
    r.i_worst = i;
    r.status = margin >= pass_above ? CheckStatus::kPass : CheckStatus::kFail;
    return r;
  }
};

template <typename Scalar>
Scalar interpolate_at_crossing(const GeometrySamples<Scalar>& g, const Vec<Scalar>& q, Eigen::Index i, Eigen::Index j) {
  const Scalar fi = g.normal(i, 0);
  const Scalar fj = g.normal(j, 0);
  const Scalar w = fi == fj ? Scalar(0) : fi / (fi - fj);
  return q(i) + w * (q(j) - q(i));
}

}  // namespace detail

/// |utilde| <= max_{N_0}|F| e^{t/n} and u <= max_{N_0} u e^{t/(n-1)}.
template <typename Scalar>
std::vector<CheckResult> check_height_width(const TrajectoryView<Scalar>& view, const VerifyConfig& cfg = {}) {
  using std::exp;
  if (view.size() < 2) {
    return {detail::skipped("width_bound", "needs at least 2 snapshots"),
            detail::skipped("height_bound", "needs at least 2 snapshots")};
  }
  const int n = view.n;
  const Scalar rad0 = view.max_radius0();
  const Scalar u0 = view.max_u0();
  detail::WorstMargin width, height;
  for (std::size_t k = 0; k < view.size(); ++k) {
    const auto& g = view.geom[k];
    Eigen::Index iw, ih;
    const Scalar w = g.utilde.cwiseAbs().maxCoeff(&iw);
    const Scalar h = g.u.maxCoeff(&ih);
    width.update(double((rad0 * exp(view.t[k] / Scalar(n)) - w) / rad0), double(view.t[k]), long(iw));
    height.update(double((u0 * exp(view.t[k] / Scalar(n - 1)) - h) / u0), double(view.t[k]), long(ih));
  }
  auto w = width.finish("width_bound", -cfg.bound_tol);
  auto h = height.finish("height_bound", -cfg.bound_tol);
  w.details["max_radius0"] = double(rad0);
  h.details["max_u0"] = double(u0);
  return {w, h};
}

/// H at the cap boundaries >= (n-1) e^{-t/(n-1)} / max_{N_0} u.
template <typename Scalar>
CheckResult check_boundary_speed(const TrajectoryView<Scalar>& view, const VerifyConfig& cfg = {}) {
  using std::exp;
  if (view.size() < 1) return detail::skipped("boundary_speed", "empty trajectory");
  const int n = view.n;
  const Scalar u0 = view.max_u0();
  detail::WorstMargin worst;
  int used = 0;
  for (std::size_t k = 0; k < view.size(); ++k) {
    const auto& rd = view.regions[k];
    if (rd.bridge_empty()) continue;
    ++used;
    const auto& g = view.geom[k];
    const Scalar bound = Scalar(n - 1) * exp(-view.t[k] / Scalar(n - 1)) / u0;
    const Scalar hb = detail::interpolate_at_crossing(g, g.H, rd.right_end, rd.right_end + 1);
    const Scalar ha = detail::interpolate_at_crossing(g, g.H, rd.left_begin - 1, rd.left_begin);
    worst.update(double(hb / bound - 1), double(view.t[k]), long(rd.right_end));
    worst.update(double(ha / bound - 1), double(view.t[k]), long(rd.left_begin));
  }
  if (used == 0) return detail::skipped("boundary_speed", "bridge empty at every snapshot", CheckStatus::kNotApplicable);
  auto r = worst.finish("boundary_speed", -cfg.boundary_rel);
  r.details["snapshots_with_bridge"] = used;
  return r;
}

/// Envelope e^{-t/(n-1)} [min, max]_{closure L_0} p on the bridge, and monotone max p / min p.
template <typename Scalar>
std::vector<CheckResult> check_rotational_envelope(const TrajectoryView<Scalar>& view, const VerifyConfig& cfg = {}) {
  using std::exp;
  if (view.size() < 1 || view.regions.front().bridge_empty()) {
    return {detail::skipped("rot_envelope", "initial bridge empty", CheckStatus::kNotApplicable),
            detail::skipped("ratio_monotone", "initial bridge empty", CheckStatus::kNotApplicable)};
  }
  const int n = view.n;
  auto closure = [&](std::size_t k) {
    const auto& rd = view.regions[k];
    return view.geom[k].p.segment(rd.right_end, rd.left_begin - rd.right_end + 1);
  };
  const Scalar pmin0 = closure(0).minCoeff();
  const Scalar pmax0 = closure(0).maxCoeff();

  detail::WorstMargin env, mono;
  Scalar prev_ratio = std::numeric_limits<Scalar>::quiet_NaN();
  int used = 0;
  for (std::size_t k = 0; k < view.size(); ++k) {
    const auto& rd = view.regions[k];
    if (rd.bridge_empty()) continue;
    ++used;
    const Scalar decay = exp(-view.t[k] / Scalar(n - 1));
    const auto& p = view.geom[k].p;
    for (Eigen::Index i = rd.bridge_begin(); i <= rd.bridge_end(); ++i) {
      const Scalar m = std::min(p(i) / (decay * pmin0) - 1, 1 - p(i) / (decay * pmax0));
      env.update(double(m), double(view.t[k]), long(i));
    }
    const auto cl = closure(k);
    const Scalar ratio = cl.maxCoeff() / cl.minCoeff();
    if (std::isfinite(prev_ratio)) mono.update(double(1 - ratio / prev_ratio), double(view.t[k]), -1);
    prev_ratio = ratio;
  }
  auto e = env.finish("rot_envelope", -cfg.envelope_rel);
  e.details["p_min0"] = double(pmin0);
  e.details["p_max0"] = double(pmax0);
  CheckResult m = used < 2 ? detail::skipped("ratio_monotone", "fewer than 2 snapshots with a bridge")
                           : mono.finish("ratio_monotone", -cfg.monotone_rel);
  m.details["ratio0"] = double(pmax0 / pmin0);
  return {e, m};
}

/// max_L v < sqrt(n); also reports the speed monitor g = phi(v)/H with phi(v) = v/(1 - lambda v).
template <typename Scalar>
CheckResult check_bridge_gradient(const TrajectoryView<Scalar>& view,
                                  const VerifyConfig& cfg = {}) {
  using std::sqrt;
  (void)cfg;
  const Scalar bound = sqrt(Scalar(view.n));
  detail::WorstMargin worst;
  Scalar vmax_all = 0;
  int used = 0;
  for (std::size_t k = 0; k < view.size(); ++k) {
    const auto& rd = view.regions[k];
    if (rd.bridge_empty()) continue;
    const auto& g = view.geom[k];
    for (Eigen::Index i = rd.bridge_begin(); i <= rd.bridge_end(); ++i) {
      if (!g.v_defined(i)) continue;
      ++used;
      vmax_all = std::max(vmax_all, g.v(i));
      worst.update(double(bound - g.v(i)), double(view.t[k]), long(i));
    }
  }
  if (used == 0) return detail::skipped("bridge_gradient", "bridge empty at every snapshot", CheckStatus::kNotApplicable);
  auto r = worst.finish("bridge_gradient", 0.0);
  if (r.margin <= 0) r.status = CheckStatus::kFail;

  if (vmax_all > Scalar(0) && vmax_all < bound) {
    const Scalar lambda = (Scalar(1) / bound + Scalar(1) / vmax_all) / Scalar(2);
    Scalar gmax = 0;
    for (std::size_t k = 0; k < view.size(); ++k) {
      const auto& rd = view.regions[k];
      if (rd.bridge_empty()) continue;
      const auto& g = view.geom[k];
      for (Eigen::Index i = rd.bridge_begin(); i <= rd.bridge_end(); ++i) {
        if (!g.v_defined(i)) continue;
        gmax = std::max(gmax, g.v(i) / ((Scalar(1) - lambda * g.v(i)) * g.H(i)));
      }
    }
    r.details["lambda"] = double(lambda);
    r.details["sup_speed_monitor"] = double(gmax);
  }
  r.details["max_v"] = double(vmax_all);
  return r;
}

template <typename Scalar>
CheckResult check_embeddedness(const TrajectoryView<Scalar>& view) {
  detail::WorstMargin worst;
  for (std::size_t k = 0; k < view.size(); ++k) {
    const auto& nr = view.geom[k].normal.col(1);
    for (Eigen::Index i = 1; i + 1 < nr.size(); ++i) worst.update(double(nr(i)), double(view.t[k]), long(i));
  }
  if (view.size() == 0) return detail::skipped("embeddedness", "empty trajectory");
  auto r = worst.finish("embeddedness", 0.0);
  if (r.margin <= 0) r.status = CheckStatus::kFail;
  return r;
}

template <typename Scalar>
CheckResult check_critical_count(const TrajectoryView<Scalar>& view) {
  if (view.size() < 2) return detail::skipped("critical_count", "needs at least 2 snapshots");
  detail::WorstMargin worst;
  int prev = critical_count(view.geom[0]);
  const int first = prev;
  for (std::size_t k = 1; k < view.size(); ++k) {
    const int c = critical_count(view.geom[k]);
    worst.update(double(prev - c), double(view.t[k]), c);
    prev = c;
  }
  auto r = worst.finish("critical_count", 0.0);
  r.details["initial"] = first;
  r.details["final"] = prev;
  return r;
}

/// area(t) / area(0) = e^t
template <typename Scalar>
CheckResult check_area_growth(const TrajectoryView<Scalar>& view, const VerifyConfig& cfg = {}) {
  using std::abs;
  using std::exp;
  if (view.size() < 2) return detail::skipped("area_growth", "needs at least 2 snapshots");
  const Scalar a0 = area(*view.curves[0]);
  detail::WorstMargin worst;
  for (std::size_t k = 0; k < view.size(); ++k) {
    const Scalar rel = area(*view.curves[k]) / (a0 * exp(view.t[k])) - 1;
    worst.update(cfg.area_rel - double(abs(rel)), double(view.t[k]), -1);
  }
  return worst.finish("area_growth", 0.0);
}

/// Star-shaped for every snapshot at or after t* = n log(diam / R).
template <typename Scalar>
CheckResult check_star_time(const TrajectoryView<Scalar>& view) {
  using std::log;
  if (view.size() < 2) return detail::skipped("star_time", "needs at least 2 snapshots");
  const Scalar diam = diameter(*view.curves[0]);
  const Scalar rad = inradius(*view.curves[0]).radius;
  const Scalar tstar = Scalar(view.n) * log(diam / rad);
  std::vector<bool> star(view.size());
  for (std::size_t k = 0; k < view.size(); ++k) star[k] = star_center_exists(view.geom[k]).has_value();

  double first = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < view.size(); ++k) {
    if (star[k]) {
      first = double(view.t[k]);
      break;
    }
  }
  CheckResult r;
  r.name = "star_time";
  r.details["t_star"] = double(tstar);
  r.details["diameter0"] = double(diam);
  r.details["inradius0"] = double(rad);
  r.details["first_star_time"] = first;
  const Scalar t_eps = Scalar(1e-9) * (Scalar(1) + tstar);
  if (view.t.back() < tstar - t_eps) {
    // The conclusion concerns t >= t*; a run that ends earlier can only confirm
    // star-shapedness that has already set in.
    if (!star.back()) {
      r.status = CheckStatus::kSkipped;
      r.reason = "trajectory ends before t* without becoming star-shaped";
      return r;
    }
    r.reason = "t* not reached; final snapshot already star-shaped";
  }
  r.status = CheckStatus::kPass;
  r.margin = std::isnan(first) ? -1.0 : double(tstar) - first;
  for (std::size_t k = 0; k < view.size(); ++k) {
    if (view.t[k] >= tstar - t_eps && !star[k]) {
      r.status = CheckStatus::kFail;
      r.t_worst = double(view.t[k]);
      break;
    }
  }
  if (r.status == CheckStatus::kPass && !(r.margin >= 0)) r.status = CheckStatus::kFail;
  return r;
}

/// theta_+ = <F + x0, nu> > 0 on the right cap and theta_- = <F - x0, nu> > 0 on the
/// left cap, x0 = max_{N_0}|F| e^{T/n} e1. Also reports sup 1/H over the caps.
template <typename Scalar>
CheckResult check_support_positive(const TrajectoryView<Scalar>& view) {
  using std::exp;
  if (view.size() == 0) return detail::skipped("support_positive", "empty trajectory");
  const Scalar x0 = view.max_radius0() * exp(view.t.back() / Scalar(view.n));
  detail::WorstMargin worst;
  Scalar inv_h = 0;
  for (std::size_t k = 0; k < view.size(); ++k) {
    const auto& g = view.geom[k];
    const auto& rd = view.regions[k];
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const bool right = rd.in_right_cap(i);
      const bool left = rd.in_left_cap(i);
      if (!right && !left) continue;
      const Scalar shift = right ? x0 : -x0;
      const Scalar theta = (g.position(i, 0) + shift) * g.normal(i, 0) + g.position(i, 1) * g.normal(i, 1);
      worst.update(double(theta / x0), double(view.t[k]), long(i));
      inv_h = std::max(inv_h, Scalar(1) / g.H(i));
    }
  }
  auto r = worst.finish("support_positive", 0.0);
  if (r.margin <= 0) r.status = CheckStatus::kFail;
  r.details["x0"] = double(x0);
  r.details["sup_inv_H_caps"] = double(inv_h);
  return r;
}

/// Extremes of f = e^{-t/(n-1)} u v over the spacetime bridge sit on its reduced
/// parabolic boundary: the initial slice or the cap boundaries.
template <typename Scalar>
CheckResult check_max_principle_witness(const TrajectoryView<Scalar>& view, const VerifyConfig& cfg = {}) {
  using std::abs;
  using std::exp;
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  struct Extreme {
    Scalar value;
    double t = 0;
    long i = -1;
  };
  Extreme bmax{-inf}, bmin{inf}, imax{-inf}, imin{inf};
  int used = 0;
  for (std::size_t k = 0; k < view.size(); ++k) {
    const auto& rd = view.regions[k];
    if (rd.bridge_empty()) continue;
    const auto& g = view.geom[k];
    const Scalar decay = exp(-view.t[k] / Scalar(view.n - 1));
    for (Eigen::Index i = rd.bridge_begin(); i <= rd.bridge_end(); ++i) {
      if (!g.v_defined(i)) continue;
      ++used;
      const Scalar f = decay * g.u(i) * g.v(i);
      const bool boundary = k == 0 || i - rd.bridge_begin() < cfg.witness_band || rd.bridge_end() - i < cfg.witness_band;
      Extreme& hi = boundary ? bmax : imax;
      Extreme& lo = boundary ? bmin : imin;
      if (f > hi.value) hi = {f, double(view.t[k]), long(i)};
      if (f < lo.value) lo = {f, double(view.t[k]), long(i)};
    }
  }
  if (used == 0) {
    return detail::skipped("maxprin_witness", "bridge empty at every snapshot", CheckStatus::kNotApplicable);
  }
  CheckResult r;
  r.name = "maxprin_witness";
  const double sup_margin = std::isfinite(double(imax.value)) ? double((bmax.value - imax.value) / abs(bmax.value)) : 1.0;
  const double inf_margin = std::isfinite(double(imin.value)) ? double((imin.value - bmin.value) / abs(bmin.value)) : 1.0;
  r.margin = std::min(sup_margin, inf_margin);
  const Extreme& w = sup_margin <= inf_margin ? (imax.i >= 0 ? imax : bmax) : (imin.i >= 0 ? imin : bmin);
  r.t_worst = w.t;
  r.i_worst = w.i;
  r.status = r.margin >= -cfg.witness_rel ? CheckStatus::kPass : CheckStatus::kFail;
  r.details["sup_f"] = double(std::max(bmax.value, imax.value));
  r.details["inf_f"] = double(std::min(bmin.value, imin.value));
  r.details["t_sup"] = bmax.value >= imax.value ? bmax.t : imax.t;
  r.details["t_inf"] = bmin.value <= imin.value ? bmin.t : imin.t;
  r.details["sup_margin"] = sup_margin;
  r.details["inf_margin"] = inf_margin;
  return r;
}

/// Containment of the initial surfaces, then nondecreasing distance at shared times.
template <typename Scalar>
CheckResult check_avoidance(const Trajectory<Scalar>& a, const Trajectory<Scalar>& b, const VerifyConfig& cfg = {}) {
  using std::abs;
  if (a.snapshots.empty() || b.snapshots.empty()) throw Error(ErrorKind::kPrecondition, "avoidance needs two nonempty trajectories");
  const auto& ca = a.snapshots.front().curve;
  const auto& cb = b.snapshots.front().curve;
  if (!strictly_contains(cb, ca) && !strictly_contains(ca, cb)) {
    throw Error(ErrorKind::kPrecondition, "initial surfaces are not strictly nested");
  }
  const Scalar scale = std::max(diameter(ca), diameter(cb)) / Scalar(2);
  detail::WorstMargin worst;
  Scalar prev = -1;
  std::size_t j = 0;
  int pairs = 0;
  Scalar d0 = 0, dl = 0;
  for (const auto& sa : a.snapshots) {
    while (j < b.snapshots.size() && b.snapshots[j].t < sa.t - Scalar(1e-9)) ++j;
    if (j == b.snapshots.size()) break;
    if (abs(b.snapshots[j].t - sa.t) > Scalar(1e-9)) continue;
    const Scalar d = curve_distance(sa.curve, b.snapshots[j].curve);
    if (pairs == 0) d0 = d;
    dl = d;
    if (prev >= Scalar(0)) worst.update(double((d - prev) / scale), double(sa.t), -1);
    prev = d;
    ++pairs;
  }
  if (pairs < 2) return detail::skipped("avoidance", "fewer than 2 snapshot times in common");
  auto r = worst.finish("avoidance", -cfg.avoidance_slack);
  r.details["distance0"] = double(d0);
  r.details["distance_final"] = double(dl);
  r.details["pairs"] = pairs;
  return r;
}

/// Relative max-norm residuals of the evolution equations for u, v and 1/H on the
/// middle state of a probe. Samples with <nu, w> >= 1/2 away from the poles are used.
template <typename Scalar>
struct ProbeResiduals {
  Scalar t = 0;
  Scalar u = 0;
  Scalar v = 0;
  Scalar inv_H = 0;
  Eigen::Index samples = 0;
};

template <typename Scalar>
ProbeResiduals<Scalar> probe_residuals(const Probe<Scalar>& probe) {
  using std::abs;
  const auto g0 = pointwise_geometry(probe.states[0]);
  const auto g1 = pointwise_geometry(probe.states[1]);
  const auto g2 = pointwise_geometry(probe.states[2]);
  const auto& c1 = probe.states[1];
  const int n = c1.dimension();
  const Eigen::Index m = c1.size();
  const Scalar two_dt = Scalar(2) * probe.dt;

  auto raw_v = [](const GeometrySamples<Scalar>& g) {
    return Vec<Scalar>(g.normal.col(1).cwiseInverse());
  };
  const Vec<Scalar> v0 = raw_v(g0), v1 = raw_v(g1), v2 = raw_v(g2);
  const Vec<Scalar> ih0 = g0.H.cwiseInverse(), ih1 = g1.H.cwiseInverse(), ih2 = g2.H.cwiseInverse();

  const Vec<Scalar> lap_u = surface_laplacian<Scalar>(c1, g1.u);
  const Vec<Scalar> lap_v = surface_laplacian<Scalar>(c1, v1);
  const Vec<Scalar> lap_ih = surface_laplacian<Scalar>(c1, ih1);
  const Vec<Scalar> vs = arc_derivative<Scalar>(c1, v1);

  Scalar ru = 0, rv = 0, rh = 0, su = 0, sv = 0, sh = 0;
  ProbeResiduals<Scalar> out;
  out.t = probe.t + probe.dt;
  for (Eigen::Index i = kPoleExclusion + 1; i + kPoleExclusion + 1 < m; ++i) {
    if (!(g1.normal(i, 1) >= Scalar(0.5))) continue;
    ++out.samples;
    const Scalar H = g1.H(i);
    const Scalar H2 = H * H;
    const Scalar p = g1.p(i);
    const Scalar u = g1.u(i);
    const Scalar v = v1(i);
    const Scalar A2 = g1.A2(i);
    const Scalar q = Scalar(n - 1) * p * p / H2;

    const Scalar dtu = (g2.u(i) - g0.u(i)) / two_dt;
    const Scalar du = lap_u(i) / H2;
    const Scalar rhs_u = Scalar(2) * p / H * u - q * v * v * u;
    ru = std::max(ru, abs(dtu - du - rhs_u));
    su = std::max({su, abs(dtu), abs(du)});

    const Scalar dtv = (v2(i) - v0(i)) / two_dt;
    const Scalar dv = lap_v(i) / H2;
    const Scalar rhs_v = -A2 / H2 * v + q * v * v * v - Scalar(2) * vs(i) * vs(i) / (H2 * v);
    rv = std::max(rv, abs(dtv - dv - rhs_v));
    sv = std::max({sv, abs(dtv), abs(dv)});

    const Scalar dth = (ih2(i) - ih0(i)) / two_dt;
    const Scalar dh = lap_ih(i) / H2;
    const Scalar rhs_h = A2 / H2 * ih1(i);
    rh = std::max(rh, abs(dth - dh - rhs_h));
    sh = std::max({sh, abs(dth), abs(dh)});
  }
  out.u = su > 0 ? ru / su : ru;
  out.v = sv > 0 ? rv / sv : rv;
  out.inv_H = sh > 0 ? rh / sh : rh;
  return out;
}

/// Residual norms on `traj`, with observed orders against `refined` (twice the samples).
template <typename Scalar>
CheckResult check_residuals(const Trajectory<Scalar>& traj, const Trajectory<Scalar>* refined,
                            const VerifyConfig& cfg = {}) {
  using std::abs;
  using std::log2;
  if (traj.probes.empty()) return detail::skipped("residuals", "trajectory has no probe states");
  const auto coarse = probe_residuals(traj.probes.front());
  CheckResult r;
  r.name = "residuals";
  r.t_worst = double(coarse.t);
  r.details["u"] = double(coarse.u);
  r.details["v"] = double(coarse.v);
  r.details["inv_H"] = double(coarse.inv_H);
  r.details["samples"] = double(coarse.samples);
  if (refined == nullptr) {
    r.status = CheckStatus::kNotApplicable;
    r.reason = "convergence order needs a refined trajectory";
    return r;
  }
  const Probe<ProbeScalar>* match = nullptr;
  for (const auto& p : refined->probes) {
    if (abs(p.t - traj.probes.front().t) < ProbeScalar(1e-9)) match = &p;
  }
  if (match == nullptr) {
    r.status = CheckStatus::kSkipped;
    r.reason = "refined trajectory has no probe at the same time";
    return r;
  }
  const auto fine = probe_residuals(*match);
  r.details["u_refined"] = double(fine.u);
  r.details["v_refined"] = double(fine.v);
  r.details["inv_H_refined"] = double(fine.inv_H);
  double worst = std::numeric_limits<double>::infinity();
  auto order = [&](const char* key, ProbeScalar c, ProbeScalar f) {
    const double o = double(log2(c / f));
    r.details[std::string("order_") + key] = o;
    // A refined residual at rounding level is exact for this purpose.
    const double eff = f <= ProbeScalar(cfg.residual_floor) ? std::numeric_limits<double>::infinity() : o;
    worst = std::min(worst, eff);
  };
  order("u", coarse.u, fine.u);
  order("v", coarse.v, fine.v);
  order("inv_H", coarse.inv_H, fine.inv_H);
  r.margin = worst - cfg.min_order;
  r.status = worst >= cfg.min_order ? CheckStatus::kPass : CheckStatus::kFail;
  return r;
}

/// Every check applicable to a single trajectory (plus optional partners).
template <typename Scalar>
EstimateReport verify_trajectory(const Trajectory<Scalar>& traj, const Trajectory<Scalar>* second = nullptr,
                                 const Trajectory<Scalar>* refined = nullptr, const VerifyConfig& cfg = {},
                                 int threads = 1) {
  EstimateReport rep;
  const TrajectoryView<Scalar> view(traj, threads);
  for (auto& c : check_height_width(view, cfg)) rep.checks.push_back(std::move(c));
  rep.checks.push_back(check_boundary_speed(view, cfg));
  for (auto& c : check_rotational_envelope(view, cfg)) rep.checks.push_back(std::move(c));
  rep.checks.push_back(check_bridge_gradient(view, cfg));
  rep.checks.push_back(check_embeddedness(view));
  rep.checks.push_back(check_critical_count(view));
  rep.checks.push_back(check_area_growth(view, cfg));
  rep.checks.push_back(check_star_time(view));
  if (second != nullptr) {
    rep.checks.push_back(check_avoidance(traj, *second, cfg));
  } else {
    rep.checks.push_back(detail::skipped("avoidance", "no second trajectory supplied", CheckStatus::kNotApplicable));
  }
  rep.checks.push_back(check_support_positive(view));
  rep.checks.push_back(check_max_principle_witness(view, cfg));
  rep.checks.push_back(check_residuals(traj, refined, cfg));
  return rep;
}

}  // namespace imcf
