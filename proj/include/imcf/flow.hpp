#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "imcf/geometry.hpp"
#include "imcf/resample.hpp"

namespace imcf {

enum class Scheme { kEuler, kMidpoint };

enum class Termination { kReachedEnd, kDegenerateSpeed, kNeckPinch, kInvariantBreach };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::kReachedEnd: return "reached-end";
    case Termination::kDegenerateSpeed: return "degenerate-speed";
    case Termination::kNeckPinch: return "neck-pinch";
    case Termination::kInvariantBreach: return "invariant-breach";
  }
  return "unknown";
}

template <typename Scalar>
struct FlowConfig {
  int dimension = 2;
  Scalar t_end = 1;
  Scalar cfl = 0.4;
  int resample_every = 20;  // steps
  Eigen::Index samples = 400;
  Scalar snapshot_every = 0.05;  // flow time
  /// Non-positive values select the defaults 1e-4 / scale and 1e-3 * initial neck radius.
  Scalar h_min_stop = 0;
  Scalar neck_radius_stop = 0;
  Scheme scheme = Scheme::kEuler;
  /// Flow times (multiples of snapshot_every) at which a three-state probe is recorded.
  std::vector<Scalar> probe_times;

  void validate() const {
    if (dimension < 2) throw Error(ErrorKind::kInvalidParameter, "dimension n must be >= 2");
    if (!(t_end > Scalar(0))) throw Error(ErrorKind::kInvalidParameter, "end time must be positive");
    if (!(cfl > Scalar(0) && cfl <= Scalar(1))) throw Error(ErrorKind::kInvalidParameter, "CFL safety must be in (0, 1]");
    if (resample_every < 1) throw Error(ErrorKind::kInvalidParameter, "resample cadence must be >= 1");
    if (samples < 64) throw Error(ErrorKind::kInvalidParameter, "sample count must be >= 64");
    if (!(snapshot_every > Scalar(0))) throw Error(ErrorKind::kInvalidParameter, "snapshot cadence must be positive");
  }
};

template <typename Scalar>
struct FlowState {
  GeneratingCurve<Scalar> curve;
  Scalar t = 0;
  long step = 0;
  GeometrySamples<Scalar> geometry;

  FlowState() = default;
  FlowState(GeneratingCurve<Scalar> c, Scalar time, long steps = 0)
      : curve(std::move(c)), t(time), step(steps), geometry(pointwise_geometry(curve)) {}
};

/// Per-snapshot scalar diagnostics. Bridge quantities are NaN when the bridge is empty.
template <typename Scalar>
struct Monitors {
  Scalar t = 0;
  Scalar min_H = 0, max_H = 0;
  Scalar min_u = 0, max_u = 0;  // min over the bridge, max over the curve
  Scalar max_abs_utilde = 0;
  Scalar max_v_bridge = 0;
  Scalar p_ratio_bridge = 0;  // over the bridge closure
  Scalar area = 0;
  Scalar a = 0, b = 0;
  Scalar roundness = 0;
  bool star = false;
  int critical_points = 0;
};

template <typename Scalar>
struct Snapshot {
  Scalar t = 0;
  GeneratingCurve<Scalar> curve;
};

/// Three consecutive states separated by the same step with no reparametrization
/// in between; the sample index follows a fixed material point. Probes are stepped
/// in extended precision: time differences of curvature over a step of size ~ds^2
/// would otherwise be dominated by rounding at fine resolution.
using ProbeScalar = long double;

template <typename Scalar>
struct Probe {
  Scalar t = 0;   // time of the first state
  Scalar dt = 0;
  std::array<GeneratingCurve<Scalar>, 3> states;
};

template <typename Scalar>
struct Trajectory {
  FlowConfig<Scalar> config;
  std::vector<Snapshot<Scalar>> snapshots;
  std::vector<Monitors<Scalar>> monitors;
  std::vector<Probe<ProbeScalar>> probes;
  Termination termination = Termination::kReachedEnd;
  std::string message;
  long steps = 0;
  long resamples = 0;

  Scalar end_time() const { return snapshots.empty() ? Scalar(0) : snapshots.back().t; }
};

/// Axial coordinate of the centroid of the enclosed solid of revolution.
template <typename Scalar>
Scalar solid_centroid(const GeneratingCurve<Scalar>& curve) {
  using std::pow;
  const int n = curve.dimension();
  Scalar vol = 0;
  Scalar moment = 0;
  for (Eigen::Index i = 0; i + 1 < curve.size(); ++i) {
    const Scalar dx = curve.x()(i) - curve.x()(i + 1);
    const Scalar w0 = pow(curve.r()(i), n);
    const Scalar w1 = pow(curve.r()(i + 1), n);
    vol += dx * (w0 + w1) / Scalar(2);
    moment += dx * (curve.x()(i) * w0 + curve.x()(i + 1) * w1) / Scalar(2);
  }
  return moment / vol;
}

/// (max - min) / mean of the distance from the centroid, mean = (max + min) / 2.
template <typename Scalar>
Scalar roundness(const GeneratingCurve<Scalar>& curve) {
  const Scalar xc = solid_centroid(curve);
  const Vec<Scalar> d = ((curve.x().array() - xc).square() + curve.r().array().square()).sqrt();
  const Scalar hi = d.maxCoeff();
  const Scalar lo = d.minCoeff();
  return (hi - lo) / ((hi + lo) / Scalar(2));
}

/// Dilation by e^{-t/n}, which maps round IMCF solutions to fixed spheres.
template <typename Scalar>
GeneratingCurve<Scalar> rescaled_curve(const FlowState<Scalar>& state) {
  using std::exp;
  return state.curve.scaled(exp(-state.t / Scalar(state.curve.dimension())));
}

template <typename Scalar>
Monitors<Scalar> compute_monitors(const GeneratingCurve<Scalar>& curve, const GeometrySamples<Scalar>& g, Scalar t) {
  using std::abs;
  const Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();
  const auto rd = decompose_regions(g);
  Monitors<Scalar> m;
  m.t = t;
  m.min_H = g.H.minCoeff();
  m.max_H = g.H.maxCoeff();
  m.max_u = g.u.maxCoeff();
  m.max_abs_utilde = g.utilde.cwiseAbs().maxCoeff();
  m.area = area(curve);
  m.a = rd.a;
  m.b = rd.b;
  m.roundness = roundness(curve);
  m.star = star_center_exists(g).has_value();
  m.critical_points = critical_count(g);
  if (rd.bridge_empty()) {
    m.min_u = m.max_v_bridge = m.p_ratio_bridge = nan;
    return m;
  }
  m.min_u = g.u.segment(rd.bridge_begin(), rd.bridge_size()).minCoeff();
  m.max_v_bridge = nan;
  for (Eigen::Index i = rd.bridge_begin(); i <= rd.bridge_end(); ++i) {
    if (g.v_defined(i) && !(g.v(i) <= m.max_v_bridge)) m.max_v_bridge = g.v(i);
  }
  const auto closure = g.p.segment(rd.right_end, rd.left_begin - rd.right_end + 1);
  m.p_ratio_bridge = closure.maxCoeff() / closure.minCoeff();
  return m;
}

/// dt = sigma (min H)^2 ds^2 / 2, the explicit stability limit for diffusivity 1/H^2.
template <typename Scalar>
Scalar cfl_timestep(const FlowState<Scalar>& state, Scalar sigma, Scalar h_min_stop = Scalar(0)) {
  const Scalar hmin = state.geometry.min_H();
  if (!(hmin > h_min_stop)) {
    throw Error(ErrorKind::kDegenerateSpeed, "min H = " + std::to_string(double(hmin)) + " at or below the stop threshold");
  }
  const Scalar ds = state.geometry.spacing;
  return sigma * hmin * hmin * ds * ds / Scalar(2);
}

namespace detail {

template <typename Scalar>
PointArray<Scalar> displaced(const GeneratingCurve<Scalar>& curve, const GeometrySamples<Scalar>& g, Scalar dt) {
  PointArray<Scalar> p = curve.points();
  const Eigen::Index m = p.rows();
  p.col(0).array() += dt * g.normal.col(0).array() / g.H.array();
  p.col(1).array() += dt * g.normal.col(1).array() / g.H.array();
  p(0, 1) = Scalar(0);
  p(m - 1, 1) = Scalar(0);
  return p;
}

template <typename Scalar>
FlowState<Scalar> checked_state(PointArray<Scalar> p, int n, Scalar t, long steps) {
  const Eigen::Index m = p.rows();
  if (!p.allFinite()) throw Error(ErrorKind::kInvariantBreach, "non-finite sample after step");
  for (Eigen::Index i = 1; i + 1 < m; ++i) {
    if (!(p(i, 1) > Scalar(0))) {
      throw Error(ErrorKind::kInvariantBreach, "sample " + std::to_string(i) + " crossed the axis");
    }
  }
  auto curve = GeneratingCurve<Scalar>::unchecked(std::move(p), n);
  if (!is_simple(curve)) throw Error(ErrorKind::kInvariantBreach, "profile self-intersects");
  FlowState<Scalar> s;
  s.curve = std::move(curve);
  s.t = t;
  s.step = steps;
  s.geometry = pointwise_geometry(s.curve);
  if (!(s.geometry.min_H() > Scalar(0))) throw Error(ErrorKind::kDegenerateSpeed, "mean curvature reached zero");
  if (!(s.geometry.embeddedness_margin() > Scalar(0))) {
    throw Error(ErrorKind::kInvariantBreach, "normal lost its radial component (embeddedness)");
  }
  return s;
}

}  // namespace detail

/// Moves every sample by (dt / H) nu; poles slide along the axis.
template <typename Scalar>
FlowState<Scalar> step(const FlowState<Scalar>& state, Scalar dt, Scheme scheme = Scheme::kEuler) {
  const int n = state.curve.dimension();
  if (!(state.geometry.min_H() > Scalar(0))) throw Error(ErrorKind::kDegenerateSpeed, "mean curvature is not positive");
  if (scheme == Scheme::kMidpoint) {
    const auto half = detail::checked_state<Scalar>(detail::displaced(state.curve, state.geometry, dt / Scalar(2)), n,
                                                    state.t + dt / Scalar(2), state.step);
    return detail::checked_state<Scalar>(detail::displaced(state.curve, half.geometry, dt), n, state.t + dt,
                                         state.step + 1);
  }
  return detail::checked_state<Scalar>(detail::displaced(state.curve, state.geometry, dt), n, state.t + dt,
                                       state.step + 1);
}

template <typename Scalar>
Scalar neck_radius(const GeometrySamples<Scalar>& g) {
  const auto rd = decompose_regions(g);
  if (rd.bridge_empty()) return std::numeric_limits<Scalar>::infinity();
  return g.u.segment(rd.bridge_begin(), rd.bridge_size()).minCoeff();
}

/// Integrates to config.t_end, recording a snapshot every snapshot_every of flow time.
/// Step failures end the run and are reported via Trajectory::termination.
template <typename Scalar>
Trajectory<Scalar> run(const FlowConfig<Scalar>& config, const GeneratingCurve<Scalar>& initial) {
  using std::abs;
  config.validate();
  if (initial.dimension() != config.dimension) {
    throw Error(ErrorKind::kInvalidParameter, "initial curve dimension differs from the flow dimension");
  }
  Trajectory<Scalar> traj;
  traj.config = config;

  GeneratingCurve<Scalar> start = initial;
  if (initial.size() != config.samples || initial.spacing_deviation() > Scalar(0.01)) {
    start = resample_uniform(initial, config.samples);
  }
  FlowState<Scalar> state(start, Scalar(0));
  if (!(state.geometry.min_H() > Scalar(0))) throw Error(ErrorKind::kPrecondition, "initial curve is not mean convex");

  const Scalar scale = diameter(start) / Scalar(2);
  const Scalar h_stop = config.h_min_stop > Scalar(0) ? config.h_min_stop : Scalar(1e-4) / scale;
  const Scalar neck0 = neck_radius(state.geometry);
  // Without an initial neck the default threshold is off.
  const Scalar neck_default = std::isfinite(neck0) ? Scalar(1e-3) * neck0 : Scalar(0);
  const Scalar neck_stop = config.neck_radius_stop > Scalar(0) ? config.neck_radius_stop : neck_default;

  auto record = [&](const FlowState<Scalar>& s) {
    traj.snapshots.push_back({s.t, s.curve});
    traj.monitors.push_back(compute_monitors(s.curve, s.geometry, s.t));
  };

  auto maybe_probe = [&](const FlowState<Scalar>& s) {
    for (const Scalar pt : config.probe_times) {
      if (abs(pt - s.t) > Scalar(1e-9) * (Scalar(1) + abs(pt))) continue;
      using P = ProbeScalar;
      Probe<P> probe;
      probe.t = P(s.t);
      FlowState<P> p0(GeneratingCurve<P>(s.curve.points().template cast<P>(), s.curve.dimension()), probe.t);
      probe.dt = cfl_timestep(p0, P(config.cfl), P(h_stop));
      auto p1 = step(p0, probe.dt, config.scheme);
      auto p2 = step(p1, probe.dt, config.scheme);
      probe.states = {p0.curve, p1.curve, p2.curve};
      traj.probes.push_back(std::move(probe));
    }
  };

  record(state);
  maybe_probe(state);
  long snap_index = 1;
  const Scalar t_eps = Scalar(1e-12) * (Scalar(1) + config.t_end);

  try {
    while (state.t < config.t_end - t_eps) {
      const Scalar target = std::min(Scalar(snap_index) * config.snapshot_every, config.t_end);
      Scalar dt = cfl_timestep(state, config.cfl, h_stop);
      bool land = false;
      if (state.t + dt >= target - t_eps) {
        dt = target - state.t;
        land = true;
      }
      state = step(state, dt, config.scheme);
      if (land) state.t = target;
      ++traj.steps;
      const bool resample_now = traj.steps % config.resample_every == 0;
      if (resample_now) {
        state = FlowState<Scalar>(resample_uniform(state.curve, config.samples), state.t, state.step);
        ++traj.resamples;
      }
      if (resample_now || land) {
        if (neck_radius(state.geometry) <= neck_stop) {
          traj.termination = Termination::kNeckPinch;
          traj.message = "bridge radius fell below the neck stop threshold";
          break;
        }
      }
      if (land) {
        record(state);
        maybe_probe(state);
        ++snap_index;
      }
    }
  } catch (const Error& e) {
    traj.message = e.what();
    traj.termination =
        e.kind() == ErrorKind::kDegenerateSpeed ? Termination::kDegenerateSpeed : Termination::kInvariantBreach;
  }
  if (state.t > traj.snapshots.back().t) record(state);
  return traj;
}

}  // namespace imcf
