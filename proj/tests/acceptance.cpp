// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "imcf/flow.hpp"
#include "imcf/initial_data.hpp"
#include "imcf/verify.hpp"

using namespace imcf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Timed {
  Trajectory<double> traj;
  double seconds = 0;
};

Timed timed_run(const FlowConfig<double>& cfg, const GeneratingCurve<double>& initial) {
  const auto t0 = Clock::now();
  Timed out{run(cfg, initial), 0};
  out.seconds = seconds_since(t0);
  return out;
}

FlowConfig<double> config(double t_end, Eigen::Index m, double cfl = 0.4, std::vector<double> probes = {}) {
  FlowConfig<double> cfg;
  cfg.t_end = t_end;
  cfg.samples = m;
  cfg.cfl = cfl;
  cfg.probe_times = std::move(probes);
  return cfg;
}

GeneratingCurve<double> tube(Eigen::Index m) {
  TubeSpheresParams<double> p;
  p.samples = m;
  return make_tube_spheres(p);
}

double sphere_error(const Snapshot<double>& s, double r0, int n) {
  const double exact = r0 * std::exp(s.t / n);
  return (s.curve.points().rowwise().norm().array() - exact).abs().maxCoeff();
}

Trajectory<double> truncated(const Trajectory<double>& t, double t_max) {
  Trajectory<double> out;
  out.config = t.config;
  for (std::size_t k = 0; k < t.snapshots.size(); ++k) {
    if (t.snapshots[k].t > t_max + 1e-9) break;
    out.snapshots.push_back(t.snapshots[k]);
    out.monitors.push_back(t.monitors[k]);
  }
  return out;
}

std::string describe(const CheckResult& c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s=%s(margin %.3g)", c.name.c_str(), to_string(c.status), c.margin);
  return buf;
}

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s -- %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void guarded(int id, const std::string& title, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, title, false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  char line[512];

  // Shared runs.
  const auto sphere400 = timed_run(config(1.0, 400, 0.4, {0.5}), make_sphere(1.0, 0.0, 400));
  const auto sphere800 = timed_run(config(1.0, 800, 0.2, {0.5}), make_sphere(1.0, 0.0, 800));
  const auto tube800 = timed_run(config(8.0, 800, 0.4, {0.5}), tube(800));
  const auto tube400 = timed_run(config(0.5, 400, 0.4, {0.5}), tube(400));

  guarded(1, "sphere oracle", [&] {
    double worst = 0;
    for (const auto& s : sphere400.traj.snapshots) worst = std::max(worst, sphere_error(s, 1.0, 2));
    const double e400 = sphere_error(sphere400.traj.snapshots.back(), 1.0, 2);
    const double e800 = sphere_error(sphere800.traj.snapshots.back(), 1.0, 2);
    const bool ok = sphere400.traj.termination == Termination::kReachedEnd && worst <= 1e-3 &&
                    sphere400.seconds < 30 && e400 / e800 >= 2;
    std::snprintf(line, sizeof line,
                  "max radius error %.3e (<= 1e-3), runtime %.1f s (< 30 s), final error %.3e -> %.3e at M=800 "
                  "sigma=0.2, reduction %.2fx (>= 2x)",
                  worst, sphere400.seconds, e400, e800, e400 / e800);
    report(1, "sphere oracle", ok, line);
  });

  guarded(2, "curvature formulas", [&] {
    const auto g = pointwise_geometry(make_sphere(1.0, 0.0, 400));
    const double err = (g.H.array() - 2.0).abs().maxCoeff();
    const double pole = std::max(std::abs(g.H(0) - 2), std::abs(g.H(399) - 2));
    std::snprintf(line, sizeof line, "max |H - 2| = %.3e (<= 1e-3), at poles %.3e", err, pole);
    report(2, "curvature formulas", err <= 1e-3, line);
  });

  guarded(3, "admissibility gate", [&] {
    const auto rep = check_admissible(tube(1200));
    const bool ok = rep.ratio < 2 && rep.threshold == 2 && rep.min_H > 0 && !rep.star_shaped && rep.admissible;
    std::snprintf(line, sizeof line, "ratio %.4f < threshold %.4f, min H %.4f > 0, admissible %s, star-shaped %s",
                  rep.ratio, rep.threshold, rep.min_H, rep.admissible ? "true" : "false",
                  rep.star_shaped ? "true" : "false");
    report(3, "admissibility gate", ok, line);
  });

  guarded(4, "estimate suite", [&] {
    const auto part = truncated(tube800.traj, 6.0);
    const TrajectoryView<double> view(part);
    std::vector<CheckResult> checks = check_height_width(view);
    checks.push_back(check_boundary_speed(view));
    for (auto& c : check_rotational_envelope(view)) checks.push_back(c);
    checks.push_back(check_bridge_gradient(view));
    checks.push_back(check_embeddedness(view));
    checks.push_back(check_critical_count(view));
    bool ok = tube800.traj.termination == Termination::kReachedEnd && tube800.seconds < 600;
    std::string detail;
    for (const auto& c : checks) {
      ok = ok && c.passed();
      detail += describe(c) + " ";
    }
    std::snprintf(line, sizeof line, "t <= %.2f of the T=8 run, runtime %.1f s (< 600 s)", part.end_time(),
                  tube800.seconds);
    report(4, "estimate suite", ok, detail + line);
  });

  guarded(5, "star-shaped time and roundness", [&] {
    const auto& traj = tube800.traj;
    const auto star = check_star_time(TrajectoryView<double>(traj));
    const double first = star.details.at("first_star_time");
    const double tstar = star.details.at("t_star");
    const double final_round = traj.monitors.back().roundness;
    bool decreasing = true;
    double worst_step = -1e300;
    for (std::size_t k = 1; k < traj.monitors.size(); ++k) {
      if (traj.monitors[k - 1].t < traj.end_time() / 2 - 1e-9) continue;
      const double d = traj.monitors[k].roundness - traj.monitors[k - 1].roundness;
      worst_step = std::max(worst_step, d);
      decreasing = decreasing && d < 0;
    }
    const bool ok = star.passed() && first <= tstar && std::abs(traj.end_time() - 8.0) < 1e-9 && final_round < 0.05 &&
                    decreasing;
    std::snprintf(line, sizeof line,
                  "first star-shaped time %.2f <= t* %.3f (star_time %s), roundness(T=%.2f) %.3e < 0.05, "
                  "strictly decreasing over [%.1f, %.1f]: %s (largest step %.2e)",
                  first, tstar, to_string(star.status), traj.end_time(), final_round, traj.end_time() / 2,
                  traj.end_time(), decreasing ? "yes" : "no", worst_step);
    report(5, "star-shaped time and roundness", ok, line);
  });

  guarded(6, "avoidance", [&] {
    const auto cfg = config(1.0, 400);
    const auto a = run(cfg, make_sphere(1.0, 0.0, 400));
    const auto b = run(cfg, make_sphere(3.0, 0.0, 400));
    double worst = 0;
    for (std::size_t k = 0; k < std::min(a.snapshots.size(), b.snapshots.size()); ++k) {
      const double d = curve_distance(a.snapshots[k].curve, b.snapshots[k].curve);
      worst = std::max(worst, std::abs(d - 2 * std::exp(a.snapshots[k].t / 2)));
    }
    const auto spheres = check_avoidance(a, b);

    const auto cfg2 = config(2.0, 400);
    const auto inner = run(cfg2, tube(400));
    const auto outer = run(cfg2, make_sphere(11.0, 0.0, 400));
    const auto nested = check_avoidance(inner, outer);
    const bool ok = worst <= 1e-3 && spheres.passed() && nested.passed() &&
                    inner.termination == Termination::kReachedEnd && outer.termination == Termination::kReachedEnd;
    std::snprintf(line, sizeof line,
                  "concentric spheres |d - 2e^{t/2}| max %.3e (<= 1e-3); tube inside radius-11 sphere to T=2: "
                  "distance %.4f -> %.4f, worst step %.3e (>= -1e-6)",
                  worst, nested.details.at("distance0"), nested.details.at("distance_final"), nested.margin);
    report(6, "avoidance", ok, line);
  });

  guarded(7, "evolution-equation residuals", [&] {
    const auto s = check_residuals(sphere400.traj, &sphere800.traj);
    const auto t = check_residuals(tube400.traj, &tube800.traj);
    auto orders = [](const CheckResult& c) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "u %.2f (%.2e->%.2e), v %.2f (%.2e->%.2e), 1/H %.2f (%.2e->%.2e)",
                    c.details.at("order_u"), c.details.at("u"), c.details.at("u_refined"), c.details.at("order_v"),
                    c.details.at("v"), c.details.at("v_refined"), c.details.at("order_inv_H"), c.details.at("inv_H"),
                    c.details.at("inv_H_refined"));
      return std::string(buf);
    };
    report(7, "evolution-equation residuals", s.passed() && t.passed(),
           "orders M=400->800 (>= 1.5): sphere " + orders(s) + "; tube-spheres " + orders(t));
  });

  guarded(8, "area growth", [&] {
    const auto s = check_area_growth(TrajectoryView<double>(sphere800.traj));
    const auto t = check_area_growth(TrajectoryView<double>(tube800.traj));
    const double ds = 1e-2 - s.margin, dt = 1e-2 - t.margin;
    std::snprintf(line, sizeof line, "max |area/(area0 e^t) - 1|: sphere %.3e, tube-spheres %.3e (<= 1e-2) at M=800",
                  ds, dt);
    report(8, "area growth", s.passed() && t.passed(), line);
  });

  guarded(9, "max-principle witness", [&] {
    const auto w = check_max_principle_witness(TrajectoryView<double>(tube800.traj));
    std::snprintf(line, sizeof line,
                  "sup f %.5f at t=%.2f, inf f %.5f at t=%.2f; interior excess sup %.2e, inf %.2e (tolerance 1e-3)",
                  w.details.at("sup_f"), w.details.at("t_sup"), w.details.at("inf_f"), w.details.at("t_inf"),
                  -w.details.at("sup_margin"), -w.details.at("inf_margin"));
    report(9, "max-principle witness", w.passed(), line);
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
