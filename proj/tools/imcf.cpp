// Command-line front end: make-initial, simulate, verify, report.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imcf/flow.hpp"
#include "imcf/initial_data.hpp"
#include "imcf/io.hpp"
#include "imcf/verify.hpp"

namespace {

using namespace imcf;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct InitialOptions {
  std::optional<double> sphere;  // radius
  double center = 0;
  bool tube = false;
  double ell = 8;
  double c = 0.6;
  std::string cutoff = "asymmetric";
  std::string graph;    // two-column x y file
  std::string initial;  // curve snapshot file
  int n = 2;
  long samples = 400;

  void add_to(CLI::App* app, bool allow_file) {
    auto* s = app->add_option("--sphere", sphere, "round sphere of this radius");
    app->add_option("--center", center, "axial center of the sphere")->capture_default_str();
    auto* t = app->add_flag("--tube-spheres", tube, "two unit spheres joined by a tube");
    app->add_option("--ell", ell, "neck half-length")->capture_default_str();
    app->add_option("--c", c, "tube radius, in (0.5, 1)")->capture_default_str();
    app->add_option("--cutoff", cutoff, "cutoff ramp")->check(CLI::IsMember({"asymmetric", "quintic"}))->capture_default_str();
    auto* g = app->add_option("--graph", graph, "file with columns x y describing the generating graph");
    s->excludes(t)->excludes(g);
    t->excludes(g);
    if (allow_file) {
      auto* f = app->add_option("--initial", initial, "initial curve snapshot file")->check(CLI::ExistingFile);
      f->excludes(s)->excludes(t)->excludes(g);
    }
    app->add_option("--n", n, "surface dimension (ambient R^{n+1})")->capture_default_str();
    app->add_option("--M", samples, "sample count")->capture_default_str();
  }

  std::string describe() const {
    if (!initial.empty()) return "file:" + initial;
    if (sphere) return "sphere:r=" + std::to_string(*sphere) + ",center=" + std::to_string(center);
    if (tube) return "tube-spheres:ell=" + std::to_string(ell) + ",c=" + std::to_string(c) + ",cutoff=" + cutoff;
    if (!graph.empty()) return "graph:" + graph;
    return "none";
  }

  GeneratingCurve<double> build() const {
    if (!initial.empty()) return io::read_curve(initial).curve;
    if (sphere) return make_sphere(*sphere, center, samples, n);
    if (tube) {
      TubeSpheresParams<double> p;
      p.ell = ell;
      p.c = c;
      p.dimension = n;
      p.samples = samples;
      p.cutoff = cutoff == "quintic" ? CutoffKind::kQuinticSmoothstep : CutoffKind::kAsymmetric;
      return make_tube_spheres(p);
    }
    if (!graph.empty()) {
      Vec<double> x, y;
      io::read_columns(graph, x, y);
      return make_graph_surface<double>(x, y, samples, n);
    }
    throw Error(ErrorKind::kInvalidParameter, "no initial data given (use --sphere, --tube-spheres, --graph or --initial)");
  }
};

int env_threads() {
  const char* s = std::getenv("IMCF_THREADS");
  if (s == nullptr) return 1;
  const int v = std::atoi(s);
  return v > 0 ? v : 1;
}

int cmd_make_initial(const InitialOptions& opts, const fs::path& out) {
  const auto curve = opts.build();
  const auto rep = check_admissible(curve);
  io::write_curve(out / "initial.curve", curve, 0.0);
  io::write_atomic(out / "admissibility.json", io::admissibility_json(rep));
  std::cout << "ratio " << rep.ratio << " threshold " << rep.threshold << " min_H " << rep.min_H
            << " admissible " << (rep.admissible ? "true" : "false") << " star " << (rep.star_shaped ? "true" : "false")
            << "\n";
  return kExitOk;
}

int cmd_simulate(const InitialOptions& opts, FlowConfig<double> cfg, const std::string& scheme, const fs::path& out) {
  cfg.dimension = opts.initial.empty() ? opts.n : cfg.dimension;
  cfg.scheme = scheme == "midpoint" ? Scheme::kMidpoint : Scheme::kEuler;
  const auto initial = opts.build();
  cfg.dimension = initial.dimension();
  const auto start = std::chrono::steady_clock::now();
  const auto traj = run(cfg, initial);
  io::RunMetadata meta;
  meta.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  meta.initial_source = opts.describe();
  io::write_trajectory(out, traj, meta);
  const auto& last = traj.snapshots.back();
  std::cout << "termination " << to_string(traj.termination) << " t " << last.t << " snapshots " << traj.snapshots.size()
            << " steps " << traj.steps << " max|F| " << last.curve.points().rowwise().norm().maxCoeff() << " wall "
            << meta.wall_seconds << "s\n";
  if (traj.termination != Termination::kReachedEnd) {
    std::cerr << "run stopped early: " << to_string(traj.termination) << ": " << traj.message << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_verify(const fs::path& dir, const std::string& second, const std::string& refined, std::string report_path,
               const std::vector<std::string>& only) {
  const auto traj = io::read_trajectory(dir);
  if (traj.snapshots.empty()) throw Error(ErrorKind::kParse, dir.string() + " contains no snapshots");
  std::optional<Trajectory<double>> other, fine;
  if (!second.empty()) other = io::read_trajectory(second);
  if (!refined.empty()) fine = io::read_trajectory(refined);
  auto rep = verify_trajectory(traj, other ? &*other : nullptr, fine ? &*fine : nullptr, VerifyConfig{}, env_threads());
  if (!only.empty()) {
    std::erase_if(rep.checks, [&](const CheckResult& c) { return std::find(only.begin(), only.end(), c.name) == only.end(); });
  }
  if (report_path.empty()) report_path = (dir / "report.json").string();
  io::write_atomic(report_path, io::report_json(rep));
  for (const auto& c : rep.checks) {
    std::cout << c.name << " " << to_string(c.status) << " margin " << c.margin;
    if (!c.reason.empty()) std::cout << " (" << c.reason << ")";
    std::cout << "\n";
  }
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse mean curvature flow of rotationally symmetric hypersurfaces"};
  app.set_config("--config", "", "TOML file with option values; command-line flags take precedence");
  app.require_subcommand(1);

  InitialOptions make_opts;
  std::string make_out = ".";
  auto* make = app.add_subcommand("make-initial", "build initial data and check admissibility");
  make_opts.add_to(make, false);
  make->add_option("-o,--out", make_out, "output directory")->capture_default_str();

  InitialOptions sim_opts;
  FlowConfig<double> cfg;
  std::string scheme = "euler";
  std::string sim_out = "trajectory";
  std::vector<double> probes;
  bool no_probe = false;
  auto* sim = app.add_subcommand("simulate", "run the flow and write a trajectory directory");
  sim_opts.add_to(sim, true);
  sim->add_option("--T", cfg.t_end, "end time")->capture_default_str();
  sim->add_option("--cfl", cfg.cfl, "CFL safety factor in (0, 1]")->capture_default_str();
  sim->add_option("--resample-every", cfg.resample_every, "steps between reparametrizations")->capture_default_str();
  sim->add_option("--snapshot-every", cfg.snapshot_every, "flow time between snapshots")->capture_default_str();
  sim->add_option("--h-min-stop", cfg.h_min_stop, "stop when min H falls to this (0: 1e-4/scale)")->capture_default_str();
  sim->add_option("--neck-stop", cfg.neck_radius_stop, "stop when the neck radius falls to this (0: automatic)")
      ->capture_default_str();
  sim->add_option("--scheme", scheme, "time stepping")->check(CLI::IsMember({"euler", "midpoint"}))->capture_default_str();
  sim->add_option("--probe", probes, "flow times for residual probes (default: one near min(T/2, 0.5))");
  sim->add_flag("--no-probe", no_probe, "record no residual probes");
  sim->add_option("-o,--out", sim_out, "trajectory directory")->capture_default_str();

  std::string ver_dir, ver_second, ver_refined, ver_report;
  std::vector<std::string> ver_only;
  auto* ver = app.add_subcommand("verify", "check the estimates over a trajectory");
  ver->add_option("dir", ver_dir, "trajectory directory")->required()->check(CLI::ExistingDirectory);
  ver->add_option("--second", ver_second, "second trajectory for the avoidance check")->check(CLI::ExistingDirectory);
  ver->add_option("--refined", ver_refined, "run with twice the samples, for residual orders")->check(CLI::ExistingDirectory);
  ver->add_option("--report", ver_report, "report path (default <dir>/report.json)");
  ver->add_option("--only", ver_only, "restrict the report to these checks")->delimiter(',');

  std::vector<std::string> rep_dirs;
  std::string rep_out;
  auto* rep = app.add_subcommand("report", "join monitors.csv of trajectories into one wide CSV");
  rep->add_option("dirs", rep_dirs, "trajectory directories")->required()->check(CLI::ExistingDirectory);
  rep->add_option("-o,--out", rep_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (make->parsed()) return cmd_make_initial(make_opts, make_out);
    if (sim->parsed()) {
      cfg.samples = sim_opts.samples;
      if (!no_probe) {
        if (probes.empty()) {
          const double target = std::min(0.5, cfg.t_end / 2);
          probes.push_back(std::floor(target / cfg.snapshot_every) * cfg.snapshot_every);
        }
        cfg.probe_times = probes;
      }
      return cmd_simulate(sim_opts, cfg, scheme, sim_out);
    }
    if (ver->parsed()) return cmd_verify(ver_dir, ver_second, ver_refined, ver_report, ver_only);
    if (rep->parsed()) {
      std::vector<fs::path> dirs(rep_dirs.begin(), rep_dirs.end());
      const auto csv = io::wide_monitor_csv(dirs);
      if (rep_out.empty()) {
        std::cout << csv;
      } else {
        io::write_atomic(rep_out, csv);
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
