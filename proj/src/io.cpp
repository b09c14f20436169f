#include "imcf/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace imcf::io {

namespace {

using json = nlohmann::json;

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

std::string fmt_long(long double value) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.21Lg", value);
  return buf;
}

std::string time_tag(double t) { return "t=" + fmt("%.6f", t); }

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename Scalar, typename Parse>
CurveFile<Scalar> parse_generic(const std::string& text, const std::string& origin, Parse parse_number) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# imcf-curve", 0) != 0) {
    throw Error(ErrorKind::kParse, origin + ": missing '# imcf-curve' header");
  }
  int n = -1;
  bool have_t = false;
  Scalar t = 0;
  std::istringstream header(line.substr(12));
  std::string tok;
  while (header >> tok) {
    if (tok.rfind("n=", 0) == 0) {
      try {
        n = std::stoi(tok.substr(2));
      } catch (const std::exception&) {
        throw Error(ErrorKind::kParse, origin + ": bad dimension '" + tok + "'");
      }
    } else if (tok.rfind("t=", 0) == 0) {
      if (!parse_number(tok.substr(2), t)) throw Error(ErrorKind::kParse, origin + ": bad time '" + tok + "'");
      have_t = true;
    }
  }
  if (n < 0 || !have_t) throw Error(ErrorKind::kParse, origin + ": header needs n= and t=");

  std::vector<std::pair<Scalar, Scalar>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string a, b, extra;
    Scalar x, r;
    if (!(ls >> a >> b) || (ls >> extra) || !parse_number(a, x) || !parse_number(b, r)) {
      throw Error(ErrorKind::kParse, origin + ":" + std::to_string(lineno) + ": expected 'x r'");
    }
    rows.emplace_back(x, r);
  }
  PointArray<Scalar> p(Eigen::Index(rows.size()), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    p(Eigen::Index(i), 0) = rows[i].first;
    p(Eigen::Index(i), 1) = rows[i].second;
  }
  try {
    return {GeneratingCurve<Scalar>(std::move(p), n), t};
  } catch (const Error& e) {
    throw Error(ErrorKind::kParse, origin + ": " + e.what());
  }
}

bool parse_double(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0';
}

bool parse_long_double(const std::string& s, long double& out) {
  char* end = nullptr;
  out = std::strtold(s.c_str(), &end);
  return end != s.c_str() && *end == '\0';
}

json config_json(const FlowConfig<double>& c) {
  json probes = json::array();
  for (double t : c.probe_times) probes.push_back(t);
  return {{"dimension", c.dimension},
          {"t_end", c.t_end},
          {"cfl", c.cfl},
          {"resample_every", c.resample_every},
          {"samples", c.samples},
          {"snapshot_every", c.snapshot_every},
          {"h_min_stop", c.h_min_stop},
          {"neck_radius_stop", c.neck_radius_stop},
          {"scheme", c.scheme == Scheme::kMidpoint ? "midpoint" : "euler"},
          {"probe_times", probes}};
}

Termination parse_termination(const std::string& s) {
  for (auto t : {Termination::kReachedEnd, Termination::kDegenerateSpeed, Termination::kNeckPinch,
                 Termination::kInvariantBreach}) {
    if (s == to_string(t)) return t;
  }
  throw Error(ErrorKind::kParse, "unknown termination '" + s + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_curve(const GeneratingCurve<double>& curve, double t) {
  std::string out = "# imcf-curve n=" + std::to_string(curve.dimension()) + " t=" + fmt("%.17g", t) + "\n";
  for (Eigen::Index i = 0; i < curve.size(); ++i) {
    out += fmt("%.17g", curve.x()(i)) + " " + fmt("%.17g", curve.r()(i)) + "\n";
  }
  return out;
}

std::string format_curve(const GeneratingCurve<long double>& curve, long double t) {
  std::string out = "# imcf-curve n=" + std::to_string(curve.dimension()) + " t=" + fmt_long(t) + "\n";
  for (Eigen::Index i = 0; i < curve.size(); ++i) out += fmt_long(curve.x()(i)) + " " + fmt_long(curve.r()(i)) + "\n";
  return out;
}

CurveFile<double> parse_curve(const std::string& text, const std::string& origin) {
  return parse_generic<double>(text, origin, parse_double);
}

CurveFile<long double> parse_curve_extended(const std::string& text, const std::string& origin) {
  return parse_generic<long double>(text, origin, parse_long_double);
}

void write_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorKind::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_curve(const fs::path& path, const GeneratingCurve<double>& curve, double t) {
  write_atomic(path, format_curve(curve, t));
}

CurveFile<double> read_curve(const fs::path& path) { return parse_curve(read_text(path), path.string()); }

void read_columns(const fs::path& path, Vec<double>& x, Vec<double>& y) {
  std::istringstream in(read_text(path));
  std::vector<double> xs, ys;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a >> b)) throw Error(ErrorKind::kParse, path.string() + ":" + std::to_string(lineno) + ": expected 'x y'");
    xs.push_back(a);
    ys.push_back(b);
  }
  x = Eigen::Map<Vec<double>>(xs.data(), Eigen::Index(xs.size()));
  y = Eigen::Map<Vec<double>>(ys.data(), Eigen::Index(ys.size()));
}

std::string monitors_header() { return "t,minH,maxH,minu,maxu,maxau,maxvL,pratioL,area,a,b,roundness,star,critcount"; }

std::string format_monitors(const std::vector<Monitors<double>>& rows) {
  std::string out = monitors_header() + "\n";
  for (const auto& m : rows) {
    for (double v : {m.t, m.min_H, m.max_H, m.min_u, m.max_u, m.max_abs_utilde, m.max_v_bridge, m.p_ratio_bridge, m.area,
                     m.a, m.b, m.roundness}) {
      out += (std::isfinite(v) ? fmt("%.17g", v) : std::string("nan")) + ",";
    }
    out += std::to_string(int(m.star)) + "," + std::to_string(m.critical_points) + "\n";
  }
  return out;
}

void write_trajectory(const fs::path& dir, const Trajectory<double>& traj, const RunMetadata& meta) {
  // Files from an earlier run in the same directory would otherwise mix with this one.
  std::error_code ec;
  fs::remove_all(dir / "snapshots", ec);
  fs::remove_all(dir / "probes", ec);
  fs::create_directories(dir / "snapshots");
  for (const auto& s : traj.snapshots) write_curve(dir / "snapshots" / (time_tag(s.t) + ".curve"), s.curve, s.t);
  for (const auto& p : traj.probes) {
    const fs::path pdir = dir / "probes" / time_tag(double(p.t));
    for (int k = 0; k < 3; ++k) {
      write_atomic(pdir / ("state" + std::to_string(k) + ".curve"),
                   format_curve(p.states[std::size_t(k)], p.t + p.dt * (long double)k));
    }
  }
  write_atomic(dir / "monitors.csv", format_monitors(traj.monitors));
  json run = {{"config", config_json(traj.config)},
              {"termination", to_string(traj.termination)},
              {"message", traj.message},
              {"steps", traj.steps},
              {"resamples", traj.resamples},
              {"snapshots", traj.snapshots.size()},
              {"end_time", traj.end_time()},
              {"wall_seconds", meta.wall_seconds},
              {"initial", meta.initial_source}};
  write_atomic(dir / "run.json", run.dump(2) + "\n");
}

Trajectory<double> read_trajectory(const fs::path& dir) {
  if (!fs::is_directory(dir / "snapshots")) throw Error(ErrorKind::kIo, dir.string() + " has no snapshots/ directory");
  Trajectory<double> traj;
  if (fs::exists(dir / "run.json")) {
    json run;
    try {
      run = json::parse(read_text(dir / "run.json"));
      const auto& c = run.at("config");
      traj.config.dimension = c.at("dimension").get<int>();
      traj.config.t_end = c.at("t_end").get<double>();
      traj.config.cfl = c.at("cfl").get<double>();
      traj.config.resample_every = c.at("resample_every").get<int>();
      traj.config.samples = c.at("samples").get<Eigen::Index>();
      traj.config.snapshot_every = c.at("snapshot_every").get<double>();
      traj.termination = parse_termination(run.at("termination").get<std::string>());
      traj.message = run.value("message", "");
      traj.steps = run.value("steps", 0L);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, (dir / "run.json").string() + ": " + e.what());
    }
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir / "snapshots")) {
    if (e.path().extension() == ".curve") files.push_back(e.path());
  }
  for (const auto& f : files) {
    auto cf = read_curve(f);
    traj.snapshots.push_back({cf.t, std::move(cf.curve)});
  }
  std::sort(traj.snapshots.begin(), traj.snapshots.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    if (!(traj.snapshots[k].t > traj.snapshots[k - 1].t)) throw Error(ErrorKind::kParse, "duplicate snapshot times in " + dir.string());
  }
  for (const auto& s : traj.snapshots) {
    traj.monitors.push_back(compute_monitors(s.curve, pointwise_geometry(s.curve), s.t));
  }
  if (fs::is_directory(dir / "probes")) {
    std::vector<fs::path> pdirs;
    for (const auto& e : fs::directory_iterator(dir / "probes")) {
      if (e.is_directory()) pdirs.push_back(e.path());
    }
    std::sort(pdirs.begin(), pdirs.end());
    for (const auto& pd : pdirs) {
      Probe<ProbeScalar> p;
      std::array<ProbeScalar, 3> times{};
      for (int k = 0; k < 3; ++k) {
        const fs::path f = pd / ("state" + std::to_string(k) + ".curve");
        auto cf = parse_curve_extended(read_text(f), f.string());
        p.states[std::size_t(k)] = std::move(cf.curve);
        times[std::size_t(k)] = cf.t;
      }
      p.t = times[0];
      p.dt = (times[2] - times[0]) / 2;
      traj.probes.push_back(std::move(p));
    }
  }
  return traj;
}

std::string report_json(const EstimateReport& report, int indent) {
  json out = json::object();
  for (const auto& c : report.checks) {
    json details = json::object();
    for (const auto& [k, v] : c.details) details[k] = number(v);
    if (!c.reason.empty()) details["reason"] = c.reason;
    out[c.name] = {{"pass", c.passed()},
                   {"status", to_string(c.status)},
                   {"margin", number(c.margin)},
                   {"t_worst", number(c.t_worst)},
                   {"i_worst", c.i_worst},
                   {"details", details}};
  }
  return out.dump(indent) + "\n";
}

std::string admissibility_json(const AdmissibilityReport<double>& rep, int indent) {
  json out = {{"ratio", number(rep.ratio)},
              {"threshold", rep.threshold},
              {"min_H", rep.min_H},
              {"embeddedness_margin", rep.embeddedness_margin},
              {"bridge_empty", rep.bridge_empty},
              {"admissible", rep.admissible},
              {"star_shaped", rep.star_shaped},
              {"star_center", rep.star_center ? json(*rep.star_center) : json(nullptr)}};
  return out.dump(indent) + "\n";
}

std::string wide_monitor_csv(const std::vector<fs::path>& dirs) {
  std::vector<std::string> columns;
  std::map<double, std::map<std::string, std::string>> rows;
  for (const auto& dir : dirs) {
    std::istringstream in(read_text(dir / "monitors.csv"));
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::kParse, (dir / "monitors.csv").string() + " is empty");
    const auto header = split_csv(line);
    if (header.empty() || header[0] != "t") throw Error(ErrorKind::kParse, (dir / "monitors.csv").string() + ": first column must be t");
    std::string prefix = dir.filename().string();
    if (prefix.empty()) prefix = dir.parent_path().filename().string();
    for (std::size_t c = 1; c < header.size(); ++c) columns.push_back(prefix + "." + header[c]);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = split_csv(line);
      double t;
      if (cells.size() != header.size() || !parse_double(cells[0], t)) {
        throw Error(ErrorKind::kParse, (dir / "monitors.csv").string() + ": malformed row");
      }
      for (std::size_t c = 1; c < header.size(); ++c) rows[t][prefix + "." + header[c]] = cells[c];
    }
  }
  std::string out = "t";
  for (const auto& c : columns) out += "," + c;
  out += "\n";
  for (const auto& [t, cells] : rows) {
    out += fmt("%.17g", t);
    for (const auto& c : columns) {
      const auto it = cells.find(c);
      out += "," + (it == cells.end() ? std::string() : it->second);
    }
    out += "\n";
  }
  return out;
}

}  // namespace imcf::io
