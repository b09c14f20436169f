#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "imcf/flow.hpp"
#include "imcf/initial_data.hpp"
#include "imcf/verify.hpp"

namespace imcf::io {

namespace fs = std::filesystem;

template <typename Scalar>
struct CurveFile {
  GeneratingCurve<Scalar> curve;
  Scalar t = 0;
};

/// `# imcf-curve n=<n> t=<time>` followed by one `x r` pair per line.
std::string format_curve(const GeneratingCurve<double>& curve, double t);
std::string format_curve(const GeneratingCurve<long double>& curve, long double t);

CurveFile<double> parse_curve(const std::string& text, const std::string& origin = "<string>");
CurveFile<long double> parse_curve_extended(const std::string& text, const std::string& origin = "<string>");

/// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const fs::path& path, const std::string& contents);
std::string read_text(const fs::path& path);

void write_curve(const fs::path& path, const GeneratingCurve<double>& curve, double t);
CurveFile<double> read_curve(const fs::path& path);

/// Two whitespace-separated columns x y, '#' comments allowed.
void read_columns(const fs::path& path, Vec<double>& x, Vec<double>& y);

std::string monitors_header();
std::string format_monitors(const std::vector<Monitors<double>>& rows);

struct RunMetadata {
  double wall_seconds = 0;
  std::string initial_source;
};

/// Trajectory directory: snapshots/, probes/, monitors.csv, run.json.
void write_trajectory(const fs::path& dir, const Trajectory<double>& traj, const RunMetadata& meta);

/// Snapshots (sorted by time) and probes; monitors are recomputed, not parsed.
Trajectory<double> read_trajectory(const fs::path& dir);

std::string report_json(const EstimateReport& report, int indent = 2);
std::string admissibility_json(const AdmissibilityReport<double>& rep, int indent = 2);

/// Joins monitors.csv of several trajectory directories on t; columns are prefixed
/// with each directory's name.
std::string wide_monitor_csv(const std::vector<fs::path>& dirs);

}  // namespace imcf::io
