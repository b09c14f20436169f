#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "imcf/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

Result cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(IMCF_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) r.output += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("imcf_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json load(const fs::path& p) { return json::parse(imcf::io::read_text(p)); }

}  // namespace

TEST_SUITE("make-initial") {
  TEST_CASE("tube-spheres reference surface") {
    const auto dir = scratch("make_tube");
    const auto r = cli("make-initial --tube-spheres --ell 8 --c 0.6 --n 2 --M 1200 -o " + dir.string());
    INFO(r.output);
    REQUIRE(r.code == 0);
    const auto j = load(dir / "admissibility.json");
    CHECK(j.at("admissible") == true);
    CHECK(j.at("star_shaped") == false);
    CHECK(j.at("ratio").get<double>() < 2.0);
    CHECK(r.output.find("ratio") != std::string::npos);
    const auto c = imcf::io::read_curve(dir / "initial.curve");
    CHECK(c.curve.size() == 1200);
  }

  TEST_CASE("unit sphere") {
    const auto dir = scratch("make_sphere");
    const auto r = cli("make-initial --sphere 1 --n 2 -o " + dir.string());
    REQUIRE(r.code == 0);
    const auto j = load(dir / "admissibility.json");
    CHECK(j.at("admissible") == true);
    CHECK(j.at("bridge_empty") == true);
  }

  TEST_CASE("tube radius out of range exits 1") {
    const auto dir = scratch("make_bad");
    const auto r = cli("make-initial --tube-spheres --c 1.2 -o " + dir.string());
    CHECK(r.code == 1);
    CHECK(r.output.find("invalid-parameter") != std::string::npos);
  }

  TEST_CASE("graph file input") {
    const auto dir = scratch("make_graph");
    std::string text;
    const int count = 801;
    for (int i = 0; i < count; ++i) {
      const double x = -std::cos(M_PI * i / (count - 1));
      const double y = (i == 0 || i == count - 1) ? 0.0 : std::sqrt(1 - x * x);
      text += std::to_string(x) + " " + std::to_string(y) + "\n";
    }
    imcf::io::write_atomic(dir / "graph.txt", text);
    const auto r = cli("make-initial --graph " + (dir / "graph.txt").string() + " --M 400 -o " + dir.string());
    INFO(r.output);
    CHECK(r.code == 0);
    CHECK(load(dir / "admissibility.json").at("star_shaped") == true);
  }

  TEST_CASE("conflicting descriptors are a usage error") {
    CHECK(cli("make-initial --sphere 1 --tube-spheres").code == 1);
    CHECK(cli("no-such-command").code == 1);
  }
}

TEST_SUITE("simulate and verify") {
  TEST_CASE("unit sphere to T = 1") {
    const auto dir = scratch("sim_sphere");
    const auto r = cli("simulate --sphere 1 --n 2 --M 400 --T 1 -o " + (dir / "run").string());
    INFO(r.output);
    REQUIRE(r.code == 0);
    const auto last = imcf::io::read_curve(dir / "run" / "snapshots" / "t=1.000000.curve");
    const double maxf = last.curve.points().rowwise().norm().maxCoeff();
    CHECK(std::abs(maxf - std::exp(0.5)) <= 1e-3);
    CHECK(load(dir / "run" / "run.json").at("termination") == "reached-end");

    const auto v = cli("verify " + (dir / "run").string());
    INFO(v.output);
    CHECK(v.code == 0);
    const auto rep = load(dir / "run" / "report.json");
    CHECK(rep.at("width_bound").at("pass") == true);
    CHECK(rep.at("boundary_speed").at("status") == "not_applicable");

    const auto w = cli("report " + (dir / "run").string());
    CHECK(w.code == 0);
    CHECK(w.output.rfind("t,run.minH", 0) == 0);
  }

  TEST_CASE("forced H stop exits 2 with the reason") {
    const auto dir = scratch("sim_stop");
    const auto r = cli("simulate --sphere 1 --M 128 --T 1 --h-min-stop 1e6 -o " + dir.string());
    CHECK(r.code == 2);
    CHECK(r.output.find("degenerate-speed") != std::string::npos);
  }

  TEST_CASE("tube-spheres run verifies") {
    const auto dir = scratch("sim_tube");
    const auto r = cli("simulate --tube-spheres --ell 8 --c 0.6 --M 200 --T 1 -o " + dir.string());
    INFO(r.output);
    REQUIRE(r.code == 0);
    const auto v = cli("verify " + dir.string(), "IMCF_THREADS=2");
    INFO(v.output);
    const auto rep = load(dir / "report.json");
    CHECK(rep.at("rot_envelope").at("pass") == true);
    CHECK(rep.at("bridge_gradient").at("pass") == true);
    CHECK(rep.at("star_time").at("pass") == true);
    CHECK(rep.at("maxprin_witness").at("pass") == true);

    // Worker count does not change the report.
    const auto v1 = cli("verify " + dir.string() + " --report " + (dir / "single.json").string(), "IMCF_THREADS=1");
    CHECK(v1.code == v.code);
    CHECK(imcf::io::read_text(dir / "single.json") == imcf::io::read_text(dir / "report.json"));
  }

  TEST_CASE("only selected checks are reported") {
    const auto dir = scratch("sim_only");
    REQUIRE(cli("simulate --sphere 1 --M 128 --T 0.2 -o " + dir.string()).code == 0);
    const auto v = cli("verify " + dir.string() + " --only width_bound,area_growth");
    CHECK(v.code == 0);
    const auto rep = load(dir / "report.json");
    CHECK(rep.size() == 2);
    CHECK(rep.contains("area_growth"));
  }

  TEST_CASE("avoidance with a second trajectory") {
    const auto dir = scratch("sim_pair");
    REQUIRE(cli("simulate --sphere 1 --M 200 --T 0.5 -o " + (dir / "a").string()).code == 0);
    REQUIRE(cli("simulate --sphere 3 --M 200 --T 0.5 -o " + (dir / "b").string()).code == 0);
    const auto v = cli("verify " + (dir / "a").string() + " --second " + (dir / "b").string());
    CHECK(v.code == 0);
    const auto rep = load(dir / "a" / "report.json");
    CHECK(rep.at("avoidance").at("pass") == true);
    CHECK(rep.at("avoidance").at("details").at("distance0").get<double>() == doctest::Approx(2.0).epsilon(1e-3));
  }

  TEST_CASE("single snapshot exits 3") {
    const auto dir = scratch("verify_single");
    imcf::io::write_curve(dir / "snapshots" / "t=0.000000.curve", imcf::make_sphere(1.0, 0.0, 200), 0.0);
    const auto v = cli("verify " + dir.string());
    INFO(v.output);
    CHECK(v.code == 3);
  }

  TEST_CASE("malformed snapshot exits 1") {
    const auto dir = scratch("verify_bad");
    imcf::io::write_atomic(dir / "snapshots" / "t=0.000000.curve", "# imcf-curve n=2 t=0\n1 0\nbroken\n");
    const auto v = cli("verify " + dir.string());
    CHECK(v.code == 1);
    CHECK(v.output.find("parse") != std::string::npos);
  }

  TEST_CASE("TOML config file with command-line override") {
    const auto dir = scratch("config");
    imcf::io::write_atomic(dir / "run.toml", "[simulate]\nsphere = 2.0\nM = 96\nT = 0.3\nsnapshot-every = 0.1\n");
    const auto r = cli("--config " + (dir / "run.toml").string() + " simulate --T 0.2 -o " + (dir / "out").string());
    INFO(r.output);
    REQUIRE(r.code == 0);
    const auto meta = load(dir / "out" / "run.json");
    CHECK(meta.at("config").at("t_end") == 0.2);
    CHECK(meta.at("config").at("samples") == 96);
    CHECK(meta.at("config").at("snapshot_every") == 0.1);
    CHECK(meta.at("snapshots") == 3);
  }

  TEST_CASE("simulate from a curve file") {
    const auto dir = scratch("sim_file");
    REQUIRE(cli("make-initial --sphere 1.5 --M 128 -o " + dir.string()).code == 0);
    const auto r = cli("simulate --initial " + (dir / "initial.curve").string() + " --M 128 --T 0.1 -o " +
                       (dir / "run").string());
    INFO(r.output);
    CHECK(r.code == 0);
  }
}
