#include <doctest.h>

#include <cmath>
#include <numbers>

#include "imcf/initial_data.hpp"
#include "imcf/resample.hpp"

using namespace imcf;

namespace {

GeneratingCurve<double> semicircle(Eigen::Index m) {
  PointArray<double> p(m, 2);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double th = std::numbers::pi * double(i) / double(m - 1);
    p(i, 0) = std::cos(th);
    p(i, 1) = std::sin(th);
  }
  p(0, 1) = 0;
  p(m - 1, 1) = 0;
  return GeneratingCurve<double>(p, 2);
}

}  // namespace

TEST_CASE("semicircle 33 to 65 samples stays on the circle") {
  const auto out = resample_uniform(semicircle(33), 65);
  REQUIRE(out.size() == 65);
  const double err = (out.points().rowwise().norm().array() - 1).abs().maxCoeff();
  CHECK(err <= 1e-4);
  CHECK(out.spacing_deviation() < 1e-3);
}

TEST_CASE("endpoints are preserved exactly") {
  const auto in = semicircle(50);
  const auto out = resample_uniform(in, 120);
  CHECK(out.x()(0) == in.x()(0));
  CHECK(out.x()(119) == in.x()(49));
  CHECK(out.r()(0) == 0.0);
  CHECK(out.r()(119) == 0.0);
  CHECK((out.r().array() >= 0).all());
}

TEST_CASE("straight segment on the axis is not valid input") {
  PointArray<double> p(4, 2);
  p << 1, 0, 0.5, 0, 0, 0, -1, 0;
  CHECK_THROWS_AS(resample_uniform(GeneratingCurve<double>(p, 2), 40), Error);
  try {
    resample_uniform(GeneratingCurve<double>(p, 2), 40);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDegenerateInput);
  }
}

TEST_CASE("target below 16 is a precondition error") {
  try {
    resample_uniform(semicircle(40), 10);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kPrecondition);
  }
}

TEST_CASE("tube-spheres curve resampled 400 to 800 is uniform within 1%") {
  TubeSpheresParams<double> params;
  params.samples = 400;
  const auto c = make_tube_spheres(params);
  const auto out = resample_uniform(c, 800);
  CHECK(out.spacing_deviation() < 1e-2);
  CHECK(out.length() == doctest::Approx(c.length()).epsilon(1e-3));
}

TEST_CASE("resampling a uniform curve is close to the identity") {
  const auto c = make_sphere(1.0, 0.0, 200);
  const auto out = resample_uniform(c, 200);
  CHECK((out.points() - c.points()).cwiseAbs().maxCoeff() < 1e-9);
}
