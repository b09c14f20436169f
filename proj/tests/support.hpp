#pragma once

// Curve builders shared by the test suites.

#include <cmath>
#include <numbers>
#include <random>

#include "imcf/curve.hpp"
#include "imcf/resample.hpp"

namespace imcf::testing {

/// Profile of the polar graph rho(theta), theta in [0, pi], densely sampled and
/// resampled to M uniform points. Index 0 is the right pole.
template <typename F>
GeneratingCurve<double> polar_profile(F&& rho, Eigen::Index M, int n = 2, Eigen::Index dense = 4000) {
  PointArray<double> p(dense, 2);
  for (Eigen::Index i = 0; i < dense; ++i) {
    const double th = std::numbers::pi * double(i) / double(dense - 1);
    const double rr = rho(th);
    p(i, 0) = rr * std::cos(th);
    p(i, 1) = rr * std::sin(th);
  }
  p(0, 1) = 0;
  p(dense - 1, 1) = 0;
  return resample_uniform(GeneratingCurve<double>(p, n), M);
}

inline GeneratingCurve<double> ellipse(double ax, double ar, Eigen::Index M, int n = 2) {
  const Eigen::Index dense = 6000;
  PointArray<double> p(dense, 2);
  for (Eigen::Index i = 0; i < dense; ++i) {
    const double th = std::numbers::pi * double(i) / double(dense - 1);
    p(i, 0) = ax * std::cos(th);
    p(i, 1) = ar * std::sin(th);
  }
  p(0, 1) = 0;
  p(dense - 1, 1) = 0;
  return resample_uniform(GeneratingCurve<double>(p, n), M);
}

/// Cylinder of radius R and length L closed by hemispheres, sampled at uniform arc length.
inline GeneratingCurve<double> capsule(double R, double L, Eigen::Index M, int n = 2) {
  const double quarter = std::numbers::pi * R / 2;
  const double total = 2 * quarter + L;
  PointArray<double> p(M, 2);
  for (Eigen::Index i = 0; i < M; ++i) {
    const double s = total * double(i) / double(M - 1);
    if (s <= quarter) {
      const double a = s / R;
      p(i, 0) = L / 2 + R * std::cos(a);
      p(i, 1) = R * std::sin(a);
    } else if (s <= quarter + L) {
      p(i, 0) = L / 2 - (s - quarter);
      p(i, 1) = R;
    } else {
      const double a = (s - quarter - L) / R;
      p(i, 0) = -L / 2 - R * std::sin(a);
      p(i, 1) = R * std::cos(a);
    }
  }
  p(0, 1) = 0;
  p(M - 1, 1) = 0;
  return GeneratingCurve<double>(p, n);
}

/// Polar profile pinched at the equator; its neck has negative mean curvature.
inline GeneratingCurve<double> dumbbell(Eigen::Index M, int n = 2) {
  return polar_profile([](double th) { return 1.0 - 0.5 * std::exp(-std::pow((th - std::numbers::pi / 2) / 0.5, 2)); },
                       M, n);
}

/// Smooth star-shaped blob with a few random low-frequency modes.
inline GeneratingCurve<double> random_blob(std::mt19937& rng, Eigen::Index M, int n = 2) {
  std::uniform_real_distribution<double> amp(-0.02, 0.02);
  std::uniform_real_distribution<double> base(0.7, 2.0);
  const double r0 = base(rng);
  const double a2 = amp(rng), a3 = amp(rng), a4 = amp(rng);
  return polar_profile([=](double th) { return r0 * (1 + a2 * std::cos(2 * th) + a3 * std::cos(3 * th) + a4 * std::cos(4 * th)); },
                       M, n);
}

}  // namespace imcf::testing
