#pragma once

#include <algorithm>
#include <vector>

#include "imcf/common.hpp"

namespace imcf {

/// Natural cubic spline on strictly increasing knots.
template <typename Scalar>
class CubicSpline {
 public:
  using Index = Eigen::Index;

  CubicSpline(Vec<Scalar> knots, Vec<Scalar> values)
      : t_(std::move(knots)), y_(std::move(values)), m2_(Vec<Scalar>::Zero(t_.size())) {
    const Index n = t_.size();
    if (n < 3 || y_.size() != n) throw Error(ErrorKind::kPrecondition, "spline needs >= 3 knots");
    // Thomas algorithm on the interior second derivatives.
    Vec<Scalar> c(n), d(n);
    c.setZero();
    d.setZero();
    for (Index i = 1; i + 1 < n; ++i) {
      const Scalar hl = t_(i) - t_(i - 1);
      const Scalar hr = t_(i + 1) - t_(i);
      if (!(hl > 0) || !(hr > 0)) throw Error(ErrorKind::kPrecondition, "knots not increasing");
      const Scalar a = hl / Scalar(6);
      const Scalar b = (hl + hr) / Scalar(3);
      const Scalar cc = hr / Scalar(6);
      const Scalar rhs = (y_(i + 1) - y_(i)) / hr - (y_(i) - y_(i - 1)) / hl;
      const Scalar denom = b - a * c(i - 1);
      c(i) = cc / denom;
      d(i) = (rhs - a * d(i - 1)) / denom;
    }
    for (Index i = n - 2; i >= 1; --i) m2_(i) = d(i) - c(i) * m2_(i + 1);
  }

  Index interval(Scalar s) const {
    const auto* first = t_.data();
    const auto* last = t_.data() + t_.size();
    Index j = static_cast<Index>(std::upper_bound(first, last, s) - first) - 1;
    return std::clamp<Index>(j, 0, t_.size() - 2);
  }

  Scalar operator()(Scalar s) const { return eval(interval(s), s, 0); }
  Scalar derivative(Scalar s) const { return eval(interval(s), s, 1); }

  /// order 0, 1 or 2 on a known interval
  Scalar eval(Index j, Scalar s, int order) const {
    const Scalar h = t_(j + 1) - t_(j);
    const Scalar a = (t_(j + 1) - s) / h;
    const Scalar b = (s - t_(j)) / h;
    switch (order) {
      case 0:
        return a * y_(j) + b * y_(j + 1) +
               ((a * a * a - a) * m2_(j) + (b * b * b - b) * m2_(j + 1)) * h * h / Scalar(6);
      case 1:
        return (y_(j + 1) - y_(j)) / h +
               ((Scalar(1) - Scalar(3) * a * a) * m2_(j) + (Scalar(3) * b * b - Scalar(1)) * m2_(j + 1)) *
                   h / Scalar(6);
      default:
        return a * m2_(j) + b * m2_(j + 1);
    }
  }

  const Vec<Scalar>& knots() const { return t_; }

 private:
  Vec<Scalar> t_;
  Vec<Scalar> y_;
  Vec<Scalar> m2_;
};

}  // namespace imcf
