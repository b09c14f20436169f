#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace imcf {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Point = Eigen::Matrix<Scalar, 2, 1>;

/// Column 0 holds the axial coordinate x, column 1 the radius r.
template <typename Scalar>
using PointArray = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

enum class ErrorKind {
  kDegenerateInput,
  kPrecondition,
  kInvalidParameter,
  kInvalidProfile,
  kNotAGraph,
  kConstructionFailed,
  kDegenerateSpeed,
  kInvariantBreach,
  kParse,
  kIo,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDegenerateInput: return "degenerate-input";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kInvalidParameter: return "invalid-parameter";
    case ErrorKind::kInvalidProfile: return "invalid-profile";
    case ErrorKind::kNotAGraph: return "not-a-graph";
    case ErrorKind::kConstructionFailed: return "construction-failed";
    case ErrorKind::kDegenerateSpeed: return "degenerate-speed";
    case ErrorKind::kInvariantBreach: return "invariant-breach";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace imcf
