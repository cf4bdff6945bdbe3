#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace isa {

using DenseVector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

// Caller passed something structurally invalid (bad dimensions, bad config values).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Arithmetic went bad at runtime (non-finite values, iterative breakdown).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input problem data fails a rank or definiteness requirement.
class DegenerateInstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void ensure_finite(const DenseVector& v, const char* what) {
  if (!v.allFinite()) throw NumericalError(std::string(what) + ": non-finite entries");
}

inline void ensure_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw NumericalError(std::string(what) + ": non-finite value");
}

}  // namespace isa
