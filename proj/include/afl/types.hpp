#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace afl {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// User-supplied configuration that fails validation. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape mismatch between a model and the data it is applied to.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// NaN or Inf where a finite value is required.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Synthetic data generation cannot satisfy the requested spec.
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace afl
