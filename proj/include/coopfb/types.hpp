#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace coopfb {

using Real = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when an iterative solver fails to reach its tolerance. Carries the
/// last measured residual / delta in the message.
struct NumericalFailure : std::runtime_error {
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace coopfb
