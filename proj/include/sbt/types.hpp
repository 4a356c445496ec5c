#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace sbt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute-or-relative gap: |a - b| / max(1, |a|).
inline double relative_gap(double a, double b) {
  const double scale = std::abs(a) > 1.0 ? std::abs(a) : 1.0;
  return std::abs(a - b) / scale;
}

}  // namespace sbt
