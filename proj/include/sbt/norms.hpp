#pragma once

#include <cmath>

#include "sbt/types.hpp"

namespace sbt {

/// ||v||_p for p >= 1, computed with max-abs rescaling so that large
/// exponents neither overflow nor underflow.
inline double lp_norm(const Vector& v, double p) {
  const double m = v.cwiseAbs().maxCoeff();
  if (!(m > 0.0)) return 0.0;
  if (p == 2.0) return v.norm();
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]) / m, p);
  return m * std::pow(s, 1.0 / p);
}

/// sign(v) * (|v| / scale)^e componentwise; zero entries map to zero.
inline Vector signed_power(const Vector& v, double scale, double e) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    out[i] = a == 0.0 ? 0.0 : std::copysign(std::pow(a / scale, e), v[i]);
  }
  return out;
}

}  // namespace sbt
