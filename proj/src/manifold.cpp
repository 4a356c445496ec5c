#include "sbt/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sbt/errors.hpp"

namespace sbt {

namespace {

constexpr double kSeriesCut = 1e-4;
// The gradient factors lose ~eps/r^2 relative accuracy; switch earlier.
constexpr double kGradSeriesCut = 1e-3;

void require_finite(const Vector& x, const char* where) {
  if (x.size() == 0) throw ShapeError(std::string(where) + ": empty vector");
  if (!x.allFinite()) throw DomainError(std::string(where) + ": non-finite coordinate");
}

double sphere_radius(const Vector& x, const char* where) {
  require_finite(x, where);
  const double r = x.norm();
  if (!(r < std::numbers::pi)) {
    throw DomainError(std::string(where) + ": ||x|| = " + std::to_string(r) +
                      " is outside the open ball of radius pi");
  }
  return r;
}

double hyper_radius(const Vector& x, const char* where) {
  require_finite(x, where);
  return x.norm();
}

double sinc(double r) {
  if (r < kSeriesCut) return 1.0 - r * r / 6.0 + r * r * r * r / 120.0;
  return std::sin(r) / r;
}

double sinhc(double r) {
  if (r < kSeriesCut) return 1.0 + r * r / 6.0 + r * r * r * r / 120.0;
  return std::sinh(r) / r;
}

double r_cot_r(double r) {
  if (r < kSeriesCut) return 1.0 - r * r / 3.0 - r * r * r * r / 45.0;
  return r * std::cos(r) / std::sin(r);
}

double r_coth_r(double r) {
  if (r < kSeriesCut) return 1.0 + r * r / 3.0 - r * r * r * r / 45.0;
  return r * std::cosh(r) / std::sinh(r);
}

double r_over_sin(double r) {
  if (r < kSeriesCut) return 1.0 + r * r / 6.0 + 7.0 * r * r * r * r / 360.0;
  return r / std::sin(r);
}

double r_over_sinh(double r) {
  if (r < kSeriesCut) return 1.0 - r * r / 6.0 + 7.0 * r * r * r * r / 360.0;
  return r / std::sinh(r);
}

// asinh(s) / s
double asinhc(double s) {
  if (s < kSeriesCut) return 1.0 - s * s / 6.0 + 3.0 * s * s * s * s / 40.0;
  return std::asinh(s) / s;
}

Vector with_last(const Vector& head, double last) {
  Vector out(head.size() + 1);
  out.head(head.size()) = head;
  out[head.size()] = last;
  return out;
}

void require_same_size(const Vector& a, const Vector& b, const char* where) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(where) + ": dimension mismatch " + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()));
  }
}

}  // namespace

Manifold parse_manifold(std::string_view name) {
  if (name == "sphere") return Manifold::sphere;
  if (name == "hyperboloid" || name == "hyper") return Manifold::hyperboloid;
  throw ArgumentError("unknown manifold '" + std::string(name) + "'");
}

std::string_view to_string(Manifold m) {
  return m == Manifold::sphere ? "sphere" : "hyperboloid";
}

double minkowski(const Vector& u, const Vector& v) {
  require_same_size(u, v, "minkowski");
  if (u.size() < 2) throw ShapeError("minkowski: need at least 2 coordinates");
  const Eigen::Index d = u.size() - 1;
  return u.head(d).dot(v.head(d)) - u[d] * v[d];
}

Vector lift_sphere(const Vector& x) {
  const double r = sphere_radius(x, "lift_sphere");
  return with_last(x, r_cot_r(r));
}

double g_sphere(const Vector& x) { return r_over_sin(sphere_radius(x, "g_sphere")); }

Vector g_sphere_grad(const Vector& x) {
  const double r = sphere_radius(x, "g_sphere_grad");
  double factor;
  if (r < kGradSeriesCut) {
    factor = 1.0 / 3.0 + 7.0 * r * r / 90.0;
  } else {
    const double s = std::sin(r);
    factor = (s - r * std::cos(r)) / (r * s * s);
  }
  return factor * x;
}

SpherePoint exp_sphere(const Vector& x) {
  const double r = sphere_radius(x, "exp_sphere");
  return {with_last(sinc(r) * x, std::cos(r))};
}

Vector log_sphere(const SpherePoint& p) {
  const Vector& c = p.coords;
  if (c.size() < 2) throw ShapeError("log_sphere: need at least 2 coordinates");
  require_finite(c, "log_sphere");
  if (std::abs(c.norm() - 1.0) > 1e-8) throw DomainError("log_sphere: point is not on the unit sphere");
  const Eigen::Index d = c.size() - 1;
  const double s = c.head(d).norm();
  if (s == 0.0) {
    if (c[d] < 0.0) throw DomainError("log_sphere: antipode of the tangency point (cut locus)");
    return Vector::Zero(d);
  }
  const double r = std::atan2(s, c[d]);
  return (r / s) * c.head(d);
}

Vector lift_hyper(const Vector& x) {
  const double r = hyper_radius(x, "lift_hyper");
  return with_last(x, r_coth_r(r));
}

double g_hyper(const Vector& x) { return -r_over_sinh(hyper_radius(x, "g_hyper")); }

Vector g_hyper_grad(const Vector& x) {
  const double r = hyper_radius(x, "g_hyper_grad");
  double factor;
  if (r < kGradSeriesCut) {
    factor = -1.0 / 3.0 + 7.0 * r * r / 90.0;
  } else {
    const double s = std::sinh(r);
    factor = (s - r * std::cosh(r)) / (r * s * s);
  }
  return -factor * x;
}

LorentzPoint exp_hyper(const Vector& x) {
  const double r = hyper_radius(x, "exp_hyper");
  return {with_last(sinhc(r) * x, std::cosh(r))};
}

Vector log_hyper(const LorentzPoint& p) {
  const Vector& c = p.coords;
  if (c.size() < 2) throw ShapeError("log_hyper: need at least 2 coordinates");
  require_finite(c, "log_hyper");
  const Eigen::Index d = c.size() - 1;
  if (!(c[d] > 0.0)) throw DomainError("log_hyper: point is not on the upper sheet");
  const double q = minkowski(c, c);
  if (std::abs(q + 1.0) > 1e-8 * std::max(1.0, c[d] * c[d])) {
    throw DomainError("log_hyper: point is not on the hyperboloid <p,p> = -1");
  }
  const double s = c.head(d).norm();
  return asinhc(s) * c.head(d);
}

double geodesic(const SpherePoint& a, const SpherePoint& b) {
  require_same_size(a.coords, b.coords, "geodesic");
  // Chord formulas stay accurate near 0 and near pi, unlike acos(a.b).
  if (a.coords.dot(b.coords) >= 0.0) {
    return 2.0 * std::asin(std::min(1.0, 0.5 * (a.coords - b.coords).norm()));
  }
  return std::numbers::pi - 2.0 * std::asin(std::min(1.0, 0.5 * (a.coords + b.coords).norm()));
}

double geodesic(const LorentzPoint& a, const LorentzPoint& b) {
  require_same_size(a.coords, b.coords, "geodesic");
  const Vector diff = a.coords - b.coords;
  const double m = std::max(0.0, minkowski(diff, diff));
  return 2.0 * std::asinh(0.5 * std::sqrt(m));
}

double geodesic_sphere(const Vector& x, const Vector& y) {
  require_same_size(x, y, "geodesic_sphere");
  return geodesic(exp_sphere(x), exp_sphere(y));
}

double geodesic_hyper(const Vector& x, const Vector& y) {
  require_same_size(x, y, "geodesic_hyper");
  return geodesic(exp_hyper(x), exp_hyper(y));
}

double d_rec(const SpherePoint& a, const SpherePoint& b) {
  const double h = std::sin(0.5 * geodesic(a, b));
  return 2.0 * h * h;
}

double d_rec(const LorentzPoint& a, const LorentzPoint& b) {
  const double h = std::sinh(0.5 * geodesic(a, b));
  return 2.0 * h * h;
}

double d_rec(const Vector& x, const Vector& c, Manifold m) {
  require_same_size(x, c, "d_rec");
  if (m == Manifold::sphere) return d_rec(exp_sphere(x), exp_sphere(c));
  return d_rec(exp_hyper(x), exp_hyper(c));
}

Vector embed(const Vector& x, Manifold m) {
  return m == Manifold::sphere ? exp_sphere(x).coords : exp_hyper(x).coords;
}

Vector unembed(const Vector& p, Manifold m) {
  return m == Manifold::sphere ? log_sphere(SpherePoint{p}) : log_hyper(LorentzPoint{p});
}

double d_rec_embedded(const Vector& a, const Vector& b, Manifold m) {
  if (m == Manifold::sphere) return d_rec(SpherePoint{a}, SpherePoint{b});
  return d_rec(LorentzPoint{a}, LorentzPoint{b});
}

}  // namespace sbt
