#pragma once

#include <string_view>

#include "sbt/types.hpp"

namespace sbt {

enum class Manifold { sphere, hyperboloid };

Manifold parse_manifold(std::string_view name);
std::string_view to_string(Manifold m);

/// Unit-norm point of S^d embedded in R^{d+1}; the tangency point is the
/// north pole e_{d+1}.
struct SpherePoint {
  Vector coords;
};

/// Point of the upper sheet of the hyperboloid <p,p> = -1 for the
/// Minkowski form <u,v> = sum_{i<=d} u_i v_i - u_{d+1} v_{d+1}.
struct LorentzPoint {
  Vector coords;
};

/// <u, v> = sum_{i<=d} u_i v_i - u_{d+1} v_{d+1}.
double minkowski(const Vector& u, const Vector& v);

// Sphere. Tangent inputs must satisfy ||x||_2 < pi (DomainError otherwise).

/// x^S = [x_1 .. x_d, r cot r], r = ||x||_2.
Vector lift_sphere(const Vector& x);
/// g_S = r / sin r (limit 1 at the origin).
double g_sphere(const Vector& x);
/// Gradient of g_S with respect to the d tangent coordinates.
Vector g_sphere_grad(const Vector& x);
SpherePoint exp_sphere(const Vector& x);
/// Inverse of exp_sphere; DomainError at the cut locus p = -e_{d+1}.
Vector log_sphere(const SpherePoint& p);

// Hyperboloid.

/// x^H = [x_1 .. x_d, r coth r]; the last coordinate is the time-like axis.
Vector lift_hyper(const Vector& x);
/// g_H = -r / sinh r (limit -1 at the origin).
double g_hyper(const Vector& x);
Vector g_hyper_grad(const Vector& x);
/// Upper-sheet exponential map at the pole: [(sinh r / r) x, cosh r]
/// = x^H / |g_H(x)|.
LorentzPoint exp_hyper(const Vector& x);
/// Inverse of exp_hyper; DomainError if p is off the upper sheet.
Vector log_hyper(const LorentzPoint& p);

// Geodesic distances.

double geodesic(const SpherePoint& a, const SpherePoint& b);
double geodesic(const LorentzPoint& a, const LorentzPoint& b);
/// D_G between exp(x) and exp(y) for tangent-plane inputs.
double geodesic_sphere(const Vector& x, const Vector& y);
double geodesic_hyper(const Vector& x, const Vector& y);

// Reconstruction loss: 1 - cos D_G (sphere), cosh D_G - 1 (hyperboloid).

double d_rec(const SpherePoint& a, const SpherePoint& b);
double d_rec(const LorentzPoint& a, const LorentzPoint& b);
double d_rec(const Vector& x, const Vector& c, Manifold m);

/// Embedded coordinates exp(x) in R^{d+1} for either manifold.
Vector embed(const Vector& x, Manifold m);
/// Inverse of embed.
Vector unembed(const Vector& p, Manifold m);
/// D_rec between embedded points.
double d_rec_embedded(const Vector& a, const Vector& b, Manifold m);

}  // namespace sbt
