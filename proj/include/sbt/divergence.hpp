#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sbt/types.hpp"

namespace sbt {

using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;
using DomainPredicate = std::function<bool(const Vector&)>;

/// Convex (or, for transformed generators, merely differentiable)
/// scalar-valued function phi with its gradient and domain predicate.
///
/// Matrix generators act on column-major flattened d x d matrices; the
/// Euclidean inner product of flattened matrices is tr(A^T B), so every
/// operation below covers trace divergences unchanged.
struct Generator {
  std::string name;
  ScalarField eval;
  VectorField grad;
  DomainPredicate domain;  // empty means "every finite point"

  bool contains(const Vector& x) const;
};

/// Nonvanishing differentiable scalar function g dividing points before
/// phi is applied.
struct Scaler {
  std::string name;
  ScalarField eval;
  VectorField grad;
  DomainPredicate domain;
  bool affine = false;  // g(x) = a^T x + b

  bool contains(const Vector& x) const;
};

/// phi-dagger(x) = g(x) * phi(x / g(x)).
///
/// The gradient is the closed form
///   grad phi-dagger(y) = grad phi(v) + (phi(v) - v^T grad phi(v)) * grad g(y),
/// with v = y / g(y); no finite differences are involved.
class ScaledGenerator {
 public:
  ScaledGenerator(Generator base, Scaler scaler);

  double eval(const Vector& x) const;
  Vector grad(const Vector& x) const;
  /// x in scaler domain, g(x) != 0 and x / g(x) in the base domain.
  bool contains(const Vector& x) const;

  const Generator& base() const { return base_; }
  const Scaler& scaler() const { return scaler_; }

  /// Type-erased view usable wherever a Generator is expected.
  Generator as_generator() const;

 private:
  Generator base_;
  Scaler scaler_;
};

ScaledGenerator scaled_generator(Generator gen, Scaler g);

/// D_phi(x || y) = phi(x) - phi(y) - (x - y)^T grad phi(y).
/// Throws DomainError naming the offending argument, ShapeError on
/// dimension mismatch.
double bregman_divergence(const Generator& gen, const Vector& x, const Vector& y);

/// D_phi(X || Y) = phi(X) - phi(Y) - tr(grad phi(Y)^T (X - Y)) for
/// symmetric matrices. ShapeError for non-square, mismatched or asymmetric
/// input (tolerance 1e-12 * max(1, |A_ij|)); DomainError from the
/// generator's domain predicate.
double trace_divergence(const Generator& gen, const Matrix& x, const Matrix& y);

/// Column-major flattening used by matrix generators.
Vector flatten(const Matrix& m);
/// Inverse of flatten; ShapeError if the size is not a perfect square.
Matrix unflatten(const Vector& v);
/// Throws ShapeError unless m is square and symmetric within tolerance.
void require_symmetric(const Matrix& m, const char* what);

/// max over z = x / g(x) of |phi(z) - z^T grad phi(z)|.
double check_restricted_homogeneity(const Generator& gen, const Scaler& g,
                                    std::span<const Vector> samples);

/// Homogeneity residual at a single point z = x / g(x).
double homogeneity_residual(const Generator& gen, const Scaler& g, const Vector& x);

/// Throws IdentityPreconditionError unless g is affine or phi is restricted
/// positive homogeneous at p / g(p). `arg` names the point in the message.
void require_identity_conditions(const Generator& gen, const Scaler& g, const Vector& p,
                                 const char* arg);

struct IdentityCheck {
  double lhs = 0.0;  // g(x) * D_phi(x/g(x) || y/g(y))
  double rhs = 0.0;  // D_phi-dagger(x || y)
  double absdiff = 0.0;
};

enum class Precondition { enforce, skip };

/// Evaluates both sides of g(x) D_phi(x/g(x) || y/g(y)) = D_phi-dagger(x || y).
///
/// With Precondition::enforce, throws IdentityPreconditionError unless g is
/// affine or the homogeneity residual at x/g(x) and y/g(y) is at most
/// 1e-8 * max(1, |phi(z)|). Precondition::skip is for converse probes.
IdentityCheck verify_scaled_identity(const Generator& gen, const Scaler& g, const Vector& x,
                                     const Vector& y,
                                     Precondition policy = Precondition::enforce);

/// Recursive composition over a chain of scalers g_1..g_k.
struct DeepComposition {
  Scaler gtilde;        // g~_{l,l'}
  Generator phidagger;  // phi-dagger(l')
  Generator inner;      // phi-dagger(l' - l)
  int level = 0;        // l
  int top = 0;          // l'
};

/// Builds g~_{l,l'} and phi-dagger(l') strictly through the recursions
///   g~_{1,l'} = g_{l'},  g~_{l,l'}(x) = g~_{l-1,l'}(x) g_{l'-l+1}(x / g~_{l-1,l'}(x)),
///   phi-dagger(0) = phi, phi-dagger(l)(x) = g_l(x) phi-dagger(l-1)(x / g_l(x)).
/// Levels are 1-based: 1 <= l <= l' <= scalers.size(). Evaluating a
/// composed function where an intermediate scaler vanishes throws
/// DomainError naming the recursion depth.
DeepComposition deep_compose(const Generator& gen, const std::vector<Scaler>& scalers, int level,
                             int top);

/// Both sides of g~(x) D_{phi-dagger(l'-l)}(x/g~(x) || y/g~(y)) = D_{phi-dagger(l')}(x || y).
IdentityCheck verify_deep_identity(const DeepComposition& deep, const Vector& x, const Vector& y);

struct ExpFamKl {
  double scaled_route = 0.0;  // D_phi-dagger(theta' || theta) / Omega(theta')
  double direct_route = 0.0;  // D_phi(theta'_Omega || theta_Omega)
  double absdiff = 0.0;
};

/// KL divergence between two members of a phi-exponential family whose
/// natural parameters are normalised onto the unit Omega-sphere, computed
/// through the transformed generator and directly.
/// Throws IdentityPreconditionError if phi is not restricted positive
/// homogeneous at theta_Omega and theta'_Omega.
ExpFamKl expfam_kl_via_scaled(const Generator& gen, const Scaler& omega, const Vector& theta,
                              const Vector& theta_prime);

// Common building blocks.

/// g(x) = a^T x + b.
Scaler affine_scaler(const Vector& a, double b);
/// g(x) = ||x||_q / W.
Scaler lq_norm_scaler(double q, double W);
/// phi(x) = (offset + ||x||_2^2) / 2.
Generator squared_norm_generator(double offset = 0.0);
/// phi(x) = sum_i x_i log x_i - x_i on the strictly positive orthant.
Generator kl_generator();

}  // namespace sbt
