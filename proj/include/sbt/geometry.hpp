#pragma once

#include <functional>
#include <span>

#include "sbt/catalog.hpp"
#include "sbt/divergence.hpp"
#include "sbt/rng.hpp"
#include "sbt/types.hpp"

namespace sbt {

/// Bregman ball of the second type {x : D_phi(c || x) <= r}.
struct Ball2 {
  Vector center;
  double radius = 0.0;
  Generator gen;
};

/// D_phi(c || x) <= r + 1e-12. DomainError if x is outside the generator
/// domain, ArgumentError for a negative radius.
bool ball2_contains(const Ball2& ball, const Vector& x);

/// Fraction of samples x whose membership in the phi-dagger ball B'(c, r)
/// equals the membership of x/g(x) in the phi ball B'(c/g(c), r/g(c)).
/// g must be positive at c and at every sample.
double scaled_ball_equivalence(const Generator& gen, const Scaler& g, const Vector& c, double r,
                               std::span<const Vector> samples);

/// D_phi(z || x) - D_phi(z || y).
double bisector1_residual(const Generator& gen, const Vector& x, const Vector& y, const Vector& z);

/// Fraction of samples z for which the sign of the phi-dagger bisector
/// residual matches sign(g(z)) times the sign of the phi residual at the
/// scaled points. Residuals within 1e-10 (scaled by |g(z)| on the
/// phi-dagger side) count as zero.
double bisector_equivalence(const Generator& gen, const Scaler& g, const Vector& x, const Vector& y,
                            std::span<const Vector> samples);

struct ResidualScaling {
  double scaled = 0.0;  // D_phi-dagger(z||x) - D_phi-dagger(z||y)
  double direct = 0.0;  // g(z) [D_phi(z'||x') - D_phi(z'||y')], primes = divided by g
  double relgap = 0.0;  // |scaled - direct| / max(1, |scaled|)
};

ResidualScaling bisector_residual_scaling(const Generator& gen, const Scaler& g, const Vector& x,
                                          const Vector& y, const Vector& z);

/// Point a + t (b - a) with f = 0, found by bisection on t in [0, 1].
/// ArgumentError if f(a) and f(b) have the same strict sign.
Vector bisect_segment(const std::function<double(const Vector&)>& f, const Vector& a,
                      const Vector& b, int max_iter = 200);

struct GeometryReport {
  int samples = 0;
  double residual_max_rel = 0.0;
  double ball_agreement = 0.0;
  double bisector_agreement = 0.0;
};

/// Residual-scaling identity over `samples` random triples, then ball and
/// bisector agreement over `samples` random points, for one catalog row.
/// Rows whose scaler is not positive (IV) skip the ball check and report
/// a ball agreement of NaN.
GeometryReport run_geometry_check(RowId row, int samples, Rng& rng, const CatalogParams& params = {});

}  // namespace sbt
