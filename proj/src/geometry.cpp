#include "sbt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sbt/errors.hpp"

namespace sbt {

namespace {

constexpr double kMembershipSlack = 1e-12;
constexpr double kZeroBand = 1e-10;

int band_sign(double v, double band) {
  if (std::abs(v) <= band) return 0;
  return v > 0.0 ? 1 : -1;
}

double positive_scale(const Scaler& g, const Vector& x, const char* what) {
  const double s = g.eval(x);
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw IdentityPreconditionError(std::string(what) + ": scaler '" + g.name +
                                    "' must be positive for the ball equivalence");
  }
  return s;
}

}  // namespace

bool ball2_contains(const Ball2& ball, const Vector& x) {
  if (!(ball.radius >= 0.0)) throw ArgumentError("ball2_contains: negative radius");
  return bregman_divergence(ball.gen, ball.center, x) <= ball.radius + kMembershipSlack;
}

double scaled_ball_equivalence(const Generator& gen, const Scaler& g, const Vector& c, double r,
                               std::span<const Vector> samples) {
  if (samples.empty()) throw ArgumentError("scaled_ball_equivalence: no samples");
  require_identity_conditions(gen, g, c, "c");
  const double gc = positive_scale(g, c, "center");
  const Ball2 dagger_ball{c, r, scaled_generator(gen, g).as_generator()};
  const Ball2 base_ball{c / gc, r / gc, gen};
  std::size_t agree = 0;
  for (const auto& x : samples) {
    require_identity_conditions(gen, g, x, "sample");
    const double gx = positive_scale(g, x, "sample");
    if (ball2_contains(dagger_ball, x) == ball2_contains(base_ball, x / gx)) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(samples.size());
}

double bisector1_residual(const Generator& gen, const Vector& x, const Vector& y, const Vector& z) {
  return bregman_divergence(gen, z, x) - bregman_divergence(gen, z, y);
}

double bisector_equivalence(const Generator& gen, const Scaler& g, const Vector& x, const Vector& y,
                            std::span<const Vector> samples) {
  if (samples.empty()) throw ArgumentError("bisector_equivalence: no samples");
  require_identity_conditions(gen, g, x, "x");
  require_identity_conditions(gen, g, y, "y");
  const Generator dagger = scaled_generator(gen, g).as_generator();
  const Vector xs = x / g.eval(x);
  const Vector ys = y / g.eval(y);
  std::size_t agree = 0;
  for (const auto& z : samples) {
    require_identity_conditions(gen, g, z, "z");
    const double gz = g.eval(z);
    const int lhs = band_sign(bisector1_residual(dagger, x, y, z), kZeroBand * std::abs(gz));
    const int rhs = band_sign(bisector1_residual(gen, xs, ys, z / gz), kZeroBand);
    if (lhs == (gz > 0.0 ? rhs : -rhs)) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(samples.size());
}

ResidualScaling bisector_residual_scaling(const Generator& gen, const Scaler& g, const Vector& x,
                                          const Vector& y, const Vector& z) {
  require_identity_conditions(gen, g, x, "x");
  require_identity_conditions(gen, g, y, "y");
  require_identity_conditions(gen, g, z, "z");
  const Generator dagger = scaled_generator(gen, g).as_generator();
  const double gz = g.eval(z);
  ResidualScaling out;
  out.scaled = bisector1_residual(dagger, x, y, z);
  out.direct = gz * bisector1_residual(gen, x / g.eval(x), y / g.eval(y), z / gz);
  out.relgap = relative_gap(out.scaled, out.direct);
  return out;
}

Vector bisect_segment(const std::function<double(const Vector&)>& f, const Vector& a,
                      const Vector& b, int max_iter) {
  double lo = 0.0;
  double hi = 1.0;
  double f_lo = f(a);
  const double f_hi = f(b);
  if (f_lo == 0.0) return a;
  if (f_hi == 0.0) return b;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw ArgumentError("bisect_segment: endpoints do not bracket a root");
  }
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(a + mid * (b - a));
    if (f_mid == 0.0) return a + mid * (b - a);
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return a + (0.5 * (lo + hi)) * (b - a);
}

GeometryReport run_geometry_check(RowId row, int samples, Rng& rng, const CatalogParams& params) {
  if (samples < 1) throw ArgumentError("run_geometry_check: samples must be >= 1");
  const CatalogEntry e = catalog_entry(row, params);
  auto draw = [&e, &rng] { return Vector(e.lift(e.sample(rng))); };

  GeometryReport rep;
  rep.samples = samples;
  for (int i = 0; i < samples; ++i) {
    const Vector x = draw();
    const Vector y = draw();
    const Vector z = draw();
    rep.residual_max_rel =
        std::max(rep.residual_max_rel, bisector_residual_scaling(e.gen, e.scaler, x, y, z).relgap);
  }

  std::vector<Vector> points;
  points.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) points.push_back(draw());

  const Vector c = draw();
  if (e.scaler.eval(c) > 0.0) {
    // Radius halfway between the two middle distortions: about half of the
    // points are inside and none sits on the boundary.
    const Generator dagger = scaled_generator(e.gen, e.scaler).as_generator();
    std::vector<double> dist;
    dist.reserve(points.size());
    for (const auto& p : points) dist.push_back(bregman_divergence(dagger, c, p));
    std::sort(dist.begin(), dist.end());
    const std::size_t mid = dist.size() / 2;
    const double r = std::max(0.0, mid == 0 ? dist[0] : 0.5 * (dist[mid - 1] + dist[mid]));
    rep.ball_agreement = scaled_ball_equivalence(e.gen, e.scaler, c, r, points);
  } else {
    rep.ball_agreement = std::numeric_limits<double>::quiet_NaN();
  }

  const Vector x = draw();
  const Vector y = draw();
  rep.bisector_agreement = bisector_equivalence(e.gen, e.scaler, x, y, points);
  return rep;
}

}  // namespace sbt
