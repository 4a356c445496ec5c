#include "sbt/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <utility>

#include "sbt/errors.hpp"
#include "sbt/norms.hpp"

namespace sbt {

namespace {

bool all_finite(const Vector& x) { return x.allFinite(); }

void require_same_size(const Vector& x, const Vector& y, const std::string& who) {
  if (x.size() != y.size()) {
    throw ShapeError(who + ": dimension mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
}

void require_in_domain(const Generator& gen, const Vector& p, const char* arg) {
  if (!gen.contains(p)) {
    throw DomainError("argument " + std::string(arg) + " outside the domain of generator '" +
                      gen.name + "'");
  }
}

void require_in_domain(const Scaler& g, const Vector& p, const char* arg) {
  if (!g.contains(p)) {
    throw DomainError("argument " + std::string(arg) + " outside the domain of scaler '" +
                      g.name + "'");
  }
}

double nonzero_scale(const Scaler& g, const Vector& x, const std::string& where) {
  const double s = g.eval(x);
  if (s == 0.0 || !std::isfinite(s)) {
    throw DomainError(where + ": scaler '" + g.name + "' vanishes or is not finite");
  }
  return s;
}

void require_homogeneous(const Generator& gen, const Scaler& g, const Vector& p, const char* arg) {
  const Vector z = p / g.eval(p);
  const double value = gen.eval(z);
  const double residual = std::abs(value - z.dot(gen.grad(z)));
  if (residual > 1e-8 * std::max(1.0, std::abs(value))) {
    std::ostringstream msg;
    msg << "scaler '" << g.name << "' is not affine and generator '" << gen.name
        << "' is not restricted positive homogeneous at " << arg << "/g(" << arg
        << ") (residual " << residual << ")";
    throw IdentityPreconditionError(msg.str());
  }
}

}  // namespace

bool Generator::contains(const Vector& x) const {
  if (!all_finite(x)) return false;
  return !domain || domain(x);
}

bool Scaler::contains(const Vector& x) const {
  if (!all_finite(x)) return false;
  return !domain || domain(x);
}

ScaledGenerator::ScaledGenerator(Generator base, Scaler scaler)
    : base_(std::move(base)), scaler_(std::move(scaler)) {}

double ScaledGenerator::eval(const Vector& x) const {
  const double g = nonzero_scale(scaler_, x, base_.name + " scaled");
  return g * base_.eval(x / g);
}

Vector ScaledGenerator::grad(const Vector& y) const {
  const double g = nonzero_scale(scaler_, y, base_.name + " scaled");
  const Vector v = y / g;
  const Vector grad_v = base_.grad(v);
  const double slack = base_.eval(v) - v.dot(grad_v);
  return grad_v + slack * scaler_.grad(y);
}

bool ScaledGenerator::contains(const Vector& x) const {
  if (!scaler_.contains(x)) return false;
  const double g = scaler_.eval(x);
  if (g == 0.0 || !std::isfinite(g)) return false;
  return base_.contains(x / g);
}

Generator ScaledGenerator::as_generator() const {
  auto self = std::make_shared<const ScaledGenerator>(*this);
  Generator out;
  out.name = "(" + base_.name + ")^dagger[" + scaler_.name + "]";
  out.eval = [self](const Vector& x) { return self->eval(x); };
  out.grad = [self](const Vector& x) { return self->grad(x); };
  out.domain = [self](const Vector& x) { return self->contains(x); };
  return out;
}

ScaledGenerator scaled_generator(Generator gen, Scaler g) {
  return ScaledGenerator(std::move(gen), std::move(g));
}

double bregman_divergence(const Generator& gen, const Vector& x, const Vector& y) {
  require_same_size(x, y, "bregman_divergence");
  require_in_domain(gen, x, "x");
  require_in_domain(gen, y, "y");
  return gen.eval(x) - gen.eval(y) - (x - y).dot(gen.grad(y));
}

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unflatten(const Vector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) {
    throw ShapeError("unflatten: size " + std::to_string(v.size()) + " is not a square");
  }
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

void require_symmetric(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw ShapeError(std::string(what) + ": matrix is not square");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      const double tol = 1e-12 * std::max(1.0, std::abs(m(i, j)));
      if (std::abs(m(i, j) - m(j, i)) > tol) {
        throw ShapeError(std::string(what) + ": matrix is not symmetric");
      }
    }
  }
}

double trace_divergence(const Generator& gen, const Matrix& x, const Matrix& y) {
  require_symmetric(x, "trace_divergence argument X");
  require_symmetric(y, "trace_divergence argument Y");
  if (x.rows() != y.rows()) throw ShapeError("trace_divergence: dimension mismatch");
  const Vector fx = flatten(x);
  const Vector fy = flatten(y);
  require_in_domain(gen, fx, "X");
  require_in_domain(gen, fy, "Y");
  return gen.eval(fx) - gen.eval(fy) - (fx - fy).dot(gen.grad(fy));
}

double homogeneity_residual(const Generator& gen, const Scaler& g, const Vector& x) {
  const Vector z = x / nonzero_scale(g, x, "homogeneity_residual");
  return std::abs(gen.eval(z) - z.dot(gen.grad(z)));
}

double check_restricted_homogeneity(const Generator& gen, const Scaler& g,
                                    std::span<const Vector> samples) {
  if (samples.empty()) throw ArgumentError("check_restricted_homogeneity: empty sample list");
  double worst = 0.0;
  for (const auto& x : samples) {
    require_in_domain(g, x, "sample");
    worst = std::max(worst, homogeneity_residual(gen, g, x));
  }
  return worst;
}

void require_identity_conditions(const Generator& gen, const Scaler& g, const Vector& p,
                                 const char* arg) {
  require_in_domain(g, p, arg);
  nonzero_scale(g, p, "require_identity_conditions");
  if (!g.affine) require_homogeneous(gen, g, p, arg);
}

IdentityCheck verify_scaled_identity(const Generator& gen, const Scaler& g, const Vector& x,
                                     const Vector& y, Precondition policy) {
  require_same_size(x, y, "verify_scaled_identity");
  require_in_domain(g, x, "x");
  require_in_domain(g, y, "y");
  const double gx = nonzero_scale(g, x, "verify_scaled_identity");
  const double gy = nonzero_scale(g, y, "verify_scaled_identity");
  if (policy == Precondition::enforce && !g.affine) {
    require_homogeneous(gen, g, x, "x");
    require_homogeneous(gen, g, y, "y");
  }
  IdentityCheck out;
  out.lhs = gx * bregman_divergence(gen, x / gx, y / gy);
  const Generator dagger = scaled_generator(gen, g).as_generator();
  out.rhs = bregman_divergence(dagger, x, y);
  out.absdiff = std::abs(out.lhs - out.rhs);
  return out;
}

namespace {

Generator scaler_as_generator(const Scaler& s) { return Generator{s.name, s.eval, s.grad, s.domain}; }

// s'(x) = outer_scale(x) * inner(x / outer_scale(x)), returned as a Scaler.
Scaler compose_scalers(const Scaler& outer_scale, const Scaler& inner, int depth) {
  Scaler base = outer_scale;
  base.name = "g~[depth " + std::to_string(depth) + "]";
  const Generator composed = scaled_generator(scaler_as_generator(inner), base).as_generator();
  Scaler out;
  out.name = composed.name;
  out.eval = composed.eval;
  out.grad = composed.grad;
  out.domain = composed.domain;
  out.affine = outer_scale.affine && inner.affine;
  return out;
}

Generator deep_generator(const Generator& gen, const std::vector<Scaler>& scalers, int level) {
  Generator current = gen;
  for (int l = 1; l <= level; ++l) {
    Scaler g = scalers[static_cast<std::size_t>(l - 1)];
    g.name = "g_" + std::to_string(l) + " (phi-dagger recursion depth " + std::to_string(l) + ")";
    current = scaled_generator(current, g).as_generator();
  }
  return current;
}

}  // namespace

DeepComposition deep_compose(const Generator& gen, const std::vector<Scaler>& scalers, int level,
                             int top) {
  const int k = static_cast<int>(scalers.size());
  if (!(1 <= level && level <= top && top <= k)) {
    throw ArgumentError("deep_compose: need 1 <= l <= l' <= k (l=" + std::to_string(level) +
                        ", l'=" + std::to_string(top) + ", k=" + std::to_string(k) + ")");
  }
  DeepComposition out;
  out.level = level;
  out.top = top;

  Scaler gtilde = scalers[static_cast<std::size_t>(top - 1)];
  for (int l = 2; l <= level; ++l) {
    const Scaler& next = scalers[static_cast<std::size_t>(top - l)];  // g_{l' - (l - 1)}
    gtilde = compose_scalers(gtilde, next, l);
  }
  out.gtilde = std::move(gtilde);
  out.phidagger = deep_generator(gen, scalers, top);
  out.inner = deep_generator(gen, scalers, top - level);
  return out;
}

IdentityCheck verify_deep_identity(const DeepComposition& deep, const Vector& x, const Vector& y) {
  require_same_size(x, y, "verify_deep_identity");
  const double gx = nonzero_scale(deep.gtilde, x, "verify_deep_identity");
  const double gy = nonzero_scale(deep.gtilde, y, "verify_deep_identity");
  IdentityCheck out;
  out.lhs = gx * bregman_divergence(deep.inner, x / gx, y / gy);
  out.rhs = bregman_divergence(deep.phidagger, x, y);
  out.absdiff = std::abs(out.lhs - out.rhs);
  return out;
}

ExpFamKl expfam_kl_via_scaled(const Generator& gen, const Scaler& omega, const Vector& theta,
                              const Vector& theta_prime) {
  require_same_size(theta, theta_prime, "expfam_kl_via_scaled");
  require_in_domain(omega, theta, "theta");
  require_in_domain(omega, theta_prime, "theta_prime");
  if (!omega.affine) {
    require_homogeneous(gen, omega, theta, "theta");
    require_homogeneous(gen, omega, theta_prime, "theta_prime");
  }
  const double om = nonzero_scale(omega, theta, "expfam_kl_via_scaled");
  const double om_prime = nonzero_scale(omega, theta_prime, "expfam_kl_via_scaled");
  const Generator dagger = scaled_generator(gen, omega).as_generator();
  ExpFamKl out;
  out.scaled_route = bregman_divergence(dagger, theta_prime, theta) / om_prime;
  out.direct_route = bregman_divergence(gen, theta_prime / om_prime, theta / om);
  out.absdiff = std::abs(out.scaled_route - out.direct_route);
  return out;
}

Scaler affine_scaler(const Vector& a, double b) {
  Scaler s;
  s.name = "affine";
  s.eval = [a, b](const Vector& x) { return a.dot(x) + b; };
  s.grad = [a](const Vector&) { return a; };
  s.domain = [a, b](const Vector& x) { return x.size() == a.size() && a.dot(x) + b != 0.0; };
  s.affine = true;
  return s;
}

Scaler lq_norm_scaler(double q, double W) {
  Scaler s;
  s.name = "lq_norm/W";
  s.eval = [q, W](const Vector& x) { return lp_norm(x, q) / W; };
  s.grad = [q, W](const Vector& x) {
    const double n = lp_norm(x, q);
    return Vector(signed_power(x, n, q - 1.0) / W);
  };
  s.domain = [](const Vector& x) { return x.cwiseAbs().maxCoeff() > 0.0; };
  return s;
}

Generator squared_norm_generator(double offset) {
  Generator g;
  g.name = "squared_norm";
  g.eval = [offset](const Vector& x) { return 0.5 * (offset + x.squaredNorm()); };
  g.grad = [](const Vector& x) { return x; };
  return g;
}

Generator kl_generator() {
  Generator g;
  g.name = "kl";
  g.eval = [](const Vector& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += x[i] * std::log(x[i]) - x[i];
    return s;
  };
  g.grad = [](const Vector& x) { return Vector(x.array().log()); };
  g.domain = [](const Vector& x) { return x.size() > 0 && x.minCoeff() >= 1e-300; };
  return g;
}

}  // namespace sbt
