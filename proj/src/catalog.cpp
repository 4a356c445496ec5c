#include "sbt/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "sbt/errors.hpp"
#include "sbt/linalg.hpp"
#include "sbt/manifold.hpp"
#include "sbt/norms.hpp"

namespace sbt {

namespace {

constexpr std::array<std::string_view, 8> kLabels = {"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};

double geometric_mean(const Vector& x) { return std::exp(x.array().log().mean()); }

// Eigenvalues of a flattened symmetric PD matrix, or nullopt when the
// vector is not one.
std::optional<EigenDecomposition> spd_eigen(const Vector& v) {
  if (!v.allFinite()) return std::nullopt;
  const auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (side == 0 || side * side != v.size()) return std::nullopt;
  const Matrix m = unflatten(v);
  try {
    EigenDecomposition eig = sym_eigen(m);
    if (!(eig.eigenvalues.minCoeff() > 0.0)) return std::nullopt;
    return eig;
  } catch (const ShapeError&) {
    return std::nullopt;
  }
}

bool is_spd(const Vector& v) { return spd_eigen(v).has_value(); }

EigenDecomposition require_spd(const Vector& v, const char* where) {
  auto eig = spd_eigen(v);
  if (!eig) throw DomainError(std::string(where) + ": not a symmetric positive definite matrix");
  return *std::move(eig);
}

Matrix spectral(const EigenDecomposition& eig, const Vector& mapped) {
  const Matrix out = eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.transpose();
  return 0.5 * (out + out.transpose());
}

bool positive_orthant(const Vector& x) { return x.size() > 0 && x.allFinite() && x.minCoeff() >= 1e-300; }

Vector random_direction(Eigen::Index d, Rng& rng) {
  Vector v = rng.normal_vector(d);
  while (!(v.norm() > 0.0)) v = rng.normal_vector(d);
  return v / v.norm();
}

Vector pad_zero(const Vector& head) {
  Vector out = Vector::Zero(head.size() + 1);
  out.head(head.size()) = head;
  return out;
}

Vector positive_sample(Eigen::Index d, Rng& rng) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = std::exp(rng.normal());
  return v;
}

CatalogEntry row_one(const CatalogParams& p) {
  CatalogEntry e;
  e.gen = squared_norm_generator(1.0);
  e.scaler = lq_norm_scaler(2.0, 1.0);
  e.closed_form = [](const Vector& x, const Vector& y) { return x.norm() - x.dot(y) / y.norm(); };
  e.sample = [d = p.d](Rng& rng) { return Vector(rng.normal_vector(d)); };
  e.domain_desc = "x, y in R^d \\ {0}";
  return e;
}

CatalogEntry row_two(const CatalogParams& p) {
  if (!(p.q > 1.0)) throw ArgumentError("row II needs q > 1");
  if (!(p.W > 0.0)) throw ArgumentError("row II needs W > 0");
  CatalogEntry e;
  e.gen = lq_squared_generator(p.q, p.W);
  e.scaler = lq_norm_scaler(p.q, p.W);
  e.closed_form = [q = p.q, W = p.W](const Vector& x, const Vector& y) {
    const Vector dual = signed_power(y, lp_norm(y, q), q - 1.0);
    return W * lp_norm(x, q) - W * x.dot(dual);
  };
  e.sample = [d = p.d](Rng& rng) { return Vector(rng.normal_vector(d)); };
  e.domain_desc = "x, y in R^d \\ {0}";
  return e;
}

CatalogEntry row_three(const CatalogParams& p) {
  CatalogEntry e;
  e.gen = squared_norm_generator(1.0);
  e.gen.name = "sphere_lift";
  Scaler s;
  s.name = "r/sin r";
  s.eval = [](const Vector& z) { return g_sphere(z.head(z.size() - 1)); };
  s.grad = [](const Vector& z) { return pad_zero(g_sphere_grad(z.head(z.size() - 1))); };
  s.domain = [](const Vector& z) {
    return z.size() >= 2 && z.allFinite() && z.head(z.size() - 1).norm() < std::numbers::pi;
  };
  e.scaler = std::move(s);
  e.lift = [](const Vector& x) { return lift_sphere(x); };
  e.closed_form = [](const Vector& x, const Vector& y) {
    return g_sphere(x) * d_rec(x, y, Manifold::sphere);
  };
  e.sample = [d = p.d](Rng& rng) { return Vector(3.0 * rng.uniform() * random_direction(d, rng)); };
  e.domain_desc = "tangent x, y in R^d with ||x||_2 < pi";
  return e;
}

CatalogEntry row_four(const CatalogParams& p) {
  CatalogEntry e;
  Generator gen;
  gen.name = "hyperboloid_lift";
  gen.eval = [](const Vector& z) { return 0.5 * (-1.0 + minkowski(z, z)); };
  gen.grad = [](const Vector& z) {
    Vector out = z;
    out[z.size() - 1] = -z[z.size() - 1];
    return out;
  };
  gen.domain = [](const Vector& z) { return z.size() >= 2; };
  e.gen = std::move(gen);
  Scaler s;
  s.name = "-r/sinh r";
  s.eval = [](const Vector& z) { return g_hyper(z.head(z.size() - 1)); };
  s.grad = [](const Vector& z) { return pad_zero(g_hyper_grad(z.head(z.size() - 1))); };
  s.domain = [](const Vector& z) { return z.size() >= 2 && z.allFinite(); };
  e.scaler = std::move(s);
  e.lift = [](const Vector& x) { return lift_hyper(x); };
  e.closed_form = [](const Vector& x, const Vector& y) {
    return g_hyper(x) * d_rec(x, y, Manifold::hyperboloid);
  };
  e.sample = [d = p.d](Rng& rng) { return Vector(3.0 * rng.uniform() * random_direction(d, rng)); };
  e.domain_desc = "tangent x, y in R^d";
  return e;
}

CatalogEntry row_five(const CatalogParams& p) {
  CatalogEntry e;
  e.gen = kl_generator();
  e.scaler = affine_scaler(Vector::Ones(p.d), 0.0);
  e.scaler.domain = positive_orthant;
  e.closed_form = [](const Vector& x, const Vector& y) {
    const double sx = x.sum();
    const double sy = y.sum();
    return (x.array() * (x.array() / y.array()).log()).sum() - sx * std::log(sx / sy);
  };
  e.sample = [d = p.d](Rng& rng) { return positive_sample(d, rng); };
  e.domain_desc = "x, y in R^d with strictly positive entries";
  return e;
}

CatalogEntry row_six(const CatalogParams& p) {
  CatalogEntry e;
  e.gen = burg_generator();
  Scaler s;
  s.name = "geometric_mean";
  s.eval = geometric_mean;
  s.grad = [](const Vector& x) {
    const double g = geometric_mean(x);
    return Vector((g / static_cast<double>(x.size())) * x.cwiseInverse());
  };
  s.domain = positive_orthant;
  e.scaler = std::move(s);
  e.closed_form = [](const Vector& x, const Vector& y) {
    const double gx = geometric_mean(x);
    const double gy = geometric_mean(y);
    return gy * (x.array() / y.array()).sum() - static_cast<double>(x.size()) * gx;
  };
  e.sample = [d = p.d](Rng& rng) { return positive_sample(d, rng); };
  e.domain_desc = "x, y in R^d with strictly positive entries";
  return e;
}

CatalogEntry row_seven(const CatalogParams& p) {
  CatalogEntry e;
  e.gen = von_neumann_generator();
  e.scaler = affine_scaler(flatten(Matrix::Identity(p.d, p.d)), 0.0);
  e.scaler.name = "trace";
  e.scaler.domain = is_spd;
  e.closed_form = [](const Vector& x, const Vector& y) {
    const EigenDecomposition ex = require_spd(x, "row VII");
    const EigenDecomposition ey = require_spd(y, "row VII");
    const Vector log_y = flatten(spectral(ey, ey.eigenvalues.array().log().matrix()));
    const double x_log_x = (ex.eigenvalues.array() * ex.eigenvalues.array().log()).sum();
    const double tx = ex.eigenvalues.sum();
    const double ty = ey.eigenvalues.sum();
    return x_log_x - x.dot(log_y) - tx * std::log(tx / ty);
  };
  e.sample = [d = p.d](Rng& rng) { return flatten(random_spd(d, rng)); };
  e.domain_desc = "symmetric positive definite d x d matrices (flattened)";
  return e;
}

CatalogEntry row_eight(const CatalogParams& p) {
  CatalogEntry e;
  e.gen = logdet_generator();
  Scaler s;
  s.name = "det^(1/d)";
  s.eval = [](const Vector& x) {
    const EigenDecomposition eig = require_spd(x, "det^(1/d)");
    return std::exp(eig.eigenvalues.array().log().mean());
  };
  s.grad = [](const Vector& x) {
    const EigenDecomposition eig = require_spd(x, "det^(1/d)");
    const double g = std::exp(eig.eigenvalues.array().log().mean());
    const double side = static_cast<double>(eig.eigenvalues.size());
    return flatten((g / side) * spectral(eig, eig.eigenvalues.cwiseInverse()));
  };
  s.domain = is_spd;
  e.scaler = std::move(s);
  e.closed_form = [](const Vector& x, const Vector& y) {
    const EigenDecomposition ex = require_spd(x, "row VIII");
    const EigenDecomposition ey = require_spd(y, "row VIII");
    const double gx = std::exp(ex.eigenvalues.array().log().mean());
    const double gy = std::exp(ey.eigenvalues.array().log().mean());
    const Vector y_inv = flatten(spectral(ey, ey.eigenvalues.cwiseInverse()));
    return gy * x.dot(y_inv) - static_cast<double>(ex.eigenvalues.size()) * gx;
  };
  e.sample = [d = p.d](Rng& rng) { return flatten(random_spd(d, rng)); };
  e.domain_desc = "symmetric positive definite d x d matrices (flattened)";
  return e;
}

}  // namespace

std::string_view row_label(RowId id) { return kLabels[static_cast<std::size_t>(id)]; }

RowId parse_row(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (std::size_t i = 0; i < kLabels.size(); ++i) {
    if (upper == kLabels[i] || upper == std::to_string(i + 1)) return kAllRows[i];
  }
  throw ArgumentError("unknown catalog row '" + std::string(text) + "'");
}

Generator lq_squared_generator(double q, double W) {
  Generator g;
  g.name = "lq_squared";
  g.eval = [q, W](const Vector& x) {
    const double n = lp_norm(x, q);
    return 0.5 * (W * W + n * n);
  };
  g.grad = [q](const Vector& x) {
    const double n = lp_norm(x, q);
    if (n == 0.0) return Vector(Vector::Zero(x.size()));
    return Vector(n * signed_power(x, n, q - 1.0));
  };
  return g;
}

Generator burg_generator() {
  Generator g;
  g.name = "burg";
  g.eval = [](const Vector& x) { return -static_cast<double>(x.size()) - x.array().log().sum(); };
  g.grad = [](const Vector& x) { return Vector(-x.cwiseInverse()); };
  g.domain = positive_orthant;
  return g;
}

Generator von_neumann_generator() {
  Generator g;
  g.name = "von_neumann";
  g.eval = [](const Vector& x) {
    const EigenDecomposition eig = require_spd(x, "von_neumann");
    const auto l = eig.eigenvalues.array();
    return (l * l.log() - l).sum();
  };
  g.grad = [](const Vector& x) {
    const EigenDecomposition eig = require_spd(x, "von_neumann");
    return flatten(spectral(eig, eig.eigenvalues.array().log().matrix()));
  };
  g.domain = is_spd;
  return g;
}

Generator logdet_generator() {
  Generator g;
  g.name = "logdet";
  g.eval = [](const Vector& x) {
    const EigenDecomposition eig = require_spd(x, "logdet");
    return -static_cast<double>(eig.eigenvalues.size()) - eig.eigenvalues.array().log().sum();
  };
  g.grad = [](const Vector& x) {
    const EigenDecomposition eig = require_spd(x, "logdet");
    return flatten(-spectral(eig, eig.eigenvalues.cwiseInverse()));
  };
  g.domain = is_spd;
  return g;
}

Matrix random_spd(int d, Rng& rng) {
  if (d < 1) throw ArgumentError("random_spd: d must be positive");
  Matrix b(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) b(i, j) = rng.normal();
  Matrix a = b * b.transpose() / static_cast<double>(d) + 0.5 * Matrix::Identity(d, d);
  return 0.5 * (a + a.transpose());
}

CatalogEntry catalog_entry(RowId id, const CatalogParams& params) {
  if (params.d < 1) throw ArgumentError("catalog_entry: d must be positive");
  CatalogEntry e;
  switch (id) {
    case RowId::CosineRowI: e = row_one(params); break;
    case RowId::DualNormRowII: e = row_two(params); break;
    case RowId::SphereRowIII: e = row_three(params); break;
    case RowId::HyperRowIV: e = row_four(params); break;
    case RowId::SimplexKLRowV: e = row_five(params); break;
    case RowId::GeomISRowVI: e = row_six(params); break;
    case RowId::VonNeumannRowVII: e = row_seven(params); break;
    case RowId::LogDetRowVIII: e = row_eight(params); break;
  }
  e.id = id;
  e.params = params;
  if (!e.lift) e.lift = [](const Vector& x) { return x; };
  return e;
}

double closed_form_vs_generic(RowId id, int trials, Rng& rng, const CatalogParams& params) {
  if (trials < 1) throw ArgumentError("closed_form_vs_generic: trials must be >= 1");
  const CatalogEntry e = catalog_entry(id, params);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Vector x = e.sample(rng);
    const Vector y = e.sample(rng);
    const double cf = e.closed_form(x, y);
    const IdentityCheck chk = verify_scaled_identity(e.gen, e.scaler, e.lift(x), e.lift(y));
    worst = std::max({worst, relative_gap(cf, chk.lhs), relative_gap(cf, chk.rhs)});
  }
  return worst;
}

}  // namespace sbt
