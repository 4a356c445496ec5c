#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sbt/catalog.hpp"
#include "sbt/divergence.hpp"
#include "sbt/errors.hpp"
#include "sbt/manifold.hpp"
#include "sbt/rng.hpp"
#include "test_util.hpp"

using sbt::Manifold;
using sbt::Vector;
using std::numbers::pi;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Random tangent vector with norm uniform in (0, rmax).
Vector tangent(sbt::Rng& rng, int d, double rmax) {
  Vector v = rng.normal_vector(d);
  return v * (rmax * rng.uniform_open0() / v.norm());
}

Vector pole(int d) {
  Vector p = Vector::Zero(d + 1);
  p[d] = 1.0;
  return p;
}

}  // namespace

TEST_CASE("sphere lift examples") {
  CHECK((sbt::lift_sphere(vec({0, 0})) - vec({0, 0, 1})).norm() == 0.0);
  CHECK(sbt::g_sphere(vec({0, 0})) == 1.0);
  const Vector l = sbt::lift_sphere(vec({pi / 2, 0}));
  CHECK(l[0] == doctest::Approx(pi / 2));
  CHECK(std::abs(l[2]) < 1e-15);
  CHECK(sbt::g_sphere(vec({pi / 2, 0})) == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK_THROWS_AS(sbt::lift_sphere(vec({pi, 0})), sbt::DomainError);
  CHECK_THROWS_AS(sbt::g_sphere(vec({3.0, 1.0})), sbt::DomainError);
  CHECK((sbt::exp_sphere(vec({0, 0, 0})).coords - pole(3)).norm() == 0.0);
}

TEST_CASE("hyperboloid examples") {
  CHECK((sbt::exp_hyper(vec({0, 0})).coords - pole(2)).norm() == 0.0);
  CHECK(sbt::g_hyper(vec({0, 0})) == -1.0);
  const auto p = sbt::exp_hyper(vec({1, 0}));
  CHECK((p.coords - vec({std::sinh(1.0), 0, std::cosh(1.0)})).norm() < 1e-15);
  CHECK(sbt::geodesic(p, sbt::LorentzPoint{pole(2)}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sbt::geodesic_hyper(vec({1, 0}), vec({0, 0})) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(sbt::log_hyper(sbt::LorentzPoint{vec({1, 0, 1})}), sbt::DomainError);
  CHECK_THROWS_AS(sbt::log_hyper(sbt::LorentzPoint{vec({0, 0, -1})}), sbt::DomainError);
}

TEST_CASE("geodesic and reconstruction examples") {
  CHECK(sbt::geodesic_sphere(vec({pi / 2, 0}), vec({0, pi / 2})) == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(sbt::geodesic_sphere(vec({0.3, 0.2}), vec({0.3, 0.2})) == 0.0);
  CHECK(sbt::geodesic_sphere(vec({pi / 2, 0}), vec({-pi / 2, 0})) == doctest::Approx(pi).epsilon(1e-15));
  CHECK(sbt::d_rec(vec({pi / 2, 0}), vec({-pi / 2, 0}), Manifold::sphere) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sbt::d_rec(vec({0.4, -1.0}), vec({0.4, -1.0}), Manifold::hyperboloid) == 0.0);
  CHECK_THROWS_AS(sbt::log_sphere(sbt::SpherePoint{vec({0, 0, -1})}), sbt::DomainError);
  CHECK(sbt::parse_manifold("hyperboloid") == Manifold::hyperboloid);
  CHECK(sbt::to_string(Manifold::sphere) == "sphere");
  CHECK_THROWS_AS(sbt::parse_manifold("torus"), sbt::ArgumentError);
}

TEST_CASE("maps are inverse and norm preserving") {
  sbt::Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Vector xs = tangent(rng, 3, pi - 0.01);
    const auto ps = sbt::exp_sphere(xs);
    CHECK(std::abs(ps.coords.norm() - 1.0) <= 1e-10);
    CHECK((sbt::lift_sphere(xs) / sbt::g_sphere(xs) - ps.coords).norm() <= 1e-12);
    CHECK((sbt::log_sphere(ps) - xs).norm() <= 1e-9);
    CHECK(std::abs(sbt::geodesic(ps, sbt::SpherePoint{pole(3)}) - xs.norm()) <= 1e-10);

    const Vector xh = tangent(rng, 3, 4.0);
    const auto ph = sbt::exp_hyper(xh);
    CHECK(std::abs(sbt::minkowski(ph.coords, ph.coords) + 1.0) <= 1e-9 * std::max(1.0, ph.coords.squaredNorm()));
    CHECK(ph.coords[3] >= 1.0);
    CHECK((sbt::lift_hyper(xh) / std::abs(sbt::g_hyper(xh)) - ph.coords).norm() <= 1e-12 * ph.coords.norm());
    CHECK((sbt::log_hyper(ph) - xh).norm() <= 1e-9 * std::max(1.0, xh.norm()));
    CHECK(std::abs(sbt::geodesic(ph, sbt::LorentzPoint{pole(3)}) - xh.norm()) <= 1e-10 * std::max(1.0, xh.norm()));
  }
}

TEST_CASE("small radii use stable limits") {
  for (double r : {1e-3, 1e-5, 1e-8, 1e-12}) {
    const Vector x = vec({r, 0});
    CHECK(sbt::g_sphere(x) == doctest::Approx(1.0 + r * r / 6.0).epsilon(1e-14));
    CHECK(sbt::g_hyper(x) == doctest::Approx(-(1.0 - r * r / 6.0)).epsilon(1e-14));
    CHECK(sbt::geodesic_sphere(x, Vector::Zero(2)) == doctest::Approx(r).epsilon(1e-12));
    CHECK(sbt::geodesic_hyper(x, Vector::Zero(2)) == doctest::Approx(r).epsilon(1e-12));
    CHECK((sbt::log_sphere(sbt::exp_sphere(x)) - x).norm() <= 1e-12 * r);
  }
}

TEST_CASE("reconstruction loss equals half the squared chord") {
  sbt::Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const Vector x = tangent(rng, 2, pi - 1e-3);
    const Vector c = tangent(rng, 2, pi - 1e-3);
    const Vector a = sbt::exp_sphere(x).coords;
    const Vector b = sbt::exp_sphere(c).coords;
    const double dr = sbt::d_rec(x, c, Manifold::sphere);
    CHECK(std::abs(dr - 0.5 * (a - b).squaredNorm()) <= 1e-10);
    CHECK(std::abs(dr - (1.0 - std::cos(sbt::geodesic_sphere(x, c)))) <= 1e-10);
    CHECK(dr == doctest::Approx(sbt::d_rec(c, x, Manifold::sphere)).epsilon(1e-12));

    const Vector xh = tangent(rng, 2, 3.0);
    const Vector ch = tangent(rng, 2, 3.0);
    const Vector ah = sbt::exp_hyper(xh).coords;
    const Vector bh = sbt::exp_hyper(ch).coords;
    const double drh = sbt::d_rec(xh, ch, Manifold::hyperboloid);
    CHECK(std::abs(drh - 0.5 * sbt::minkowski(ah - bh, ah - bh)) <= 1e-10 * std::max(1.0, drh));
    CHECK(std::abs(drh - (std::cosh(sbt::geodesic_hyper(xh, ch)) - 1.0)) <= 1e-9 * std::max(1.0, drh));
    CHECK(std::abs(drh - sbt::d_rec(ch, xh, Manifold::hyperboloid)) <= 1e-12 * std::max(1.0, drh));
  }
}

TEST_CASE("reconstruction loss matches the lifted divergence of rows III and IV") {
  sbt::Rng rng(3);
  const auto r3 = sbt::catalog_entry(sbt::RowId::SphereRowIII, {.W = 1.0, .d = 2, .q = 3.0});
  const auto r4 = sbt::catalog_entry(sbt::RowId::HyperRowIV, {.W = 1.0, .d = 2, .q = 3.0});
  for (int i = 0; i < 1000; ++i) {
    const Vector x = tangent(rng, 2, pi - 1e-2);
    const Vector c = tangent(rng, 2, pi - 1e-2);
    const double gen_s = sbt::bregman_divergence(r3.gen, sbt::embed(x, Manifold::sphere), sbt::embed(c, Manifold::sphere));
    CHECK(std::abs(gen_s - sbt::d_rec(x, c, Manifold::sphere)) <= 1e-9 * std::max(1.0, gen_s));

    const Vector xh = tangent(rng, 2, 3.0);
    const Vector ch = tangent(rng, 2, 3.0);
    const double gen_h =
        sbt::bregman_divergence(r4.gen, sbt::embed(xh, Manifold::hyperboloid), sbt::embed(ch, Manifold::hyperboloid));
    CHECK(std::abs(gen_h - sbt::d_rec(xh, ch, Manifold::hyperboloid)) <= 1e-9 * std::max(1.0, gen_h));
    CHECK((sbt::unembed(sbt::embed(xh, Manifold::hyperboloid), Manifold::hyperboloid) - xh).norm() <= 1e-9 * std::max(1.0, xh.norm()));
  }
}

TEST_CASE("scaler gradients match finite differences") {
  sbt::Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const Vector x = tangent(rng, 3, 3.0);
    const Vector ns = testutil::numeric_gradient(sbt::g_sphere, x, 1e-6);
    CHECK(testutil::rel_err(sbt::g_sphere_grad(x), ns) <= 1e-6);
    const Vector nh = testutil::numeric_gradient(sbt::g_hyper, x, 1e-6);
    CHECK(testutil::rel_err(sbt::g_hyper_grad(x), nh) <= 1e-6);
  }
  // Near the origin the analytic gradient tends to zero smoothly.
  CHECK(sbt::g_sphere_grad(vec({1e-9, 0})).norm() < 1e-9);
  CHECK(sbt::g_hyper_grad(vec({1e-9, 0})).norm() < 1e-9);
}
