#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sbt/errors.hpp"
#include "sbt/lms.hpp"
#include "sbt/norms.hpp"
#include "sbt/rng.hpp"
#include "test_util.hpp"

using sbt::LqConfig;
using sbt::Vector;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Independent oracle: gradient of (1/2)||w||_q^2 by central differences.
Vector fd_grad_phi_q(const Vector& w, double q) {
  return testutil::numeric_gradient([q](const Vector& v) { return 0.5 * std::pow(sbt::lp_norm(v, q), 2.0); }, w,
                                    1e-6);
}

}  // namespace

TEST_CASE("configuration") {
  const auto cfg = LqConfig::from_p(6.9, 2.0);
  CHECK(1.0 / cfg.p + 1.0 / cfg.q == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cfg.W == 2.0);
  CHECK_NOTHROW(cfg.validate());
  CHECK_THROWS_AS((LqConfig{3.0, 3.0, 1.0}).validate(), sbt::ArgumentError);
  CHECK_THROWS_AS((LqConfig{2.0, 2.0, 0.0}).validate(), sbt::ArgumentError);
  CHECK_THROWS_AS(LqConfig::from_p(1.0), sbt::ArgumentError);
}

TEST_CASE("mirror map examples") {
  CHECK((sbt::grad_phi_q(vec({3, 4}), 2.0) - vec({3, 4})).norm() < 1e-15);
  CHECK(sbt::grad_phi_q(Vector::Zero(3), 1.5).norm() == 0.0);
  CHECK((sbt::grad_phi_dagger_q(vec({3, 4}), 2.0, 1.0) - vec({0.6, 0.8})).norm() < 1e-15);
  CHECK(sbt::grad_phi_dagger_q(Vector::Zero(3), 1.5, 1.0).norm() == 0.0);
  const Vector comp = sbt::grad_phi_dagger_q(sbt::grad_phi_dagger_q(vec({1, 1}), 2.0, 2.0), 2.0, 2.0);
  CHECK((comp - vec({std::numbers::sqrt2, std::numbers::sqrt2})).norm() < 1e-14);
  // Zero coordinates with q < 2 stay zero instead of producing inf.
  const Vector sparse = sbt::grad_phi_q(vec({0, 2, 0}), 1.17);
  CHECK(sparse[0] == 0.0);
  CHECK(std::isfinite(sparse[1]));
}

TEST_CASE("mirror map matches finite differences of the squared norm") {
  sbt::Rng rng(1);
  for (double q : {1.5, 2.0, 3.0, 6.9}) {
    for (int i = 0; i < 50; ++i) {
      const Vector w = rng.normal_vector(5);
      CHECK(testutil::rel_err(sbt::grad_phi_q(w, q), fd_grad_phi_q(w, q)) <= 1e-6);
    }
  }
}

TEST_CASE("norm identities and compositions at random points") {
  sbt::Rng rng(2);
  for (double q : {1.17, 1.5, 2.0, 6.9}) {
    const double p = q / (q - 1.0);
    for (double W : {0.5, 1.0, 3.0}) {
      for (int i = 0; i < 1000; ++i) {
        const Vector w = rng.normal_vector(6) * std::exp(rng.normal());
        const double wq = sbt::lp_norm(w, q);
        const double wp = sbt::lp_norm(w, p);
        CHECK(std::abs(sbt::lp_norm(sbt::grad_phi_q(w, q), p) - wq) <= 1e-10 * std::max(1.0, wq));
        CHECK(std::abs(sbt::lp_norm(sbt::grad_phi_dagger_q(w, q, W), p) - W) <= 1e-10 * W);

        const Vector expected = (W / wp) * w;
        const Vector via_dagger = sbt::grad_phi_dagger_q(sbt::grad_phi_dagger_q(w, p, W), q, W);
        const Vector via_plain = sbt::grad_phi_q(sbt::grad_phi_dagger_q(w, p, W), q);
        CHECK(testutil::rel_err(via_dagger, expected) <= 1e-10);
        CHECK(testutil::rel_err(via_plain, expected) <= 1e-10);

        // Plain and dual-norm maps agree on the W-sphere.
        const Vector on_sphere = (W / wq) * w;
        CHECK((sbt::grad_phi_q(on_sphere, q) - sbt::grad_phi_dagger_q(on_sphere, q, W)).norm() <= 1e-10 * std::max(1.0, W));
      }
    }
  }
}

TEST_CASE("p-LMS steps") {
  const auto euclid = LqConfig::from_p(2.0);
  sbt::Rng rng(3);
  auto s = sbt::initial_state(4);
  s.w = rng.normal_vector(4);
  for (int i = 0; i < 100; ++i) {
    const Vector x = rng.normal_vector(4);
    const double y = rng.normal();
    const double eta = 0.1;
    const auto next = sbt::plms_step(s, x, y, eta, euclid);
    const Vector plain = s.w - eta * (s.w.dot(x) - y) * x;
    CHECK((next.w - plain).norm() <= 1e-12 * std::max(1.0, plain.norm()));
    CHECK(next.t == s.t + 1);
    s = next;
  }

  const auto cfg = LqConfig::from_p(3.0);
  const Vector x = vec({1, 2, -1});
  auto st = sbt::initial_state(3);
  st.w = vec({0.3, -0.2, 0.5});
  const double y = st.w.dot(x);
  const auto same = sbt::plms_step(st, x, y, 0.7, cfg);
  CHECK((same.w - st.w).norm() <= 1e-14);

  CHECK(sbt::plms_rate(cfg, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("dual-norm p-LMS steps") {
  const auto euclid = LqConfig::from_p(2.0, 1.0);
  auto s = sbt::initial_state(2);
  s = sbt::dnplms_step(s, vec({1, 0}), 2.0, 0.5, euclid);
  CHECK((s.w - vec({1, 0})).norm() < 1e-15);
  CHECK(s.t == 1);

  // Exact cancellation keeps the weights and is counted.
  auto c = sbt::initial_state(2);
  c = sbt::dnplms_step(c, vec({1, 0}), 0.0, 0.5, euclid);
  CHECK(c.w.norm() == 0.0);
  CHECK(c.cancellations == 1);

  sbt::Rng rng(4);
  for (double p : {1.5, 2.0, 3.0, 6.9}) {
    const auto cfg = LqConfig::from_p(p, 1.7);
    auto st = sbt::initial_state(8);
    for (int t = 0; t < 2000; ++t) {
      Vector x = rng.normal_vector(8);
      x /= sbt::lp_norm(x, p);
      const double y = rng.normal();
      const double res = y - st.w.dot(x);
      const double eta = sbt::adaptive_eta(res, cfg, 1.0);
      // Offset norm is at most W with the adaptive rate.
      CHECK(sbt::lp_norm(eta * (-res) * x, p) <= cfg.W + 1e-12);
      st = sbt::dnplms_step(st, x, y, eta, cfg);
      if (st.w.norm() > 0) CHECK(std::abs(sbt::lp_norm(st.w, cfg.q) - cfg.W) <= 1e-8 * cfg.W);
    }
  }
}

TEST_CASE("adaptive rate and regret bound") {
  const auto cfg = LqConfig::from_p(3.0, 1.0);
  CHECK(sbt::adaptive_eta(1.0, cfg, 2.0) == doctest::Approx(1.0 / 34.0).epsilon(1e-15));
  CHECK(sbt::adaptive_eta(0.0, cfg, 2.0, 0.5) == doctest::Approx(0.5 / 32.0).epsilon(1e-15));
  CHECK(sbt::adaptive_eta(-1.0, cfg, 2.0) == sbt::adaptive_eta(1.0, cfg, 2.0));
  double prev = sbt::adaptive_eta(0.0, cfg, 1.0);
  for (double r = 0.1; r < 10; r += 0.1) {
    const double e = sbt::adaptive_eta(r, cfg, 1.0);
    CHECK(e < prev);
    prev = e;
  }
  CHECK_THROWS_AS(sbt::adaptive_eta(1.0, cfg, 1.0, 0.4), sbt::ArgumentError);
  CHECK_THROWS_AS(sbt::adaptive_eta(1.0, cfg, 1.0, 1.1), sbt::ArgumentError);
  CHECK_THROWS_AS(sbt::adaptive_eta(1.0, cfg, 0.0), sbt::ArgumentError);

  CHECK(sbt::regret_bound(cfg, 1.0, 1.0) == doctest::Approx(56.0).epsilon(1e-15));
  const auto wide = LqConfig::from_p(6.9, 1.0);
  CHECK(sbt::regret_bound(wide, 1.0, 2.0) == doctest::Approx(4 * 5.9 + (16 * 6.9 - 8) + 16).epsilon(1e-14));
  const double slope = sbt::regret_bound(cfg, 1.0, 2.0) - sbt::regret_bound(cfg, 1.0, 1.0);
  CHECK(sbt::regret_bound(cfg, 1.0, 5.0) - sbt::regret_bound(cfg, 1.0, 4.0) == doctest::Approx(slope));
  CHECK_THROWS_AS(sbt::regret_bound(LqConfig::from_p(2.0), 1.0, 1.0), sbt::OutOfRegimeError);
  CHECK_THROWS_AS(sbt::regret_bound(LqConfig::from_p(1.5), 1.0, 1.0), sbt::OutOfRegimeError);
}

TEST_CASE("regret ledger properties") {
  sbt::Rng rng(5);
  const auto cfg = LqConfig::from_p(3.0, 2.0);
  const Vector u = rng.normal_vector(4);
  const Vector u_norm = u * (cfg.W / sbt::lp_norm(u, cfg.q));

  SUBCASE("iterates equal to the normalised comparator") {
    sbt::StepLog log;
    for (int t = 0; t < 50; ++t) {
      const Vector x = rng.normal_vector(4);
      log.push(x, rng.normal(), u_norm.dot(x));
    }
    const auto led = sbt::regret_ledger(log, u, cfg);
    CHECK(led.learner_gap <= 1e-20);
    CHECK(led.regret() <= 0.0);
    CHECK(led.regret() == doctest::Approx(-led.comparator_loss));
  }

  SUBCASE("noiseless labels") {
    sbt::StepLog log;
    for (int t = 0; t < 50; ++t) {
      const Vector x = rng.normal_vector(4);
      log.push(x, u_norm.dot(x), rng.normal());
    }
    CHECK(sbt::regret_ledger(log, u, cfg).comparator_loss <= 1e-20);
    CHECK(sbt::regret_q(log, u, cfg) >= 0.0);
  }

  SUBCASE("scale invariance and exact recomputation") {
    sbt::StepLog log;
    double gap = 0.0;
    double loss = 0.0;
    for (int t = 0; t < 50; ++t) {
      const Vector x = rng.normal_vector(4);
      const double y = rng.normal();
      const double pred = rng.normal();
      log.push(x, y, pred);
      gap += std::pow(u_norm.dot(x) - pred, 2);
      loss += std::pow(u_norm.dot(x) - y, 2);
    }
    const double r = sbt::regret_q(log, u, cfg);
    CHECK(r == doctest::Approx(gap - loss).epsilon(1e-12));
    CHECK(sbt::regret_q(log, 7.5 * u, cfg) == doctest::Approx(r).epsilon(1e-12));
    CHECK_THROWS_AS(sbt::regret_q(log, Vector::Zero(4), cfg), sbt::DomainError);
  }
}

TEST_CASE("stream respects its bounds") {
  sbt::StreamSpec spec;
  spec.d = 10;
  spec.target = sbt::TargetKind::sparse;
  spec.switch_period = 100;
  const auto cfg = LqConfig::from_p(3.0, 1.5);
  sbt::LinearStream stream(spec, cfg, sbt::Rng(6));
  Vector last = stream.target();
  int switches = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto s = stream.next();
    CHECK(sbt::lp_norm(s.x, cfg.p) == doctest::Approx(spec.Xp).epsilon(1e-12));
    CHECK(std::abs(s.y) <= spec.Y);
    CHECK(sbt::lp_norm(stream.target(), cfg.q) == doctest::Approx(cfg.W).epsilon(1e-12));
    CHECK((stream.target().array() != 0.0).count() == 1);
    if ((stream.target() - last).norm() > 0) ++switches;
    last = stream.target();
  }
  CHECK(switches >= 8);
  CHECK(switches <= 10);
}

TEST_CASE("experiment cells") {
  sbt::StreamSpec spec;
  spec.horizon = 3000;
  const auto cfgs = std::vector<LqConfig>{LqConfig::from_p(6.9), LqConfig::from_p(1.5)};
  const auto cells = sbt::run_h2_experiment(spec, cfgs, {0.5, 1.0}, sbt::Rng(7));
  REQUIRE(cells.size() == 4);
  for (const auto& c : cells) {
    CHECK(c.rows.size() == 3000);
    CHECK(c.max_dn_norm_deviation <= 1e-6 * c.cfg.W);
    for (const auto& r : c.rows) {
      CHECK(std::isfinite(r.err_dnplms));
      CHECK_FALSE(std::isnan(r.diff));
      if (c.plms_diverged_at == 0 || r.t < c.plms_diverged_at) {
        CHECK(r.diff == doctest::Approx(r.err_plms - r.err_dnplms));
      } else {
        CHECK(std::isinf(r.err_plms));
      }
    }
  }
  // The Euclidean-rate baseline is unstable when X_p is underestimated at p < 2.
  CHECK(cells[2].plms_diverged_at > 0);
  CHECK(cells[3].plms_diverged_at == 0);
  CHECK(cells[0].file_name() == "dnplms_p6.90_q1.17_rho0.50_dense.csv");

  const auto again = sbt::run_h2_experiment(spec, cfgs, {0.5, 1.0}, sbt::Rng(7));
  CHECK(again[3].rows.back().err_dnplms == cells[3].rows.back().err_dnplms);
}
