import math

import numpy as np
import pytest

import scaled_bregman as sb


def test_squared_norm_divergence():
    d = sb.bregman_divergence(sb.squared_norm_generator(), np.array([1.0, 2.0]), np.array([4.0, 6.0]))
    assert d == pytest.approx(12.5)


def test_kl_divergence():
    d = sb.bregman_divergence(sb.kl_generator(), np.array([1.0, 1.0]), np.array([0.5, 0.5]))
    assert d == pytest.approx(2 * math.log(2) - 1)


def test_domain_error_is_value_error():
    with pytest.raises(sb.DomainError):
        sb.bregman_divergence(sb.kl_generator(), np.array([-1.0, 1.0]), np.array([1.0, 1.0]))
    assert issubclass(sb.DomainError, ValueError)


def test_scaled_identity_affine():
    gen = sb.kl_generator()
    g = sb.affine_scaler(np.array([1.0, 1.0]), 0.0)
    chk = sb.verify_scaled_identity(gen, g, np.array([0.3, 0.7]), np.array([2.0, 0.5]))
    assert chk.absdiff < 1e-12


def test_python_generator():
    gen = sb.Generator("half-square", lambda x: 0.5 * float(x @ x), lambda x: x)
    assert sb.bregman_divergence(gen, np.array([1.0, 2.0]), np.array([4.0, 6.0])) == pytest.approx(12.5)


def test_scaled_generator_is_norm_for_row_one():
    entry = sb.catalog_entry("I", d=3)
    phid = sb.scaled_generator(entry.gen, entry.scaler)
    x = np.array([3.0, 4.0, 0.0])
    assert phid(x) == pytest.approx(5.0)


@pytest.mark.parametrize("row", ["I", "II", "III", "IV", "V", "VI", "VII", "VIII"])
def test_closed_forms_match_generic(row):
    assert sb.closed_form_vs_generic(row, trials=50, seed=3) < 1e-9


def test_unknown_row():
    with pytest.raises(sb.ArgumentError):
        sb.catalog_entry("IX")


def test_manifold_roundtrip_and_drec():
    x = np.array([0.3, -0.4])
    for m in (sb.Manifold.sphere, sb.Manifold.hyperboloid):
        np.testing.assert_allclose(sb.unembed(sb.embed(x, m), m), x, atol=1e-12)
    y = np.array([0.1, 0.2])
    dist = sb.geodesic_sphere(x, y)
    assert sb.d_rec(x, y, sb.Manifold.sphere) == pytest.approx(1 - math.cos(dist))


def test_clustering_seed_never_beats_optimum():
    rng = sb.Rng(5)
    pts = [rng.normal_vector(2) for _ in range(7)]
    opt = sb.brute_force_opt(pts, 2, sb.Manifold.hyperboloid)
    seed = sb.kmeanspp_seed(pts, 2, sb.Manifold.hyperboloid, rng)
    assert seed.potential >= opt.potential - 1e-12
    assert len(opt.labels) == 7


def test_lms_helpers():
    cfg = sb.LqConfig(3.0, 1.0)
    assert cfg.q == pytest.approx(1.5)
    assert sb.regret_bound(cfg, 1.0, 1.0) == pytest.approx(56.0)
    assert sb.adaptive_eta(1.0, cfg, 2.0) == pytest.approx(1.0 / 34.0)
    with pytest.raises(sb.OutOfRegimeError):
        sb.regret_bound(sb.LqConfig(2.0), 1.0, 1.0)
    w = np.array([0.6, -0.8])
    np.testing.assert_allclose(sb.grad_phi_q(w, 2.0), w)


def test_dnplms_run_stays_on_sphere():
    cfg = sb.LqConfig(6.9, 1.0)
    rng = np.random.default_rng(0)
    xs = rng.normal(size=(200, 5))
    xs /= np.linalg.norm(xs, ord=6.9, axis=1, keepdims=True)
    ys = xs @ np.full(5, 0.2)
    ws = sb.dnplms_run(cfg, xs, ys)
    assert ws.shape == (200, 5)
    assert np.all(np.isfinite(ws))


def test_density_ratio_matches_truth_for_true_posterior():
    spec = sb.MixtureSpec(np.array([0.5, 0.3, 0.2]),
                          [np.zeros(2), np.array([1.0, 0.0]), np.array([0.0, 1.0])],
                          np.array([1.0, 0.8, 0.6]))
    x = np.array([0.2, -0.1])
    eta = sb.eta_from_posterior(sb.true_posterior(spec, x), spec.priors)
    np.testing.assert_allclose(sb.density_ratio_estimate(eta), sb.true_density_ratio(spec, x), rtol=1e-10)


def test_reduction_check_with_callable_estimator():
    spec = sb.MixtureSpec(np.array([0.6, 0.4]), [np.zeros(1), np.ones(1)], np.array([1.0, 1.0]))

    def tempered(x):
        p = sb.true_posterior(spec, x) ** 0.8
        return p / p.sum()

    res = sb.reduction_check(spec, tempered, sb.squared_norm_generator(), n_mc=2000, seed=9)
    assert res.within(4.0)


def test_geometry_report():
    rep = sb.geometry_check("I", samples=100, seed=2)
    assert rep.samples == 100
    assert rep.ball_agreement == pytest.approx(1.0)
