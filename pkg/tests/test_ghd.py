"""GH density: parameterization equivalence, normalization, sampling, Woodbury."""

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.stats

from hyperfa import ghd
from hyperfa.rng import substream


def random_spd(rng, p):
    a = rng.standard_normal((p, p))
    return a @ a.T + p * np.eye(p)


def random_params(rng, p, factored=False):
    if factored:
        q = rng.integers(1, p)
        sigma = ghd.FactoredScale(rng.standard_normal((p, q)),
                                  rng.uniform(0.3, 2.0, size=p))
    else:
        sigma = random_spd(rng, p)
    return ghd.GHParams(
        mu=rng.uniform(-3.0, 3.0, size=p),
        alpha=rng.uniform(-1.5, 1.5, size=p),
        sigma=sigma,
        lam=rng.uniform(-2.0, 2.0),
        omega=math.exp(rng.uniform(math.log(0.3), math.log(5.0))),
    )


def test_parameterization_equivalence(rng):
    # (chi, phi) with |sigma0| = 1 maps onto (omega, eta-scaled) exactly
    for _ in range(50):
        p = int(rng.integers(1, 5))
        sigma0 = random_spd(rng, p)
        sigma0 /= np.linalg.det(sigma0) ** (1.0 / p)
        mu = rng.uniform(-2.0, 2.0, size=p)
        alpha0 = rng.uniform(-1.0, 1.0, size=p)
        lam = rng.uniform(-2.0, 2.0)
        chi = math.exp(rng.uniform(math.log(0.2), math.log(5.0)))
        phi = math.exp(rng.uniform(math.log(0.2), math.log(5.0)))
        x = rng.uniform(-4.0, 4.0, size=(6, p))

        legacy = ghd.log_density_legacy(x, mu, alpha0, sigma0, chi, phi, lam)
        eta = math.sqrt(chi / phi)
        primary = ghd.log_density(
            x,
            ghd.GHParams(mu, eta * alpha0, eta * sigma0, lam,
                         math.sqrt(chi * phi)),
        )
        np.testing.assert_allclose(legacy, primary, rtol=1.0e-10, atol=1.0e-10)


def test_legacy_rejects_non_unit_determinant(rng):
    sigma = 2.0 * np.eye(3)
    with pytest.raises(ValueError, match="determinant"):
        ghd.log_density_legacy(np.zeros(3), np.zeros(3), np.zeros(3),
                               sigma, 1.0, 1.0, 0.5)


def test_one_dimensional_normalization():
    for lam in (-1.0, 0.5, 2.0):
        for omega in (0.5, 1.0, 5.0):
            params = ghd.GHParams(np.array([0.3]), np.array([0.4]),
                                  np.array([[1.7]]), lam, omega)
            f = lambda v: math.exp(ghd.log_density(np.array([v]), params))
            total = 0.0
            for lo, hi in ((-np.inf, -20.0), (-20.0, 0.3), (0.3, 30.0), (30.0, np.inf)):
                v, _ = scipy.integrate.quad(f, lo, hi, limit=300)
                total += v
            assert total == pytest.approx(1.0, abs=1.0e-6), (lam, omega)


def test_factored_scale_matches_dense(rng):
    for _ in range(25):
        p = int(rng.integers(2, 7))
        params = random_params(rng, p, factored=True)
        dense = ghd.GHParams(params.mu, params.alpha, params.sigma.dense(),
                             params.lam, params.omega)
        x = rng.uniform(-4.0, 4.0, size=(5, p))
        np.testing.assert_allclose(
            ghd.log_density(x, params), ghd.log_density(x, dense),
            rtol=1.0e-10, atol=1.0e-10,
        )


def test_woodbury_inverse_and_logdet(rng):
    for _ in range(25):
        p = int(rng.integers(2, 9))
        q = int(rng.integers(1, p))
        loadings = rng.standard_normal((p, q))
        noise = rng.uniform(0.2, 3.0, size=p)
        inv, logdet = ghd.woodbury_inverse(loadings, noise)
        dense = loadings @ loadings.T + np.diag(noise)
        np.testing.assert_allclose(inv, np.linalg.inv(dense), rtol=1.0e-9, atol=1.0e-10)
        assert logdet == pytest.approx(np.linalg.slogdet(dense)[1], rel=1.0e-10)


def test_sample_mean_matches_identity(rng):
    # E[X] = mu + E[Y] alpha with Y ~ GIG(omega, omega, lam)
    from hyperfa import gig

    params = random_params(rng, 4, factored=True)
    draws = ghd.sample(params, rng, 400_000)
    e_y = gig.moments(gig.GIGParams(params.omega, params.omega, params.lam)).e_y
    want = params.mu + e_y * params.alpha
    se = draws.std(axis=0) / math.sqrt(draws.shape[0])
    assert np.all(np.abs(draws.mean(axis=0) - want) < 5.0 * se)


def test_sample_reproducible():
    params = ghd.GHParams(np.zeros(2), np.ones(2) * 0.3, np.eye(2), 0.5, 1.0)
    a = ghd.sample(params, substream(3, "simulate", 0), 500)
    b = ghd.sample(params, substream(3, "simulate", 0), 500)
    np.testing.assert_array_equal(a, b)


def test_density_chi_square_gof(rng):
    # one-dimensional GoF at the 1% level with equal-probability bins
    params = ghd.GHParams(np.array([0.4]), np.array([0.6]),
                          np.array([[1.44]]), 0.8, 1.3)
    n = 100_000
    draws = ghd.sample(params, substream(99, "simulate", 0), n)[:, 0]

    grid = np.linspace(-25.0, 35.0, 30_001)
    dens = np.exp(ghd.log_density(grid[:, None], params))
    cdf = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) * 0.5 * np.diff(grid))])
    cdf /= cdf[-1]
    n_bins = 40
    edges = np.interp(np.linspace(0.0, 1.0, n_bins + 1)[1:-1], cdf, grid)
    counts = np.histogram(draws, bins=np.concatenate([[-np.inf], edges, [np.inf]]))[0]
    expected = n / n_bins
    stat = float(((counts - expected) ** 2 / expected).sum())
    assert stat < scipy.stats.chi2.ppf(0.99, n_bins - 1)


def test_rejects_bad_inputs(rng):
    params = random_params(rng, 3)
    with pytest.raises(ValueError):
        ghd.log_density(np.zeros((2, 4)), params)
    with pytest.raises(ValueError):
        ghd.GHParams(np.zeros(3), np.zeros(3), -np.eye(3), 0.5, 1.0)
    with pytest.raises(ValueError):
        ghd.GHParams(np.zeros(3), np.zeros(3), np.eye(3), 0.5, -1.0)
    with pytest.raises(ValueError):
        ghd.FactoredScale(np.zeros((3, 3)), np.ones(3))  # q must be < p


def test_nonfinite_density_is_reported():
    params = ghd.GHParams(np.zeros(2), np.zeros(2), np.eye(2), 0.5, 1.0)
    with pytest.raises(FloatingPointError, match="observation"):
        ghd.log_density(np.full((1, 2), 1.0e308), params)
