"""Generalized hyperbolic density and sampling.

Primary parameterization (omega, eta = 1):

    f(x) = [ (omega + delta) / (omega + a'S^-1 a) ]^((lam - p/2)/2)
           K_{lam-p/2}( sqrt((omega + a'S^-1 a)(omega + delta)) )
           / [ (2 pi)^(p/2) |S|^(1/2) K_lam(omega) exp(-(x-mu)'S^-1 a) ]

with delta the squared Mahalanobis distance.  The legacy (chi, phi)
parameterization carries a |S| = 1 identifiability constraint and is kept
only as a checked evaluation path.  All Bessel factors go through the
log-scale backend; raw K underflows already around p = 100.

The scale can be supplied dense or in the factor-analytic form
S = loadings loadings' + diag(noise); the factored path never inverts a
p x p matrix (Woodbury identity plus the matrix determinant lemma).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import gig
from .specfun import log_bessel_k

# smallest admissible diagonal-noise entry; shared with the fitting code,
# which clamps its Psi update at the same value
PSI_NOISE_FLOOR = 1.0e-6

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class FactoredScale:
    """Scale matrix in the form loadings @ loadings.T + diag(noise)."""

    loadings: np.ndarray  # (p, q)
    noise: np.ndarray  # (p,)

    def __post_init__(self):
        loadings = np.ascontiguousarray(self.loadings, dtype=np.float64)
        noise = np.ascontiguousarray(self.noise, dtype=np.float64)
        if loadings.ndim != 2:
            raise ValueError("loadings must be a p x q matrix")
        p, q = loadings.shape
        if not 1 <= q < p:
            raise ValueError(f"need 1 <= q < p, got p={p}, q={q}")
        if noise.shape != (p,):
            raise ValueError("noise must be a length-p vector")
        if not np.all(np.isfinite(loadings)):
            raise ValueError("loadings must be finite")
        if not np.all(np.isfinite(noise)) or np.any(noise < PSI_NOISE_FLOOR):
            raise ValueError(f"noise entries must be >= {PSI_NOISE_FLOOR:g}")
        object.__setattr__(self, "loadings", loadings)
        object.__setattr__(self, "noise", noise)

    @property
    def p(self):
        return self.loadings.shape[0]

    @property
    def q(self):
        return self.loadings.shape[1]

    def dense(self):
        return self.loadings @ self.loadings.T + np.diag(self.noise)


def woodbury_inverse(loadings, noise):
    """Inverse and log-determinant of loadings @ loadings.T + diag(noise).

    Returns (inverse, log_det).  Only a q x q system is factorized:

        inv = D - D L (I_q + L' D L)^-1 L' D,   D = diag(1/noise)
        log_det = log|I_q + L' D L| + sum(log noise)

    Raises ValueError when a noise entry sits below the admissible floor.
    """
    scale = FactoredScale(loadings, noise)
    loadings, noise = scale.loadings, scale.noise
    a = loadings / noise[:, None]  # D L
    m = np.eye(scale.q) + loadings.T @ a
    cho = np.linalg.cholesky(m)
    log_det = 2.0 * np.sum(np.log(np.diag(cho))) + np.sum(np.log(noise))
    # m^-1 (D L)' via two triangular solves
    w = np.linalg.solve(cho, a.T)
    inv = np.diag(1.0 / noise) - w.T @ w
    return inv, float(log_det)


def _as_dense_sigma(sigma):
    if isinstance(sigma, FactoredScale):
        return sigma.dense()
    return np.ascontiguousarray(sigma, dtype=np.float64)


@dataclass(frozen=True)
class GHParams:
    """Location mu, skewness alpha, scale (dense or factored), index lam,
    concentration omega (eta = 1 parameterization)."""

    mu: np.ndarray
    alpha: np.ndarray
    sigma: object  # (p, p) ndarray or FactoredScale
    lam: float
    omega: float

    def __post_init__(self):
        mu = np.ascontiguousarray(self.mu, dtype=np.float64)
        alpha = np.ascontiguousarray(self.alpha, dtype=np.float64)
        if mu.ndim != 1 or alpha.shape != mu.shape:
            raise ValueError("mu and alpha must be equal-length vectors")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(alpha))):
            raise ValueError("mu and alpha must be finite")
        p = mu.shape[0]
        if isinstance(self.sigma, FactoredScale):
            if self.sigma.p != p:
                raise ValueError("factored scale dimension does not match mu")
            sigma = self.sigma
        else:
            sigma = np.ascontiguousarray(self.sigma, dtype=np.float64)
            if sigma.shape != (p, p):
                raise ValueError("sigma must be p x p")
            if not np.all(np.isfinite(sigma)):
                raise ValueError("sigma must be finite")
            if not np.allclose(sigma, sigma.T, rtol=0.0, atol=1.0e-10):
                raise ValueError("sigma must be symmetric")
            try:
                np.linalg.cholesky(sigma)
            except np.linalg.LinAlgError:
                raise ValueError("sigma must be positive definite") from None
        if not (math.isfinite(self.lam) and math.isfinite(self.omega)):
            raise ValueError("lam and omega must be finite")
        if self.omega <= 0.0:
            raise ValueError(f"omega must be positive, got {self.omega!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "sigma", sigma)

    @property
    def p(self):
        return self.mu.shape[0]


def _mahalanobis_terms(x, mu, alpha, sigma):
    """delta_i = (x_i-mu)' S^-1 (x_i-mu), tilt_i = (x_i-mu)' S^-1 alpha,
    a'S^-1 a, and log|S|, for x of shape (n, p)."""
    r = x - mu
    if isinstance(sigma, FactoredScale):
        inv, log_det = woodbury_inverse(sigma.loadings, sigma.noise)
        s = r @ inv
        sig_inv_alpha = inv @ alpha
    else:
        cho = np.linalg.cholesky(sigma)
        log_det = 2.0 * float(np.sum(np.log(np.diag(cho))))
        # S^-1 r_i and S^-1 alpha by triangular solves, no explicit inverse
        w = np.linalg.solve(cho, r.T)
        s = np.linalg.solve(cho.T, w).T
        sig_inv_alpha = np.linalg.solve(cho.T, np.linalg.solve(cho, alpha))
    delta = np.einsum("ij,ij->i", s, r)
    tilt = s @ alpha
    alpha_quad = float(alpha @ sig_inv_alpha)
    return delta, tilt, alpha_quad, log_det


def _log_density_core(x, mu, alpha, sigma, lam, psi_base, chi_base,
                      log_k_norm, extra):
    """Shared evaluation of both parameterizations.

    The Bessel argument is sqrt((psi_base + a'S^-1 a)(chi_base + delta));
    psi_base and chi_base are both omega in the primary parameterization and
    (phi, chi) in the legacy one.  log_k_norm is log K at the normalizing
    index; extra collects parameterization-specific constant terms.
    """
    n, p = x.shape
    delta, tilt, alpha_quad, log_det = _mahalanobis_terms(x, mu, alpha, sigma)
    nu = lam - 0.5 * p
    psi_c = psi_base + alpha_quad
    chi_c = chi_base + delta
    if not np.all(np.isfinite(chi_c)):
        bad = int(np.flatnonzero(~np.isfinite(chi_c))[0])
        raise FloatingPointError(
            f"non-finite squared distance at observation {bad}"
        )
    arg = np.sqrt(psi_c * chi_c)
    out = (
        0.5 * nu * (np.log(chi_c) - math.log(psi_c))
        + log_bessel_k(nu, arg)
        - 0.5 * p * _LOG_2PI
        - 0.5 * log_det
        - log_k_norm
        + tilt
        + extra
    )
    if not np.all(np.isfinite(out)):
        bad = int(np.flatnonzero(~np.isfinite(out))[0])
        raise FloatingPointError(f"non-finite log-density at observation {bad}")
    return out


def _atleast_2d_rows(x, p):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim == 1:
        if x.shape[0] != p:
            raise ValueError(f"x has length {x.shape[0]}, expected {p}")
        return x[None, :], True
    if x.ndim != 2 or x.shape[1] != p:
        raise ValueError(f"x must be (n, {p}), got {x.shape}")
    return x, False


def log_density(x, params):
    """Log GH density of x (p-vector or (n, p) matrix) under params."""
    x, squeeze = _atleast_2d_rows(x, params.p)
    out = _log_density_core(
        x,
        params.mu,
        params.alpha,
        params.sigma,
        params.lam,
        params.omega,
        params.omega,
        log_bessel_k(params.lam, params.omega),
        0.0,
    )
    return float(out[0]) if squeeze else out


def log_density_legacy(x, mu, alpha, sigma, chi, phi, lam):
    """Log GH density in the legacy (chi, phi) parameterization.

    This form is identifiable only under |sigma| = 1; inputs violating the
    constraint by more than 1e-8 are rejected.  Equals log_density under
    omega = sqrt(chi*phi) once sigma and alpha are rescaled by
    eta = sqrt(chi/phi).
    """
    if not (math.isfinite(chi) and chi > 0.0 and math.isfinite(phi) and phi > 0.0):
        raise ValueError("chi and phi must be positive and finite")
    mu = np.ascontiguousarray(mu, dtype=np.float64)
    alpha = np.ascontiguousarray(alpha, dtype=np.float64)
    sigma = _as_dense_sigma(sigma)
    det = np.linalg.det(sigma)
    if abs(det - 1.0) > 1.0e-8:
        raise ValueError(
            f"the (chi, phi) parameterization requires |sigma| = 1; got determinant {det!r}"
        )
    x, squeeze = _atleast_2d_rows(x, mu.shape[0])
    extra = 0.5 * lam * (math.log(phi) - math.log(chi))
    out = _log_density_core(
        x, mu, alpha, sigma, lam, phi, chi,
        log_bessel_k(lam, math.sqrt(chi * phi)), extra,
    )
    return float(out[0]) if squeeze else out


def sample(params, rng, n):
    """Draw n rows X = mu + Y alpha + sqrt(Y) V with Y ~ GIG(omega, omega,
    lam) and V ~ N(0, sigma), using a caller-owned Generator."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    y = gig.sample(gig.GIGParams(params.omega, params.omega, params.lam), rng, n)
    p = params.p
    if isinstance(params.sigma, FactoredScale):
        z = rng.standard_normal((n, params.sigma.q))
        eps = rng.standard_normal((n, p))
        v = z @ params.sigma.loadings.T + eps * np.sqrt(params.sigma.noise)
    else:
        cho = np.linalg.cholesky(params.sigma)
        v = rng.standard_normal((n, p)) @ cho.T
    return params.mu + y[:, None] * params.alpha + np.sqrt(y)[:, None] * v
