"""Generalized inverse Gaussian law: density, moments, and sampling.

The GIG(psi, chi, lambda) density on (0, inf) is

    h(y) = (psi/chi)^(lambda/2) y^(lambda-1)
           exp(-(psi*y + chi/y)/2) / (2 K_lambda(sqrt(psi*chi)))

It is the mixing law behind every generalized hyperbolic expectation used in
the E-step, where it appears with shifted index and data-dependent
concentrations.  Moments are ratios of Bessel functions evaluated through
the log-scale backend, so they stay finite for the large-|index| cases that
arise at high dimension.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .specfun import log_bessel_k, dlogk_dnu

# Eq.-level domain floor: the density requires strictly positive psi, chi,
# and the AECM keeps omega well above this.
_PARAM_FLOOR = 1.0e-12


@dataclass(frozen=True)
class GIGParams:
    """Concentration pair (psi, chi) and real index lam.

    omega() and eta() expose the alternative parameterization
    omega = sqrt(psi*chi), eta = sqrt(chi/psi).
    """

    psi: float
    chi: float
    lam: float

    def __post_init__(self):
        for name in ("psi", "chi", "lam"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ValueError(f"{name} must be a finite real, got {v!r}")
        if self.psi < _PARAM_FLOOR or self.chi < _PARAM_FLOOR:
            raise ValueError(
                f"psi and chi must be positive (>= {_PARAM_FLOOR:g}); "
                f"got psi={self.psi!r}, chi={self.chi!r}"
            )

    def omega(self):
        return math.sqrt(self.psi * self.chi)

    def eta(self):
        return math.sqrt(self.chi / self.psi)


class GIGMoments(NamedTuple):
    e_y: float
    e_inv_y: float
    e_log_y: float


def log_density(y, params):
    """Log of the GIG density at y (scalar or array), y > 0 required."""
    y = np.asarray(y, dtype=np.float64)
    if not (np.all(np.isfinite(y)) and np.all(y > 0.0)):
        raise ValueError("y must be finite and positive")
    psi, chi, lam = params.psi, params.chi, params.lam
    norm = 0.5 * lam * (math.log(psi) - math.log(chi)) - math.log(2.0)
    norm -= log_bessel_k(lam, params.omega())
    out = norm + (lam - 1.0) * np.log(y) - 0.5 * (psi * y + chi / y)
    if out.ndim == 0:
        return float(out)
    return out


def moments(params):
    """E[Y], E[1/Y], E[log Y] of the GIG law.

    E[Y]     = sqrt(chi/psi) K_{lam+1}(omega) / K_lam(omega)
    E[1/Y]   = sqrt(psi/chi) K_{lam+1}(omega) / K_lam(omega) - 2 lam / chi
    E[log Y] = (1/2) log(chi/psi) + d/dt log K_t(omega) at t = lam
    """
    psi, chi, lam = params.psi, params.chi, params.lam
    omega = params.omega()
    ratio = math.exp(log_bessel_k(lam + 1.0, omega) - log_bessel_k(lam, omega))
    e_y = math.sqrt(chi / psi) * ratio
    e_inv_y = math.sqrt(psi / chi) * ratio - 2.0 * lam / chi
    e_log_y = 0.5 * (math.log(chi) - math.log(psi)) + dlogk_dnu(lam, omega)
    return GIGMoments(e_y, e_inv_y, e_log_y)


def _log_g(t, lam, beta):
    # unnormalized standardized density t^(lam-1) exp(-beta (t + 1/t) / 2)
    return (lam - 1.0) * np.log(t) - 0.5 * beta * (t + 1.0 / t)


def _mode(lam, beta):
    # argmax of _log_g; the rationalized form avoids cancellation for lam < 1
    if lam >= 1.0:
        return ((lam - 1.0) + math.sqrt((lam - 1.0) ** 2 + beta * beta)) / beta
    return beta / (math.sqrt((lam - 1.0) ** 2 + beta * beta) - (lam - 1.0))


def sample(params, rng, n):
    """Draw n i.i.d. GIG variates using a caller-owned numpy Generator.

    Mode-shifted ratio-of-uniforms (Hormann-Leydold construction): draws
    (u, v) uniformly on the bounding box of {(u, v): 0 < v <= sqrt(g(m+u/v))}
    for the standardized density g with mode m, accepting x = m + u/v.  The
    u-bounds are the two positive roots of a cubic, solved numerically.
    Acceptance is uniformly bounded away from zero across lam for moderate
    beta = sqrt(psi*chi), which covers every use in this package.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    lam = params.lam
    beta = params.omega()
    eta = params.eta()

    m = _mode(lam, beta)
    log_gm = float(_log_g(m, lam, beta))

    # stationary points of (t - m)^2 g(t): cubic with one negative root and
    # the two positive roots bracketing the mode
    coeffs = [1.0, -(m + 2.0 * (lam + 1.0) / beta), 2.0 * m * (lam - 1.0) / beta - 1.0, m]
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) < 1.0e-9 * (1.0 + np.abs(roots.real))].real
    pos = real[real > 0.0]
    t_lo = pos[pos < m]
    t_hi = pos[pos > m]
    if t_lo.size == 0 or t_hi.size == 0:
        raise RuntimeError(
            f"ratio-of-uniforms setup failed for lam={lam}, omega={beta}"
        )
    t_minus = float(t_lo.min())
    t_plus = float(t_hi.max())
    u_minus = (t_minus - m) * math.exp(0.5 * (float(_log_g(t_minus, lam, beta)) - log_gm))
    u_plus = (t_plus - m) * math.exp(0.5 * (float(_log_g(t_plus, lam, beta)) - log_gm))

    out = np.empty(n, dtype=np.float64)
    filled = 0
    rounds = 0
    while filled < n:
        rounds += 1
        if rounds > 1000:
            raise RuntimeError(
                f"GIG sampler stalled for lam={lam}, omega={beta}; "
                "parameters are outside the supported acceptance regime"
            )
        want = n - filled
        k = min(max(4 * want, 256), 4_000_000)
        u = rng.uniform(u_minus, u_plus, size=k)
        v = rng.uniform(0.0, 1.0, size=k)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = m + u / v
            # v == 0 gives t = +/-inf (or nan at u == 0); the finiteness mask
            # rejects those lanes before the log comparison can accept them
            ok = np.isfinite(t) & (t > 0.0)
            ok[ok] = 2.0 * np.log(v[ok]) <= _log_g(t[ok], lam, beta) - log_gm
        accepted = t[ok]
        take = min(accepted.size, want)
        out[filled : filled + take] = accepted[:take]
        filled += take
    return eta * out
