"""Vectorized numpy implementation of log K_nu(x).

Same algorithm as _kernels (Temme series for x <= 2, Steed CF2 for x > 2,
log-rescaled upward recurrence in the order), written over whole arrays with
convergence masks instead of per-element early exits.  Kept in lockstep with
the scalar kernels; the parity test pins the two paths together.
"""

import numpy as np

_EPS = 1.0e-16
_EULER_GAMMA = 0.5772156649015329
_ZETA2 = 1.6449340668482264
_ZETA3 = 1.2020569031595943

try:
    from math import gamma as _gamma_scalar
except ImportError:  # pragma: no cover
    _gamma_scalar = None

_gamma = np.vectorize(_gamma_scalar, otypes=[np.float64])


def _gam_pair(mu):
    mu = np.asarray(mu, dtype=np.float64)
    gam1 = np.empty_like(mu)
    gam2 = np.empty_like(mu)

    small = np.abs(mu) < 1.0e-4
    if np.any(small):
        ms = mu[small]
        s_over_mu = _EULER_GAMMA + _ZETA3 * ms * ms / 3.0
        s = s_over_mu * ms
        damp = np.exp(-0.5 * _ZETA2 * ms * ms)
        gam1[small] = -damp * s_over_mu * (1.0 + s * s / 6.0)
        gam2[small] = damp * np.cosh(s)
    big = ~small
    if np.any(big):
        mb = mu[big]
        rgp = 1.0 / _gamma(1.0 + mb)
        rgm = 1.0 / _gamma(1.0 - mb)
        gam1[big] = (rgm - rgp) / (2.0 * mb)
        gam2[big] = 0.5 * (rgm + rgp)
    gampl = gam2 - mu * gam1
    gammi = gam2 + mu * gam1
    return gam1, gam2, gampl, gammi


def _temme_pair(mu, x):
    half_x = 0.5 * x
    pimu = np.pi * mu
    fact = np.where(np.abs(pimu) < 1.0e-15, 1.0, pimu / np.sin(np.where(pimu == 0.0, 1.0, pimu)))
    d = -np.log(half_x)
    e = mu * d
    fact2 = np.where(np.abs(e) < 1.0e-15, 1.0, np.sinh(e) / np.where(e == 0.0, 1.0, e))
    gam1, gam2, gampl, gammi = _gam_pair(mu)
    ff = fact * (gam1 * np.cosh(e) + gam2 * fact2 * d)
    ksum = ff.copy()
    ee = np.exp(e)
    p = 0.5 * ee / gampl
    q = 0.5 / (ee * gammi)
    c = np.ones_like(x)
    x2 = half_x * half_x
    ksum1 = p.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, 1001):
        if not np.any(active):
            break
        fi = float(i)
        ff = np.where(active, (fi * ff + p + q) / (fi * fi - mu * mu), ff)
        c = np.where(active, c * x2 / fi, c)
        p = np.where(active, p / (fi - mu), p)
        q = np.where(active, q / (fi + mu), q)
        delta = c * ff
        ksum = np.where(active, ksum + delta, ksum)
        ksum1 = np.where(active, ksum1 + c * (p - fi * ff), ksum1)
        active = active & (np.abs(delta) >= np.abs(ksum) * _EPS)
    return ksum, ksum1 * (2.0 / x)


def _cf2_pair_scaled(mu, x):
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25 - mu * mu
    q = a1.copy()
    c = a1.copy()
    a = -a1
    s = 1.0 + q * delh
    active = np.ones(x.shape, dtype=bool)
    for i in range(2, 5001):
        if not np.any(active):
            break
        a = np.where(active, a - 2.0 * (i - 1), a)
        c = np.where(active, -a * c / i, c)
        qnew = (q1 - b * q2) / np.where(a == 0.0, 1.0, a)
        q1 = np.where(active, q2, q1)
        q2 = np.where(active, qnew, q2)
        q = np.where(active, q + c * qnew, q)
        b = np.where(active, b + 2.0, b)
        d = np.where(active, 1.0 / (b + a * d), d)
        delh_new = (b * d - 1.0) * delh
        h = np.where(active, h + delh_new, h)
        delh = np.where(active, delh_new, delh)
        dels = q * delh
        s = np.where(active, s + dels, s)
        active = active & (np.abs(dels / s) >= _EPS)
    h = a1 * h
    k0 = np.sqrt(np.pi / (2.0 * x)) / s
    k1 = k0 * (mu + x + 0.5 - h) / x
    return k0, k1


def log_k(nu, x):
    """log K_nu(x), elementwise over equal-shape float64 arrays."""
    nu = np.asarray(nu, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    anu = np.abs(nu)
    n = (anu + 0.5).astype(np.int64)
    mu = anu - n

    k0 = np.empty_like(x)
    k1 = np.empty_like(x)
    lscale = np.zeros_like(x)

    lo = x <= 2.0
    if np.any(lo):
        k0[lo], k1[lo] = _temme_pair(mu[lo], x[lo])
    hi = ~lo
    if np.any(hi):
        k0[hi], k1[hi] = _cf2_pair_scaled(mu[hi], x[hi])
        lscale[hi] = -x[hi]

    steps = n - 1
    max_steps = int(steps.max()) if steps.size else 0
    two_over_x = 2.0 / x
    for j in range(max_steps):
        act = j < steps
        if not np.any(act):
            break
        knew = k0 + (mu + j + 1) * two_over_x * k1
        k0 = np.where(act, k1, k0)
        k1 = np.where(act, knew, k1)
        grown = act & (k1 > 1.0e280)
        if np.any(grown):
            k0 = np.where(grown, k0 / k1, k0)
            lscale = np.where(grown, lscale + np.log(np.where(grown, k1, 1.0)), lscale)
            k1 = np.where(grown, 1.0, k1)
    return np.where(n == 0, np.log(k0), np.log(k1)) + lscale


def dlog_k_dnu(nu, x):
    """d/dt log K_t(x) at t = nu, central differences, elementwise."""
    nu = np.asarray(nu, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    h = np.maximum(1.0e-6, 1.0e-7 * np.abs(nu))
    return (log_k(nu + h, x) - log_k(nu - h, x)) / (2.0 * h)
