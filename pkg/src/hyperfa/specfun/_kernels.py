"""Scalar kernels for log K_nu(x), nu real, compiled with numba when enabled.

Algorithm: reduce to an order mu with |mu| <= 1/2 (K is even in its order),
evaluate the pair K_mu, K_{mu+1} there, then recur upward to |nu|.

* x <= 2  : Temme's series for the pair, unscaled (no overflow risk there).
* x > 2   : Steed's continued fraction (CF2) for the exponentially scaled
            pair e^x K_mu(x), e^x K_{mu+1}(x).

The upward recurrence K_{t+1} = K_{t-1} + (2t/x) K_t is forward-stable and is
renormalized whenever the working pair grows past 1e280, accumulating the log
scale separately, so the result is finite for orders and arguments far past
the float64 range of K itself.
"""

import math

from .. import backend

if backend.NUMBA_AVAILABLE:
    from numba import njit, prange
else:  # plain-python fallback so the module stays importable without numba

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap

    prange = range

_EPS = 1.0e-16
_EULER_GAMMA = 0.5772156649015329
_ZETA2 = 1.6449340668482264
_ZETA3 = 1.2020569031595943


@njit(cache=True, nogil=True)
def _gam_pair(mu):
    # gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), gam2 the even average.
    # Direct gammas cancel badly for tiny mu; switch to a Taylor form there.
    if abs(mu) < 1.0e-4:
        s_over_mu = _EULER_GAMMA + _ZETA3 * mu * mu / 3.0
        s = s_over_mu * mu
        damp = math.exp(-0.5 * _ZETA2 * mu * mu)
        gam1 = -damp * s_over_mu * (1.0 + s * s / 6.0)
        gam2 = damp * math.cosh(s)
    else:
        rgp = 1.0 / math.gamma(1.0 + mu)
        rgm = 1.0 / math.gamma(1.0 - mu)
        gam1 = (rgm - rgp) / (2.0 * mu)
        gam2 = 0.5 * (rgm + rgp)
    gampl = gam2 - mu * gam1
    gammi = gam2 + mu * gam1
    return gam1, gam2, gampl, gammi


@njit(cache=True, nogil=True)
def _temme_pair(mu, x):
    # K_mu(x), K_{mu+1}(x) for x <= 2, |mu| <= 1/2.
    half_x = 0.5 * x
    pimu = math.pi * mu
    if abs(pimu) < 1.0e-15:
        fact = 1.0
    else:
        fact = pimu / math.sin(pimu)
    d = -math.log(half_x)
    e = mu * d
    if abs(e) < 1.0e-15:
        fact2 = 1.0
    else:
        fact2 = math.sinh(e) / e
    gam1, gam2, gampl, gammi = _gam_pair(mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    ksum = ff
    ee = math.exp(e)
    p = 0.5 * ee / gampl
    q = 0.5 / (ee * gammi)
    c = 1.0
    x2 = half_x * half_x
    ksum1 = p
    for i in range(1, 1001):
        fi = float(i)
        ff = (fi * ff + p + q) / (fi * fi - mu * mu)
        c *= x2 / fi
        p /= fi - mu
        q /= fi + mu
        delta = c * ff
        ksum += delta
        ksum1 += c * (p - fi * ff)
        if abs(delta) < abs(ksum) * _EPS:
            break
    return ksum, ksum1 * (2.0 / x)


@njit(cache=True, nogil=True)
def _cf2_pair_scaled(mu, x):
    # e^x K_mu(x), e^x K_{mu+1}(x) for x > 2, |mu| <= 1/2 (Steed's CF2).
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d
    delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25 - mu * mu
    q = a1
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, 5001):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    h = a1 * h
    k0 = math.sqrt(math.pi / (2.0 * x)) / s
    k1 = k0 * (mu + x + 0.5 - h) / x
    return k0, k1


@njit(cache=True, nogil=True)
def log_k(nu, x):
    """log K_nu(x) for real nu and x > 0 (scalar)."""
    anu = abs(nu)
    n = int(anu + 0.5)
    mu = anu - n  # |mu| <= 1/2
    if x <= 2.0:
        k0, k1 = _temme_pair(mu, x)
        lscale = 0.0
    else:
        k0, k1 = _cf2_pair_scaled(mu, x)
        lscale = -x
    if n == 0:
        return math.log(k0) + lscale
    two_over_x = 2.0 / x
    for j in range(n - 1):
        knew = k0 + (mu + j + 1) * two_over_x * k1
        k0 = k1
        k1 = knew
        if k1 > 1.0e280:
            k0 /= k1
            lscale += math.log(k1)
            k1 = 1.0
    return math.log(k1) + lscale


@njit(cache=True, nogil=True)
def dlog_k_dnu(nu, x):
    """d/dt log K_t(x) at t = nu, by central differences on log_k."""
    h = 1.0e-6
    step = 1.0e-7 * abs(nu)
    if step > h:
        h = step
    return (log_k(nu + h, x) - log_k(nu - h, x)) / (2.0 * h)


@njit(cache=True, nogil=True, parallel=True)
def log_k_batch(nu, x, out):
    for i in prange(x.shape[0]):
        out[i] = log_k(nu[i], x[i])


@njit(cache=True, nogil=True, parallel=True)
def dlog_k_dnu_batch(nu, x, out):
    for i in prange(x.shape[0]):
        out[i] = dlog_k_dnu(nu[i], x[i])
