"""log K_nu and its order-derivative against independent identities.

The closed forms, symmetries, and recurrences used here are classical and
computable with nothing but math/scipy; the extended-precision values live
in _frozen.py and come from the integral representation of K_nu.
"""

import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

import _frozen
from hyperfa import backend, specfun


def logk_half_integer(m, x):
    """log K_{m+1/2}(x) via the finite sum: K_{m+1/2}(x) =
    sqrt(pi/(2x)) e^{-x} sum_k (m+k)! / (k! (m-k)! (2x)^k)."""
    s = sum(
        math.factorial(m + k) / (math.factorial(k) * math.factorial(m - k) * (2.0 * x) ** k)
        for k in range(m + 1)
    )
    return 0.5 * math.log(math.pi / (2.0 * x)) - x + math.log(s)


def test_half_integer_closed_forms():
    for m in range(9):
        for x in (0.05, 0.3, 1.0, 4.0, 17.0, 120.0):
            want = logk_half_integer(m, x)
            got = specfun.log_bessel_k(m + 0.5, x)
            assert got == pytest.approx(want, rel=1.0e-12)


def test_evenness_in_order(rng):
    nu = rng.uniform(0.0, 40.0, size=200)
    x = np.exp(rng.uniform(np.log(0.01), np.log(500.0), size=200))
    np.testing.assert_array_equal(
        specfun.log_bessel_k(nu, x), specfun.log_bessel_k(-nu, x)
    )


def test_three_term_recurrence(rng):
    # K_{nu+1} = K_{nu-1} + (2 nu / x) K_nu, all terms positive for nu > 0
    nu = rng.uniform(0.5, 30.0, size=300)
    x = np.exp(rng.uniform(np.log(0.05), np.log(300.0), size=300))
    lk_m = specfun.log_bessel_k(nu - 1.0, x)
    lk_0 = specfun.log_bessel_k(nu, x)
    lk_p = specfun.log_bessel_k(nu + 1.0, x)
    base = np.maximum(lk_m, lk_0)
    rhs = base + np.log(np.exp(lk_m - base) + (2.0 * nu / x) * np.exp(lk_0 - base))
    np.testing.assert_allclose(lk_p, rhs, rtol=1.0e-10)


def test_frozen_extended_precision_logk():
    for nu, x, want in _frozen.LOGK_ORACLE:
        got = specfun.log_bessel_k(nu, x)
        assert got == pytest.approx(want, rel=1.0e-13, abs=1.0e-13)


def test_frozen_integral_representation_dlogk():
    for nu, x, want in _frozen.DLOGK_ORACLE:
        got = specfun.dlogk_dnu(nu, x)
        assert got == pytest.approx(want, abs=1.0e-5)


def test_against_scipy_where_scipy_is_finite(rng):
    nu = rng.uniform(-20.0, 20.0, size=100)
    x = np.exp(rng.uniform(np.log(0.1), np.log(100.0), size=100))
    want = np.log(scipy.special.kv(nu, x))
    got = specfun.log_bessel_k(nu, x)
    np.testing.assert_allclose(got, want, rtol=1.0e-10)


def test_no_overflow_at_large_order_small_argument():
    # the regime where scipy.special.kv overflows to inf
    assert scipy.special.kv(300.0, 0.01) == np.inf
    got = specfun.log_bessel_k(300.0, 0.01)
    assert np.isfinite(got) and got > 1.0e3


def test_scalar_in_scalar_out():
    out = specfun.log_bessel_k(1.5, 2.0)
    assert isinstance(out, float)
    arr = specfun.log_bessel_k(np.array([[1.5, 0.5]]), np.array([[2.0, 2.0]]))
    assert arr.shape == (1, 2)


def test_broadcasting():
    nu = np.array([0.5, 1.5, 2.5])
    out = specfun.log_bessel_k(nu, 2.0)
    assert out.shape == (3,)
    for j, v in enumerate(out):
        assert v == specfun.log_bessel_k(nu[j], 2.0)


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        specfun.log_bessel_k(1.0, 0.0)
    with pytest.raises(ValueError):
        specfun.log_bessel_k(1.0, -2.0)
    with pytest.raises(ValueError):
        specfun.log_bessel_k(np.nan, 1.0)
    with pytest.raises(ValueError):
        specfun.dlogk_dnu(1.0, np.inf)


def test_dlogk_is_odd_in_order(rng):
    # K_{-nu} = K_nu forces d/dnu log K to be odd in nu
    nu = rng.uniform(0.1, 15.0, size=50)
    x = np.exp(rng.uniform(np.log(0.1), np.log(100.0), size=50))
    np.testing.assert_allclose(
        specfun.dlogk_dnu(-nu, x), -specfun.dlogk_dnu(nu, x),
        rtol=1.0e-9, atol=1.0e-9,
    )
    np.testing.assert_allclose(specfun.dlogk_dnu(0.0, 3.0), 0.0, atol=1.0e-9)


@pytest.mark.skipif(not backend.NUMBA_AVAILABLE, reason="numba not installed")
def test_backend_parity(rng):
    nu = rng.uniform(-40.0, 40.0, size=400)
    x = np.exp(rng.uniform(np.log(0.01), np.log(800.0), size=400))
    previous = backend.get_backend()
    try:
        backend.set_backend("numba")
        lk_nb = specfun.log_bessel_k(nu, x)
        dk_nb = specfun.dlogk_dnu(nu, x)
        backend.set_backend("numpy")
        lk_np = specfun.log_bessel_k(nu, x)
        dk_np = specfun.dlogk_dnu(nu, x)
    finally:
        backend.set_backend(previous)
    np.testing.assert_allclose(lk_nb, lk_np, rtol=1.0e-12)
    # the order-derivative is a finite difference; its roundoff floor is
    # eps * |log K| / h, far above the bitwise level
    np.testing.assert_allclose(dk_nb, dk_np, rtol=1.0e-7, atol=1.0e-7)


@settings(max_examples=60, deadline=None)
@given(
    nu=st.floats(min_value=0.5, max_value=25.0),
    x=st.floats(min_value=0.05, max_value=200.0),
)
def test_recurrence_property(nu, x):
    lk_m = specfun.log_bessel_k(nu - 1.0, x)
    lk_0 = specfun.log_bessel_k(nu, x)
    lk_p = specfun.log_bessel_k(nu + 1.0, x)
    base = max(lk_m, lk_0)
    rhs = base + math.log(math.exp(lk_m - base) + (2.0 * nu / x) * math.exp(lk_0 - base))
    assert lk_p == pytest.approx(rhs, rel=1.0e-10)


@settings(max_examples=60, deadline=None)
@given(
    nu=st.floats(min_value=-20.0, max_value=20.0),
    x=st.floats(min_value=0.05, max_value=200.0),
)
def test_log_convexity_in_order(nu, x):
    # K is log-convex in the order (Soni / Ismail): K_nu^2 <= K_{nu-1} K_{nu+1}
    lk_m = specfun.log_bessel_k(nu - 1.0, x)
    lk_0 = specfun.log_bessel_k(nu, x)
    lk_p = specfun.log_bessel_k(nu + 1.0, x)
    assert 2.0 * lk_0 <= lk_m + lk_p + 1.0e-12
