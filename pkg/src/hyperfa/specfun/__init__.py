"""Modified Bessel function of the second kind, log scale, real order.

Public surface:

* log_bessel_k(nu, x)   -- log K_nu(x), scalar or elementwise on arrays
* dlogk_dnu(nu, x)      -- derivative of log K_t(x) in the order t at t = nu

Both accept scalars or broadcastable arrays and dispatch to the compiled
batch kernels or the vectorized numpy path according to the active backend.
scipy's kve is not usable here: it overflows for moderately large order at
small argument (kve(200, 1e-3) is inf), and the order derivative is needed
in closed loop, so the evaluation is done in log scale throughout.
"""

import numpy as np

from .. import backend
from . import _kernels, _vector

__all__ = ["log_bessel_k", "dlogk_dnu"]


def _validate(nu, x):
    nu = np.asarray(nu, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(nu)):
        raise ValueError("order nu must be finite")
    if not (np.all(np.isfinite(x)) and np.all(x > 0.0)):
        raise ValueError("argument x must be finite and positive")
    return np.broadcast_arrays(nu, x)


def _dispatch(scalar_fn, batch_fn, vector_fn, nu, x):
    nu_b, x_b = _validate(nu, x)
    scalar_in = nu_b.ndim == 0
    if backend.using_numba():
        if scalar_in:
            return float(scalar_fn(float(nu_b), float(x_b)))
        # plain owned copies; numba must not see read-only broadcast views
        nu_flat = np.array(nu_b, dtype=np.float64, order="C").ravel()
        x_flat = np.array(x_b, dtype=np.float64, order="C").ravel()
        out = np.empty_like(x_flat)
        batch_fn(nu_flat, x_flat, out)
        return out.reshape(x_b.shape)
    result = vector_fn(np.atleast_1d(nu_b), np.atleast_1d(x_b))
    if scalar_in:
        return float(result[0])
    return result.reshape(x_b.shape)


def log_bessel_k(nu, x):
    """log K_nu(x) for real order nu and x > 0."""
    return _dispatch(_kernels.log_k, _kernels.log_k_batch, _vector.log_k, nu, x)


def dlogk_dnu(nu, x):
    """Derivative of log K_t(x) with respect to the order t, at t = nu."""
    return _dispatch(
        _kernels.dlog_k_dnu, _kernels.dlog_k_dnu_batch, _vector.dlog_k_dnu, nu, x
    )
