"""Numerical backend selection.

The special-function kernels exist in two functionally identical versions: a
scalar one compiled with numba (fast, used for large batches) and a vectorized
pure-numpy one. The active backend is chosen once at import time from the
environment variable ``HYPERFA_BACKEND``:

* ``auto`` (default) -- numba if it is importable, numpy otherwise
* ``numba``          -- require numba, raise if unavailable
* ``numpy``          -- force the pure-numpy path

``set_backend()`` switches at runtime (used by tests and the benchmark).
"""

import os

_VALID = ("auto", "numba", "numpy")

try:
    import numba  # noqa: F401

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

_active = None


def _resolve(name):
    if name not in _VALID:
        raise ValueError(f"unknown backend {name!r}, expected one of {_VALID}")
    if name == "auto":
        return "numba" if NUMBA_AVAILABLE else "numpy"
    if name == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("HYPERFA_BACKEND=numba but numba is not installed")
    return name


def set_backend(name):
    """Select the kernel backend ('auto', 'numba' or 'numpy')."""
    global _active
    _active = _resolve(name)
    return _active


def get_backend():
    """Name of the active backend, 'numba' or 'numpy'."""
    global _active
    if _active is None:
        _active = _resolve(os.environ.get("HYPERFA_BACKEND", "auto"))
    return _active


def using_numba():
    return get_backend() == "numba"
