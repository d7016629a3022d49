"""Synthetic mixture generators and the adjusted Rand index.

The generators follow a fixed protocol: component locations uniform on a
hypercube of side 200, scale matrices built from the identity by perturbing
the diagonal within [-0.9, 0.9], per-coordinate skewness drawn from
+/-[10, 20], equal component sizes.  Families: gaussian, skew-normal
(Azzalini-style construction), and gh (omega = 1, lambda = 0.5 by default).
"""

from dataclasses import dataclass

import numpy as np

from . import ghd
from .rng import substream

__all__ = ["SimDesign", "Partition", "generate", "ari"]

_FAMILIES = ("gaussian", "skew-normal", "gh")


@dataclass(frozen=True)
class SimDesign:
    family: str
    p: int
    G: int
    n_per_component: int
    hypercube_side: float = 200.0
    skew_range: tuple = (10.0, 20.0)
    gh_omega: float = 1.0
    gh_lambda: float = 0.5
    seed: int = 0
    # diagonal-only scales by default; set True for a random-rotation variant
    correlated: bool = False

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"family must be one of {_FAMILIES}, got {self.family!r}")
        if self.p < 1 or self.G < 1 or self.n_per_component < 1:
            raise ValueError("p, G, and n_per_component must be positive")
        if not self.hypercube_side > 0.0:
            raise ValueError("hypercube_side must be positive")
        lo, hi = self.skew_range
        if not 0.0 <= lo <= hi:
            raise ValueError("skew_range must be an interval of non-negative reals")


@dataclass(frozen=True)
class Partition:
    """1-based class labels."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.shape[0] == 0:
            raise ValueError("labels must be a non-empty vector")
        if labels.min() < 1:
            raise ValueError("class indices start at 1")
        object.__setattr__(self, "labels", labels)


def _component_scale(rng, p, correlated):
    # identity with diagonal perturbations in [-0.9, 0.9]; resample any
    # entry that would break positive definiteness
    d = 1.0 + rng.uniform(-0.9, 0.9, size=p)
    while np.any(d <= 1.0e-12):
        bad = d <= 1.0e-12
        d[bad] = 1.0 + rng.uniform(-0.9, 0.9, size=int(bad.sum()))
    if not correlated:
        return np.diag(d)
    basis, _ = np.linalg.qr(rng.standard_normal((p, p)))
    return basis @ np.diag(d) @ basis.T


def _skew_normal_rows(rng, mu, sigma_diag, alpha, n):
    # Azzalini construction per coordinate: delta |Z0| + sqrt(1-delta^2) Z1,
    # scaled by the coordinate standard deviation
    delta = alpha / np.sqrt(1.0 + alpha * alpha)
    sd = np.sqrt(sigma_diag)
    z0 = np.abs(rng.standard_normal((n, mu.shape[0])))
    z1 = rng.standard_normal((n, mu.shape[0]))
    return mu + sd * (delta * z0 + np.sqrt(1.0 - delta * delta) * z1)


def generate(design):
    """Draw (data, truth) for the design; bit-reproducible under its seed."""
    p, G, n_g = design.p, design.G, design.n_per_component
    blocks = []
    for g in range(G):
        rng = substream(design.seed, "simulate", g)
        mu = rng.uniform(0.0, design.hypercube_side, size=p)
        sigma = _component_scale(rng, p, design.correlated)
        lo, hi = design.skew_range
        alpha = rng.uniform(lo, hi, size=p) * rng.choice([-1.0, 1.0], size=p)
        if design.family == "gaussian":
            rows = mu + rng.standard_normal((n_g, p)) @ np.linalg.cholesky(sigma).T
        elif design.family == "skew-normal":
            rows = _skew_normal_rows(rng, mu, np.diag(sigma), alpha, n_g)
        else:
            params = ghd.GHParams(mu, alpha, sigma, design.gh_lambda, design.gh_omega)
            rows = ghd.sample(params, rng, n_g)
        blocks.append(rows)
    data = np.vstack(blocks)
    truth = Partition(np.repeat(np.arange(1, G + 1), n_g))
    return data, truth


def _pairs(counts):
    counts = np.asarray(counts, dtype=object)
    return int(sum(int(c) * (int(c) - 1) // 2 for c in counts.ravel()))


def ari(a, b):
    """Hubert-Arabie adjusted Rand index between two partitions.

    Symmetric, invariant to relabeling, 1 for identical partitions; the
    degenerate case where the chance correction removes everything (both
    partitions trivial) is reported as 1.
    """
    la = a.labels if isinstance(a, Partition) else np.asarray(a)
    lb = b.labels if isinstance(b, Partition) else np.asarray(b)
    if la.shape != lb.shape:
        raise ValueError(f"partition lengths differ: {la.shape} vs {lb.shape}")
    n = la.shape[0]
    _, ia = np.unique(la, return_inverse=True)
    _, ib = np.unique(lb, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)

    index = _pairs(table)
    row_pairs = _pairs(table.sum(axis=1))
    col_pairs = _pairs(table.sum(axis=0))
    total = n * (n - 1) // 2
    expected = row_pairs * col_pairs / total if total else 0.0
    maximum = 0.5 * (row_pairs + col_pairs)
    if maximum == expected:
        return 1.0
    return float((index - expected) / (maximum - expected))
