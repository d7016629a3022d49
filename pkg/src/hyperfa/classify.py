"""Semi-supervised fitting: joint likelihood over labelled and unlabelled rows.

Labelled rows enter the likelihood through their own component term
pi_c f_c(x) and keep a pinned indicator responsibility at every E-step;
unlabelled rows contribute the usual mixture log-sum.  With no labelled
rows at all this collapses exactly to the clustering fit (same code path,
same stream of random numbers).
"""

from dataclasses import dataclass, replace as dc_replace

import numpy as np

from . import mghfa
from .selection import bic

__all__ = ["PartialLabels", "fit_classify", "hold_out_unlabel"]

UNLABELLED = 0


@dataclass(frozen=True)
class PartialLabels:
    """Length-n class labels, 1-based, with 0 marking an unlabelled row."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if labels.ndim != 1:
            raise ValueError("labels must be a vector")
        if np.any(labels < 0):
            raise ValueError("labels must be >= 0 (0 = unlabelled)")
        object.__setattr__(self, "labels", labels)

    @property
    def k(self):
        return int(np.count_nonzero(self.labels))

    def declared_classes(self):
        return np.unique(self.labels[self.labels > 0])


def hold_out_unlabel(labels, fraction, rng):
    """Unlabel each row independently with the given probability.

    labels may be a PartialLabels or a plain vector; the draw is one uniform
    per row, so the realized unlabelled count is binomial.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie strictly between 0 and 1")
    base = labels.labels if isinstance(labels, PartialLabels) else np.asarray(labels)
    out = np.array(base, dtype=np.int64, copy=True)
    drop = rng.uniform(0.0, 1.0, size=out.shape[0]) < fraction
    out[drop] = UNLABELLED
    return PartialLabels(out)


def fit_classify(x, labels, G, q, config=None, *, threads=1):
    """Fit with the class of each labelled row held fixed.

    Component g is anchored to class g (H = G), which removes label
    switching, so no canonical reordering is applied when any row is
    labelled.  Every class 1..G must have at least one labelled row unless
    no row is labelled at all, in which case the result is exactly
    mghfa.fit.  The report's labels keep the given classes on labelled rows
    and carry predictions elsewhere.
    """
    x = mghfa._as_data(x)
    if not isinstance(labels, PartialLabels):
        labels = PartialLabels(labels)
    if labels.labels.shape[0] != x.shape[0]:
        raise ValueError("labels length must match the number of rows")
    if np.any(labels.labels > G):
        raise ValueError(f"labels contain a class above G = {G}")

    if labels.k == 0:
        return mghfa.fit(x, G, q, config, threads=threads)

    present = set(labels.declared_classes().tolist())
    missing = sorted(set(range(1, G + 1)) - present)
    if missing:
        raise ValueError(
            f"classes without a single labelled row: {missing}; "
            "every class needs at least one labelled example"
        )

    config = config or mghfa.FitConfig()
    if config.init == "kmeans":
        config = dc_replace(config, init="given-labels")

    n, p = x.shape
    if not 1 <= q < p:
        raise ValueError(f"need 1 <= q < p, got q={q}, p={p}")
    if n <= G:
        raise ValueError(f"need more observations than components, got n={n}, G={G}")

    fixed = labels.labels - 1  # -1 marks free rows for the E-step
    start_idx, (model, cache, trace, iters, conv), diags = mghfa._run_starts(
        x, G, q, config, fixed=fixed, labels=labels.labels, threads=threads
    )
    hard = cache.zhat.argmax(axis=1) + 1
    return mghfa.FitReport(
        model=model,
        loglik=trace[-1],
        bic=bic(trace[-1], n, p, G, q),
        trace=tuple(trace),
        labels=hard,
        zhat=cache.zhat,
        n_iter=iters,
        converged=conv,
        start_index=start_idx,
        starts=diags,
    )
