"""Model selection over (G, q) grids and the Aitken stopping rule.

BIC is used in the larger-is-better convention 2 loglik - rho log n with

    rho = (G - 1) + G [3p + 2 + pq - q(q - 1)/2]

free parameters: mixing weights, plus per component mu, alpha, noise
(3p), lambda and omega (2), and the loadings net of the q(q-1)/2
rotational indeterminacy.
"""

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SelectionGrid", "AitkenState", "bic", "aitken_converged", "select",
    "write_bic_table", "SelectionError", "BIC_TABLE_COLUMNS",
]

BIC_TABLE_COLUMNS = ("G", "q", "loglik", "rho", "bic", "iters", "status")


class SelectionError(RuntimeError):
    """Every grid cell failed to fit."""


@dataclass(frozen=True)
class SelectionGrid:
    g_range: tuple
    q_range: tuple

    def __post_init__(self):
        g_range = tuple(int(g) for g in self.g_range)
        q_range = tuple(int(q) for q in self.q_range)
        if not g_range or not q_range:
            raise ValueError("g_range and q_range must be non-empty")
        if min(g_range) < 1 or min(q_range) < 1:
            raise ValueError("component and factor counts must be >= 1")
        object.__setattr__(self, "g_range", g_range)
        object.__setattr__(self, "q_range", q_range)


def n_free_parameters(p, G, q):
    return (G - 1) + G * (3 * p + 2 + p * q - q * (q - 1) // 2)


def bic(loglik, n, p, G, q):
    """2 loglik - rho log n; larger is better."""
    if n < 1:
        raise ValueError("n must be positive")
    return 2.0 * loglik - n_free_parameters(p, G, q) * np.log(n)


@dataclass(frozen=True)
class AitkenState:
    """The last three log-likelihood values (oldest first) and the
    convergence threshold."""

    lls: tuple
    epsilon: float

    def __post_init__(self):
        if len(self.lls) != 3 or not all(np.isfinite(v) for v in self.lls):
            raise ValueError("need three finite log-likelihood values")
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")


def aitken_converged(state, variant="next"):
    """Aitken-accelerated stopping decision.

    With trace values (l0, l1, l2) the acceleration is
    a = (l2 - l1)/(l1 - l0) and the extrapolated limit
    l_inf = l1 + (l2 - l1)/(1 - a).  Converged when 0 <= l_inf - l_cmp <
    epsilon, where l_cmp is l2 ("next", default) or l1 ("current"); the
    non-negativity guard skips non-geometric transients (a >= 1).  An
    exactly flat step (l1 == l0) is a plateau and counts as converged.
    """
    if variant not in ("next", "current"):
        raise ValueError(f"unknown variant {variant!r}")
    l0, l1, l2 = state.lls
    denom = l1 - l0
    if denom == 0.0:
        return True
    a = (l2 - l1) / denom
    if a == 1.0:
        return False
    l_inf = l1 + (l2 - l1) / (1.0 - a)
    gap = l_inf - (l2 if variant == "next" else l1)
    return 0.0 <= gap < state.epsilon


def select(x, grid, config, *, threads=1):
    """Fit every (G, q) cell of the grid and pick the BIC winner.

    Returns (best_report, table) where table has one row per cell with
    columns G, q, loglik, rho, bic, iters, status.  Ties in BIC go to the
    smaller G, then the smaller q.  Raises SelectionError when no cell fits.
    """
    from . import mghfa  # local import; mghfa pulls bic/Aitken from here

    x = np.ascontiguousarray(x, dtype=np.float64)
    n, p = x.shape
    if max(grid.q_range) >= p:
        raise ValueError(f"max factor count {max(grid.q_range)} must be < p = {p}")

    cells = [(g, q) for g in grid.g_range for q in grid.q_range]

    def one(cell):
        g, q = cell
        try:
            report = mghfa.fit(x, g, q, config, threads=1)
        except (mghfa.FitError, ValueError) as err:
            return cell, None, {
                "G": g, "q": q, "loglik": float("nan"),
                "rho": n_free_parameters(p, g, q), "bic": float("nan"),
                "iters": 0, "status": f"failed: {err}",
            }
        return cell, report, {
            "G": g, "q": q, "loglik": report.loglik,
            "rho": n_free_parameters(p, g, q), "bic": report.bic,
            "iters": report.n_iter,
            "status": "converged" if report.converged else "max_iter",
        }

    if threads > 1 and len(cells) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, cells))
    else:
        results = [one(cell) for cell in cells]

    order = {cell: i for i, cell in enumerate(cells)}
    results.sort(key=lambda r: order[r[0]])
    table = [row for _, _, row in results]

    best = None
    for (g, q), report, row in results:
        if report is None:
            continue
        key = (row["bic"], -g, -q)
        if best is None or key > best[0]:
            best = (key, report)
    if best is None:
        raise SelectionError(
            "no grid cell produced a fit; statuses: "
            + "; ".join(row["status"] for row in table)
        )
    return best[1], table


def write_bic_table(path, table):
    """Write the selection table as CSV with the documented columns."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(BIC_TABLE_COLUMNS)
        for row in table:
            writer.writerow([
                row["G"], row["q"],
                f"{row['loglik']:.10g}", row["rho"], f"{row['bic']:.10g}",
                row["iters"], row["status"],
            ])
