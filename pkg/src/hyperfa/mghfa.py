"""Mixture of generalized hyperbolic factor analyzers, fitted by AECM.

Each component is a GH law with factor-analytic scale
Lambda_g Lambda_g' + Psi_g.  One AECM cycle runs

    E-step -> CM-1 (pi, mu, alpha, lambda, omega)
    E-step -> CM-2 (Lambda, Psi)

with the trailing E-step of a cycle reused as the leading expectation of the
next.  Convergence is judged by Aitken extrapolation of the per-cycle
log-likelihood trace.  Multiple starts differ only in their initialization
substream; everything downstream of the seed is deterministic.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .ghd import PSI_NOISE_FLOOR, FactoredScale, GHParams, log_density, woodbury_inverse
from .rng import substream
from .selection import AitkenState, aitken_converged, bic
from .specfun import log_bessel_k, dlogk_dnu

__all__ = [
    "GHFAComponent", "MixtureModel", "EStepCache", "FitConfig", "FitReport",
    "DegenerateStartError", "FitError", "woodbury_inverse",
    "e_step", "cm_step_1", "cm_step_2", "log_likelihood", "fit",
]

logger = logging.getLogger(__name__)

_LOG_2PI = math.log(2.0 * math.pi)

OMEGA_MIN = 1.0e-6
OMEGA_MAX = 1.0e6


class DegenerateStartError(RuntimeError):
    """A single start hit a degenerate update and was abandoned."""


class FitError(RuntimeError):
    """Every start failed; carries the per-start reasons."""


def _vector(v, p, name):
    v = np.ascontiguousarray(v, dtype=np.float64)
    if v.shape != (p,) or not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must be a finite length-{p} vector")
    return v


@dataclass(frozen=True)
class GHFAComponent:
    """One factor-analyzer component: location, skewness, loadings, diagonal
    noise, GIG index lam and concentration omega."""

    mu: np.ndarray
    alpha: np.ndarray
    loadings: np.ndarray
    noise: np.ndarray
    lam: float
    omega: float

    def __post_init__(self):
        loadings = np.ascontiguousarray(self.loadings, dtype=np.float64)
        if loadings.ndim != 2:
            raise ValueError("loadings must be p x q")
        p = loadings.shape[0]
        mu = _vector(self.mu, p, "mu")
        alpha = _vector(self.alpha, p, "alpha")
        noise = _vector(self.noise, p, "noise")
        if np.any(noise < PSI_NOISE_FLOOR):
            raise ValueError(f"noise entries must be >= {PSI_NOISE_FLOOR:g}")
        if not np.all(np.isfinite(loadings)):
            raise ValueError("loadings must be finite")
        if not (math.isfinite(self.lam) and math.isfinite(self.omega)):
            raise ValueError("lam and omega must be finite")
        if not OMEGA_MIN <= self.omega <= OMEGA_MAX:
            raise ValueError(f"omega must lie in [{OMEGA_MIN:g}, {OMEGA_MAX:g}]")
        for name, v in (("mu", mu), ("alpha", alpha), ("loadings", loadings), ("noise", noise)):
            object.__setattr__(self, name, v)

    @property
    def p(self):
        return self.loadings.shape[0]

    @property
    def q(self):
        return self.loadings.shape[1]

    def scale(self):
        return FactoredScale(self.loadings, self.noise)

    def gh_params(self):
        return GHParams(self.mu, self.alpha, self.scale(), self.lam, self.omega)


@dataclass(frozen=True)
class MixtureModel:
    weights: np.ndarray
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        if len(comps) == 0 or weights.shape != (len(comps),):
            raise ValueError("weights must match the number of components")
        if np.any(weights <= 0.0) or abs(float(weights.sum()) - 1.0) > 1.0e-8:
            raise ValueError("weights must be positive and sum to one")
        p, q = comps[0].p, comps[0].q
        if any(c.p != p or c.q != q for c in comps):
            raise ValueError("components must share p and q")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", comps)

    @property
    def n_components(self):
        return len(self.components)

    @property
    def p(self):
        return self.components[0].p

    @property
    def q(self):
        return self.components[0].q


@dataclass(frozen=True)
class EStepCache:
    """Per-(i, g) expectations of one E-step.

    zhat: (n, G) responsibilities; a, b, c: (n, G) conditional GIG moments
    E[Y], E[1/Y], E[log Y]; e1, e2: (n, G, q); e3: (n, G, q, q); beta:
    (G, q, p); loglik: observed-data log-likelihood of the model that
    produced the cache.
    """

    zhat: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    beta: np.ndarray
    loglik: float

    def n_g(self):
        return self.zhat.sum(axis=0)

    def a_bar(self):
        return (self.zhat * self.a).sum(axis=0) / self.n_g()

    def b_bar(self):
        return (self.zhat * self.b).sum(axis=0) / self.n_g()

    def c_bar(self):
        return (self.zhat * self.c).sum(axis=0) / self.n_g()


@dataclass(frozen=True)
class FitConfig:
    max_iter: int = 1000
    epsilon: float = 1.0e-5
    n_starts: int = 1
    init: str = "kmeans"
    seed: int = 0
    psi_floor: float = PSI_NOISE_FLOOR
    omega_min: float = OMEGA_MIN
    omega_max: float = OMEGA_MAX
    # which trace value the Aitken gap is measured against; the literature
    # is ambiguous, "next" compares l_inf against l^(k+1)
    aitken_on: str = "next"

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")
        if self.init not in ("kmeans", "random", "given-labels"):
            raise ValueError(f"unknown init {self.init!r}")
        if not 0.0 < self.psi_floor:
            raise ValueError("psi_floor must be positive")
        if not 0.0 < self.omega_min < self.omega_max:
            raise ValueError("need 0 < omega_min < omega_max")
        if self.aitken_on not in ("next", "current"):
            raise ValueError(f"unknown aitken_on {self.aitken_on!r}")


@dataclass(frozen=True)
class FitReport:
    """Best-start fit result plus per-start diagnostics."""

    model: MixtureModel
    loglik: float
    bic: float
    trace: tuple
    labels: np.ndarray  # 1-based hard assignments, ties -> lowest index
    zhat: np.ndarray
    n_iter: int
    converged: bool
    start_index: int
    starts: tuple  # one dict per start: start, status, loglik, iterations


def _as_data(x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("data must be a non-empty (n, p) matrix")
    if not np.all(np.isfinite(x)):
        raise ValueError("data must be finite")
    return x


def e_step(x, model, fixed=None):
    """Full expectation pass: responsibilities, conditional GIG moments
    (a, b, c), factor expectations (e1, e2, e3), and the log-likelihood.

    fixed, when given, is a length-n int array; rows with fixed[i] >= 0 have
    their responsibility pinned to that component (semi-supervised rows) and
    contribute log(pi_c f_c) instead of the mixture log-sum.
    """
    x = _as_data(x)
    n, p = x.shape
    G, q = model.n_components, model.q

    logf = np.empty((n, G))
    a = np.empty((n, G))
    b = np.empty((n, G))
    c = np.empty((n, G))
    e1 = np.empty((n, G, q))
    e2 = np.empty((n, G, q))
    e3 = np.empty((n, G, q, q))
    beta = np.empty((G, q, p))

    eye_q = np.eye(q)
    for g, comp in enumerate(model.components):
        inv, log_det = woodbury_inverse(comp.loadings, comp.noise)
        beta_g = comp.loadings.T @ inv
        beta[g] = beta_g

        r = x - comp.mu
        s = r @ inv
        delta = np.einsum("ij,ij->i", s, r)
        tilt = s @ comp.alpha
        alpha_quad = float(comp.alpha @ inv @ comp.alpha)

        nu = comp.lam - 0.5 * p
        psi_c = comp.omega + alpha_quad
        chi_c = comp.omega + delta
        arg = np.sqrt(psi_c * chi_c)
        lk = log_bessel_k(nu, arg)
        ratio = np.exp(log_bessel_k(nu + 1.0, arg) - lk)
        half_log = 0.5 * (np.log(chi_c) - math.log(psi_c))

        a[:, g] = np.exp(half_log) * ratio
        b[:, g] = np.exp(-half_log) * ratio - 2.0 * nu / chi_c
        c[:, g] = half_log + dlogk_dnu(nu, arg)
        logf[:, g] = (
            nu * half_log
            + lk
            - 0.5 * p * _LOG_2PI
            - 0.5 * log_det
            - log_bessel_k(comp.lam, comp.omega)
            + tilt
        )

        br = r @ beta_g.T
        b_alpha = beta_g @ comp.alpha
        e1[:, g] = br - a[:, g, None] * b_alpha
        e2[:, g] = b[:, g, None] * br - b_alpha
        cross = br[:, :, None] * b_alpha[None, None, :]
        e3[:, g] = (
            (eye_q - beta_g @ comp.loadings)
            + b[:, g, None, None] * (br[:, :, None] * br[:, None, :])
            - cross
            - cross.transpose(0, 2, 1)
            + a[:, g, None, None] * np.outer(b_alpha, b_alpha)
        )

    if not np.all(np.isfinite(logf)):
        i, g = np.argwhere(~np.isfinite(logf))[0]
        raise FloatingPointError(
            f"non-finite density for observation {int(i)} in component {int(g) + 1}"
        )
    if np.any(b <= 0.0):
        i, g = np.argwhere(b <= 0.0)[0]
        raise FloatingPointError(
            f"non-positive conditional E[1/Y] for observation {int(i)} "
            f"in component {int(g) + 1}"
        )

    lw = logf + np.log(model.weights)
    m = lw.max(axis=1)
    lse = m + np.log(np.exp(lw - m[:, None]).sum(axis=1))
    zhat = np.exp(lw - lse[:, None])
    contrib = lse
    if fixed is not None:
        pinned = np.flatnonzero(np.asarray(fixed) >= 0)
        if pinned.size:
            comps = np.asarray(fixed)[pinned]
            zhat[pinned] = 0.0
            zhat[pinned, comps] = 1.0
            contrib = lse.copy()
            contrib[pinned] = lw[pinned, comps]
    return EStepCache(zhat, a, b, c, e1, e2, e3, beta, float(contrib.sum()))


def _q_omega(t, lam, apb_half, c_bar):
    return -log_bessel_k(lam, t) + (lam - 1.0) * c_bar - t * apb_half


def _dlogk_darg(lam, t):
    # d/dx log K_lam(x) = -K_{lam-1}(x)/K_lam(x) - lam/x
    return -math.exp(log_bessel_k(lam - 1.0, t) - log_bessel_k(lam, t)) - lam / t


def _update_omega(omega, lam, a_bar, b_bar, c_bar, config):
    """One safeguarded Newton step for omega on q_g(t, lam).

    The step is halved (up to 10 times) whenever it leaves the admissible
    interval or fails to increase q_g; if no admissible improvement is found
    the previous omega is kept.  The raw Newton step alone is not globally
    safe.
    """
    apb_half = 0.5 * (a_bar + b_bar)
    d1 = _dlogk_darg(lam, omega)
    # second argument-derivative via the Bessel ODE:
    # (log K)'' = 1 + lam^2/x^2 - (log K)'/x - ((log K)')^2
    d2 = 1.0 + (lam * lam) / (omega * omega) - d1 / omega - d1 * d1
    grad = -d1 - apb_half
    curv = -d2
    if not (math.isfinite(grad) and math.isfinite(curv)) or curv == 0.0:
        return omega
    step = -grad / curv
    if not math.isfinite(step):
        return omega
    q0 = _q_omega(omega, lam, apb_half, c_bar)
    for _ in range(11):
        cand = omega + step
        if config.omega_min <= cand <= config.omega_max:
            qc = _q_omega(cand, lam, apb_half, c_bar)
            if math.isfinite(qc) and qc >= q0:
                return cand
        step *= 0.5
    return omega


def cm_step_1(x, cache, model, config):
    """First conditional maximization: pi, mu, alpha, lambda, omega.

    mu and alpha jointly maximize the weighted quadratic part of the
    stage-1 objective; lambda takes the fixed-point step
    C_g lam_prev / dlogk_dnu(lam_prev, omega_prev) (skipped when the
    derivative underflows, and kept only if it does not lower q_g), and
    omega takes a safeguarded Newton step on q_g.
    """
    x = _as_data(x)
    n, p = x.shape
    q = model.q
    zhat = cache.zhat
    n_g = cache.n_g()
    a_bar, b_bar, c_bar = cache.a_bar(), cache.b_bar(), cache.c_bar()

    new_comps = []
    for g, comp in enumerate(model.components):
        # the scatter of n_g rows has rank n_g - 1, which must exceed the
        # q loading directions for the noise to be estimable at all
        if n_g[g] - 1.0 < q + 1:
            raise DegenerateStartError(
                f"component {g + 1} collapsed: effective size {n_g[g]:.3f} "
                f"leaves fewer than q + 1 = {q + 1} degrees of freedom"
            )
        z = zhat[:, g]
        b = cache.b[:, g]
        w = z * (a_bar[g] * b - 1.0)
        den = float(w.sum())
        if abs(den) < 1.0e-12:
            raise DegenerateStartError(
                f"degenerate location/skewness update for component {g + 1}: "
                f"sum of z(A b - 1) = {den:.3e}"
            )
        mu = (w @ x) / den
        alpha = ((z * (b_bar[g] - b)) @ x) / den

        lam = comp.lam
        d = dlogk_dnu(comp.lam, comp.omega)
        if abs(d) >= 1.0e-12:
            cand = c_bar[g] * comp.lam / d
            # the fixed-point step has no monotonicity guarantee; only take
            # it when it does not lower the stage-1 objective in lambda
            if math.isfinite(cand):
                apb_half = 0.5 * (a_bar[g] + b_bar[g])
                if _q_omega(comp.omega, cand, apb_half, c_bar[g]) >= _q_omega(
                    comp.omega, comp.lam, apb_half, c_bar[g]
                ):
                    lam = cand
        omega = _update_omega(comp.omega, lam, a_bar[g], b_bar[g], c_bar[g], config)
        new_comps.append(replace(comp, mu=mu, alpha=alpha, lam=lam, omega=omega))
    return MixtureModel(n_g / n, tuple(new_comps))


def cm_step_2(x, cache, model, config):
    """Second conditional maximization: loadings and diagonal noise.

    Lambda_g solves the cross-moment system against sum_i z E3; Psi_g is the
    diagonal of the stage-2 residual moment, clamped at the noise floor.  A
    numerically singular E3 sum is ridged (1e-10 tr/q) and logged.
    """
    x = _as_data(x)
    n, p = x.shape
    q = model.q
    zhat = cache.zhat
    n_g = cache.n_g()

    new_comps = []
    for g, comp in enumerate(model.components):
        z = zhat[:, g]
        r = x - comp.mu
        zw = z[:, None]
        e1 = cache.e1[:, g]
        e2 = cache.e2[:, g]
        f = r.T @ (zw * e2) - np.outer(comp.alpha, (zw * e1).sum(axis=0))
        h = np.einsum("i,ijk->jk", z, cache.e3[:, g])
        h = 0.5 * (h + h.T)
        try:
            loadings = np.linalg.solve(h, f.T).T
            if not np.all(np.isfinite(loadings)):
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            ridge = 1.0e-10 * np.trace(h) / q
            logger.warning(
                "singular factor-moment matrix for component %d; adding ridge %.3e",
                g + 1, ridge,
            )
            loadings = np.linalg.solve(h + ridge * np.eye(q), f.T).T

        p2 = e2 @ loadings.T
        p1 = e1 @ loadings.T
        t1 = (z * cache.b[:, g]) @ (r * r)
        t2 = -2.0 * comp.alpha * (z @ r)
        t3 = float(z @ cache.a[:, g]) * comp.alpha**2
        t4 = -2.0 * np.einsum("i,ij,ij->j", z, r, p2)
        t5 = 2.0 * comp.alpha * (z[:, None] * p1).sum(axis=0)
        t6 = np.einsum("jk,kl,jl->j", loadings, h, loadings)
        psi = (t1 + t2 + t3 + t4 + t5 + t6) / n_g[g]
        noise = np.maximum(psi, config.psi_floor)
        new_comps.append(replace(comp, loadings=loadings, noise=noise))
    return MixtureModel(model.weights, tuple(new_comps))


def log_likelihood(x, model):
    """Observed-data log-likelihood, log-sum-exp stabilized."""
    x = _as_data(x)
    logf = np.column_stack(
        [log_density(x, comp.gh_params()) for comp in model.components]
    )
    lw = logf + np.log(model.weights)
    m = lw.max(axis=1)
    return float((m + np.log(np.exp(lw - m[:, None]).sum(axis=1))).sum())


def _canonical_row_order(x):
    # lexicographic row order; makes every rng-driven index choice a
    # function of the data values, so fits commute with row permutations
    return np.lexsort(x.T[::-1])


def _kmeans_centers(x, G, rng, n_iter=50):
    """k-means++ seeding plus Lloyd iterations, on canonically ordered rows."""
    xs = x[_canonical_row_order(x)]
    n = xs.shape[0]
    centers = np.empty((G, xs.shape[1]))
    centers[0] = xs[int(rng.integers(n))]
    d2 = ((xs - centers[0]) ** 2).sum(axis=1)
    for k in range(1, G):
        total = float(d2.sum())
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[k] = xs[idx]
        d2 = np.minimum(d2, ((xs - centers[k]) ** 2).sum(axis=1))

    labels = np.zeros(n, dtype=np.int64)
    for _ in range(n_iter):
        dist = ((xs[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = dist.argmin(axis=1)
        for k in range(G):
            mask = new_labels == k
            if np.any(mask):
                centers[k] = xs[mask].mean(axis=0)
            else:
                # reseed an emptied cluster at the worst-fit point
                centers[k] = xs[int(dist.min(axis=1).argmax())]
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return centers


def _moment_component(x, w, q, config):
    sw = float(w.sum())
    mu = (w @ x) / sw
    r = x - mu
    cov = (w[:, None] * r).T @ r / sw
    cov = 0.5 * (cov + cov.T)
    vals, vecs = np.linalg.eigh(cov)
    top = np.argsort(vals)[::-1][:q]
    loadings = vecs[:, top] * np.sqrt(np.clip(vals[top], 0.0, None))
    noise = np.maximum(np.diag(cov), config.psi_floor)
    return GHFAComponent(
        mu=mu,
        alpha=np.zeros_like(mu),
        loadings=loadings,
        noise=noise,
        lam=-0.5,
        omega=1.0,
    )


def _initial_model(x, G, q, config, rng, labels=None):
    """Build the starting model for one start.

    kmeans: hard k-means responsibilities; random: uniform random
    responsibilities; given-labels: labelled rows anchor their class,
    remaining rows join the nearest labelled-class mean.
    """
    n, p = x.shape
    if config.init == "given-labels":
        if labels is None:
            raise ValueError("given-labels initialization requires labels")
        labels = np.asarray(labels)
        resp = np.zeros((n, G))
        known = labels > 0
        resp[np.flatnonzero(known), labels[known] - 1] = 1.0
        means = np.vstack(
            [x[labels == g + 1].mean(axis=0) for g in range(G)]
        )
        free = np.flatnonzero(~known)
        if free.size:
            dist = ((x[free, :, None] - means.T[None, :, :]) ** 2).sum(axis=1)
            resp[free, dist.argmin(axis=1)] = 1.0
    elif config.init == "kmeans":
        centers = _kmeans_centers(x, G, rng)
        dist = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        resp = np.zeros((n, G))
        resp[np.arange(n), dist.argmin(axis=1)] = 1.0
    else:  # random responsibilities, drawn in canonical row order
        order = _canonical_row_order(x)
        raw = rng.uniform(0.05, 1.0, size=(n, G))
        resp_sorted = raw / raw.sum(axis=1, keepdims=True)
        resp = np.empty_like(resp_sorted)
        resp[order] = resp_sorted

    counts = resp.sum(axis=0)
    if np.any(counts < q + 1):
        g = int(np.argmin(counts))
        raise DegenerateStartError(
            f"initial component {g + 1} too small: weight {counts[g]:.3f} < q + 1"
        )
    comps = tuple(_moment_component(x, resp[:, g], q, config) for g in range(G))
    return MixtureModel(counts / n, comps)


def _fit_single(x, G, q, config, rng, fixed=None, labels=None):
    model = _initial_model(x, G, q, config, rng, labels)
    cache = e_step(x, model, fixed)
    trace = [cache.loglik]
    converged = False
    iterations = 0
    for _ in range(config.max_iter):
        iterations += 1
        model = cm_step_1(x, cache, model, config)
        cache = e_step(x, model, fixed)  # refresh for the stage-2 complete data
        model = cm_step_2(x, cache, model, config)
        cache = e_step(x, model, fixed)  # closes the cycle, feeds the next CM-1
        trace.append(cache.loglik)
        if len(trace) >= 3:
            state = AitkenState(tuple(trace[-3:]), config.epsilon)
            if aitken_converged(state, variant=config.aitken_on):
                converged = True
                break
    return model, cache, trace, iterations, converged


def _reorder_components(model, zhat):
    """Canonical component order (lexicographic in mu) so that equivalent
    fits report identical labels regardless of start-dependent ordering."""
    order = sorted(range(model.n_components), key=lambda g: tuple(model.components[g].mu))
    if order == list(range(model.n_components)):
        return model, zhat
    model = MixtureModel(
        model.weights[order], tuple(model.components[g] for g in order)
    )
    return model, zhat[:, order]


def _run_starts(x, G, q, config, fixed=None, labels=None, threads=1):
    def one(idx):
        rng = substream(config.seed, "init", idx)
        try:
            model, cache, trace, iters, conv = _fit_single(
                x, G, q, config, rng, fixed, labels
            )
        except (DegenerateStartError, FloatingPointError,
                np.linalg.LinAlgError) as err:
            return idx, None, {
                "start": idx, "status": f"degenerate: {err}",
                "loglik": float("nan"), "iterations": 0,
            }
        status = "converged" if conv else "max_iter"
        diag = {"start": idx, "status": status,
                "loglik": trace[-1], "iterations": iters}
        return idx, (model, cache, trace, iters, conv), diag

    if threads > 1 and config.n_starts > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(config.n_starts)))
    else:
        results = [one(idx) for idx in range(config.n_starts)]

    results.sort(key=lambda r: r[0])
    diagnostics = tuple(r[2] for r in results)
    best = None
    for idx, payload, _ in results:
        if payload is None:
            continue
        if best is None or payload[2][-1] > best[1][2][-1]:
            best = (idx, payload)
    if best is None:
        reasons = "; ".join(d["status"] for d in diagnostics)
        raise FitError(f"all {config.n_starts} starts failed: {reasons}")
    return best[0], best[1], diagnostics


def fit(x, G, q, config=None, *, threads=1):
    """Fit a G-component, q-factor model by multi-start AECM.

    Returns the best start by final log-likelihood as a FitReport.  The
    report's labels are 1-based hard assignments (argmax responsibility,
    ties to the lowest index); components are reported in canonical
    (lexicographic-mu) order.
    """
    x = _as_data(x)
    n, p = x.shape
    if not 1 <= q < p:
        raise ValueError(f"need 1 <= q < p, got q={q}, p={p}")
    if G < 1:
        raise ValueError("G must be >= 1")
    if n <= G:
        raise ValueError(f"need more observations than components, got n={n}, G={G}")
    config = config or FitConfig()

    start_idx, (model, cache, trace, iters, conv), diags = _run_starts(
        x, G, q, config, threads=threads
    )
    model, zhat = _reorder_components(model, cache.zhat)
    labels = zhat.argmax(axis=1) + 1
    # score the model as reported: reordering permutes the addends inside
    # each row's log-sum, which shifts trace[-1] at machine precision
    loglik = log_likelihood(x, model)
    return FitReport(
        model=model,
        loglik=loglik,
        bic=bic(loglik, n, p, G, q),
        trace=tuple(trace),
        labels=labels,
        zhat=zhat,
        n_iter=iters,
        converged=conv,
        start_index=start_idx,
        starts=diags,
    )
