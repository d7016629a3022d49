"""Monte-Carlo oracle for the conditional E-step expectations.

Draws Y | x from scipy's geninvgauss (independent of the package's own
GIG code) and Rao-Blackwellizes the factor moments: conditional on Y = y,

    E[U | x, y]        = beta (r - y alpha)
    E[U / y | x, y]    = beta (r - y alpha) / y
    E[U U' / y | x, y] = (I - beta Lambda) + beta (r - y alpha)(r - y alpha)' beta' / y

with r = x - mu and beta = Lambda' (Lambda Lambda' + Psi)^{-1}, so the MC
average over y converges to a, b, c, E1, E2, E3 with per-entry standard
errors taken from the per-draw spread.
"""

import numpy as np
import scipy.stats


def mc_estep(comp, x_row, n_draws, seed):
    p, q = comp.loadings.shape
    r = np.asarray(x_row, dtype=float) - comp.mu
    sigma = comp.loadings @ comp.loadings.T + np.diag(comp.noise)
    inv = np.linalg.inv(sigma)
    beta = comp.loadings.T @ inv

    nu = comp.lam - 0.5 * p
    psi_c = comp.omega + float(comp.alpha @ inv @ comp.alpha)
    chi_c = comp.omega + float(r @ inv @ r)
    y = scipy.stats.geninvgauss.rvs(
        nu, np.sqrt(psi_c * chi_c), scale=np.sqrt(chi_c / psi_c),
        size=n_draws, random_state=np.random.default_rng(seed),
    )

    def stat(values):
        values = np.asarray(values)
        mean = values.mean(axis=0)
        se = values.std(axis=0) / np.sqrt(n_draws)
        return mean, se

    m_y = r[None, :] - y[:, None] * comp.alpha[None, :]          # (n, p)
    e1_draws = m_y @ beta.T                                      # (n, q)
    e2_draws = e1_draws / y[:, None]
    cross = e1_draws[:, :, None] * e1_draws[:, None, :] / y[:, None, None]
    e3_draws = (np.eye(q) - beta @ comp.loadings)[None] + cross

    out = {}
    out["a"] = stat(y)
    out["b"] = stat(1.0 / y)
    out["c"] = stat(np.log(y))
    out["e1"] = stat(e1_draws)
    out["e2"] = stat(e2_draws)
    out["e3"] = stat(e3_draws)
    return out
