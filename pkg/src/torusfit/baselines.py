"""Discretised continuous torus models used as comparison baselines.

Each model's density kernel is evaluated at the grid angles and renormalised
over the grid, so continuous normalising constants never appear.

vm_sine
    ``exp(k1 cos t1 + k2 cos t2 + lam sin t1 sin t2)``
vm_cosine
    ``exp(k1 cos t1 + k2 cos t2 - k3 cos(t1 - t2))``
wrapped_cauchy
    Kato-Pewsey bivariate wrapped Cauchy,
    ``1 / (c0 - c1 cos t1 - c2 cos t2 - c3 cos t1 cos t2 - c4 sin t1 sin t2)``

with ``t_i = theta_i - mu_i``.

Two discretisations are available.  ``"point"`` (the default) evaluates the
kernel at each grid angle.  ``"sector"`` approximates the integral of the
kernel over each cell ``[theta - pi/m, theta + pi/m)`` by the midpoint rule
with ``subdivisions`` points per axis and cell.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .distributions import PmfTable
from .errors import DomainError
from .inference import (
    EPS,
    CountTable,
    FitOptions,
    FitResult,
    fit_bgwg,
    fit_bwg,
    log_likelihood,
    standard_errors,
)
from .optimize import nelder_mead_batch
from .torus import TWO_PI

__all__ = [
    "MODELS",
    "ALIASES",
    "BaselineParams",
    "baseline_kernel",
    "discretize",
    "fit_baseline",
    "compare",
    "ComparisonRow",
]

MODELS = ("wrapped_cauchy", "vm_sine", "vm_cosine")
ALIASES = {"wc": "wrapped_cauchy", "vms": "vm_sine", "vmc": "vm_cosine"}
KAPPA_MAX = 50.0
PARAM_NAMES = ("mu1", "mu2", "kappa1", "kappa2", "assoc")
METHODS = ("point", "sector")
SUBDIVISIONS = 16


def canonical_model(model):
    model = ALIASES.get(model, model)
    if model not in MODELS:
        raise DomainError(f"unknown baseline model {model!r}")
    return model


def _check(model, kappa1, kappa2, assoc):
    if model == "wrapped_cauchy":
        if not (0 <= kappa1 < 1 and 0 <= kappa2 < 1):
            raise DomainError("wrapped Cauchy concentrations must lie in [0, 1)")
        if not -1 < assoc < 1:
            raise DomainError("wrapped Cauchy association must lie in (-1, 1)")
    elif kappa1 < 0 or kappa2 < 0:
        raise DomainError("concentrations must be non-negative")


@dataclass(frozen=True)
class BaselineParams:
    model: str
    grid: object
    mu1: float
    mu2: float
    kappa1: float
    kappa2: float
    assoc: float
    method: str = "point"
    subdivisions: int = SUBDIVISIONS

    def __post_init__(self):
        object.__setattr__(self, "model", canonical_model(self.model))
        if self.method not in METHODS:
            raise DomainError(f"unknown discretisation {self.method!r}")
        _check(self.model, self.kappa1, self.kappa2, self.assoc)
        object.__setattr__(self, "mu1", float(self.mu1) % TWO_PI)
        object.__setattr__(self, "mu2", float(self.mu2) % TWO_PI)

    @property
    def family(self):
        return self.model

    def as_dict(self):
        return {"mu1": self.mu1, "mu2": self.mu2, "kappa1": float(self.kappa1),
                "kappa2": float(self.kappa2), "assoc": float(self.assoc)}

    def vector(self):
        return np.array([self.mu1, self.mu2, self.kappa1, self.kappa2, self.assoc])

    def table(self):
        return discretize(self.model, self, self.grid, self.method, self.subdivisions)


def _wc_coefficients(r1, r2, r):
    a = np.abs(r)
    c0 = (1 + r ** 2) * (1 + r1 ** 2) * (1 + r2 ** 2) - 8 * a * r1 * r2
    c1 = 2 * (1 + r ** 2) * r1 * (1 + r2 ** 2) - 4 * a * r2 * (1 + r1 ** 2)
    c2 = 2 * (1 + r ** 2) * r2 * (1 + r1 ** 2) - 4 * a * r1 * (1 + r2 ** 2)
    c3 = -4 * (1 + r ** 2) * r1 * r2 + 2 * a * (1 + r1 ** 2) * (1 + r2 ** 2)
    c4 = 2 * r * (1 - r1 ** 2) * (1 - r2 ** 2)
    return c0, c1, c2, c3, c4


def _log_kernel(model, theta1, theta2, mu1, mu2, k1, k2, assoc):
    """Broadcasting log-kernel; parameters may be arrays with trailing axes added by the caller."""
    t1 = theta1 - mu1
    t2 = theta2 - mu2
    if model == "vm_sine":
        return k1 * np.cos(t1) + k2 * np.cos(t2) + assoc * np.sin(t1) * np.sin(t2)
    if model == "vm_cosine":
        return k1 * np.cos(t1) + k2 * np.cos(t2) - assoc * np.cos(t1 - t2)
    c0, c1, c2, c3, c4 = _wc_coefficients(k1, k2, assoc)
    den = (c0 - c1 * np.cos(t1) - c2 * np.cos(t2)
           - c3 * np.cos(t1) * np.cos(t2) - c4 * np.sin(t1) * np.sin(t2))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, -np.log(np.where(den > 0, den, 1.0)), -np.inf)


def baseline_kernel(model, params, theta1, theta2):
    """Unnormalised density of ``model`` at the angle pair ``(theta1, theta2)``."""
    model = canonical_model(model)
    _check(model, params.kappa1, params.kappa2, params.assoc)
    return np.exp(_log_kernel(model, np.asarray(theta1, float), np.asarray(theta2, float),
                              params.mu1, params.mu2, params.kappa1, params.kappa2,
                              params.assoc))


def _cell_angles(m, method, subdivisions):
    """Evaluation angles, shape ``(m, S)``: one row of sub-angles per cell."""
    if method == "point":
        return (TWO_PI * np.arange(m) / m)[:, None]
    if method != "sector":
        raise DomainError(f"unknown discretisation {method!r}; use 'point' or 'sector'")
    off = (np.arange(subdivisions) + 0.5) / subdivisions - 0.5
    return TWO_PI * (np.arange(m)[:, None] + off[None, :]) / m


def _cell_log_mass(model, a1, a2, mu1, mu2, k1, k2, assoc):
    """Unnormalised log cell masses for a batch of parameter rows.

    ``a1``/``a2`` come from :func:`_cell_angles`; parameter arrays have shape
    ``(B, 1, 1, 1, 1)``.  Returns shape ``(B, m1, m2)``.
    """
    t1 = a1[None, :, :, None, None]
    t2 = a2[None, None, None, :, :]
    lk = _log_kernel(model, t1, t2, mu1, mu2, k1, k2, assoc)
    return logsumexp(lk, axis=(2, 4))


def discretize(model, params, grid, method="point", subdivisions=SUBDIVISIONS):
    """Cell probabilities of ``model`` on ``grid`` as a :class:`PmfTable`."""
    model = canonical_model(model)
    a1 = _cell_angles(grid.m1, method, subdivisions)
    a2 = _cell_angles(grid.m2, method, subdivisions)
    lk = _cell_log_mass(model, a1, a2, params.mu1, params.mu2,
                        params.kappa1, params.kappa2, params.assoc)[0]
    if not np.isfinite(lk).any():
        raise DomainError("kernel vanishes on the whole grid")
    return PmfTable(grid, np.exp(lk - logsumexp(lk)))


class _BaselineObjective:
    def __init__(self, data, model, method="point", subdivisions=SUBDIVISIONS):
        self.model = model
        self.a1 = _cell_angles(data.grid.m1, method, subdivisions)
        self.a2 = _cell_angles(data.grid.m2, method, subdivisions)
        self.c = data.counts.astype(float)
        self.n = self.c.sum()

    def __call__(self, X):
        X = np.atleast_2d(X)
        cols = [X[:, i].reshape(-1, 1, 1, 1, 1) for i in range(5)]
        lk = _cell_log_mass(self.model, self.a1, self.a2, *cols)
        with np.errstate(invalid="ignore"):
            ll = np.einsum("bkl,kl->b", np.where(self.c > 0, lk, 0.0), self.c) \
                - self.n * logsumexp(lk, axis=(1, 2))
        return np.where(np.isfinite(ll), -ll, np.inf)


def _bounds(model):
    if model == "wrapped_cauchy":
        lo = [-np.inf, -np.inf, 0.0, 0.0, -1 + EPS]
        hi = [np.inf, np.inf, 1 - EPS, 1 - EPS, 1 - EPS]
    else:
        lo = [-np.inf, -np.inf, 0.0, 0.0, -KAPPA_MAX]
        hi = [np.inf, np.inf, KAPPA_MAX, KAPPA_MAX, KAPPA_MAX]
    return np.array(lo), np.array(hi)


def _anchor_angles(m, count):
    if m <= count:
        return TWO_PI * np.arange(m) / m
    return TWO_PI * np.floor(np.arange(count) * m / count) / m


def fit_baseline(data, model, options=None, method="point", subdivisions=SUBDIVISIONS):
    """Multinomial maximum likelihood for a discretised baseline.

    Mean directions start from grid angles (at most ``options.anchors`` per
    axis), each paired with a positive and a negative association start.
    The best start is restarted at tight tolerance.  With
    ``method="sector"`` the point-discretised optimum seeds a final search
    on the sector-integrated likelihood.
    """
    opts = options or FitOptions()
    if not isinstance(data, CountTable):
        raise DomainError("data must be a CountTable")
    model = canonical_model(model)
    if method not in METHODS:
        raise DomainError(f"unknown discretisation {method!r}")
    obj = _BaselineObjective(data, model)
    lo, hi = _bounds(model)
    if model == "wrapped_cauchy":
        conc, assoc, step = 0.5, 0.3, np.array([0.3, 0.3, 0.1, 0.1, 0.2])
    else:
        conc, assoc, step = 1.0, 1.0, np.array([0.3, 0.3, 0.5, 0.5, 0.5])
    rows = [(a, b, conc, conc, sgn * assoc)
            for a in _anchor_angles(data.grid.m1, opts.anchors)
            for b in _anchor_angles(data.grid.m2, opts.anchors)
            for sgn in (1, -1)]
    res = nelder_mead_batch(lambda X, m: obj(X), np.array(rows), step, lo, hi,
                            fatol=opts.fatol, xatol=opts.xatol, maxfev=opts.maxfev)
    evals = int(res.nfev.sum())
    i = int(np.argmin(res.fun))
    x, fbest, conv = res.x[i], res.fun[i], bool(res.converged[i])
    target = obj
    if method == "sector":
        target = _BaselineObjective(data, model, "sector", subdivisions)
        fbest = target(x[None, :])[0]
    if method == "sector" or opts.restart or opts.polish:
        r2 = nelder_mead_batch(lambda X, m: target(X), x[None, :], step / 5, lo, hi,
                               fatol=min(opts.fatol, 1e-12), xatol=min(opts.xatol, 1e-9),
                               maxfev=opts.maxfev)
        evals += int(r2.nfev[0])
        if r2.fun[0] < fbest:
            x, fbest, conv = r2.x[0], r2.fun[0], bool(r2.converged[0])
    params = BaselineParams(model, data.grid, *x, method=method, subdivisions=subdivisions)
    fit = FitResult(family=model, params=params, loglik=log_likelihood(data, params),
                    converged=conv, evaluations=evals)
    if model == "wrapped_cauchy":
        if max(x[2], x[3], abs(x[4])) >= 1 - 1e3 * EPS:
            fit.flags.append("concentration at box edge")
    elif max(x[2], x[3], abs(x[4])) >= KAPPA_MAX * (1 - 1e-6):
        fit.flags.append("concentration at box edge")
    if opts.compute_se:
        fit.std_errors, fl = standard_errors(data, fit)
        fit.flags.extend(fl)
    return fit


def _se_problem(data, fit):
    p = fit.params
    obj = _BaselineObjective(data, p.model, p.method, p.subdivisions)
    lo, hi = _bounds(fit.params.model)
    if fit.params.model == "wrapped_cauchy":
        lo[-1], hi[-1] = -1.0, 1.0
        hi[2] = hi[3] = 1.0
    return list(PARAM_NAMES), fit.params.vector(), lo, hi, obj


@dataclass(frozen=True)
class ComparisonRow:
    family: str
    loglik: float
    aic: float
    n_params: int
    rank: int


def compare(data, families=("bgwg", "bwg", "wrapped_cauchy", "vm_sine", "vm_cosine"),
            options=None, method="point", subdivisions=SUBDIVISIONS):
    """Fit several families and rank them by AIC (lowest first).

    Returns the ranking rows and the individual fits keyed by family.
    """
    fits = {}
    for fam in families:
        if fam == "bgwg":
            fits[fam] = fit_bgwg(data, options)
        elif fam == "bwg":
            fits[fam] = fit_bwg(data, options)
        else:
            fits[canonical_model(fam)] = fit_baseline(data, fam, options, method, subdivisions)
    order = sorted(fits, key=lambda k: (fits[k].aic, k))
    rows = [ComparisonRow(k, fits[k].loglik, fits[k].aic, fits[k].n_params, r + 1)
            for r, k in enumerate(order)]
    return rows, fits

