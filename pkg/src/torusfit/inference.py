"""Multinomial log-likelihood, two-step maximum likelihood, standard errors and AIC.

BWG fitting sweeps every discrete candidate ``(delta, alpha, beta)`` and
maximises over ``(q, s, rho)`` for each; BGWG fitting runs a multi-start
search over ``(alpha, beta, q, s, rho)`` within each ``delta`` branch.  All
candidates and starts of one fit are optimised together by
:func:`torusfit.optimize.nelder_mead_batch`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .distributions import BgwgParams, BwgParams, pmf_table
from .errors import DomainError
from .optimize import nelder_mead_batch
from .torus import TWO_PI, TorusGrid

__all__ = [
    "EPS",
    "CountTable",
    "FitResult",
    "FitOptions",
    "log_likelihood",
    "torus_nll_batch",
    "fit_bwg",
    "fit_bgwg",
    "standard_errors",
    "aic",
    "n_params",
    "moment_start",
]

EPS = 1e-6
TIE_TOL = 1e-11
POLISH_WINDOW = 1e-3
POLISH_FATOL = 1e-14
POLISH_XATOL = 1e-10
SCREEN_FEV = 300
SCREEN_FATOL = 1e-6
SCREEN_XATOL = 1e-4
REFINE_WINDOW = 3.0
REFINE_TOP = 4
RHO_START = 0.5
HESS_RCOND = 1e-6


@dataclass(frozen=True)
class CountTable:
    """Observed cell counts ``counts[k, l]`` for ``X1 = k``, ``X2 = l``."""

    grid: TorusGrid
    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.shape != self.grid.shape:
            raise DomainError(f"count shape {c.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(c)) or np.any(c < 0) or np.any(c != np.round(c)):
            raise DomainError("counts must be non-negative integers")
        c = c.astype(np.int64)
        if c.sum() < 1:
            raise DomainError("a count table needs at least one observation")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def n(self):
        return int(self.counts.sum())

    @classmethod
    def from_pairs(cls, grid, pairs):
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if len(pairs) and (np.any(pairs < 0) or np.any(pairs[:, 0] >= grid.m1)
                           or np.any(pairs[:, 1] >= grid.m2)):
            raise DomainError("pair outside the grid")
        c = np.zeros(grid.shape, dtype=np.int64)
        np.add.at(c, (pairs[:, 0], pairs[:, 1]), 1)
        return cls(grid, c)

    def __eq__(self, other):
        return (isinstance(other, CountTable) and self.grid == other.grid
                and np.array_equal(self.counts, other.counts))

    __hash__ = None


def n_params(family):
    return 6 if family in ("bwg", "bgwg") else 5


@dataclass
class FitResult:
    family: str
    params: object
    loglik: float
    std_errors: dict = field(default_factory=dict)
    discrete_search: list = field(default_factory=list, repr=False)
    converged: bool = True
    evaluations: int = 0
    flags: list = field(default_factory=list)

    @property
    def n_params(self):
        return n_params(self.family)

    @property
    def aic(self):
        return 2 * self.n_params - 2 * self.loglik

    def as_dict(self):
        return {
            "family": self.family,
            "params": self.params.as_dict(),
            "loglik": self.loglik,
            "aic": self.aic,
            "se": dict(self.std_errors),
            "converged": bool(self.converged),
            "evaluations": int(self.evaluations),
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class FitOptions:
    """Optimiser settings shared by the fitting routines.

    ``anchors`` caps the number of location anchors per axis for the BGWG
    multi-start.  ``polish`` re-optimises every candidate within
    ``POLISH_WINDOW`` of the best at tight tolerances before the final
    comparison, so that near-ties are decided by the likelihood rather than by
    optimiser noise.  ``compute_se`` attaches numeric standard errors.
    """

    fatol: float = 1e-9
    xatol: float = 1e-7
    maxfev: int = 5000
    anchors: int = 8
    restart: bool = True
    polish: bool = True
    compute_se: bool = True


def aic(fit):
    """``2 P - 2 loglik`` with ``P`` the number of free parameters of the family."""
    return fit.aic


def log_likelihood(data, params):
    """``sum counts * log pmf``; ``-inf`` when an observed cell has zero mass."""
    if data.grid != params.grid:
        raise DomainError("data and parameters live on different grids")
    p = pmf_table(params).p if not hasattr(params, "table") else params.table().p
    c = data.counts
    hit = c > 0
    if np.any(p[hit] <= 0):
        warnings.warn("observed cell has zero model probability; log-likelihood is -inf",
                      RuntimeWarning, stacklevel=2)
        return -math.inf
    return float(np.sum(c[hit] * np.log(p[hit])))


# ---------------------------------------------------------------------------
# batched objective


class _TorusObjective:
    """Negative log-likelihood for many ``(alpha, beta, q, s, rho, delta)`` rows.

    The normaliser uses ``cos(a - delta b) = cos a cos b + delta sin a sin b``,
    which splits the double sum over the grid into products of axis sums.
    """

    def __init__(self, data):
        self.m1, self.m2 = data.grid.shape
        c = data.counts.astype(float)
        self.n = c.sum()
        self.row = c.sum(axis=1)
        self.col = c.sum(axis=0)
        kk, ll = np.nonzero(c)
        self.kk, self.ll, self.w = kk, ll, c[kk, ll]
        self.k = np.arange(self.m1, dtype=float)
        self.l = np.arange(self.m2, dtype=float)

    @staticmethod
    def _axis(idx, loc, x, m):
        z = np.mod(idx[None, :] - loc[:, None], m)
        lx = np.log(x)[:, None]
        f = np.exp(z * lx) + np.exp((m - z) * lx)
        ang = TWO_PI * z / m
        return f, ang

    def __call__(self, alpha, beta, q, s, rho, delta):
        f1, a1 = self._axis(self.k, alpha, q, self.m1)
        f2, a2 = self._axis(self.l, beta, s, self.m2)
        c1, s1 = np.cos(a1), np.sin(a1)
        c2, s2 = np.cos(a2), np.sin(a2)
        total = (f1.sum(1) * f2.sum(1)
                 + rho * ((f1 * c1).sum(1) * (f2 * c2).sum(1)
                          + delta * (f1 * s1).sum(1) * (f2 * s2).sum(1)))
        link = 1 + rho[:, None] * np.cos(a1[:, self.kk] - delta[:, None] * a2[:, self.ll])
        with np.errstate(divide="ignore", invalid="ignore"):
            ll = (np.log(f1) @ self.row + np.log(f2) @ self.col
                  + np.log(np.maximum(link, 0.0)) @ self.w
                  - self.n * np.log(total))
        return np.where(np.isfinite(ll), -ll, np.inf)


def torus_nll_batch(data, alpha, beta, q, s, rho, delta):
    """Vectorised negative log-likelihood over rows of parameters."""
    arrs = np.broadcast_arrays(*(np.atleast_1d(np.asarray(v, float))
                                 for v in (alpha, beta, q, s, rho, delta)))
    return _TorusObjective(data)(*arrs)


# ---------------------------------------------------------------------------
# starting values


def _wsg_resultant(q, m):
    return (1 - q) ** 2 / ((1 - q) ** 2 + 4 * q * math.sin(math.pi / m) ** 2)


def moment_start(counts_axis, m):
    """``q`` whose wrapped geometric mean resultant length matches the data."""
    ang = TWO_PI * np.arange(m) / m
    n = counts_axis.sum()
    r = math.hypot(counts_axis @ np.cos(ang), counts_axis @ np.sin(ang)) / n
    lo, hi = EPS, 1 - EPS
    if m == 1 or r >= _wsg_resultant(lo, m):
        return lo
    if r <= _wsg_resultant(hi, m):
        return hi
    return brentq(lambda x: _wsg_resultant(x, m) - r, lo, hi, xtol=1e-12)


# ---------------------------------------------------------------------------
# fitting


def _lex_key(delta, alpha, beta):
    return (delta, alpha, beta)


def _pick_best(lls, keys):
    """Index of the max log-likelihood, ties broken by the smallest key."""
    lls = np.asarray(lls)
    best = np.nanmax(lls)
    if not np.isfinite(best):
        raise DomainError("every candidate has -inf log-likelihood")
    tied = [i for i in range(len(lls)) if lls[i] >= best - TIE_TOL]
    return min(tied, key=lambda i: keys[i])


def _check_data(data):
    if not isinstance(data, CountTable):
        raise DomainError("data must be a CountTable")
    return data


def _minimise(evalf, x0, meta, step, lower, upper, **kw):
    """Batched simplex search where row ``i`` carries fixed metadata ``meta[i]``."""
    return nelder_mead_batch(lambda X, m: evalf(X, meta[m]), x0, step, lower, upper, **kw)


def _keep_better(x, f, conv, res):
    better = res.fun < f
    return (np.where(better[:, None], res.x, x), np.where(better, res.fun, f),
            np.where(better, res.converged, conv))


def fit_bwg(data, options=None):
    """Two-step maximum likelihood for the BWG family.

    Every ``(delta, alpha, beta)`` in ``{-1, 1} x Z_m1 x Z_m2`` is paired with
    three ``(q, s, rho)`` starts: moment-matched ``q, s`` with ``rho = +-0.5``
    and the neutral ``(0.5, 0.5, 0)``.  A short screening search runs from
    every start; candidates within ``REFINE_WINDOW`` of the best screened
    log-likelihood are then optimised to full tolerance and restarted once.
    The global maximum wins, with ties going to the smallest
    ``(delta, alpha, beta)``.
    """
    opts = options or FitOptions()
    data = _check_data(data)
    m1, m2 = data.grid.shape
    obj = _TorusObjective(data)
    q0 = moment_start(obj.row, m1)
    s0 = moment_start(obj.col, m2)
    starts = np.array([[q0, s0, RHO_START], [q0, s0, -RHO_START], [0.5, 0.5, 0.0]])

    cands = [(d, a, b) for d in (-1, 1) for a in range(m1) for b in range(m2)]
    disc = np.array(cands, dtype=float)
    C, S = len(cands), len(starts)
    lower = np.array([EPS, EPS, -1.0])
    upper = np.array([1 - EPS, 1 - EPS, 1.0])
    step = np.array([0.1, 0.1, 0.25])

    def evalf(X, D):
        return obj(D[:, 1], D[:, 2], X[:, 0], X[:, 1], X[:, 2], D[:, 0])

    res = _minimise(evalf, np.tile(starts, (C, 1)), np.repeat(disc, S, axis=0), step,
                    lower, upper, fatol=SCREEN_FATOL, xatol=SCREEN_XATOL,
                    maxfev=min(SCREEN_FEV, opts.maxfev))
    evals = int(res.nfev.sum())
    fval = res.fun.reshape(C, S)
    pick = np.argmin(fval, axis=1)
    x = res.x.reshape(C, S, 3)[np.arange(C), pick]
    f = fval[np.arange(C), pick]
    conv = np.zeros(C, dtype=bool)

    hot = np.flatnonzero(f <= np.nanmin(f) + REFINE_WINDOW)
    tol = dict(fatol=opts.fatol, xatol=opts.xatol, maxfev=opts.maxfev)
    r2 = _minimise(evalf, x[hot], disc[hot], step / 2, lower, upper, **tol)
    evals += int(r2.nfev.sum())
    x[hot], f[hot], conv[hot] = _keep_better(x[hot], f[hot], conv[hot], r2)
    if opts.restart:
        r3 = _minimise(evalf, x[hot], disc[hot], step / 4, lower, upper, **tol)
        evals += int(r3.nfev.sum())
        x[hot], f[hot], conv[hot] = _keep_better(x[hot], f[hot], conv[hot], r3)

    lls = -f
    if opts.polish:
        near = np.flatnonzero(lls >= np.nanmax(lls) - POLISH_WINDOW)
        r4 = _minimise(evalf, x[near], disc[near], step / 10, lower, upper,
                       fatol=POLISH_FATOL, xatol=POLISH_XATOL, maxfev=opts.maxfev)
        evals += int(r4.nfev.sum())
        x[near], f[near], conv[near] = _keep_better(x[near], f[near], conv[near], r4)
        # final comparison on the exact table-based likelihood
        for c in near:
            d, a, b = cands[c]
            lls[c] = log_likelihood(data, BwgParams(data.grid, a, b, *x[c], d))
    i = _pick_best(lls, cands)
    d, a, b = cands[i]
    q, s, r = (float(v) for v in x[i])
    params = BwgParams(data.grid, a, b, q, s, r, d)
    fit = FitResult(
        family="bwg",
        params=params,
        loglik=log_likelihood(data, params),
        discrete_search=[(c[0], c[1], c[2], float(v)) for c, v in zip(cands, lls)],
        converged=bool(conv[i]),
        evaluations=evals,
    )
    _edge_flags(fit, {"q": q, "s": s})
    if opts.compute_se:
        fit.std_errors, fl = standard_errors(data, fit)
        fit.flags.extend(fl)
    return fit


def _anchors(m, count):
    if m <= count:
        return np.arange(m, dtype=float)
    return np.floor(np.arange(count) * m / count)


def _wrap(x, m):
    y = np.mod(x, m)
    return np.where(y >= m, 0.0, y)


def fit_bgwg(data, options=None):
    """Maximum likelihood for the BGWG family.

    Within each ``delta`` branch the locations start from an integer lattice
    (at most ``options.anchors`` points per axis), each with three
    ``(q, s, rho)`` starts as in :func:`fit_bwg`.  All starts get a short
    screening search; the ``REFINE_TOP`` best per branch are optimised to full
    tolerance, and the branch winner is restarted and polished.  Locations
    are periodic coordinates, reported modulo ``m``.
    """
    opts = options or FitOptions()
    data = _check_data(data)
    m1, m2 = data.grid.shape
    obj = _TorusObjective(data)
    q0 = moment_start(obj.row, m1)
    s0 = moment_start(obj.col, m2)
    qsr = [(q0, s0, RHO_START), (q0, s0, -RHO_START), (0.5, 0.5, 0.0)]
    rows, deltas = [], []
    for d in (-1, 1):
        for a in _anchors(m1, opts.anchors):
            for b in _anchors(m2, opts.anchors):
                for q, s, r in qsr:
                    rows.append((a, b, q, s, r))
                    deltas.append(d)
    meta = np.array(deltas, dtype=float)[:, None]
    lower = np.array([-np.inf, -np.inf, EPS, EPS, -1.0])
    upper = np.array([np.inf, np.inf, 1 - EPS, 1 - EPS, 1.0])
    step = np.array([0.5, 0.5, 0.1, 0.1, 0.25])

    def evalf(X, D):
        return obj(X[:, 0], X[:, 1], X[:, 2], X[:, 3], X[:, 4], D[:, 0])

    res = _minimise(evalf, np.array(rows), meta, step, lower, upper,
                    fatol=SCREEN_FATOL, xatol=SCREEN_XATOL,
                    maxfev=min(SCREEN_FEV, opts.maxfev))
    evals = int(res.nfev.sum())

    top = np.concatenate([np.flatnonzero(meta[:, 0] == d)[np.argsort(res.fun[meta[:, 0] == d],
                                                                      kind="stable")[:REFINE_TOP]]
                          for d in (-1, 1)])
    tol = dict(fatol=opts.fatol, xatol=opts.xatol, maxfev=opts.maxfev)
    r2 = _minimise(evalf, res.x[top], meta[top], step / 2, lower, upper, **tol)
    evals += int(r2.nfev.sum())
    x, f, conv = _keep_better(res.x[top], res.fun[top], np.zeros(top.size, bool), r2)

    branch = np.array([-1.0, 1.0])[:, None]
    best = [int(np.argmin(np.where(meta[top, 0] == d, f, np.inf))) for d in (-1, 1)]
    xb, fb, cb = x[best], f[best], conv[best]
    if opts.restart:
        r3 = _minimise(evalf, xb, branch, step / 4, lower, upper, **tol)
        evals += int(r3.nfev.sum())
        xb, fb, cb = _keep_better(xb, fb, cb, r3)
    if opts.polish:
        r4 = _minimise(evalf, xb, branch, step / 20, lower, upper,
                       fatol=POLISH_FATOL, xatol=POLISH_XATOL, maxfev=opts.maxfev)
        evals += int(r4.nfev.sum())
        xb, fb, cb = _keep_better(xb, fb, cb, r4)

    lls = -fb
    i = _pick_best(lls, [(-1,), (1,)])
    d = (-1, 1)[i]
    a, b, q, s, r = (float(v) for v in xb[i])
    params = BgwgParams(data.grid, float(_wrap(a, m1)), float(_wrap(b, m2)), q, s, r, d)
    search = [(dd, float(_wrap(xx[0], m1)), float(_wrap(xx[1], m2)), float(v))
              for dd, xx, v in zip((-1, 1), xb, lls)]
    fit = FitResult(
        family="bgwg",
        params=params,
        loglik=log_likelihood(data, params),
        discrete_search=search,
        converged=bool(cb[i]),
        evaluations=evals,
    )
    _edge_flags(fit, {"q": q, "s": s})
    if opts.compute_se:
        fit.std_errors, fl = standard_errors(data, fit)
        fit.flags.extend(fl)
    return fit


def _edge_flags(fit, values):
    for name, v in values.items():
        if v <= EPS * 10 or v >= 1 - EPS * 10:
            fit.flags.append(f"{name} at box edge")


# ---------------------------------------------------------------------------
# standard errors


def _se_problem(data, fit):
    """Names, centre, box and scalar objective for the continuous parameters."""
    p = fit.params
    if fit.family == "bwg":
        obj = _TorusObjective(data)
        names = ["q", "s", "rho"]
        theta = np.array([p.q, p.s, p.rho])
        lo = np.array([0.0, 0.0, -1.0])
        hi = np.array([1.0, 1.0, 1.0])

        def f(T):
            T = np.atleast_2d(T)
            one = np.ones(len(T))
            return obj(p.alpha * one, p.beta * one, T[:, 0], T[:, 1], T[:, 2], p.delta * one)
    elif fit.family == "bgwg":
        obj = _TorusObjective(data)
        names = ["alpha", "beta", "q", "s", "rho"]
        theta = np.array([p.alpha, p.beta, p.q, p.s, p.rho])
        lo = np.array([-np.inf, -np.inf, 0.0, 0.0, -1.0])
        hi = np.array([np.inf, np.inf, 1.0, 1.0, 1.0])

        def f(T):
            T = np.atleast_2d(T)
            return obj(T[:, 0], T[:, 1], T[:, 2], T[:, 3], T[:, 4], p.delta * np.ones(len(T)))
    else:
        from .baselines import _se_problem as baseline_problem
        return baseline_problem(data, fit)
    return names, theta, lo, hi, f


def numeric_hessian(f, theta, lo, hi, rel_step=1e-4):
    """Central-difference Hessian of a batched scalar function.

    Coordinates closer than two steps to a finite bound have their stencil
    centre moved one step inward; their names are returned as flagged.
    """
    theta = np.asarray(theta, dtype=float)
    d = theta.size
    h = rel_step * np.maximum(1.0, np.abs(theta))
    centre = theta.copy()
    shifted = []
    for i in range(d):
        if theta[i] + 2 * h[i] >= hi[i]:
            centre[i] = theta[i] - h[i]
            shifted.append(i)
        elif theta[i] - 2 * h[i] <= lo[i]:
            centre[i] = theta[i] + h[i]
            shifted.append(i)
    E = np.diag(h)
    pts = [centre]
    for i in range(d):
        pts += [centre + E[i], centre - E[i]]
    for i in range(d):
        for j in range(i + 1, d):
            pts += [centre + E[i] + E[j], centre + E[i] - E[j],
                    centre - E[i] + E[j], centre - E[i] - E[j]]
    vals = f(np.array(pts))
    f0 = vals[0]
    H = np.empty((d, d))
    pos = 1
    for i in range(d):
        H[i, i] = (vals[pos] - 2 * f0 + vals[pos + 1]) / h[i] ** 2
        pos += 2
    for i in range(d):
        for j in range(i + 1, d):
            pp, pm, mp, mm = vals[pos:pos + 4]
            H[i, j] = H[j, i] = (pp - pm - mp + mm) / (4 * h[i] * h[j])
            pos += 4
    return H, shifted


def standard_errors(data, fit, rel_step=1e-4):
    """Observed-information standard errors for the continuous parameters.

    Returns
    -------
    se : dict
        Parameter name to standard error.
    flags : list of str
        ``"one-sided: <name>"`` for parameters near a bound and
        ``"hessian not positive definite"`` when the pseudo-inverse was used.
    """
    names, theta, lo, hi, f = _se_problem(data, fit)
    H, shifted = numeric_hessian(f, theta, lo, hi, rel_step)
    flags = [f"one-sided: {names[i]}" for i in shifted]
    if not np.all(np.isfinite(H)):
        flags.append("hessian not finite")
        return {n: math.nan for n in names}, flags
    # finite differences leave ~1e-8 relative noise, so a flat direction
    # shows up as a tiny eigenvalue of either sign rather than an exact zero
    w = np.linalg.eigvalsh(H)
    if w.min() > HESS_RCOND * abs(w).max():
        cov = np.linalg.inv(H)
    else:
        flags.append("hessian not positive definite")
        cov = np.linalg.pinv(H, rcond=HESS_RCOND, hermitian=True)
    var = np.diag(cov)
    se = {n: float(math.sqrt(v)) if v >= 0 else math.nan for n, v in zip(names, var)}
    return se, flags
