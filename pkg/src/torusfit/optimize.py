"""Batched derivative-free simplex minimisation with box clamping.

Many independent problems (one per discrete candidate or start) advance in
lockstep so that each objective call evaluates a whole batch of points with
array arithmetic.  Members that converge drop out of later calls.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["BatchResult", "nelder_mead_batch"]

# reflection, expansion, contraction, shrink
_R, _E, _C, _S = 1.0, 2.0, 0.5, 0.5


@dataclass
class BatchResult:
    x: np.ndarray
    fun: np.ndarray
    nfev: np.ndarray
    converged: np.ndarray


def _initial_simplex(x0, step, lower, upper):
    B, d = x0.shape
    simplex = np.repeat(x0[:, None, :], d + 1, axis=1)
    for i in range(d):
        up = x0[:, i] + step[:, i]
        # step inward when the forward vertex would leave the box
        flip = up > upper[:, i]
        simplex[:, i + 1, i] = np.where(flip, x0[:, i] - step[:, i], up)
    return np.clip(simplex, lower[:, None, :], upper[:, None, :])


def nelder_mead_batch(fun, x0, step, lower=None, upper=None, *, fatol=1e-9,
                      xatol=1e-7, maxfev=5000):
    """Minimise ``B`` independent problems with a shared vectorised objective.

    Parameters
    ----------
    fun : callable
        ``fun(X, members)`` returns objective values for the ``(k, d)`` points
        ``X``, where row ``i`` belongs to problem ``members[i]``.  Infinite
        values mark infeasible points.
    x0, step : array_like, shape (B, d)
        Starting points and initial simplex edge lengths.
    lower, upper : array_like, shape (d,) or (B, d), optional
        Box limits; every trial point is clipped into the box.  Use infinite
        limits for unbounded coordinates.
    fatol, xatol : float
        A problem stops once its simplex spans at most ``fatol`` in objective
        value and ``xatol`` in every coordinate.
    maxfev : int
        Evaluation budget per problem.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    B, d = x0.shape
    step = np.broadcast_to(np.asarray(step, dtype=float), (B, d))
    lower = np.broadcast_to(np.full(d, -np.inf) if lower is None else np.asarray(lower, float), (B, d))
    upper = np.broadcast_to(np.full(d, np.inf) if upper is None else np.asarray(upper, float), (B, d))
    x0 = np.clip(x0, lower, upper)

    sim = _initial_simplex(x0, step, lower, upper)
    members = np.repeat(np.arange(B), d + 1)
    fsim = np.asarray(fun(sim.reshape(-1, d), members), dtype=float).reshape(B, d + 1)
    nfev = np.full(B, d + 1)
    active = np.ones(B, dtype=bool)
    converged = np.zeros(B, dtype=bool)

    def evaluate(points, idx):
        nfev[idx] += 1
        return np.asarray(fun(points, idx), dtype=float)

    while True:
        order = np.argsort(fsim, axis=1, kind="stable")
        fsim = np.take_along_axis(fsim, order, axis=1)
        sim = np.take_along_axis(sim, order[:, :, None], axis=1)

        spread_f = np.abs(fsim[:, 1:] - fsim[:, :1]).max(axis=1)
        spread_x = np.abs(sim[:, 1:] - sim[:, :1]).max(axis=(1, 2))
        done = active & (spread_f <= fatol) & (spread_x <= xatol)
        converged |= done
        active &= ~done
        active &= nfev < maxfev
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break

        S, F = sim[idx], fsim[idx]
        lo, hi = lower[idx], upper[idx]
        centroid = S[:, :-1].mean(axis=1)
        worst = S[:, -1]
        xr = np.clip(centroid + _R * (centroid - worst), lo, hi)
        fr = evaluate(xr, idx)

        new_x = worst.copy()
        new_f = F[:, -1].copy()
        shrink = np.zeros(idx.size, dtype=bool)

        # expansion
        exp_mask = fr < F[:, 0]
        if exp_mask.any():
            j = np.flatnonzero(exp_mask)
            xe = np.clip(centroid[j] + _E * (xr[j] - centroid[j]), lo[j], hi[j])
            fe = evaluate(xe, idx[j])
            take_e = fe < fr[j]
            new_x[j] = np.where(take_e[:, None], xe, xr[j])
            new_f[j] = np.where(take_e, fe, fr[j])

        # plain reflection
        refl = ~exp_mask & (fr < F[:, -2])
        new_x[refl] = xr[refl]
        new_f[refl] = fr[refl]

        # contraction, outside or inside
        con = ~exp_mask & ~refl
        if con.any():
            j = np.flatnonzero(con)
            outside = fr[j] < F[j, -1]
            target = np.where(outside[:, None], xr[j], worst[j])
            xc = np.clip(centroid[j] + _C * (target - centroid[j]), lo[j], hi[j])
            fc = evaluate(xc, idx[j])
            ok = np.where(outside, fc <= fr[j], fc < F[j, -1])
            new_x[j[ok]] = xc[ok]
            new_f[j[ok]] = fc[ok]
            shrink[j[~ok]] = True

        keep = ~shrink
        S[keep, -1] = new_x[keep]
        F[keep, -1] = new_f[keep]

        if shrink.any():
            j = np.flatnonzero(shrink)
            best = S[j, :1]
            S[j, 1:] = np.clip(best + _S * (S[j, 1:] - best), lo[j, None], hi[j, None])
            pts = S[j, 1:].reshape(-1, d)
            owner = np.repeat(idx[j], d)
            fs = np.asarray(fun(pts, owner), dtype=float).reshape(-1, d)
            nfev[idx[j]] += d
            F[j, 1:] = fs

        sim[idx] = S
        fsim[idx] = F

    return BatchResult(x=sim[:, 0].copy(), fun=fsim[:, 0].copy(), nfev=nfev, converged=converged)
