"""Monte Carlo study of the maximum-likelihood estimators.

Replicate ``r`` at sample size ``n`` draws from its own PCG64 stream seeded
by ``SeedSequence([base_seed, n, r])``.  Results are therefore identical
whatever order or process runs the replicates.
"""
from __future__ import annotations

import csv
import io as _io
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .distributions import BgwgParams, BwgParams
from .inference import CountTable, FitOptions, fit_bgwg, fit_bwg
from .sampling import sample_joint

__all__ = ["SimulationSummary", "SizeSummary", "run_simulation_study", "replicate_seed",
           "worker_count"]

THREADS_ENV = "TORUSFIT_THREADS"


def replicate_seed(base_seed, n, replicate):
    return np.random.SeedSequence([int(base_seed), int(n), int(replicate)])


def worker_count(requested=None):
    """Number of worker processes: ``requested``, else ``$TORUSFIT_THREADS``; 0 means all CPUs."""
    if requested is None:
        raw = os.environ.get(THREADS_ENV, "1").strip() or "1"
        try:
            requested = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if requested < 0:
        raise ValueError("worker count must be non-negative")
    return requested or (os.cpu_count() or 1)


def _one_replicate(truth, n, r, base_seed, opts, names):
    rng = np.random.Generator(np.random.PCG64(replicate_seed(base_seed, n, r)))
    batch = sample_joint(truth, n, seed=base_seed, rng=rng)
    fit = fit_bwg if isinstance(truth, BwgParams) else fit_bgwg
    est = fit(CountTable(truth.grid, batch.counts()), opts).params
    return [getattr(est, k) for k in names]


@dataclass
class SizeSummary:
    n: int
    replicates: int
    mean: dict
    sd: dict
    discrete: dict = field(default_factory=dict)

    def frequency(self, name, value):
        """Share of replicates whose discrete estimate ``name`` equals ``value``."""
        return self.discrete[name].get(value, 0) / self.replicates


@dataclass
class SimulationSummary:
    family: str
    truth: object
    base_seed: int
    sizes: list
    estimates: dict = field(default_factory=dict, repr=False)

    def __getitem__(self, n):
        for s in self.sizes:
            if s.n == n:
                return s
        raise KeyError(n)

    def to_csv(self):
        names = list(self.sizes[0].mean)
        out = _io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "replicates"] + [f"mean_{k}" for k in names]
                   + [f"sd_{k}" for k in names] + ["discrete"])
        for s in self.sizes:
            disc = ";".join(f"{k}=" + "|".join(f"{v}:{c}" for v, c in sorted(t.items()))
                            for k, t in s.discrete.items())
            w.writerow([s.n, s.replicates]
                       + [f"{s.mean[k]:.12g}" for k in names]
                       + [f"{s.sd[k]:.12g}" for k in names] + [disc])
        return out.getvalue()


def _unwrap(x, centre, m):
    """Representative of ``x`` modulo ``m`` closest to ``centre``."""
    return centre + (np.asarray(x) - centre + m / 2) % m - m / 2


def run_simulation_study(truth, sample_sizes=(500,), replicates=200, base_seed=0,
                         options=None, progress=None, workers=None):
    """Fit the generating family to repeated samples and summarise the estimates.

    Parameters
    ----------
    truth : BwgParams or BgwgParams
        Generating law; its family is also the fitted family.
    sample_sizes : sequence of int
    replicates : int
    base_seed : int
    options : FitOptions, optional
        Standard errors are never computed here.
    progress : callable, optional
        Called as ``progress(n, replicate)`` after each fit.
    workers : int, optional
        Worker processes (see :func:`worker_count`).  Results do not depend
        on this setting.

    Returns
    -------
    SimulationSummary
        Means and sample standard deviations (``ddof=1``; zero for a single
        replicate) of the continuous estimates, plus frequency tallies of the
        discrete ones.  BGWG location estimates are unwrapped to the period
        nearest the true value before averaging.
    """
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    base = options or FitOptions()
    opts = FitOptions(fatol=base.fatol, xatol=base.xatol, maxfev=base.maxfev,
                      anchors=base.anchors, restart=base.restart, polish=base.polish,
                      compute_se=False)
    bwg = isinstance(truth, BwgParams)
    cont = ["q", "s", "rho"] if bwg else ["q", "s", "rho", "alpha", "beta"]
    disc = ["alpha", "beta", "delta"] if bwg else ["delta"]
    names = cont + disc
    nworkers = worker_count(workers)
    pool = ProcessPoolExecutor(nworkers) if nworkers > 1 else None
    sizes, store = [], {}
    try:
        for n in sample_sizes:
            rows = {k: [] for k in names}
            if pool is None:
                results = (_one_replicate(truth, n, r, base_seed, opts, names)
                           for r in range(replicates))
            else:
                results = pool.map(_one_replicate, *zip(*[(truth, n, r, base_seed, opts, names)
                                                          for r in range(replicates)]))
            for r, vals in enumerate(results):
                for k, v in zip(names, vals):
                    rows[k].append(v)
                if progress is not None:
                    progress(n, r)
            summary, store[int(n)] = _summarise(truth, n, rows, cont, disc)
            sizes.append(summary)
    finally:
        if pool is not None:
            pool.shutdown()
    return SimulationSummary("bwg" if bwg else "bgwg", truth, int(base_seed), sizes, store)


def _summarise(truth, n, rows, cont, disc):
    replicates = len(rows[cont[0]])
    arr = {k: np.asarray(v, dtype=float) for k, v in rows.items()}
    if not isinstance(truth, BwgParams):
        arr["alpha"] = _unwrap(arr["alpha"], truth.alpha, truth.m1)
        arr["beta"] = _unwrap(arr["beta"], truth.beta, truth.m2)
    mean = {k: float(arr[k].mean()) for k in cont}
    sd = {k: float(arr[k].std(ddof=1)) if replicates > 1 else 0.0 for k in cont}
    tallies = {k: dict(Counter(int(v) for v in rows[k])) for k in disc}
    return SizeSummary(int(n), replicates, mean, sd, tallies), arr
