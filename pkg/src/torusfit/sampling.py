"""Exact random generation by inverse-CDF draws over finite supports.

Joint draws are sequential: ``X1`` from its marginal, then ``X2`` from the
conditional law given the drawn ``X1``.  A one-shot categorical draw over the
flattened table is provided for cross-checking only.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import conditional_pmf, marginal_pmf, pmf_table
from .errors import DomainError
from .torus import GridPoint

__all__ = [
    "GENERATOR",
    "SampleBatch",
    "make_rng",
    "replicate_rng",
    "sample_univariate",
    "sample_joint",
    "sample_joint_categorical",
]

GENERATOR = "numpy.random.PCG64"
PMF_TOL = 1e-10


def make_rng(seed):
    """PCG64 generator for a non-negative 64-bit seed."""
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def replicate_rng(seed, replicate):
    """Independent stream for replicate ``replicate`` of an experiment seeded by ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(replicate)])))


def _check_pmf(pmf):
    p = np.asarray(pmf, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DomainError("pmf must be a non-empty 1-d vector")
    if not np.isfinite(p).all() or np.any(p < 0):
        raise DomainError("pmf entries must be finite and non-negative")
    if abs(p.sum() - 1.0) > PMF_TOL:
        raise DomainError(f"pmf sums to {p.sum()!r}, not 1")
    return p


def _invert(cdf, u, last):
    """Index of the first cell whose cumulative mass exceeds ``u``."""
    idx = (cdf <= u[..., None]).sum(axis=-1)
    return np.minimum(idx, last)


def sample_univariate(pmf, n, rng):
    """Draw ``n`` indices from a probability vector.

    Exactly ``n`` uniforms are consumed.  A uniform at or beyond the final
    cumulative sum (possible through rounding) maps to the last cell with
    positive mass.
    """
    p = _check_pmf(pmf)
    n = int(n)
    if n < 0:
        raise ValueError("n must be non-negative")
    cdf = np.cumsum(p)
    last = int(np.flatnonzero(p > 0)[-1])
    return _invert(cdf[None, :], rng.random(n)[:, None], last)[:, 0]


@dataclass(frozen=True)
class SampleBatch:
    """Pairs of grid indices together with the seed and law that produced them."""

    indices: np.ndarray = field(repr=False)
    seed: int
    params: object
    generator: str = GENERATOR
    method: str = "sequential"

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1, 2)
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return len(self.indices)

    @property
    def pairs(self):
        return [GridPoint(int(k), int(l)) for k, l in self.indices]

    def counts(self):
        """Cell counts as an ``(m1, m2)`` integer array."""
        grid = self.params.grid
        out = np.zeros(grid.shape, dtype=np.int64)
        np.add.at(out, (self.indices[:, 0], self.indices[:, 1]), 1)
        return out

    def metadata(self):
        return {"seed": self.seed, "generator": self.generator, "method": self.method,
                "family": self.params.family, "n": len(self)}


def _conditional_cdfs(params, marg):
    m1, m2 = params.grid.shape
    cdf = np.full((m1, m2), np.inf)
    last = np.full(m1, m2 - 1)
    for k in np.flatnonzero(marg > 0):
        row = conditional_pmf(params, 1, int(k))
        cdf[k] = np.cumsum(row)
        last[k] = np.flatnonzero(row > 0)[-1]
    return cdf, last


def sample_joint(params, n, seed=None, rng=None):
    """Sequential marginal-then-conditional draws of ``n`` grid points.

    Parameters
    ----------
    params : BwgParams or BgwgParams
    n : int
    seed : int, optional
        Seed for a fresh PCG64 stream.  Ignored when ``rng`` is given.
    rng : numpy.random.Generator, optional
        Existing stream; the returned batch then records ``seed`` as given.
    """
    if rng is None:
        if seed is None:
            raise ValueError("either seed or rng is required")
        rng = make_rng(seed)
    n = int(n)
    if n < 0:
        raise ValueError("n must be non-negative")
    marg = _check_pmf(marginal_pmf(params, 1))
    x1 = sample_univariate(marg, n, rng)
    cdf, last = _conditional_cdfs(params, marg)
    u2 = rng.random(n)
    x2 = np.minimum((cdf[x1] <= u2[:, None]).sum(axis=1), last[x1])
    return SampleBatch(np.column_stack([x1, x2]), seed, params)


def sample_joint_categorical(params, n, seed=None, rng=None):
    """Draw from the flattened row-major table in one categorical step."""
    if rng is None:
        if seed is None:
            raise ValueError("either seed or rng is required")
        rng = make_rng(seed)
    p = pmf_table(params).p
    flat = sample_univariate(p.ravel(), n, rng)
    k, l = np.divmod(flat, p.shape[1])
    return SampleBatch(np.column_stack([k, l]), seed, params, method="categorical")
