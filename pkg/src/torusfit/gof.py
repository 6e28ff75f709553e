"""Pearson chi-square goodness of fit over groups of flattened cells.

Cells are numbered 1..m1*m2 in row-major order of ``counts[k, l]``: all of
``k = 0`` first (``l = 0..m2-1``), then ``k = 1`` and so on.  Groups are
inclusive 1-based ranges ``(first, last)`` that partition this numbering.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from .errors import DomainError

__all__ = [
    "PRESETS",
    "GofReport",
    "flatten_row_major",
    "unflatten_row_major",
    "chi_square_sf",
    "chi_square_critical",
    "chisq_gof",
    "auto_merge_groups",
    "validate_groups",
    "parse_groups",
]

SUM_TOL = 1e-9

# hand-merged groups used for the three embedded datasets
PRESETS = {
    "dataset1": ((1, 13), (14, 17), (18, 31), (32, 45), (46, 60), (61, 77), (78, 100),
                 (101, 125), (126, 150), (151, 175), (176, 192), (193, 207), (208, 212),
                 (213, 225), (226, 240), (241, 256)),
    "dataset2": ((1, 6), (7, 17), (18, 19), (20, 21), (22, 23), (24, 27), (28, 30),
                 (31, 32), (33, 34), (35, 38), (39, 43), (44, 46), (47, 48), (49, 64),
                 (65, 256)),
    "dataset3": ((1, 14), (15, 17), (18, 20), (21, 27), (28, 30), (31, 32), (33, 34),
                 (35, 36), (37, 38), (39, 45), (46, 47), (48, 50), (51, 57), (58, 75),
                 (76, 256)),
}


def flatten_row_major(table):
    return np.asarray(table).reshape(-1)


def unflatten_row_major(vec, m1, m2):
    vec = np.asarray(vec)
    if vec.size != m1 * m2:
        raise DomainError(f"vector of length {vec.size} cannot fill a {m1}x{m2} table")
    return vec.reshape(m1, m2)


def chi_square_sf(x, df):
    """Upper tail ``P(X2_df > x)`` via the regularised incomplete gamma ``Q(df/2, x/2)``."""
    if x < 0:
        raise DomainError("chi-square statistic must be non-negative")
    if df <= 0:
        raise DomainError("degrees of freedom must be positive")
    return float(gammaincc(0.5 * df, 0.5 * x))


def chi_square_critical(df, level=0.05):
    """Upper ``level`` quantile, found by bisection on :func:`chi_square_sf`."""
    lo, hi = 0.0, 1.0
    while chi_square_sf(hi, df) > level:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if chi_square_sf(mid, df) > level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def validate_groups(groups, ncells):
    """Check that inclusive 1-based ranges tile ``1..ncells`` in order."""
    groups = [(int(a), int(b)) for a, b in groups]
    expect = 1
    for a, b in groups:
        if a != expect or b < a:
            raise DomainError(f"group ({a}, {b}) breaks the partition at cell {expect}")
        expect = b + 1
    if expect != ncells + 1:
        raise DomainError(f"groups cover cells 1..{expect - 1}, need 1..{ncells}")
    return groups


def parse_groups(text):
    """Read ranges written as ``first:last`` separated by commas, spaces or newlines."""
    out = []
    for tok in text.replace(",", " ").split():
        try:
            a, b = tok.split(":")
            out.append((int(a), int(b)))
        except ValueError:
            raise DomainError(f"cannot read group {tok!r}; expected first:last") from None
    return out


@dataclass(frozen=True)
class GofReport:
    groups: tuple
    expected: np.ndarray
    observed: np.ndarray
    x2: float
    df: int
    critical: float
    p_value: float
    level: float = 0.05

    @property
    def reject(self):
        return self.x2 > self.critical

    @property
    def share_at_least_5(self):
        return float(np.mean(self.expected >= 5))

    def as_dict(self):
        return {
            "groups": [f"{a}:{b}" for a, b in self.groups],
            "expected": [float(v) for v in self.expected],
            "observed": [int(v) for v in self.observed],
            "x2": self.x2,
            "df": self.df,
            "critical": self.critical,
            "p_value": self.p_value,
            "level": self.level,
        }


def chisq_gof(data, model_pmf, groups, p_params=6, level=0.05):
    """Pearson statistic ``sum (O - E)^2 / E`` over grouped cells.

    Parameters
    ----------
    data : CountTable
    model_pmf : PmfTable or array_like
        Fitted cell probabilities on the same grid.
    groups : sequence of (first, last)
        Inclusive 1-based ranges over the row-major cell numbering.
    p_params : int
        Number of fitted parameters, subtracted from ``groups - 1``.
    """
    p = np.asarray(getattr(model_pmf, "p", model_pmf), dtype=float)
    if p.shape != data.counts.shape:
        raise DomainError("model table and data differ in shape")
    groups = validate_groups(groups, p.size)
    n = data.n
    e_flat = n * flatten_row_major(p)
    o_flat = flatten_row_major(data.counts)
    expected = np.array([e_flat[a - 1:b].sum() for a, b in groups])
    observed = np.array([o_flat[a - 1:b].sum() for a, b in groups], dtype=np.int64)
    if np.any(expected <= 0):
        bad = [f"{a}:{b}" for (a, b), e in zip(groups, expected) if e <= 0]
        raise DomainError(f"groups with zero expected frequency: {', '.join(bad)}")
    df = len(groups) - 1 - int(p_params)
    if df < 1:
        raise DomainError(f"{len(groups)} groups leave {df} degrees of freedom")
    x2 = float(np.sum((observed - expected) ** 2 / expected))
    return GofReport(tuple(groups), expected, observed, x2, df,
                     chi_square_critical(df, level), chi_square_sf(x2, df), level)


def auto_merge_groups(expected_flat, min_expected=5.0, min_floor=1.0):
    """Greedy left-to-right merging of consecutive cells.

    A group closes as soon as its expected frequency reaches
    ``min_expected``.  A short tail is folded into the last closed group.
    """
    e = np.asarray(expected_flat, dtype=float)
    if e.ndim != 1 or e.size == 0 or np.any(e < 0) or e.sum() <= 0:
        raise DomainError("expected frequencies must be non-negative with positive total")
    groups, start, acc = [], 1, 0.0
    for i, v in enumerate(e, start=1):
        acc += v
        if acc >= min_expected:
            groups.append([start, i])
            start, acc = i + 1, 0.0
    if start <= e.size:
        if not groups:
            raise DomainError("total expected frequency too small to form two groups")
        groups[-1][1] = e.size
    if len(groups) < 2:
        raise DomainError("total expected frequency too small to form two groups")
    sums = [e[a - 1:b].sum() for a, b in groups]
    if min(sums) < min_floor:
        raise DomainError("merged groups fall below the minimum expected frequency")
    return [tuple(g) for g in groups]
