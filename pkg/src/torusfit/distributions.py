"""Probability mass functions on the discrete torus.

Three families live here:

* WSG, the univariate wrapped symmetric geometric law on ``Z_m``;
* BWG, the bivariate wrapped geometric law with integer locations;
* BGWG, its generalisation to real-valued locations.

All of them share the unnormalised kernel::

    (q**z1 + q**(m1 - z1)) * (s**z2 + s**(m2 - z2))
        * (1 + rho * cos(2*pi*z1/m1 - delta*2*pi*z2/m2))

with ``z1 = (k - alpha) mod m1`` and ``z2 = (l - beta) mod m2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError
from .torus import TWO_PI, GridPoint, TorusGrid

__all__ = [
    "WsgParams",
    "BwgParams",
    "BgwgParams",
    "PmfTable",
    "wsg_pmf",
    "wsg_vector",
    "bwg_normalizer",
    "bwg_pmf",
    "bgwg_normalizer",
    "bgwg_inverse_normalizer_closed",
    "bgwg_pmf",
    "marginal_pmf",
    "conditional_pmf",
    "joint_mode",
    "pmf_table",
]

MODE_TIE_TOL = 1e-12


def _check_unit(name, value):
    if not (0.0 <= value <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


def _boundary_class(value):
    if value == 0.0:
        return 0
    if value == 1.0:
        return 1
    return None


@dataclass(frozen=True)
class WsgParams:
    m: int
    q: float
    alpha: int = 0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"m must be a positive integer, got {self.m!r}")
        _check_unit("q", self.q)
        if int(self.alpha) != self.alpha or not 0 <= self.alpha < self.m:
            raise DomainError(f"alpha must be an integer in Z_{self.m}, got {self.alpha!r}")


@dataclass(frozen=True)
class _TorusParams:
    grid: TorusGrid
    alpha: float
    beta: float
    q: float
    s: float
    rho: float
    delta: int

    family = "?"

    def __post_init__(self):
        _check_unit("q", self.q)
        _check_unit("s", self.s)
        if not -1.0 <= self.rho <= 1.0:
            raise DomainError(f"rho must lie in [-1, 1], got {self.rho!r}")
        if self.delta not in (-1, 1):
            raise DomainError(f"delta must be -1 or +1, got {self.delta!r}")
        object.__setattr__(self, "delta", int(self.delta))

    @property
    def m1(self):
        return self.grid.m1

    @property
    def m2(self):
        return self.grid.m2

    def replace(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "q": self.q, "s": self.s,
                "rho": self.rho, "delta": self.delta}


@dataclass(frozen=True)
class BwgParams(_TorusParams):
    """Bivariate wrapped geometric parameters (integer locations)."""

    family = "bwg"

    def __post_init__(self):
        super().__post_init__()
        for name, m in (("alpha", self.m1), ("beta", self.m2)):
            value = getattr(self, name)
            if int(value) != value or not 0 <= value < m:
                raise DomainError(f"{name} must be an integer in Z_{m}, got {value!r}")
            object.__setattr__(self, name, int(value))


@dataclass(frozen=True)
class BgwgParams(_TorusParams):
    """Generalised parameters: real locations ``alpha in [0, m1)``, ``beta in [0, m2)``."""

    family = "bgwg"

    def __post_init__(self):
        super().__post_init__()
        for name, m in (("alpha", self.m1), ("beta", self.m2)):
            value = float(getattr(self, name))
            if not 0.0 <= value < m:
                raise DomainError(f"{name} must lie in [0, {m}), got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def a(self):
        return self.alpha - math.floor(self.alpha)

    @property
    def b(self):
        return self.beta - math.floor(self.beta)


@dataclass(frozen=True)
class PmfTable:
    grid: TorusGrid
    p: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != self.grid.shape:
            raise DomainError(f"table shape {p.shape} does not match grid {self.grid.shape}")
        if np.any(p < 0) or not np.isfinite(p).all():
            raise DomainError("pmf entries must be finite and non-negative")
        if abs(p.sum() - 1.0) > 1e-9:
            raise DomainError(f"pmf sums to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def __getitem__(self, idx):
        return self.p[idx]


# ---------------------------------------------------------------------------
# building blocks


def _offsets(m, loc):
    """Vector of wrapped offsets ``(k - loc) mod m`` for ``k = 0..m-1``."""
    z = np.mod(np.arange(m) - loc, m)
    z[z >= m] = 0.0
    return z


def _geom_weights(z, m, q):
    """``q**z + q**(m - z)`` for ``q`` in (0, 1); underflow to 0 is harmless."""
    lq = math.log(q)
    return np.exp(z * lq) + np.exp((m - z) * lq)


def _limit_weights(z, m, q):
    """Unnormalised univariate weights including the q in {0, 1} limits."""
    cls = _boundary_class(q)
    if cls == 0:
        return (z == 0).astype(float)
    if cls == 1:
        return np.ones(m)
    return _geom_weights(z, m, q)


def _link(params, z1, z2):
    """``1 + rho*cos(2 pi z1/m1 - delta 2 pi z2/m2)`` as an ``m1 x m2`` array."""
    t1 = TWO_PI * z1 / params.m1
    t2 = TWO_PI * z2 / params.m2
    return 1.0 + params.rho * np.cos(t1[:, None] - params.delta * t2[None, :])


def _aux(x, m):
    """``x**2 - 2x cos(2pi/m) + 1``, written to stay accurate as ``x -> 1``."""
    return (1.0 - x) ** 2 + 4.0 * x * math.sin(math.pi / m) ** 2


def _omp(x, m):
    """``1 - x**m`` without cancellation as ``x -> 1``."""
    return -math.expm1(m * math.log(x))


def _wsg_const(q, m):
    return (1.0 - q) / (_omp(q, m) * (1.0 + q))


# ---------------------------------------------------------------------------
# univariate


def wsg_vector(params):
    """Full WSG probability vector over ``Z_m``."""
    m, q = int(params.m), params.q
    z = _offsets(m, params.alpha)
    if m == 1:
        return np.ones(1)
    cls = _boundary_class(q)
    if cls is not None:
        w = _limit_weights(z, m, q)
        return w / w.sum()
    return _wsg_const(q, m) * _geom_weights(z, m, q)


def wsg_pmf(params, k):
    """Probability of grid index ``k`` under the WSG law."""
    if int(k) != k or not 0 <= k < params.m:
        raise DomainError(f"grid index {k!r} outside Z_{params.m}")
    return float(wsg_vector(params)[int(k)])


# ---------------------------------------------------------------------------
# BWG


def bwg_normalizer(params):
    """Closed-form normalising constant ``C1`` of the BWG law.

    Only defined for ``q, s`` strictly inside (0, 1); boundary values must go
    through the limiting forms of :func:`pmf_table`.
    """
    q, s, rho = params.q, params.s, params.rho
    if _boundary_class(q) is not None or _boundary_class(s) is not None:
        raise DomainError("C1 requires q, s in (0, 1); use the limiting-case pmf")
    m1, m2 = params.m1, params.m2
    a1b1 = _aux(q, m1) * _aux(s, m2)
    base = (1 - q) * (1 - s) / (_omp(q, m1) * _omp(s, m2) * (1 + q) * (1 + s))
    return base * a1b1 / (a1b1 + rho * (1 - q) ** 2 * (1 - s) ** 2)


def _bwg_boundary_table(params):
    """Limits of the BWG pmf when ``q`` or ``s`` sits on {0, 1}."""
    m1, m2, q, s, rho = params.m1, params.m2, params.q, params.s, params.rho
    alpha, beta = params.alpha, params.beta
    cq, cs = _boundary_class(q), _boundary_class(s)
    z1 = _offsets(m1, alpha)
    z2 = _offsets(m2, beta)
    c1 = np.cos(TWO_PI * z1 / m1)
    c2 = np.cos(TWO_PI * z2 / m2)
    p = np.zeros((m1, m2))

    if cq == 0 and cs == 0:
        p[alpha, beta] = 1.0
    elif cq == 0 and cs is None:
        b1 = _aux(s, m2)
        c_2 = (1.0 / (_omp(s, m2) * (1 + s))) * ((1 - s) * b1 / (b1 + rho * (1 - s) ** 2))
        p[alpha, :] = c_2 * _geom_weights(z2, m2, s) * (1 + rho * c2)
    elif cq is None and cs == 0:
        a1 = _aux(q, m1)
        c_3 = (1.0 / (_omp(q, m1) * (1 + q))) * ((1 - q) * a1 / (a1 + rho * (1 - q) ** 2))
        p[:, beta] = c_3 * _geom_weights(z1, m1, q) * (1 + rho * c1)
    elif cq == 1 and cs is None:
        w2 = _wsg_const(s, m2) * _geom_weights(z2, m2, s)
        p = (1.0 / m1) * w2[None, :] * _link(params, z1, z2)
    elif cq is None and cs == 1:
        w1 = _wsg_const(q, m1) * _geom_weights(z1, m1, q)
        p = (1.0 / m2) * w1[:, None] * _link(params, z1, z2)
    elif cq == 1 and cs == 1:
        p = _link(params, z1, z2) / (m1 * m2)
    elif cq == 1 and cs == 0:
        p[:, beta] = (1 + rho * c1) / m1
    else:  # cq == 0 and cs == 1
        p[alpha, :] = (1 + rho * c2) / m2
    return p


def _normalised_kernel(params):
    """Direct row-major summation of the (limit-aware) kernel."""
    z1 = _offsets(params.m1, params.alpha)
    z2 = _offsets(params.m2, params.beta)
    w1 = _limit_weights(z1, params.m1, params.q) if params.m1 > 1 else np.ones(1)
    w2 = _limit_weights(z2, params.m2, params.s) if params.m2 > 1 else np.ones(1)
    kern = w1[:, None] * w2[None, :] * _link(params, z1, z2)
    total = _rowmajor_sum(kern)
    if total <= 0.0:
        # e.g. rho = -1 with all geometric mass on the single zero of the link
        raise DomainError("kernel vanishes on every cell; the law is undefined here")
    return kern / total


def _rowmajor_sum(arr):
    total = 0.0
    for row in np.asarray(arr):
        total += math.fsum(row)
    return total


def _bwg_table(params):
    boundary = _boundary_class(params.q) is not None or _boundary_class(params.s) is not None
    if params.m1 == 1 or params.m2 == 1:
        # a single-point axis makes its concentration unidentifiable; the
        # printed boundary rows assume m >= 2, so normalise directly.
        return _normalised_kernel(params)
    if boundary:
        return _bwg_boundary_table(params)
    z1 = _offsets(params.m1, params.alpha)
    z2 = _offsets(params.m2, params.beta)
    w1 = _geom_weights(z1, params.m1, params.q)
    w2 = _geom_weights(z2, params.m2, params.s)
    return bwg_normalizer(params) * w1[:, None] * w2[None, :] * _link(params, z1, z2)


def _check_point(params, point):
    k, l = (point.k, point.l) if isinstance(point, GridPoint) else point
    if not params.grid.contains(k, l) or int(k) != k or int(l) != l:
        raise DomainError(f"point {(k, l)!r} is not on the {params.m1}x{params.m2} grid")
    return int(k), int(l)


def bwg_pmf(params, point):
    """BWG probability of a grid point, dispatching to limits on the boundary."""
    k, l = _check_point(params, point)
    interior = _boundary_class(params.q) is None and _boundary_class(params.s) is None
    if interior and params.m1 > 1 and params.m2 > 1:
        z1 = (k - params.alpha) % params.m1
        z2 = (l - params.beta) % params.m2
        f1 = params.q ** z1 + params.q ** (params.m1 - z1)
        f2 = params.s ** z2 + params.s ** (params.m2 - z2)
        arg = TWO_PI * z1 / params.m1 - params.delta * TWO_PI * z2 / params.m2
        return bwg_normalizer(params) * f1 * f2 * (1.0 + params.rho * math.cos(arg))
    return float(_bwg_table(params)[k, l])


# ---------------------------------------------------------------------------
# BGWG


def _bgwg_check(params):
    if _boundary_class(params.q) is not None or _boundary_class(params.s) is not None:
        if float(params.alpha).is_integer() and float(params.beta).is_integer():
            raise DomainError(
                "BGWG needs q, s in (0, 1); with integer locations use BwgParams "
                "for the limiting forms")
        raise DomainError("BGWG needs q, s in (0, 1)")


def _bgwg_kernel(params):
    z1 = _offsets(params.m1, params.alpha)
    z2 = _offsets(params.m2, params.beta)
    w1 = _geom_weights(z1, params.m1, params.q)
    w2 = _geom_weights(z2, params.m2, params.s)
    return w1[:, None] * w2[None, :] * _link(params, z1, z2)


def _bgwg_total(kern):
    total = _rowmajor_sum(kern)
    if total <= 0.0:
        raise DomainError("kernel vanishes on every cell; the law is undefined here")
    return total


def bgwg_normalizer(params):
    """``C7`` by direct row-major summation of the kernel over the grid."""
    _bgwg_check(params)
    return 1.0 / _bgwg_total(_bgwg_kernel(params))


def bgwg_inverse_normalizer_closed(params, variant="printed"):
    """Closed-form ``1/C7``.

    ``variant="printed"`` reproduces the published constant verbatim, whose
    last cosine uses ``(1 - a)`` in both arguments.  ``variant="symmetric"``
    uses ``(1 - b)`` in the second argument.  Only the latter agrees with
    direct summation; see the tests.
    """
    _bgwg_check(params)
    q, s, rho, d = params.q, params.s, params.rho, params.delta
    m1, m2 = params.m1, params.m2
    a, b = params.a, params.b
    if variant == "printed":
        last = (1 - a)
    elif variant == "symmetric":
        last = (1 - b)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    c8 = (s ** b - s ** (2 - b)) * (
        (q ** a - q ** (2 - a)) * math.cos(TWO_PI * a / m1 - d * TWO_PI * b / m2)
        + (q ** (1 - a) - q ** (1 + a)) * math.cos(TWO_PI * (1 - a) / m1 + d * TWO_PI * b / m2)
    ) + (s ** (1 - b) - s ** (1 + b)) * (
        (q ** a - q ** (2 - a)) * math.cos(TWO_PI * a / m1 + d * TWO_PI * (1 - b) / m2)
        + (q ** (1 - a) - q ** (1 + a)) * math.cos(TWO_PI * (1 - a) / m1 - d * TWO_PI * last / m2)
    )
    head = (q ** a + q ** (1 - a)) * (s ** b + s ** (1 - b)) / ((1 - q) * (1 - s))
    return _omp(q, m1) * _omp(s, m2) * (head + rho * c8 / (_aux(q, m1) * _aux(s, m2)))


def bgwg_pmf(params, point):
    """BGWG probability of a grid point (normaliser by direct summation)."""
    k, l = _check_point(params, point)
    _bgwg_check(params)
    kern = _bgwg_kernel(params)
    return float(kern[k, l] / _bgwg_total(kern))


# ---------------------------------------------------------------------------
# tables, marginals, conditionals, modes


def pmf_table(params):
    """Materialise every cell probability as a :class:`PmfTable`."""
    if isinstance(params, BgwgParams):
        _bgwg_check(params)
        kern = _bgwg_kernel(params)
        return PmfTable(params.grid, kern / _bgwg_total(kern))
    return PmfTable(params.grid, _bwg_table(params))


def _swap(params):
    """Exchange the roles of the two axes (the kernel is symmetric under it)."""
    return BwgParams(TorusGrid(params.m2, params.m1), params.beta, params.alpha,
                     params.s, params.q, params.rho, params.delta)


def _axis(which):
    if which in (1, "1", "x1", "X1", 0):
        return 1
    if which in (2, "2", "x2", "X2"):
        return 2
    raise ValueError(f"axis selector must be 1 or 2, got {which!r}")


def _marginal_x1(params):
    m1, m2, q, s, rho = params.m1, params.m2, params.q, params.s, params.rho
    if m1 == 1:
        return np.ones(1)
    z1 = _offsets(m1, params.alpha)
    c1 = np.cos(TWO_PI * z1 / m1)
    cq, cs = _boundary_class(q), _boundary_class(s)
    if m2 == 1 and (cq is not None or cs is not None):
        return _normalised_kernel(params).sum(axis=1)
    if cq == 0:
        out = np.zeros(m1)
        out[params.alpha] = 1.0
        return out
    if cs == 1:
        return wsg_vector(WsgParams(m1, q, params.alpha))
    if cq == 1 and cs is None:
        return (1.0 + rho * (1 - s) ** 2 * c1 / _aux(s, m2)) / m1
    if cq is None and cs == 0:
        a1 = _aux(q, m1)
        c5 = (1 - q) * a1 / (_omp(q, m1) * (1 + q) * (a1 + rho * (1 - q) ** 2))
        return c5 * _geom_weights(z1, m1, q) * (1 + rho * c1)
    if cq == 1 and cs == 0:
        return (1 + rho * c1) / m1
    if cq is None and cs is None:
        a1, b1 = _aux(q, m1), _aux(s, m2)
        c4 = (1 - q) / (_omp(q, m1) * (1 + q)) * a1 / (a1 * b1 + rho * (1 - q) ** 2 * (1 - s) ** 2)
        return c4 * _geom_weights(z1, m1, q) * (b1 + rho * (1 - s) ** 2 * c1)
    raise AssertionError("unreachable")  # pragma: no cover


def marginal_pmf(params, which=1):
    """Marginal law of ``X1`` (``which=1``) or ``X2`` (``which=2``).

    BWG parameters use the closed form and its boundary limits; BGWG
    parameters are summed from the table.
    """
    axis = _axis(which)
    if isinstance(params, BgwgParams):
        return pmf_table(params).p.sum(axis=2 - axis)
    if axis == 1:
        return _marginal_x1(params)
    return _marginal_x1(_swap(params))


def _conditional_x2(params, k):
    m1, m2, s, rho = params.m1, params.m2, params.s, params.rho
    z1 = (k - params.alpha) % m1
    z2 = _offsets(m2, params.beta)
    b1 = _aux(s, m2)
    c6 = (1 - s) / (_omp(s, m2) * (1 + s)) * b1
    arg = TWO_PI * z1 / m1 - params.delta * TWO_PI * z2 / m2
    num = _geom_weights(z2, m2, s) * (1 + rho * np.cos(arg))
    return c6 * num / (b1 + rho * (1 - s) ** 2 * math.cos(TWO_PI * z1 / m1))


def conditional_pmf(params, given_axis, index):
    """Conditional law of the other coordinate given ``X_{given_axis} = index``."""
    axis = _axis(given_axis)
    m_given = params.m1 if axis == 1 else params.m2
    if int(index) != index or not 0 <= index < m_given:
        raise DomainError(f"conditioning index {index!r} outside Z_{m_given}")
    index = int(index)
    interior = (
        isinstance(params, BwgParams)
        and _boundary_class(params.q) is None
        and _boundary_class(params.s) is None
        and params.m1 > 1 and params.m2 > 1
    )
    if interior:
        return _conditional_x2(params if axis == 1 else _swap(params), index)
    table = pmf_table(params).p
    row = table[index, :] if axis == 1 else table[:, index]
    total = row.sum()
    if total <= 0.0:
        raise DomainError(f"conditioning value {index} has zero probability")
    return row / total


def joint_mode(params, tol=MODE_TIE_TOL):
    """All grid points within ``tol`` of the maximal probability, sorted."""
    p = pmf_table(params).p
    ks, ls = np.nonzero(p >= p.max() - tol)
    return [GridPoint(int(k), int(l)) for k, l in sorted(zip(ks, ls))]
