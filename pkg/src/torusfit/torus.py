"""Grid geometry on the discrete torus.

Indices are the internal representation; angles are derived on demand so
that wrap arithmetic never accumulates floating error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParseError

TWO_PI = 2.0 * math.pi

COMPASS_LABELS = (
    "N", "NNE", "NE", "ENE", "E", "ESE", "SE", "SSE",
    "S", "SSW", "SW", "WSW", "W", "WNW", "NW", "NNW",
)
_COMPASS_INDEX = {label: i for i, label in enumerate(COMPASS_LABELS)}


@dataclass(frozen=True)
class TorusGrid:
    """Sample space ``Z_m1 x Z_m2``."""

    m1: int
    m2: int

    def __post_init__(self):
        for name in ("m1", "m2"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise DomainError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def shape(self):
        return (self.m1, self.m2)

    @property
    def size(self):
        return self.m1 * self.m2

    def angles(self):
        """Return the two vectors of grid angles."""
        return (TWO_PI * np.arange(self.m1) / self.m1,
                TWO_PI * np.arange(self.m2) / self.m2)

    def contains(self, k, l):
        return 0 <= k < self.m1 and 0 <= l < self.m2


@dataclass(frozen=True)
class GridPoint:
    k: int
    l: int


def _check_index(k, m):
    if int(k) != k or not 0 <= k < m:
        raise DomainError(f"grid index {k!r} outside Z_{m}")


def angle_of(k, m):
    """Angle ``2*pi*k/m`` of grid index ``k`` on a grid of size ``m``."""
    _check_index(k, m)
    return TWO_PI * k / m


def zeta(k, alpha, m):
    """Wrapped offset ``(k - alpha) mod m`` in ``[0, m)``.

    ``alpha`` may be real; the result is integer-valued when it is not.
    Python's ``%`` already maps negative remainders into ``[0, m)``.
    """
    _check_index(k, m)
    if not 0 <= alpha < m:
        raise DomainError(f"location {alpha!r} outside [0, {m})")
    z = (k - alpha) % m
    # (k - alpha) with tiny negative rounding can land exactly on m
    return 0.0 if z >= m else z


def compass_to_index(label):
    """Map a 16-point compass label (N=0, clockwise) to its index."""
    key = str(label).strip().upper()
    try:
        return _COMPASS_INDEX[key]
    except KeyError:
        raise ParseError(f"unknown compass label {label!r}") from None


def label_of(index):
    """Inverse of :func:`compass_to_index`."""
    _check_index(index, 16)
    return COMPASS_LABELS[int(index)]
