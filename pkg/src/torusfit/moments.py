"""Trigonometric moments and the Jupp-Mardia circular correlation.

Each angle is embedded in the plane as ``(cos X, sin X)``.  Moments are
available two ways: exact finite sums over the pmf table, and closed forms
built from the auxiliary quantities ``H_i, G_i, N_i, M_i``.  The finite sums
are the default engine and anchor every closed form in the tests.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .distributions import (
    BgwgParams,
    BwgParams,
    _aux,
    _boundary_class,
    _omp,
    bgwg_inverse_normalizer_closed,
    pmf_table,
)
from .errors import DomainError, SingularityError
from .torus import TWO_PI, TorusGrid

__all__ = [
    "TrigMoments",
    "MomentAuxiliaries",
    "CorrelationComponents",
    "trig_moments_brute",
    "trig_moments_closed",
    "moment_auxiliaries",
    "covariance_matrix",
    "bwg_varcov_closed",
    "correlation_components",
    "jupp_mardia_rho1sq",
    "jupp_mardia_trace",
    "monotonicity_probe",
    "MonotonicityReport",
]

H2_TOL = 1e-14


@dataclass(frozen=True)
class TrigMoments:
    e_cos1: float
    e_cos2: float
    e_sin1: float
    e_sin2: float
    e_cos1cos1: float
    e_cos2cos2: float
    e_sin1sin1: float
    e_sin2sin2: float
    e_cos1cos2: float
    e_cos1sin2: float
    e_sin1cos2: float
    e_sin1sin2: float
    e_cos1sin1: float
    e_cos2sin2: float

    def as_dict(self):
        return asdict(self)

    def as_array(self):
        return np.array(list(asdict(self).values()))


@dataclass(frozen=True)
class MomentAuxiliaries:
    A: np.ndarray
    B: np.ndarray
    H: np.ndarray
    G: np.ndarray
    N: np.ndarray
    M: np.ndarray
    phi: float
    psi: float
    inv_c7: float
    h_bwg: float


@dataclass(frozen=True)
class CorrelationComponents:
    rho1cc: float
    rho1cs: float
    rho1sc: float
    rho1ss: float
    rho1p: float
    rho2p: float
    rho1sq: float


# ---------------------------------------------------------------------------
# brute force


def trig_moments_brute(params):
    """Moments as exact finite sums over the full pmf table."""
    p = pmf_table(params).p
    t1, t2 = params.grid.angles()
    c1, s1 = np.cos(t1), np.sin(t1)
    c2, s2 = np.cos(t2), np.sin(t2)
    p1, p2 = p.sum(axis=1), p.sum(axis=0)
    return TrigMoments(
        e_cos1=p1 @ c1,
        e_cos2=p2 @ c2,
        e_sin1=p1 @ s1,
        e_sin2=p2 @ s2,
        e_cos1cos1=p1 @ (c1 * c1),
        e_cos2cos2=p2 @ (c2 * c2),
        e_sin1sin1=p1 @ (s1 * s1),
        e_sin2sin2=p2 @ (s2 * s2),
        e_cos1cos2=c1 @ p @ c2,
        e_cos1sin2=c1 @ p @ s2,
        e_sin1cos2=s1 @ p @ c2,
        e_sin1sin2=s1 @ p @ s2,
        e_cos1sin1=p1 @ (c1 * s1),
        e_cos2sin2=p2 @ (c2 * s2),
    )


# ---------------------------------------------------------------------------
# closed forms


def moment_auxiliaries(params):
    """``A_i, B_i, H_i, G_i, N_i, M_i`` (i = 0..3) for locations in [0, 1).

    The locations used are the fractional parts of ``alpha`` and ``beta``;
    callers rotate the resulting moments back by the integer parts.
    """
    q, s = params.q, params.s
    if _boundary_class(q) is not None or _boundary_class(s) is not None:
        raise DomainError("closed-form moments need q, s in (0, 1)")
    m1, m2 = params.m1, params.m2
    a = params.alpha - math.floor(params.alpha)
    b = params.beta - math.floor(params.beta)
    i = np.arange(4)
    ang1 = TWO_PI * i / m1
    ang2 = TWO_PI * i / m2
    # 1 + x^2 - 2x cos(2 i pi / m) in a cancellation-free form
    A = (1 - q) ** 2 + 4 * q * np.sin(ang1 / 2) ** 2
    B = (1 - s) ** 2 + 4 * s * np.sin(ang2 / 2) ** 2
    H = _omp(q, m1) * (q ** a - q ** (2 - a) - q * (q ** a - q ** -a) * np.cos(ang1)) / A
    G = q * _omp(q, m1) * (q ** -a - q ** a) * np.sin(ang1) / A
    N = _omp(s, m2) * (s ** b - s ** (2 - b) - s * (s ** b - s ** -b) * np.cos(ang2)) / B
    M = s * _omp(s, m2) * (s ** -b - s ** b) * np.sin(ang2) / B
    reduced = BgwgParams(params.grid, a, b, q, s, params.rho, params.delta)
    return MomentAuxiliaries(
        A=A, B=B, H=H, G=G, N=N, M=M,
        phi=TWO_PI * a / m1 - TWO_PI * b / m2,
        psi=TWO_PI * a / m1 + TWO_PI * b / m2,
        inv_c7=bgwg_inverse_normalizer_closed(reduced, variant="symmetric"),
        h_bwg=1.0 / (A[1] * B[1] + params.rho * (1 - q) ** 2 * (1 - s) ** 2),
    )


def _moments_delta_plus(x, r):
    H, G, N, M = x.H, x.G, x.N, x.M
    c, sn = math.cos(x.phi), math.sin(x.phi)
    C7 = 1.0 / x.inv_c7
    h = 0.5 * r
    f = 0.25 * r
    return dict(
        e_cos1=C7 * (H[1] * N[0] + h * ((H[2] * N[1] + G[2] * M[1] + H[0] * N[1]) * c
                                         - (H[2] * M[1] - G[2] * N[1] + H[0] * M[1]) * sn)),
        e_cos2=C7 * (H[0] * N[1] + h * ((H[1] * N[0] + H[1] * N[2] + G[1] * M[2]) * c
                                         + (G[1] * N[0] - H[1] * M[2] + G[1] * N[2]) * sn)),
        e_sin1=C7 * (G[1] * N[0] + h * ((H[0] * M[1] - H[2] * M[1] + G[2] * N[1]) * c
                                         + (H[0] * N[1] - H[2] * N[1] - G[2] * M[1]) * sn)),
        e_sin2=C7 * (H[0] * M[1] + h * ((G[1] * N[0] + H[1] * M[2] - G[1] * N[2]) * c
                                         + (H[1] * N[2] + G[1] * M[2] - H[1] * N[0]) * sn)),
        e_cos1cos1=0.5 * C7 * (
            H[0] * N[0] + H[2] * N[0]
            + h * (((3 * H[1] + H[3]) * N[1] + (G[1] + G[3]) * M[1]) * c
                   - ((3 * H[1] + H[3]) * M[1] - (G[1] + G[3]) * N[1]) * sn)),
        e_cos2cos2=0.5 * C7 * (
            H[0] * N[0] + H[0] * N[2]
            + h * (((3 * N[1] + N[3]) * H[1] + (M[1] + M[3]) * G[1]) * c
                   - ((M[1] + M[3]) * H[1] - (3 * N[1] + N[3]) * G[1]) * sn)),
        e_sin1sin1=0.5 * C7 * (
            H[0] * N[0] - H[2] * N[0]
            + h * (((H[1] - H[3]) * N[1] + (3 * G[1] - G[3]) * M[1]) * c
                   - ((H[1] - H[3]) * M[1] - (3 * G[1] - G[3]) * N[1]) * sn)),
        e_sin2sin2=0.5 * C7 * (
            H[0] * N[0] - H[0] * N[2]
            + h * (((N[1] - N[3]) * H[1] + (3 * M[1] - M[3]) * G[1]) * c
                   - ((3 * M[1] - M[3]) * H[1] - (N[1] - N[3]) * G[1]) * sn)),
        e_cos1cos2=C7 * (H[1] * N[1] + f * (
            (H[2] * N[0] + H[0] * N[2] + H[2] * N[2] + G[2] * M[2] + H[0] * N[0]) * c
            + (G[2] * N[0] - H[0] * M[2] - H[2] * M[2] + G[2] * N[2]) * sn)),
        e_cos1sin2=C7 * (H[1] * M[1] + f * (
            (G[2] * N[0] + H[0] * M[2] - G[2] * N[2] + H[2] * M[2]) * c
            + (H[0] * N[2] - H[2] * N[0] + H[2] * N[2] + G[2] * M[2] - H[0] * N[0]) * sn)),
        e_sin1cos2=C7 * (G[1] * N[1] + f * (
            (G[2] * N[0] + H[0] * M[2] - H[2] * M[2] + G[2] * N[2]) * c
            + (H[0] * N[2] - H[2] * N[0] - H[2] * N[2] - G[2] * M[2] + H[0] * N[0]) * sn)),
        e_sin1sin2=C7 * (G[1] * M[1] - f * (
            (H[2] * N[0] + H[0] * N[2] - H[2] * N[2] - G[2] * M[2] - H[0] * N[0]) * c
            + (G[2] * N[0] - H[0] * M[2] + H[2] * M[2] - G[2] * N[2]) * sn)),
        e_cos1sin1=0.5 * C7 * (G[2] * N[0] + h * (
            (H[1] * M[1] - H[3] * M[1] + G[1] * N[1] + G[3] * N[1]) * c
            + (H[1] * N[1] - H[3] * N[1] - G[1] * M[1] - G[3] * M[1]) * sn)),
        e_cos2sin2=0.5 * C7 * (H[0] * M[2] + h * (
            (M[1] * H[1] + M[3] * H[1] + N[1] * G[1] - N[3] * G[1]) * c
            + (N[3] * H[1] - N[1] * H[1] + M[1] * G[1] + M[3] * G[1]) * sn)),
    )


def _moments_delta_minus(x, r):
    H, G, N, M = x.H, x.G, x.N, x.M
    c, sn = math.cos(x.psi), math.sin(x.psi)
    C7 = 1.0 / x.inv_c7
    h = 0.5 * r
    f = 0.25 * r
    return dict(
        e_cos1=C7 * (H[1] * N[0] + h * ((H[2] * N[1] - G[2] * M[1] + H[0] * N[1]) * c
                                         + (H[2] * M[1] + G[2] * N[1] + H[0] * M[1]) * sn)),
        e_cos2=C7 * (H[0] * N[1] + h * ((H[1] * N[2] - G[1] * M[2] + H[1] * N[0]) * c
                                         + (H[1] * M[2] + G[1] * N[2] + G[1] * N[0]) * sn)),
        e_sin1=C7 * (G[1] * N[0] + h * ((H[2] * M[1] + G[2] * N[1] - H[0] * M[1]) * c
                                         + (G[2] * M[1] - H[2] * N[1] + H[0] * N[1]) * sn)),
        e_sin2=C7 * (H[0] * M[1] + h * ((H[1] * M[2] + G[1] * N[2] - G[1] * N[0]) * c
                                         + (G[1] * M[2] - H[1] * N[2] + H[1] * N[0]) * sn)),
        e_cos1cos1=0.5 * C7 * (
            H[0] * N[0] + H[2] * N[0]
            + h * ((3 * H[1] * N[1] - G[1] * M[1] + H[3] * N[1] - G[3] * M[1]) * c
                   + (3 * H[1] * M[1] + G[1] * N[1] + H[3] * M[1] + G[3] * N[1]) * sn)),
        e_cos2cos2=0.5 * C7 * (
            H[0] * N[0] + H[0] * N[2]
            + h * ((3 * H[1] * N[1] - G[1] * M[1] + H[1] * N[3] - G[1] * M[3]) * c
                   + (H[1] * M[1] + 3 * G[1] * N[1] + H[1] * M[3] + G[1] * N[3]) * sn)),
        e_sin1sin1=0.5 * C7 * (
            H[0] * N[0] - H[2] * N[0]
            + h * ((H[1] * N[1] - 3 * G[1] * M[1] - H[3] * N[1] + G[3] * M[1]) * c
                   + (H[1] * M[1] + 3 * G[1] * N[1] - H[3] * M[1] - G[3] * N[1]) * sn)),
        e_sin2sin2=0.5 * C7 * (
            H[0] * N[0] - H[0] * N[2]
            + h * ((H[1] * N[1] - 3 * G[1] * M[1] - H[1] * N[3] + G[1] * M[3]) * c
                   + (3 * H[1] * M[1] + G[1] * N[1] - H[1] * M[3] - G[1] * N[3]) * sn)),
        e_cos1cos2=C7 * (H[1] * N[1] + f * (
            (H[2] * N[2] - G[2] * M[2] + H[0] * N[0] + H[2] * N[0] + H[0] * N[2]) * c
            + (H[2] * M[2] + G[2] * N[2] + G[2] * N[0] + H[0] * M[2]) * sn)),
        e_cos1sin2=C7 * (H[1] * M[1] + f * (
            (H[2] * M[2] + G[2] * N[2] - G[2] * N[0] + H[0] * M[2]) * c
            + (G[2] * M[2] - H[2] * N[2] + H[0] * N[0] + H[2] * N[0] - H[0] * N[2]) * sn)),
        e_sin1cos2=C7 * (G[1] * N[1] + f * (
            (H[2] * M[2] + G[2] * N[2] + G[2] * N[0] - H[0] * M[2]) * c
            - (H[2] * N[2] - G[2] * M[2] - H[0] * N[0] + H[2] * N[0] - H[0] * N[2]) * sn)),
        e_sin1sin2=C7 * (G[1] * M[1] - f * (
            (H[2] * N[2] - G[2] * M[2] + H[0] * N[0] - H[2] * N[0] - H[0] * N[2]) * c
            + (H[2] * M[2] + G[2] * N[2] - G[2] * N[0] - H[0] * M[2]) * sn)),
        e_cos1sin1=0.5 * C7 * (G[2] * N[0] + h * (
            (H[3] * M[1] + G[3] * N[1] - H[1] * M[1] + G[1] * N[1]) * c
            + (H[1] * N[1] + G[1] * M[1] - H[3] * N[1] + G[3] * M[1]) * sn)),
        e_cos2sin2=0.5 * C7 * (H[0] * M[2] + h * (
            (H[1] * M[1] + H[1] * M[3] - G[1] * N[1] + G[1] * N[3]) * c
            + (H[1] * N[1] - H[1] * N[3] + G[1] * M[1] + G[1] * M[3]) * sn)),
    )


def _rotate(m, theta1, theta2):
    """Rotate moments of the reduced angles by integer-location offsets."""
    R1 = np.array([[math.cos(theta1), -math.sin(theta1)], [math.sin(theta1), math.cos(theta1)]])
    R2 = np.array([[math.cos(theta2), -math.sin(theta2)], [math.sin(theta2), math.cos(theta2)]])
    mu1 = R1 @ [m["e_cos1"], m["e_sin1"]]
    mu2 = R2 @ [m["e_cos2"], m["e_sin2"]]
    S11 = R1 @ np.array([[m["e_cos1cos1"], m["e_cos1sin1"]],
                         [m["e_cos1sin1"], m["e_sin1sin1"]]]) @ R1.T
    S22 = R2 @ np.array([[m["e_cos2cos2"], m["e_cos2sin2"]],
                         [m["e_cos2sin2"], m["e_sin2sin2"]]]) @ R2.T
    S12 = R1 @ np.array([[m["e_cos1cos2"], m["e_cos1sin2"]],
                         [m["e_sin1cos2"], m["e_sin1sin2"]]]) @ R2.T
    return TrigMoments(
        e_cos1=mu1[0], e_cos2=mu2[0], e_sin1=mu1[1], e_sin2=mu2[1],
        e_cos1cos1=S11[0, 0], e_cos2cos2=S22[0, 0],
        e_sin1sin1=S11[1, 1], e_sin2sin2=S22[1, 1],
        e_cos1cos2=S12[0, 0], e_cos1sin2=S12[0, 1],
        e_sin1cos2=S12[1, 0], e_sin1sin2=S12[1, 1],
        e_cos1sin1=S11[0, 1], e_cos2sin2=S22[0, 1],
    )


def trig_moments_closed(params):
    """Closed-form moments for either location family.

    The closed forms hold for locations in [0, 1); general locations are
    handled by computing the moments of the fractional-part distribution and
    rotating them back by ``2*pi*floor(alpha)/m1`` and ``2*pi*floor(beta)/m2``.
    """
    x = moment_auxiliaries(params)
    if params.delta == 1:
        raw = _moments_delta_plus(x, params.rho)
    else:
        raw = _moments_delta_minus(x, params.rho)
    return _rotate(raw,
                   TWO_PI * math.floor(params.alpha) / params.m1,
                   TWO_PI * math.floor(params.beta) / params.m2)


def covariance_matrix(mom):
    """4x4 covariance of ``(cos X1, sin X1, cos X2, sin X2)``."""
    mu = np.array([mom.e_cos1, mom.e_sin1, mom.e_cos2, mom.e_sin2])
    second = np.array([
        [mom.e_cos1cos1, mom.e_cos1sin1, mom.e_cos1cos2, mom.e_cos1sin2],
        [mom.e_cos1sin1, mom.e_sin1sin1, mom.e_sin1cos2, mom.e_sin1sin2],
        [mom.e_cos1cos2, mom.e_sin1cos2, mom.e_cos2cos2, mom.e_cos2sin2],
        [mom.e_cos1sin2, mom.e_sin1sin2, mom.e_cos2sin2, mom.e_sin2sin2],
    ])
    return second - np.outer(mu, mu)


def bwg_varcov_closed(params):
    """Closed-form 4x4 covariance of ``(cos X1, sin X1, cos X2, sin X2)``.

    Valid for a BWG law centred at the origin (``alpha = beta = 0``).  The
    centred law is symmetric under ``(x1, x2) -> (-x1, -x2)``, so every
    cosine/sine covariance vanishes and six entries remain.  For
    ``delta = -1`` the reflection ``X2 -> -X2`` maps onto the ``delta = 1``
    law and only flips the sign of ``cov(sin X1, sin X2)``.
    """
    if params.alpha != 0 or params.beta != 0:
        raise DomainError("closed-form variances need alpha = beta = 0")
    q, s, r = params.q, params.s, params.rho
    if _boundary_class(q) is not None or _boundary_class(s) is not None:
        raise DomainError("closed-form variances need q, s in (0, 1)")
    m1, m2 = params.m1, params.m2
    i = np.arange(4)
    A = (1 - q) ** 2 + 4 * q * np.sin(np.pi * i / m1) ** 2
    B = (1 - s) ** 2 + 4 * s * np.sin(np.pi * i / m2) ** 2
    A1, A2, A3 = A[1:]
    B1, B2, B3 = B[1:]
    uq, us = 1 - q, 1 - s
    H = 1.0 / (A1 * B1 + r * uq ** 2 * us ** 2)
    pq = 1 / uq + uq / A2
    ps = 1 / us + us / B2

    var_s1 = 0.5 * uq * A1 * H * (
        B1 * (1 / uq - uq / A2) + uq * us ** 2 * (1 / A1 - 0.5 * (1 / A3 + 1 / A1)) * r)
    var_s2 = 0.5 * us * B1 * H * (
        A1 * (1 / us - us / B2) + uq ** 2 * us * (1 / B1 - 0.5 * (1 / B3 + 1 / B1)) * r)
    var_c1 = uq * A1 * H ** 2 * (
        A1 * B1 ** 2 / 2 * pq - B1 ** 2 * uq ** 3 / A1
        + (A1 * B1 * uq * us ** 2 / 4 * (1 / A3 + 3 / A1) - B1 * uq ** 2 / 2 * us ** 2 * pq) * r
        - 0.25 * (A1 * uq * us ** 4 * pq ** 2 - uq ** 3 * us ** 4 * (1 / A3 + 3 / A1)) * r ** 2)
    var_c2 = us * B1 * H ** 2 * (
        A1 ** 2 * B1 / 2 * ps - A1 ** 2 * us ** 3 / B1
        + (A1 * B1 / 4 * uq ** 2 * us * (1 / B3 + 3 / B1) - A1 * us ** 2 / 2 * uq ** 2 * ps) * r
        - 0.25 * (B1 * uq ** 4 * us * ps ** 2 - uq ** 4 * us ** 3 * (1 / B3 + 3 / B1)) * r ** 2)
    cov_ss = 0.25 * uq * us * A1 * B1 * H * (us / B2 - 1 / us) * (uq / A2 - 1 / uq) * r
    cov_cc = uq * us * H ** 2 * (A1 ** 2 / 2 * pq - uq ** 3) * (B1 ** 2 / 2 * ps - us ** 3) * r

    cov_ss *= params.delta
    S = np.zeros((4, 4))
    S[0, 0], S[1, 1], S[2, 2], S[3, 3] = var_c1, var_s1, var_c2, var_s2
    S[0, 2] = S[2, 0] = cov_cc
    S[1, 3] = S[3, 1] = cov_ss
    return S


# ---------------------------------------------------------------------------
# Jupp-Mardia correlation


def _moments(params, engine):
    if engine == "brute":
        return trig_moments_brute(params)
    if engine == "closed":
        return trig_moments_closed(params)
    raise ValueError(f"unknown engine {engine!r}; expected 'brute' or 'closed'")


def _check_nondegenerate(params):
    if params.q == 0 or params.s == 0 or params.m1 == 1 or params.m2 == 1:
        raise DomainError("a marginal is degenerate; the correlation is undefined")


def _s1_terms(S):
    vc1, vs1, vc2, vs2 = S[0, 0], S[1, 1], S[2, 2], S[3, 3]
    c1, c2 = S[0, 1], S[2, 3]
    cc, cs, sc, ss = S[0, 2], S[0, 3], S[1, 2], S[1, 3]
    h1 = ((cc ** 2 * vs2 + cs ** 2 * vc2) * vs1
          + (sc ** 2 * vs2 + ss ** 2 * vc2) * vc1
          + 2 * (cc * ss + cs * sc) * c1 * c2
          - 2 * (cc * sc * vs2 + cs * ss * vc2) * c1
          - 2 * (cc * cs * vs1 + sc * ss * vc1) * c2)
    h2 = (vc1 * vs1 - c1 ** 2) * (vc2 * vs2 - c2 ** 2)
    return h1, h2


def jupp_mardia_rho1sq(params, engine="brute"):
    """Squared circular correlation as the ratio ``h1 / h2`` of covariance terms.

    Parameters
    ----------
    params : BwgParams or BgwgParams
    engine : {"brute", "closed"}
        Source of the trigonometric moments.

    Raises
    ------
    DomainError
        If either marginal is a point mass.
    SingularityError
        If ``h2`` falls below ``1e-14``, as happens when an axis has only two
        support points and ``sin X`` is identically zero.
    """
    _check_nondegenerate(params)
    h1, h2 = _s1_terms(covariance_matrix(_moments(params, engine)))
    if h2 <= H2_TOL:
        raise SingularityError(f"h2 = {h2:.3g} is below {H2_TOL:g}")
    return max(h1 / h2, 0.0)


def correlation_components(params, engine="brute"):
    """Pairwise correlations and the squared correlation built from them."""
    _check_nondegenerate(params)
    S = covariance_matrix(_moments(params, engine))
    sd = np.sqrt(np.diag(S))
    if np.any(sd ** 2 <= H2_TOL):
        raise SingularityError("a component of the embedding has zero variance")
    R = S / np.outer(sd, sd)
    cc, cs, sc, ss = R[0, 2], R[0, 3], R[1, 2], R[1, 3]
    p1, p2 = R[0, 1], R[2, 3]
    denom = (1 - p1 ** 2) * (1 - p2 ** 2)
    if denom <= H2_TOL:
        raise SingularityError("cos X and sin X are collinear for one variable")
    num = (cc ** 2 + cs ** 2 + sc ** 2 + ss ** 2
           + 2 * (cc * ss + cs * sc) * p1 * p2
           - 2 * (cc * sc + cs * ss) * p1
           - 2 * (cc * cs + sc * ss) * p2)
    return CorrelationComponents(cc, cs, sc, ss, p1, p2, max(num / denom, 0.0))


def jupp_mardia_trace(params, engine="brute"):
    """``tr(S11^-1 S12 S22^-1 S21)`` evaluated with dense linear algebra."""
    _check_nondegenerate(params)
    S = covariance_matrix(_moments(params, engine))
    S11, S12, S22 = S[:2, :2], S[:2, 2:], S[2:, 2:]
    if np.linalg.det(S11) * np.linalg.det(S22) <= H2_TOL:
        raise SingularityError("embedded covariance blocks are singular")
    return float(np.trace(np.linalg.solve(S11, S12) @ np.linalg.solve(S22, S12.T)))


@dataclass(frozen=True)
class MonotonicityReport:
    rho_grid: tuple
    values: tuple
    nondecreasing_positive: bool
    nonincreasing_negative: bool

    @property
    def passed(self):
        return self.nondecreasing_positive and self.nonincreasing_negative


def monotonicity_probe(params, rho_grid, engine="brute", slack=1e-10):
    """Evaluate the squared correlation along a grid of ``rho`` values.

    ``params`` supplies everything except ``rho``; its own ``rho`` is ignored.
    The report flags whether the values are non-decreasing over ``rho >= 0``
    and non-increasing over ``rho < 0``, each up to ``slack``.
    """
    grid = np.asarray(rho_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("rho_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(grid) < 0):
        raise ValueError("rho_grid must be sorted ascending")
    if np.any(np.abs(grid) > 1):
        raise ValueError("rho_grid entries must lie in [-1, 1]")
    values = np.array([jupp_mardia_rho1sq(params.replace(rho=float(r)), engine) for r in grid])
    pos, neg = grid >= 0, grid <= 0
    # the value at rho = 0 belongs to both branches
    up = bool(np.all(np.diff(values[pos]) >= -slack))
    down = bool(np.all(np.diff(values[neg]) <= slack))
    return MonotonicityReport(tuple(grid), tuple(values), up, down)
