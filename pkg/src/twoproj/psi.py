"""Symbol functions of a polynomial and its universal norm bound.

For a pair of projections in generic position, ``f(P, Q)`` acts on each
two-dimensional block as the 2x2 matrix ``[[g00, g01], [g10, g11]]``
evaluated at ``t = cos^2`` of the block's principal angle.  Its largest
singular value is ``psi_f(t)``; the maximum of ``psi_f`` over ``[0, 1]``
is the tight bound ``M_f`` on ``||f(P, Q)||`` over all projection pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ConsistencyError, DomainError
from .ncpoly import NcPoly, Scalar, decompose

__all__ = [
    "GContext",
    "MaxResult",
    "g_context",
    "psi_eval",
    "max_on_interval",
    "m_f",
    "corner_moduli",
    "big_psi_max",
    "GRID_POINTS",
]

GRID_POINTS = 4097
_GOLDEN_TOL = 1e-12
_RADICAND_TOL = 1e-12
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class GContext:
    """Symbol polynomials of ``f``.

    ``g01 = r * h01`` and ``g10 = r * h10`` with ``r(t) = sqrt(t(1-t))``;
    ``corners`` holds ``(alpha00, alpha01, alpha10, alpha11)``.
    """

    g00: Polynomial
    h01: Polynomial
    h10: Polynomial
    g11: Polynomial
    corners: tuple[complex, complex, complex, complex]

    def blocks(self, t):
        """``(g00, g01, g10, g11)`` evaluated at ``t``."""
        t = np.asarray(t, dtype=float)
        r = np.sqrt(np.clip(t * (1.0 - t), 0.0, None))
        return self.g00(t), r * self.h01(t), r * self.h10(t), self.g11(t)

    def g0_g1(self, t):
        t = np.asarray(t, dtype=float)
        a, d = self.g00(t), self.g11(t)
        b, c = self.h01(t), self.h10(t)
        rr = t * (1.0 - t)
        g0 = np.abs(a) ** 2 + np.abs(d) ** 2 + rr * (np.abs(b) ** 2 + np.abs(c) ** 2)
        g1 = a * d - rr * b * c
        return g0, g1


def _poly(coeffs) -> Polynomial:
    coeffs = list(coeffs) or [0j]
    return Polynomial(np.asarray(coeffs, dtype=complex))


@lru_cache(maxsize=256)
def _context_cached(f: NcPoly) -> GContext:
    d = decompose(f)
    f1, f2, f3, f4 = (_poly(c) for c in d.complex_coeffs())
    a0 = complex(d.a0)
    t = Polynomial([0.0, 1.0])
    g00 = a0 + f3 + t * (f1 + f2 + f4)
    g11 = a0 + (1 - t) * f4
    h01 = f1 + f4
    h10 = f2 + f4
    return GContext(g00, h01, h10, g11, _exact_corners(d))


def _sum(coeffs) -> Scalar:
    total = Scalar()
    for c in coeffs:
        total = total + c
    return total


def _exact_corners(d) -> tuple[complex, complex, complex, complex]:
    # corner values in the coefficient field, so they vanish exactly on ker(T)
    head = lambda cs: cs[0] if cs else Scalar()  # noqa: E731
    a00 = d.a0 + _sum(d.f3) + _sum(d.f1) + _sum(d.f2) + _sum(d.f4)
    a01 = d.a0 + head(d.f3)
    a10 = d.a0 + head(d.f4)
    a11 = d.a0
    return tuple(complex(c) for c in (a00, a01, a10, a11))


def g_context(f: NcPoly | GContext) -> GContext:
    if isinstance(f, GContext):
        return f
    return _context_cached(f)


def _sigma_max(a, b, c, d):
    """Largest singular value of ``[[a, b], [c, d]]``, elementwise.

    Equal to the closed formula, but evaluated without its cancellation:
    after a phase making the determinant nonnegative,
    ``s1 + s2 = |(a + conj d, b - conj c)|`` and
    ``s1 - s2 = |(a - conj d, b + conj c)|``.
    """
    det = a * d - b * c
    ph = np.exp(-0.5j * np.angle(det))
    a, b, c, d = a * ph, b * ph, c * ph, d * ph
    s_sum = np.hypot(np.abs(a + np.conj(d)), np.abs(b - np.conj(c)))
    s_diff = np.hypot(np.abs(a - np.conj(d)), np.abs(b + np.conj(c)))
    return 0.5 * (s_sum + s_diff)


def psi_eval(f: NcPoly | GContext, t):
    """Evaluate ``psi_f`` at ``t`` (scalar or array) in ``[0, 1]``.

    Mathematically ``sqrt((g0 + sqrt(g0^2 - 4|g1|^2)) / 2)``; the value is
    taken from the blocks directly (see ``_sigma_max``), which stays
    accurate where the two singular values meet.  The radicand is still
    formed as a consistency check: a deficit within ``1e-12`` relative to
    ``max(1, g0^2)`` is round-off, anything larger raises.
    At ``t = 0`` and ``t = 1`` the value is the larger of the two corner
    moduli, computed exactly from the coefficients.
    """
    ctx = g_context(f)
    arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("psi_f is defined on [0, 1] only")
    g0, g1 = ctx.g0_g1(arr)
    rad = g0**2 - 4.0 * np.abs(g1) ** 2
    floor = -_RADICAND_TOL * np.maximum(1.0, g0**2)
    if np.any(rad < floor):
        raise ConsistencyError(f"negative radicand {np.min(rad):.3e} in psi_f")
    val = _sigma_max(*ctx.blocks(arr))
    # at the endpoints the blocks are diagonal: psi is the larger corner modulus
    a00, a01, a10, a11 = (abs(c) for c in ctx.corners)
    val = np.where(arr == 0.0, max(a01, a10), np.where(arr == 1.0, max(a00, a11), val))
    return float(val) if val.ndim == 0 else val


@dataclass(frozen=True)
class MaxResult:
    value: float
    argmax_t: float
    interval: tuple[float, float]


def _golden_max(fun, a: float, b: float, tol: float = _GOLDEN_TOL):
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fun(d)
    t = 0.5 * (a + b)
    return t, fun(t)


def max_on_interval(f: NcPoly | GContext, lo: float, hi: float) -> MaxResult:
    """Maximize ``psi_f`` over ``[lo, hi]``.

    A uniform grid locates the best bracket, then golden-section search
    refines it; ``psi_f`` can have kinks so no derivatives are used.
    """
    if not (0.0 <= lo <= hi <= 1.0):
        raise DomainError(f"need 0 <= lo <= hi <= 1, got [{lo}, {hi}]")
    ctx = g_context(f)
    if hi == lo:
        return MaxResult(psi_eval(ctx, lo), float(lo), (float(lo), float(hi)))
    grid = np.linspace(lo, hi, GRID_POINTS)
    vals = psi_eval(ctx, grid)
    i = int(np.argmax(vals))
    best_t, best_v = float(grid[i]), float(vals[i])
    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, GRID_POINTS - 1)])
    t, v = _golden_max(lambda s: psi_eval(ctx, s), a, b)
    if v > best_v:
        best_t, best_v = t, v
    return MaxResult(best_v, best_t, (float(lo), float(hi)))


def m_f(f: NcPoly | GContext) -> MaxResult:
    """Universal tight bound ``max_[0,1] psi_f`` and where it is attained."""
    return max_on_interval(f, 0.0, 1.0)


def corner_moduli(f: NcPoly | GContext) -> dict[tuple[int, int], float]:
    ctx = g_context(f)
    keys = ((0, 0), (0, 1), (1, 0), (1, 1))
    return {k: abs(c) for k, c in zip(keys, ctx.corners)}


def big_psi_max(f: NcPoly | GContext) -> float:
    """Maximum of the extended symbol: ``psi_f`` on [0, 1] joined with the four corner moduli."""
    return max(m_f(f).value, *corner_moduli(f).values())
