"""Concrete pairs of orthogonal projection matrices.

``analyze`` recovers the canonical-form data of a pair: the dimensions of
the four intersections ``V_P ∩ V_Q``, ``V_P ∩ V_Q^⊥``, ``V_P^⊥ ∩ V_Q``,
``V_P^⊥ ∩ V_Q^⊥``, the multiplicity ``m`` of the generic part, and the
squared cosines of the reduced principal angles.  ``norm_via_formula`` turns
that data into ``||f(P, Q)||`` without forming ``f(P, Q)``; ``op_norm`` of
``eval_matrix`` is the direct route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DomainError, ProjectionError
from .ncpoly import NcPoly
from .psi import corner_moduli, g_context, m_f, psi_eval

__all__ = [
    "EPS_ANGLE",
    "PairAnalysis",
    "check_projection",
    "range_basis",
    "analyze",
    "eval_matrix",
    "op_norm",
    "norm_via_formula",
    "model_pair",
    "extremal_partner",
]

EPS_ANGLE = 1e-8
_HERM_TOL = 1e-10
_IDEM_TOL = 1e-10
_TRACE_TOL = 1e-8


def check_projection(P, name: str = "P") -> int:
    """Validate that ``P`` is a Hermitian idempotent; return its rank."""
    P = np.asarray(P)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
        raise ProjectionError(f"{name} must be a non-empty square matrix, got shape {P.shape}")
    n = P.shape[0]
    if np.linalg.norm(P - P.conj().T) > _HERM_TOL * n:
        raise ProjectionError(f"{name} is not Hermitian")
    if np.linalg.norm(P @ P - P) > _IDEM_TOL * n:
        raise ProjectionError(f"{name} is not idempotent")
    tr = float(np.real(np.trace(P)))
    rank = round(tr)
    if abs(tr - rank) >= _TRACE_TOL:
        raise ProjectionError(f"trace of {name} is not an integer: {tr!r}")
    return rank


def range_basis(P, rank: int | None = None):
    """Orthonormal bases ``(range, kernel)`` of a projection from its eigendecomposition."""
    w, v = np.linalg.eigh(np.asarray(P))
    if rank is None:
        rank = int(np.sum(w > 0.5))
    n = len(w)
    # eigh sorts ascending: kernel first, range last
    return v[:, n - rank :], v[:, : n - rank]


@dataclass(frozen=True)
class PairAnalysis:
    n: int
    m00: int
    m01: int
    m10: int
    m11: int
    m: int
    reduced_cos2: tuple[float, ...]

    @property
    def rank_p(self) -> int:
        return self.m00 + self.m01 + self.m

    @property
    def rank_q(self) -> int:
        return self.m00 + self.m10 + self.m

    def present_corners(self) -> list[tuple[int, int]]:
        dims = {(0, 0): self.m00, (0, 1): self.m01, (1, 0): self.m10, (1, 1): self.m11}
        return [k for k, d in dims.items() if d > 0]


def _padded(vals, size, fill):
    vals = np.asarray(vals, dtype=float)
    if len(vals) >= size:
        return vals[:size]
    return np.concatenate([vals, np.full(size - len(vals), fill)])


def analyze(P, Q, eps_angle: float = EPS_ANGLE) -> PairAnalysis:
    """Canonical-form dimensions and reduced principal angles of ``(P, Q)``.

    Cosines come from the singular values of ``V_P^* V_Q`` and sines from
    those of ``W_Q^* V_P`` (``W_Q`` spans the kernel of ``Q``).  Each angle
    is classified from whichever of the two is small, which keeps
    near-zero and near-right angles accurate to machine precision.
    """
    P = np.asarray(P)
    Q = np.asarray(Q)
    if P.shape != Q.shape:
        raise DomainError(f"dimension mismatch: {P.shape} vs {Q.shape}")
    kp = check_projection(P, "P")
    kq = check_projection(Q, "Q")
    n = P.shape[0]
    VP, _ = range_basis(P, kp)
    VQ, WQ = range_basis(Q, kq)

    if kp == 0:
        m00 = m01 = m = 0
        cos2: list[float] = []
    else:
        cos = sla.svdvals(VP.conj().T @ VQ) if kq else np.zeros(0)
        sin = sla.svdvals(WQ.conj().T @ VP) if n - kq else np.zeros(0)
        # one angle per direction of V_P, sorted from smallest to largest
        cos = np.sort(_padded(np.clip(cos, 0.0, 1.0), kp, 0.0))[::-1]
        sin = np.sort(_padded(np.clip(sin, 0.0, 1.0), kp, 0.0))
        m00 = m01 = 0
        cos2 = []
        for c, s in zip(cos, sin):
            if s <= eps_angle:
                m00 += 1
            elif c <= eps_angle:
                m01 += 1
            else:
                cos2.append(c * c if c <= s else 1.0 - s * s)
        m = len(cos2)
    m10 = kq - m00 - m
    m11 = n - m00 - m01 - m10 - 2 * m
    if m10 < 0 or m11 < 0:
        raise ProjectionError(
            f"inconsistent canonical dimensions (m10={m10}, m11={m11}); "
            "angles too close to the classification threshold"
        )
    return PairAnalysis(n, m00, m01, m10, m11, m, tuple(sorted(cos2, reverse=True)))


def eval_matrix(f: NcPoly, P, Q):
    """Evaluate ``f(P, Q)`` word by word."""
    P = np.asarray(P)
    Q = np.asarray(Q)
    if P.shape != Q.shape or P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise DomainError(f"dimension mismatch: {P.shape} vs {Q.shape}")
    n = P.shape[0]
    dtype = np.result_type(P, Q, complex)
    out = np.zeros((n, n), dtype=dtype)
    gens = {"x": P, "y": Q}
    pairs = {"x": P @ Q, "y": Q @ P}
    powers: dict[tuple[str, int], np.ndarray] = {}

    def alt_power(first, k):
        key = (first, k)
        if key not in powers:
            powers[key] = np.linalg.matrix_power(pairs[first], k)
        return powers[key]

    for w, c in f.terms.items():
        coef = complex(c)
        if w.length == 0:
            out[np.diag_indices(n)] += coef
            continue
        k, odd = divmod(w.length, 2)
        if k == 0:
            term = gens[w.first]
        elif odd:
            term = alt_power(w.first, k) @ gens[w.first]
        else:
            term = alt_power(w.first, k)
        out += coef * term
    return out


def op_norm(A) -> float:
    """Operator (spectral) norm: the largest singular value."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(sla.svdvals(A, check_finite=True)[0])


def norm_via_formula(f: NcPoly, P, Q, analysis: PairAnalysis | None = None) -> float:
    """``||f(P, Q)||`` from the canonical-form data of the pair alone."""
    a = analysis if analysis is not None else analyze(P, Q)
    ctx = g_context(f)
    best = 0.0
    if a.reduced_cos2:
        best = float(np.max(psi_eval(ctx, np.asarray(a.reduced_cos2))))
    corners = corner_moduli(ctx)
    for key in a.present_corners():
        best = max(best, corners[key])
    return best


def model_pair(t: float):
    """The 2x2 pair ``P = diag(1, 0)``, ``Q`` = projection onto ``(sqrt t, sqrt(1-t))``."""
    if not 0.0 <= t <= 1.0:
        raise DomainError("t must lie in [0, 1]")
    r = math.sqrt(t * (1.0 - t))
    P = np.array([[1.0, 0.0], [0.0, 0.0]])
    Q = np.array([[t, r], [r, 1.0 - t]])
    return P, Q


def extremal_partner(f: NcPoly, P, rank_q: int = 1):
    """A projection ``Q`` of rank ``rank_q`` with ``||f(P, Q)|| = M_f``.

    Works inside the plane spanned by one unit vector of ``range(P)`` and
    one of ``ker(P)``; the remaining rank of ``Q`` is placed on further
    eigenvectors of ``P``, where ``P`` and ``Q`` commute and contribute only
    corner values, all bounded by ``M_f``.
    """
    P = np.asarray(P)
    kp = check_projection(P, "P")
    n = P.shape[0]
    if kp in (0, n):
        raise DomainError("P must be neither 0 nor the identity")
    if not 1 <= rank_q <= n - 1:
        raise DomainError(f"rank_q must lie in [1, {n - 1}]")
    VP, WP = range_basis(P, kp)
    v1, v2 = VP[:, 0], WP[:, 0]
    rest = np.concatenate([VP[:, 1:], WP[:, 1:]], axis=1)

    res = m_f(f)
    t = res.argmax_t
    ctx = g_context(f)
    if 0.0 < t < 1.0:
        u = math.sqrt(t) * v1 + math.sqrt(1.0 - t) * v2
    else:
        a00, a01, a10, a11 = (abs(c) for c in ctx.corners)
        # Q = P on the plane realizes the corners 00 and 11, Q = I - P realizes 01 and 10
        u = v1 if max(a00, a11) >= max(a01, a10) else v2
    frame = np.column_stack([u] + [rest[:, i] for i in range(rank_q - 1)])
    return frame @ frame.conj().T
