"""Eigenvalue clustering for a spin window cut by the positive ``J1`` projection.

For a window ``W`` of ``J3`` labels, ``R = P_W P1 P_W`` restricted to
``range(P_W)`` has almost all eigenvalues close to 0 or 1; only
``O(log n)`` of them sit in the bulk.  ``S = (I - P_W) P1 P_W`` measures
the leakage out of the window and obeys ``||S||_F^2 + tr(R^2) = tr(R)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._util import as_fraction
from .errors import ConsistencyError, DomainError
from .spin import label_index, selection, spectral_frame, spin_system

__all__ = [
    "ConcentrationReport",
    "window_labels",
    "report",
    "offdiag_frobenius",
    "log_fit",
    "band_ratio",
    "DEFAULT_INTERVALS",
]

DEFAULT_INTERVALS = ((0.0, 0.1), (0.1, 0.9), (0.9, 1.0))
_IDENTITY_TOL = 1e-8
_EIG_SLACK = 1e-9


@dataclass(frozen=True)
class ConcentrationReport:
    """Spectral statistics of ``R`` for one ``n`` and one window.

    ``a`` and ``b`` are ``None`` when the window was given as an
    ``alpha`` count; ``labels`` always lists the selected ``J3`` labels.
    """

    n: int
    a: float | None
    b: float | None
    labels: tuple[float, ...]
    eigenvalues: tuple[float, ...]
    trace_R: float
    trace_R2: float
    sum_lambda_one_minus_lambda: float
    offdiag_frobenius2: float
    counts: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.labels)

    def count(self, s: float, t: float) -> int:
        """Eigenvalues in the closed interval ``[s, t]`` after clamping to ``[0, 1]``."""
        if s > t:
            raise DomainError(f"empty interval [{s}, {t}]")
        lam = np.clip(np.asarray(self.eigenvalues), 0.0, 1.0)
        return int(np.count_nonzero((lam >= s) & (lam <= t)))

    def partition(self, t: float) -> tuple[int, int, int]:
        """Counts on ``[0, t)``, ``[t, 1 - t]``, ``(1 - t, 1]``; they sum to the rank."""
        if not 0.0 < t < 0.5:
            raise DomainError("t must lie in (0, 1/2)")
        lam = np.clip(np.asarray(self.eigenvalues), 0.0, 1.0)
        low = int(np.count_nonzero(lam < t))
        high = int(np.count_nonzero(lam > 1.0 - t))
        return low, len(lam) - low - high, high


def window_labels(n: int, a=None, b=None, *, alpha=None) -> tuple[float, ...]:
    """``J3`` labels in the open window ``(a j, b j)``, or the ``alpha`` selection."""
    system = spin_system(n)
    if alpha is not None:
        if a is not None or b is not None:
            raise DomainError("give either (a, b) or alpha, not both")
        return selection(system, 3, alpha).labels
    if a is None or b is None:
        raise DomainError("window needs both a and b")
    aq, bq = as_fraction(a), as_fraction(b)
    if not -1 <= aq < bq <= 1:
        raise DomainError(f"need -1 <= a < b <= 1, got ({a}, {b})")
    if aq == -1 and bq == 1:
        raise DomainError("the full window (-1, 1) is excluded")
    j = Fraction(n - 1, 2)
    labels = [j - i for i in range(n)]
    picked = tuple(float(m) for m in sorted(labels) if aq * j < m < bq * j)
    if not picked:
        raise DomainError(f"window ({a}, {b}) holds no spectrum point for n={n}")
    return picked


def report(n: int, a=None, b=None, *, alpha=None, alpha1=Fraction(1, 2), intervals=DEFAULT_INTERVALS):
    """Diagonalize ``R`` for the given window and collect the clustering statistics.

    ``alpha1`` sets the rank fraction of the ``J1`` projection; the default
    ``1/2`` projects onto all positive eigenvalues.
    """
    labels = window_labels(n, a, b, alpha=alpha)
    system = spin_system(n)
    V1 = spectral_frame(system, 1, alpha1)
    idx = np.array([label_index(n, m) for m in labels])
    mask = np.ones(n, dtype=bool)
    mask[idx] = False

    B = V1[idx]
    R = B @ B.T
    S = V1[mask] @ B.T
    lam = np.linalg.eigvalsh(R)[::-1]
    if lam.size and (lam[-1] < -_EIG_SLACK or lam[0] > 1.0 + _EIG_SLACK):
        raise ConsistencyError(f"eigenvalues of R leave [0, 1]: [{lam[-1]:.3e}, {lam[0]:.3e}]")

    trace_R = float(np.trace(R))
    trace_R2 = float(np.sum(R * R))
    s2 = float(np.sum(S * S))
    slol = float(np.sum(lam * (1.0 - lam)))
    if abs(trace_R - float(lam.sum())) > _IDENTITY_TOL:
        raise ConsistencyError("trace of R disagrees with its eigenvalue sum")
    if abs(s2 + trace_R2 - trace_R) > _IDENTITY_TOL:
        raise ConsistencyError("||S||_F^2 + tr(R^2) != tr(R)")

    rep = ConcentrationReport(
        n=n,
        a=None if a is None else float(a),
        b=None if b is None else float(b),
        labels=labels,
        eigenvalues=tuple(float(x) for x in lam),
        trace_R=trace_R,
        trace_R2=trace_R2,
        sum_lambda_one_minus_lambda=slol,
        offdiag_frobenius2=s2,
    )
    for s, t in intervals:
        rep.counts[(s, t)] = rep.count(s, t)
    return rep


def offdiag_frobenius(n: int, a=None, b=None, *, alpha=None) -> float:
    """``||(I - P_W) P1 P_W||_F^2``."""
    return report(n, a, b, alpha=alpha, intervals=()).offdiag_frobenius2


def log_fit(xs, ys):
    """Least-squares fit ``y = slope log(x) + intercept``.

    Returns ``(slope, intercept, residual)`` with ``residual`` the RMS of the
    fit residuals.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 3:
        raise DomainError("log_fit needs at least 3 matching points")
    if np.any(x <= 0.0) or not np.all(np.isfinite(y)):
        raise DomainError("xs must be positive and ys finite")
    lx = np.log(x)
    if np.ptp(lx) == 0.0:
        raise DomainError("xs must not all be equal")
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(coef[0]), float(coef[1]), float(math.sqrt(np.mean(resid**2)))


def band_ratio(values) -> float:
    """``max / min`` of positive values; a factor-2 band means a ratio of at most 2."""
    v = np.asarray(values, dtype=float)
    if v.size == 0 or np.any(v <= 0.0):
        raise DomainError("band_ratio needs positive values")
    return float(v.max() / v.min())
