"""Spin operators and their spectral projections.

Matrices are written in the eigenbasis ``e_j, e_{j-1}, ..., e_{-j}`` of
``J3`` (row/column ``i`` carries the label ``m = j - i``).  ``J1`` is real
symmetric tridiagonal, so its eigenvectors are real and every projection
built from them is a real symmetric matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
from scipy.special import gammaln

from ._util import as_fraction, rank_for
from .errors import ConsistencyError, DomainError, UnsupportedCaseError

__all__ = [
    "SpinSystem",
    "SpectralSelection",
    "spin_system",
    "selection",
    "spectral_frame",
    "projection",
    "label_index",
    "wigner_d_half_pi",
    "p1_entry_closed",
    "fourier_coeff_indicator",
    "entry_limit_residual",
]

_SNAP_TOL = 1e-9


def _readonly(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpinSystem:
    """Spin-``j`` representation of dimension ``n = 2j + 1``.

    ``eig1_values`` are the exact labels ``-j, ..., j`` (ascending) that the
    computed eigenvalues of ``J1`` were snapped to; column ``k`` of
    ``eig1_vectors`` is the eigenvector for ``eig1_values[k]``.
    """

    n: int
    ladder: np.ndarray
    eig1_values: np.ndarray
    eig1_vectors: np.ndarray
    snap_error: float

    @property
    def j(self) -> float:
        return (self.n - 1) / 2

    @property
    def labels(self) -> np.ndarray:
        """``m`` labels of the ``J3`` basis, in row order."""
        return self.j - np.arange(self.n)

    @property
    def J3(self) -> np.ndarray:
        return np.diag(self.labels).astype(complex)

    @property
    def J1(self) -> np.ndarray:
        off = 0.5 * self.ladder
        return (np.diag(off, 1) + np.diag(off, -1)).astype(complex)

    @property
    def J2(self) -> np.ndarray:
        off = 0.5 * self.ladder
        return np.diag(-1j * off, 1) + np.diag(1j * off, -1)


@lru_cache(maxsize=8)
def spin_system(n: int) -> SpinSystem:
    """Build the spin operators for dimension ``n`` and diagonalize ``J1``."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise DomainError(f"spin dimension must be an integer >= 2, got {n!r}")
    n = int(n)
    j = (n - 1) / 2
    m = j - np.arange(n)
    # <m+1| J+ |m> for m = labels[1:], placed on the superdiagonal
    ladder = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    w, v = sla.eigh_tridiagonal(np.zeros(n), 0.5 * ladder)
    exact = -j + np.arange(n)
    err = float(np.max(np.abs(w - exact)))
    if err > _SNAP_TOL:
        raise ConsistencyError(f"J1 eigenvalues deviate from the spin grid by {err:.2e}")
    return SpinSystem(n, _readonly(ladder), _readonly(exact), _readonly(v), err)


@dataclass(frozen=True)
class SpectralSelection:
    axis: int
    count: int
    labels: tuple[float, ...]


def _first_positive(n: int) -> int:
    # index of the smallest positive label among -j, ..., j; label 0 is skipped for odd n
    return (n + 1) // 2


def selection(system: SpinSystem, axis: int, alpha) -> SpectralSelection:
    """The ``floor(alpha n)`` smallest positive spectrum points."""
    if axis not in (1, 3):
        raise DomainError(f"axis must be 1 or 3, got {axis!r}")
    a = as_fraction(alpha)
    if not 0 < a <= Fraction(1, 2):
        raise DomainError(f"alpha must lie in (0, 1/2], got {alpha}")
    count = rank_for(a, system.n)
    if count < 1:
        raise DomainError(f"floor(alpha * n) = 0 for alpha={alpha}, n={system.n}")
    first_positive = _first_positive(system.n)
    labels = tuple(float(x) for x in system.eig1_values[first_positive : first_positive + count])
    return SpectralSelection(axis, count, labels)


def spectral_frame(system: SpinSystem, axis: int, alpha) -> np.ndarray:
    """Orthonormal columns spanning the range of the spectral projection."""
    sel = selection(system, axis, alpha)
    first_positive = _first_positive(system.n)
    if axis == 1:
        return system.eig1_vectors[:, first_positive : first_positive + sel.count]
    frame = np.zeros((system.n, sel.count))
    for col, lab in enumerate(sel.labels):
        frame[label_index(system.n, lab), col] = 1.0
    return frame


def projection(system: SpinSystem, axis: int, alpha) -> np.ndarray:
    """Spectral projection of ``J_axis`` onto its ``floor(alpha n)`` smallest positive eigenvalues."""
    if axis == 3:
        sel = selection(system, 3, alpha)
        d = np.zeros(system.n)
        for lab in sel.labels:
            d[label_index(system.n, lab)] = 1.0
        return np.diag(d)
    V = spectral_frame(system, axis, alpha)
    return V @ V.T


def label_index(n: int, label) -> int:
    """Row index of the ``J3`` eigenvector with eigenvalue ``label``."""
    j = Fraction(n - 1, 2)
    idx = j - as_fraction(label)
    if idx.denominator != 1 or not 0 <= idx < n:
        raise DomainError(f"{label!r} is not in the spectrum for n={n}")
    return int(idx)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def _as_int(value, what: str) -> int:
    q = as_fraction(value)
    if q.denominator != 1:
        raise DomainError(f"{what} must be an integer, got {value!r}")
    return int(q)


def wigner_d_half_pi(j, m) -> float:
    """``d^j_{m,0}(pi/2)`` for integer ``j``; zero when ``j - m`` is odd."""
    j = _as_int(j, "j")
    m = _as_int(m, "m")
    if j < 0 or abs(m) > j:
        raise DomainError(f"need j >= 0 and |m| <= j, got j={j}, m={m}")
    if (j - m) % 2:
        return 0.0
    a, b = (j + m) // 2, (j - m) // 2
    log_binoms = (
        gammaln(j + m + 1) - 2.0 * gammaln(a + 1) + gammaln(j - m + 1) - 2.0 * gammaln(b + 1)
    )
    mag = math.exp(0.5 * log_binoms - j * math.log(2.0))
    return -mag if a % 2 else mag


def _d_or_zero(j: int, m: int) -> float:
    return wigner_d_half_pi(j, m) if abs(m) <= j else 0.0


def p1_entry_closed(j, m_prime, m) -> float:
    """Closed-form entry ``(m', m)`` of the projection onto positive ``J1`` eigenvalues.

    Covers every entry for integer ``j`` and the even-difference entries for
    half-integer ``j``.  Odd differences at half-integer ``j`` raise
    :class:`UnsupportedCaseError`; diagonalize instead.
    """
    jq, mpq, mq = as_fraction(j), as_fraction(m_prime), as_fraction(m)
    if (2 * jq).denominator != 1 or jq < 0:
        raise DomainError(f"j must be a non-negative half-integer, got {j!r}")
    for lab in (mpq, mq):
        if (jq - lab).denominator != 1 or abs(lab) > jq:
            raise DomainError(f"label {lab} is not in the spectrum of spin {jq}")
    integer_j = jq.denominator == 1
    diff = int(mpq - mq)
    if diff == 0:
        if not integer_j:
            return 0.5
        return 0.5 - 0.5 * wigner_d_half_pi(jq, mq) ** 2
    if diff % 2 == 0:
        if not integer_j:
            return 0.0
        return -0.5 * wigner_d_half_pi(jq, mpq) * wigner_d_half_pi(jq, mq)
    if not integer_j:
        raise UnsupportedCaseError("odd-difference entries at half-integer j have no closed form here")
    ji, a, b = int(jq), int(mpq), int(mq)
    nu_b = math.sqrt((ji + b) * (ji - b + 1))
    nu_a = math.sqrt((ji + a) * (ji - a + 1))
    num = nu_b * _d_or_zero(ji, a) * _d_or_zero(ji, b - 1) - nu_a * _d_or_zero(ji, a - 1) * _d_or_zero(ji, b)
    return num / (2.0 * (b - a))


def fourier_coeff_indicator(alpha, k: int) -> float:
    """Fourier coefficient ``k`` of the indicator of the arc ``{0 < cos(theta) < 2 alpha}``.

    The arc is ``(a, pi/2) ∪ (-pi/2, -a)`` with ``a = arccos(2 alpha)``; it is
    symmetric, so the coefficient is real.
    """
    a_ = float(alpha)
    if not 0.0 < a_ <= 0.5:
        raise DomainError(f"alpha must lie in (0, 1/2], got {alpha}")
    k = int(k)
    a = math.acos(min(1.0, 2.0 * a_))
    if k == 0:
        return (0.5 * math.pi - a) / math.pi
    return (math.sin(0.5 * k * math.pi) - math.sin(k * a)) / (k * math.pi)


def entry_limit_residual(alpha, m_prime, m, n_list) -> list[float]:
    """``|P_{1,alpha,n}[m', m] - coefficient(m - m')|`` for each ``n`` in ``n_list``.

    ``m'`` and ``m`` are spectrum labels (half-integers for even ``n``,
    integers for odd ``n``); all ``n`` must share a parity.
    """
    ns = [int(x) for x in n_list]
    if not ns:
        raise DomainError("n_list is empty")
    if len({x % 2 for x in ns}) != 1:
        raise DomainError("all n must have the same parity")
    n_min = min(ns)
    label_index(n_min, m_prime)
    label_index(n_min, m)
    target = fourier_coeff_indicator(alpha, int(as_fraction(m) - as_fraction(m_prime)))
    out = []
    for n in ns:
        system = spin_system(n)
        V = spectral_frame(system, 1, alpha)
        r, c = label_index(n, m_prime), label_index(n, m)
        out.append(abs(float(V[r] @ V[c]) - target))
    return out
