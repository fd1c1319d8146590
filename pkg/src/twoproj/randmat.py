"""Haar-random projection pairs and their large-``n`` limit law.

A Haar-distributed rank-``k`` projection is ``V V*`` with ``V`` the
phase-normalized Q factor of an ``n x k`` standard complex Gaussian matrix.
For two independent such projections of ranks ``~alpha n`` and ``~beta n``,
the spectrum of ``P Q P`` restricted to ``range(P)`` converges to a Jacobi
law on ``[lambda_-, lambda_+]``; ``limit_value`` gives the limit of the
expected norm ``E ||f(P, Q)||``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, stats

from ._util import as_fraction, rank_for
from .errors import DomainError
from .ncpoly import NcPoly
from .pairs import eval_matrix, op_norm
from .psi import corner_moduli, g_context, m_f, max_on_interval

__all__ = [
    "SeededRng",
    "JacobiLimit",
    "jacobi_limit",
    "haar_frame",
    "haar_projection",
    "coordinate_projection",
    "jacobi_density",
    "jacobi_cdf",
    "jacobi_mass",
    "ks_distance",
    "limit_value",
    "MonteCarloResult",
    "monte_carlo_norm",
    "trial_norm",
    "pair_spectrum",
]

_U64 = 2**64


@dataclass(frozen=True)
class SeededRng:
    """Deterministic source of independent generators.

    ``generator(*key)`` hashes ``(master_seed, *key)`` through
    :class:`numpy.random.SeedSequence`, so a given key always yields the
    same stream no matter which thread asks for it or in what order.
    """

    master_seed: int

    def __post_init__(self):
        if not isinstance(self.master_seed, (int, np.integer)) or not 0 <= self.master_seed < _U64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.master_seed!r}")

    def generator(self, *key: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.master_seed), spawn_key=tuple(int(k) for k in key))
        return np.random.Generator(np.random.PCG64(ss))

    def trial(self, index: int) -> np.random.Generator:
        return self.generator(index)


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, SeededRng):
        return rng.generator()
    return SeededRng(int(rng)).generator()


def haar_frame(n: int, k: int, rng) -> np.ndarray:
    """``n x k`` orthonormal frame whose span is Haar-distributed."""
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    gen = _as_generator(rng)
    z = (gen.standard_normal((n, k)) + 1j * gen.standard_normal((n, k))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    # make diag(R) positive so the frame is a function of z alone
    return q * (d / np.abs(d))


def haar_projection(n: int, k: int, rng) -> np.ndarray:
    """Haar-random orthogonal projection of rank ``k`` on ``C^n``."""
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    if k == n:
        return np.eye(n, dtype=complex)
    v = haar_frame(n, k, rng)
    return v @ v.conj().T


def coordinate_projection(n: int, k: int) -> np.ndarray:
    """Projection onto the first ``k`` coordinate axes."""
    if not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got k={k}, n={n}")
    d = np.zeros(n, dtype=complex)
    d[:k] = 1.0
    return np.diag(d)


# ---------------------------------------------------------------------------
# limit law
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JacobiLimit:
    alpha: float
    beta: float
    lambda_minus: float
    lambda_plus: float
    alpha_equals_beta: bool
    sum_is_one: bool

    @property
    def center(self) -> float:
        return 0.5 * (self.lambda_minus + self.lambda_plus)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.lambda_plus - self.lambda_minus)


def _check_params(alpha, beta):
    a, b = as_fraction(alpha), as_fraction(beta)
    if not (0 < a <= b and a + b <= 1):
        raise DomainError(f"need 0 < alpha <= beta and alpha + beta <= 1, got ({alpha}, {beta})")
    return a, b


def jacobi_limit(alpha, beta) -> JacobiLimit:
    """Support endpoints of the limit law, with the degenerate cases made exact."""
    a, b = _check_params(alpha, beta)
    same = a == b
    full = a + b == 1
    af, bf = float(a), float(b)
    p, q = math.sqrt(bf * (1.0 - af)), math.sqrt(af * (1.0 - bf))
    lo = 0.0 if same else (p - q) ** 2
    hi = 1.0 if full else (p + q) ** 2
    return JacobiLimit(af, bf, lo, hi, same, full)


def jacobi_density(jl: JacobiLimit, t):
    """Density of the limit law; zero outside ``[lambda_-, lambda_+]``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > 1.0):
        raise DomainError("t must lie in [0, 1]")
    inside = (t > jl.lambda_minus) & (t < jl.lambda_plus) & (t > 0.0) & (t < 1.0)
    out = np.zeros_like(t)
    ti = t[inside]
    rad = np.clip(-(ti - jl.lambda_minus) * (ti - jl.lambda_plus), 0.0, None)
    out[inside] = np.sqrt(rad) / (2.0 * math.pi * jl.alpha * ti * (1.0 - ti))
    return float(out) if out.ndim == 0 else out


def _cdf_integrand(jl: JacobiLimit):
    lo, hi, h = jl.lambda_minus, 1.0 - jl.lambda_plus, jl.half_width
    k = h * h / (2.0 * math.pi * jl.alpha)

    # t = c - h cos(u) turns the square-root edges into a smooth integrand;
    # half-angle forms keep t and 1 - t accurate near the support edges
    def fun(u):
        s2 = math.sin(0.5 * u) ** 2
        den = (lo + 2.0 * h * s2) * (hi + 2.0 * h * (1.0 - s2))
        if den <= 0.0:
            return 0.0
        return k * math.sin(u) ** 2 / den

    return fun


def _u_of(jl: JacobiLimit, t: float) -> float:
    if jl.half_width == 0.0:
        return 0.0
    return math.acos(min(1.0, max(-1.0, (jl.center - t) / jl.half_width)))


def jacobi_cdf(jl: JacobiLimit, t):
    """CDF of the limit law by adaptive quadrature (scalar or array ``t``)."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("t must lie in [0, 1]")
    fun = _cdf_integrand(jl)
    flat = arr.ravel()
    order = np.argsort(flat)
    out = np.empty_like(flat)
    acc, u_prev = 0.0, 0.0
    for i in order:
        u = _u_of(jl, float(flat[i]))
        if u > u_prev:
            acc += integrate.quad(fun, u_prev, u, epsabs=1e-12, epsrel=1e-12, limit=200)[0]
            u_prev = u
        out[i] = acc
    out = np.clip(out, 0.0, 1.0).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def jacobi_mass(jl: JacobiLimit) -> float:
    """Total mass of the limit law by quadrature, unclipped (a self-check)."""
    fun = _cdf_integrand(jl)
    return float(integrate.quad(fun, 0.0, math.pi, epsabs=1e-12, epsrel=1e-12, limit=200)[0])


def ks_distance(samples, jl: JacobiLimit) -> float:
    """Kolmogorov distance between the empirical CDF of ``samples`` and the limit law."""
    x = np.clip(np.asarray(samples, dtype=float), 0.0, 1.0)
    if x.size == 0:
        raise DomainError("no samples")
    return float(stats.kstest(x, lambda s: jacobi_cdf(jl, s)).statistic)


def limit_value(f: NcPoly, alpha, beta) -> float:
    """Limit of the expected norm of ``f(P, Q)`` for Haar pairs of rank fractions ``alpha <= beta``."""
    jl = jacobi_limit(alpha, beta)
    ctx = g_context(f)
    corners = corner_moduli(ctx)
    half = Fraction(1, 2)
    a, b = as_fraction(alpha), as_fraction(beta)
    if a == half and b == half:
        return m_f(ctx).value
    if jl.sum_is_one:
        return max(corners[(1, 0)], max_on_interval(ctx, jl.lambda_minus, 1.0).value)
    if jl.alpha_equals_beta:
        return max(corners[(1, 1)], max_on_interval(ctx, 0.0, jl.lambda_plus).value)
    return max(
        corners[(1, 0)],
        corners[(1, 1)],
        max_on_interval(ctx, jl.lambda_minus, jl.lambda_plus).value,
    )


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloResult:
    mean: float
    stddev: float
    samples: tuple[float, ...]


def trial_norm(f: NcPoly, n: int, kp: int, kq: int, rng: SeededRng, key, fix_p: bool = False) -> float:
    """``||f(P, Q)||`` for one pair of ranks ``(kp, kq)`` drawn from the substream ``key``."""
    gen = rng.generator(*key)
    P = coordinate_projection(n, kp) if fix_p else haar_projection(n, kp, gen)
    Q = haar_projection(n, kq, gen)
    return op_norm(eval_matrix(f, P, Q))


def pair_spectrum(n: int, kp: int, kq: int, rng: SeededRng, key=()) -> np.ndarray:
    """Ascending eigenvalues of ``P Q P`` on ``range(P)`` for one Haar pair."""
    gen = rng.generator(*key)
    VP = haar_frame(n, kp, gen)
    VQ = haar_frame(n, kq, gen)
    s = np.linalg.svd(VP.conj().T @ VQ, compute_uv=False)
    lam = np.zeros(kp)
    lam[: len(s)] = np.clip(s, 0.0, 1.0) ** 2
    return np.sort(lam)


def monte_carlo_norm(
    f: NcPoly,
    n: int,
    alpha,
    beta,
    trials: int,
    rng,
    *,
    threads: int = 1,
    fix_p: bool = False,
    stream: tuple[int, ...] = (),
) -> MonteCarloResult:
    """Sample ``||f(P, Q)||`` over independent Haar pairs of ranks ``floor(alpha n)``, ``floor(beta n)``.

    Trial ``i`` draws from the substream keyed ``(*stream, i)``, so results
    do not depend on ``threads``.  With ``fix_p`` the first projection is
    the coordinate one; by unitary invariance the law of the norm is the same.
    """
    if int(trials) < 1:
        raise DomainError("trials must be >= 1")
    if int(threads) < 1:
        raise DomainError("threads must be >= 1")
    kp, kq = rank_for(alpha, n), rank_for(beta, n)
    if kp < 1 or kq < 1:
        raise DomainError(f"floor(alpha n) and floor(beta n) must be >= 1 (n={n})")
    rng = rng if isinstance(rng, SeededRng) else SeededRng(int(rng))
    keys = [tuple(stream) + (i,) for i in range(int(trials))]

    def run(key):
        return trial_norm(f, n, kp, kq, rng, key, fix_p)

    if threads == 1:
        samples = [run(k) for k in keys]
    else:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            samples = list(pool.map(run, keys))
    arr = np.asarray(samples)
    std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return MonteCarloResult(float(arr.mean()), std, tuple(float(s) for s in arr))
