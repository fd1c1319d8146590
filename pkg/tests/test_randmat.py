import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from _helpers import random_poly
from twoproj.errors import DomainError
from twoproj.ncpoly import parse
from twoproj.pairs import check_projection
from twoproj.psi import m_f, max_on_interval
from twoproj.randmat import (
    SeededRng,
    coordinate_projection,
    haar_frame,
    haar_projection,
    jacobi_cdf,
    jacobi_density,
    jacobi_limit,
    jacobi_mass,
    ks_distance,
    limit_value,
    monte_carlo_norm,
    pair_spectrum,
)

COMM = parse("x*y - y*x")


def test_full_rank_is_identity():
    assert np.array_equal(haar_projection(5, 5, 0), np.eye(5))


def test_haar_projection_is_projection():
    P = haar_projection(30, 12, SeededRng(1).generator(0))
    assert check_projection(P) == 12


def test_seeded_draws_repeat():
    a = haar_projection(20, 7, SeededRng(5).generator(3))
    b = haar_projection(20, 7, SeededRng(5).generator(3))
    c = haar_projection(20, 7, SeededRng(5).generator(4))
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)


def test_frame_phase_normalized():
    z_rng = SeededRng(2).generator(0)
    V = haar_frame(8, 3, z_rng)
    assert np.allclose(V.conj().T @ V, np.eye(3), atol=1e-13)


def test_haar_range():
    with pytest.raises(DomainError):
        haar_projection(4, 0, 0)
    with pytest.raises(DomainError):
        haar_projection(4, 5, 0)
    with pytest.raises(DomainError):
        SeededRng(-1)


def test_unitary_invariance_two_sample_ks():
    rng = SeededRng(17)
    n, k = 12, 5
    U = haar_frame(n, n, rng.generator(10**6))
    a, b = [], []
    for i in range(200):
        g = rng.generator(i)
        P, Q = haar_projection(n, k, g), haar_projection(n, k, g)
        a.extend(np.linalg.eigvalsh(P @ Q @ P)[-k:])
        g = rng.generator(i + 10**5)
        P, Q = haar_projection(n, k, g), haar_projection(n, k, g)
        P = U @ P @ U.conj().T
        b.extend(np.linalg.eigvalsh(P @ Q @ P)[-k:])
    assert stats.ks_2samp(a, b).pvalue > 0.01


def test_jacobi_endpoints():
    jl = jacobi_limit(0.5, 0.5)
    assert (jl.lambda_minus, jl.lambda_plus) == (0.0, 1.0)
    assert jacobi_limit(0.05, 0.05).lambda_plus == pytest.approx(0.19, abs=1e-15)
    assert jacobi_limit(0.2, 0.8).lambda_plus == 1.0
    assert jacobi_limit(0.1, 0.3).lambda_minus > 0.0
    assert jacobi_limit("1/10", "1/10").lambda_minus == 0.0


@given(st.floats(0.01, 0.5), st.floats(0.0, 1.0))
def test_endpoint_formula(a, u):
    b = min(a + u * (1 - 2 * a), 1 - a)
    jl = jacobi_limit(a, b)
    p, q = math.sqrt(b * (1 - a)), math.sqrt(a * (1 - b))
    assert jl.lambda_minus == pytest.approx((p - q) ** 2, abs=1e-12)
    assert jl.lambda_plus == pytest.approx((p + q) ** 2, abs=1e-12)


def test_jacobi_domain():
    for a, b in ((0, 0.5), (0.4, 0.3), (0.6, 0.6)):
        with pytest.raises(DomainError):
            jacobi_limit(a, b)


def test_mass_is_one():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.uniform(0.01, 0.5)
        b = rng.uniform(a, 1 - a)
        jl = jacobi_limit(a, b)
        assert abs(jacobi_mass(jl) - 1.0) < 1e-6
        assert abs(jacobi_cdf(jl, jl.lambda_plus) - 1.0) < 1e-6


def test_cdf_matches_density_quadrature():
    jl = jacobi_limit(0.2, 0.35)
    for t in np.linspace(jl.lambda_minus, jl.lambda_plus, 7)[1:-1]:
        ref = integrate.quad(lambda s: jacobi_density(jl, s), jl.lambda_minus, t, limit=200)[0]
        assert jacobi_cdf(jl, t) == pytest.approx(ref, abs=1e-8)


def test_density_support():
    jl = jacobi_limit(0.1, 0.3)
    t = np.linspace(0, 1, 201)
    d = jacobi_density(jl, t)
    outside = (t < jl.lambda_minus) | (t > jl.lambda_plus)
    assert np.all(d[outside] == 0) and np.all(d[~outside][1:-1] > 0)
    cdf = jacobi_cdf(jl, t)
    assert np.all(np.diff(cdf) >= 0)


def test_limit_value_examples():
    assert limit_value(COMM, 0.5, 0.5) == pytest.approx(0.5, abs=1e-12)
    a = 0.05
    assert limit_value(COMM, a, a) == pytest.approx(2 * (1 - 2 * a) * math.sqrt(a * (1 - a)), abs=1e-9)
    for k in range(1, 4):
        f = parse(f"(x*y)^{k + 1} - (y*x)^{k + 1}")
        a0 = 0.5 - 1 / (2 * math.sqrt(2 * k + 2))
        for a in (a0 + 1e-6, (a0 + 0.5) / 2, 0.5):
            assert limit_value(f, a, a) == pytest.approx(m_f(f).value, abs=1e-9)


def test_limit_value_cases():
    f = parse("x*y - y*x + 1/3*y - 2*x*y*x + 1")
    # alpha + beta = 1: corner 10 joins psi on [lambda_-, 1]
    jl = jacobi_limit(0.3, 0.7)
    ref = max(abs(1 + 1 / 3), max_on_interval(f, jl.lambda_minus, 1.0).value)
    assert limit_value(f, 0.3, 0.7) == pytest.approx(ref, abs=1e-12)
    jl = jacobi_limit(0.2, 0.5)
    ref = max(abs(1 + 1 / 3), 1.0, max_on_interval(f, jl.lambda_minus, jl.lambda_plus).value)
    assert limit_value(f, 0.2, 0.5) == pytest.approx(ref, abs=1e-12)


def test_limit_value_monotone_on_kernel():
    rng = np.random.default_rng(3)
    grid = np.linspace(0.02, 0.5, 25)
    for _ in range(5):
        f = random_poly(rng, 3) * COMM
        vals = [limit_value(f, a, a) for a in grid]
        assert all(b >= a - 1e-10 for a, b in zip(vals, vals[1:]))


def test_ks_small_draw():
    rng = SeededRng(9)
    lam = pair_spectrum(400, 200, 200, rng)
    assert ks_distance(lam, jacobi_limit(0.5, 0.5)) < 0.05
    P0 = coordinate_projection(400, 200)
    Q = haar_projection(400, 200, rng.generator(1))
    lam = np.linalg.eigvalsh((P0 @ Q @ P0)[:200, :200])
    assert ks_distance(lam, jacobi_limit(0.5, 0.5)) < 0.05


def test_monte_carlo_bound_and_determinism():
    f = random_poly(np.random.default_rng(4), 3)
    r1 = monte_carlo_norm(f, 40, 0.3, 0.4, 6, SeededRng(11))
    r2 = monte_carlo_norm(f, 40, 0.3, 0.4, 6, SeededRng(11), threads=3)
    assert r1 == r2
    assert max(r1.samples) <= m_f(f).value + 1e-8
    assert r1.stddev == pytest.approx(np.std(r1.samples, ddof=1))


def test_monte_carlo_fixed_p_agrees():
    a = monte_carlo_norm(COMM, 60, 0.2, 0.2, 40, SeededRng(12))
    b = monte_carlo_norm(COMM, 60, 0.2, 0.2, 40, SeededRng(12), fix_p=True, stream=(1,))
    pooled = math.sqrt(a.stddev**2 / 40 + b.stddev**2 / 40)
    assert abs(a.mean - b.mean) <= 2 * pooled


def test_monte_carlo_domain():
    with pytest.raises(DomainError):
        monte_carlo_norm(COMM, 10, 0.05, 0.5, 3, 0)
    with pytest.raises(DomainError):
        monte_carlo_norm(COMM, 10, 0.5, 0.5, 0, 0)
