"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a PASS/FAIL line that is printed in the terminal summary
(section "acceptance criteria").  Run just this file with
``pytest tests/test_acceptance.py -v``; expect a few minutes.
"""

import math

import numpy as np

from _helpers import model_pair_entries, naive_eval, planted_pair, random_frame, random_poly
from twoproj.cli import main
from twoproj.concentration import band_ratio, report
from twoproj.ncpoly import parse
from twoproj.pairs import eval_matrix, extremal_partner, norm_via_formula, op_norm
from twoproj.psi import m_f, psi_eval
from twoproj.randmat import (
    SeededRng,
    haar_frame,
    jacobi_limit,
    ks_distance,
    limit_value,
    monte_carlo_norm,
)
from twoproj.spin import entry_limit_residual, projection, spin_system

COMM = parse("x*y - y*x")
BOUND_SLACK = 1e-8

# (norm, M_f) for every norm computed below; checked by criterion 4
NORMS: list[tuple[float, float]] = []


def note(value, f):
    NORMS.append((float(value), m_f(f).value))
    return value


def spin_commutator(n, alpha):
    s = spin_system(n)
    P1, P3 = projection(s, 1, alpha), projection(s, 3, alpha)
    return note(op_norm(eval_matrix(COMM, P1, P3)), COMM)


def test_criterion_01_psi_oracle(acceptance):
    rng = np.random.default_rng(101)
    grid = np.linspace(0.0, 1.0, 101)
    worst = 0.0
    for _ in range(200):
        f = random_poly(rng, 4)
        ps = psi_eval(f, grid)
        for t, p in zip(grid, ps):
            P, Q = model_pair_entries(float(t))
            worst = max(worst, abs(p - note(np.linalg.norm(naive_eval(f, P, Q), 2), f)))
    ok = acceptance(1, worst <= 1e-10, f"max |psi_f(t) - ||f(P_t,Q_t)||| = {worst:.2e} over 200 f x 101 t (tol 1e-10)")
    assert ok


def test_criterion_02_dual_route(acceptance):
    rng = np.random.default_rng(202)
    worst = 0.0
    for i in range(500):
        n = int(rng.integers(1, 13))
        f = random_poly(rng, 3)
        if i % 2:
            P, Q, _ = planted_pair(rng, n)
        else:
            kp, kq = (int(k) for k in rng.integers(0, n + 1, size=2))
            P = random_frame(rng, n, kp) if kp else np.zeros((n, 0))
            Q = random_frame(rng, n, kq) if kq else np.zeros((n, 0))
            P, Q = P @ P.conj().T, Q @ Q.conj().T
        direct = note(op_norm(eval_matrix(f, P, Q)), f)
        worst = max(worst, abs(norm_via_formula(f, P, Q) - direct))
    ok = acceptance(2, worst <= 1e-8, f"max |formula - direct| = {worst:.2e} over 500 pairs, n <= 12 (tol 1e-8)")
    assert ok


def test_criterion_03_closed_form_bounds(acceptance):
    errs = [abs(m_f(COMM).value - 0.5)]
    ok = errs[0] <= 1e-12
    for k in range(6):
        f = parse(f"(x*y)^{k + 1} - (y*x)^{k + 1}")
        ref = (1 / math.sqrt(2 * k + 2)) * (1 - 1 / (2 * k + 2)) ** (k + 0.5)
        errs.append(abs(m_f(f).value - ref))
        ok = ok and errs[-1] <= 1e-10
    ok = acceptance(3, ok, f"|M_comm - 1/2| = {errs[0]:.1e}; max family error k<=5 = {max(errs[1:]):.1e}")
    assert ok


def test_criterion_05_spin_trend(acceptance):
    v1000 = spin_commutator(1000, 0.5)
    seq = [spin_commutator(n, 0.5) for n in (102, 402, 1602)]
    in_band = 0.45 <= v1000 <= 0.5
    increasing = seq[0] < seq[1] < seq[2]
    detail = (
        f"||[P1,P3]||(1000) = {v1000:.6f} in [0.45, 0.5]: {in_band}; "
        f"n = 102, 402, 1602 -> {seq[0]!r}, {seq[1]!r}, {seq[2]!r}, strictly increasing: {increasing}"
    )
    ok = acceptance(5, in_band and increasing, detail)
    assert ok


def test_criterion_06_random_limits(acceptance):
    r_half = monte_carlo_norm(COMM, 1000, 0.5, 0.5, 20, SeededRng(6001))
    r_small = monte_carlo_norm(COMM, 1000, 0.05, 0.05, 50, SeededRng(6002))
    for s in r_half.samples + r_small.samples:
        note(s, COMM)
    spin_val = spin_commutator(1000, 0.05)
    lim = limit_value(COMM, 0.05, 0.05)
    a = abs(r_half.mean - 0.5) <= 0.01
    b = abs(r_small.mean - 0.3923) <= 0.02
    c = spin_val > lim + 0.05
    detail = (
        f"mean(1/2) = {r_half.mean:.5f} (|.-0.5| <= 0.01: {a}); mean(0.05) = {r_small.mean:.5f} "
        f"(|.-0.3923| <= 0.02: {b}); spin(1/20, 1000) = {spin_val:.5f} > limit {lim:.5f} + 0.05: {c}"
    )
    ok = acceptance(6, a and b and c, detail)
    assert ok


def _coordinate_spectrum(n, kp, kq, gen):
    # eigenvalues of P0 Q P0 on range(P0): squared singular values of the first kp rows of a Q frame
    V = haar_frame(n, kq, gen)
    s = np.linalg.svd(V[:kp], compute_uv=False)
    lam = np.zeros(kp)
    lam[: len(s)] = s**2
    return lam


def test_criterion_07_jacobi_law(acceptance):
    rng = SeededRng(7007)
    d1 = ks_distance(_coordinate_spectrum(2000, 1000, 1000, rng.generator(0)), jacobi_limit(0.5, 0.5))
    d2 = ks_distance(_coordinate_spectrum(2000, 100, 1000, rng.generator(1)), jacobi_limit(0.05, 0.5))
    ok = acceptance(7, d1 <= 0.05 and d2 <= 0.05, f"KS distance k=1000: {d1:.4f}, k=100/beta-rank 1000: {d2:.4f} (tol 0.05)")
    assert ok


def test_criterion_08_concentration(acceptance):
    rep = report(2000, alpha=0.5)
    lo, mid, hi = rep.count(0.0, 0.1), rep.count(0.1, 0.9), rep.count(0.9, 1.0)
    ns = (250, 500, 1000, 2000)
    reps = {n: (rep if n == 2000 else report(n, alpha=0.5)) for n in ns}
    ratios = [reps[n].offdiag_frobenius2 / math.log(n) for n in ns]
    band = band_ratio(ratios)
    ident = max(abs(r.offdiag_frobenius2 + r.trace_R2 - r.trace_R) for r in reps.values())
    trace_dev = max(abs(r.trace_R - r.rank / 2) for r in reps.values())
    checks = [
        0.45 <= lo / 1000 <= 0.55,
        0.45 <= hi / 1000 <= 0.55,
        mid <= 40,
        band <= 2.0,
        ident <= 1e-8,
        trace_dev <= 1,
    ]
    detail = (
        f"N(0,.1)={lo}, N(.9,1)={hi}, N(.1,.9)={mid}; ||S||^2/log n band max/min = {band:.3f}; "
        f"identity residual {ident:.1e}; max |tr R - rank/2| = {trace_dev:.1e}"
    )
    ok = acceptance(8, all(checks), detail)
    assert ok


ENTRY_PAIRS = ((0.5, -0.5), (1.5, 0.5), (1.5, -1.5), (0.5, -2.5), (2.5, 1.5))


def test_criterion_09_entry_limits(acceptance):
    ok, parts = True, []
    for mp, m in ENTRY_PAIRS:
        r100, r2000 = entry_limit_residual(0.5, mp, m, [100, 2000])
        ok = ok and r2000 < 0.05 and r2000 < r100
        parts.append(f"({mp:g},{m:g}): {r100:.1e} -> {r2000:.1e}")
    ok = acceptance(9, ok, "residual n=100 -> 2000: " + "; ".join(parts))
    assert ok


def test_criterion_10_determinism(acceptance, tmp_path):
    commands = [
        ["random-norm", "--n-range", "40:80:20", "--alpha-grid", "0.1:0.5:0.2", "--trials", "4", "--seed", "1010"],
        ["spectrum", "--source", "random", "--n", "200", "--seed", "1011"],
        ["spin-norm", "--n-range", "20:60:7", "--alpha", "0.25"],
    ]
    same = True
    for i, cmd in enumerate(commands):
        blobs = []
        for threads in ("1", "8"):
            out = tmp_path / f"c{i}_{threads}.csv"
            assert main(cmd + ["--threads", threads, "--out", str(out)]) == 0
            blobs.append(out.read_bytes())
        same = same and blobs[0] == blobs[1]
    ok = acceptance(10, same, f"{len(commands)} seeded commands byte-identical with 1 vs 8 threads: {same}")
    assert ok


def test_criterion_04_universal_bound_and_tightness(acceptance):
    # runs last: also checks every norm recorded by the criteria above
    rng = np.random.default_rng(404)
    for _ in range(100):
        f = random_poly(rng, 4)
        P, Q, _ = planted_pair(rng, int(rng.integers(2, 12)))
        note(op_norm(eval_matrix(f, P, Q)), f)
    for n, alpha in ((10, 0.5), (37, 0.3), (200, 0.5), (200, 0.05)):
        spin_commutator(n, alpha)
    excess = max(v - b for v, b in NORMS)
    tight = 0.0
    for _ in range(20):
        f = random_poly(rng, 4)
        n = int(rng.integers(2, 10))
        V = random_frame(rng, n, int(rng.integers(1, n)))
        Q = extremal_partner(f, V @ V.conj().T, rank_q=int(rng.integers(1, n)))
        tight = max(tight, abs(op_norm(eval_matrix(f, V @ V.conj().T, Q)) - m_f(f).value))
    ok = excess <= BOUND_SLACK and tight <= 1e-6
    detail = f"{len(NORMS)} norms, max(norm - M_f) = {excess:.2e} (tol 1e-8); tightness gap over 20 f = {tight:.1e} (tol 1e-6)"
    ok = acceptance(4, ok, detail)
    assert ok
