"""Command-line experiment runner.

Every subcommand writes CSV rows ``experiment,n,alpha,beta,poly,statistic,value,seed``
to standard output or ``--out``.  Exit codes: 0 success, 2 usage or parse
error, 3 domain error, 4 numerical-consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import concentration, pairs, psi, randmat, spin
from ._util import as_fraction, rank_for
from .errors import ConsistencyError, DomainError, ParseError, ProjectionError
from .ncpoly import NcPoly, parse

__all__ = ["ExperimentRecord", "main", "build_parser", "HEADER"]

log = logging.getLogger("twoproj")

HEADER = ("experiment", "n", "alpha", "beta", "poly", "statistic", "value", "seed")
BOUND_SLACK = 1e-8
DEFAULT_POLY = "x*y - y*x"


class UsageError(Exception):
    """Bad flag combination; reported with exit code 2."""


@dataclass(frozen=True)
class ExperimentRecord:
    experiment: str
    n: int | None
    alpha: Fraction | float | None
    beta: Fraction | float | None
    poly: str
    statistic: str
    value: float
    seed: int | None = None

    def row(self) -> list[str]:
        if not math.isfinite(self.value):
            raise ConsistencyError(f"non-finite value for {self.statistic}")
        return [
            self.experiment,
            "" if self.n is None else str(self.n),
            _num(self.alpha),
            _num(self.beta),
            self.poly,
            self.statistic,
            _num(self.value),
            "" if self.seed is None else str(self.seed),
        ]


def _num(x) -> str:
    return "" if x is None else "%.17g" % float(x)


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def _int_range(text: str) -> list[int]:
    try:
        parts = [int(p) for p in text.split(":")]
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected a:b:step with integers") from None
    if len(parts) == 2:
        parts.append(1)
    if len(parts) != 3 or parts[2] <= 0 or parts[0] > parts[1]:
        raise UsageError(f"bad range {text!r}; expected a:b:step with a <= b and step > 0")
    a, b, step = parts
    return list(range(a, b + 1, step))


def _frac_range(text: str) -> list[Fraction]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"bad grid {text!r}; expected a:b:step")
    try:
        a, b, step = (as_fraction(p) for p in parts)
    except DomainError:
        raise UsageError(f"bad grid {text!r}") from None
    if step <= 0 or a > b:
        raise UsageError(f"bad grid {text!r}; expected a <= b and step > 0")
    out, k = [], 0
    while a + k * step <= b:
        out.append(a + k * step)
        k += 1
    return out


def _sizes(args) -> list[int]:
    if args.n is not None and args.n_range is not None:
        raise UsageError("give --n or --n-range, not both")
    if args.n_range is not None:
        return _int_range(args.n_range)
    if args.n is not None:
        return list(args.n)
    raise UsageError("one of --n or --n-range is required")


def _alphas(args) -> list[Fraction]:
    if args.alpha_grid is not None and args.alpha is not None:
        raise UsageError("give --alpha or --alpha-grid, not both")
    if args.alpha_grid is not None:
        return _frac_range(args.alpha_grid)
    return [as_fraction(args.alpha if args.alpha is not None else "1/2")]


def _pool_map(fn, items, threads: int):
    """``map`` that keeps input order whatever the completion order."""
    if threads < 1:
        raise UsageError("--threads must be >= 1")
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _check_bound(value: float, bound: float, what: str) -> None:
    if value > bound + BOUND_SLACK:
        raise ConsistencyError(f"{what} = {value!r} exceeds the bound M_f = {bound!r}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_psi(args) -> list[ExperimentRecord]:
    f = parse(args.poly)
    name = str(f)
    rec = []
    if args.t is not None and args.max is not None:
        raise UsageError("give --t or --max, not both")
    if args.t is not None:
        for t in args.t:
            rec.append(ExperimentRecord("psi", None, None, None, name, f"psi(t={t!r})", psi.psi_eval(f, t)))
        return rec
    lo, hi = args.max if args.max is not None else (0.0, 1.0)
    res = psi.max_on_interval(f, lo, hi)
    rec.append(ExperimentRecord("psi", None, None, None, name, "max_psi", res.value))
    rec.append(ExperimentRecord("psi", None, None, None, name, "argmax_t", res.argmax_t))
    return rec


def _spin_point(f: NcPoly, n: int, alpha) -> float:
    system = spin.spin_system(n)
    P3 = spin.projection(system, 3, alpha)
    P1 = spin.projection(system, 1, alpha)
    return pairs.op_norm(pairs.eval_matrix(f, P3, P1))


def _log_mod4(points: list[tuple[int, float]]) -> None:
    sub = [(n, v) for n, v in points if n % 4 == 2]
    if len(sub) < 2:
        return
    # values that agree to round-off count as equal
    mono = all(b[1] >= a[1] - 1e-12 for a, b in zip(sub, sub[1:]))
    log.info("n = 2 mod 4 subsequence (%d points) nondecreasing: %s", len(sub), mono)


def cmd_spin_norm(args) -> list[ExperimentRecord]:
    f = parse(args.poly)
    name = str(f)
    bound = psi.m_f(f).value
    points = [(n, a) for a in _alphas(args) for n in _sizes(args)]
    values = _pool_map(lambda p: _spin_point(f, p[0], p[1]), points, args.threads)
    rec = []
    for (n, a), v in zip(points, values):
        _check_bound(v, bound, f"spin norm at n={n}, alpha={a}")
        rec.append(ExperimentRecord("spin-norm", n, a, None, name, "norm", v))
    if len({a for _, a in points}) == 1:
        _log_mod4([(n, v) for (n, _), v in zip(points, values)])
    return rec


def cmd_random_norm(args) -> list[ExperimentRecord]:
    f = parse(args.poly)
    name = str(f)
    bound = psi.m_f(f).value
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    rng = randmat.SeededRng(args.seed)
    points = []
    for a in _alphas(args):
        b = as_fraction(args.beta) if args.beta is not None else a
        for n in _sizes(args):
            kp, kq = rank_for(a, n), rank_for(b, n)
            if kp < 1 or kq < 1:
                raise DomainError(f"floor(alpha n) and floor(beta n) must be >= 1 (n={n}, alpha={a}, beta={b})")
            points.append((n, a, b, kp, kq))
    jobs = [(p, i) for p in points for i in range(args.trials)]

    def run(job):
        (n, a, b, kp, kq), i = job
        key = (n, a.numerator, a.denominator, b.numerator, b.denominator, i)
        return randmat.trial_norm(f, n, kp, kq, rng, key, args.fix_p)

    samples = _pool_map(run, jobs, args.threads)
    rec = []
    for j, (n, a, b, _, _) in enumerate(points):
        vals = samples[j * args.trials : (j + 1) * args.trials]
        for v in vals:
            _check_bound(v, bound, f"random norm at n={n}")
        mean = math.fsum(vals) / len(vals)
        var = math.fsum((v - mean) ** 2 for v in vals) / (len(vals) - 1) if len(vals) > 1 else 0.0
        row = lambda stat, v: ExperimentRecord("random-norm", n, a, b, name, stat, v, args.seed)  # noqa: E731
        rec += [row("mean", mean), row("stddev", math.sqrt(var)), row("min", min(vals)), row("max", max(vals))]
        if a <= b and a + b <= 1:
            rec.append(row("limit_value", randmat.limit_value(f, a, b)))
    return rec


def cmd_spectrum(args) -> list[ExperimentRecord]:
    n = args.n[0] if args.n and len(args.n) == 1 else None
    if n is None:
        raise UsageError("spectrum needs exactly one --n")
    a = as_fraction(args.alpha if args.alpha is not None else "1/2")
    if args.source == "spin":
        if args.beta is not None:
            raise UsageError("--beta applies to --source random only")
        rep = concentration.report(n, alpha=a, intervals=())
        lam = sorted(rep.eigenvalues)
        return [
            ExperimentRecord("spectrum-spin", n, a, None, "", f"eigenvalue[{i}]", v) for i, v in enumerate(lam)
        ]
    b = as_fraction(args.beta) if args.beta is not None else a
    kp, kq = rank_for(a, n), rank_for(b, n)
    if kp < 1 or kq < 1:
        raise DomainError(f"floor(alpha n) and floor(beta n) must be >= 1 (n={n})")
    lam = randmat.pair_spectrum(n, kp, kq, randmat.SeededRng(args.seed))
    return [
        ExperimentRecord("spectrum-random", n, a, b, "", f"eigenvalue[{i}]", float(v), args.seed)
        for i, v in enumerate(lam)
    ]


def cmd_concentration(args) -> list[ExperimentRecord]:
    ns = _sizes(args)
    if args.window is not None and args.alpha is not None:
        raise UsageError("give --alpha or --window, not both")
    if args.window is not None:
        wa, wb = (as_fraction(w) for w in args.window)
        kw, alpha = {"a": wa, "b": wb}, None
    else:
        alpha = as_fraction(args.alpha if args.alpha is not None else "1/2")
        kw = {"alpha": alpha}
    t = args.t_split

    def run(n):
        return concentration.report(n, **kw, intervals=((0.0, t), (t, 1.0 - t), (1.0 - t, 1.0)))

    reports = _pool_map(run, ns, args.threads)
    rec = []
    for rep in reports:
        row = lambda stat, v: ExperimentRecord("concentration", rep.n, alpha, None, "", stat, v)  # noqa: E731
        rec += [
            row("rank", rep.rank),
            row("trace_R", rep.trace_R),
            row("trace_R2", rep.trace_R2),
            row("sum_lambda_one_minus_lambda", rep.sum_lambda_one_minus_lambda),
            row("offdiag_frobenius2", rep.offdiag_frobenius2),
            row("offdiag_frobenius2_over_log_n", rep.offdiag_frobenius2 / math.log(rep.n)),
        ]
        for (s, u), c in rep.counts.items():
            rec.append(row(f"N({s:g}..{u:g})", c))
    if len(reports) >= 3:
        xs = [r.n for r in reports]
        for stat, ys in (
            ("sum_lambda_one_minus_lambda", [r.sum_lambda_one_minus_lambda for r in reports]),
            ("offdiag_frobenius2", [r.offdiag_frobenius2 for r in reports]),
        ):
            slope, icpt, resid = concentration.log_fit(xs, ys)
            rec += [
                ExperimentRecord("concentration", None, alpha, None, "", f"log_fit_slope[{stat}]", slope),
                ExperimentRecord("concentration", None, alpha, None, "", f"log_fit_intercept[{stat}]", icpt),
                ExperimentRecord("concentration", None, alpha, None, "", f"log_fit_residual[{stat}]", resid),
            ]
        band = concentration.band_ratio([r.offdiag_frobenius2 / math.log(r.n) for r in reports])
        rec.append(ExperimentRecord("concentration", None, alpha, None, "", "band_ratio[offdiag_frobenius2/log_n]", band))
    return rec


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="twoproj", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output CSV path (default: standard output)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("psi", parents=[common], help="evaluate or maximize psi_f")
    q.add_argument("--poly", required=True)
    q.add_argument("--t", type=float, nargs="+")
    q.add_argument("--max", type=float, nargs=2, metavar=("LO", "HI"))
    q.set_defaults(func=cmd_psi)

    def sweep_flags(sp):
        sp.add_argument("--poly", default=DEFAULT_POLY)
        sp.add_argument("--n", type=int, nargs="+")
        sp.add_argument("--n-range", metavar="A:B:STEP")
        sp.add_argument("--alpha")
        sp.add_argument("--alpha-grid", metavar="A:B:STEP")

    q = sub.add_parser("spin-norm", parents=[common], help="norms for spin spectral projections")
    sweep_flags(q)
    q.set_defaults(func=cmd_spin_norm)

    q = sub.add_parser("random-norm", parents=[common], help="Monte Carlo norms for Haar-random pairs")
    sweep_flags(q)
    q.add_argument("--beta")
    q.add_argument("--trials", type=int, default=20)
    q.add_argument("--seed", type=_seed, default=0)
    q.add_argument("--fix-p", action="store_true", help="fix P to a coordinate projection")
    q.set_defaults(func=cmd_random_norm)

    q = sub.add_parser("spectrum", parents=[common], help="sorted eigenvalues of PQP on range(P)")
    q.add_argument("--source", choices=("spin", "random"), required=True)
    q.add_argument("--n", type=int, nargs=1, required=True)
    q.add_argument("--alpha")
    q.add_argument("--beta")
    q.add_argument("--seed", type=_seed, default=0)
    q.set_defaults(func=cmd_spectrum)

    q = sub.add_parser("concentration", parents=[common], help="eigenvalue clustering statistics")
    q.add_argument("--n", type=int, nargs="+")
    q.add_argument("--n-range", metavar="A:B:STEP")
    q.add_argument("--alpha")
    q.add_argument("--window", nargs=2, metavar=("A", "B"), help="J3 window (a j, b j)")
    q.add_argument("--t-split", type=float, default=0.1, help="bulk threshold t for N(0,t), N(t,1-t), N(1-t,1)")
    q.set_defaults(func=cmd_concentration)
    return p


def _write(records, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(HEADER)
    for r in records:
        w.writerow(r.row())


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="twoproj: %(message)s", stream=sys.stderr)
    try:
        args = build_parser().parse_args(argv)
        if args.command == "concentration" and not 0.0 < args.t_split < 0.5:
            raise UsageError("--t-split must lie in (0, 1/2)")
        records = args.func(args)
        if args.out:
            with open(args.out, "w", newline="") as fh:
                _write(records, fh)
        else:
            _write(records, sys.stdout)
    except (UsageError, ParseError) as exc:
        print(f"twoproj: error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ProjectionError) as exc:
        print(f"twoproj: domain error: {exc}", file=sys.stderr)
        return 3
    except ConsistencyError as exc:
        print(f"twoproj: consistency failure: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
