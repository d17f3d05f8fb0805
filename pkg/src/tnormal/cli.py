"""Command-line entry point.

Exit codes: 0 on success, 2 when a budget ceiling is hit, 1 when a
certificate or invariant fails, 64 for malformed arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import __version__
from .digits import ChunkedPolyCover, ExactUnion, load_cover, run, synthetic_cover
from .errors import BudgetExceeded, CertificateError, InsufficientIterations
from .exactset import IntervalUnion, normalize
from .lil import (BadicPair, RWParams, assemble_lil_radii, discrepancy_series, lil_constant, lil_ratio,
                  philipp_constants, rw_tails, rw_thresholds, sigma_exact, solve_N_M)
from .polyalg import IntPolynomial, audit_interval, audit_intervals, enumerate_P, poly
from .sierpinski import (CoverAtomParams, TruncationBudget, assemble_truncated_UP, build_U_bmnd,
                         certify_chunks, sierpinski_min_enclosure)

EXIT_OK, EXIT_INVARIANT, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 64

_RATIONAL_PREFIX = re.compile(r"\s*[+-]?\d+(?:/\d*|\.\d*)?\s*")


class UsageError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", an integer or a decimal; errors report the first bad character."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        m = _RATIONAL_PREFIX.match(text)
        pos = m.end() if m else 0
        if isinstance(exc, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"malformed rational {text!r}: zero denominator") from None
        if m and m.end() == len(text):
            raise argparse.ArgumentTypeError(f"malformed rational {text!r}: ends at position {pos}") from None
        raise argparse.ArgumentTypeError(
            f"malformed rational {text!r} at position {pos}: unexpected {text[pos:pos + 1]!r}") from None


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def parse_poly(text: str) -> IntPolynomial:
    """Coefficients a_1,...,a_d, lowest degree first: "0,1" is x^2."""
    coeffs = parse_int_list(text)
    p = poly(*coeffs)
    if p.degree < 1:
        raise argparse.ArgumentTypeError("polynomial must be non-constant")
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj, out: str | None) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


def _budget(args) -> TruncationBudget:
    n_min = None
    if getattr(args, "toy_n_min", None) is not None:
        lo = args.toy_n_min
        n_min = lambda b, m, s: lo
    return TruncationBudget(b_max=args.b_max, m_max=args.m_max, n_max=args.n_max,
                            k_max=args.k_max, ceiling=args.ceiling, n_min=n_min)


# --- subcommands -------------------------------------------------------------

def cmd_order(args) -> int:
    polys = [enumerate_P(k) for k in range(1, args.count + 1)]
    if args.format == "json":
        _dump([{"index": k, "poly": str(p), "coeffs": list(p.coeffs)}
               for k, p in enumerate(polys, start=1)], args.out)
    else:
        _emit("".join(f"{k}\t{p}\n" for k, p in enumerate(polys, start=1)), args.out)
    return EXIT_OK


def cmd_cover(args) -> int:
    if args.atom:
        b, m, n, d = args.atom
        U = build_U_bmnd(CoverAtomParams(b, m, n, d), args.ceiling)
        _dump({"atom": [b, m, n, d], "measure": str(U.measure()), "parts": len(U),
               "intervals": U.to_quads()}, args.out)
        return EXIT_OK
    chunks = assemble_truncated_UP(args.r, args.k_max, _budget(args))
    cert = certify_chunks(chunks, args.r)
    report = {
        "r": str(args.r),
        "chunks": [{
            "index": c.index, "poly": str(c.poly), "radius": str(c.radius),
            "z_range": list(c.z_range), "parts": len(c.set), "built_measure": str(c.set.measure()),
            "tail_bound": str(c.tail_bound), "preimage_bound": str(c.preimage_bound()),
            "atoms_built": c.atoms_built,
        } for c in chunks],
        "chunk_total": str(cert.chunk_total),
        "remaining_polys": str(cert.remaining_polys),
        "total": str(cert.total),
        "total_approx": float(cert.total),
        "certified": cert.certified,
    }
    _dump(report, args.out)
    return EXIT_OK if cert.certified else EXIT_INVARIANT


def _resolve_cover(name: str, args):
    kind, _, arg = name.partition(":")
    if kind == "synthetic":
        if arg in ("", "demo"):
            return ExactUnion(synthetic_cover(np.random.default_rng(args.seed)))
        return ExactUnion(load_cover(arg))
    if kind == "sierpinski":
        r = parse_rational(arg or "1/2")
        chunks = assemble_truncated_UP(r, args.k_max, _budget(args))
        return ChunkedPolyCover(chunks, r)
    raise UsageError(f"unknown cover {name!r}; use synthetic:demo, synthetic:<file> or sierpinski:<r>")


def cmd_digits(args) -> int:
    cover = _resolve_cover(args.cover, args)
    report = run(cover, args.iterations, args.epsilon, args.bases)
    out = report.to_json()
    out["cover"] = args.cover
    if isinstance(cover, ExactUnion):
        lo, hi = report.final.cell
        out["cover_measure"] = str(cover.union.measure())
        out["cell_cover_measure"] = str(cover.query((lo, hi)))
    _dump(out, args.out)
    if isinstance(cover, ExactUnion) and report.complement_witness is None:
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_stretch_audit(args) -> int:
    rng = np.random.default_rng(args.seed)
    p = args.poly
    cases = [audit_interval(p, lo, hi, args.precision)
             for lo, hi in audit_intervals(p, rng, args.count, args.min_exp, args.max_exp)]
    failures = [c for c in cases if not c.ok]
    _dump({
        "poly": str(p), "seed": args.seed, "count": len(cases), "failures": len(failures),
        "worst_ratio": max(float(c.preimage_upper / c.bound) for c in cases) if cases else None,
        "first_failure": ([str(v) for v in failures[0].interval] if failures else None),
    }, args.out)
    return EXIT_INVARIANT if failures else EXIT_OK


def _read_digit_file(path: str, b: int) -> Fraction:
    text = "".join(open(path).read().split())
    if text.startswith("0."):
        text = text[2:]
    value = 0
    for i, ch in enumerate(text):
        v = int(ch, 36)
        if v >= b:
            raise UsageError(f"digit {ch!r} at position {i} is not a base-{b} digit")
        value = value * b + v
    return Fraction(value, b ** len(text))


def cmd_discrepancy(args) -> int:
    if (args.x is None) == (args.digits_file is None):
        raise UsageError("give exactly one of --x or --digits-file")
    x = args.x if args.x is not None else _read_digit_file(args.digits_file, args.base)
    checkpoints = args.checkpoints or [1 << k for k in range(1, args.max_log + 1)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "D_N", "D_N_float", "lil_ratio"])
    for n, D in discrepancy_series(x, args.base, checkpoints):
        ratio = f"{lil_ratio(n, D):.6f}" if n >= 16 else ""
        w.writerow([n, str(D), f"{float(D):.9g}", ratio])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _enc(e) -> dict:
    return {"lo": str(e.lo), "hi": str(e.hi), "approx": float((e.lo + e.hi) / 2)}


def cmd_lil_constants(args) -> int:
    b = args.base
    level, qa, qa2 = args.pair if args.pair else (1, 0, 1)
    pair = BadicPair(level, qa, qa2, b)
    s_inf, s_M = sigma_exact(pair), sigma_exact(pair, args.M)
    out = {
        "base": b,
        "L_b": _enc(lil_constant(b)),
        "pair": {"L": level, "a": str(pair.a), "a2": str(pair.a2)},
        "sigma_sq": str(s_inf),
        "sigma_sq_M": {"M": args.M, "value": str(s_M)},
        "philipp": {k: str(v) for k, v in vars(philipp_constants(b, args.L, args.r, args.N)).items()},
        "radius_plan": None,
    }
    if s_M > 0 and args.M >= 1:
        params = RWParams(Fraction(1, args.M), level * args.M * s_M, Fraction(level * args.M), args.N)
        th = rw_thresholds(params)
        tails = rw_tails(params, th)
        out["random_walk"] = {"delta": str(params.delta), "A": float(th.A), "A_prime": float(th.A_prime),
                              "A_upper": str(th.A), "up_tail": str(tails.up), "low_tail": str(tails.low)}
        try:
            out["N_M"] = solve_N_M(args.r, args.M, pair).N
        except BudgetExceeded as exc:
            out["N_M"] = None
            out["N_M_error"] = str(exc)
    plan = assemble_lil_radii(b, args.r, args.L)
    out["radius_plan"] = {"base_share": str(plan.base_share), "entries": len(plan.entries),
                          "total": str(plan.total), "certified": plan.certified}
    _dump(out, args.out)
    return EXIT_OK if plan.certified else EXIT_INVARIANT


DEMO_CHUNKS = {
    "quarter": [(poly(1), normalize([(0, Fraction(1, 4))]))],
    "half": [(poly(0, 1), normalize([(0, Fraction(1, 4))]))],
    "three-eighths": [(poly(1), normalize([(0, Fraction(1, 4))])),
                      (poly(2), normalize([(Fraction(1, 4), Fraction(3, 4))]))],
}


def _load_chunks(path: str):
    raw = json.load(open(path))
    return [(IntPolynomial.from_json(c["poly"]), IntervalUnion.from_quads(c["set"])) for c in raw]


def cmd_sierpinski_min(args) -> int:
    if args.chunks:
        chunks = _load_chunks(args.chunks)
    elif args.demo:
        chunks = DEMO_CHUNKS[args.demo]
    else:
        built = assemble_truncated_UP(args.r, args.k_max, _budget(args))
        chunks = [(c.poly, c.set) for c in built]
    enc = sierpinski_min_enclosure(chunks, args.m, args.steps)
    if not enc:
        _dump({"status": "unknown", "m": args.m}, args.out)
        return EXIT_BUDGET
    _dump({"status": "ok", "m": args.m, "lo": str(enc.lo), "hi": str(enc.hi),
           "width": str(enc.width), "approx": float(enc.hi)}, args.out)
    return EXIT_OK


# --- parser ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k-max", type=int, default=4, help="polynomials p_1..p_k assembled")
    p.add_argument("--b-max", type=int, default=2)
    p.add_argument("--m-max", type=int, default=2)
    p.add_argument("--n-max", type=int, default=16, help="longest digit strings built")
    p.add_argument("--toy-n-min", type=int, default=None,
                   help="build atoms from this length instead of the true cutoff (toy cover)")
    p.add_argument("--budget-ceiling", dest="ceiling", type=int, default=None,
                   help="max strings per atom (default from TNORMAL_BUDGET_CEILING)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tnormal", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--seed", type=int, default=0, help="seed for numpy's PCG64 generator")
    ap.add_argument("--out", default=None, help="write output here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("order", help="print p_1..p_k in enumeration order")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("cover", help="build a truncated polynomial cover, or one atom")
    p.add_argument("--r", type=parse_rational, default=Fraction(1, 2))
    p.add_argument("--atom", type=parse_int_list, default=None, metavar="B,M,N,D")
    _add_budget(p)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("digits", help="run the factorial-base digit algorithm")
    p.add_argument("--cover", default="synthetic:demo")
    p.add_argument("--iterations", type=int, default=6)
    p.add_argument("--bases", type=parse_int_list, default=[2, 3, 6])
    p.add_argument("--epsilon", type=parse_rational, default=Fraction(1, 4))
    _add_budget(p)
    p.set_defaults(func=cmd_digits)

    p = sub.add_parser("stretch-audit", help="check preimage measures against the stretch bound")
    p.add_argument("--poly", type=parse_poly, default=poly(0, 1), help="coefficients a_1,...,a_d")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--min-exp", type=int, default=2)
    p.add_argument("--max-exp", type=int, default=60)
    p.add_argument("--precision", type=int, default=20, help="preimage accuracy 2^-precision")
    p.set_defaults(func=cmd_stretch_audit)

    p = sub.add_parser("discrepancy", help="D_N table and LIL ratio as CSV")
    p.add_argument("--x", type=parse_rational, default=None)
    p.add_argument("--digits-file", default=None)
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--checkpoints", type=parse_int_list, default=None)
    p.add_argument("--max-log", type=int, default=12, help="checkpoints 2,4,...,2^max_log")
    p.set_defaults(func=cmd_discrepancy)

    p = sub.add_parser("lil-constants", help="L_b, variances, thresholds and Philipp constants")
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--pair", type=parse_int_list, default=None, metavar="L,QA,QA2")
    p.add_argument("--M", type=int, default=1)
    p.add_argument("--L", type=int, default=1)
    p.add_argument("--N", type=int, default=16)
    p.add_argument("--r", type=parse_rational, default=Fraction(1, 2))
    p.set_defaults(func=cmd_lil_constants)

    p = sub.add_parser("sierpinski-min", help="enclose the least uncovered point of a truncated cover")
    p.add_argument("--m", type=int, default=16, help="enclosure width 2^-m")
    p.add_argument("--steps", type=int, default=100_000)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--chunks", default=None, help="JSON list of {poly, set} objects")
    src.add_argument("--demo", choices=sorted(DEMO_CHUNKS), default=None)
    p.add_argument("--r", type=parse_rational, default=Fraction(1, 2))
    _add_budget(p)
    p.set_defaults(func=cmd_sierpinski_min)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (CertificateError, InsufficientIterations) as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except UsageError as exc:
        print(f"tnormal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
