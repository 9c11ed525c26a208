"""Command-line front end: scans, spot checks, bound tables, hard sequences.

Output is deliberately boring: ``table`` for eyeballs, ``csv`` and ``json``
for machines.  JSON is canonical (two-space indent, sorted keys, trailing
newline) so that parse-then-reserialize is byte-identical, which is what
the golden-file regression leans on.  Progress chatter goes to standard
error only; standard output carries nothing but the report.

Error values are printed as an exact fraction together with a truncated
decimal; the decimal is always a correct prefix of the fraction's
expansion, never a rounded approximation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from .adversary import build_sequence, verify_sequence
from .bounds import (
    bound_set,
    check_lemma2,
    check_property1,
    check_refined_binary32_bound,
    n_max,
)
from .exact import ErrorInUlps, to_decimal
from .search import exhaustive_max_error, spot_error
from .softfloat import FpNumber, RoundingMode, round_nearest

__all__ = ["GOLDEN_SCENARIOS", "main", "run"]

SCHEMA_VERSION = 1

# Rows beyond this make the psi/gamma table columns explode (their exact
# numerators grow with n*p bits), so refuse early with a clear message.
MAX_BOUNDS_N = 10**4


class CliError(Exception):
    """A usage or guard problem; message goes to stderr, exit status 2."""


def _parse_range(text: str) -> range:
    """'7' -> range(7, 8); '3..8' -> range(3, 9).  Inclusive, ascending."""
    lo, sep, hi = text.partition("..")
    try:
        start = int(lo)
        stop = int(hi) if sep else start
    except ValueError:
        raise CliError(f"bad count or range {text!r}; expected N or A..B") from None
    if stop < start:
        raise CliError(f"empty range {text!r}")
    return range(start, stop + 1)


def _parse_x(text: str, p: int) -> FpNumber:
    """Parse '8473808/2^23', '4097/4096', or a plain integer, exactly."""
    num_s, slash, den_s = text.partition("/")
    try:
        num = int(num_s)
        if not slash:
            den = 1
        elif den_s.startswith("2^"):
            den = 1 << int(den_s[2:])
        else:
            den = int(den_s)
        value = Fraction(num, den)
    except (ValueError, ZeroDivisionError):
        raise CliError(f"bad value {text!r}; expected INT, A/B, or A/2^K") from None
    x = round_nearest(value, p)
    if x.to_fraction() != value:
        raise CliError(f"{text} is not exactly representable at precision {p}")
    return x


def _fp_repr(x: FpNumber) -> str:
    """Render as SIGNIFICAND/2^SHIFT (or a plain integer), unreduced."""
    if x.is_zero:
        return "0"
    sign = "-" if x.sign < 0 else ""
    shift = x.precision - 1 - x.exponent
    if shift <= 0:
        return f"{sign}{x.significand << -shift}"
    return f"{sign}{x.significand}/2^{shift}"


def _int_str(v: int) -> str:
    """str() for exact numerators that can exceed the int-to-str digit guard."""
    need = abs(v).bit_length() // 3 + 3
    if need > sys.get_int_max_str_digits() > 0:
        sys.set_int_max_str_digits(need)
    return str(v)


def _error_obj(err: ErrorInUlps | Fraction, digits: int) -> dict:
    frac = err.value if isinstance(err, ErrorInUlps) else Fraction(err)
    return {
        "fraction": f"{_int_str(frac.numerator)}/{_int_str(frac.denominator)}",
        "decimal": to_decimal(frac, digits),
    }


def _canonical_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _render(fmt: str, header: list[str], rows: list[list[str]], json_obj: dict) -> str:
    if fmt == "json":
        return _canonical_json(json_obj)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    widths = [
        max(len(header[i]), max((len(r[i]) for r in rows), default=0))
        for i in range(len(header))
    ]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _progress_printer(p: int, n: int):
    def cb(done: int, total: int) -> None:
        print(f"search p={p} n={n}: {done}/{total}", file=sys.stderr, flush=True)

    return cb


def _cmd_search(args: argparse.Namespace) -> tuple[int, str]:
    mode = RoundingMode(args.mode)
    k_start, k_stop = 0, None
    if args.around is not None:
        center = args.around - (1 << (args.p - 1))
        if not 0 <= center < 1 << (args.p - 1):
            raise CliError(
                f"--around {args.around} is not a precision-{args.p} significand "
                f"in [2^{args.p - 1}, 2^{args.p})"
            )
        k_start = max(0, center - args.radius)
        k_stop = min(1 << (args.p - 1), center + args.radius + 1)
    reports = []
    for n in _parse_range(args.n):
        try:
            reports.append(
                exhaustive_max_error(
                    args.p,
                    n,
                    mode,
                    k_start=k_start,
                    k_stop=k_stop,
                    jobs=args.jobs,
                    chunk_size=args.chunk_size,
                    checkpoint=args.checkpoint,
                    progress=_progress_printer(args.p, n) if args.progress else None,
                    force=args.force,
                )
            )
        except ValueError as exc:
            raise CliError(str(exc)) from None
    header = ["n", "max_error_ulps", "fraction", "argmax_x", "scanned", "violations"]
    rows, json_rows = [], []
    for r in reports:
        err = _error_obj(r.max_error, args.digits)
        rows.append(
            [
                str(r.n),
                err["decimal"],
                err["fraction"],
                _fp_repr(r.argmax_x),
                str(r.scanned),
                str(r.violations),
            ]
        )
        json_rows.append(
            {
                "n": r.n,
                "max_error": err,
                "argmax_x": _fp_repr(r.argmax_x),
                "scanned": r.scanned,
                "violations": r.violations,
                "k_start": r.k_start,
                "k_stop": r.k_stop,
            }
        )
    obj = {
        "schema_version": SCHEMA_VERSION,
        "command": "search",
        "p": args.p,
        "mode": mode.value,
        "rows": json_rows,
    }
    text = _render(args.format, header, rows, obj)
    bad = sum(r.violations for r in reports)
    if bad:
        text += f"violations: {bad} input(s) exceeded the (n-1) ulp bound\n"
    return (1 if bad else 0), text


def _cmd_spot(args: argparse.Namespace) -> tuple[int, str]:
    mode = RoundingMode(args.mode)
    x = _parse_x(args.x, args.p)
    header = ["n", "error_ulps", "fraction"]
    rows, json_rows = [], []
    for n in _parse_range(args.n):
        err = _error_obj(spot_error(x, n, mode), args.digits)
        rows.append([str(n), err["decimal"], err["fraction"]])
        json_rows.append({"n": n, "error": err})
    obj = {
        "schema_version": SCHEMA_VERSION,
        "command": "spot",
        "p": args.p,
        "mode": mode.value,
        "x": _fp_repr(x),
        "rows": json_rows,
    }
    return 0, _render(args.format, header, rows, obj)


def _cmd_bounds(args: argparse.Namespace) -> tuple[int, str]:
    ns = _parse_range(args.n)
    if ns.stop > MAX_BOUNDS_N:
        raise CliError(f"bounds tables are limited to n <= {MAX_BOUNDS_N}")
    cutoff = n_max(args.p)
    header = ["n", "simple_ulps", "psi_ulps", "gamma_ulps", "within_n_max"]
    rows, json_rows = [], []
    notes = []
    for n in ns:
        try:
            b = bound_set(args.p, n)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        psi_u = _error_obj(b.psi / b.u, args.digits)
        gamma_u = _error_obj(b.gamma / b.u, args.digits)
        within = n <= cutoff
        rows.append(
            [str(n), str(n - 1), psi_u["decimal"], gamma_u["decimal"], str(within).lower()]
        )
        json_rows.append(
            {
                "n": n,
                "simple_ulps": n - 1,
                "psi_ulps": psi_u,
                "gamma_ulps": gamma_u,
                "within_n_max": within,
            }
        )
        if not within:
            notes.append(f"note: n={n} exceeds n_max({args.p})={cutoff}")
    obj = {
        "schema_version": SCHEMA_VERSION,
        "command": "bounds",
        "p": args.p,
        "n_max": cutoff,
        "rows": json_rows,
    }
    text = _render(args.format, header, rows, obj)
    if args.format != "json" and notes:
        text += "\n".join(notes) + "\n"
    return 0, text


def _cmd_adversary(args: argparse.Namespace) -> tuple[int, str]:
    try:
        seq = build_sequence(args.p, args.n)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    report = verify_sequence(seq)
    factors = [str(f.to_fraction()) for f in seq.factors]
    err = _error_obj(seq.achieved_error, args.digits)
    gap = _error_obj(report.gap, args.digits)
    obj = {
        "schema_version": SCHEMA_VERSION,
        "command": "adversary",
        "p": args.p,
        "n": args.n,
        "factors": factors,
        "achieved_error": err,
        "error_bound": report.error_bound,
        "gap": gap,
        "all_down": report.all_down,
        "passed": report.passed,
    }
    if args.format == "json":
        text = _canonical_json(obj)
    else:
        header = ["field", "value"]
        rows = [
            ["p", str(args.p)],
            ["n", str(args.n)],
            ["achieved_error_ulps", err["decimal"]],
            ["fraction", err["fraction"]],
            ["error_bound_ulps", str(report.error_bound)],
            ["gap_ulps", gap["decimal"]],
            ["all_down", str(report.all_down).lower()],
            ["passed", str(report.passed).lower()],
        ]
        for i, f in enumerate(factors, start=1):
            rows.append([f"a{i}", f])
        text = _render(args.format, header, rows, obj)
    return (0 if report.passed else 1), text


def _cmd_verify(args: argparse.Namespace) -> tuple[int, str]:
    checks = [check_property1(), check_lemma2(), check_refined_binary32_bound()]
    json_checks = [
        {"name": c.name, "passed": c.passed, "checked": c.checked} for c in checks
    ]
    rows = [
        ["pass" if c.passed else "FAIL", c.name, str(c.checked)] for c in checks
    ]
    if args.p is not None:
        for n in _parse_range(args.n):
            report = verify_sequence(build_sequence(args.p, n))
            name = f"sequence p={args.p} n={n}"
            rows.append(
                ["pass" if report.passed else "FAIL", name, str(len(report.directions))]
            )
            json_checks.append(
                {"name": name, "passed": report.passed, "checked": len(report.directions)}
            )
    ok = all(c["passed"] for c in json_checks)
    obj = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "checks": json_checks,
        "passed": ok,
    }
    text = _render(args.format, ["status", "check", "cases"], rows, obj)
    return (0 if ok else 1), text


# Scenario name -> argv.  Golden file is <name>.json under the golden dir.
# These pin the published tables and spot values; regenerating with any
# worker count must produce identical bytes.
GOLDEN_SCENARIOS: list[tuple[str, list[str]]] = [
    ("table1", ["search", "--p", "8", "--n", "3..8", "--format", "json"]),
    ("table2", ["search", "--p", "9", "--n", "6..11", "--format", "json"]),
    ("table3-p24-n10", ["adversary", "--p", "24", "--n", "10", "--format", "json", "--digits", "20"]),
    ("table3-p24-n100", ["adversary", "--p", "24", "--n", "100", "--format", "json", "--digits", "20"]),
    ("table3-p53-n10", ["adversary", "--p", "53", "--n", "10", "--format", "json", "--digits", "20"]),
    ("table3-p53-n100", ["adversary", "--p", "53", "--n", "100", "--format", "json", "--digits", "20"]),
    ("table3-p113-n10", ["adversary", "--p", "113", "--n", "10", "--format", "json", "--digits", "20"]),
    ("table3-p113-n100", ["adversary", "--p", "113", "--n", "100", "--format", "json", "--digits", "20"]),
    ("spot-p24-n6", ["spot", "--p", "24", "--x", "8473808/2^23", "--n", "6", "--format", "json"]),
    ("spot-p24-n10", ["spot", "--p", "24", "--x", "8429278/2^23", "--n", "10", "--format", "json"]),
    ("spot-p53-n6", ["spot", "--p", "53", "--x", "4507062722867963/2^52", "--n", "6", "--format", "json"]),
    ("spot-p53-n10", ["spot", "--p", "53", "--x", "4503796447992526/2^52", "--n", "10", "--format", "json"]),
    ("spot-p113-n6", ["spot", "--p", "113", "--x", "5192324351407105984705482084151108/2^112", "--n", "6", "--format", "json"]),
    ("nmax-p24", ["bounds", "--p", "24", "--n", "10", "--format", "json"]),
    ("nmax-p53", ["bounds", "--p", "53", "--n", "10", "--format", "json"]),
    ("nmax-p113", ["bounds", "--p", "113", "--n", "10", "--format", "json"]),
]


def _cmd_regress(args: argparse.Namespace) -> tuple[int, str]:
    lines = []
    failures = 0
    for name, argv in GOLDEN_SCENARIOS:
        if args.jobs != 1 and argv[0] == "search":
            argv = argv + ["--jobs", str(args.jobs)]
        code, text = run(argv)
        if code != 0:
            lines.append(f"ERROR {name}: scenario exited with status {code}")
            failures += 1
            continue
        path = os.path.join(args.golden_dir, name + ".json")
        if args.update:
            os.makedirs(args.golden_dir, exist_ok=True)
            with open(path, "w") as f:
                f.write(text)
            lines.append(f"wrote {name}")
            continue
        try:
            with open(path) as f:
                want = f.read()
        except FileNotFoundError:
            lines.append(f"MISSING {name}: no golden at {path}")
            failures += 1
            continue
        if text == want:
            lines.append(f"ok {name}")
        else:
            failures += 1
            lines.append(f"MISMATCH {name}: output differs from {path}")
            for i, (got_l, want_l) in enumerate(
                zip(text.splitlines(), want.splitlines())
            ):
                if got_l != want_l:
                    lines.append(f"  first diff at line {i + 1}:")
                    lines.append(f"  expected: {want_l}")
                    lines.append(f"  actual:   {got_l}")
                    break
            else:
                lines.append("  outputs differ in length only")
    summary = f"{len(GOLDEN_SCENARIOS) - failures}/{len(GOLDEN_SCENARIOS)} scenarios ok"
    lines.append(summary)
    return (1 if failures else 0), "\n".join(lines) + "\n"


def _add_common(sub: argparse.ArgumentParser, *, mode: bool = True) -> None:
    if mode:
        sub.add_argument(
            "--mode",
            choices=[m.value for m in RoundingMode],
            default=RoundingMode.TIES_EVEN.value,
            help="tie-breaking rule (default: even)",
        )
    sub.add_argument(
        "--format",
        choices=["table", "csv", "json"],
        default="table",
        help="output format (default: table)",
    )
    sub.add_argument(
        "--digits",
        type=int,
        default=9,
        help="fractional digits in decimal renderings (truncated, default: 9)",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ulplab",
        description="measure and bound the rounding error of iterated products",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("search", help="exhaustive worst-case scan over [1, 2)")
    s.add_argument("--p", type=int, required=True, help="precision in bits")
    s.add_argument("--n", required=True, help="power count N or range A..B")
    s.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    s.add_argument("--checkpoint", help="resumable state file (single n only)")
    s.add_argument("--around", type=int, help="scan only near this significand")
    s.add_argument("--radius", type=int, default=4096, help="window half-width")
    s.add_argument("--force", action="store_true", help="override the p<=26 guard")
    s.add_argument("--progress", action="store_true", help="progress on stderr")
    s.add_argument(
        "--chunk-size",
        type=int,
        default=1 << 20,
        help="candidates per work unit and checkpoint interval",
    )
    _add_common(s)

    s = subs.add_parser("spot", help="exact error of one input")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--x", required=True, help="value as INT, A/B, or A/2^K")
    s.add_argument("--n", required=True, help="power count N or range A..B")
    _add_common(s)

    s = subs.add_parser("bounds", help="classical error bounds, in ulps")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--n", required=True, help="count N or range A..B")
    _add_common(s, mode=False)

    s = subs.add_parser("adversary", help="build a near-worst-case factor list")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    _add_common(s, mode=False)

    s = subs.add_parser("verify", help="run the exact property check suites")
    s.add_argument("--p", type=int, help="also build+check sequences at this p")
    s.add_argument("--n", default="10", help="sequence lengths, N or A..B")
    _add_common(s, mode=False)

    s = subs.add_parser("regress", help="rerun golden scenarios and diff bytes")
    s.add_argument("--golden-dir", default="goldens")
    s.add_argument("--update", action="store_true", help="rewrite golden files")
    s.add_argument("--jobs", type=int, default=1, help="workers for search scenarios")
    return parser


_HANDLERS = {
    "search": _cmd_search,
    "spot": _cmd_spot,
    "bounds": _cmd_bounds,
    "adversary": _cmd_adversary,
    "verify": _cmd_verify,
    "regress": _cmd_regress,
}


def run(argv: list[str]) -> tuple[int, str]:
    """Parse argv and execute; returns (exit_status, stdout_text).

    Raises CliError for usage problems so callers can decide how loud to be;
    ``main`` turns that into an exit status of 2.
    """
    args = _build_parser().parse_args(argv)
    if getattr(args, "digits", 9) < 1:
        raise CliError("--digits must be >= 1")
    return _HANDLERS[args.command](args)


def main(argv: list[str] | None = None) -> int:
    try:
        code, text = run(sys.argv[1:] if argv is None else argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
