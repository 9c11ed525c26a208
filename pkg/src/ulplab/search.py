"""Exhaustive measurement of the worst-case relative error of naive powers.

The scan walks every significand X = 2**(p-1) + k, k = 0 .. 2**(p-1)-1
(i.e. every x in [1, 2), which suffices because the error is invariant
under binade shifts), runs the power iteration in pure integer
arithmetic, and scores each candidate with the exact rational error.
Work is split into contiguous significand ranges whose partial results
merge associatively (larger error wins, ties to the smaller significand),
so reports are bit-identical for any worker count, and a scan can resume
from a checkpoint without changing its outcome.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .algorithms import naive_power
from .exact import ErrorInUlps, relative_error
from .softfloat import FpNumber, RoundingMode

__all__ = [
    "CHECKPOINT_SCHEMA_VERSION",
    "DEFAULT_CHUNK_SIZE",
    "PRECISION_GUARD",
    "SearchReport",
    "exhaustive_max_error",
    "spot_error",
]

# Full scans cost 2**(p-1) exact evaluations; beyond this precision that is
# no longer a desk-scale run, so it must be requested explicitly.
PRECISION_GUARD = 26

DEFAULT_CHUNK_SIZE = 1 << 20
CHECKPOINT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SearchReport:
    """Result of scanning significands k_start .. k_stop-1 at precision p."""

    p: int
    n: int
    mode: RoundingMode
    max_error: ErrorInUlps
    argmax_x: FpNumber  # smallest x attaining max_error in the scanned range
    scanned: int
    violations: int  # inputs whose error exceeded (n-1) ulps
    k_start: int
    k_stop: int


def _scan_chunk(args: tuple[int, int, bool, int, int]) -> tuple[int, int, int, int]:
    """Exact scan of one contiguous significand range.

    Returns (best_num, best_den, best_k, violations) where best_num/best_den
    is the largest error in ulps over the range (unreduced) and best_k the
    smallest k attaining it.  Everything is integer arithmetic: the power
    iteration tracks (significand, exponent) pairs and the error in ulps of
    candidate k is |Xc * 2**(ec + (n-1)(p-1)) - X0**n| * 2**p / X0**n.
    """
    p, n, ties_away, k_lo, k_hi = args
    half_sig = 1 << (p - 1)
    top = 1 << p
    full_bits = 2 * p
    expo_scale = (n - 1) * (p - 1)
    best_num, best_den, best_k = -1, 1, -1
    violations = 0
    nm1 = n - 1
    for k in range(k_lo, k_hi):
        X0 = half_sig + k
        Xc, ec = X0, 0
        for _ in range(nm1):
            P = X0 * Xc
            bits = P.bit_length()
            if bits == full_bits:
                ec += 1
            shift = bits - p
            q = P >> shift
            r = P - (q << shift)
            half = 1 << (shift - 1)
            if r > half or (r == half and (ties_away or q & 1)):
                q += 1
                if q == top:
                    q = half_sig
                    ec += 1
            Xc = q
        x_pow = X0**n
        err_num = abs((Xc << (ec + expo_scale)) - x_pow) << p
        if err_num * best_den > best_num * x_pow:
            best_num, best_den, best_k = err_num, x_pow, k
        if err_num > nm1 * x_pow:
            violations += 1
    return best_num, best_den, best_k, violations


def _merge(
    state: tuple[int, int, int, int], part: tuple[int, int, int, int]
) -> tuple[int, int, int, int]:
    # Associative and commutative: larger error wins, ties prefer smaller k.
    num, den, k, viol = state
    pnum, pden, pk, pviol = part
    if pnum * den > num * pden or (pnum * den == num * pden and 0 <= pk < k):
        num, den, k = pnum, pden, pk
    return num, den, k, viol + pviol


def _write_checkpoint(path: str, payload: dict) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    os.replace(tmp, path)


def _load_checkpoint(path: str, expect: dict) -> dict | None:
    if not os.path.exists(path):
        return None
    with open(path) as f:
        data = json.load(f)
    if data.get("schema_version") != CHECKPOINT_SCHEMA_VERSION:
        raise ValueError(f"unsupported checkpoint schema in {path}")
    for key, want in expect.items():
        if data.get(key) != want:
            raise ValueError(
                f"checkpoint {path} was written for {key}={data.get(key)!r}, "
                f"this scan has {key}={want!r}"
            )
    return data


def exhaustive_max_error(
    p: int,
    n: int,
    mode: RoundingMode = RoundingMode.TIES_EVEN,
    *,
    k_start: int = 0,
    k_stop: int | None = None,
    jobs: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    checkpoint: str | None = None,
    progress: Callable[[int, int], None] | None = None,
    force: bool = False,
) -> SearchReport:
    """Scan naive_power over x = 1 + 2ku for k in [k_start, k_stop).

    By default the whole binade [1, 2) is scanned.  ``k_start``/``k_stop``
    restrict the scan to a significand window (used to re-verify a known
    worst case quickly).  ``checkpoint`` names a JSON state file written
    after every chunk; an interrupted scan resumes from it and finishes
    with a report identical to an uninterrupted run.  Scans above the
    precision guard (p > 26) must pass ``force=True``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if p > PRECISION_GUARD and not force:
        raise ValueError(
            f"p = {p} exceeds the scan guard ({PRECISION_GUARD}); "
            "pass force=True for a deliberately large run"
        )
    space = 1 << (p - 1)
    if k_stop is None:
        k_stop = space
    if not 0 <= k_start < k_stop <= space:
        raise ValueError(f"bad significand window [{k_start}, {k_stop})")
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")

    ties_away = mode is RoundingMode.TIES_AWAY
    expect = {
        "p": p,
        "n": n,
        "mode": mode.value,
        "k_start": k_start,
        "k_stop": k_stop,
    }
    state = (-1, 1, -1, 0)
    next_k = k_start
    if checkpoint:
        saved = _load_checkpoint(checkpoint, expect)
        if saved:
            state = (
                int(saved["best_num"]),
                int(saved["best_den"]),
                int(saved["best_k"]),
                int(saved["violations"]),
            )
            next_k = int(saved["next_k"])

    chunks = [
        (p, n, ties_away, lo, min(lo + chunk_size, k_stop))
        for lo in range(next_k, k_stop, chunk_size)
    ]

    def finish_chunk(done_upto: int) -> None:
        if checkpoint:
            num, den, bk, viol = state
            _write_checkpoint(
                checkpoint,
                {
                    "schema_version": CHECKPOINT_SCHEMA_VERSION,
                    **expect,
                    "next_k": done_upto,
                    "best_num": str(num),
                    "best_den": str(den),
                    "best_k": bk,
                    "violations": viol,
                },
            )
        if progress:
            progress(done_upto - k_start, k_stop - k_start)

    if jobs > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk, part in zip(chunks, pool.map(_scan_chunk, chunks)):
                state = _merge(state, part)
                finish_chunk(chunk[4])
    else:
        for chunk in chunks:
            state = _merge(state, _scan_chunk(chunk))
            finish_chunk(chunk[4])

    num, den, best_k, violations = state
    argmax = FpNumber(1, (1 << (p - 1)) + best_k, 0, p)
    return SearchReport(
        p=p,
        n=n,
        mode=mode,
        max_error=ErrorInUlps(Fraction(num, den)),
        argmax_x=argmax,
        scanned=k_stop - k_start,
        violations=violations,
        k_start=k_start,
        k_stop=k_stop,
    )


def spot_error(
    x: FpNumber,
    n: int,
    mode: RoundingMode = RoundingMode.TIES_EVEN,
) -> ErrorInUlps:
    """Exact relative error of naive_power(x, n) against the rational x**n."""
    trace = naive_power(x, n, mode)
    return relative_error(trace.final, x.to_fraction() ** n)
