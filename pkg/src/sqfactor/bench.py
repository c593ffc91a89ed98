"""Measurement harness: iteration counts and wall time per factorization.

Records are JSON Lines, one object per (modulus, method) run, so long
studies can stream to disk and survive interruption.  Values that may
not fit a double (the gap and the seed always, any count beyond 2**53)
are emitted as decimal strings; readers accept either form.

Iteration counts are pure functions of (seed, budget), so re-running a
study reproduces them bit for bit; elapsed_ns is the only field allowed
to differ between runs.
"""

from __future__ import annotations

import json
import math
import statistics
import time
import warnings
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from importlib import resources
from typing import IO, List, Optional, Sequence, Tuple, Union

from .engine import (
    Budget,
    BudgetExhausted,
    Found,
    fermat_factor,
    xscan_factor,
)
from .numeric import ceil_sqrt
from .semiprimes import (
    MAX_ATTEMPTS,
    FeasibilityError,
    generate_in_window,
    ladder_windows,
    rung_seeds,
)

METHODS = ("fermat", "xscan")

# JSON numbers above this lose integer precision in double-based parsers
_SAFE_JSON_INT = 1 << 53


@dataclass(frozen=True)
class BenchRecord:
    n_bits: int
    gap: Optional[int]  # q - p when known, else None
    method: str
    iterations: int
    elapsed_ns: int
    outcome: str  # found | no_factor | budget_exhausted
    seed: Optional[int] = None
    predicted_iterations: Optional[int] = None  # (p+q)/2 - ceil_sqrt(n) when p, q known


def _json_int(value: Optional[int]) -> Union[int, str, None]:
    if value is None:
        return None
    return value if -_SAFE_JSON_INT < value < _SAFE_JSON_INT else str(value)


def _as_string(value: Optional[int]) -> Optional[str]:
    return None if value is None else str(value)


def record_to_json(record: BenchRecord) -> str:
    """One JSONL line; decimal strings for gap, seed, and oversize counts."""
    return json.dumps(
        {
            "n_bits": record.n_bits,
            "gap": _as_string(record.gap),
            "method": record.method,
            "iterations": _json_int(record.iterations),
            "elapsed_ns": _json_int(record.elapsed_ns),
            "outcome": record.outcome,
            "seed": _as_string(record.seed),
            "predicted_iterations": _json_int(record.predicted_iterations),
        },
        sort_keys=True,
    )


def _opt_int(value) -> Optional[int]:
    return None if value is None else int(value)


def record_from_json(line: str) -> BenchRecord:
    obj = json.loads(line)
    return BenchRecord(
        n_bits=int(obj["n_bits"]),
        gap=_opt_int(obj.get("gap")),
        method=obj["method"],
        iterations=int(obj["iterations"]),
        elapsed_ns=int(obj["elapsed_ns"]),
        outcome=obj["outcome"],
        seed=_opt_int(obj.get("seed")),
        predicted_iterations=_opt_int(obj.get("predicted_iterations")),
    )


def measure(
    n: int,
    method: str = "fermat",
    budget: Optional[Budget] = None,
    factors: Optional[Tuple[int, int]] = None,
    seed: Optional[int] = None,
) -> BenchRecord:
    """Run one factorization and record what happened.

    `factors`, when the true (p, q) is known up front (generated
    inputs), fills gap and predicted_iterations even if the run
    exhausts its budget.  A found outcome fills them from the result.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    run = fermat_factor if method == "fermat" else xscan_factor
    t0 = time.perf_counter_ns()
    outcome = run(n, budget)
    elapsed = max(time.perf_counter_ns() - t0, 1)

    p = q = None
    if factors is not None:
        p, q = factors
    if isinstance(outcome, Found):
        p, q = outcome.p, outcome.q
        kind = "found"
    elif isinstance(outcome, BudgetExhausted):
        kind = "budget_exhausted"
    else:
        kind = "no_factor"
    return BenchRecord(
        n_bits=n.bit_length(),
        gap=None if p is None else q - p,
        method=method,
        iterations=outcome.iterations,
        elapsed_ns=elapsed,
        outcome=kind,
        seed=seed,
        predicted_iterations=None if p is None else (p + q) // 2 - ceil_sqrt(n),
    )


def run_study(
    bits: int,
    gaps: Sequence[int],
    seed: int,
    budget: Optional[Budget] = None,
    methods: Sequence[str] = METHODS,
    sink: Optional[IO[str]] = None,
    workers: int = 1,
    attempts: int = MAX_ATTEMPTS,
) -> List[BenchRecord]:
    """Generate a gap ladder and measure every (semiprime, method) cell.

    Records stream to `sink` as JSONL in completion order.  The returned
    list is always in ladder order (gap, then method) regardless of
    `workers`, and iteration columns are deterministic for a fixed
    (seed, budget); wall times are not.  Infeasible rungs raise a
    warning and are skipped; the rest of the study proceeds.
    """
    if not methods:
        raise ValueError("methods must be nonempty")
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")
    cells = []
    for rung_seed, (lo, hi) in zip(
        rung_seeds(seed, len(gaps)), ladder_windows(gaps)
    ):
        try:
            sp = generate_in_window(bits, lo, hi, rung_seed, attempts)
        except FeasibilityError as exc:
            warnings.warn(f"skipping gap window [{lo}, {hi}]: {exc}")
            continue
        for method in methods:
            cells.append((sp, method, rung_seed))

    def emit(record: BenchRecord) -> None:
        if sink is not None:
            sink.write(record_to_json(record) + "\n")

    results: List[Optional[BenchRecord]] = [None] * len(cells)
    if workers <= 1:
        for i, (sp, method, rung_seed) in enumerate(cells):
            record = measure(sp.n, method, budget, (sp.p, sp.q), rung_seed)
            emit(record)
            results[i] = record
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(measure, sp.n, method, budget, (sp.p, sp.q), rung_seed): i
                for i, (sp, method, rung_seed) in enumerate(cells)
            }
            for future in as_completed(futures):
                record = future.result()
                emit(record)
                results[futures[future]] = record
    return [r for r in results if r is not None]


# --- aggregation ---------------------------------------------------------------

@dataclass(frozen=True)
class SummaryRow:
    gap: int
    n_bits: int
    runs: int
    median_iterations: float
    analytic_iterations: float
    ratio: Optional[float]  # median / analytic; None when analytic is 0
    median_elapsed_ns: float


_CSV_HEADER = "gap,n_bits,runs,median_iterations,analytic_iterations,ratio,median_elapsed_ns"


@dataclass(frozen=True)
class SummaryTable:
    rows: List[SummaryRow]

    def as_csv(self) -> str:
        lines = [_CSV_HEADER]
        for r in self.rows:
            ratio = "" if r.ratio is None else f"{r.ratio:.6g}"
            lines.append(
                f"{r.gap},{r.n_bits},{r.runs},{r.median_iterations:.6g},"
                f"{r.analytic_iterations:.6g},{ratio},{r.median_elapsed_ns:.6g}"
            )
        return "\n".join(lines) + "\n"

    def as_text(self) -> str:
        header = ("gap", "n_bits", "runs", "median_iter", "analytic", "ratio", "median_ns")
        table = [header]
        for r in self.rows:
            table.append(
                (
                    str(r.gap),
                    str(r.n_bits),
                    str(r.runs),
                    f"{r.median_iterations:.6g}",
                    f"{r.analytic_iterations:.6g}",
                    "-" if r.ratio is None else f"{r.ratio:.3g}",
                    f"{r.median_elapsed_ns:.6g}",
                )
            )
        widths = [max(len(row[i]) for row in table) for i in range(len(header))]
        lines = [
            "  ".join(cell.rjust(widths[i]) for i, cell in enumerate(row))
            for row in table
        ]
        return "\n".join(lines) + "\n"


def analytic_iterations(gap: int, n_bits: int) -> float:
    """Reference curve gap**2 / (8 * sqrt(n)) with n taken as 2**(n_bits - 0.5),
    the geometric midpoint of the bit-length class."""
    if gap <= 0:
        return 0.0
    # log-space keeps this finite for arbitrary widths
    return 2.0 ** (2 * math.log2(gap) - 3 - (n_bits - 0.5) / 2)


def scaling_summary(records: Sequence[BenchRecord], method: str = "fermat") -> SummaryTable:
    """Per-gap medians against the analytic curve, for one method.

    Uses found outcomes only; budget-exhausted runs carry no completed
    iteration count and would poison the medians.
    """
    if not records:
        raise ValueError("no records to summarize")
    mine = [r for r in records if r.method == method]
    if not mine:
        raise ValueError(f"no records for method {method!r}")
    found = [r for r in mine if r.outcome == "found" and r.gap is not None]
    if not found:
        raise ValueError(
            "no found outcomes to summarize: every run exhausted its budget "
            "or hit a prime; rerun with a larger budget"
        )
    gaps = {r.gap for r in found}
    if len(gaps) < 2:
        raise ValueError("need found records from at least 2 distinct gaps")
    groups: dict = {}
    for r in found:
        groups.setdefault((r.gap, r.n_bits), []).append(r)
    rows = []
    for (gap, n_bits), group in sorted(groups.items()):
        med_iter = statistics.median(r.iterations for r in group)
        analytic = analytic_iterations(gap, n_bits)
        rows.append(
            SummaryRow(
                gap=gap,
                n_bits=n_bits,
                runs=len(group),
                median_iterations=float(med_iter),
                analytic_iterations=analytic,
                ratio=None if analytic == 0 else med_iter / analytic,
                median_elapsed_ns=float(statistics.median(r.elapsed_ns for r in group)),
            )
        )
    return SummaryTable(rows=rows)


def load_rsa100() -> int:
    """The 100-digit RSA challenge modulus, from the package data fixture."""
    text = resources.files("sqfactor").joinpath("data/rsa100.txt").read_text()
    digits = [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    return int("".join(digits))
