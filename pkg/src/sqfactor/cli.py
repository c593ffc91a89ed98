"""Command-line interface: factor, xscan, generate, and bench subcommands.

Exit codes: 0 success (factorization completed, or generation/bench
ran), 1 usage or domain errors, 2 no nontrivial factor (the input is
prime), 3 budget exhausted (a resumable checkpoint line goes to
stdout).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .bench import record_to_json, run_study, scaling_summary
from .engine import (
    Budget,
    BudgetExhausted,
    Found,
    NoNontrivialFactor,
    SearchState,
    XScanState,
    checkpoint_line,
    fermat_factor,
    normalize_input,
    parse_checkpoint,
    resume_fermat,
    resume_xscan,
    xscan_factor,
)
from .semiprimes import FeasibilityError, SemiprimeSpec, generate

DEFAULT_MAX_ITERATIONS = 10**8  # library default is unlimited; the CLI is not

_EXIT_OK = 0
_EXIT_USAGE = 1
_EXIT_NO_FACTOR = 2
_EXIT_EXHAUSTED = 3

_MASK64 = (1 << 64) - 1


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract reserves 2 for
    # "input is prime", so remap
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(_EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_modulus(text: str) -> int:
    s = text.strip()
    try:
        value = int(s, 16) if s[:2].lower() == "0x" else int(s, 10)
    except (ValueError, IndexError):
        raise ValueError(f"modulus {text!r} is not a decimal or 0x-hex integer")
    if value < 0:
        raise ValueError("modulus must be nonnegative")
    return value


def _budget_from(args) -> Budget:
    if args.max_iterations is None and args.max_seconds is None:
        return Budget(max_iterations=DEFAULT_MAX_ITERATIONS)
    return Budget(max_iterations=args.max_iterations, max_seconds=args.max_seconds)


def _emit_json(obj) -> int:
    json.dump(obj, sys.stdout)
    sys.stdout.write("\n")
    return _EXIT_OK


def _fail(message: str, as_json: bool) -> int:
    if as_json:
        _emit_json({"error": message})
    else:
        print(f"error: {message}", file=sys.stderr)
    return _EXIT_USAGE


def _load_checkpoint(path: str):
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise ValueError(f"cannot read checkpoint file: {exc}")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"checkpoint file {path!r} is empty")
    return parse_checkpoint(lines[-1])  # last line wins, files are appendable


def _product_line(factors: List[int]) -> str:
    return " × ".join(str(f) for f in factors)


def _run_split(args, method: str) -> int:
    n = parse_modulus(args.modulus)
    norm = normalize_input(n)  # raises on n < 2
    twos = norm.two_exponent
    residual = norm.residual
    want_state = SearchState if method == "fermat" else XScanState

    state = None
    if args.resume:
        state = _load_checkpoint(args.resume)
        if not isinstance(state, want_state):
            kind = "y-walk (factor)" if isinstance(state, SearchState) else "x-walk (xscan)"
            raise ValueError(f"checkpoint is for the {kind}; wrong subcommand")
        if state.n != residual:
            raise ValueError(
                f"checkpoint is for modulus {state.n}, but {n} normalizes to {residual}"
            )

    base = {"n": str(n), "twos": twos, "method": method}

    # powers of two never reach the engine
    if norm.is_fully_factored:
        if args.resume:
            raise ValueError("checkpoint cannot apply: modulus is a power of two")
        if twos == 1:  # n == 2: prime, nothing split
            if args.json:
                _emit_json(
                    {**base, "outcome": "no_factor", "iterations": 0, "factors": None}
                )
            else:
                print("no nontrivial factor (iterations=0)")
            return _EXIT_NO_FACTOR
        factors = norm.two_factors()
        if args.json:
            return _emit_json(
                {
                    **base,
                    "outcome": "complete",
                    "iterations": 0,
                    "factors": [str(f) for f in factors],
                }
            )
        print(_product_line(factors))
        return _EXIT_OK

    budget = _budget_from(args)
    progress = None
    if args.progress:
        label = "k" if method == "fermat" else "x"
        progress = lambda count: print(f"{label}={count}", file=sys.stderr, flush=True)

    if state is not None:
        runner = resume_fermat if method == "fermat" else resume_xscan
        outcome = runner(state, budget, progress)
    elif method == "fermat":
        outcome = fermat_factor(residual, budget, progress)
    else:
        outcome = xscan_factor(residual, budget, progress)

    if isinstance(outcome, Found):
        factors = norm.two_factors() + [outcome.p, outcome.q]
        if args.json:
            return _emit_json(
                {
                    **base,
                    "outcome": "found",
                    "p": str(outcome.p),
                    "q": str(outcome.q),
                    "k": outcome.k,
                    "iterations": outcome.iterations,
                    "factors": [str(f) for f in factors],
                }
            )
        if twos:
            print(_product_line(factors))
        else:
            print(
                f"p={outcome.p} q={outcome.q} k={outcome.k} "
                f"iterations={outcome.iterations}"
            )
        return _EXIT_OK

    if isinstance(outcome, NoNontrivialFactor):
        if twos:  # residual is prime, so the factorization is still complete
            factors = norm.two_factors() + [residual]
            if args.json:
                return _emit_json(
                    {
                        **base,
                        "outcome": "complete",
                        "iterations": outcome.iterations,
                        "factors": [str(f) for f in factors],
                    }
                )
            print(_product_line(factors))
            return _EXIT_OK
        if args.json:
            _emit_json(
                {
                    **base,
                    "outcome": "no_factor",
                    "iterations": outcome.iterations,
                    "factors": None,
                }
            )
            return _EXIT_NO_FACTOR
        print(f"no nontrivial factor (iterations={outcome.iterations})")
        return _EXIT_NO_FACTOR

    # budget exhausted: checkpoint on stdout, diagnostics on stderr
    line = checkpoint_line(outcome.resume)
    if args.json:
        resume_fields = {"n": str(outcome.resume.n), "y0": str(outcome.resume.y0)}
        if isinstance(outcome.resume, SearchState):
            resume_fields["k"] = str(outcome.resume.k)
        else:
            resume_fields["x"] = str(outcome.resume.x)
        _emit_json(
            {
                **base,
                "outcome": "budget_exhausted",
                "iterations": outcome.iterations,
                "checkpoint": line,
                "resume": resume_fields,
            }
        )
        return _EXIT_EXHAUSTED
    print(line)
    print(
        f"budget exhausted after {outcome.iterations} iterations; "
        "save the line above and continue with --resume",
        file=sys.stderr,
    )
    return _EXIT_EXHAUSTED


def _cmd_factor(args) -> int:
    return _run_split(args, "fermat")


def _cmd_xscan(args) -> int:
    return _run_split(args, "xscan")


def _cmd_generate(args) -> int:
    items = []
    for i in range(args.count):
        spec = SemiprimeSpec(
            bits=args.bits, max_gap=args.max_gap, seed=(args.seed + i) & _MASK64
        )
        items.append(generate(spec).as_json_dict())
    if args.json:
        return _emit_json(items)
    for obj in items:
        print(json.dumps(obj, sort_keys=True))
    return _EXIT_OK


def _cmd_bench(args) -> int:
    gaps = _parse_gaps(args.gaps)
    methods = tuple(args.methods.split(","))
    budget = _budget_from(args)
    with open(args.out, "w", encoding="utf-8") as sink:
        records = run_study(
            bits=args.bits,
            gaps=gaps,
            seed=args.seed,
            budget=budget,
            methods=methods,
            sink=sink,
            workers=args.workers,
        )
    summary = None
    summary_error = None
    try:
        summary = scaling_summary(records)
    except ValueError as exc:
        summary_error = str(exc)

    if args.summary_csv and summary is not None:
        with open(args.summary_csv, "w", encoding="utf-8") as fh:
            fh.write(summary.as_csv())

    if args.json:
        return _emit_json(
            {
                "records": [json.loads(record_to_json(r)) for r in records],
                "summary_csv": None if summary is None else summary.as_csv(),
                "summary_note": summary_error,
            }
        )
    print(f"wrote {len(records)} records to {args.out}")
    if summary is not None:
        print(summary.as_text(), end="")
    else:
        print(f"summary skipped: {summary_error}", file=sys.stderr)
    return _EXIT_OK


def _parse_gaps(text: str) -> List[int]:
    try:
        gaps = [int(part, 10) for part in text.split(",") if part != ""]
    except ValueError:
        raise ValueError(f"gaps {text!r} must be comma-separated integers")
    if not gaps:
        raise ValueError("gaps list is empty")
    return gaps


def _add_split_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("modulus", help="decimal, or hexadecimal with an 0x prefix")
    sub.add_argument(
        "--max-iterations",
        type=int,
        default=None,
        metavar="M",
        help=f"candidate budget for this run (default {DEFAULT_MAX_ITERATIONS:_})",
    )
    sub.add_argument(
        "--max-seconds", type=float, default=None, metavar="S",
        help="wall-clock budget for this run",
    )
    sub.add_argument("--json", action="store_true", help="emit one JSON object")
    sub.add_argument(
        "--resume", metavar="FILE", default=None,
        help="continue from a checkpoint line written by an exhausted run",
    )
    sub.add_argument(
        "--progress", action="store_true",
        help="periodic candidate-count lines on stderr",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sqfactor", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    p_factor = subs.add_parser("factor", help="difference-of-squares factor search")
    _add_split_flags(p_factor)
    p_factor.set_defaults(handler=_cmd_factor)

    p_xscan = subs.add_parser("xscan", help="half-gap scan variant")
    _add_split_flags(p_xscan)
    p_xscan.set_defaults(handler=_cmd_xscan)

    p_gen = subs.add_parser("generate", help="deterministic test semiprimes")
    p_gen.add_argument("--bits", type=int, required=True)
    p_gen.add_argument("--max-gap", type=int, required=True)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument(
        "--count", type=int, default=1,
        help="emit this many, advancing the seed by one each time",
    )
    p_gen.add_argument("--json", action="store_true", help="emit one JSON array")
    p_gen.set_defaults(handler=_cmd_generate)

    p_bench = subs.add_parser("bench", help="gap-ladder iteration study")
    p_bench.add_argument("--bits", type=int, required=True)
    p_bench.add_argument("--gaps", required=True, help="comma-separated gap bounds")
    p_bench.add_argument("--seed", type=int, required=True)
    p_bench.add_argument(
        "--methods", default="fermat,xscan", help="subset of fermat,xscan"
    )
    p_bench.add_argument("--out", required=True, metavar="FILE", help="JSONL sink")
    p_bench.add_argument("--summary-csv", default=None, metavar="FILE")
    p_bench.add_argument("--workers", type=int, default=1)
    p_bench.add_argument("--max-iterations", type=int, default=None, metavar="M")
    p_bench.add_argument("--max-seconds", type=float, default=None, metavar="S")
    p_bench.add_argument("--json", action="store_true")
    p_bench.set_defaults(handler=_cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (ValueError, FeasibilityError) as exc:
        return _fail(str(exc), getattr(args, "json", False))
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 130


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
