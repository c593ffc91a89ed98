"""Difference-of-squares factor search with explicit budgets.

For odd n >= 3, any factorization n = p*q with p <= q corresponds to a
representation n = y*y - x*x where y = (p+q)/2 and x = (q-p)/2.  The
search walks candidate centers y = y0 + k upward from y0 = ceil_sqrt(n)
and reports the first k where the deficit

    d_k = (y0 + k)**2 - n

is itself a perfect square x*x.  Consecutive deficits obey

    d_{k+1} = d_k + 2*y0 + 2*k + 1

so the walk needs one addition per candidate, no multiplications.  The
first hit gives p = y - x and q = y + x, and p is automatically the
largest divisor of n not exceeding sqrt(n).

Every odd n eventually hits the trivial representation at
y = (n+1)/2 (p = 1, q = n), so a search that reaches it proves there is
no nontrivial split and the input behaves prime.  That bound makes the
unbudgeted search total.

Searches take an optional Budget and return a FactorOutcome sum type:
Found, NoNontrivialFactor, or BudgetExhausted carrying a resumable
state.  Resuming an exhausted search examines exactly the candidates a
never-interrupted run would have examined next, so a budgeted run plus
its resumption is indistinguishable from one unlimited run.

The same machinery supports the inverted scan over half-gaps x
(xscan_factor): test x = 0, 1, 2, ... for n + x*x being a perfect
square s*s, which yields y = s directly.  Both scans return identical
(p, q); only their iteration counts differ.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .numeric import _SQ11, _SQ63, _SQ64, _SQ65, ceil_sqrt, is_perfect_square

__all__ = [
    "Budget",
    "BudgetExhausted",
    "FactorOutcome",
    "Found",
    "NoNontrivialFactor",
    "NormalizedInput",
    "SearchState",
    "XScanState",
    "checkpoint_line",
    "fermat_factor",
    "init_search",
    "normalize_input",
    "parse_checkpoint",
    "predict_k",
    "resume_fermat",
    "resume_xscan",
    "step",
    "xscan_factor",
]

# Seconds-budget and progress callbacks are only serviced every this many
# loop bodies; keeps the hot path free of clock reads.
_CHECK_MASK = 4095
_PROGRESS_INTERVAL = 1.0


def _require_odd_modulus(n: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError("modulus must be an integer")
    if n < 3 or n % 2 == 0:
        raise ValueError(
            "modulus must be an odd integer >= 3; strip factors of two "
            f"first (normalize_input), got {n}"
        )


@dataclass(frozen=True)
class SearchState:
    """Snapshot of the y-walk: candidate y = y0 + k is the next to examine."""

    n: int
    y0: int
    k: int
    d: int

    def __post_init__(self):
        _require_odd_modulus(self.n)
        if self.y0 != ceil_sqrt(self.n):
            raise ValueError("y0 must equal ceil_sqrt(n)")
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if self.d != (self.y0 + self.k) ** 2 - self.n:
            raise ValueError("d must equal (y0 + k)**2 - n")

    @property
    def iterations(self) -> int:
        # candidates examined so far; the sequential walk makes this k
        return self.k


@dataclass(frozen=True)
class XScanState:
    """Snapshot of the x-walk: candidate half-gap x is the next to examine."""

    n: int
    y0: int
    x: int

    def __post_init__(self):
        _require_odd_modulus(self.n)
        if self.y0 != ceil_sqrt(self.n):
            raise ValueError("y0 must equal ceil_sqrt(n)")
        if self.x < 0:
            raise ValueError("x must be >= 0")

    @property
    def iterations(self) -> int:
        return self.x


@dataclass(frozen=True)
class Found:
    p: int
    q: int
    k: int
    iterations: int


@dataclass(frozen=True)
class NoNontrivialFactor:
    iterations: int


@dataclass(frozen=True)
class BudgetExhausted:
    iterations: int
    resume: Union[SearchState, XScanState]


FactorOutcome = Union[Found, NoNontrivialFactor, BudgetExhausted]


@dataclass(frozen=True)
class Budget:
    """Bounds on one search call.

    max_iterations counts candidates examined by this call (resuming
    grants a fresh allowance).  max_seconds is wall time, serviced at a
    granularity of a few thousand candidates.  None means unbounded.
    """

    max_iterations: Optional[int] = None
    max_seconds: Optional[float] = None

    def __post_init__(self):
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("max_seconds must be positive")


UNLIMITED = Budget()


def init_search(n: int) -> SearchState:
    """State whose first candidate is y = ceil_sqrt(n), i.e. k = 0."""
    _require_odd_modulus(n)
    y0 = ceil_sqrt(n)
    return SearchState(n=n, y0=y0, k=0, d=y0 * y0 - n)


def step(state: SearchState) -> SearchState:
    """Advance one candidate using the additive deficit recurrence."""
    return SearchState(
        n=state.n,
        y0=state.y0,
        k=state.k + 1,
        d=state.d + 2 * state.y0 + 2 * state.k + 1,
    )


# --- checkpoint serialization ------------------------------------------------

def checkpoint_line(state: Union[SearchState, XScanState]) -> str:
    """One-line key=value form; decimal, reload-exact."""
    if isinstance(state, SearchState):
        return f"n={state.n} y0={state.y0} k={state.k}"
    return f"n={state.n} y0={state.y0} x={state.x}"


def parse_checkpoint(line: str) -> Union[SearchState, XScanState]:
    fields = {}
    for token in line.split():
        key, sep, value = token.partition("=")
        if not sep or not value.lstrip("-").isdigit() or key in fields:
            raise ValueError(f"malformed checkpoint token {token!r}")
        fields[key] = int(value)
    keys = set(fields)
    if keys == {"n", "y0", "k"}:
        n, y0, k = fields["n"], fields["y0"], fields["k"]
        return SearchState(n=n, y0=y0, k=k, d=(y0 + k) ** 2 - n)
    if keys == {"n", "y0", "x"}:
        return XScanState(n=fields["n"], y0=fields["y0"], x=fields["x"])
    raise ValueError(
        "checkpoint must have exactly the keys n, y0 and k (y-walk) "
        f"or n, y0 and x (x-walk), got {sorted(keys)}"
    )


# --- the y-walk --------------------------------------------------------------

# jump table cache: (y0 mod 64, n mod 64) -> distance from each k residue
# to the next k whose deficit can be a square mod 64
_SQRES64 = frozenset(i * i % 64 for i in range(64))
_JUMPS: dict = {}


def _jump_table(y0m: int, nm: int) -> tuple:
    key = (y0m, nm)
    table = _JUMPS.get(key)
    if table is None:
        allowed = [
            a for a in range(64) if ((y0m + a) * (y0m + a) - nm) % 64 in _SQRES64
        ]
        # a square deficit exists (the trivial representation), so the
        # allowed set is never empty and every scan distance is finite
        table = tuple(
            min((a - r) % 64 for a in allowed) if r not in allowed else 0
            for r in range(64)
        )
        _JUMPS[key] = table
    return table


def _finish_found(n: int, y: int, x: int, iterations: int) -> FactorOutcome:
    p = y - x
    if p == 1:
        # trivial representation n = 1 * n: the search space is exhausted
        return NoNontrivialFactor(iterations=iterations)
    return Found(p=p, q=y + x, k=y - ceil_sqrt(n), iterations=iterations)


def _run_y_walk(
    n: int,
    y0: int,
    k0: int,
    budget: Optional[Budget],
    progress: Optional[Callable[[int], None]],
) -> FactorOutcome:
    max_k = (n + 1) // 2 - y0  # index of the guaranteed trivial hit
    if k0 > max_k:
        raise ValueError("state is past the trivial representation; nothing left to scan")
    stop = max_k + 1
    deadline = None
    if budget is not None:
        if budget.max_iterations is not None:
            stop = min(stop, k0 + budget.max_iterations)
        if budget.max_seconds is not None:
            deadline = time.perf_counter() + budget.max_seconds
    next_report = time.perf_counter() + _PROGRESS_INTERVAL if progress else None

    isqrt = math.isqrt
    s63, s65, s11 = _SQ63, _SQ65, _SQ11
    jumps = _jump_table(y0 % 64, n % 64)
    k = k0
    y = y0 + k0
    d = y * y - n
    bodies = 0
    while k < stop:
        jump = jumps[k & 63]
        if jump:
            if k + jump >= stop:
                jump = stop - k
                d += jump * (2 * y + jump)
                y += jump
                k = stop
                break
            d += jump * (2 * y + jump)
            y += jump
            k += jump
        # k is now in an allowed residue class; d passed the mod-64 screen
        if s63[d % 63] and s65[d % 65] and s11[d % 11]:
            x = isqrt(d)
            if x * x == d:
                return _finish_found(n, y, x, iterations=k)
        d += 2 * y + 1
        y += 1
        k += 1
        bodies += 1
        if bodies & _CHECK_MASK == 0:
            if deadline is not None and time.perf_counter() > deadline:
                break
            if next_report is not None:
                now = time.perf_counter()
                if now >= next_report:
                    progress(k)
                    next_report = now + _PROGRESS_INTERVAL
    if k > max_k:
        raise AssertionError("walked past the trivial representation")
    return BudgetExhausted(
        iterations=k, resume=SearchState(n=n, y0=y0, k=k, d=(y0 + k) ** 2 - n)
    )


def fermat_factor(
    n: int,
    budget: Optional[Budget] = None,
    progress: Optional[Callable[[int], None]] = None,
) -> FactorOutcome:
    """Factor odd n >= 3 by the difference-of-squares y-walk.

    Returns Found(p, q, k, iterations) at the first square deficit; p*q
    = n with 1 < p <= q and p the largest divisor of n at most sqrt(n).
    Returns NoNontrivialFactor for inputs with no nontrivial split
    (primes) and BudgetExhausted with a resumable state when the budget
    runs out first.
    """
    _require_odd_modulus(n)
    return _run_y_walk(n, ceil_sqrt(n), 0, budget, progress)


def resume_fermat(
    state: SearchState,
    budget: Optional[Budget] = None,
    progress: Optional[Callable[[int], None]] = None,
) -> FactorOutcome:
    """Continue an exhausted y-walk; examines candidates k, k+1, ..."""
    return _run_y_walk(state.n, state.y0, state.k, budget, progress)


# --- closed-form prediction and the x-walk -----------------------------------

def predict_k(n: int, x: int) -> Optional[int]:
    """Offset k at which the deficit equals x*x, if any.

    Solves (y0 + k)**2 - n = x**2 for integer k >= 0: when n + x*x is a
    perfect square s*s with s >= ceil_sqrt(n), k = s - y0.  Returns None
    otherwise (including roots below the search start, i.e. negative k).
    """
    _require_odd_modulus(n)
    if x < 0:
        raise ValueError("x must be >= 0")
    test = is_perfect_square(n + x * x)
    if not test.is_square:
        return None
    y0 = ceil_sqrt(n)
    if test.root < y0:
        return None
    return test.root - y0


def _run_x_walk(
    n: int,
    y0: int,
    x0: int,
    budget: Optional[Budget],
    progress: Optional[Callable[[int], None]],
) -> FactorOutcome:
    max_x = (n - 1) // 2  # half-gap of the trivial representation
    if x0 > max_x:
        raise ValueError("state is past the trivial representation; nothing left to scan")
    stop = max_x + 1
    deadline = None
    if budget is not None:
        if budget.max_iterations is not None:
            stop = min(stop, x0 + budget.max_iterations)
        if budget.max_seconds is not None:
            deadline = time.perf_counter() + budget.max_seconds
    next_report = time.perf_counter() + _PROGRESS_INTERVAL if progress else None

    isqrt = math.isqrt
    s64, s63, s65, s11 = _SQ64, _SQ63, _SQ65, _SQ11
    x = x0
    t = n + x * x  # candidate square s*s = n + x*x
    inc = 2 * x + 1
    while x < stop:
        if s64[t & 63] and s63[t % 63] and s65[t % 65] and s11[t % 11]:
            s = isqrt(t)
            if s * s == t:
                if s - x == 1:
                    return NoNontrivialFactor(iterations=x)
                return Found(p=s - x, q=s + x, k=s - y0, iterations=x)
        t += inc
        inc += 2
        x += 1
        if x & _CHECK_MASK == 0:
            if deadline is not None and time.perf_counter() > deadline:
                break
            if next_report is not None:
                now = time.perf_counter()
                if now >= next_report:
                    progress(x)
                    next_report = now + _PROGRESS_INTERVAL
    return BudgetExhausted(iterations=x, resume=XScanState(n=n, y0=y0, x=x))


def xscan_factor(
    n: int,
    budget: Optional[Budget] = None,
    progress: Optional[Callable[[int], None]] = None,
) -> FactorOutcome:
    """Factor odd n >= 3 by scanning half-gaps x = 0, 1, 2, ...

    Tests whether n + x*x is a perfect square; the first hit yields the
    same (p, q) pair as fermat_factor, generally after a different
    number of iterations (iterations counts x candidates here).
    """
    _require_odd_modulus(n)
    return _run_x_walk(n, ceil_sqrt(n), 0, budget, progress)


def resume_xscan(
    state: XScanState,
    budget: Optional[Budget] = None,
    progress: Optional[Callable[[int], None]] = None,
) -> FactorOutcome:
    """Continue an exhausted x-walk; examines candidates x, x+1, ..."""
    return _run_x_walk(state.n, state.y0, state.x, budget, progress)


# --- input normalization ------------------------------------------------------

@dataclass(frozen=True)
class NormalizedInput:
    """n = 2**two_exponent * residual with residual odd.

    residual == 1 means the factorization is complete (n was a power of
    two); otherwise residual is an odd number >= 3 ready for the engine.
    """

    two_exponent: int
    residual: int

    @property
    def is_fully_factored(self) -> bool:
        return self.residual == 1

    def two_factors(self) -> list:
        return [2] * self.two_exponent


def normalize_input(n: int) -> NormalizedInput:
    """Strip all factors of two from n >= 2."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ValueError(f"modulus must be an integer >= 2, got {n!r}")
    twos = 0
    residual = n
    while residual % 2 == 0:
        residual //= 2
        twos += 1
    return NormalizedInput(two_exponent=twos, residual=residual)
