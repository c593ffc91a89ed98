"""Deterministic semiprime generation with controlled bit size and gap.

Reproducibility is the whole point of this module: given the same
(bits, max_gap, seed) request, every platform and every run must emit
the demand-identical semiprime.  All randomness therefore comes from an
explicit, fully specified 64-bit generator rather than any platform
facility, and the primality test is handed that same generator so even
its witness choices (only consulted above the deterministic range) are
reproducible.

The generator is the splitmix construction: a 64-bit counter advanced
by the constant 0x9E3779B97F4A7C15, whose output is the counter value
scrambled by two xor-shift-multiply rounds with multipliers
0xBF58476D1CE4E5B9 and 0x94D049BB133111EB and shifts 30, 27, 31.

Generation strategy: draw a random odd starting point with bits/2
(rounded up) bits, walk upward to the next probable prime p, then scan
for a prime q with q - p inside the requested gap window.  A failed
window scan restarts with fresh randomness; a bounded number of
restarts (MAX_ATTEMPTS) turns structurally impossible requests, such as
an odd gap between odd primes, into FeasibilityError instead of a hang.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .numeric import is_probable_prime

_MASK64 = (1 << 64) - 1

MAX_ATTEMPTS = 100_000

# give up on a single upward prime walk after this many odd candidates;
# real prime gaps at benchmark sizes are orders of magnitude smaller
_WALK_LIMIT = 10_000


class SplitMix64:
    """The splitmix 64-bit PRNG; deterministic across platforms."""

    GOLDEN_GAMMA = 0x9E3779B97F4A7C15
    MIX_MULT_1 = 0xBF58476D1CE4E5B9
    MIX_MULT_2 = 0x94D049BB133111EB

    def __init__(self, seed: int):
        if not 0 <= seed <= _MASK64:
            raise ValueError("seed must fit in 64 bits")
        self._state = seed

    def next_word(self) -> int:
        self._state = (self._state + self.GOLDEN_GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * self.MIX_MULT_1) & _MASK64
        z = ((z ^ (z >> 27)) * self.MIX_MULT_2) & _MASK64
        return z ^ (z >> 31)

    def bits(self, count: int) -> int:
        """count random bits, little-endian word order."""
        if count < 0:
            raise ValueError("count must be >= 0")
        out = 0
        filled = 0
        while filled < count:
            out |= self.next_word() << filled
            filled += 64
        return out & ((1 << count) - 1)

    def randrange(self, low: int, high: int) -> int:
        """Uniform integer in [low, high); rejection keeps it unbiased."""
        if high <= low:
            raise ValueError("empty range")
        span = high - low
        nbits = span.bit_length()
        while True:
            draw = self.bits(nbits)
            if draw < span:
                return low + draw


class FeasibilityError(Exception):
    """No qualifying prime pair found within the attempt bound."""


@dataclass(frozen=True)
class SemiprimeSpec:
    bits: int
    max_gap: int
    seed: int

    def __post_init__(self):
        if self.bits < 4:
            raise ValueError("bits must be >= 4")
        if self.max_gap < 0:
            raise ValueError("max_gap must be >= 0")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class GeneratedSemiprime:
    p: int
    q: int
    n: int
    gap: int
    bits: int  # requested size; n's true length is within 1 of it
    seed: int

    def as_json_dict(self) -> dict:
        # decimal strings throughout so arbitrary-width values survive
        # consumers that parse JSON numbers as doubles
        return {
            "p": str(self.p),
            "q": str(self.q),
            "n": str(self.n),
            "gap": str(self.gap),
            "bits": str(self.bits),
            "seed": str(self.seed),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "GeneratedSemiprime":
        return cls(
            p=int(obj["p"]),
            q=int(obj["q"]),
            n=int(obj["n"]),
            gap=int(obj["gap"]),
            bits=int(obj["bits"]),
            seed=int(obj["seed"]),
        )


def _next_probable_prime(start: int, rng: SplitMix64) -> Optional[int]:
    candidate = start | 1
    for _ in range(_WALK_LIMIT):
        if is_probable_prime(candidate, rng=rng):
            return candidate
        candidate += 2
    return None


def _scan_gap_window(p: int, gap_lo: int, gap_hi: int, rng: SplitMix64) -> Optional[int]:
    # first prime q with q - p in [gap_lo, gap_hi]; q stays odd
    t = p + gap_lo
    if t % 2 == 0:
        t += 1
    while t <= p + gap_hi:
        if is_probable_prime(t, rng=rng):
            return t
        t += 2
    return None


def generate_in_window(
    bits: int, gap_lo: int, gap_hi: int, seed: int, attempts: int = MAX_ATTEMPTS
) -> GeneratedSemiprime:
    """Semiprime of roughly `bits` bits whose gap q - p lies in [gap_lo, gap_hi].

    gap_lo = gap_hi = 0 requests p = q (a squared prime).  Deterministic
    per seed.  Raises FeasibilityError when `attempts` restart rounds
    cannot satisfy the request.
    """
    if bits < 4:
        raise ValueError("bits must be >= 4")
    if not 0 <= gap_lo <= gap_hi:
        raise ValueError("need 0 <= gap_lo <= gap_hi")
    rng = SplitMix64(seed)
    half = (bits + 1) // 2
    for _ in range(attempts):
        start = (1 << (half - 1)) | rng.bits(half - 1) | 1
        p = _next_probable_prime(start, rng)
        if p is None:
            continue
        if gap_hi == 0:
            q = p
        else:
            q = _scan_gap_window(p, max(gap_lo, 1), gap_hi, rng)
            if q is None:
                continue
        n = p * q
        if abs(n.bit_length() - bits) > 1:
            continue
        return GeneratedSemiprime(p=p, q=q, n=n, gap=q - p, bits=bits, seed=seed)
    raise FeasibilityError(
        f"no {bits}-bit semiprime with gap in [{gap_lo}, {gap_hi}] "
        f"after {attempts} attempts"
    )


def generate(spec: SemiprimeSpec, attempts: int = MAX_ATTEMPTS) -> GeneratedSemiprime:
    """One semiprime of the requested shape; gap up to spec.max_gap, seed-deterministic."""
    lo = 0 if spec.max_gap == 0 else 1
    return generate_in_window(spec.bits, lo, spec.max_gap, spec.seed, attempts)


def ladder_windows(gaps: Sequence[int]) -> List[Tuple[int, int]]:
    """Disjoint gap windows [previous bound + 1, bound] for a ladder.

    A zero bound (only sensible first) requests exactly gap 0.
    """
    if not gaps:
        raise ValueError("gaps must be nonempty")
    windows = []
    prev = 0
    for bound in gaps:
        if bound < 0:
            raise ValueError("gap bounds must be >= 0")
        if windows and bound <= prev:
            raise ValueError("gap bounds must be strictly ascending")
        windows.append((0, 0) if bound == 0 else (prev + 1, bound))
        prev = bound
    return windows


def rung_seeds(seed: int, count: int) -> List[int]:
    """Per-rung seeds: successive words of a splitmix stream over `seed`."""
    master = SplitMix64(seed)
    return [master.next_word() for _ in range(count)]


def gap_ladder(
    bits: int, gaps: Sequence[int], seed: int, attempts: int = MAX_ATTEMPTS
) -> List[GeneratedSemiprime]:
    """One semiprime per gap bound, actual gaps confined to disjoint
    ascending windows, so the ladder's gaps strictly increase.
    """
    windows = ladder_windows(gaps)
    out = []
    for rung_seed, (lo, hi) in zip(rung_seeds(seed, len(windows)), windows):
        out.append(generate_in_window(bits, lo, hi, rung_seed, attempts))
    return out
