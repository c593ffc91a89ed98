"""Arbitrary-precision integer primitives: integer square roots, exact
perfect-square detection with a residue pre-filter, and Miller-Rabin
primality testing.

Everything here is a pure function of its arguments and safe to call
from any number of threads.

The square detector is split in two layers:

* ``residue_filter`` rejects most non-squares by looking at the residue
  of n modulo 64, 63, 65, and 11.  A square must be a quadratic residue
  modulo every modulus, so a miss in any table proves n is not a square.
  The four moduli are cheap to reduce by (64 is a mask) and jointly pass
  only about 0.8% of uniformly random non-squares.
* ``is_perfect_square`` runs the filter, then confirms survivors with an
  exact integer square root.

``floor_sqrt`` is Newton's method on plain Python integers seeded from
the bit length.  The seed ``1 << ((bits + 1) // 2)`` is always at least
the true root, and the iteration decreases monotonically to the floor,
so the loop can stop the first time it fails to shrink.  Correctness is
pinned by the post-condition r*r <= n < (r+1)*(r+1) in the tests rather
than argued here.
"""

from __future__ import annotations

import random
from typing import NamedTuple, Optional


def floor_sqrt(n: int) -> int:
    """Largest r with r*r <= n.

    >>> floor_sqrt(187)
    13
    """
    if n < 0:
        raise ValueError("floor_sqrt is undefined for negative numbers")
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + 1) // 2)  # >= isqrt(n), so descent is monotone
    y = (x + n // x) // 2
    while y < x:
        x = y
        y = (x + n // x) // 2
    return x


def ceil_sqrt(n: int) -> int:
    """Smallest r with r*r >= n.

    >>> ceil_sqrt(187)
    14
    """
    r = floor_sqrt(n)
    return r if r * r == n else r + 1


class SquareTestResult(NamedTuple):
    is_square: bool
    root: Optional[int]  # set iff is_square; root * root == the input


def _square_residues(m: int) -> bytes:
    table = bytearray(m)
    for i in range(m):
        table[i * i % m] = 1
    return bytes(table)


# Quadratic-residue membership tables, indexed by n mod m.
_SQ64 = _square_residues(64)
_SQ63 = _square_residues(63)
_SQ65 = _square_residues(65)
_SQ11 = _square_residues(11)


def residue_filter(n: int) -> bool:
    """Fast soundness-preserving square screen.

    False means n is provably not a perfect square (its residue modulo
    64, 63, 65, or 11 is a non-residue).  True is inconclusive and must
    be confirmed by an exact check.  Never returns False for a square.
    """
    if n < 0:
        raise ValueError("residue_filter is undefined for negative numbers")
    return bool(
        _SQ64[n & 63] and _SQ63[n % 63] and _SQ65[n % 65] and _SQ11[n % 11]
    )


def is_perfect_square(n: int) -> SquareTestResult:
    """Exact square test: no false positives, no false negatives.

    >>> is_perfect_square(196)
    SquareTestResult(is_square=True, root=14)
    >>> is_perfect_square(2).is_square
    False
    """
    if n < 0:
        return SquareTestResult(False, None)
    if not residue_filter(n):
        return SquareTestResult(False, None)
    r = floor_sqrt(n)
    if r * r == n:
        return SquareTestResult(True, r)
    return SquareTestResult(False, None)


# Below this bound, the fixed witness list is known to be exhaustive:
# no composite passes all of them (Sorenson & Webster's verified bound
# for the first 13 primes, 3.317e24).
_DETERMINISTIC_BOUND = 3317044064679887385961981
_DETERMINISTIC_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def _mr_witness_passes(n: int, d: int, r: int, a: int) -> bool:
    # n - 1 = d * 2**r with d odd; returns True when a does NOT expose n.
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(n: int, rounds: int = 24, rng=random) -> bool:
    """Miller-Rabin primality test.

    Exact (deterministic witness set) for n below about 3.3e24.  Beyond
    that, ``rounds`` random witnesses give an error probability of at
    most 4**-rounds for composite n.  ``rng`` only needs a ``randrange``
    method and is consulted only above the deterministic bound, so
    results below it never depend on it.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    if n < _DETERMINISTIC_BOUND:
        witnesses = [a for a in _DETERMINISTIC_WITNESSES if a % n != 0]
    else:
        witnesses = [rng.randrange(2, n - 1) for _ in range(rounds)]
    for a in witnesses:
        if not _mr_witness_passes(n, d, r, a):
            return False
    return True
