"""Sylvester growth and the prime-count bound for the unit-fraction identity.

The divisibility argument leaves an integer identity of the shape

    sum_{p | m-1} 1/p + 1/(m-1) in Z,    m-1 square-free,

so omega(m-1) + 1 distinct unit fractions sum to a positive integer.  If
that integer is at least 2 the reciprocals alone force omega(m-1) >= 58,
because the reciprocals of the first 58 primes sum to less than 2.  If it
equals 1, the Curtiss bound for n unit fractions summing to 1 caps every
denominator by A_n - 1, where A_n is the Sylvester sequence 2, 3, 7, 43,
1807, ...; hence m <= A_{omega+1}, and any omega with A_{omega+1} below a
proven lower bound on m is ruled out.  The reported bound is the smaller
of the two branches.

A_n is kept exact while small; past the exact range the squared form
A_{n+1} = A_n^2 - A_n + 1 drives a directed-rounding recurrence on
log10 A_n, rounding down for the lower edge (with an explicit allowance
for the dropped -A_n + 1) and up for the upper.  Working precision grows
with n so the absolute bracket width stays far below the 10^-6 n budget
even though the logarithm itself doubles every step.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal, localcontext
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "SylvesterLog",
    "sylvester_exact",
    "sylvester_log10",
    "min_omega_from_bound",
    "reciprocal_sum_check",
]

_EXACT_LIMIT = 12
_MAX_INDEX = 256


@dataclass(frozen=True)
class SylvesterLog:
    n: int
    log10_lo: Decimal
    log10_hi: Decimal
    exact: int | None = None

    def __post_init__(self):
        if self.log10_lo > self.log10_hi:
            raise ValueError("bracket edges out of order")


@lru_cache(maxsize=None)
def sylvester_exact(n: int) -> int:
    if not 1 <= n <= _EXACT_LIMIT:
        raise ValueError(f"exact mode covers 1..{_EXACT_LIMIT}")
    a = 2
    for _ in range(n - 1):
        a = a * a - a + 1
    return a


def _prec_for(n: int) -> int:
    # bracket widths amplify by 2 per squaring step; 0.31 digits per index
    # of headroom keeps the final absolute width near 10^-40
    return 40 + (31 * n) // 100


@lru_cache(maxsize=None)
def sylvester_log10(n: int) -> SylvesterLog:
    """Bracketed log10 A_n, exact integer alongside while that is affordable."""
    if not 1 <= n <= _MAX_INDEX:
        raise ValueError(f"n must be in 1..{_MAX_INDEX}")
    base = min(n, _EXACT_LIMIT)
    a = sylvester_exact(base)
    down = Context(prec=_prec_for(n), rounding=ROUND_FLOOR)
    up = Context(prec=_prec_for(n), rounding=ROUND_CEILING)
    # log10() always rounds half-even, whatever the context rounding says,
    # so widen the correctly rounded value by one ulp on each side
    with localcontext(Context(prec=down.prec + 4)):
        v = Decimal(a).log10()
    ulp = Decimal(1).scaleb(v.adjusted() - (down.prec + 4) + 1)
    with localcontext(down):
        lo = v - ulp
    with localcontext(up):
        hi = v + ulp
    for _ in range(base, n):
        # A^2 > A^2 - A + 1 > A^2 (1 - 1/A), and -log10(1 - 1/A) < 10^-floor(lo);
        # the exponent is clamped to stay inside Decimal range, which only
        # enlarges the allowance and keeps the lower edge valid
        shift = min(int(lo.to_integral_value(ROUND_FLOOR)), down.prec + 20)
        allowance = Decimal(f"1e-{shift}")
        with localcontext(down):
            lo = lo + lo - allowance
        with localcontext(up):
            hi = hi + hi
    return SylvesterLog(
        n=n, log10_lo=lo, log10_hi=hi, exact=a if n <= _EXACT_LIMIT else None
    )


def _as_decimal(x) -> Decimal:
    if isinstance(x, Decimal):
        return x
    if isinstance(x, float):
        return Decimal(repr(x))
    return Decimal(x)


def min_omega_from_bound(log10_m) -> int:
    """Guaranteed lower bound on omega(m-1) from log10 m, capped at 58.

    An omega survives the sum-equals-one branch when A_{omega+1} is not
    certifiably below m, i.e. when the upper log edge clears log10_m; the
    first survivor is the branch bound, and 58 covers sums of two or more.
    """
    target = _as_decimal(log10_m)
    if not target > 0:
        raise ValueError("log10_m must be positive")
    for omega in range(1, 58):
        s = sylvester_log10(omega + 1)
        if s.log10_hi > target:
            if s.log10_lo <= target:
                warnings.warn(
                    f"log10 A_{omega + 1} bracket straddles the target; "
                    "reporting the conservative bound",
                    RuntimeWarning,
                    stacklevel=2,
                )
            return omega
    return 58


def reciprocal_sum_check(primes) -> Fraction:
    """Exact sum of reciprocals of distinct primes."""
    seen = set()
    total = Fraction(0)
    for p in primes:
        if p in seen:
            raise ValueError(f"duplicate entry {p}")
        if p < 2:
            raise ValueError(f"not a valid prime: {p}")
        seen.add(p)
        total += Fraction(1, p)
    return total
