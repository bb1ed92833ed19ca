"""Certified rational enclosures of log 2 and log(1 + 1/t).

The working series is the inverse hyperbolic tangent at an integer argument,

    atanh(1/x) = sum_{n >= 0} 1 / ((2n+1) x^(2n+1)),     x >= 2,

summed exactly by binary splitting.  Truncation after N terms undershoots,
and the omitted tail sits below the geometric majorant

    R_N < x^-(2N+1) * x^2 / (x^2 - 1) < 2 * x^-(2N+1),

so [partial sum, partial sum + majorant] encloses the true value with exact
rational endpoints.  log 2 is 2*atanh(1/3) by default; at or above
FAST_PATH_DIGITS a three-term combination

    log 2 = 18*atanh(1/26) - 2*atanh(1/4801) + 8*atanh(1/8749)

takes over because each of its series gains close to three decimal digits
per term instead of roughly 0.95.  log(1 + 1/t) is 2*atanh(1/(2t+1)).

Endpoints are rounded outward onto a common power-of-ten grid, which keeps
denominators near 10^digits instead of the factorial-sized denominators the
raw splitting produces.  Every public result is a RationalInterval: exact
rational bounds plus the count of decimal digits the width is known to
respect.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass

from gmpy2 import mpq, mpz

__all__ = [
    "DEFAULT_DIGIT_CEILING",
    "FAST_PATH_DIGITS",
    "DigitBudgetError",
    "RationalInterval",
    "compute_log2",
    "compute_log_ratio",
    "scale_interval",
    "write_digit_file",
    "read_digit_file",
]

DEFAULT_DIGIT_CEILING = 20_000_000
FAST_PATH_DIGITS = 1_000_000

# Digit strings in cache files wrap at this many columns.
_WRAP = 100

# Splitting leaves sum this many terms with a plain loop; below ~8 the
# Python call overhead dominates the work.
_BASE_SPAN = 8

_MACHIN_TERMS = ((18, 26), (-2, 4801), (8, 8749))

# Sentinel digits_valid for a degenerate (zero width) interval.
_EXACT = 10**9


class DigitBudgetError(ValueError):
    """Requested digit count exceeds the configured memory ceiling."""


def _pow10(k: int) -> mpz:
    return mpz(10) ** int(k)


def digit_ceiling(override: int | None = None) -> int:
    """Active digit ceiling: explicit override, else EMCF_DIGIT_CEILING, else default."""
    if override is not None:
        return int(override)
    raw = os.environ.get("EMCF_DIGIT_CEILING")
    return int(raw) if raw else DEFAULT_DIGIT_CEILING


def _check_budget(digits: int, ceiling: int | None) -> None:
    limit = digit_ceiling(ceiling)
    if digits > limit:
        raise DigitBudgetError(
            f"{digits} digits exceeds the configured ceiling of {limit}"
        )


def max_digits_valid(lo: mpq, hi: mpq) -> int:
    """Largest d >= 0 with hi - lo <= 10^-d, exactly; _EXACT when lo == hi."""
    w = hi - lo
    if w < 0:
        raise ValueError("interval endpoints out of order")
    if w == 0:
        return _EXACT
    p, q = w.numerator, w.denominator
    if p > q:
        raise ValueError("interval wider than 1, no digits are valid")
    # q // p has d+1 decimal digits up to the floor boundary; fix up exactly.
    d = max((q // p).num_digits(10) - 1, 0)
    while d > 0 and p * _pow10(d) > q:
        d -= 1
    while p * _pow10(d + 1) <= q:
        d += 1
    return d


@dataclass(frozen=True)
class RationalInterval:
    """Exact rational enclosure [lo, hi] with hi - lo <= 10^-digits_valid."""

    lo: mpq
    hi: mpq
    digits_valid: int

    def __post_init__(self):
        object.__setattr__(self, "lo", mpq(self.lo))
        object.__setattr__(self, "hi", mpq(self.hi))
        if self.lo > self.hi:
            raise ValueError("interval endpoints out of order")
        if self.digits_valid < 0:
            raise ValueError("digits_valid must be nonnegative")
        w = self.hi - self.lo
        if w != 0 and self.digits_valid != _EXACT:
            if w.numerator * _pow10(self.digits_valid) > w.denominator:
                raise ValueError("width exceeds 10^-digits_valid")

    @property
    def width(self) -> mpq:
        return self.hi - self.lo

    @property
    def midpoint(self) -> mpq:
        return (self.lo + self.hi) / 2

    def contains(self, value) -> bool:
        return self.lo <= mpq(value) <= self.hi

    def contains_interval(self, other: "RationalInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


def _split(x2: mpz, lo: int, hi: int) -> tuple[mpz, mpz, mpz]:
    """Exact (P, Q, T) for terms n in [lo, hi) of sum_n x^-2n / (2n+1).

    P = x^(2(hi-lo)), Q = prod (2n+1), and the range sum relative to its
    first term's power satisfies

        sum_{n in [lo, hi)} x^-2(n-lo) / (2n+1) = T / (x^(2(hi-1-lo)) * Q).
    """
    if hi - lo <= _BASE_SPAN:
        P, Q, T = mpz(1), mpz(1), mpz(0)
        for n in range(lo, hi):
            odd = 2 * n + 1
            T = T * x2 * odd + Q
            Q = Q * odd
            P = P * x2
        return P, Q, T
    mid = (lo + hi) // 2
    P1, Q1, T1 = _split(x2, lo, mid)
    P2, Q2, T2 = _split(x2, mid, hi)
    return P1 * P2, Q1 * Q2, T1 * P2 * Q2 + T2 * Q1


def _atanh_units(x: int, scale: int) -> tuple[mpz, int]:
    """(V, slack) with 10^scale * atanh(1/x) in [V, V + slack], slack = 2."""
    x = int(x)
    if x < 2:
        raise ValueError("series argument must be an integer >= 2")
    # Choose N from a float estimate, then certify the tail bound exactly:
    # x^(2N+1) >= 2 * 10^(scale+2) forces R_N < 10^-(scale+2).
    n_terms = int((scale + 2) * math.log(10) / (2 * math.log(x))) + 2
    x2 = mpz(x) * x
    P, Q, T = _split(x2, 0, n_terms)
    target = 2 * _pow10(scale + 2)
    while P * x < target:  # never in practice; exact rigor backstop
        P2, Q2, T2 = _split(x2, n_terms, n_terms + _BASE_SPAN)
        P, Q, T = P * P2, Q * Q2, T * P2 * Q2 + T2 * Q
        n_terms += _BASE_SPAN
    den = (P // x) * Q
    V = (T * _pow10(scale)) // den
    # truncated sum in [V, V+1) units, tail under 0.01 units
    return V, 2


def _interval_from_units(lo_u: mpz, hi_u: mpz, scale: int, digits: int) -> RationalInterval:
    lo = mpq(lo_u, _pow10(scale))
    hi = mpq(hi_u, _pow10(scale))
    dv = max_digits_valid(lo, hi)
    if dv < digits:
        raise AssertionError("enclosure failed to reach the requested width")
    return RationalInterval(lo, hi, dv)


def compute_log2(digits: int, method: str = "auto", ceiling: int | None = None) -> RationalInterval:
    """Certified enclosure of log 2 with width at most 10^-digits.

    method: "atanh" for 2*atanh(1/3), "machin" for the three-term
    combination, "auto" to switch on FAST_PATH_DIGITS.
    """
    digits = int(digits)
    if digits < 1:
        raise ValueError("digits must be positive")
    _check_budget(digits, ceiling)
    if method == "auto":
        method = "machin" if digits >= FAST_PATH_DIGITS else "atanh"
    scale = digits + 3
    if method == "atanh":
        V, slack = _atanh_units(3, scale)
        lo_u, hi_u = 2 * V, 2 * (V + slack)
    elif method == "machin":
        lo_u, hi_u = mpz(0), mpz(0)
        for coeff, x in _MACHIN_TERMS:
            V, slack = _atanh_units(x, scale)
            if coeff > 0:
                lo_u += coeff * V
                hi_u += coeff * (V + slack)
            else:
                lo_u += coeff * (V + slack)
                hi_u += coeff * V
    else:
        raise ValueError(f"unknown method {method!r}")
    return _interval_from_units(lo_u, hi_u, scale, digits)


def compute_log_ratio(t: int, digits: int, ceiling: int | None = None) -> RationalInterval:
    """Certified enclosure of log(1 + 1/t) = 2*atanh(1/(2t+1)) for integer t >= 1."""
    t = int(t)
    if t < 1:
        raise ValueError("t must be a positive integer")
    digits = int(digits)
    if digits < 1:
        raise ValueError("digits must be positive")
    _check_budget(digits, ceiling)
    scale = digits + 3
    V, slack = _atanh_units(2 * t + 1, scale)
    return _interval_from_units(2 * V, 2 * (V + slack), scale, digits)


def scale_interval(iv: RationalInterval, denominator: int) -> RationalInterval:
    """Exact division of an enclosure by a positive integer; width only shrinks."""
    denominator = mpz(denominator)
    if denominator <= 0:
        raise ValueError("denominator must be positive")
    lo = iv.lo / denominator
    hi = iv.hi / denominator
    return RationalInterval(lo, hi, max_digits_valid(lo, hi))


def interval_digit_string(iv: RationalInterval, digits: int) -> str:
    """First `digits` fractional digits of the interval midpoint, truncated.

    Values handled here all lie in [0, 1), so the integer part is 0 and is
    not stored.
    """
    if digits < 1:
        raise ValueError("digits must be positive")
    mid = iv.midpoint
    if mid < 0 or mid >= 1:
        raise ValueError("constant outside [0, 1) cannot be cached")
    n = (mid.numerator * _pow10(digits)) // mid.denominator
    s = n.digits(10)
    return "0" * (digits - len(s)) + s


def write_digit_file(path, constant: str, iv: RationalInterval, digits: int | None = None) -> str:
    """Write `constant=<id> digits=<d>` plus the midpoint's digit string.

    Returns the sha256 hex digest of the written bytes.  The stored digit
    string is exact, so a re-read reproduces the stored midpoint exactly.
    """
    d = iv.digits_valid if digits is None else int(digits)
    if d > iv.digits_valid:
        raise ValueError("cannot store more digits than are certified")
    if d >= _EXACT:
        raise ValueError("pass an explicit digit count for a degenerate interval")
    body = interval_digit_string(iv, d)
    lines = [f"constant={constant} digits={d}"]
    lines.extend(body[i : i + _WRAP] for i in range(0, len(body), _WRAP))
    data = ("\n".join(lines) + "\n").encode("ascii")
    with open(path, "wb") as fh:
        fh.write(data)
    return hashlib.sha256(data).hexdigest()


def read_digit_file(path) -> tuple[str, int, RationalInterval]:
    """Parse a digit cache file back into (constant id, digits, enclosure).

    The reconstructed interval is the stored value v plus/minus 2*10^-d,
    which provably contains the original constant and has midpoint exactly
    v; its digits_valid is d - 1.
    """
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        body = "".join(line.strip() for line in fh)
    fields = dict(part.split("=", 1) for part in header.split())
    if "constant" not in fields or "digits" not in fields:
        raise ValueError(f"malformed digit file header: {header!r}")
    d = int(fields["digits"])
    if len(body) != d or not body.isdigit():
        raise ValueError("digit payload does not match the declared count")
    n = mpz(body)
    den = _pow10(d)
    v = mpq(n, den)
    margin = mpq(2, den)
    lo = v - margin
    if lo < 0:
        lo = mpq(0)
    return fields["constant"], d, RationalInterval(lo, v + margin, d - 1)
