"""Certified continued fractions of exact rationals and rational intervals.

Every value here is nonnegative and every expansion is the canonical one
that plain Euclid produces (final term >= 2 except for integer values, no
trailing 1).  Certification rests on one fact about cylinder sets: the
reals whose canonical expansion starts with a fixed prefix form an
interval.  If both endpoints of [lo, hi] expand with a common prefix, so
does every value in between, closed endpoints included.  The certified
extraction therefore steps the two endpoint expansions in lockstep and
emits terms while they agree.

The subquadratic path reduces a pair (a, b) through its top bits: with
A = a >> h and B = b >> h, the value a/b lies in [A/(B+1), (A+1)/B], so a
common prefix of that half-size corner interval is a correct prefix for
a/b.  The prefix's continuant matrix M (det +-1) strips it off exactly,

    (a', b') = det * (M11*a - M01*b,  M00*b - M10*a),

and the reduction recurses on what remains.  Applied to an interval the
same corner widening uses lo's lower corner and hi's upper corner.  A
quadratic reference path runs the lockstep division loop directly; the two
paths must produce identical term sequences and are cross-checked in the
test suite on thousands of random rationals.

Convergent denominators follow q_j = a_j q_{j-1} + q_{j-2} with q_0 = 1,
q_{-1} = 0.  The streaming tracker carries the magnitude of q_j as a
128-bit float recurrence (relative drift at step j is below j * 2^-126,
far inside the documented 1e-8 * j envelope) together with exact residues
modulo a caller-chosen set of small moduli.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Iterator

import gmpy2
from gmpy2 import mpfr, mpq, mpz

__all__ = [
    "EmptyCertificationError",
    "PartialQuotients",
    "ConvergentTracker",
    "cf_certified",
    "cf_fast",
    "cf_quadratic",
    "stream_convergents",
    "reconstruct_exact",
    "write_cf_file",
    "read_cf_file",
]

# Below this operand size the lockstep division loop beats the recursion.
_FAST_CUTOFF_BITS = 4096

_MAG_PRECISION = 128


class EmptyCertificationError(ValueError):
    """Interval endpoints disagree before a single term can be certified."""


@dataclass(frozen=True)
class PartialQuotients:
    """Terms a_0, a_1, ... with a count of how many are certified."""

    terms: tuple[int, ...]
    certified_count: int

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(int(t) for t in self.terms))
        if self.terms and self.terms[0] < 0:
            raise ValueError("a_0 must be nonnegative")
        if any(t < 1 for t in self.terms[1:]):
            raise ValueError("partial quotients beyond a_0 must be >= 1")
        if not 0 <= self.certified_count <= len(self.terms):
            raise ValueError("certified_count out of range")


def _as_pair(value) -> tuple[mpz, mpz]:
    q = mpq(value)
    if q < 0:
        raise ValueError("only nonnegative values have canonical expansions here")
    return mpz(q.numerator), mpz(q.denominator)


def _lockstep(la, lb, ha, hb, out: list, budget: int | None):
    """Synchronized canonical division steps; stops on disagreement or a
    terminating endpoint.  Returns the reduced pairs, orientation preserved
    (first pair is the lower endpoint of the remaining interval)."""
    while (budget is None or len(out) < budget) and lb and hb:
        t = la // lb
        if t != ha // hb:
            break
        out.append(int(t))
        la, lb = lb, la - t * lb
        ha, hb = hb, ha - t * hb
        # reciprocals reverse the interval
        la, lb, ha, hb = ha, hb, la, lb
    return la, lb, ha, hb


def _matmul(m, s):
    m00, m01, m10, m11 = m
    s00, s01, s10, s11 = s
    return (
        m00 * s00 + m01 * s10,
        m00 * s01 + m01 * s11,
        m10 * s00 + m11 * s10,
        m10 * s01 + m11 * s11,
    )


def _terms_matrix(ts) -> tuple[mpz, mpz, mpz, mpz]:
    m00, m01, m10, m11 = mpz(1), mpz(0), mpz(0), mpz(1)
    for t in ts:
        m00, m01, m10, m11 = m00 * t + m01, m00, m10 * t + m11, m10
    return m00, m01, m10, m11


def _strip(m, k, a, b):
    """Remove a length-k prefix with continuant matrix m from the pair (a, b)."""
    m00, m01, m10, m11 = m
    if k % 2 == 0:
        return m11 * a - m01 * b, m00 * b - m10 * a
    return m01 * b - m11 * a, m10 * a - m00 * b


def _icf(la, lb, ha, hb, budget, want_matrix=True):
    """Common canonical prefix of every value in [la/lb, ha/hb].

    Returns (terms, matrix); matrix is the continuant product of terms when
    want_matrix is set, otherwise the identity placeholder.
    """
    terms: list[int] = []
    mat = (mpz(1), mpz(0), mpz(0), mpz(1))
    while (budget is None or len(terms) < budget) and lb and hb:
        nbits = max(la.bit_length(), lb.bit_length(), ha.bit_length(), hb.bit_length())
        if nbits <= _FAST_CUTOFF_BITS:
            start = len(terms)
            la, lb, ha, hb = _lockstep(la, lb, ha, hb, terms, budget)
            if want_matrix and len(terms) > start:
                sub = _terms_matrix(terms[start:])
                mat = _matmul(mat, sub)
            break
        h = nbits // 2
        A_lo, B_lo = la >> h, lb >> h
        A_hi, B_hi = ha >> h, hb >> h
        sub_terms = None
        if B_lo and B_hi and A_lo:
            sub_terms, sm = _icf(A_lo, B_lo + 1, A_hi + 1, B_hi, None if budget is None else budget - len(terms))
        if not sub_terms:
            # truncation gave nothing; one full-size division step
            t = la // lb
            if t != ha // hb:
                break
            terms.append(int(t))
            if want_matrix:
                m00, m01, m10, m11 = mat
                mat = (m00 * t + m01, m00, m10 * t + m11, m10)
            la, lb = lb, la - t * lb
            ha, hb = hb, ha - t * hb
            la, lb, ha, hb = ha, hb, la, lb
            continue
        k = len(sub_terms)
        la, lb = _strip(sm, k, la, lb)
        ha, hb = _strip(sm, k, ha, hb)
        if k % 2 == 1:
            la, lb, ha, hb = ha, hb, la, lb
        if la < 0 or lb < 0 or ha < 0 or hb < 0:
            raise AssertionError("prefix strip produced a negative remainder")
        terms.extend(sub_terms)
        if want_matrix:
            mat = _matmul(mat, sm)
    return terms, mat


def _ecf(a, b, budget):
    """Canonical expansion of the exact rational a/b via corner reduction."""
    terms: list[int] = []
    while (budget is None or len(terms) < budget) and b:
        nbits = max(a.bit_length(), b.bit_length())
        if nbits <= _FAST_CUTOFF_BITS:
            while (budget is None or len(terms) < budget) and b:
                t = a // b
                terms.append(int(t))
                a, b = b, a - t * b
            break
        h = nbits // 2
        A, B = a >> h, b >> h
        sub_terms = None
        if A and B:
            sub_terms, sm = _icf(A, B + 1, A + 1, B, None if budget is None else budget - len(terms))
        if not sub_terms:
            t = a // b
            terms.append(int(t))
            a, b = b, a - t * b
            continue
        a, b = _strip(sm, len(sub_terms), a, b)
        if a < 0 or b < 0:
            raise AssertionError("prefix strip produced a negative remainder")
        terms.extend(sub_terms)
    return terms


def cf_quadratic(value, max_terms: int | None = None) -> PartialQuotients:
    """Plain Euclid expansion of an exact nonnegative rational."""
    a, b = _as_pair(value)
    terms: list[int] = []
    while (max_terms is None or len(terms) < max_terms) and b:
        t = a // b
        terms.append(int(t))
        a, b = b, a - t * b
    return PartialQuotients(tuple(terms), len(terms))


def cf_fast(value, max_terms: int | None = None) -> PartialQuotients:
    """Divide-and-conquer expansion; term-for-term equal to cf_quadratic."""
    a, b = _as_pair(value)
    terms = _ecf(a, b, max_terms)
    return PartialQuotients(tuple(terms), len(terms))


def cf_certified(iv, max_terms: int | None = None, method: str = "auto") -> PartialQuotients:
    """Terms shared by every value in the enclosure, one-term margin removed.

    A degenerate enclosure (lo == hi) is an exact rational and certifies its
    whole expansion with no margin.  Raises EmptyCertificationError when the
    margin leaves nothing.
    """
    if iv.lo < 0:
        raise ValueError("enclosure must be nonnegative")
    if method not in ("auto", "quadratic", "hgcd"):
        raise ValueError(f"unknown method {method!r}")
    if iv.lo == iv.hi:
        if method == "quadratic":
            return cf_quadratic(iv.lo, max_terms)
        return cf_fast(iv.lo, max_terms)
    la, lb = _as_pair(iv.lo)
    ha, hb = _as_pair(iv.hi)
    if method == "auto":
        bits = max(lb.bit_length(), hb.bit_length())
        method = "hgcd" if bits > 4 * _FAST_CUTOFF_BITS else "quadratic"
    budget = None if max_terms is None else max_terms + 1
    if method == "quadratic":
        common: list[int] = []
        _lockstep(la, lb, ha, hb, common, budget)
    else:
        common, _ = _icf(la, lb, ha, hb, budget, want_matrix=False)
    certified = len(common) - 1
    if max_terms is not None:
        certified = min(certified, max_terms)
    if certified <= 0:
        raise EmptyCertificationError(
            "endpoint expansions agree on no term beyond the safety margin"
        )
    return PartialQuotients(tuple(common[:certified]), certified)


@dataclass(frozen=True)
class ConvergentTracker:
    """State of the denominator recurrence after consuming term a_j."""

    j: int
    term: int
    q_mag: tuple[float, int]
    q_prev_mag: tuple[float, int]
    residues: dict[int, tuple[int, int]]

    @property
    def parity_even(self) -> bool:
        return self.j % 2 == 0


def _mag(x: mpfr) -> tuple[float, int]:
    if x == 0:
        return 0.0, 0
    ds, exp, _ = x.digits(10)
    mant = float(int(ds[:15])) / 10.0 ** (min(len(ds), 15) - 1)
    return mant, exp - 1


def stream_convergents(terms: Iterable[int], moduli: Iterable[int] = ()) -> Iterator[ConvergentTracker]:
    """Yield one tracker state per index j = 0, 1, ... as terms are consumed.

    Residues are exact; magnitudes come from the 128-bit float recurrence.
    Intended for inspection and tests; the scanner runs its own fused loop
    over the same recurrence.
    """
    mods = [int(m) for m in moduli]
    if any(m < 2 for m in mods):
        raise ValueError("moduli must be >= 2")
    with gmpy2.context(precision=_MAG_PRECISION):
        q, qp = mpfr(1), mpfr(0)
        res = {m: (1 % m, 0) for m in mods}
        for j, a in enumerate(terms):
            a = int(a)
            if j == 0:
                if a < 0:
                    raise ValueError("a_0 must be nonnegative")
            elif a < 1:
                raise ValueError("partial quotients beyond a_0 must be >= 1")
            if j > 0:
                q, qp = a * q + qp, q
                res = {m: ((a * r[0] + r[1]) % m, r[0]) for m, r in res.items()}
            yield ConvergentTracker(
                j=j,
                term=a,
                q_mag=_mag(q),
                q_prev_mag=_mag(qp),
                residues=res,
            )


def reconstruct_exact(terms, j: int) -> tuple[mpz, mpz]:
    """Exact convergent (p_j, q_j) by the three-term recurrence.

    Cost grows quadratically with j; meant for spot checks at j up to ~10^4.
    """
    seq = list(terms[: j + 1]) if hasattr(terms, "__getitem__") else None
    if seq is None or len(seq) < j + 1:
        raise ValueError("need terms a_0 .. a_j")
    p, pp = mpz(seq[0]), mpz(1)
    q, qp = mpz(1), mpz(0)
    for a in seq[1:]:
        p, pp = a * p + pp, p
        q, qp = a * q + qp, q
    return p, q


def write_cf_file(path, constant: str, pq: PartialQuotients) -> str:
    """Write `cf constant=<id> certified=<count>` plus one term per line.

    Returns the sha256 hex digest of the written bytes.
    """
    lines = [f"cf constant={constant} certified={pq.certified_count}"]
    lines.extend(str(t) for t in pq.terms)
    data = ("\n".join(lines) + "\n").encode("ascii")
    with open(path, "wb") as fh:
        fh.write(data)
    return hashlib.sha256(data).hexdigest()


def read_cf_file(path) -> tuple[str, PartialQuotients]:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        terms = [int(line) for line in fh if line.strip()]
    parts = header.split()
    if len(parts) != 3 or parts[0] != "cf":
        raise ValueError(f"malformed cf file header: {header!r}")
    fields = dict(part.split("=", 1) for part in parts[1:])
    certified = int(fields["certified"])
    return fields["constant"], PartialQuotients(tuple(terms), certified)
