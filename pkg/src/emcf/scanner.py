"""Convergent scan for the certified lower-bound search.

The scan walks the certified partial quotients of (log 2)/(2N) and looks
for an even index j whose convergent denominator q_j survives four gates:

    (a) j is even,
    (b) the next partial quotient a_{j+1} is at least 180N - 2,
    (c) gcd(q_j, 6) = 1,
    (d) for every tracked prime p dividing q_j, the valuation nu_p(q_j)
        equals fermat_order(p) + nu_p(N) + 1 exactly.

Every j passing (a) through (c) becomes a candidate row in the report,
tagged with its smallest (d)-violating prime if one exists among the
tracked set; the first violation-free candidate is accepted and yields
the bound m > q_j / 2.  Tracked primes come from the arithmetic module's
truncated profile set, which only weakens (d), so an accepted row's bound
remains valid.

Residues run through a single combined modulus (6 times the product of
all tracking moduli p^(e_p+1)) so the walk costs one mulmod per term;
per-prime residues are split out only at candidate indices.  Magnitudes
ride the 128-bit float recurrence described in the cf engine.  All
reported numbers are floor-rounded decimal strings, keeping published
bounds valid lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from . import arithmetic, cfengine, logcomp

__all__ = [
    "ScanConfig",
    "ConditionReport",
    "TableRow",
    "ScanResult",
    "run_scan",
    "check_conditions",
    "bound_from_row",
    "bound_mantissa_exponent",
]

_MAG_PRECISION = 128


@dataclass(frozen=True)
class ScanConfig:
    N: int
    digit_budget: int
    prime_bound: int = 100_000
    threshold: int = -1  # always 180 N - 2; derived when left at the sentinel

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be a positive integer")
        if self.digit_budget < 1:
            raise ValueError("digit_budget must be positive")
        if self.prime_bound < 5:
            raise ValueError("prime_bound must be at least 5")
        want = 180 * self.N - 2
        if self.threshold == -1:
            object.__setattr__(self, "threshold", want)
        elif self.threshold != want:
            raise ValueError("threshold must equal 180 N - 2")


@dataclass(frozen=True)
class ConditionReport:
    j: int
    even_ok: bool
    quotient_ok: bool
    coprime6_ok: bool
    # (p, observed class) pairs, violations only; class "e" is an exact
    # valuation, ">=e" means the tracking modulus divides the residue.
    order_violations: tuple[tuple[int, str], ...]

    @property
    def all_ok(self) -> bool:
        return (
            self.even_ok
            and self.quotient_ok
            and self.coprime6_ok
            and not self.order_violations
        )


@dataclass(frozen=True)
class TableRow:
    N: int
    j: int
    a_next: int
    q_mantissa: str  # in [1, 10) truncated to six decimal places
    q_exponent: int
    q_mod6: int  # +1 or -1
    violating_prime: int | None

    def __post_init__(self):
        if self.q_mod6 not in (1, -1):
            raise ValueError("q_mod6 must be +1 or -1")


@dataclass(frozen=True)
class ScanResult:
    config: ScanConfig
    candidates: tuple[TableRow, ...]
    accepted: TableRow | None
    log10_m_bound: str | None
    exhausted: bool
    reason: str = ""

    @property
    def status(self) -> str:
        return "accepted" if self.accepted is not None else "budget_exhausted"


def _nu_class(residue, p: int, e_p: int) -> str:
    """Observed valuation class of q_j at p from q_j mod p^(e_p+1)."""
    if residue == 0:
        return f">={e_p + 1}"
    e = 0
    r = residue
    while r % p == 0:
        r //= p
        e += 1
    return str(e)


def check_conditions(state, a_next: int, cfg: ScanConfig, profiles) -> ConditionReport:
    """Evaluate gates (a) through (d) on one tracker state.

    The state must carry residues for 6 and for every profile's tracking
    modulus.
    """
    res = state.residues
    if 6 not in res:
        raise KeyError("tracker state lacks the modulus 6")
    even_ok = state.j % 2 == 0
    quotient_ok = a_next >= cfg.threshold
    r6 = res[6][0]
    coprime6_ok = math.gcd(r6, 6) == 1
    violations = []
    for pr in profiles:
        if pr.tracking_modulus not in res:
            raise KeyError(f"tracker state lacks the modulus {pr.tracking_modulus}")
        rp = res[pr.tracking_modulus][0]
        if rp % pr.p == 0:
            cls = _nu_class(rp, pr.p, pr.required_order)
            if cls != str(pr.required_order):
                violations.append((pr.p, cls))
    return ConditionReport(
        j=state.j,
        even_ok=even_ok,
        quotient_ok=quotient_ok,
        coprime6_ok=coprime6_ok,
        order_violations=tuple(sorted(violations)),
    )


def _mantissa_exponent(q: mpfr) -> tuple[str, int]:
    ds, exp, _ = q.digits(10)
    ds = ds + "0" * 7
    return ds[0] + "." + ds[1:7], exp - 1


def _floor6(x: mpfr) -> str:
    units = mpz(gmpy2.floor(x * 1_000_000))
    sign = "-" if units < 0 else ""
    whole, frac = divmod(abs(units), 1_000_000)
    return f"{sign}{whole}.{str(frac).zfill(6)}"


def _mantissa_value(mantissa: str) -> mpq:
    return mpq(mpz(mantissa.replace(".", "")), 1_000_000)


def bound_mantissa_exponent(row: TableRow) -> tuple[str, int]:
    """The bound q_j/2 in normalized mantissa/exponent form, floor-rounded."""
    m = _mantissa_value(row.q_mantissa) / 2
    exp = row.q_exponent
    if m < 1:
        m *= 10
        exp -= 1
    units = (m.numerator * 1_000_000) // m.denominator
    return f"{str(units)[0]}.{str(units)[1:7]}", exp


def bound_from_row(row: TableRow) -> str:
    """log10(q_j / 2) as a decimal string, floor-rounded in the sixth place."""
    with gmpy2.context(precision=128):
        frac = gmpy2.log10(mpfr(_mantissa_value(row.q_mantissa) / 2))
        return _floor6(mpfr(row.q_exponent) + frac)


def run_scan(
    cfg: ScanConfig,
    *,
    interval: "logcomp.RationalInterval | None" = None,
    quotients: "cfengine.PartialQuotients | None" = None,
    cf_method: str = "auto",
    ceiling: int | None = None,
    progress=None,
) -> ScanResult:
    """Walk certified convergents of (log 2)/(2N) and apply the four gates.

    interval/quotients allow a caller to inject cached artifacts; when
    absent they are computed from cfg.digit_budget.  A scan whose certified
    prefix ends before any acceptance returns its partial candidate list
    with exhausted set, as does a digit budget above the memory ceiling.
    """
    profiles = arithmetic.prime_set(cfg.N, cfg.prime_bound)
    try:
        if quotients is None:
            if interval is None:
                interval = logcomp.compute_log2(cfg.digit_budget, ceiling=ceiling)
            scaled = logcomp.scale_interval(interval, 2 * cfg.N)
            quotients = cfengine.cf_certified(scaled, method=cf_method)
    except logcomp.DigitBudgetError as exc:
        return ScanResult(cfg, (), None, None, True, f"digit budget rejected: {exc}")
    except cfengine.EmptyCertificationError as exc:
        return ScanResult(cfg, (), None, None, True, f"no certified terms: {exc}")

    terms = quotients.terms[: quotients.certified_count]
    candidates: list[TableRow] = []
    accepted: TableRow | None = None

    mc = mpz(1)
    for pr in profiles:
        mc *= pr.tracking_modulus
    track_combined = mc > 1

    with gmpy2.context(precision=_MAG_PRECISION):
        q, qp = mpfr(1), mpfr(0)
        r6, r6p = 1, 0
        R, Rp = mpz(1) % mc if track_combined else mpz(0), mpz(0)
        limit = len(terms) - 1  # a_{j+1} must be certified too
        j = 0
        while j < limit:
            if j % 2 == 0:
                a_next = terms[j + 1]
                if a_next >= cfg.threshold and r6 in (1, 5):
                    violations = []
                    if track_combined:
                        for pr in profiles:
                            rp = R % pr.tracking_modulus
                            if rp % pr.p == 0 or rp == 0:
                                cls = _nu_class(rp, pr.p, pr.required_order)
                                if cls != str(pr.required_order):
                                    violations.append((pr.p, cls))
                    mant, expo = _mantissa_exponent(q)
                    row = TableRow(
                        N=cfg.N,
                        j=j,
                        a_next=int(a_next),
                        q_mantissa=mant,
                        q_exponent=expo,
                        q_mod6=1 if r6 == 1 else -1,
                        violating_prime=min(v[0] for v in violations) if violations else None,
                    )
                    candidates.append(row)
                    if not violations:
                        accepted = row
                        break
            j += 1
            a = terms[j]
            q, qp = a * q + qp, q
            r6, r6p = (a * r6 + r6p) % 6, r6
            if track_combined:
                R, Rp = (a * R + Rp) % mc, R
            if progress is not None and j % 100_000 == 0:
                progress(j, limit)

    if accepted is not None:
        return ScanResult(cfg, tuple(candidates), accepted, bound_from_row(accepted), False)
    return ScanResult(
        cfg,
        tuple(candidates),
        None,
        None,
        True,
        "certified prefix exhausted before an accepted row",
    )
