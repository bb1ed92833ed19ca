"""Named self-checks behind `emcf verify`.

Every check is a small pure function registered with a suite tag and a
level.  The quick level exercises each module on desk-scale inputs and
finishes in well under a minute; full adds the medium reference rows,
the large-bound emission, the digit-ratio diagnostics, and the cache
integrity drills.  Checks never share mutable state, so a filtered run
behaves the same as a complete one.
"""

from __future__ import annotations

import math
import random
import shutil
import tempfile
import time
import warnings
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from . import arithmetic, asymptotics, cfengine, logcomp, omega, scanner
from .cache import ArtifactCache, CacheCorruptionError

__all__ = [
    "CheckResult",
    "REFERENCE_ROWS",
    "available_suites",
    "run_checks",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    suite: str
    ok: bool
    detail: str
    seconds: float


# Reference scan rows: N -> (digit budget, j, a_{j+1}, mantissa, exponent,
# q_j mod 6, violating prime or None).  The desk-scale entries are cheap
# enough for self-checks; the last two need roughly 1.3e5 digits.
REFERENCE_ROWS = {
    1: (800, 642, 764, "2.383153", 330, -1, 149),
    2: (800, 664, 1529, "2.383153", 330, -1, 149),
    4: (2000, 1254, 21966, "1.132014", 638, 1, 5),
    8: (2000, 1264, 43933, "1.132014", 638, 1, 5),
    16: (2000, 1280, 87866, "1.132014", 638, 1, 5),
    32: (2000, 1294, 175733, "1.132014", 638, 1, 5),
    64: (10_000, 8950, 26416, "3.458446", 4589, -1, None),
    128: (10_000, 8926, 52834, "3.458446", 4589, -1, None),
    256: (130_000, 119476, 122799, "1.374540", 61317, 1, None),
    768: (130_000, 119008, 368398, "1.374540", 61317, 1, None),
}

_REGISTRY: list[tuple[str, str, str, object]] = []


def _check(name: str, suite: str, level: str = "quick"):
    def deco(fn):
        _REGISTRY.append((name, suite, level, fn))
        return fn

    return deco


def available_suites() -> list[str]:
    seen = []
    for _, suite, _, _ in _REGISTRY:
        if suite not in seen:
            seen.append(suite)
    return seen


def run_checks(level: str = "quick", suites=None, progress=None) -> list[CheckResult]:
    """Run registered checks; full implies quick.  Stops nothing on failure."""
    if level not in ("quick", "full"):
        raise ValueError(f"unknown level {level!r}")
    wanted = set(suites) if suites else None
    if wanted is not None:
        unknown = wanted - set(available_suites())
        if unknown:
            raise ValueError(f"unknown suite(s): {', '.join(sorted(unknown))}")
    results = []
    for name, suite, lvl, fn in _REGISTRY:
        if lvl == "full" and level != "full":
            continue
        if wanted is not None and suite not in wanted:
            continue
        start = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        res = CheckResult(name, suite, bool(ok), str(detail), time.perf_counter() - start)
        results.append(res)
        if progress is not None:
            progress(res)
    return results


def _scan_reference(N: int, budget=None, prime_bound: int = 100_000):
    stored = REFERENCE_ROWS[N]
    cfg = scanner.ScanConfig(N=N, digit_budget=budget or stored[0], prime_bound=prime_bound)
    return scanner.run_scan(cfg), stored


def _row_matches(row, stored) -> tuple[bool, str]:
    _, j, a_next, mant, expo, mod6, prime = stored
    got = (row.j, row.a_next, row.q_mantissa, row.q_exponent, row.q_mod6, row.violating_prime)
    want = (j, a_next, mant, expo, mod6, prime)
    if got == want:
        return True, f"j={row.j} a={row.a_next} q={row.q_mantissa}e{row.q_exponent}"
    return False, f"got {got}, want {want}"


# ---------------------------------------------------------------------------
# suite: logcomp


@_check("log2-digit-reference", "logcomp")
def _chk_log2_digits():
    iv = logcomp.compute_log2(60)
    got = logcomp.interval_digit_string(iv, 50)
    want = "69314718055994530941723212145817656807550013436025"
    return got == want, got


@_check("log2-interval-nesting", "logcomp")
def _chk_log2_nesting():
    coarse = logcomp.compute_log2(100)
    fine = logcomp.compute_log2(300)
    ok = coarse.contains_interval(fine)
    return ok, f"widths {float(coarse.width):.2e} contains {float(fine.width):.2e}"


@_check("log2-width-certificate", "logcomp")
def _chk_log2_width():
    for digits in (50, 500, 1500):
        iv = logcomp.compute_log2(digits)
        if iv.digits_valid < digits:
            return False, f"digits_valid {iv.digits_valid} < requested {digits}"
        if iv.width * mpz(10) ** iv.digits_valid > 1:
            return False, f"width exceeds certificate at {digits}"
    return True, "width <= 10^-digits_valid at 50/500/1500"


@_check("log2-two-series-agree", "logcomp")
def _chk_log2_two_series():
    a = logcomp.compute_log2(1000, method="atanh")
    b = logcomp.compute_log2(1000, method="machin")
    overlap = max(a.lo, b.lo) <= min(a.hi, b.hi)
    gap = abs(a.midpoint - b.midpoint)
    ok = overlap and gap * mpz(10) ** 999 < 1
    return ok, f"midpoint gap < 1e-999: {ok}"


@_check("log2-digit-file-roundtrip", "logcomp")
def _chk_digit_roundtrip():
    tmp = Path(tempfile.mkdtemp())
    try:
        iv = logcomp.compute_log2(200)
        logcomp.write_digit_file(tmp / "d.txt", "log2", iv)
        constant, digits, back = logcomp.read_digit_file(tmp / "d.txt")
        ok = constant == "log2" and digits == iv.digits_valid and back.contains_interval(iv)
        return ok, f"reread {digits} digits, containment {ok}"
    finally:
        shutil.rmtree(tmp)


@_check("log2-budget-guard", "logcomp")
def _chk_budget_guard():
    try:
        logcomp.compute_log2(10**9, ceiling=10**6)
    except logcomp.DigitBudgetError as exc:
        return True, str(exc)[:70]
    return False, "no DigitBudgetError for 1e9 digits under a 1e6 ceiling"


# ---------------------------------------------------------------------------
# suite: cfengine


@_check("cf-prefix-reference", "cfengine")
def _chk_cf_prefix():
    iv = logcomp.compute_log2(12)
    pq = cfengine.cf_certified(iv)
    want = (0, 1, 2, 3, 1, 6, 3, 1, 1, 2)
    got = pq.terms[: len(want)]
    return got == want, f"first terms {list(got)}"


@_check("cf-quadratic-vs-hgcd", "cfengine")
def _chk_cf_paths_agree():
    rng = random.Random(20240817)
    for _ in range(200):
        num = rng.randrange(1, 10**30)
        den = rng.randrange(1, 10**30)
        value = mpq(num, den)
        a = cfengine.cf_quadratic(value)
        b = cfengine.cf_fast(value)
        if a.terms != b.terms:
            return False, f"mismatch at {num}/{den}"
    return True, "200 seeded rationals, identical terms"


@_check("cf-determinant-identity", "cfengine")
def _chk_determinant():
    iv = logcomp.compute_log2(600)
    terms = cfengine.cf_certified(iv).terms[:501]
    p, pp = mpz(terms[0]), mpz(1)
    q, qp = mpz(1), mpz(0)
    sign = 1
    for a in terms[1:]:
        p, pp = a * p + pp, p
        q, qp = a * q + qp, q
        if p * qp - pp * q != sign:
            return False, f"determinant broke at a={a}"
        sign = -sign
    return True, f"p_j q_(j-1) - p_(j-1) q_j alternates +-1 through j={len(terms)-1}"


@_check("cf-residue-stream", "cfengine")
def _chk_residues():
    iv = logcomp.compute_log2(600)
    terms = cfengine.cf_certified(iv).terms[:500]
    moduli = (6, 97, 10007)
    states = {}
    for st in cfengine.stream_convergents(terms, moduli):
        if st.j in (50, 200, 499):
            states[st.j] = st
    for j, st in states.items():
        _, q = cfengine.reconstruct_exact(terms, j)
        for m in moduli:
            if st.residues[m][0] != q % m:
                return False, f"residue mod {m} wrong at j={j}"
    return True, "residues match exact reconstruction at j=50/200/499"


@_check("cf-magnitude-drift", "cfengine")
def _chk_magnitude():
    iv = logcomp.compute_log2(600)
    terms = cfengine.cf_certified(iv).terms[:500]
    last = None
    for st in cfengine.stream_convergents(terms):
        last = st
    _, q = cfengine.reconstruct_exact(terms, last.j)
    mant, expo = last.q_mag
    drift = abs(math.log10(mant) + expo - float(gmpy2.log10(mpz(q))))
    ok = drift < 1e-8 * last.j
    return ok, f"log10 drift {drift:.2e} at j={last.j}"


@_check("cf-empty-certification", "cfengine")
def _chk_empty_cert():
    wide = logcomp.RationalInterval(mpq(3, 10), mpq(7, 10), 0)
    try:
        cfengine.cf_certified(wide)
    except cfengine.EmptyCertificationError:
        return True, "wide interval rejected"
    return False, "no EmptyCertificationError for [0.3, 0.7]"


@_check("cf-file-roundtrip", "cfengine")
def _chk_cf_roundtrip():
    tmp = Path(tempfile.mkdtemp())
    try:
        iv = logcomp.compute_log2(120)
        pq = cfengine.cf_certified(iv)
        cfengine.write_cf_file(tmp / "c.txt", "log2", pq)
        constant, back = cfengine.read_cf_file(tmp / "c.txt")
        ok = constant == "log2" and back == pq
        return ok, f"{back.certified_count} certified terms round-tripped"
    finally:
        shutil.rmtree(tmp)


# ---------------------------------------------------------------------------
# suite: arithmetic


@_check("staudt-spot-values", "arithmetic")
def _chk_staudt_spots():
    cases = [((7, 6), Fraction(6, 7)), ((5, 3), Fraction(0)), ((6, 4), Fraction(1, 6))]
    for (l, r), want in cases:
        got = arithmetic.staudt_fraction(l, r)
        if got != want:
            return False, f"staudt({l},{r}) = {got}, want {want}"
    o = arithmetic.power_sum_oracle(7, 6)
    if o != 67171:
        return False, f"oracle(7,6) = {o}"
    return True, "spot identities including sum_(j<7) j^6 = 67171"


@_check("staudt-oracle-sweep", "arithmetic")
def _chk_staudt_sweep():
    for l in range(2, 61):
        for r in range(2, 13):
            frac = Fraction(arithmetic.power_sum_oracle(l, r), l)
            frac -= frac.numerator // frac.denominator
            if r % 2 == 0:
                if frac != arithmetic.staudt_fraction(l, r):
                    return False, f"even mismatch at l={l} r={r}"
            else:
                if (2 * arithmetic.power_sum_oracle(l, r)) % l != 0:
                    return False, f"odd 2S/l not integral at l={l} r={r}"
    return True, "l <= 60, r <= 12, both parities"


@_check("primitive-root-spots", "arithmetic")
def _chk_primitive_root():
    cases = [(2, True), (5, True), (7, True), (11, False), (13, False)]
    for p, want in cases:
        if arithmetic.is_primitive_root_3(p) != want:
            return False, f"is_primitive_root_3({p}) != {want}"
    return True, "orders of 3 mod 2/5/7/11/13"


@_check("fermat-order-spots", "arithmetic")
def _chk_fermat_order():
    cases = [(5, 1), (11, 2), (1006003, 2)]
    for p, want in cases:
        got = arithmetic.fermat_order(p)
        if got != want:
            return False, f"fermat_order({p}) = {got}, want {want}"
    return True, "11 and 1006003 have order 2, 5 has order 1"


@_check("prime-set-small", "arithmetic")
def _chk_prime_set():
    got = [pr.p for pr in arithmetic.prime_set(1, bound=10)]
    if got != [5, 7]:
        return False, f"P(1) up to 10 = {got}"
    if arithmetic.prime_set(2, bound=4):
        return False, "P(2) up to 4 should be empty"
    prof = {pr.p: pr for pr in arithmetic.prime_set(1, bound=200)}
    if 149 not in prof or prof[149].required_order != 2:
        return False, f"149 profile wrong: {prof.get(149)}"
    return True, "P(1) starts {5, 7}; 149 tracked at order 2"


@_check("prime-set-profile-soundness", "arithmetic")
def _chk_profile_soundness():
    for pr in arithmetic.prime_set(12, bound=500):
        divisor = (pr.p - 1) != 0 and 12 % (pr.p - 1) == 0
        proot = arithmetic.is_primitive_root_3(pr.p)
        want = "both" if divisor and proot else ("divisor_condition" if divisor else "primitive_root_3")
        if pr.reason != want or pr.fermat_order != arithmetic.fermat_order(pr.p):
            return False, f"profile for {pr.p} inconsistent"
        if pr.required_order != pr.fermat_order + pr.nu_N + 1:
            return False, f"order formula broken at {pr.p}"
        if pr.tracking_modulus != pr.p ** (pr.required_order + 1):
            return False, f"modulus wrong at {pr.p}"
    return True, "all profiles for N=12 recompute cleanly"


@_check("divisibility-constants", "arithmetic")
def _chk_constants():
    dc = arithmetic.divisibility_constants()
    n1_ok = all(dc.N1 % k == 0 for k in range(1, 201))
    n2_ok = dc.N2 > mpz(57462) * mpz(10) ** 423
    return n1_ok and n2_ok, f"N1 divisible by 1..200; N2 has {dc.N2.num_digits(10)} digits"


@_check("prime-set-large-complete", "arithmetic")
def _chk_prime_set_complete():
    dc = arithmetic.divisibility_constants()
    got = {pr.p for pr in arithmetic.prime_set(dc.N2, bound=2017)}
    want = set(arithmetic.primes_up_to(2017)) - {2, 3}
    missing = want - got
    return not missing, f"{len(got)} primes through 2017, missing {sorted(missing)[:5]}"


# ---------------------------------------------------------------------------
# suite: scanner


@_check("scan-row-1", "scanner")
def _chk_scan_row1():
    res, stored = _scan_reference(1)
    if not res.candidates:
        return False, "no candidate rows"
    return _row_matches(res.candidates[0], stored)


@_check("scan-row-2", "scanner")
def _chk_scan_row2():
    res, stored = _scan_reference(2)
    if not res.candidates:
        return False, "no candidate rows"
    return _row_matches(res.candidates[0], stored)


@_check("scan-bound-rounding", "scanner")
def _chk_bound_rounding():
    row = scanner.TableRow(N=1, j=2, a_next=400, q_mantissa="2.000000",
                           q_exponent=10, q_mod6=1, violating_prime=None)
    if scanner.bound_from_row(row) != "10.000000":
        return False, f"bound {scanner.bound_from_row(row)}"
    mant, expo = scanner.bound_mantissa_exponent(row)
    if (mant, expo) != ("1.000000", 10):
        return False, f"half-mantissa {(mant, expo)}"
    return True, "q = 2e10 halves to 1e10, log10 floor 10.000000"


@_check("scan-prime-bound-monotone", "scanner")
def _chk_prime_monotone():
    small = scanner.run_scan(scanner.ScanConfig(N=1, digit_budget=800, prime_bound=100))
    large = scanner.run_scan(scanner.ScanConfig(N=1, digit_budget=800, prime_bound=1000))
    js_small = [(r.j, r.a_next, r.q_mantissa, r.q_exponent, r.q_mod6) for r in small.candidates]
    js_large = [(r.j, r.a_next, r.q_mantissa, r.q_exponent, r.q_mod6) for r in large.candidates]
    if js_small != js_large:
        return False, "candidate rows differ between prime bounds"
    # fewer tracked primes can only hide violations, never invent them
    for s, l in zip(small.candidates, large.candidates):
        if s.violating_prime is not None and l.violating_prime is None:
            return False, f"violation at j={s.j} vanished with more primes"
    return True, f"{len(js_small)} candidate rows stable under bound 100 vs 1000"


@_check("scan-convergent-quality", "scanner")
def _chk_legendre():
    iv = logcomp.compute_log2(800)
    half = logcomp.scale_interval(iv, 2)
    terms = cfengine.cf_certified(half).terms
    for j in (642, 643, 700):
        p, q = cfengine.reconstruct_exact(terms, j)
        err_lo = half.lo - mpq(p, q)
        err_hi = half.hi - mpq(p, q)
        if j % 2 == 0:
            if not (0 < err_lo and err_hi < mpq(1, q * q)):
                return False, f"even convergent bracket failed at j={j}"
        else:
            if not (err_hi < 0 and -err_lo < mpq(1, q * q)):
                return False, f"odd convergent bracket failed at j={j}"
    return True, "|log2/2 - p_j/q_j| < 1/q_j^2 with the right sign at j=642/643/700"


@_check("scan-budget-exhaustion", "scanner")
def _chk_scan_budget():
    res = scanner.run_scan(scanner.ScanConfig(N=7_776_000, digit_budget=3_400_000_000))
    if res.status != "budget_exhausted" or "digit" not in res.reason:
        return False, f"3.4e9-digit config not rejected gracefully: {res.reason}"
    small = scanner.run_scan(scanner.ScanConfig(N=1, digit_budget=120))
    if small.status != "budget_exhausted":
        return False, "tiny budget unexpectedly accepted"
    return True, f"oversized: {res.reason[:60]}"


# ---------------------------------------------------------------------------
# suite: asymptotics


@_check("solve-small-exact", "asymptotics")
def _chk_solve_small():
    root = asymptotics.solve_k(3)
    if root.k != 1:
        return False, f"k(3) = {root.k}"
    for m in (7, 50, 1000):
        k = asymptotics.solve_k(m).k
        if not k + 2 < m < 2 * k:
            return False, f"k({m}) = {k} outside the bracket"
    gap = abs(asymptotics.solve_k(10).k - asymptotics.expansion_k(10, 3))
    if not gap < 1e-3:
        return False, f"solver vs expansion gap {gap} at m=10"
    return True, "k(3) = 1 exactly; k+2 < m < 2k at m=7/50/1000"


@_check("expansion-coefficients", "asymptotics")
def _chk_expansion_coeffs():
    want = ["0.69314718", "-1.03972077", "-0.00269758", "0.00323260", "0.00217182"]
    got = asymptotics.expansion_coefficients()
    for g, w in zip(got, want):
        if abs(g - mpfr(w)) > 5.1e-9:
            return False, f"coefficient {w} computed as {g}"
    return True, "five coefficients match to 8 places"


@_check("expansion-error-decay", "asymptotics")
def _chk_expansion_decay():
    prev = None
    ratios = []
    for i in range(6):
        m = 100 * 2**i
        err = abs(asymptotics.solve_k(m, precision=30).k - asymptotics.expansion_k(m, 3, precision=30))
        if prev is not None:
            ratios.append(float(err / prev))
        prev = err
    ok = all(1 / 32 <= r <= 1 / 8 for r in ratios)
    return ok, f"doubling ratios {[f'{r:.4f}' for r in ratios]}"


@_check("two-k-over-2m-3", "asymptotics")
def _chk_convergent_gap():
    for m in (10**5, 10**7, 10**9):
        k = asymptotics.solve_k(m, precision=30).k
        with gmpy2.context(precision=200):
            gap = gmpy2.log(2) - 2 * k / (2 * m - 3)
            cap = mpfr("0.0111") / (2 * m - 3) ** 2
            if not 0 < gap < cap:
                return False, f"gap {gap} outside (0, {cap}) at m={m}"
    return True, "0 < log2 - 2k/(2m-3) < 0.0111/(2m-3)^2 at m=1e5/1e7/1e9"


@_check("correction-window", "asymptotics")
def _chk_cm_window():
    for m in (10**9, 10**10):
        cm = asymptotics.solve_k(m, precision=30).C_m
        if not 0 < cm < mpfr("0.004"):
            return False, f"C at m={m} is {cm}"
    return True, "second-order correction inside (0, 0.004) at 1e9 and 1e10"


@_check("fm-sign-bracket", "asymptotics")
def _chk_fm():
    for m in (10**2, 10**4, 10**6):
        m2 = mpfr(m) ** -2
        m3 = mpfr(m) ** -3
        lo = asymptotics.compute_fm(m, 0)
        hi = asymptotics.compute_fm(m, mpq(4, 1000))
        if not lo > mpfr("0.005") * m2 - 100 * m3:
            return False, f"f(0) too small at m={m}"
        if not hi < mpfr("-0.00015") * m2 + 100 * m3:
            return False, f"f(0.004) too large at m={m}"
    return True, "f changes sign across the correction window at m=1e2/1e4/1e6"


@_check("sandwich-spot", "asymptotics")
def _chk_sandwich():
    for k, y in ((9, 0.5), (50, 0.99), (1000, 0.01), (12, 0.9)):
        if not asymptotics.sandwich_check(k, y):
            return False, f"sandwich failed at k={k} y={y}"
    lo, mid, hi = asymptotics.sandwich_bounds(20, mpq(1, 1000))
    width = hi - lo
    if not width < mpfr("1e-11"):
        return False, f"bracket width {width} at y=0.001"
    return True, "strict at four spots; bracket collapses as y -> 0"


@_check("series-poly-consistency", "asymptotics")
def _chk_gpoly():
    g4, g5 = asymptotics.g_poly(4), asymptotics.g_poly(5)
    k = Fraction(7)
    if g4(k) != k * (k - 2) / 8 or g5(k) != k * (5 * k - 6) / 30:
        return False, "closed forms for n=4, 5 disagree"
    # series product check at k=3 to O(y^9)
    kf = Fraction(3)
    order = 9
    binom = [Fraction(1)]
    for n in range(1, order):
        binom.append(binom[-1] * (kf - n + 1) * Fraction(-1, 1) / n)
    expk = [Fraction(1)]
    for n in range(1, order):
        expk.append(expk[-1] * kf / n)
    prod = [sum(binom[i] * expk[n - i] for i in range(n + 1)) for n in range(order)]
    want = [asymptotics.g_poly(n)(kf) for n in range(order)]
    ok = prod == want
    return ok, f"(1-y)^k e^(ky) series matches g_n through y^{order-1} at k=3"


@_check("log-ratio-coefficients", "asymptotics")
def _chk_c_coeffs():
    with gmpy2.context(precision=200):
        one = asymptotics.c_coeffs(1, precision=50)
        c = gmpy2.log(2)
        want2 = (3 * c - mpq(25, 12)) * c
        if abs(one.c0 - c) > mpfr("1e-45") or abs(one.c1 + mpq(3, 2) * c) > mpfr("1e-45"):
            return False, "t=1 low coefficients off"
        if abs(one.c2 - want2) > mpfr("1e-40"):
            return False, f"t=1 c2 = {one.c2}"
    return True, "t=1 reduces to the binary-logarithm coefficients"


@_check("generalized-ratio-window", "asymptotics")
def _chk_cft():
    for t in (1, 2, 10, 1000, 10**6):
        val = asymptotics.cft_inequality(t)
        if not mpfr("-0.22") < val < 0:
            return False, f"E({t}) = {val}"
    return True, "E(t) inside (-0.22, 0) at five spots"


@_check("power-sum-residual-bound", "asymptotics")
def _chk_delange():
    m = 100
    k = asymptotics.solve_k(m, precision=30).k
    rho, bound = asymptotics.delange_residual(m, k)
    ok = abs(rho) < bound
    return ok, f"|rho| = {float(abs(rho)):.3e} < {float(bound):.3e} at m=100"


@_check("tail-fit-recovery", "asymptotics")
def _chk_asymp_fit():
    exact = [(m, mpq(2) + mpq(5, m) + mpq(1, m * m)) for m in (40, 80, 160, 320, 640)]
    with warnings.catch_warnings():
        warnings.simplefilter("error")  # clean model must not warn
        clean = asymptotics.asymp_fit(exact, depth=2)
    if any(abs(c - w) > 1e-20 for c, w in zip(clean, (2, 5, 1))):
        return False, f"clean model not recovered exactly: {[float(c) for c in clean]}"
    tail = [(m, v - mpq(7, m**3)) for m, v in exact]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        biased = asymptotics.asymp_fit(tail, depth=2)
    if not caught:
        return False, "neglected-tail disagreement not flagged"
    ok = abs(biased[0] - 2) < 1e-12 and abs(biased[1] - 5) < 1e-12
    return ok, f"tail bias cancelled: c0 err {float(abs(biased[0] - 2)):.1e}"


# ---------------------------------------------------------------------------
# suite: omega


@_check("sylvester-prefix", "omega")
def _chk_sylvester_prefix():
    want = [2, 3, 7, 43, 1807]
    got = [omega.sylvester_exact(n) for n in range(1, 6)]
    if got != want:
        return False, f"prefix {got}"
    prod = 1
    for n in range(2, 9):
        prod *= omega.sylvester_exact(n - 1)
        if omega.sylvester_exact(n) != prod + 1:
            return False, f"product form fails at n={n}"
    return True, "2, 3, 7, 43, 1807 and the product recurrence agree"


@_check("sylvester-bracket-width", "omega")
def _chk_sylvester_width():
    for n in (12, 34, 128, 256):
        s = omega.sylvester_log10(n)
        width = s.log10_hi - s.log10_lo
        if not width <= Decimal(n) * Decimal("1e-6"):
            return False, f"width {width} at n={n}"
    import decimal

    s = omega.sylvester_log10(12)
    exact = omega.sylvester_exact(12)
    with decimal.localcontext(decimal.Context(prec=90)):
        dl = Decimal(exact).ln() / Decimal(10).ln()
    if not s.log10_lo <= dl <= s.log10_hi:
        return False, "exact log10 outside bracket at n=12"
    return True, "bracket width stays under 1e-6 * n through n=256"


@_check("sylvester-doubling", "omega")
def _chk_sylvester_doubling():
    for n in range(8, 40):
        lo_n = omega.sylvester_log10(n).log10_lo
        hi_next = omega.sylvester_log10(n + 1).log10_hi
        ratio = hi_next / lo_n
        if not Decimal("1.99") <= ratio <= Decimal("2.01"):
            return False, f"growth ratio {ratio} at n={n}"
    return True, "log10 doubles per index for n in 8..39"


@_check("omega-bound-spots", "omega")
def _chk_omega_spots():
    cases = [(Decimal("1667658416.4"), 33), (Decimal(14), 7), (Decimal("0.2"), 1)]
    for x, want in cases:
        got = omega.min_omega_from_bound(x)
        if got != want:
            return False, f"omega({x}) = {got}, want {want}"
    prev = 0
    for e in range(0, 80, 4):
        got = omega.min_omega_from_bound(Decimal(10) ** e if e else Decimal("0.5"))
        if got < prev:
            return False, f"monotonicity broke near 1e{e}"
        prev = got
    return True, "1667658416.4 -> 33; 14 -> 7; nondecreasing in the input"


@_check("omega-shortcut-consistency", "omega")
def _chk_omega_shortcut():
    # closed-form growth estimate: log10 A_n about 2^(n-7) * log10(1.066e13)
    target = Decimal("1667658416.4")
    base = Decimal("1.066e13").ln() / Decimal(10).ln()
    w = 1
    while base * (Decimal(2) ** (w + 1 - 7)) <= target:
        w += 1
    got = omega.min_omega_from_bound(target)
    return got == w, f"estimate {w} vs bracketed answer {got}"


@_check("reciprocal-sum-threshold", "omega")
def _chk_reciprocal():
    primes = arithmetic.primes_up_to(300)
    s58 = omega.reciprocal_sum_check(primes[:58])
    if not Fraction(1) < s58 < Fraction(2):
        return False, f"first 58 sum to {float(s58):.6f}"
    n = 1
    while omega.reciprocal_sum_check(primes[:n]) < 2:
        n += 1
    if n != 59:
        return False, f"first crossing of 2 at n={n}"
    try:
        omega.reciprocal_sum_check([5, 5])
        return False, "duplicate prime accepted"
    except ValueError:
        pass
    return True, f"sum(1/p, 58 primes) = {float(s58):.6f} < 2; crossing at 59"


# ---------------------------------------------------------------------------
# full level


@_check("table-medium-rows", "table", level="full")
def _chk_table_medium():
    for N in (64, 128, 256, 768):
        res, stored = _scan_reference(N)
        if not res.candidates:
            return False, f"no candidates for N={N}"
        ok, detail = _row_matches(res.candidates[0], stored)
        if not ok:
            return False, f"N={N}: {detail}"
        if res.accepted is None or res.accepted.j != stored[1]:
            return False, f"N={N}: first row should be accepted"
    return True, "rows 2^6, 2^7, 2^8, 2^8*3 reproduced and accepted"


@_check("large-bound-emission", "table", level="full")
def _chk_large_bound():
    res, stored = _scan_reference(256)
    if res.log10_m_bound is None:
        return False, "no bound emitted"
    bound = Decimal(res.log10_m_bound)
    if not Decimal(10**4) < bound < Decimal(stored[4] + 1):
        return False, f"bound {bound} implausible"
    mant, expo = scanner.bound_mantissa_exponent(res.accepted)
    return True, f"m > {mant}e{expo} (log10 {res.log10_m_bound})"


@_check("digit-term-ratios", "scanner", level="full")
def _chk_digit_ratios():
    iv = logcomp.compute_log2(10_000)
    pq = cfengine.cf_certified(iv)
    ratio = pq.certified_count / 10_000
    if not 0.90 <= ratio <= 1.00:
        return False, f"certified/digits = {ratio:.4f}"
    iv2 = logcomp.compute_log2(10_700)
    terms = cfengine.cf_certified(iv2).terms[:10_001]
    if len(terms) < 10_001:
        return False, f"only {len(terms)} certified terms at 10700 digits"
    last = None
    for st in cfengine.stream_convergents(terms):
        last = st
    mant, expo = last.q_mag
    slope = (math.log10(mant) + expo) / last.j
    if not 0.50 <= slope <= 0.53:
        return False, f"log10(q_j)/j = {slope:.4f}"
    return True, f"terms/digit = {ratio:.4f}; log10(q)/j = {slope:.4f} at j=10^4"


@_check("cache-corruption-detected", "cache", level="full")
def _chk_cache_corruption():
    tmp = Path(tempfile.mkdtemp())
    try:
        c = ArtifactCache(tmp)
        c.get_log2(300)
        path = c.digit_file(300)
        data = path.read_bytes()
        path.write_bytes(data[:-20] + b"5" * 20)
        try:
            c.get_log2(300)
            return False, "tampered digit file loaded silently"
        except CacheCorruptionError as exc:
            return True, str(exc)[:70]
    finally:
        shutil.rmtree(tmp)


@_check("cache-scan-coherence", "cache", level="full")
def _chk_cache_coherence():
    tmp = Path(tempfile.mkdtemp())
    try:
        cfg = scanner.ScanConfig(N=1, digit_budget=800, prime_bound=1000)
        fresh = scanner.run_scan(cfg)
        c = ArtifactCache(tmp)
        pq, _, _ = c.get_cf(2, 800)
        pq2, _, _ = c.get_cf(2, 800)  # warm second read
        if pq2 != pq:
            return False, "cache reread altered the quotients"
        cached = scanner.run_scan(cfg, quotients=pq)
        ok = (fresh.candidates == cached.candidates
              and fresh.accepted == cached.accepted
              and fresh.log10_m_bound == cached.log10_m_bound)
        return ok, f"{len(fresh.candidates)} rows identical from cache and from scratch"
    finally:
        shutil.rmtree(tmp)
