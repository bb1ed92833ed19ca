"""Gate logic and the fused scan loop, checked against an exact re-walk."""

import math

import pytest
from gmpy2 import mpq

from emcf.arithmetic import prime_set
from emcf.cfengine import PartialQuotients, reconstruct_exact, stream_convergents
from emcf.logcomp import RationalInterval
from emcf.scanner import (
    ConditionReport,
    ScanConfig,
    TableRow,
    bound_from_row,
    bound_mantissa_exponent,
    check_conditions,
    run_scan,
)

# first table row for the two smallest configurations, 800 digits each:
# (j, a_{j+1}, mantissa, exponent, q mod 6 class, smallest violating prime)
ROW_N1 = (642, 764, "2.383153", 330, -1, 149)
ROW_N2 = (664, 1529, "2.383153", 330, -1, 149)


def exact_rewalk(terms, N, threshold, profiles):
    """Candidate list recomputed from exact convergent denominators."""
    out = []
    for j in range(0, len(terms) - 1, 2):
        a_next = terms[j + 1]
        if a_next < threshold:
            continue
        _, q = reconstruct_exact(terms, j)
        if math.gcd(int(q % 6), 6) != 1:
            continue
        violating = None
        for pr in profiles:
            if q % pr.p == 0:
                e = 0
                r = q
                while r % pr.p == 0:
                    r //= pr.p
                    e += 1
                if e != pr.required_order:
                    violating = pr.p if violating is None else min(violating, pr.p)
        ds = str(q)
        out.append((j, int(a_next), ds[0] + "." + ds[1:7], len(ds) - 1, violating))
        if violating is None:
            break
    return out


def test_config_threshold_is_derived():
    assert ScanConfig(N=1, digit_budget=100).threshold == 178
    assert ScanConfig(N=3, digit_budget=100).threshold == 538
    assert ScanConfig(N=3, digit_budget=100, threshold=538).threshold == 538
    with pytest.raises(ValueError):
        ScanConfig(N=3, digit_budget=100, threshold=500)


def test_config_guards():
    with pytest.raises(ValueError):
        ScanConfig(N=0, digit_budget=100)
    with pytest.raises(ValueError):
        ScanConfig(N=1, digit_budget=0)
    with pytest.raises(ValueError):
        ScanConfig(N=1, digit_budget=100, prime_bound=4)


def test_table_row_validates_mod6():
    with pytest.raises(ValueError):
        TableRow(N=1, j=2, a_next=200, q_mantissa="1.000000", q_exponent=3, q_mod6=5, violating_prime=None)


def test_reference_row_N1(log2_800):
    res = run_scan(ScanConfig(N=1, digit_budget=800, prime_bound=1000), interval=log2_800)
    assert res.exhausted and res.accepted is None and res.log10_m_bound is None
    assert res.reason == "certified prefix exhausted before an accepted row"
    assert res.status == "budget_exhausted"
    j, a, mant, expo, mod6, vp = ROW_N1
    row = res.candidates[0]
    assert (row.j, row.a_next, row.q_mantissa, row.q_exponent) == (j, a, mant, expo)
    assert (row.q_mod6, row.violating_prime) == (mod6, vp)


def test_reference_row_N2(log2_800):
    res = run_scan(ScanConfig(N=2, digit_budget=800, prime_bound=1000), interval=log2_800)
    row = res.candidates[0]
    j, a, mant, expo, mod6, vp = ROW_N2
    assert (row.j, row.a_next, row.q_mantissa, row.q_exponent, row.q_mod6, row.violating_prime) == (
        j, a, mant, expo, mod6, vp,
    )


def test_candidates_match_exact_rewalk(log2_800, half_terms_800):
    cfg = ScanConfig(N=1, digit_budget=800, prime_bound=1000)
    res = run_scan(cfg, interval=log2_800)
    profiles = prime_set(1, 1000)
    want = exact_rewalk(half_terms_800, 1, cfg.threshold, profiles)
    assert want == [(642, 764, "2.383153", 330, 149)]
    got = [(r.j, r.a_next, r.q_mantissa, r.q_exponent, r.violating_prime) for r in res.candidates]
    assert got == want


def test_check_conditions_on_tracker_state(half_terms_800):
    cfg = ScanConfig(N=1, digit_budget=800, prime_bound=1000)
    profiles = prime_set(1, 1000)
    moduli = [pr.tracking_modulus for pr in profiles] + [6]
    states = {st.j: st for st in stream_convergents(half_terms_800[:644], moduli)}
    report = check_conditions(states[642], half_terms_800[643], cfg, profiles)
    assert report.even_ok and report.quotient_ok and report.coprime6_ok
    assert report.order_violations == ((149, "1"),)
    assert not report.all_ok
    # an odd index fails (a) regardless of everything else
    report_odd = check_conditions(states[641], 10**9, cfg, profiles)
    assert not report_odd.even_ok and not report_odd.all_ok


def test_check_conditions_missing_moduli(half_terms_800):
    cfg = ScanConfig(N=1, digit_budget=800, prime_bound=1000)
    profiles = prime_set(1, 1000)
    bare = next(iter(stream_convergents(half_terms_800[:5])))
    with pytest.raises(KeyError):
        check_conditions(bare, 10**9, cfg, profiles)
    only6 = next(iter(stream_convergents(half_terms_800[:5], [6])))
    with pytest.raises(KeyError):
        check_conditions(only6, 10**9, cfg, profiles)


def row(mant, expo):
    return TableRow(N=1, j=2, a_next=500, q_mantissa=mant, q_exponent=expo, q_mod6=1, violating_prime=None)


def test_bound_rounding_trio():
    assert bound_from_row(row("2.000000", 10)) == "10.000000"
    assert bound_mantissa_exponent(row("2.000000", 10)) == ("1.000000", 10)
    assert bound_from_row(row("1.000000", 10)) == "9.698970"
    assert bound_mantissa_exponent(row("1.000000", 10)) == ("5.000000", 9)
    # 9.999999 / 2 = 4.9999995: both outputs must floor, not round
    assert bound_from_row(row("9.999999", 5)) == "5.698969"
    assert bound_mantissa_exponent(row("9.999999", 5)) == ("4.999999", 5)


def test_bound_is_floor_of_true_log():
    for mant, expo in (("2.383153", 330), ("3.458446", 4589), ("7.654321", 12)):
        s = bound_from_row(row(mant, expo))
        true = expo + math.log10(int(mant.replace(".", "")) / 2_000_000)
        assert float(s) <= true < float(s) + 1.1e-6


def test_prime_bound_truncation_only_weakens(log2_800):
    # 149 is outside a 100-bound profile set, so the N=1 row goes through
    loose = run_scan(ScanConfig(N=1, digit_budget=800, prime_bound=100), interval=log2_800)
    tight = run_scan(ScanConfig(N=1, digit_budget=800, prime_bound=1000), interval=log2_800)
    assert loose.accepted is not None
    assert loose.accepted.j == 642
    assert loose.accepted.violating_prime is None
    assert not loose.exhausted
    assert loose.log10_m_bound == bound_from_row(loose.accepted)
    assert tight.accepted is None
    assert loose.candidates[0].j == tight.candidates[0].j
    assert loose.candidates[0].q_mantissa == tight.candidates[0].q_mantissa


def test_scan_from_quotients_matches_fresh(log2_800, half_terms_800):
    cfg = ScanConfig(N=1, digit_budget=800, prime_bound=1000)
    pq = PartialQuotients(half_terms_800, len(half_terms_800))
    via_quotients = run_scan(cfg, quotients=pq)
    fresh = run_scan(cfg, interval=log2_800)
    assert via_quotients.candidates == fresh.candidates
    assert via_quotients.exhausted == fresh.exhausted
    assert via_quotients.reason == fresh.reason


def test_digit_budget_exhaustion():
    cfg = ScanConfig(N=7_776_000, digit_budget=3_400_000_000)
    res = run_scan(cfg, ceiling=100_000)
    assert res.exhausted and res.accepted is None
    assert res.candidates == ()
    assert res.reason.startswith("digit budget rejected:")
    assert res.status == "budget_exhausted"


def test_empty_certification_exhaustion():
    iv = RationalInterval(mpq(3, 10), mpq(7, 10), 0)
    res = run_scan(ScanConfig(N=1, digit_budget=10), interval=iv)
    assert res.exhausted
    assert res.reason.startswith("no certified terms:")


def test_condition_report_all_ok_flag():
    good = ConditionReport(j=4, even_ok=True, quotient_ok=True, coprime6_ok=True, order_violations=())
    assert good.all_ok
    bad = ConditionReport(j=4, even_ok=True, quotient_ok=True, coprime6_ok=True, order_violations=((5, "3"),))
    assert not bad.all_ok
