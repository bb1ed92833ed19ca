"""Quotient extraction: Euclid oracle first, then both engine paths."""

import random

import pytest
from gmpy2 import mpq, mpz

from emcf import (
    EmptyCertificationError,
    PartialQuotients,
    RationalInterval,
    cf_certified,
    cf_fast,
    cf_quadratic,
    compute_log2,
    read_cf_file,
    reconstruct_exact,
    scale_interval,
    stream_convergents,
    write_cf_file,
)


def euclid_cf(num: int, den: int) -> list[int]:
    """Canonical expansion by plain division; last term kept > 1."""
    out = []
    while den:
        out.append(num // den)
        num, den = den, num - (num // den) * den
    if len(out) > 1 and out[-1] == 1:
        out[-2] += 1
        out.pop()
    return out


def test_euclid_oracle_spots():
    assert euclid_cf(2, 3) == [0, 1, 2]
    assert euclid_cf(7, 10) == [0, 1, 2, 3]
    assert euclid_cf(355, 113) == [3, 7, 16]
    assert euclid_cf(1, 1) == [1]


def test_quadratic_matches_euclid():
    rng = random.Random(7)
    for _ in range(60):
        num = rng.randrange(1, 10**12)
        den = rng.randrange(1, 10**12)
        assert list(cf_quadratic(mpq(num, den)).terms) == euclid_cf(num, den)


def test_fast_matches_quadratic_on_1000_rationals():
    rng = random.Random(20240817)
    for _ in range(1000):
        num = rng.randrange(1, 10**40)
        den = rng.randrange(1, 10**40)
        value = mpq(num, den)
        assert cf_fast(value).terms == cf_quadratic(value).terms


def test_max_terms_truncation():
    fib = [1, 1]
    while len(fib) < 100:
        fib.append(fib[-1] + fib[-2])
    value = mpq(fib[-1], fib[-2])
    short = cf_fast(value, max_terms=9)
    full = cf_fast(value)
    assert len(short.terms) == 9
    assert short.terms == full.terms[:9]
    assert len(full.terms) > 90


def test_certified_prefix_reference():
    iv = compute_log2(12)
    pq = cf_certified(iv)
    assert pq.terms[:10] == (0, 1, 2, 3, 1, 6, 3, 1, 1, 2)
    assert pq.certified_count == len(pq.terms)


def test_certified_is_endpoint_common_prefix_minus_margin():
    iv = compute_log2(60)
    lo_terms = cf_fast(iv.lo).terms
    hi_terms = cf_fast(iv.hi).terms
    common = 0
    for a, b in zip(lo_terms, hi_terms):
        if a != b:
            break
        common += 1
    assert cf_certified(iv).certified_count == common - 1


def test_certified_prefix_is_stable_under_refinement():
    rough = cf_certified(compute_log2(100)).terms
    sharp = cf_certified(compute_log2(300)).terms
    assert sharp[: len(rough)] == rough


def test_degenerate_interval_fully_certified():
    iv = RationalInterval(mpq(7, 10), mpq(7, 10), 0)
    pq = cf_certified(iv)
    assert list(pq.terms) == [0, 1, 2, 3]
    assert pq.certified_count == 4


def test_empty_certification():
    with pytest.raises(EmptyCertificationError):
        cf_certified(RationalInterval(mpq(3, 10), mpq(7, 10), 0))


def test_convergents_reference(half_terms_800):
    # (log 2)/2 = [0; 2, 1, 5, ...]: j=2 convergent is 1/3
    p, q = reconstruct_exact(half_terms_800, 2)
    assert (p, q) == (1, 3)
    iv = compute_log2(30)
    terms = cf_certified(iv).terms
    p, q = reconstruct_exact(terms, 2)
    assert (p, q) == (2, 3)
    p, q = reconstruct_exact(terms, 3)
    assert (p, q) == (7, 10)


def test_determinant_identity_through_500(half_terms_800):
    terms = half_terms_800[:501]
    p, pp = mpz(terms[0]), mpz(1)
    q, qp = mpz(1), mpz(0)
    sign = 1
    for a in terms[1:]:
        p, pp = a * p + pp, p
        q, qp = a * q + qp, q
        assert p * qp - pp * q == sign
        sign = -sign


def test_residues_match_exact_reconstruction(half_terms_800):
    terms = half_terms_800[:501]
    moduli = (6, 97, 125, 10007)
    for st in stream_convergents(terms, moduli):
        if st.j in (1, 50, 200, 500):
            _, q = reconstruct_exact(terms, st.j)
            for m in moduli:
                assert st.residues[m][0] == q % m
            _, qprev = reconstruct_exact(terms, st.j - 1)
            for m in moduli:
                assert st.residues[m][1] == qprev % m


def test_magnitude_drift_within_envelope(half_terms_800):
    terms = half_terms_800[:501]
    import math

    last = None
    for st in stream_convergents(terms):
        last = st
    _, q = reconstruct_exact(terms, last.j)
    mant, expo = last.q_mag
    exact = math.log10(int(q.digits(10)[:17])) + (q.num_digits(10) - 17)
    assert abs(math.log10(mant) + expo - exact) < 1e-8 * last.j


def test_stream_rejects_bad_terms():
    with pytest.raises(ValueError):
        list(stream_convergents([0, 1, 0, 2]))
    with pytest.raises(ValueError):
        list(stream_convergents([-1, 2]))
    with pytest.raises(ValueError):
        list(stream_convergents([0, 1], moduli=[1]))


def test_cf_file_roundtrip(tmp_path):
    iv = compute_log2(150)
    pq = cf_certified(iv)
    path = tmp_path / "cf.txt"
    sha = write_cf_file(path, "log2", pq)
    assert len(sha) == 64
    constant, back = read_cf_file(path)
    assert constant == "log2"
    assert back == pq


def test_cf_file_rejects_malformed(tmp_path):
    path = tmp_path / "cf.txt"
    path.write_text("cf constant=log2 certified=3\n0\n1\n")
    with pytest.raises(ValueError):
        read_cf_file(path)


def test_partial_quotients_validation():
    with pytest.raises(ValueError):
        PartialQuotients((0, 1, 0), 3)
    with pytest.raises(ValueError):
        PartialQuotients((0, 1, 2), 4)
