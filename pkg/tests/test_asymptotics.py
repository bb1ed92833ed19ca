"""Power-sum root solver, closed-form expansion, and the inequality apparatus."""

import math
import warnings
from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr, mpq

from emcf.asymptotics import (
    GeneralizedCoeffs,
    RealRoot,
    asymp_fit,
    c_coeffs,
    cft_inequality,
    compute_fm,
    delange_residual,
    expansion_coefficients,
    expansion_k,
    g_poly,
    sandwich_bounds,
    sandwich_check,
    solve_k,
    sum_powers_ratio,
)

PRINTED = (0.69314718, -1.03972077, -0.00269758, 0.00323260, 0.00217182)


def brute_ratio(m, k, bits=400):
    """All m-1 terms of the power-sum ratio, no truncation."""
    with gmpy2.context(precision=bits):
        kk = mpfr(k)
        return sum((1 - mpfr(j) / m) ** kk for j in range(1, m))


# --- the truncated evaluator against the full sum ---


def test_truncated_sum_matches_brute():
    got = sum_powers_ratio(50, mpq(41, 2))
    want = brute_ratio(50, mpq(41, 2))
    assert abs(got - want) < mpfr("1e-45")
    got = sum_powers_ratio(5000, 3000, precision=30)
    want = brute_ratio(5000, 3000)
    assert abs(got - want) < mpfr("1e-35")


def test_sum_guards():
    with pytest.raises(ValueError):
        sum_powers_ratio(1, 2)
    with pytest.raises(ValueError):
        sum_powers_ratio(10, 0)


def test_solve_m3_is_exact():
    r = solve_k(3)
    assert r.k == 1
    assert r.residual == 0
    assert r.m == 3


def test_solve_root_satisfies_brute_sum():
    r = solve_k(200)
    assert abs(brute_ratio(200, r.k) - 1) < mpfr("1e-38")
    assert abs(sum_powers_ratio(200, r.k) - 1) == r.residual or r.residual <= mpfr("1e-40")


def test_solve_bracket_regime():
    for m in (7, 23, 100, 4124):
        r = solve_k(m)
        assert r.k + 2 < m < 2 * r.k
    with pytest.raises(ValueError):
        solve_k(2)


def test_solve_k_over_m_tends_to_log2():
    assert abs(solve_k(1000).k / 1000 - math.log(2)) < 2e-3


def test_real_root_regime_enforced():
    with pytest.raises(ValueError):
        RealRoot(m=100, k=mpfr(10), residual=mpfr(0), C_m=mpfr(0))


def test_expansion_coefficients_to_eight_places():
    vals = expansion_coefficients()
    assert len(vals) == 5
    for got, want in zip(vals, PRINTED):
        assert abs(float(got) - want) < 5e-9
    # the 1/m coefficient is -(25/12 - 3 log 2) log 2, the 0.00389 constant
    assert abs(-float(vals[2]) / math.log(2) - 0.00389) < 5e-6


def test_expansion_order_semantics():
    c = float(gmpy2.log(2))
    assert abs(float(expansion_k(2, 0)) - c / 2) < 1e-15
    got = float(expansion_k(1000, 3))
    want = sum(w * 1000 ** (1 - i) for i, w in enumerate(PRINTED))
    assert abs(got - want) < 1e-5
    with pytest.raises(ValueError):
        expansion_k(1000, 4)
    with pytest.raises(ValueError):
        expansion_k(1, 2)


def test_expansion_gap_decays_like_m4():
    gaps = []
    for m in (100, 200, 400, 800):
        gap = abs(solve_k(m).k - expansion_k(m, 3))
        gaps.append(float(gap))
    for a, b in zip(gaps, gaps[1:]):
        assert 1 / 32 <= b / a <= 1 / 8


def test_convergent_gap_inequality():
    for m in (10**5, 10**8):
        k = solve_k(m).k
        with gmpy2.context(precision=300):
            gap = gmpy2.log(2) - 2 * k / (2 * m - 3)
            assert 0 < gap < mpfr("0.0111") / (2 * m - 3) ** 2


def test_C_m_window_at_large_m():
    r = solve_k(10**9)
    assert 0 < r.C_m < mpfr("0.004")


def test_fm_displayed_inequalities():
    for m in (100, 1000, 10**4, 10**6, 10**9):
        mm = mpfr(m)
        assert compute_fm(m, 0) > mpfr("0.005") / mm**2 - 100 / mm**3, m
        assert compute_fm(m, mpq(4, 1000)) < mpfr("-0.00015") / mm**2 + 100 / mm**3, m
    with pytest.raises(ValueError):
        compute_fm(99, 0)


def test_fm_small_at_true_root():
    r = solve_k(1000)
    assert abs(compute_fm(1000, r.C_m)) < mpfr(110000) / 1000**3


def test_sandwich_spot_and_row():
    assert sandwich_check(9, mpq(1, 2))
    for i in range(1, 100):
        assert sandwich_check(100, mpq(i, 100)), i


def test_sandwich_tight_at_small_y():
    lower, value, upper = sandwich_bounds(9, mpq(1, 10**4), precision=40)
    assert lower < value < upper
    assert upper - lower < mpfr("1e-15")


def test_sandwich_guards():
    for k, y in ((8, 0.5), (9, 0), (9, 1), (9, -0.1)):
        with pytest.raises(ValueError):
            sandwich_bounds(k, y)


def test_g_poly_printed_terms():
    assert g_poly(0).coefficients == (Fraction(1),)
    assert g_poly(1).coefficients == (Fraction(0),)
    assert g_poly(2).coefficients == (Fraction(0), Fraction(-1, 2))
    assert g_poly(4).coefficients == (Fraction(0), Fraction(-1, 4), Fraction(1, 8))
    assert g_poly(5).coefficients == (Fraction(0), Fraction(-1, 5), Fraction(1, 6))
    for n in range(1, 13):
        assert g_poly(n)(0) == 0
    with pytest.raises(ValueError):
        g_poly(65)


def test_g_series_matches_exact_product():
    # (1-y)^k e^{ky} for integer k: exact binomial times the exponential series
    for k in (2, 3, 7):
        binom = [Fraction(math.comb(k, i) * (-1) ** i) for i in range(k + 1)]
        expo = [Fraction(k) ** i / math.factorial(i) for i in range(13)]
        prod = [Fraction(0)] * 13
        for i, b in enumerate(binom):
            for j, e in enumerate(expo):
                if i + j < 13:
                    prod[i + j] += b * e
        for n in range(13):
            assert g_poly(n)(Fraction(k)) == prod[n], (k, n)


def test_c_coeffs_weight_one_matches_expansion():
    g = c_coeffs(1, precision=40)
    vals = expansion_coefficients()
    assert g.t1 == 3
    assert abs(g.c0 - vals[0]) < mpfr("1e-38")
    assert abs(g.c1 - vals[1]) < mpfr("1e-38")
    assert abs(g.c2 - vals[2]) < mpfr("1e-37")


def test_c_coeffs_weight_two():
    g = c_coeffs(2)
    assert g.t1 == 5
    with gmpy2.context(precision=215):
        c = gmpy2.log(mpfr(3) / 2)
        assert abs(g.c0 - c) < mpfr("1e-38")
        assert abs(g.c1 + mpq(5, 2) * c) < mpfr("1e-38")
    assert isinstance(g, GeneralizedCoeffs)
    with pytest.raises(ValueError):
        c_coeffs(0)


def test_c0_duality():
    for t in (1, 2, 5, 100):
        assert math.isclose(math.log((t + 1) / t), -math.log(t / (t + 1)), rel_tol=1e-15)


def test_cft_window():
    for t in range(1, 101):
        v = float(cft_inequality(t))
        assert -0.22 < v < 0, t
    assert -0.22 < float(cft_inequality(10**6)) < 0
    with pytest.raises(ValueError):
        cft_inequality(0)


def test_delange_identity_at_k1():
    rho, bound = delange_residual(10, 1)
    with gmpy2.context(precision=200):
        C = mpfr(2) / 9
        main = 9 / (1 - gmpy2.exp(-C))
        assert abs(main * (1 + mpfr(rho)) - 45) < mpfr("1e-50")
    assert math.isinf(float(bound))


def test_delange_bound_holds_at_solved_k():
    for m in (100, 1000):
        rho, bound = delange_residual(m, solve_k(m).k)
        assert abs(rho) < bound
        assert abs(rho) < 10 / math.sqrt(m)
        assert float(bound) < 10 / math.sqrt(m)


def test_delange_guards():
    for m, k in ((1, 2), (10**5, 2), (10, 0.5)):
        with pytest.raises(ValueError):
            delange_residual(m, k)


def test_fit_exact_models():
    exact = asymp_fit([(n, Fraction(n + 1, n)) for n in range(10, 17)], depth=1)
    assert abs(exact[0] - 1) < mpfr("1e-25")
    assert abs(exact[1] - 1) < mpfr("1e-25")
    const = asymp_fit([(n, 7) for n in range(5, 11)], depth=2)
    assert abs(const[0] - 7) < mpfr("1e-25")
    assert abs(const[1]) < mpfr("1e-25") and abs(const[2]) < mpfr("1e-25")


def test_fit_cancels_first_neglected_power():
    # model 2 + 5/n + 1/n^2 at depth 1: Richardson removes the n^-2 bias exactly
    samples = [(n, Fraction(2) + Fraction(5, n) + Fraction(1, n * n)) for n in range(100, 161, 10)]
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        got = asymp_fit(samples, depth=1)
    assert abs(got[0] - 2) < mpfr("1e-25")
    assert abs(got[1] - 5) < mpfr("1e-25")


def test_fit_warns_on_disagreement():
    samples = [(n, Fraction(1) + Fraction(1, n) + Fraction(50, n**3)) for n in range(5, 11)]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        asymp_fit(samples, depth=1, tolerance=1e-6)
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_fit_recovers_expansion_from_solver():
    samples = [(m, solve_k(m).k / m) for m in range(500, 1501, 100)]
    got = asymp_fit(samples, depth=1, tolerance=1e-2)
    assert abs(float(got[0]) - PRINTED[0]) < 1e-6
    assert abs(float(got[1]) - PRINTED[1]) < 1e-6


def test_fit_validation():
    with pytest.raises(ValueError):
        asymp_fit([(2, 1), (3, 1)], depth=-1)
    with pytest.raises(ValueError):
        asymp_fit([(2, 1), (2, 2), (3, 1)], depth=1)
    with pytest.raises(ValueError):
        asymp_fit([(2, 1), (3, 1)], depth=1)
