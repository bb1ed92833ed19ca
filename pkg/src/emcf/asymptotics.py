"""Analytic layer: the real-k root of the power-sum equation and its expansions.

For integer m >= 2 the equation

    sum_{j=1}^{m-1} (1 - j/m)^k = 1

has exactly one real solution k > 0 (the sum is strictly decreasing in k,
ranging from m-1 down to 0).  solve_k locates it by bisection; the terms
decay like e^(-kj/m), so the sum is truncated once terms drop below the
threshold and the cost is proportional to the working precision, not m.
Around the root k/m is close to log 2 and the expansion

    k = cm - 3c/2 - (25c/12 - 3c^2)/m + (-73c/8 + 61c^2/2 - 25c^3)/m^2
        + (-41299c/720 + 657c^2/2 - 598c^3 + 1405c^4/4)/m^3 + O(m^-4)

holds with c = log 2.  The quantification of the first two terms runs
through the function

    f_m(C) = 1 - 1/(z-1) + (L/2m) (z+z^2)/(z-1)^3
             + (L/3m^2) (z+4z^2+z^3)/(z-1)^4
             - (L(L-2/m)/8m^2) (z+11z^2+11z^3+z^4)/(z-1)^5

at z = e^L, L = log2 (1 - 3/(2m) - C/m^2), whose sign change over
C in [0, 0.004] pins the constant C_m defined by
k/m = log2 (1 - 3/(2m) - C_m/m^2).

Supporting pieces: the exact Taylor polynomials g_n(k) of (1-y)^k e^{ky},
the two-sided bound on (1-y)^k for k > 8, the generalized-equation
coefficients c_0, c_1, c_2 as functions of t, the Delange form of the
power sum with its residual bound, and an inverse-power fitter that
recovers expansion coefficients from solved samples.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq, mpz

__all__ = [
    "RealRoot",
    "SeriesPolynomial",
    "GeneralizedCoeffs",
    "sum_powers_ratio",
    "solve_k",
    "expansion_k",
    "expansion_coefficients",
    "compute_fm",
    "sandwich_bounds",
    "sandwich_check",
    "g_poly",
    "c_coeffs",
    "cft_inequality",
    "delange_residual",
    "asymp_fit",
]


def _bits(digits: int) -> int:
    # 20 guard digits on top of every requested tolerance
    return max(96, int((digits + 20) * 3.3219281) + 16)


@dataclass(frozen=True)
class RealRoot:
    m: int
    k: mpfr
    residual: mpfr
    C_m: mpfr

    def __post_init__(self):
        if self.m >= 7 and not (self.k + 2 < self.m < 2 * self.k):
            raise ValueError(f"root k={self.k} outside the k+2 < m < 2k regime")


@dataclass(frozen=True)
class SeriesPolynomial:
    """g_n(k), coefficients ascending in powers of k, exact rationals."""

    n: int
    coefficients: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        d = len(self.coefficients) - 1
        while d > 0 and self.coefficients[d] == 0:
            d -= 1
        return d

    def __call__(self, k):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * k + c
        return acc


@dataclass(frozen=True)
class GeneralizedCoeffs:
    t: int
    t1: int
    c0: mpfr
    c1: mpfr
    c2: mpfr


def sum_powers_ratio(m: int, k, precision: int = 40) -> mpfr:
    """sum_{j=1}^{m-1} (1 - j/m)^k, truncated below 10^(-precision-10).

    Consecutive terms shrink by at least (1 - 1/m)^k ~ e^(-k/m), so once a
    term falls under the threshold t the remaining tail is below
    t e^(-k/m) / (1 - e^(-k/m)); near the root (k/m ~ log 2) that is < t.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    with gmpy2.context(precision=_bits(precision)):
        kk = mpfr(k)
        if kk <= 0:
            raise ValueError("k must be positive")
        thresh = mpfr(10) ** (-(precision + 10))
        total = mpfr(0)
        for j in range(1, m):
            term = (1 - mpfr(j) / m) ** kk
            total += term
            if term < thresh:
                break
        return total


def _exact_integer_root(m: int, ki: int) -> bool:
    # the power-sum identity at integer k, checked in exact integers
    if not (1 <= ki <= 64 and m <= 10_000):
        return False
    return sum(i**ki for i in range(1, m)) == m**ki


def solve_k(m: int, precision: int = 40) -> RealRoot:
    """The unique real k with sum_powers_ratio(m, k) = 1.

    Bisection on the monotone sum, seeded from the closed-form expansion
    with interval halfwidth max(10^-2, 10^3/m^2), widened once if the seed
    fails to bracket.  Stops when the residual drops under 10^(-precision);
    the k itself is then determined to about that residual times m/2, the
    reciprocal slope of the sum near the root.
    """
    if m < 3:
        raise ValueError("m must be at least 3")
    eval_prec = precision + len(str(m)) + 5
    bits = _bits(eval_prec) + 48
    with gmpy2.context(precision=bits):
        seed = expansion_k(m, 3, precision=eval_prec)
        half = max(mpfr("0.01"), mpfr(1000) / (mpfr(m) ** 2))
        tiny = mpfr(2) ** -16
        for attempt in range(2):
            lo = seed - half
            if lo <= 0:
                lo = tiny
            hi = seed + half
            flo = sum_powers_ratio(m, lo, eval_prec) - 1
            fhi = sum_powers_ratio(m, hi, eval_prec) - 1
            if flo > 0 > fhi:
                break
            half *= 10
        else:
            raise ValueError(f"failed to bracket the root for m={m}")

        target = mpfr(10) ** (-precision)
        k = residual = None
        for _ in range(bits + 64):
            mid = (lo + hi) / 2
            fm = sum_powers_ratio(m, mid, eval_prec) - 1
            if abs(fm) < target:
                k, residual = mid, abs(fm)
                break
            if fm > 0:
                lo = mid
            else:
                hi = mid
        if k is None:
            raise RuntimeError(f"bisection stalled for m={m}")

        ki = round(float(k)) if k < 100 else 0
        near = mpfr(10) ** (-max(10, precision // 2))
        if ki >= 1 and abs(k - ki) < near and _exact_integer_root(m, ki):
            k, residual = mpfr(ki), mpfr(0)

        c = gmpy2.log(2)
        C_m = m * (m - mpq(3, 2) - k / c)
        return RealRoot(m=m, k=k, residual=residual, C_m=C_m)


# (power of 1/m, coefficient as polynomial in c = log 2, ascending)
_EXPANSION = (
    (Fraction(-3, 2),),
    (Fraction(-25, 12), Fraction(3)),
    (Fraction(-73, 8), Fraction(61, 2), Fraction(-25)),
    (Fraction(-41299, 720), Fraction(657, 2), Fraction(-598), Fraction(1405, 4)),
)


def _poly_in_c(coeffs, c):
    acc = mpfr(0)
    for f in reversed(coeffs):
        acc = acc * c + mpq(f)
    return acc * c


def expansion_coefficients(precision: int = 40) -> list[mpfr]:
    """The five numeric coefficients of the expansion, leading term first."""
    with gmpy2.context(precision=_bits(precision)):
        c = gmpy2.log(2)
        return [c] + [_poly_in_c(p, c) for p in _EXPANSION]


def expansion_k(m: int, order: int = 3, precision: int = 40) -> mpfr:
    """Closed-form expansion of k, kept through the m^(-order) term.

    order 0 keeps cm - 3c/2; each further order appends one inverse power,
    so order 3 evaluates all five displayed terms with error O(m^-4).
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    if not 0 <= order <= 3:
        raise ValueError("order must be in 0..3")
    with gmpy2.context(precision=_bits(precision)):
        c = gmpy2.log(2)
        val = c * m + _poly_in_c(_EXPANSION[0], c)
        mm = mpfr(1)
        for i in range(1, order + 1):
            mm *= m
            val += _poly_in_c(_EXPANSION[i], c) / mm
        return val


def compute_fm(m: int, C, precision: int = 40) -> mpfr:
    """f_m(C) by the closed forms at z = e^L, L = log2 (1 - 3/(2m) - C/m^2)."""
    if m < 100:
        raise ValueError("m must be at least 100")
    with gmpy2.context(precision=_bits(precision)):
        mm = mpfr(m)
        lam = gmpy2.log(2) * (1 - 3 / (2 * mm) - mpfr(C) / mm**2)
        z = gmpy2.exp(lam)
        w = z - 1
        z2, z3, z4 = z * z, z**3, z**4
        return (
            1
            - 1 / w
            + (lam / (2 * mm)) * (z + z2) / w**3
            + (lam / (3 * mm**2)) * (z + 4 * z2 + z3) / w**4
            - (lam * (lam - 2 / mm) / (8 * mm**2)) * (z + 11 * z2 + 11 * z3 + z4) / w**5
        )


def sandwich_bounds(k, y, precision: int = 40) -> tuple[mpfr, mpfr, mpfr]:
    """(lower bound, (1-y)^k, upper bound) for k > 8 and 0 < y < 1.

    Both bounds share the factor e^(-ky); the enclosed polynomials differ
    from the common quartic truncation only in their y^5 and y^6 tails.
    """
    with gmpy2.context(precision=_bits(precision)):
        kk, yy = mpfr(k), mpfr(y)
        if not kk > 8:
            raise ValueError("k must exceed 8")
        if not 0 < yy < 1:
            raise ValueError("y must lie in (0, 1)")
        e = gmpy2.exp(-kk * yy)
        y2 = yy * yy
        y3 = y2 * yy
        y4, y5, y6 = y2 * y2, y2 * y3, y3 * y3
        quartic = 1 - kk / 2 * y2 - kk / 3 * y3 + kk * (kk - 2) / 8 * y4
        lower = e * (quartic + kk * (5 * kk - 6) / 30 * y5 - kk**3 / 6 * y6)
        upper = e * (quartic + kk**2 / 2 * y5)
        value = (1 - yy) ** kk
        return lower, value, upper


def sandwich_check(k, y, precision: int = 40) -> bool:
    lower, value, upper = sandwich_bounds(k, y, precision)
    return bool(lower < value < upper)


_g_cache: list[tuple[Fraction, ...]] = [(Fraction(1),), (Fraction(0),)]


def g_poly(n: int) -> SeriesPolynomial:
    """Exact Taylor coefficient polynomial g_n(k) of (1-y)^k e^{ky}.

    Differentiating exp(k(y + log(1-y))) gives the recurrence
    n g_n = -k (g_0 + g_1 + ... + g_{n-2}), which stays in rationals.
    """
    if not 0 <= n <= 64:
        raise ValueError("n must be in 0..64")
    while len(_g_cache) <= n:
        i = len(_g_cache)
        width = max(len(p) for p in _g_cache[: i - 1])
        acc = [Fraction(0)] * width
        for p in _g_cache[: i - 1]:
            for d, c in enumerate(p):
                acc[d] += c
        while len(acc) > 1 and acc[-1] == 0:
            acc.pop()
        poly = (Fraction(0),) + tuple(c * Fraction(-1, i) for c in acc)
        _g_cache.append(poly)
    return SeriesPolynomial(n, _g_cache[n])


def c_coeffs(t: int, precision: int = 40) -> GeneralizedCoeffs:
    """The first three expansion coefficients for the weight-t equation."""
    if t < 1:
        raise ValueError("t must be a positive integer")
    with gmpy2.context(precision=_bits(precision)):
        c0 = gmpy2.log(mpq(t + 1, t))
        th = t + mpq(1, 2)
        c1 = -th * c0
        c2 = th**3 * c0**2 - th**2 * c0 - th * c0**2 / 4 + c0 / 6
        return GeneralizedCoeffs(t=t, t1=2 * t + 1, c0=c0, c1=c1, c2=c2)


def cft_inequality(t: int, precision: int = 40) -> mpfr:
    """t1^3 c^2 - 2 t1^2 c - t1 c^2 + 4c/3 at t1 = 2t+1, c = log(1+1/t)."""
    if t < 1:
        raise ValueError("t must be a positive integer")
    with gmpy2.context(precision=_bits(precision)):
        c = gmpy2.log(mpq(t + 1, t))
        t1 = 2 * t + 1
        return t1**3 * c**2 - 2 * t1**2 * c - t1 * c**2 + 4 * c / 3


def delange_residual(m: int, k, precision: int = 40) -> tuple[mpfr, mpfr]:
    """(rho, bound) from the geometric-factor form of the power sum.

    rho is defined by sum_{i<m} i^k = (m-1)^k (1 + rho) / (1 - e^(-C))
    with C = (k+1)/(m-1); the bound is sqrt(2(k+1)) C over
    sqrt(pi) (k-1)(e^C - 1).  The sum is evaluated in full, so m is
    capped to keep that affordable.
    """
    if not 2 <= m <= 10_000:
        raise ValueError("m must be in 2..10000")
    with gmpy2.context(precision=_bits(precision)):
        kk = mpfr(k)
        if not kk >= 1:
            raise ValueError("k must be at least 1")
        total = mpfr(0)
        for i in range(1, m):
            total += mpfr(i) ** kk
        C = (kk + 1) / (m - 1)
        main = mpfr(m - 1) ** kk / (1 - gmpy2.exp(-C))
        rho = total / main - 1
        bound = gmpy2.sqrt(2 * (kk + 1)) * C / (
            gmpy2.sqrt(gmpy2.const_pi()) * (kk - 1) * (gmpy2.exp(C) - 1)
        )
        return rho, bound


def _solve_window(xs: list[mpq], ss: list[mpq]) -> list[mpq]:
    # exact Gaussian elimination on the Vandermonde system in x = 1/m
    d = len(xs)
    rows = [[x**i for i in range(d)] + [s] for x, s in zip(xs, ss)]
    for col in range(d):
        piv = next(r for r in range(col, d) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        pc = rows[col][col]
        for r in range(d):
            if r != col and rows[r][col] != 0:
                f = rows[r][col] / pc
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return [rows[i][-1] / rows[i][i] for i in range(d)]


def _sym_weights(xs: list[mpq]) -> list[mpq]:
    # w_r = (-1)^(d+1-r) e_{d+1-r}(xs): the bias of coefficient r under a
    # neglected x^(d+1) term, from the interpolation error K prod (x - x_i)
    d = len(xs)
    poly = [mpq(1)]
    for x in xs:
        poly = [a - x * b for a, b in zip(poly + [mpq(0)], [mpq(0)] + poly)]
    # poly[j] = (-1)^j e_j(xs); the x^d interpolation defect contributes
    # -(-1)^(d-r) e_{d-r} to coefficient r
    return [-poly[d - r] for r in range(d)]


def asymp_fit(samples, depth: int, precision: int = 40, tolerance=1e-3) -> list[mpfr]:
    """Estimate c_0..c_depth of s(n) ~ c_0 + c_1/n + ... from samples.

    Solves the exact Vandermonde system on the two largest sliding windows
    of depth+1 samples, then cancels the first neglected inverse power
    between them coefficient by coefficient (the bias of each estimate is a
    known symmetric function of the window nodes).  Warns when the raw
    window estimates disagree by more than the tolerance, a sign the model
    does not fit or the windows are too close to resolve it.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    pts = sorted((int(n), mpq(v)) for n, v in samples)
    if len({n for n, _ in pts}) != len(pts):
        raise ValueError("sample points must be distinct")
    if len(pts) < depth + 2:
        raise ValueError("need at least depth+2 samples")
    win_b = pts[-(depth + 1) :]
    win_a = pts[-(depth + 2) : -1]
    out = []
    for win in (win_a, win_b):
        xs = [mpq(1, n) for n, _ in win]
        ss = [v for _, v in win]
        out.append((_solve_window(xs, ss), _sym_weights(xs)))
    (theta_a, w_a), (theta_b, w_b) = out
    stabilized = []
    for r in range(depth + 1):
        if abs(theta_b[r] - theta_a[r]) > tolerance:
            warnings.warn(
                f"window estimates for c_{r} disagree beyond {tolerance}",
                RuntimeWarning,
                stacklevel=2,
            )
        stabilized.append(
            (theta_b[r] * w_a[r] - theta_a[r] * w_b[r]) / (w_a[r] - w_b[r])
        )
    with gmpy2.context(precision=_bits(precision)):
        return [mpfr(v) for v in stabilized]
