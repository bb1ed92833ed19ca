"""Prime profiles and the fractional power-sum identity.

The tracked prime set for a positive integer N is

    P(N) = {p : p-1 | N} union {p : 3 is a primitive root mod p},

restricted to 5 <= p <= bound; 2 and 3 are excluded because the scan's
coprimality condition on q_j mod 6 already covers them.  Each member
carries its Fermat-quotient order nu_p(3^(p-1) - 1), the multiplicity
nu_p(N), the required order e_p = fermat_order + nu_N + 1, and the
tracking modulus p^(e_p + 1), one power above e_p so an excess valuation
is distinguishable from equality.  (A stricter variant would replace
nu_p(N) with the valuation of the full cofactor; the profile implements
the scan condition verbatim and leaves that substitution to the caller.)

The fractional part of (sum_{j<l} j^r) / l obeys a von Staudt-Clausen
style identity: for even r it equals frac(-sum 1/p) over primes p | l
with p-1 | r; for odd r > 1 the sum pairs j with l-j and the residue
collapses to ((l/2)^r mod l) / l when l is even and to 0 when l is odd,
always landing in {0, 1/2}.  A brute-force oracle covers the small range
used by the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpz

__all__ = [
    "PrimeProfile",
    "DivisibilityConstants",
    "is_primitive_root_3",
    "fermat_order",
    "prime_set",
    "staudt_fraction",
    "power_sum_oracle",
    "primes_up_to",
    "divisibility_constants",
]


def primes_up_to(n: int) -> list[int]:
    """Primes <= n by a byte sieve."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i in range(2, n + 1) if sieve[i]]


def _is_prime(p: int) -> bool:
    return p >= 2 and gmpy2.is_prime(mpz(p), 30)


def _factor_trial(n: int) -> list[int]:
    """Distinct prime factors by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def is_primitive_root_3(p: int) -> bool:
    """True iff 3 generates the multiplicative group mod p.

    p = 2 counts as true by convention (order 1 equals p - 1).
    """
    p = int(p)
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 3:
        raise ValueError("3 is not a unit modulo 3")
    if p == 2:
        return True
    for q in _factor_trial(p - 1):
        if pow(3, (p - 1) // q, p) == 1:
            return False
    return True


def fermat_order(p: int) -> int:
    """nu_p(3^(p-1) - 1), at least 1 by Fermat's little theorem.

    Order 2 or more makes p a Mirimanoff-style prime; below 10^14 only 11
    and 1006003 qualify.
    """
    p = int(p)
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 3:
        raise ValueError("3 is not a unit modulo 3")
    e = 1
    pe = p * p
    while pow(3, p - 1, pe) == 1:
        e += 1
        pe *= p
    return e


@dataclass(frozen=True)
class PrimeProfile:
    p: int
    reason: str  # divisor_condition | primitive_root_3 | both
    fermat_order: int
    nu_N: int
    required_order: int
    tracking_modulus: int

    def __post_init__(self):
        if self.required_order != self.fermat_order + self.nu_N + 1:
            raise ValueError("required_order must be fermat_order + nu_N + 1")
        if self.tracking_modulus != self.p**(self.required_order + 1):
            raise ValueError("tracking modulus must be p^(required_order + 1)")


def _nu(p: int, n) -> int:
    e = 0
    n = mpz(n)
    while n % p == 0:
        n //= p
        e += 1
    return e


def prime_set(N, bound: int = 100_000) -> list[PrimeProfile]:
    """Profiles for all p in P(N) with 5 <= p <= bound.

    Truncation at the bound only weakens the scan's divisibility condition,
    so downstream bounds stay valid.
    """
    N = mpz(N)
    if N < 1:
        raise ValueError("N must be a positive integer")
    if bound < 5:
        return []  # nothing to profile below the first tracked prime
    profiles = []
    for p in primes_up_to(bound):
        if p in (2, 3):
            continue
        div_cond = N % (p - 1) == 0
        prim = is_primitive_root_3(p)
        if not (div_cond or prim):
            continue
        reason = "both" if (div_cond and prim) else (
            "divisor_condition" if div_cond else "primitive_root_3"
        )
        fo = fermat_order(p)
        nu_n = _nu(p, N)
        e_p = fo + nu_n + 1
        profiles.append(
            PrimeProfile(
                p=p,
                reason=reason,
                fermat_order=fo,
                nu_N=nu_n,
                required_order=e_p,
                tracking_modulus=p ** (e_p + 1),
            )
        )
    return profiles


def staudt_fraction(l: int, r: int) -> Fraction:
    """Fractional part of (sum_{j<l} j^r)/l from the closed form, no summation."""
    l, r = int(l), int(r)
    if l < 2:
        raise ValueError("l must be at least 2")
    if r < 2:
        raise ValueError("the identity covers r >= 2")
    if r % 2 == 1:
        if l % 2 == 1:
            return Fraction(0)
        return Fraction(pow(l // 2, r, l), l)
    s = Fraction(0)
    for p in _factor_trial(l):
        if r % (p - 1) == 0:
            s += Fraction(1, p)
    return (-s) % 1


def power_sum_oracle(l: int, r: int) -> int:
    """Exact sum_{j=1}^{l-1} j^r; the brute-force check for staudt_fraction."""
    l, r = int(l), int(r)
    if not (2 <= l <= 10_000):
        raise ValueError("oracle range is 2 <= l <= 10^4")
    if not (1 <= r <= 64):
        raise ValueError("oracle range is 1 <= r <= 64")
    return sum(j**r for j in range(1, l))


@dataclass(frozen=True)
class DivisibilityConstants:
    N1: mpz  # lcm(1..200)
    N2: mpz  # 2^8 3^5 5^4 7^3 11^2 13^2 17^2 19^2 * prod of primes 23..997


@lru_cache(maxsize=1)
def divisibility_constants() -> DivisibilityConstants:
    n1 = mpz(1)
    for i in range(2, 201):
        n1 = gmpy2.lcm(n1, i)
    n2 = mpz(2**8) * 3**5 * 5**4 * 7**3 * 11**2 * 13**2 * 17**2 * 19**2
    for p in primes_up_to(997):
        if p >= 23:
            n2 *= p
    return DivisibilityConstants(N1=n1, N2=n2)
