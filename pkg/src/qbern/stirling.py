"""
Second-kind Stirling numbers, their q-analogues and the identities that
connect them with the q-Bernstein operator applied to powers.

Differences of powers follow the convention 0^0 = 1 (and [0]_q^0 = 1), so
that S(0, 0) = 1.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import List, Literal, Tuple

from .algebra import Poly, Rational, format_rational
from .bernstein import SampledFunction, moment_sum, operator_poly
from .errors import DomainError
from .qcore import CACHE_SIZE, binom2, gauss_binom, q_difference, q_factorial, q_int

logger = logging.getLogger("qbern")


@dataclass(frozen=True)
class StirlingTable:
    """
    Triangle of (q-)Stirling numbers S(n, k) for 0 <= k <= n <= max_n.

    `q` is None for the classical numbers.
    """
    max_n: int
    values: tuple
    q: Rational | None = None

    @property
    def max_k(self) -> int:
        return self.max_n

    def get(self, n: int, k: int) -> Rational:
        if n < 0 or k < 0 or n > self.max_n:
            raise DomainError(f"S({n}, {k}) is outside the table")
        if k > n:
            return Fraction(0)
        return self.values[n][k]

    def to_rows(self) -> List[List[str]]:
        return [[format_rational(v) for v in row] for row in self.values]

    def to_text(self) -> str:
        rows = self.to_rows()
        width = max(len(v) for row in rows for v in row)
        return "\n".join(
            f"{n:>3} | " + " ".join(v.rjust(width) for v in row)
            for n, row in enumerate(rows)
        )


def stirling2(n: int, k: int) -> Rational:
    """
    Second-kind Stirling number as the k-th forward difference of l^n at
    0 divided by k!.
    """
    if n < 0 or k < 0:
        raise DomainError(f"Stirling numbers need n, k >= 0, got n={n}, k={k}")
    total = sum((-1) ** (k - l) * comb(k, l) * l ** n for l in range(k + 1))
    return Fraction(total, factorial(k))


@lru_cache(maxsize=CACHE_SIZE)
def stirling2_recurrence(n: int, k: int) -> int:
    """S(n, k) from S(n, k) = k S(n-1, k) + S(n-1, k-1)."""
    if n == 0 and k == 0:
        return 1
    if n <= 0 or k <= 0 or k > n:
        return 0
    return k * stirling2_recurrence(n - 1, k) + stirling2_recurrence(n - 1, k - 1)


def delta_q_zero_power(
        k: int, m: int, q: Rational,
        ordering: Literal['forward', 'reverse'] = 'forward'
    ) -> Rational:
    """
    k-th q-difference at 0 of the sequence j -> [j]_q^m.

    At q = 1 this is the classical Delta^k 0^m = k! S(m, k).
    """
    if k < 0 or m < 0:
        raise DomainError(f"Need k, m >= 0, got k={k}, m={m}")
    seq = [q_int(j, q) ** m for j in range(k + 1)]
    return q_difference(seq, k, q, ordering)


def q_stirling2(
        n: int, k: int, q: Rational,
        ordering: Literal['forward', 'reverse'] = 'forward'
    ) -> Rational:
    """
    Second-kind q-Stirling number
    S(n, k : q) = q^(-(k choose 2)) / [k]_q! * Delta_q^k 0^n.

    The 'reverse' ordering evaluates the same alternating sum over
    [k-j]_q^n instead of [j]_q^n. At q = 1 the value is stirling2(n, k).
    """
    return delta_q_zero_power(k, n, q, ordering) \
        / (q ** binom2(k) * q_factorial(k, q))


def stirling_table(max_n: int, q: Rational | None = None) -> StirlingTable:
    """Build the classical (q is None) or q-Stirling triangle up to max_n."""
    if max_n < 0:
        raise DomainError(f"max_n must be >= 0, got {max_n}")
    if q is None:
        values = tuple(
            tuple(stirling2(n, k) for k in range(n + 1)) for n in range(max_n + 1)
        )
    else:
        values = tuple(
            tuple(q_stirling2(n, k, q) for k in range(n + 1))
            for n in range(max_n + 1)
        )
    return StirlingTable(max_n=max_n, values=values, q=q)


def corollary_lhs(n: int, m: int, q: Rational) -> Poly:
    """[n]_q^m times the q-Bernstein operator applied to t^m, as a polynomial in x."""
    f = SampledFunction.from_poly(Poly.monomial(m), name=f"t^{m}")
    return operator_poly(f, n, q).scale(q_int(n, q) ** m)


def corollary_rhs(
        n: int, m: int, q: Rational,
        which: Literal['delta_form', 'stirling_form'] = 'delta_form'
    ) -> Poly:
    """
    Power-moment expansion of the operator as a polynomial in x.

    'delta_form' is sum_k C(n,k)_q x^k Delta_q^k 0^m and 'stirling_form'
    sum_k C(n,k)_q x^k [k]_q! q^(k choose 2) S(m, k : q). Both equal
    [n]_q^m times the operator applied to t^m.
    """
    if n < 1 or m < 0:
        raise DomainError(f"Need n >= 1 and m >= 0, got n={n}, m={m}")
    coeffs = []
    for k in range(n + 1):
        if which == 'delta_form':
            c = delta_q_zero_power(k, m, q)
        elif which == 'stirling_form':
            c = q_factorial(k, q) * q ** binom2(k) * q_stirling2(m, k, q)
        else:
            raise ValueError(f"Unknown form: '{which}'")
        coeffs.append(gauss_binom(n, k, q) * c)
    return Poly(tuple(coeffs))


def generalized_binomial(x, k: int) -> Rational:
    """x (x-1) ... (x-k+1) / k! for rational x."""
    x = Fraction(x)
    out = Fraction(1)
    for i in range(k):
        out *= x - i
    return out / factorial(k)


def falling_factorial_identity(n: int, x) -> Tuple[Rational, Rational]:
    """(x^n, sum_k C(x,k) k! S(n,k)); the two values are equal."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    x = Fraction(x)
    rhs = sum(
        (generalized_binomial(x, k) * factorial(k) * stirling2(n, k)
         for k in range(n + 1)),
        Fraction(0)
    )
    return x ** n, rhs


def falling_factorial_moment_sides(i: int, n: int, x, q: Rational) -> Tuple[Rational, Rational]:
    """
    Falling-factorial expansion of x^i against the q-Bernstein moment sum:
    (sum_k C(x,k) k! S(i,k), sum_{k>=i} C(k,i)_q/C(n,i)_q B_{k,n}(x, q)).
    """
    _, lhs = falling_factorial_identity(i, x)
    return lhs, moment_sum(i, n, q)(Fraction(x))
