"""
Higher-order Bernoulli numbers, the q-Bernoulli polynomials of order k
and the closed forms that express q-Bernstein polynomials through them.

Bernoulli numbers of order k are read off the truncated series
(t/(e^t - 1))^k; the same series code path feeds the truncated-series
oracle that the closed forms are certified against.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Callable, List, Literal

from .algebra import Rational, TruncSeries, format_rational, series_invert, series_mul, series_pow
from .bernstein import genfun_series
from .errors import DomainError
from .qcore import (
    CACHE_SIZE, gauss_binom, q_difference, q_egf_series, q_factorial,
    q_shifted_factorial_powers
)
from .stirling import stirling2

logger = logging.getLogger("qbern")


@dataclass(frozen=True)
class BernoulliTable:
    """Bernoulli numbers B_m^(k) of a fixed order k for m = 0..max_m."""
    order: int
    values: tuple

    @property
    def max_m(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, m: int) -> Rational:
        return self.values[m]

    def to_rows(self) -> List[dict]:
        return [
            {'order': self.order, 'm': m, 'value': format_rational(v)}
            for m, v in enumerate(self.values)
        ]


def exp_series(order: int, x=1) -> TruncSeries:
    """Truncation of e^(x t): raw coefficients x^n / n!."""
    x = Fraction(x)
    return TruncSeries(tuple(x ** n / factorial(n) for n in range(order + 1)), order)


def exp_minus_one_series(order: int) -> TruncSeries:
    """Truncation of e^t - 1."""
    return TruncSeries(
        (0,) + tuple(Fraction(1, factorial(n)) for n in range(1, order + 1)), order
    )


@lru_cache(maxsize=CACHE_SIZE)
def bernoulli_series(k: int, order: int) -> TruncSeries:
    """
    Truncation of (t / (e^t - 1))^k, obtained by inverting (e^t - 1)/t
    and raising the result to the k-th power.
    """
    if k < 1:
        raise DomainError(f"The Bernoulli order must be >= 1, got {k}")
    # (e^t - 1)/t has raw coefficients 1/(n+1)!
    quotient = TruncSeries(
        tuple(Fraction(1, factorial(n + 1)) for n in range(order + 1)), order
    )
    return series_pow(series_invert(quotient), k)


@lru_cache(maxsize=CACHE_SIZE)
def bernoulli_numbers(k: int, max_m: int) -> BernoulliTable:
    """
    Bernoulli numbers of order k, B_m^(k) = m! [t^m] (t/(e^t - 1))^k.

    Args:
        k (int): Order, k >= 1.
        max_m (int): Largest index, max_m >= 0.

    Returns:
        BernoulliTable: B_0^(k), ..., B_max_m^(k).
    """
    if max_m < 0:
        raise DomainError(f"max_m must be >= 0, got {max_m}")
    series = bernoulli_series(k, max_m)
    return BernoulliTable(
        order=k,
        values=tuple(series.coeff(m) * factorial(m) for m in range(max_m + 1))
    )


def bernoulli_recurrence_residual(m: int, values) -> Rational:
    """sum_{j=0}^{m} C(m+1, j) B_j, which vanishes for m >= 1."""
    return sum((comb(m + 1, j) * values[j] for j in range(m + 1)), Fraction(0))


def _q_bernoulli_sum(
        n: int, k: int, q: Rational, power: Callable[[int], Rational]
    ) -> Rational:
    # shared kernel: sum_m C(n,m)_q [m]_q!/m! power(n-m) B_m^(k)
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    table = bernoulli_numbers(k, n)
    total = Fraction(0)
    for m in range(n + 1):
        if table[m] == 0:
            continue
        total += gauss_binom(n, m, q) * q_factorial(m, q) / factorial(m) \
            * power(n - m) * table[m]
    return total


def q_bernoulli(n: int, k: int, x, q: Rational) -> Rational:
    """
    q-Bernoulli polynomial of order k evaluated at x,
    sum_m C(n,m)_q ([m]_q!/m!) x^(n-m) B_m^(k).
    """
    x = Fraction(x)
    return _q_bernoulli_sum(n, k, q, lambda j: x ** j)


def q_bernoulli_umbral(n: int, k: int, x, q: Rational) -> Rational:
    """
    q-Bernoulli polynomial with the powers x^j replaced by the q-shifted
    factorials (1-x)_q^j.
    """
    powers = q_shifted_factorial_powers(x, n, q) if n >= 0 else []
    return _q_bernoulli_sum(n, k, q, lambda j: powers[j])


def bernoulli_polynomial(n: int, k: int, x) -> Rational:
    """Classical Bernoulli polynomial of order k, n! [t^n] (t/(e^t-1))^k e^(xt)."""
    series = series_mul(bernoulli_series(k, n), exp_series(n, x))
    return series.coeff(n) * factorial(n)


def _check_kl(k: int, l: int):
    if k < 1 or l < 0:
        raise DomainError(f"Need k >= 1 and l >= 0, got k={k}, l={l}")


def theorem10_rhs(k: int, l: int, x, q: Rational) -> Rational:
    """
    Closed form of B_{k,l}(x, q) through Stirling numbers and umbral
    q-Bernoulli polynomials:
    (k!/[k]_q!) x^k sum_m ([m]_q!/m!) S(m,k) C(l,m)_q beta_{l-m}^(k)((1-x)_q, q).
    """
    _check_kl(k, l)
    x = Fraction(x)
    total = Fraction(0)
    for m in range(k, l + 1):
        s = stirling2(m, k)
        if s == 0:
            continue
        total += q_factorial(m, q) / factorial(m) * s * gauss_binom(l, m, q) \
            * q_bernoulli_umbral(l - m, k, x, q)
    return Fraction(factorial(k)) / q_factorial(k, q) * x ** k * total


def corollary11_rhs(k: int, l: int, x, q: Rational) -> Rational:
    """
    The closed form with k! S(m, k) replaced by the forward difference
    Delta^k 0^m.
    """
    _check_kl(k, l)
    x = Fraction(x)
    total = Fraction(0)
    for m in range(k, l + 1):
        delta = q_difference([Fraction(j) ** m for j in range(k + 1)], k, Fraction(1))
        if delta == 0:
            continue
        total += q_factorial(m, q) / factorial(m) * gauss_binom(l, m, q) \
            * q_bernoulli_umbral(l - m, k, x, q) * delta
    return x ** k / q_factorial(k, q) * total


def series_order(k: int, l: int) -> int:
    # one guard term beyond the highest extracted coefficient
    return l + k + 2


def genfun30_coefficient(
        k: int, l: int, x, q: Rational,
        form: Literal['direct', 'factored'] = 'direct'
    ) -> Rational:
    """
    [l]_q! times the coefficient of t^l in (tx)^k/[k]_q! e_q((1-x)_q t).

    The 'direct' form builds that series as written; the 'factored' form
    builds it as x^k/[k]_q! (e^t - 1)^k (t/(e^t - 1))^k e_q((1-x)_q t),
    through the Stirling and Bernoulli series. Both equal B_{k,l}(x, q).
    """
    _check_kl(k, l)
    x = Fraction(x)
    order = series_order(k, l)
    if form == 'direct':
        series = genfun_series(k, x, q, order)
    elif form == 'factored':
        egf = q_egf_series(q_shifted_factorial_powers(x, order, q), q)
        kernel = series_mul(
            series_pow(exp_minus_one_series(order), k), bernoulli_series(k, order)
        )
        series = series_mul(kernel, egf) * (x ** k / q_factorial(k, q))
    else:
        raise ValueError(f"Unknown form: '{form}'")
    return series.coeff(l) * q_factorial(l, q)
