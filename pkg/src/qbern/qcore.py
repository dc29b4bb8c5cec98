"""
q-arithmetic primitives: q-integers, q-factorials, Gaussian binomials,
q-shifted factorials and their two series expansions, q-exponential type
series, the Jackson q-derivative on polynomials and the q-difference
operator.

The parameter q is an exact rational in (0, 1]. q-integers are computed
as finite geometric sums, so q = 1 is a regular input and reproduces the
classical integers, factorials and binomial coefficients. Only the Jackson
derivative, which divides by 1 - q, rejects q = 1.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Literal, Sequence

from .algebra import Poly, Rational, TruncSeries, parse_rational
from .errors import InsufficientSequence, InvalidOrder, InvalidQ, QEqualsOne

logger = logging.getLogger("qbern")

CACHE_SIZE = 1 << 16


def as_q(value) -> Rational:
    """
    Parse and validate a q parameter.

    Args:
        value (str | int | Fraction): The value of q.

    Returns:
        Rational: q as a Fraction.

    Raises:
        InvalidQ: If q is not in the interval (0, 1].
    """
    q = parse_rational(value)
    if not 0 < q <= 1:
        raise InvalidQ(f"q must satisfy 0 < q <= 1, got {q}")
    return q


def binom2(i: int) -> int:
    """i choose 2, the exponent of q in the q-binomial theorem."""
    return i * (i - 1) // 2


@lru_cache(maxsize=CACHE_SIZE)
def q_int(n: int, q: Rational) -> Rational:
    """
    The q-integer [n]_q = 1 + q + ... + q^(n-1).

    Args:
        n (int): Nonnegative integer.
        q (Rational): The q parameter.

    Returns:
        Rational: [n]_q; equals n at q = 1 and 0 for n = 0.
    """
    if n < 0:
        raise ValueError(f"q-integers are defined for n >= 0, got {n}")
    s = Fraction(0)
    p = Fraction(1)
    for _ in range(n):
        s += p
        p *= q
    return s


@lru_cache(maxsize=CACHE_SIZE)
def q_factorial(n: int, q: Rational) -> Rational:
    """[n]_q! = [1]_q [2]_q ... [n]_q, with [0]_q! = 1."""
    if n < 0:
        raise ValueError(f"q-factorials are defined for n >= 0, got {n}")
    if n == 0:
        return Fraction(1)
    return q_factorial(n - 1, q) * q_int(n, q)


@lru_cache(maxsize=CACHE_SIZE)
def gauss_binom(n: int, k: int, q: Rational) -> Rational:
    """
    Gaussian binomial coefficient.

    Args:
        n (int): Upper index, n >= 0.
        k (int): Lower index; any integer.

    Returns:
        Rational: [n]_q!/([k]_q! [n-k]_q!) for 0 <= k <= n, otherwise 0.
    """
    if k < 0 or k > n:
        return Fraction(0)
    return q_factorial(n, q) / (q_factorial(k, q) * q_factorial(n - k, q))


@lru_cache(maxsize=CACHE_SIZE)
def gauss_binom_recursive(
        n: int, k: int, q: Rational,
        form: Literal['lower', 'upper'] = 'lower'
    ) -> Rational:
    """
    Gaussian binomial by Pascal-type recursion, used as an oracle.

    The 'lower' form uses C(n,k) = C(n-1,k-1) + q^k C(n-1,k), the 'upper'
    form C(n,k) = q^(n-k) C(n-1,k-1) + C(n-1,k).
    """
    if k < 0 or k > n:
        return Fraction(0)
    if k == 0 or k == n:
        return Fraction(1)
    left = gauss_binom_recursive(n - 1, k - 1, q, form)
    right = gauss_binom_recursive(n - 1, k, q, form)
    if form == 'lower':
        return left + q ** k * right
    return q ** (n - k) * left + right


def q_shifted_factorial(b, n: int, q: Rational) -> Rational:
    """The finite product (1-b)_q^n = (1-b)(1-bq)...(1-bq^(n-1))."""
    if n < 0:
        raise ValueError(f"q-shifted factorials need n >= 0, got {n}")
    b = Fraction(b)
    result = Fraction(1)
    p = Fraction(1)
    for _ in range(n):
        result *= 1 - b * p
        p *= q
    return result


def q_shifted_factorial_powers(b, n: int, q: Rational) -> list:
    """[(1-b)_q^0, (1-b)_q^1, ..., (1-b)_q^n] via running products."""
    b = Fraction(b)
    out = [Fraction(1)]
    p = Fraction(1)
    for _ in range(n):
        out.append(out[-1] * (1 - b * p))
        p *= q
    return out


@lru_cache(maxsize=CACHE_SIZE)
def q_binom_expand(n: int, q: Rational) -> Poly:
    """
    Expansion of (1-b)_q^n as a polynomial in b.

    The coefficient of b^i is C(n,i)_q q^(i choose 2) (-1)^i.
    """
    if n < 0:
        raise ValueError(f"Expansion needs n >= 0, got {n}")
    return Poly(tuple(
        gauss_binom(n, i, q) * q ** binom2(i) * (-1) ** i for i in range(n + 1)
    ))


def q_reciprocal_series(N: int, n: int, q: Rational) -> TruncSeries:
    """
    Series of 1/(1-b)_q^n in b truncated after b^N.

    Args:
        N (int): Truncation order, N >= 0.
        n (int): Number of factors, n >= 1.

    Returns:
        TruncSeries: Coefficient i equals C(n+i-1, i)_q.

    Raises:
        InvalidOrder: If n < 1 or N < 0.
    """
    if n < 1:
        raise InvalidOrder(f"The reciprocal series needs n >= 1, got {n}")
    if N < 0:
        raise InvalidOrder(f"The truncation order must be >= 0, got {N}")
    return TruncSeries(
        tuple(gauss_binom(n + i - 1, i, q) for i in range(N + 1)), N
    )


def q_egf_series(terms: Sequence, q: Rational) -> TruncSeries:
    """
    q-exponential type series sum_n a_n t^n / [n]_q! for given terms.

    With a_n = (1-x)_q^n this is the series e_q((1-x)_q t) that appears
    in the generating function of the q-Bernstein basis; with
    a_n = (x(1-q))^n it is e_q(x(1-q)) in the scalar reading.

    Args:
        terms (Sequence): a_0, ..., a_N.

    Returns:
        TruncSeries: Order N series with raw coefficients a_n/[n]_q!.
    """
    if not terms:
        raise InvalidOrder("At least one term is needed")
    return TruncSeries(
        tuple(Fraction(a) / q_factorial(n, q) for n, a in enumerate(terms)),
        len(terms) - 1
    )


def q_exponential_terms(x, N: int, q: Rational) -> list:
    """Term provider (x(1-q))^n, n = 0..N, for the scalar e_q reading."""
    base = Fraction(x) * (1 - q)
    return [base ** n for n in range(N + 1)]


def q_derivative(p: Poly, q: Rational) -> Poly:
    """
    Jackson q-derivative of a polynomial, x^n -> [n]_q x^(n-1).

    Raises:
        QEqualsOne: If q = 1.
    """
    if q == 1:
        raise QEqualsOne(
            "The Jackson q-derivative divides by 1 - q and is undefined at q = 1"
        )
    return Poly(tuple(q_int(n, q) * c for n, c in enumerate(p.coeffs))[1:])


def jackson_quotient(p: Poly, q: Rational, x) -> Rational:
    """(p(x) - p(qx)) / ((1-q) x), the defining difference quotient, x != 0."""
    if q == 1:
        raise QEqualsOne("The Jackson quotient is undefined at q = 1")
    x = Fraction(x)
    return (p(x) - p(q * x)) / ((1 - q) * x)


def q_difference(
        seq: Sequence, n: int, q: Rational,
        ordering: Literal['forward', 'reverse'] = 'forward'
    ) -> Rational:
    """
    n-th q-difference of a sequence at 0.

    The forward ordering sums C(n,k)_q (-1)^(n-k) q^((n-k) choose 2) f(k),
    the reverse ordering C(n,k)_q (-1)^k q^(k choose 2) f(n-k). Both are
    the same number; at q = 1 this is the classical forward difference.

    Args:
        seq (Sequence): f(0), f(1), ... with at least n+1 entries.
        n (int): Order of the difference, n >= 0.

    Raises:
        InsufficientSequence: If seq has fewer than n+1 entries.
    """
    if len(seq) < n + 1:
        raise InsufficientSequence(
            f"A q-difference of order {n} needs {n + 1} sequence values, "
            f"got {len(seq)}"
        )
    total = Fraction(0)
    for k in range(n + 1):
        if ordering == 'forward':
            j, value = n - k, seq[k]
        else:
            j, value = k, seq[n - k]
        if value == 0:
            continue
        term = gauss_binom(n, k, q) * q ** binom2(j) * value
        total += -term if j % 2 else term
    return total


def q_difference_of(
        f: Callable[[int], Rational], n: int, q: Rational
    ) -> Rational:
    """Convenience wrapper: q-difference of j -> f(j), j = 0..n."""
    return q_difference([f(j) for j in range(n + 1)], n, q)
