"""
Phillips q-Bernstein basis polynomials and the q-Bernstein operator.

B_{k,n}(x, q) = C(n,k)_q x^k (1-x)_q^(n-k) is computed four ways (the
defining product, the degree recurrence, the power-basis expansion and the
generating function coefficient) so the representations can be checked
against each other. The module also carries the structural identities of
the basis (q-derivative, degree reduction, neighbour ratio, moments), the
operator and its q-difference form, the conversion matrices between the
q-Bernstein and power bases and the q-binomial probability mass function.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, Literal, Sequence, Tuple

from .algebra import (
    Poly, Rational, RMatrix, TruncSeries, mat_inverse, series_mul
)
from .errors import DomainError, PoleAtSample
from .qcore import (
    CACHE_SIZE, binom2, gauss_binom, q_binom_expand, q_difference,
    q_egf_series, q_factorial, q_int, q_shifted_factorial,
    q_shifted_factorial_powers
)

logger = logging.getLogger("qbern")

# Evaluation grid for identities that hold pointwise in x
X_GRID = tuple(Fraction(j, 7) for j in range(1, 7)) + (Fraction(0), Fraction(1))


@dataclass(frozen=True)
class SampledFunction:
    """
    A function on [0, 1] to be fed into the q-Bernstein operator.

    `exact` maps a Fraction to a Fraction and is None for transcendental
    functions; `approx` maps a float to a float and is always present.
    """
    name: str
    approx: Callable[[float], float]
    exact: Callable[[Rational], Rational] | None = None

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    @classmethod
    def from_poly(cls, p: Poly, name: str | None = None) -> "SampledFunction":
        coeffs = [float(c) for c in p.coeffs]

        def approx(t):
            acc = 0.0
            for c in reversed(coeffs):
                acc = acc * t + c
            return acc

        return cls(name=name or f"poly:{p}", approx=approx, exact=p)


def _in_range(k: int, n: int) -> bool:
    return n >= 0 and 0 <= k <= n


@lru_cache(maxsize=CACHE_SIZE)
def basis_poly(k: int, n: int, q: Rational) -> Poly:
    """
    The q-Bernstein basis polynomial from its defining product.

    Args:
        k (int): Basis index.
        n (int): Degree.
        q (Rational): The q parameter.

    Returns:
        Poly: C(n,k)_q x^k (1-x)_q^(n-k); the zero polynomial when k < 0
            or k > n.
    """
    if not _in_range(k, n):
        return Poly.zero()
    return q_binom_expand(n - k, q).shift(k).scale(gauss_binom(n, k, q))


def recurrence_step(
        k: int, n: int, q: Rational,
        lower: Callable[[int, int, Rational], Poly] = basis_poly
    ) -> Poly:
    """
    One step of the degree recurrence
    q^k (1 - q^(n-k-1) x) B_{k,n-1} + x B_{k-1,n-1}, with the degree n-1
    polynomials taken from `lower`.
    """
    out = lower(k - 1, n - 1, q).shift(1)
    if k <= n - 1:
        factor = Poly((1, -q ** (n - k - 1)))
        out = out + (factor * lower(k, n - 1, q)).scale(q ** k)
    return out


@lru_cache(maxsize=CACHE_SIZE)
def basis_poly_via_recurrence(k: int, n: int, q: Rational) -> Poly:
    """The q-Bernstein basis polynomial built by the degree recurrence."""
    if not _in_range(k, n):
        return Poly.zero()
    if n == 0:
        return Poly.one()
    return recurrence_step(k, n, q, basis_poly_via_recurrence)


@lru_cache(maxsize=CACHE_SIZE)
def basis_power_expansion(k: int, n: int, q: Rational) -> Poly:
    """
    The q-Bernstein basis polynomial in the power basis,
    sum_{i=k}^{n} C(n,i)_q C(i,k)_q (-1)^(i-k) q^((i-k) choose 2) x^i.
    """
    if not _in_range(k, n):
        return Poly.zero()
    coeffs = [Fraction(0)] * (n + 1)
    for i in range(k, n + 1):
        j = i - k
        c = gauss_binom(n, i, q) * gauss_binom(i, k, q) * q ** binom2(j)
        coeffs[i] = -c if j % 2 else c
    return Poly(tuple(coeffs))


def basis_qderivative(k: int, n: int, q: Rational) -> Poly:
    """
    Closed form of the q-derivative of B_{k,n}:
    [n]_q q^(-k) (q B_{k-1,n-1}(qx) - B_{k,n-1}(qx)).

    The right-hand side is defined for every q, including q = 1 where it
    is the ordinary derivative.
    """
    if n < 1 or not _in_range(k, n):
        return Poly.zero()
    inner = (basis_poly(k - 1, n - 1, q).scale(q)
             - basis_poly(k, n - 1, q)).scale_variable(q)
    return inner.scale(q_int(n, q) / q ** k)


def degree_reduction_sides(k: int, n: int, q: Rational) -> Tuple[Poly, Poly]:
    """
    Both sides of the degree reduction identity
    ([n-k]_q/[n]_q) B_{k,n} + ([k+1]_q/[n]_q) B_{k+1,n}
        = B_{k,n-1} + x [n-k-1]_q (1-q) B_{k,n-1}.

    Args:
        k (int): Basis index, 0 <= k <= n.
        n (int): Degree, n >= 1.

    Returns:
        Tuple[Poly, Poly]: (left, right).
    """
    if n < 1:
        raise DomainError(f"Degree reduction needs n >= 1, got {n}")
    if not 0 <= k <= n:
        raise DomainError(f"Degree reduction needs 0 <= k <= n, got k={k}, n={n}")
    qn = q_int(n, q)
    left = basis_poly(k, n, q).scale(q_int(n - k, q) / qn) \
        + basis_poly(k + 1, n, q).scale(q_int(k + 1, q) / qn)
    if k <= n - 1:
        lower = basis_poly(k, n - 1, q)
        right = lower + lower.shift(1).scale(q_int(n - k - 1, q) * (1 - q))
    else:
        right = Poly.zero()
    return left, right


def ratio_step_sides(k: int, n: int, q: Rational, x) -> Tuple[Rational, Rational]:
    """
    Both sides of B_{k,n}(x) = ([n-k+1]_q/[k]_q) (x/(1 - x q^(n-k))) B_{k-1,n}(x).

    Raises:
        DomainError: Unless 1 <= k <= n.
        PoleAtSample: If 1 - x q^(n-k) = 0.
    """
    if not 1 <= k <= n:
        raise DomainError(f"The ratio step needs 1 <= k <= n, got k={k}, n={n}")
    x = Fraction(x)
    denom = 1 - x * q ** (n - k)
    if denom == 0:
        raise PoleAtSample(
            f"x = {x} is a pole of the ratio step for k={k}, n={n}, q={q}"
        )
    lhs = basis_poly(k, n, q)(x)
    rhs = q_int(n - k + 1, q) / q_int(k, q) * (x / denom) \
        * basis_poly(k - 1, n, q)(x)
    return lhs, rhs


def ratio_step(k: int, n: int, q: Rational, samples: Sequence | None = None) -> bool:
    """
    Check the neighbour ratio identity at the given x samples (default: the
    x grid without poles).
    """
    if samples is None:
        samples = [x for x in X_GRID if 1 - x * q ** (n - k) != 0]
    for x in samples:
        lhs, rhs = ratio_step_sides(k, n, q, x)
        if lhs != rhs:
            logger.info(f"Ratio step fails at k={k}, n={n}, q={q}, x={x}")
            return False
    return True


@lru_cache(maxsize=CACHE_SIZE)
def moment_sum(i: int, n: int, q: Rational) -> Poly:
    """sum_{k=i}^{n} (C(k,i)_q / C(n,i)_q) B_{k,n}(x, q), which equals x^i."""
    if not 0 <= i <= n:
        raise DomainError(f"Moments need 0 <= i <= n, got i={i}, n={n}")
    denom = gauss_binom(n, i, q)
    out = Poly.zero()
    for k in range(i, n + 1):
        out = out + basis_poly(k, n, q).scale(gauss_binom(k, i, q) / denom)
    return out


def operator_nodes(n: int, q: Rational) -> List[Rational]:
    """Nodes [k]_q / [n]_q, k = 0..n."""
    qn = q_int(n, q)
    return [q_int(k, q) / qn for k in range(n + 1)]


def operator_weights(n: int, q: Rational, x) -> List[Rational]:
    """
    Exact values B_{k,n}(x, q), k = 0..n, from the product form.

    Raises:
        DomainError: If x is outside [0, 1] or a weight is negative.
    """
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    shifted = q_shifted_factorial_powers(x, n, q)
    weights = []
    xk = Fraction(1)
    for k in range(n + 1):
        weights.append(gauss_binom(n, k, q) * xk * shifted[n - k])
        xk *= x
    if any(w < 0 for w in weights):
        raise DomainError(
            f"Negative q-Bernstein weight at n={n}, q={q}, x={x}"
        )
    return weights


def _node_values(f: SampledFunction, n: int, q: Rational) -> List[Rational]:
    if not f.is_exact:
        raise DomainError(
            f"Function '{f.name}' has no exact evaluator; "
            "use the approximation harness instead"
        )
    return [Fraction(f.exact(t)) for t in operator_nodes(n, q)]


def _check_operator_args(n: int, x) -> Rational:
    if n < 1:
        raise DomainError(f"The operator order must be >= 1, got {n}")
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    return x


def operator_poly(f: SampledFunction, n: int, q: Rational) -> Poly:
    """The q-Bernstein operator of order n applied to f, as a polynomial in x."""
    out = Poly.zero()
    for k, v in enumerate(_node_values(f, n, q)):
        if v:
            out = out + basis_poly(k, n, q).scale(v)
    return out


def operator_apply(f: SampledFunction, n: int, q: Rational, x) -> Rational:
    """
    The q-Bernstein operator sum_k B_{k,n}(x, q) f([k]_q/[n]_q), exactly.

    Args:
        f (SampledFunction): Function with an exact evaluator.
        n (int): Operator order, n >= 1.
        q (Rational): The q parameter.
        x (Rational): Evaluation point in [0, 1].

    Returns:
        Rational: The operator value.
    """
    x = _check_operator_args(n, x)
    values = _node_values(f, n, q)
    return sum(
        (w * v for w, v in zip(operator_weights(n, q, x), values)), Fraction(0)
    )


def operator_delta_poly(
        f: SampledFunction, n: int, q: Rational,
        ordering: Literal['forward', 'reverse'] = 'forward'
    ) -> Poly:
    """
    The operator in q-difference form, sum_k C(n,k)_q x^k Delta_q^k f_0,
    where Delta_q acts on the node sequence j -> f([j]_q/[n]_q).

    The forward ordering is the explicit double sum over f([j]_q/[n]_q);
    the reverse ordering evaluates Delta_q^k f_0 from the other end.
    """
    values = _node_values(f, n, q)
    return Poly(tuple(
        gauss_binom(n, k, q) * q_difference(values, k, q, ordering)
        for k in range(n + 1)
    ))


def operator_delta_form(f: SampledFunction, n: int, q: Rational, x) -> Rational:
    """Operator value computed from the q-difference form; equals operator_apply."""
    x = _check_operator_args(n, x)
    return operator_delta_poly(f, n, q)(x)


def genfun_series(k: int, x, q: Rational, order: int) -> TruncSeries:
    """
    Truncation of x^k t^k/[k]_q! e_q((1-x)_q t), the generating function
    of B_{k,n}(x, q) in the normalisation t^n/[n]_q!.
    """
    x = Fraction(x)
    egf = q_egf_series(q_shifted_factorial_powers(x, order, q), q)
    prefactor = TruncSeries.one(order).shift(k) * (x ** k / q_factorial(k, q))
    return series_mul(prefactor, egf)


def genfun_coefficient(k: int, n: int, x, q: Rational) -> Rational:
    """[n]_q! times the coefficient of t^n in the generating function; equals B_{k,n}(x, q)."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return genfun_series(k, x, q, n).coeff(n) * q_factorial(n, q)


@lru_cache(maxsize=CACHE_SIZE)
def to_power_matrix(n: int, q: Rational) -> RMatrix:
    """
    Matrix M with M[i][k] the coefficient of x^i in B_{k,n}(x, q).

    M maps q-Bernstein coefficients (C_0, ..., C_n) to power-basis
    coefficients; it is lower triangular with unit corners.
    """
    columns = [basis_power_expansion(k, n, q) for k in range(n + 1)]
    return RMatrix(tuple(
        tuple(columns[k].coeff(i) for k in range(n + 1)) for i in range(n + 1)
    ))


@lru_cache(maxsize=CACHE_SIZE)
def from_power_matrix(n: int, q: Rational) -> RMatrix:
    """Inverse of to_power_matrix, obtained by exact elimination."""
    return mat_inverse(to_power_matrix(n, q))


def moment_matrix(n: int, q: Rational) -> RMatrix:
    """
    Closed form of the inverse conversion matrix: entry (k, i) is
    C(k,i)_q / C(n,i)_q, the weight of B_{k,n} in x^i.
    """
    return RMatrix(tuple(
        tuple(gauss_binom(k, i, q) / gauss_binom(n, i, q) for i in range(n + 1))
        for k in range(n + 1)
    ))


def to_bernstein_coefficients(p: Poly, n: int, q: Rational) -> List[Rational]:
    """Coefficients C_0..C_n with p = sum_k C_k B_{k,n}(x, q); needs deg p <= n."""
    if p.degree > n:
        raise DomainError(
            f"A polynomial of degree {p.degree} has no degree {n} "
            "q-Bernstein representation"
        )
    column = RMatrix(tuple((p.coeff(i),) for i in range(n + 1)))
    return [row[0] for row in (from_power_matrix(n, q) @ column).entries]


def from_bernstein_coefficients(c: Sequence, q: Rational) -> Poly:
    """The polynomial sum_k c_k B_{k,n}(x, q) with n = len(c) - 1."""
    n = len(c) - 1
    column = RMatrix(tuple((Fraction(v),) for v in c))
    return Poly(tuple(row[0] for row in (to_power_matrix(n, q) @ column).entries))


def pmf(n: int, k: int, x, q: Rational) -> Rational:
    """
    Probability mass of the q-binomial distribution,
    C(n,k)_q x^k (1-x)_q^(n-k); q = 1 gives the binomial law.

    Raises:
        DomainError: If x is outside [0, 1] or k outside 0..n.
    """
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    if not 0 <= k <= n:
        raise DomainError(f"k must satisfy 0 <= k <= n, got k={k}, n={n}")
    return gauss_binom(n, k, q) * x ** k * q_shifted_factorial(x, n - k, q)


def classical_bit_error(n: int, xi, threshold: int) -> Rational:
    """
    Probability of at least `threshold` errors in n independent
    transmissions with error probability xi, e.g. the failure probability
    of a majority vote over repeated bits.
    """
    return sum(
        (pmf(n, k, xi, Fraction(1)) for k in range(threshold, n + 1)),
        Fraction(0)
    )
