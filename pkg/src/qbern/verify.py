"""
Certification of the library's identities.

Every identity is registered with its parameter ranges, a conservative
bound D on the degree in q of both sides once the documented denominator
is cleared, and a comparison mode. For each parameter tuple the engine
compares the two sides at D+1 distinct rational q values from a fixed
sequence (plus q = 1 where the identity permits it). Agreement at D+1
points of a polynomial of degree at most D certifies the identity for
every q, not only at the samples.

Identities in 'poly-in-x' mode are compared as exact polynomials in x (or
as exact scalars when they do not depend on x); 'pointwise' identities are
compared at rational x samples that avoid their poles.
"""

import json
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import product, repeat
from math import comb, isqrt
from typing import Any, Callable, Dict, List, Literal, Tuple

from pydantic import BaseModel, ConfigDict

from .algebra import Poly, Rational, RMatrix, TruncSeries, format_rational, series_mul
from .bernoulli import (
    bernoulli_numbers, bernoulli_recurrence_residual, bernoulli_series,
    corollary11_rhs, genfun30_coefficient, q_bernoulli, q_bernoulli_umbral,
    theorem10_rhs
)
from .bernstein import (
    X_GRID, SampledFunction, basis_poly, basis_poly_via_recurrence,
    basis_power_expansion, basis_qderivative, degree_reduction_sides,
    from_power_matrix, genfun_coefficient, moment_matrix, moment_sum,
    operator_delta_poly, operator_poly, pmf, ratio_step_sides, recurrence_step,
    to_power_matrix
)
from .env import QbernSettings
from .errors import UnknownIdentity
from .qcore import (
    binom2, gauss_binom, gauss_binom_recursive, jackson_quotient, q_binom_expand,
    q_derivative, q_difference, q_egf_series, q_factorial, q_int,
    q_reciprocal_series, q_shifted_factorial
)
from .schemas import Counterexample, IdentityReport
from .stirling import (
    corollary_lhs, corollary_rhs, delta_q_zero_power, falling_factorial_identity,
    falling_factorial_moment_sides, q_stirling2, stirling2, stirling2_recurrence
)

logger = logging.getLogger("qbern")

Params = Dict[str, int]


def _always(p: Params) -> bool:
    return True


class IdentitySpec(BaseModel):
    """
    A registered identity.

    `sides(params, q, x, data)` returns the two sides; x is None in
    'poly-in-x' mode and `data` is whatever `fixture(params, rng)` drew
    for the parameter tuple (random polynomials, sequences), fixed across
    all q samples of that tuple.
    """
    model_config = ConfigDict(frozen=True, extra='forbid')

    id: str
    description: str
    param_ranges: Dict[str, Tuple[int, int]]
    constraint: Callable[[Params], bool] = _always
    q_degree_bound: Callable[[Params], int]
    comparison_mode: Literal['poly-in-x', 'pointwise'] = 'poly-in-x'
    allow_q_one: bool = True
    sides: Callable[..., Tuple[Any, Any]]
    fixture: Callable[[Params, random.Random], Any] | None = None
    x_samples: Callable[[Params, random.Random], List[Rational]] | None = None
    pole: Callable[[Params, Rational, Rational], bool] | None = None

    def param_grid(self) -> List[Params]:
        """All parameter tuples in lexicographic order of the declared ranges."""
        names = list(self.param_ranges)
        ranges = [range(lo, hi + 1) for lo, hi in self.param_ranges.values()]
        grid = [dict(zip(names, values)) for values in product(*ranges)]
        return [p for p in grid if self.constraint(p)]


class Mutation(BaseModel):
    """A deliberately wrong variant of a registered identity."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    name: str
    target: str
    description: str
    sides: Callable[..., Tuple[Any, Any]]


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, isqrt(p) + 1))


def q_sample_sequence(count: int) -> List[Rational]:
    """
    The first `count` terms of 1/2, 1/3, 2/3, 1/5, 2/5, 3/5, 4/5, 1/7, ...

    Fractions a/p with prime p are pairwise distinct, so the sequence
    never repeats a value.
    """
    out = []
    p = 2
    while len(out) < count:
        if _is_prime(p):
            out.extend(Fraction(a, p) for a in range(1, p))
        p += 1
    return out[:count]


def _param_key(p: Params) -> str:
    return ",".join(f"{k}={v}" for k, v in p.items())


def _render(value) -> str:
    if isinstance(value, Poly):
        return str(value)
    if isinstance(value, (TruncSeries, RMatrix)):
        return json.dumps(value.to_list())
    if isinstance(value, (tuple, list)):
        return "(" + ", ".join(_render(v) for v in value) + ")"
    return format_rational(value)


def _negate(value):
    if isinstance(value, RMatrix):
        return RMatrix(tuple(tuple(-e for e in row) for row in value.entries))
    if isinstance(value, TruncSeries):
        return value * -1
    if isinstance(value, (tuple, list)):
        return tuple(_negate(v) for v in value)
    return -value


# Random fixtures. Coefficients are nonzero so that constant terms and
# endpoint values never vanish by accident.

def _random_rational(rng: random.Random) -> Rational:
    return Fraction(rng.randint(1, 9) * rng.choice((1, -1)), rng.randint(1, 5))


def _random_poly(rng: random.Random, degree: int) -> Poly:
    return Poly(tuple(_random_rational(rng) for _ in range(degree + 1)))


def _random_points(rng: random.Random, count: int, lo, hi) -> List[Rational]:
    points = set()
    while len(points) < count:
        d = rng.randint(1, 12)
        points.add(Fraction(rng.randint(lo * d, hi * d), d))
    return sorted(points)


def _poly_fixture(p: Params, rng: random.Random) -> SampledFunction:
    return SampledFunction.from_poly(_random_poly(rng, p['d']))


def _unit_points(p: Params, rng: random.Random) -> List[Rational]:
    return _random_points(rng, 10, 0, 1)


def _k_le_n(p: Params) -> bool:
    return p['k'] <= p['n']


def _basis_bound(p: Params) -> int:
    return binom2(p['n']) + p['n']


# Gaussian binomials and the q-binomial theorem

def _pascal_lower(p, q, x, data):
    return gauss_binom(p['n'], p['k'], q), gauss_binom_recursive(p['n'], p['k'], q, 'lower')


def _pascal_upper(p, q, x, data):
    return gauss_binom(p['n'], p['k'], q), gauss_binom_recursive(p['n'], p['k'], q, 'upper')


def _symmetry(p, q, x, data):
    return gauss_binom(p['n'], p['k'], q), gauss_binom(p['n'], p['n'] - p['k'], q)


def _shifted_factorial_product(n: int, q: Rational) -> Poly:
    out = Poly.one()
    for i in range(n):
        out = out * Poly((1, -q ** i))
    return out


def _qbinomial_theorem(p, q, x, data):
    return q_binom_expand(p['n'], q), _shifted_factorial_product(p['n'], q)


def _reciprocal(p, q, x, data):
    n, N = p['n'], p['N']
    product_ = series_mul(
        q_reciprocal_series(N, n, q), TruncSeries.from_poly(q_binom_expand(n, q), N)
    )
    return product_, TruncSeries.one(N)


def _product_rule(p, q, x, data):
    f, g = data
    lhs = q_derivative(f * g, q)
    rhs = f.scale_variable(q) * q_derivative(g, q) + g * q_derivative(f, q)
    return lhs, rhs


def _jackson(p, q, x, data):
    return q_derivative(data, q)(x), jackson_quotient(data, q, x)


def _difference_orderings(p, q, x, data):
    n = p['n']
    return q_difference(data, n, q, 'forward'), q_difference(data, n, q, 'reverse')


# q-Bernstein basis and operator

_IDENTITY_FN = SampledFunction.from_poly(Poly.x(), name="t")


def _partition(p, q, x, data):
    n = p['n']
    total = Poly.zero()
    for k in range(n + 1):
        total = total + basis_poly(k, n, q)
    return total, Poly.one()


def _linear_precision(p, q, x, data):
    return operator_poly(_IDENTITY_FN, p['n'], q), Poly.x()


def _endpoints(p, q, x, data):
    out = operator_poly(data, p['n'], q)
    return (out(0), out(1)), (data.exact(Fraction(0)), data.exact(Fraction(1)))


def _explicit_form(p, q, x, data):
    return operator_poly(data, p['n'], q), operator_delta_poly(data, p['n'], q, 'forward')


def _delta_form(p, q, x, data):
    return operator_poly(data, p['n'], q), operator_delta_poly(data, p['n'], q, 'reverse')


def _recurrence_build(p, q, x, data):
    return basis_poly(p['k'], p['n'], q), basis_poly_via_recurrence(p['k'], p['n'], q)


def _recurrence(p, q, x, data):
    return recurrence_step(p['k'], p['n'], q), basis_poly(p['k'], p['n'], q)


def _qderivative(p, q, x, data):
    k, n = p['k'], p['n']
    return q_derivative(basis_poly(k, n, q), q), basis_qderivative(k, n, q)


def _degree_reduction(p, q, x, data):
    return degree_reduction_sides(p['k'], p['n'], q)


def _ratio_pole(p, q, x) -> bool:
    return 1 - x * q ** (p['n'] - p['k']) == 0


def _ratio(p, q, x, data):
    return ratio_step_sides(p['k'], p['n'], q, x)


def _power_expansion(p, q, x, data):
    return basis_poly(p['k'], p['n'], q), basis_power_expansion(p['k'], p['n'], q)


def _genfun(p, q, x, data):
    return genfun_coefficient(p['k'], p['n'], x, q), basis_poly(p['k'], p['n'], q)(x)


def _moments(p, q, x, data):
    return moment_sum(p['i'], p['n'], q), Poly.monomial(p['i'])


def _round_trip(p, q, x, data):
    n = p['n']
    return to_power_matrix(n, q) @ moment_matrix(n, q), RMatrix.identity(n + 1)


def _inverse_closed_form(p, q, x, data):
    return from_power_matrix(p['n'], q), moment_matrix(p['n'], q)


def _pmf_sum(p, q, x, data):
    n = p['n']
    return sum((pmf(n, k, x, q) for k in range(n + 1)), Fraction(0)), Fraction(1)


# Stirling numbers

def _cor_delta(p, q, x, data):
    return corollary_lhs(p['n'], p['m'], q), corollary_rhs(p['n'], p['m'], q, 'delta_form')


def _cor_stirling(p, q, x, data):
    return corollary_lhs(p['n'], p['m'], q), corollary_rhs(p['n'], p['m'], q, 'stirling_form')


def _stirling_orderings(p, q, x, data):
    n, k = p['n'], p['k']
    return q_stirling2(n, k, q, 'forward'), q_stirling2(n, k, q, 'reverse')


def _stirling_limit(p, q, x, data):
    return q_stirling2(p['n'], p['k'], Fraction(1)), stirling2(p['n'], p['k'])


def _stirling_recurrence(p, q, x, data):
    return stirling2(p['n'], p['k']), Fraction(stirling2_recurrence(p['n'], p['k']))


def _falling_factorial(p, q, x, data):
    return falling_factorial_identity(p['n'], x)


def _falling_factorial_moments(p, q, x, data):
    return falling_factorial_moment_sides(p['i'], p['n'], x, q)


# Bernoulli numbers and closed forms

def _kl_bound(p: Params) -> int:
    return binom2(p['l']) + p['l'] + binom2(p['k'])


def _closed_form(p, q, x, data):
    k, l = p['k'], p['l']
    return basis_poly(k, l, q)(x), theorem10_rhs(k, l, x, q)


def _difference_closed_form(p, q, x, data):
    k, l = p['k'], p['l']
    return basis_poly(k, l, q)(x), corollary11_rhs(k, l, x, q)


def _series_oracle(p, q, x, data):
    k, l = p['k'], p['l']
    return genfun30_coefficient(k, l, x, q, 'factored'), basis_poly(k, l, q)(x)


def _qbernoulli_genfun(p, q, x, data):
    n, k = p['n'], p['k']
    egf = q_egf_series([x ** j for j in range(n + 1)], q)
    oracle = series_mul(bernoulli_series(k, n), egf).coeff(n) * q_factorial(n, q)
    return q_bernoulli(n, k, x, q), oracle


def _bernoulli_recurrence(p, q, x, data):
    m = p['m']
    b = bernoulli_numbers(1, m)
    # the j = m term on the left, the rest of the vanishing sum on the right
    lower = bernoulli_recurrence_residual(m, b.values) - (m + 1) * b[m]
    return (m + 1) * b[m], -lower


def _order_additivity(p, q, x, data):
    j, k, m = p['j'], p['k'], p['m']
    a, b = bernoulli_numbers(j, m), bernoulli_numbers(k, m)
    rhs = sum((comb(m, r) * a[r] * b[m - r] for r in range(m + 1)), Fraction(0))
    return bernoulli_numbers(j + k, m)[m], rhs


REGISTRY: Dict[str, IdentitySpec] = {}


def register(spec: IdentitySpec) -> IdentitySpec:
    if spec.id in REGISTRY:
        raise ValueError(f"Identity '{spec.id}' is already registered")
    REGISTRY[spec.id] = spec
    return spec


register(IdentitySpec(
    id="gauss-pascal-lower",
    description="C(n,k)_q = C(n-1,k-1)_q + q^k C(n-1,k)_q",
    param_ranges={'n': (0, 15), 'k': (0, 15)}, constraint=_k_le_n,
    q_degree_bound=lambda p: p['k'] * (p['n'] - p['k']),
    sides=_pascal_lower
))
register(IdentitySpec(
    id="gauss-pascal-upper",
    description="C(n,k)_q = q^(n-k) C(n-1,k-1)_q + C(n-1,k)_q",
    param_ranges={'n': (0, 15), 'k': (0, 15)}, constraint=_k_le_n,
    q_degree_bound=lambda p: p['k'] * (p['n'] - p['k']),
    sides=_pascal_upper
))
register(IdentitySpec(
    id="gauss-symmetry",
    description="C(n,k)_q = C(n,n-k)_q",
    param_ranges={'n': (0, 15), 'k': (0, 15)}, constraint=_k_le_n,
    q_degree_bound=lambda p: p['k'] * (p['n'] - p['k']),
    sides=_symmetry
))
register(IdentitySpec(
    id="qbinomial-theorem",
    description="(1-b)_q^n = sum_i C(n,i)_q q^(i choose 2) (-b)^i",
    param_ranges={'n': (0, 12)},
    q_degree_bound=_basis_bound,
    sides=_qbinomial_theorem
))
register(IdentitySpec(
    id="reciprocal-series",
    description="(sum_i C(n+i-1,i)_q b^i) (1-b)_q^n = 1 up to b^N",
    param_ranges={'n': (1, 6), 'N': (0, 12)},
    q_degree_bound=lambda p: p['N'] * p['n'] + binom2(p['n']) + p['n'],
    sides=_reciprocal
))
register(IdentitySpec(
    id="jackson-product-rule",
    description="D_q(f g)(x) = f(qx) D_q g(x) + g(x) D_q f(x)",
    param_ranges={'df': (0, 8), 'dg': (0, 8)},
    q_degree_bound=lambda p: 2 * (p['df'] + p['dg']) + 1,
    allow_q_one=False,
    sides=_product_rule,
    fixture=lambda p, rng: (_random_poly(rng, p['df']), _random_poly(rng, p['dg']))
))
register(IdentitySpec(
    id="jackson-quotient",
    description="D_q p(x) = (p(x) - p(qx)) / ((1-q) x) for x != 0",
    param_ranges={'d': (0, 6)},
    q_degree_bound=lambda p: p['d'] + 1,
    comparison_mode='pointwise', allow_q_one=False,
    sides=_jackson,
    fixture=lambda p, rng: _random_poly(rng, p['d']),
    pole=lambda p, q, x: x == 0
))
register(IdentitySpec(
    id="qdifference-orderings",
    description="Both orderings of the n-th q-difference at 0 agree",
    param_ranges={'n': (0, 8)},
    q_degree_bound=lambda p: p['n'] * p['n'],
    sides=_difference_orderings,
    fixture=lambda p, rng: [_random_rational(rng) for _ in range(p['n'] + 1)]
))
register(IdentitySpec(
    id="partition-of-unity",
    description="sum_k B_{k,n}(x, q) = 1",
    param_ranges={'n': (0, 12)},
    q_degree_bound=_basis_bound,
    sides=_partition
))
register(IdentitySpec(
    id="linear-precision",
    description="The operator reproduces f(t) = t",
    param_ranges={'n': (1, 12)},
    q_degree_bound=lambda p: binom2(p['n']) + 2 * p['n'],
    sides=_linear_precision
))
register(IdentitySpec(
    id="endpoint-interpolation",
    description="The operator interpolates f at x = 0 and x = 1",
    param_ranges={'n': (1, 8), 'd': (0, 5)},
    q_degree_bound=lambda p: _basis_bound(p) + p['d'] * p['n'],
    sides=_endpoints, fixture=_poly_fixture
))
register(IdentitySpec(
    id="prop1-explicit-form",
    description="Operator = sum_m C(n,m)_q x^m sum_k C(m,k)_q q^((m-k) choose 2) (-1)^(m-k) f([k]_q/[n]_q)",
    param_ranges={'n': (1, 8), 'd': (0, 5)},
    q_degree_bound=lambda p: 2 * _basis_bound(p) + p['d'] * p['n'],
    sides=_explicit_form, fixture=_poly_fixture
))
register(IdentitySpec(
    id="thm2-delta-form",
    description="Operator = sum_k C(n,k)_q x^k Delta_q^k f(0)",
    param_ranges={'n': (1, 8), 'd': (0, 5)},
    q_degree_bound=lambda p: 2 * _basis_bound(p) + p['d'] * p['n'],
    sides=_delta_form, fixture=_poly_fixture
))
register(IdentitySpec(
    id="cor3-delta-powers",
    description="[n]_q^m B_{n,q}(t^m | x) = sum_k C(n,k)_q x^k Delta_q^k 0^m",
    param_ranges={'n': (1, 8), 'm': (0, 5)},
    q_degree_bound=lambda p: _basis_bound(p) + p['n'] * p['n'] + p['m'] * p['n'],
    sides=_cor_delta
))
register(IdentitySpec(
    id="cor4-stirling-powers",
    description="[n]_q^m B_{n,q}(t^m | x) = sum_k C(n,k)_q x^k [k]_q! q^(k choose 2) S(m,k:q)",
    param_ranges={'n': (1, 8), 'm': (0, 5)},
    q_degree_bound=lambda p: _basis_bound(p) + p['n'] * p['n'] + p['m'] * p['n'],
    sides=_cor_stirling
))
register(IdentitySpec(
    id="qstirling-orderings",
    description="S(n,k:q) from either ordering of Delta_q^k 0^n",
    param_ranges={'n': (0, 8), 'k': (0, 8)}, constraint=_k_le_n,
    q_degree_bound=lambda p: p['k'] * p['k'] + p['n'] * p['k'],
    sides=_stirling_orderings
))
register(IdentitySpec(
    id="qstirling-classical-limit",
    description="S(n,k:1) = S(n,k)",
    param_ranges={'n': (0, 10), 'k': (0, 10)}, constraint=_k_le_n,
    q_degree_bound=lambda p: 0,
    sides=_stirling_limit
))
register(IdentitySpec(
    id="stirling-recurrence",
    description="Alternating-sum S(n,k) = triangle recurrence S(n,k)",
    param_ranges={'n': (0, 10), 'k': (0, 10)},
    q_degree_bound=lambda p: 0,
    sides=_stirling_recurrence
))
register(IdentitySpec(
    id="falling-factorial",
    description="x^n = sum_k C(x,k) k! S(n,k)",
    param_ranges={'n': (0, 10)},
    q_degree_bound=lambda p: 0,
    comparison_mode='pointwise',
    sides=_falling_factorial,
    x_samples=lambda p, rng: _random_points(rng, 10, -3, 3)
))
register(IdentitySpec(
    id="falling-factorial-moments",
    description="sum_k C(x,k) k! S(i,k) = sum_{k>=i} C(k,i)_q/C(n,i)_q B_{k,n}(x, q)",
    param_ranges={'n': (0, 8), 'i': (0, 8)}, constraint=lambda p: p['i'] <= p['n'],
    q_degree_bound=lambda p: _basis_bound(p) + p['i'] * (p['n'] - p['i']),
    comparison_mode='pointwise',
    sides=_falling_factorial_moments, x_samples=_unit_points
))
register(IdentitySpec(
    id="basis-recurrence-build",
    description="Basis from the product form = basis built by the degree recurrence",
    param_ranges={'n': (0, 10), 'k': (0, 10)}, constraint=_k_le_n,
    q_degree_bound=_basis_bound,
    sides=_recurrence_build
))
register(IdentitySpec(
    id="thm5-recurrence",
    description="q^k (1 - q^(n-k-1) x) B_{k,n-1} + x B_{k-1,n-1} = B_{k,n}",
    param_ranges={'n': (1, 10), 'k': (0, 10)}, constraint=_k_le_n,
    q_degree_bound=_basis_bound,
    sides=_recurrence
))
register(IdentitySpec(
    id="thm5-qderivative",
    description="D_q B_{k,n}(x) = [n]_q q^(-k) (q B_{k-1,n-1}(qx) - B_{k,n-1}(qx))",
    param_ranges={'n': (1, 10), 'k': (0, 10)}, constraint=_k_le_n,
    q_degree_bound=lambda p: binom2(p['n']) + 3 * p['n'],
    allow_q_one=False,
    sides=_qderivative
))
register(IdentitySpec(
    id="thm6-degree-reduction",
    description="([n-k]_q/[n]_q) B_{k,n} + ([k+1]_q/[n]_q) B_{k+1,n} = B_{k,n-1} + x [n-k-1]_q (1-q) B_{k,n-1}",
    param_ranges={'n': (1, 10), 'k': (0, 10)}, constraint=_k_le_n,
    q_degree_bound=lambda p: binom2(p['n']) + 2 * p['n'],
    sides=_degree_reduction
))
register(IdentitySpec(
    id="prop7-ratio-step",
    description="B_{k,n} = ([n-k+1]_q/[k]_q) (x/(1 - x q^(n-k))) B_{k-1,n}",
    param_ranges={'n': (1, 8), 'k': (1, 8)}, constraint=_k_le_n,
    q_degree_bound=lambda p: binom2(p['n']) + 3 * p['n'],
    comparison_mode='pointwise',
    sides=_ratio, pole=_ratio_pole
))
register(IdentitySpec(
    id="thm8-power-expansion",
    description="B_{k,n} = sum_i C(n,i)_q C(i,k)_q (-1)^(i-k) q^((i-k) choose 2) x^i",
    param_ranges={'n': (0, 10), 'k': (0, 10)}, constraint=_k_le_n,
    q_degree_bound=lambda p: 2 * _basis_bound(p),
    sides=_power_expansion
))
register(IdentitySpec(
    id="genfun-coefficient",
    description="[n]_q! [t^n] x^k t^k/[k]_q! e_q((1-x)_q t) = B_{k,n}(x, q)",
    param_ranges={'n': (0, 10), 'k': (0, 10)}, constraint=_k_le_n,
    q_degree_bound=lambda p: 2 * binom2(p['n']) + p['n'],
    comparison_mode='pointwise',
    sides=_genfun
))
register(IdentitySpec(
    id="thm9-moments",
    description="sum_{k>=i} C(k,i)_q/C(n,i)_q B_{k,n}(x, q) = x^i",
    param_ranges={'n': (0, 8), 'i': (0, 8)}, constraint=lambda p: p['i'] <= p['n'],
    q_degree_bound=lambda p: _basis_bound(p) + p['i'] * (p['n'] - p['i']),
    sides=_moments
))
register(IdentitySpec(
    id="matrix-round-trip",
    description="Power-basis matrix times the closed-form inverse is the identity",
    param_ranges={'n': (0, 10)},
    q_degree_bound=lambda p: 2 * _basis_bound(p) + p['n'] * p['n'],
    sides=_round_trip
))
register(IdentitySpec(
    id="matrix-inverse-closed-form",
    description="Inverse by elimination has entries C(k,i)_q/C(n,i)_q",
    param_ranges={'n': (0, 10)},
    q_degree_bound=lambda p: 2 * _basis_bound(p) + p['n'] * p['n'],
    sides=_inverse_closed_form
))
register(IdentitySpec(
    id="pmf-normalisation",
    description="sum_k C(n,k)_q x^k (1-x)_q^(n-k) = 1 on the x grid",
    param_ranges={'n': (0, 20)},
    q_degree_bound=_basis_bound,
    comparison_mode='pointwise',
    sides=_pmf_sum
))
register(IdentitySpec(
    id="qbernoulli-generating-function",
    description="[n]_q! [z^n] (z/(e^z-1))^k e_q(zx) = beta_n^(k)(x, q)",
    param_ranges={'k': (1, 3), 'n': (0, 6)},
    q_degree_bound=_basis_bound,
    comparison_mode='pointwise',
    sides=_qbernoulli_genfun
))
register(IdentitySpec(
    id="thm10-closed-form",
    description="B_{k,l}(x, q) = (k!/[k]_q!) x^k sum_m ([m]_q!/m!) S(m,k) C(l,m)_q beta_{l-m}^(k)((1-x)_q, q)",
    param_ranges={'k': (1, 3), 'l': (0, 6)},
    q_degree_bound=_kl_bound,
    comparison_mode='pointwise',
    sides=_closed_form
))
register(IdentitySpec(
    id="cor11-difference-form",
    description="B_{k,l}(x, q) = (x^k/[k]_q!) sum_m ([m]_q!/m!) C(l,m)_q beta_{l-m}^(k)((1-x)_q, q) Delta^k 0^m",
    param_ranges={'k': (1, 3), 'l': (0, 6)},
    q_degree_bound=_kl_bound,
    comparison_mode='pointwise',
    sides=_difference_closed_form
))
register(IdentitySpec(
    id="bernoulli-series-oracle",
    description="Factored generating function through Stirling and Bernoulli series = B_{k,l}(x, q)",
    param_ranges={'k': (1, 3), 'l': (0, 6)},
    q_degree_bound=lambda p: _kl_bound(p) + binom2(p['l']),
    comparison_mode='pointwise',
    sides=_series_oracle
))
register(IdentitySpec(
    id="bernoulli-recurrence",
    description="(m+1) B_m = -sum_{j<m} C(m+1,j) B_j for m >= 1",
    param_ranges={'m': (1, 20)},
    q_degree_bound=lambda p: 0,
    sides=_bernoulli_recurrence
))
register(IdentitySpec(
    id="bernoulli-order-additivity",
    description="B_m^(j+k) = sum_r C(m,r) B_r^(j) B_(m-r)^(k)",
    param_ranges={'j': (1, 3), 'k': (1, 3), 'm': (0, 12)},
    constraint=lambda p: p['j'] + p['k'] <= 4,
    q_degree_bound=lambda p: 0,
    sides=_order_additivity
))


def get_identity(identity_id: str) -> IdentitySpec:
    """
    Look up a registered identity.

    Raises:
        UnknownIdentity: If no identity with this id is registered.
    """
    try:
        return REGISTRY[identity_id]
    except KeyError:
        raise UnknownIdentity(
            f"Unknown identity '{identity_id}'. "
            "Run 'qbern verify --list' for the registered ids."
        ) from None


def _x_points(spec: IdentitySpec, p: Params, rng: random.Random) -> List[Rational | None]:
    if spec.comparison_mode == 'poly-in-x':
        return [None]
    if spec.x_samples is not None:
        return spec.x_samples(p, rng)
    return list(X_GRID)


def run_identity(spec: IdentitySpec | str, seed: int = 0) -> IdentityReport:
    """
    Certify one identity over its full parameter range.

    Args:
        spec (IdentitySpec | str): The identity or its registered id.
        seed (int): Seed for random fixtures; the report is a function of
            (spec, seed) apart from wall_time.

    Returns:
        IdentityReport: 'certified', or 'failed' with the first
            counterexample in parameter order.

    Raises:
        UnknownIdentity: If spec is an id that is not registered.
    """
    if isinstance(spec, str):
        spec = get_identity(spec)
    start = time.perf_counter()
    tested = []
    q_samples = 0
    bound_max = 0
    counterexample = None
    for p in spec.param_grid():
        tested.append(p)
        rng = random.Random(f"{seed}:{spec.id}:{_param_key(p)}")
        data = spec.fixture(p, rng) if spec.fixture is not None else None
        xs = _x_points(spec, p, rng)
        bound = spec.q_degree_bound(p)
        qs = q_sample_sequence(bound + 1)
        if bound >= bound_max:
            bound_max, q_samples = bound, len(qs)
        if spec.allow_q_one:
            qs.append(Fraction(1))
        counterexample = _first_mismatch(spec, p, qs, xs, data)
        if counterexample is not None:
            break
    status = 'certified' if counterexample is None else 'failed'
    report = IdentityReport(
        id=spec.id, params=tested, q_samples=q_samples,
        q_degree_bound=bound_max, status=status,
        counterexample=counterexample,
        wall_time=round(time.perf_counter() - start, 6)
    )
    if status == 'failed':
        logger.warning(f"Identity '{spec.id}' failed: {counterexample.model_dump()}")
    else:
        logger.info(
            f"Identity '{spec.id}' certified over {len(tested)} parameter "
            f"tuples in {report.wall_time:.2f}s"
        )
    return report


def _first_mismatch(spec, p, qs, xs, data) -> Counterexample | None:
    for q in qs:
        for x in xs:
            if x is not None and spec.pole is not None and spec.pole(p, q, x):
                continue
            lhs, rhs = spec.sides(p, q, x, data)
            if lhs != rhs:
                return Counterexample(
                    params=p, q=format_rational(q),
                    x=None if x is None else format_rational(x),
                    lhs=_render(lhs), rhs=_render(rhs)
                )
    return None


def _run_by_id(identity_id: str, seed: int) -> IdentityReport:
    return run_identity(identity_id, seed)


def run_suite(
        filter: str | None = None, seed: int = 0, workers: int | None = None
    ) -> List[IdentityReport]:
    """
    Run all registered identities whose id starts with `filter`.

    Args:
        filter (str, optional): Id prefix; None or "" selects everything.
        seed (int): Seed passed to every identity run.
        workers (int, optional): Number of worker processes. Defaults to
            `QBERN_WORKERS` or the number of processors.

    Returns:
        List[IdentityReport]: Reports ordered by identity id. Empty if
            nothing matches.
    """
    ids = sorted(i for i in REGISTRY if not filter or i.startswith(filter))
    if not ids:
        logger.info(f"No identity matches the filter '{filter}'")
        return []
    if workers is None:
        workers = QbernSettings().workers
    workers = max(1, min(workers, len(ids)))
    logger.info(f"Running {len(ids)} identities with {workers} worker(s), seed {seed}")
    if workers == 1:
        return [run_identity(i, seed) for i in ids]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_by_id, ids, repeat(seed)))


def all_certified(reports: List[IdentityReport]) -> bool:
    return all(r.status == 'certified' for r in reports)


def write_reports(reports: List[IdentityReport], path) -> None:
    """Write one JSON object per line."""
    with open(path, 'w') as f:
        for r in reports:
            f.write(r.model_dump_json() + "\n")
    logger.info(f"Wrote {len(reports)} identity reports to '{path}'")


def read_reports(path) -> List[IdentityReport]:
    with open(path) as f:
        return [IdentityReport.model_validate_json(line) for line in f if line.strip()]


def summary_table(reports: List[IdentityReport]) -> str:
    """Human readable one-line-per-identity summary."""
    header = ("identity", "status", "tuples", "q samples", "bound", "seconds")
    rows = [
        (r.id, r.status, str(len(r.params)), str(r.q_samples),
         str(r.q_degree_bound), f"{r.wall_time:.2f}")
        for r in reports
    ]
    widths = [max(len(row[c]) for row in [header] + rows) for c in range(len(header))]
    lines = [
        "  ".join(v.ljust(w) if c < 2 else v.rjust(w) for c, (v, w) in enumerate(zip(row, widths)))
        for row in [header] + rows
    ]
    lines.insert(1, "  ".join("-" * w for w in widths))
    failed = sum(r.status == 'failed' for r in reports)
    lines.append(f"{len(reports) - failed} certified, {failed} failed")
    return "\n".join(lines)


# Mutation catalogue. Each entry replaces the sides of one identity with a
# wrong variant; the suite must report it as failed.

def _drop_q_power_recurrence(p, q, x, data):
    k, n = p['k'], p['n']
    out = basis_poly(k - 1, n - 1, q).shift(1)
    if k <= n - 1:
        out = out + Poly((1, -q ** (n - k - 1))) * basis_poly(k, n - 1, q)
    return out, basis_poly(k, n, q)


def _drop_q_inverse(p, q, x, data):
    k, n = p['k'], p['n']
    inner = (basis_poly(k - 1, n - 1, q).scale(q)
             - basis_poly(k, n - 1, q)).scale_variable(q)
    return q_derivative(basis_poly(k, n, q), q), inner.scale(q_int(n, q))


def _shifted_reduction(p, q, x, data):
    k, n = p['k'], p['n']
    left, _ = degree_reduction_sides(k, n, q)
    lower = basis_poly(k, n - 1, q)
    return left, lower + lower.shift(1).scale(q_int(n - k, q) * (1 - q))


def _ratio_wrong_pole(p, q, x, data):
    k, n = p['k'], p['n']
    denom = 1 - x * q ** (n - k + 1)
    if denom == 0:
        return Fraction(0), Fraction(0)
    rhs = q_int(n - k + 1, q) / q_int(k, q) * (x / denom) * basis_poly(k - 1, n, q)(x)
    return basis_poly(k, n, q)(x), rhs


def _unsigned_expansion(p, q, x, data):
    k, n = p['k'], p['n']
    coeffs = [Fraction(0)] * (n + 1)
    for i in range(k, n + 1):
        coeffs[i] = gauss_binom(n, i, q) * gauss_binom(i, k, q) * q ** binom2(i - k)
    return basis_poly(k, n, q), Poly(tuple(coeffs))


def _unnormalised_moments(p, q, x, data):
    i, n = p['i'], p['n']
    out = Poly.zero()
    for k in range(i, n + 1):
        out = out + basis_poly(k, n, q).scale(gauss_binom(k, i, q))
    return out, Poly.monomial(i)


def _classical_delta(p, q, x, data):
    n, m = p['n'], p['m']
    rhs = Poly(tuple(
        gauss_binom(n, k, q) * delta_q_zero_power(k, m, Fraction(1))
        for k in range(n + 1)
    ))
    return corollary_lhs(n, m, q), rhs


def _stirling_no_q_power(p, q, x, data):
    n, m = p['n'], p['m']
    rhs = Poly(tuple(
        gauss_binom(n, k, q) * q_factorial(k, q) * q_stirling2(m, k, q)
        for k in range(n + 1)
    ))
    return corollary_lhs(n, m, q), rhs


def _plain_power_closed_form(p, q, x, data):
    k, l = p['k'], p['l']
    total = Fraction(0)
    for m in range(k, l + 1):
        total += q_factorial(m, q) / Fraction(q_factorial(m, Fraction(1))) \
            * stirling2(m, k) * gauss_binom(l, m, q) * q_bernoulli(l - m, k, 1 - x, q)
    rhs = Fraction(q_factorial(k, Fraction(1))) / q_factorial(k, q) * x ** k * total
    return basis_poly(k, l, q)(x), rhs


def _no_factorial_ratio(p, q, x, data):
    k, l = p['k'], p['l']
    total = Fraction(0)
    for m in range(k, l + 1):
        delta = q_difference([Fraction(j) ** m for j in range(k + 1)], k, Fraction(1))
        total += gauss_binom(l, m, q) * q_bernoulli_umbral(l - m, k, x, q) * delta
    return basis_poly(k, l, q)(x), x ** k / q_factorial(k, q) * total


def _mixed_ordering(p, q, x, data):
    n = p['n']
    values = [Fraction(data.exact(t)) for t in (q_int(j, q) / q_int(n, q) for j in range(n + 1))]
    coeffs = []
    for m in range(n + 1):
        inner = sum(
            (gauss_binom(m, k, q) * q ** binom2(k) * (-1) ** k * values[k]
             for k in range(m + 1)),
            Fraction(0)
        )
        coeffs.append(gauss_binom(n, m, q) * inner)
    return operator_poly(data, n, q), Poly(tuple(coeffs))


def _drop_last_basis(p, q, x, data):
    n = p['n']
    total = Poly.zero()
    for k in range(n):
        total = total + basis_poly(k, n, q)
    return total, Poly.one()


def _shifted_nodes(p, q, x, data):
    n = p['n']
    out = Poly.zero()
    for k in range(n + 1):
        out = out + basis_poly(k, n, q).scale(q_int(k, q) / q_int(n + 1, q))
    return out, Poly.x()


def _wrong_pascal_power(p, q, x, data):
    def c(n, k):
        if k < 0 or k > n:
            return Fraction(0)
        if k == 0 or k == n:
            return Fraction(1)
        return c(n - 1, k - 1) + q ** (k - 1) * c(n - 1, k)
    return gauss_binom(p['n'], p['k'], q), c(p['n'], p['k'])


def _unweighted_expansion(p, q, x, data):
    n = p['n']
    rhs = Poly(tuple(gauss_binom(n, i, q) * (-1) ** i for i in range(n + 1)))
    return q_binom_expand(n, q), rhs


def _shifted_binomial_recurrence(p, q, x, data):
    m = p['m']
    b = bernoulli_numbers(1, m)
    return b[m], -sum((comb(m, j) * b[j] for j in range(m)), Fraction(0))


def _transposed_inverse(p, q, x, data):
    return from_power_matrix(p['n'], q), moment_matrix(p['n'], q).transpose()


def _classical_pmf(p, q, x, data):
    n = p['n']
    total = sum(
        (comb(n, k) * x ** k * q_shifted_factorial(x, n - k, q) for k in range(n + 1)),
        Fraction(0)
    )
    return total, Fraction(1)


_MUTATIONS = [
    Mutation(name="drop-q-power", target="thm5-recurrence",
             description="drop the q^k factor of the degree recurrence",
             sides=_drop_q_power_recurrence),
    Mutation(name="drop-q-inverse", target="thm5-qderivative",
             description="drop the q^(-k) factor of the q-derivative",
             sides=_drop_q_inverse),
    Mutation(name="shift-index", target="thm6-degree-reduction",
             description="use [n-k]_q instead of [n-k-1]_q on the right",
             sides=_shifted_reduction),
    Mutation(name="wrong-pole", target="prop7-ratio-step",
             description="use q^(n-k+1) in the pole factor",
             sides=_ratio_wrong_pole),
    Mutation(name="sign-flip", target="thm8-power-expansion",
             description="drop the alternating sign (-1)^(i-k)",
             sides=_unsigned_expansion),
    Mutation(name="unnormalised", target="thm9-moments",
             description="drop the division by C(n,i)_q",
             sides=_unnormalised_moments),
    Mutation(name="classical-difference", target="cor3-delta-powers",
             description="use the classical difference Delta instead of Delta_q",
             sides=_classical_delta),
    Mutation(name="drop-q-power", target="cor4-stirling-powers",
             description="drop the q^(k choose 2) factor",
             sides=_stirling_no_q_power),
    Mutation(name="plain-powers", target="thm10-closed-form",
             description="evaluate beta at 1-x instead of the umbral (1-x)_q",
             sides=_plain_power_closed_form),
    Mutation(name="drop-factorial-ratio", target="cor11-difference-form",
             description="drop the [m]_q!/m! weights",
             sides=_no_factorial_ratio),
    Mutation(name="mixed-ordering", target="prop1-explicit-form",
             description="pair the forward values with the reverse signs and q-powers",
             sides=_mixed_ordering),
    Mutation(name="drop-last-term", target="partition-of-unity",
             description="sum the basis only up to k = n-1",
             sides=_drop_last_basis),
    Mutation(name="node-shift", target="linear-precision",
             description="use nodes [k]_q/[n+1]_q",
             sides=_shifted_nodes),
    Mutation(name="wrong-power", target="gauss-pascal-lower",
             description="use q^(k-1) instead of q^k",
             sides=_wrong_pascal_power),
    Mutation(name="drop-q-power", target="qbinomial-theorem",
             description="drop the q^(i choose 2) weights",
             sides=_unweighted_expansion),
    Mutation(name="shift-binomial", target="bernoulli-recurrence",
             description="use C(m,j) instead of C(m+1,j)",
             sides=_shifted_binomial_recurrence),
    Mutation(name="transpose", target="matrix-inverse-closed-form",
             description="compare against the transposed closed form",
             sides=_transposed_inverse),
    Mutation(name="binomial-weights", target="pmf-normalisation",
             description="use classical binomials with q-shifted factorials",
             sides=_classical_pmf),
]


def _negate_rhs(spec: IdentitySpec) -> Mutation:
    sides = spec.sides

    def negated(p, q, x, data):
        lhs, rhs = sides(p, q, x, data)
        return lhs, _negate(rhs)

    return Mutation(
        name="negate-rhs", target=spec.id,
        description="flip the sign of the right-hand side", sides=negated
    )


def mutation_catalogue() -> Dict[str, Mutation]:
    """
    All documented mutations keyed by "<identity>:<mutation>".

    Besides the targeted mutations every registered identity carries a
    sign flip of its right-hand side.
    """
    catalogue = {f"{m.target}:{m.name}": m for m in _MUTATIONS}
    for spec in REGISTRY.values():
        m = _negate_rhs(spec)
        catalogue[f"{m.target}:{m.name}"] = m
    return dict(sorted(catalogue.items()))


def apply_mutation(key: str, max_span: int = 3) -> IdentitySpec:
    """
    The registered identity with its sides replaced by the mutation and
    each parameter range cut to at most `max_span + 1` values.

    Raises:
        UnknownIdentity: If the mutation key is not in the catalogue.
    """
    catalogue = mutation_catalogue()
    if key not in catalogue:
        raise UnknownIdentity(f"Unknown mutation '{key}'")
    m = catalogue[key]
    spec = get_identity(m.target)
    ranges = {
        name: (lo, min(hi, lo + max_span)) for name, (lo, hi) in spec.param_ranges.items()
    }
    return spec.model_copy(update={
        'id': key, 'sides': m.sides, 'param_ranges': ranges,
        'description': f"{spec.description} [mutated: {m.description}]"
    })
