from fractions import Fraction as F
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from qbern.algebra import Poly, RMatrix, mat_inverse
from qbern.approx import get_function
from qbern.bernstein import (
    X_GRID, SampledFunction, basis_poly, basis_poly_via_recurrence,
    basis_power_expansion, basis_qderivative, classical_bit_error,
    degree_reduction_sides, from_bernstein_coefficients, from_power_matrix,
    genfun_coefficient, moment_matrix, moment_sum, operator_apply,
    operator_delta_form, operator_delta_poly, operator_nodes, operator_poly,
    operator_weights, pmf, ratio_step, ratio_step_sides,
    to_bernstein_coefficients, to_power_matrix
)
from qbern.errors import DomainError, PoleAtSample
from qbern.qcore import q_derivative

from utils import Q_SAMPLES, q_values, small_polys, unit_rationals

HALF = F(1, 2)

basis_data = {
    'k0-n2': (0, 2, Poly((1, F(-3, 2), HALF))),
    'k1-n2': (1, 2, Poly((0, F(3, 2), F(-3, 2)))),
    'k2-n2': (2, 2, Poly((0, 0, 1))),
    'k0-n0': (0, 0, Poly.one()),
    'k3-n2': (3, 2, Poly.zero()),
    'negative-k': (-1, 2, Poly.zero()),
}


@pytest.mark.unit
@pytest.mark.parametrize("k, n, expected", basis_data.values(), ids=basis_data.keys())
def test_basis_poly_at_half(k, n, expected):
    assert basis_poly(k, n, HALF) == expected


@pytest.mark.unit
def test_basis_values():
    assert basis_poly(0, 2, HALF)(HALF) == F(3, 8)
    assert basis_poly(1, 2, HALF)(HALF) == F(3, 8)
    assert basis_poly(2, 2, HALF)(HALF) == F(1, 4)


@pytest.mark.unit
@pytest.mark.parametrize("n", range(6))
def test_basis_classical_limit(n):
    for k in range(n + 1):
        for x in X_GRID:
            assert basis_poly(k, n, F(1))(x) == comb(n, k) * x ** k * (1 - x) ** (n - k)


@pytest.mark.unit
@pytest.mark.parametrize("q", Q_SAMPLES, ids=[str(q) for q in Q_SAMPLES])
def test_quadratic_power_matrix(q):
    m = to_power_matrix(2, q)
    expected = RMatrix.from_rows([
        [1, 0, 0],
        [-(1 + q), 1 + q, 0],
        [q, -(1 + q), 1],
    ])
    assert m == expected
    assert from_power_matrix(2, q) == mat_inverse(expected)


@pytest.mark.unit
@pytest.mark.parametrize("n", range(11))
def test_four_representations_agree(n):
    q = F(2, 3)
    x = F(2, 7)
    for k in range(n + 1):
        product = basis_poly(k, n, q)
        assert basis_poly_via_recurrence(k, n, q) == product
        assert basis_power_expansion(k, n, q) == product
        assert genfun_coefficient(k, n, x, q) == product(x)


@pytest.mark.unit
@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=8), q_values(), unit_rationals())
def test_partition_of_unity(n, q, x):
    assert sum(basis_poly(k, n, q)(x) for k in range(n + 1)) == 1
    assert sum(operator_weights(n, q, x)) == 1


@pytest.mark.unit
@pytest.mark.parametrize("n", range(1, 8))
def test_basis_qderivative(n):
    q = F(1, 3)
    for k in range(n + 1):
        assert basis_qderivative(k, n, q) == q_derivative(basis_poly(k, n, q), q)


@pytest.mark.unit
@pytest.mark.parametrize("n", range(1, 8))
def test_degree_reduction(n):
    for q in Q_SAMPLES:
        for k in range(n + 1):
            left, right = degree_reduction_sides(k, n, q)
            assert left == right


@pytest.mark.unit
def test_degree_reduction_domain():
    with pytest.raises(DomainError):
        degree_reduction_sides(0, 0, HALF)
    with pytest.raises(DomainError):
        degree_reduction_sides(4, 3, HALF)


@pytest.mark.unit
def test_ratio_step():
    for n in range(1, 7):
        for k in range(1, n + 1):
            assert ratio_step(k, n, F(3, 4))
    lhs, rhs = ratio_step_sides(1, 2, HALF, HALF)
    assert lhs == rhs == F(3, 8)


@pytest.mark.unit
def test_ratio_step_pole_and_domain():
    with pytest.raises(PoleAtSample):
        ratio_step_sides(3, 3, HALF, 1)
    with pytest.raises(DomainError):
        ratio_step_sides(0, 3, HALF, HALF)


@pytest.mark.unit
@pytest.mark.parametrize("n", range(1, 9))
def test_moments_are_powers(n):
    for i in range(n + 1):
        assert moment_sum(i, n, F(2, 5)) == Poly.monomial(i)
    with pytest.raises(DomainError):
        moment_sum(n + 1, n, HALF)


@pytest.mark.unit
def test_moment_matrix_is_inverse_conversion():
    for n in range(6):
        for q in Q_SAMPLES:
            assert moment_matrix(n, q) == from_power_matrix(n, q)


@pytest.mark.unit
def test_operator_nodes():
    assert operator_nodes(2, HALF) == [0, F(2, 3), 1]
    assert operator_nodes(3, F(1)) == [0, F(1, 3), F(2, 3), 1]


@pytest.mark.unit
@pytest.mark.parametrize("n", range(1, 10))
def test_operator_linear_precision(n):
    one = SampledFunction.from_poly(Poly.one())
    identity = SampledFunction.from_poly(Poly.x())
    for q in Q_SAMPLES:
        assert operator_poly(one, n, q) == Poly.one()
        assert operator_poly(identity, n, q) == Poly.x()


@pytest.mark.unit
def test_operator_endpoint_interpolation():
    f = get_function("runge")
    for n in range(1, 6):
        assert operator_apply(f, n, F(2, 3), 0) == f.exact(F(0))
        assert operator_apply(f, n, F(2, 3), 1) == f.exact(F(1))


@pytest.mark.unit
@settings(max_examples=25, deadline=None)
@given(small_polys(), st.integers(min_value=1, max_value=7), q_values(), unit_rationals())
def test_operator_forms_agree(p, n, q, x):
    f = SampledFunction.from_poly(p)
    expected = operator_apply(f, n, q, x)
    assert operator_poly(f, n, q)(x) == expected
    assert operator_delta_form(f, n, q, x) == expected
    assert operator_delta_poly(f, n, q, 'reverse') == operator_delta_poly(f, n, q, 'forward')


@pytest.mark.unit
def test_operator_errors():
    with pytest.raises(DomainError):
        operator_apply(get_function("exp"), 3, HALF, HALF)
    with pytest.raises(DomainError):
        operator_apply(get_function("identity"), 0, HALF, HALF)
    with pytest.raises(DomainError):
        operator_weights(3, HALF, F(3, 2))


@pytest.mark.unit
@settings(max_examples=25, deadline=None)
@given(small_polys(max_degree=5), q_values())
def test_bernstein_coefficients_round_trip(p, q):
    c = to_bernstein_coefficients(p, 5, q)
    assert len(c) == 6
    assert from_bernstein_coefficients(c, q) == p


@pytest.mark.unit
def test_bernstein_coefficients_degree_too_high():
    with pytest.raises(DomainError):
        to_bernstein_coefficients(Poly.monomial(4), 3, HALF)


@pytest.mark.unit
@pytest.mark.parametrize("n", range(21))
def test_pmf_normalisation(n):
    for q in Q_SAMPLES + [F(9, 10)]:
        for x in [F(0), F(1, 4), F(5, 6), F(1)]:
            assert sum(pmf(n, k, x, q) for k in range(n + 1)) == 1


@pytest.mark.unit
def test_pmf_domain():
    with pytest.raises(DomainError):
        pmf(3, 1, F(3, 2), HALF)
    with pytest.raises(DomainError):
        pmf(3, 4, HALF, HALF)


@pytest.mark.unit
def test_classical_bit_error():
    assert classical_bit_error(3, F(1, 1000), 2) == F(2998, 10 ** 9)
    assert classical_bit_error(3, F(1, 1000), 0) == 1
