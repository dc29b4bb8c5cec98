from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from qbern.errors import DomainError
from qbern.stirling import (
    corollary_lhs, corollary_rhs, delta_q_zero_power, falling_factorial_identity,
    falling_factorial_moment_sides, generalized_binomial, q_stirling2,
    stirling2, stirling2_recurrence, stirling_table
)

from utils import Q_SAMPLES, q_values

stirling_data = {
    'empty': (0, 0, 1),
    'no-blocks': (3, 0, 0),
    'single-block': (4, 1, 1),
    'pairs': (4, 2, 7),
    'five-three': (5, 3, 25),
    'too-many-blocks': (2, 3, 0),
}


@pytest.mark.unit
@pytest.mark.parametrize("n, k, expected", stirling_data.values(), ids=stirling_data.keys())
def test_stirling2(n, k, expected):
    assert stirling2(n, k) == expected


@pytest.mark.unit
@pytest.mark.parametrize("n", range(11))
def test_stirling2_recurrence(n):
    for k in range(n + 2):
        assert stirling2_recurrence(n, k) == stirling2(n, k)


@pytest.mark.unit
def test_stirling2_domain():
    with pytest.raises(DomainError):
        stirling2(-1, 0)
    with pytest.raises(DomainError):
        stirling_table(-1)
    with pytest.raises(DomainError):
        delta_q_zero_power(-1, 2, F(1, 2))


@pytest.mark.unit
@pytest.mark.parametrize("n", range(8))
def test_q_stirling_classical_limit(n):
    for k in range(n + 1):
        assert q_stirling2(n, k, F(1)) == stirling2(n, k)


@pytest.mark.unit
@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=7), q_values())
def test_q_stirling_edges(n, q):
    assert q_stirling2(n, n, q) == 1
    assert q_stirling2(n, 1, q) == 1
    assert q_stirling2(n, 0, q) == 0


@pytest.mark.unit
@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=7), st.integers(min_value=0, max_value=7), q_values())
def test_q_stirling_orderings_agree(n, k, q):
    assert q_stirling2(n, k, q, 'forward') == q_stirling2(n, k, q, 'reverse')


@pytest.mark.unit
def test_q_stirling_small_values():
    q = F(1, 2)
    # S(3, 2 : q) = 2 + q
    assert q_stirling2(3, 2, q) == F(5, 2)
    assert delta_q_zero_power(1, 3, q) == 1


@pytest.mark.unit
def test_stirling_table():
    table = stirling_table(4)
    assert table.get(4, 2) == 7
    assert table.get(2, 3) == 0
    assert table.max_k == 4
    assert table.to_rows()[3] == ["0", "1", "3", "1"]
    assert len(table.to_text().splitlines()) == 5
    with pytest.raises(DomainError):
        table.get(5, 1)
    q_table = stirling_table(3, F(1, 2))
    assert q_table.q == F(1, 2)
    assert q_table.get(3, 2) == F(5, 2)


@pytest.mark.unit
@pytest.mark.parametrize("n", range(1, 7))
def test_power_moment_expansion(n):
    for q in Q_SAMPLES:
        for m in range(7):
            lhs = corollary_lhs(n, m, q)
            assert corollary_rhs(n, m, q, 'delta_form') == lhs
            assert corollary_rhs(n, m, q, 'stirling_form') == lhs


@pytest.mark.unit
def test_power_moment_expansion_errors():
    with pytest.raises(DomainError):
        corollary_rhs(0, 2, F(1, 2))
    with pytest.raises(ValueError):
        corollary_rhs(2, 2, F(1, 2), 'other')


@pytest.mark.unit
def test_generalized_binomial():
    assert generalized_binomial(5, 2) == 10
    assert generalized_binomial(F(1, 2), 2) == F(-1, 8)
    assert generalized_binomial(F(3, 7), 0) == 1


@pytest.mark.unit
@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=8), st.fractions(min_value=-3, max_value=3, max_denominator=9))
def test_falling_factorial_identity(n, x):
    lhs, rhs = falling_factorial_identity(n, x)
    assert lhs == rhs


@pytest.mark.unit
@pytest.mark.parametrize("n", range(1, 6))
def test_falling_factorial_moments(n):
    for i in range(n + 1):
        for x in [F(0), F(2, 7), F(5, 7), F(1)]:
            lhs, rhs = falling_factorial_moment_sides(i, n, x, F(2, 3))
            assert lhs == rhs == x ** i
