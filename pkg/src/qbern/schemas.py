from fractions import Fraction
from typing import Dict, List, Literal

from pydantic import BaseModel, Field, RootModel, field_validator, model_validator

from .algebra import format_rational, parse_rational
from .approx import ErrorTable, ExperimentConfig


def convert_rational_to_string(value):
    if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        return format_rational(value)
    return value


def check_rational_string(value):
    if value is not None:
        parse_rational(value)
    return value


class BaseModelForbidExtra(BaseModel, extra='forbid'):
    pass


class RationalRecord(BaseModelForbidExtra):
    """Base for records that echo exact rational inputs and results as "p/q"."""

    @field_validator('q', 'x', 'value', mode='before', check_fields=False)
    def rationals_as_strings(cls, value):
        return check_rational_string(convert_rational_to_string(value))


class BasisRecord(RationalRecord):
    k: int = Field(..., description="Basis index")
    n: int = Field(..., description="Degree")
    q: str = Field(..., description="The q parameter as 'p/q'")
    x: str | None = Field(default=None, description="Evaluation point, absent for polynomial output")
    value: str | None = Field(default=None, description="B_{k,n}(x, q) at x")
    coefficients: List[str] | None = Field(default=None, description="Power-basis coefficients, lowest degree first")
    text: str | None = Field(default=None, description="Human readable polynomial")

    @model_validator(mode='after')
    def value_or_polynomial(self):
        if (self.value is None) == (self.coefficients is None):
            raise ValueError("Exactly one of value and coefficients must be set")
        return self


class MatrixRecord(RationalRecord):
    n: int
    q: str
    inverse: bool = Field(..., description="Whether the power-to-q-Bernstein matrix is shown")
    entries: List[List[str]]

    @field_validator('entries')
    def entries_must_be_square(cls, v):
        if any(len(row) != len(v) for row in v):
            raise ValueError("Conversion matrices are square")
        return v


class OperatorRecord(RationalRecord):
    function: str
    n: int
    q: str
    x: str
    value: str


class StirlingRecord(RationalRecord):
    n: int
    k: int
    q: str | None = Field(default=None, description="Absent for the classical numbers")
    value: str


class StirlingTableRecord(RationalRecord):
    max_n: int
    q: str | None = Field(default=None, description="Absent for the classical numbers")
    rows: List[List[str]] = Field(..., description="Row n holds S(n, 0), ..., S(n, n)")

    @model_validator(mode='after')
    def rows_form_a_triangle(self):
        if len(self.rows) != self.max_n + 1:
            raise ValueError(f"Expected {self.max_n + 1} rows, got {len(self.rows)}")
        for n, row in enumerate(self.rows):
            if len(row) != n + 1:
                raise ValueError(f"Row {n} must have {n + 1} entries, got {len(row)}")
            for v in row:
                parse_rational(v)
        return self


class BernoulliRecord(BaseModelForbidExtra):
    order: int
    values: List[str] = Field(..., description="B_0^(k), ..., B_max_m^(k)")


class QBernoulliRecord(RationalRecord):
    n: int
    k: int
    x: str
    q: str
    umbral: bool
    value: str


class PmfRecord(RationalRecord):
    n: int
    k: int
    x: str
    q: str
    at_least: bool = Field(default=False, description="True if value is the tail P(X >= k), false for P(X = k)")
    value: str


class Counterexample(BaseModelForbidExtra):
    params: Dict[str, int]
    q: str
    x: str | None = None
    lhs: str
    rhs: str


class IdentityReport(BaseModelForbidExtra):
    id: str
    params: List[Dict[str, int]] = Field(..., description="Parameter tuples checked, in order")
    q_samples: int = Field(..., description="Distinct q < 1 used for the tuple with the largest degree bound")
    q_degree_bound: int = Field(..., description="Largest declared degree in q over the tested tuples")
    status: Literal['certified', 'failed']
    counterexample: Counterexample | None = None
    wall_time: float

    @model_validator(mode='after')
    def check_status(self):
        if self.status == 'failed' and self.counterexample is None:
            raise ValueError("A failed report must carry a counterexample")
        if self.status == 'certified' and self.params \
                and self.q_samples <= self.q_degree_bound:
            raise ValueError(
                f"'{self.id}' used {self.q_samples} q samples for a degree "
                f"bound of {self.q_degree_bound}"
            )
        return self


class VerifySummary(BaseModelForbidExtra):
    reports: List[IdentityReport]
    all_certified: bool


class IdentityListing(BaseModelForbidExtra):
    name: str = Field(..., description="Registered identity id")
    statement: str
    mutations: List[str] = Field(..., description="Catalogue keys '<identity>:<mutation>' targeting this identity")


class IdentityCatalogue(RootModel[List[IdentityListing]]):
    pass


SCHEMAS = {
    'basis': BasisRecord,
    'matrix': MatrixRecord,
    'operator': OperatorRecord,
    'stirling': StirlingRecord,
    'stirling-table': StirlingTableRecord,
    'bernoulli': BernoulliRecord,
    'qbernoulli': QBernoulliRecord,
    'pmf': PmfRecord,
    'identity-report': IdentityReport,
    'verify': VerifySummary,
    'identity-list': IdentityCatalogue,
    'experiment-config': ExperimentConfig,
    'error-table': ErrorTable,
}
