"""
Floating-point experiments with the q-Bernstein operator.

Basis weights are computed exactly from the product form and only then
converted to binary64, so the weights of one evaluation point sum to one up
to rounding. Errors against the target function are measured on a uniform
grid of [0, 1].
"""

import csv
import math
import logging
from fractions import Fraction
from typing import Dict, List, Literal, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from .algebra import Poly, Rational, parse_rational
from .bernstein import SampledFunction, operator_nodes, operator_weights
from .errors import RationalFormatError, UnknownFunction
from .qcore import as_q

logger = logging.getLogger("qbern")

CSV_HEADER = ['n', 'q', 'sup_error', 'mean_error']


def _runge_exact(t: Rational) -> Rational:
    return 1 / (1 + 25 * (t - Fraction(1, 2)) ** 2)


FUNCTIONS: Dict[str, SampledFunction] = {
    'exp': SampledFunction(name='exp', approx=math.exp),
    'sin-pi': SampledFunction(name='sin-pi', approx=lambda t: math.sin(math.pi * t)),
    'abs-shift': SampledFunction(
        name='abs-shift',
        approx=lambda t: abs(t - 0.5),
        exact=lambda t: abs(t - Fraction(1, 2))
    ),
    'runge': SampledFunction(
        name='runge',
        approx=lambda t: 1.0 / (1.0 + 25.0 * (t - 0.5) ** 2),
        exact=_runge_exact
    ),
    'one': SampledFunction(name='one', approx=lambda t: 1.0, exact=lambda t: Fraction(1)),
    'identity': SampledFunction(name='identity', approx=lambda t: t, exact=lambda t: t),
}


def get_function(name: str) -> SampledFunction:
    """
    Look up a built-in function or parse a polynomial input.

    Polynomial inputs are written "poly:c0,c1,...,cd" with rational
    coefficients, lowest degree first (e.g. "poly:0,0,1" for t^2).

    Raises:
        UnknownFunction: If the name is neither built in nor a valid
            polynomial input.
    """
    if name in FUNCTIONS:
        return FUNCTIONS[name]
    if name.startswith('poly:'):
        try:
            coeffs = [parse_rational(c) for c in name[5:].split(',') if c.strip()]
        except RationalFormatError as e:
            raise UnknownFunction(f"Invalid polynomial input '{name}': {e}") from e
        return SampledFunction.from_poly(Poly(tuple(coeffs)), name=name)
    raise UnknownFunction(
        f"Unknown function '{name}'. Available: {', '.join(FUNCTIONS)} "
        "or 'poly:c0,c1,...'"
    )


class ExperimentConfig(BaseModel, extra='forbid'):
    """
    One approximation experiment: a target function, the operator orders
    to sweep and the rule that assigns q to each order.
    """
    function: str = Field(..., description="Name of a built-in function or 'poly:c0,c1,...'")
    degrees: List[int] = Field(..., description="Operator orders n to evaluate")
    q_schedule: Literal['fixed', 'one-minus-inverse', 'custom'] = Field(
        default='one-minus-inverse',
        description="fixed q, q_n = 1 - 1/n, or one custom q per degree"
    )
    q: str | None = Field(default=None, description="q for the fixed schedule")
    q_values: List[str] = Field(default_factory=list, description="q per degree for the custom schedule")
    grid_size: int = Field(default=101, description="Number of uniform evaluation points in [0, 1]")

    @field_validator('degrees')
    def degrees_must_be_positive(cls, v):
        if not v:
            raise ValueError("At least one degree is required")
        if any(n < 1 for n in v):
            raise ValueError("Degrees must be positive")
        return v

    @field_validator('grid_size')
    def grid_must_cover_endpoints(cls, v):
        if v < 2:
            raise ValueError("grid_size must be at least 2")
        return v

    @field_validator('function')
    def function_must_exist(cls, v):
        try:
            get_function(v)
        except UnknownFunction as e:
            raise ValueError(str(e)) from e
        return v

    @model_validator(mode='after')
    def check_schedule(self):
        if self.q_schedule == 'fixed':
            if self.q is None:
                raise ValueError("The fixed schedule needs a value for q")
            as_q(self.q)
        elif self.q_schedule == 'custom':
            if len(self.q_values) != len(self.degrees):
                raise ValueError("The custom schedule needs one q value per degree")
            for v in self.q_values:
                as_q(v)
        return self

    def schedule(self) -> List[Tuple[int, Rational]]:
        """The (n, q) cells of the experiment."""
        if self.q_schedule == 'fixed':
            q = as_q(self.q)
            return [(n, q) for n in self.degrees]
        if self.q_schedule == 'custom':
            return [(n, as_q(v)) for n, v in zip(self.degrees, self.q_values)]
        return [(n, 1 - Fraction(1, n)) if n > 1 else (n, Fraction(1))
                for n in self.degrees]


class ErrorRow(BaseModel):
    n: int
    q: float
    sup_error: float
    mean_error: float

    @model_validator(mode='after')
    def check_order(self):
        if not self.sup_error >= self.mean_error >= 0:
            raise ValueError("Errors must satisfy sup_error >= mean_error >= 0")
        return self


class ErrorTable(BaseModel):
    function: str | None = None
    rows: List[ErrorRow] = Field(default_factory=list)

    def sorted_rows(self) -> List[ErrorRow]:
        return sorted(self.rows, key=lambda r: (r.n, r.q))


def grid(grid_size: int) -> List[Rational]:
    return [Fraction(i, grid_size - 1) for i in range(grid_size)]


def weight_matrix(n: int, q: Rational, xs: List[Rational]) -> np.ndarray:
    """Rows are points of xs, columns the binary64 weights B_{k,n}(x, q)."""
    return np.array(
        [[float(w) for w in operator_weights(n, q, x)] for x in xs],
        dtype=np.float64
    )


def evaluate_operator(
        f: SampledFunction, n: int, q: Rational, xs: List[Rational]
    ) -> np.ndarray:
    """Operator values at xs in binary64."""
    values = np.array(
        [f.approx(float(t)) for t in operator_nodes(n, q)], dtype=np.float64
    )
    return weight_matrix(n, q, xs) @ values


def approximate(cfg: ExperimentConfig) -> ErrorTable:
    """
    Run an approximation experiment.

    Args:
        cfg (ExperimentConfig): The experiment configuration.

    Returns:
        ErrorTable: One row per (n, q) cell with sup and mean absolute
            error over the grid.

    Raises:
        UnknownFunction: If the configured function does not exist.
    """
    f = get_function(cfg.function)
    xs = grid(cfg.grid_size)
    target = np.array([f.approx(float(x)) for x in xs], dtype=np.float64)
    rows = []
    for n, q in cfg.schedule():
        err = np.abs(evaluate_operator(f, n, q, xs) - target)
        row = ErrorRow(
            n=n, q=float(q),
            sup_error=float(np.max(err)), mean_error=float(np.mean(err))
        )
        logger.info(
            f"Approximated '{f.name}' with n={n}, q={q}: "
            f"sup={row.sup_error:.3e}, mean={row.mean_error:.3e}"
        )
        rows.append(row)
    table = ErrorTable(function=f.name, rows=rows)
    return ErrorTable(function=f.name, rows=table.sorted_rows())


def _fmt(v: float) -> str:
    return format(v, '.17g')


def emit_csv(table: ErrorTable, path) -> None:
    """
    Write the error table as CSV with header "n,q,sup_error,mean_error".

    Floats are written with 17 significant digits, rows ordered by n and
    then q.
    """
    with open(path, 'w', newline='') as f:
        w = csv.DictWriter(f, CSV_HEADER)
        w.writeheader()
        for r in table.sorted_rows():
            w.writerow({
                'n': r.n, 'q': _fmt(r.q),
                'sup_error': _fmt(r.sup_error), 'mean_error': _fmt(r.mean_error)
            })
    logger.info(f"Wrote {len(table.rows)} rows to '{path}'")


def read_csv(path) -> ErrorTable:
    with open(path, newline='') as f:
        rows = [
            ErrorRow(
                n=int(r['n']), q=float(r['q']),
                sup_error=float(r['sup_error']), mean_error=float(r['mean_error'])
            )
            for r in csv.DictReader(f)
        ]
    return ErrorTable(rows=rows)


def emit_json(table: ErrorTable, path) -> None:
    with open(path, 'w') as f:
        f.write(table.model_dump_json(indent=2))
    logger.info(f"Wrote error table JSON to '{path}'")
