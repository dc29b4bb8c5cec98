"""
Exact arithmetic backbone of qbern.

Scalars are `fractions.Fraction` values (aliased as `Rational`), which are
always kept in lowest terms with a positive denominator, so equality of
two results is plain structural equality. On top of them this module
provides dense univariate polynomials (`Poly`), truncated power series
(`TruncSeries`) and dense rational matrices (`RMatrix`). All three are
immutable; every operation returns a new value.
"""

import re
import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Literal, Sequence

from .errors import (
    DimensionMismatch, RationalFormatError, SingularMatrix, ZeroConstantTerm
)

logger = logging.getLogger("qbern")

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text) -> Rational:
    """
    Parse a rational number from its textual form.

    Args:
        text (str | int | Fraction): "p/q" with integer p and positive
            integer q, or an integer literal "p". Integers and Fractions
            are passed through.

    Returns:
        Rational: The parsed value in lowest terms.

    Raises:
        RationalFormatError: If the text is not of the form "p/q" or "p",
            or if q is zero.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    m = _RATIONAL_RE.match(str(text))
    if not m:
        raise RationalFormatError(
            f"'{text}' is not a rational number. "
            "Use the form 'p/q' (e.g. '1/2') or an integer (e.g. '3')."
        )
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise RationalFormatError(f"'{text}' has a zero denominator.")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_rational(value: Rational) -> str:
    # Fraction.__str__ already prints "p/q" and "p" for q = 1
    return str(Fraction(value))


def _as_rational(value) -> Rational:
    return value if isinstance(value, Fraction) else Fraction(value)


@dataclass(frozen=True, eq=True)
class Poly:
    """
    Dense univariate polynomial over the rationals.

    `coeffs[i]` is the coefficient of x^i. Trailing zeros are stripped on
    construction, so the zero polynomial has an empty coefficient tuple and
    two polynomials are equal exactly when their coefficient tuples are.
    """
    coeffs: tuple = ()

    def __post_init__(self):
        cs = [_as_rational(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, 'coeffs', tuple(cs))

    @classmethod
    def constant(cls, c) -> "Poly":
        return cls((c,))

    @classmethod
    def monomial(cls, i: int, c=1) -> "Poly":
        return cls((0,) * i + (c,))

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def zero(cls) -> "Poly":
        return cls(())

    @classmethod
    def one(cls) -> "Poly":
        return cls((1,))

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> Rational:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __add__(self, other):
        return poly_arith(self, _coerce_poly(other), 'add')

    __radd__ = __add__

    def __sub__(self, other):
        return poly_arith(self, _coerce_poly(other), 'sub')

    def __rsub__(self, other):
        return poly_arith(_coerce_poly(other), self, 'sub')

    def __mul__(self, other):
        if isinstance(other, Poly):
            return poly_arith(self, other, 'mul')
        return self.scale(other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("Negative powers of polynomials are not polynomials")
        result = Poly.one()
        for _ in range(e):
            result = result * self
        return result

    def __call__(self, x) -> Rational:
        return poly_eval(self, x)

    def scale(self, c) -> "Poly":
        c = _as_rational(c)
        return Poly(tuple(a * c for a in self.coeffs))

    def scale_variable(self, c) -> "Poly":
        """Return p(c x): coefficient i is multiplied by c^i."""
        c = _as_rational(c)
        out = []
        power = Fraction(1)
        for a in self.coeffs:
            out.append(a * power)
            power *= c
        return Poly(tuple(out))

    def shift(self, m: int) -> "Poly":
        """Return x^m p(x)."""
        if self.is_zero():
            return self
        return Poly((0,) * m + self.coeffs)

    def to_json(self) -> str:
        return json.dumps([format_rational(c) for c in self.coeffs])

    def to_list(self) -> List[str]:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, text: str) -> "Poly":
        return cls(tuple(parse_rational(c) for c in json.loads(text)))

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            sign = '-' if c < 0 else '+'
            a = abs(c)
            if i == 0:
                body = format_rational(a)
            else:
                var = 'x' if i == 1 else f'x^{i}'
                body = var if a == 1 else f"{format_rational(a)} {var}"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first_body = terms[0]
        out = ('-' if first_sign == '-' else '') + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def _coerce_poly(value) -> Poly:
    return value if isinstance(value, Poly) else Poly.constant(value)


def poly_arith(p: Poly, r: Poly, op: Literal['add', 'sub', 'mul']) -> Poly:
    """
    Exact polynomial addition, subtraction or multiplication.

    Args:
        p (Poly): Left operand.
        r (Poly): Right operand.
        op (str): One of 'add', 'sub' or 'mul'.

    Returns:
        Poly: The result in canonical form.
    """
    if op in ('add', 'sub'):
        n = max(len(p.coeffs), len(r.coeffs))
        sign = 1 if op == 'add' else -1
        return Poly(tuple(p.coeff(i) + sign * r.coeff(i) for i in range(n)))
    if op == 'mul':
        if p.is_zero() or r.is_zero():
            return Poly.zero()
        out = [Fraction(0)] * (len(p.coeffs) + len(r.coeffs) - 1)
        for i, a in enumerate(p.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(r.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out))
    raise ValueError(f"Unsupported polynomial operation: '{op}'")


def poly_eval(p: Poly, x) -> Rational:
    """Evaluate p at x by Horner's rule, exactly."""
    x = _as_rational(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True, eq=True)
class TruncSeries:
    """
    Power series in t truncated after t^order.

    `coeffs[n]` is the raw coefficient of t^n for n = 0..order (missing
    entries are padded with zeros). Normalisations such as t^n/n! or
    t^n/[n]_q! are applied by the consuming modules.
    """
    coeffs: tuple
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("Truncation order must be nonnegative")
        cs = [_as_rational(c) for c in self.coeffs[:self.order + 1]]
        cs += [Fraction(0)] * (self.order + 1 - len(cs))
        object.__setattr__(self, 'coeffs', tuple(cs))

    @classmethod
    def one(cls, order: int) -> "TruncSeries":
        return cls((1,), order)

    @classmethod
    def from_poly(cls, p: Poly, order: int) -> "TruncSeries":
        return cls(p.coeffs, order)

    @classmethod
    def from_function(cls, term, order: int) -> "TruncSeries":
        return cls(tuple(term(n) for n in range(order + 1)), order)

    def coeff(self, n: int) -> Rational:
        if 0 <= n <= self.order:
            return self.coeffs[n]
        return Fraction(0)

    def truncate(self, order: int) -> "TruncSeries":
        return TruncSeries(self.coeffs, min(order, self.order))

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        order = min(self.order, other.order)
        return TruncSeries(
            tuple(self.coeffs[n] + other.coeffs[n] for n in range(order + 1)),
            order
        )

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        order = min(self.order, other.order)
        return TruncSeries(
            tuple(self.coeffs[n] - other.coeffs[n] for n in range(order + 1)),
            order
        )

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return series_mul(self, other)
        c = _as_rational(other)
        return TruncSeries(tuple(a * c for a in self.coeffs), self.order)

    __rmul__ = __mul__

    def shift(self, m: int) -> "TruncSeries":
        """Multiply by t^m, keeping the truncation order."""
        return TruncSeries((0,) * m + self.coeffs, self.order)

    def to_list(self) -> List[str]:
        return [format_rational(c) for c in self.coeffs]


def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Cauchy product of a and b truncated at the smaller order."""
    order = min(a.order, b.order)
    out = []
    for n in range(order + 1):
        s = Fraction(0)
        for j in range(n + 1):
            aj = a.coeffs[j]
            if aj:
                s += aj * b.coeffs[n - j]
        out.append(s)
    return TruncSeries(tuple(out), order)


def series_invert(a: TruncSeries) -> TruncSeries:
    """
    Multiplicative inverse of a truncated series.

    Args:
        a (TruncSeries): Series with nonzero constant term.

    Returns:
        TruncSeries: b with a·b = 1 up to the truncation order of a.

    Raises:
        ZeroConstantTerm: If the constant term of a is zero.
    """
    a0 = a.coeffs[0]
    if a0 == 0:
        raise ZeroConstantTerm(
            "Cannot invert a power series with zero constant term"
        )
    inv0 = 1 / a0
    b = [inv0]
    for n in range(1, a.order + 1):
        s = Fraction(0)
        for j in range(1, n + 1):
            if a.coeffs[j]:
                s += a.coeffs[j] * b[n - j]
        b.append(-inv0 * s)
    return TruncSeries(tuple(b), a.order)


def series_pow(a: TruncSeries, k: int) -> TruncSeries:
    """a^k by repeated multiplication; negative k inverts a first."""
    if k < 0:
        return series_pow(series_invert(a), -k)
    result = TruncSeries.one(a.order)
    for _ in range(k):
        result = series_mul(result, a)
    return result


@dataclass(frozen=True, eq=True)
class RMatrix:
    """Dense rational matrix stored row-major as a tuple of row tuples."""
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(_as_rational(v) for v in row) for row in self.entries)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise DimensionMismatch("All matrix rows must have the same length")
        object.__setattr__(self, 'entries', rows)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @classmethod
    def identity(cls, n: int) -> "RMatrix":
        return cls(tuple(
            tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)
        ))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence]) -> "RMatrix":
        return cls(tuple(tuple(r) for r in rows))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "RMatrix") -> "RMatrix":
        return mat_mul(self, other)

    def transpose(self) -> "RMatrix":
        return RMatrix(tuple(zip(*self.entries)))

    def is_square(self) -> bool:
        return self.rows == self.cols

    def to_list(self) -> List[List[str]]:
        return [[format_rational(v) for v in row] for row in self.entries]

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    def to_table(self) -> str:
        """Render as an aligned plain-text table, columns right-aligned."""
        cells = self.to_list()
        if not cells:
            return ""
        widths = [max(len(r[j]) for r in cells) for j in range(self.cols)]
        return "\n".join(
            "  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells
        )


def mat_mul(A: RMatrix, B: RMatrix) -> RMatrix:
    """
    Exact matrix product.

    Raises:
        DimensionMismatch: If A.cols != B.rows.
    """
    if A.cols != B.rows:
        raise DimensionMismatch(
            f"Cannot multiply a {A.rows}x{A.cols} matrix "
            f"by a {B.rows}x{B.cols} matrix"
        )
    bt = B.transpose().entries
    return RMatrix(tuple(
        tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in bt)
        for row in A.entries
    ))


def _eliminate(A: RMatrix):
    # Gauss-Jordan on [A | I]; returns (inverse, determinant) or
    # (None, 0) when A is singular.
    n = A.rows
    X = [list(r) for r in A.entries]
    Y = [list(r) for r in RMatrix.identity(n).entries]
    det = Fraction(1)
    for i in range(n):
        # lowest row index with a nonzero pivot
        for j in range(i, n):
            if X[j][i] != 0:
                break
        else:
            return None, Fraction(0)
        if j != i:
            X[i], X[j] = X[j], X[i]
            Y[i], Y[j] = Y[j], Y[i]
            det = -det
        pivot = X[i][i]
        det *= pivot
        X[i] = [v / pivot for v in X[i]]
        Y[i] = [v / pivot for v in Y[i]]
        for r in range(n):
            if r == i or X[r][i] == 0:
                continue
            f = X[r][i]
            X[r] = [a - f * b for a, b in zip(X[r], X[i])]
            Y[r] = [a - f * b for a, b in zip(Y[r], Y[i])]
    return RMatrix(tuple(tuple(r) for r in Y)), det


def mat_inverse(A: RMatrix) -> RMatrix:
    """
    Exact inverse by Gauss-Jordan elimination with row exchanges.

    Raises:
        DimensionMismatch: If A is not square.
        SingularMatrix: If A has determinant zero.
    """
    if not A.is_square():
        raise DimensionMismatch(
            f"Only square matrices can be inverted, got {A.rows}x{A.cols}"
        )
    inverse, _ = _eliminate(A)
    if inverse is None:
        raise SingularMatrix("Matrix is singular and has no inverse")
    return inverse


def mat_det(A: RMatrix) -> Rational:
    if not A.is_square():
        raise DimensionMismatch(
            f"Determinant requires a square matrix, got {A.rows}x{A.cols}"
        )
    _, det = _eliminate(A)
    return det
