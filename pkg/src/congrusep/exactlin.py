"""Exact arbitrary-precision integer and rational linear algebra.

Every value in this package is exact: integer matrices carry Python ints,
rational matrices carry ``fractions.Fraction`` (always in lowest terms with
positive denominator).  There is no floating point anywhere: congruence and
divisibility arguments downstream are meaningless under rounding.

All matrix and polynomial values are immutable after construction and may be
shared freely between threads.

JSON wire form for matrices (shared by the CLI and certificates)::

    {"n": 2, "entries": [["1", "1/2"], ["0", "-3"]]}

Entries are decimal integer or ``"p/q"`` strings (strings, not floats, so
exactness survives serialization).  Plain JSON integers are accepted on input.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    BitBoundExceededError,
    DimensionMismatchError,
    InputError,
    PreconditionError,
    SingularMatrixError,
)

#: Default ceiling (in bits) for any intermediate entry of the Smith normal
#: form reduction.  Override per call or via the CONGRUSEP_BIT_BOUND env var.
DEFAULT_BIT_BOUND = 10**6

_ENV_BIT_BOUND = "CONGRUSEP_BIT_BOUND"


def _resolve_bit_bound(bit_bound: int | None) -> int:
    if bit_bound is not None:
        return bit_bound
    env = os.environ.get(_ENV_BIT_BOUND)
    if env is not None:
        try:
            value = int(env)
        except ValueError as exc:
            raise InputError(f"{_ENV_BIT_BOUND} must be an integer, got {env!r}") from exc
        if value <= 0:
            raise InputError(f"{_ENV_BIT_BOUND} must be positive, got {value}")
        return value
    return DEFAULT_BIT_BOUND


def _parse_exact(value) -> Fraction:
    """Parse an exact scalar from JSON: int or 'p' / 'p/q' string."""
    if isinstance(value, bool):
        raise InputError(f"matrix entries must be exact numbers, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse exact entry {value!r}") from exc
    raise InputError(f"matrix entries must be ints or strings, got {type(value).__name__}")


def _format_exact(value: Fraction | int) -> str:
    return str(value)


class IntegerMatrix:
    """An immutable matrix with arbitrary-precision integer entries.

    Square matrices are the ambient arithmetic for GL(n,Z); rectangular ones
    appear as lattice maps fed to the Smith normal form.
    """

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, entries: Sequence[Sequence[int]]):
        for row in entries:
            for x in row:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise InputError(f"integer matrix entry {x!r} is not an int")
        rows = tuple(tuple(row) for row in entries)
        if not rows or not rows[0]:
            raise InputError("matrix must have at least one row and one column")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise InputError("ragged rows in matrix")
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", width)
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("IntegerMatrix is immutable")

    # -- construction ------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "IntegerMatrix":
        cols = rows if cols is None else cols
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def from_json_dict(cls, data) -> "IntegerMatrix":
        mat = RationalMatrix.from_json_dict(data)
        return mat.to_integer()

    # -- basic structure ---------------------------------------------------

    @property
    def n(self) -> int:
        if self.rows != self.cols:
            raise DimensionMismatchError(f"matrix is {self.rows}x{self.cols}, not square")
        return self.rows

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, key: tuple[int, int]) -> int:
        i, j = key
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntegerMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.rows, self.cols, self.entries))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        body = ", ".join(str(list(row)) for row in self.entries)
        return f"IntegerMatrix([{body}])"

    # -- arithmetic --------------------------------------------------------

    def __mul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        b_cols = other.cols
        out = []
        for i in range(self.rows):
            arow = self.entries[i]
            out.append(
                [
                    sum(arow[k] * other.entries[k][j] for k in range(self.cols))
                    for j in range(b_cols)
                ]
            )
        return IntegerMatrix(out)

    def __add__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        self._same_shape(other)
        return IntegerMatrix(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __sub__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        self._same_shape(other)
        return IntegerMatrix(
            [
                [self.entries[i][j] - other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __neg__(self) -> "IntegerMatrix":
        return IntegerMatrix([[-x for x in row] for row in self.entries])

    def __pow__(self, exponent: int) -> "IntegerMatrix":
        n = self.n
        if exponent < 0:
            return self.unimodular_inverse() ** (-exponent)
        result = IntegerMatrix.identity(n)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def _same_shape(self, other: "IntegerMatrix") -> None:
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatchError(
                f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def trace(self) -> int:
        return sum(self.entries[i][i] for i in range(self.n))

    def det(self) -> int:
        """Exact determinant via Bareiss fraction-free elimination."""
        n = self.n
        a = [list(row) for row in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    @property
    def is_unimodular(self) -> bool:
        return self.is_square and self.det() in (1, -1)

    def unimodular_inverse(self) -> "IntegerMatrix":
        """Inverse of a determinant-±1 matrix, computed exactly over Z."""
        d = self.det()
        if d not in (1, -1):
            raise PreconditionError(f"matrix is not unimodular: det = {d}")
        inv = self.to_rational().inverse()
        return inv.to_integer()

    def inverse(self) -> "RationalMatrix":
        return self.to_rational().inverse()

    def to_rational(self) -> "RationalMatrix":
        return RationalMatrix(self.entries)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "entries": [[_format_exact(x) for x in row] for row in self.entries],
        }


class RationalMatrix:
    """An immutable matrix with exact rational entries (always reduced)."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, entries: Sequence[Sequence]):
        rows = tuple(tuple(Fraction(x) for x in row) for row in entries)
        if not rows or not rows[0]:
            raise InputError("matrix must have at least one row and one column")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise InputError("ragged rows in matrix")
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", width)
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("RationalMatrix is immutable")

    # -- construction ------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RationalMatrix":
        cols = rows if cols is None else cols
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def from_json_dict(cls, data) -> "RationalMatrix":
        if not isinstance(data, dict):
            raise InputError("matrix JSON must be an object")
        try:
            n = data["n"]
            entries = data["entries"]
        except KeyError as exc:
            raise InputError(f"matrix JSON missing key {exc}") from exc
        if not isinstance(n, int) or n < 1:
            raise InputError(f"matrix dimension must be a positive int, got {n!r}")
        if not isinstance(entries, list) or len(entries) != n:
            raise InputError("matrix JSON entries must be an n-row list")
        parsed = []
        for row in entries:
            if not isinstance(row, list) or len(row) != n:
                raise InputError("matrix JSON entries must be an n x n array")
            parsed.append([_parse_exact(x) for x in row])
        return cls(parsed)

    # -- basic structure ---------------------------------------------------

    @property
    def n(self) -> int:
        if self.rows != self.cols:
            raise DimensionMismatchError(f"matrix is {self.rows}x{self.cols}, not square")
        return self.rows

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        i, j = key
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RationalMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.rows, self.cols, self.entries))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.entries)
        return f"RationalMatrix([{body}])"

    # -- arithmetic --------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, IntegerMatrix):
            other = other.to_rational()
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        out = []
        for i in range(self.rows):
            arow = self.entries[i]
            out.append(
                [
                    sum(arow[k] * other.entries[k][j] for k in range(self.cols))
                    for j in range(other.cols)
                ]
            )
        return RationalMatrix(out)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if isinstance(other, IntegerMatrix):
            other = other.to_rational()
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        self._same_shape(other)
        return RationalMatrix(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        if isinstance(other, IntegerMatrix):
            other = other.to_rational()
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        self._same_shape(other)
        return RationalMatrix(
            [
                [self.entries[i][j] - other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix([[-x for x in row] for row in self.entries])

    def __pow__(self, exponent: int) -> "RationalMatrix":
        n = self.n
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = RationalMatrix.identity(n)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def _same_shape(self, other: "RationalMatrix") -> None:
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatchError(
                f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def scale(self, c) -> "RationalMatrix":
        c = Fraction(c)
        return RationalMatrix([[c * x for x in row] for row in self.entries])

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def trace(self) -> Fraction:
        return sum((self.entries[i][i] for i in range(self.n)), Fraction(0))

    def det(self) -> Fraction:
        n = self.n
        a = [list(row) for row in self.entries]
        sign = 1
        result = Fraction(1)
        for k in range(n):
            pivot_row = None
            for i in range(k, n):
                if a[i][k] != 0:
                    pivot_row = i
                    break
            if pivot_row is None:
                return Fraction(0)
            if pivot_row != k:
                a[k], a[pivot_row] = a[pivot_row], a[k]
                sign = -sign
            pivot = a[k][k]
            result *= pivot
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    factor = a[i][k] / pivot
                    a[i] = [a[i][j] - factor * a[k][j] for j in range(n)]
        return sign * result

    def inverse(self) -> "RationalMatrix":
        """Exact inverse by Gauss-Jordan elimination."""
        n = self.n
        a = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(self.entries)]
        for k in range(n):
            pivot_row = None
            for i in range(k, n):
                if a[i][k] != 0:
                    pivot_row = i
                    break
            if pivot_row is None:
                raise SingularMatrixError("matrix is singular")
            if pivot_row != k:
                a[k], a[pivot_row] = a[pivot_row], a[k]
            pivot = a[k][k]
            a[k] = [x / pivot for x in a[k]]
            for i in range(n):
                if i != k and a[i][k] != 0:
                    factor = a[i][k]
                    a[i] = [a[i][j] - factor * a[k][j] for j in range(2 * n)]
        return RationalMatrix([row[n:] for row in a])

    @property
    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.entries for x in row)

    def to_integer(self) -> IntegerMatrix:
        if not self.is_integral:
            raise InputError("matrix has non-integer entries")
        return IntegerMatrix([[int(x) for x in row] for row in self.entries])

    def denominator_lcm(self) -> int:
        """Least common multiple of all entry denominators."""
        from math import lcm

        return lcm(*(x.denominator for row in self.entries for x in row))

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "entries": [[_format_exact(x) for x in row] for row in self.entries],
        }


# ---------------------------------------------------------------------------
# polynomials over Q
# ---------------------------------------------------------------------------


class Polynomial:
    """A dense polynomial with exact rational coefficients.

    Coefficients are stored in ascending order; the zero polynomial has an
    empty coefficient tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def x_power(cls, k: int) -> "Polynomial":
        return cls([0] * k + [1])

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return not self.is_zero and self.leading == 1

    def monic(self) -> "Polynomial":
        lead = self.leading
        return Polynomial([c / lead for c in self.coeffs])

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        out = list(self.coeffs) + [Fraction(0)] * max(0, len(other.coeffs) - len(self.coeffs))
        for i, c in enumerate(other.coeffs):
            out[i] -= c
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs])

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return Polynomial([c * other for c in self.coeffs])
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return Polynomial([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative polynomial powers are not defined")
        result = Polynomial([1])
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        div = other.coeffs
        dq = len(rem) - len(div)
        if dq < 0:
            return Polynomial([]), self
        quot = [Fraction(0)] * (dq + 1)
        lead = div[-1]
        for k in range(dq, -1, -1):
            if len(rem) < len(div) + k:
                continue
            c = rem[len(div) + k - 1] / lead
            if c == 0:
                continue
            quot[k] = c
            for i, d in enumerate(div):
                rem[i + k] -= c * d
        while rem and rem[-1] == 0:
            rem.pop()
        return Polynomial(quot), Polynomial(rem)

    def __floordiv__(self, other: "Polynomial") -> "Polynomial":
        return divmod(self, other)[0]

    def __mod__(self, other: "Polynomial") -> "Polynomial":
        return divmod(self, other)[1]

    def divides(self, other: "Polynomial") -> bool:
        return (other % self).is_zero

    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def eval_fraction(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_matrix(self, a: RationalMatrix) -> RationalMatrix:
        """Evaluate at a square rational matrix (Horner)."""
        n = a.n
        acc = RationalMatrix.zeros(n)
        eye = RationalMatrix.identity(n)
        for c in reversed(self.coeffs):
            acc = acc * a + eye.scale(c)
        return acc

    def __repr__(self) -> str:
        if self.is_zero:
            return "Polynomial(0)"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*x" if c != 1 else "x")
            else:
                terms.append(f"{c}*x^{i}" if c != 1 else f"x^{i}")
        return "Polynomial(" + " + ".join(terms) + ")"


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd by the Euclidean algorithm over Q[x]."""
    while not b.is_zero:
        a, b = b, (a % b)
        if not b.is_zero:
            b = b.monic()
    if a.is_zero:
        return a
    return a.monic()


def poly_xgcd(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial, Polynomial]:
    """Extended Euclid: returns (g, u, v) with u*a + v*b = g, g monic."""
    r0, r1 = a, b
    u0, u1 = Polynomial([1]), Polynomial([])
    v0, v1 = Polynomial([]), Polynomial([1])
    while not r1.is_zero:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if r0.is_zero:
        return r0, u0, v0
    lead = r0.leading
    inv = Fraction(1) / lead
    return r0.monic(), u0 * inv, v0 * inv


def squarefree_part(f: Polynomial) -> Polynomial:
    """The monic squarefree polynomial with the same roots as ``f``."""
    g = poly_gcd(f, f.derivative())
    if g.degree <= 0:
        return f.monic()
    return (f // g).monic()


def is_squarefree(f: Polynomial) -> bool:
    return poly_gcd(f, f.derivative()).degree <= 0


# ---------------------------------------------------------------------------
# characteristic and minimal polynomials
# ---------------------------------------------------------------------------


def char_poly(a: RationalMatrix | IntegerMatrix) -> Polynomial:
    """Monic characteristic polynomial, exact (Faddeev–LeVerrier recursion)."""
    if isinstance(a, IntegerMatrix):
        a = a.to_rational()
    n = a.n
    eye = RationalMatrix.identity(n)
    m = eye
    coeffs = [Fraction(1)]
    for k in range(1, n + 1):
        am = a * m
        c = -am.trace() / k
        coeffs.append(c)
        m = am + eye.scale(c)
    # coeffs are [1, c1, ..., cn] for x^n + c1 x^(n-1) + ... + cn
    return Polynomial(list(reversed(coeffs)))


def _flatten(a: RationalMatrix) -> tuple[Fraction, ...]:
    return tuple(x for row in a.entries for x in row)


def _solve_exact(columns: list[tuple[Fraction, ...]], target: tuple[Fraction, ...]):
    """Solve sum_i x_i * columns[i] = target over Q; None if inconsistent."""
    rows = len(target)
    k = len(columns)
    aug = [[columns[j][i] for j in range(k)] + [target[i]] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(k):
        pivot_row = None
        for i in range(r, rows):
            if aug[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        aug[r], aug[pivot_row] = aug[pivot_row], aug[r]
        pivot = aug[r][c]
        aug[r] = [x / pivot for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [aug[i][j] - f * aug[r][j] for j in range(k + 1)]
        pivots.append(c)
        r += 1
    for i in range(r, rows):
        if aug[i][k] != 0:
            return None
    solution = [Fraction(0)] * k
    for row_idx, c in enumerate(pivots):
        solution[c] = aug[row_idx][k]
    return solution


def min_poly(a: RationalMatrix | IntegerMatrix) -> Polynomial:
    """Monic minimal polynomial, found as the first linear dependence among
    the flattened powers I, a, a^2, ...
    """
    if isinstance(a, IntegerMatrix):
        a = a.to_rational()
    n = a.n
    powers = [RationalMatrix.identity(n)]
    flat = [_flatten(powers[0])]
    for k in range(1, n + 1):
        powers.append(powers[-1] * a)
        target = _flatten(powers[-1])
        sol = _solve_exact(flat, target)
        if sol is not None:
            return Polynomial([-c for c in sol] + [Fraction(1)])
        flat.append(target)
    raise AssertionError("unreachable: degree-n dependence is guaranteed")


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmithDecomposition:
    """U * A * V = D with U, V unimodular and D diagonal, d_i | d_(i+1)."""

    U: IntegerMatrix
    D: IntegerMatrix
    V: IntegerMatrix

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        k = min(self.D.rows, self.D.cols)
        return tuple(d for d in (self.D.entries[i][i] for i in range(k)) if d != 0)


def smith_normal_form(a: IntegerMatrix, bit_bound: int | None = None) -> SmithDecomposition:
    """Smith normal form by classical pivot-and-reduce.

    Pivots are chosen with minimal absolute value (ties broken by position),
    which keeps intermediate growth modest in practice.  Any intermediate
    entry exceeding ``bit_bound`` bits aborts with BitBoundExceededError.
    """
    bound = _resolve_bit_bound(bit_bound)
    rows, cols = a.rows, a.cols
    m = [list(row) for row in a.entries]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def guard(x: int) -> int:
        if abs(x).bit_length() > bound:
            raise BitBoundExceededError(
                f"entry exceeded {bound} bits during Smith reduction"
            )
        return x

    def row_sub(i: int, k: int, q: int) -> None:
        if q == 0:
            return
        m[i] = [guard(x - q * y) for x, y in zip(m[i], m[k])]
        u[i] = [guard(x - q * y) for x, y in zip(u[i], u[k])]

    def col_sub(j: int, k: int, q: int) -> None:
        if q == 0:
            return
        for row in m:
            row[j] = guard(row[j] - q * row[k])
        for row in v:
            row[j] = guard(row[j] - q * row[k])

    def find_pivot(t: int):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = m[i][j]
                if x != 0:
                    key = (abs(x), i, j)
                    if best is None or key < best[0]:
                        best = (key, i, j)
        return None if best is None else (best[1], best[2])

    t = 0
    while t < min(rows, cols):
        loc = find_pivot(t)
        if loc is None:
            break
        while True:
            i, j = loc
            if i != t:
                m[t], m[i] = m[i], m[t]
                u[t], u[i] = u[i], u[t]
            if j != t:
                for row in m:
                    row[t], row[j] = row[j], row[t]
                for row in v:
                    row[t], row[j] = row[j], row[t]
            pivot = m[t][t]
            for i in range(t + 1, rows):
                row_sub(i, t, m[i][t] // pivot)
            for j in range(t + 1, cols):
                col_sub(j, t, m[t][j] // pivot)
            if all(m[i][t] == 0 for i in range(t + 1, rows)) and all(
                m[t][j] == 0 for j in range(t + 1, cols)
            ):
                # enforce divisibility of the trailing block by the pivot
                offender = None
                for i in range(t + 1, rows):
                    for j in range(t + 1, cols):
                        if m[i][j] % pivot != 0:
                            offender = i
                            break
                    if offender is not None:
                        break
                if offender is None:
                    break
                m[t] = [guard(x + y) for x, y in zip(m[t], m[offender])]
                u[t] = [guard(x + y) for x, y in zip(u[t], u[offender])]
            loc = find_pivot(t)
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return SmithDecomposition(U=IntegerMatrix(u), D=IntegerMatrix(m), V=IntegerMatrix(v))


# ---------------------------------------------------------------------------
# kernels, images, lattices
# ---------------------------------------------------------------------------


def mat_mul(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    """Exact product (operator form: ``a * b``)."""
    return a * b


def mat_inverse(a: RationalMatrix) -> RationalMatrix:
    """Exact inverse; raises SingularMatrixError on det = 0."""
    return a.inverse()


def mat_vec(a: RationalMatrix, vec: Sequence) -> tuple[Fraction, ...]:
    if a.cols != len(vec):
        raise DimensionMismatchError(f"matrix has {a.cols} cols, vector has {len(vec)}")
    v = [Fraction(x) for x in vec]
    return tuple(sum(row[j] * v[j] for j in range(a.cols)) for row in a.entries)


def _rref(a: RationalMatrix) -> tuple[list[list[Fraction]], list[int]]:
    rows = [list(row) for row in a.entries]
    nrows, ncols = a.rows, a.cols
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pivot = rows[r][c]
        rows[r] = [x / pivot for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [rows[i][j] - f * rows[r][j] for j in range(ncols)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def kernel_and_image(a: RationalMatrix) -> tuple[list[tuple[Fraction, ...]], list[tuple[Fraction, ...]]]:
    """Exact bases of ker(a) and im(a) for a square rational matrix.

    The image basis consists of the original pivot columns; the kernel basis
    comes from the reduced row echelon form with each free variable set to 1.
    dim ker + dim im = n.
    """
    n = a.n
    rref_rows, pivots = _rref(a)
    pivot_set = set(pivots)
    image = [tuple(a.entries[i][c] for i in range(n)) for c in pivots]
    kernel = []
    for free in range(n):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * n
        vec[free] = Fraction(1)
        for row_idx, c in enumerate(pivots):
            vec[c] = -rref_rows[row_idx][free]
        kernel.append(tuple(vec))
    return kernel, image


def integer_kernel_basis(a: RationalMatrix) -> list[tuple[int, ...]]:
    """Basis of the saturated integer kernel {x in Z^cols : a x = 0}."""
    from math import lcm

    scaled_rows = []
    for row in a.entries:
        d = lcm(*(x.denominator for x in row))
        scaled_rows.append([int(x * d) for x in row])
    snf = smith_normal_form(IntegerMatrix(scaled_rows))
    k = min(snf.D.rows, snf.D.cols)
    rank = sum(1 for i in range(k) if snf.D.entries[i][i] != 0)
    basis = []
    for j in range(rank, a.cols):
        basis.append(tuple(snf.V.entries[i][j] for i in range(a.cols)))
    return basis


def solve_integer_linear(a: RationalMatrix, b: Sequence) -> tuple[int, ...] | None:
    """One integer solution x of a·x = b, or None when no integral solution
    exists.  Clears denominators row by row and solves through the Smith
    normal form of the resulting integer system.
    """
    from math import lcm

    if a.rows != len(b):
        raise DimensionMismatchError("right-hand side length disagrees with rows")
    b = [Fraction(x) for x in b]
    int_rows = []
    int_rhs = []
    for row, rhs in zip(a.entries, b):
        d = lcm(rhs.denominator, *(x.denominator for x in row))
        int_rows.append([int(x * d) for x in row])
        int_rhs.append(int(rhs * d))
    snf = smith_normal_form(IntegerMatrix(int_rows))
    c = [
        sum(snf.U.entries[i][j] * int_rhs[j] for j in range(a.rows))
        for i in range(a.rows)
    ]
    k = min(a.rows, a.cols)
    y = [0] * a.cols
    for i in range(a.rows):
        d = snf.D.entries[i][i] if i < k else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d != 0:
                return None
            y[i] = c[i] // d
    return tuple(
        sum(snf.V.entries[r][i] * y[i] for i in range(a.cols)) for r in range(a.cols)
    )


def lattice_basis(vectors: Sequence[Sequence], dim: int) -> list[tuple[Fraction, ...]]:
    """Canonical basis (row Hermite form) of the Z-span of rational vectors.

    Returns fewer than ``dim`` vectors when the span has lower rank.
    """
    from math import lcm

    vecs = [tuple(Fraction(x) for x in v) for v in vectors]
    vecs = [v for v in vecs if any(x != 0 for x in v)]
    if not vecs:
        return []
    if any(len(v) != dim for v in vecs):
        raise DimensionMismatchError("lattice vectors of mixed dimension")
    denom = lcm(*(x.denominator for v in vecs for x in v))
    rows = [[int(x * denom) for x in v] for v in vecs]

    r = 0
    for col in range(dim):
        while True:
            nonzero = [i for i in range(r, len(rows)) if rows[i][col] != 0]
            if not nonzero:
                break
            pivot_idx = min(nonzero, key=lambda i: (abs(rows[i][col]), i))
            rows[r], rows[pivot_idx] = rows[pivot_idx], rows[r]
            done = True
            for i in range(r + 1, len(rows)):
                if rows[i][col] != 0:
                    q = rows[i][col] // rows[r][col]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                    if rows[i][col] != 0:
                        done = False
            if done:
                break
        if r < len(rows) and rows[r][col] != 0:
            if rows[r][col] < 0:
                rows[r] = [-x for x in rows[r]]
            pivot = rows[r][col]
            for i in range(r):
                q = rows[i][col] // pivot
                if q:
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
            r += 1
        if r == len(rows):
            break
    return [tuple(Fraction(x, denom) for x in row) for row in rows[:r]]
