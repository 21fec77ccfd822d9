"""Exact arithmetic and linear algebra over a prime field GF(q).

All encoding, decoding, and rank verification in this package runs on the
integer arithmetic provided here; there is no floating point anywhere on a
coding path.  ``Field`` methods operate on raw ``int`` values in ``[0, q)``
(the fast path used by the coding engine), while ``FieldElement`` wraps a
value together with its field for the safe public API.

Values, elements, and matrices are immutable after construction and every
operation is a pure function, so everything here can be shared freely
between threads.
"""

from __future__ import annotations

import random
from typing import Iterable, Sequence


class NotPrimeError(ValueError):
    """The requested field modulus is not a prime number."""


class FieldMismatchError(ValueError):
    """Operands belong to different fields."""


class LinearSolveError(ValueError):
    """Base class for structured linear-system failures."""


class InconsistentSystemError(LinearSolveError):
    """The system A x = y has no solution."""


class UnderdeterminedSystemError(LinearSolveError):
    """The system A x = y has more than one solution."""


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


# Inverse lookup tables are only worth their O(q) memory for small moduli.
_INV_TABLE_MAX = 1 << 12


class Field:
    """The prime field GF(q).

    Arithmetic methods take and return plain ints in ``[0, q)``.  Two Field
    instances compare equal iff they have the same modulus.
    """

    __slots__ = ("q", "_inv_table")

    def __init__(self, q: int):
        if not isinstance(q, int) or isinstance(q, bool) or not is_prime(q):
            raise NotPrimeError(f"field modulus must be a prime integer, got {q!r}")
        self.q = q
        self._inv_table = None

    def __repr__(self) -> str:
        return f"Field({self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("Field", self.q))

    # -- arithmetic on raw values -------------------------------------

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def neg(self, a: int) -> int:
        return (-a) % self.q

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError(f"0 has no multiplicative inverse in GF({self.q})")
        if self.q <= _INV_TABLE_MAX:
            table = self._inv_table
            if table is None:
                q = self.q
                table = [0] * q
                for v in range(1, q):
                    table[v] = pow(v, q - 2, q)
                self._inv_table = table
            return table[a]
        return pow(a, -1, self.q)

    def div(self, a: int, b: int) -> int:
        return (a * self.inv(b)) % self.q

    # -- element and iteration helpers --------------------------------

    def element(self, value: int) -> "FieldElement":
        return FieldElement(self, value)

    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self) -> range:
        return range(self.q)

    def nonzero_elements(self) -> range:
        return range(1, self.q)

    def rand_nonzero(self, rng: random.Random) -> int:
        """Uniform draw from {1, ..., q-1}; deterministic for a seeded rng."""
        return rng.randrange(1, self.q)


def field_new(q: int) -> Field:
    """Construct GF(q); raises NotPrimeError unless q is prime."""
    return Field(q)


class FieldElement:
    """A single value of GF(q), bound to its field.

    Supports ``+ - * /`` and unary ``-`` against other elements of the same
    field or plain ints (ints are reduced mod q).  Mixing fields raises
    FieldMismatchError.
    """

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value: int):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", value % field.q)

    def __setattr__(self, name, val):
        raise AttributeError("FieldElement is immutable")

    def _coerce(self, other) -> int | None:
        if isinstance(other, FieldElement):
            if other.field.q != self.field.q:
                raise FieldMismatchError(
                    f"cannot mix GF({self.field.q}) and GF({other.field.q})"
                )
            return other.value
        if isinstance(other, int):
            return other % self.field.q
        return None

    def __add__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FieldElement(self.field, self.value + v)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FieldElement(self.field, self.value - v)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FieldElement(self.field, v - self.value)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FieldElement(self.field, self.value * v)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, -self.value)

    def inv(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FieldElement(self.field, self.value * self.field.inv(v))

    def __rtruediv__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FieldElement(self.field, v * self.field.inv(self.value))

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return other.field.q == self.field.q and other.value == self.value
        if isinstance(other, int):
            return self.value == other % self.field.q
        return NotImplemented

    def __hash__(self) -> int:
        # Matches hash of the reduced int so x == int(x) stays usable in sets.
        return hash(self.value)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"GF{self.field.q}({self.value})"


def _value_of(field: Field, x) -> int:
    if isinstance(x, FieldElement):
        if x.field.q != field.q:
            raise FieldMismatchError(
                f"entry from GF({x.field.q}) used in a GF({field.q}) matrix"
            )
        return x.value
    if isinstance(x, int):
        return x % field.q
    raise TypeError(f"expected int or FieldElement, got {type(x).__name__}")


def _rref(field: Field, rows: list[list[int]], cols: int) -> list[int]:
    """In-place reduced row echelon form over the first `cols` columns.

    Pivot choice is deterministic: the first nonzero entry scanning the
    remaining rows top to bottom, columns left to right.  Returns the list
    of pivot columns.
    """
    q = field.q
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(cols):
        if r == nrows:
            break
        p = None
        for k in range(r, nrows):
            if rows[k][c]:
                p = k
                break
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv_inv = field.inv(rows[r][c])
        if piv_inv != 1:
            rows[r] = [(piv_inv * x) % q for x in rows[r]]
        lead = rows[r]
        for k in range(nrows):
            fk = rows[k][c]
            if fk and k != r:
                rows[k] = [(x - fk * y) % q for x, y in zip(rows[k], lead)]
        pivots.append(c)
        r += 1
    return pivots


def rank_values(field: Field, rows: Sequence[Sequence[int]]) -> int:
    """Row rank of an integer matrix over GF(q)."""
    work = [list(r) for r in rows]
    cols = len(work[0]) if work else 0
    return len(_rref(field, work, cols))


def solve_values(
    field: Field, a_rows: Sequence[Sequence[int]], y: Sequence[int]
) -> tuple[int, ...]:
    """Solve A x = y over GF(q) for the unique x, on raw int values.

    Raises InconsistentSystemError when no solution exists and
    UnderdeterminedSystemError when the solution is not unique.
    """
    if len(a_rows) != len(y):
        raise ValueError(
            f"matrix has {len(a_rows)} rows but right-hand side has {len(y)}"
        )
    n = len(a_rows[0]) if a_rows else 0
    aug = [list(r) + [yv % field.q] for r, yv in zip(a_rows, y)]
    pivots = _rref(field, aug, n)
    for row in aug[len(pivots):]:
        if row[-1]:
            raise InconsistentSystemError("system A x = y has no solution")
    if len(pivots) < n:
        raise UnderdeterminedSystemError(
            f"system determines only {len(pivots)} of {n} unknowns"
        )
    x = [0] * n
    for r, c in enumerate(pivots):
        x[c] = aug[r][-1]
    return tuple(x)


class FieldMatrix:
    """An immutable dense matrix over GF(q), stored as tuples of int values."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field: Field, rows: Iterable[Iterable], cols: int | None = None):
        data = tuple(tuple(_value_of(field, x) for x in row) for row in rows)
        if data:
            ncols = len(data[0])
            if any(len(r) != ncols for r in data):
                raise ValueError("ragged rows in matrix")
            if cols is not None and cols != ncols:
                raise ValueError(f"cols={cols} but rows have {ncols} entries")
        else:
            ncols = cols or 0
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", len(data))
        object.__setattr__(self, "cols", ncols)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, val):
        raise AttributeError("FieldMatrix is immutable")

    @classmethod
    def identity(cls, field: Field, n: int) -> "FieldMatrix":
        return cls(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "FieldMatrix":
        return cls(field, [[0] * cols for _ in range(rows)], cols=cols)

    def at(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.field, self.data[i][j])

    def rank(self) -> int:
        return rank_values(self.field, self.data)

    def solve(self, y: Sequence) -> tuple[FieldElement, ...]:
        rhs = [_value_of(self.field, v) for v in y]
        x = solve_values(self.field, self.data, rhs)
        return tuple(FieldElement(self.field, v) for v in x)

    def mul_vec(self, x: Sequence) -> tuple[FieldElement, ...]:
        vals = [_value_of(self.field, v) for v in x]
        if len(vals) != self.cols:
            raise ValueError(f"vector length {len(vals)} != cols {self.cols}")
        q = self.field.q
        out = [sum(a * b for a, b in zip(row, vals)) % q for row in self.data]
        return tuple(FieldElement(self.field, v) for v in out)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldMatrix)
            and other.field.q == self.field.q
            and other.data == self.data
            and other.cols == self.cols
        )

    def __hash__(self) -> int:
        return hash((self.field.q, self.cols, self.data))

    def __repr__(self) -> str:
        return f"FieldMatrix(GF({self.field.q}), {self.rows}x{self.cols})"


def rank(m: FieldMatrix) -> int:
    """Row rank of a matrix over its field."""
    return m.rank()


def solve(a: FieldMatrix, y: Sequence) -> tuple[FieldElement, ...]:
    """Solve A x = y; see FieldMatrix.solve."""
    return a.solve(y)


def rand_nonzero(field: Field, rng: random.Random) -> FieldElement:
    """A uniformly random nonzero element of the field."""
    return FieldElement(field, field.rand_nonzero(rng))
