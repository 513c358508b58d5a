"""Small dense real matrices for low-order filter work.

Everything here is sized for state dimensions of at most :data:`ORDER_CAP`
(default 8): beyond that the observability/controllability products built on
top of these routines are too ill-conditioned to mean anything, so the cap is
enforced at construction.  Storage is an immutable tuple of row tuples.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import DimensionMismatch, SingularMatrix

# Largest state dimension the package will build.  Module-level so a caller
# who really wants bigger matrices can raise it before constructing anything.
ORDER_CAP = 8

# A pivot below this fraction of its row's pre-elimination magnitude is
# treated as zero during inversion.
_PIVOT_RTOL = 1e-12


class Matrix:
    """Immutable dense real matrix (row-major)."""

    __slots__ = ("data",)

    def __init__(self, rows: Iterable[Iterable[float]]):
        data = tuple(tuple(float(v) for v in row) for row in rows)
        if not data or not data[0]:
            raise DimensionMismatch("matrix must have at least one row and column")
        width = len(data[0])
        if any(len(row) != width for row in data):
            raise DimensionMismatch("ragged rows")
        if len(data) > ORDER_CAP or width > ORDER_CAP:
            raise DimensionMismatch(
                f"matrix {len(data)}x{width} exceeds the {ORDER_CAP}x{ORDER_CAP} cap"
            )
        self.data = data

    # --- construction helpers ---

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)])

    @classmethod
    def row_vector(cls, values: Sequence[float]) -> "Matrix":
        return cls([list(values)])

    @classmethod
    def column(cls, values: Sequence[float]) -> "Matrix":
        return cls([[v] for v in values])

    # --- shape / access ---

    @property
    def rows(self) -> int:
        return len(self.data)

    @property
    def cols(self) -> int:
        return len(self.data[0])

    def __getitem__(self, ij) -> float:
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple:
        return self.data[i]

    def col(self, j: int) -> tuple:
        return tuple(row[j] for row in self.data)

    def flat(self) -> tuple:
        """All entries, row-major.  Handy for 1xN and Nx1 matrices."""
        return tuple(v for row in self.data for v in row)

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.data == other.data

    def __hash__(self) -> int:
        return hash(self.data)

    def __repr__(self) -> str:
        body = ",\n        ".join(repr(list(r)) for r in self.data)
        return f"Matrix([{body}])"

    # --- arithmetic ---

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionMismatch(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        cols = other.cols
        out = []
        for row in self.data:
            out.append(
                [
                    sum(row[k] * other.data[k][j] for k in range(self.cols))
                    for j in range(cols)
                ]
            )
        return Matrix(out)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shape mismatch in subtraction")
        return Matrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ]
        )

    def __add__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shape mismatch in addition")
        return Matrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ]
        )

    def scaled(self, s: float) -> "Matrix":
        return Matrix([[s * v for v in row] for row in self.data])

    def transpose(self) -> "Matrix":
        return Matrix([self.col(j) for j in range(self.cols)])

    def inv(self) -> "Matrix":
        """Inverse by Gauss-Jordan elimination with partial pivoting.

        Raises :class:`SingularMatrix` when the best available pivot is
        smaller than ``1e-12`` times the largest entry the pivot's row had
        before elimination started.
        """
        if self.rows != self.cols:
            raise DimensionMismatch("only square matrices can be inverted")
        n = self.rows
        a = [list(row) for row in self.data]
        b = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
        # Row magnitudes before any elimination, for the relative pivot test.
        row_scale = [max(abs(v) for v in row) for row in self.data]

        for col in range(n):
            pivot_row = max(range(col, n), key=lambda r: abs(a[r][col]))
            pivot = a[pivot_row][col]
            if abs(pivot) <= _PIVOT_RTOL * row_scale[pivot_row]:
                raise SingularMatrix(f"no usable pivot in column {col}")
            if pivot_row != col:
                a[col], a[pivot_row] = a[pivot_row], a[col]
                b[col], b[pivot_row] = b[pivot_row], b[col]
                row_scale[col], row_scale[pivot_row] = (
                    row_scale[pivot_row],
                    row_scale[col],
                )
            inv_p = 1.0 / pivot
            a[col] = [v * inv_p for v in a[col]]
            b[col] = [v * inv_p for v in b[col]]
            for r in range(n):
                if r == col:
                    continue
                f = a[r][col]
                if f != 0.0:
                    a[r] = [v - f * w for v, w in zip(a[r], a[col])]
                    b[r] = [v - f * w for v, w in zip(b[r], b[col])]
        return Matrix(b)

    def int_power(self, n: int) -> "Matrix":
        """``self`` raised to an integer power; negative powers invert first."""
        if self.rows != self.cols:
            raise DimensionMismatch("only square matrices have powers")
        if n < 0:
            return self.inv().int_power(-n)
        result = Matrix.identity(self.rows)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result
