"""Dense exact linear algebra over Q and Q(i).

Everything here is deterministic: row reduction always picks the first
nonzero entry in column order, so reduced row echelon forms (and thereby
Subspace bases) are canonical and comparable entry-wise.  Matrices are at
most a few hundred rows in this project; no attempt is made at asymptotic
cleverness.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import GaussianRational, is_zero


class DimensionMismatch(ValueError):
    """Contract violation: incompatible shapes or ambient dimensions."""


class Matrix:
    """Immutable dense matrix with exact scalar entries (row-major)."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries):
        entries = tuple(tuple(r) for r in entries)
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise DimensionMismatch(
                f"expected {rows}x{cols} entries, got "
                f"{len(entries)} rows of sizes {[len(r) for r in entries]}"
            )
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Matrix is immutable")

    @classmethod
    def from_rows(cls, rows):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, rows)

    @classmethod
    def zero(cls, rows: int, cols: int):
        return cls(rows, cols, [[Fraction(0)] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int):
        return cls(
            n, n, [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
        )

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def col(self, j):
        return tuple(self.entries[i][j] for i in range(self.rows))

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.entries)
        return f"Matrix({self.rows}x{self.cols}: {body})"

    def transpose(self) -> "Matrix":
        return Matrix(
            self.cols,
            self.rows,
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch("matrix addition shape mismatch")
        return Matrix(
            self.rows,
            self.cols,
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ],
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch("matrix subtraction shape mismatch")
        return Matrix(
            self.rows,
            self.cols,
            [
                [self.entries[i][j] - other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ],
        )

    def scale(self, s) -> "Matrix":
        return Matrix(
            self.rows,
            self.cols,
            [[s * x for x in r] for r in self.entries],
        )

    def __mul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatch("matrix product shape mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = Fraction(0)
                for k in range(self.cols):
                    a = self.entries[i][k]
                    if is_zero(a):
                        continue
                    acc = acc + a * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return Matrix(self.rows, other.cols, out)

    def apply(self, vec):
        """Matrix-vector product with a sequence of scalars."""
        if len(vec) != self.cols:
            raise DimensionMismatch("matrix-vector shape mismatch")
        out = []
        for i in range(self.rows):
            acc = Fraction(0)
            for k in range(self.cols):
                a = self.entries[i][k]
                if is_zero(a):
                    continue
                acc = acc + a * vec[k]
            out.append(acc)
        return tuple(out)

    def is_zero_matrix(self) -> bool:
        return all(is_zero(x) for r in self.entries for x in r)

    def stack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols:
            raise DimensionMismatch("vertical stack needs equal column counts")
        return Matrix(
            self.rows + other.rows, self.cols, self.entries + other.entries
        )


class RrefResult:
    __slots__ = ("matrix", "rank", "pivots")

    def __init__(self, matrix: Matrix, rank: int, pivots: tuple):
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "pivots", pivots)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("RrefResult is immutable")


def rref(m: Matrix) -> RrefResult:
    """Reduced row echelon form with first-nonzero pivoting.

    Returns the RREF matrix, its rank and the pivot column indices.  The
    pivot rule (first nonzero entry scanning rows top-down per column) makes
    the result canonical for a given entry layout.
    """
    rows = [list(r) for r in m.entries]
    nrows, ncols = m.rows, m.cols
    pivots = []
    pr = 0
    for pc in range(ncols):
        pivot_row = None
        for r in range(pr, nrows):
            if not is_zero(rows[r][pc]):
                pivot_row = r
                break
        if pivot_row is None:
            continue
        if pivot_row != pr:
            rows[pr], rows[pivot_row] = rows[pivot_row], rows[pr]
        pv = rows[pr][pc]
        if pv != 1:
            inv = 1 / pv
            rows[pr] = [inv * x for x in rows[pr]]
        for r in range(nrows):
            if r == pr:
                continue
            f = rows[r][pc]
            if is_zero(f):
                continue
            prow = rows[pr]
            rows[r] = [x - f * y for x, y in zip(rows[r], prow)]
        pivots.append(pc)
        pr += 1
        if pr == nrows:
            break
    return RrefResult(Matrix(nrows, ncols, rows), len(pivots), tuple(pivots))


def kernel_basis(m: Matrix) -> "Subspace":
    """Exact null space of ``m`` as a Subspace of dimension cols - rank."""
    r = rref(m)
    pivots = set(r.pivots)
    free_cols = [c for c in range(m.cols) if c not in pivots]
    basis = []
    pivot_list = list(r.pivots)
    for fc in free_cols:
        vec = [Fraction(0)] * m.cols
        vec[fc] = Fraction(1)
        for row_idx, pc in enumerate(pivot_list):
            vec[pc] = -r.matrix.entries[row_idx][fc]
        basis.append(vec)
    return Subspace.from_vectors(m.cols, basis)


def solve(m: Matrix, rhs) -> tuple | None:
    """One exact solution of m.x = rhs, or None when inconsistent.

    Free variables are set to 0 in RREF order, which makes the returned
    solution deterministic.  A length mismatch between ``rhs`` and the row
    count is a contract violation, reported as DimensionMismatch rather than
    as "no solution".
    """
    if len(rhs) != m.rows:
        raise DimensionMismatch(f"rhs length {len(rhs)} != rows {m.rows}")
    aug = Matrix(
        m.rows,
        m.cols + 1,
        [list(m.entries[i]) + [rhs[i]] for i in range(m.rows)],
    )
    r = rref(aug)
    if m.cols in r.pivots:
        return None  # pivot in the rhs column: inconsistent
    sol = [Fraction(0)] * m.cols
    for row_idx, pc in enumerate(r.pivots):
        sol[pc] = r.matrix.entries[row_idx][m.cols]
    return tuple(sol)


class Subspace:
    """A subspace of K^n stored by its canonical RREF basis.

    Two subspaces are equal iff their RREF bases are identical entry-wise;
    the deterministic pivot rule in :func:`rref` makes this a semantic
    equality test.
    """

    __slots__ = ("ambient", "basis")

    def __init__(self, ambient: int, basis: Matrix):
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "basis", basis)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Subspace is immutable")

    @classmethod
    def from_vectors(cls, ambient: int, vectors) -> "Subspace":
        vectors = [list(v) for v in vectors]
        for v in vectors:
            if len(v) != ambient:
                raise DimensionMismatch("vector length != ambient dimension")
        if not vectors:
            return cls(ambient, Matrix(0, ambient, []))
        r = rref(Matrix.from_rows(vectors))
        rows = [r.matrix.entries[i] for i in range(r.rank)]
        return cls(ambient, Matrix(len(rows), ambient, rows))

    @classmethod
    def zero(cls, ambient: int) -> "Subspace":
        return cls(ambient, Matrix(0, ambient, []))

    @classmethod
    def full(cls, ambient: int) -> "Subspace":
        return cls(ambient, Matrix.identity(ambient))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def vectors(self):
        return list(self.basis.entries)

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient == other.ambient
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of K^{self.ambient})"

    def _check_ambient(self, other: "Subspace"):
        if self.ambient != other.ambient:
            raise DimensionMismatch("subspaces live in different ambient spaces")

    def contains(self, vector) -> bool:
        if len(vector) != self.ambient:
            raise DimensionMismatch("vector length != ambient dimension")
        if self.dim == 0:
            return all(is_zero(x) for x in vector)
        return solve(self.basis.transpose(), list(vector)) is not None

    def contains_subspace(self, other: "Subspace") -> bool:
        self._check_ambient(other)
        return all(self.contains(v) for v in other.vectors())

    def sum(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        return Subspace.from_vectors(
            self.ambient, list(self.basis.entries) + list(other.basis.entries)
        )

    def intersection(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient)
        # x*U = y*V  <=>  (x, -y) in ker [U^T | V^T]
        u, v = self.basis, other.basis
        joint = Matrix(
            self.ambient,
            u.rows + v.rows,
            [
                [u.entries[r][i] for r in range(u.rows)]
                + [v.entries[r][i] for r in range(v.rows)]
                for i in range(self.ambient)
            ],
        )
        ker = kernel_basis(joint)
        vecs = []
        for kv in ker.vectors():
            coeffs = kv[: u.rows]
            vec = [Fraction(0)] * self.ambient
            for c, row in zip(coeffs, u.entries):
                if is_zero(c):
                    continue
                vec = [x + c * y for x, y in zip(vec, row)]
            vecs.append(vec)
        return Subspace.from_vectors(self.ambient, vecs)
