"""Exact sparse linear algebra over the rationals.

Vectors are ``dict[int, Fraction]`` with absent keys meaning zero.  Matrices
keep a row-major sparse table.  Every rank, kernel and solve goes through one
elimination routine that works on integer rows: each incoming row is cleared
of denominators, eliminated against the pivot rows with integer
cross-multiplication and divided by the gcd of its entries afterwards.  No
division ever happens during elimination, so the procedure is fraction-free;
rationals only reappear when kernel or solution vectors are read off.

Pivots are the smallest column index left in a reduced row, and rows are fed
in order of increasing support size.  Both choices are deterministic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Iterator, Mapping, Optional, Sequence

Vector = dict  # dict[int, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def clean(vec: Mapping[int, object]) -> Vector:
    return {k: as_fraction(v) for k, v in vec.items() if v != 0}


def vec_add(u: Mapping, v: Mapping, scale=1) -> Vector:
    out = dict(u)
    for k, x in v.items():
        y = out.get(k, 0) + scale * x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return out


def vec_scale(v: Mapping, s) -> Vector:
    if not s:
        return {}
    return {k: s * x for k, x in v.items()}


def vec_iadd(acc: dict, v: Mapping, scale=1) -> None:
    """acc += scale * v, in place."""
    for k, x in v.items():
        y = acc.get(k, 0) + scale * x
        if y:
            acc[k] = y
        else:
            acc.pop(k, None)


def dense(vec: Mapping, n: int) -> list:
    return [vec.get(i, ZERO) for i in range(n)]


# ---------------------------------------------------------------------------
# Matrix


class Matrix:
    """Sparse rational matrix; immutable by convention."""

    __slots__ = ("nrows", "ncols", "_rows", "_cols")

    def __init__(self, nrows: int, ncols: int, rows: Optional[Mapping[int, Mapping[int, object]]] = None):
        self.nrows = nrows
        self.ncols = ncols
        table: dict = {}
        if rows:
            for r, row in rows.items():
                if not 0 <= r < nrows:
                    raise IndexError(f"row {r} outside {nrows}")
                kept = {}
                for c, x in row.items():
                    if x:
                        if not 0 <= c < ncols:
                            raise IndexError(f"column {c} outside {ncols}")
                        kept[c] = x if isinstance(x, Fraction) else Fraction(x)
                if kept:
                    table[r] = kept
        self._rows = table
        self._cols = None

    # constructors
    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "Matrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, {i: {i: ONE} for i in range(n)})

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[object]], ncols: Optional[int] = None) -> "Matrix":
        nrows = len(data)
        if ncols is None:
            ncols = len(data[0]) if nrows else 0
        rows = {}
        for r, row in enumerate(data):
            if len(row) != ncols:
                raise ValueError("ragged dense matrix")
            rows[r] = {c: as_fraction(x) for c, x in enumerate(row) if as_fraction(x)}
        return cls(nrows, ncols, rows)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Mapping[int, object]]) -> "Matrix":
        rows: dict = {}
        for c, col in enumerate(columns):
            for r, x in col.items():
                if x:
                    rows.setdefault(r, {})[c] = x
        return cls(nrows, len(columns), rows)

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Mapping[tuple, object]) -> "Matrix":
        rows: dict = {}
        for (r, c), x in entries.items():
            if x:
                rows.setdefault(r, {})[c] = x
        return cls(nrows, ncols, rows)

    # access
    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    @property
    def entries(self) -> dict:
        return {(r, c): x for r, row in self._rows.items() for c, x in row.items()}

    def nnz(self) -> int:
        return sum(len(row) for row in self._rows.values())

    def get(self, r: int, c: int) -> Fraction:
        return self._rows.get(r, {}).get(c, ZERO)

    def row(self, r: int) -> dict:
        return self._rows.get(r, {})

    def rows(self) -> Iterator[tuple]:
        for r in sorted(self._rows):
            yield r, self._rows[r]

    def _column_table(self) -> dict:
        if self._cols is None:
            cols: dict = {}
            for r, row in self._rows.items():
                for c, x in row.items():
                    cols.setdefault(c, {})[r] = x
            self._cols = cols
        return self._cols

    def column(self, c: int) -> dict:
        return self._column_table().get(c, {})

    def columns(self) -> list:
        table = self._column_table()
        return [table.get(c, {}) for c in range(self.ncols)]

    def to_dense(self) -> list:
        return [[self.get(r, c) for c in range(self.ncols)] for r in range(self.nrows)]

    # algebra
    def apply(self, vec: Mapping[int, object]) -> Vector:
        """Matrix times a sparse column vector."""
        out: dict = {}
        cols = self._column_table()
        for c, x in vec.items():
            if not x:
                continue
            col = cols.get(c)
            if col:
                vec_iadd(out, col, x)
        return out

    def transpose(self) -> "Matrix":
        return Matrix(self.ncols, self.nrows, self._column_table())

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        rows = {}
        orows = other._rows
        for r, row in self._rows.items():
            acc: dict = {}
            for k, x in row.items():
                orow = orows.get(k)
                if orow:
                    vec_iadd(acc, orow, x)
            if acc:
                rows[r] = acc
        return Matrix(self.nrows, other.ncols, rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        return self._combine(other, 1)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self._combine(other, -1)

    def _combine(self, other: "Matrix", s: int) -> "Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        rows = {r: dict(row) for r, row in self._rows.items()}
        for r, row in other._rows.items():
            acc = rows.setdefault(r, {})
            vec_iadd(acc, row, s)
        return Matrix(self.nrows, self.ncols, rows)

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def scale(self, s) -> "Matrix":
        s = as_fraction(s)
        if not s:
            return Matrix(self.nrows, self.ncols)
        return Matrix(self.nrows, self.ncols, {r: {c: s * x for c, x in row.items()} for r, row in self._rows.items()})

    def is_zero(self) -> bool:
        return not self._rows

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.nrows, self.ncols, self.nnz()))

    def __repr__(self) -> str:
        return f"Matrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"

    def first_nonzero(self) -> Optional[tuple]:
        """Smallest (row, col) with a nonzero entry; handy as a failure witness."""
        if not self._rows:
            return None
        r = min(self._rows)
        c = min(self._rows[r])
        return (r, c, self._rows[r][c])


def block_matrix(row_dims: Sequence[int], col_dims: Sequence[int], blocks: Mapping[tuple, Matrix]) -> Matrix:
    """Assemble a matrix from blocks keyed by (block_row, block_col)."""
    roff = [0]
    for d in row_dims:
        roff.append(roff[-1] + d)
    coff = [0]
    for d in col_dims:
        coff.append(coff[-1] + d)
    rows: dict = {}
    for (bi, bj), m in blocks.items():
        if m.shape != (row_dims[bi], col_dims[bj]):
            raise ValueError(f"block {(bi, bj)} has shape {m.shape}, expected {(row_dims[bi], col_dims[bj])}")
        for r, row in m._rows.items():
            acc = rows.setdefault(roff[bi] + r, {})
            for c, x in row.items():
                cc = coff[bj] + c
                y = acc.get(cc, 0) + x
                if y:
                    acc[cc] = y
                else:
                    acc.pop(cc, None)
    return Matrix(roff[-1], coff[-1], rows)


# ---------------------------------------------------------------------------
# integer elimination core


def _integer_row(vec: Mapping[int, object]) -> dict:
    """Scale a rational row to a primitive integer row (positive sign irrelevant)."""
    items = [(k, as_fraction(x)) for k, x in vec.items() if x]
    if not items:
        return {}
    den = 1
    for _, x in items:
        den = lcm(den, x.denominator)
    row = {k: int(x * den) for k, x in items}
    return _primitive(row)


def _primitive(row: dict) -> dict:
    g = 0
    for x in row.values():
        g = gcd(g, x)
        if g == 1:
            return row
    if g > 1:
        return {k: x // g for k, x in row.items()}
    return row


class RowEchelon:
    """Incrementally built echelon basis of a row space.

    Pivot rows are primitive integer rows.  Row ``k`` never contains the pivot
    column of any earlier row, so reduction in creation order terminates in a
    single sweep.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivot_rows: dict = {}  # pivot column -> integer row
        self.order: dict = {}  # pivot column -> creation index

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def _reduce_int(self, row: dict) -> dict:
        if not row or not self.pivot_rows:
            return row
        order = self.order
        heap = [(order[c], c) for c in row if c in order]
        if not heap:
            return row
        heapq.heapify(heap)
        pivots = self.pivot_rows
        while heap:
            _, p = heapq.heappop(heap)
            x = row.get(p)
            if not x:
                continue
            prow = pivots[p]
            pv = prow[p]
            g = gcd(pv, x)
            a, b = pv // g, x // g
            if a != 1:
                row = {k: a * y for k, y in row.items()}
            for k, y in prow.items():
                z = row.get(k, 0) - b * y
                if z:
                    if k not in row and k in order:
                        heapq.heappush(heap, (order[k], k))
                    row[k] = z
                else:
                    row.pop(k, None)
            row = _primitive(row) if row else row
        return row

    def reduce(self, vec: Mapping[int, object]) -> dict:
        """Residual of ``vec`` modulo the current span (scaled integer row)."""
        return self._reduce_int(_integer_row(vec))

    def contains(self, vec: Mapping[int, object]) -> bool:
        return not self.reduce(vec)

    def add(self, vec: Mapping[int, object]) -> bool:
        """Insert a vector; True when it enlarged the span."""
        return self._insert(_integer_row(vec))

    def _insert(self, row: dict) -> bool:
        row = self._reduce_int(row)
        if not row:
            return False
        p = min(row)
        if row[p] < 0:
            row = {k: -y for k, y in row.items()}
        self.order[p] = len(self.order)
        self.pivot_rows[p] = row
        return True

    def fully_reduce(self) -> None:
        """Bring every pivot row to reduced form (no foreign pivot columns)."""
        cols = sorted(self.order, key=self.order.get, reverse=True)
        done: set = set()
        for p in cols:
            row = self.pivot_rows[p]
            for q in [k for k in row if k in done]:
                x = row.get(q)
                if not x:
                    continue
                qrow = self.pivot_rows[q]
                qv = qrow[q]
                g = gcd(qv, x)
                a, b = qv // g, x // g
                if a != 1:
                    row = {k: a * y for k, y in row.items()}
                for k, y in qrow.items():
                    z = row.get(k, 0) - b * y
                    if z:
                        row[k] = z
                    else:
                        row.pop(k, None)
            row = _primitive(row)
            if row[p] < 0:
                row = {k: -y for k, y in row.items()}
            self.pivot_rows[p] = row
            done.add(p)


def _echelon_of_rows(rows: Iterable[Mapping[int, object]], ncols: int) -> RowEchelon:
    ech = RowEchelon(ncols)
    ints = [_integer_row(r) for r in rows]
    ints = [r for r in ints if r]
    ints.sort(key=len)
    for r in ints:
        ech._insert(r)
    return ech


# ---------------------------------------------------------------------------
# Subspace


@dataclass(frozen=True)
class Subspace:
    ambient_dim: int
    basis: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.basis) > self.ambient_dim:
            raise ValueError("more basis vectors than the ambient dimension")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def as_matrix(self) -> Matrix:
        """Basis vectors as the columns of an ambient_dim x dim matrix."""
        return Matrix.from_columns(self.ambient_dim, list(self.basis))

    def echelon(self) -> RowEchelon:
        return _echelon_of_rows(self.basis, self.ambient_dim)

    def contains(self, vec: Mapping[int, object]) -> bool:
        return self.echelon().contains(vec)

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Mapping[int, object]]) -> "Subspace":
        """Subspace spanned by ``vectors``; keeps the independent ones in order."""
        ech = RowEchelon(ambient_dim)
        kept = []
        for v in vectors:
            if ech.add(v):
                kept.append(clean(v))
        return cls(ambient_dim, tuple(kept))


# ---------------------------------------------------------------------------
# public operations


def rank(m: Matrix) -> int:
    return _echelon_of_rows((row for _, row in m.rows()), m.ncols).rank


def rank_of_vectors(vectors: Iterable[Mapping[int, object]], ambient_dim: int) -> int:
    return _echelon_of_rows(vectors, ambient_dim).rank


def kernel(m: Matrix) -> Subspace:
    ech = _echelon_of_rows((row for _, row in m.rows()), m.ncols)
    ech.fully_reduce()
    pivots = ech.pivot_rows
    # free column f gets x_f = 1 and x_p = -row_p[f] / row_p[p]
    by_free: dict = {}
    for p, row in pivots.items():
        pv = row[p]
        for k, y in row.items():
            if k != p:
                by_free.setdefault(k, {})[p] = Fraction(-y, pv)
    basis = []
    for f in range(m.ncols):
        if f in pivots:
            continue
        vec = {f: ONE}
        vec.update(by_free.get(f, {}))
        basis.append(vec)
    return Subspace(m.ncols, tuple(basis))


def solve(m: Matrix, b: Mapping[int, object]) -> Optional[Vector]:
    """Some x with m x = b, or None when the system is inconsistent."""
    for k in b:
        if not 0 <= k < m.nrows:
            raise IndexError(f"right-hand side index {k} outside {m.nrows}")
    aug = m.ncols
    rows = []
    for r in range(m.nrows):
        row = dict(m.row(r))
        x = b.get(r, 0)
        if x:
            row[aug] = as_fraction(x)
        if row:
            rows.append(row)
    ech = _echelon_of_rows(rows, aug + 1)
    if aug in ech.pivot_rows:
        return None
    ech.fully_reduce()
    sol = {}
    for p, row in ech.pivot_rows.items():
        y = row.get(aug)
        if y:
            sol[p] = Fraction(y, row[p])
    return sol


def image(m: Matrix) -> Subspace:
    """Column space, with basis drawn from the columns themselves."""
    return Subspace.span(m.nrows, m.columns())


def quotient_dim(num: Subspace, den: Subspace) -> int:
    if num.ambient_dim != den.ambient_dim:
        raise ValueError("subspaces live in different ambient spaces")
    ech = num.echelon()
    if ech.rank != num.dim:
        raise ValueError("numerator basis is not linearly independent")
    for v in den.basis:
        if not ech.contains(v):
            raise ValueError("denominator is not contained in numerator")
    den_rank = rank_of_vectors(den.basis, den.ambient_dim)
    return num.dim - den_rank


def restrict(m: Matrix, sub: Subspace) -> Matrix:
    """m applied to each basis vector of ``sub``; columns follow the basis order."""
    return Matrix.from_columns(m.nrows, [m.apply(v) for v in sub.basis])
