"""Bases of C (x) A^n (x) B^{n(n-1)/2} and cochains against them.

A basis element is a "tensor matrix": a coalgebra index c, the diagonal
a_1..a_n and the strictly upper entries b_ij.  The flat index is row-major
with c slowest, then a_1..a_n, then the b's in lexicographic pair order
(1,2), (1,3), ..., (1,n), (2,3), ..., (n-1,n).  Positions are 0-based in
code; ``TensorMatrixIndex.b_map`` shows the 1-based pairs.

A cochain of degree n with values in M (dimension d) is stored as a flat
sparse vector whose entry ``x * d + r`` is the r-th coordinate of f(e_x).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping, Optional, Sequence

from .errors import SizeLimitError
from .linalg import Matrix, vec_add, vec_iadd, vec_scale

DEFAULT_CAP = 1 << 20
ONE = Fraction(1)


@lru_cache(maxsize=None)
def pair_list(n: int) -> tuple:
    """0-based pairs (i, j), i < j < n, in lexicographic order."""
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


@lru_cache(maxsize=None)
def pair_index(n: int) -> tuple:
    """pair_index(n)[i][j] is the slot of b_ij (i < j); -1 elsewhere."""
    table = [[-1] * n for _ in range(n)]
    for k, (i, j) in enumerate(pair_list(n)):
        table[i][j] = k
    return tuple(tuple(r) for r in table)


def num_pairs(n: int) -> int:
    return n * (n - 1) // 2


def basis_size(e_or_dims, n: int, cap: Optional[int] = None) -> int:
    """dim C * dim A^n * dim B^{n(n-1)/2}; raises SizeLimitError above ``cap``."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    dc, da, db = e_or_dims if isinstance(e_or_dims, tuple) else e_or_dims.dims
    size = dc * da**n * db ** num_pairs(n)
    if cap is not None and size > cap:
        raise SizeLimitError(n, size, cap)
    return size


@dataclass(frozen=True)
class TensorMatrixIndex:
    c: int
    a: tuple
    b: tuple

    @property
    def n(self) -> int:
        return len(self.a)

    def b_at(self, i: int, j: int) -> int:
        """Entry b_ij for 0-based positions i < j."""
        return self.b[pair_index(self.n)[i][j]]

    def b_map(self) -> dict:
        return {(i + 1, j + 1): self.b[k] for k, (i, j) in enumerate(pair_list(self.n))}


class TensorBasis:
    """Index arithmetic for one degree."""

    def __init__(self, dims: tuple, n: int, cap: Optional[int] = None):
        self.dims = tuple(dims)
        self.n = n
        self.dim_c, self.dim_a, self.dim_b = self.dims
        self.npairs = num_pairs(n)
        self.size = basis_size(self.dims, n, cap)
        self.radices = (self.dim_c,) + (self.dim_a,) * n + (self.dim_b,) * self.npairs

    def flatten(self, idx) -> int:
        if isinstance(idx, TensorMatrixIndex):
            c, a, b = idx.c, idx.a, idx.b
        else:
            c, a, b = idx
        if isinstance(b, dict):
            b = tuple(b[(i + 1, j + 1)] for i, j in pair_list(self.n))
        if len(a) != self.n or len(b) != self.npairs:
            raise IndexError("multi-index has the wrong number of entries")
        k = 0
        for digit, radix in zip(itertools.chain((c,), a, b), self.radices):
            if not 0 <= digit < radix:
                raise IndexError(f"index entry {digit} outside range {radix}")
            k = k * radix + digit
        return k

    def unflatten(self, k: int) -> TensorMatrixIndex:
        if not 0 <= k < self.size:
            raise IndexError(f"flat index {k} outside {self.size}")
        digits = []
        for radix in reversed(self.radices):
            k, d = divmod(k, radix)
            digits.append(d)
        digits.reverse()
        n = self.n
        return TensorMatrixIndex(digits[0], tuple(digits[1 : 1 + n]), tuple(digits[1 + n :]))

    def __iter__(self) -> Iterator[tuple]:
        """Yield (flat index, c, a tuple, b tuple) in flat order."""
        n = self.n
        for k, digits in enumerate(itertools.product(*(range(r) for r in self.radices))):
            yield k, digits[0], digits[1 : 1 + n], digits[1 + n :]

    def element(self, c_vec: Mapping, a_vecs: Sequence[Mapping], b_vecs: Sequence[Mapping]) -> dict:
        """Flat coordinates of c (x) a_1 (x) ... (x) b_.. for sparse factor vectors."""
        return tensor_element(self.radices, [c_vec, *a_vecs, *b_vecs])


def tensor_element(radices: Sequence[int], factors: Sequence[Mapping]) -> dict:
    cur = {0: ONE}
    for radix, vec in zip(radices, factors):
        if len(vec) == 1:
            (j, v), = vec.items()
            if v == 1:
                cur = {k * radix + j: w for k, w in cur.items()}
            else:
                cur = {k * radix + j: w * v for k, w in cur.items()}
            continue
        nxt: dict = {}
        for k, w in cur.items():
            base = k * radix
            for j, v in vec.items():
                nxt[base + j] = nxt.get(base + j, 0) + w * v
        cur = {k: x for k, x in nxt.items() if x}
        if not cur:
            return {}
    return cur


def flat_index(radices: Sequence[int], digits: Sequence[int]) -> int:
    k = 0
    for d, r in zip(digits, radices):
        k = k * r + d
    return k


# ---------------------------------------------------------------------------
# slices and products of b-entries


def region(n: int, b: Sequence[int], rows: range, cols: range) -> list:
    """Sub-array M((k,l);(k',l')) of the upper b-entries (0-based, inclusive ranges).

    Only strictly-upper positions are allowed since those carry B entries.
    """
    pidx = pair_index(n)
    out = []
    for i in rows:
        line = []
        for j in cols:
            if not (0 <= i < j < n):
                raise ValueError(f"position ({i},{j}) is not a b-entry of an {n}x{n} tensor matrix")
            line.append(b[pidx[i][j]])
        out.append(line)
    return out


def product_all(B, block: Sequence[Sequence[int]]) -> dict:
    """Pi: product of every entry of a block of B basis indices."""
    return B.product_of_basis(tuple(x for row in block for x in row))


def row_products(B, block: Sequence[Sequence[int]]) -> list:
    """Pi^r: one product per row."""
    return [B.product_of_basis(tuple(row)) for row in block]


def column_products(B, block: Sequence[Sequence[int]]) -> list:
    """Pi^c: one product per column."""
    if not block:
        return []
    return [B.product_of_basis(tuple(row[j] for row in block)) for j in range(len(block[0]))]


# ---------------------------------------------------------------------------
# iterated psi


def psi_iterate_basis(e, c: int, a: tuple) -> dict:
    """c (x) a_1 ... a_k  ->  {((a'_1..a'_k), c'): w}; psi applied left to right."""
    cache = _psi_cache(e)
    key = (c, a)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if not a:
        hit = {((), c): ONE}
    else:
        prev = psi_iterate_basis(e, c, a[:-1])
        table = e.psi.table
        acc: dict = {}
        last = a[-1]
        for (prefix, c1), w in prev.items():
            for a2, c2, x in table[c1][last]:
                k2 = (prefix + (a2,), c2)
                y = acc.get(k2, 0) + w * x
                if y:
                    acc[k2] = y
                else:
                    acc.pop(k2, None)
        hit = acc
    cache[key] = hit
    return hit


def _psi_cache(e) -> dict:
    cache = e.__dict__.get("_psi_iter_cache")
    if cache is None:
        cache = {}
        e.__dict__["_psi_iter_cache"] = cache
    return cache


def psi_iterate(e, k: int) -> Matrix:
    """Matrix of C (x) A^k -> A^k (x) C.

    Input index c * dA^k + (a-digits); output index (a-digits) * dC + c'.
    """
    dc, da = e.C.dim, e.A.dim
    rows: dict = {}
    for c in range(dc):
        for a in itertools.product(range(da), repeat=k):
            col = flat_index((dc,) + (da,) * k, (c,) + a)
            for (a2, c2), w in psi_iterate_basis(e, c, a).items():
                row = flat_index((da,) * k + (dc,), a2 + (c2,))
                rows.setdefault(row, {})[col] = w
    n = dc * da**k
    return Matrix(n, n, rows)


# ---------------------------------------------------------------------------
# cochains


class Cochain:
    """Element of Hom(C (x) A^n (x) B^.., M) stored as a flat sparse vector."""

    __slots__ = ("degree", "target_dim", "size", "vec", "_cols")

    def __init__(self, degree: int, target_dim: int, size: int, vec: Optional[Mapping] = None):
        self.degree = degree
        self.target_dim = target_dim
        self.size = size
        total = size * target_dim
        clean = {}
        for k, x in (vec or {}).items():
            if x:
                if not 0 <= k < total:
                    raise IndexError(f"cochain coordinate {k} outside {total}")
                clean[k] = x if isinstance(x, Fraction) else Fraction(x)
        self.vec = clean
        self._cols = None

    @property
    def dim(self) -> int:
        return self.size * self.target_dim

    def _columns(self) -> dict:
        if self._cols is None:
            d = self.target_dim
            cols: dict = {}
            for k, x in self.vec.items():
                y, r = divmod(k, d)
                cols.setdefault(y, {})[r] = x
            self._cols = cols
        return self._cols

    def value(self, y: int) -> dict:
        """f(e_y) as a sparse vector of M."""
        return self._columns().get(y, {})

    def support(self) -> dict:
        return self._columns()

    @property
    def coeffs(self) -> Matrix:
        """(dim M) x basis_size matrix whose column y is f(e_y)."""
        rows: dict = {}
        for y, col in self._columns().items():
            for r, x in col.items():
                rows.setdefault(r, {})[y] = x
        return Matrix(self.target_dim, self.size, rows)

    @classmethod
    def from_values(cls, degree: int, target_dim: int, size: int, values: Mapping[int, Mapping]) -> "Cochain":
        vec = {}
        for y, col in values.items():
            for r, x in col.items():
                if x:
                    vec[y * target_dim + r] = x
        return cls(degree, target_dim, size, vec)

    def like(self, vec: Mapping) -> "Cochain":
        return Cochain(self.degree, self.target_dim, self.size, vec)

    def _check(self, other: "Cochain") -> None:
        if (self.degree, self.target_dim, self.size) != (other.degree, other.target_dim, other.size):
            raise ValueError("cochains live in different spaces")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return self.like(vec_add(self.vec, other.vec))

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return self.like(vec_add(self.vec, other.vec, -1))

    def __neg__(self) -> "Cochain":
        return self.like(vec_scale(self.vec, -1))

    def scale(self, s) -> "Cochain":
        return self.like(vec_scale(self.vec, s))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return (self.degree, self.target_dim, self.size, self.vec) == (other.degree, other.target_dim, other.size, other.vec)

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.vec

    def __repr__(self) -> str:
        return f"Cochain(degree={self.degree}, target_dim={self.target_dim}, nnz={len(self.vec)})"


def sum_cochains(terms: Sequence[tuple]) -> dict:
    """Sum of (coefficient, cochain) pairs as a flat vector."""
    acc: dict = {}
    for s, f in terms:
        vec_iadd(acc, f.vec, s)
    return acc
