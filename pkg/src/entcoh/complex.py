"""The secondary Hochschild complex of an entwining structure over B.

The differential is assembled by evaluating its defining formula on every
basis tensor matrix of the target degree.  The three groups of terms are
available separately:

* ``face_first``  zeta(prod_j b_1j) a_1psi . f(c^psi (x) lower-right block)
* ``face_inner``  f with positions i, i+1 merged (b's multiplied, zeta(b_{i,i+1}) a_i a_{i+1})
* ``face_last``   zeta(prod_k b_{k,n+1}) f(upper-left block) . a_{n+1}

so that delta^n = face_first + sum_i (-1)^i face_inner(i) + (-1)^{n+1} face_last.
In degree 0 cochains are maps C -> M and only the first and last groups occur.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .algebra import BEntwining, Bimodule, hom_cm_bimodule, with_trivial_coalgebra
from .errors import InvariantError
from .linalg import Matrix, RowEchelon, kernel, rank, solve
from .tensor_basis import DEFAULT_CAP, Cochain, TensorBasis, flat_index, pair_index, pair_list, tensor_element

ONE = Fraction(1)


@lru_cache(maxsize=None)
def _first_plan(n: int) -> tuple:
    """For output degree n+1: zeta slots (0, j) and kept slots (q1+1, q2+1)."""
    N = n + 1
    pidx = pair_index(N)
    zeta_slots = tuple(pidx[0][j] for j in range(1, N))
    kept = tuple(pidx[q1 + 1][q2 + 1] for q1, q2 in pair_list(n))
    return zeta_slots, kept


@lru_cache(maxsize=None)
def _last_plan(n: int) -> tuple:
    N = n + 1
    pidx = pair_index(N)
    zeta_slots = tuple(pidx[k][N - 1] for k in range(N - 1))
    kept = tuple(pidx[q1][q2] for q1, q2 in pair_list(n))
    return zeta_slots, kept


@lru_cache(maxsize=None)
def _inner_plan(n: int, p: int) -> tuple:
    """Merge positions p, p+1 of an (n+1)-matrix; returns (zeta slot, b specs).

    Each b spec lists the old slots whose product gives the new entry.
    """
    N = n + 1
    pidx = pair_index(N)

    def old(q):
        return q if q < p else q + 1

    specs = []
    for q1, q2 in pair_list(n):
        if q2 == p:
            specs.append((pidx[q1][p], pidx[q1][p + 1]))
        elif q1 == p:
            o2 = old(q2)
            specs.append((pidx[p][o2], pidx[p + 1][o2]))
        else:
            specs.append((pidx[old(q1)][old(q2)],))
    return pidx[p][p + 1], tuple(specs)


def _vec_key(v: dict) -> tuple:
    return tuple(sorted(v.items()))


class SecondaryComplex:
    """Cochains Hom(C (x) A^n (x) B^{n(n-1)/2}, M) with the secondary differential."""

    def __init__(self, e: BEntwining, m: Optional[Bimodule] = None, cap: int = DEFAULT_CAP):
        self.e = e
        self.m = m if m is not None else Bimodule.regular(e.A)
        if self.m.dim_a != e.A.dim:
            raise ValueError("coefficient bimodule is over a different algebra")
        self.cap = cap
        self._bases: dict = {}
        self._diffs: dict = {}
        self._faces: dict = {}
        self._left_ops: dict = {}
        self._last_ops: dict = {}

    # spaces
    @property
    def dims(self) -> tuple:
        return self.e.dims

    def basis(self, n: int) -> TensorBasis:
        b = self._bases.get(n)
        if b is None:
            b = TensorBasis(self.e.dims, n, self.cap)
            self._bases[n] = b
        return b

    def size(self, n: int) -> int:
        return self.basis(n).size

    def cochain_dim(self, n: int) -> int:
        return self.basis(n).size * self.m.dim

    def cochain(self, n: int, vec=None) -> Cochain:
        return Cochain(n, self.m.dim, self.size(n), vec or {})

    def zero(self, n: int) -> Cochain:
        return self.cochain(n)

    def from_function(self, n: int, fn) -> Cochain:
        """Cochain from fn(c, a tuple, b tuple) -> sparse M vector."""
        values = {}
        for y, c, a, b in self.basis(n):
            v = fn(c, a, b)
            if v:
                values[y] = v
        return Cochain.from_values(n, self.m.dim, self.size(n), values)

    # operators on M
    def _left_op(self, u: dict) -> dict:
        key = _vec_key(u)
        op = self._left_ops.get(key)
        if op is None:
            op = self.m.left_operator(u)
            self._left_ops[key] = op
        return op

    def _last_op(self, z: dict, a: int) -> dict:
        key = (_vec_key(z), a)
        op = self._last_ops.get(key)
        if op is None:
            m = self.m
            op = {}
            for r in range(m.dim):
                img = m.act_left(z, m.act_right({r: ONE}, {a: ONE}))
                if img:
                    op[r] = img
            self._last_ops[key] = op
        return op

    # assembly
    def _assemble(self, n: int, contributions) -> Matrix:
        """contributions(c, a, b) yields (weight, input vector, operator or None)."""
        dM = self.m.dim
        out_basis = self.basis(n + 1)
        in_size = self.size(n)
        rows: dict = {}
        for x, c, a, b in out_basis:
            acc: dict = {}
            for w, yvec, op in contributions(c, a, b):
                for y, wy in yvec.items():
                    ww = w * wy
                    base = y * dM
                    if op is None:
                        for r in range(dM):
                            row = acc.setdefault(r, {})
                            k = base + r
                            val = row.get(k, 0) + ww
                            if val:
                                row[k] = val
                            else:
                                del row[k]
                    else:
                        for r, img in op.items():
                            k = base + r
                            for s, t in img.items():
                                row = acc.setdefault(s, {})
                                val = row.get(k, 0) + ww * t
                                if val:
                                    row[k] = val
                                else:
                                    del row[k]
            xb = x * dM
            for s, row in acc.items():
                if row:
                    rows[xb + s] = row
        return Matrix(out_basis.size * dM, in_size * dM, rows)

    def face_first(self, n: int) -> Matrix:
        key = ("first", n)
        if key in self._faces:
            return self._faces[key]
        e = self.e
        A = e.A
        zeta_slots, kept = _first_plan(n)
        radices = self.basis(n).radices
        psi = e.psi.table

        def contributions(c, a, b):
            z = e.zeta_of_product(tuple(b[s] for s in zeta_slots))
            if not z:
                return
            rest = a[1:] + tuple(b[s] for s in kept)
            for a2, c2, w in psi[c][a[0]]:
                u = A.mul(z, {a2: ONE})
                if u:
                    y = flat_index(radices, (c2,) + rest)
                    yield w, {y: ONE}, self._left_op(u)

        mat = self._assemble(n, contributions)
        self._faces[key] = mat
        return mat

    def face_inner(self, n: int, i: int) -> Matrix:
        """Inner face i (1 <= i <= n): positions i, i+1 (1-based) merged."""
        if not 1 <= i <= n:
            raise ValueError(f"inner face index {i} outside 1..{n}")
        key = ("inner", n, i)
        if key in self._faces:
            return self._faces[key]
        e = self.e
        A, B = e.A, e.B
        p = i - 1
        zslot, specs = _inner_plan(n, p)
        radices = self.basis(n).radices

        def contributions(c, a, b):
            merged = A.mul(e.zeta_table[b[zslot]], A.mul_basis(a[p], a[p + 1]))
            if not merged:
                return
            bvecs = []
            for spec in specs:
                v = B.product_of_basis(tuple(b[s] for s in spec))
                if not v:
                    return
                bvecs.append(v)
            factors = [{c: ONE}] + [{x: ONE} for x in a[:p]] + [merged] + [{x: ONE} for x in a[p + 2 :]] + bvecs
            yield ONE, tensor_element(radices, factors), None

        mat = self._assemble(n, contributions)
        self._faces[key] = mat
        return mat

    def face_last(self, n: int) -> Matrix:
        key = ("last", n)
        if key in self._faces:
            return self._faces[key]
        e = self.e
        zeta_slots, kept = _last_plan(n)
        radices = self.basis(n).radices

        def contributions(c, a, b):
            z = e.zeta_of_product(tuple(b[s] for s in zeta_slots))
            if not z:
                return
            op = self._last_op(z, a[-1])
            if not op:
                return
            y = flat_index(radices, (c,) + a[:-1] + tuple(b[s] for s in kept))
            yield ONE, {y: ONE}, op

        mat = self._assemble(n, contributions)
        self._faces[key] = mat
        return mat

    def differential(self, n: int) -> Matrix:
        d = self._diffs.get(n)
        if d is None:
            d = self.face_first(n)
            for i in range(1, n + 1):
                face = self.face_inner(n, i)
                d = d - face if i % 2 else d + face
            last = self.face_last(n)
            d = d + last if (n + 1) % 2 == 0 else d - last
            self._diffs[n] = d
            # faces are only needed to build the differential
            for k in [k for k in self._faces if k[1] == n]:
                del self._faces[k]
        return d

    def apply(self, f: Cochain) -> Cochain:
        d = self.differential(f.degree)
        return self.cochain(f.degree + 1, d.apply(f.vec))

    def is_coboundary(self, f: Cochain) -> Optional[dict]:
        """A preimage under delta, or None; degree 0 only admits zero."""
        if f.degree == 0:
            return {} if f.is_zero() else None
        return solve(self.differential(f.degree - 1), f.vec)


# ---------------------------------------------------------------------------
# cohomology


@dataclass
class DegreeCohomology:
    degree: int
    dim: int
    rank: int
    kernel_dim: int
    betti: int
    representatives: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "dim": self.dim,
            "rank": self.rank,
            "kernel_dim": self.kernel_dim,
            "betti": self.betti,
        }


@dataclass
class CohomologyReport:
    label: str
    degrees: list = field(default_factory=list)

    @property
    def betti(self) -> tuple:
        return tuple(d.betti for d in self.degrees)

    def degree(self, n: int) -> DegreeCohomology:
        return self.degrees[n]

    def to_dict(self) -> dict:
        return {"label": self.label, "degrees": [d.to_dict() for d in self.degrees], "betti": list(self.betti)}


def representatives(cocycles, boundary_vectors, ambient_dim: int) -> list:
    """Cocycles extending a basis of the boundaries, in input order."""
    ech = RowEchelon(ambient_dim)
    for v in boundary_vectors:
        ech.add(v)
    reps = []
    for v in cocycles:
        if ech.add(v):
            reps.append(v)
    return reps


def cohomology(cx: SecondaryComplex, max_degree: int, with_representatives: bool = False) -> CohomologyReport:
    report = CohomologyReport(label=cx.e.name)
    prev_rank = 0
    prev_diff = None
    for n in range(max_degree + 1):
        dim = cx.cochain_dim(n)
        d = cx.differential(n)
        if with_representatives:
            ker = kernel(d)
            r = dim - ker.dim
        else:
            ker = None
            r = rank(d)
        kdim = dim - r
        betti = kdim - prev_rank
        if betti < 0:
            raise InvariantError(f"negative betti number in degree {n}")
        entry = DegreeCohomology(n, dim, r, kdim, betti)
        if with_representatives:
            bvecs = prev_diff.columns() if prev_diff is not None else []
            reps = representatives(ker.basis, bvecs, dim)
            if len(reps) != betti:
                raise InvariantError(f"image of delta^{n - 1} is not inside ker delta^{n}")
            entry.representatives = [cx.cochain(n, v) for v in reps]
        report.degrees.append(entry)
        prev_rank = r
        prev_diff = d
    return report


def check_square_zero(cx: SecondaryComplex, n: int) -> Optional[tuple]:
    """None when delta^{n+1} delta^n = 0, else the first nonzero entry."""
    prod = cx.differential(n + 1) @ cx.differential(n)
    return prod.first_nonzero()


# ---------------------------------------------------------------------------
# theta and the inclusion of the C-trivial complex


def staic_complex(cx: SecondaryComplex) -> SecondaryComplex:
    """The C-trivial complex of (A, B, zeta) with coefficients in Hom(C, M)."""
    return SecondaryComplex(with_trivial_coalgebra(cx.e), hom_cm_bimodule(cx.e, cx.m), cap=cx.cap)


def theta(cx: SecondaryComplex, f: Cochain) -> Cochain:
    """Move the C factor from the source into the coefficients."""
    dC, dM = cx.e.C.dim, cx.m.dim
    rest = f.size // dC
    vec = {}
    for k, x in f.vec.items():
        y, r = divmod(k, dM)
        c, z = divmod(y, rest)
        vec[z * dC * dM + c * dM + r] = x
    return Cochain(f.degree, dC * dM, rest, vec)


def theta_inverse(cx: SecondaryComplex, g: Cochain) -> Cochain:
    dC, dM = cx.e.C.dim, cx.m.dim
    rest = g.size
    vec = {}
    for k, x in g.vec.items():
        z, cr = divmod(k, dC * dM)
        c, r = divmod(cr, dM)
        vec[(c * rest + z) * dM + r] = x
    return Cochain(g.degree, dM, rest * dC, vec)


def trivial_c_complex(cx: SecondaryComplex) -> SecondaryComplex:
    """(A, B, zeta) with C = Q and the same coefficients M."""
    return SecondaryComplex(with_trivial_coalgebra(cx.e), cx.m, cap=cx.cap)


def staic_inclusion(cx: SecondaryComplex, f: Cochain) -> Cochain:
    """j(f) = f o (eps (x) id)."""
    dC = cx.e.C.dim
    rest = f.size
    counit = cx.e.C.counit
    dM = cx.m.dim
    vec = {}
    for k, x in f.vec.items():
        z, r = divmod(k, dM)
        for c in range(dC):
            if counit[c]:
                vec[(c * rest + z) * dM + r] = counit[c] * x
    return Cochain(f.degree, dM, rest * dC, vec)


def inclusion_matrix(cx: SecondaryComplex, n: int) -> Matrix:
    small = trivial_c_complex(cx)
    dim = small.cochain_dim(n)
    cols = [staic_inclusion(cx, small.cochain(n, {k: ONE})).vec for k in range(dim)]
    return Matrix.from_columns(cx.cochain_dim(n), cols)
