"""Deformations of an entwining structure over B: the bicomplex, H^2 and lifting.

Cells of the double complex:

    (m, 0)  Hom(A^m B^.., A)               the C-trivial complex with M = A
    (m, n)  Hom(C A^m B^.., A (x) C^n)     m, n >= 1, coefficients twisted by psi
    (0, n)  Hom(C, C^n)

Coefficient layouts: A (x) C^n has index a * dC^n + (c_1..c_n digits); the
(0, n) cell has index c * dC^n + (digits).  Tot^p lists its components in the
order (p, 0), (p-1, 1), ..., (0, p); there is no (0, 0) cell.

A jet of order N holds mu^(i) in cell (2, 0), psi^(i) in cell (1, 1) and
Delta^(i) in cell (0, 2) for 1 <= i <= N.  Index 0 always stands for the
undeformed maps mu_b = zeta(b) x y, psi and Delta.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import Bimodule, validate_bimodule, with_trivial_coalgebra
from .complex import SecondaryComplex, inclusion_matrix
from .equivariant import rho_left_basis, rho_right_basis
from .errors import InvariantError, ValidationError
from .linalg import Matrix, block_matrix, kernel, rank, rank_of_vectors, solve, vec_iadd
from .tensor_basis import DEFAULT_CAP, flat_index

ONE = Fraction(1)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _digits(k: int, radix: int, length: int) -> tuple:
    out = []
    for _ in range(length):
        k, d = divmod(k, radix)
        out.append(d)
    return tuple(reversed(out))


def _merge(acc: dict, key, w) -> None:
    v = acc.get(key, 0) + w
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


# ---------------------------------------------------------------------------
# coefficients A (x) C^n


def twisted_coefficients(e, n: int) -> Bimodule:
    """A (x) C^n with a'.(a c_1..c_n).a'' = a' a a''_{psi^n} (x) c_1^psi .. c_n^psi.

    a'' moves leftwards through c_n first, then c_{n-1}, and so on.
    """
    dA, dC = e.A.dim, e.C.dim
    cn = dC**n
    dim = dA * cn
    A = e.A
    left = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dA)]
    right = [[[Fraction(0)] * dim for _ in range(dA)] for _ in range(dim)]
    for r in range(dim):
        a, cs = divmod(r, cn)
        for a1 in range(dA):
            for k, w in A.mul_basis(a1, a).items():
                left[a1][r][k * cn + cs] += w
        cdig = _digits(cs, dC, n)
        for a2 in range(dA):
            # move a2 leftwards through c_n, ..., c_1
            states = {(a2, ()): ONE}
            for c in reversed(cdig):
                nxt: dict = {}
                for (cur, tail), w in states.items():
                    for a3, c3, x in e.psi.table[c][cur]:
                        _merge(nxt, (a3, (c3,) + tail), w * x)
                states = nxt
            for (a3, tail), w in states.items():
                for k, x in A.mul_basis(a, a3).items():
                    right[r][a2][k * cn + flat_index((dC,) * n, tail)] += w * x
    bim = Bimodule(dim, dA, left, right, name=f"A(x)C^{n}")
    return bim


def check_twisted_coefficients(e, n: int):
    return validate_bimodule(twisted_coefficients(e, n), e.A, e)


# ---------------------------------------------------------------------------
# the bicomplex


class Bicomplex:
    """Cells, unsigned building blocks and the signed differentials d_h, d_v."""

    def __init__(self, e, cap: int = DEFAULT_CAP):
        self.e = e
        self.cap = cap
        self.dA, self.dB, self.dC = e.A.dim, e.B.dim, e.C.dim
        self.cx0 = SecondaryComplex(e, cap=cap)
        self.staic = SecondaryComplex(with_trivial_coalgebra(e), cap=cap)
        self._coef: dict = {}
        self._cache: dict = {}

    def complex_with(self, n: int) -> SecondaryComplex:
        """Secondary complex with coefficients A (x) C^n (n >= 1)."""
        cx = self._coef.get(n)
        if cx is None:
            m = twisted_coefficients(self.e, n)
            rep = validate_bimodule(m, self.e.A, self.e)
            if not rep.passed:
                raise InvariantError(f"A(x)C^{n} fails {rep.failures()[0].name}")
            cx = SecondaryComplex(self.e, m, cap=self.cap)
            self._coef[n] = cx
        return cx

    # dimensions
    def coef_dim(self, n: int) -> int:
        return self.dA * self.dC**n

    def source_size(self, m: int) -> int:
        return self.cx0.size(m)

    def cell_dim(self, m: int, n: int) -> int:
        if m < 0 or n < 0 or (m == 0 and n == 0):
            return 0
        if n == 0:
            return self.staic.cochain_dim(m)
        if m == 0:
            return self.dC ** (n + 1)
        return self.source_size(m) * self.coef_dim(n)

    def components(self, p: int) -> list:
        return [(p - n, n) for n in range(p + 1) if not (p - n == 0 and n == 0)]

    def tot_dims(self, p: int) -> list:
        return [self.cell_dim(m, n) for m, n in self.components(p)]

    def tot_dim(self, p: int) -> int:
        return sum(self.tot_dims(p))

    def _cached(self, key, build):
        hit = self._cache.get(key)
        if hit is None:
            hit = build()
            self._cache[key] = hit
        return hit

    # unsigned blocks
    def horizontal(self, m: int, n: int) -> Matrix:
        """delta^m on Hom(C A^m B.., A (x) C^n) (n >= 1), or on the (m, 0) cell."""
        if n == 0:
            return self.staic.differential(m)
        return self.complex_with(n).differential(m)

    def j(self, m: int) -> Matrix:
        """f -> eps (x) f from the (m, 0) cell into Hom(C A^m B.., A)."""
        return self._cached(("j", m), lambda: inclusion_matrix(self.cx0, m))

    def j_bar(self, n: int) -> Matrix:
        """g -> 1 (x) g from Hom(C, C^n) into Hom(C, A (x) C^n)."""

        def build():
            dC, cn = self.dC, self.dC**n
            unit = self.e.A.unit_vec
            coef = self.coef_dim(n)
            rows: dict = {}
            for c in range(dC):
                for s in range(cn):
                    for a, w in unit.items():
                        rows.setdefault(c * coef + a * cn + s, {})[c * cn + s] = w
            return Matrix(dC * coef, dC * cn, rows)

        return self._cached(("jbar", n), build)

    def vertical(self, m: int, n: int) -> Matrix:
        """delta-bar^n on Hom(V_m, A (x) C^n), V_m = C A^m B.. with rho_L, rho_R."""
        return self._cached(("vert", m, n), lambda: self._build_vertical(m, n))

    def _build_vertical(self, m: int, n: int) -> Matrix:
        e = self.e
        dC = self.dC
        basis = self.cx0.basis(m)
        rad = basis.radices
        src, tgt = self.coef_dim(n), self.coef_dim(n + 1)
        cn, cn1 = dC**n, dC ** (n + 1)
        psi = e.psi.table
        coprod = e.C.table
        rows: dict = {}

        def add(row, col, w):
            r = rows.setdefault(row, {})
            _merge(r, col, w)

        for v, c, a, b in basis:
            digits = (c,) + a + b
            base = v * tgt
            # (psi (x) C^n)(C (x) f) rho_L
            for (c1, y), w in rho_left_basis(e, rad, digits).items():
                for r in range(src):
                    ar, cs = divmod(r, cn)
                    for a2, c2, x in psi[c1][ar]:
                        add(base + a2 * cn1 + c2 * cn + cs, y * src + r, w * x)
            # (-1)^{n+1} (f (x) C) rho_R
            s = _sign(n + 1)
            for (y, c1), w in rho_right_basis(e, rad, digits, m).items():
                for r in range(src):
                    add(base + r * dC + c1, y * src + r, s * w)
            # sum_i (-1)^i Delta on the i-th C factor
            for r in range(src):
                ar, cs = divmod(r, cn)
                cd = _digits(cs, dC, n)
                for i in range(1, n + 1):
                    for d1, d2, w in coprod[cd[i - 1]]:
                        nd = cd[: i - 1] + (d1, d2) + cd[i:]
                        add(base + ar * cn1 + flat_index((dC,) * (n + 1), nd), v * src + r, _sign(i) * w)
        rows = {k: r for k, r in rows.items() if r}
        return Matrix(basis.size * tgt, basis.size * src, rows)

    def cartier(self, n: int) -> Matrix:
        """Coalgebra differential on Hom(C, C^n)."""

        def build():
            dC = self.dC
            cn, cn1 = dC**n, dC ** (n + 1)
            coprod = self.e.C.table
            rows: dict = {}

            def add(row, col, w):
                _merge(rows.setdefault(row, {}), col, w)

            for c in range(dC):
                for c1, c2, w in coprod[c]:
                    for s in range(cn):
                        add(c * cn1 + c1 * cn + s, c2 * cn + s, w)
                        add(c * cn1 + s * dC + c2, c1 * cn + s, _sign(n + 1) * w)
                for s in range(cn):
                    sd = _digits(s, dC, n)
                    for i in range(1, n + 1):
                        for d1, d2, w in coprod[sd[i - 1]]:
                            nd = sd[: i - 1] + (d1, d2) + sd[i:]
                            add(c * cn1 + flat_index((dC,) * (n + 1), nd), c * cn + s, _sign(i) * w)
            rows2 = {k: r for k, r in rows.items() if r}
            return Matrix(dC * cn1, dC * cn, rows2)

        return self._cached(("cartier", n), build)

    # signed differentials
    def d_h(self, m: int, n: int) -> Matrix:
        def build():
            if m >= 1:
                return self.horizontal(m, n).scale(_sign(m))
            return self.complex_with(n).differential(0) @ self.j_bar(n)

        return self._cached(("dh", m, n), build)

    def d_v(self, m: int, n: int) -> Matrix:
        def build():
            if m == 0:
                return self.cartier(n)
            if n == 0:
                return (self.vertical(m, 0) @ self.j(m)).scale(_sign(m))
            return self.vertical(m, n).scale(_sign(m))

        return self._cached(("dv", m, n), build)

    def D(self, p: int) -> Matrix:
        """Total differential Tot^p -> Tot^{p+1}."""

        def build():
            src = self.components(p)
            tgt = self.components(p + 1)
            blocks = {}
            for j, (m, n) in enumerate(src):
                for i, (m2, n2) in enumerate(tgt):
                    if (m2, n2) == (m + 1, n):
                        blocks[(i, j)] = self.d_h(m, n)
                    elif (m2, n2) == (m, n + 1):
                        blocks[(i, j)] = self.d_v(m, n)
            return block_matrix(self.tot_dims(p + 1), self.tot_dims(p), blocks)

        return self._cached(("D", p), build)

    # component helpers
    def split(self, p: int, vec: dict) -> dict:
        """Tot^p vector -> {(m, n): component vector}."""
        out = {}
        offset = 0
        for (m, n), d in zip(self.components(p), self.tot_dims(p)):
            out[(m, n)] = {k - offset: x for k, x in vec.items() if offset <= k < offset + d}
            offset += d
        return out

    def join(self, p: int, parts: dict) -> dict:
        vec = {}
        offset = 0
        for (m, n), d in zip(self.components(p), self.tot_dims(p)):
            for k, x in parts.get((m, n), {}).items():
                if x:
                    vec[offset + k] = Fraction(x)
            offset += d
        return vec

    # structural checks
    def check_anticommutation(self, m: int, n: int) -> bool:
        """d_h d_v + d_v d_h = 0 starting from cell (m, n)."""
        if (m, n) == (0, 0):
            return True
        a = self.d_v(m + 1, n) @ self.d_h(m, n)
        b = self.d_h(m, n + 1) @ self.d_v(m, n)
        return (a + b).is_zero()

    def check_squares(self, m: int, n: int) -> tuple:
        """(d_h^2 == 0, d_v^2 == 0) from cell (m, n)."""
        if (m, n) == (0, 0):
            return True, True
        h = (self.d_h(m + 1, n) @ self.d_h(m, n)).is_zero()
        v = (self.d_v(m, n + 1) @ self.d_v(m, n)).is_zero()
        return h, v

    def check_edge_maps(self, m: int, n: int) -> dict:
        """j and j-bar are chain maps: delta j = j delta and delta-bar j-bar = j-bar delta-bar."""
        out = {}
        if m >= 1:
            out["j"] = self.cx0.differential(m) @ self.j(m) == self.j(m + 1) @ self.staic.differential(m)
        if n >= 1:
            out["j_bar"] = self.vertical(0, n) @ self.j_bar(n) == self.j_bar(n + 1) @ self.cartier(n)
        return out


def assemble_bicomplex(e, p_max: int, cap: int = DEFAULT_CAP) -> Bicomplex:
    """Build every cell up to total degree p_max + 1 and assert the bicomplex identities."""
    if p_max < 2:
        raise ValueError("p_max must be at least 2")
    bx = Bicomplex(e, cap)
    for p in range(1, p_max + 1):
        for m, n in bx.components(p):
            if not bx.check_anticommutation(m, n):
                raise InvariantError(f"d_h d_v + d_v d_h != 0 at cell {(m, n)}")
            if p + 2 <= p_max + 1:
                h, v = bx.check_squares(m, n)
                if not (h and v):
                    raise InvariantError(f"d^2 != 0 at cell {(m, n)}")
    return bx


@dataclass
class TotalCohomology:
    label: str
    dims: list
    ranks: list
    betti: list

    def to_dict(self) -> dict:
        return {"label": self.label, "dims": self.dims, "ranks": self.ranks, "betti": self.betti}


def total_cohomology(bx: Bicomplex, p_max: int) -> TotalCohomology:
    dims, ranks, betti = [], [], []
    prev = 0
    for p in range(p_max + 1):
        d = bx.tot_dim(p)
        r = rank(bx.D(p)) if d else 0
        dims.append(d)
        ranks.append(r)
        b = d - r - prev
        if b < 0:
            raise InvariantError(f"negative total betti number in degree {p}")
        betti.append(b)
        prev = r
    return TotalCohomology(bx.e.name, dims, ranks, betti)


def check_D_squared(bx: Bicomplex, p: int) -> bool:
    return (bx.D(p + 1) @ bx.D(p)).is_zero()


# ---------------------------------------------------------------------------
# infinitesimal deformations


@dataclass
class ComponentReport:
    names: tuple
    values: dict  # name -> residual vector
    total: dict

    @property
    def passed(self) -> bool:
        return all(not v for v in self.values.values())

    @property
    def agrees_with_total(self) -> bool:
        return (not self.total) == self.passed

    def failures(self) -> list:
        return [k for k in self.names if self.values[k]]


COCYCLE_CONDITIONS = ("delta_mu", "mixed_mu_psi", "mixed_delta_psi", "cobar_delta")


def is_infinitesimal(bx: Bicomplex, mu1: dict, psi1: dict, delta1: dict) -> ComponentReport:
    """The four component conditions of a 2-cocycle, and D of the whole triple.

    The components are assembled from the unsigned maps, independently of the
    block matrix D.
    """
    delta_mu = bx.staic.differential(2).apply(mu1)
    jmu = bx.j(2).apply(mu1)
    mixed1 = bx.vertical(2, 0).apply(jmu)
    vec_iadd(mixed1, bx.horizontal(1, 1).apply(psi1), -1)
    mixed2 = bx.complex_with(2).differential(0).apply(bx.j_bar(2).apply(delta1))
    vec_iadd(mixed2, bx.vertical(1, 1).apply(psi1), -1)
    cobar = bx.cartier(2).apply(delta1)
    total = bx.D(2).apply(bx.join(2, {(2, 0): mu1, (1, 1): psi1, (0, 2): delta1}))
    values = dict(zip(COCYCLE_CONDITIONS, (delta_mu, mixed1, mixed2, cobar)))
    return ComponentReport(COCYCLE_CONDITIONS, values, total)


def cocycle_space(bx: Bicomplex, p: int = 2):
    return kernel(bx.D(p))


# ---------------------------------------------------------------------------
# evaluation of deformed structure maps


class _Maps:
    """mu^(i)_b, psi^(i), Delta^(i) evaluated on basis elements; i = 0 is undeformed."""

    def __init__(self, bx: Bicomplex, mus: Sequence[dict], psis: Sequence[dict], deltas: Sequence[dict]):
        self.bx = bx
        e = bx.e
        self.e = e
        self.mus = [None] + list(mus)
        self.psis = [None] + list(psis)
        self.deltas = [None] + list(deltas)
        dA, dB, dC = bx.dA, bx.dB, bx.dC
        self.dA, self.dB, self.dC = dA, dB, dC
        self._mu_t = [None] + [self._table(v, dA) for v in mus]
        self._psi_t = [None] + [self._table(v, dA * dC) for v in psis]
        self._delta_t = [None] + [self._table(v, dC * dC) for v in deltas]

    @staticmethod
    def _table(vec: dict, width: int) -> dict:
        out: dict = {}
        for k, x in vec.items():
            y, r = divmod(k, width)
            out.setdefault(y, {})[r] = x
        return out

    def order(self) -> int:
        return len(self.mus) - 1

    def mu(self, i: int, x: dict, y: dict, b: dict) -> dict:
        """mu^(i)(x (x) y (x) b) for vectors x, y in A and b in B."""
        A = self.e.A
        if i == 0:
            return A.mul(self.e.zeta_vec(b), A.mul(x, y))
        if i >= len(self._mu_t):
            return {}
        tab = self._mu_t[i]
        dA, dB = self.dA, self.dB
        out: dict = {}
        for a1, w1 in x.items():
            for a2, w2 in y.items():
                for bb, w3 in b.items():
                    col = tab.get((a1 * dA + a2) * dB + bb)
                    if col:
                        vec_iadd(out, col, w1 * w2 * w3)
        return out

    def psi(self, i: int, c: int, a: dict) -> dict:
        """psi^(i)(c (x) a) as {(a', c'): w}."""
        out: dict = {}
        if i == 0:
            for a0, w in a.items():
                for a2, c2, x in self.e.psi.table[c][a0]:
                    _merge(out, (a2, c2), w * x)
            return out
        if i >= len(self._psi_t):
            return {}
        tab = self._psi_t[i]
        dC = self.dC
        for a0, w in a.items():
            for r, x in tab.get(c * self.dA + a0, {}).items():
                a2, c2 = divmod(r, dC)
                _merge(out, (a2, c2), w * x)
        return out

    def delta(self, i: int, c: int) -> dict:
        """Delta^(i)(c) as {(c1, c2): w}."""
        if i == 0:
            return {(c1, c2): w for c1, c2, w in self.e.C.table[c]}
        if i >= len(self._delta_t):
            return {}
        out = {}
        for r, x in self._delta_t[i].get(c, {}).items():
            out[divmod(r, self.dC)] = x
        return out


def _index_pairs(k: int, allow_zero: bool):
    lo = 0 if allow_zero else 1
    return [(i, k - i) for i in range(lo, k + 1 - lo)]


def _index_triples(k: int, allow_top: bool):
    top = k if allow_top else k - 1
    return [(i, j, k - i - j) for i in range(0, top + 1) for j in range(0, top + 1) if 0 <= k - i - j <= top]


def _assoc_sum(M: _Maps, k: int, pairs, bx: Bicomplex) -> dict:
    """sum over (i, j) of mu^(j)_{b13 b23}(mu^(i)_{b12} x A) - mu^(i)_{b12 b13}(A x mu^(j)_{b23})."""
    e = M.e
    B = e.B
    dA = M.dA
    basis = bx.staic.basis(3)
    out = {}
    for x, c, a, b in basis:
        b12, b13, b23 = b
        acc: dict = {}
        e1, e2, e3 = {a[0]: ONE}, {a[1]: ONE}, {a[2]: ONE}
        for i, j in pairs:
            inner = M.mu(i, e1, e2, {b12: ONE})
            if inner:
                vec_iadd(acc, M.mu(j, inner, e3, B.mul_basis(b13, b23)))
            inner = M.mu(j, e2, e3, {b23: ONE})
            if inner:
                vec_iadd(acc, M.mu(i, e1, inner, B.mul_basis(b12, b13)), -1)
        for r, w in acc.items():
            out[x * dA + r] = w
    return out


def _mu_psi_sums(M: _Maps, k: int, triples, pairs, bx: Bicomplex) -> dict:
    """sum (mu^(i)_b x C)(A x psi^(j))(psi^(l) x A) - sum psi^(i)(C x mu^(j)_b) on C A^2 B."""
    dA, dC = M.dA, M.dC
    basis = bx.cx0.basis(2)
    width = dA * dC
    out = {}
    for x, c, a, b in basis:
        acc: dict = {}
        bvec = {b[0]: ONE}
        for i, j, l in triples:
            for (a1, c1), w1 in M.psi(l, c, {a[0]: ONE}).items():
                for (a2, c2), w2 in M.psi(j, c1, {a[1]: ONE}).items():
                    for r, w3 in M.mu(i, {a1: ONE}, {a2: ONE}, bvec).items():
                        _merge(acc, r * dC + c2, w1 * w2 * w3)
        for i, j in pairs:
            inner = M.mu(j, {a[0]: ONE}, {a[1]: ONE}, bvec)
            if inner:
                for (a2, c2), w in M.psi(i, c, inner).items():
                    _merge(acc, a2 * dC + c2, -w)
        for r, w in acc.items():
            out[x * width + r] = w
    return out


def _delta_psi_sums(M: _Maps, k: int, triples, pairs, bx: Bicomplex) -> dict:
    """sum (psi^(i) x C)(C x psi^(j))(Delta^(l) x A) - sum (A x Delta^(i)) psi^(j) on C A."""
    dA, dC = M.dA, M.dC
    width = dA * dC * dC
    out = {}
    for c in range(dC):
        for a in range(dA):
            acc: dict = {}
            for i, j, l in triples:
                for (c1, c2), w1 in M.delta(l, c).items():
                    for (a1, c3), w2 in M.psi(j, c2, {a: ONE}).items():
                        for (a2, c4), w3 in M.psi(i, c1, {a1: ONE}).items():
                            _merge(acc, (a2 * dC + c4) * dC + c3, w1 * w2 * w3)
            for i, j in pairs:
                for (a1, c1), w1 in M.psi(j, c, {a: ONE}).items():
                    for (d1, d2), w2 in M.delta(i, c1).items():
                        _merge(acc, (a1 * dC + d1) * dC + d2, -w1 * w2)
            for r, w in acc.items():
                out[(c * dA + a) * width + r] = w
    return out


def _coassoc_sum(M: _Maps, k: int, pairs, bx: Bicomplex) -> dict:
    """sum (Delta^(j) x C) Delta^(i) - (C x Delta^(j)) Delta^(i) on C."""
    dC = M.dC
    out = {}
    for c in range(dC):
        acc: dict = {}
        for i, j in pairs:
            for (c1, c2), w in M.delta(i, c).items():
                for (d1, d2), x in M.delta(j, c1).items():
                    _merge(acc, (d1 * dC + d2) * dC + c2, w * x)
                for (d1, d2), x in M.delta(j, c2).items():
                    _merge(acc, (c1 * dC + d1) * dC + d2, -w * x)
        for r, w in acc.items():
            out[c * dC**3 + r] = w
    return out


# ---------------------------------------------------------------------------
# jets


@dataclass
class DeformationJet:
    """Truncated deformation data; component vectors use the cell layouts above."""

    order: int
    mu: list = field(default_factory=list)
    psi: list = field(default_factory=list)
    delta: list = field(default_factory=list)

    def __post_init__(self):
        if not (len(self.mu) == len(self.psi) == len(self.delta) == self.order):
            raise ValueError("jet components must have exactly `order` entries")

    def truncate(self, order: int) -> "DeformationJet":
        return DeformationJet(order, self.mu[:order], self.psi[:order], self.delta[:order])

    def extend(self, mu: dict, psi: dict, delta: dict) -> "DeformationJet":
        return DeformationJet(self.order + 1, self.mu + [mu], self.psi + [psi], self.delta + [delta])

    @classmethod
    def from_cocycle(cls, bx: Bicomplex, vec: dict) -> "DeformationJet":
        parts = bx.split(2, vec)
        return cls(1, [parts[(2, 0)]], [parts[(1, 1)]], [parts[(0, 2)]])

    def order_vector(self, bx: Bicomplex, k: int) -> dict:
        return bx.join(2, {(2, 0): self.mu[k - 1], (1, 1): self.psi[k - 1], (0, 2): self.delta[k - 1]})


def _maps(bx: Bicomplex, jet: DeformationJet, upto: Optional[int] = None) -> _Maps:
    n = jet.order if upto is None else upto
    return _Maps(bx, jet.mu[:n], jet.psi[:n], jet.delta[:n])


RESIDUAL_NAMES = ("associativity", "psi_multiplicative", "psi_comultiplicative", "coassociativity")


def residuals(bx: Bicomplex, jet: DeformationJet, k: int) -> dict:
    """Coefficient of t^k in each defining equation, all orders 0..k included."""
    M = _maps(bx, jet)
    pairs = _index_pairs(k, allow_zero=True)
    triples = _index_triples(k, allow_top=True)
    return {
        "associativity": _assoc_sum(M, k, pairs, bx),
        "psi_multiplicative": _mu_psi_sums(M, k, triples, pairs, bx),
        "psi_comultiplicative": _delta_psi_sums(M, k, triples, pairs, bx),
        "coassociativity": _coassoc_sum(M, k, pairs, bx),
    }


def first_violation(bx: Bicomplex, jet: DeformationJet) -> Optional[tuple]:
    """(k, equation name) of the first nonzero residual, or None."""
    for k in range(1, jet.order + 1):
        res = residuals(bx, jet, k)
        for name in RESIDUAL_NAMES:
            if res[name]:
                return (k, name)
    return None


def obstruction_components(bx: Bicomplex, jet: DeformationJet, k: Optional[int] = None) -> dict:
    """The four obstruction sums for order k (default jet.order + 1), orders < k only."""
    k = jet.order + 1 if k is None else k
    M = _maps(bx, jet, upto=k - 1)
    pairs = _index_pairs(k, allow_zero=False)
    triples = _index_triples(k, allow_top=False)
    return {
        (3, 0): _assoc_sum(M, k, pairs, bx),
        (2, 1): _mu_psi_sums(M, k, triples, pairs, bx),
        (1, 2): _delta_psi_sums(M, k, triples, pairs, bx),
        (0, 3): _coassoc_sum(M, k, pairs, bx),
    }


def order_equation_gap(bx: Bicomplex, jet: DeformationJet, k: int) -> dict:
    """D(x_k) - Obs^k as a Tot^3 vector; zero iff the order-k equations hold."""
    vec = bx.D(2).apply(jet.order_vector(bx, k))
    vec_iadd(vec, bx.join(3, obstruction_components(bx, jet, k)), -1)
    return vec


def verify_jet(bx: Bicomplex, jet: DeformationJet) -> None:
    """Raise ValidationError naming the first violated equation."""
    bad = first_violation(bx, jet)
    if bad is not None:
        raise ValidationError(f"jet violates {bad[1]} at order {bad[0]}")
    for k in range(1, jet.order + 1):
        if order_equation_gap(bx, jet, k):
            raise InvariantError(f"obstruction form of the order-{k} equations disagrees with the direct residuals")


def checked_jet(bx: Bicomplex, jet: DeformationJet) -> DeformationJet:
    """Return ``jet`` after checking shapes and every truncated equation."""
    shapes = {"mu": bx.cell_dim(2, 0), "psi": bx.cell_dim(1, 1), "delta": bx.cell_dim(0, 2)}
    for name, dim in shapes.items():
        for vec in getattr(jet, name):
            if any(not 0 <= k < dim for k in vec):
                raise ValidationError(f"{name} component out of range for this structure")
    verify_jet(bx, jet)
    return jet


def obstruction(bx: Bicomplex, jet: DeformationJet) -> dict:
    """Obs^{N+1} as a Tot^3 vector; D Obs = 0 is asserted."""
    verify_jet(bx, jet)
    vec = bx.join(3, obstruction_components(bx, jet))
    if bx.D(3).apply(vec):
        raise InvariantError("D Obs != 0")
    return vec


@dataclass
class LiftResult:
    jet: Optional[DeformationJet]
    obstruction: dict

    @property
    def lifted(self) -> bool:
        return self.jet is not None


def lift_jet(bx: Bicomplex, jet: DeformationJet, free: Optional[dict] = None) -> LiftResult:
    """Solve D x = Obs^{N+1}; ``free`` is an optional 2-cocycle added to the particular solution."""
    obs = obstruction(bx, jet)
    sol = solve(bx.D(2), obs)
    if sol is None:
        return LiftResult(None, obs)
    if free:
        vec_iadd(sol, free)
    parts = bx.split(2, sol)
    new = jet.extend(parts[(2, 0)], parts[(1, 1)], parts[(0, 2)])
    bad = first_violation(bx, new)
    if bad is not None:
        raise InvariantError(f"lifted jet violates {bad[1]} at order {bad[0]}")
    return LiftResult(new, obs)


def obstruction_class_nonzero(bx: Bicomplex, obs: dict) -> bool:
    return solve(bx.D(2), obs) is None


# ---------------------------------------------------------------------------
# equivalences


@dataclass
class EquivalencePair:
    alpha1: dict  # Hom(A, A), index a * dA + a'
    gamma1: dict  # Hom(C, C), index c * dC + c'


def equivalence_difference(bx: Bicomplex, alpha1: dict, gamma1: dict) -> dict:
    """Tot^2 vector of the first-order change of (mu, psi, Delta) under (alpha, gamma).

    Written out from the equivalence conditions, without D:
      mu - mu'   = mu_b(alpha x, y) + mu_b(x, alpha y) - alpha mu_b(x, y)
      psi - psi' = psi(gamma (x) A) + psi(C (x) alpha) - (alpha (x) C) psi - (A (x) gamma) psi
      D - D'     = Delta gamma - (gamma (x) C) Delta - (C (x) gamma) Delta
    """
    e = bx.e
    A = e.A
    dA, dB, dC = bx.dA, bx.dB, bx.dC
    al = _Maps._table(alpha1, dA)
    ga = _Maps._table(gamma1, dC)

    def alpha(v):
        out: dict = {}
        for a, w in v.items():
            vec_iadd(out, al.get(a, {}), w)
        return out

    def gamma(c):
        return ga.get(c, {})

    mu: dict = {}
    for a1 in range(dA):
        for a2 in range(dA):
            for b in range(dB):
                z = e.zeta_table[b]
                acc: dict = {}
                vec_iadd(acc, A.mul(z, A.mul(alpha({a1: ONE}), {a2: ONE})))
                vec_iadd(acc, A.mul(z, A.mul({a1: ONE}, alpha({a2: ONE}))))
                vec_iadd(acc, alpha(A.mul(z, A.mul_basis(a1, a2))), -1)
                base = ((a1 * dA + a2) * dB + b) * dA
                for r, w in acc.items():
                    mu[base + r] = w
    psi: dict = {}
    for c in range(dC):
        for a in range(dA):
            acc = {}
            for c2, w in gamma(c).items():
                for a2, c3, x in e.psi.table[c2][a]:
                    _merge(acc, a2 * dC + c3, w * x)
            for (a2, c3), w in e.psi_vec(c, alpha({a: ONE})).items():
                _merge(acc, a2 * dC + c3, w)
            for a2, c3, x in e.psi.table[c][a]:
                for a3, w in al.get(a2, {}).items():
                    _merge(acc, a3 * dC + c3, -x * w)
                for c4, w in gamma(c3).items():
                    _merge(acc, a2 * dC + c4, -x * w)
            base = (c * dA + a) * dA * dC
            for r, w in acc.items():
                psi[base + r] = w
    delta: dict = {}
    for c in range(dC):
        acc = {}
        for c2, w in gamma(c).items():
            for c3, c4, x in e.C.table[c2]:
                _merge(acc, c3 * dC + c4, w * x)
        for c1, c2, x in e.C.table[c]:
            for c3, w in gamma(c1).items():
                _merge(acc, c3 * dC + c2, -w * x)
            for c3, w in gamma(c2).items():
                _merge(acc, c1 * dC + c3, -w * x)
        for r, w in acc.items():
            delta[c * dC * dC + r] = w
    return bx.join(2, {(2, 0): mu, (1, 1): psi, (0, 2): delta})


def _split_tot1(bx: Bicomplex, vec: dict) -> tuple:
    parts = bx.split(1, vec)
    return parts[(1, 0)], parts[(0, 1)]


def equivalence_coboundary(bx: Bicomplex, triple1: dict, triple2: dict) -> Optional[EquivalencePair]:
    """(alpha1, gamma1) with triple1 - triple2 = D(-alpha1, -gamma1), or None."""
    diff = dict(triple1)
    vec_iadd(diff, triple2, -1)
    sol = solve(bx.D(1), diff)
    if sol is None:
        return None
    a, g = _split_tot1(bx, {k: -x for k, x in sol.items()})
    pair = EquivalencePair(a, g)
    check = bx.D(1).apply(bx.join(1, {(1, 0): {k: -x for k, x in a.items()}, (0, 1): {k: -x for k, x in g.items()}}))
    if check != {k: x for k, x in diff.items() if x}:
        raise InvariantError("equivalence witness does not reproduce the difference")
    return pair


def direct_h2_dimension(bx: Bicomplex) -> int:
    """Independent count of infinitesimal deformations modulo equivalence.

    Solutions of the linearized defining equations (the order-1 residuals,
    which are linear in the order-1 data) modulo the first-order changes
    produced by equivalences.
    """
    dim2 = bx.tot_dim(2)
    cols = []
    for k in range(dim2):
        jet = DeformationJet.from_cocycle(bx, {k: ONE})
        res = residuals(bx, jet, 1)
        vec: dict = {}
        offset = 0
        for name in RESIDUAL_NAMES:
            part = res[name]
            for i, x in part.items():
                vec[offset + i] = x
            offset += _residual_width(bx, name)
        cols.append(vec)
    total_rows = sum(_residual_width(bx, n) for n in RESIDUAL_NAMES)
    ker_dim = dim2 - rank_of_vectors(cols, total_rows) if cols else 0
    dA, dC = bx.dA, bx.dC
    images = []
    for k in range(dA * dA):
        images.append(equivalence_difference(bx, {k: ONE}, {}))
    for k in range(dC * dC):
        images.append(equivalence_difference(bx, {}, {k: ONE}))
    return ker_dim - rank_of_vectors(images, dim2)


def _residual_width(bx: Bicomplex, name: str) -> int:
    return {
        "associativity": bx.cell_dim(3, 0),
        "psi_multiplicative": bx.cell_dim(2, 1),
        "psi_comultiplicative": bx.cell_dim(1, 2),
        "coassociativity": bx.cell_dim(0, 3),
    }[name]


def random_cocycle(bx: Bicomplex, rng: random.Random, p: int = 2) -> dict:
    acc: dict = {}
    for v in cocycle_space(bx, p).basis:
        vec_iadd(acc, v, rng.randint(-3, 3))
    return acc


# ---------------------------------------------------------------------------
# serialization


def _frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _matrix_json(vec: dict, nrows: int, ncols: int) -> list:
    """Cochain vector (index col * nrows + row) as a rows x cols list of strings."""
    out = [["0"] * ncols for _ in range(nrows)]
    for k, x in vec.items():
        col, row = divmod(k, nrows)
        out[row][col] = _frac_str(x)
    return out


def _matrix_vec(data: list, nrows: int, ncols: int) -> dict:
    if len(data) != nrows or any(len(r) != ncols for r in data):
        raise ValueError(f"expected a {nrows}x{ncols} matrix")
    vec = {}
    for row in range(nrows):
        for col in range(ncols):
            x = Fraction(data[row][col])
            if x:
                vec[col * nrows + row] = x
    return vec


def _shapes(e) -> dict:
    dA, dB, dC = e.A.dim, e.B.dim, e.C.dim
    return {"mu": (dA, dA * dA * dB), "psi": (dA * dC, dC * dA), "delta": (dC * dC, dC)}


def jet_to_json(e, jet: DeformationJet) -> dict:
    sh = _shapes(e)
    return {
        "schema": "entcoh-jet/1",
        "order": jet.order,
        "mu": [_matrix_json(v, *sh["mu"]) for v in jet.mu],
        "psi": [_matrix_json(v, *sh["psi"]) for v in jet.psi],
        "delta": [_matrix_json(v, *sh["delta"]) for v in jet.delta],
    }


def jet_from_json(e, data: dict) -> DeformationJet:
    sh = _shapes(e)
    order = int(data["order"])
    return DeformationJet(
        order,
        [_matrix_vec(m, *sh["mu"]) for m in data["mu"]],
        [_matrix_vec(m, *sh["psi"]) for m in data["psi"]],
        [_matrix_vec(m, *sh["delta"]) for m in data["delta"]],
    )


def dumps_jet(e, jet: DeformationJet) -> str:
    return json.dumps(jet_to_json(e, jet), sort_keys=True)


def loads_jet(e, text: str) -> DeformationJet:
    return jet_from_json(e, json.loads(text))
