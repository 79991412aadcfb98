"""The equivariant subcomplex, its comp algebra and the Gerstenhaber layer.

A cochain f of degree n is equivariant when

    (f (x) C) rho_R = psi (C (x) f) rho_L      as maps  C A^n B.. -> A (x) C

where rho_L(c M) = c_1 (x) c_2 M and rho_R(c M) = c_1 M_psi (x) c_2^{psi^n},
the B-block riding along unchanged.  E^n is computed as the kernel of the
difference of the two sides.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import AxiomCheck, ValidationReport
from .comp import CompContext, _compare, check_comp_full, comp_axioms_on_samples
from .complex import CohomologyReport, DegreeCohomology, SecondaryComplex, representatives
from .errors import InvariantError
from .linalg import Matrix, RowEchelon, Subspace, kernel, rank_of_vectors, vec_iadd
from .tensor_basis import Cochain, flat_index, psi_iterate_basis

ONE = Fraction(1)


# ---------------------------------------------------------------------------
# coactions


def rho_left_basis(e, radices: Sequence[int], digits: tuple) -> dict:
    """{(c', y): w} for c (x) rest -> c_1 (x) (c_2 (x) rest)."""
    out = {}
    rest = digits[1:]
    for c1, c2, w in e.C.table[digits[0]]:
        y = flat_index(radices, (c2,) + rest)
        out[(c1, y)] = out.get((c1, y), 0) + w
    return {k: v for k, v in out.items() if v}


def rho_right_basis(e, radices: Sequence[int], digits: tuple, n: int) -> dict:
    """{(y, c'): w} for c (x) a_1..a_n (x) tail -> (c_1 (x) a_psi (x) tail) (x) c_2^{psi^n}."""
    out: dict = {}
    a = digits[1 : 1 + n]
    tail = digits[1 + n :]
    for c1, c2, w in e.C.table[digits[0]]:
        for (a2, c3), w2 in psi_iterate_basis(e, c2, a).items():
            key = (flat_index(radices, (c1,) + a2 + tail), c3)
            out[key] = out.get(key, 0) + w * w2
    return {k: v for k, v in out.items() if v}


@dataclass
class CoactionPair:
    """rho_L and rho_R on C A^n B^{n(n-1)/2} as matrices.

    rho_L rows are c' * N + y (C first); rho_R rows are y * dim C + c' (C last).
    """

    n: int
    size: int
    dim_c: int
    rho_l: Matrix
    rho_r: Matrix


def coactions(cx: SecondaryComplex, n: int) -> CoactionPair:
    e = cx.e
    basis = cx.basis(n)
    rad = basis.radices
    N, dC = basis.size, e.C.dim
    rl: dict = {}
    rr: dict = {}
    for x, c, a, b in basis:
        digits = (c,) + a + b
        for (c1, y), w in rho_left_basis(e, rad, digits).items():
            rl.setdefault(c1 * N + y, {})[x] = w
        for (y, c1), w in rho_right_basis(e, rad, digits, n).items():
            rr.setdefault(y * dC + c1, {})[x] = w
    return CoactionPair(n, N, dC, Matrix(dC * N, N, rl), Matrix(N * dC, N, rr))


def check_bicomodule(cx: SecondaryComplex, n: int) -> ValidationReport:
    """Coassociativity and counit laws of both coactions, and that they commute."""
    e = cx.e
    basis = cx.basis(n)
    rad = basis.radices
    C = e.C
    rep = ValidationReport(f"bicomodule C A^{n} B.. ({e.name})")

    def rl(digits):
        return rho_left_basis(e, rad, digits)

    def rr(digits):
        return rho_right_basis(e, rad, digits, n)

    def unflat(y):
        t = basis.unflatten(y)
        return (t.c,) + t.a + t.b

    def merge(acc, key, w):
        v = acc.get(key, 0) + w
        if v:
            acc[key] = v
        else:
            acc.pop(key, None)

    bad = {"left_coassociative": None, "left_counit": None, "right_coassociative": None,
           "right_counit": None, "coactions_commute": None}
    for x, c, a, b in basis:
        digits = (c,) + a + b
        L = rl(digits)
        R = rr(digits)
        # left coassociativity
        lhs: dict = {}
        for (c1, y), w in L.items():
            for i, j, w2 in C.table[c1]:
                merge(lhs, (i, j, y), w * w2)
        rhs: dict = {}
        for (c1, y), w in L.items():
            for (c2, y2), w2 in rl(unflat(y)).items():
                merge(rhs, (c1, c2, y2), w * w2)
        if lhs != rhs and bad["left_coassociative"] is None:
            bad["left_coassociative"] = (x,)
        cnt: dict = {}
        for (c1, y), w in L.items():
            merge(cnt, y, w * C.counit[c1])
        if cnt != {x: ONE} and bad["left_counit"] is None:
            bad["left_counit"] = (x,)
        # right coassociativity
        lhs, rhs = {}, {}
        for (y, c1), w in R.items():
            for i, j, w2 in C.table[c1]:
                merge(lhs, (y, i, j), w * w2)
            for (y2, c2), w2 in rr(unflat(y)).items():
                merge(rhs, (y2, c2, c1), w * w2)
        if lhs != rhs and bad["right_coassociative"] is None:
            bad["right_coassociative"] = (x,)
        cnt = {}
        for (y, c1), w in R.items():
            merge(cnt, y, w * C.counit[c1])
        if cnt != {x: ONE} and bad["right_counit"] is None:
            bad["right_counit"] = (x,)
        # (C (x) rho_R) rho_L = (rho_L (x) C) rho_R
        lhs, rhs = {}, {}
        for (c1, y), w in L.items():
            for (y2, c2), w2 in rr(unflat(y)).items():
                merge(lhs, (c1, y2, c2), w * w2)
        for (y, c2), w in R.items():
            for (c1, y2), w2 in rl(unflat(y)).items():
                merge(rhs, (c1, y2, c2), w * w2)
        if lhs != rhs and bad["coactions_commute"] is None:
            bad["coactions_commute"] = (x,)
    for name, w in bad.items():
        rep.checks.append(AxiomCheck(name, w is None, w))
    return rep


def check_multiplication_square(e, n: int, j: int) -> bool:
    """rho_R^n (C A^j mu A^{n-j-1}) = (C A^j mu A^{n-j-1} C) rho_R^{n+1} on C A^{n+1}."""
    A = e.A
    rad_big = (e.C.dim,) + (A.dim,) * (n + 1)
    rad_small = (e.C.dim,) + (A.dim,) * n
    for digits in itertools.product(*(range(r) for r in rad_big)):
        c, a = digits[0], digits[1:]
        lhs: dict = {}
        for k, w in A.mul_basis(a[j], a[j + 1]).items():
            small = (c,) + a[:j] + (k,) + a[j + 2 :]
            for key, w2 in rho_right_basis(e, rad_small, small, n).items():
                lhs[key] = lhs.get(key, 0) + w * w2
        rhs: dict = {}
        for (y, c2), w in rho_right_basis(e, rad_big, digits, n + 1).items():
            dig = []
            rest = y
            for r in reversed(rad_big):
                rest, d = divmod(rest, r)
                dig.append(d)
            dig.reverse()
            b = dig[1:]
            for k, w2 in A.mul_basis(b[j], b[j + 1]).items():
                small = (dig[0],) + tuple(b[:j]) + (k,) + tuple(b[j + 2 :])
                key = (flat_index(rad_small, small), c2)
                rhs[key] = rhs.get(key, 0) + w * w2
        if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
            return False
    return True


# ---------------------------------------------------------------------------
# the equivariant subspace


def equivariance_operator(cx: SecondaryComplex, n: int) -> Matrix:
    """f -> (f (x) C) rho_R - psi (C (x) f) rho_L on the coefficient space of C^n."""
    e = cx.e
    dA, dC = e.A.dim, e.C.dim
    basis = cx.basis(n)
    rad = basis.radices
    psi = e.psi.table
    rows: dict = {}

    def add(row, col, w):
        r = rows.setdefault(row, {})
        v = r.get(col, 0) + w
        if v:
            r[col] = v
        else:
            r.pop(col, None)

    for x, c, a, b in basis:
        digits = (c,) + a + b
        base = x * dA * dC
        for (y, c1), w in rho_right_basis(e, rad, digits, n).items():
            for r in range(dA):
                add(base + r * dC + c1, y * dA + r, w)
        for (c1, y), w in rho_left_basis(e, rad, digits).items():
            for r in range(dA):
                for a2, c2, w2 in psi[c1][r]:
                    add(base + a2 * dC + c2, y * dA + r, -w * w2)
    rows = {k: v for k, v in rows.items() if v}
    return Matrix(basis.size * dA * dC, cx.cochain_dim(n), rows)


@dataclass
class EquivariantSubspace:
    degree: int
    subspace: Subspace
    full_dim: int

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @property
    def is_everything(self) -> bool:
        return self.subspace.dim == self.full_dim

    def contains(self, f) -> bool:
        vec = f.vec if isinstance(f, Cochain) else f
        return self.subspace.contains(vec)

    def basis_cochains(self, cx: SecondaryComplex) -> list:
        return [cx.cochain(self.degree, v) for v in self.subspace.basis]


def equivariant_subspace(cx: SecondaryComplex, n: int) -> EquivariantSubspace:
    if cx.m.name != "regular":
        raise ValueError("the equivariant subcomplex is defined for M = A")
    cache = cx.__dict__.setdefault("_equivariant_cache", {})
    hit = cache.get(n)
    if hit is None:
        hit = EquivariantSubspace(n, kernel(equivariance_operator(cx, n)), cx.cochain_dim(n))
        cache[n] = hit
    return hit


def is_equivariant(cx: SecondaryComplex, f: Cochain) -> bool:
    return not equivariance_operator(cx, f.degree).apply(f.vec)


def random_member(space: EquivariantSubspace, cx: SecondaryComplex, rng: random.Random, lo: int = -3, hi: int = 3) -> Cochain:
    acc: dict = {}
    for v in space.subspace.basis:
        vec_iadd(acc, v, rng.randint(lo, hi))
    return cx.cochain(space.degree, acc)


@dataclass
class SubcomplexData:
    report: CohomologyReport
    spaces: dict
    images: dict  # degree -> list of delta(basis of E^{n-1}) vectors


def subcomplex_cohomology(cx: SecondaryComplex, max_degree: int, with_representatives: bool = False) -> SubcomplexData:
    """Cohomology of delta restricted to E; stability delta(E^n) in E^{n+1} is asserted."""
    spaces = {n: equivariant_subspace(cx, n) for n in range(max_degree + 2)}
    report = CohomologyReport(label=f"{cx.e.name} equivariant")
    images: dict = {0: []}
    prev_rank = 0
    for n in range(max_degree + 1):
        sp = spaces[n]
        d = cx.differential(n)
        imgs = [d.apply(v) for v in sp.subspace.basis]
        target = spaces[n + 1]
        for v in imgs:
            if not target.contains(v):
                raise InvariantError(f"delta does not map E^{n} into E^{n + 1}")
        images[n + 1] = imgs
        r = rank_of_vectors(imgs, cx.cochain_dim(n + 1))
        kdim = sp.dim - r
        entry = DegreeCohomology(n, sp.dim, r, kdim, kdim - prev_rank)
        if with_representatives:
            coords = kernel(Matrix.from_columns(cx.cochain_dim(n + 1), imgs))
            cocycles = []
            for kv in coords.basis:
                acc: dict = {}
                for idx, w in kv.items():
                    vec_iadd(acc, sp.subspace.basis[idx], w)
                cocycles.append(acc)
            reps = representatives(cocycles, images[n], cx.cochain_dim(n))
            if len(reps) != entry.betti:
                raise InvariantError("restricted complex is not a complex")
            entry.representatives = [cx.cochain(n, v) for v in reps]
        report.degrees.append(entry)
        prev_rank = r
    return SubcomplexData(report, spaces, images)


def comparison_rank(cx: SecondaryComplex, sub: SubcomplexData, n: int) -> int:
    """Rank of H^n(E) -> HH^n induced by the inclusion."""
    bvecs = cx.differential(n - 1).columns() if n > 0 else []
    base = rank_of_vectors(bvecs, cx.cochain_dim(n))
    reps = [f.vec for f in sub.report.degree(n).representatives]
    return rank_of_vectors(list(bvecs) + reps, cx.cochain_dim(n)) - base


# ---------------------------------------------------------------------------
# products and axioms on E


def circ_and_bracket(ctx: CompContext, f: Cochain, g: Cochain) -> tuple:
    return ctx.circ(f, g), ctx.bracket(f, g)


def check_comp_axioms(ctx: CompContext, max_degree: int = 2) -> ValidationReport:
    """The five comp algebra axioms on E^k, k <= max_degree.

    When E^k is everything the check runs symbolically on whole bases;
    otherwise every triple of E-basis cochains is evaluated.
    """
    cx = ctx.cx
    spaces = {k: equivariant_subspace(cx, k) for k in range(max_degree + 1)}
    if all(sp.is_everything for sp in spaces.values()):
        rep = check_comp_full(ctx, max_degree)
        rep.subject = f"comp axioms on E ({ctx.e.name}, E = C)"
        return rep
    samples = {k: sp.basis_cochains(cx) for k, sp in spaces.items()}
    rep = comp_axioms_on_samples(ctx, samples)
    rep.subject = f"comp axioms on E ({ctx.e.name}, E-bases)"
    return rep


def comp_closure(ctx: CompContext, pairs: int = 8, max_degree: int = 2, seed: int = 0) -> AxiomCheck:
    """f <>_i g stays in E for random equivariant f, g."""
    cx = ctx.cx
    rng = random.Random(seed)
    spaces = {k: equivariant_subspace(cx, k) for k in range(2 * max_degree)}
    for _ in range(pairs):
        m = rng.randint(1, max_degree)
        n = rng.randint(0, max_degree)
        f = random_member(spaces[m], cx, rng)
        g = random_member(spaces[n], cx, rng)
        for i in range(m):
            if not spaces[m + n - 1].contains(ctx.comp(f, i, g)):
                return AxiomCheck("comp_closure", False, (m, i, n))
    return AxiomCheck("comp_closure", True, detail=f"{pairs} random pairs")


def alpha_membership(ctx: CompContext) -> AxiomCheck:
    return AxiomCheck("alpha_equivariant", equivariant_subspace(ctx.cx, 2).contains(ctx.alpha))


@dataclass
class CupCoincidence:
    passed: bool
    witness: Optional[tuple] = None
    checked: int = 0


def cup_coincidence(ctx: CompContext, fs: Sequence[Cochain], gs: Sequence[Cochain]) -> CupCoincidence:
    """f cup g == f sqcup g for every pair drawn from fs x gs."""
    count = 0
    for a, f in enumerate(fs):
        for b, g in enumerate(gs):
            count += 1
            if ctx.cup(f, g) != ctx.sqcup(f, g):
                return CupCoincidence(False, (f.degree, a, g.degree, b), count)
    return CupCoincidence(True, None, count)


def cup_coincidence_on_basis(ctx: CompContext, m: int, n: int) -> CupCoincidence:
    cx = ctx.cx
    return cup_coincidence(ctx, equivariant_subspace(cx, m).basis_cochains(cx), equivariant_subspace(cx, n).basis_cochains(cx))


def _basis_cochains(cx: SecondaryComplex, n: int) -> list:
    return [cx.cochain(n, {k: ONE}) for k in range(cx.cochain_dim(n))]


def search_cup_counterexample(ctx: CompContext, max_degree: int = 2) -> Optional[tuple]:
    """First pair of basis cochains (degrees <= max_degree) with cup != sqcup, or None."""
    cx = ctx.cx
    for m in range(max_degree + 1):
        for n in range(max_degree + 1 - m):
            for f in _basis_cochains(cx, m):
                for g in _basis_cochains(cx, n):
                    if ctx.cup(f, g) != ctx.sqcup(f, g):
                        return (f, g)
    return None


def search_comp_counterexample(ctx: CompContext, max_degree: int = 2) -> Optional[tuple]:
    """Basis cochains violating the unrestricted commutation axiom, or None.

    Returns (f, g, h, i, j) re-verified by direct evaluation.
    """
    cx = ctx.cx
    degs = range(max_degree + 1)
    for m in degs:
        for n in degs:
            for p in degs:
                for i in range(m):
                    for j in range(i):
                        w = _compare(ctx._nested_left(m, i, n, j, p), ctx._nested_swapped(m, j, p, i + p - 1, n))
                        if w is None:
                            continue
                        _, (yf, (zg, rg), (zh, rh)), _, _ = w
                        dA = ctx.e.A.dim
                        # f must map e_yf somewhere; use each output coordinate until one separates
                        for s in range(dA):
                            f = cx.cochain(m, {yf * dA + s: ONE})
                            g = cx.cochain(n, {zg * dA + rg: ONE})
                            h = cx.cochain(p, {zh * dA + rh: ONE})
                            lhs = ctx.comp(ctx.comp(f, i, g), j, h)
                            rhs = ctx.comp(ctx.comp(f, j, h), i + p - 1, g)
                            if lhs != rhs:
                                return (f, g, h, i, j)
    return None


# ---------------------------------------------------------------------------
# Gerstenhaber identities on H(E)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


@dataclass
class GerstenhaberReport:
    label: str
    betti: tuple
    checks: dict = field(default_factory=dict)  # name -> [passed, count, first witness]
    informational: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v[0] for v in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "betti": list(self.betti),
            "checks": {k: {"passed": v[0], "cases": v[1], "witness": v[2]} for k, v in self.checks.items()},
            "informational": {k: {"holds": v[0], "cases": v[1], "witness": v[2]} for k, v in self.informational.items()},
        }


class _ModBoundaries:
    """Membership of cochains in delta(E^{k-1}), cached per degree."""

    def __init__(self, cx: SecondaryComplex):
        self.cx = cx
        self.cache: dict = {}

    def _echelon(self, k: int) -> RowEchelon:
        ech = self.cache.get(k)
        if ech is None:
            ech = RowEchelon(self.cx.cochain_dim(k))
            if k > 0:
                d = self.cx.differential(k - 1)
                for v in equivariant_subspace(self.cx, k - 1).subspace.basis:
                    ech.add(d.apply(v))
            self.cache[k] = ech
        return ech

    def is_boundary(self, f: Cochain) -> bool:
        return f.is_zero() or self._echelon(f.degree).contains(f.vec)


def gerstenhaber_check(ctx: CompContext, max_degree: int = 2, max_output_degree: Optional[int] = None) -> GerstenhaberReport:
    """Graded commutativity, antisymmetry, Jacobi and the derivation law on H(E).

    Identities are tested on representatives modulo delta(E).  The derivation
    law uses the sign (-1)^{(m-1)n}; the variant with (-1)^{m(n+1)} is
    reported under ``informational``.
    """
    cx = ctx.cx
    sub = subcomplex_cohomology(cx, max_degree, with_representatives=True)
    reps = {d.degree: d.representatives for d in sub.report.degrees}
    top = max_output_degree if max_output_degree is not None else 3 * max_degree
    mod = _ModBoundaries(cx)
    rep = GerstenhaberReport(f"{ctx.e.name} equivariant", sub.report.betti)

    def record(table, name, ok, witness):
        entry = table.setdefault(name, [True, 0, None])
        entry[1] += 1
        if not ok and entry[0]:
            entry[0] = False
            entry[2] = witness

    classes = [(m, a, f) for m in sorted(reps) for a, f in enumerate(reps[m])]
    for (m, a, f), (n, b, g) in itertools.product(classes, repeat=2):
        if m + n <= top:
            diff = ctx.cup(f, g) - ctx.cup(g, f).scale(_sign(m * n))
            record(rep.checks, "graded_commutativity", mod.is_boundary(diff), [m, a, n, b])
        if m + n - 1 <= top and m + n >= 1:
            fg = ctx.bracket(f, g)
            gf = ctx.bracket(g, f)
            ok = (fg + gf.scale(_sign((m - 1) * (n - 1)))).is_zero()
            record(rep.checks, "bracket_antisymmetry", ok, [m, a, n, b])
            record(rep.checks, "bracket_is_cocycle", cx.apply(fg).is_zero(), [m, a, n, b])
    def br(x, y):
        # brackets landing in degree -1 vanish
        return None if x is None or y is None or x.degree + y.degree < 1 else ctx.bracket(x, y)

    def cupn(x, y):
        return None if x is None or y is None else ctx.cup(x, y)

    def combo(degree, terms):
        acc = cx.zero(degree)
        for s, t in terms:
            if t is not None:
                acc = acc + t.scale(s)
        return acc

    for (m, a, f), (n, b, g), (p, c, h) in itertools.product(classes, repeat=3):
        d = m + n + p - 2
        if 0 <= d <= top and n + p >= 1:
            lhs = br(f, br(g, h))
            terms = [(1, lhs), (-1, br(br(f, g), h)), (-_sign((m - 1) * (n - 1)), br(g, br(f, h)))]
            record(rep.checks, "graded_jacobi", mod.is_boundary(combo(d, terms)), [m, a, n, b, p, c])
        d = m + n + p - 1
        if 0 <= d <= top:
            lhs = br(f, cupn(g, h))
            first = cupn(br(f, g), h)
            second = cupn(g, br(f, h))
            ok = mod.is_boundary(combo(d, [(1, lhs), (-1, first), (-_sign((m - 1) * n), second)]))
            record(rep.checks, "derivation", ok, [m, a, n, b, p, c])
            ok_lit = mod.is_boundary(combo(d, [(1, lhs), (-1, first), (-_sign(m * (n + 1)), second)]))
            record(rep.informational, "derivation_sign_m(n+1)", ok_lit, [m, a, n, b, p, c])
    return rep
