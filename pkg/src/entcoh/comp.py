"""Partial compositions, the element alpha and the two cup products (M = A).

``comp_operator(m, i, n)`` describes f <>_i g for f of degree m and g of
degree n as a sparse bilinear operator: for each output basis index x it
lists terms (w, y, z, r) meaning

    (f <>_i g)(e_x) += w * g(e_z)_r * f(e_y)

The operators are cached, evaluated on concrete cochains by ``comp`` and
composed symbolically by the axiom checkers, which is how identities are
verified on whole bases at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .algebra import ValidationReport, AxiomCheck
from .complex import SecondaryComplex, cohomology
from .errors import InvariantError
from .linalg import Matrix, solve, vec_iadd
from .tensor_basis import Cochain, flat_index, pair_index, pair_list, psi_iterate_basis, tensor_element

ONE = Fraction(1)


@lru_cache(maxsize=None)
def _comp_plan(m: int, i: int, n: int) -> tuple:
    """Slot bookkeeping for f <>_i g with output size d = m + n - 1.

    Returns (g_slots, f_specs): g_slots are the output slots forming g's
    b-block; f_specs gives, per b-slot of f, the output slots to multiply.
    """
    d = m + n - 1
    pidx = pair_index(d)
    g_slots = tuple(pidx[i + k1][i + k2] for k1, k2 in pair_list(n))
    specs = []
    for k1, k2 in pair_list(m):
        if k2 < i:
            specs.append((pidx[k1][k2],))
        elif k1 < i and k2 == i:
            specs.append(tuple(pidx[k1][j] for j in range(i, i + n)))
        elif k1 < i:
            specs.append((pidx[k1][k2 + n - 1],))
        elif k1 == i:
            specs.append(tuple(pidx[r][k2 + n - 1] for r in range(i, i + n)))
        else:
            specs.append((pidx[k1 + n - 1][k2 + n - 1],))
    return g_slots, tuple(specs)


class CompContext:
    """Comp structure on the complex with coefficients in A itself."""

    def __init__(self, cx: SecondaryComplex):
        if cx.m.dim != cx.e.A.dim or cx.m.name != "regular":
            raise ValueError("comp operations need the regular bimodule M = A")
        self.cx = cx
        self.e = cx.e
        self._ops: dict = {}
        self._alpha = None

    @classmethod
    def of(cls, e, cap=None) -> "CompContext":
        return cls(SecondaryComplex(e) if cap is None else SecondaryComplex(e, cap=cap))

    # alpha
    @property
    def alpha(self) -> Cochain:
        if self._alpha is None:
            e = self.e
            A = e.A
            counit = e.C.counit

            def fn(c, a, b):
                if not counit[c]:
                    return {}
                v = A.mul(e.zeta_table[b[0]], A.mul_basis(a[0], a[1]))
                return {k: counit[c] * x for k, x in v.items()}

            self._alpha = self.cx.from_function(2, fn)
        return self._alpha

    # operators
    def comp_operator(self, m: int, i: int, n: int) -> dict:
        """Sparse description of <>_i on degrees (m, n); empty when i > m - 1."""
        key = (m, i, n)
        op = self._ops.get(key)
        if op is not None:
            return op
        op = {}
        if 0 <= i <= m - 1:
            op = self._build(m, i, n)
        self._ops[key] = op
        return op

    def _build(self, m: int, i: int, n: int) -> dict:
        e = self.e
        B = e.B
        d = m + n - 1
        cx = self.cx
        out_basis = cx.basis(d)
        f_rad = cx.basis(m).radices
        g_rad = cx.basis(n).radices
        dA = e.A.dim
        # r sits at diagonal position i of f's input
        stride = 1
        for radix in f_rad[2 + i :]:
            stride *= radix
        g_slots, f_specs = _comp_plan(m, i, n)
        coprod = e.C.table
        op: dict = {}
        for x, c, a, b in out_basis:
            bvecs = []
            dead = False
            for spec in f_specs:
                v = B.product_of_basis(tuple(b[s] for s in spec))
                if not v:
                    dead = True
                    break
                bvecs.append({k: val for k, val in v.items()})
            if dead:
                continue
            g_tail = a[i : i + n] + tuple(b[s] for s in g_slots)
            after = [{t: ONE} for t in a[i + n :]]
            terms = []
            for c1, c2, w1 in coprod[c]:
                for (a2, c3), w2 in psi_iterate_basis(e, c2, a[:i]).items():
                    z = flat_index(g_rad, (c3,) + g_tail)
                    factors = [{c1: ONE}] + [{t: ONE} for t in a2] + [{0: ONE}] + after + bvecs
                    for y0, wb in tensor_element(f_rad, factors).items():
                        w = w1 * w2 * wb
                        for r in range(dA):
                            terms.append((w, y0 + r * stride, z, r))
            if terms:
                op[x] = terms
        return op

    # concrete evaluation
    def comp(self, f: Cochain, i: int, g: Cochain) -> Cochain:
        m, n = f.degree, g.degree
        d = m + n - 1
        if d < 0 or i < 0 or i > m - 1:
            return self.cx.zero(max(d, 0))
        op = self.comp_operator(m, i, n)
        dA = self.e.A.dim
        out: dict = {}
        gv = g.support()
        fv = f.support()
        for x, terms in op.items():
            acc: dict = {}
            for w, y, z, r in terms:
                gz = gv.get(z)
                if not gz:
                    continue
                gr = gz.get(r)
                if not gr:
                    continue
                fy = fv.get(y)
                if fy:
                    vec_iadd(acc, fy, w * gr)
            base = x * dA
            for s, val in acc.items():
                out[base + s] = val
        return self.cx.cochain(d, out)

    def circ(self, f: Cochain, g: Cochain) -> Cochain:
        """f <> g = sum_i (-1)^{i(n-1)} f <>_i g."""
        m, n = f.degree, g.degree
        d = m + n - 1
        acc: dict = {}
        for i in range(m):
            sign = -1 if (i * (n - 1)) % 2 else 1
            vec_iadd(acc, self.comp(f, i, g).vec, sign)
        return self.cx.cochain(max(d, 0), acc)

    def bracket(self, f: Cochain, g: Cochain) -> Cochain:
        m, n = f.degree, g.degree
        sign = -1 if ((m - 1) * (n - 1)) % 2 else 1
        return self.circ(f, g) - self.circ(g, f).scale(sign) if m + n >= 1 else self.cx.zero(0)

    # cup products
    def cup(self, f: Cochain, g: Cochain) -> Cochain:
        return self._cup(f, g, twisted=False)

    def sqcup(self, f: Cochain, g: Cochain) -> Cochain:
        return self._cup(f, g, twisted=True)

    def _cup(self, f: Cochain, g: Cochain, twisted: bool) -> Cochain:
        e = self.e
        A = e.A
        cx = self.cx
        m, n = f.degree, g.degree
        d = m + n
        pidx = pair_index(d)
        x_slots = tuple(pidx[k][l] for k in range(m) for l in range(m, d))
        f_slots = tuple(pidx[k1][k2] for k1, k2 in pair_list(m))
        g_slots = tuple(pidx[m + k1][m + k2] for k1, k2 in pair_list(n))
        f_rad = cx.basis(m).radices
        g_rad = cx.basis(n).radices
        fv, gv = f.support(), g.support()
        dA = A.dim
        out: dict = {}
        for x, c, a, b in cx.basis(d):
            z = e.zeta_of_product(tuple(b[s] for s in x_slots))
            if not z:
                continue
            fb = tuple(b[s] for s in f_slots)
            gt = a[m:] + tuple(b[s] for s in g_slots)
            acc: dict = {}
            for c1, c2, w in e.C.table[c]:
                if not twisted:
                    for (a2, c3), w2 in psi_iterate_basis(e, c2, a[:m]).items():
                        fval = fv.get(flat_index(f_rad, (c1,) + a2 + fb))
                        if not fval:
                            continue
                        gval = gv.get(flat_index(g_rad, (c3,) + gt))
                        if not gval:
                            continue
                        vec_iadd(acc, A.mul(A.mul(z, fval), gval), w * w2)
                else:
                    fval = fv.get(flat_index(f_rad, (c2,) + a[:m] + fb))
                    if not fval:
                        continue
                    for (a2, c3), w2 in e.psi_vec(c1, fval).items():
                        gval = gv.get(flat_index(g_rad, (c3,) + gt))
                        if gval:
                            vec_iadd(acc, A.mul(A.mul(z, {a2: ONE}), gval), w * w2)
            base = x * dA
            for s, val in acc.items():
                out[base + s] = val
        return cx.cochain(d, out)

    def differential_via_comp(self, f: Cochain) -> Cochain:
        """(-1)^{m-1} alpha<>_0 f - sum_{i=1}^m (-1)^{i-1} f<>_{i-1} alpha + alpha<>_1 f."""
        m = f.degree
        al = self.alpha
        acc: dict = {}
        vec_iadd(acc, self.comp(al, 0, f).vec, -1 if (m - 1) % 2 else 1)
        for i in range(1, m + 1):
            vec_iadd(acc, self.comp(f, i - 1, al).vec, -1 if (i - 1) % 2 == 0 else 1)
        vec_iadd(acc, self.comp(al, 1, f).vec)
        return self.cx.cochain(m + 1, acc)

    # symbolic composites used by the axiom checks
    def _nested_left(self, m, i, n, j, p) -> dict:
        """(f <>_i g) <>_j h as {x: {(y_f, (z_g, r_g), (z_h, r_h)): coeff}}."""
        outer = self.comp_operator(m + n - 1, j, p)
        inner = self.comp_operator(m, i, n)
        res: dict = {}
        for x, terms in outer.items():
            acc: dict = {}
            for w, y, zh, rh in terms:
                for w2, y2, zg, rg in inner.get(y, ()):
                    key = (y2, (zg, rg), (zh, rh))
                    val = acc.get(key, 0) + w * w2
                    if val:
                        acc[key] = val
                    else:
                        del acc[key]
            if acc:
                res[x] = acc
        return res

    def _nested_swapped(self, m, j, p, k, n) -> dict:
        """(f <>_j h) <>_k g in the same key layout (y_f, g-key, h-key)."""
        outer = self.comp_operator(m + p - 1, k, n)
        inner = self.comp_operator(m, j, p)
        res: dict = {}
        for x, terms in outer.items():
            acc: dict = {}
            for w, y, zg, rg in terms:
                for w2, y2, zh, rh in inner.get(y, ()):
                    key = (y2, (zg, rg), (zh, rh))
                    val = acc.get(key, 0) + w * w2
                    if val:
                        acc[key] = val
                    else:
                        del acc[key]
            if acc:
                res[x] = acc
        return res

    def _nested_right(self, m, i, n, k, p) -> dict:
        """f <>_i (g <>_k h) in the same key layout."""
        outer = self.comp_operator(m, i, n + p - 1)
        inner = self.comp_operator(n, k, p)
        res: dict = {}
        for x, terms in outer.items():
            acc: dict = {}
            for w, y, z, r in terms:
                for w2, yg, zh, rh in inner.get(z, ()):
                    key = (y, (yg, r), (zh, rh))
                    val = acc.get(key, 0) + w * w2
                    if val:
                        acc[key] = val
                    else:
                        del acc[key]
            if acc:
                res[x] = acc
        return res


def _contract(sym: dict, slot: int, cochain: Cochain) -> dict:
    """Substitute a concrete cochain into the g (slot 1) or h (slot 2) position."""
    vals = cochain.support()
    res: dict = {}
    for x, terms in sym.items():
        acc: dict = {}
        for key, w in terms.items():
            z, r = key[slot]
            v = vals.get(z, {}).get(r)
            if not v:
                continue
            nk = key[:slot] + (None,) + key[slot + 1 :]
            val = acc.get(nk, 0) + w * v
            if val:
                acc[nk] = val
            else:
                del acc[nk]
        if acc:
            res[x] = acc
    return res


def _compare(lhs: dict, rhs: dict) -> Optional[tuple]:
    """None if equal, else a witness (x, key, lhs coeff, rhs coeff)."""
    for x in sorted(set(lhs) | set(rhs)):
        l, r = lhs.get(x, {}), rhs.get(x, {})
        if l != r:
            for key in sorted(set(l) | set(r), key=repr):
                if l.get(key, 0) != r.get(key, 0):
                    return (x, key, l.get(key, 0), r.get(key, 0))
    return None


def _fmt_witness(w) -> tuple:
    x, key, lv, rv = w
    return (x, repr(key), str(lv), str(rv))


# ---------------------------------------------------------------------------
# axiom reports


def check_weak_comp(ctx: CompContext, max_degree: int = 2) -> ValidationReport:
    """The four weak comp algebra axioms on whole bases, degrees <= max_degree."""
    rep = ValidationReport(f"weak comp axioms {ctx.e.name}")
    degs = range(max_degree + 1)
    rep.checks.append(_vanishing(ctx, degs))
    rep.checks.append(_axiom_nested(ctx, degs, "nested_composition"))
    rep.checks.append(_axiom_alpha_commutation(ctx, degs))
    rep.checks.append(_axiom_alpha(ctx))
    return rep


def _vanishing(ctx, degs) -> AxiomCheck:
    for m in degs:
        for n in degs:
            for i in range(m, m + n + 2):
                if ctx.comp_operator(m, i, n):
                    return AxiomCheck("vanishing_range", False, (m, i, n))
    return AxiomCheck("vanishing_range", True)


def _axiom_nested(ctx, degs, name) -> AxiomCheck:
    count = 0
    for m in degs:
        for n in degs:
            for p in degs:
                for i in range(m):
                    for j in range(i, n + i):
                        if m + n + p - 2 < 0:
                            continue
                        w = _compare(ctx._nested_left(m, i, n, j, p), ctx._nested_right(m, i, n, j - i, p))
                        count += 1
                        if w:
                            return AxiomCheck(name, False, (m, n, p, i, j) + _fmt_witness(w))
    return AxiomCheck(name, True, detail=f"{count} index cases")


def _axiom_alpha_commutation(ctx, degs) -> AxiomCheck:
    al = ctx.alpha
    count = 0
    for m in degs:
        for other in degs:
            # g = alpha (n = 2), h of degree p = other
            n, p = 2, other
            for i in range(m):
                for j in range(i):
                    lhs = _contract(ctx._nested_left(m, i, n, j, p), 1, al)
                    rhs = _contract(ctx._nested_swapped(m, j, p, i + p - 1, n), 1, al)
                    count += 1
                    w = _compare(lhs, rhs)
                    if w:
                        return AxiomCheck("alpha_commutation", False, ("g=alpha", m, p, i, j) + _fmt_witness(w))
            # h = alpha (p = 2), g of degree n = other
            n, p = other, 2
            for i in range(m):
                for j in range(i):
                    lhs = _contract(ctx._nested_left(m, i, n, j, p), 2, al)
                    rhs = _contract(ctx._nested_swapped(m, j, p, i + p - 1, n), 2, al)
                    count += 1
                    w = _compare(lhs, rhs)
                    if w:
                        return AxiomCheck("alpha_commutation", False, ("h=alpha", m, n, i, j) + _fmt_witness(w))
    return AxiomCheck("alpha_commutation", True, detail=f"{count} index cases")


def _axiom_alpha(ctx) -> AxiomCheck:
    al = ctx.alpha
    diff = ctx.comp(al, 0, al) - ctx.comp(al, 1, al)
    if diff.is_zero():
        return AxiomCheck("alpha_square", True)
    k = min(diff.vec)
    return AxiomCheck("alpha_square", False, (k, str(diff.vec[k])))


def check_comp_full(ctx: CompContext, max_degree: int = 2) -> ValidationReport:
    """All five comp algebra axioms on whole bases (meaningful when E = C)."""
    rep = ValidationReport(f"comp axioms {ctx.e.name}")
    degs = range(max_degree + 1)
    rep.checks.append(_vanishing(ctx, degs))
    rep.checks.append(_axiom_commutation_full(ctx, degs))
    rep.checks.append(_axiom_nested(ctx, degs, "nested_composition"))
    rep.checks.append(_axiom_far_commutation(ctx, degs))
    rep.checks.append(_axiom_alpha(ctx))
    return rep


def _axiom_commutation_full(ctx, degs) -> AxiomCheck:
    count = 0
    for m in degs:
        for n in degs:
            for p in degs:
                for i in range(m):
                    for j in range(i):
                        lhs = ctx._nested_left(m, i, n, j, p)
                        rhs = ctx._nested_swapped(m, j, p, i + p - 1, n)
                        count += 1
                        w = _compare(lhs, rhs)
                        if w:
                            return AxiomCheck("commutation", False, (m, n, p, i, j) + _fmt_witness(w))
    return AxiomCheck("commutation", True, detail=f"{count} index cases")


def _axiom_far_commutation(ctx, degs) -> AxiomCheck:
    count = 0
    for m in degs:
        for n in degs:
            for p in degs:
                d = m + n - 1
                for i in range(m):
                    for j in range(n + i, max(d, 0)):
                        k = j - n + 1
                        lhs = ctx._nested_left(m, i, n, j, p)
                        rhs = ctx._nested_swapped(m, k, p, i, n)
                        count += 1
                        w = _compare(lhs, rhs)
                        if w:
                            return AxiomCheck("far_commutation", False, (m, n, p, i, j) + _fmt_witness(w))
    return AxiomCheck("far_commutation", True, detail=f"{count} index cases")


def comp_axioms_on_samples(ctx: CompContext, samples: dict) -> ValidationReport:
    """The five comp axioms on concrete cochains; samples maps degree -> list."""
    rep = ValidationReport(f"comp axioms on samples {ctx.e.name}")
    degs = sorted(samples)
    fails = {"commutation": None, "nested_composition": None, "far_commutation": None}
    counts = dict.fromkeys(fails, 0)
    for m in degs:
        for n in degs:
            for p in degs:
                for f in samples[m]:
                    for g in samples[n]:
                        for h in samples[p]:
                            for i in range(m):
                                fg = ctx.comp(f, i, g)
                                for j in range(m + n - 1):
                                    lhs = ctx.comp(fg, j, h)
                                    if j < i:
                                        name = "commutation"
                                        rhs = ctx.comp(ctx.comp(f, j, h), i + p - 1, g)
                                    elif j < n + i:
                                        name = "nested_composition"
                                        rhs = ctx.comp(f, i, ctx.comp(g, j - i, h))
                                    else:
                                        name = "far_commutation"
                                        rhs = ctx.comp(ctx.comp(f, j - n + 1, h), i, g)
                                    counts[name] += 1
                                    if lhs != rhs and fails[name] is None:
                                        fails[name] = (m, n, p, i, j)
    rep.checks.append(_vanishing(ctx, degs))
    for name in ("commutation", "nested_composition", "far_commutation"):
        w = fails[name]
        rep.checks.append(AxiomCheck(name, w is None, w, f"{counts[name]} evaluations"))
    rep.checks.append(_axiom_alpha(ctx))
    return rep


# ---------------------------------------------------------------------------
# products on cohomology


@dataclass
class CupTable:
    degrees: tuple
    products: dict = field(default_factory=dict)  # (m, a, n, b) -> coordinates in H^{m+n}
    sign_relation: dict = field(default_factory=dict)  # (m, a, n, b) -> bool

    @property
    def sign_relation_holds(self) -> bool:
        return all(self.sign_relation.values())

    def to_dict(self) -> dict:
        return {
            "degrees": list(self.degrees),
            "products": [
                {"left": [m, a], "right": [n, b], "coords": [str(x) for x in coords]}
                for (m, a, n, b), coords in sorted(self.products.items())
            ],
            "sign_relation": [
                {"left": [m, a], "right": [n, b], "holds": ok} for (m, a, n, b), ok in sorted(self.sign_relation.items())
            ],
        }


def class_coordinates(cx: SecondaryComplex, reps: Sequence[Cochain], f: Cochain) -> Optional[list]:
    """Coordinates of the class of cocycle f in the basis given by reps."""
    n = f.degree
    cols = [r.vec for r in reps]
    if n > 0:
        cols += cx.differential(n - 1).columns()
    mat = Matrix.from_columns(cx.cochain_dim(n), cols)
    sol = solve(mat, f.vec)
    if sol is None:
        return None
    return [sol.get(k, Fraction(0)) for k in range(len(reps))]


def cohomology_cup(ctx: CompContext, max_degree: int) -> CupTable:
    cx = ctx.cx
    report = cohomology(cx, max_degree, with_representatives=True)
    reps = {d.degree: d.representatives for d in report.degrees}
    table = CupTable(report.betti)
    for m in range(max_degree + 1):
        for n in range(max_degree + 1 - m):
            for a, f in enumerate(reps[m]):
                for b, g in enumerate(reps[n]):
                    u = ctx.cup(f, g)
                    v = ctx.sqcup(g, f)
                    if not cx.apply(u).is_zero() or not cx.apply(v).is_zero():
                        raise InvariantError(f"cup of cocycles is not a cocycle in degrees {(m, n)}")
                    coords = class_coordinates(cx, reps[m + n], u)
                    if coords is None:
                        raise InvariantError("cup product class not expressible in representatives")
                    table.products[(m, a, n, b)] = coords
                    sign = -1 if (m * n) % 2 else 1
                    diff = u - v.scale(sign)
                    table.sign_relation[(m, a, n, b)] = cx.is_coboundary(diff) is not None
    return table
