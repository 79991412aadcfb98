import itertools
from fractions import Fraction

import pytest

from entcoh.comp import CompContext
from entcoh.complex import SecondaryComplex
from entcoh.equivariant import (
    alpha_membership,
    check_bicomodule,
    check_comp_axioms,
    comp_closure,
    comparison_rank,
    cup_coincidence_on_basis,
    equivariant_subspace,
    gerstenhaber_check,
    search_comp_counterexample,
    search_cup_counterexample,
    subcomplex_cohomology,
)
from entcoh.fixtures import fixture


def ctx_of(name):
    return CompContext.of(fixture(name))


def direct_equivariance_defect(e, f, n):
    """Evaluate (f (x) id) rho_R - psi (id (x) f) rho_L on every basis tensor."""
    dA, dC, dB = e.A.dim, e.C.dim, e.B.dim
    npairs = n * (n - 1) // 2
    radices = (dC,) + (dA,) * n + (dB,) * npairs

    def index(digits):
        k = 0
        for d, r in zip(digits, radices):
            k = k * r + d
        return k

    def fval(digits):
        y = index(digits)
        return {r: f.vec.get(y * dA + r, 0) for r in range(dA)}

    defect = []
    for digits in itertools.product(*(range(r) for r in radices)):
        c, a, b = digits[0], digits[1 : 1 + n], digits[1 + n :]
        out = {}
        for c1 in range(dC):
            for c2 in range(dC):
                w = e.C.comult[c][c1][c2]
                if not w:
                    continue
                # right: move c2 through a_1, ..., a_n
                states = {((), c2): Fraction(1)}
                for x in a:
                    nxt = {}
                    for (done, cc), v in states.items():
                        for x2 in range(dA):
                            for c3 in range(dC):
                                p = e.psi.psi[cc][x][x2][c3]
                                if p:
                                    key = (done + (x2,), c3)
                                    nxt[key] = nxt.get(key, 0) + v * p
                    states = nxt
                for (a2, c3), v in states.items():
                    for r, fx in fval((c1,) + a2 + b).items():
                        out[(r, c3)] = out.get((r, c3), 0) + w * v * fx
                # left: psi(c1 (x) f(c2 (x) M))
                for r, fx in fval((c2,) + a + b).items():
                    for r2 in range(dA):
                        for c3 in range(dC):
                            p = e.psi.psi[c1][r][r2][c3]
                            if p:
                                out[(r2, c3)] = out.get((r2, c3), 0) - w * fx * p
        defect.append({k: v for k, v in out.items() if v})
    return defect


@pytest.mark.parametrize("name", ["F2", "F3"])
def test_bicomodule_axioms(name):
    cx = SecondaryComplex(fixture(name))
    for n in range(3):
        rep = check_bicomodule(cx, n)
        assert rep.passed, rep.failures()


@pytest.mark.parametrize(
    "name,dims,full",
    [("F1", [2, 4, 8, 16], [2, 4, 8, 16]), ("F2", [2, 4, 8, 16], [4, 8, 16, 32]), ("F3", [4, 8, 32], [4, 8, 32])],
)
def test_equivariant_dimensions(name, dims, full):
    cx = SecondaryComplex(fixture(name))
    spaces = [equivariant_subspace(cx, n) for n in range(len(dims))]
    assert [s.dim for s in spaces] == dims
    assert [s.full_dim for s in spaces] == full


@pytest.mark.parametrize("n", [0, 1, 2])
def test_membership_agrees_with_direct_evaluation(n):
    e = fixture("F2")
    cx = SecondaryComplex(e)
    space = equivariant_subspace(cx, n)
    for f in space.basis_cochains(cx):
        assert not any(direct_equivariance_defect(e, f, n))
    for k in range(cx.cochain_dim(n)):
        f = cx.cochain(n, {k: Fraction(1)})
        assert space.contains(f) == (not any(direct_equivariance_defect(e, f, n)))


@pytest.mark.parametrize("name", ["F1", "F2", "F3"])
def test_alpha_is_equivariant_and_comp_closes(name):
    ctx = ctx_of(name)
    assert alpha_membership(ctx).passed
    assert comp_closure(ctx, pairs=6, max_degree=2, seed=3).passed


@pytest.mark.parametrize("name,betti", [("F1", (2, 1, 1)), ("F2", (1, 0, 0)), ("F3", (4, 0, 0))])
def test_subcomplex_is_stable_and_betti(name, betti):
    cx = SecondaryComplex(fixture(name))
    sub = subcomplex_cohomology(cx, 2, with_representatives=True)
    assert sub.report.betti == betti
    for n in range(3):
        for f in sub.spaces[n].basis_cochains(cx):
            assert sub.spaces[n + 1].contains(cx.apply(f))


def test_comparison_map_on_group_entwining():
    cx = SecondaryComplex(fixture("F2"))
    sub = subcomplex_cohomology(cx, 2, with_representatives=True)
    assert [comparison_rank(cx, sub, n) for n in range(3)] == [1, 0, 0]


@pytest.mark.parametrize("name", ["F0", "F2", "F3"])
def test_comp_axioms_on_equivariant_cochains(name):
    rep = check_comp_axioms(ctx_of(name), max_degree=2)
    assert rep.passed, rep.failures()


@pytest.mark.parametrize("name", ["F1", "F2", "F3"])
def test_cup_equals_sqcup_on_equivariant_basis(name):
    ctx = ctx_of(name)
    for m in range(3):
        for n in range(3 - m):
            res = cup_coincidence_on_basis(ctx, m, n)
            assert res.passed, res.witness
            assert res.checked > 0


def test_cup_and_comp_differ_outside_equivariant_part():
    ctx = ctx_of("F2")
    f, g = search_cup_counterexample(ctx, max_degree=1)
    assert ctx.cup(f, g) != ctx.sqcup(f, g)
    assert search_comp_counterexample(ctx, max_degree=2) is not None


def test_gerstenhaber_identities_on_dual_numbers():
    rep = gerstenhaber_check(ctx_of("F1"), max_degree=2)
    assert rep.betti == (2, 1, 1)
    assert rep.passed, {k: v for k, v in rep.checks.items() if not v[0]}
    assert set(rep.checks) == {
        "graded_commutativity",
        "bracket_antisymmetry",
        "bracket_is_cocycle",
        "graded_jacobi",
        "derivation",
    }
    assert all(v[1] > 0 for v in rep.checks.values())


def test_alternative_derivation_sign_is_refuted_on_dual_numbers():
    holds, cases, witness = gerstenhaber_check(ctx_of("F1"), max_degree=2).informational["derivation_sign_m(n+1)"]
    assert not holds and witness is not None


def test_gerstenhaber_on_grouplike_flip():
    assert gerstenhaber_check(ctx_of("F3"), max_degree=2).passed


def test_equivariant_counts_survive_relabelling_of_c():
    from entcoh.algebra import BEntwining, EntwiningMap, StructureCoalgebra

    e = fixture("F3")
    C = e.C
    sw = [1, 0]
    comult = [[[C.comult[sw[k]][sw[i]][sw[j]] for j in range(2)] for i in range(2)] for k in range(2)]
    C2 = StructureCoalgebra(2, comult, [C.counit[sw[k]] for k in range(2)])
    psi = [[[[e.psi.psi[sw[c]][a][a2][sw[c2]] for c2 in range(2)] for a2 in range(2)] for a in range(2)] for c in range(2)]
    e2 = BEntwining(e.A, e.B, C2, EntwiningMap(2, 2, psi), e.zeta, name="F3-relabelled")
    a = subcomplex_cohomology(SecondaryComplex(e), 2)
    b = subcomplex_cohomology(SecondaryComplex(e2), 2)
    assert [a.spaces[n].dim for n in sorted(a.spaces)] == [b.spaces[n].dim for n in sorted(b.spaces)]
    assert a.report.betti == b.report.betti
