import itertools
from fractions import Fraction

import pytest

from entcoh.complex import SecondaryComplex
from entcoh.errors import PreconditionError
from entcoh.fixtures import fixture
from entcoh.hodge import (
    CONVENTIONS,
    GroupAlgebraElement,
    _commutes,
    action_matrix,
    basis_permutation,
    calibrate,
    calibrated_convention,
    check_hypotheses,
    eulerian_idempotents,
    hodge_decompose,
    oriented_family,
    projectors,
    require_hypotheses,
    sn_action,
)
from entcoh.linalg import Matrix


def convolve(x: dict, y: dict) -> dict:
    """Product in QS_n with (s t)(k) = s(t(k)); written independently of the library."""
    out = {}
    for s, a in x.items():
        for t, b in y.items():
            p = tuple(s[t[k]] for k in range(len(t)))
            out[p] = out.get(p, 0) + a * b
    return {p: v for p, v in out.items() if v}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("conv", CONVENTIONS)
def test_eulerian_family_by_exhaustive_arithmetic(n, conv):
    fam = [e.coeffs for e in oriented_family(n, conv)]
    assert len(fam) == n
    ident = {tuple(range(n)): Fraction(1)}
    total = {}
    for i, e in enumerate(fam):
        for j, f in enumerate(fam):
            prod = convolve(e, f)
            assert prod == (e if i == j else {}), (i, j)
        for p, x in e.items():
            total[p] = total.get(p, 0) + x
    assert {p: x for p, x in total.items() if x} == ident


def test_support_in_degree_four():
    support = set()
    for e in eulerian_idempotents(4):
        support |= set(e.coeffs)
    assert len(support) == 24


def test_small_families():
    (e1,) = eulerian_idempotents(1)
    assert e1 == GroupAlgebraElement.identity(1)
    half = Fraction(1, 2)
    fam = {frozenset(e.coeffs.items()) for e in eulerian_idempotents(2)}
    assert fam == {
        frozenset({((0, 1), half), ((1, 0), -half)}),
        frozenset({((0, 1), half), ((1, 0), half)}),
    }


def test_transposition_swaps_diagonal_and_keeps_b():
    cx = SecondaryComplex(fixture("F3"))
    basis = cx.basis(2)
    perm = basis_permutation(cx, 2, (1, 0))
    for x, c, a, b in basis:
        assert basis.unflatten(perm[x]) == basis.unflatten(basis.flatten((c, (a[1], a[0]), b)))


def test_action_is_a_left_action():
    cx = SecondaryComplex(fixture("F3"))
    perms = list(itertools.permutations(range(3)))
    g = lambda s: GroupAlgebraElement(3, {s: 1})  # noqa: E731
    for s in perms:
        for t in perms:
            assert action_matrix(cx, g(s) * g(t)) == action_matrix(cx, g(s)) @ action_matrix(cx, g(t))


def test_identity_acts_trivially():
    cx = SecondaryComplex(fixture("F3"))
    f = cx.cochain(2, {5: Fraction(3), 9: Fraction(-1)})
    assert sn_action(cx, (0, 1), f).vec == f.vec


def test_calibration_is_unique_and_stable():
    assert calibrated_convention() == "signed-inverse"
    assert calibrate(SecondaryComplex(fixture("F1"))) == "signed-inverse"


def test_low_degrees_do_not_separate_inverse_conventions():
    cx = SecondaryComplex(fixture("F1"))
    passing = [c for c in CONVENTIONS if all(_commutes(cx, n, c) is None for n in (1, 2))]
    assert len(passing) > 1


def test_projectors_commute_with_delta_on_grouplike_flip():
    cx = SecondaryComplex(fixture("F3"))
    conv = calibrated_convention()
    for n in range(3):
        assert _commutes(cx, n, conv) is None


def test_projectors_partition_identity():
    cx = SecondaryComplex(fixture("F3"))
    for n in range(4):
        total = Matrix.zero(cx.cochain_dim(n), cx.cochain_dim(n))
        for p in projectors(cx, n, calibrated_convention()):
            assert p @ p == p
            total = total + p
        assert total == Matrix.identity(cx.cochain_dim(n))


def test_dual_numbers_decomposition():
    rep = hodge_decompose(SecondaryComplex(fixture("F1")), 3)
    assert rep.betti[1] == [0, 1]
    assert rep.betti[2] == [0, 1, 0]
    assert rep.betti[3] == [0, 0, 1, 0]
    assert [rep.totals[n][1] for n in range(4)] == [2, 1, 1, 1]


def test_derivation_lies_in_first_summand():
    cx = SecondaryComplex(fixture("F1"))
    # D(1) = 0, D(x) = x
    d = cx.cochain(1, {1 * 2 + 1: Fraction(1)})
    assert cx.apply(d).is_zero()
    (_, p1) = projectors(cx, 1, calibrated_convention())
    assert p1.apply(d.vec) == d.vec
    assert cx.is_coboundary(d) is None


def test_grouplike_flip_partition_sums():
    rep = hodge_decompose(SecondaryComplex(fixture("F3")), 3)
    assert rep.dims[3] == [0, 80, 160, 16]
    for n in range(4):
        assert sum(rep.dims[n]) == rep.totals[n][0]
        assert sum(rep.betti[n]) == rep.totals[n][1]
    assert [rep.totals[n][1] for n in range(4)] == [4, 0, 0, 0]


def test_noncommutative_algebra_is_rejected():
    cx = SecondaryComplex(fixture("M2"))
    assert check_hypotheses(cx) == ["A_commutative", "Hom(C,M)_symmetric"]
    with pytest.raises(PreconditionError, match="A_commutative"):
        require_hypotheses(cx)


def test_nonsymmetric_hom_is_rejected():
    assert check_hypotheses(SecondaryComplex(fixture("F2"))) == ["Hom(C,M)_symmetric"]
