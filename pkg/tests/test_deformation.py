import random
from fractions import Fraction

import pytest

from entcoh.algebra import Bimodule, validate_bimodule
from entcoh.complex import SecondaryComplex, cohomology
from entcoh.deformation import (
    Bicomplex,
    DeformationJet,
    assemble_bicomplex,
    check_D_squared,
    checked_jet,
    cocycle_space,
    direct_h2_dimension,
    dumps_jet,
    equivalence_coboundary,
    equivalence_difference,
    first_violation,
    is_infinitesimal,
    lift_jet,
    loads_jet,
    obstruction,
    obstruction_components,
    random_cocycle,
    residuals,
    total_cohomology,
    twisted_coefficients,
)
from entcoh.errors import ValidationError
from entcoh.fixtures import fixture
from entcoh.linalg import Matrix, rank_of_vectors, vec_iadd


@pytest.fixture(scope="module")
def bx2():
    return assemble_bicomplex(fixture("F2"), 4)


def components(bx, vec):
    parts = bx.split(2, vec)
    return parts[(2, 0)], parts[(1, 1)], parts[(0, 2)]


def tot1(bx, alpha, gamma):
    return bx.join(1, {(1, 0): alpha, (0, 1): gamma})


def neg(v):
    return {k: -x for k, x in v.items()}


# ---------------------------------------------------------------------------
# coefficients and the double complex


@pytest.mark.parametrize("name", ["F2", "F3"])
def test_twisted_coefficients_are_bimodules(name):
    e = fixture(name)
    for n in (1, 2):
        assert validate_bimodule(twisted_coefficients(e, n), e.A, e).passed


def test_flip_twisted_action_is_untwisted(F3):
    # for the flip, a'.(a (x) c).a'' = a'aa'' (x) c, i.e. n copies of the regular bimodule
    m = twisted_coefficients(F3, 1)
    reg = Bimodule.regular(F3.A)
    dC = F3.C.dim
    for a in range(2):
        for r in range(2):
            for c in range(dC):
                got = m.right_table[a][r * dC + c]
                assert got == {k * dC + c: x for k, x in reg.right_table[a][r].items()}


def test_trivial_coalgebra_vertical_pattern(F0):
    bx = Bicomplex(F0)
    assert [bx.cartier(n).to_dense() for n in (1, 2, 3)] == [[[1]], [[0]], [[1]]]
    assert bx.vertical(1, 1).to_dense() == [[1]]
    assert bx.vertical(1, 2).to_dense() == [[0]]


def test_all_cells_square_zero_and_anticommute(bx2):
    for p in range(1, 5):
        for m, n in bx2.components(p):
            assert bx2.check_anticommutation(m, n), (m, n)
            if p <= 3:
                assert bx2.check_squares(m, n) == (True, True), (m, n)


def test_total_differential_squares_to_zero(bx2):
    for p in range(0, 4):
        assert check_D_squared(bx2, p)


def test_edge_maps_are_chain_maps(bx2):
    for p in range(1, 4):
        for m, n in bx2.components(p):
            assert all(bx2.check_edge_maps(m, n).values())


def test_corner_signs(bx2):
    # d_v on the bottom row is (-1)^m delta-bar j, d_h on the left column is delta j-bar
    assert bx2.d_v(3, 0) == (bx2.vertical(3, 0) @ bx2.j(3)).scale(-1)
    assert bx2.d_h(0, 2) == bx2.complex_with(2).differential(0) @ bx2.j_bar(2)
    assert bx2.d_h(1, 1) == bx2.horizontal(1, 1).scale(-1)
    assert bx2.d_v(2, 1) == bx2.vertical(2, 1)


def test_trivial_coalgebra_matches_staic_betti(F1):
    tc = total_cohomology(assemble_bicomplex(F1, 3), 3)
    staic = cohomology(SecondaryComplex(F1), 3).betti
    assert tc.betti[1:] == list(staic[1:])


@pytest.mark.parametrize("name,betti", [("F0", [0, 0, 0, 0]), ("F1", [0, 1, 1, 1]), ("F2", [0, 0, 1, 0])])
def test_total_betti(name, betti):
    assert total_cohomology(Bicomplex(fixture(name)), 3).betti == betti


def test_total_betti_invariant_under_basis_permutation(F3):
    # relabel the two grouplike elements of C
    from entcoh.algebra import BEntwining, EntwiningMap, StructureCoalgebra

    C = F3.C
    sw = [1, 0]
    comult = [[[C.comult[sw[k]][sw[i]][sw[j]] for j in range(2)] for i in range(2)] for k in range(2)]
    C2 = StructureCoalgebra(2, comult, [C.counit[sw[k]] for k in range(2)])
    e2 = BEntwining(F3.A, F3.B, C2, EntwiningMap.flip(2, 2), F3.zeta)
    assert total_cohomology(Bicomplex(F3), 2).betti == total_cohomology(Bicomplex(e2), 2).betti


@pytest.mark.parametrize("name", ["F0", "F1", "F2", "F3"])
def test_h2_counts_agree(name):
    bx = Bicomplex(fixture(name))
    assert direct_h2_dimension(bx) == total_cohomology(bx, 2).betti[2]


# ---------------------------------------------------------------------------
# infinitesimal deformations


def test_every_2_cocycle_passes_componentwise(bx2):
    for v in cocycle_space(bx2).basis:
        rep = is_infinitesimal(bx2, *components(bx2, v))
        assert rep.passed and rep.agrees_with_total


def test_componentwise_and_total_agree_on_noncocycles(bx2):
    rng = random.Random(5)
    dim = bx2.tot_dim(2)
    for _ in range(10):
        v = {k: Fraction(rng.randint(-2, 2)) for k in range(dim) if rng.random() < 0.3}
        rep = is_infinitesimal(bx2, *components(bx2, {k: x for k, x in v.items() if x}))
        assert rep.agrees_with_total


def test_zero_and_coboundary_triples(bx2):
    assert is_infinitesimal(bx2, {}, {}, {}).passed
    cob = bx2.D(1).apply({0: Fraction(1), 3: Fraction(-2)})
    assert is_infinitesimal(bx2, *components(bx2, cob)).passed


def test_order_one_associativity_is_the_staic_cocycle_condition(F3):
    bx = Bicomplex(F3)
    rng = random.Random(2)
    dim = bx.cell_dim(2, 0)
    for _ in range(5):
        mu = {k: Fraction(rng.randint(-2, 2)) for k in range(dim)}
        mu = {k: x for k, x in mu.items() if x}
        jet = DeformationJet(1, [mu], [{}], [{}])
        assoc = residuals(bx, jet, 1)["associativity"]
        assert assoc == neg(bx.staic.differential(2).apply(mu))


# ---------------------------------------------------------------------------
# obstructions and lifting


@pytest.mark.parametrize("name", ["F1", "F2", "F3"])
def test_obstruction_is_a_cocycle(name):
    bx = Bicomplex(fixture(name))
    rng = random.Random(9)
    for _ in range(3):
        jet = DeformationJet.from_cocycle(bx, random_cocycle(bx, rng))
        assert bx.D(3).apply(obstruction(bx, jet)) == {}
        res = lift_jet(bx, jet)
        if res.lifted:
            assert bx.D(3).apply(obstruction(bx, res.jet)) == {}


def test_zero_jet_has_zero_obstruction(bx2):
    jet = DeformationJet(2, [{}, {}], [{}, {}], [{}, {}])
    assert obstruction(bx2, jet) == {}


def test_second_order_obstruction_by_hand(F2):
    bx = Bicomplex(F2)
    jet = DeformationJet.from_cocycle(bx, random_cocycle(bx, random.Random(4)))
    (d1,) = jet.delta
    dC = F2.C.dim
    # (Delta^1 (x) C) Delta^1 - (C (x) Delta^1) Delta^1, written out densely
    expected = {}
    for c in range(dC):
        for i in range(dC):
            for j in range(dC):
                w = d1.get(c * dC * dC + i * dC + j, 0)
                if not w:
                    continue
                for k in range(dC):
                    for l in range(dC):
                        x = d1.get(i * dC * dC + k * dC + l, 0)
                        key = c * dC**3 + (k * dC + l) * dC + j
                        expected[key] = expected.get(key, 0) + w * x
                        y = d1.get(j * dC * dC + k * dC + l, 0)
                        key = c * dC**3 + (i * dC + k) * dC + l
                        expected[key] = expected.get(key, 0) - w * y
    assert obstruction_components(bx, jet)[(0, 3)] == {k: v for k, v in expected.items() if v}


def test_every_cocycle_lifts_to_order_four_on_trivial_structure(F0):
    bx = Bicomplex(F0)
    assert total_cohomology(bx, 3).betti[3] == 0
    for v in cocycle_space(bx).basis:
        jet = DeformationJet.from_cocycle(bx, v)
        while jet.order < 4:
            res = lift_jet(bx, jet)
            assert res.lifted
            jet = res.jet
        assert first_violation(bx, jet) is None
        checked_jet(bx, jet)


def test_lifting_succeeds_exactly_when_obstruction_is_a_coboundary(bx2):
    rng = random.Random(1)
    images = bx2.D(2).columns()
    base = rank_of_vectors(images, bx2.tot_dim(3))
    for _ in range(3):
        jet = DeformationJet.from_cocycle(bx2, random_cocycle(bx2, rng))
        res = lift_jet(bx2, jet)
        in_image = rank_of_vectors(list(images) + [res.obstruction], bx2.tot_dim(3)) == base
        assert res.lifted == in_image


def test_lifts_are_not_unique(bx2):
    rng = random.Random(8)
    jet = DeformationJet.from_cocycle(bx2, random_cocycle(bx2, rng))
    free = random_cocycle(bx2, rng)
    a = lift_jet(bx2, jet)
    b = lift_jet(bx2, jet, free=free)
    assert a.lifted and b.lifted
    assert first_violation(bx2, a.jet) is None and first_violation(bx2, b.jet) is None
    diff = dict(b.jet.order_vector(bx2, 2))
    vec_iadd(diff, a.jet.order_vector(bx2, 2), -1)
    assert bx2.D(2).apply(diff) == {}


def test_invalid_jet_names_the_equation(F3):
    bx = Bicomplex(F3)
    mu = {0: Fraction(1)}
    jet = DeformationJet(1, [mu], [{}], [{}])
    with pytest.raises(ValidationError, match="associativity at order 1"):
        obstruction(bx, jet)
    with pytest.raises(ValidationError):
        checked_jet(bx, DeformationJet(1, [{10**6: Fraction(1)}], [{}], [{}]))


# ---------------------------------------------------------------------------
# equivalences


def test_equivalence_difference_is_minus_D(bx2):
    rng = random.Random(3)
    for _ in range(5):
        alpha = {k: Fraction(rng.randint(-2, 2)) for k in range(4)}
        gamma = {k: Fraction(rng.randint(-2, 2)) for k in range(4)}
        alpha = {k: x for k, x in alpha.items() if x}
        gamma = {k: x for k, x in gamma.items() if x}
        assert equivalence_difference(bx2, alpha, gamma) == bx2.D(1).apply(tot1(bx2, neg(alpha), neg(gamma)))


def test_self_equivalence(bx2):
    v = random_cocycle(bx2, random.Random(0))
    pair = equivalence_coboundary(bx2, v, v)
    assert pair is not None
    assert bx2.D(1).apply(tot1(bx2, pair.alpha1, pair.gamma1)) == {}


def test_equivalence_roundtrip(bx2):
    rng = random.Random(12)
    for _ in range(5):
        v = random_cocycle(bx2, rng)
        alpha = {k: Fraction(rng.randint(-3, 3)) for k in range(4)}
        gamma = {k: Fraction(rng.randint(-3, 3)) for k in range(4)}
        w = dict(v)
        vec_iadd(w, equivalence_difference(bx2, alpha, gamma), -1)
        pair = equivalence_coboundary(bx2, v, w)
        assert pair is not None
        diff = dict(v)
        vec_iadd(diff, w, -1)
        assert equivalence_difference(bx2, pair.alpha1, pair.gamma1) == diff


def test_distinct_classes_are_not_equivalent(bx2):
    reps = [v for v in cocycle_space(bx2).basis if equivalence_coboundary(bx2, v, {}) is None]
    assert reps, "H^2 is nonzero here, so some cocycle is not a coboundary"
    assert equivalence_coboundary(bx2, reps[0], {}) is None


# ---------------------------------------------------------------------------


def test_jet_json_roundtrip(F2):
    bx = Bicomplex(F2)
    jet = DeformationJet.from_cocycle(bx, random_cocycle(bx, random.Random(6)))
    jet = lift_jet(bx, jet).jet
    text = dumps_jet(F2, jet)
    back = loads_jet(F2, text)
    assert (back.mu, back.psi, back.delta) == (jet.mu, jet.psi, jet.delta)
    assert dumps_jet(F2, back) == text


def test_jet_shape_invariant():
    with pytest.raises(ValueError):
        DeformationJet(2, [{}], [{}], [{}])


def test_block_matrix_shape(bx2):
    D = bx2.D(2)
    assert isinstance(D, Matrix)
    assert D.shape == (bx2.tot_dim(3), bx2.tot_dim(2))
