"""Builders for the shipped example structures.

F0  A = B = C = Q, flip, zeta the unit map.
F1  A = Q[x]/(x^2), B = C = Q.
F2  A = C = Q[Z/2] (basis 1, g), psi(c (x) a) = a (x) ca on group elements, B = Q.
F3  A = B = Q[x]/(x^2), C two grouplike elements, flip, zeta = id.
"""

from __future__ import annotations

from .algebra import (
    BEntwining,
    EntwiningMap,
    StructureAlgebra,
    StructureCoalgebra,
    trivial_algebra,
    trivial_coalgebra,
    unit_map,
)


def truncated_polynomials(n: int) -> StructureAlgebra:
    """Q[x]/(x^n) on the basis 1, x, ..., x^{n-1}."""
    mult = [[[1 if i + j == k else 0 for k in range(n)] for j in range(n)] for i in range(n)]
    unit = [1] + [0] * (n - 1)
    return StructureAlgebra(n, mult, unit, name=f"Q[x]/(x^{n})")


def dual_numbers() -> StructureAlgebra:
    a = truncated_polynomials(2)
    return StructureAlgebra(a.dim, a.mult, a.unit, name="Q[x]/(x^2)")


def matrix_algebra(n: int) -> StructureAlgebra:
    """M_n(Q) on matrix units E_ij, index i*n + j."""
    d = n * n
    mult = [[[0] * d for _ in range(d)] for _ in range(d)]
    for i in range(n):
        for j in range(n):
            for l in range(n):
                mult[i * n + j][j * n + l][i * n + l] = 1
    unit = [1 if i % (n + 1) == 0 else 0 for i in range(d)]
    return StructureAlgebra(d, mult, unit, name=f"M{n}(Q)")


def cyclic_group_algebra(n: int) -> StructureAlgebra:
    mult = [[[1 if (i + j) % n == k else 0 for k in range(n)] for j in range(n)] for i in range(n)]
    return StructureAlgebra(n, mult, [1] + [0] * (n - 1), name=f"Q[Z/{n}]")


def grouplike_coalgebra(n: int) -> StructureCoalgebra:
    comult = [[[1 if i == j == k else 0 for j in range(n)] for i in range(n)] for k in range(n)]
    return StructureCoalgebra(n, comult, [1] * n, name=f"grouplike({n})")


def cyclic_group_coalgebra(n: int) -> StructureCoalgebra:
    c = grouplike_coalgebra(n)
    return StructureCoalgebra(c.dim, c.comult, c.counit, name=f"Q[Z/{n}]")


def identity_map(a: StructureAlgebra) -> list:
    return [[1 if i == j else 0 for j in range(a.dim)] for i in range(a.dim)]


def flip_entwining(A: StructureAlgebra, C: StructureCoalgebra, B: StructureAlgebra = None, zeta=None, name: str = "") -> BEntwining:
    """Any algebra and coalgebra with psi the tensor flip; B defaults to Q."""
    if B is None:
        B = trivial_algebra()
        zeta = unit_map(B, A)
    return BEntwining(A, B, C, EntwiningMap.flip(C.dim, A.dim), zeta, name=name or f"flip({A.name},{C.name})")


def group_entwining(n: int) -> BEntwining:
    """A = C = Q[Z/n], psi(h (x) g) = g (x) hg on group elements."""
    A = cyclic_group_algebra(n)
    C = cyclic_group_coalgebra(n)
    psi = [[[[0] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for c in range(n):
        for a in range(n):
            psi[c][a][a][(c + a) % n] = 1
    B = trivial_algebra()
    return BEntwining(A, B, C, EntwiningMap(n, n, psi), unit_map(B, A), name=f"group-entwining(Z/{n})")


def fixture_f0() -> BEntwining:
    return flip_entwining(trivial_algebra(), trivial_coalgebra(), name="F0")


def fixture_f1() -> BEntwining:
    return flip_entwining(dual_numbers(), trivial_coalgebra(), name="F1")


def fixture_f2() -> BEntwining:
    e = group_entwining(2)
    return BEntwining(e.A, e.B, e.C, e.psi, e.zeta, name="F2")


def fixture_f2_bad_zeta() -> BEntwining:
    """F2 with B = Q[Z/2] and zeta = id; zeta-compatibility fails."""
    e = group_entwining(2)
    return BEntwining(e.A, e.A, e.C, e.psi, identity_map(e.A), name="F2-zeta-id")


def fixture_f3() -> BEntwining:
    A = dual_numbers()
    return flip_entwining(A, grouplike_coalgebra(2), B=A, zeta=identity_map(A), name="F3")


def fixture_matrix2() -> BEntwining:
    return flip_entwining(matrix_algebra(2), trivial_coalgebra(), name="M2")


FIXTURES = {
    "F0": fixture_f0,
    "F1": fixture_f1,
    "F2": fixture_f2,
    "F3": fixture_f3,
    "M2": fixture_matrix2,
}


def fixture(name: str) -> BEntwining:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}") from None

