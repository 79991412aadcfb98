import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from entcoh.algebra import StructureAlgebra, StructureCoalgebra, trivial_algebra
from entcoh.fixtures import (
    cyclic_group_algebra,
    dual_numbers,
    fixture,
    matrix_algebra,
    truncated_polynomials,
)

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.large_base_example, HealthCheck.data_too_large])
settings.load_profile("default")


@pytest.fixture(scope="session")
def F0():
    return fixture("F0")


@pytest.fixture(scope="session")
def F1():
    return fixture("F1")


@pytest.fixture(scope="session")
def F2():
    return fixture("F2")


@pytest.fixture(scope="session")
def F3():
    return fixture("F3")


# ---------------------------------------------------------------------------
# random small structures: catalogue entries moved to a random basis


def _inverse(P):
    n = len(P)
    m = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(P)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def transport_algebra(A, P, Q):
    """Structure constants of A in the basis f_i = sum_j P[j][i] e_j (Q = P^-1)."""
    d = A.dim
    mult = [[[Fraction(0)] * d for _ in range(d)] for _ in range(d)]
    for i in range(d):
        for j in range(d):
            for a in range(d):
                for b in range(d):
                    w = P[a][i] * P[b][j]
                    if w:
                        for k in range(d):
                            x = A.mult[a][b][k]
                            if x:
                                for l in range(d):
                                    mult[i][j][l] += w * x * Q[l][k]
    unit = [sum(Q[l][k] * A.unit[k] for k in range(d)) for l in range(d)]
    return StructureAlgebra(d, mult, unit, name=A.name + "'")


def dual_coalgebra(A):
    """A^*: Delta(e^k) = sum_ij mult[i][j][k] e^i (x) e^j, eps(e^k) = unit[k]."""
    d = A.dim
    comult = [[[A.mult[i][j][k] for j in range(d)] for i in range(d)] for k in range(d)]
    return StructureCoalgebra(d, comult, list(A.unit), name=f"dual({A.name})")


CATALOGUE = [
    trivial_algebra,
    dual_numbers,
    lambda: truncated_polynomials(3),
    lambda: cyclic_group_algebra(2),
    lambda: cyclic_group_algebra(3),
    lambda: matrix_algebra(2),
]


@st.composite
def small_algebras(draw, max_dim=4, commutative=False):
    entries = [f for f in CATALOGUE]
    A = draw(st.sampled_from(entries))()
    if A.dim > max_dim or (commutative and not A.is_commutative()):
        A = dual_numbers()
    d = A.dim
    while True:
        P = [[Fraction(draw(st.integers(-2, 2))) for _ in range(d)] for _ in range(d)]
        Q = _inverse(P)
        if Q is not None:
            break
    return transport_algebra(A, P, Q)


@st.composite
def small_coalgebras(draw, max_dim=3):
    A = draw(small_algebras(max_dim=max_dim))
    return dual_coalgebra(A)


# ---------------------------------------------------------------------------
# one PASS/FAIL line per acceptance criterion in the terminal summary

_CRITERIA = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.outcome != "passed":
        prev = _CRITERIA.get(name, "PASS")
        _CRITERIA[name] = "PASS" if report.passed and prev == "PASS" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda s: int(s.split("_")[2])):
        num = name.split("_")[2]
        label = " ".join(name.split("_")[3:])
        terminalreporter.write_line(f"criterion {num} ({label}): {_CRITERIA[name]}")
