"""Symmetric group action on cochains, Eulerian idempotents, Hodge splitting.

Permutations are tuples in one-line notation, 0-based: sigma[k] is the image
of k.  Products compose right to left, (sigma tau)(k) = sigma(tau(k)).

sigma acts on a cochain by (sigma . f)(x) = f(sigma x), where sigma x has
diagonal entries a_{sigma(1)}, ..., a_{sigma(n)} and upper entry (k, l) equal
to b at the sorted pair {sigma(k), sigma(l)}.  This is a left action.

The Eulerian family comes from the generating polynomial

    sum_i e_n(i) t^i = sum_sigma binom(t - d(sigma) + n - 1, n) s(sigma) sigma

with d the number of descents and s either 1 ("plain") or the sign
("signed").  An "-inverse" convention additionally replaces each sigma by
sigma^{-1}, which changes nothing for n <= 2 but matters from n = 3 on.
Which convention intertwines the differential is decided by calibration on
the dual numbers, where exactly one of the four does through degree 3.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Mapping, Optional

from .algebra import hom_cm_bimodule, is_symmetric_bimodule
from .complex import SecondaryComplex
from .errors import InvariantError, PreconditionError
from .linalg import Matrix, rank, rank_of_vectors, vec_iadd
from .tensor_basis import pair_index, pair_list

GENERATORS = ("plain", "signed")
CONVENTIONS = ("plain", "signed", "plain-inverse", "signed-inverse")


# ---------------------------------------------------------------------------
# permutations and the group algebra


def compose(s: tuple, t: tuple) -> tuple:
    return tuple(s[k] for k in t)


def inverse(s: tuple) -> tuple:
    out = [0] * len(s)
    for k, v in enumerate(s):
        out[v] = k
    return tuple(out)


def descents(s: tuple) -> int:
    return sum(1 for k in range(len(s) - 1) if s[k] > s[k + 1])


def sign(s: tuple) -> int:
    seen = [False] * len(s)
    parity = 0
    for k in range(len(s)):
        if not seen[k]:
            j, length = k, 0
            while not seen[j]:
                seen[j] = True
                j = s[j]
                length += 1
            parity += length - 1
    return -1 if parity % 2 else 1


class GroupAlgebraElement:
    """Finitely supported rational combination of permutations of {0..n-1}."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Optional[Mapping] = None):
        self.n = n
        clean = {}
        for p, x in (coeffs or {}).items():
            p = tuple(p)
            if sorted(p) != list(range(n)):
                raise ValueError(f"{p} is not a permutation of {n} letters")
            if x:
                clean[p] = Fraction(x)
        self.coeffs = clean

    @classmethod
    def identity(cls, n: int) -> "GroupAlgebraElement":
        return cls(n, {tuple(range(n)): 1})

    @classmethod
    def zero(cls, n: int) -> "GroupAlgebraElement":
        return cls(n)

    def __add__(self, other):
        acc = dict(self.coeffs)
        vec_iadd(acc, other.coeffs)
        return GroupAlgebraElement(self.n, acc)

    def __sub__(self, other):
        acc = dict(self.coeffs)
        vec_iadd(acc, other.coeffs, -1)
        return GroupAlgebraElement(self.n, acc)

    def scale(self, s) -> "GroupAlgebraElement":
        return GroupAlgebraElement(self.n, {p: s * x for p, x in self.coeffs.items()})

    def __mul__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        if self.n != other.n:
            raise ValueError("group algebra elements of different rank")
        acc: dict = {}
        for s, x in self.coeffs.items():
            for t, y in other.coeffs.items():
                p = compose(s, t)
                v = acc.get(p, 0) + x * y
                if v:
                    acc[p] = v
                else:
                    acc.pop(p, None)
        return GroupAlgebraElement(self.n, acc)

    def __eq__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.coeffs

    def twisted(self) -> "GroupAlgebraElement":
        """Image under the sign automorphism sigma -> sgn(sigma) sigma."""
        return GroupAlgebraElement(self.n, {p: sign(p) * x for p, x in self.coeffs.items()})

    def to_dict(self) -> dict:
        return {" ".join(str(k + 1) for k in p): str(x) for p, x in sorted(self.coeffs.items())}

    def __repr__(self) -> str:
        return f"GroupAlgebraElement(n={self.n}, support={len(self.coeffs)})"


def _binom_poly(shift: int, n: int) -> list:
    """Coefficients in t of binom(t + shift, n) = prod_{k<n} (t + shift - k) / n!."""
    poly = [Fraction(1)]
    for k in range(n):
        c = shift - k
        nxt = [Fraction(0)] * (len(poly) + 1)
        for i, x in enumerate(poly):
            nxt[i] += x * c
            nxt[i + 1] += x
        poly = nxt
    f = factorial(n)
    return [x / f for x in poly]


@lru_cache(maxsize=None)
def eulerian_idempotents(n: int, convention: str = "plain") -> tuple:
    """e_n(1), ..., e_n(n); verified to be a complete orthogonal family."""
    if n < 1:
        raise ValueError("Eulerian idempotents need n >= 1")
    if convention not in GENERATORS:
        raise ValueError(f"unknown generating convention {convention!r}")
    coeffs = [dict() for _ in range(n + 1)]
    for s in itertools.permutations(range(n)):
        poly = _binom_poly(n - 1 - descents(s), n)
        tw = sign(s) if convention == "signed" else 1
        for i, x in enumerate(poly):
            if x:
                coeffs[i][s] = x * tw
    if any(coeffs[0].values()):
        raise InvariantError("Eulerian generating polynomial has a constant term")
    family = tuple(GroupAlgebraElement(n, coeffs[i]) for i in range(1, n + 1))
    problem = verify_family(family)
    if problem:
        raise InvariantError(f"Eulerian family for n={n} fails: {problem}")
    return family


def verify_family(family) -> Optional[str]:
    """None when the elements are orthogonal idempotents summing to 1."""
    n = family[0].n
    total = GroupAlgebraElement.zero(n)
    for i, e in enumerate(family):
        total = total + e
        for j, f in enumerate(family):
            prod = e * f
            if i == j and prod != e:
                return f"e({i + 1}) is not idempotent"
            if i != j and not prod.is_zero():
                return f"e({i + 1}) e({j + 1}) != 0"
    if total != GroupAlgebraElement.identity(n):
        return "the family does not sum to the identity"
    return None


def oriented_family(n: int, convention: str) -> tuple:
    """The Eulerian family for one of CONVENTIONS."""
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    base, _, inv = convention.partition("-")
    family = eulerian_idempotents(n, base)
    if inv:
        family = tuple(GroupAlgebraElement(n, {inverse(p): x for p, x in e.coeffs.items()}) for e in family)
        problem = verify_family(family)
        if problem:
            raise InvariantError(f"inverted Eulerian family for n={n} fails: {problem}")
    return family


# ---------------------------------------------------------------------------
# action on cochains


@lru_cache(maxsize=None)
def _pair_perm(n: int, s: tuple) -> tuple:
    """For each b-slot (k, l) of sigma x, the slot of x it reads."""
    pidx = pair_index(n)
    out = []
    for k, l in pair_list(n):
        u, v = s[k], s[l]
        out.append(pidx[min(u, v)][max(u, v)])
    return tuple(out)


def basis_permutation(cx: SecondaryComplex, n: int, s: tuple) -> list:
    """perm[x] = flat index of sigma x."""
    basis = cx.basis(n)
    slots = _pair_perm(n, s)
    rad = basis.radices
    out = []
    for x, c, a, b in basis:
        digits = (c,) + tuple(a[s[k]] for k in range(n)) + tuple(b[j] for j in slots)
        k = 0
        for d, r in zip(digits, rad):
            k = k * r + d
        out.append(k)
    return out


def action_matrix(cx: SecondaryComplex, elem: GroupAlgebraElement) -> Matrix:
    """Matrix of f -> elem . f on the coefficient space of C^n."""
    n = elem.n
    dM = cx.m.dim
    rows: dict = {}
    for s, w in elem.coeffs.items():
        perm = basis_permutation(cx, n, s)
        for x, y in enumerate(perm):
            for r in range(dM):
                row = rows.setdefault(x * dM + r, {})
                col = y * dM + r
                v = row.get(col, 0) + w
                if v:
                    row[col] = v
                else:
                    row.pop(col, None)
    rows = {k: v for k, v in rows.items() if v}
    dim = cx.cochain_dim(n)
    return Matrix(dim, dim, rows)


def sn_action(cx: SecondaryComplex, s, f):
    """sigma . f for a permutation tuple or a group algebra element."""
    elem = s if isinstance(s, GroupAlgebraElement) else GroupAlgebraElement(f.degree, {tuple(s): 1})
    if elem.n != f.degree:
        raise ValueError("permutation rank differs from cochain degree")
    return f.like(action_matrix(cx, elem).apply(f.vec))


# ---------------------------------------------------------------------------
# hypotheses, calibration and the decomposition


def check_hypotheses(cx: SecondaryComplex) -> list:
    """Names of the failing hypotheses (empty when the decomposition applies)."""
    failing = []
    if not cx.e.A.is_commutative():
        failing.append("A_commutative")
    if not is_symmetric_bimodule(hom_cm_bimodule(cx.e, cx.m)).passed:
        failing.append("Hom(C,M)_symmetric")
    return failing


def require_hypotheses(cx: SecondaryComplex) -> None:
    failing = check_hypotheses(cx)
    if failing:
        raise PreconditionError(f"Hodge decomposition needs {', '.join(failing)}; failing: {failing[0]}")


def projectors(cx: SecondaryComplex, n: int, convention: str) -> list:
    """P_{n,i} for i = 0..n (degree 0 has the single summand i = 0)."""
    dim = cx.cochain_dim(n)
    if n == 0:
        return [Matrix.identity(dim)]
    family = oriented_family(n, convention)
    return [Matrix.zero(dim, dim)] + [action_matrix(cx, e) for e in family]


def _commutes(cx: SecondaryComplex, n: int, convention: str) -> Optional[int]:
    """First index i where delta P_{n,i} != P_{n+1,i} delta, else None."""
    d = cx.differential(n)
    lo = projectors(cx, n, convention)
    hi = projectors(cx, n + 1, convention)
    for i in range(n + 2):
        left = d @ lo[i] if i < len(lo) else Matrix.zero(d.nrows, d.ncols)
        if left != hi[i] @ d:
            return i
    return None


def _reference_complex() -> SecondaryComplex:
    from .fixtures import fixture_f1

    return SecondaryComplex(fixture_f1())


@lru_cache(maxsize=None)
def _reference_convention(degrees: tuple) -> str:
    return calibrate(_reference_complex(), degrees)


def calibrate(cx: SecondaryComplex, degrees=(1, 2, 3)) -> str:
    """The unique convention whose projectors commute with delta in the given degrees."""
    passing = [conv for conv in CONVENTIONS if all(_commutes(cx, n, conv) is None for n in degrees)]
    if len(passing) != 1:
        raise InvariantError(f"Eulerian calibration is not conclusive: passing conventions {passing}")
    return passing[0]


def calibrated_convention() -> str:
    """Convention fixed once on the dual numbers, degrees 1..3."""
    return _reference_convention((1, 2, 3))


@dataclass
class HodgeReport:
    label: str
    convention: str
    dims: dict = field(default_factory=dict)  # n -> [dim e_n(i) C^n for i = 0..n]
    betti: dict = field(default_factory=dict)  # n -> [betti_i(n) for i = 0..n]
    totals: dict = field(default_factory=dict)  # n -> (dim C^n, betti(n))

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "convention": self.convention,
            "degrees": [
                {"n": n, "dim": self.totals[n][0], "betti": self.totals[n][1],
                 "summand_dims": self.dims[n], "summand_betti": self.betti[n]}
                for n in sorted(self.dims)
            ],
        }


def hodge_decompose(cx: SecondaryComplex, max_degree: int, convention: Optional[str] = None) -> HodgeReport:
    require_hypotheses(cx)
    conv = convention or calibrated_convention()
    rep = HodgeReport(cx.e.name, conv)
    prev_ranks = [0]  # rank of delta^{n-1} restricted to each summand
    prev_total = 0
    for n in range(max_degree + 1):
        d = cx.differential(n)
        bad = _commutes(cx, n, conv)
        if bad is not None:
            raise InvariantError(f"projector {bad} in degree {n} does not commute with delta")
        projs = projectors(cx, n, conv)
        dims, ranks = [], []
        for P in projs:
            cols = P.columns()
            dims.append(rank_of_vectors(cols, P.nrows))
            ranks.append(rank_of_vectors([d.apply(c) for c in cols], d.nrows))
        dim = cx.cochain_dim(n)
        total_rank = rank(d)
        if sum(dims) != dim:
            raise InvariantError(f"summand dimensions in degree {n} do not add up")
        if sum(ranks) != total_rank:
            raise InvariantError(f"summand ranks in degree {n} do not add up")
        bettis = [dims[i] - ranks[i] - (prev_ranks[i] if i < len(prev_ranks) else 0) for i in range(len(dims))]
        betti = dim - total_rank - prev_total
        if sum(bettis) != betti or min(bettis) < 0:
            raise InvariantError(f"summand betti numbers in degree {n} do not add up")
        rep.dims[n] = dims
        rep.betti[n] = bettis
        rep.totals[n] = (dim, betti)
        prev_ranks = ranks
        prev_total = total_rank
    return rep
