"""Independent reference implementations used to cross-check the library.

Everything here works on dense nested lists of Fractions and plain
itertools enumeration; nothing is shared with the sparse machinery of the
package except the raw structure constants.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

Z = Fraction(0)


def _mult(A, x, y):
    """Product of two dense vectors in A."""
    d = A.dim
    out = [Z] * d
    for i in range(d):
        if x[i]:
            for j in range(d):
                if y[j]:
                    for k in range(d):
                        out[k] += x[i] * y[j] * A.mult[i][j][k]
    return out


def _e(d, i):
    v = [Z] * d
    v[i] = Fraction(1)
    return v


def bar_differential(A, n):
    """Classical Hochschild differential Hom(A^n, A) -> Hom(A^{n+1}, A), dense.

    Column index: lex(a_1..a_n) * dA + r, row index: lex(a_1..a_{n+1}) * dA + r.
    """
    d = A.dim
    src = list(itertools.product(range(d), repeat=n))
    tgt = list(itertools.product(range(d), repeat=n + 1))
    pos = {t: k for k, t in enumerate(src)}
    rows = len(tgt) * d
    cols = len(src) * d
    mat = [[Z] * cols for _ in range(rows)]

    def put(row_block, vec_out, col_tuple_vec, sign):
        # vec_out[r] is the coefficient for f(col_tuple)_s feeding output r;
        # here it is given as a map s -> dense output vector
        for tup, w in col_tuple_vec:
            base = pos[tup] * d
            for s in range(d):
                out = vec_out(s)
                for r in range(d):
                    if out[r]:
                        mat[row_block * d + r][base + s] += sign * w * out[r]

    for ti, t in enumerate(tgt):
        a = list(t)
        # a_1 f(a_2, ..., a_{n+1})
        put(ti, lambda s: _mult(A, _e(d, a[0]), _e(d, s)), [(tuple(a[1:]), 1)], 1)
        # inner faces
        for i in range(n):
            prod = A.mult[a[i]][a[i + 1]]
            terms = [(tuple(a[:i]) + (k,) + tuple(a[i + 2 :]), prod[k]) for k in range(d) if prod[k]]
            put(ti, lambda s: _e(d, s), terms, (-1) ** (i + 1))
        # f(a_1, ..., a_n) a_{n+1}
        put(ti, lambda s: _mult(A, _e(d, s), _e(d, a[n])), [(tuple(a[:n]), 1)], (-1) ** (n + 1))
    return mat


def hom_c_m(e, left, right, dM):
    """Hom(C, M) with (a.g)(c) = a_psi g(c^psi) and (g.a)(c) = g(c) a.

    left[a][m][m'] and right[m][a][m'] are the action tensors of M; the result
    uses index c * dM + r and the same tensor shapes.
    """
    dA, dC = e.A.dim, e.C.dim
    D = dC * dM
    L = [[[Z] * D for _ in range(D)] for _ in range(dA)]
    R = [[[Z] * D for _ in range(dA)] for _ in range(D)]
    for a in range(dA):
        for c in range(dC):
            for r in range(dM):
                g = c * dM + r  # the map sending e_c to e_r
                for c0 in range(dC):
                    # (a.g)(c0) = sum psi[c0][a][a'][c'] a' . g(c')
                    for a2 in range(dA):
                        w = e.psi.psi[c0][a][a2][c]
                        if w:
                            for r2 in range(dM):
                                L[a][g][c0 * dM + r2] += w * left[a2][r][r2]
                for r2 in range(dM):
                    R[g][a][c * dM + r2] += right[r][a][r2]
    return L, R


def staic_differential(A, B, zeta, left, right, dM, n):
    """Secondary differential of (A, B, zeta) with coefficients M, dense.

    Cochains: index (lex(a_1..a_n), lex(b over pairs i<j)) * dM + r.
    left[a][m][m'], right[m][a][m'] are the actions on M.
    """
    dA, dB = A.dim, B.dim
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    pairs1 = [(i, j) for i in range(n + 1) for j in range(i + 1, n + 1)]

    def src_index(a, bmap):
        idx = 0
        for x in a:
            idx = idx * dA + x
        for p in pairs:
            idx = idx * dB + bmap[p]
        return idx

    nsrc = dA**n * dB ** len(pairs)
    ntgt = dA ** (n + 1) * dB ** len(pairs1)
    mat = [[Z] * (nsrc * dM) for _ in range(ntgt * dM)]

    def bprod(vec_list):
        """Product in B of dense vectors; the empty product is the unit."""
        out = list(B.unit)
        for v in vec_list:
            out = _mult(B, out, v)
        return out

    def zeta_of(bvec):
        out = [Z] * dA
        for b in range(dB):
            if bvec[b]:
                for a in range(dA):
                    out[a] += bvec[b] * zeta[b][a]
        return out

    def act_left(avec, s):
        out = [Z] * dM
        for a in range(dA):
            if avec[a]:
                for r in range(dM):
                    out[r] += avec[a] * left[a][s][r]
        return out

    def act_right(s, avec):
        out = [Z] * dM
        for a in range(dA):
            if avec[a]:
                for r in range(dM):
                    out[r] += avec[a] * right[s][a][r]
        return out

    def expand(a_vecs, b_vecs):
        """Multilinear expansion into (a tuple, b map, weight)."""
        keys = [p for p in pairs]
        for a in itertools.product(*[[(k, v[k]) for k in range(dA) if v[k]] for v in a_vecs]):
            wa = Fraction(1)
            for _, w in a:
                wa *= w
            for bs in itertools.product(*[[(k, b_vecs[p][k]) for k in range(dB) if b_vecs[p][k]] for p in keys]):
                w = wa
                for _, x in bs:
                    w *= x
                yield tuple(k for k, _ in a), {p: k for p, (k, _) in zip(keys, bs)}, w

    for t_idx, combo in enumerate(itertools.product(range(dA), repeat=n + 1)):
        for bcombo in itertools.product(range(dB), repeat=len(pairs1)):
            row_base = (t_idx * dB ** len(pairs1) + _lex(bcombo, dB)) * dM
            a = [_e(dA, x) for x in combo]
            b = {p: _e(dB, x) for p, x in zip(pairs1, bcombo)}
            terms = []  # (a_vecs, b_vecs, output transform, sign)
            # first term
            z = zeta_of(bprod([b[(0, j)] for j in range(1, n + 1)]))
            lead = _mult(A, z, a[0])
            terms.append(
                (a[1:], {(i, j): b[(i + 1, j + 1)] for (i, j) in pairs}, lambda s, lead=lead: act_left(lead, s), 1)
            )
            # inner faces, merging rows/columns i and i+1 (0-based)
            for i in range(n):
                merged = _mult(A, zeta_of(b[(i, i + 1)]), _mult(A, a[i], a[i + 1]))
                na = a[:i] + [merged] + a[i + 2 :]
                nb = {}
                for p, q in pairs:
                    P = p if p <= i else p + 1
                    Q = q if q < i else q + 1
                    if q == i:
                        nb[(p, q)] = _mult(B, b[(P, i)], b[(P, i + 1)])
                    elif p == i:
                        nb[(p, q)] = _mult(B, b[(i, Q)], b[(i + 1, Q)])
                    else:
                        nb[(p, q)] = b[(P, Q)]
                terms.append((na, nb, lambda s: [Fraction(1) if r == s else Z for r in range(dM)], (-1) ** (i + 1)))
            # last term
            z = zeta_of(bprod([b[(k, n)] for k in range(n)]))
            tail = _mult(A, z, a[n])
            terms.append(
                (a[:n], {p: b[p] for p in pairs}, lambda s, tail=tail: act_right(s, tail), (-1) ** (n + 1))
            )
            for a_vecs, b_vecs, out, sign in terms:
                for at, bm, w in expand(a_vecs, b_vecs):
                    col_base = src_index(at, bm) * dM
                    for s in range(dM):
                        o = out(s)
                        for r in range(dM):
                            if o[r]:
                                mat[row_base + r][col_base + s] += sign * w * o[r]
    return mat


def _lex(digits, radix):
    k = 0
    for d in digits:
        k = k * radix + d
    return k


def dense_rank(mat):
    """Rank by Gaussian elimination over Q on a copy."""
    m = [list(r) for r in mat]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c] / m[rank][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def bar_betti(A, top):
    """Betti numbers of classical Hochschild cohomology HH^n(A, A), n <= top."""
    ranks = []
    for n in range(top + 1):
        ranks.append(dense_rank(bar_differential(A, n)))
    betti = []
    for n in range(top + 1):
        prev = ranks[n - 1] if n else 0
        betti.append(A.dim ** (n + 1) - ranks[n] - prev)
    return betti


# ---------------------------------------------------------------------------
# classical Gerstenhaber operations on Hom(A^n, A), cochains as dense lists


def classical_comp(A, f, m, i, g, n):
    """(f o_i g)(a_1..a_{m+n-1}) = f(a_1..a_i, g(a_{i+1}..a_{i+n}), ..), i 0-based."""
    d = A.dim
    out = [Z] * (d ** (m + n - 1) * d)
    for k, a in enumerate(itertools.product(range(d), repeat=m + n - 1)):
        inner = g[_lex(a[i : i + n], d) * d : _lex(a[i : i + n], d) * d + d]
        for s in range(d):
            if inner[s]:
                args = a[:i] + (s,) + a[i + n :]
                base = _lex(args, d) * d
                for r in range(d):
                    out[k * d + r] += inner[s] * f[base + r]
    return out


def classical_cup(A, f, m, g, n):
    """(f cup g)(a_1..a_{m+n}) = f(a_1..a_m) g(a_{m+1}..a_{m+n})."""
    d = A.dim
    out = [Z] * (d ** (m + n) * d)
    for k, a in enumerate(itertools.product(range(d), repeat=m + n)):
        x = f[_lex(a[:m], d) * d : _lex(a[:m], d) * d + d]
        y = g[_lex(a[m:], d) * d : _lex(a[m:], d) * d + d]
        prod = _mult(A, x, y)
        for r in range(d):
            out[k * d + r] = prod[r]
    return out
