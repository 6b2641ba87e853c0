"""Small integer lattice utilities: HNF, SNF, membership, CRT solves.

All matrices are lists of rows of ints.  Sizes here are 1x1 or 2x2 with the
occasional 2xN generator matrix, so naive algorithms are fine.
"""

from __future__ import annotations

import math
from fractions import Fraction


def hnf_columns(gens: list[tuple[int, ...]], dim: int) -> list[list[int]]:
    """Column-style Hermite normal form of the lattice spanned by gens.

    Returns a dim x dim lower-triangular basis matrix (columns are basis
    vectors) with positive diagonal and reduced sub-diagonal entries.
    Raises ValueError if the generators do not span a full-rank lattice.
    """
    cols = [list(g) for g in gens]
    basis: list[list[int]] = []
    for row in range(dim):
        # eliminate entries in this row across remaining columns by gcd steps
        work = [c for c in cols if any(c[row:])]
        cols = work
        while True:
            nz = [c for c in cols if c[row] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda c: abs(c[row]))
            piv = nz[0]
            for c in nz[1:]:
                q = c[row] // piv[row]
                for i in range(dim):
                    c[i] -= q * piv[i]
        nz = [c for c in cols if c[row] != 0]
        if not nz:
            raise ValueError("generators are not full rank")
        piv = nz[0]
        if piv[row] < 0:
            piv = [-x for x in piv]
        basis.append(piv)
        cols = [c for c in cols if c is not nz[0] and any(c)]
    # basis[i] has first nonzero at row i (lower rows already eliminated);
    # reduce above-diagonal entries
    for i in range(dim - 1, -1, -1):
        for j in range(i):
            q = basis[j][i] // basis[i][i]
            if q:
                for k in range(dim):
                    basis[j][k] -= q * basis[i][k]
    # return as matrix rows
    return [[basis[j][i] for j in range(dim)] for i in range(dim)]


def det(m: list[list[int]]) -> int:
    if len(m) == 1:
        return m[0][0]
    if len(m) == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    raise ValueError("only sizes 1 and 2 supported")


def smith_normal_form(a: list[list[int]]):
    """(U, D, V) with U*A*V = D diagonal, U and V unimodular."""
    n = len(a)
    a = [row[:] for row in a]
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_op(i, j, q):  # row_i -= q * row_j  (on a and u)
        for k in range(n):
            a[i][k] -= q * a[j][k]
            u[i][k] -= q * u[j][k]

    def col_op(i, j, q):  # col_i -= q * col_j  (on a and v)
        for k in range(n):
            a[k][i] -= q * a[k][j]
            v[k][i] -= q * v[k][j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for k in range(n):
            a[k][i], a[k][j] = a[k][j], a[k][i]
            v[k][i], v[k][j] = v[k][j], v[k][i]

    for t in range(n):
        while True:
            # find pivot: smallest nonzero |entry| in the trailing block
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            done = True
            for i in range(t + 1, n):
                if a[i][t] != 0:
                    row_op(i, t, a[i][t] // a[t][t])
                    done = done and a[i][t] == 0
            for j in range(t + 1, n):
                if a[t][j] != 0:
                    col_op(j, t, a[t][j] // a[t][t])
                    done = done and a[t][j] == 0
            if done and all(a[i][t] == 0 for i in range(t + 1, n)) and all(
                a[t][j] == 0 for j in range(t + 1, n)
            ):
                break
    # make diagonal positive and enforce divisibility d1 | d2 (size <= 2 here)
    for t in range(n):
        if a[t][t] < 0:
            for k in range(n):
                a[t][k] = -a[t][k]
                u[t][k] = -u[t][k]
    if n == 2 and a[0][0] and a[1][1] % a[0][0] != 0:
        # standard trick: add col 2 to col 1, re-reduce
        col_op(0, 1, -1)
        return smith_normal_form_from(a, u, v)
    return u, a, v


def smith_normal_form_from(a, u, v):
    u2, d, v2 = smith_normal_form(a)
    return _matmul(u2, u), d, _matmul(v, v2)


def _matmul(x, y):
    n = len(x)
    return [[sum(x[i][k] * y[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def mat_inverse_exact(m: list[list[int]]) -> list[list[Fraction]]:
    d = det(m)
    if d == 0:
        raise ValueError("singular matrix")
    if len(m) == 1:
        return [[Fraction(1, m[0][0])]]
    a, b, c, dd = m[0][0], m[0][1], m[1][0], m[1][1]
    return [
        [Fraction(dd, d), Fraction(-b, d)],
        [Fraction(-c, d), Fraction(a, d)],
    ]


def in_lattice(vec: tuple[int, ...], basis: list[list[int]]) -> bool:
    """Is vec an integer combination of the basis columns?"""
    inv = mat_inverse_exact(basis)
    for row in inv:
        s = sum(row[j] * vec[j] for j in range(len(vec)))
        if s.denominator != 1:
            return False
    return True


def lattice_index(basis: list[list[int]]) -> int:
    """Index of the lattice in Z^d, i.e. |det|."""
    return abs(det(basis))


def solve_one_combination(gens: list[tuple[int, ...]], target: tuple[int, ...]):
    """Integer coefficients x with sum x_i * gens_i == target, or None.

    Small-dimension solver by HNF with transformation tracking.
    """
    dim = len(target)
    n = len(gens)
    # columns of the working matrix; an identity block underneath tracks the
    # column operations, so column c always equals sum tail_j * gens_j
    cols = [list(g) + [int(k == j) for k in range(n)] for j, g in enumerate(gens)]
    height = dim + n
    # echelon form with a column pointer: a row without a pivot must not
    # consume a column position
    pivot_col = {}
    col = 0
    for row in range(dim):
        if col >= len(cols):
            break
        while True:
            nz = [c for c in cols[col:] if c[row] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda c: abs(c[row]))
            piv = nz[0]
            for c in nz[1:]:
                q = c[row] // piv[row]
                for i in range(height):
                    c[i] -= q * piv[i]
        for idx in range(col, len(cols)):
            if cols[idx][row] != 0:
                cols[col], cols[idx] = cols[idx], cols[col]
                pivot_col[row] = col
                col += 1
                break
    # back-substitute the target against the echelon columns
    t = list(target)
    combo = [0] * n
    for row in range(dim):
        c = pivot_col.get(row)
        if c is None:
            if t[row] != 0:
                return None
            continue
        piv = cols[c]
        if t[row] % piv[row] != 0:
            return None
        q = t[row] // piv[row]
        for i in range(dim):
            t[i] -= q * piv[i]
        for j in range(n):
            combo[j] += q * piv[dim + j]
    if any(t):
        return None
    return combo
