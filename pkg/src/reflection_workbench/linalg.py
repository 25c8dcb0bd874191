"""Small dense linear algebra over the coefficient fields (lists of lists).

Exact entries use exact pivoting; float entries use partial pivoting and a
zero threshold ``tol``.
"""

from __future__ import annotations

from .fields import canon, fdiv, is_zero

NUMERIC_TOL = 1e-9


def _is_float_matrix(rows):
    return any(isinstance(x, float) for row in rows for x in row)


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(col) for col in zip(*a)]


def matmul(a, b):
    bt = list(zip(*b))
    out = []
    for row in a:
        out_row = []
        for col in bt:
            acc = 0
            for x, y in zip(row, col):
                if x != 0 and y != 0:
                    acc = acc + x * y
            out_row.append(canon(acc))
        out.append(out_row)
    return out


def matvec(a, v):
    out = []
    for row in a:
        acc = 0
        for x, y in zip(row, v):
            if x != 0 and y != 0:
                acc = acc + x * y
        out.append(canon(acc))
    return out


def dot(u, v):
    acc = 0
    for x, y in zip(u, v):
        if x != 0 and y != 0:
            acc = acc + x * y
    return canon(acc)


def mat_equal(a, b, tol=0.0):
    for ra, rb in zip(a, b):
        for x, y in zip(ra, rb):
            d = x - y
            if isinstance(d, float):
                if abs(d) > tol:
                    return False
            elif d != 0:
                return False
    return True


def rref(rows, tol=None):
    """Reduced row echelon form. Returns (R, pivot_columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    if tol is None:
        tol = NUMERIC_TOL if _is_float_matrix(m) else 0.0
    nrows, ncols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        piv = None
        if tol:
            best = tol
            for i in range(r, nrows):
                if abs(float(m[i][c])) > best:
                    best, piv = abs(float(m[i][c])), i
        else:
            for i in range(r, nrows):
                if m[i][c] != 0:
                    piv = i
                    break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [canon(fdiv(x, pv)) for x in m[r]]
        for i in range(nrows):
            if i != r and not is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [canon(x - f * y) for x, y in zip(m[i], m[r])]
                m[i][c] = 0
        pivots.append(c)
        r += 1
    if tol:
        m = [[0.0 if isinstance(x, float) and abs(x) <= tol else x for x in row] for row in m]
    return m, pivots


def rank(rows, tol=None):
    return len(rref(rows, tol)[1])


def nullspace(rows, ncols, tol=None):
    """Basis of {x : rows . x = 0}, one vector per free column (free entry 1)."""
    if not rows:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    r, pivots = rref(rows, tol)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = canon(-r[i][f])
        basis.append(v)
    return basis


def inverse(a, tol=None):
    n = len(a)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(a)]
    r, pivots = rref(aug, tol)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in r]


def solve(a, b, tol=None):
    n = len(a)
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    r, pivots = rref(aug, tol)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [r[i][n] for i in range(n)]


def in_span(vectors, v, tol=None):
    return rank(list(vectors) + [list(v)], tol) == rank(list(vectors), tol) if vectors else all(is_zero(x, tol or 0.0) for x in v)
