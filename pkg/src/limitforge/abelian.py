"""Integer matrix normal forms: Smith form, linear systems, abelianization."""

from __future__ import annotations

from .words import Word


def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(rows, ncols: int | None = None):
    """Return (D, U, V) with U * A * V = D diagonal, d1 | d2 | ..., di >= 0.

    A is given as a list of rows. All matrices are lists of lists of ints.
    """
    A = [list(r) for r in rows]
    m = len(A)
    if ncols is None:
        if m == 0:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(A[0])
    n = ncols
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for r in A:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    def negate_row(i):
        A[i] = [-a for a in A[i]]
        U[i] = [-a for a in U[i]]

    def diagonalize():
        t = 0
        while t < min(m, n):
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    v = A[i][j]
                    if v != 0 and (pivot is None or abs(v) < abs(A[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            if A[t][t] < 0:
                negate_row(t)
            dirty = False
            for i in range(t + 1, m):
                if A[i][t] != 0:
                    add_row(i, t, -(A[i][t] // A[t][t]))
                    if A[i][t] != 0:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j] != 0:
                    add_col(j, t, -(A[t][j] // A[t][t]))
                    if A[t][j] != 0:
                        dirty = True
            if not dirty:
                t += 1

    diagonalize()
    # enforce the divisibility chain; each fix shrinks a diagonal gcd
    while True:
        bad = None
        for i in range(min(m, n) - 1):
            a, b = A[i][i], A[i + 1][i + 1]
            if a != 0 and b != 0 and b % a != 0:
                bad = i
                break
        if bad is None:
            break
        add_col(bad, bad + 1, 1)
        diagonalize()
    return A, U, V


def matvec(M, v):
    return [sum(a * b for a, b in zip(row, v)) for row in M]


def solve(rows, b, ncols: int | None = None):
    """Solve A x = b over the integers.

    Returns (particular solution, kernel basis vectors) or None if infeasible.
    """
    m = len(rows)
    if ncols is None:
        if m == 0:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(rows[0])
    n = ncols
    if m == 0:
        return [0] * n, [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    D, U, V = smith_normal_form(rows, n)
    c = matvec(U, list(b))
    y = [0] * n
    free = []
    k = min(m, n)
    for j in range(k):
        d = D[j][j]
        if d == 0:
            if c[j] != 0:
                return None
            free.append(j)
        else:
            if c[j] % d != 0:
                return None
            y[j] = c[j] // d
    free.extend(range(k, n))
    for i in range(k, m):
        if c[i] != 0:
            return None
    x0 = matvec(V, y)
    kernel = []
    for j in free:
        kernel.append([V[i][j] for i in range(n)])
    return x0, kernel


def exponent_vector(w: Word, ngens: int) -> list[int]:
    v = [0] * ngens
    for x in w.ints:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return v


def abelian_invariants(ngens: int, relators) -> tuple[int, tuple[int, ...]]:
    """(free rank, invariant torsion factors) of the abelianized group."""
    rows = [exponent_vector(r, ngens) for r in relators]
    if not rows:
        return ngens, ()
    D, _, _ = smith_normal_form(rows, ngens)
    diag = [D[i][i] for i in range(min(len(rows), ngens))]
    nonzero = [d for d in diag if d != 0]
    rank = ngens - len(nonzero)
    torsion = tuple(d for d in nonzero if d != 1)
    return rank, torsion
