"""Exact linear algebra: fraction-free determinants and rational solves."""

from fractions import Fraction


def bareiss_det(matrix):
    """Determinant of a square integer matrix by fraction-free elimination.

    Every intermediate division is exact (Sylvester's identity), so the
    computation stays in the integers throughout.  The empty matrix has
    determinant 1.
    """
    a = [list(row) for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix is not square")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if pivot is None:
                return 0
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def solve_exact(a, b):
    """Solve ``a @ x = b`` over the rationals.

    ``a`` is n x n, ``b`` is n x r (a list of rows).  Returns the n x r
    solution as nested lists of Fractions.  Raises ``ZeroDivisionError``
    when ``a`` is singular.
    """
    n = len(a)
    r = len(b[0]) if n else 0
    m = [[Fraction(x) for x in a[i]] + [Fraction(x) for x in b[i]] for i in range(n)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if m[i][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular system")
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        row_c = m[col] = [x * inv for x in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                factor = m[i][col]
                row_i = m[i]
                m[i] = [x - factor * y for x, y in zip(row_i, row_c)]
    return [row[n:n + r] for row in m]
