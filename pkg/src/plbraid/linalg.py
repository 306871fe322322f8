"""Exact linear algebra over rationals.

Matrices are lists (or tuples) of rows of Rat.  Everything here is sized for
the desk scale of this package (ambient dimension <= 8); plain Gaussian
elimination with exact pivots is used throughout.
"""

from __future__ import annotations

from .rational import Rat, ZERO, ONE


class ShapeError(ValueError):
    pass


def det(matrix):
    """Exact determinant of a square matrix."""
    n = len(matrix)
    rows = [list(map(Rat, row)) for row in matrix]
    for row in rows:
        if len(row) != n:
            raise ShapeError("determinant of a non-square matrix")
    result = ONE
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            return ZERO
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            result = -result
        pv = rows[col][col]
        result *= pv
        inv = 1 / pv
        for r in range(col + 1, n):
            factor = rows[r][col] * inv
            if factor != 0:
                rr, rc = rows[r], rows[col]
                for c in range(col, n):
                    rr[c] -= factor * rc[c]
    return result


def det_sign(matrix) -> int:
    """Exact sign of the determinant: -1, 0 or +1."""
    d = det(matrix)
    return (d > 0) - (d < 0)


def det_sign_bareiss(matrix) -> int:
    """Fraction-free (Bareiss) determinant sign; an independent oracle."""
    n = len(matrix)
    for row in matrix:
        if len(row) != n:
            raise ShapeError("determinant of a non-square matrix")
    if n == 0:
        return 1
    # Clear denominators row by row; track the sign only.
    rows = []
    flip = 1
    for row in matrix:
        row = [Rat(x) for x in row]
        lcm = 1
        for x in row:
            d = x.denominator
            lcm = lcm * d // __import__("math").gcd(lcm, int(d))
        rows.append([int(x * lcm) for x in row])
    prev = 1
    for col in range(n - 1):
        pivot = None
        for r in range(col, n):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            return 0
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            flip = -flip
        for r in range(col + 1, n):
            for c in range(col + 1, n):
                rows[r][c] = (rows[r][c] * rows[col][col] - rows[r][col] * rows[col][c]) // prev
            rows[r][col] = 0
        prev = rows[col][col]
    d = rows[n - 1][n - 1]
    return flip * ((d > 0) - (d < 0))


def rank(matrix) -> int:
    red, pivots = rref(matrix)
    return len(pivots)


def rref(matrix):
    """Reduced row echelon form; returns (rows, pivot column list)."""
    rows = [list(map(Rat, row)) for row in matrix]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        piv = None
        for rr in range(r, nrows):
            if rows[rr][c] != 0:
                piv = rr
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for rr in range(nrows):
            if rr != r and rows[rr][c] != 0:
                factor = rows[rr][c]
                rows[rr] = [a - factor * b for a, b in zip(rows[rr], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def solve_square(matrix, rhs):
    """Solve a nonsingular square system exactly; None if singular."""
    n = len(matrix)
    aug = [list(map(Rat, row)) + [Rat(b)] for row, b in zip(matrix, rhs)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return [red[i][n] for i in range(n)]


def solve_general(matrix, rhs):
    """One exact solution of a (possibly rectangular) consistent system.

    Returns None when inconsistent.  Free variables are set to zero.
    """
    ncols = len(matrix[0]) if matrix else 0
    aug = [list(map(Rat, row)) + [Rat(b)] for row, b in zip(matrix, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [ZERO] * ncols
    for i, c in enumerate(pivots):
        x[c] = red[i][ncols]
    return x
