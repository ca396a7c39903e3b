"""Exact dense linear algebra over the rationals (no floating point anywhere)."""

from fractions import Fraction

from .errors import UsageError


def row_echelon(rows):
    """Reduced row echelon form over Fraction.

    Returns (echelon, pivot_columns); input rows are not modified.
    """
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(m)):
            if m[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows):
    _, pivots = row_echelon(rows)
    return len(pivots)


def solve(a, b):
    """Solve a x = b exactly; raises UsageError if inconsistent or deficient."""
    if len(a) != len(b):
        raise UsageError("matrix/vector size mismatch")
    aug = [list(row) + [bv] for row, bv in zip(a, b)]
    ech, pivots = row_echelon(aug)
    ncols = len(a[0]) if a else 0
    if ncols in pivots:
        raise UsageError("inconsistent linear system")
    if len(pivots) < ncols:
        raise UsageError("rank-deficient linear system")
    x = [Fraction(0)] * ncols
    for row, c in zip(ech, pivots):
        x[c] = row[-1]
    return x


def kernel(rows, ncols):
    """Basis of the right null space of the given matrix over Fraction."""
    ech, pivots = row_echelon(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in zip(ech, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis
