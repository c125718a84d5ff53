"""Exact rational linear algebra on small dense matrices.

Matrices are numpy arrays with ``dtype=object`` holding ``int`` or
``fractions.Fraction`` entries, so every operation is exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np


def as_object(a) -> np.ndarray:
    return np.array(a, dtype=object)


def identity(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


def zeros(shape) -> np.ndarray:
    return np.zeros(shape, dtype=object)


def is_integral(a: np.ndarray) -> bool:
    return all(_is_int(v) for v in np.asarray(a).flat)


def _is_int(v) -> bool:
    if isinstance(v, (int, np.integer)):
        return True
    return isinstance(v, Fraction) and v.denominator == 1


def to_int(a: np.ndarray) -> np.ndarray:
    """Return a copy with integer-valued Fractions converted to ``int``."""
    a = np.asarray(a)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        if not _is_int(v):
            raise ValueError(f"non-integral entry {v} at {idx}")
        out[idx] = int(v)
    return out


def clear_denominators(v) -> np.ndarray:
    """Scale a rational vector by a positive integer to a primitive integer vector."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    nums = [int(x * den) for x in v]
    g = 0
    for x in nums:
        g = gcd(g, x)
    if g > 1:
        nums = [x // g for x in nums]
    return as_object(nums)


def rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over Q and the list of pivot columns."""
    m = [[Fraction(x) for x in row] for row in np.asarray(a)]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return as_object(m).reshape(rows, cols), pivots


def rank(a: np.ndarray) -> int:
    return len(rref(a)[1])


def column_basis(a: np.ndarray) -> list[int]:
    """Indices of a maximal linearly independent set of columns."""
    a = np.asarray(a)
    if is_integral(a):
        return _int_pivots(a)
    return rref(a)[1]


def _int_pivots(a: np.ndarray) -> list[int]:
    # fraction-free row echelon form; rows are kept primitive to bound growth
    m = [[int(x) for x in row] for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r]
        for i in range(r + 1, rows):
            f = m[i][c]
            if f:
                row = [x * piv[c] - f * y for x, y in zip(m[i], piv)]
                g = 0
                for x in row:
                    g = gcd(g, x)
                m[i] = [x // g for x in row] if g > 1 else row
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def common_denominator(v) -> tuple[np.ndarray, int]:
    """(w, d) with v = w / d, w integral and d > 0 the lcm of the denominators."""
    d = 1
    for x in np.asarray(v).flat:
        q = Fraction(x).denominator
        d = d * q // gcd(d, q)
    w = np.empty(np.shape(v), dtype=object)
    flat_v, flat_w = np.asarray(v).ravel(), w.reshape(-1)
    for k, x in enumerate(flat_v):
        x = Fraction(x)
        flat_w[k] = x.numerator * (d // x.denominator)
    return w, d


def nullspace(a: np.ndarray) -> list[np.ndarray]:
    """Basis of the right kernel of ``a`` over Q."""
    red, pivots = rref(a)
    cols = red.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -red[row, f]
        basis.append(as_object(v))
    return basis


def solve(a: np.ndarray, b) -> np.ndarray:
    """One solution of ``a @ x = b`` (free variables set to zero).

    Raises ``ValueError`` if the system is inconsistent.
    """
    a = np.asarray(a)
    b = as_object(b).reshape(-1, 1)
    red, pivots = rref(np.hstack([a, b]))
    cols = a.shape[1]
    if cols in pivots:
        raise ValueError("inconsistent linear system")
    x = [Fraction(0)] * cols
    for row, pc in enumerate(pivots):
        x[pc] = red[row, cols]
    return as_object(x)


def inverse(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    red, pivots = rref(np.hstack([np.asarray(a), identity(n)]))
    if pivots[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return red[:, n:]


def bareiss_det(a: np.ndarray) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    m = [[int(x) for x in row] for row in np.asarray(a)]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i, row_k = m[i], m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1] if n else 1


def orthogonal_basis(gram: np.ndarray) -> tuple[list[np.ndarray], list[Fraction]]:
    """Diagonalize a nondegenerate symmetric form over Q.

    Returns basis vectors (coordinates in the input basis) that are pairwise
    orthogonal with nonzero squares, and the list of those squares.
    Sparse rows are skipped, so block-diagonal input costs roughly the sum
    of the block sizes cubed.
    """
    q = [[Fraction(x) for x in row] for row in np.asarray(gram)]
    n = len(q)
    # basis[i] holds current coordinates of the i-th working vector
    basis = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    vecs: list[np.ndarray] = []
    squares: list[Fraction] = []
    remaining = list(range(n))
    while remaining:
        p = next((i for i in remaining if q[i][i] != 0), None)
        if p is None:
            i = remaining[0]
            j = next((k for k in remaining if k != i and q[i][k] != 0), None)
            if j is None:
                raise ValueError("degenerate form")
            # all remaining squares vanish: i + j has square 2*q[i][j] != 0
            basis[i] = [x + y for x, y in zip(basis[i], basis[j])]
            new_row = [x + y for x, y in zip(q[i], q[j])]
            new_row[i] = 2 * q[i][j]
            q[i] = new_row
            for t in range(n):
                q[t][i] = q[i][t]
            p = i
        remaining.remove(p)
        d = q[p][p]
        vecs.append(as_object(basis[p]))
        squares.append(d)
        for k in remaining:
            f = q[k][p]
            if f == 0:
                continue
            f = f / d
            basis[k] = [x - f * y for x, y in zip(basis[k], basis[p])]
            q[k] = [x - f * y for x, y in zip(q[k], q[p])]
            for t in range(n):
                q[t][k] = q[k][t]
    return vecs, squares
