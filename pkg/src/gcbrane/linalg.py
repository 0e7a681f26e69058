"""Exact dense linear algebra over any field with Python arithmetic.

Matrices are plain lists of lists; entries are Fractions, Gaussian
rationals, or anything else supporting +, -, *, / and truthiness.
Everything is deterministic: pivots are chosen by scanning in order,
never by magnitude, so identical inputs give identical outputs.

Products of all-Fraction matrices take an integer fast path: clear
denominators once, multiply plain ints, normalize once per output
entry.  The results are identical, just much cheaper than per-entry
Fraction arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction


def _zero_of(x):
    return x - x


def _one_of(x):
    return _zero_of(x) + 1


def zeros(m, n, like):
    z = _zero_of(like)
    return [[z] * n for _ in range(m)]


def eye(n, like):
    z = _zero_of(like)
    o = _one_of(like)
    return [[o if i == j else z for j in range(n)] for i in range(n)]


def transpose(A):
    return [list(col) for col in zip(*A)]


def mat_add(A, B):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_neg(A):
    return [[-x for x in row] for row in A]


def mat_scale(c, A):
    return [[c * x for x in row] for row in A]


def _all_fractions(rows):
    return all(type(x) is Fraction for row in rows for x in row)


def _int_scaled(rows):
    den = 1
    for row in rows:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    return [[x.numerator * (den // x.denominator) for x in row] for row in rows], den


def mat_mul(A, B):
    if A and B and _all_fractions(A) and _all_fractions(B):
        Ai, da = _int_scaled(A)
        Bi, db = _int_scaled(B)
        den = da * db
        Bt = list(zip(*Bi))
        return [
            [Fraction(sum(x * y for x, y in zip(row, col)), den) for col in Bt]
            for row in Ai
        ]
    Bt = transpose(B)
    return [[sum(x * y for x, y in zip(row, col)) for col in Bt] for row in A]


def mat_vec(A, v):
    if A and _all_fractions(A) and all(type(x) is Fraction for x in v):
        Ai, da = _int_scaled(A)
        vi, dv = _int_scaled([v])
        den = da * dv
        return [Fraction(sum(x * y for x, y in zip(row, vi[0])), den) for row in Ai]
    return [sum(x * y for x, y in zip(row, v)) for row in A]


def vec_add(u, v):
    return [x + y for x, y in zip(u, v)]


def vec_sub(u, v):
    return [x - y for x, y in zip(u, v)]


def vec_scale(c, v):
    return [c * x for x in v]


def _row_to_ints(row):
    den = 1
    for x in row:
        d = x.denominator if type(x) is Fraction else 1
        den = den * d // math.gcd(den, d)
    out = []
    for x in row:
        if type(x) is Fraction:
            out.append(x.numerator * (den // x.denominator))
        else:
            out.append(x * den)
    return out


def _content_reduce(row):
    g = 0
    for x in row:
        g = math.gcd(g, x)
        if g == 1:
            return row
    return [x // g for x in row] if g > 1 else row


def _int_like(rows):
    return all(type(x) is Fraction or type(x) is int for row in rows for x in row)


def _rref_int(A):
    """Fraction-free elimination for rational matrices; same canonical
    reduced form as the generic path, far fewer gcd normalizations."""
    m, n = len(A), len(A[0])
    rows = [_content_reduce(_row_to_ints(row)) for row in A]
    pivots = []
    r = 0
    for c in range(n):
        pivot = None
        for i in range(r, m):
            if rows[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        p = rows[r]
        pc = p[c]
        for i in range(r + 1, m):
            f = rows[i][c]
            if f:
                rows[i] = _content_reduce(
                    [x * pc - f * y for x, y in zip(rows[i], p)]
                )
        pivots.append(c)
        r += 1
        if r == m:
            break
    for j in range(len(pivots) - 1, -1, -1):
        pj = pivots[j]
        lead = rows[j][pj]
        for i in range(j):
            f = rows[i][pj]
            if f:
                rows[i] = _content_reduce(
                    [x * lead - f * y for x, y in zip(rows[i], rows[j])]
                )
    R = []
    for i, row in enumerate(rows):
        if i < len(pivots):
            lead = row[pivots[i]]
            R.append([Fraction(x, lead) for x in row])
        else:
            R.append([Fraction(0)] * n)
    return R, pivots


def rref(A):
    """Reduced row echelon form.  Returns (R, pivot_columns)."""
    if not A:
        return [], []
    if _int_like(A):
        return _rref_int(A)
    R = [list(row) for row in A]
    m, n = len(R), len(R[0])
    pivots = []
    r = 0
    for c in range(n):
        pivot = None
        for i in range(r, m):
            if R[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        R[r], R[pivot] = R[pivot], R[r]
        inv = _one_of(R[r][c]) / R[r][c]
        R[r] = [inv * x for x in R[r]]
        for i in range(m):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return R, pivots


def rank(A):
    return len(rref(A)[1])


def solve(A, b):
    """One exact solution of A x = b, or None if inconsistent."""
    if not A:
        return None if any(x for x in b) else []
    n = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(aug)
    if n in pivots:
        return None
    z = _zero_of(b[0]) if b else _zero_of(A[0][0])
    x = [z] * n
    for r, c in enumerate(pivots):
        x[c] = R[r][-1]
    return x


def solve_multi(A, B):
    """Solutions of A X = B for each column of B; None if any is
    inconsistent.  One elimination pass for all right-hand sides."""
    if not A:
        return None if any(any(row) for row in B) else [[] for _ in B[0]] if B else []
    n = len(A[0])
    w = len(B[0])
    aug = [list(row) + list(brow) for row, brow in zip(A, B)]
    R, pivots = rref(aug)
    pivots = [p for p in pivots if p < n]
    # a pivot beyond column n means some rhs is inconsistent
    for i, row in enumerate(R):
        if i < len(pivots):
            continue
        if any(row[:n]):
            continue
        if any(row[n:]):
            return None
    z = _zero_of(A[0][0])
    X = [[z] * w for _ in range(n)]
    for r, c in enumerate(pivots):
        for j in range(w):
            X[c][j] = R[r][n + j]
    return X


def inverse(A):
    """Exact inverse of a square matrix; raises on singular input."""
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("inverse needs a square matrix")
    like = A[0][0]
    aug = [list(row) + col for row, col in zip(A, eye(n, like))]
    R, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in R]


def kernel_basis(A):
    """Basis of the right null space of A, as a list of vectors."""
    if not A:
        return []
    n = len(A[0])
    R, pivots = rref(A)
    like = A[0][0]
    z = _zero_of(like)
    o = _one_of(like)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [z] * n
        v[fc] = o
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][fc]
        basis.append(v)
    return basis


class Span:
    """Row space maintained incrementally in echelon form.

    Cheaper than repeated rref when vectors arrive one at a time: each
    add or membership test costs one forward reduction pass.  Rational
    vectors are kept as content-reduced integer rows internally.
    """

    def __init__(self, vectors=None):
        self.rows = []
        self.pivots = []
        self.int_mode = None
        if vectors:
            for v in vectors:
                self.add(v)

    def _reduce(self, v):
        for row, p in zip(self.rows, self.pivots):
            if v[p]:
                if self.int_mode:
                    f, lead = v[p], row[p]
                    v = [x * lead - f * y for x, y in zip(v, row)]
                else:
                    f = v[p]
                    v = [x - f * y for x, y in zip(v, row)]
        return v

    def _prep(self, v):
        if self.int_mode is None:
            self.int_mode = all(type(x) is Fraction or type(x) is int for x in v)
        return _content_reduce(_row_to_ints(v)) if self.int_mode else list(v)

    def add(self, v):
        """Insert v; returns True when the dimension grew."""
        v = self._reduce(self._prep(v))
        p = next((i for i, x in enumerate(v) if x), None)
        if p is None:
            return False
        if self.int_mode:
            v = _content_reduce(v)
        else:
            inv = _one_of(v[p]) / v[p]
            v = [inv * x for x in v]
        self.rows.append(v)
        self.pivots.append(p)
        return True

    def contains(self, v):
        return not any(self._reduce(self._prep(v)))

    @property
    def dim(self):
        return len(self.rows)

    def basis(self):
        """Canonical basis: the reduced echelon form of the span."""
        if not self.rows:
            return []
        R, pivots = rref(self.rows)
        return [R[i] for i in range(len(pivots))]


def row_basis(vectors):
    """Echelonized basis of the span of the given vectors."""
    if not vectors:
        return []
    return Span(vectors).basis()


def in_span(basis, v):
    """Whether v lies in the span of the given vectors."""
    if not basis:
        return not any(x for x in v)
    return Span(basis).contains(v)


def extend_basis(current, candidates):
    """Greedily extend `current` by candidates that enlarge the span.

    Returns the list of candidates that were added, in input order.
    """
    sp = Span(current)
    added = []
    for v in candidates:
        if sp.add(v):
            added.append(list(v))
    return added


def intersect_rowspaces(U, V):
    """Basis of span(U) intersect span(V)."""
    if not U or not V:
        return []
    stacked = [list(u) for u in U] + [list(v) for v in V]
    combos = kernel_basis(transpose(stacked))
    out = []
    for c in combos:
        vec = None
        for coef, u in zip(c[: len(U)], U):
            term = [coef * x for x in u]
            vec = term if vec is None else vec_add(vec, term)
        if vec is not None and any(x for x in vec):
            out.append(vec)
    return row_basis(out)
