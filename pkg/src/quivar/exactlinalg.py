"""Exact integer / rational linear algebra.

Everything here is arbitrary precision: matrices are plain lists of lists
holding Python ints (or Fractions where stated).  No floating point is used
anywhere in this package; ranks, kernels and normal forms are exact.

Conventions: a matrix acts on column vectors, ``m[i][j]`` is row i, column j.
Lattices are encoded by a basis given as rows (see :class:`LatticeBasis`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    nb = len(b[0]) if b else 0
    return [[sum(ra[k] * b[k][j] for k in range(len(b))) for j in range(nb)]
            for ra in a]


def mat_vec(a, v):
    return [sum(r[k] * v[k] for k in range(len(v))) for r in a]


def transpose(a):
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def vec_gcd(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive(v):
    """Divide an integer vector by the gcd of its entries (0 stays 0)."""
    g = vec_gcd(v)
    return list(v) if g == 0 else [x // g for x in v]


# ---------------------------------------------------------------------------
# rank

def rational_rank(m) -> int:
    """Rank of a matrix with int or Fraction entries.

    Uses fraction-free (Bareiss) elimination after clearing denominators
    row by row; row scaling does not change the rank.
    """
    rows = []
    for r in m:
        if all(x == 0 for x in r):
            continue
        den = 1
        for x in r:
            if isinstance(x, Fraction):
                den = den * x.denominator // gcd(den, x.denominator)
        rows.append([int(x * den) for x in r])
    if not rows:
        return 0
    return _bareiss_rank(rows, len(m[0]))


def _bareiss_rank(rows, ncols):
    # Pivots are chosen with minimal absolute value; for the quasi-unimodular
    # matrices showing up here this keeps the previous-pivot divisor at 1,
    # so untouched rows rarely need rescaling.
    prev = 1
    rank = 0
    nrows = len(rows)
    for col in range(ncols):
        piv = -1
        best = None
        for i in range(rank, nrows):
            x = rows[i][col]
            if x != 0 and (best is None or abs(x) < best):
                best = abs(x)
                piv = i
                if best == abs(prev):
                    break
        if piv < 0:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        scale = p // prev if p % prev == 0 and abs(p // prev) == 1 else None
        for i in range(rank + 1, nrows):
            ri = rows[i]
            f = ri[col]
            if f == 0:
                if scale == 1:
                    continue
                for j in range(col, ncols):
                    ri[j] = p * ri[j] // prev
            else:
                pr = rows[rank]
                for j in range(col, ncols):
                    ri[j] = (p * ri[j] - f * pr[j]) // prev
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def sparse_rank(rows) -> int:
    """Rank of an integer matrix given as sparse rows (col -> value dicts).

    Exact elimination with per-row gcd normalization; each pivot step only
    rewrites the rows that share the pivot column, so block-sparse inputs
    stay cheap.
    """
    active = []
    for r in rows:
        d = {c: v for c, v in r.items() if v}
        if d:
            g = 0
            for v in d.values():
                g = gcd(g, v)
            if g > 1:
                d = {c: v // g for c, v in d.items()}
            active.append(d)
    rank = 0
    while active:
        # sparsest row first, smallest pivot within it
        ri = min(range(len(active)), key=lambda i: len(active[i]))
        row = active.pop(ri)
        rank += 1
        c, p = min(row.items(), key=lambda cv: (abs(cv[1]), cv[0]))
        nxt = []
        for s in active:
            f = s.get(c)
            if f is None:
                nxt.append(s)
                continue
            merged = {}
            for col, v in s.items():
                merged[col] = p * v
            for col, v in row.items():
                merged[col] = merged.get(col, 0) - f * v
            merged = {col: v for col, v in merged.items() if v}
            if merged:
                g = 0
                for v in merged.values():
                    g = gcd(g, v)
                if g > 1:
                    merged = {col: v // g for col, v in merged.items()}
                nxt.append(merged)
        active = nxt
    return rank


# ---------------------------------------------------------------------------
# echelon / Hermite forms over ZZ (unimodular row operations)

def row_echelon_transform(m):
    """Integer row echelon form by unimodular row operations.

    Returns ``(h, t)`` with ``t`` unimodular and ``t * m = h``; the nonzero
    rows of ``h`` come first, pivots move strictly right as rows descend.
    """
    h = [list(r) for r in m]
    nrows = len(h)
    ncols = len(h[0]) if h else 0
    t = identity(nrows)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        # euclidean elimination within column c, rows r..
        while True:
            piv = -1
            best = None
            for i in range(r, nrows):
                x = h[i][c]
                if x != 0 and (best is None or abs(x) < best):
                    best = abs(x)
                    piv = i
            if piv < 0:
                break
            if piv != r:
                h[r], h[piv] = h[piv], h[r]
                t[r], t[piv] = t[piv], t[r]
            done = True
            p = h[r][c]
            for i in range(r + 1, nrows):
                if h[i][c] != 0:
                    q = h[i][c] // p
                    _row_sub(h, i, r, q)
                    _row_sub(t, i, r, q)
                    if h[i][c] != 0:
                        done = False
            if done:
                break
        if h[r][c] != 0:
            if h[r][c] < 0:
                h[r] = [-x for x in h[r]]
                t[r] = [-x for x in t[r]]
            r += 1
    return h, t


def _row_sub(m, i, j, q):
    if q == 0:
        return
    mi, mj = m[i], m[j]
    for k in range(len(mi)):
        mi[k] -= q * mj[k]


def hermite_normal_form(m):
    """Row-style HNF: echelon with positive pivots and reduced entries above."""
    h, _ = row_echelon_transform(m)
    pivots = []
    for i, row in enumerate(h):
        cols = [j for j, x in enumerate(row) if x != 0]
        if cols:
            pivots.append((i, cols[0]))
    for i, c in pivots:
        p = h[i][c]
        for k in range(i):
            q = h[k][c] // p
            _row_sub(h, k, i, q)
    return h


# ---------------------------------------------------------------------------
# integer kernels and lattice bases

@dataclass(frozen=True)
class LatticeBasis:
    """A sublattice of ZZ^ambient_dim given by linearly independent rows."""

    ambient_dim: int
    vectors: tuple

    @property
    def rank(self) -> int:
        return len(self.vectors)

    def matrix(self):
        return [list(v) for v in self.vectors]

    def is_saturated(self) -> bool:
        """True iff the sublattice is a direct summand of the ambient lattice."""
        if not self.vectors:
            return True
        return all(d == 1 for d in invariant_factors(self.matrix()))


def integer_kernel(m) -> LatticeBasis:
    """Basis of the integer kernel ``{x : m @ x = 0}``.

    Kernels of integer matrices are always saturated sublattices.
    """
    ncols = len(m[0]) if m else 0
    if ncols == 0:
        return LatticeBasis(0, ())
    if not m:
        return LatticeBasis(ncols, tuple(tuple(r) for r in identity(ncols)))
    h, t = row_echelon_transform(transpose(m))
    vecs = [tuple(t[i]) for i in range(len(h)) if all(x == 0 for x in h[i])]
    return LatticeBasis(ncols, tuple(vecs))


# ---------------------------------------------------------------------------
# Smith normal form with transforms

def smith_normal_form(m):
    """Smith normal form ``u * m * v = d`` with u, v unimodular.

    Returns ``(d, u, v)``; the diagonal of ``d`` is nonnegative with each
    entry dividing the next.
    """
    a = [list(r) for r in m]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    u = identity(nrows)
    v = identity(ncols)
    t = 0
    while True:
        piv = None
        best = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                x = a[i][j]
                if x != 0 and (best is None or abs(x) < best):
                    best = abs(x)
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        if i != t:
            a[t], a[i] = a[i], a[t]
            u[t], u[i] = u[i], u[t]
        if j != t:
            _col_swap(a, t, j)
            _col_swap(v, t, j)
        while True:
            # clear column t
            redo = False
            for i in range(t + 1, nrows):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    _row_sub(a, i, t, q)
                    _row_sub(u, i, t, q)
                    if a[i][t] != 0:
                        a[t], a[i] = a[i], a[t]
                        u[t], u[i] = u[i], u[t]
                        redo = True
            if redo:
                continue
            # clear row t
            for j in range(t + 1, ncols):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    _col_sub(a, j, t, q)
                    _col_sub(v, j, t, q)
                    if a[t][j] != 0:
                        _col_swap(a, t, j)
                        _col_swap(v, t, j)
                        redo = True
            if not redo and all(a[i][t] == 0 for i in range(t + 1, nrows)):
                break
        # divisibility: a[t][t] must divide the remaining block
        p = a[t][t]
        offender = None
        for i in range(t + 1, nrows):
            for j in range(t + 1, ncols):
                if a[i][j] % p != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            _row_sub(a, t, offender, -1)
            _row_sub(u, t, offender, -1)
            continue
        if p < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
        if t == min(nrows, ncols):
            break
    return a, u, v


def _col_swap(m, i, j):
    for r in m:
        r[i], r[j] = r[j], r[i]


def _col_sub(m, i, j, q):
    if q == 0:
        return
    for r in m:
        r[i] -= q * r[j]


def invariant_factors(m):
    """Nonzero diagonal entries of the Smith form, in divisibility order."""
    d, _, _ = smith_normal_form(m)
    out = []
    for i in range(min(len(d), len(d[0]) if d else 0)):
        if d[i][i] != 0:
            out.append(abs(d[i][i]))
    return out


def quotient_coordinates(ambient_dim: int, sub: LatticeBasis):
    """Surjection ``q: ZZ^ambient -> ZZ^(ambient - rank)`` with kernel = sub.

    The sublattice must be saturated, otherwise the quotient has torsion and
    no such integer map exists.
    """
    if sub.ambient_dim != ambient_dim:
        raise ValueError("ambient dimension mismatch")
    k = sub.rank
    if k == 0:
        return identity(ambient_dim)
    d, _, v = smith_normal_form(sub.matrix())
    if any(d[i][i] not in (1, -1) for i in range(k)):
        raise ValueError("sublattice is not saturated; quotient has torsion")
    # rows of v^{-1} form a basis of ZZ^n whose first k rows span sub;
    # the quotient takes the last n-k coordinates, i.e. q = (v[:, k:])^T.
    return [[v[i][j] for i in range(ambient_dim)]
            for j in range(k, ambient_dim)]


# ---------------------------------------------------------------------------
# exact linear solving over QQ

def solve_exact(m, rhs):
    """Solve ``m x = rhs`` over the rationals.

    Returns ``(solution, unique)`` with free variables set to zero, or
    ``None`` if the system is inconsistent.
    """
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    a = [[Fraction(x) for x in r] + [Fraction(rhs[i])] for i, r in enumerate(m)]
    piv_cols = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pr = a[r]
        inv = 1 / pr[c]
        a[r] = pr = [x * inv for x in pr]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], pr)]
        piv_cols.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if a[i][ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(piv_cols):
        x[c] = a[i][ncols]
    return x, len(piv_cols) == ncols
