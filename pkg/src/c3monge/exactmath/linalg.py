"""Dense exact linear algebra over Q and Q(params).

Over Q the echelon form is computed fraction-free (Bareiss) on integer
rows; over a rational-function field we use division steps with
aggressive row normalization (clear denominators, strip polynomial and
rational content) and lowest-complexity pivoting, which is what keeps
coefficient growth tolerable at the matrix sizes this package meets.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd

from .scalars import QQ, FunctionField, MultiPoly, RatFunc, RationalField


class Matrix:
    """Immutable-by-convention dense matrix over an exact field."""

    __slots__ = ("field", "rows", "nrows", "ncols")

    def __init__(self, field, rows, ncols=None):
        self.field = field
        self.rows = [[field.coerce(x) for x in row] for row in rows]
        self.nrows = len(self.rows)
        if self.nrows:
            self.ncols = len(self.rows[0])
            if any(len(r) != self.ncols for r in self.rows):
                raise ValueError("ragged rows")
        else:
            if ncols is None:
                raise ValueError("empty matrix needs an explicit column count")
            self.ncols = ncols

    @classmethod
    def zeros(cls, field, nrows, ncols):
        z = field.zero
        return cls(field, [[z] * ncols for _ in range(nrows)], ncols=ncols)

    @classmethod
    def identity(cls, field, n):
        m = cls.zeros(field, n, n)
        for i in range(n):
            m.rows[i][i] = field.one
        return m

    @classmethod
    def from_columns(cls, field, cols, nrows=None):
        if not cols:
            if nrows is None:
                raise ValueError("empty column list needs an explicit row count")
            return cls(field, [[] for _ in range(nrows)], ncols=0)
        nrows = len(cols[0])
        return cls(field, [[cols[j][i] for j in range(len(cols))] for i in range(nrows)],
                   ncols=len(cols))

    def column(self, j):
        return [row[j] for row in self.rows]

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self):
        return Matrix(self.field, [self.column(j) for j in range(self.ncols)],
                      ncols=self.nrows)

    def matvec(self, v):
        f = self.field
        out = []
        for row in self.rows:
            acc = f.zero
            for a, x in zip(row, v):
                if not f.is_zero(a) and not f.is_zero(x):
                    acc = acc + a * x
            out.append(acc)
        return out

    def mul(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        f = self.field
        cols = [other.column(j) for j in range(other.ncols)]
        return Matrix(f, [[_dot(f, row, c) for c in cols] for row in self.rows],
                      ncols=other.ncols)

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.nrows == other.nrows
                and self.ncols == other.ncols and self.rows == other.rows)

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols} over {self.field})"


def _dot(field, u, v):
    acc = field.zero
    for a, b in zip(u, v):
        if not field.is_zero(a) and not field.is_zero(b):
            acc = acc + a * b
    return acc


# -- echelon machinery ---------------------------------------------------


def _row_int_clear(row):
    """Fraction row -> primitive integer row."""
    den = 1
    for x in row:
        den = den * (x.denominator // _int_gcd(den, x.denominator))
    ints = [int(x * den) for x in row]
    g = 0
    for v in ints:
        g = _int_gcd(g, v)
        if g == 1:
            break
    if g > 1:
        ints = [v // g for v in ints]
    return ints


def _echelon_qq(rows):
    """Bareiss fraction-free echelon over Q.

    Returns (echelon integer rows, pivot column per row).
    """
    m = [_row_int_clear(r) for r in rows]
    m = [r for r in m if any(r)]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        sel = None
        for i in range(r, len(m)):
            if m[i][c]:
                if sel is None or abs(m[i][c]) < abs(m[sel][c]):
                    sel = i
        if sel is None:
            continue
        m[r], m[sel] = m[sel], m[r]
        piv = m[r][c]
        for i in range(r + 1, len(m)):
            if not any(m[i][c:]):
                continue
            head = m[i][c]
            row = m[i]
            prow = m[r]
            for j in range(c, ncols):
                row[j] = (piv * row[j] - head * prow[j]) // prev
        pivots.append(c)
        prev = piv
        r += 1
        if r == len(m):
            break
    return [m[i] for i in range(r)], pivots


def _ratfunc_complexity(x) -> int:
    if isinstance(x, RatFunc):
        return x.complexity()
    return 1


def _row_poly_clear(field: FunctionField, row):
    """RatFunc row -> content-free polynomial row (as RatFunc with den 1)."""
    lcm = field.ring.one
    for x in row:
        if not x.is_zero():
            d = x.den.p
            lcm = lcm * d.exquo(lcm.gcd(d))
    cleared = []
    for x in row:
        if x.is_zero():
            cleared.append(field.ring.zero)
        else:
            cleared.append(x.num.p * lcm.exquo(x.den.p))
    content = field.ring.zero
    for p in cleared:
        if p:
            content = content.gcd(p) if content else p
    if content and not content.is_one:
        cleared = [p.exquo(content) if p else p for p in cleared]
    one = field.ring_one
    return [RatFunc(MultiPoly(field, p), one) for p in cleared]


def _echelon_ff(field: FunctionField, rows):
    """Echelon over a function field; division steps, normalized rows."""
    m = [_row_poly_clear(field, [field.coerce(x) for x in r]) for r in rows]
    m = [r for r in m if any(not x.is_zero() for x in r)]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        sel = None
        best = None
        for i in range(r, len(m)):
            if not m[i][c].is_zero():
                key = sum(_ratfunc_complexity(x) for x in m[i])
                if best is None or key < best:
                    best, sel = key, i
        if sel is None:
            continue
        m[r], m[sel] = m[sel], m[r]
        piv = m[r][c]
        for i in range(r + 1, len(m)):
            if m[i][c].is_zero():
                continue
            factor = m[i][c] / piv
            m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
            if any(not x.is_zero() for x in m[i]):
                m[i] = _row_poly_clear(field, m[i])
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [m[i] for i in range(r)], pivots


def rref(M: Matrix):
    """Reduced row echelon form; returns (Matrix, pivot columns)."""
    f = M.field
    if isinstance(f, RationalField):
        ech, pivots = _echelon_qq(M.rows)
        rows = [[Fraction(x) for x in r] for r in ech]
    else:
        ech, pivots = _echelon_ff(f, M.rows)
        rows = ech
    # back-substitute to reduced form
    for i in reversed(range(len(pivots))):
        c = pivots[i]
        piv = rows[i][c]
        rows[i] = [x / piv for x in rows[i]]
        for k in range(i):
            factor = rows[k][c]
            if not f.is_zero(factor):
                rows[k] = [a - factor * b for a, b in zip(rows[k], rows[i])]
    return Matrix(f, rows, ncols=M.ncols), pivots


def rank(M: Matrix) -> int:
    if isinstance(M.field, RationalField):
        return len(_echelon_qq(M.rows)[1])
    return len(_echelon_ff(M.field, M.rows)[1])


def kernel_basis(M: Matrix):
    """Exact basis of the right null space (list of column vectors)."""
    R, pivots = rref(M)
    f = M.field
    free = [c for c in range(M.ncols) if c not in pivots]
    basis = []
    for c in free:
        v = [f.zero] * M.ncols
        v[c] = f.one
        for i, pc in enumerate(pivots):
            v[pc] = -R.rows[i][c]
        basis.append(v)
    return basis


def solve_linear(M: Matrix, b):
    """Particular solution of M x = b plus kernel basis, or None.

    Inconsistency is a value (None), not an error.
    """
    f = M.field
    aug = Matrix(f, [row + [bi] for row, bi in zip(M.rows, [f.coerce(x) for x in b])],
                 ncols=M.ncols + 1)
    R, pivots = rref(aug)
    if M.ncols in pivots:
        return None
    x = [f.zero] * M.ncols
    for i, pc in enumerate(pivots):
        x[pc] = R.rows[i][M.ncols]
    return x, kernel_basis(M)


class RationalSolver:
    """Factor a fixed base-field matrix once, then solve M x = b repeatedly.

    Used by the Cartan normalization: the homogeneity-degree-d defect is
    affine-linear in the degree-d unknowns with a parameter-free linear
    part, so the expensive elimination happens once over the base field
    (usually Q) and each family member only pays a back-substitution.  The
    rhs may live in an extension field whose scalars absorb base scalars
    under multiplication.
    """

    def __init__(self, M: Matrix):
        f = M.field
        n = M.nrows
        aug = Matrix(f, [list(row) + [f.one if j == i else f.zero
                                      for j in range(n)]
                         for i, row in enumerate(M.rows)], ncols=M.ncols + n)
        R, pivots = rref(aug)
        self.ncols = M.ncols
        self.nrows = n
        self.pivots = [p for p in pivots if p < M.ncols]
        self.rank = len(self.pivots)
        self.R = [row[:M.ncols] for row in R.rows]
        self.T = [row[M.ncols:] for row in R.rows]

    def solve(self, b, field):
        """Minimal-support particular solution (free vars = 0), or None."""
        c = []
        for i in range(self.rank):
            acc = field.zero
            for j, t in enumerate(self.T[i]):
                if t:
                    acc = acc + t * b[j]
            c.append(acc)
        for i in range(self.rank, self.nrows):
            acc = field.zero
            for j, t in enumerate(self.T[i]):
                if t:
                    acc = acc + t * b[j]
            if not field.is_zero(acc):
                return None
        # reduced echelon with free variables pinned to zero
        x = [field.zero] * self.ncols
        for i, pc in enumerate(self.pivots):
            x[pc] = c[i]
        return x


def span_reduce(field, vectors):
    """Deterministic reduced basis of the span of the given vectors."""
    if not vectors:
        return []
    R, pivots = rref(Matrix(field, vectors, ncols=len(vectors[0])))
    return [R.rows[i] for i in range(len(pivots))]


def in_span(field, basis_rref_rows, pivots, v):
    """Membership test against a reduced echelon basis (rows, pivots)."""
    v = [field.coerce(x) for x in v]
    for row, pc in zip(basis_rref_rows, pivots):
        c = v[pc]
        if not field.is_zero(c):
            v = [a - c * b for a, b in zip(v, row)]
    return all(field.is_zero(x) for x in v)
