"""Regular normal algebraic Cartan connections and their invariants.

A connection is the 21 x dim(k) matrix of a filtration-preserving map
k -> g whose associated graded is the given embedding.  `Normalizer`
solves for the positive-homogeneity correction degree by degree: the
degree-d defect (horizontality over k^0 plus the codifferential of the
curvature chain) is affine-linear in the degree-d unknowns and its linear
part does not depend on the deformation parameters, so one rational
elimination per class serves every member of a family.

The symmetry dimension implements the formal-holonomy prescription as
the jet condition R(Y,Z) alpha(X_r) ... alpha(X_1) v = 0 for all words,
i.e. the largest alpha-invariant subspace of the common kernel of the
curvature endomorphisms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ._sparse import vaxpy, vclean
from .cohomology import HarmonicDecomposition, HarmonicProjector
from .exactmath import QQ, Matrix, RationalSolver, kernel_basis, rref
from .liealg import C3, FilteredLieAlgebra, GradedLieAlgebra, Subalgebra, change_field

MAX_DEFECT_DEGREE = 9

_FACT = [1, 1, 2, 6, 24, 120]


class CartanError(ValueError):
    pass


def killing_gram(c3: C3):
    """Trace-form pairing B(y_m, f_a) of p_+ against g_-; 8x8 over Q."""
    g = c3.alg
    ad = [g.ad(g.basis_vector(i)) for i in range(g.dim)]
    rows = []
    for m in c3.indices_pplus():
        row = []
        for a in c3.indices_neg():
            tr = Fraction(0)
            A, B = ad[m], ad[a]
            for i in range(g.dim):
                for j in range(g.dim):
                    if A.rows[i][j] and B.rows[j][i]:
                        tr += A.rows[i][j] * B.rows[j][i]
            row.append(tr)
        rows.append(row)
    return rows


def _invert_q(rows):
    n = len(rows)
    aug = Matrix(QQ, [list(r) + [Fraction(int(i == j)) for j in range(n)]
                      for i, r in enumerate(rows)], ncols=2 * n)
    R, pivots = rref(aug)
    if list(pivots) != list(range(n)):
        raise CartanError("degenerate pairing")
    return [row[n:] for row in R.rows]


@dataclass
class CartanContext:
    """Fixed C3 data shared by all connection computations over one field."""

    c3: C3                  # over Q
    field: object
    gF: GradedLieAlgebra    # g over the working field
    neg: list
    pplus: list
    gram: list
    gram_inv: list

    @classmethod
    def build(cls, c3: C3, field):
        gF = c3.alg if field is QQ or field == QQ else change_field(c3.alg, field)
        gram = killing_gram(c3)
        return cls(c3, field, gF, c3.indices_neg(), c3.indices_pplus(),
                   gram, _invert_q(gram))


class AlgebraicCartanConnection:
    """Filtration-preserving lift omega: k -> g of a graded embedding."""

    def __init__(self, ctx: CartanContext, k: FilteredLieAlgebra, omega_cols,
                 embedding_cols, normal=False):
        self.ctx = ctx
        self.k = k
        f = ctx.field
        self.omega = [vclean(f, {i: f.coerce(c) for i, c in col.items()})
                      for col in omega_cols]
        self.embedding = embedding_cols
        self.regular = True
        self.normal = normal
        self._check_shape()

    def _check_shape(self):
        g = self.ctx.c3.alg
        f = self.ctx.field
        for b, col in enumerate(self.omega):
            d = self.k.degrees[b]
            lead = self.embedding[b]
            for i, c in col.items():
                if g.degrees[i] < d:
                    raise CartanError("omega is not filtration preserving")
                if g.degrees[i] == d and not f.is_zero(c - f.coerce(lead.get(i, 0))):
                    raise CartanError("gr(omega) differs from the embedding")
        if len(kernel_basis(self.w_matrix())) != 0:
            raise CartanError("omega does not induce k/k^0 = g/p")

    def kneg(self):
        return [b for b in range(self.k.dim) if self.k.degrees[b] < 0]

    def w_matrix(self) -> Matrix:
        """Induced map k/k^0 -> g/p in negative-basis coordinates."""
        f = self.ctx.field
        rows = [[self.omega[b].get(i, f.zero) for b in self.kneg()]
                for i in self.ctx.neg]
        return Matrix(f, rows, ncols=len(self.kneg()))

    def curvature_raw(self):
        """Omega-bar(e_a, e_b) = [omega a, omega b] - omega([a,b]_k)."""
        f = self.ctx.field
        gF = self.ctx.gF
        out = {}
        for a in range(self.k.dim):
            for b in range(a + 1, self.k.dim):
                val = gF.bracket(self.omega[a], self.omega[b])
                for idx, c in self.k.bracket_basis(a, b).items():
                    vaxpy(f, val, -c, self.omega[idx])
                val = vclean(f, val)
                if val:
                    out[(a, b)] = val
        return out


def initial_connection(ctx: CartanContext, k: FilteredLieAlgebra, embedding_cols):
    """The tautological lift omega_0 = embedding (regular by construction)."""
    f = ctx.field
    cols = [{i: f.coerce(c) for i, c in col.items()} for col in embedding_cols]
    image = set()
    for col in cols:
        image.update(col)
    if not set(ctx.neg) <= image:
        raise CartanError("embedding does not contain g_-")
    return AlgebraicCartanConnection(ctx, k, cols, cols)


def horizontality_defect(conn: AlgebraicCartanConnection, raw=None):
    raw = conn.curvature_raw() if raw is None else raw
    k0 = {b for b in range(conn.k.dim) if conn.k.degrees[b] >= 0}
    return {(a, b): vec for (a, b), vec in raw.items() if a in k0 or b in k0}


def curvature_cochain(conn: AlgebraicCartanConnection, raw=None):
    """kappa as an antisymmetric array over (g/p)-indices, values in g."""
    ctx = conn.ctx
    f = ctx.field
    raw = conn.curvature_raw() if raw is None else raw
    kneg = conn.kneg()
    winv = _invert_field(conn.w_matrix())
    n = len(kneg)
    Q = [[{} for _ in range(n)] for _ in range(n)]
    for r in range(n):
        for s in range(r + 1, n):
            acc: dict = {}
            for c in range(n):
                wc = winv.rows[c][r]
                if f.is_zero(wc):
                    continue
                for d in range(n):
                    wd = winv.rows[d][s]
                    if f.is_zero(wd) or c == d:
                        continue
                    a, b = kneg[c], kneg[d]
                    vec = raw.get((min(a, b), max(a, b)))
                    if not vec:
                        continue
                    sgn = f.one if a < b else -f.one
                    vaxpy(f, acc, wc * wd * sgn, vec)
            acc = vclean(f, acc)
            Q[r][s] = acc
            Q[s][r] = {k: -c for k, c in acc.items()}
    return Q


def curvature_chain(conn: AlgebraicCartanConnection, raw=None):
    """kappa as a 2-chain {(y_m, y_n) m<n: g-vector} via the trace pairing."""
    ctx = conn.ctx
    f = ctx.field
    Q = curvature_cochain(conn, raw=raw)
    n = len(ctx.neg)
    H = ctx.gram_inv
    chain = {}
    for m in range(n):
        for nn in range(m + 1, n):
            acc: dict = {}
            for a in range(n):
                ha = H[a][m]
                if not ha:
                    continue
                for b in range(n):
                    hb = H[b][nn]
                    if not hb or not Q[a][b]:
                        continue
                    vaxpy(f, acc, f.coerce(ha * hb), Q[a][b])
            acc = vclean(f, acc)
            if acc:
                chain[(ctx.pplus[m], ctx.pplus[nn])] = acc
    return chain


def boundary_chain(ctx: CartanContext, chain: dict) -> dict:
    """Homology differential on chain data over ctx.field (Q constants)."""
    g = ctx.c3.alg
    f = ctx.field
    pplus = set(ctx.pplus)
    out: dict = {}

    def add(combo, coeff, vec):
        if f.is_zero(coeff) or not vec:
            return
        cur = out.setdefault(combo, {})
        vaxpy(f, cur, coeff, vec)
        if not cur:
            del out[combo]

    for combo, vec in chain.items():
        for a in range(len(combo)):
            for b in range(a + 1, len(combo)):
                w = g.bracket_basis(combo[a], combo[b])
                if not w:
                    continue
                rest = tuple(x for m, x in enumerate(combo) if m not in (a, b))
                for t, c in w.items():
                    if t not in pplus or t in rest:
                        continue
                    newc = tuple(sorted(rest + (t,)))
                    pos = newc.index(t)
                    add(newc, f.coerce(Fraction((-1) ** (a + b + pos)) * c), vec)
        for a in range(len(combo)):
            w = _qbracket_field(g, f, combo[a], vec)
            if w:
                rest = tuple(x for m, x in enumerate(combo) if m != a)
                add(rest, f.coerce(Fraction((-1) ** (a + 1))), w)
    return out


def _qbracket_field(gQ: GradedLieAlgebra, field, i: int, vec: dict) -> dict:
    """[e_i, vec] with rational structure constants against field scalars."""
    out: dict = {}
    for j, c in vec.items():
        for k, q in gQ.bracket_basis(i, j).items():
            cur = out.get(k, field.zero) + q * c
            if field.is_zero(cur):
                out.pop(k, None)
            else:
                out[k] = cur
    return out


def _invert_field(M: Matrix) -> Matrix:
    f = M.field
    n = M.nrows
    aug = Matrix(f, [list(M.rows[i]) + [f.one if j == i else f.zero for j in range(n)]
                     for i in range(n)], ncols=2 * n)
    R, pivots = rref(aug)
    if list(pivots) != list(range(n)):
        raise CartanError("singular matrix")
    return Matrix(f, [row[n:] for row in R.rows], ncols=n)


# -- normalization -----------------------------------------------------------


class Normalizer:
    """Finds the regular normal connection above a family of deformations.

    `ctx_base` and `kbar` live over the base field of the class (Q for
    the catalog classes, Q(alpha) for the embedded model tables); the
    connections handed to `normalize` may live over any extension.
    """

    def __init__(self, ctx_base: CartanContext, kbar: GradedLieAlgebra, embedding_cols,
                 unknown_order=None):
        self.ctx_q = ctx_base
        self.kbar = kbar
        bf = kbar.field
        self.embedding = [{i: bf.coerce(c) for i, c in col.items()}
                          for col in embedding_cols]
        self.unknown_order = unknown_order
        self._solvers: dict = {}

    def unknowns(self, d: int):
        g = self.ctx_q.c3.alg
        out = [(b, t) for b in range(self.kbar.dim) for t in range(g.dim)
               if g.degrees[t] == self.kbar.degrees[b] + d]
        if self.unknown_order is not None:
            import random
            random.Random(self.unknown_order).shuffle(out)
        return out

    def defect_rows(self, conn: AlgebraicCartanConnection, d: int, field, raw=None):
        """Degree-d defect: horizontality rows, then codifferential rows."""
        raw = conn.curvature_raw() if raw is None else raw
        g = self.ctx_q.c3.alg
        k = conn.k
        rows = []
        k0 = [b for b in range(k.dim) if k.degrees[b] >= 0]
        for a in k0:
            for b in range(k.dim):
                if a == b:
                    continue
                vec = raw.get((min(a, b), max(a, b)), {})
                sgn = field.one if a < b else -field.one
                for t in range(g.dim):
                    if g.degrees[t] - k.degrees[a] - k.degrees[b] == d:
                        rows.append(sgn * vec.get(t, field.zero))
        bnd = boundary_chain(conn.ctx, curvature_chain(conn, raw=raw))
        for m in self.ctx_q.pplus:
            for t in range(g.dim):
                if g.degrees[m] + g.degrees[t] == d:
                    rows.append(bnd.get((m,), {}).get(t, field.zero))
        return rows

    def _linear_solver(self, d: int):
        if d in self._solvers:
            return self._solvers[d]
        unknowns = self.unknowns(d)
        if not unknowns:
            self._solvers[d] = (None, [])
            return self._solvers[d]
        bf = self.kbar.field
        base = self._q_connection()
        d0 = self.defect_rows(base, d, bf)
        cols = []
        for u in unknowns:
            pert = self._q_connection(extra=u)
            du = self.defect_rows(pert, d, bf)
            cols.append([x - y for x, y in zip(du, d0)])
        M = Matrix.from_columns(bf, cols, nrows=len(d0))
        self._solvers[d] = (RationalSolver(M), unknowns)
        return self._solvers[d]

    def _q_connection(self, extra=None):
        bf = self.kbar.field
        cols = [dict(col) for col in self.embedding]
        if extra is not None:
            b, t = extra
            cols[b][t] = cols[b].get(t, bf.zero) + bf.one
        k = FilteredLieAlgebra(bf, self.kbar.labels, self.kbar.degrees,
                               self.kbar.brackets)
        return AlgebraicCartanConnection(self.ctx_q, k, cols, self.embedding)

    def normalize(self, conn: AlgebraicCartanConnection) -> AlgebraicCartanConnection:
        f = conn.ctx.field
        cols = [dict(c) for c in conn.omega]
        cur = conn
        for d in range(1, MAX_DEFECT_DEGREE + 1):
            defect = self.defect_rows(cur, d, f)
            if all(f.is_zero(x) for x in defect):
                continue
            solver, unknowns = self._linear_solver(d)
            if solver is None:
                raise CartanError(f"normalization obstruction at degree {d}: "
                                  "no unknowns left")
            sol = solver.solve([-x for x in defect], f)
            if sol is None:
                raise CartanError(f"normalization obstruction at degree {d}")
            for (b, t), c in zip(unknowns, sol):
                if not f.is_zero(c):
                    cols[b][t] = cols[b].get(t, f.zero) + c
            cur = AlgebraicCartanConnection(conn.ctx, conn.k, cols, conn.embedding)
        raw = cur.curvature_raw()
        if any(vclean(f, dict(v)) for v in horizontality_defect(cur, raw).values()):
            raise CartanError("normalization failed: curvature not horizontal")
        if any(vclean(f, dict(v)) for v in
               boundary_chain(cur.ctx, curvature_chain(cur, raw=raw)).values()):
            raise CartanError("normalization failed: curvature chain not a cycle")
        cur.normal = True
        return cur


def curvature(conn: AlgebraicCartanConnection):
    """The curvature chain; errors if omega is not horizontal over k^0."""
    f = conn.ctx.field
    raw = conn.curvature_raw()
    if any(vclean(f, dict(v)) for v in horizontality_defect(conn, raw).values()):
        raise CartanError("invalid connection: curvature not horizontal over k^0")
    chain = curvature_chain(conn, raw=raw)
    g = conn.ctx.c3.alg
    for (m, n), vec in chain.items():
        for t in vec:
            if g.degrees[m] + g.degrees[n] + g.degrees[t] < 1:
                raise CartanError("curvature has filtration degree < 1")
    return chain


# -- harmonic curvature ------------------------------------------------------


@dataclass
class HarmonicClass:
    scalar: object
    quintic: list            # coefficients c_j of z^j w^(5-j), j = 0..5

    def is_flat(self, field):
        return field.is_zero(self.scalar) and all(field.is_zero(c) for c in self.quintic)

    def to_json(self, field):
        return {"scalar": field.scalar_to_json(self.scalar),
                "quintic": [field.scalar_to_json(c) for c in self.quintic]}


def chain_blocks(ctx: CartanContext, dec: HarmonicDecomposition, chain: dict):
    f = ctx.field
    g = ctx.c3.alg
    cx = dec.complex
    blocks: dict = {}
    index: dict = {}
    for (m, n), vec in chain.items():
        for t, c in vec.items():
            if f.is_zero(c):
                continue
            deg = g.degrees[m] + g.degrees[n] + g.degrees[t]
            hw = tuple(g.weights[m][i] + g.weights[n][i] + g.weights[t][i]
                       for i in range(3))
            key = (deg, hw)
            if key not in blocks:
                keys = cx.block_keys(2, key)
                blocks[key] = [f.zero] * len(keys)
                index[key] = {kk: p for p, kk in enumerate(keys)}
            blocks[key][index[key][((m, n), t)]] = c
    return blocks


def harmonic_curvature(ctx: CartanContext, dec: HarmonicDecomposition,
                       chain: dict) -> HarmonicClass:
    """Class of a 2-cycle in H_2(p_+,g)^1 split into (scalar, quintic)."""
    f = ctx.field
    if any(vclean(f, dict(v)) for v in boundary_chain(ctx, chain).values()):
        raise CartanError("chain is not a cycle")
    proj = HarmonicProjector(dec, f)
    scalar, quintic = proj.project(chain_blocks(ctx, dec, chain))
    return HarmonicClass(scalar, quintic)


# -- binary quintics ---------------------------------------------------------


def _pnorm(field, p):
    while p and field.is_zero(p[-1]):
        p.pop()
    return p


def _pdivmod(field, a, b):
    a = list(a)
    q = [field.zero] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b):
        c = a[-1] / b[-1]
        s = len(a) - len(b)
        q[s] = q[s] + c
        for i, bc in enumerate(b):
            a[s + i] = a[s + i] - c * bc
        _pnorm(field, a)
        if not a:
            break
    return q, a


def _pgcd(field, a, b):
    a = _pnorm(field, list(a))
    b = _pnorm(field, list(b))
    while b:
        _, r = _pdivmod(field, a, b)
        a, b = b, _pnorm(field, r)
    if a:
        lc = a[-1]
        a = [x / lc for x in a]
    return a


def _pdiff(field, p):
    return _pnorm(field, [p[j] * Fraction(j) for j in range(1, len(p))])


def classify_quintic(field, coeffs) -> str:
    """Root multiplicity pattern of the binary quintic sum_j c_j z^j w^(5-j).

    Yun square-free decomposition over the coefficient field; the root at
    (1:0) is the cofactor power of w.  Returns N / IV / F for the patterns
    [5] / [4,1] / [3,2], otherwise the pattern itself.
    """
    coeffs = [field.coerce(c) for c in coeffs]
    p = _pnorm(field, list(coeffs))
    if not p:
        raise CartanError("zero quintic has no root pattern")
    mults = []
    if 6 - len(p):
        mults.append(6 - len(p))
    if len(p) > 1:
        dp = _pdiff(field, p)
        g = _pgcd(field, p, dp)
        w, _ = _pdivmod(field, p, g)
        y, _ = _pdivmod(field, dp, g)
        i = 1
        while len(w) > 1:
            dw = _pdiff(field, w)
            z = [field.zero] * max(len(y), len(dw))
            for j, c in enumerate(y):
                z[j] = z[j] + c
            for j, c in enumerate(dw):
                z[j] = z[j] - c
            z = _pnorm(field, z)
            if not z:
                mults.extend([i] * (len(w) - 1))
                break
            a = _pgcd(field, w, z)
            if len(a) > 1:
                mults.extend([i] * (len(a) - 1))
            w, _ = _pdivmod(field, w, a)
            y, _ = _pdivmod(field, z, a)
            i += 1
    pattern = sorted(mults, reverse=True)
    if pattern == [5]:
        return "N"
    if pattern == [4, 1]:
        return "IV"
    if pattern == [3, 2]:
        return "F"
    return "[" + ",".join(str(m) for m in pattern) + "]"


# -- stabilizers --------------------------------------------------------------


def g0_class_action(c3: C3, dec: HarmonicDecomposition):
    """Action of the g_0 basis on (scalar, c_0..c_5) class coordinates."""
    g = c3.alg
    proj = HarmonicProjector(dec, QQ)
    ctxq = CartanContext.build(c3, QQ)
    g0 = c3.indices_deg(0)
    chains = [dec.scalar_class] + list(dec.quintic_classes)
    scales = [Fraction(1)] + [Fraction(_FACT[5], _FACT[j]) for j in range(6)]
    mats = []
    for z in g0:
        cols = []
        for idx, ch in enumerate(chains):
            moved = _chain_act(c3, g.basis_vector(z), ch)
            data = {cmb: dict(v) for cmb, v in moved.data.items()}
            scalar, quintic = proj.project(chain_blocks(ctxq, dec, data))
            col = [scalar] + list(quintic)
            cols.append([x / scales[idx] for x in col])
        mats.append(Matrix.from_columns(QQ, cols, nrows=7))
    return g0, mats


def _chain_act(c3: C3, z: dict, chain):
    from .cohomology import HomChain
    g = c3.alg
    f = c3.field
    out: dict = {}
    for combo, vec in chain.data.items():
        for n, i in enumerate(combo):
            w = g.bracket(z, g.basis_vector(i))
            rest = combo[:n] + combo[n + 1:]
            for t, cc in w.items():
                if t in rest:
                    continue
                newc = tuple(sorted(rest + (t,)))
                sgn = (-1) ** (n + newc.index(t))
                cur = out.setdefault(newc, {})
                vaxpy(f, cur, f.coerce(sgn) * cc, vec)
        w = g.bracket(z, vec)
        if w:
            cur = out.setdefault(combo, {})
            vaxpy(f, cur, f.one, w)
    return HomChain(c3, chain.q, out)


def quintic_stabilizer(c3: C3, dec: HarmonicDecomposition, quintic_coeffs) -> Subalgebra:
    """Annihilator in g_0 of a nonzero quintic-block class (over Q)."""
    if all(c == 0 for c in quintic_coeffs):
        raise CartanError("stabilizer of the zero quintic is all of g_0")
    g0, mats = g0_class_action(c3, dec)
    cls = [Fraction(0)] + [Fraction(c) for c in quintic_coeffs]
    cols = [m.matvec(cls) for m in mats]
    M = Matrix.from_columns(QQ, cols, nrows=7)
    vectors = []
    for v in kernel_basis(M):
        vec: dict = {}
        for n, c in enumerate(v):
            if c:
                vec[g0[n]] = vec.get(g0[n], Fraction(0)) + c
        vectors.append(vec)
    return Subalgebra(c3.alg, vectors)


# -- symmetry dimension --------------------------------------------------------


def symmetry_dimension(conn: AlgebraicCartanConnection) -> int:
    """dim of the formal-holonomy kernel = dim of the symmetry algebra.

    Over a function field the result is the generic dimension.  The sign
    of the curvature insertion in the modified tractor operator is pinned
    by requiring the tautological sections omega(k) to be parallel (they
    are symmetries of the model); with the chain conventions used here
    that gives alpha(X) = ad(omega X) - kappa(omega X, .).
    """
    ctx = conn.ctx
    f = ctx.field
    g = ctx.c3.alg
    n = g.dim
    Q = curvature_cochain(conn)
    negpos = {gi: r for r, gi in enumerate(ctx.neg)}

    def kappa_pair(v: dict, j: int) -> dict:
        r2 = negpos.get(j)
        if r2 is None:
            return {}
        acc: dict = {}
        for gi, c in v.items():
            r1 = negpos.get(gi)
            if r1 is None or r1 == r2 or not Q[r1][r2]:
                continue
            vaxpy(f, acc, -c, Q[r1][r2])
        return acc

    alphas = []
    for a in range(conn.k.dim):
        om = conn.omega[a]
        cols = []
        for j in range(n):
            col = _qbracket_field_neg(g, f, om, j)
            for t, c in kappa_pair(om, j).items():
                cur = col.get(t, f.zero) + c
                if f.is_zero(cur):
                    col.pop(t, None)
                else:
                    col[t] = cur
            cols.append([col.get(t, f.zero) for t in range(n)])
        alphas.append(Matrix.from_columns(f, cols, nrows=n))

    def alpha_of(vec: dict) -> Matrix:
        rows = [[f.zero] * n for _ in range(n)]
        for b, c in vec.items():
            if f.is_zero(c):
                continue
            A = alphas[b]
            for i in range(n):
                arow = A.rows[i]
                row = rows[i]
                for j in range(n):
                    if not f.is_zero(arow[j]):
                        row[j] = row[j] + c * arow[j]
        return Matrix(f, rows, ncols=n)

    k = conn.k
    Rrows = []
    for a in range(k.dim):
        for b in range(a + 1, k.dim):
            AB = alphas[a].mul(alphas[b])
            BA = alphas[b].mul(alphas[a])
            C = alpha_of(k.bracket_basis(a, b))
            for i in range(n):
                row = [AB.rows[i][j] - BA.rows[i][j] - C.rows[i][j] for j in range(n)]
                if any(not f.is_zero(x) for x in row):
                    Rrows.append(row)
    if not Rrows:
        return n
    basis = _kernel_compressed(f, Rrows, n)
    # largest alpha-invariant subspace of the common curvature kernel
    while basis:
        R, pivots = rref(Matrix(f, [list(col) for col in basis], ncols=n))
        red_rows = [R.rows[i] for i in range(len(pivots))]

        def residual(v):
            vec = list(v)
            for row, pc in zip(red_rows, pivots):
                c = vec[pc]
                if not f.is_zero(c):
                    vec = [x - c * y for x, y in zip(vec, row)]
            return vec

        nb = len(basis)
        rows = []
        for A in alphas:
            imgs = [residual(A.matvec(col)) for col in basis]
            for coord in range(n):
                row = [imgs[m][coord] for m in range(nb)]
                if any(not f.is_zero(x) for x in row):
                    rows.append(row)
        if not rows:
            break
        ker = kernel_basis(Matrix(f, rows, ncols=nb))
        if len(ker) == nb:
            break
        newbasis = []
        for kv in ker:
            col = [f.zero] * n
            for m in range(nb):
                if not f.is_zero(kv[m]):
                    for i in range(n):
                        col[i] = col[i] + basis[m][i] * kv[m]
            if any(not f.is_zero(x) for x in col):
                newbasis.append(col)
        basis = newbasis
    return len(basis)


def _qbracket_field_neg(gQ, field, vec, j):
    """[vec, e_j] for a field-valued vec against basis e_j."""
    out: dict = {}
    for gi, c in vec.items():
        for k, q in gQ.bracket_basis(gi, j).items():
            cur = out.get(k, field.zero) + c * q
            if field.is_zero(cur):
                out.pop(k, None)
            else:
                out[k] = cur
    return out


def _kernel_compressed(field, rows, ncols, seed=11):
    """Exact kernel of a tall stack: random row compression + verification."""
    import random
    rows = [r for r in rows if any(not field.is_zero(x) for x in r)]
    if len(rows) <= 2 * ncols:
        return kernel_basis(Matrix(field, rows, ncols=ncols))
    rng = random.Random(seed)
    sample = [rows[i] for i in rng.sample(range(len(rows)), min(len(rows), ncols + 4))]
    while True:
        ker = kernel_basis(Matrix(field, sample, ncols=ncols))
        if not ker:
            return []
        bad = None
        for r in rows:
            for v in ker:
                acc = field.zero
                for a, b in zip(r, v):
                    if not field.is_zero(a) and not field.is_zero(b):
                        acc = acc + a * b
                if not field.is_zero(acc):
                    bad = r
                    break
            if bad is not None:
                break
        if bad is None:
            return ker
        sample.append(bad)
