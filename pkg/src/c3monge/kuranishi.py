"""Graded nilpotent DGLAs of filtered deformations and Kuranishi families.

The DGLA of a graded subalgebra k containing g_- is L^p_i =
C^(p+1)_i(k, k) for internal weights i >= 1 (restricted, when a torus is
supplied, to the invariant subcomplex).  Everything is nilpotent: weights
are bounded by 6, so exponentials, inverses of Phi and the gauge
normalization are finite weight-by-weight recursions with no truncation
error anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from ._sparse import vaxpy
from .cohomology import (
    AdjointComplex,
    Cochain,
    bracket_cochain,
    dgla_differential,
    nr_bracket,
)
from .exactmath import FunctionField, Matrix, rref
from .liealg import FilteredLieAlgebra, GradedLieAlgebra, LieAlgebraError, change_field

MAX_WEIGHT = 6


class DeformationError(ValueError):
    pass


@dataclass
class SplitBlock:
    """Splitting L = B + H + C on one (cochain degree, weight, h-weight) block."""

    keys: list
    b_basis: list          # images d(c) of the previous block's C-basis
    h_reps: list
    c_basis: list
    prev_c: list           # C-basis of the previous block, aligned with b_basis
    solver_inv: Matrix     # inverse of [b_basis | h_reps | c_basis]


class Dgla:
    """The deformation DGLA of a graded subalgebra, with a fixed splitting.

    `c_seeds` maps a block (q, (i, hweight)) to vectors tried first when
    extending the cycle space to the complement C; this is how a family
    pins its corrector cochains inside C so that the representing section
    xi takes its normal form.
    """

    def __init__(self, alg: GradedLieAlgebra, invariance=(), check=True, c_seeds=None):
        if check:
            neg_dims = [len(alg.degree_indices(d)) for d in (-3, -2, -1)]
            if neg_dims != [3, 2, 3]:
                raise DeformationError("algebra does not contain g_- with dims (3,2,3)")
            if not alg.grading_ok():
                raise DeformationError("not a graded algebra")
        self.alg = alg
        self.f = alg.field
        self.cx = AdjointComplex(alg, invariance)
        self.mu = bracket_cochain(alg)
        self.c_seeds = dict(c_seeds) if c_seeds else {}
        self._blocks: dict = {}

    # -- block bookkeeping ------------------------------------------------

    def positive_blocks(self, q: int):
        """[(i, hw)] keys with internal weight >= 1 at cochain degree q."""
        return [key for key in self.cx.keys(q) if key[0] >= 1]

    def _dgla_d_matrix(self, q, key):
        mat, src, tgt = self.cx.d_matrix(q, key[0], key[1])
        if q % 2 == 0:
            mat = Matrix(self.f, [[-x for x in row] for row in mat.rows],
                         ncols=mat.ncols)
        return mat, src, tgt

    def block(self, q: int, key) -> SplitBlock:
        """Splitting data; built bottom-up along the (i, hw) tower."""
        cache = (q, key)
        if cache in self._blocks:
            return self._blocks[cache]
        mat, src, tgt = self._dgla_d_matrix(q, key)
        n = len(src)
        if q == 1:
            b_basis, prev_c = [], []
        else:
            prev = self.block(q - 1, key)
            pm, psrc, ptgt = self._dgla_d_matrix(q - 1, key)
            b_basis = []
            prev_c = []
            for c in prev.c_basis:
                img = pm.matvec(c)
                b_basis.append(img)
                prev_c.append(c)
        # cycles: kernel of d on this block
        from .exactmath import kernel_basis
        cycles = kernel_basis(mat) if n else []
        # echelon the boundaries, extend by cycles (H reps), then by
        # coordinate vectors (C basis)
        rows = []
        h_reps = []
        c_basis = []
        cur_rows, cur_piv = [], []

        def try_add(vec):
            v = list(vec)
            for row, pc in zip(cur_rows, cur_piv):
                cc = v[pc]
                if not self.f.is_zero(cc):
                    v = [a - cc * b for a, b in zip(v, row)]
            nz = next((m for m, x in enumerate(v) if not self.f.is_zero(x)), None)
            if nz is None:
                return False
            piv = v[nz]
            cur_rows.append([x / piv for x in v])
            cur_piv.append(nz)
            return True

        for b in b_basis:
            if not try_add(b):
                raise DeformationError("boundary basis is degenerate")
        for z in cycles:
            if try_add(z):
                h_reps.append(list(cur_rows[-1]))
        for seed in self.c_seeds.get((q, key), []):
            if try_add(list(seed)):
                c_basis.append(list(seed))
        for m in range(n):
            e = [self.f.zero] * n
            e[m] = self.f.one
            if try_add(e):
                c_basis.append(e)
        cols = b_basis + h_reps + c_basis
        if len(cols) != n:
            raise DeformationError("splitting does not fill the block")
        if n:
            M = Matrix.from_columns(self.f, cols, nrows=n)
            inv = _invert(M)
        else:
            inv = Matrix(self.f, [], ncols=0)
        blk = SplitBlock(src, b_basis, h_reps, c_basis, prev_c, inv)
        self._blocks[cache] = blk
        return blk

    # -- cochain <-> block vectors -----------------------------------------

    def to_blocks(self, phi: Cochain) -> dict:
        """{(q, i, hw): coefficient vector}; errors on weight <= 0 parts."""
        out: dict = {}
        degs = self.alg.degrees
        index: dict = {}
        for combo, vec in phi.data.items():
            s = sum(degs[i] for i in combo)
            for k, c in vec.items():
                i = degs[k] - s
                if i < 1:
                    raise DeformationError("cochain has a weight <= 0 component")
                hw = self.cx._hweight(combo, k)
                key = (phi.p, i, hw)
                if key not in out:
                    keys = self.cx.keys(phi.p).get((i, hw))
                    if keys is None:
                        raise DeformationError("cochain leaves the invariant subcomplex")
                    out[key] = [self.f.zero] * len(keys)
                    index[key] = {kk: m for m, kk in enumerate(keys)}
                pos = index[key].get((combo, k))
                if pos is None:
                    raise DeformationError("cochain leaves the invariant subcomplex")
                out[key][pos] = c
        return out

    def from_blocks(self, q: int, blocks: dict) -> Cochain:
        data: dict = {}
        for (qq, i, hw), vec in blocks.items():
            keys = self.cx.keys(qq)[(i, hw)]
            for (combo, k), c in zip(keys, vec):
                if not self.f.is_zero(c):
                    data.setdefault(combo, {})[k] = c
        return Cochain(self.alg, q, data)

    # -- DGLA operations ----------------------------------------------------

    def d(self, phi: Cochain) -> Cochain:
        return dgla_differential(phi)

    def bracket(self, phi: Cochain, psi: Cochain) -> Cochain:
        return nr_bracket(phi, psi)

    def _split_parts(self, phi: Cochain):
        """Per block: coefficients in the [B | H | C] basis."""
        parts = {}
        for (q, i, hw), vec in self.to_blocks(phi).items():
            blk = self.block(q, (i, hw))
            coeffs = blk.solver_inv.matvec(vec)
            parts[(q, i, hw)] = (blk, coeffs)
        return parts

    def delta(self, phi: Cochain) -> Cochain:
        """The homotopy: (d|_C)^(-1) after projecting onto boundaries."""
        out_blocks: dict = {}
        for (q, i, hw), (blk, coeffs) in self._split_parts(phi).items():
            nb = len(blk.b_basis)
            if not nb:
                continue
            prev_keys = self.cx.keys(q - 1)[(i, hw)]
            vec = [self.f.zero] * len(prev_keys)
            for m in range(nb):
                c = coeffs[m]
                if not self.f.is_zero(c):
                    for pos, x in enumerate(blk.prev_c[m]):
                        vec[pos] = vec[pos] + c * x
            out_blocks[(q - 1, i, hw)] = vec
        return self.from_blocks(phi.p - 1, out_blocks)

    def _proj(self, phi: Cochain, which: str) -> Cochain:
        out_blocks: dict = {}
        for (q, i, hw), (blk, coeffs) in self._split_parts(phi).items():
            nb, nh = len(blk.b_basis), len(blk.h_reps)
            sel = {"B": (0, nb), "H": (nb, nb + nh),
                   "C": (nb + nh, len(coeffs))}[which]
            basis = {"B": blk.b_basis, "H": blk.h_reps, "C": blk.c_basis}[which]
            vec = [self.f.zero] * len(blk.keys)
            nonzero = False
            for m in range(*sel):
                c = coeffs[m]
                if not self.f.is_zero(c):
                    nonzero = True
                    for pos, x in enumerate(basis[m - sel[0]]):
                        vec[pos] = vec[pos] + c * x
            if nonzero:
                out_blocks[(q, i, hw)] = vec
        return self.from_blocks(phi.p, out_blocks)

    def proj_boundaries(self, phi):
        return self._proj(phi, "B")

    def proj_harmonic(self, phi):
        return self._proj(phi, "H")

    def proj_complement(self, phi):
        return self._proj(phi, "C")

    def harmonic_coordinates(self, phi: Cochain):
        """(coords aligned with h1_data(), leftover flag).

        The flag reports any component outside the span of the chosen
        H^1 representatives.
        """
        parts = self._split_parts(phi)
        per_block: dict = {}
        rest = False
        for (q, i, hw), (blk, coeffs) in parts.items():
            nb, nh = len(blk.b_basis), len(blk.h_reps)
            if q != 2:
                rest = rest or any(not self.f.is_zero(c) for c in coeffs)
                continue
            per_block[(i, hw)] = coeffs[nb:nb + nh]
            if any(not self.f.is_zero(c) for c in coeffs[:nb]) or \
               any(not self.f.is_zero(c) for c in coeffs[nb + nh:]):
                rest = True
        coords = []
        counters: dict = {}
        for (i, hw, _rep) in self.h1_data():
            m = counters.get((i, hw), 0)
            counters[(i, hw)] = m + 1
            vals = per_block.get((i, hw))
            coords.append(vals[m] if vals is not None else self.f.zero)
        return coords, rest

    # -- cohomology of the DGLA ----------------------------------------------

    def h_blocks(self, p: int):
        """[(i, hw, representative Cochain)] for H^p(L), DGLA degree p."""
        q = p + 1
        out = []
        for key in self.positive_blocks(q):
            blk = self.block(q, key)
            for rep in blk.h_reps:
                out.append((key[0], key[1],
                            self.from_blocks(q, {(q, key[0], key[1]): rep})))
        return out

    def h1_data(self):
        return self.h_blocks(1)

    def h_dim(self, p: int) -> int:
        return len(self.h_blocks(p))

    def zero_cochain(self, p: int) -> Cochain:
        return Cochain(self.alg, p + 1)


def _invert(M: Matrix) -> Matrix:
    f = M.field
    n = M.nrows
    aug = Matrix(f, [list(M.rows[i]) + [f.one if j == i else f.zero for j in range(n)]
                     for i in range(n)], ncols=2 * n)
    R, pivots = rref(aug)
    if list(pivots) != list(range(n)):
        raise DeformationError("singular block solver")
    return Matrix(f, [row[n:] for row in R.rows], ncols=n)


def build_dgla(alg: GradedLieAlgebra, invariance=(), c_seeds=None) -> Dgla:
    """The graded nilpotent DGLA of filtered deformations of `alg`."""
    return Dgla(alg, invariance, c_seeds=c_seeds)


# -- Maurer-Cartan, gauge ---------------------------------------------------


def mc_residual(L: Dgla, x: Cochain) -> Cochain:
    """dx + [x,x]/2; zero iff x is Maurer-Cartan."""
    return L.d(x) + nr_bracket(x, x).scale(Fraction(1, 2))


def weight_parts(phi: Cochain) -> dict:
    return phi.weight_components()


def gauge_act(L: Dgla, y: Cochain, x: Cochain) -> Cochain:
    """exp(y) * x via the nilpotent series on the affine line d + L^1."""
    f = L.f
    step = nr_bracket(y, x) - L.d(y)          # [y, x] - dy
    total = x
    n = 1
    fact = 1
    while not step.is_zero():
        total = total + step.scale(Fraction(1, fact))
        step = nr_bracket(y, step)
        n += 1
        fact *= n
        if n > MAX_WEIGHT + 2:
            raise DeformationError("gauge series failed to terminate")
    return total


def endo_matrix(alg: GradedLieAlgebra, y: Cochain) -> Matrix:
    """A 1-cochain as an endomorphism matrix of the underlying space."""
    f = alg.field
    cols = []
    for i in range(alg.dim):
        v = y.value((i,))
        cols.append([v.get(k, f.zero) for k in range(alg.dim)])
    return Matrix.from_columns(f, cols, nrows=alg.dim)


def exp_matrix(M: Matrix) -> Matrix:
    f = M.field
    n = M.nrows
    out = Matrix.identity(f, n)
    term = Matrix.identity(f, n)
    k = 0
    while True:
        term = term.mul(M)
        k += 1
        if all(f.is_zero(x) for row in term.rows for x in row):
            break
        scaled = Matrix(f, [[x * Fraction(1, factorial(k)) for x in row] for row in term.rows],
                        ncols=n)
        out = Matrix(f, [[a + b for a, b in zip(r1, r2)]
                         for r1, r2 in zip(out.rows, scaled.rows)], ncols=n)
        if k > n:
            raise DeformationError("matrix exponential of a non-nilpotent map")
    return out


def log_matrix(M: Matrix) -> Matrix:
    """Logarithm of a unipotent matrix (finite series)."""
    f = M.field
    n = M.nrows
    N = Matrix(f, [[M.rows[i][j] - (f.one if i == j else f.zero) for j in range(n)]
                   for i in range(n)], ncols=n)
    out = Matrix.zeros(f, n, n)
    term = Matrix.identity(f, n)
    k = 0
    while True:
        term = term.mul(N)
        k += 1
        if all(f.is_zero(x) for row in term.rows for x in row):
            break
        sign = Fraction((-1) ** (k + 1), k)
        out = Matrix(f, [[a + sign * b for a, b in zip(r1, r2)]
                         for r1, r2 in zip(out.rows, term.rows)], ncols=n)
        if k > n:
            raise DeformationError("matrix logarithm of a non-unipotent map")
    return out


def matrix_to_endo_cochain(alg: GradedLieAlgebra, M: Matrix) -> Cochain:
    data = {}
    f = alg.field
    for i in range(alg.dim):
        vec = {k: M.rows[k][i] for k in range(alg.dim) if not f.is_zero(M.rows[k][i])}
        if vec:
            data[(i,)] = vec
    return Cochain(alg, 1, data)


def gauge_act_transport(L: Dgla, y: Cochain, x: Cochain) -> Cochain:
    """The same gauge action computed as conjugation of the deformed bracket.

    With u = exp(y) as a unipotent endomorphism, u * x is defined by
    (mu + u*x)(a, b) = u((mu + x)(u^(-1) a, u^(-1) b)).
    """
    alg = L.alg
    f = alg.field
    u = exp_matrix(endo_matrix(alg, y))
    uinv = exp_matrix(endo_matrix(alg, y.scale(-f.one)))
    mu_plus_x = L.mu + x
    out = {}
    n = alg.dim
    ucols = [ {k: uinv.rows[k][i] for k in range(n) if not f.is_zero(uinv.rows[k][i])}
              for i in range(n) ]
    for a in range(n):
        for b in range(a + 1, n):
            val = mu_plus_x.apply([ucols[a], ucols[b]])
            if not val:
                continue
            img: dict = {}
            for k, c in val.items():
                for kk in range(n):
                    if not f.is_zero(u.rows[kk][k]):
                        vaxpy(f, img, c * u.rows[kk][k], {kk: f.one})
            img = {k: c for k, c in img.items() if not f.is_zero(c)}
            mu_ab = alg.bracket_basis(a, b)
            diff = dict(img)
            for k, c in mu_ab.items():
                vaxpy(f, diff, -f.one, {k: c})
            diff = {k: c for k, c in diff.items() if not f.is_zero(c)}
            if diff:
                out[(a, b)] = diff
    return Cochain(alg, 2, out)


def phi_map(L: Dgla, x: Cochain) -> Cochain:
    """Phi(x) = x + delta[x,x]/2."""
    return x + L.delta(nr_bracket(x, x)).scale(Fraction(1, 2))


def phi_inverse(L: Dgla, y: Cochain) -> Cochain:
    """Solve x + delta[x,x]/2 = y weight by weight (exact, finite)."""
    yw = y.weight_components()
    xw: dict = {}
    for i in range(1, MAX_WEIGHT + 1):
        cur = yw.get(i, L.zero_cochain(1))
        if xw:
            acc = None
            for a, xa in xw.items():
                for b, xb in xw.items():
                    if a + b == i:
                        term = nr_bracket(xa, xb)
                        acc = term if acc is None else acc + term
            if acc is not None and not acc.is_zero():
                cur = cur - L.delta(acc).scale(Fraction(1, 2))
        if not cur.is_zero():
            xw[i] = cur
    out = L.zero_cochain(1)
    for i in sorted(xw):
        out = out + xw[i]
    return out


def gauge_normalize(L: Dgla, x: Cochain):
    """Find y with delta(exp(y) * x) = 0; returns (y, m, pi_x).

    `m` holds the coordinates of pi(x) = Phi(exp(y) * x) along the chosen
    H^1 representatives, block by block; `pi_x` is the cochain itself.
    Requires H^0(L) = 0 so that y is unique in C^0 = L^0.
    """
    if L.h_dim(0) != 0:
        raise DeformationError("H^0(L) != 0: gauge normalization needs a free action")
    f = L.f
    y = L.zero_cochain(0)
    for i in range(1, MAX_WEIGHT + 1):
        z = gauge_act(L, y, x)
        zi = z.weight_components().get(i)
        if zi is None:
            continue
        yi = L.delta(zi)
        if not yi.is_zero():
            y = y + yi
    z = gauge_act(L, y, x)
    if not L.delta(z).is_zero():
        raise DeformationError("gauge normalization did not converge")
    pi_x = phi_map(L, z)
    coords, rest = L.harmonic_coordinates(pi_x)
    if rest:
        raise DeformationError("projection left the embedded H^1")
    return y, coords, pi_x


# -- Kuranishi families ------------------------------------------------------


@dataclass
class KuranishiFamily:
    """Global Kuranishi data: coordinates on H^1, xi, and obstructions."""

    dgla: Dgla
    coords: list                 # coordinate names
    coord_weights: list          # internal weights
    coord_hweights: list
    reps: list                   # H^1 representative cochains, aligned
    field: object                # the working field (includes the coordinates)
    xi: Cochain                  # Phi^(-1) of the generic point, over `field`
    obstructions: list           # polynomial scalars whose zero locus is M

    def xi_at(self, values: dict) -> Cochain:
        """xi with coordinates substituted (values in the dgla's field)."""
        from .exactmath import substitute
        f = self.dgla.f
        images = {name: values[name] for name in self.field.params}
        data = {}
        for combo, vec in self.xi.data.items():
            for k, c in vec.items():
                v = substitute(c, images, f)
                if not f.is_zero(v):
                    data.setdefault(combo, {})[k] = v
        return Cochain(self.dgla.alg, 2, data)

    def to_json(self) -> dict:
        ff = self.field
        return {
            "coordinates": [
                {"name": n, "weight": w, "hweight": [str(x) for x in hw]}
                for n, w, hw in zip(self.coords, self.coord_weights, self.coord_hweights)
            ],
            "obstructions": [ff.scalar_to_json(p) for p in self.obstructions],
            "xi": [
                {"args": list(combo), "target": k, "coeff": ff.scalar_to_json(c)}
                for combo in sorted(self.xi.data)
                for k, c in sorted(self.xi.data[combo].items())
            ],
        }


def kuranishi_family(L: Dgla, coord_names=None, reps=None) -> KuranishiFamily:
    """Coordinates on H^1(L), xi = Phi^(-1), and the obstruction polynomials.

    The DGLA must live over a FunctionField containing one parameter per
    H^1 class (plus any family parameters); `coord_names` fixes which.
    """
    if L.h_dim(0) != 0:
        raise DeformationError("H^0(L) != 0: no global Kuranishi family")
    h1 = L.h1_data() if reps is None else reps
    if coord_names is None:
        coord_names = [f"c{n+1}" for n in range(len(h1))]
    if len(coord_names) != len(h1):
        raise DeformationError("one coordinate name per H^1 class required")
    f = L.f
    if not isinstance(f, FunctionField) or any(n not in f.params for n in coord_names):
        raise DeformationError("DGLA field must contain the Kuranishi coordinates")
    x = L.zero_cochain(1)
    for name, (_i, _hw, rep) in zip(coord_names, h1):
        x = x + rep.scale(f.gen(name))
    xi = phi_inverse(L, x)
    # obstruction: the H + C part of [xi, xi] (the B part is killed by
    # construction when solving the MC equation degree by degree)
    sq = nr_bracket(xi, xi)
    obst_cochain = L.proj_harmonic(sq) + L.proj_complement(sq)
    obstructions = []
    for (_q, _i, _hw), vec in sorted(L.to_blocks(obst_cochain).items()):
        for c in vec:
            if not f.is_zero(c):
                obstructions.append(c)
    return KuranishiFamily(
        dgla=L,
        coords=list(coord_names),
        coord_weights=[i for (i, _hw, _r) in h1],
        coord_hweights=[hw for (_i, hw, _r) in h1],
        reps=[r for (_i, _hw, r) in h1],
        field=f,
        xi=xi,
        obstructions=obstructions,
    )


def square_zero_representative(L: Dgla, rep: Cochain, block_key):
    """A cocycle rep + d(beta) of the same class with vanishing self-bracket.

    Solves the small quadratic system in the boundary-shift coefficients
    (sympy, rational solutions only); returns None when no rational shift
    exists.  Used to put two-parameter families in their normal form.
    """
    import sympy

    f = L.f
    q, key = block_key
    blk = L.block(q, key)
    shifts = [L.from_blocks(q, {(q, key[0], key[1]): b}) for b in blk.b_basis]
    base = nr_bracket(rep, rep)
    if base.is_zero():
        return rep
    lin = [nr_bracket(rep, s).scale(f.coerce(2)) for s in shifts]
    quad = {}
    for m in range(len(shifts)):
        for n in range(m, len(shifts)):
            br = nr_bracket(shifts[m], shifts[n])
            if not br.is_zero():
                quad[(m, n)] = br.scale(f.coerce(1 if m == n else 2))
    slots = set(base.support_keys())
    for c in lin:
        slots.update(c.support_keys())
    for c in quad.values():
        slots.update(c.support_keys())
    syms = sympy.symbols(f"b0:{len(shifts)}")

    def coeff(coch, slot):
        combo, k = slot
        v = coch.data.get(combo, {}).get(k, f.zero)
        if not isinstance(v, Fraction):
            v = v.constant_value() if hasattr(v, "constant_value") else Fraction(v)
        return sympy.Rational(v.numerator, v.denominator)

    eqs = []
    for slot in sorted(slots):
        expr = coeff(base, slot)
        for m, c in enumerate(lin):
            expr += coeff(c, slot) * syms[m]
        for (m, n), c in quad.items():
            expr += coeff(c, slot) * syms[m] * syms[n]
        eqs.append(expr)
    sols = sympy.solve(eqs, list(syms), dict=True)
    rational = []
    for sol in sols:
        vals = []
        ok = True
        for s in syms:
            v = sympy.nsimplify(sol.get(s, sympy.Integer(0)))
            if not v.is_rational:
                ok = False
                break
            vals.append(Fraction(int(v.p), int(v.q)))
        if ok:
            rational.append(tuple(vals))
    if not rational:
        return None
    vals = sorted(rational)[0]
    out = rep
    for m, v in enumerate(vals):
        if v:
            out = out + shifts[m].scale(f.coerce(v))
    assert nr_bracket(out, out).is_zero()
    return out


def corrector_normal_form(L: Dgla, u1: Cochain, u2: Cochain):
    """u3 with d u3 = -[u1, u2] and [u1, u3] = [u2, u3] = 0, or None.

    u1, u2 must be square-zero cocycles; the shift freedom is linear, so
    this is a plain solve over the coboundaries of the target block.
    """
    f = L.f
    u30 = L.delta(nr_bracket(u1, u2)).scale(-f.one)
    r1 = nr_bracket(u1, u30)
    r2 = nr_bracket(u2, u30)
    if r1.is_zero() and r2.is_zero():
        return u30
    # beta ranges over 1-cochains in the block d(beta) shares with u3
    blocks = sorted(L.to_blocks(u30))
    slots = []
    for (q, i, hw) in blocks:
        for ck in L.cx.keys(1).get((i, hw), []):
            slots.append(ck)
    if not slots:
        return None
    cols = []
    targets = set(r1.support_keys()) | set(r2.support_keys())
    basis_d = []
    for (combo, k) in slots:
        beta = Cochain(L.alg, 1, {combo: {k: f.one}})
        db = dgla_differential(beta)
        c1 = nr_bracket(u1, db)
        c2 = nr_bracket(u2, db)
        targets.update(c1.support_keys())
        targets.update(c2.support_keys())
        basis_d.append((db, c1, c2))
    targets = sorted(targets)

    def vec_of(c1, c2):
        return ([c1.data.get(cm, {}).get(kk, f.zero) for (cm, kk) in targets]
                + [c2.data.get(cm, {}).get(kk, f.zero) for (cm, kk) in targets])

    from .exactmath import Matrix, solve_linear
    cols = [vec_of(c1, c2) for (_db, c1, c2) in basis_d]
    rhs = vec_of(r1, r2)
    M = Matrix.from_columns(f, cols, nrows=len(rhs))
    sol = solve_linear(M, rhs)
    if sol is None:
        return None
    u3 = u30
    for x, (db, _c1, _c2) in zip(sol[0], basis_d):
        if not f.is_zero(x):
            u3 = u3 - db.scale(x)
    if not (nr_bracket(u1, u3).is_zero() and nr_bracket(u2, u3).is_zero()):
        return None
    return u3


def deformed_algebra(L: Dgla, phi: Cochain) -> FilteredLieAlgebra:
    """The filtered Lie algebra with bracket [.,.] + phi; phi must be MC."""
    if not mc_residual(L, phi).is_zero():
        raise DeformationError("cochain is not Maurer-Cartan")
    alg = L.alg
    f = alg.field
    for combo, vec in phi.data.items():
        s = sum(alg.degrees[i] for i in combo)
        if any(alg.degrees[k] <= s for k in vec):
            raise DeformationError("deformation cochain has nonpositive weight")
    brackets = {}
    for (i, j), v in alg.brackets.items():
        brackets[(i, j)] = dict(v)
    for combo, vec in phi.data.items():
        i, j = combo
        cur = brackets.setdefault((i, j), {})
        for k, c in vec.items():
            vaxpy(f, cur, f.one, {k: c})
        if not cur:
            del brackets[(i, j)]
    return FilteredLieAlgebra(f, alg.labels, alg.degrees, brackets)
