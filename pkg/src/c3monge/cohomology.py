"""Chevalley-Eilenberg cochains, Betti tables, and the harmonic module.

Cochains are alternating maps Lambda^p k -> k stored sparsely as
{sorted index tuple: value vector}.  Everything is sliced by internal
weight (target degree minus source degrees) and, when the algebra carries
weight data, by simultaneous (H, E, E') weight, so each linear solve is a
small block.

Sign conventions.  `ce_differential` is the standard CE differential with
adjoint coefficients (for p = 2 it is d(phi)(X,Y,Z) = [Z, phi(X,Y)] -
phi([Z,X], Y) + cyclic).  `nr_bracket` is the insertion-operad
Nijenhuis-Richardson bracket; with these two choices the deformation
package uses d_DGLA = (-1)^(p-1) d_CE on p-cochains, which equals
[mu, .] for the tautological bracket cochain mu, and then the deformed
bracket [.,.] + phi satisfies Jacobi exactly when phi is Maurer-Cartan.
The homology differential on Lambda^q p_+ (x) g is fixed by
d(X^Y (x) v) = -[X,Y] (x) v + X (x) [Y,v] - Y (x) [X,v].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial

from ._sparse import to_list, vadd, vaxpy, vclean, vscale, vsub
from .exactmath import Matrix, kernel_basis, rref, solve_linear
from .liealg import C3, GradedLieAlgebra, LieAlgebraError, Subalgebra


class Cochain:
    """Alternating p-multilinear map k^p -> k, sparse over sorted tuples."""

    __slots__ = ("alg", "p", "data")

    def __init__(self, alg: GradedLieAlgebra, p: int, data=None):
        self.alg = alg
        self.p = p
        self.data = {}
        if data:
            f = alg.field
            for combo, vec in data.items():
                vec = vclean(f, {k: f.coerce(c) for k, c in vec.items()})
                if vec:
                    self.data[tuple(combo)] = vec

    @classmethod
    def basis(cls, alg, combo, k) -> "Cochain":
        return cls(alg, len(combo), {tuple(combo): {k: alg.field.one}})

    def is_zero(self) -> bool:
        return not self.data

    def __add__(self, other: "Cochain") -> "Cochain":
        out = Cochain(self.alg, self.p)
        f = self.alg.field
        for src in (self.data, other.data):
            for c, vec in src.items():
                cur = out.data.setdefault(c, {})
                for k, x in vec.items():
                    vaxpy(f, cur, f.one, {k: x})
                if not cur:
                    del out.data[c]
        out.data = {c: v for c, v in out.data.items() if v}
        return out

    def __sub__(self, other):
        return self + other.scale(-self.alg.field.one)

    def scale(self, c) -> "Cochain":
        f = self.alg.field
        c = f.coerce(c)
        if f.is_zero(c):
            return Cochain(self.alg, self.p)
        return Cochain(self.alg, self.p,
                       {cmb: vscale(f, c, vec) for cmb, vec in self.data.items()})

    def value(self, combo) -> dict:
        """Value on basis vectors indexed by an arbitrary tuple (antisym)."""
        idx = list(combo)
        if len(set(idx)) != len(idx):
            return {}
        sign = 1
        for i in range(len(idx)):
            for j in range(len(idx) - 1 - i):
                if idx[j] > idx[j + 1]:
                    idx[j], idx[j + 1] = idx[j + 1], idx[j]
                    sign = -sign
        vec = self.data.get(tuple(idx))
        if not vec:
            return {}
        return vec if sign == 1 else vscale(self.alg.field, -self.alg.field.one, vec)

    def apply(self, vectors) -> dict:
        """Multilinear evaluation on sparse coordinate vectors."""
        f = self.alg.field
        out: dict = {}
        def rec(pos, chosen, coeff):
            if pos == self.p:
                vaxpy(f, out, coeff, self.value(tuple(chosen)))
                return
            for i, c in vectors[pos].items():
                rec(pos + 1, chosen + [i], coeff * c)
        rec(0, [], f.one)
        return out

    def weight_components(self) -> dict:
        """Split into internal-weight-homogeneous parts: {i: Cochain}."""
        alg = self.alg
        parts: dict = {}
        for combo, vec in self.data.items():
            s = sum(alg.degrees[i] for i in combo)
            for k, c in vec.items():
                i = alg.degrees[k] - s
                parts.setdefault(i, {}).setdefault(combo, {})[k] = c
        return {i: Cochain(alg, self.p, d) for i, d in sorted(parts.items())}

    def support_keys(self):
        return [(combo, k) for combo in sorted(self.data) for k in sorted(self.data[combo])]

    def __repr__(self):
        return f"Cochain(p={self.p}, nnz={sum(len(v) for v in self.data.values())})"


def _reverse_bracket_index(alg: GradedLieAlgebra):
    rev: dict = {}
    for (u, v), vec in alg.brackets.items():
        for b, c in vec.items():
            rev.setdefault(b, []).append(((u, v), c))
    return rev


def ce_differential(phi: Cochain) -> Cochain:
    """Standard CE differential with adjoint coefficients."""
    alg = phi.alg
    f = alg.field
    p = phi.p
    rev = _reverse_bracket_index(alg)
    out: dict = {}

    def add(combo, coeff, vec):
        if f.is_zero(coeff) or not vec:
            return
        cur = out.setdefault(combo, {})
        vaxpy(f, cur, coeff, vec)
        if not cur:
            del out[combo]

    for c, vec in phi.data.items():
        cset = set(c)
        # sum_i (-1)^i [e_j, phi(rest)] with j inserted at position i
        for j in range(alg.dim):
            if j in cset:
                continue
            pos = sum(1 for x in c if x < j)
            w = alg.bracket({j: f.one}, vec)
            if w:
                target = tuple(sorted(c + (j,)))
                add(target, f.coerce((-1) ** pos), w)
        # sum_{i<l} (-1)^(i+l) phi([e_u, e_v], rest)
        for m, b in enumerate(c):
            rest = c[:m] + c[m + 1:]
            restset = set(rest)
            for (u, v), coeff_b in rev.get(b, []):
                if u in restset or v in restset:
                    continue
                target = tuple(sorted(rest + (u, v)))
                iu = target.index(u)
                il = target.index(v)
                # phi applied to (e_b, rest ascending): move b to front of c
                sgn = (-1) ** (iu + il) * (-1) ** m
                add(target, f.coerce(sgn) * coeff_b, vec)
    return Cochain(alg, p + 1, out)


def _insertion(phi: Cochain, psi: Cochain) -> Cochain:
    """phi o- psi: insert psi into the first slot of phi, shuffle-summed."""
    alg = phi.alg
    f = alg.field
    p, q = phi.p, psi.p
    out: dict = {}
    for cphi, vphi in phi.data.items():
        for cpsi, vpsi in psi.data.items():
            for idx_k, k in enumerate(cphi):
                beta = vpsi.get(k)
                if beta is None:
                    continue
                rest = cphi[:idx_k] + cphi[idx_k + 1:]
                if set(rest) & set(cpsi):
                    continue
                target = tuple(sorted(rest + cpsi))
                # shuffle sign: positions of cpsi inside target
                s = sum(target.index(x) for x in cpsi) - (q * (q - 1)) // 2
                sgn = (-1) ** (s + idx_k)
                cur = out.setdefault(target, {})
                vaxpy(f, cur, f.coerce(sgn) * beta, vphi)
                if not cur:
                    del out[target]
    return Cochain(alg, p + q - 1, out)


def nr_bracket(phi: Cochain, psi: Cochain) -> Cochain:
    """Nijenhuis-Richardson bracket (insertion convention).

    For 2-cochains, [phi,phi](X,Y,Z) = 2(phi(phi(X,Y),Z) + cyclic).
    """
    sign = (-1) ** ((phi.p - 1) * (psi.p - 1))
    a = _insertion(phi, psi)
    b = _insertion(psi, phi).scale(phi.alg.field.coerce(-sign))
    return a + b


def bracket_cochain(alg: GradedLieAlgebra) -> Cochain:
    """The Lie bracket of `alg` as a 2-cochain."""
    return Cochain(alg, 2, {k: dict(v) for k, v in alg.brackets.items()})


def dgla_differential(phi: Cochain) -> Cochain:
    """[mu, .] on the deformation DGLA: (-1)^(p-1) times the CE differential."""
    d = ce_differential(phi)
    if phi.p % 2 == 0:
        d = d.scale(-phi.alg.field.one)
    return d


# -- complexes sliced by weights -------------------------------------------


class AdjointComplex:
    """C^*(k, k) with key bookkeeping by internal weight and h-weight.

    `invariance` is a list of algebra elements with diagonal adjoint
    action in the given basis; keys of nonzero weight under any of them
    are dropped (the invariant subcomplex).  A non-diagonal action is
    rejected, which is the conservative form of the diagonalizability
    precondition (every algebra the pipeline builds comes with a weight
    basis).
    """

    def __init__(self, alg: GradedLieAlgebra, invariance=()):
        self.alg = alg
        self.f = alg.field
        self.inv_eigen = []
        for z in invariance:
            eig = []
            for i in range(alg.dim):
                w = alg.bracket(z, alg.basis_vector(i))
                off = {k: c for k, c in w.items() if k != i}
                if off:
                    raise LieAlgebraError("invariance element is not diagonal "
                                          "in the chosen basis")
                eig.append(w.get(i, self.f.zero))
            self.inv_eigen.append(eig)
        self._keys: dict = {}
        self._dmat: dict = {}

    def _hweight(self, combo, k):
        if self.alg.weights is None:
            return ()
        w = list(self.alg.weights[k])
        for i in combo:
            for n, x in enumerate(self.alg.weights[i]):
                w[n] -= x
        return tuple(w)

    def _invariant(self, combo, k) -> bool:
        for eig in self.inv_eigen:
            acc = eig[k]
            for i in combo:
                acc = acc - eig[i]
            if not self.f.is_zero(acc):
                return False
        return True

    def keys(self, p: int):
        """{(i, hweight): [ (combo, k), ... ]} for the invariant subcomplex."""
        if p not in self._keys:
            blocks: dict = {}
            degs = self.alg.degrees
            for combo in combinations(range(self.alg.dim), p):
                s = sum(degs[i] for i in combo)
                for k in range(self.alg.dim):
                    if not self._invariant(combo, k):
                        continue
                    i = degs[k] - s
                    blocks.setdefault((i, self._hweight(combo, k)), []).append((combo, k))
            self._keys[p] = {key: blocks[key] for key in sorted(blocks)}
        return self._keys[p]

    def block_keys(self, p, i, hw=None):
        blocks = self.keys(p)
        if hw is not None:
            return blocks.get((i, hw), [])
        out = []
        for (wi, hwk), keys in blocks.items():
            if wi == i:
                out.extend(keys)
        return out

    def cochain_to_vector(self, phi: Cochain, keys):
        idx = {key: n for n, key in enumerate(keys)}
        v = [self.f.zero] * len(keys)
        for combo, vec in phi.data.items():
            for k, c in vec.items():
                n = idx.get((combo, k))
                if n is None:
                    if not self.f.is_zero(c):
                        raise LieAlgebraError("cochain leaves the block")
                else:
                    v[n] = c
        return v

    def vector_to_cochain(self, p, keys, v) -> Cochain:
        data: dict = {}
        for (combo, k), c in zip(keys, v):
            if not self.f.is_zero(c):
                data.setdefault(combo, {})[k] = c
        return Cochain(self.alg, p, data)

    def d_matrix(self, p, i, hw=None) -> tuple:
        """(matrix, source keys, target keys) for d on one block."""
        cache = (p, i, hw)
        if cache not in self._dmat:
            src = self.block_keys(p, i, hw)
            tgt = self.block_keys(p + 1, i, hw)
            cols = []
            for (combo, k) in src:
                d = ce_differential(Cochain.basis(self.alg, combo, k))
                cols.append(self.cochain_to_vector(d, tgt))
            mat = Matrix.from_columns(self.f, cols, nrows=len(tgt)) if cols else \
                Matrix(self.f, [[] for _ in range(len(tgt))], ncols=0)
            self._dmat[cache] = (mat, src, tgt)
        return self._dmat[cache]

    def cohomology_block(self, p, i, hw=None):
        """(dim, representative cochains) of H^p at internal weight i."""
        mat, src, tgt = self.d_matrix(p, i, hw)
        cycles = kernel_basis(mat) if src else []
        prev, psrc, _ = self.d_matrix(p - 1, i, hw) if p >= 1 else (None, [], [])
        bcols = []
        if psrc:
            for j in range(prev.ncols):
                bcols.append(prev.column(j))
        # echelon the boundaries, then extend by cycles; the new pivots
        # give deterministic representatives
        rows = [list(b) for b in bcols]
        R, pivots = rref(Matrix(self.f, rows, ncols=len(src))) if rows else \
            (Matrix(self.f, [], ncols=len(src)), [])
        reps = []
        cur_rows = [R.rows[n] for n in range(len(pivots))]
        cur_piv = list(pivots)
        for z in cycles:
            vec = list(z)
            for row, pc in zip(cur_rows, cur_piv):
                c = vec[pc]
                if not self.f.is_zero(c):
                    vec = [a - c * b for a, b in zip(vec, row)]
            nz = next((n for n, x in enumerate(vec) if not self.f.is_zero(x)), None)
            if nz is None:
                continue
            piv = vec[nz]
            vec = [x / piv for x in vec]
            cur_rows.append(vec)
            cur_piv.append(nz)
            reps.append(self.vector_to_cochain(p, src, vec))
        return len(reps), reps


@dataclass
class BettiTable:
    """dim H^p_i(k, k) indexed by (p, internal weight i), with representatives."""

    dims: dict
    representatives: dict
    hweights: dict

    def dim(self, p, i) -> int:
        return self.dims.get((p, i), 0)

    def to_json(self) -> dict:
        return {
            "dims": [[p, i, d] for (p, i), d in sorted(self.dims.items())],
            "hweights": [[p, i, [list(map(str, w)) for w in ws]]
                         for (p, i), ws in sorted(self.hweights.items())],
        }


def cohomology_dims(alg: GradedLieAlgebra, p_range, i_range, invariance=()) -> BettiTable:
    """Betti numbers b^p_i of the (invariant) adjoint complex, with reps."""
    cx = AdjointComplex(alg, invariance)
    dims: dict = {}
    reps: dict = {}
    hws: dict = {}
    for p in p_range:
        blocks = cx.keys(p)
        for i in i_range:
            total = 0
            rlist = []
            wlist = []
            for (wi, hw) in blocks:
                if wi != i:
                    continue
                d, r = cx.cohomology_block(p, i, hw)
                total += d
                rlist.extend(r)
                wlist.extend([hw] * d)
            dims[(p, i)] = total
            reps[(p, i)] = rlist
            hws[(p, i)] = wlist
    return BettiTable(dims, reps, hws)


def invariant_subcomplex(alg: GradedLieAlgebra, invariance, p: int):
    """Basis keys of the a-invariant part of C^p, grouped by weight."""
    return AdjointComplex(alg, invariance).keys(p)


# -- homology of p_+ with values in g --------------------------------------


class HomChain:
    """Element of Lambda^q p_+ (x) g, sparse over (sorted combo, k)."""

    __slots__ = ("c3", "q", "data")

    def __init__(self, c3: C3, q: int, data=None):
        self.c3 = c3
        self.q = q
        self.data = {}
        if data:
            f = c3.field
            for combo, vec in data.items():
                vec = vclean(f, {k: f.coerce(c) for k, c in vec.items()})
                if vec:
                    self.data[tuple(combo)] = vec

    def is_zero(self):
        return not self.data

    def scale(self, c):
        f = self.c3.field
        return HomChain(self.c3, self.q,
                        {cmb: vscale(f, f.coerce(c), vec) for cmb, vec in self.data.items()})

    def __add__(self, other):
        out: dict = {}
        f = self.c3.field
        for src in (self.data, other.data):
            for cmb, vec in src.items():
                cur = out.setdefault(cmb, {})
                for k, x in vec.items():
                    vaxpy(f, cur, f.one, {k: x})
        return HomChain(self.c3, self.q, out)

    def __sub__(self, other):
        return self + other.scale(-1)


def homology_differential(chain: HomChain) -> HomChain:
    """Lie algebra homology differential on Lambda^q p_+ (x) g."""
    c3 = chain.c3
    g = c3.alg
    f = g.field
    out: dict = {}

    def add(combo, coeff, vec):
        if not vec or f.is_zero(coeff):
            return
        cur = out.setdefault(tuple(combo), {})
        vaxpy(f, cur, coeff, vec)
        if not cur:
            del out[tuple(combo)]

    pplus = set(c3.indices_pplus())
    for combo, vec in chain.data.items():
        q = len(combo)
        # sum_{i<j} (-1)^(i+j) [x_i, x_j] ^ rest (x) v
        for a in range(q):
            for b in range(a + 1, q):
                w = g.bracket_basis(combo[a], combo[b])
                if not w:
                    continue
                rest = tuple(x for n, x in enumerate(combo) if n not in (a, b))
                for t, c in w.items():
                    if t not in pplus or t in rest:
                        continue
                    newc = tuple(sorted(rest + (t,)))
                    pos = newc.index(t)
                    sgn = (-1) ** (a + b + pos)
                    add(newc, f.coerce(sgn) * c, vec)
        # sum_i (-1)^i rest (x) [x_i, v]
        for a in range(q):
            w = g.bracket(g.basis_vector(combo[a]), vec)
            if w:
                rest = tuple(x for n, x in enumerate(combo) if n != a)
                add(rest, f.coerce((-1) ** (a + 1)), w)
    return HomChain(c3, chain.q - 1, out)


class PPlusComplex:
    """Chain complex C_q(p_+, g) sliced by total degree and h-weight."""

    def __init__(self, c3: C3):
        self.c3 = c3
        self.f = c3.field
        self.pplus = c3.indices_pplus()
        self._keys: dict = {}
        self._dmat: dict = {}

    def keys(self, q: int):
        if q not in self._keys:
            g = self.c3.alg
            blocks: dict = {}
            for combo in combinations(self.pplus, q):
                s = sum(g.degrees[i] for i in combo)
                hw0 = [sum(g.weights[i][n] for i in combo) for n in range(3)]
                for k in range(g.dim):
                    deg = s + g.degrees[k]
                    hw = tuple(hw0[n] + g.weights[k][n] for n in range(3))
                    blocks.setdefault((deg, hw), []).append((combo, k))
            self._keys[q] = {key: blocks[key] for key in sorted(blocks)}
        return self._keys[q]

    def block_keys(self, q, key):
        return self.keys(q).get(key, [])

    def chain_to_vector(self, chain: HomChain, keys):
        idx = {key: n for n, key in enumerate(keys)}
        v = [self.f.zero] * len(keys)
        for combo, vec in chain.data.items():
            for k, c in vec.items():
                v[idx[(combo, k)]] = c
        return v

    def vector_to_chain(self, q, keys, v) -> HomChain:
        data: dict = {}
        for (combo, k), c in zip(keys, v):
            if not self.f.is_zero(c):
                data.setdefault(combo, {})[k] = c
        return HomChain(self.c3, q, data)

    def d_matrix(self, q, key):
        cache = (q, key)
        if cache not in self._dmat:
            src = self.block_keys(q, key)
            tgt = self.block_keys(q - 1, key)
            cols = []
            for (combo, k) in src:
                d = homology_differential(HomChain(self.c3, q, {combo: {k: self.f.one}}))
                cols.append(self.chain_to_vector(d, tgt))
            mat = Matrix.from_columns(self.f, cols, nrows=len(tgt)) if cols else \
                Matrix(self.f, [[] for _ in range(len(tgt))], ncols=0)
            self._dmat[cache] = (mat, src, tgt)
        return self._dmat[cache]


@dataclass
class HarmonicDecomposition:
    """H_2(p_+, g)^1 split into the scalar line and the quintic block.

    `quintic_classes[j]` is the class of Y^(5-j) applied to the top
    (H-weight 5) class, so it matches the binary quintic monomial
    z^j w^(5-j) up to the factor 5!/j! that `quintic_coefficients`
    applies.  All seven classes live in distinct (H, E, E') weights, so
    the projection is canonical.
    """

    complex: PPlusComplex
    scalar_class: HomChain
    scalar_weight: tuple
    quintic_classes: list
    quintic_weights: list
    class_keys: list          # (degree, hweight) block key per class

    def total_dim(self):
        return 1 + len(self.quintic_classes)

    def to_json(self):
        return {
            "total_dim": self.total_dim(),
            "scalar_weight": [str(x) for x in self.scalar_weight],
            "quintic_weights": [[str(x) for x in w] for w in self.quintic_weights],
        }


def _class_spaces(cx: PPlusComplex, key):
    """Cycle space, boundary space and quotient data of H_2 on one block."""
    mat, src, tgt = cx.d_matrix(2, key)
    cycles = kernel_basis(mat) if src else []
    mat3, src3, _ = cx.d_matrix(3, key)
    bnd = [mat3.column(j) for j in range(mat3.ncols)] if src3 else []
    return cycles, bnd, src


def _quotient_reps(field, cycles, boundaries, ncols):
    rows = [list(b) for b in boundaries]
    R, pivots = rref(Matrix(field, rows, ncols=ncols)) if rows else (None, [])
    cur_rows = [R.rows[n] for n in range(len(pivots))] if rows else []
    cur_piv = list(pivots)
    reps = []
    for z in cycles:
        vec = list(z)
        for row, pc in zip(cur_rows, cur_piv):
            c = vec[pc]
            if not field.is_zero(c):
                vec = [a - c * b for a, b in zip(vec, row)]
        nz = next((n for n, x in enumerate(vec) if not field.is_zero(x)), None)
        if nz is None:
            continue
        piv = vec[nz]
        vec = [x / piv for x in vec]
        cur_rows.append(vec)
        cur_piv.append(nz)
        reps.append(vec)
    return reps


def harmonic_decomposition(c3: C3) -> HarmonicDecomposition:
    """Compute H_2(p_+, g)^1 and its scalar + quintic split by weights."""
    cx = PPlusComplex(c3)
    f = c3.field
    classes = []          # (degree, hweight, HomChain)
    for key in cx.keys(2):
        deg, hw = key
        if deg < 1:
            continue
        cycles, bnd, src = _class_spaces(cx, key)
        for rep in _quotient_reps(f, cycles, bnd, len(src)):
            classes.append((deg, hw, cx.vector_to_chain(2, src, rep)))
    if len(classes) != 7:
        raise LieAlgebraError(f"H_2(p_+,g)^1 has dimension {len(classes)}, not 7")
    scalars = [c for c in classes if c[1][0] == 0]
    quintics = [c for c in classes if c[1][0] != 0]
    if len(scalars) != 1 or len(quintics) != 6:
        raise LieAlgebraError("harmonic module does not split as 1 + 6")
    top = max(quintics, key=lambda c: c[1][0])
    if top[1][0] != 5 or {c[1][0] for c in quintics} != {-5, -3, -1, 1, 3, 5}:
        raise LieAlgebraError("quintic H-spectrum is not {-5,...,5}")

    # lower the top class with Y to fix the relative scales
    def act(z, chain: HomChain) -> HomChain:
        g = c3.alg
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

    by_h = {c[1][0]: c for c in quintics}
    chains = {5: top[2]}
    for h in (3, 1, -1, -3, -5):
        chains[h] = act(c3.Y, chains[h + 2])
        if not chains[h].data:
            raise LieAlgebraError("quintic block is not an irreducible sl2 module")
    quintic_classes = [chains[2 * j - 5] for j in range(6)]        # j: z^j w^(5-j)
    quintic_weights = [by_h[2 * j - 5][1] for j in range(6)]
    class_keys = [(by_h[2 * j - 5][0], by_h[2 * j - 5][1]) for j in range(6)]
    scalar = scalars[0]
    return HarmonicDecomposition(
        complex=cx,
        scalar_class=scalar[2],
        scalar_weight=scalar[1],
        quintic_classes=quintic_classes,
        quintic_weights=quintic_weights,
        class_keys=[(scalar[0], scalar[1])] + class_keys,
    )


class HarmonicProjector:
    """Project 2-cycles of filtration degree >= 1 to (scalar, quintic).

    Built once per scalar field from a HarmonicDecomposition; quintic
    coordinates are returned as coefficients of the binary quintic
    sum_j c_j z^j w^(5-j).
    """

    def __init__(self, dec: HarmonicDecomposition, field):
        self.dec = dec
        self.field = field
        self._solvers: dict = {}

    def _solver(self, key):
        """Columns [boundaries | class reps on this block] over `field`."""
        if key not in self._solvers:
            cx = self.dec.complex
            mat3, src3, _ = cx.d_matrix(3, key)
            src = cx.block_keys(2, key)
            cols = [mat3.column(j) for j in range(mat3.ncols)] if src3 else []
            nb = len(cols)
            reps = []
            for n, ck in enumerate(self.dec.class_keys):
                if ck == key:
                    chain = (self.dec.scalar_class if n == 0
                             else self.dec.quintic_classes[n - 1])
                    reps.append((n, cx.chain_to_vector(chain, src)))
            for _, v in reps:
                cols.append(v)
            rows = [[self.field.coerce(cols[j][i]) for j in range(len(cols))]
                    for i in range(len(src))]
            self._solvers[key] = (Matrix(self.field, rows, ncols=len(cols)),
                                  nb, [n for n, _ in reps], src)
        return self._solvers[key]

    def project(self, chain_blocks: dict):
        """chain_blocks: {(deg,hw) block key: coefficient vector over field}.

        Returns (scalar part, [c_0..c_5] quintic coefficients).
        """
        f = self.field
        out = [f.zero] * 7
        for key, vec in chain_blocks.items():
            deg, hw = key
            if deg < 1:
                if any(not f.is_zero(x) for x in vec):
                    raise LieAlgebraError("chain is not of filtration degree >= 1")
                continue
            if all(f.is_zero(x) for x in vec):
                continue
            M, nb, class_pos, src = self._solver(key)
            sol = solve_linear(M, vec)
            if sol is None:
                raise LieAlgebraError("chain is not a cycle modulo boundaries "
                                      "on a harmonic block")
            x = sol[0]
            for slot, n in enumerate(class_pos):
                out[n] = out[n] + x[nb + slot]
        scalar = out[0]
        quintic = [out[1 + j] * Fraction(factorial(5), factorial(j)) for j in range(6)]
        return scalar, quintic
