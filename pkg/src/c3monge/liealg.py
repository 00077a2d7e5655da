"""Graded and filtered Lie algebras as structure-constant data.

Builds split sp(6) with its contact-like |3|-grading of type C3, provides
the Tanaka prolongation of negatively graded algebras, and the subalgebra
utilities the classification pipeline runs on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from ._sparse import from_list, to_list, vadd, vaxpy, vclean, vscale, vsub
from .exactmath import QQ, FunctionField, Matrix, RationalField, kernel_basis, rref, solve_linear


class LieAlgebraError(ValueError):
    pass


class GradedLieAlgebra:
    """Finite-dimensional Lie algebra with integer grading.

    Structure constants are stored sparsely as brackets[(i, j)] = {k: c}
    for i < j, meaning [e_i, e_j] = sum_k c e_k.  `weights`, when present,
    holds per-basis-vector eigenvalue tuples for a fixed list of commuting
    semisimple elements (H, E, E' for the C3 build); the pipeline relies on
    basis vectors being weight vectors.
    """

    def __init__(self, field, labels, degrees, brackets, weights=None):
        self.field = field
        self.labels = tuple(labels)
        self.degrees = tuple(degrees)
        self.dim = len(self.labels)
        if len(self.degrees) != self.dim:
            raise LieAlgebraError("degrees/labels length mismatch")
        self.brackets = {}
        for (i, j), v in brackets.items():
            if i == j:
                raise LieAlgebraError("diagonal bracket entry")
            if i > j:
                i, j, v = j, i, vscale(field, -field.one, v)
            v = vclean(field, {k: field.coerce(c) for k, c in v.items()})
            if v:
                self.brackets[(i, j)] = v
        self.weights = tuple(tuple(w) for w in weights) if weights is not None else None

    # -- basic queries --------------------------------------------------

    def degree_indices(self, d: int):
        return [i for i, deg in enumerate(self.degrees) if deg == d]

    def indices_where(self, pred):
        return [i for i in range(self.dim) if pred(self.degrees[i])]

    def basis_vector(self, i: int) -> dict:
        return {i: self.field.one}

    def bracket_basis(self, i: int, j: int) -> dict:
        if i == j:
            return {}
        if i < j:
            return self.brackets.get((i, j), {})
        v = self.brackets.get((j, i))
        return vscale(self.field, -self.field.one, v) if v else {}

    def bracket(self, x: dict, y: dict) -> dict:
        f = self.field
        out: dict = {}
        for i, a in x.items():
            for j, b in y.items():
                v = self.bracket_basis(i, j)
                if v:
                    vaxpy(f, out, a * b, v)
        return out

    def ad(self, z: dict) -> Matrix:
        cols = [to_list(self.field, self.bracket(z, self.basis_vector(i)), self.dim)
                for i in range(self.dim)]
        return Matrix.from_columns(self.field, cols, nrows=self.dim)

    def weight_of(self, i: int):
        if self.weights is None:
            raise LieAlgebraError("no weight data on this algebra")
        return self.weights[i]

    def grading_ok(self) -> bool:
        for (i, j), v in self.brackets.items():
            d = self.degrees[i] + self.degrees[j]
            if any(self.degrees[k] != d for k in v):
                return False
        return True

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        f = self.field
        triples = []
        for (i, j) in sorted(self.brackets):
            for k in sorted(self.brackets[(i, j)]):
                triples.append([i, j, k, f.scalar_to_json(self.brackets[(i, j)][k])])
        doc = {
            "labels": list(self.labels),
            "degrees": list(self.degrees),
            "field": "QQ" if isinstance(f, RationalField) else {"params": list(f.params)},
            "brackets": triples,
        }
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "GradedLieAlgebra":
        f = QQ if doc["field"] == "QQ" else FunctionField(doc["field"]["params"])
        brackets: dict = {}
        for i, j, k, c in doc["brackets"]:
            brackets.setdefault((i, j), {})[k] = f.scalar_from_json(c)
        return cls(f, doc["labels"], doc["degrees"], brackets)

    def __repr__(self):
        return f"GradedLieAlgebra(dim={self.dim}, field={self.field})"


class FilteredLieAlgebra(GradedLieAlgebra):
    """Lie algebra with a filtration; `degrees` are the filtration degrees.

    The bracket may raise the nominal degree sum ([k^i, k^j] within
    k^{i+j}); `gr` truncates it back to the degree-additive part.
    """

    def grading_ok(self) -> bool:
        for (i, j), v in self.brackets.items():
            d = self.degrees[i] + self.degrees[j]
            if any(self.degrees[k] < d for k in v):
                return False
        return True

    def gr(self) -> GradedLieAlgebra:
        brackets = {}
        for (i, j), v in self.brackets.items():
            d = self.degrees[i] + self.degrees[j]
            w = {k: c for k, c in v.items() if self.degrees[k] == d}
            if w:
                brackets[(i, j)] = w
        return GradedLieAlgebra(self.field, self.labels, self.degrees, brackets,
                                weights=self.weights)

    def to_json(self) -> dict:
        doc = super().to_json()
        doc["filtered"] = True
        return doc


def check_jacobi(L: GradedLieAlgebra) -> bool:
    """True iff the Jacobi identity holds identically over the field."""
    f = L.field
    for i, j, k in combinations(range(L.dim), 3):
        acc = L.bracket(L.bracket_basis(i, j), L.basis_vector(k))
        acc = vadd(f, acc, L.bracket(L.bracket_basis(j, k), L.basis_vector(i)))
        acc = vadd(f, acc, L.bracket(L.bracket_basis(k, i), L.basis_vector(j)))
        if acc:
            return False
    return True


# -- the C3 algebra ------------------------------------------------------


def _sp6_root_matrix(d):
    """6x6 matrix of the root vector for the C3 root d = (d1, d2, d3)."""
    m = [[Fraction(0)] * 6 for _ in range(6)]
    pos = [i for i, x in enumerate(d) if x > 0]
    neg = [i for i, x in enumerate(d) if x < 0]
    if len(pos) == 1 and len(neg) == 1:          # ei - ej
        i, j = pos[0], neg[0]
        m[i][j] = Fraction(1)
        m[3 + j][3 + i] = Fraction(-1)
    elif len(pos) == 2:                           # ei + ej, i < j
        i, j = pos
        m[i][3 + j] = Fraction(1)
        m[j][3 + i] = Fraction(1)
    elif len(neg) == 2:                           # -(ei + ej)
        i, j = neg
        m[3 + i][j] = Fraction(1)
        m[3 + j][i] = Fraction(1)
    elif len(pos) == 1:                           # 2 ei
        i = pos[0]
        m[i][3 + i] = Fraction(1)
    else:                                         # -2 ei
        i = neg[0]
        m[3 + i][i] = Fraction(1)
    return m


def _coroot_matrix(a):
    m = [[Fraction(0)] * 6 for _ in range(6)]
    for i in range(3):
        m[i][i] = Fraction(a[i])
        m[3 + i][3 + i] = Fraction(-a[i])
    return m


def _mat_commutator(a, b):
    n = len(a)
    ab = [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    ba = [[sum(b[i][k] * a[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return [[ab[i][j] - ba[i][j] for j in range(n)] for i in range(n)]


@dataclass
class C3:
    """sp(6, Q) with the C3 Monge grading and its distinguished elements."""

    alg: GradedLieAlgebra
    roots: tuple            # e-coordinates per basis vector, None for Cartan
    E: dict                 # grading element
    Ep: dict                # E': identity on the x-line, zero on a
    H: dict                 # sl2 triple H, X, Y inside g_0
    X: dict
    Y: dict
    x_index: int            # basis index spanning the x-line in g_{-1}
    a_indices: tuple        # basis indices spanning a in g_{-1}

    @property
    def field(self):
        return self.alg.field

    def indices_neg(self):
        return self.alg.indices_where(lambda d: d < 0)

    def indices_deg(self, d):
        return self.alg.degree_indices(d)

    def indices_p(self):
        return self.alg.indices_where(lambda d: d >= 0)

    def indices_pplus(self):
        return self.alg.indices_where(lambda d: d > 0)

    def torus_element(self, c_h, c_e, c_ep) -> dict:
        """c_h*H + c_e*E + c_ep*E' as a coordinate vector."""
        f = self.field
        v: dict = {}
        for c, w in ((c_h, self.H), (c_e, self.E), (c_ep, self.Ep)):
            vaxpy(f, v, f.coerce(c), w)
        return v


def _c3_roots():
    roots = []
    for i in range(3):
        for j in range(3):
            if i != j:
                d = [0, 0, 0]
                d[i] += 1
                d[j] -= 1
                roots.append(tuple(d))
    for i in range(3):
        for j in range(i + 1, 3):
            d = [0, 0, 0]
            d[i] += 1
            d[j] += 1
            roots.append(tuple(d))
            roots.append(tuple(-x for x in d))
    for i in range(3):
        d = [0, 0, 0]
        d[i] = 2
        roots.append(tuple(d))
        roots.append(tuple(-x for x in d))
    return roots


def _c3_height(d) -> int:
    num = 3 * d[0] + 3 * d[1] + d[2]
    assert num % 2 == 0
    return num // 2


def build_c3() -> C3:
    """Construct sp(6, Q) with the grading of the C3 Monge symbol."""
    roots = _c3_roots()
    entries = []        # (degree, sort key, root-or-None, matrix, label)
    for d in roots:
        entries.append((_c3_height(d), (0, d), d, _sp6_root_matrix(d),
                        "x(%d,%d,%d)" % d))
    coroots = [(1, -1, 0), (0, 1, -1), (0, 0, 1)]
    for n, a in enumerate(coroots, start=1):
        entries.append((0, (1, (n,)), None, _coroot_matrix(a), f"h{n}"))
    entries.sort(key=lambda e: (e[0], e[1]))

    mats = [e[3] for e in entries]
    labels = [e[4] for e in entries]
    degrees = [e[0] for e in entries]
    basis_roots = [e[2] for e in entries]
    dim = len(entries)

    # each root-vector matrix owns a unique marker entry, so decomposing a
    # commutator is a direct read-off; the diagonal remainder is the Cartan
    marker = {}
    for idx, d in enumerate(basis_roots):
        if d is None:
            continue
        pos = next((r, c) for r in range(6) for c in range(6) if mats[idx][r][c] != 0)
        assert pos not in marker
        marker[pos] = idx
    h_index = labels.index("h1")

    def decompose(m) -> dict:
        m = [row[:] for row in m]
        out = {}
        for (r, c), idx in marker.items():
            coeff = m[r][c]
            if coeff:
                out[idx] = coeff
                for rr in range(6):
                    for cc in range(6):
                        if mats[idx][rr][cc]:
                            m[rr][cc] -= coeff * mats[idx][rr][cc]
        a = (m[0][0], m[1][1], m[2][2])
        # h = c1 h1 + c2 h2 + c3 h3 with diag (c1, c2-c1, c3-c2)
        c1, c2, c3 = a[0], a[0] + a[1], a[0] + a[1] + a[2]
        for n, cn in enumerate((c1, c2, c3)):
            if cn:
                out[h_index + n] = cn
                for i in range(3):
                    m[i][i] -= cn * _coroot_matrix(coroots[n])[i][i]
                    m[3 + i][3 + i] += cn * _coroot_matrix(coroots[n])[i][i]
        if any(any(row) for row in m):
            raise LieAlgebraError("commutator not in the span of the basis")
        return out

    brackets = {}
    for i in range(dim):
        for j in range(i + 1, dim):
            v = decompose(_mat_commutator(mats[i], mats[j]))
            if v:
                brackets[(i, j)] = v

    def wt(d):
        if d is None:
            return (0, 0, 0)
        h = d[0] - d[1]
        e = _c3_height(d)
        ep = Fraction(-(d[0] + d[1] + d[2]), 2)
        assert ep.denominator == 1
        return (h, e, int(ep))

    weights = [wt(d) for d in basis_roots]
    alg = GradedLieAlgebra(QQ, labels, degrees, brackets, weights=weights)
    if not alg.grading_ok():
        raise LieAlgebraError("C3 grading is not compatible with the bracket")

    index_of = {lab: i for i, lab in enumerate(labels)}
    h1, h2, h3 = index_of["h1"], index_of["h2"], index_of["h3"]
    E = {h1: Fraction(3, 2), h2: Fraction(3), h3: Fraction(7, 2)}
    Ep = {h1: Fraction(-1, 2), h2: Fraction(-1), h3: Fraction(-3, 2)}
    c3 = C3(
        alg=alg,
        roots=tuple(basis_roots),
        E=E,
        Ep=Ep,
        H={h1: Fraction(1)},
        X={index_of["x(1,-1,0)"]: Fraction(1)},
        Y={index_of["x(-1,1,0)"]: Fraction(1)},
        x_index=index_of["x(0,0,-2)"],
        a_indices=(index_of["x(-1,0,1)"], index_of["x(0,-1,1)"]),
    )
    # the stored weights are exactly the ad-eigenvalues of (H, E, E')
    for name, z in (("H", c3.H), ("E", c3.E), ("Ep", c3.Ep)):
        pos = {"H": 0, "E": 1, "Ep": 2}[name]
        for i in range(dim):
            got = alg.bracket(z, alg.basis_vector(i))
            want = vscale(QQ, Fraction(weights[i][pos]), alg.basis_vector(i))
            if vsub(QQ, got, want):
                raise LieAlgebraError(f"{name}-weight mismatch on basis vector {i}")
    return c3


def change_field(alg: GradedLieAlgebra, field) -> GradedLieAlgebra:
    """The same algebra with scalars coerced into a larger field."""
    brackets = {ij: {k: field.coerce(c) for k, c in v.items()}
                for ij, v in alg.brackets.items()}
    out = alg.__class__(field, alg.labels, alg.degrees, brackets, weights=alg.weights)
    return out


def algebra_from_vectors(alg: GradedLieAlgebra, vectors, labels) -> GradedLieAlgebra:
    """Subalgebra on the given basis vectors, with inherited grading/weights.

    Every vector must be homogeneous and (when the ambient carries weight
    data) a weight vector; this is what makes the invariant-subcomplex
    machinery applicable to the result.
    """
    f = alg.field
    vectors = [vclean(f, {i: f.coerce(c) for i, c in v.items()}) for v in vectors]
    sub = Subalgebra(alg, vectors)
    if sub.dim != len(vectors):
        raise LieAlgebraError("basis vectors are dependent")
    degrees = []
    weights = [] if alg.weights is not None else None
    for v in vectors:
        degs = {alg.degrees[i] for i in v}
        if len(degs) != 1:
            raise LieAlgebraError("basis vector is not homogeneous")
        degrees.append(degs.pop())
        if weights is not None:
            ws = {alg.weights[i] for i in v}
            if len(ws) != 1:
                raise LieAlgebraError("basis vector is not a weight vector")
            weights.append(ws.pop())
    # express brackets in the chosen (not rref) basis
    cols = [to_list(f, v, alg.dim) for v in vectors]
    span = Matrix(f, cols, ncols=alg.dim).transpose()
    brackets = {}
    for a in range(len(vectors)):
        for b in range(a + 1, len(vectors)):
            w = alg.bracket(vectors[a], vectors[b])
            if not w:
                continue
            sol = solve_linear(span, to_list(f, w, alg.dim))
            if sol is None:
                raise LieAlgebraError("span is not closed under the bracket")
            coords = vclean(f, from_list(f, sol[0]))
            if coords:
                brackets[(a, b)] = coords
    return GradedLieAlgebra(f, labels, degrees, brackets, weights=weights)


def restrict_to_indices(alg: GradedLieAlgebra, indices) -> GradedLieAlgebra:
    """Subalgebra spanned by the given basis indices, re-indexed densely."""
    pos = {b: n for n, b in enumerate(indices)}
    brackets = {}
    for n1, b1 in enumerate(indices):
        for n2 in range(n1 + 1, len(indices)):
            v = alg.bracket_basis(b1, indices[n2])
            if not v:
                continue
            if any(k not in pos for k in v):
                raise LieAlgebraError("index set is not closed under the bracket")
            brackets[(n1, n2)] = {pos[k]: c for k, c in v.items()}
    weights = [alg.weights[b] for b in indices] if alg.weights is not None else None
    return GradedLieAlgebra(alg.field, [alg.labels[b] for b in indices],
                            [alg.degrees[b] for b in indices], brackets, weights=weights)


# -- subalgebras ----------------------------------------------------------


class Subalgebra:
    """Subspace of an ambient algebra given by basis columns, rref-canonical."""

    def __init__(self, ambient: GradedLieAlgebra, vectors, check=True):
        self.ambient = ambient
        f = ambient.field
        rows = [to_list(f, vclean(f, {i: f.coerce(c) for i, c in v.items()}), ambient.dim)
                for v in vectors]
        R, pivots = rref(Matrix(f, rows, ncols=ambient.dim))
        self.basis = [from_list(f, R.rows[i]) for i in range(len(pivots))]
        self.pivots = list(pivots)
        self._rref_rows = [R.rows[i] for i in range(len(pivots))]
        if check and not self.is_subalgebra():
            raise LieAlgebraError("span is not closed under the bracket")

    @property
    def dim(self):
        return len(self.basis)

    def contains(self, v: dict) -> bool:
        f = self.ambient.field
        vec = to_list(f, v, self.ambient.dim)
        for row, pc in zip(self._rref_rows, self.pivots):
            c = vec[pc]
            if not f.is_zero(c):
                vec = [a - c * b for a, b in zip(vec, row)]
        return all(f.is_zero(x) for x in vec)

    def coordinates(self, v: dict):
        """Coordinates in the rref basis; error if v is outside the span."""
        f = self.ambient.field
        vec = to_list(f, v, self.ambient.dim)
        coords = []
        for row, pc in zip(self._rref_rows, self.pivots):
            c = vec[pc]
            coords.append(c)
            if not f.is_zero(c):
                vec = [a - c * b for a, b in zip(vec, row)]
        if any(not f.is_zero(x) for x in vec):
            raise LieAlgebraError("vector is not in the subspace")
        return coords

    def is_subalgebra(self) -> bool:
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                w = self.ambient.bracket(self.basis[i], self.basis[j])
                if not self.contains(w):
                    return False
        return True

    def is_graded(self) -> bool:
        f = self.ambient.field
        for v in self.basis:
            by_deg: dict = {}
            for i, c in v.items():
                by_deg.setdefault(self.ambient.degrees[i], {})[i] = c
            if len(by_deg) > 1 and not all(self.contains(part) for part in by_deg.values()):
                return False
        return True

    def __eq__(self, other):
        return (isinstance(other, Subalgebra) and self.ambient is other.ambient
                and self.basis == other.basis)


def is_graded_subalgebra(vectors, ambient: GradedLieAlgebra) -> bool:
    try:
        sub = Subalgebra(ambient, vectors)
    except LieAlgebraError:
        return False
    return sub.is_graded()


def adjoint_action(alg: GradedLieAlgebra, z: dict, subspace: Subalgebra) -> Matrix:
    """Matrix of ad_z on an invariant subspace; error if not invariant."""
    cols = []
    for v in subspace.basis:
        w = alg.bracket(z, v)
        if not subspace.contains(w):
            raise LieAlgebraError("subspace is not ad-invariant")
        cols.append(subspace.coordinates(w))
    return Matrix.from_columns(alg.field, cols, nrows=subspace.dim)


def closure(alg: GradedLieAlgebra, vectors):
    """Smallest subalgebra containing the given vectors (list of dicts)."""
    f = alg.field
    current = [vclean(f, {i: f.coerce(c) for i, c in v.items()}) for v in vectors]
    while True:
        rows = [to_list(f, v, alg.dim) for v in current]
        R, pivots = rref(Matrix(f, rows, ncols=alg.dim))
        basis = [from_list(f, R.rows[i]) for i in range(len(pivots))]
        new = list(basis)
        grew = False
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                w = alg.bracket(basis[i], basis[j])
                if w:
                    new.append(w)
        R2, p2 = rref(Matrix(f, [to_list(f, v, alg.dim) for v in new], ncols=alg.dim))
        if len(p2) > len(pivots):
            grew = True
        current = [from_list(f, R2.rows[i]) for i in range(len(p2))]
        if not grew:
            return Subalgebra(alg, current, check=False)


# -- Tanaka prolongation --------------------------------------------------


def generated_in_degree_minus_one(m: GradedLieAlgebra) -> bool:
    f = m.field
    depth = -min(m.degrees)
    for k in range(2, depth + 1):
        produced = []
        for i in m.degree_indices(-1):
            for j in m.degree_indices(-(k - 1)):
                w = m.bracket_basis(i, j)
                if w:
                    produced.append(to_list(f, w, m.dim))
        target = m.degree_indices(-k)
        if not target:
            continue
        if not produced:
            return False
        R, pivots = rref(Matrix(f, produced, ncols=m.dim))
        if len(pivots) != len(target):
            return False
    return True


class _Prolongation:
    """Incremental Tanaka prolongation of a negatively graded algebra.

    Levels d >= 0 are built as spaces of degree-d maps phi: m -> P (the
    algebra accumulated so far) satisfying the derivation identity
    phi([x,y]) = [phi(x), y] + [x, phi(y)].  Level 0 may be prescribed
    (a reductive part k0 acting on m) instead of computed.
    """

    def __init__(self, m: GradedLieAlgebra):
        self.m = m
        self.f = m.field
        self.n = m.dim
        self.depth = -min(m.degrees)
        # current prolongation basis data: degrees + bracket tensor; the
        # first n indices are m's own basis
        self.degrees = list(m.degrees)
        self.brackets = {k: dict(v) for k, v in m.brackets.items()}
        self.level_start = {}

    def dim_total(self):
        return len(self.degrees)

    def _bracket_basis(self, i, j):
        if i == j:
            return {}
        if i < j:
            return self.brackets.get((i, j), {})
        v = self.brackets.get((j, i))
        return vscale(self.f, -self.f.one, v) if v else {}

    def _bracket(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for i, a in x.items():
            for j, b in y.items():
                v = self._bracket_basis(i, j)
                if v:
                    vaxpy(self.f, out, a * b, v)
        return out

    def _slice(self, d):
        return [i for i, deg in enumerate(self.degrees) if deg == d]

    def install_level(self, d, actions):
        """Append level-d basis elements with the given actions on m.

        `actions` is a list of maps: actions[q][b] = sparse vector in the
        current prolongation coordinates, the value of the q-th new basis
        element on m's basis vector b.
        """
        start = self.dim_total()
        self.level_start[d] = start
        for q, act in enumerate(actions):
            self.degrees.append(d)
            idx = start + q
            for b in range(self.n):
                v = act.get(b)
                if v:
                    self.brackets[(b, idx)] = vscale(self.f, -self.f.one, v)
        return list(range(start, start + len(actions)))

    def solve_level(self, d):
        """Compute the degree-d prolongation space as action maps on m."""
        slots = []      # (m basis index b, target index t) unknown positions
        for b in range(self.n):
            tgt = self._slice(self.m.degrees[b] + d)
            slots.extend((b, t) for t in tgt)
        if not slots:
            return []
        col = {bt: q for q, bt in enumerate(slots)}
        rows = []
        for i in range(self.n):
            for j in range(i + 1, self.n):
                # phi([ei,ej]) - [phi(ei), ej] - [ei, phi(ej)] = 0
                coeffs: dict = {}
                br = self.m.bracket_basis(i, j)
                for b, c in br.items():
                    for t in self._slice(self.m.degrees[b] + d):
                        coeffs.setdefault((b, t), {})
                        vaxpy(self.f, coeffs[(b, t)], c, {t: self.f.one})
                for t in self._slice(self.m.degrees[i] + d):
                    w = self._bracket_basis(t, j)
                    if w:
                        coeffs.setdefault((i, t), {})
                        vaxpy(self.f, coeffs[(i, t)], -self.f.one, w)
                for t in self._slice(self.m.degrees[j] + d):
                    w = self._bracket_basis(i, t)
                    if w:
                        coeffs.setdefault((j, t), {})
                        vaxpy(self.f, coeffs[(j, t)], -self.f.one, w)
                # assemble equations componentwise
                comp: dict = {}
                for bt, vec in coeffs.items():
                    for k, c in vec.items():
                        comp.setdefault(k, {})[col[bt]] = comp.get(k, {}).get(col[bt], self.f.zero) + c
                for k, entries in sorted(comp.items()):
                    row = [self.f.zero] * len(slots)
                    for q, c in entries.items():
                        row[q] = c
                    if any(not self.f.is_zero(x) for x in row):
                        rows.append(row)
        if not rows:
            basis = Matrix.identity(self.f, len(slots)).rows
        else:
            basis = kernel_basis(Matrix(self.f, rows, ncols=len(slots)))
        actions = []
        for vec in basis:
            act: dict = {}
            for q, (b, t) in enumerate(slots):
                if not self.f.is_zero(vec[q]):
                    act.setdefault(b, {})[t] = vec[q]
            actions.append(act)
        return actions

    def assemble_positive_brackets(self):
        """Fill in [level_i, level_j] via adjoint actions on m.

        Brackets are solved in increasing total degree; when the target
        slice was never built (degree above the computed range) the
        adjoint action must vanish, otherwise the truncation is not an
        algebra and we refuse to return it.
        """
        built = sorted(self.level_start)
        pairs = sorted(
            ((di + dj, u, w)
             for di in built for dj in built if dj >= di
             for u in self._slice(di) if u >= self.n
             for w in self._slice(dj) if w >= self.n and w > u))
        for total, u, w in pairs:
            self._define_positive_bracket(u, w, total)

    def _define_positive_bracket(self, u, w, total):
        profile = {}
        for b in range(self.n):
            profile[b] = vsub(self.f,
                              self._bracket({u: self.f.one}, self._bracket_basis(w, b)),
                              self._bracket({w: self.f.one}, self._bracket_basis(u, b)))
        tgt = [t for t in self._slice(total) if t >= self.n]
        if not tgt:
            if any(profile[b] for b in profile):
                raise LieAlgebraError(
                    "prolongation truncated below its closure degree")
            return
        # coordinates of [u,w] in the degree-`total` slice are determined by
        # the action on m (faithfulness of the prolongation action)
        keyset = sorted({(b, k) for b, v in profile.items() for k in v}
                        | {(b, k) for t in tgt
                           for b in range(self.n) for k in self._bracket_basis(t, b)})
        rows = [[self._bracket_basis(t, b).get(k, self.f.zero) for t in tgt]
                for (b, k) in keyset]
        rhs = [profile[b].get(k, self.f.zero) for (b, k) in keyset]
        sol = solve_linear(Matrix(self.f, rows, ncols=len(tgt)), rhs)
        if sol is None:
            raise LieAlgebraError("positive bracket inconsistent with the action")
        val = {t: c for t, c in zip(tgt, sol[0]) if not self.f.is_zero(c)}
        if val:
            self.brackets[(u, w)] = val


def _prolong(m: GradedLieAlgebra, max_degree: int, level0_actions=None,
             assemble=True):
    pr = _Prolongation(m)
    dims = []
    for d in range(0, max_degree + 1):
        if d == 0 and level0_actions is not None:
            actions = level0_actions
        else:
            actions = pr.solve_level(d)
        pr.install_level(d, actions)
        dims.append(len(actions))
        if not actions:
            break
    alg = None
    if assemble:
        pr.assemble_positive_brackets()
        labels = list(m.labels) + [f"pr{d}_{q}" for d, dim in enumerate(dims)
                                   for q in range(dim)]
        alg = GradedLieAlgebra(m.field, labels, pr.degrees, pr.brackets)
    return dims, alg


def tanaka_prolongation(m: GradedLieAlgebra, max_degree: int = 3) -> GradedLieAlgebra:
    """Degree-by-degree Tanaka prolongation, stopping at a zero level.

    The bracket tensor of the result is complete for degree sums up to
    `max_degree`; when a level vanishes before `max_degree` the result is
    the full (finite) prolongation.
    """
    if max_degree < 0:
        raise LieAlgebraError("max_degree must be nonnegative")
    if any(d >= 0 for d in m.degrees):
        raise LieAlgebraError("input must be negatively graded")
    if not generated_in_degree_minus_one(m):
        raise LieAlgebraError("input is not generated in degree -1")
    _, alg = _prolong(m, max_degree)
    return alg


def positive_prolongation_dims(c3: C3, k0_vectors, max_degree: int = 3):
    """Dims of the positive Tanaka prolongation levels of g_- + k0."""
    g = c3.alg
    neg = c3.indices_neg()
    k0 = Subalgebra(g, k0_vectors)          # errors unless a subalgebra
    for v in k0.basis:
        if any(g.degrees[i] != 0 for i in v):
            raise LieAlgebraError("k0 must sit in degree 0")
    m = restrict_to_indices(g, neg)
    pos = {b: n for n, b in enumerate(neg)}
    level0 = []
    for z in k0.basis:
        act = {}
        for nloc, b in enumerate(neg):
            w = g.bracket(z, g.basis_vector(b))
            if w:
                act[nloc] = {pos[k]: c for k, c in w.items()}
        level0.append(act)
    dims, _ = _prolong(m, max_degree, level0_actions=level0, assemble=False)
    dims += [0] * (max_degree + 1 - len(dims))
    return tuple(dims[1:max_degree + 1])


def dump_algebra_json(alg: GradedLieAlgebra) -> str:
    return json.dumps(alg.to_json(), indent=2, sort_keys=True)
