"""Verification of the embedded structure-equation tables.

Each final model is stored as the exterior derivatives of a left-invariant
coframe.  Verification rebuilds the Lie algebra, checks Jacobi and the
isotropy subalgebra, reconstructs the filtration from the distribution,
identifies the symbol with g_- (x-line and a-plane are intrinsic, so the
identification is canonical up to GL(x) x GL(a), and any choice works),
and then runs the full invariant pipeline on the resulting deformation:
regular normal connection, harmonic curvature, symmetry dimension.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from ._sparse import vaxpy, vclean, to_list, from_list
from .cartan import (
    Normalizer,
    classify_quintic,
    curvature,
    harmonic_curvature,
    initial_connection,
    symmetry_dimension,
)
from .exactmath import Matrix, QQ, field_for, kernel_basis, rref, solve_linear
from .liealg import (
    FilteredLieAlgebra,
    GradedLieAlgebra,
    LieAlgebraError,
    check_jacobi,
    restrict_to_indices,
)


class ModelError(ValueError):
    pass


def _load_models():
    with resources.files("c3monge.data").joinpath("models.json").open() as fh:
        return json.load(fh)["models"]


def parse_coeff(text: str, field, sign_values: dict):
    """Parse '2', '-1', 'alpha', '2*alpha', '1+2*alpha', 'epsilon', ..."""
    total = field.coerce(0)
    text = text.replace(" ", "")
    term = ""
    terms = []
    for ch in text:
        if ch in "+-" and term and term[-1] not in "+-*":
            terms.append(term)
            term = ch
        else:
            term += ch
    if term:
        terms.append(term)
    for t in terms:
        sign = 1
        while t and t[0] in "+-":
            if t[0] == "-":
                sign = -sign
            t = t[1:]
        factors = t.split("*") if t else ["1"]
        val = field.coerce(sign)
        for fac in factors:
            if not fac:
                continue
            if fac in sign_values:
                val = val * field.coerce(sign_values[fac])
            elif fac.lstrip("-").replace("/", "").isdigit():
                val = val * field.coerce(Fraction(fac))
            else:
                val = val * field.gen(fac)
        total = total + val
    return total


@dataclass
class ModelTable:
    label: str
    dim: int
    isotropy: list                 # 1-based indices of the isotropy basis
    distribution_annihilator: list
    params: tuple
    signs: tuple
    dtheta: dict
    expected_d: int
    expected_quintic: str

    @classmethod
    def load_all(cls):
        return [cls(label=m["label"], dim=m["dim"], isotropy=m["isotropy"],
                    distribution_annihilator=m["distribution_annihilator"],
                    params=tuple(m["params"]), signs=tuple(m["signs"]),
                    dtheta=m["dtheta"], expected_d=m["expected_d"],
                    expected_quintic=m["expected_quintic"])
                for m in _load_models()]

    def sign_choices(self):
        if not self.signs:
            return [{}]
        out = [{}]
        for s in self.signs:
            out = [dict(d, **{s: v}) for d in out for v in (1, -1)]
        return out

    def lie_algebra(self, field, sign_values):
        """Structure constants from the coframe derivatives.

        With dtheta^k = sum a^k_ij theta^i ^ theta^j (i < j) one has
        [e_i, e_j] = -sum_k a^k_ij e_k.
        """
        brackets: dict = {}
        for kk, terms in self.dtheta.items():
            k = int(kk) - 1
            for coeff, i, j in terms:
                c = parse_coeff(coeff, field, sign_values)
                cur = brackets.setdefault((i - 1, j - 1), {})
                cur[k] = cur.get(k, field.zero) - c
        brackets = {ij: vclean(field, v) for ij, v in brackets.items()}
        brackets = {ij: v for ij, v in brackets.items() if v}
        labels = [f"e{n+1}" for n in range(self.dim)]
        return GradedLieAlgebra(field, labels, [0] * self.dim, brackets)


def reconstruct_filtration(alg: GradedLieAlgebra, isotropy, dist_annihilator):
    """Adapted filtered algebra from the isotropy and the distribution.

    k^0 = isotropy span, k^-1 = annihilator of theta^1..theta^5, deeper
    terms generated by brackets; returns the filtered algebra on an
    adapted basis together with the base change (new basis columns).
    """
    f = alg.field
    n = alg.dim

    def span_rows(vectors):
        R, p = rref(Matrix(f, [to_list(f, v, n) for v in vectors], ncols=n))
        return [R.rows[i] for i in range(len(p))], p

    l_vecs = [alg.basis_vector(i - 1) for i in isotropy]
    dist = [alg.basis_vector(i) for i in range(n)
            if i + 1 not in dist_annihilator]
    km1 = dist
    rows1, piv1 = span_rows(km1)
    km2 = [from_list(f, r) for r in rows1]
    for a in range(len(km1)):
        for b in range(a + 1, len(km1)):
            w = alg.bracket(km1[a], km1[b])
            if w:
                km2.append(w)
    rows2, piv2 = span_rows(km2)
    km2v = [from_list(f, r) for r in rows2]
    km3 = list(km2v)
    for x in km1:
        for y in km2v:
            w = alg.bracket(x, y)
            if w:
                km3.append(w)
    rows3, piv3 = span_rows(km3)
    if len(piv3) != n:
        raise ModelError("distribution is not bracket generating")
    rows0, piv0 = span_rows(l_vecs)
    dims = (len(piv0), len(piv1), len(piv2), len(piv3))
    if [dims[1] - dims[0], dims[2] - dims[1], dims[3] - dims[2]] != [3, 2, 3]:
        raise ModelError(f"filtration growth {dims} does not match (3,2,3)")
    # adapted basis: extend from l outward, then sort into degree order
    stages = [(rows0, piv0), (rows1, piv1), (rows2, piv2), (rows3, piv3)]
    basis = [from_list(f, r) for r in rows0]
    degs = [0] * len(piv0)
    for deg, (rows, piv) in ((-1, stages[1]), (-2, stages[2]), (-3, stages[3])):
        cur_rows, cur_piv = span_rows(basis)
        for r in rows:
            vec = list(r)
            for row, pc in zip(cur_rows, cur_piv):
                c = vec[pc]
                if not f.is_zero(c):
                    vec = [a - c * b for a, b in zip(vec, row)]
            if any(not f.is_zero(x) for x in vec):
                basis.append(from_list(f, vec))
                degs.append(deg)
                cur_rows, cur_piv = span_rows(basis)
    order = sorted(range(len(basis)), key=lambda m: degs[m])
    basis = [basis[m] for m in order]
    degs = [degs[m] for m in order]
    # transport the bracket
    cols = [to_list(f, v, n) for v in basis]
    T = Matrix(f, cols, ncols=n).transpose()
    brackets = {}
    for a in range(n):
        for b in range(a + 1, n):
            w = alg.bracket(basis[a], basis[b])
            if not w:
                continue
            sol = solve_linear(T, to_list(f, w, n))
            if sol is None:
                raise ModelError("bracket leaves the adapted span")
            coords = vclean(f, from_list(f, sol[0]))
            if coords:
                brackets[(a, b)] = coords
    labels = [f"b{m+1}" for m in range(n)]
    filtered = FilteredLieAlgebra(f, labels, degs, brackets)
    if not filtered.grading_ok():
        raise ModelError("reconstructed filtration is not bracket compatible")
    return filtered, basis


def symbol_embedding(engine, filtered: FilteredLieAlgebra):
    """A graded monomorphism gr(k) -> g extending an iso of the symbol.

    The x-line is the kernel of [., k^-2] on gr_-1 and the a-plane is the
    support of the kernel 2-vector of the bracket on Lambda^2 gr_-1; any
    GL(x) x GL(a) normalization gives a valid embedding, so scales are
    fixed at 1.
    """
    c3 = engine.c3
    f = filtered.field
    gF = engine.ctx(f).gF
    gr = filtered.gr()
    neg = [i for i in range(gr.dim) if gr.degrees[i] < 0]
    m1 = gr.degree_indices(-1)
    m2 = gr.degree_indices(-2)
    m3 = gr.degree_indices(-3)
    # x-line inside gr_-1
    rows = []
    for b in m2:
        for t in range(gr.dim):
            rows.append([gr.bracket_basis(a, b).get(t, f.zero) for a in m1])
    ker = kernel_basis(Matrix(f, rows, ncols=len(m1)))
    if len(ker) != 1:
        raise ModelError(f"x-line has dimension {len(ker)}")
    x_m = {m1[i]: c for i, c in enumerate(ker[0]) if not f.is_zero(c)}
    # kernel 2-vector of the bracket Lambda^2 gr_-1 -> gr_-2
    pairs = [(a, b) for ai, a in enumerate(m1) for b in m1[ai + 1:]]
    rows = []
    for t in range(gr.dim):
        rows.append([gr.bracket_basis(a, b).get(t, f.zero) for (a, b) in pairs])
    ker2 = kernel_basis(Matrix(f, rows, ncols=len(pairs)))
    if len(ker2) != 1:
        raise ModelError(f"bracket kernel on Lambda^2 gr_-1 has dimension {len(ker2)}")
    # support of the 2-vector: v with omega ^ v = 0
    omega = {p: c for p, c in zip(pairs, ker2[0])}
    triples = [(a, b, c) for ai, a in enumerate(m1) for bi, b in enumerate(m1[ai + 1:], ai + 1)
               for c in m1[bi + 1:]]
    rows = []
    for (a, b, c) in triples:
        row = []
        for v in m1:
            if v == c:
                row.append(omega.get((a, b), f.zero))
            elif v == b:
                row.append(-omega.get((a, c), f.zero))
            elif v == a:
                row.append(omega.get((b, c), f.zero))
            else:
                row.append(f.zero)
        rows.append(row)
    kera = kernel_basis(Matrix(f, rows, ncols=len(m1)))
    if len(kera) != 2:
        raise ModelError(f"a-plane has dimension {len(kera)}")
    a_vecs = [{m1[i]: c for i, c in enumerate(v) if not f.is_zero(c)} for v in kera]

    # propagate the identification through brackets
    x_g = {c3.x_index: f.one}
    a_g = [{c3.a_indices[0]: f.one}, {c3.a_indices[1]: f.one}]
    known = [(x_m, x_g), (a_vecs[0], a_g[0]), (a_vecs[1], a_g[1])]

    def span_data(pairs):
        rows = [to_list(f, v, gr.dim) for v, _ in pairs]
        R, piv = rref(Matrix(f, rows, ncols=gr.dim))
        return [R.rows[i] for i in range(len(piv))], piv

    def is_new(vec, redrows, piv):
        red = list(vec)
        for row, pc in zip(redrows, piv):
            c = red[pc]
            if not f.is_zero(c):
                red = [x - c * y for x, y in zip(red, row)]
        return any(not f.is_zero(x) for x in red)

    while True:
        redrows, piv = span_data(known)
        if len(piv) == len(neg):
            break
        grew = False
        for (v1, g1) in list(known):
            for (v2, g2) in list(known):
                w = gr.bracket(v1, v2)
                if not w:
                    continue
                if is_new(to_list(f, w, gr.dim), redrows, piv):
                    known.append((w, gF.bracket(g1, g2)))
                    redrows, piv = span_data(known)
                    grew = True
        if not grew:
            raise ModelError("symbol is not generated like g_-")
    # solve the linear expression of each span member and check consistency
    span_cols = [to_list(f, v, gr.dim) for v, _ in known]
    T = Matrix(f, span_cols, ncols=gr.dim).transpose()
    f_map = {}
    for i in neg:
        sol = solve_linear(T, to_list(f, gr.basis_vector(i), gr.dim))
        if sol is None:
            raise ModelError("negative part not covered by the propagation")
        img: dict = {}
        for c, (_v, gvec) in zip(sol[0], known):
            if not f.is_zero(c):
                vaxpy(f, img, c, gvec)
        f_map[i] = vclean(f, img)
    # full homomorphism check on the negative part
    for i in neg:
        for j in neg:
            if i >= j:
                continue
            lhs = gF.bracket(f_map[i], f_map[j])
            rhs: dict = {}
            for t, c in gr.bracket_basis(i, j).items():
                vaxpy(f, rhs, c, f_map[t])
            if vclean(f, dict((k2, lhs.get(k2, f.zero) - rhs.get(k2, f.zero))
                              for k2 in set(lhs) | set(rhs))):
                raise ModelError("symbol map is not a homomorphism")
    # degree-0 part: push derivations into g_0
    g0 = c3.indices_deg(0)
    embed_cols = [f_map[i] for i in neg]
    iso = [i for i in range(gr.dim) if gr.degrees[i] == 0]
    for w in iso:
        # solve sum_z c_z [e_z, f(i)] = f([w, i]) for all i
        rows = []
        rhs = []
        for i in neg:
            target: dict = {}
            for t, c in gr.bracket_basis(w, i).items():
                vaxpy(f, target, c, f_map[t])
            imgs = [gF.bracket(gF.basis_vector(z), f_map[i]) for z in g0]
            for t in range(21):
                rows.append([im.get(t, f.zero) for im in imgs])
                rhs.append(target.get(t, f.zero))
        sol = solve_linear(Matrix(f, rows, ncols=len(g0)), rhs)
        if sol is None:
            raise ModelError("isotropy does not act by restricted g_0 derivations")
        zvec: dict = {}
        for c, z in zip(sol[0], g0):
            if not f.is_zero(c):
                zvec[z] = c
        embed_cols.append(zvec)
    order = neg + iso
    if order != list(range(gr.dim)):
        raise ModelError("adapted basis is not ordered by degree")
    # embedding must be a graded homomorphism on all of gr
    for i in range(gr.dim):
        for j in range(i + 1, gr.dim):
            lhs = gF.bracket(embed_cols[i], embed_cols[j])
            rhs = {}
            for t, c in gr.bracket_basis(i, j).items():
                vaxpy(f, rhs, c, embed_cols[t])
            diff = {k2: lhs.get(k2, f.zero) - rhs.get(k2, f.zero)
                    for k2 in set(lhs) | set(rhs)}
            if vclean(f, diff):
                raise ModelError("embedding is not a graded homomorphism")
    return embed_cols


def verify_model(engine, table: ModelTable, sign_values) -> dict:
    """All checks for one model table at one sign choice; never raises."""
    record = {"label": table.label, "signs": dict(sign_values), "checks": {},
              "d": None, "quintic_label": None}
    field = field_for(table.params)
    try:
        alg = table.lie_algebra(field, sign_values)
        record["checks"]["jacobi"] = check_jacobi(alg)
        if not record["checks"]["jacobi"]:
            return record
        # isotropy subalgebra
        liso = [alg.basis_vector(i - 1) for i in table.isotropy]
        from .liealg import Subalgebra
        try:
            Subalgebra(alg, liso)
            record["checks"]["isotropy_subalgebra"] = True
        except LieAlgebraError:
            record["checks"]["isotropy_subalgebra"] = False
            return record
        filtered, _basis = reconstruct_filtration(alg, table.isotropy,
                                                  table.distribution_annihilator)
        record["checks"]["filtration"] = True
        embed = symbol_embedding(engine, filtered)
        record["checks"]["symbol"] = True
        kbar = filtered.gr()
        ctx = engine.ctx(field)
        nz = Normalizer(ctx, kbar, embed)
        conn = nz.normalize(initial_connection(ctx, filtered, embed))
        chain = curvature(conn)
        hc = harmonic_curvature(ctx, engine.dec, chain)
        record["checks"]["scalar_vanishes"] = field.is_zero(hc.scalar)
        quintic_zero = all(field.is_zero(c) for c in hc.quintic)
        record["quintic_label"] = None if quintic_zero else \
            classify_quintic(field, hc.quintic)
        record["checks"]["quintic_type"] = record["quintic_label"] == table.expected_quintic
        d = symmetry_dimension(conn)
        record["d"] = d
        record["checks"]["symmetry_dimension"] = (d == table.expected_d)
    except (ModelError, LieAlgebraError, ValueError) as exc:
        record["checks"]["error"] = f"{type(exc).__name__}: {exc}"
    return record


def verify_models(engine=None, label=None):
    """Verification records for all (or one) embedded model tables."""
    from .pipeline import get_engine
    engine = engine or get_engine()
    out = []
    for table in ModelTable.load_all():
        if label is not None and table.label != label:
            continue
        for sv in table.sign_choices():
            out.append(verify_model(engine, table, sv))
    if label is not None and not out:
        raise ModelError(f"no model labeled {label}")
    return out
