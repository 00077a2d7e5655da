"""Classification pipeline: runs the seven-step algorithm per class.

For each conjugacy class of graded subalgebras k = g_- + k_0 (catalog in
data/classes.json): Kuranishi family -> deformed algebras -> regular
normal connection -> harmonic curvature -> symmetry dimension -> verdict
per irreducible component of the obstruction locus, with torus weight
data for the final quotient step.  The continuous family N2a is handled
over Q(lambda) off the finite special set, whose points are run
individually.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from importlib import resources
from itertools import combinations
from math import gcd as int_gcd

from ._sparse import vaxpy, vclean
from .cartan import (
    CartanContext,
    Normalizer,
    classify_quintic,
    curvature,
    harmonic_curvature,
    initial_connection,
    killing_gram,
    quintic_stabilizer,
    symmetry_dimension,
)
from .cohomology import Cochain, cohomology_dims, harmonic_decomposition, nr_bracket
from .exactmath import QQ, FunctionField, field_for, substitute
from .kuranishi import (
    Dgla,
    build_dgla,
    corrector_normal_form,
    deformed_algebra,
    kuranishi_family,
    square_zero_representative,
)
from .liealg import (
    GradedLieAlgebra,
    Subalgebra,
    algebra_from_vectors,
    change_field,
    build_c3,
)


class PipelineError(ValueError):
    pass


_GEN_NAMES = ("H", "X", "Y", "E", "E'")


def _load_json(name):
    with resources.files("c3monge.data").joinpath(name).open() as fh:
        return json.load(fh)


@dataclass
class ClassDescriptor:
    """One G_0-conjugacy class of graded subalgebras g_- + k_0."""

    label: str
    params: tuple
    k0_words: list            # list of [coeff-string, generator-name] lists
    k0_labels: list
    torus: list               # positions of the diagonalizable generators
    quintic_type: str
    expected: dict

    def k0_vectors(self, engine, field):
        out = []
        for word in self.k0_words:
            vec: dict = {}
            for coeff, name in word:
                c = field.gen(coeff) if coeff in self.params else \
                    field.coerce(Fraction(coeff))
                base = engine.generator(name)
                for i, x in base.items():
                    cur = vec.get(i, field.zero) + c * field.coerce(x)
                    if field.is_zero(cur):
                        vec.pop(i, None)
                    else:
                        vec[i] = cur
            out.append(vec)
        return out


@dataclass
class ComponentReport:
    name: str
    coordinates: list
    substitution: dict
    harmonic_scalar: str
    harmonic_quintic: list
    quintic_label: str
    generic_d: int
    dim_k: int
    torus_weights: dict
    flat_locus: list
    verdict: str
    reason: str


@dataclass
class ClassReport:
    label: str
    dim_k: int
    quintic_type: str
    betti: dict
    coordinates: list          # (name, weight, hweight)
    obstructions: list
    components: list
    checks: list = dc_field(default_factory=list)
    notes: list = dc_field(default_factory=list)

    def failures(self):
        return [desc for desc, ok in self.checks if not ok]

    def to_json(self):
        return {
            "label": self.label,
            "dim_k": self.dim_k,
            "quintic_type": self.quintic_type,
            "betti": [[p, i, d] for (p, i), d in sorted(self.betti.items())],
            "coordinates": [{"name": n, "weight": w, "hweight": list(hw)}
                            for (n, w, hw) in self.coordinates],
            "obstructions": self.obstructions,
            "components": [vars(c) for c in self.components],
            "checks": [[d, bool(ok)] for d, ok in self.checks],
            "notes": self.notes,
        }


class Engine:
    """Shared exact data: C3, the harmonic module, solvers, caches."""

    def __init__(self):
        self.c3 = build_c3()
        self.dec = harmonic_decomposition(self.c3)
        self.gram = killing_gram(self.c3)
        self._ctx: dict = {}
        self._normalizers: dict = {}
        g = self.c3.alg
        self._gens = {
            "H": self.c3.H, "X": self.c3.X, "Y": self.c3.Y,
            "E": self.c3.E, "E'": self.c3.Ep,
        }
        self.neg = self.c3.indices_neg()

    def generator(self, name):
        return self._gens[name]

    def ctx(self, field) -> CartanContext:
        key = ("QQ",) if field is QQ else field.params
        if key not in self._ctx:
            gF = self.c3.alg if field is QQ else change_field(self.c3.alg, field)
            self._ctx[key] = CartanContext(self.c3, field, gF, self.c3.indices_neg(),
                                           self.c3.indices_pplus(), self.gram,
                                           _gram_inv(self.gram))
        return self._ctx[key]

    def class_algebra(self, desc: ClassDescriptor, field):
        """(kbar over `field`, embedding columns over `field`)."""
        g = self.c3.alg
        gF = self.ctx(field).gF
        k0 = desc.k0_vectors(self, field)
        embed = [{idx: field.one} for idx in self.neg] + k0
        labels = [g.labels[i] for i in self.neg] + list(desc.k0_labels)
        kbar = algebra_from_vectors(gF, embed, labels)
        return kbar, embed

    def verify_descriptor(self, desc: ClassDescriptor):
        """The catalog conditions: dim >= 2 subalgebra killing a quintic."""
        field = field_for(desc.params)
        kbar, embed = self.class_algebra(desc, field)
        k0dim = kbar.dim - len(self.neg)
        if k0dim < 2:
            raise PipelineError(f"{desc.label}: k_0 has dimension {k0dim} < 2")
        from .cartan import g0_class_action
        g0, mats = g0_class_action(self.c3, self.dec)
        pos = {gi: n for n, gi in enumerate(g0)}
        k0 = desc.k0_vectors(self, field)
        rows = []
        for z in k0:
            # the quintic block of the action of z (rows/cols 1..6)
            block = [[field.zero] * 6 for _ in range(6)]
            for gi, c in z.items():
                mat = mats[pos[gi]]
                for r in range(6):
                    for s in range(6):
                        x = mat.rows[1 + r][1 + s]
                        if x:
                            block[r][s] = block[r][s] + c * field.coerce(x)
            rows.extend(block)
        from .exactmath import Matrix, kernel_basis
        ker = kernel_basis(Matrix(field, rows, ncols=6))
        if not ker:
            raise PipelineError(f"{desc.label}: k_0 annihilates no quintic vector")
        label = classify_quintic(field, ker[0])
        if label != desc.quintic_type:
            raise PipelineError(f"{desc.label}: annihilated quintic has type {label}, "
                                f"catalog says {desc.quintic_type}")
        return True

    def normalizer(self, desc_label, kbar_base, embed_base) -> Normalizer:
        if desc_label not in self._normalizers:
            ctx = self.ctx(kbar_base.field)
            self._normalizers[desc_label] = Normalizer(ctx, kbar_base, embed_base)
        return self._normalizers[desc_label]


def _gram_inv(gram):
    from .cartan import _invert_q
    return _invert_q(gram)


_ENGINE = None


def get_engine() -> Engine:
    global _ENGINE
    if _ENGINE is None:
        _ENGINE = Engine()
    return _ENGINE


def enumerate_classes():
    """The five catalog classes, re-verified on load."""
    data = _load_json("classes.json")
    engine = get_engine()
    out = []
    for entry in data["classes"]:
        if entry["label"] == "N2a_inf":
            continue
        desc = _descriptor(entry)
        engine.verify_descriptor(desc)
        out.append(desc)
    return out


def catalog_descriptor(label):
    data = _load_json("classes.json")
    for entry in data["classes"]:
        if entry["label"] == label:
            return _descriptor(entry)
    raise PipelineError(f"no class labeled {label}")


def _descriptor(entry) -> ClassDescriptor:
    return ClassDescriptor(
        label=entry["label"],
        params=tuple(entry.get("params", [])),
        k0_words=entry["k0"],
        k0_labels=entry["k0_labels"],
        torus=entry["torus"],
        quintic_type=entry["quintic_type"],
        expected=entry.get("expected", {}),
    )


def special_point_descriptor(l0: int, l1: int) -> ClassDescriptor:
    """The class N2a at the projective point (l0 : l1)."""
    if (l0, l1) == (0, 1):
        return catalog_descriptor("N2a_inf")
    word = []
    if l0:
        word += [[str(l0), "H"], [str(-5 * l0), "E"]]
    if l1:
        word += [[str(l1), "E'"]]
    return ClassDescriptor(
        label=f"N2a[{l0}:{l1}]",
        params=(),
        k0_words=[[["1", "X"]], word],
        k0_labels=["X", f"{l0}*(H-5E)+{l1}*E'"],
        torus=[1],
        quintic_type="N",
        expected={},
    )


def special_points():
    """The finite set Lambda in QP^1: zero loci of the nonzero a-weights
    of the positive-weight part of C(n, n) + C(n), n = g_- + <X>."""
    engine = get_engine()
    c3 = engine.c3
    g = c3.alg
    embed = [{i: Fraction(1)} for i in engine.neg] + [dict(c3.X)]
    labels = [g.labels[i] for i in engine.neg] + ["X"]
    n_alg = algebra_from_vectors(g, embed, labels)
    weights = []
    for i in range(n_alg.dim):
        h, e, ep = n_alg.weights[i]
        weights.append((h - 5 * e, ep))
    degs = n_alg.degrees
    seen = set()
    for p in range(0, n_alg.dim + 1):
        for combo in combinations(range(n_alg.dim), p):
            src_deg = sum(degs[i] for i in combo)
            src_w = (sum(weights[i][0] for i in combo),
                     sum(weights[i][1] for i in combo))
            # scalar cochains: weight -src_deg, a-weight -src_w
            if -src_deg >= 1 and (src_w[0] or src_w[1]):
                seen.add((-src_w[0], -src_w[1]))
            for k in range(n_alg.dim):
                if degs[k] - src_deg >= 1:
                    m0 = weights[k][0] - src_w[0]
                    m1 = weights[k][1] - src_w[1]
                    if m0 or m1:
                        seen.add((m0, m1))
    points = set()
    for (m0, m1) in seen:
        # zero locus of l0*m0 + l1*m1: the point (-m1 : m0)
        a, b = Fraction(-m1), Fraction(m0)
        mul = a.denominator * b.denominator // int_gcd(a.denominator, b.denominator)
        ia, ib = int(a * mul), int(b * mul)
        gg = int_gcd(abs(ia), abs(ib))
        ia, ib = ia // gg, ib // gg
        if ia < 0 or (ia == 0 and ib < 0):
            ia, ib = -ia, -ib
        points.add((ia, ib))
    return sorted(points)


# -- obstruction locus decomposition ------------------------------------------


def decompose_obstructions(field, polys, coord_names):
    """Split the obstruction zero locus into visible components.

    Handles the gcd-hyperplane + coordinate-subspace pattern of this
    application; returns (components, note) where components is a list of
    (name, substitution dict setting coordinates to 0), or (None, note)
    when the shape is not recognized ('flagged' outcome).
    """
    if not polys:
        return [("main", {})], None
    nums = []
    for p in polys:
        if not p.den.is_constant():
            return None, "obstruction polynomial is not polynomial"
        nums.append(p.num)
    g = nums[0]
    for p in nums[1:]:
        from .exactmath import poly_gcd
        g = poly_gcd(g, p)
    gterms = g.terms()
    coord_pos = {name: field.params.index(name) for name in coord_names}
    if g.is_constant():
        return None, "obstructions have no common linear factor"
    if len(gterms) != 1 or sum(gterms[0][0]) != 1:
        return None, f"common factor {g} is not a coordinate"
    hyper_idx = gterms[0][0].index(1)
    hyper = field.params[hyper_idx]
    if hyper not in coord_names:
        return None, f"common factor {g} is not a Kuranishi coordinate"
    comp1 = ("hyperplane", {hyper: 0})
    residual = [p.exquo(g.monic()) for p in nums]
    # eliminate: each residual must be forced to a coordinate-subspace
    zeroed = set()
    pending = [r for r in residual]
    progress = True
    while pending and progress:
        progress = False
        nxt = []
        for r in pending:
            terms = [(m, c) for m, c in r.terms()
                     if not any(m[coord_pos[z]] for z in zeroed)]
            if not terms:
                progress = True
                continue
            if len(terms) == 1:
                m, _c = terms[0]
                support = [n for n, e in enumerate(m) if e]
                names = [field.params[n] for n in support]
                free = [nm for nm in names if nm != hyper and nm in coord_names]
                if len(free) == 1:
                    zeroed.add(free[0])
                    progress = True
                    continue
                if not free:
                    return None, f"residual monomial {r} only involves {hyper}"
            nxt.append(r)
        pending = nxt
    if pending:
        return None, "residual system not reduced to coordinates"
    comp2 = ("line", {z: 0 for z in sorted(zeroed)})
    # exact verification: every obstruction vanishes on both components
    for name, subst in (comp1, comp2):
        images = {p: (field.coerce(0) if p in subst else field.gen(p))
                  for p in field.params}
        for p in polys:
            if not field.is_zero(substitute(p, images, field)):
                return None, f"component {name} does not kill the obstructions"
    return [comp1, comp2], None


# -- the class run -------------------------------------------------------------


def _coordinate_plan(h1_info, obstruction_hyperplane=None):
    """Final coordinate names for the H^1 classes of one family.

    h1_info: list of (weight, hweight) per class in dgla order.
    """
    n = len(h1_info)
    if n == 1:
        return ["t"]
    weights = [w for (w, _hw) in h1_info]
    if n == 2 and weights == [1, 1]:
        return ["t", "s"]
    names = [None] * n
    w1 = [m for m in range(n) if weights[m] == 1]
    w2 = [m for m in range(n) if weights[m] == 2]
    if len(w2) == 1 and len(w1) == n - 1:
        names[w2[0]] = "s"
        rest = sorted(w1, key=lambda m: (-h1_info[m][1][0]))
        if obstruction_hyperplane is not None and obstruction_hyperplane in rest:
            rest = [m for m in rest if m != obstruction_hyperplane] + \
                   [obstruction_hyperplane]
        for q, m in enumerate(rest):
            names[m] = f"t{q + 1}"
        return names
    return [f"c{m + 1}" for m in range(n)]


def run_class(desc: ClassDescriptor, engine: Engine | None = None) -> ClassReport:
    engine = engine or get_engine()
    engine.verify_descriptor(desc)
    base_field = field_for(desc.params)
    kbar_base, embed_base = engine.class_algebra(desc, base_field)
    torus_base = [kbar_base.basis_vector(len(engine.neg) + m) for m in desc.torus]

    betti = cohomology_dims(kbar_base, range(1, 4), range(1, 7),
                            invariance=torus_base)
    if any(betti.dim(1, i) for i in range(1, 7)):
        raise PipelineError(f"{desc.label}: H^0 of the DGLA is nonzero")

    L_base = build_dgla(kbar_base, invariance=torus_base)
    h1 = L_base.h1_data()
    if not h1:
        raise PipelineError(f"{desc.label}: rigid class, no deformations")
    report = ClassReport(label=desc.label, dim_k=kbar_base.dim,
                         quintic_type=desc.quintic_type,
                         betti=dict(betti.dims), coordinates=[],
                         obstructions=[], components=[])

    # provisional family to read off the obstruction structure
    prov = [f"u{m + 1}" for m in range(len(h1))]
    fam0, L0, kbar0, embed0 = _family(engine, desc, prov, reps_blocks=None)
    comps, note = decompose_obstructions(fam0.field, fam0.obstructions, prov)
    if note:
        report.notes.append(note)

    hyper_idx = None
    if comps and len(comps) > 1:
        hyper_name = next(iter(comps[0][1]))
        hyper_idx = prov.index(hyper_name)
    names = _coordinate_plan([(i, hw) for (i, hw, _r) in h1], hyper_idx)

    reps_blocks = None
    seeds = None
    if names == ["t", "s"]:
        reps_blocks, seeds, nf_note = _two_parameter_normal_form(
            engine, desc, L_base, fam0, L0, kbar0, embed0, prov)
        if nf_note:
            report.notes.append(nf_note)

    fam, L, kbarF, embedF = _family(engine, desc, names, reps_blocks=reps_blocks,
                                    seeds=seeds)
    F = fam.field
    report.coordinates = [(n, w, hw) for n, w, hw in
                          zip(fam.coords, fam.coord_weights, fam.coord_hweights)]
    report.obstructions = [_poly_str(F, p) for p in fam.obstructions]
    comps, note = decompose_obstructions(F, fam.obstructions, names)
    if note:
        report.notes.append(note)
    if comps is None:
        report.notes.append("obstruction locus flagged for manual components")
        report.checks.append(("obstruction locus decomposed", False))
        return report

    for comp_name, subst in comps:
        extra = []
        report.components.append(
            _run_component(engine, desc, fam, L, kbarF, embedF, kbar_base,
                           embed_base, comp_name, subst, out_extra=extra))
        report.components.extend(extra)
    _check_expected(report, desc)
    return report


def _family(engine, desc, coord_names, reps_blocks=None, seeds=None):
    field = field_for(tuple(desc.params) + tuple(coord_names))
    kbarF, embedF = engine.class_algebra(desc, field)
    torus = [kbarF.basis_vector(len(engine.neg) + m) for m in desc.torus]
    c_seeds = None
    if seeds:
        c_seeds = {key: [[field.coerce(x) for x in vec] for vec in vecs]
                   for key, vecs in seeds.items()}
    L = build_dgla(kbarF, invariance=torus, c_seeds=c_seeds)
    reps = None
    if reps_blocks is not None:
        reps = []
        for (i, hw, blockvec) in reps_blocks:
            vec = [field.coerce(x) for x in blockvec]
            reps.append((i, hw, L.from_blocks(2, {(2, i, hw): vec})))
    fam = kuranishi_family(L, coord_names=coord_names, reps=reps)
    return fam, L, kbarF, embedF


def _two_parameter_normal_form(engine, desc, L_base, fam0, L0, kbar0, embed0, prov):
    """Square-zero reps (t flat, s curved) and the corrector seed.

    Works over the base field via the class's own DGLA; returns block
    vectors so the final family can be rebuilt over fresh coordinates.
    """
    # harmonic curvature of the provisional family locates the flat line
    comp = _run_component(engine, desc, fam0, L0, kbar0, embed0,
                          *_base_pair(engine, desc), "probe", {}, invariants_only=True)
    F0 = fam0.field
    # linear form per quintic coefficient; common kernel = flat direction
    offset = len(F0.params) - len(prov)
    rows = []
    for c in comp:
        if F0.is_zero(c):
            continue
        if not c.den.is_constant():
            return None, None, "harmonic curvature is not polynomial"
        row = [Fraction(0)] * len(prov)
        for m, coeff in c.num.terms():
            if sum(m) != 1 or list(m).index(1) < offset:
                return None, None, "harmonic curvature is not linear in the coordinates"
            row[list(m).index(1) - offset] = coeff
        rows.append(row)
    from .exactmath import Matrix, kernel_basis
    ker = kernel_basis(Matrix(QQ, rows, ncols=len(prov)))
    if len(ker) != 1:
        return None, None, f"flat direction is {len(ker)}-dimensional"
    flat = ker[0]
    h1 = L_base.h1_data()
    (i1, hw1, r1), (i2, hw2, r2) = h1
    if (i1, hw1) != (i2, hw2):
        return None, None, "the two classes are not in one weight block"
    flat_rep = r1.scale(QQ.coerce(flat[0])) + r2.scale(QQ.coerce(flat[1]))
    u1 = square_zero_representative(L_base, flat_rep, (2, (i1, hw1)))
    if u1 is None:
        return None, None, "no rational square-zero representative on the flat line"
    # complementary square-zero representative
    u2 = None
    for cand in (r2, r1, r1 + r2, r1 - r2):
        coords, _ = L_base.harmonic_coordinates(cand)
        m = Matrix(QQ, [[Fraction(flat[0]), Fraction(flat[1])], [coords[0], coords[1]]],
                   ncols=2)
        from .exactmath import rank
        if rank(m) != 2:
            continue
        u2 = square_zero_representative(L_base, cand, (2, (i1, hw1)))
        if u2 is not None:
            break
    if u2 is None:
        return None, None, "no rational square-zero representative transverse to the flat line"
    u3 = corrector_normal_form(L_base, u1, u2)
    if u3 is None:
        return None, None, "no corrector putting xi in normal form"
    seeds = {}
    if not u3.is_zero():
        if not nr_bracket(u3, u3).is_zero():
            return None, None, "corrector self-bracket does not vanish"
        blocks = L_base.to_blocks(u3)
        for (q, i, hw), vec in blocks.items():
            seeds.setdefault((q, (i, hw)), []).append(vec)
    reps_blocks = []
    for u in (u1, u2):
        blocks = L_base.to_blocks(u)
        (q, i, hw), vec = next(iter(blocks.items()))
        if len(blocks) != 1:
            return None, None, "representative spreads over several blocks"
        reps_blocks.append((i, hw, vec))
    return reps_blocks, seeds, None


def _base_pair(engine, desc):
    base_field = field_for(desc.params)
    return engine.class_algebra(desc, base_field)


def _run_component(engine, desc, fam, L, kbarF, embedF, kbar_base, embed_base,
                   comp_name, subst, invariants_only=False, out_extra=None):
    F = fam.field
    coords_left = [n for n in fam.coords if n not in subst]
    comp_params = tuple(desc.params) + tuple(coords_left)
    FC = field_for(comp_params)
    images = {}
    for p in F.params:
        if p in subst:
            images[p] = FC.coerce(subst[p])
        elif isinstance(FC, FunctionField) and p in FC.params:
            images[p] = FC.gen(p)
        else:
            raise PipelineError(f"parameter {p} lost in component restriction")
    kbarC, embedC = engine.class_algebra(desc, FC)
    torus = [kbarC.basis_vector(len(engine.neg) + m) for m in desc.torus]
    LC = build_dgla(kbarC, invariance=torus)
    data = {}
    for cmb, vec in fam.xi.data.items():
        for k, c in vec.items():
            v = substitute(c, images, FC)
            if not FC.is_zero(v):
                data.setdefault(cmb, {})[k] = v
    xi = Cochain(kbarC, 2, data)
    k = deformed_algebra(LC, xi)
    ctx = engine.ctx(FC)
    nz = engine.normalizer(desc.label, kbar_base, embed_base)
    conn = nz.normalize(initial_connection(ctx, k, embedC))
    chain = curvature(conn)
    hc = harmonic_curvature(ctx, engine.dec, chain)
    if invariants_only:
        return hc.quintic
    flat = hc.is_flat(FC)
    quintic_zero = all(FC.is_zero(c) for c in hc.quintic)
    label = "" if quintic_zero else classify_quintic(FC, hc.quintic)
    d = symmetry_dimension(conn)
    if flat:
        verdict, reason = "discarded", "harmonic curvature identically flat"
    elif not FC.is_zero(hc.scalar):
        verdict, reason = "discarded", "scalar component of the harmonic curvature is nonzero"
        # step (6): pass to the scalar-vanishing locus when it is a
        # coordinate hyperplane
        locus = _poly_str(FC, hc.scalar)
        if out_extra is not None and locus in coords_left:
            out_extra.append(
                _run_component(engine, desc, fam, L, kbarF, embedF, kbar_base,
                               embed_base, f"{comp_name}&scalar0",
                               dict(subst, **{locus: 0})))
    elif d > kbarC.dim:
        verdict, reason = "discarded", f"generic d = {d} > dim k = {kbarC.dim}"
    elif d == kbarC.dim:
        verdict, reason = "retained", f"generic d = {d} = dim k"
    else:
        raise PipelineError(f"{desc.label}/{comp_name}: d = {d} < dim k = {kbarC.dim}")
    weights = {}
    for n, w, hw in zip(fam.coords, fam.coord_weights, fam.coord_hweights):
        if n in coords_left:
            weights[n] = [int(hw[0]), int(hw[1]), int(hw[2])]
    flat_locus = sorted({_poly_str(FC, c) for c in ([hc.scalar] + hc.quintic)
                         if not FC.is_zero(c)})
    return ComponentReport(
        name=comp_name,
        coordinates=coords_left,
        substitution={k2: str(v) for k2, v in subst.items()},
        harmonic_scalar=_scalar_str(FC, hc.scalar),
        harmonic_quintic=[_scalar_str(FC, c) for c in hc.quintic],
        quintic_label=label,
        generic_d=d,
        dim_k=kbarC.dim,
        torus_weights=weights,
        flat_locus=flat_locus,
        verdict=verdict,
        reason=reason,
    )


def _poly_str(field, scalar):
    """Monic content-free numerator of a scalar, as a string."""
    if field is QQ or not hasattr(scalar, "num"):
        return str(scalar)
    return str(scalar.num.monic())


def _scalar_str(field, scalar):
    if field is QQ:
        return str(scalar)
    return repr(scalar)


def torus_weights(report: ClassReport) -> dict:
    """(H, E, E') weights of each Kuranishi coordinate."""
    return {name: [int(hw[0]), int(hw[1]), int(hw[2])]
            for (name, _w, hw) in report.coordinates}


def _check_expected(report: ClassReport, desc: ClassDescriptor):
    exp = desc.expected
    if not exp:
        return
    chk = report.checks.append
    if "dim_k" in exp:
        chk((f"dim k = {exp['dim_k']}", report.dim_k == exp["dim_k"]))
    if "betti2" in exp:
        got = [report.betti.get((2, i), 0) for i in range(1, 7)]
        chk((f"b2 row = {exp['betti2']}", got == exp["betti2"]))
    if "betti3_tail" in exp:
        got = [report.betti.get((3, i), 0) for i in range(2, 7)]
        chk((f"b3 tail = {exp['betti3_tail']}", got == exp["betti3_tail"]))
    if "coordinates" in exp:
        got = [n for (n, _w, _hw) in report.coordinates]
        chk((f"coordinates {exp['coordinates']}", sorted(got) == sorted(exp["coordinates"])))
    if "obstructed" in exp:
        chk(("obstructed" if exp["obstructed"] else "unobstructed",
             bool(report.obstructions) == exp["obstructed"]))
    if "torus_weights" in exp:
        got = torus_weights(report)
        for name, w in exp["torus_weights"].items():
            chk((f"weights({name}) = {w}", got.get(name) == w))
    for comp_name, comp_exp in exp.get("components", {}).items():
        comp = next((c for c in report.components if c.name == comp_name), None)
        if comp is None and comp_name == "main" and len(report.components) == 1:
            comp = report.components[0]
        if comp is None:
            chk((f"component {comp_name} present", False))
            continue
        if "d" in comp_exp:
            chk((f"{comp_name}: generic d = {comp_exp['d']}",
                 comp.generic_d == comp_exp["d"]))
        if "verdict" in comp_exp:
            chk((f"{comp_name}: verdict {comp_exp['verdict']}",
                 comp.verdict == comp_exp["verdict"]))
        if "quintic_label" in comp_exp:
            chk((f"{comp_name}: quintic type {comp_exp['quintic_label']}",
                 comp.quintic_label == comp_exp["quintic_label"]))
        if "flat_locus" in comp_exp:
            chk((f"{comp_name}: flat locus {comp_exp['flat_locus']}",
                 comp.flat_locus == comp_exp["flat_locus"]))


# -- reports -------------------------------------------------------------------


def emit_report(reports, fmt="json", special=None):
    if fmt == "json":
        doc = {
            "classes": [r.to_json() for r in reports],
        }
        if special is not None:
            doc["special_points"] = special
        return json.dumps(doc, indent=2, sort_keys=True)
    lines = []
    lines.append("Betti numbers b^2_j (j = 1..6) and b^3_j (j = 2..6)")
    for r in reports:
        b2 = [r.betti.get((2, i), 0) for i in range(1, 7)]
        b3 = [r.betti.get((3, i), 0) for i in range(2, 7)]
        lines.append(f"  {r.label:10s} b2 = {b2}  b3 = {b3}")
    lines.append("")
    lines.append("generic symmetry dimensions of the discrete classes")
    discrete = ["N3", "N2b", "IV2", "F2"]
    by_label = {r.label: r for r in reports}
    header, values = [], []
    for lab in discrete:
        if lab in by_label and by_label[lab].components:
            header.append(f"{lab:>5s}")
            values.append(f"{by_label[lab].components[0].generic_d:>5d}")
    lines.append("  label     " + " ".join(header))
    lines.append("  generic d " + " ".join(values))
    lines.append("")
    lines.append("all components")
    for r in reports:
        for c in r.components:
            lines.append(f"  {r.label}/{c.name}: d = {c.generic_d}")
    lines.append("")
    lines.append("retained families")
    for r in reports:
        for c in r.components:
            if c.verdict == "retained":
                cs = ",".join(c.coordinates)
                lines.append(f"  {r.label:10s} ({cs})  quintic type {c.quintic_label}, "
                             f"d = {c.generic_d}, flat locus {c.flat_locus}, "
                             f"weights {c.torus_weights}")
    lines.append("")
    lines.append("discarded")
    for r in reports:
        for c in r.components:
            if c.verdict != "retained":
                lines.append(f"  {r.label:10s} {c.name}: {c.reason}")
    if special is not None:
        lines.append("")
        lines.append("special lambda points of the N2a family")
        for entry in special:
            lines.append(f"  ({entry['point'][0]}:{entry['point'][1]})  "
                         f"M'' empty: {entry['m2_empty']}")
    return "\n".join(lines) + "\n"
