"""Explicit nodal-curve model with rational components.

Components are projective lines with node points in one affine chart, so
sections of a degree-delta bundle are polynomials of degree <= delta.  The
gluing data of the line bundle is one nonzero scalar per edge, absorbed into
the matching conditions at nodes whose chain carries no degree.  Genus comes
from the graph: g = b1(Gamma).

Sections at a multidegree w are stored per component in "q-coordinates":
the section as a rational function is prod_e (x - p_{e,v})^{m_{e,v}(w)} * q_v
with q_v a polynomial of degree <= w(v); the exponents m (which may be
negative away from the core window) are bookkeeping relative to the
concentrated reference multidegrees.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import (DegenerateInstanceError, GraphError, LimitSeriesError,
                     ModelConsistencyError, ReachabilityError)
from .graphs import ChainStructure, DualGraph, collapse, is_multitree, require_valid
from .linalg import rank_and_kernel, row_basis, rref
from .multidegree import (DEFAULT_SEARCH_BOUND, ConcentratedTuple, Multidegree,
                          derive_tuple, enumerate_bar_G, expand_multiset,
                          minimal_multiset_on_multitree, minimal_path_bfs, t_ev,
                          validate_concentrated_tuple)
from .polys import taylor_row


class CurveInstance:
    """A nodal curve with rational components plus twist reference data.

    node_coords maps (edge index, vertex) to the coordinate of that node on
    that component; lambdas holds the per-edge gluing scalar.
    """

    def __init__(self, field, graph: DualGraph, chains: ChainStructure,
                 node_coords, lambdas, w0: Multidegree, ctuple: ConcentratedTuple = None,
                 search_bound=DEFAULT_SEARCH_BOUND, check=True):
        self.field = field
        self.graph = graph
        self.chains = chains
        self.node_coords = dict(node_coords)
        self.lambdas = tuple(lambdas)
        self.w0 = w0
        self.search_bound = search_bound
        self.collapsed = collapse(graph)
        self.multitree = is_multitree(graph)
        self.ctuple = ctuple if ctuple is not None else derive_tuple(w0)
        self._cache = {}
        if check:
            problems = self.validate()
            if problems:
                raise LimitSeriesError("invalid instance: " + "; ".join(problems))

    # -- validation ---------------------------------------------------------

    def validate(self):
        problems = []
        try:
            require_valid(self.graph)
        except GraphError as exc:
            return [str(exc)]
        f = self.field
        for v in self.graph.vertices:
            seen = {}
            for e in self.graph.edges_at(v):
                if (e, v) not in self.node_coords:
                    problems.append(f"missing node coordinate for edge {e} on {v!r}")
                    continue
                p = self.node_coords[(e, v)]
                key = f.format(p)
                if key in seen:
                    problems.append(f"coincident node coordinates on {v!r} (edges {seen[key]}, {e})")
                seen[key] = e
        if len(self.lambdas) != len(self.graph.edges):
            problems.append("lambda count does not match edge count")
        else:
            for e, lam in enumerate(self.lambdas):
                if f.is_zero(lam):
                    problems.append(f"lambda on edge {e} is zero")
        if self.w0.graph is not self.graph and self.w0.graph != self.graph:
            problems.append("w0 built on a different graph")
        return problems

    def validate_tuple(self):
        return validate_concentrated_tuple(self.ctuple, self.graph, self.collapsed)

    # -- basic accessors ----------------------------------------------------

    def genus(self) -> int:
        return self.graph.first_betti()

    def degree(self) -> int:
        return self.w0.total_degree()

    def wv(self, v) -> Multidegree:
        return self.ctuple.of(self.graph, v)

    def delta_ref(self, v) -> int:
        """Degree of the reference bundle on component v."""
        return self.wv(v).weight_of(v)

    def with_tuple(self, ctuple: ConcentratedTuple, rebase_lambdas=True):
        """Same abstract instance with a different concentrated tuple.

        Leading values are taken at tuple-relative orders, so the gluing
        scalars are tuple-relative coordinates of the bundle: moving to a new
        tuple whose references sit further out multiplies each scalar by the
        ratio of node-difference products coming from the trivialization
        change on either side.  Requires the old references to lie inside the
        new ones.
        """
        raw = CurveInstance(self.field, self.graph, self.chains, self.node_coords,
                            self.lambdas, self.w0, ctuple, self.search_bound,
                            check=False)
        if not rebase_lambdas:
            return raw
        f = self.field
        g = self.graph
        shift = {}
        for v in g.vertices:
            offs = vanishing_orders(raw, self.ctuple.of(g, v))
            for e in g.edges_at(v):
                t = offs[(e, v)]
                if t < 0:
                    raise LimitSeriesError(
                        "old reference multidegree is not inside the new tuple; "
                        "gluing scalars cannot be rebased")
                shift[(e, v)] = t
        def correction(e, v):
            out = f.one
            p = self.node_coords[(e, v)]
            for ep in g.edges_at(v):
                if ep == e:
                    continue
                t = shift[(ep, v)]
                if t:
                    out = f.mul(out, f.pow(f.sub(p, self.node_coords[(ep, v)]), t))
            return out
        new_lams = []
        for e, (tail, head) in enumerate(g.edges):
            lam = f.mul(self.lambdas[e],
                        f.div(correction(e, head), correction(e, tail)))
            new_lams.append(lam)
        return CurveInstance(self.field, self.graph, self.chains, self.node_coords,
                             new_lams, self.w0, ctuple, self.search_bound, check=False)

    def bar_g(self):
        if "bar_g" not in self._cache:
            if not self.multitree:
                raise GraphError("bar-G enumeration requires a multitree")
            self._cache["bar_g"] = enumerate_bar_G(self.ctuple, self.graph, self.collapsed)
        return self._cache["bar_g"]

    # -- minimal twist sequences -------------------------------------------

    def minimal_sequence(self, src: Multidegree, dst: Multidegree):
        key = ("path", src.key(), dst.key())
        if key not in self._cache:
            if self.multitree:
                m = minimal_multiset_on_multitree(src, dst, self.collapsed, self.ctuple,
                                                  bound=self.search_bound)
                seq = expand_multiset(self.graph, m)
            else:
                seq = minimal_path_bfs(src, dst, bound=self.search_bound)
                if seq is None:
                    raise ReachabilityError("no twist path found within the search bound")
            self._cache[key] = seq
        return self._cache[key]


# ---------------------------------------------------------------------------
# divisor sequences


@dataclass(frozen=True)
class DivisorSeq:
    """Divisors D_0 <= ... <= D_{b+1} on the nodes of one component over one
    collapsed edge; each divisor maps edge id -> multiplicity."""

    vertex: object
    cls: int
    divisors: tuple  # tuple of dicts

    def deg(self, i: int) -> int:
        return sum(self.divisors[i].values())

    @property
    def steps(self) -> int:
        return len(self.divisors) - 2  # = b


def divisor_sequence(inst: CurveInstance, cls: int, v, length=None) -> DivisorSeq:
    """D_0 = 0 and D_{i+1} - D_i supported on the parallel edges whose marker
    satisfies sigma(e,v) mu_v(e) = -i mod n(e), for i = 0..b."""
    if not inst.multitree:
        raise GraphError("divisor sequences require a multitree")
    g = inst.graph
    other = inst.collapsed.other_end(cls, v)
    b = _b_along(inst, cls)
    if length is None:
        length = b + 1
    base = inst.wv(v)
    divisors = [dict()]
    cur = {}
    for i in range(length):
        for e in inst.collapsed.classes[cls]:
            n = inst.chains.of(e)
            if (g.sigma(e, v) * base.mu[e] + i) % n == 0:
                cur[e] = cur.get(e, 0) + 1
        divisors.append(dict(cur))
    _ = other
    return DivisorSeq(v, cls, tuple(divisors))


def _b_along(inst: CurveInstance, cls: int) -> int:
    return inst.ctuple.b[cls]


def divisor_support_step(seq: DivisorSeq, j: int):
    """Edges gaining multiplicity at step j (support of D_{j+1} - D_j)."""
    lo, hi = seq.divisors[j], seq.divisors[j + 1]
    return tuple(e for e in sorted(hi) if hi[e] > lo.get(e, 0))


def critical_indices(seq: DivisorSeq):
    return tuple(j for j in range(len(seq.divisors) - 1)
                 if seq.divisors[j + 1] != seq.divisors[j])


# ---------------------------------------------------------------------------
# vanishing orders and section spaces


def vanishing_orders(inst: CurveInstance, w: Multidegree):
    """Map (edge, vertex) -> imposed vanishing order of sections at that node
    in multidegree w, relative to the reference bundle of the component.

    Walked along a minimal twist path from the component's reference
    multidegree: a twist at v raises the order at each adjacent node whose
    marker was zero; a chip arriving at v lowers it.
    """
    key = ("vo", w.key())
    if key in inst._cache:
        return inst._cache[key]
    g = inst.graph
    out = {}
    for v in g.vertices:
        seq = inst.minimal_sequence(inst.wv(v), w)
        offs = {e: 0 for e in g.edges_at(v)}
        cur = inst.wv(v)
        for u in seq:
            if u == v:
                for e in g.edges_at(v):
                    if cur.mu[e] == 0:
                        offs[e] += 1
            else:
                for e in g.edges_at(u):
                    if g.other_end(e, u) == v:
                        n = inst.chains.of(e)
                        if (cur.mu[e] + g.sigma(e, u)) % n == 0:
                            offs[e] -= 1
            cur = cur.twist(u)
        for e, m in offs.items():
            out[(e, v)] = m
    inst._cache[key] = out
    return out


def vanishing_orders_from_divisors(inst: CurveInstance, w: Multidegree):
    """Multitree cross-check: orders read off the divisor sequences at the
    net pair-twist count (multiplicity of the node in D^{(e,v)}_{t_{(e,v)}(w)})."""
    g = inst.graph
    out = {}
    for cls in range(len(inst.collapsed.classes)):
        b = _b_along(inst, cls)
        for v in inst.collapsed.ends[cls]:
            t = t_ev(w, inst.collapsed, cls, v, inst.ctuple, bound=inst.search_bound)
            if t >= 0:
                seq = divisor_sequence(inst, cls, v, length=max(t, b + 1))
                div = seq.divisors[t]
                for e in inst.collapsed.classes[cls]:
                    out[(e, v)] = div.get(e, 0)
            else:
                # poles: negative steps accumulate the markers hit going down
                base = inst.wv(v)
                neg = {e: 0 for e in inst.collapsed.classes[cls]}
                for i in range(-1, t - 1, -1):
                    for e in inst.collapsed.classes[cls]:
                        n = inst.chains.of(e)
                        if (g.sigma(e, v) * base.mu[e] + i) % n == 0:
                            neg[e] -= 1
                for e, m in neg.items():
                    out[(e, v)] = m
    return out


@dataclass
class SectionSpace:
    """Global sections at a multidegree, in concatenated q-coordinates."""

    w: Multidegree
    deltas: tuple            # per vertex
    sizes: tuple             # per vertex block size (delta+1, or 0 if negative)
    starts: tuple            # per vertex block offset
    offsets: dict            # (edge, vertex) -> vanishing order m
    basis: list              # reduced echelon basis vectors (tuples)
    ambient: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    def block(self, g: DualGraph, vec, v):
        i = g.vindex(v)
        return list(vec[self.starts[i]:self.starts[i] + self.sizes[i]])


def _lead_row(inst, w, offsets, sizes, starts, e, v, scale):
    """Row of the functional taking a q-coordinate vector to ``scale`` times
    the leading value of the section at node (e, v) at its imposed order."""
    f = inst.field
    g = inst.graph
    vi = g.vindex(v)
    size = sizes[vi]
    row = [f.zero] * sum(sizes)
    if size == 0:
        return row
    p = inst.node_coords[(e, v)]
    const = scale
    for ep in g.edges_at(v):
        if ep == e:
            continue
        m = offsets[(ep, v)]
        if m:
            diff = f.sub(p, inst.node_coords[(ep, v)])
            const = f.mul(const, f.pow(diff, m))
    pw = f.one
    for i in range(size):
        row[starts[vi] + i] = f.mul(const, pw)
        pw = f.mul(pw, p)
    return row


def constraint_rows(inst: CurveInstance, w: Multidegree):
    """Matching conditions defining the section space at w: for every edge
    with marker zero, lambda_e * (tail leading value) = (head leading value)."""
    key = ("rows", w.key())
    if key in inst._cache:
        return inst._cache[key]
    f = inst.field
    g = inst.graph
    offsets = vanishing_orders(inst, w)
    deltas = w.w
    sizes = tuple((d + 1) if d >= 0 else 0 for d in deltas)
    starts = []
    acc = 0
    for s in sizes:
        starts.append(acc)
        acc += s
    starts = tuple(starts)
    rows = []
    for e, (tail, head) in enumerate(g.edges):
        if w.mu[e] != 0:
            continue
        row_t = _lead_row(inst, w, offsets, sizes, starts, e, tail, inst.lambdas[e])
        row_h = _lead_row(inst, w, offsets, sizes, starts, e, head, f.one)
        rows.append([f.sub(a, b) for a, b in zip(row_t, row_h)])
    out = (rows, deltas, sizes, starts, offsets)
    inst._cache[key] = out
    return out


def section_space(inst: CurveInstance, w: Multidegree) -> SectionSpace:
    key = ("space", w.key())
    if key in inst._cache:
        return inst._cache[key]
    rows, deltas, sizes, starts, offsets = constraint_rows(inst, w)
    ambient = sum(sizes)
    if ambient == 0:
        basis = []
    elif not rows:
        basis = [tuple(inst.field.one if i == j else inst.field.zero for i in range(ambient))
                 for j in range(ambient)]
    else:
        _, basis = rank_and_kernel(rows, inst.field)
    sp = SectionSpace(w, tuple(deltas), sizes, starts, offsets, basis, ambient)
    inst._cache[key] = sp
    return sp


def euler_lower_bound(inst: CurveInstance, w: Multidegree) -> int:
    return w.total_degree() + 1 - inst.genus()


# ---------------------------------------------------------------------------
# twist maps


def _twist_step_matrix(inst: CurveInstance, w: Multidegree, u):
    """Matrix of the single-twist map at u from q-coordinates at w to
    q-coordinates at w.twist(u): the twisted component is sent to zero, each
    component receiving a chip over an edge is multiplied by (x - p) for that
    node, all other components are untouched."""
    f = inst.field
    g = inst.graph
    w2 = w.twist(u)
    sizes1 = tuple((d + 1) if d >= 0 else 0 for d in w.w)
    sizes2 = tuple((d + 1) if d >= 0 else 0 for d in w2.w)
    starts1, starts2 = [], []
    a = 0
    for s in sizes1:
        starts1.append(a)
        a += s
    bpos = 0
    for s in sizes2:
        starts2.append(bpos)
        bpos += s
    nrows, ncols = sum(sizes2), sum(sizes1)
    mat = [[f.zero] * ncols for _ in range(nrows)]
    for vi, v in enumerate(g.vertices):
        if v == u or sizes1[vi] == 0:
            continue
        factors = []
        for e in g.edges_at(u):
            if g.other_end(e, u) == v and w2.mu[e] == 0:
                factors.append(inst.node_coords[(e, v)])
        # multiplication by prod (x - p) as coefficient convolution
        poly = [f.one]
        for p in factors:
            nxt = [f.zero] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i] = f.add(nxt[i], f.mul(c, f.neg(p)))
                nxt[i + 1] = f.add(nxt[i + 1], c)
            poly = nxt
        if sizes2[vi] != sizes1[vi] + len(factors):
            raise ModelConsistencyError("block size mismatch in twist step")
        for i in range(sizes1[vi]):
            for jj, c in enumerate(poly):
                mat[starts2[vi] + i + jj][starts1[vi] + i] = \
                    f.add(mat[starts2[vi] + i + jj][starts1[vi] + i], c)
    return mat, w2


def twist_map(inst: CurveInstance, w: Multidegree, w2: Multidegree, verify=True,
              sequence=None):
    """Composite of single-twist maps along a minimal path from w to w2, as a
    matrix from q-coordinates at w to q-coordinates at w2.  The image of the
    section space is verified to satisfy the target matching conditions.

    A sequence may be supplied explicitly (any ordering of the minimal
    multiset); the result must not depend on it."""
    key = ("tmap", w.key(), w2.key(), sequence)
    if key in inst._cache:
        return inst._cache[key]
    f = inst.field
    seq = sequence if sequence is not None else inst.minimal_sequence(w, w2)
    sizes = tuple((d + 1) if d >= 0 else 0 for d in w.w)
    n = sum(sizes)
    mat = [[f.one if i == j else f.zero for j in range(n)] for i in range(n)]
    cur = w
    for u in seq:
        step, cur = _twist_step_matrix(inst, cur, u)
        mat = _mul(step, mat, f)
    if cur.key() != w2.key():
        raise ReachabilityError("twist path did not land on the target multidegree")
    if verify:
        rows, _, _, _, _ = constraint_rows(inst, w2)
        for vec in section_space(inst, w).basis:
            img = _vec(mat, vec, f)
            for r in rows:
                s = f.zero
                for c, x in zip(r, img):
                    if not f.is_zero(c) and not f.is_zero(x):
                        s = f.add(s, f.mul(c, x))
                if not f.is_zero(s):
                    raise ModelConsistencyError(
                        "twist map image violates target matching conditions")
    inst._cache[key] = mat
    return mat


def _mul(a, b, f):
    if not a:
        return []
    ncols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [f.zero] * ncols
        for k, x in enumerate(row):
            if f.is_zero(x):
                continue
            brow = b[k]
            for j in range(ncols):
                if not f.is_zero(brow[j]):
                    acc[j] = f.add(acc[j], f.mul(x, brow[j]))
        out.append(acc)
    return out


def _vec(mat, x, f):
    out = []
    for row in mat:
        s = f.zero
        for c, v in zip(row, x):
            if not f.is_zero(c) and not f.is_zero(v):
                s = f.add(s, f.mul(c, v))
        out.append(s)
    return out


def _twist_step_plan(inst: CurveInstance, w: Multidegree, u):
    """Block plan for a single twist at u: per component either zero, a plain
    copy, or a convolution with the node-factor polynomial.  Cached."""
    key = ("plan", w.key(), u)
    if key in inst._cache:
        return inst._cache[key]
    f = inst.field
    g = inst.graph
    w2 = w.twist(u)
    sizes1 = tuple((d + 1) if d >= 0 else 0 for d in w.w)
    sizes2 = tuple((d + 1) if d >= 0 else 0 for d in w2.w)
    starts1, starts2 = [0], [0]
    for s in sizes1[:-1]:
        starts1.append(starts1[-1] + s)
    for s in sizes2[:-1]:
        starts2.append(starts2[-1] + s)
    ops = []
    for vi, v in enumerate(g.vertices):
        if v == u or sizes1[vi] == 0:
            continue
        factors = [inst.node_coords[(e, v)] for e in g.edges_at(u)
                   if g.other_end(e, u) == v and w2.mu[e] == 0]
        if not factors:
            ops.append(("copy", starts1[vi], sizes1[vi], starts2[vi]))
            continue
        poly = [f.one]
        for p in factors:
            nxt = [f.zero] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i] = f.add(nxt[i], f.mul(c, f.neg(p)))
                nxt[i + 1] = f.add(nxt[i + 1], c)
            poly = nxt
        if sizes2[vi] != sizes1[vi] + len(factors):
            raise ModelConsistencyError("block size mismatch in twist step")
        ops.append(("conv", starts1[vi], sizes1[vi], starts2[vi], tuple(poly)))
    plan = (ops, sum(sizes2), w2)
    inst._cache[key] = plan
    return plan


def _apply_plan(ops, n2, vec, f):
    out = [f.zero] * n2
    for op in ops:
        if op[0] == "copy":
            _, s1, size, s2 = op
            out[s2:s2 + size] = vec[s1:s1 + size]
        else:
            _, s1, size, s2, poly = op
            for i in range(size):
                c = vec[s1 + i]
                if f.is_zero(c):
                    continue
                for j, pc in enumerate(poly):
                    if not f.is_zero(pc):
                        out[s2 + i + j] = f.add(out[s2 + i + j], f.mul(c, pc))
    return out


def transported_basis(inst: CurveInstance, w: Multidegree, w2: Multidegree):
    """Section basis at w pushed through the minimal-path twist maps to the
    coordinate space at w2, verified against the target matching conditions.
    Cheaper than building the full matrix; cached per (w, w2)."""
    key = ("tbasis", w.key(), w2.key())
    if key in inst._cache:
        return inst._cache[key]
    f = inst.field
    seq = inst.minimal_sequence(w, w2)
    vecs = [list(b) for b in section_space(inst, w).basis]
    cur = w
    for u in seq:
        ops, n2, cur = _twist_step_plan(inst, cur, u)
        vecs = [_apply_plan(ops, n2, x, f) for x in vecs]
    if cur.key() != w2.key():
        raise ReachabilityError("twist path did not land on the target multidegree")
    rows, _, _, _, _ = constraint_rows(inst, w2)
    for img in vecs:
        for r in rows:
            s = f.zero
            for c, x in zip(r, img):
                if not f.is_zero(c) and not f.is_zero(x):
                    s = f.add(s, f.mul(c, x))
            if not f.is_zero(s):
                raise ModelConsistencyError(
                    "twist map image violates target matching conditions")
    inst._cache[key] = vecs
    return vecs


def restrict_to_component(inst: CurveInstance, w: Multidegree, v):
    """Matrix from q-coordinates at w to the reference coefficient space on
    component v (polynomials of degree <= delta_ref(v)): the twist map to the
    concentrated multidegree followed by extraction of the v block."""
    key = ("restr", w.key(), v)
    if key in inst._cache:
        return inst._cache[key]
    wv = inst.wv(v)
    mat = twist_map(inst, w, wv)
    g = inst.graph
    sizes = tuple((d + 1) if d >= 0 else 0 for d in wv.w)
    start = sum(sizes[:g.vindex(v)])
    size = sizes[g.vindex(v)]
    if size != inst.delta_ref(v) + 1:
        raise ModelConsistencyError("reference block size mismatch")
    out = mat[start:start + size]
    inst._cache[key] = out
    return out


# ---------------------------------------------------------------------------
# component-level subspaces, vanishing and jets


def subspace_vanishing(inst: CurveInstance, v, rows, divisor):
    """Basis of the subspace of span(rows) vanishing per the divisor (edge id
    -> multiplicity) at the nodes of component v.  Rows are reference
    coefficients on v."""
    f = inst.field
    rows = [list(r) for r in rows]
    if not rows:
        return []
    size = len(rows[0])
    conds = []
    for e in sorted(divisor):
        mult = divisor[e]
        p = inst.node_coords[(e, v)]
        for k in range(mult):
            conds.append(taylor_row(f, size, p, k))
    if not conds:
        return row_basis(rows, f)
    system = []
    for cond in conds:
        system.append([_dot(cond, r, f) for r in rows])
    _, ker = rank_and_kernel(system, f)
    out = []
    for coeffs in ker:
        vec = [f.zero] * size
        for c, r in zip(coeffs, rows):
            if f.is_zero(c):
                continue
            for i in range(size):
                vec[i] = f.add(vec[i], f.mul(c, r[i]))
        out.append(vec)
    return row_basis(out, f)


def _dot(a, b, f):
    s = f.zero
    for x, y in zip(a, b):
        if not f.is_zero(x) and not f.is_zero(y):
            s = f.add(s, f.mul(x, y))
    return s


def jet_map(inst: CurveInstance, cls: int, v, j: int):
    """Gluing comparison at critical step j of the divisor sequence at (e,v):
    one coordinate per node in supp(D_{j+1} - D_j), sending a section on v to
    its leading value there at order mult_{D_j}, scaled by lambda on the tail
    side.  Returns (node edge ids, matrix rows on reference coefficients)."""
    f = inst.field
    g = inst.graph
    seq = divisor_sequence(inst, cls, v)
    nodes = divisor_support_step(seq, j)
    size = inst.delta_ref(v) + 1
    rows = []
    for e in nodes:
        order = seq.divisors[j].get(e, 0)
        row = taylor_row(f, size, inst.node_coords[(e, v)], order)
        if g.sigma(e, v) == 1:
            lam = inst.lambdas[e]
            row = [f.mul(lam, x) for x in row]
        rows.append(row)
    return nodes, rows


def jet_pair_orders_match(inst: CurveInstance, cls: int, j: int):
    """Criticality pairing check data: j critical on the v side iff b-j on the
    v' side, with identical node support."""
    v, vp = inst.collapsed.ends[cls]
    b = _b_along(inst, cls)
    s1 = divisor_sequence(inst, cls, v)
    s2 = divisor_sequence(inst, cls, vp)
    return (divisor_support_step(s1, j), divisor_support_step(s2, b - j))
