"""Limit-linear-series membership by both definitions.

The kernel method checks that the global section space in every multidegree
of the core window maps into the chosen per-component subspaces with kernel
of dimension at least r+1.  The vanishing-sequence method (classical
Eisenbud-Harris style, generalized by multivanishing along divisor
sequences) checks the per-edge inequality (I) and the jet-overlap gluing
condition (II).  Their agreement is the flagship cross-validation.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .curves import (CurveInstance, DivisorSeq, critical_indices, divisor_sequence,
                     divisor_support_step, section_space, subspace_vanishing,
                     vanishing_orders)
from .errors import DegenerateInstanceError, GraphError, LimitSeriesError
from .linalg import annihilator, rank, row_basis, subspace_intersect
from .multidegree import Multidegree
from .polys import taylor_row


@dataclass
class LLSCandidate:
    """Rank r plus an (r+1)-dimensional subspace of reference sections per
    component, given as rows of coefficients."""

    r: int
    V: dict  # vertex -> list of coefficient rows

    def rows(self, v):
        return self.V[v]


def validate_candidate(inst: CurveInstance, cand: LLSCandidate):
    problems = []
    f = inst.field
    for v in inst.graph.vertices:
        rows = cand.V.get(v)
        if rows is None:
            problems.append(f"missing subspace on {v!r}")
            continue
        size = inst.delta_ref(v) + 1
        if size <= 0:
            problems.append(f"reference bundle on {v!r} has negative degree")
            continue
        if any(len(r) != size for r in rows):
            problems.append(f"coefficient length mismatch on {v!r}")
            continue
        if rank(rows, f) != cand.r + 1:
            problems.append(f"subspace on {v!r} does not have rank {cand.r + 1}")
        if cand.r + 1 > size:
            problems.append(f"rank exceeds section space dimension on {v!r}")
    return problems


def brill_noether_number(inst: CurveInstance, r: int) -> int:
    g = inst.genus()
    d = inst.degree()
    return g + (r + 1) * (d - r - g)


@dataclass
class MembershipVerdict:
    member: bool
    method: str
    rho: int
    genus: int
    degree: int
    kernel_dims: dict = dc_field(default_factory=dict)   # multidegree key -> dim
    edge_conditions: dict = dc_field(default_factory=dict)  # cls -> {"I": ..., "II": ...}
    window_bounded: bool = False
    notes: list = dc_field(default_factory=list)

    def to_json(self):
        return {
            "member": self.member,
            "method": self.method,
            "rho": self.rho,
            "genus": self.genus,
            "degree": self.degree,
            "kernel_dims": {k: v for k, v in sorted(self.kernel_dims.items())},
            "edge_conditions": {str(k): v for k, v in sorted(self.edge_conditions.items())},
            "window_bounded": self.window_bounded,
            "notes": list(self.notes),
        }


def multidegree_key(w: Multidegree) -> str:
    return f"w={list(w.w)};mu={list(w.mu)}"


# ---------------------------------------------------------------------------
# multivanishing


def multivanishing_sequence(inst: CurveInstance, v, rows, dseq: DivisorSeq):
    """Multivanishing sequence of span(rows) along the divisor sequence, plus
    the dimension chain.  A value deg(D_i) enters once per dimension drop from
    V(-D_i) to V(-D_{i+1}); repeated divisors are skipped by construction."""
    cur = row_basis(rows, inst.field)
    dims = [len(cur)]
    for i in range(1, len(dseq.divisors)):
        cur = subspace_vanishing(inst, v, cur, dseq.divisors[i])
        dims.append(len(cur))
    if dims[-1] != 0:
        raise DegenerateInstanceError(
            "divisor sequence too short: sections survive the final divisor "
            f"(deg D_last = {dseq.deg(len(dseq.divisors) - 1)})")
    seq = []
    for i in range(len(dseq.divisors) - 1):
        if dseq.deg(i + 1) > dseq.deg(i):
            seq.extend([dseq.deg(i)] * (dims[i] - dims[i + 1]))
    return seq, dims


def order_of_vanishing(inst: CurveInstance, v, section_row, dseq: DivisorSeq) -> int:
    """deg D_i for the largest i such that the section vanishes per D_i."""
    f = inst.field
    size = len(section_row)
    best = 0
    for i in range(len(dseq.divisors)):
        ok = True
        for e, mult in dseq.divisors[i].items():
            p = inst.node_coords[(e, v)]
            for k in range(mult):
                rowk = taylor_row(f, size, p, k)
                s = f.zero
                for a, b in zip(rowk, section_row):
                    s = f.add(s, f.mul(a, b))
                if not f.is_zero(s):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            best = dseq.deg(i)
        else:
            break
    return best


# ---------------------------------------------------------------------------
# kernel method


def restriction_images(inst: CurveInstance, w: Multidegree, v):
    """Images of the section basis at w inside the reference coefficient space
    of component v; candidate-independent, cached per (w, v)."""
    key = ("rimg", w.key(), v)
    if key in inst._cache:
        return inst._cache[key]
    from .curves import transported_basis
    g = inst.graph
    wv = inst.wv(v)
    moved = transported_basis(inst, w, wv)
    sizes = tuple((d + 1) if d >= 0 else 0 for d in wv.w)
    start = sum(sizes[:g.vindex(v)])
    size = sizes[g.vindex(v)]
    images = [vec[start:start + size] for vec in moved]
    inst._cache[key] = images
    return images


def kernel_dimension_at(inst: CurveInstance, cand: LLSCandidate, w: Multidegree) -> int:
    """Dimension of the kernel of the stacked map from global sections at w to
    the per-component quotients by the candidate subspaces."""
    f = inst.field
    sp = section_space(inst, w)
    if sp.dim == 0:
        return 0
    rows = []
    for v in inst.graph.vertices:
        ann = _annihilator_rows(inst, cand, v)
        if not ann:
            continue
        images = restriction_images(inst, w, v)
        for q in ann:
            rows.append([_dot(q, img, f) for img in images])
    if not rows:
        return sp.dim
    return sp.dim - rank(rows, f)


def _annihilator_rows(inst, cand, v):
    rows_key = tuple(tuple(r) for r in cand.V[v])
    key = ("ann", v, rows_key)
    if key in inst._cache:
        return inst._cache[key]
    size = inst.delta_ref(v) + 1
    ann = annihilator(cand.V[v], size, inst.field)
    inst._cache[key] = ann
    return ann


def _dot(a, b, f):
    s = f.zero
    for x, y in zip(a, b):
        if not f.is_zero(x) and not f.is_zero(y):
            s = f.add(s, f.mul(x, y))
    return s


def window_multidegrees(inst: CurveInstance, window=None, extend=0):
    """Resolve the multidegree window for the kernel method.

    None on a multitree means the full core window (the tree of multidegrees
    between the concentrated references); an integer means a ball of that
    twist radius around w0 (required for general graphs).  ``extend`` grows
    the multitree window by closure under single twists in both directions.
    """
    if window is None:
        bar = inst.bar_g()
        mds = list(bar.nodes)
        bounded = False
        rounds = extend
    elif isinstance(window, int):
        if inst.multitree:
            bar = inst.bar_g()
            mds = list(bar.nodes)
            bounded = False
            rounds = window
        else:
            mds = [inst.w0]
            bounded = True
            rounds = window
    else:
        mds = list(window)
        bounded = True
        rounds = 0
    if rounds:
        seen = {m.key(): m for m in mds}
        frontier = list(mds)
        for _ in range(rounds):
            nxt = []
            for m in frontier:
                for v in inst.graph.vertices:
                    for t in (m.twist(v), m.negative_twist(v)):
                        if t.key() not in seen:
                            seen[t.key()] = t
                            nxt.append(t)
            frontier = nxt
        mds = list(seen.values())
    return mds, bounded


def is_lls_kernel(inst: CurveInstance, cand: LLSCandidate, window=None, extend=0) -> MembershipVerdict:
    """Kernel-method membership: every multidegree in the window must see a
    kernel of dimension at least r+1."""
    if window is None and not inst.multitree:
        raise GraphError("general graphs need an explicit window (twist radius)")
    problems = validate_candidate(inst, cand)
    if problems:
        raise LimitSeriesError("invalid candidate: " + "; ".join(problems))
    mds, bounded = window_multidegrees(inst, window, extend)
    dims = {}
    member = True
    for w in mds:
        k = kernel_dimension_at(inst, cand, w)
        dims[multidegree_key(w)] = k
        if k < cand.r + 1:
            member = False
    verdict = MembershipVerdict(
        member=member, method="kernel", rho=brill_noether_number(inst, cand.r),
        genus=inst.genus(), degree=inst.degree(), kernel_dims=dims,
        window_bounded=bounded)
    if bounded:
        verdict.notes.append("window-bounded: negative verdicts are certificates, "
                             "positive ones only over the supplied window")
    return verdict


# ---------------------------------------------------------------------------
# pairwise kernel reinterpretation


def pairwise_kernel_check(inst: CurveInstance, cand: LLSCandidate, cls: int):
    """Kernel dimensions of the two-sided jet matching map across one
    collapsed edge, for each position i = 0..b: domain V^v(-D_i) + V^v'(-D_{b-i}),
    matched through leading values at the nodes active at step i."""
    f = inst.field
    v, vp = inst.collapsed.ends[cls]
    side1 = _side_data(inst, cls, v, cand.V[v])
    side2 = _side_data(inst, cls, vp, cand.V[vp])
    b = side1["b"]
    out = []
    for i in range(b + 1):
        d1 = side1["dims"][i]
        d2 = side2["dims"][b - i]
        nodes, raw1, _ = side1["jets"][i]
        if not nodes:
            out.append(d1 + d2)
            continue
        _nodes2, raw2, _ = side2["jets"][b - i]
        system = [[row[n] for row in raw1] + [f.neg(row[n]) for row in raw2]
                  for n in range(len(nodes))]
        out.append(d1 + d2 - rank(system, f))
    return out


def _jet_rows(inst, cls, v, dseq, j, nodes):
    f = inst.field
    g = inst.graph
    size = inst.delta_ref(v) + 1
    rows = []
    for e in nodes:
        order = dseq.divisors[j].get(e, 0)
        row = taylor_row(f, size, inst.node_coords[(e, v)], order)
        if g.sigma(e, v) == 1:
            row = [f.mul(inst.lambdas[e], x) for x in row]
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# vanishing-sequence method


@dataclass
class EdgeReport:
    """Multivanishing data for one collapsed edge: both sequences, critical
    indices, and the boundary indices l1..l4 with the map rank per critical
    step."""

    cls: int
    v: object
    vp: object
    b: int
    seq_v: list
    seq_vp: list
    dims_v: list
    dims_vp: list
    criticals: tuple
    per_critical: dict  # j -> dict(l1..l4, rank, required_overlap)


def _side_data(inst: CurveInstance, cls: int, v, rows):
    """Per-side multivanishing data, cached by subspace content: the divisor
    sequence, the chain of vanishing subspaces, the dimension chain, the
    multivanishing sequence, and the jet image at every chain position."""
    key = ("ehside", cls, v, tuple(tuple(r) for r in rows))
    if key in inst._cache:
        return inst._cache[key]
    f = inst.field
    dseq = divisor_sequence(inst, cls, v)
    b = dseq.steps
    chain = [row_basis(rows, f)]
    for i in range(1, len(dseq.divisors)):
        chain.append(subspace_vanishing(inst, v, chain[-1], dseq.divisors[i]))
    dims = [len(c) for c in chain]
    if dims[-1] != 0:
        raise DegenerateInstanceError(
            "divisor sequence too short: sections survive the final divisor")
    seq = []
    for i in range(len(dseq.divisors) - 1):
        if dseq.deg(i + 1) > dseq.deg(i):
            seq.extend([dseq.deg(i)] * (dims[i] - dims[i + 1]))
    jets = []
    for i in range(b + 1):
        nodes = divisor_support_step(dseq, i)
        if not nodes:
            jets.append((nodes, [], []))
            continue
        rows_i = _jet_rows(inst, cls, v, dseq, i, nodes)
        raw = [[_dot(rows_i[n], x, f) for n in range(len(nodes))] for x in chain[i]]
        jets.append((nodes, raw, row_basis(raw, f)))
    data = {"dseq": dseq, "b": b, "chain": chain, "dims": dims, "seq": seq, "jets": jets}
    inst._cache[key] = data
    return data


def edge_report(inst: CurveInstance, cand: LLSCandidate, cls: int) -> EdgeReport:
    v, vp = inst.collapsed.ends[cls]
    b = inst.ctuple.b[cls]
    side1 = _side_data(inst, cls, v, cand.V[v])
    side2 = _side_data(inst, cls, vp, cand.V[vp])
    s1, s2 = side1["dseq"], side2["dseq"]
    a1, dims1 = side1["seq"], side1["dims"]
    a2, dims2 = side2["seq"], side2["dims"]
    crits = critical_indices(s1)
    r = cand.r
    per = {}
    for j in crits:
        if j > b:
            continue
        d1 = s1.deg(j)
        d2 = s2.deg(b - j)
        l1 = next((l for l in range(r + 1) if a1[l] >= d1), r + 1)
        l2 = max((l for l in range(r + 1) if a1[l] <= d1), default=-1)
        l3 = next((l for l in range(r + 1) if a2[l] >= d2), r + 1)
        l4 = max((l for l in range(r + 1) if a2[l] <= d2), default=-1)
        count = sum(1 for l in range(max(0, l1), min(r, l2) + 1)
                    if l3 <= r - l <= l4)
        per[j] = {"l1": l1, "l2": l2, "l3": l3, "l4": l4,
                  "required_overlap": count}
    return EdgeReport(cls, v, vp, b, a1, a2, dims1, dims2, crits, per)


def eh_condition_I(inst: CurveInstance, cand: LLSCandidate, cls: int, report=None):
    """Inequality condition: whenever a value of the v-side sequence sits at a
    critical step j, the mirrored entry on the v' side must reach deg D_{b-j}.
    Returns (ok, failing (l, j) pairs); the symmetric form is also evaluated
    and any disagreement is reported as a failure."""
    if report is None:
        report = edge_report(inst, cand, cls)
    v, vp, b = report.v, report.vp, report.b
    s1 = divisor_sequence(inst, cls, v)
    s2 = divisor_sequence(inst, cls, vp)
    r = cand.r
    failures = []
    ok = _condition_I_oneside(report.seq_v, report.seq_vp, s1, s2, b, r, failures)
    ok2 = _condition_I_oneside(report.seq_vp, report.seq_v, s2, s1, b, r, [])
    if ok != ok2:
        failures.append(("symmetry-mismatch", -1))
        ok = False
    return ok, failures


def _condition_I_oneside(a1, a2, s1: DivisorSeq, s2: DivisorSeq, b, r, failures):
    ok = True
    crit1 = set(critical_indices(s1))
    for l in range(r + 1):
        j = _critical_index_of_value(s1, a1[l], crit1)
        if j is None or j > b:
            continue
        if a2[r - l] < s2.deg(b - j):
            failures.append((l, j))
            ok = False
    return ok


def _critical_index_of_value(dseq: DivisorSeq, value, crit_set):
    js = [j for j in range(len(dseq.divisors) - 1) if dseq.deg(j) == value]
    for j in js:
        if j in crit_set:
            return j
    return None


def eh_condition_II(inst: CurveInstance, cand: LLSCandidate, cls: int, report=None):
    """Gluing condition via jet overlaps: at each critical step the images of
    the two vanishing subspaces under the jet maps must overlap in dimension
    at least the count of forced equalities."""
    if report is None:
        report = edge_report(inst, cand, cls)
    okI, _ = eh_condition_I(inst, cand, cls, report)
    if not okI:
        raise LimitSeriesError("condition (II) evaluated with condition (I) failing")
    f = inst.field
    v, vp, b = report.v, report.vp, report.b
    side1 = _side_data(inst, cls, v, cand.V[v])
    side2 = _side_data(inst, cls, vp, cand.V[vp])
    details = {}
    ok = True
    for j in report.criticals:
        if j > b:
            continue
        need = report.per_critical[j]["required_overlap"]
        nodes, raw1, im1 = side1["jets"][j]
        _nodes2, raw2, im2 = side2["jets"][b - j]
        overlap = len(subspace_intersect(im1, im2, f)) if im1 and im2 else 0
        system = [[row[n] for row in raw1] + [f.neg(row[n]) for row in raw2]
                  for n in range(len(nodes))]
        report.per_critical[j]["rank"] = rank(system, f) if system else 0
        report.per_critical[j]["overlap"] = overlap
        details[j] = {"required": need, "overlap": overlap}
        if overlap < need:
            ok = False
    return ok, details


def is_lls_eh(inst: CurveInstance, cand: LLSCandidate) -> MembershipVerdict:
    """Vanishing-sequence membership: conditions (I) and (II) over every
    collapsed edge of a multitree."""
    if not inst.multitree:
        raise GraphError("the vanishing-sequence method requires a multitree")
    problems = validate_candidate(inst, cand)
    if problems:
        raise LimitSeriesError("invalid candidate: " + "; ".join(problems))
    verdict = MembershipVerdict(
        member=True, method="eh", rho=brill_noether_number(inst, cand.r),
        genus=inst.genus(), degree=inst.degree())
    for cls in range(len(inst.collapsed.classes)):
        report = edge_report(inst, cand, cls)
        okI, failI = eh_condition_I(inst, cand, cls, report)
        entry = {"I": okI, "I_failures": failI}
        if okI:
            okII, det = eh_condition_II(inst, cand, cls, report)
            entry["II"] = okII
            entry["II_details"] = {str(k): v for k, v in det.items()}
            if not okII:
                verdict.member = False
        else:
            entry["II"] = None
            verdict.member = False
        verdict.edge_conditions[cls] = entry
    return verdict


def is_lls_both(inst: CurveInstance, cand: LLSCandidate):
    """Run both methods; raises on disagreement (equivalence violation)."""
    vk = is_lls_kernel(inst, cand)
    ve = is_lls_eh(inst, cand)
    return vk, ve, vk.member == ve.member


# ---------------------------------------------------------------------------
# choice independence and candidate transport


def transport_candidate(inst_old: CurveInstance, inst_new: CurveInstance,
                        cand: LLSCandidate) -> LLSCandidate:
    """Carry a candidate to an instance with a different concentrated tuple:
    each subspace is pushed through the inclusion of reference bundles, which
    multiplies sections by the node factors separating the two references."""
    f = inst_new.field
    newV = {}
    for v in inst_new.graph.vertices:
        old_ref = inst_old.wv(v)
        offs = vanishing_orders(inst_new, old_ref)
        factors = []
        for e in inst_new.graph.edges_at(v):
            m = offs[(e, v)]
            if m < 0:
                raise LimitSeriesError(
                    "old reference multidegree is not inside the new one; "
                    "cannot transport the candidate")
            factors.append((inst_new.node_coords[(e, v)], m))
        size_new = inst_new.delta_ref(v) + 1
        rows = []
        for row in cand.V[v]:
            coeffs = list(row)
            for p, m in factors:
                for _ in range(m):
                    nxt = [f.zero] * (len(coeffs) + 1)
                    for i, c in enumerate(coeffs):
                        nxt[i] = f.add(nxt[i], f.mul(c, f.neg(p)))
                        nxt[i + 1] = f.add(nxt[i + 1], c)
                    coeffs = nxt
            if len(coeffs) > size_new:
                raise LimitSeriesError("transported section exceeds the new degree bound")
            coeffs += [f.zero] * (size_new - len(coeffs))
            rows.append(coeffs)
        newV[v] = row_basis(rows, f)
    return LLSCandidate(cand.r, newV)


def check_indep_of_wv(inst: CurveInstance, cand: LLSCandidate, alt_tuples) -> bool:
    """Membership must not depend on the choice of concentrated tuple."""
    base_k = is_lls_kernel(inst, cand).member
    base_e = is_lls_eh(inst, cand).member if inst.multitree else None
    for tup in alt_tuples:
        inst2 = inst.with_tuple(tup)
        cand2 = transport_candidate(inst, inst2, cand)
        if is_lls_kernel(inst2, cand2).member != base_k:
            return False
        if base_e is not None and is_lls_eh(inst2, cand2).member != base_e:
            return False
    return True


def gluing_basis_witness(inst: CurveInstance, cand: LLSCandidate, cls: int):
    """Diagnostic only: try to produce bases adapted to the multivanishing
    sequences realizing the forced gluings.  Returns None when the overlap
    condition fails (non-membership) or the matching does not close."""
    report = edge_report(inst, cand, cls)
    okI, _ = eh_condition_I(inst, cand, cls, report)
    if not okI:
        return None
    okII, _ = eh_condition_II(inst, cand, cls, report)
    if not okII:
        return None
    f = inst.field
    v, vp, b = report.v, report.vp, report.b
    side1 = _side_data(inst, cls, v, cand.V[v])
    side2 = _side_data(inst, cls, vp, cand.V[vp])
    out = {"v": v, "vp": vp, "pairs": []}
    for j in report.criticals:
        info = report.per_critical.get(j)
        if not info or info["required_overlap"] == 0:
            continue
        im1 = side1["jets"][j][2]
        im2 = side2["jets"][b - j][2]
        inter = subspace_intersect(im1, im2, f)
        out["pairs"].append({"j": j, "overlap_basis": inter})
    return out
