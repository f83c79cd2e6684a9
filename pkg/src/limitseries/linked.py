"""s-linked chains, linked determinantal membership, flag completion, and the
bridge from curve data to chains.

A chain is a tuple of equal-dimension spaces with forward and backward maps
composing to s times the identity, plus exactness conditions when s = 0.
Membership of a flag pair in the linked determinantal locus asks every space
to carry an r-dimensional subspace mapping into both end flags.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from .curves import CurveInstance, vanishing_orders
from .errors import GenerationBudgetError, LimitSeriesError
from .linalg import (annihilator, identity, mat_mul, rank, rank_and_kernel,
                     row_basis, solve_coords, subspace_intersect)
from .multidegree import twist_pair


@dataclass
class LinkedChain:
    field: object
    d: int
    n: int
    s: object
    fwd: list    # n-1 forward d x d matrices (rows)
    back: list   # n-1 backward d x d matrices

    def to_json(self):
        f = self.field
        return {
            "d": self.d,
            "n": self.n,
            "s": f.format(self.s),
            "f": [[[f.format(x) for x in row] for row in m] for m in self.fwd],
            "fback": [[[f.format(x) for x in row] for row in m] for m in self.back],
        }


@dataclass
class FlagPair:
    r: int
    first: list  # r x d rows
    last: list


def validate_s_linked(chain: LinkedChain):
    """Check the chain conditions; returns a list of violations (empty = ok).

    (I) holds always; the exactness conditions (II) and the transversality
    conditions (III) apply on the s = 0 locus only.
    """
    f = chain.field
    problems = []
    d = chain.d
    if len(chain.fwd) != chain.n - 1 or len(chain.back) != chain.n - 1:
        return ["wrong number of link maps"]
    for i in range(chain.n - 1):
        fi, bi = chain.fwd[i], chain.back[i]
        for name, prod in (("f.fback", mat_mul(fi, bi, f)), ("fback.f", mat_mul(bi, fi, f))):
            for a in range(d):
                for b in range(d):
                    want = chain.s if a == b else f.zero
                    if prod[a][b] != want:
                        problems.append(f"(I) fails at link {i + 1}: {name} != s*id")
                        break
                else:
                    continue
                break
    if not f.is_zero(chain.s):
        return problems
    for i in range(chain.n - 1):
        fi, bi = chain.fwd[i], chain.back[i]
        if not _same_span(_image(fi, f), _kernel(bi, f), f):
            problems.append(f"(II) fails at link {i + 1}: ker fback != im f")
        if not _same_span(_image(bi, f), _kernel(fi, f), f):
            problems.append(f"(II) fails at link {i + 1}: ker f != im fback")
    for i in range(chain.n - 2):
        if subspace_intersect(_image(chain.fwd[i], f), _kernel(chain.fwd[i + 1], f), f):
            problems.append(f"(III) fails between links {i + 1},{i + 2}: im f meets ker f")
        if subspace_intersect(_image(chain.back[i + 1], f), _kernel(chain.back[i], f), f):
            problems.append(f"(III) fails between links {i + 1},{i + 2}: im fback meets ker fback")
    return problems


def _image(m, f):
    return row_basis([list(col) for col in zip(*m)], f) if m else []


def _kernel(m, f):
    _, ker = rank_and_kernel(m, f)
    return ker


def _same_span(a, b, f):
    if len(a) != len(b):
        return False
    return rank([list(r) for r in a] + [list(r) for r in b], f) == len(a)


def _composite_to_ends(chain: LinkedChain, i: int):
    """Matrices E_i -> E_1 and E_i -> E_n by composing link maps."""
    f = chain.field
    d = chain.d
    left = identity(d, f)
    for k in range(i - 1, 0, -1):
        left = mat_mul(chain.back[k - 1], left, f)
    right = identity(d, f)
    for k in range(i, chain.n):
        right = mat_mul(chain.fwd[k - 1], right, f)
    return left, right


def linked_det_membership(chain: LinkedChain, flags: FlagPair):
    """Rank test: for each i the map E_i -> E_1/F_1 + E_n/F_n must have rank
    at most d - r.  Returns (verdict, per-index ranks)."""
    f = chain.field
    d, r = chain.d, flags.r
    ann1 = annihilator(flags.first, d, f)
    annn = annihilator(flags.last, d, f)
    ranks = []
    for i in range(1, chain.n + 1):
        left, right = _composite_to_ends(chain, i)
        rows = []
        for q in ann1:
            rows.append([_col_dot(q, left, c, f) for c in range(d)])
        for q in annn:
            rows.append([_col_dot(q, right, c, f) for c in range(d)])
        ranks.append(rank(rows, f) if rows else 0)
    return all(rk <= d - r for rk in ranks), ranks


def _col_dot(q, m, c, f):
    s = f.zero
    for a in range(len(m)):
        if not f.is_zero(q[a]) and not f.is_zero(m[a][c]):
            s = f.add(s, f.mul(q[a], m[a][c]))
    return s


def membership_kernels(chain: LinkedChain, flags: FlagPair):
    """Kernels of the end-comparison maps, one subspace per index."""
    f = chain.field
    d = chain.d
    ann1 = annihilator(flags.first, d, f)
    annn = annihilator(flags.last, d, f)
    kernels = []
    for i in range(1, chain.n + 1):
        left, right = _composite_to_ends(chain, i)
        rows = []
        for q in ann1:
            rows.append([_col_dot(q, left, c, f) for c in range(d)])
        for q in annn:
            rows.append([_col_dot(q, right, c, f) for c in range(d)])
        if rows:
            _, ker = rank_and_kernel(rows, f)
        else:
            ker = [tuple(r) for r in identity(d, f)]
        kernels.append([list(k) for k in ker])
    return kernels


def complete_flags(chain: LinkedChain, flags: FlagPair):
    """Fill in middle flags linked by the chain maps, or None when membership
    fails.

    Start from the comparison kernels; while one is too big, take the least
    such index and shrink it to a deterministic r-dimensional subspace
    containing the span of its neighbors' images (the span has dimension at
    most r, padded with the kernel's own echelon basis vectors).
    """
    f = chain.field
    r = flags.r
    member, _ranks = linked_det_membership(chain, flags)
    if not member:
        return None
    kernels = membership_kernels(chain, flags)
    kernels[0] = [list(x) for x in row_basis(flags.first, f)]
    kernels[-1] = [list(x) for x in row_basis(flags.last, f)]
    if any(len(k) < r for k in kernels):
        return None
    while True:
        idx = None
        for i in range(1, chain.n - 1):
            if len(kernels[i]) > r:
                idx = i
                break
        if idx is None:
            break
        forced = []
        for vec in kernels[idx - 1]:
            forced.append(_apply(chain.fwd[idx - 1], vec, f))
        for vec in kernels[idx + 1]:
            forced.append(_apply(chain.back[idx], vec, f))
        span = row_basis(forced, f)
        if len(span) > r:
            raise LimitSeriesError("forced span exceeds target dimension (unexpected)")
        chosen = [list(x) for x in span]
        for vec in kernels[idx]:
            if len(chosen) == r:
                break
            if rank(chosen + [vec], f) > len(row_basis(chosen, f)):
                chosen.append(list(vec))
        chosen = [list(x) for x in row_basis(chosen, f)]
        if len(chosen) != r:
            raise LimitSeriesError("could not complete to the target dimension")
        kernels[idx] = chosen
    return [kernels[i] for i in range(1, chain.n - 1)]


def _apply(m, vec, f):
    out = []
    for row in m:
        s = f.zero
        for c, v in zip(row, vec):
            if not f.is_zero(c) and not f.is_zero(v):
                s = f.add(s, f.mul(c, v))
        out.append(s)
    return out


def validate_linked_flags(chain: LinkedChain, flags: FlagPair, middles):
    """Check the containment conditions f_i(F_i) <= F_{i+1} and
    fback_i(F_{i+1}) <= F_i for a completed tuple."""
    f = chain.field
    seq = [flags.first] + list(middles) + [flags.last]
    if len(seq) != chain.n:
        return False
    for i in range(chain.n - 1):
        base_next = row_basis(seq[i + 1], f)
        for vec in seq[i]:
            img = _apply(chain.fwd[i], vec, f)
            if rank([list(x) for x in base_next] + [img], f) > len(base_next):
                return False
        base_prev = row_basis(seq[i], f)
        for vec in seq[i + 1]:
            img = _apply(chain.back[i], vec, f)
            if rank([list(x) for x in base_prev] + [img], f) > len(base_prev):
                return False
    return True


# ---------------------------------------------------------------------------
# generators


def _random_invertible(rng, field, d):
    while True:
        m = [[field.from_int(rng.randrange(field.p)) for _ in range(d)] for _ in range(d)]
        if rank(m, field) == d:
            return m


def _invert(m, field):
    d = len(m)
    aug = [list(row) + list(idrow) for row, idrow in zip(m, identity(d, field))]
    from .linalg import rref
    red, pivots = rref(aug, field)
    if pivots != list(range(d)):
        raise LimitSeriesError("matrix not invertible")
    return [row[d:] for row in red[:d]]


def gen_random_chain(seed, field, d, n, s, ranks=None, budget=200) -> LinkedChain:
    """Random s-linked chain.  For s = 0 each link is A = P diag(1,..,0) Q,
    B = Q^-1 diag(0,..,1) P^-1 with random invertible P, Q and the supplied
    rank split; condition (III) across consecutive links is enforced by
    rejection.  For s != 0 the links are random invertible with B = s A^-1."""
    rng = random.Random(seed)
    if field.kind != "Fp":
        raise LimitSeriesError("random chain generation works over prime fields")
    if not field.is_zero(s):
        fwd, back = [], []
        for _ in range(n - 1):
            a = _random_invertible(rng, field, d)
            ainv = _invert(a, field)
            b = [[field.mul(s, x) for x in row] for row in ainv]
            fwd.append(a)
            back.append(b)
        chain = LinkedChain(field, d, n, s, fwd, back)
        problems = validate_s_linked(chain)
        if problems:
            raise LimitSeriesError("generated chain invalid: " + "; ".join(problems))
        return chain
    if ranks is None or len(ranks) != n - 1:
        raise LimitSeriesError("s = 0 needs one rank per link")
    for _attempt in range(budget):
        fwd, back = [], []
        for i in range(n - 1):
            d1 = ranks[i]
            if not 0 <= d1 <= d:
                raise LimitSeriesError("link rank out of range")
            p = _random_invertible(rng, field, d)
            q = _random_invertible(rng, field, d)
            diag_a = [[field.one if (a == b and a < d1) else field.zero for b in range(d)]
                      for a in range(d)]
            diag_b = [[field.one if (a == b and a >= d1) else field.zero for b in range(d)]
                      for a in range(d)]
            a_m = mat_mul(mat_mul(p, diag_a, field), q, field)
            b_m = mat_mul(mat_mul(_invert(q, field), diag_b, field), _invert(p, field), field)
            fwd.append(a_m)
            back.append(b_m)
        chain = LinkedChain(field, d, n, s, fwd, back)
        if not validate_s_linked(chain):
            return chain
    raise GenerationBudgetError(f"no chain satisfying (III) found in {budget} tries (seed {seed})")


def enumerate_chains_f2(field, d, n, rank_choices):
    """Deterministic grid of s = 0 chains: all (P, Q) pairs of invertible
    matrices per link and all rank splits, filtered by the chain conditions."""
    from itertools import product
    all_mats = []
    for bits in product(*[field.elements() for _ in range(d * d)]):
        m = [list(bits[i * d:(i + 1) * d]) for i in range(d)]
        if rank(m, field) == d:
            all_mats.append(m)
    links = []
    for d1 in rank_choices:
        diag_a = [[field.one if (a == b and a < d1) else field.zero for b in range(d)]
                  for a in range(d)]
        diag_b = [[field.one if (a == b and a >= d1) else field.zero for b in range(d)]
                  for a in range(d)]
        for p in all_mats:
            for q in all_mats:
                a_m = mat_mul(mat_mul(p, diag_a, field), q, field)
                b_m = mat_mul(mat_mul(_invert(q, field), diag_b, field), _invert(p, field), field)
                links.append((a_m, b_m))
    # dedupe identical link maps
    seen = set()
    uniq = []
    for a_m, b_m in links:
        key = (tuple(map(tuple, a_m)), tuple(map(tuple, b_m)))
        if key not in seen:
            seen.add(key)
            uniq.append((a_m, b_m))
    out = []
    for combo in product(uniq, repeat=n - 1):
        chain = LinkedChain(field, d, n, field.zero,
                            [a for a, _ in combo], [b for _, b in combo])
        if not validate_s_linked(chain):
            out.append(chain)
    return out


# ---------------------------------------------------------------------------
# curve-to-chain bridge


@dataclass
class BridgeResult:
    chain: LinkedChain
    flags: FlagPair
    dims: list
    s_linked_problems: list = dc_field(default_factory=list)
    notes: list = dc_field(default_factory=list)


def _augmented_rows(inst: CurveInstance, w, extra, points):
    """Matching conditions for sections with degree raised by extra(v) on each
    component.  Sections here model the original bundle twisted up by the
    extra points, so each side's leading value is divided by the extra-point
    product evaluated at the node; then sections vanishing on all the extra
    points match exactly like un-augmented sections."""
    f = inst.field
    g = inst.graph
    offsets = vanishing_orders(inst, w)
    deltas = tuple(w.w[i] + extra[g.vertices[i]] for i in range(len(g.vertices)))
    sizes = tuple((d + 1) if d >= 0 else 0 for d in deltas)
    starts = []
    acc = 0
    for s in sizes:
        starts.append(acc)
        acc += s
    rows = []
    from .curves import _lead_row
    for e, (tail, head) in enumerate(g.edges):
        if w.mu[e] != 0:
            continue
        et = f.one
        for x in points[tail]:
            et = f.mul(et, f.sub(inst.node_coords[(e, tail)], x))
        eh = f.one
        for x in points[head]:
            eh = f.mul(eh, f.sub(inst.node_coords[(e, head)], x))
        row_t = _lead_row(inst, w, offsets, sizes, tuple(starts), e, tail,
                          f.div(inst.lambdas[e], et))
        row_h = _lead_row(inst, w, offsets, sizes, tuple(starts), e, head, f.inv(eh))
        rows.append([f.sub(a, b) for a, b in zip(row_t, row_h)])
    return rows, deltas, sizes, tuple(starts)


def _choose_extra_points(inst: CurveInstance, extra):
    """Deterministic extra points per component, distinct from the node
    coordinates there; fails if the field is too small."""
    f = inst.field
    points = {}
    for v in inst.graph.vertices:
        used = {f.format(inst.node_coords[(e, v)]) for e in inst.graph.edges_at(v)}
        got = []
        k = 0
        candidates = f.elements() if f.kind == "Fp" else iter(range(10 ** 6))
        for c in candidates:
            x = f.from_int(c) if f.kind != "Fp" else c
            if f.format(x) not in used:
                got.append(x)
                used.add(f.format(x))
            if len(got) >= extra[v]:
                break
            k += 1
        if len(got) < extra[v]:
            raise LimitSeriesError(f"field too small for {extra[v]} extra points on {v!r}")
        points[v] = got
    return points


def curve_to_chain(inst: CurveInstance, cand, cls: int, extra_degree) -> BridgeResult:
    """Chain of augmented section spaces along one collapsed edge, forward and
    backward maps from pair twists, flags cut out by the candidate subspaces
    and vanishing at the extra points.  s = 0 exactly."""
    if not inst.multitree:
        raise LimitSeriesError("bridge requires a multitree")
    f = inst.field
    g = inst.graph
    extra = dict(extra_degree)
    for v in g.vertices:
        extra.setdefault(v, 0)
    b = inst.ctuple.b[cls]
    # the tuple records the direction; walk from the recorded origin
    origin = inst.ctuple.direction[cls]
    far = inst.collapsed.other_end(cls, origin)
    segment = [inst.wv(origin)]
    for _ in range(b):
        segment.append(twist_pair(segment[-1], inst.collapsed, cls, origin))
    # vertex sets fired by a forward pair twist: the origin side of the cut
    from .multidegree import _cut_sides
    side_a, side_b = _cut_sides(inst.collapsed, cls)
    near = side_a if origin in side_a else side_b
    fire_fwd = sorted(near, key=g.vindex)
    fire_back = sorted(set(g.vertices) - near, key=g.vindex)
    points = _choose_extra_points(inst, extra)
    spaces = []
    for w in segment:
        rows, _deltas, sizes, _starts = _augmented_rows(inst, w, extra, points)
        ambient = sum(sizes)
        if rows:
            _, basis = rank_and_kernel(rows, f)
        else:
            basis = [tuple(r) for r in identity(ambient, f)]
        spaces.append([list(x) for x in basis])
    dims = [len(sp) for sp in spaces]
    expected = inst.degree() + sum(extra.values()) + 1 - inst.genus()
    notes = []
    if len(set(dims)) != 1:
        raise LimitSeriesError(f"augmented section spaces not of constant dimension: {dims}")
    if dims[0] != expected:
        notes.append(f"constant dimension {dims[0]} differs from expected {expected}")
    d_dim = dims[0]
    fwd, back = [], []
    for i in range(b):
        fwd.append(_segment_map(inst, segment[i], segment[i + 1], fire_fwd, extra, points,
                                spaces[i], spaces[i + 1]))
        back.append(_segment_map(inst, segment[i + 1], segment[i], fire_back, extra, points,
                                 spaces[i + 1], spaces[i]))
    chain = LinkedChain(f, d_dim, b + 1, f.zero, fwd, back)
    problems = validate_s_linked(chain)
    hard = [p for p in problems if "(I)" in p]
    if hard:
        raise LimitSeriesError("bridge chain violates composite condition: " + "; ".join(hard))
    flag_first = _bridge_flag(inst, cand, origin, segment[0], extra, points, spaces[0])
    flag_last = _bridge_flag(inst, cand, far, segment[-1], extra, points, spaces[-1])
    flags = FlagPair(cand.r + 1, flag_first, flag_last)
    if len(flag_first) != cand.r + 1 or len(flag_last) != cand.r + 1:
        notes.append("flag rank deficient; extra degree too small for this candidate")
    return BridgeResult(chain, flags, dims, problems, notes)


def _aug_twist_step(inst: CurveInstance, w, u, extra):
    """Single-twist matrix between augmented coordinate spaces."""
    f = inst.field
    g = inst.graph
    w2 = w.twist(u)
    def sizes_of(md):
        return tuple((md.w[i] + extra[g.vertices[i]] + 1)
                     if (md.w[i] + extra[g.vertices[i]]) >= 0 else 0
                     for i in range(len(g.vertices)))
    sizes1, sizes2 = sizes_of(w), sizes_of(w2)
    starts1, starts2 = [0], [0]
    for s in sizes1[:-1]:
        starts1.append(starts1[-1] + s)
    for s in sizes2[:-1]:
        starts2.append(starts2[-1] + s)
    mat = [[f.zero] * sum(sizes1) for _ in range(sum(sizes2))]
    for vi, vert in enumerate(g.vertices):
        if vert == u or sizes1[vi] == 0:
            continue
        factors = []
        for e in g.edges_at(u):
            if g.other_end(e, u) == vert and w2.mu[e] == 0:
                factors.append(inst.node_coords[(e, vert)])
        poly = [f.one]
        for p in factors:
            nxt = [f.zero] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i] = f.add(nxt[i], f.mul(c, f.neg(p)))
                nxt[i + 1] = f.add(nxt[i + 1], c)
            poly = nxt
        for i in range(sizes1[vi]):
            for jj, c in enumerate(poly):
                r = starts2[vi] + i + jj
                mat[r][starts1[vi] + i] = f.add(mat[r][starts1[vi] + i], c)
    return mat, w2


def _segment_map(inst, w_from, w_to, fire, extra, points, basis_from, basis_to):
    """Pair-twist map between augmented spaces, expressed in the two bases."""
    f = inst.field
    mat = None
    cur = w_from
    for u in fire:
        step, cur = _aug_twist_step(inst, cur, u, extra)
        mat = step if mat is None else mat_mul(step, mat, f)
    if cur.key() != w_to.key():
        raise LimitSeriesError("pair-twist fire set did not land on the target")
    if mat is None:
        mat = identity(len(basis_from[0]) if basis_from else 0, f)
    cols = []
    for vec in basis_from:
        img = _apply(mat, vec, f)
        coords = solve_coords(basis_to, img, f)
        if coords is None:
            raise LimitSeriesError("twist image left the target section space")
        cols.append(coords)
    d = len(basis_to)
    out = [[f.zero] * len(basis_from) for _ in range(d)]
    for j, coords in enumerate(cols):
        for i in range(d):
            out[i][j] = coords[i] if i < len(coords) else f.zero
    return out


def _bridge_flag(inst, cand, vert, w, extra, points, basis):
    """Flag in the augmented space at a reference multidegree: sections
    vanishing at every extra point whose restriction to the component lies in
    the candidate subspace."""
    f = inst.field
    g = inst.graph
    if not basis:
        return []
    ambient = len(basis[0])
    deltas = tuple(w.w[i] + extra[g.vertices[i]] for i in range(len(g.vertices)))
    sizes = tuple((d + 1) if d >= 0 else 0 for d in deltas)
    starts = [0]
    for s in sizes[:-1]:
        starts.append(starts[-1] + s)
    conds = []
    for vi, u in enumerate(g.vertices):
        if sizes[vi] == 0:
            continue
        for x in points[u]:
            row = [f.zero] * ambient
            pw = f.one
            for i in range(sizes[vi]):
                row[starts[vi] + i] = pw
                pw = f.mul(pw, x)
            conds.append(row)
    vi = g.vindex(vert)
    size_ref = inst.delta_ref(vert) + 1
    # quotient by the extra-point product on the component, then candidate test
    divisor_poly = [f.one]
    for x in points[vert]:
        nxt = [f.zero] * (len(divisor_poly) + 1)
        for i, c in enumerate(divisor_poly):
            nxt[i] = f.add(nxt[i], f.mul(c, f.neg(x)))
            nxt[i + 1] = f.add(nxt[i + 1], c)
        divisor_poly = nxt
    ann = annihilator(cand.V[vert], size_ref, f)
    # parameter space: the basis of the augmented section space
    sys_rows = []
    for row in conds:
        sys_rows.append([_dot_raw(row, vec, f) for vec in basis])
    sub_params = rank_and_kernel(sys_rows, f)[1] if sys_rows else \
        [tuple(r) for r in identity(len(basis), f)]
    flag_rows = []
    for par in sub_params:
        vec = [f.zero] * ambient
        for c, bvec in zip(par, basis):
            if f.is_zero(c):
                continue
            for i in range(ambient):
                vec[i] = f.add(vec[i], f.mul(c, bvec[i]))
        block = vec[starts[vi]:starts[vi] + sizes[vi]]
        from .polys import poly_exact_divide
        quota = poly_exact_divide(block, divisor_poly, f) if any(
            not f.is_zero(x) for x in block) else []
        quota = list(quota) + [f.zero] * (size_ref - len(quota))
        flag_rows.append((vec, quota))
    if not flag_rows:
        return []
    sys2 = []
    for q in ann:
        sys2.append([_dot_raw(q, quota, f) for _, quota in flag_rows])
    params2 = rank_and_kernel(sys2, f)[1] if sys2 else \
        [tuple(r) for r in identity(len(flag_rows), f)]
    out = []
    for par in params2:
        vec = [f.zero] * ambient
        for c, (full, _) in zip(par, flag_rows):
            if f.is_zero(c):
                continue
            for i in range(ambient):
                vec[i] = f.add(vec[i], f.mul(c, full[i]))
        coords = solve_coords(basis, vec, f)
        if coords is None:
            raise LimitSeriesError("flag vector left the section space (unexpected)")
        out.append(coords)
    return [list(x) for x in row_basis(out, f)]


def _dot_raw(a, b, f):
    s = f.zero
    for x, y in zip(a, b):
        if not f.is_zero(x) and not f.is_zero(y):
            s = f.add(s, f.mul(x, y))
    return s
