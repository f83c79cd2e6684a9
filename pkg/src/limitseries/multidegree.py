"""Admissible multidegrees and the twist calculus.

An admissible multidegree on (graph, chains) is an integer weight per
component plus a residue marker mu(e) in Z/n(e)Z per edge recording where on
the inserted chain a single degree-1 component sits.  Twists move degree
around exactly like chip-firing when all chains are trivial.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from math import gcd

from .errors import GraphError, LimitSeriesError, ReachabilityError
from .fields import QQ
from .graphs import ChainStructure, CollapsedGraph, DualGraph, collapse, is_multitree, subdivide
from .linalg import rank_and_kernel

DEFAULT_SEARCH_BOUND = 48


@dataclass(frozen=True)
class Multidegree:
    graph: DualGraph
    chains: ChainStructure
    w: tuple     # per vertex, aligned with graph.vertices
    mu: tuple    # per edge, residue in range(n(e))

    @staticmethod
    def make(graph, chains, w, mu=None):
        if mu is None:
            mu = [0] * len(graph.edges)
        mu = tuple(m % chains.of(e) for e, m in enumerate(mu))
        w = tuple(int(x) for x in w)
        if len(w) != len(graph.vertices):
            raise GraphError("weight vector length mismatch")
        return Multidegree(graph, chains, w, mu)

    def total_degree(self) -> int:
        return sum(self.w) + sum(1 for m in self.mu if m != 0)

    def weight_of(self, v) -> int:
        return self.w[self.graph.vindex(v)]

    def _twist_edges(self, v, edges, sign=1):
        g = self.graph
        w = list(self.w)
        mu = list(self.mu)
        vi = g.vindex(v)
        if sign > 0:
            drop = 0
            for e in edges:
                n = self.chains.of(e)
                old = mu[e]
                new = (old + g.sigma(e, v)) % n
                mu[e] = new
                if old == 0:
                    drop += 1
                if new == 0:
                    w[g.vindex(g.other_end(e, v))] += 1
            w[vi] -= drop
        else:
            gain = 0
            for e in edges:
                n = self.chains.of(e)
                old = mu[e]
                new = (old - g.sigma(e, v)) % n
                mu[e] = new
                if old == 0:
                    w[g.vindex(g.other_end(e, v))] -= 1
                if new == 0:
                    gain += 1
            w[vi] += gain
        return Multidegree(g, self.chains, tuple(w), tuple(mu))

    def twist(self, v):
        """Twist at a vertex: mu(e) += sigma(e,v) on adjacent edges, with the
        weight bookkeeping that keeps the total degree fixed."""
        return self._twist_edges(v, self.graph.edges_at(v), sign=1)

    def negative_twist(self, v):
        """Two-sided inverse of twist(v)."""
        return self._twist_edges(v, self.graph.edges_at(v), sign=-1)

    def key(self):
        return (self.w, self.mu)

    def __repr__(self):
        return f"Multidegree(w={self.w}, mu={self.mu})"


def apply_sequence(md: Multidegree, seq):
    for v in seq:
        md = md.twist(v)
    return md


def twist_pair(md: Multidegree, collapsed: CollapsedGraph, cls: int, v):
    """Twist at (e, v) for a collapsed edge e of a multitree: apply the vertex
    rule only to the parallel edges over e."""
    g = md.graph
    if not is_multitree(g):
        raise GraphError("(e,v)-twists require a multitree")
    if v not in collapsed.ends[cls]:
        raise GraphError(f"vertex {v!r} is not an endpoint of collapsed edge {cls}")
    return md._twist_edges(v, collapsed.classes[cls], sign=1)


def twist_pair_inverse(md: Multidegree, collapsed: CollapsedGraph, cls: int, v):
    """Inverse of twist_pair at (e, v); equals twist_pair at (e, v')."""
    other = collapsed.other_end(cls, v)
    return twist_pair(md, collapsed, cls, other)


def lift_to_subdivision(md: Multidegree, sub=None):
    """Weight function on the subdivided graph: original weights carried over,
    weight 1 on the mu(e)-th new vertex (counted from the tail) when mu != 0.

    Returns (subdivision, weight tuple aligned with the subdivided vertices).
    """
    if sub is None:
        sub = subdivide(md.graph, md.chains)
    weights = {v: 0 for v in sub.graph.vertices}
    for i, v in enumerate(md.graph.vertices):
        weights[v] = md.w[i]
    for e, m in enumerate(md.mu):
        if m != 0:
            weights[sub.chain_vertices[e][m - 1]] = 1
    return sub, tuple(weights[v] for v in sub.graph.vertices)


def composite_fire_set(md: Multidegree, v, sub) -> frozenset:
    """The vertex set of the subdivided graph whose chip-firing matches a
    twist at v: the vertex itself plus, along each adjacent edge, the first
    rep(sigma(e,v) mu(e)) new vertices counted from v's side."""
    g = md.graph
    members = {v}
    for e in g.edges_at(v):
        n = md.chains.of(e)
        k = (g.sigma(e, v) * md.mu[e]) % n
        chain = sub.chain_vertices[e]
        if g.sigma(e, v) == 1:
            members.update(chain[:k])
        else:
            members.update(chain[len(chain) - k:])
    return frozenset(members)


def fire_set_trivial(graph: DualGraph, weights, members):
    """Chip-firing of a vertex set on a graph with trivial chain structure."""
    w = list(weights)
    for e, (t, h) in enumerate(graph.edges):
        tin, hin = t in members, h in members
        if tin and not hin:
            w[graph.vindex(t)] -= 1
            w[graph.vindex(h)] += 1
        elif hin and not tin:
            w[graph.vindex(h)] -= 1
            w[graph.vindex(t)] += 1
    return tuple(w)


# ---------------------------------------------------------------------------
# twist multisets


@dataclass(frozen=True)
class TwistMultiset:
    """Multiset of twist vertices, stored as per-vertex counts."""

    counts: tuple  # aligned with graph.vertices of the context

    @staticmethod
    def make(graph: DualGraph, counts):
        if isinstance(counts, dict):
            counts = tuple(counts.get(v, 0) for v in graph.vertices)
        return TwistMultiset(tuple(int(c) for c in counts))

    def normalize(self):
        m = min(self.counts)
        return TwistMultiset(tuple(c - m for c in self.counts))

    def size(self) -> int:
        return sum(self.normalize().counts)


def same_endpoint(m1: TwistMultiset, m2: TwistMultiset) -> bool:
    """True iff the multisets differ by a constant multiple of the all-ones
    vector, i.e. they reach the same multidegree from any start."""
    diffs = {a - b for a, b in zip(m1.counts, m2.counts)}
    return len(diffs) == 1


def apply_multiset(md: Multidegree, m: TwistMultiset):
    m = m.normalize()
    for v, c in zip(md.graph.vertices, m.counts):
        for _ in range(c):
            md = md.twist(v)
    return md


def laplacian_kernel_check(graph: DualGraph, chains: ChainStructure) -> bool:
    """Verify on the subdivided graph that the valence matrix M (diagonal
    -valence, off-diagonal edge counts) has kernel exactly span(1,...,1)."""
    sub = subdivide(graph, chains)
    sg = sub.graph
    n = len(sg.vertices)
    rows = [[QQ.zero] * n for _ in range(n)]
    for (t, h) in sg.edges:
        ti, hi = sg.vindex(t), sg.vindex(h)
        rows[ti][hi] += 1
        rows[hi][ti] += 1
        rows[ti][ti] -= 1
        rows[hi][hi] -= 1
    rk, kernel = rank_and_kernel(rows, QQ)
    if rk != n - 1 or len(kernel) != 1:
        return False
    vec = kernel[0]
    return all(x == vec[0] for x in vec) and vec[0] != 0


# ---------------------------------------------------------------------------
# concentration


def strongly_concentrated(md: Multidegree, v) -> bool:
    """Stricter sufficient condition: every vertex v' != v goes negative under
    the negative twist at any of its neighbors."""
    g = md.graph
    for vp in g.vertices:
        if vp == v:
            continue
        for vpp in g.neighbors(vp):
            if md.negative_twist(vpp).weight_of(vp) >= 0:
                return False
    return True


def is_concentrated(md: Multidegree, v, *, strong_shortcut=False):
    """Decide concentration at v; returns (flag, witness ordering or None).

    Searches orderings by dynamic programming on the set of already-used
    vertices (negative twists commute, so the state depends only on the set).
    With strong_shortcut the cheap sufficient condition is tried first, in
    which case no witness is produced on a shortcut hit.
    """
    g = md.graph
    if v not in g._vindex:
        raise GraphError(f"unknown vertex {v!r}")
    if strong_shortcut and strongly_concentrated(md, v):
        return True, None
    names = g.vertices
    nv = len(names)
    vi = g.vindex(v)
    start = 1 << vi
    states = {start: md.negative_twist(v)}
    parents = {start: (None, vi)}
    frontier = [start]
    full = (1 << nv) - 1
    if nv == 1:
        return True, [v]
    while frontier:
        nxt = []
        for mask in frontier:
            state = states[mask]
            for j in range(nv):
                bit = 1 << j
                if mask & bit:
                    continue
                if state.w[j] >= 0:
                    continue
                m2 = mask | bit
                if m2 in states:
                    continue
                states[m2] = state.negative_twist(names[j])
                parents[m2] = (mask, j)
                if m2 == full:
                    order = []
                    cur = m2
                    while cur is not None:
                        prev, idx = parents[cur]
                        order.append(names[idx])
                        cur = prev
                    order.reverse()
                    return True, order
                nxt.append(m2)
        frontier = nxt
    return False, None


def concentrate(md: Multidegree, v, *, max_rounds=None):
    """Produce a multidegree concentrated at v by twisting only at other
    vertices, following the distance-layer schedule: repeatedly fire the
    complement of each ball around v (equivalently, negatively fire the ball)
    until the next distance layer has negative weight everywhere.

    Returns (multidegree, TwistMultiset of positive twists used).
    """
    g = md.graph
    counts = {u: 0 for u in g.vertices}
    ok, _ = is_concentrated(md, v)
    if ok:
        return md, TwistMultiset.make(g, counts)
    dist = {v: 0}
    q = deque([v])
    while q:
        u = q.popleft()
        for e in g.edges_at(u):
            x = g.other_end(e, u)
            if x not in dist:
                dist[x] = dist[u] + 1
                q.append(x)
    max_dist = max(dist.values())
    max_n = max(md.chains.lengths) if md.chains.lengths else 1
    cur = md
    for layer in range(max_dist - 1, -1, -1):
        targets = [u for u in g.vertices if dist[u] == layer + 1]
        comp = [u for u in g.vertices if dist[u] > layer]
        limit = max_rounds
        if limit is None:
            top = max(cur.w[g.vindex(u)] for u in targets)
            limit = max_n * (top + 2) + 2
        rounds = 0
        while any(cur.w[g.vindex(u)] >= 0 for u in targets):
            for u in comp:
                cur = cur.twist(u)
                counts[u] += 1
            rounds += 1
            if rounds > limit:
                raise LimitSeriesError("concentration did not terminate within bound")
    ok, _ = is_concentrated(cur, v)
    if not ok:
        raise LimitSeriesError("layer schedule failed to concentrate (unexpected)")
    return cur, TwistMultiset.make(g, counts)


# ---------------------------------------------------------------------------
# minimal paths


def minimal_path_bfs(src: Multidegree, dst: Multidegree, bound=DEFAULT_SEARCH_BOUND):
    """Minimal twist sequence from src to dst by breadth-first search, or None
    if not found within the depth bound."""
    if src.key() == dst.key():
        return ()
    names = src.graph.vertices
    seen = {src.key(): None}
    frontier = [src]
    for _depth in range(bound):
        nxt = []
        for md in frontier:
            for v in names:
                t = md.twist(v)
                k = t.key()
                if k in seen:
                    continue
                seen[k] = (md.key(), v)
                if k == dst.key():
                    seq = []
                    cur = k
                    while seen[cur] is not None:
                        prev, vv = seen[cur]
                        seq.append(vv)
                        cur = prev
                    seq.reverse()
                    return tuple(seq)
                nxt.append(t)
        frontier = nxt
        if not frontier:
            break
    return None


# ---------------------------------------------------------------------------
# concentrated tuples on multitrees


@dataclass(frozen=True)
class ConcentratedTuple:
    """A concentrated multidegree per vertex, pair-twist aligned on multitrees.

    ``b[cls]`` counts the (e,v)-twists taking wv[origin] to the opposite
    endpoint along collapsed edge cls, with origin recorded in
    ``direction[cls]``.  For non-multitree graphs only the wv data is used and
    the pair fields are empty.
    """

    wv: tuple          # Multidegree per vertex, aligned with graph.vertices
    b: tuple = dc_field(default=())
    direction: tuple = dc_field(default=())

    def of(self, graph: DualGraph, v) -> Multidegree:
        return self.wv[graph.vindex(v)]

    def b_between(self, collapsed: CollapsedGraph, cls: int) -> int:
        return self.b[cls]


def _crt(pairs):
    """Solve x = r mod n simultaneously; returns (residue, modulus) or None."""
    r, n = 0, 1
    for r2, n2 in pairs:
        g = gcd(n, n2)
        if (r2 - r) % g != 0:
            return None
        lcm = n // g * n2
        # combine: x = r mod n, x = r2 mod n2
        t = ((r2 - r) // g * pow(n // g, -1, n2 // g)) % (n2 // g)
        r = (r + n * t) % lcm
        n = lcm
    return r, n


@lru_cache(maxsize=None)
def _cut_sides(collapsed: CollapsedGraph, cls: int):
    """Vertex sets of the two components of the collapsed tree minus cls."""
    g = collapsed.graph
    a, bb = collapsed.ends[cls]
    side = {a}
    stack = [a]
    while stack:
        u = stack.pop()
        for c in collapsed.classes_at(u):
            if c == cls:
                continue
            x = collapsed.other_end(c, u)
            if x not in side:
                side.add(x)
                stack.append(x)
    other = set(g.vertices) - side
    if bb not in other:
        raise GraphError("collapsed graph is not a tree")
    return frozenset(side), frozenset(other)


def _cut_count(md: Multidegree, vertices):
    """Weight plus nonzero-mu count on the induced side of a cut; invariant
    under pair twists at every other collapsed edge."""
    g = md.graph
    total = sum(md.w[g.vindex(u)] for u in vertices)
    for e, (t, h) in enumerate(g.edges):
        if t in vertices and h in vertices and md.mu[e] != 0:
            total += 1
    return total


def t_ev(w: Multidegree, collapsed: CollapsedGraph, cls: int, v, tup: ConcentratedTuple,
         bound=DEFAULT_SEARCH_BOUND):
    """Net number of (e,v)-twists in a minimal expression from wv[v] to w.

    The residue of the count modulo each n(e') is read off the mu markers; the
    integer itself is pinned by the degree total on the far side of the cut,
    which changes monotonically under (e,v)-twists and not at all under twists
    at other collapsed edges.
    """
    g = w.graph
    base = tup.of(g, v)
    vprime = collapsed.other_end(cls, v)
    pairs = []
    for e in collapsed.classes[cls]:
        n = w.chains.of(e)
        r = (g.sigma(e, v) * (w.mu[e] - base.mu[e])) % n
        pairs.append((r, n))
    crt = _crt(pairs)
    if crt is None:
        raise ReachabilityError("mu markers inconsistent with any (e,v)-twist count")
    r0, L = crt
    side_a, side_b = _cut_sides(collapsed, cls)
    far = side_b if v in side_a else side_a
    target = _cut_count(w, far)
    cur = base
    for _ in range(r0):
        cur = twist_pair(cur, collapsed, cls, v)
    c = r0
    have = _cut_count(cur, far)
    steps = 0
    while have != target:
        if have < target:
            for _ in range(L):
                cur = twist_pair(cur, collapsed, cls, v)
            c += L
        else:
            for _ in range(L):
                cur = twist_pair(cur, collapsed, cls, vprime)
            c -= L
        new = _cut_count(cur, far)
        if (new - have) * (target - have) < 0 or new == have:
            raise ReachabilityError("cut count overshot; multidegree unreachable")
        if (have < target < new) or (have > target > new):
            raise ReachabilityError("cut count skipped target; multidegree unreachable")
        have = new
        steps += 1
        if steps > bound:
            raise ReachabilityError("pair-twist search exceeded bound")
    return c


def pair_coordinates(w: Multidegree, collapsed: CollapsedGraph, tup: ConcentratedTuple,
                     verify=True, bound=DEFAULT_SEARCH_BOUND):
    """Net pair-twist count per collapsed edge, measured along the recorded
    direction; verifies that these counts reproduce w exactly."""
    g = w.graph
    coords = {}
    for cls in range(len(collapsed.classes)):
        origin = tup.direction[cls]
        coords[cls] = t_ev(w, collapsed, cls, origin, tup, bound=bound)
    if verify:
        # rebuild w from the root vertex entry by applying the recorded counts
        root = g.vertices[0]
        cur = tup.of(g, root)
        for cls in range(len(collapsed.classes)):
            origin = tup.direction[cls]
            base_count = _root_offset(collapsed, tup, cls, root)
            delta = coords[cls] - base_count
            if delta >= 0:
                for _ in range(delta):
                    cur = twist_pair(cur, collapsed, cls, origin)
            else:
                for _ in range(-delta):
                    cur = twist_pair(cur, collapsed, cls, collapsed.other_end(cls, origin))
        if cur.key() != w.key():
            raise ReachabilityError("multidegree not reachable from the tuple")
    return coords


def _root_offset(collapsed: CollapsedGraph, tup: ConcentratedTuple, cls: int, root):
    """Pair coordinate of wv[root] along cls: b if root sits past the far end
    of the recorded direction, else 0."""
    origin = tup.direction[cls]
    side_a, side_b = _cut_sides(collapsed, cls)
    origin_side = side_a if origin in side_a else side_b
    return 0 if root in origin_side else tup.b[cls]


def minimal_multiset_on_multitree(src: Multidegree, dst: Multidegree,
                                  collapsed: CollapsedGraph, tup: ConcentratedTuple,
                                  bound=DEFAULT_SEARCH_BOUND):
    """Minimal vertex-twist multiset from src to dst via pair coordinates:
    each pair-twist expands to one twist at every vertex on its near side."""
    g = src.graph
    ca = pair_coordinates(src, collapsed, tup, verify=False, bound=bound)
    cb = pair_coordinates(dst, collapsed, tup, verify=False, bound=bound)
    counts = {u: 0 for u in g.vertices}
    for cls in range(len(collapsed.classes)):
        delta = cb[cls] - ca[cls]
        if delta == 0:
            continue
        origin = tup.direction[cls]
        side_a, side_b = _cut_sides(collapsed, cls)
        near = side_a if origin in side_a else side_b
        if delta < 0:
            near = set(g.vertices) - near
            delta = -delta
        for u in near:
            counts[u] += delta
    m = TwistMultiset.make(g, counts).normalize()
    if apply_multiset(src, m).key() != dst.key():
        raise ReachabilityError("target multidegree not reachable from source")
    return m


def expand_multiset(graph: DualGraph, m: TwistMultiset):
    """Deterministic flat twist sequence realizing a multiset (vertex order)."""
    seq = []
    for v, c in zip(graph.vertices, m.normalize().counts):
        seq.extend([v] * c)
    return tuple(seq)


def derive_tuple(md: Multidegree, *, bound=None) -> ConcentratedTuple:
    """Concentrated tuple built along a deterministic tree traversal.

    The root entry comes from concentrate(); each child entry is the first
    pair-twist of its parent entry that is concentrated at the child, which
    keeps the tuple pair-twist aligned.  For non-multitree graphs each vertex
    is concentrated independently and no pair data is recorded.
    """
    g = md.graph
    if not is_multitree(g):
        wv = []
        for v in g.vertices:
            c, _ = concentrate(md, v)
            wv.append(c)
        return ConcentratedTuple(tuple(wv))
    collapsed = collapse(g)
    root = g.vertices[0]
    wv = {root: concentrate(md, root)[0]}
    bvals = [None] * len(collapsed.classes)
    direction = [None] * len(collapsed.classes)
    if bound is None:
        bound = 4 * (abs(md.total_degree()) + sum(md.chains.lengths) + len(g.vertices)) + 16
    order = [root]
    seen = {root}
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        for cls in collapsed.classes_at(v):
            vp = collapsed.other_end(cls, v)
            if vp in seen:
                continue
            seen.add(vp)
            cur = wv[v]
            found = None
            for k in range(bound + 1):
                if is_concentrated(cur, vp)[0]:
                    found = k
                    break
                cur = twist_pair(cur, collapsed, cls, v)
            if found is None:
                raise LimitSeriesError(
                    f"no concentrated pair-twist of {v!r} entry found for {vp!r} within bound")
            wv[vp] = cur
            bvals[cls] = found
            direction[cls] = v
            order.append(vp)
    return ConcentratedTuple(tuple(wv[v] for v in g.vertices), tuple(bvals), tuple(direction))


def validate_concentrated_tuple(tup: ConcentratedTuple, graph: DualGraph,
                                collapsed: CollapsedGraph = None):
    """Check conditions (I) concentration and (II) pair-twist alignment;
    returns a list of diagnostics (empty when valid)."""
    problems = []
    if len(tup.wv) != len(graph.vertices):
        return ["tuple length does not match vertex count"]
    for v, w in zip(graph.vertices, tup.wv):
        ok, _ = is_concentrated(w, v)
        if not ok:
            problems.append(f"entry at {v!r} is not concentrated there")
    if not is_multitree(graph):
        return problems
    if collapsed is None:
        collapsed = collapse(graph)
    if len(tup.b) != len(collapsed.classes):
        problems.append("pair-twist counts missing for some collapsed edges")
        return problems
    for cls, (a, bvert) in enumerate(collapsed.ends):
        origin = tup.direction[cls]
        if origin not in (a, bvert):
            problems.append(f"direction vertex of class {cls} is not an endpoint")
            continue
        other = collapsed.other_end(cls, origin)
        bval = tup.b[cls]
        if bval < 0:
            problems.append(f"negative pair-twist count on class {cls}")
            continue
        cur = tup.of(graph, origin)
        for _ in range(bval):
            cur = twist_pair(cur, collapsed, cls, origin)
        if cur.key() != tup.of(graph, other).key():
            problems.append(
                f"entries at {origin!r} and {other!r} are not aligned by "
                f"{bval} twists at class {cls}")
    return problems


@dataclass
class BarG:
    """The finite tree of multidegrees spanned by a concentrated tuple."""

    nodes: list                 # Multidegree list, deterministic order
    index: dict                 # key() -> position in nodes
    edges: list                 # (i, j, cls, origin_vertex) with j one twist from i
    coords: list                # per node: dict cls -> position along the recorded direction


def enumerate_bar_G(tup: ConcentratedTuple, graph: DualGraph,
                    collapsed: CollapsedGraph = None) -> BarG:
    if collapsed is None:
        collapsed = collapse(graph)
    problems = validate_concentrated_tuple(tup, graph, collapsed)
    if problems:
        raise LimitSeriesError("invalid concentrated tuple: " + "; ".join(problems))
    nodes, index, coords = [], {}, []

    def base_coords():
        return {}

    def add(md, cls_positions):
        k = md.key()
        if k not in index:
            index[k] = len(nodes)
            nodes.append(md)
            coords.append(dict(cls_positions))
        else:
            coords[index[k]].update(cls_positions)
        return index[k]

    # positions of each wv along every class, so shared endpoints get full coords
    root_positions = {}
    for vi, v in enumerate(graph.vertices):
        pos = {}
        for cls in range(len(collapsed.classes)):
            pos[cls] = _root_offset(collapsed, tup, cls, v)
        root_positions[v] = pos

    edges = []
    for cls in range(len(collapsed.classes)):
        origin = tup.direction[cls]
        other = collapsed.other_end(cls, origin)
        cur = tup.of(graph, origin)
        prev_idx = add(cur, {**root_positions[origin]})
        for k in range(1, tup.b[cls] + 1):
            cur = twist_pair(cur, collapsed, cls, origin)
            if k == tup.b[cls]:
                pos = {**root_positions[other]}
            else:
                pos = {**root_positions[origin], cls: k}
            idx = add(cur, pos)
            edges.append((prev_idx, idx, cls, origin))
            edges.append((idx, prev_idx, cls, other))
            prev_idx = idx
    return BarG(nodes, index, edges, coords)


def restrict_multidegree(w: Multidegree, keep, tup: ConcentratedTuple,
                         collapsed: CollapsedGraph = None, bound=DEFAULT_SEARCH_BOUND):
    """Restriction of w to the subcurve on the vertex set ``keep``: first undo
    the net pair twists across every boundary edge (twist t_(e,v) times at
    (e,v')), then restrict naively.

    Returns (subgraph, subchains, restricted Multidegree).
    """
    g = w.graph
    keep = set(keep)
    if collapsed is None:
        collapsed = collapse(g)
    cur = w
    for cls, (a, bvert) in enumerate(collapsed.ends):
        ins = [x for x in (a, bvert) if x in keep]
        if len(ins) != 1:
            continue
        v = ins[0]
        vp = collapsed.other_end(cls, v)
        t = t_ev(cur, collapsed, cls, v, tup, bound=bound)
        if t >= 0:
            for _ in range(t):
                cur = twist_pair(cur, collapsed, cls, vp)
        else:
            for _ in range(-t):
                cur = twist_pair(cur, collapsed, cls, v)
    sub_vertices = [v for v in g.vertices if v in keep]
    edge_map = [e for e, (t, h) in enumerate(g.edges) if t in keep and h in keep]
    sub_edges = [g.edges[e] for e in edge_map]
    subg = DualGraph.make(sub_vertices, sub_edges)
    subchains = ChainStructure(tuple(w.chains.of(e) for e in edge_map))
    sub_w = tuple(cur.w[g.vindex(v)] for v in sub_vertices)
    sub_mu = tuple(cur.mu[e] for e in edge_map)
    return subg, subchains, Multidegree(subg, subchains, sub_w, sub_mu), edge_map
