"""Directed loop-free multigraphs (dual graphs of nodal curves).

Edges carry stable indices so that parallel edges stay distinguishable and
chain structures, residue markers and node coordinates can refer to them
unambiguously.  Orientation is user-supplied and arbitrary; everything
downstream is orientation-independent (a test obligation).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import GraphError


@dataclass(frozen=True)
class DualGraph:
    vertices: tuple
    edges: tuple  # (tail, head) pairs; index in this tuple is the edge id

    @staticmethod
    def make(vertices, edges):
        return DualGraph(tuple(vertices), tuple((t, h) for t, h in edges))

    @cached_property
    def _vindex(self):
        return {v: i for i, v in enumerate(self.vertices)}

    def vindex(self, v) -> int:
        return self._vindex[v]

    @cached_property
    def _edges_at(self):
        at = {v: [] for v in self.vertices}
        for e, (t, h) in enumerate(self.edges):
            at[t].append(e)
            if h != t:
                at[h].append(e)
        return {v: tuple(es) for v, es in at.items()}

    def edges_at(self, v):
        return self._edges_at[v]

    def sigma(self, e: int, v) -> int:
        """+1 if v is the tail of edge e, -1 if the head."""
        t, h = self.edges[e]
        if v == t:
            return 1
        if v == h:
            return -1
        raise GraphError(f"vertex {v!r} not an endpoint of edge {e}")

    def other_end(self, e: int, v):
        t, h = self.edges[e]
        if v == t:
            return h
        if v == h:
            return t
        raise GraphError(f"vertex {v!r} not an endpoint of edge {e}")

    def neighbors(self, v):
        return tuple(sorted({self.other_end(e, v) for e in self.edges_at(v)},
                            key=self.vindex))

    def first_betti(self) -> int:
        return len(self.edges) - len(self.vertices) + 1


def validate(g: DualGraph):
    """Check loop-freeness and connectedness; return a list of diagnostics."""
    problems = []
    if not g.vertices:
        return ["graph has no vertices"]
    if len(set(g.vertices)) != len(g.vertices):
        problems.append("duplicate vertex labels")
    for e, (t, h) in enumerate(g.edges):
        if t not in g._vindex or h not in g._vindex:
            problems.append(f"edge {e} references unknown vertex")
        elif t == h:
            problems.append(f"edge {e} is a loop at {t!r}")
    if problems:
        return problems
    seen = {g.vertices[0]}
    stack = [g.vertices[0]]
    while stack:
        v = stack.pop()
        for e in g.edges_at(v):
            u = g.other_end(e, v)
            if u not in seen:
                seen.add(u)
                stack.append(u)
    if len(seen) != len(g.vertices):
        missing = sorted(set(g.vertices) - seen, key=g.vindex)
        problems.append(f"graph is disconnected; unreachable vertices {missing}")
    return problems


def require_valid(g: DualGraph):
    problems = validate(g)
    if problems:
        raise GraphError("; ".join(problems))


@dataclass(frozen=True)
class ChainStructure:
    """Positive integer per edge: the length of the rational chain at that node."""

    lengths: tuple

    @staticmethod
    def make(g: DualGraph, n):
        if isinstance(n, int):
            lengths = tuple([n] * len(g.edges))
        elif isinstance(n, dict):
            lengths = tuple(n.get(e, 1) for e in range(len(g.edges)))
        else:
            lengths = tuple(n)
        if len(lengths) != len(g.edges):
            raise GraphError("chain structure length mismatch")
        if any(x < 1 for x in lengths):
            raise GraphError("chain structure values must be >= 1")
        return ChainStructure(lengths)

    def of(self, e: int) -> int:
        return self.lengths[e]

    @property
    def trivial(self) -> bool:
        return all(x == 1 for x in self.lengths)


@dataclass(frozen=True)
class CollapsedGraph:
    """The graph with parallel edges merged into adjacency classes."""

    graph: DualGraph
    classes: tuple          # tuple of tuples of parallel edge ids
    ends: tuple             # per class, the (v, v') pair in vertex order

    @cached_property
    def class_of_edge(self):
        out = {}
        for c, es in enumerate(self.classes):
            for e in es:
                out[e] = c
        return out

    def classes_at(self, v):
        return tuple(c for c, (a, b) in enumerate(self.ends) if v in (a, b))

    def other_end(self, c: int, v):
        a, b = self.ends[c]
        if v == a:
            return b
        if v == b:
            return a
        raise GraphError(f"vertex {v!r} not an endpoint of class {c}")


@lru_cache(maxsize=None)
def collapse(g: DualGraph) -> CollapsedGraph:
    groups = {}
    for e, (t, h) in enumerate(g.edges):
        key = tuple(sorted((t, h), key=g.vindex))
        groups.setdefault(key, []).append(e)
    keys = sorted(groups, key=lambda k: (g.vindex(k[0]), g.vindex(k[1])))
    classes = tuple(tuple(groups[k]) for k in keys)
    return CollapsedGraph(g, classes, tuple(keys))


@lru_cache(maxsize=None)
def is_multitree(g: DualGraph) -> bool:
    """True iff collapsing parallel edges yields a tree."""
    require_valid(g)
    return len(collapse(g).classes) == len(g.vertices) - 1


@dataclass(frozen=True)
class Subdivision:
    """Result of subdividing each edge e into n(e) edges.

    ``chain_vertices[e]`` lists the n(e)-1 new vertices over e in order from
    the tail, and ``chain_edges[e]`` the n(e) path edge ids, tail to head.
    """

    graph: DualGraph
    chain_vertices: tuple
    chain_edges: tuple


def subdivide(g: DualGraph, chains: ChainStructure) -> Subdivision:
    require_valid(g)
    vertices = list(g.vertices)
    edges = []
    chain_vertices = []
    chain_edges = []
    for e, (t, h) in enumerate(g.edges):
        n = chains.of(e)
        mids = tuple(f"@{e}.{k}" for k in range(1, n))
        vertices.extend(mids)
        path = (t,) + mids + (h,)
        ids = []
        for a, b in zip(path, path[1:]):
            ids.append(len(edges))
            edges.append((a, b))
        chain_vertices.append(mids)
        chain_edges.append(tuple(ids))
    return Subdivision(DualGraph.make(vertices, edges), tuple(chain_vertices),
                       tuple(chain_edges))
