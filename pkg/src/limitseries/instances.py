"""Instance and report serialization.

Instance files are JSON; field elements are strings ("num/den" for rationals,
residue strings for prime fields).  Reports are dumped with sorted keys and
fixed separators so identical inputs give byte-identical output.
"""
from __future__ import annotations

import json

from .curves import CurveInstance
from .errors import LimitSeriesError
from .fields import field_from_spec, field_to_spec
from .graphs import ChainStructure, DualGraph
from .multidegree import ConcentratedTuple, Multidegree, derive_tuple
from .series import LLSCandidate

SCHEMA = "limitseries-instance/1"
REPORT_SCHEMA = "limitseries-report/1"


def multidegree_to_json(md: Multidegree):
    return {
        "vertex_weights": {v: md.w[i] for i, v in enumerate(md.graph.vertices)},
        "mu": list(md.mu),
    }


def multidegree_from_json(graph, chains, data) -> Multidegree:
    ws = data["vertex_weights"]
    w = [int(ws[v]) for v in graph.vertices]
    mu = [int(x) for x in data.get("mu", [0] * len(graph.edges))]
    return Multidegree.make(graph, chains, w, mu)


def instance_to_json(inst: CurveInstance, candidates=None):
    f = inst.field
    edges = []
    for e, (t, h) in enumerate(inst.graph.edges):
        edges.append({
            "tail": t,
            "head": h,
            "n": inst.chains.of(e),
            "p_tail": f.format(inst.node_coords[(e, t)]),
            "p_head": f.format(inst.node_coords[(e, h)]),
            "lambda": f.format(inst.lambdas[e]),
        })
    data = {
        "schema": SCHEMA,
        "field": field_to_spec(f),
        "vertices": list(inst.graph.vertices),
        "edges": edges,
        "w0": multidegree_to_json(inst.w0),
        "tuple": {
            "wv": [multidegree_to_json(w) for w in inst.ctuple.wv],
            "b": list(inst.ctuple.b),
            "direction": list(inst.ctuple.direction),
        },
    }
    if candidates:
        data["candidates"] = [candidate_to_json(inst, c) for c in candidates]
    return data


def candidate_to_json(inst: CurveInstance, cand: LLSCandidate):
    f = inst.field
    return {
        "r": cand.r,
        "V": {v: [[f.format(x) for x in row] for row in rows]
              for v, rows in cand.V.items()},
    }


def candidate_from_json(inst: CurveInstance, data) -> LLSCandidate:
    f = inst.field
    V = {v: [[f.parse(x) for x in row] for row in rows]
         for v, rows in data["V"].items()}
    return LLSCandidate(int(data["r"]), V)


def instance_from_json(data, check=True):
    if data.get("schema", SCHEMA) != SCHEMA:
        raise LimitSeriesError(f"unsupported schema {data.get('schema')!r}")
    f = field_from_spec(data["field"])
    vertices = list(data["vertices"])
    raw_edges = data["edges"]
    graph = DualGraph.make(vertices, [(e["tail"], e["head"]) for e in raw_edges])
    chains = ChainStructure.make(graph, [int(e.get("n", 1)) for e in raw_edges])
    coords = {}
    lambdas = []
    for i, e in enumerate(raw_edges):
        coords[(i, e["tail"])] = f.parse(e["p_tail"])
        coords[(i, e["head"])] = f.parse(e["p_head"])
        lambdas.append(f.parse(e.get("lambda", 1)))
    w0 = multidegree_from_json(graph, chains, data["w0"])
    ctuple = None
    if "tuple" in data:
        t = data["tuple"]
        wv = tuple(multidegree_from_json(graph, chains, x) for x in t["wv"])
        ctuple = ConcentratedTuple(wv, tuple(int(x) for x in t.get("b", [])),
                                   tuple(t.get("direction", [])))
    inst = CurveInstance(f, graph, chains, coords, lambdas, w0, ctuple, check=check)
    cands = [candidate_from_json(inst, c) for c in data.get("candidates", [])]
    return inst, cands


def load_instance(path, check=True):
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_json(json.load(fh), check=check)


def dump_report(data) -> str:
    """Deterministic JSON text for reports."""
    return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"
