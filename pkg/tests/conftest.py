import random
from fractions import Fraction as Fr

import pytest

from limitseries.curves import CurveInstance
from limitseries.fields import PrimeField, QQ
from limitseries.graphs import ChainStructure, DualGraph
from limitseries.multidegree import ConcentratedTuple, Multidegree, derive_tuple


@pytest.fixture
def f5():
    return PrimeField(5)


@pytest.fixture
def f2():
    return PrimeField(2)


def two_component_instance(field=QQ, m=1, n=1, lams=None, w=(1, 0), mu=None,
                           coords=None, b=None):
    """Convenience builder: Z1 -> Z2 with m parallel edges.

    w is the reference multidegree concentrated at Z1; the Z2 reference is
    derived by pair twisting until concentrated (or b steps if given).
    """
    from limitseries.graphs import collapse
    from limitseries.multidegree import is_concentrated, twist_pair

    graph = DualGraph.make(("Z1", "Z2"), [("Z1", "Z2")] * m)
    ns = [n] * m if isinstance(n, int) else list(n)
    chains = ChainStructure.make(graph, ns)
    if coords is None:
        coords = {}
        for e in range(m):
            coords[(e, "Z1")] = field.from_int(e)
            coords[(e, "Z2")] = field.from_int(e)
    if lams is None:
        lams = [field.one] * m
    w1 = Multidegree.make(graph, chains, w, mu or [0] * m)
    collapsed = collapse(graph)
    cur, steps = w1, 0
    if b is None:
        while not is_concentrated(cur, "Z2")[0]:
            cur = twist_pair(cur, collapsed, 0, "Z1")
            steps += 1
            assert steps < 30
    else:
        for _ in range(b):
            cur = twist_pair(cur, collapsed, 0, "Z1")
        steps = b
    tup = ConcentratedTuple((w1, cur), (steps,), ("Z1",))
    return CurveInstance(field, graph, chains, coords, lams, w1, tup)


def path_instance(field=QQ, weights=(1, 1, 0), lams=None, coords=None):
    """Three-component chain A - B - C with trivial chain structure."""
    graph = DualGraph.make(("A", "B", "C"), [("A", "B"), ("B", "C")])
    chains = ChainStructure.make(graph, 1)
    if coords is None:
        coords = {(0, "A"): field.from_int(0), (0, "B"): field.from_int(0),
                  (1, "B"): field.from_int(1), (1, "C"): field.from_int(0)}
    if lams is None:
        lams = [field.one, field.one]
    w0 = Multidegree.make(graph, chains, weights, [0, 0])
    return CurveInstance(field, graph, chains, coords, lams, w0, derive_tuple(w0))


def rnd(seed):
    return random.Random(seed)


def fr(x):
    return Fr(x)
