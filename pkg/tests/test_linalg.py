"""Exact linear algebra: frozen examples plus randomized invariants.

Expected values for the derived cases are computed by independent brute
force (enumerating the whole space over a small prime field) and frozen.
"""
from fractions import Fraction as Fr
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from limitseries.fields import PrimeField, QQ
from limitseries.linalg import (Matrix, annihilator, identity, rank,
                                rank_and_kernel, row_basis, solve_coords,
                                subspace_intersect)

F5 = PrimeField(5)


def brute_kernel(rows, field):
    """Oracle: enumerate all vectors and keep those annihilated by the matrix."""
    n = len(rows[0])
    out = []
    for vec in product(list(field.elements()), repeat=n):
        if all(field.is_zero(
                sum(field.mul(a, b) for a, b in zip(r, vec)) % field.p)
               for r in rows):
            out.append(vec)
    return out


def spans_same(a, b, field):
    a = row_basis([list(r) for r in a], field)
    b = row_basis([list(r) for r in b], field)
    return a == b


def test_identity_full_rank():
    m = Matrix.make(QQ, identity(3, QQ))
    rk, ker = rank_and_kernel(m)
    assert rk == 3
    assert ker == []


def test_zero_matrix_kernel():
    m = Matrix.make(QQ, [[Fr(0)] * 3 for _ in range(2)])
    rk, ker = rank_and_kernel(m)
    assert rk == 0
    assert len(ker) == 3


def test_f5_rank_one_kernel_matches_brute_force():
    rows = [[1, 2], [2, 4]]
    rk, ker = rank_and_kernel(rows, F5)
    assert rk == 1
    # oracle: all vectors in F5^2 killed by the matrix
    brute = [v for v in brute_kernel(rows, F5) if any(v)]
    assert len(ker) == 1
    # span{(2,-1)} = span{(2,4)}: check the echelon representative lies in it
    assert tuple(ker[0]) in brute
    assert ker[0][0] == 1  # echelon normalized


def test_kernel_is_reduced_echelon():
    from limitseries.linalg import rref
    rows = [[1, 2, 3, 4]]
    _, ker = rank_and_kernel(rows, F5)
    assert len(ker) == 3
    red, pivots = rref([list(k) for k in ker], F5)
    assert [list(k) for k in ker] == red[:len(pivots)]


def test_intersect_same_line():
    e1 = [Fr(1), Fr(0)]
    out = subspace_intersect([e1], [e1], QQ)
    assert out == [(Fr(1), Fr(0))]


def test_intersect_transverse_lines_empty():
    out = subspace_intersect([[Fr(1), Fr(0)]], [[Fr(0), Fr(1)]], QQ)
    assert out == []


def test_intersect_planes_give_line():
    e1, e2, e3 = [Fr(1), Fr(0), Fr(0)], [Fr(0), Fr(1), Fr(0)], [Fr(0), Fr(0), Fr(1)]
    out = subspace_intersect([e1, e2], [e2, e3], QQ)
    assert out == [(Fr(0), Fr(1), Fr(0))]


def test_intersect_brute_force_f2():
    field = PrimeField(2)
    a = [[1, 1, 0], [0, 0, 1]]
    b = [[1, 1, 1]]
    got = subspace_intersect(a, b, field)
    # oracle: enumerate both spans and intersect as sets
    def span(rows):
        out = set()
        for coeffs in product((0, 1), repeat=len(rows)):
            v = tuple(sum(c * r[i] for c, r in zip(coeffs, rows)) % 2
                      for i in range(3))
            out.add(v)
        return out
    expect = span(a) & span(b)
    assert span(got) if got else {(0, 0, 0)} == expect
    assert span(got if got else []) | {(0, 0, 0)} == expect


@given(st.integers(1, 4), st.integers(1, 4), st.data())
@settings(max_examples=60, deadline=None)
def test_rank_nullity_random(nrows, ncols, data):
    rows = [[data.draw(st.integers(0, 4)) for _ in range(ncols)]
            for _ in range(nrows)]
    rk, ker = rank_and_kernel(rows, F5)
    assert rk + len(ker) == ncols
    for vec in ker:
        for r in rows:
            assert sum(a * b for a, b in zip(r, vec)) % 5 == 0


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_intersection_symmetric_idempotent_dimensions(data):
    n = data.draw(st.integers(1, 4))
    a = [[data.draw(st.integers(0, 4)) for _ in range(n)]
         for _ in range(data.draw(st.integers(1, 3)))]
    b = [[data.draw(st.integers(0, 4)) for _ in range(n)]
         for _ in range(data.draw(st.integers(1, 3)))]
    ab = subspace_intersect(a, b, F5)
    ba = subspace_intersect(b, a, F5)
    assert ab == ba
    assert subspace_intersect(ab, ab, F5) == row_basis([list(r) for r in ab], F5)
    dim_sum = rank([list(r) for r in a] + [list(r) for r in b], F5)
    assert len(ab) == rank(a, F5) + rank(b, F5) - dim_sum


def test_annihilator_pairing():
    rows = [[Fr(1), Fr(2), Fr(0)]]
    ann = annihilator(rows, 3, QQ)
    assert len(ann) == 2
    for q in ann:
        assert sum(a * b for a, b in zip(rows[0], q)) == 0


def test_solve_coords():
    basis = [[Fr(1), Fr(0)], [Fr(1), Fr(1)]]
    assert solve_coords(basis, [Fr(3), Fr(2)], QQ) == [Fr(1), Fr(2)]
    assert solve_coords([[Fr(1), Fr(0)]], [Fr(0), Fr(1)], QQ) is None


def test_matrix_rejects_ragged():
    with pytest.raises(Exception):
        Matrix.make(QQ, [[Fr(1)], [Fr(1), Fr(2)]])
