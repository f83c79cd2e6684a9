"""Dense exact linear algebra: reduced echelon forms, kernels, subspace ops.

All routines work on lists of row vectors over one of the fields from
:mod:`limitseries.fields`.  Outputs are normalized to reduced echelon form
(leading entry 1, pivot columns cleared) so that bases are deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import LimitSeriesError


@dataclass(frozen=True)
class Matrix:
    """A rectangular matrix over a single field."""

    field: object
    entries: tuple

    def __post_init__(self):
        widths = {len(r) for r in self.entries}
        if len(widths) > 1:
            raise LimitSeriesError("matrix rows have unequal lengths")

    @staticmethod
    def make(field, rows):
        return Matrix(field, tuple(tuple(r) for r in rows))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def row_list(self):
        return [list(r) for r in self.entries]


def _as_rows(m):
    if isinstance(m, Matrix):
        return m.row_list(), m.field
    raise LimitSeriesError("expected a Matrix; use the raw-row helpers otherwise")


def rref(rows, field):
    """Reduced row echelon form. Returns (new rows, pivot column list)."""
    work = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(work[0]) if work else 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(work)):
            if not field.is_zero(work[i][c]):
                pr = i
                break
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = field.inv(work[r][c])
        work[r] = [field.mul(inv, x) for x in work[r]]
        prow = work[r]
        for i in range(len(work)):
            if i != r:
                f = work[i][c]
                if not field.is_zero(f):
                    row = work[i]
                    work[i] = [field.sub(row[j], field.mul(f, prow[j])) for j in range(ncols)]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return work, pivots


def row_basis(rows, field):
    """Canonical (reduced echelon) basis of the row span."""
    work, pivots = rref(rows, field)
    return [tuple(work[i]) for i in range(len(pivots))]


def rank(rows, field) -> int:
    _, pivots = rref(rows, field)
    return len(pivots)


def rank_and_kernel(m, field=None):
    """Rank and a reduced-echelon basis of the right kernel {x : M x = 0}.

    Accepts a Matrix or raw rows (with the field passed explicitly).
    """
    if isinstance(m, Matrix):
        rows, field = m.row_list(), m.field
        ncols = m.cols
    else:
        rows = [list(r) for r in m]
        ncols = len(rows[0]) if rows else 0
        if field is None:
            raise LimitSeriesError("field required with raw rows")
    if ncols == 0:
        return 0, []
    red, pivots = rref(rows, field)
    rk = len(pivots)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    kernel = []
    for j in free:
        vec = [field.zero] * ncols
        vec[j] = field.one
        for i, c in enumerate(pivots):
            vec[c] = field.neg(red[i][j])
        kernel.append(vec)
    kernel = row_basis(kernel, field)
    return rk, kernel


def identity(n, field):
    return [
        [field.one if i == j else field.zero for j in range(n)]
        for i in range(n)
    ]


def zeros(nrows, ncols, field):
    return [[field.zero] * ncols for _ in range(nrows)]


def mat_mul(a, b, field):
    """Product of two matrices given as lists of rows."""
    if not a:
        return []
    inner = len(a[0])
    if inner != len(b):
        raise LimitSeriesError("shape mismatch in mat_mul")
    ncols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [field.zero] * ncols
        for k, x in enumerate(row):
            if field.is_zero(x):
                continue
            brow = b[k]
            for j in range(ncols):
                acc[j] = field.add(acc[j], field.mul(x, brow[j]))
        out.append(acc)
    return out


def mat_vec(a, x, field):
    out = []
    for row in a:
        s = field.zero
        for c, v in zip(row, x):
            if not field.is_zero(c) and not field.is_zero(v):
                s = field.add(s, field.mul(c, v))
        out.append(s)
    return out


def dot(u, v, field):
    s = field.zero
    for a, b in zip(u, v):
        if not field.is_zero(a) and not field.is_zero(b):
            s = field.add(s, field.mul(a, b))
    return s


def transpose(rows):
    if not rows:
        return []
    return [list(col) for col in zip(*rows)]


def subspace_intersect(a, b, field):
    """Reduced-echelon basis of span(a) ∩ span(b).

    Solves alpha·A = beta·B: the coefficient pairs form the kernel of the
    stacked transpose system, and the intersection vectors are read off the
    A side.
    """
    a = [list(r) for r in a]
    b = [list(r) for r in b]
    if not a or not b:
        return []
    n = len(a[0])
    if any(len(r) != n for r in b):
        raise LimitSeriesError("ambient dimension mismatch")
    ka, kb = len(a), len(b)
    system = []
    for c in range(n):
        row = [a[i][c] for i in range(ka)] + [field.neg(b[j][c]) for j in range(kb)]
        system.append(row)
    _, ker = rank_and_kernel(system, field)
    vectors = []
    for coeffs in ker:
        vec = [field.zero] * n
        for i in range(ka):
            if field.is_zero(coeffs[i]):
                continue
            for c in range(n):
                vec[c] = field.add(vec[c], field.mul(coeffs[i], a[i][c]))
        vectors.append(vec)
    return row_basis(vectors, field)


def annihilator(rows, ambient, field):
    """Basis of {q : v·q = 0 for all v in span(rows)} in the given ambient dim."""
    if not rows:
        return [tuple(r) for r in identity(ambient, field)]
    _, ker = rank_and_kernel(rows, field)
    return ker


def in_span(rows, vec, field) -> bool:
    base = row_basis(rows, field)
    return rank(base + [list(vec)], field) == len(base)


def solve_coords(basis_rows, vec, field):
    """Coordinates of vec in terms of basis_rows, or None if not in the span."""
    if not basis_rows:
        return None if any(not field.is_zero(x) for x in vec) else []
    n = len(basis_rows[0])
    k = len(basis_rows)
    aug = []
    for c in range(n):
        aug.append([basis_rows[i][c] for i in range(k)] + [vec[c]])
    red, pivots = rref(aug, field)
    # inconsistent iff a pivot lands in the augmented column
    if k in pivots:
        return None
    sol = [field.zero] * k
    for i, c in enumerate(pivots):
        sol[c] = red[i][k]
    return sol
