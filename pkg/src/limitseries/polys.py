"""Exact univariate polynomials and local (Taylor) expansion coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import LimitSeriesError


def trim(coeffs, field):
    out = list(coeffs)
    while out and field.is_zero(out[-1]):
        out.pop()
    return out


@dataclass(frozen=True)
class Poly:
    """Univariate polynomial; coefficients low degree first, no trailing zeros."""

    field: object
    coeffs: tuple

    @staticmethod
    def make(field, coeffs):
        return Poly(field, tuple(trim(coeffs, field)))

    @staticmethod
    def zero(field):
        return Poly(field, ())

    @staticmethod
    def const(field, c):
        return Poly.make(field, [c])

    @staticmethod
    def x(field):
        return Poly(field, (field.zero, field.one))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        f = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for i in range(n):
            a = self.coeffs[i] if i < len(self.coeffs) else f.zero
            b = other.coeffs[i] if i < len(other.coeffs) else f.zero
            out.append(f.add(a, b))
        return Poly.make(f, out)

    def __neg__(self):
        f = self.field
        return Poly(f, tuple(f.neg(c) for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        f = self.field
        if self.is_zero() or other.is_zero():
            return Poly.zero(f)
        out = [f.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if f.is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = f.add(out[i + j], f.mul(a, b))
        return Poly(f, tuple(out))

    def scale(self, c):
        f = self.field
        if f.is_zero(c):
            return Poly.zero(f)
        return Poly(f, tuple(f.mul(c, a) for a in self.coeffs))

    def __call__(self, point):
        return eval_coeffs(self.coeffs, point, self.field)


def eval_coeffs(coeffs, point, field):
    acc = field.zero
    for c in reversed(coeffs):
        acc = field.add(field.mul(acc, point), c)
    return acc


def synthetic_divide(coeffs, point, field):
    """Divide by (x - point): returns (quotient coeffs, remainder)."""
    if not coeffs:
        return [], field.zero
    q = [field.zero] * (len(coeffs) - 1)
    carry = field.zero
    for i in range(len(coeffs) - 1, 0, -1):
        carry = field.add(coeffs[i], field.mul(point, carry))
        q[i - 1] = carry
    rem = field.add(coeffs[0], field.mul(point, carry if len(coeffs) > 1 else field.zero))
    if len(coeffs) == 1:
        rem = coeffs[0]
    return q, rem


def taylor_coefficient(f, point, order: int):
    """Coefficient of (x - point)^order in the expansion of f at point.

    Computed by iterated synthetic division, so it is exact in any
    characteristic (no factorials).
    """
    if isinstance(f, Poly):
        field, cur = f.field, list(f.coeffs)
    else:
        raise LimitSeriesError("taylor_coefficient expects a Poly")
    if order < 0:
        return field.zero
    for _ in range(order):
        if not cur:
            return field.zero
        cur, _rem = synthetic_divide(cur, point, field)
    _, rem = synthetic_divide(cur, point, field) if cur else ([], field.zero)
    return rem


def taylor_row(field, size: int, point, order: int):
    """Row of the linear functional p -> [ (x-point)^order ]-coefficient of p,
    acting on polynomials of length ``size`` (degree < size), low-first.

    Uses (x)^i = sum_k C(i,k) point^(i-k) (x-point)^k, valid over any ring.
    """
    row = [field.zero] * size
    if order < 0 or order >= size:
        return row
    pw = field.one
    for i in range(order, size):
        row[i] = field.mul(field.from_int(comb(i, order)), pw)
        pw = field.mul(pw, point)
    return row


def poly_exact_divide(num_coeffs, den_coeffs, field):
    """Exact polynomial division; raises if the remainder is nonzero."""
    num = trim(num_coeffs, field)
    den = trim(den_coeffs, field)
    if not den:
        raise ZeroDivisionError("division by zero polynomial")
    if not num:
        return []
    if len(num) < len(den):
        raise LimitSeriesError("non-exact polynomial division")
    out = [field.zero] * (len(num) - len(den) + 1)
    rem = list(num)
    lead_inv = field.inv(den[-1])
    for i in range(len(out) - 1, -1, -1):
        c = field.mul(rem[i + len(den) - 1], lead_inv)
        out[i] = c
        if not field.is_zero(c):
            for j, d in enumerate(den):
                rem[i + j] = field.sub(rem[i + j], field.mul(c, d))
    if any(not field.is_zero(r) for r in rem):
        raise LimitSeriesError("non-exact polynomial division")
    return out


def product_of_linear(field, points_with_mult):
    """Polynomial prod (x - p)^m for (p, m) pairs, m >= 0."""
    out = Poly.const(field, field.one)
    for p, m in points_with_mult:
        lin = Poly(field, (field.neg(p), field.one))
        for _ in range(m):
            out = out * lin
    return out
