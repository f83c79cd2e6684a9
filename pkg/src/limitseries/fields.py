"""Exact base fields: the rationals and prime fields F_p.

Every computation in the package is exact; there are no floats anywhere.
Rationals are represented by ``fractions.Fraction`` (arbitrary precision),
prime-field elements by plain ints in ``range(p)``.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import LimitSeriesError


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class RationalField:
    """The field of rational numbers."""

    kind = "Q"
    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / b

    def is_zero(self, a) -> bool:
        return a == 0

    def from_int(self, n: int):
        return Fraction(n)

    def pow(self, a, k: int):
        if k >= 0:
            return Fraction(a) ** k
        return (1 / Fraction(a)) ** (-k)

    def elements(self):
        raise LimitSeriesError("the rationals are infinite; cannot enumerate")

    def format(self, a) -> str:
        a = Fraction(a)
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"

    def parse(self, s):
        if isinstance(s, int):
            return Fraction(s)
        return Fraction(str(s))

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "QQ"


class PrimeField:
    """The prime field F_p, elements stored as ints in range(p)."""

    kind = "Fp"

    def __init__(self, p: int):
        if not _is_prime(p):
            raise LimitSeriesError(f"{p} is not prime")
        self.p = p
        self.zero = 0
        self.one = 1 % p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return (a * self.inv(b)) % self.p

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def from_int(self, n: int):
        return n % self.p

    def pow(self, a, k: int):
        if k >= 0:
            return pow(a, k, self.p)
        return pow(self.inv(a), -k, self.p)

    def elements(self):
        return range(self.p)

    def units(self):
        return range(1, self.p)

    def format(self, a) -> str:
        return str(a % self.p)

    def parse(self, s):
        return int(s) % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"GF({self.p})"


QQ = RationalField()


def field_from_spec(spec):
    """Build a field from its JSON form: "Q" or {"p": 5}."""
    if spec == "Q":
        return QQ
    if isinstance(spec, dict) and "p" in spec:
        return PrimeField(int(spec["p"]))
    if isinstance(spec, int):
        return PrimeField(spec)
    raise LimitSeriesError(f"unrecognized field spec: {spec!r}")


def field_to_spec(field):
    if isinstance(field, RationalField):
        return "Q"
    return {"p": field.p}
