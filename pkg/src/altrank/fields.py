"""Exact scalar arithmetic over prime fields F_p and the rationals.

Elements are plain Python values: canonical residues (``int`` in ``[0, p)``)
for a prime field, ``fractions.Fraction`` in lowest terms for the rationals.
A :class:`FieldCtx` carries the arithmetic; no floating point is used
anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Element = Union[int, Fraction]

_PRIME_CAP = 1 << 31


def is_prime(n: int) -> bool:
    """Deterministic primality test by trial division (adequate below 2^31)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class FieldCtx:
    """Arithmetic context for F_p (``kind == "prime"``) or Q (``kind == "rational"``).

    Prime moduli are capped below 2^31 so products of canonical residues fit
    comfortably in 64-bit intermediates used by the enumeration engine.
    """

    __slots__ = ("kind", "p")

    def __init__(self, kind: str, p: int | None = None):
        if kind == "prime":
            if p is None or not 2 <= p < _PRIME_CAP:
                raise ValueError(f"prime modulus must satisfy 2 <= p < 2^31, got {p}")
            if not is_prime(p):
                raise ValueError(f"modulus {p} is not prime")
        elif kind == "rational":
            if p is not None:
                raise ValueError("rational context takes no modulus")
        else:
            raise ValueError(f"unknown field kind {kind!r}")
        self.kind = kind
        self.p = p

    # -- constructors ------------------------------------------------------

    @staticmethod
    def prime(p: int) -> "FieldCtx":
        return FieldCtx("prime", p)

    @staticmethod
    def rational() -> "FieldCtx":
        return FieldCtx("rational")

    @staticmethod
    def parse(text: str) -> "FieldCtx":
        """Parse ``"Fp:<p>"`` or ``"Q"``."""
        if text == "Q":
            return FieldCtx.rational()
        if text.startswith("Fp:"):
            return FieldCtx.prime(int(text[3:]))
        raise ValueError(f"unrecognized field spec {text!r}")

    # -- identity ----------------------------------------------------------

    @property
    def is_prime_field(self) -> bool:
        return self.kind == "prime"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldCtx) and self.kind == other.kind and self.p == other.p

    def __hash__(self) -> int:
        return hash((self.kind, self.p))

    def __repr__(self) -> str:
        return f"FieldCtx({self.to_str()!r})"

    def to_str(self) -> str:
        return "Q" if self.kind == "rational" else f"Fp:{self.p}"

    def cardinality_at_least(self, m: int) -> bool:
        """True iff the field has at least ``m`` elements."""
        return True if self.kind == "rational" else self.p >= m

    # -- element arithmetic -------------------------------------------------

    def normalize(self, x: Element | str) -> Element:
        """Coerce ``x`` to canonical form (residue in [0, p) or reduced Fraction)."""
        if isinstance(x, str):
            return self.parse_element(x)
        if self.kind == "prime":
            if isinstance(x, Fraction):
                if x.denominator == 1:
                    return x.numerator % self.p
                return self.div(x.numerator % self.p, x.denominator % self.p)
            return int(x) % self.p
        return x if isinstance(x, Fraction) else Fraction(x)

    def zero(self) -> Element:
        return 0 if self.kind == "prime" else Fraction(0)

    def one(self) -> Element:
        return 1 if self.kind == "prime" else Fraction(1)

    def add(self, a: Element, b: Element) -> Element:
        return (a + b) % self.p if self.kind == "prime" else a + b

    def sub(self, a: Element, b: Element) -> Element:
        return (a - b) % self.p if self.kind == "prime" else a - b

    def neg(self, a: Element) -> Element:
        return (-a) % self.p if self.kind == "prime" else -a

    def mul(self, a: Element, b: Element) -> Element:
        return (a * b) % self.p if self.kind == "prime" else a * b

    def inv(self, a: Element) -> Element:
        """Multiplicative inverse; raises ZeroDivisionError on zero input."""
        if self.kind == "prime":
            a = a % self.p
            if a == 0:
                raise ZeroDivisionError("inverse of zero in prime field")
            return pow(a, -1, self.p)
        if a == 0:
            raise ZeroDivisionError("inverse of zero rational")
        return 1 / Fraction(a)

    def div(self, a: Element, b: Element) -> Element:
        return self.mul(a, self.inv(b))

    def is_zero(self, a: Element) -> bool:
        return a == 0

    # -- text encoding -------------------------------------------------------

    def element_to_str(self, a: Element) -> str:
        """Canonical text form: decimal residue, or ``num`` / ``num/den``."""
        if self.kind == "prime":
            return str(a)
        f = Fraction(a)
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"

    def parse_element(self, text: str) -> Element:
        text = text.strip()
        if self.kind == "prime":
            return int(text) % self.p
        if "/" in text:
            num, den = text.split("/")
            return Fraction(int(num), int(den))
        return Fraction(int(text))
