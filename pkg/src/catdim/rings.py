"""Exact coefficient rings: the rationals, prime fields F_p, and the integers.

A Ring value carries the arithmetic for scalars stored as plain Python
objects: Fraction for Q, int residues in [0, p) for F_p, and int for Z.
No floating point is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError

Q_KIND = "Q"
FP_KIND = "Fp"
Z_KIND = "Z"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Ring:
    """One of Q, F_p (p prime), or Z, with exact scalar arithmetic."""

    kind: str
    p: int = 0

    def __post_init__(self):
        if self.kind not in (Q_KIND, FP_KIND, Z_KIND):
            raise InputError(f"unknown ring kind {self.kind!r}")
        if self.kind == FP_KIND and not _is_prime(self.p):
            raise InputError(f"modulus {self.p} is not prime")

    # -- basic structure ---------------------------------------------------

    @property
    def is_field(self) -> bool:
        return self.kind in (Q_KIND, FP_KIND)

    def zero(self):
        return Fraction(0) if self.kind == Q_KIND else 0

    def one(self):
        return Fraction(1) if self.kind == Q_KIND else (1 % self.p if self.kind == FP_KIND else 1)

    def from_int(self, n: int):
        if self.kind == Q_KIND:
            return Fraction(n)
        if self.kind == FP_KIND:
            return n % self.p
        return n

    # -- arithmetic --------------------------------------------------------

    def add(self, a, b):
        return (a + b) % self.p if self.kind == FP_KIND else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.kind == FP_KIND else a - b

    def neg(self, a):
        return (-a) % self.p if self.kind == FP_KIND else -a

    def mul(self, a, b):
        return (a * b) % self.p if self.kind == FP_KIND else a * b

    def inv(self, a):
        if self.kind == FP_KIND:
            if a % self.p == 0:
                raise ZeroDivisionError("inverse of zero residue")
            return pow(a, -1, self.p)
        if self.kind == Q_KIND:
            return Fraction(1) / a
        if a in (1, -1):
            return a
        raise InputError("only units +-1 are invertible over Z")

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def divides(self, a, b) -> bool:
        """Whether a | b in the ring (always true for nonzero a over a field)."""
        if self.kind == Z_KIND:
            return a != 0 and b % a == 0
        return a != 0 or b == 0

    def exact_div(self, a, b):
        """b / a, assuming divisibility."""
        if self.kind == Z_KIND:
            return b // a
        return self.div(b, a)

    # -- parsing / printing ------------------------------------------------

    def parse(self, text):
        """Parse a scalar from its JSON string (or int) form."""
        if self.kind == FP_KIND:
            return int(text) % self.p
        if self.kind == Z_KIND:
            return int(text)
        return Fraction(str(text))

    def format(self, a) -> str:
        if self.kind == Q_KIND:
            f = Fraction(a)
            return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
        return str(a)

    # -- ring naming -------------------------------------------------------

    @property
    def name(self) -> str:
        return f"Fp:{self.p}" if self.kind == FP_KIND else self.kind

    def __repr__(self):
        return f"Ring({self.name})"


QQ = Ring(Q_KIND)
ZZ = Ring(Z_KIND)


def GF(p: int) -> Ring:
    return Ring(FP_KIND, p)


def ring_from_name(name: str) -> Ring:
    """Parse 'Q' | 'Z' | 'Fp:<p>' as used in JSON files and CLI flags."""
    if name == "Q":
        return QQ
    if name == "Z":
        return ZZ
    if name.startswith("Fp:"):
        try:
            p = int(name[3:])
        except ValueError:
            raise InputError(f"bad prime in ring name {name!r}") from None
        return GF(p)
    raise InputError(f"unknown ring name {name!r} (expected Q, Z, or Fp:<p>)")
