"""Exact arithmetic in quadratic local algebras over Q_p at finite precision.

An algebra is one of three quadratic completions of an imaginary quadratic
field at an odd prime p (split, inert, ramified), plus the degenerate
rank-one algebra Q_p itself which the epsilon-factor code needs for base
field Gauss sums.  Elements are stored as coordinate pairs on the basis
(1, omega) with omega = sqrt(-D), together with an explicit power of the
uniformizer, so negative-valuation elements keep an exact fractional trace.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import product

from .qmodz import QmodZ


class PrecisionError(ArithmeticError):
    """The stored precision cannot certify the requested digits."""


class Kind(Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"
    BASE = "base"  # Q_p itself; internal, not accepted by make_algebra

    @classmethod
    def parse(cls, text: str) -> "Kind":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown decomposition kind {text!r}")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def legendre(a: int, p: int) -> int:
    """Quadratic residue symbol (a|p) in {+1, -1, 0} for odd prime p."""
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


@dataclass(frozen=True)
class QuadraticLocalAlgebra:
    p: int
    kind: Kind
    D: int
    precision: int  # elements are known modulo pi^precision

    @property
    def ramification(self) -> int:
        return 2 if self.kind is Kind.RAMIFIED else 1

    @property
    def coord_modulus(self) -> int:
        e = self.ramification
        return self.p ** ((self.precision + e - 1) // e)

    @property
    def coord_digits(self) -> int:
        e = self.ramification
        return (self.precision + e - 1) // e

    @property
    def residue_size(self) -> int:
        """q = size of the residue field (per component for split)."""
        return self.p * self.p if self.kind is Kind.INERT else self.p

    @property
    def D_prime(self) -> int:
        # unit cofactor of the uniformizer square: D = p * D_prime
        return self.D // self.p

    @property
    def m_star(self) -> int:
        """Valuation of the different over Q_p (pins the canonical psi)."""
        return 1 if self.kind is Kind.RAMIFIED else 0

    def zero(self) -> "RingElt":
        return RingElt(self, 0, 0)

    def one(self) -> "RingElt":
        return RingElt(self, 1, 1 if self.kind is Kind.SPLIT else 0)

    def from_int(self, a: int) -> "RingElt":
        if self.kind is Kind.SPLIT:
            return RingElt(self, a, a)
        return RingElt(self, a, 0)

    def omega(self) -> "RingElt":
        if self.kind not in (Kind.INERT, Kind.RAMIFIED):
            raise ValueError("omega = sqrt(-D) only lives in a quadratic basis")
        return RingElt(self, 0, 1)

    def uniformizer(self) -> "RingElt":
        if self.kind is Kind.RAMIFIED:
            return self.omega()
        return self.from_int(self.p)


def make_algebra(p: int, kind: Kind, D: int, precision: int) -> QuadraticLocalAlgebra:
    """Validated quadratic local algebra; rejects inconsistent decomposition data."""
    if not isinstance(kind, Kind):
        kind = Kind.parse(kind)
    if p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if precision < 1:
        raise ValueError("precision must be positive")
    if D <= 0:
        raise ValueError("D must be a positive integer")
    if kind is Kind.INERT:
        if D % p == 0 or legendre(-D, p) != -1:
            raise ValueError(
                f"inconsistent decomposition data: -{D} is not a non-residue mod {p}")
    elif kind is Kind.RAMIFIED:
        if D % p != 0 or (D // p) % p == 0:
            raise ValueError(
                f"inconsistent decomposition data: v_{p}({D}) != 1")
    elif kind is Kind.SPLIT:
        if D % p == 0 or legendre(-D, p) != 1:
            raise ValueError(
                f"inconsistent decomposition data: -{D} is not a nonzero residue mod {p}")
    else:
        raise ValueError("make_algebra only builds split/inert/ramified algebras")
    return QuadraticLocalAlgebra(p, kind, D, precision)


def base_algebra(p: int, precision: int) -> QuadraticLocalAlgebra:
    """The rank-one algebra Q_p itself (for base field epsilon factors)."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    return QuadraticLocalAlgebra(p, Kind.BASE, 0, precision)


def default_discriminant(p: int, kind: Kind) -> int:
    """Smallest D compatible with the decomposition kind."""
    if kind is Kind.RAMIFIED:
        return p
    want = -1 if kind is Kind.INERT else 1
    for D in range(1, 4 * p):
        if D % p and legendre(-D, p) == want:
            return D
    raise ValueError("no discriminant found")  # unreachable for odd primes


class RingElt:
    """x = (a + b*omega) * pi^v, coordinates modulo the algebra's p-power.

    `prec` counts pi-adic digits the coordinates are good for; it only
    drops when a power of pi is divided out.
    """

    __slots__ = ("alg", "a", "b", "v", "prec")

    def __init__(self, alg: QuadraticLocalAlgebra, a: int, b: int,
                 v: int = 0, prec: int | None = None):
        M = alg.coord_modulus
        self.alg = alg
        self.a = a % M
        self.b = b % M
        self.v = v
        self.prec = alg.precision if prec is None else prec

    # -- basic ring structure -------------------------------------------------

    def _check(self, other: "RingElt"):
        if self.alg != other.alg:
            raise ValueError("elements live in different algebras")

    def __mul__(self, other: "RingElt") -> "RingElt":
        self._check(other)
        alg = self.alg
        if alg.kind is Kind.SPLIT:
            a, b = self.a * other.a, self.b * other.b
        elif alg.kind is Kind.BASE:
            a, b = self.a * other.a, 0
        else:  # omega^2 = -D
            a = self.a * other.a - alg.D * self.b * other.b
            b = self.a * other.b + self.b * other.a
        return RingElt(alg, a, b, self.v + other.v, min(self.prec, other.prec))

    def __add__(self, other: "RingElt") -> "RingElt":
        self._check(other)
        x, y = self, other
        if x.v > y.v:
            x, y = y, x
        shift = y.v - x.v
        a, b = y.a, y.b
        for _ in range(shift):
            a, b = _pi_times(self.alg, a, b)
        return RingElt(self.alg, x.a + a, x.b + b, x.v,
                       min(x.prec, y.prec))

    def __neg__(self) -> "RingElt":
        return RingElt(self.alg, -self.a, -self.b, self.v, self.prec)

    def __sub__(self, other: "RingElt") -> "RingElt":
        return self + (-other)

    def conj(self) -> "RingElt":
        alg = self.alg
        if alg.kind is Kind.SPLIT:
            return RingElt(alg, self.b, self.a, self.v, self.prec)
        if alg.kind is Kind.BASE:
            return self
        # conjugation flips omega; pi^v picks up (-1)^v in the ramified case
        sign = -1 if (alg.kind is Kind.RAMIFIED and self.v % 2) else 1
        return RingElt(alg, sign * self.a, -sign * self.b, self.v, self.prec)

    def trace(self) -> "RingElt":
        return self + self.conj()

    def norm(self) -> "RingElt":
        if self.alg.kind is Kind.BASE:
            return self
        return self * self.conj()

    def inv(self) -> "RingElt":
        v, u = self.unit_decomposition()
        alg = self.alg
        M = alg.coord_modulus
        if alg.kind in (Kind.SPLIT, Kind.BASE):
            a = pow(u.a, -1, M)
            b = pow(u.b, -1, M) if alg.kind is Kind.SPLIT else 0
            return RingElt(alg, a, b, -v, u.prec)
        nm = (u.a * u.a + alg.D * u.b * u.b) % M
        inm = pow(nm, -1, M)
        return RingElt(alg, u.a * inm, -u.b * inm, -v, u.prec)

    def __pow__(self, e: int) -> "RingElt":
        if e < 0:
            return self.inv() ** (-e)
        alg = self.alg
        if alg.kind in (Kind.SPLIT, Kind.BASE):
            M = alg.coord_modulus
            b = pow(self.b, e, M) if alg.kind is Kind.SPLIT else 0
            return RingElt(alg, pow(self.a, e, M), b, self.v * e, self.prec)
        result = RingElt(alg, 1, 0, 0, self.prec)
        base = self
        n = e
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- valuation and normal form --------------------------------------------

    def _coord_pi_val(self) -> int:
        """pi-valuation of the integral part, capped by precision."""
        alg, p = self.alg, self.alg.p
        if self.a == 0 and self.b == 0:
            raise PrecisionError("element indistinguishable from 0 at this precision")
        va = _p_val(self.a, p, alg.coord_digits)
        vb = _p_val(self.b, p, alg.coord_digits)
        if alg.kind is Kind.RAMIFIED:
            return min(2 * va, 1 + 2 * vb)
        if alg.kind is Kind.BASE:
            return va
        return min(va, vb)

    def valuation(self) -> int:
        return self.v + self._coord_pi_val()

    def _coords_are_unit(self, a: int, b: int) -> bool:
        p = self.alg.p
        if self.alg.kind is Kind.SPLIT:
            return a % p != 0 and b % p != 0
        if self.alg.kind is Kind.BASE:
            return a % p != 0
        if self.alg.kind is Kind.RAMIFIED:
            return a % p != 0
        return a % p != 0 or b % p != 0

    def is_unit(self) -> bool:
        try:
            v, u = self.unit_decomposition()
        except (PrecisionError, ValueError):
            return False
        return v == 0

    def unit_decomposition(self) -> tuple[int, "RingElt"]:
        """Write self = pi^v * u with u a unit; may cost pi-adic digits."""
        alg = self.alg
        w = self._coord_pi_val()
        a, b, prec = self.a, self.b, self.prec
        p = alg.p
        for _ in range(w):
            if prec <= 1:
                raise PrecisionError("cannot strip pi: precision exhausted")
            if alg.kind is Kind.RAMIFIED:
                # (a + b*omega)/omega = b - (a/D)*omega, with D = p*D'
                mod = alg.coord_modulus // p
                na = b % mod
                nb = (-(a // p) * pow(alg.D_prime, -1, mod)) % mod
                a, b = na, nb
            else:
                a //= p
                b //= p
            prec -= 1
        if not self._coords_are_unit(a, b):
            raise ValueError("element is not a unit times a power of pi")
        return self.v + w, RingElt(alg, a, b, 0, prec)

    def unit_key(self, f: int) -> tuple[int, int]:
        """Canonical coordinates of the class of a unit in (O/pi^f)^x."""
        if self.v != 0:
            raise ValueError("unit_key needs an integral representative (v = 0)")
        if f > self.prec:
            raise PrecisionError(f"class mod pi^{f} exceeds precision {self.prec}")
        m1, m2 = _class_moduli(self.alg, f)
        return (self.a % m1, self.b % m2)

    def __eq__(self, other) -> bool:
        # equality as far as the coarser precision can tell
        if not isinstance(other, RingElt) or self.alg != other.alg:
            return NotImplemented
        diff = self - other
        if diff.a == 0 and diff.b == 0:
            return True
        cutoff = min(self.v + self.prec, other.v + other.prec)
        try:
            return diff.valuation() >= cutoff
        except PrecisionError:
            return True

    def components(self) -> tuple["RingElt", "RingElt"]:
        """The two projections of a split element onto its Q_p factors."""
        if self.alg.kind is not Kind.SPLIT:
            raise ValueError("only split algebras project onto two factors")
        base = base_algebra(self.alg.p, self.alg.precision)
        return (RingElt(base, self.a, 0, self.v, self.prec),
                RingElt(base, self.b, 0, self.v, self.prec))

    def debug_dump(self) -> dict:
        """JSON-ready dump with decimal strings for the residues."""
        return {"a": str(self.a), "b": str(self.b), "pi_power": self.v,
                "precision": self.prec, "p": self.alg.p,
                "kind": self.alg.kind.value}

    def __repr__(self) -> str:
        s = f"({self.a} + {self.b}w)"
        if self.v:
            s += f"*pi^{self.v}"
        return s


def _p_val(a: int, p: int, cap: int) -> int:
    if a == 0:
        return cap * 2  # effectively infinity at this precision
    v = 0
    while a % p == 0 and v < cap:
        a //= p
        v += 1
    return v


def _pi_times(alg: QuadraticLocalAlgebra, a: int, b: int) -> tuple[int, int]:
    if alg.kind is Kind.RAMIFIED:
        return (-alg.D * b) % alg.coord_modulus, a
    return a * alg.p, b * alg.p


def _class_moduli(alg: QuadraticLocalAlgebra, f: int) -> tuple[int, int]:
    p = alg.p
    if alg.kind is Kind.RAMIFIED:
        return p ** ((f + 1) // 2), p ** (f // 2)
    return p ** f, p ** f


def unit_count(alg: QuadraticLocalAlgebra, f: int) -> int:
    """Closed-form order of (O/pi^f)^x."""
    p = alg.p
    if f == 0:
        return 1
    if alg.kind is Kind.INERT:
        return p ** (2 * (f - 1)) * (p * p - 1)
    if alg.kind is Kind.SPLIT:
        return ((p - 1) * p ** (f - 1)) ** 2
    return (p - 1) * p ** (f - 1)  # ramified and base


def unit_class_coords(alg: QuadraticLocalAlgebra, f: int):
    """Raw canonical coordinates of the classes of (O/pi^f)^x, each once."""
    if not 1 <= f <= alg.precision:
        raise ValueError(f"need 1 <= f <= precision, got f={f}")
    p = alg.p
    m1, m2 = _class_moduli(alg, f)
    if alg.kind is Kind.SPLIT:
        for a in range(m1):
            if a % p:
                for b in range(m2):
                    if b % p:
                        yield (a, b)
    elif alg.kind is Kind.INERT:
        for a, b in product(range(m1), range(m2)):
            if a % p or b % p:
                yield (a, b)
    elif alg.kind is Kind.BASE:
        for a in range(m1):
            if a % p:
                yield (a, 0)
    else:  # ramified: unit iff the 1-coordinate is a unit
        for a in range(m1):
            if a % p:
                for b in range(m2):
                    yield (a, b)


def enumerate_units(alg: QuadraticLocalAlgebra, f: int):
    """Representatives of (O/pi^f)^x as ring elements, each class once."""
    for a, b in unit_class_coords(alg, f):
        yield RingElt(alg, a, b)


def fractional_trace(x: RingElt) -> QmodZ:
    """{tr(x)} in Q/Z, exact, with denominator a power of p.

    Uses the stored integer coordinates directly: the identities below hold
    for the exact rational lift, so no pi-division is ever performed.
    """
    alg = x.alg
    p = alg.p
    if alg.kind is Kind.RAMIFIED:
        if x.v % 2 == 0:
            t = -(x.v // 2)
            scalar = 2 * x.a
        else:
            t = -((x.v + 1) // 2)
            scalar = 2 * x.b
        if t <= 0:
            return QmodZ(0)
        if 2 * t > x.prec:
            raise PrecisionError("fractional trace needs more pi-adic digits")
        pt = p ** t
        u = pow(pow(alg.D_prime, t, pt), -1, pt)
        num = scalar * ((-1) ** t) * u
        return QmodZ(num % pt, pt)
    if alg.kind is Kind.INERT:
        scalar = 2 * x.a
    elif alg.kind is Kind.SPLIT:
        scalar = x.a + x.b
    else:
        scalar = x.a  # tr on Q_p is the identity
    t = -x.v
    if t <= 0:
        return QmodZ(0)
    if t > x.prec:
        raise PrecisionError("fractional trace needs more pi-adic digits")
    pt = p ** t
    return QmodZ(scalar % pt, pt)
