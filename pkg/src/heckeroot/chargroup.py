"""Structure and characters of the finite unit quotients (O/pi^f)^x.

The cyclic basis is found by a greedy maximal-order search over the full
enumeration, one Sylow subgroup at a time, and is verified to be a direct
product by rebuilding the whole discrete-log table from it.  Characters
take values in Q/Z and carry their exact conductor.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import product
from math import gcd

from .qmodz import QmodZ, ZERO, HALF
from .quadring import (Kind, QuadraticLocalAlgebra, RingElt,
                       _class_moduli, fractional_trace, legendre,
                       unit_class_coords, unit_count)


class Constraint(Enum):
    """Allowed restrictions of a unit character to the image of Z_p^x."""
    NONE = "none"
    RESTRICTS_TO_KAPPA = "restricts-to-kappa"
    RESTRICTS_TO_TRIVIAL = "restricts-to-trivial"


# ---------------------------------------------------------------------------
# class-key arithmetic: canonical coordinate tuples for (O/pi^f)^x

def _key_ops(alg: QuadraticLocalAlgebra, f: int):
    m1, m2 = _class_moduli(alg, f)
    kind, D = alg.kind, alg.D

    if kind is Kind.SPLIT:
        def mul(x, y):
            return ((x[0] * y[0]) % m1, (x[1] * y[1]) % m2)
        one = (1, 1)
    elif kind is Kind.BASE:
        def mul(x, y):
            return ((x[0] * y[0]) % m1, 0)
        one = (1, 0)
    else:
        def mul(x, y):
            return ((x[0] * y[0] - D * x[1] * y[1]) % m1,
                    (x[0] * y[1] + x[1] * y[0]) % m2)
        one = (1, 0)
    return one, mul


def _key_pow(mul, one, x, e: int):
    r = one
    while e:
        if e & 1:
            r = mul(r, x)
        x = mul(x, x)
        e >>= 1
    return r


def _key_conj(alg: QuadraticLocalAlgebra, f: int, x):
    m1, m2 = _class_moduli(alg, f)
    if alg.kind is Kind.SPLIT:
        return (x[1] % m1, x[0] % m2)
    if alg.kind is Kind.BASE:
        return x
    return (x[0], (-x[1]) % m2)


def _factorize(n: int) -> dict[int, int]:
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _abelian_pbasis(elems, q: int, mul, one):
    """Cyclic basis of a finite abelian q-group given as a list of keys.

    Greedy: repeatedly pick the first element of maximal order in G/H and
    adjust it into a direct complement.  Returns (basis, dlog) where dlog
    maps every element to its exponent vector.
    """
    total = len(elems)
    H = {one: ()}
    basis = []
    while len(H) < total:
        best, best_j, best_tail = None, -1, None
        for x in elems:
            y, j = x, 0
            while y not in H:
                y = _key_pow(mul, one, y, q)
                j += 1
            if j > best_j:
                best, best_j, best_tail = x, j, y
        m = q ** best_j
        evec = H[best_tail]
        x2 = best
        for (g, og), e in zip(basis, evec):
            if e % m != 0:
                raise RuntimeError("basis search failure: greedy invariant broken")
            x2 = mul(x2, _key_pow(mul, one, g, (og - (e // m)) % og))
        new = {}
        gp = one
        for a in range(m):
            for h, vec in H.items():
                key = mul(h, gp)
                if key in new:
                    raise RuntimeError("basis search failure: not a direct factor")
                new[key] = vec + (a,)
            gp = mul(gp, x2)
        H = new
        basis.append((x2, m))
    return basis, H


def _cyclic_factors_from_orders(elems, q: int, mul, one):
    """Isomorphism type of an abelian q-group from its q^j-torsion counts."""
    xs = list(elems)
    torsion = [sum(1 for x in xs if x == one)]
    while torsion[-1] < len(xs):
        xs = [_key_pow(mul, one, x, q) for x in xs]
        torsion.append(sum(1 for x in xs if x == one))
    # m_j = number of cyclic factors of order >= q^j
    ms = []
    for j in range(1, len(torsion)):
        ratio = torsion[j] // torsion[j - 1]
        e = 0
        while ratio > 1:
            ratio //= q
            e += 1
        ms.append(e)
    factors = []
    for i in range(ms[0] if ms else 0):
        lam = sum(1 for m in ms if m > i)
        factors.append(q ** lam)
    return tuple(sorted(factors, reverse=True))


@dataclass(frozen=True, eq=False)
class UnitGroupBasis:
    """Verified cyclic-factor basis of (O/pi^f)^x with a full dlog table."""
    alg: QuadraticLocalAlgebra
    f: int
    gens: tuple
    orders: tuple
    table: dict
    order: int

    def dlog(self, x: RingElt) -> tuple:
        key = x.unit_key(self.f)
        try:
            return self.table[key]
        except KeyError:
            raise RuntimeError("stale basis: element has no discrete log") from None

    def element(self, vec) -> RingElt:
        out = self.alg.one()
        for g, e in zip(self.gens, vec):
            out = out * g ** e
        return out

    def __repr__(self):
        return f"UnitGroupBasis({self.alg.kind.value}, p={self.alg.p}, f={self.f}, orders={self.orders})"


_BASIS_CACHE: dict = {}


def unit_group_basis(alg: QuadraticLocalAlgebra, f: int) -> UnitGroupBasis:
    """Cyclic basis of (O/pi^f)^x, bijection-checked against full enumeration."""
    ck = (alg, f)
    hit = _BASIS_CACHE.get(ck)
    if hit is not None:
        return hit
    if f < 0 or f > alg.precision:
        raise ValueError(f"need 0 <= f <= precision, got {f}")
    if f == 0:
        basis = UnitGroupBasis(alg, 0, (), (), {(0, 0): ()}, 1)
        _BASIS_CACHE[ck] = basis
        return basis

    one, mul = _key_ops(alg, f)
    keys = list(unit_class_coords(alg, f))
    order = len(keys)
    if order != unit_count(alg, f):
        raise RuntimeError("enumeration disagrees with the closed-form order")

    # one Sylow subgroup at a time
    per_prime = {}
    for q, a in sorted(_factorize(order).items()):
        qa = q ** a
        cof = order // qa
        e = cof * pow(cof, -1, qa)  # idempotent: 1 mod q^a, 0 mod cofactor
        sylow = sorted({_key_pow(mul, one, x, e) for x in keys})
        per_prime[q] = _abelian_pbasis(sylow, q, mul, one)[0]

    # fuse the prime-to-p factors into Teichmueller-type cyclic generators
    p = alg.p
    fused = []
    others = [q for q in per_prime if q != p]
    queues = {q: sorted(per_prime[q], key=lambda t: -t[1]) for q in others}
    while any(queues[q] for q in others):
        g, o = one, 1
        for q in others:
            if queues[q]:
                gq, oq = queues[q].pop(0)
                g = mul(g, gq)
                o *= oq
        fused.append((g, o))
    fused.extend(sorted(per_prime.get(p, []), key=lambda t: -t[1]))

    gens = tuple(RingElt(alg, a, b) for (a, b), _ in fused)
    orders = tuple(o for _, o in fused)

    # rebuild the dlog table from the basis; this is the bijection check
    table = {one: ()}
    for (gk, _), o in zip(fused, orders):
        new = {}
        gp = one
        for a in range(o):
            for elt, vec in table.items():
                key = mul(elt, gp)
                if key in new:
                    raise RuntimeError("basis search failure: generators not independent")
                new[key] = vec + (a,)
            gp = mul(gp, gk)
        table = new
    if len(table) != order or set(table) != set(keys):
        raise RuntimeError("basis search failure: exponent map is not a bijection")

    basis = UnitGroupBasis(alg, f, gens, orders, table, order)
    _BASIS_CACHE[ck] = basis
    return basis


# ---------------------------------------------------------------------------
# characters

def _dot(vec, values) -> QmodZ:
    out = ZERO
    for e, v in zip(vec, values):
        if e:
            out = out + v * e
    return out


@dataclass(frozen=True, eq=False)
class UnitCharacter:
    """Character of pi^Z x (O/pi^f)^x with values in Q/Z.

    `values` lists the value on each basis generator; `at_pi` extends the
    character to the uniformizer; `conductor` is exact.
    """
    basis: UnitGroupBasis
    values: tuple
    at_pi: QmodZ
    conductor: int

    @property
    def alg(self) -> QuadraticLocalAlgebra:
        return self.basis.alg

    @property
    def f(self) -> int:
        return self.basis.f

    def signature(self):
        alg = self.alg
        return (alg.p, alg.kind.value, alg.D, self.basis.f,
                tuple((v.num, v.den) for v in self.values),
                (self.at_pi.num, self.at_pi.den))

    def __eq__(self, other):
        return isinstance(other, UnitCharacter) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    def eval(self, x: RingElt) -> QmodZ:
        v, u = x.unit_decomposition()
        return self.at_pi * v + _dot(self.basis.dlog(u), self.values)

    def with_at_pi(self, q: QmodZ) -> "UnitCharacter":
        return UnitCharacter(self.basis, self.values, q, self.conductor)

    def is_trivial_on_units(self) -> bool:
        return all(v == 0 for v in self.values)

    @property
    def order_on_units(self) -> int:
        o = 1
        for v in self.values:
            o = o * v.den // gcd(o, v.den)
        return o

    def to_json(self) -> dict:
        alg = self.alg
        return {"kind": alg.kind.value, "p": alg.p, "D": alg.D,
                "f": self.conductor,
                "generator_orders": list(self.basis.orders),
                "values": [str(v) for v in self.values],
                "value_at_uniformizer": str(self.at_pi)}

    def __repr__(self):
        vals = ",".join(str(v) for v in self.values)
        return f"UnitCharacter(f={self.conductor}, [{vals}], pi->{self.at_pi})"


def char_eval(chi: UnitCharacter, x: RingElt) -> QmodZ:
    return chi.eval(x)


def _layer_test_vectors(basis: UnitGroupBasis):
    """dlog vectors of 1 + u*pi^i for each principal layer i >= 1."""
    alg, f = basis.alg, basis.f
    layers = []
    pi = alg.uniformizer()
    for i in range(1, f):
        reps = [alg.one() + pi ** i]
        if alg.kind is Kind.INERT:
            reps.append(alg.one() + alg.omega() * pi ** i)
        elif alg.kind is Kind.SPLIT:
            p_i = alg.p ** i
            reps = [RingElt(alg, 1 + p_i, 1), RingElt(alg, 1, 1 + p_i)]
        layers.append([basis.dlog(r) for r in reps])
    return layers


_LAYER_CACHE: dict = {}


def _layers(basis: UnitGroupBasis):
    key = (basis.alg, basis.f)
    if key not in _LAYER_CACHE:
        _LAYER_CACHE[key] = _layer_test_vectors(basis)
    return _LAYER_CACHE[key]


def exact_conductor(basis: UnitGroupBasis, values) -> int:
    """Smallest f' with the character trivial on 1 + pi^f' O."""
    if all(v == 0 for v in values):
        return 0
    top = 0
    for i, layer in enumerate(_layers(basis), start=1):
        if any(_dot(vec, values) != 0 for vec in layer):
            top = i
    return top + 1


def _image_generator(alg: QuadraticLocalAlgebra, f: int) -> RingElt:
    """Generator of the image of Z_p^x in (O/pi^f)^x."""
    r = _primitive_root(alg.p)
    if alg.kind is Kind.SPLIT:
        return RingElt(alg, r, r)
    return RingElt(alg, r, 0)


def _primitive_root(p: int) -> int:
    # smallest r generating (Z/p^k)^x for every k
    fac = _factorize(p - 1)
    for r in range(2, p):
        if all(pow(r, (p - 1) // q, p) != 1 for q in fac):
            if pow(r, p - 1, p * p) != 1:
                return r
    raise RuntimeError("no primitive root found")  # unreachable for primes


def kappa_on_base_units(alg: QuadraticLocalAlgebra) -> QmodZ:
    """Value of the quadratic character of Q_p^x on a primitive root."""
    if alg.kind is Kind.RAMIFIED:
        return HALF  # Legendre symbol of a non-residue
    if alg.kind in (Kind.INERT, Kind.SPLIT):
        return ZERO  # unramified (inert) or trivial (split)
    raise ValueError("no attached quadratic character for the base algebra")


def all_characters(alg: QuadraticLocalAlgebra, f: int,
                   constraint: Constraint = Constraint.NONE):
    """Every character of (O/pi^f)^x with the given base restriction.

    Characters come out in lexicographic order of their exponent tuples,
    carry their exact conductor (which may be < f), and have at_pi = 0.
    """
    basis = unit_group_basis(alg, f)
    if constraint is not Constraint.NONE and f >= 1:
        img_vec = basis.dlog(_image_generator(alg, f))
        if constraint is Constraint.RESTRICTS_TO_KAPPA:
            target = kappa_on_base_units(alg)
        else:
            target = ZERO
    else:
        img_vec, target = None, None

    for exps in product(*(range(o) for o in basis.orders)):
        values = tuple(QmodZ(t, o) for t, o in zip(exps, basis.orders))
        if img_vec is not None and _dot(img_vec, values) != target:
            continue
        yield UnitCharacter(basis, values, ZERO, exact_conductor(basis, values))


def trivial_character(alg: QuadraticLocalAlgebra) -> UnitCharacter:
    return UnitCharacter(unit_group_basis(alg, 0), (), ZERO, 0)


def multiply_characters(a: UnitCharacter, b: UnitCharacter) -> UnitCharacter:
    """Product character, re-expressed at the finer level, exact conductor."""
    if a.alg != b.alg:
        raise ValueError("characters live on different algebras")
    f = max(a.f, b.f)
    basis = unit_group_basis(a.alg, f)
    values = tuple(a.eval(g) + b.eval(g) for g in basis.gens)
    return UnitCharacter(basis, values, a.at_pi + b.at_pi,
                         exact_conductor(basis, values))


def character_at_level(chi: UnitCharacter, f: int) -> UnitCharacter:
    """Re-express a character of conductor <= f on the level-f basis.

    Needed whenever a character (for example a product that dropped
    conductor) is consumed by machinery indexed by a different basis:
    generator choices at different levels are not reduction-compatible.
    """
    if chi.basis.f == f:
        return chi
    if chi.conductor > f:
        raise ValueError(f"conductor {chi.conductor} does not factor "
                         f"through level {f}")
    basis = unit_group_basis(chi.alg, f)
    values = tuple(chi.eval(g) for g in basis.gens)
    return UnitCharacter(basis, values, chi.at_pi, chi.conductor)


# ---------------------------------------------------------------------------
# additive characters

@dataclass(frozen=True)
class AdditiveCharacter:
    """psi with m = largest mu such that psi is trivial on pi^(-mu) O."""
    m: int

    def eval(self, x: RingElt) -> QmodZ:
        shift = self.m - x.alg.m_star
        if shift == 0:
            return fractional_trace(x)
        return fractional_trace(RingElt(x.alg, x.a, x.b, x.v + shift, x.prec))


def canonical_additive(alg: QuadraticLocalAlgebra) -> AdditiveCharacter:
    """psi* built from the fractional part of the trace; m = different exponent."""
    return AdditiveCharacter(alg.m_star)


def additive_eval(psi: AdditiveCharacter, x: RingElt) -> QmodZ:
    return psi.eval(x)
