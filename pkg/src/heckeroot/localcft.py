"""Local behavior of the anticyclotomic tower at p.

Conjugation splits each principal-unit quotient (1 + pi O)/(1 + pi^k O)
into plus/minus eigenspaces; the minus line realizes the decomposition
group of the tower, and the characters built here are the local twisting
data.
"""

from __future__ import annotations

from dataclasses import dataclass

from .qmodz import QmodZ, ZERO
from .quadring import Kind, QuadraticLocalAlgebra, RingElt
from .chargroup import (UnitCharacter, UnitGroupBasis, _key_conj, _key_ops,
                        _key_pow, exact_conductor, trivial_character,
                        unit_group_basis)


@dataclass(frozen=True)
class EigenspaceStructure:
    """Cyclic factor orders of the plus/minus parts of (1+piO)/(1+pi^k O)."""
    p: int
    kind: Kind
    k: int
    plus: tuple
    minus: tuple


def _closure(gens, mul, one):
    seen = {one}
    frontier = [one]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                y = mul(h, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def _cyclic_factors(elems, q, mul, one):
    xs = list(elems)
    torsion = [sum(1 for x in xs if x == one)]
    while torsion[-1] < len(xs):
        xs = [_key_pow(mul, one, x, q) for x in xs]
        torsion.append(sum(1 for x in xs if x == one))
    ms = []
    for j in range(1, len(torsion)):
        ratio, e = torsion[j] // torsion[j - 1], 0
        while ratio > 1:
            ratio //= q
            e += 1
        ms.append(e)
    out = []
    for i in range(ms[0] if ms else 0):
        lam = sum(1 for m in ms if m > i)
        out.append(q ** lam)
    return tuple(sorted(out, reverse=True))


def _principal_generators(alg: QuadraticLocalAlgebra, k: int):
    """Keys of 1 + u*pi^i spanning (1+piO)/(1+pi^k O)."""
    pi = alg.uniformizer()
    gens = []
    for i in range(1, k):
        reps = [alg.one() + pi ** i]
        if alg.kind is Kind.INERT:
            reps.append(alg.one() + alg.omega() * pi ** i)
        gens.extend(r.unit_key(k) for r in reps)
    return gens


_EIG_CACHE: dict = {}


def eigenspace_structure(alg: QuadraticLocalAlgebra, k: int) -> EigenspaceStructure:
    """Plus/minus cyclic structure of (1+piO)/(1+pi^k O) by enumeration.

    The plus (minus) part is the image of x -> x*conj(x) (x -> x/conj(x)),
    generated by the images of a spanning set; factors are read off the
    p-power torsion profile of the full subgroup.
    """
    key = (alg, k)
    hit = _EIG_CACHE.get(key)
    if hit is not None:
        return hit
    if alg.kind not in (Kind.INERT, Kind.RAMIFIED):
        raise ValueError("eigenspaces need a quadratic field extension")
    if not 1 <= k <= alg.precision:
        raise ValueError(f"need 1 <= k <= precision, got k={k}")
    one, mul = _key_ops(alg, k)
    p = alg.p

    def inv_key(x):
        return _key_pow(mul, one, x, _group_exponent_bound(alg, k) - 1)

    plus_gens, minus_gens = [], []
    for g in _principal_generators(alg, k):
        gc = _key_conj(alg, k, g)
        plus_gens.append(mul(g, gc))
        minus_gens.append(mul(g, inv_key(gc)))

    plus = _closure(plus_gens, mul, one)
    minus = _closure(minus_gens, mul, one)
    expected = alg.residue_size ** (k - 1)
    if len(plus) * len(minus) != expected:
        raise RuntimeError("eigenspace sizes do not multiply to |Q_k|")
    out = EigenspaceStructure(p, alg.kind, k,
                              _cyclic_factors(plus, p, mul, one),
                              _cyclic_factors(minus, p, mul, one))
    _EIG_CACHE[key] = out
    return out


def _group_exponent_bound(alg: QuadraticLocalAlgebra, k: int) -> int:
    # any multiple of the exponent of (1+piO)/(1+pi^k O) works as -1 power
    return alg.p ** k


def conductor_of_level(kind: Kind, n: int, j: int) -> int:
    """Exact conductor exponent of a level-n tower character at p."""
    if kind not in (Kind.INERT, Kind.RAMIFIED):
        raise ValueError("conductor formula only covers inert/ramified p")
    if n < 0 or j < 0:
        raise ValueError("levels must be nonnegative")
    if n <= j:
        return 0
    return n - j + 1 if kind is Kind.INERT else 2 * (n - j)


def decomposition_group_order(p: int, kind: Kind, n: int, j: int) -> int:
    if kind not in (Kind.INERT, Kind.RAMIFIED):
        raise ValueError("decomposition order only covers inert/ramified p")
    return p ** max(n - j, 0)


@dataclass(frozen=True, eq=False)
class TowerCharacter:
    """Local character of a level-n layer of the tower: trivial on the
    uniformizer, on the plus eigenspace and on Z_p^x, of p-power order."""
    char: UnitCharacter
    level: int
    j: int
    seed: int

    @property
    def conductor(self) -> int:
        return self.char.conductor

    @property
    def order(self) -> int:
        return self.char.order_on_units


def _minus_projection_exponent(alg: QuadraticLocalAlgebra, basis: UnitGroupBasis) -> int:
    """Exponent e with x -> x^e the projection onto the minus p-part."""
    n_u = basis.order
    p = alg.p
    pa = 1
    while n_u % (pa * p) == 0:
        pa *= p
    s = n_u // pa
    strip = s * pow(s, -1, pa) if pa > 1 else 0  # kill prime-to-p part
    half = (pa + 1) // 2  # inverse of 2 on the p-part
    return (strip * half) % (n_u if n_u > 1 else 1)


def tower_character(alg: QuadraticLocalAlgebra, n: int, j: int,
                    seed: int = 0) -> TowerCharacter:
    """Level-n character of K_v^x through the minus quotient, seed-selected.

    Returns the trivial character for n <= j.  Seeds enumerate the faithful
    characters of the cyclic minus quotient; the generator is the
    lexicographically least element of maximal order, so labels are stable.
    """
    if alg.kind not in (Kind.INERT, Kind.RAMIFIED):
        raise ValueError("tower characters only exist at inert/ramified p")
    if n <= j:
        if seed != 0:
            raise ValueError("trivial level has a single seed (0)")
        return TowerCharacter(trivial_character(alg), n, j, seed)

    d_order = alg.p ** (n - j)
    n_seeds = d_order - d_order // alg.p
    if not 0 <= seed < n_seeds:
        raise ValueError(f"seed out of range [0, {n_seeds})")

    f = conductor_of_level(alg.kind, n, j)
    basis = unit_group_basis(alg, f)
    one, mul = _key_ops(alg, f)
    exponent = _minus_projection_exponent(alg, basis)

    def minus_part(x: RingElt):
        k = x.unit_key(f)
        kc = _key_conj(alg, f, k)
        y = mul(k, _key_pow(mul, one, kc, basis.order - 1))
        return _key_pow(mul, one, y, exponent)

    minus = _closure([minus_part(g) for g in basis.gens], mul, one)
    if len(minus) != d_order:
        raise RuntimeError("minus quotient has unexpected order")
    candidates = [k for k in minus
                  if _key_pow(mul, one, k, d_order // alg.p) != one]
    if not candidates:
        # happens when the completion contains the p-th roots of unity
        # (p = 3 with D/3 a square mod 3): the minus part is not cyclic
        raise ArithmeticError(
            "minus eigenspace is not cyclic at this depth; the tower "
            "character with this conductor does not exist here")
    gen = min(candidates)
    dlog = {}
    cur = one
    for i in range(d_order):
        dlog[cur] = i
        cur = mul(cur, gen)

    units = [u for u in range(1, d_order) if u % alg.p][seed]
    values = tuple(QmodZ(dlog[minus_part(g)] * units, d_order)
                   for g in basis.gens)
    cond = exact_conductor(basis, values)
    if cond != f:
        raise RuntimeError("tower character has wrong conductor")
    chi = UnitCharacter(basis, values, ZERO, cond)
    if chi.order_on_units != d_order:
        raise RuntimeError("tower character has wrong order")
    return TowerCharacter(chi, n, j, seed)
