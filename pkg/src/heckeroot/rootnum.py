"""Local root numbers: Gauss-sum oracle, closed forms, and the twist machine.

Two independent routes to every quantity: a normalized Gauss sum over the
unit classes (the oracle, floating point only at the final accumulation),
and exact closed forms in Q/Z.  The twist machine combines the closed
forms into the quotient W(phi*rho)/W(phi) at p, either from explicit local
characters or from symbolic context data.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import lcm

from .qmodz import QmodZ, ZERO, HALF, QUARTER, complexify
from .quadring import (Kind, PrecisionError, QuadraticLocalAlgebra, RingElt,
                       base_algebra, fractional_trace, legendre,
                       unit_class_coords)
from .chargroup import (AdditiveCharacter, Constraint, UnitCharacter,
                        all_characters, canonical_additive,
                        character_at_level, exact_conductor,
                        multiply_characters, trivial_character,
                        unit_group_basis)
from .localcft import TowerCharacter, conductor_of_level

UNIT_TOLERANCE = 1e-9


def legendre_qmz(a: int, p: int) -> QmodZ:
    s = legendre(a, p)
    if s == 0:
        raise ValueError(f"{a} is not invertible mod {p}")
    return ZERO if s == 1 else HALF


@dataclass(frozen=True)
class RootNumberValue:
    """A root number: floating accumulation plus the exact value if known."""
    approx: complex
    exact: QmodZ | None = None

    @classmethod
    def from_exact(cls, q: QmodZ) -> "RootNumberValue":
        return cls(complexify(q), q)

    @classmethod
    def from_approx(cls, z: complex) -> "RootNumberValue":
        for k in range(4):
            q = QmodZ(k, 4)
            if abs(z - complexify(q)) < UNIT_TOLERANCE:
                return cls(z, q)
        return cls(z, None)

    def check_unit_modulus(self):
        if abs(abs(self.approx) - 1.0) > UNIT_TOLERANCE:
            raise ArithmeticError(
                f"root number has modulus {abs(self.approx)}, expected 1")

    def sign(self) -> int:
        """+1 or -1 for a real root number."""
        if abs(self.approx.imag) > UNIT_TOLERANCE:
            raise ArithmeticError(f"root number {self.approx} is not real")
        return 1 if self.approx.real > 0 else -1

    def symbol(self) -> str | None:
        if self.exact is None:
            return None
        return {(0, 1): "+1", (1, 2): "-1", (1, 4): "+i", (3, 4): "-i"}.get(
            (self.exact.num, self.exact.den))


# ---------------------------------------------------------------------------
# the Gauss-sum oracle

_UNIT_DATA_CACHE: dict = {}
_ORACLE_CACHE: dict = {}


def _gauss_unit_data(alg: QuadraticLocalAlgebra, f: int):
    """Per unit class of (O/pi^f)^x: fractional trace of beta*x and dlog."""
    key = (alg, f)
    hit = _UNIT_DATA_CACHE.get(key)
    if hit is not None:
        return hit
    basis = unit_group_basis(alg, f)
    shift = -(f + alg.m_star)
    data = []
    tden = 1
    for a, b in unit_class_coords(alg, f):
        x = RingElt(alg, a, b, shift)
        t = fractional_trace(x)
        tden = lcm(tden, t.den)
        data.append((t, basis.table[(a, b)]))
    out = (data, tden)
    _UNIT_DATA_CACHE[key] = out
    return out


def root_number_oracle(chi: UnitCharacter,
                       psi: AdditiveCharacter | None = None) -> RootNumberValue:
    """W(chi, psi) by direct summation over the unit classes.

    Unramified characters short-circuit to chi(pi)^m exactly; the ramified
    case is the normalized sum q^(-f/2) chi(beta)^(-1) sum chi^(-1)(x)
    psi(beta x) with beta = pi^(-f-m).
    """
    alg = chi.alg
    if alg.kind is Kind.SPLIT:
        raise ValueError("split algebras have componentwise root numbers; "
                         "use the two Q_p components")
    if psi is None:
        psi = canonical_additive(alg)
    m = psi.m
    f = chi.conductor
    if f == 0:
        return RootNumberValue.from_exact(chi.at_pi * m)

    if f + alg.m_star + 1 > alg.precision:
        raise PrecisionError(
            f"Gauss sum at conductor {f} needs precision >= {f + alg.m_star + 1}")

    # the sum runs over classes mod pi^f; align the character's basis
    chi = character_at_level(chi, f)

    ckey = (alg, f, m, chi.signature())
    hit = _ORACLE_CACHE.get(ckey)
    if hit is not None:
        return hit

    data, tden = _gauss_unit_data(alg, f)
    den = lcm(tden, 4, chi.at_pi.den, *(v.den for v in chi.values))
    roots = [cmath.exp(2j * cmath.pi * k / den) for k in range(den)]
    wts = [v.num * (den // v.den) for v in chi.values]

    total = 0j
    for t, vec in data:
        idx = t.num * (den // t.den)
        for w, e in zip(wts, vec):
            if e:
                idx -= w * e
        total += roots[idx % den]

    q = alg.residue_size
    phase = complexify(chi.at_pi * (f + m))  # chi(beta)^(-1)
    w = total * phase / (q ** (f / 2.0))
    value = RootNumberValue.from_approx(w)
    value.check_unit_modulus()
    _ORACLE_CACHE[ckey] = value
    return value


def kappa_character(alg: QuadraticLocalAlgebra) -> UnitCharacter:
    """The quadratic character of Q_p^x attached to the quadratic algebra,
    as a character of the rank-one base algebra."""
    base = base_algebra(alg.p, alg.precision)
    if alg.kind is Kind.INERT:
        return trivial_character(base).with_at_pi(HALF)
    if alg.kind is Kind.SPLIT:
        return trivial_character(base)
    basis = unit_group_basis(base, 1)
    values = tuple(QmodZ(o // 2, o) for o in basis.orders)  # Legendre on F_p^x
    at_p = ZERO if legendre(alg.D_prime, alg.p) == 1 else HALF
    return UnitCharacter(basis, values, at_p, exact_conductor(basis, values))


def relative_root_oracle(chi: UnitCharacter) -> RootNumberValue:
    """W(kappa, chi) = W(chi, psi*_K) / W(kappa, psi*_F) via Gauss sums."""
    alg = chi.alg
    num = root_number_oracle(chi)
    den = root_number_oracle(kappa_character(alg))
    return RootNumberValue.from_approx(num.approx / den.approx)


def compatible_uniformizer_values(alg: QuadraticLocalAlgebra) -> list[QmodZ]:
    """Values chi(pi) allowed for a character restricting to kappa on Q_p^x."""
    if alg.kind is Kind.INERT:
        return [HALF]  # kappa(p) = -1
    if alg.kind is Kind.SPLIT:
        return [ZERO]
    if alg.p % 4 == 1:  # chi(pi)^2 = kappa(-D) = +1
        return [ZERO, HALF]
    return [QUARTER, QmodZ(3, 4)]  # chi(pi)^2 = -1


def constrained_characters(alg: QuadraticLocalAlgebra, f: int,
                           exact_f: int | None = None):
    """Characters restricting to kappa on Z_p^x, with compatible chi(pi)."""
    for chi in all_characters(alg, f, Constraint.RESTRICTS_TO_KAPPA):
        if exact_f is not None and chi.conductor != exact_f:
            continue
        for q in compatible_uniformizer_values(alg):
            yield chi.with_at_pi(q)


# ---------------------------------------------------------------------------
# closed forms

def l_class(chi: UnitCharacter) -> int:
    """The invertible class l mod p with chi(1 + pi^(f-1)) = e(l/p).

    Only defined for ramified-kind characters of conductor >= 2.
    """
    alg = chi.alg
    if alg.kind is not Kind.RAMIFIED:
        raise ValueError("l-classes are read off ramified characters")
    if chi.conductor < 2:
        raise ValueError("l-class needs conductor >= 2")
    u = alg.one() + alg.uniformizer() ** (chi.conductor - 1)
    q = chi.eval(u)
    if q.den != alg.p:
        raise ArithmeticError(f"top-layer value {q} is not a primitive p-th root")
    return q.num


def relative_root_ramified_closed(chi: UnitCharacter) -> tuple[RootNumberValue, int | None]:
    """Closed-form W(kappa, chi) at a ramified place, plus the l-class.

    Conductor 1 gives the residue symbol of 2; conductor > 1 gives the
    symbol of -2l times chi(pi^(f-1)) times a fourth root of unity fixed by
    p mod 4.
    """
    alg = chi.alg
    if alg.kind is not Kind.RAMIFIED:
        raise ValueError("closed form applies to the ramified algebra")
    f = chi.conductor
    if f == 0:
        raise ValueError("unramified chi is excluded here (relative root is 1)")
    p = alg.p
    if f == 1:
        return RootNumberValue.from_exact(legendre_qmz(2, p)), None
    l = l_class(chi)
    delta = 0 if p % 4 == 1 else 1
    exact = legendre_qmz(-2 * l, p) + chi.at_pi * (f - 1) + QmodZ(delta, 4)
    return RootNumberValue.from_exact(exact), l


def relative_root_inert_sign(chi: UnitCharacter) -> int:
    """Sign of W(kappa, chi) at an inert place: (-1)^f * chi^(-1)(sqrt(-D)).

    The positive magnitude (measure ratio times the trace-unit integral) is
    not computed; conductor 0 is rejected since the relative root number is
    exactly 1 there.
    """
    alg = chi.alg
    if alg.kind is not Kind.INERT:
        raise ValueError("sign law applies to the inert algebra")
    f = chi.conductor
    if f == 0:
        raise ValueError("unramified chi is excluded here (relative root is 1)")
    w = chi.eval(alg.omega())
    if w * 2 != 0:
        raise ArithmeticError("chi(sqrt(-D)) is not a sign; restriction violated")
    exact = QmodZ(f, 2) + (-w)
    return 1 if exact == 0 else -1


def relative_root_split(chi1: UnitCharacter, chi2: UnitCharacter) -> RootNumberValue:
    """W(kappa, chi) for chi = chi1 (+) chi2 on Q_p + Q_p: equals chi2(-1)."""
    if chi1.alg.kind is not Kind.BASE or chi2.alg.kind is not Kind.BASE:
        raise ValueError("split components are characters of Q_p itself")
    if chi1.alg.p != chi2.alg.p:
        raise ValueError("components live over different primes")
    prod = multiply_characters(chi1, chi2)
    if not prod.is_trivial_on_units() or prod.at_pi != 0:
        raise ValueError("chi1 * chi2 must be trivial (chi1 = chi2^(-1))")
    val = chi2.eval(chi2.alg.from_int(-1))
    if val * 2 != 0:
        raise ArithmeticError("chi2(-1) must be a sign")
    return RootNumberValue.from_exact(val)


# ---------------------------------------------------------------------------
# the twist machine

@dataclass(frozen=True)
class TwistContext:
    """Symbolic global data feeding the twist quotient at p.

    `l2` is the l-class of phi_v (ramified, conductor > 1 only); `phi_pi`
    is phi_v(pi) as an exact fourth root of unity (ramified only);
    `phi_char` optionally carries the explicit local character, enabling
    exact product-conductor computations.
    """
    kind: Kind
    p: int
    j: int
    f_phi: int
    w_phi: int
    d: int = 1
    l2: int | None = None
    phi_pi: QmodZ | None = None
    n0: int | None = None
    phi_char: UnitCharacter | None = None
    algebra: QuadraticLocalAlgebra | None = None

    def __post_init__(self):
        if self.w_phi not in (1, -1):
            raise ValueError("w_phi must be +1 or -1")
        if self.f_phi < 0 or self.j < 0:
            raise ValueError("conductor exponent and j must be nonnegative")
        if self.kind is Kind.RAMIFIED:
            if self.f_phi == 0 or (self.f_phi > 1 and self.f_phi % 2):
                raise ValueError("ramified f(phi_v) must be 1 or a positive even number")
            if self.phi_pi is not None:
                want = ZERO if self.p % 4 == 1 else HALF
                if self.phi_pi * 2 != want:
                    raise ValueError("phi_v(pi)^2 must equal kappa(-D)")
            if self.l2 is not None and self.l2 % self.p == 0:
                raise ValueError("l2 must be invertible mod p")
        if self.n0 is None:
            object.__setattr__(self, "n0", self.j + self.f_phi + 1)

    @classmethod
    def from_character(cls, phi: UnitCharacter, w_phi: int, j: int = 0,
                       d: int = 1, n0: int | None = None) -> "TwistContext":
        alg = phi.alg
        l2 = None
        phi_pi = None
        if alg.kind is Kind.RAMIFIED:
            phi_pi = phi.at_pi
            if phi.conductor > 1:
                l2 = l_class(phi)
        return cls(alg.kind, alg.p, j, phi.conductor, w_phi, d,
                   l2, phi_pi, n0, phi, alg)


@dataclass(frozen=True)
class TwistResult:
    quotient: int
    branch: str
    notes: tuple = ()


def _phi_pi_sign(ctx: TwistContext) -> int:
    # needs p = 1 mod 4, where phi_v(pi) is a genuine sign
    if ctx.phi_pi is None:
        raise ValueError("phi_v(pi) required for this branch")
    return 1 if ctx.phi_pi == 0 else -1


def _sign_of(q: QmodZ) -> int:
    if q == 0:
        return 1
    if q == HALF:
        return -1
    raise ArithmeticError(f"expected a sign in Q/Z, got {q}")


def _ramified_closed_value(ctx: TwistContext, f: int, l: int | None) -> QmodZ:
    """Exact box value for a ramified-kind character described by (f, l, phi_pi)."""
    p = ctx.p
    if f == 1:
        return legendre_qmz(2, p)
    if l is None or ctx.phi_pi is None:
        raise ValueError("l-class and phi_v(pi) required when f > 1")
    delta = 0 if p % 4 == 1 else 1
    return legendre_qmz(-2 * l, p) + ctx.phi_pi * (f - 1) + QmodZ(delta, 4)


def twist_quotient(ctx: TwistContext, n: int,
                   rho: TowerCharacter | None = None,
                   l1: int | None = None) -> TwistResult:
    """The relative-root-number quotient at p for a level-n twist.

    Split places always give +1.  Inert places give (-1) to the conductor
    shift.  Ramified places branch on p mod 4 and the conductor relation,
    through the residue classes l1 (of phi*rho) and l2 (of phi).  With an
    explicit phi and rho the product character is formed and the quotient
    is the exact ratio of closed forms, which also covers top-layer
    cancellations that the symbolic rules gloss over.
    """
    if ctx.kind is Kind.SPLIT:
        return TwistResult(1, "split")
    if n <= ctx.j:
        return TwistResult(1, f"{ctx.kind.value}:rho-trivial")
    f_rho = conductor_of_level(ctx.kind, n, ctx.j)

    if rho is not None and ctx.phi_char is not None:
        return _twist_quotient_exact(ctx, rho)

    if ctx.kind is Kind.INERT:
        if f_rho > ctx.f_phi:
            delta = f_rho - ctx.f_phi
            return TwistResult((-1) ** delta, "inert:rho-dominates")
        if f_rho == ctx.f_phi:
            return TwistResult(1, "inert:equal-conductors",
                               ("assumes no top-layer cancellation",))
        return TwistResult(1, "inert:phi-dominates")

    # ramified, symbolic
    p = ctx.p
    f2 = ctx.f_phi
    if f_rho < f2:
        return TwistResult(1, "ramified:phi-dominates")
    if l1 is None and rho is not None:
        l_rho = l_class(rho.char)
        if f_rho > f2:
            l1 = l_rho
        else:
            if ctx.l2 is None:
                raise ValueError("l2 required for the equal-conductor branch")
            l1 = (ctx.l2 + l_rho) % p
    if f_rho == f2:
        if l1 is None:
            raise ValueError("l1 required for the equal-conductor branch")
        if ctx.l2 is None:
            raise ValueError("l2 required for the equal-conductor branch")
        if l1 % p == 0:
            return _equal_conductor_cancellation(ctx)
        return TwistResult(legendre(l1 * pow(ctx.l2, -1, p), p),
                           "ramified:equal-conductors")
    if l1 is None:
        raise ValueError("l1 required when rho dominates")
    if f2 == 1:
        if p % 4 == 1:
            q = legendre(l1, p) * _phi_pi_sign(ctx)
            return TwistResult(q, "ramified:unit-phi-conductor")
        # i / phi_v(pi) is the sign distinguishing +-i
        i_over = _sign_of(QUARTER - ctx.phi_pi) if ctx.phi_pi is not None else None
        if i_over is None:
            raise ValueError("phi_v(pi) required when f(phi_v) = 1, p = 3 mod 4")
        q = legendre(l1, p) * (-1) ** (f_rho // 2 + 1) * i_over
        return TwistResult(q, "ramified:unit-phi-conductor")
    if ctx.l2 is None:
        raise ValueError("l2 required when f(phi_v) > 1")
    q = legendre(l1 * pow(ctx.l2, -1, p), p)
    if p % 4 == 3:
        q *= (-1) ** ((f_rho - f2) // 2)
    return TwistResult(q, "ramified:rho-dominates")


def _equal_conductor_cancellation(ctx: TwistContext) -> TwistResult:
    """Top-layer cancellation in the equal-conductor ramified branch.

    The product character drops conductor; symbolically this is only
    resolvable when it must land at conductor 1 (f(phi_v) = 2).
    """
    if ctx.f_phi != 2:
        raise ValueError("cancellation below conductor 2 needs the explicit phi")
    num = _ramified_closed_value(ctx, 1, None)
    den = _ramified_closed_value(ctx, 2, ctx.l2)
    return TwistResult(_sign_of(num - den), "ramified:equal-conductors",
                       ("top-layer cancellation: product has conductor 1",))


def _twist_quotient_exact(ctx: TwistContext, rho: TowerCharacter) -> TwistResult:
    """Quotient from the explicit product character phi_v * rho_v."""
    phi = ctx.phi_char
    alg = phi.alg
    prod = multiply_characters(phi, rho.char)
    f1, f2 = prod.conductor, phi.conductor
    f_rho = rho.conductor
    notes = ()
    expected = max(f_rho, f2) if f_rho != f2 else f2
    if f1 != expected:
        notes = (f"top-layer cancellation: product has conductor {f1}",)

    if ctx.kind is Kind.INERT:
        w_rho = rho.char.eval(alg.omega())
        if w_rho != 0:
            raise ArithmeticError("rho(sqrt(-D)) != 1; not an anticyclotomic twist")
        branch = ("inert:rho-dominates" if f_rho > f2 else
                  "inert:equal-conductors" if f_rho == f2 else
                  "inert:phi-dominates")
        return TwistResult(-1 if (f1 - f2) % 2 else 1, branch, notes)

    # ramified: exact ratio of the closed forms (conductor >= 1 on both sides)
    num = _box_value_exact(prod)
    den = _box_value_exact(phi)
    branch = ("ramified:rho-dominates" if f_rho > f2 else
              "ramified:equal-conductors" if f_rho == f2 else
              "ramified:phi-dominates")
    if f2 == 1 and f_rho > 1:
        branch = "ramified:unit-phi-conductor"
    return TwistResult(_sign_of(num - den), branch, notes)


def _box_value_exact(chi: UnitCharacter) -> QmodZ:
    value, _ = relative_root_ramified_closed(chi)
    return value.exact


# ---------------------------------------------------------------------------
# the global case machine

@dataclass(frozen=True)
class GlobalRootNumber:
    value: int
    branch: str
    assumed: bool  # below the configured stability level
    notes: tuple = ()


def global_twisted_root_number(ctx: TwistContext, n: int,
                               l1: int | None = None,
                               rho: TowerCharacter | None = None) -> GlobalRootNumber:
    """W(phi * rho) for a level-n twist, as W(phi) times the local quotient.

    Branch labels follow the conductor relation; entries below the
    configured stability level are flagged `assumed` since the
    order-of-vanishing reading of the sign is only guaranteed eventually.
    """
    tq = twist_quotient(ctx, n, rho=rho, l1=l1)
    notes = tq.notes
    if (ctx.kind is Kind.RAMIFIED and tq.branch == "ramified:phi-dominates"):
        notes = notes + (
            "phi-dominated branch: quotient is 1, so the twisted root number "
            "equals W(phi)",)
    return GlobalRootNumber(ctx.w_phi * tq.quotient, tq.branch,
                            n < ctx.n0, notes)
