"""Arithmetic consequences of the root-number case machine.

Rank-jump sequences along the tower, the finite-generation criterion, and
the exact-rational distribution of even/odd vanishing orders among twists.
No floating point here: series values and limits are fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .quadring import Kind
from .localcft import tower_character
from .rootnum import TwistContext, twist_quotient


def euler_phi_ppower(p: int, n: int) -> int:
    """phi(p^n) = p^(n-1)(p-1), with phi(p^0) = 1 for the level-0 weight."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1
    return p ** (n - 1) * (p - 1)


def vanishing_order_parity(w: int) -> int:
    """Order of vanishing at the center read off a stable-level sign."""
    if w not in (1, -1):
        raise ValueError("root number must be +1 or -1")
    return (1 - w) // 2


def mw_finitely_generated(ctx: TwistContext) -> bool:
    """Whole-tower Mordell-Weil group finitely generated?"""
    return ctx.kind is Kind.SPLIT and ctx.w_phi == 1


# ---------------------------------------------------------------------------
# epsilon sequences and ranks

@dataclass(frozen=True)
class EpsilonEntry:
    n: int
    epsilon: int
    phi_pn: int
    rank_delta: int
    regime: str  # "stable" or "below-n0"


@dataclass(frozen=True)
class EpsilonSequence:
    ctx: TwistContext
    entries: tuple


def stable_sign(ctx: TwistContext, n: int) -> int:
    """Sign of the level-n twisted root number in the stable regime.

    Split: always W(phi).  Inert: alternates with the parity of n, the
    phase fixed by the parity of j + f(phi_p).  Ramified levels above j
    have no single sign (the seeds split half and half); use the counting
    machinery instead.
    """
    if ctx.kind is Kind.SPLIT:
        return ctx.w_phi
    if ctx.kind is Kind.INERT:
        even_sign = ctx.w_phi if (ctx.j + ctx.f_phi) % 2 else -ctx.w_phi
        return even_sign if n % 2 == 0 else -even_sign
    raise ValueError("ramified levels carry both signs; use level_sign_counts")


def level_sign_counts(ctx: TwistContext, n: int) -> tuple[int, int]:
    """(#plus, #minus) among the phi(p^n) stable-regime signs at level n."""
    w = euler_phi_ppower(ctx.p, n)
    if ctx.kind is Kind.RAMIFIED:
        if n <= ctx.j:
            return (w, 0) if ctx.w_phi == 1 else (0, w)
        half = w // 2  # p odd makes phi(p^n) even for n > 0
        return (half, half)
    s = stable_sign(ctx, n)
    return (w, 0) if s == 1 else (0, w)


def epsilon_sequence(ctx: TwistContext, n_from: int, n_to: int) -> EpsilonSequence:
    """Rank-jump coefficients: epsilon_n in {0, d, 2d} per decomposition kind.

    Entries below the stability level still report the asymptotic value but
    are tagged, mirroring an eventually-true statement.
    """
    if n_from < 1:
        raise ValueError("levels start at 1")
    entries = []
    for n in range(n_from, n_to + 1):
        if ctx.kind is Kind.RAMIFIED:
            eps = ctx.d
        else:
            eps = 2 * ctx.d if stable_sign(ctx, n) == -1 else 0
        w = euler_phi_ppower(ctx.p, n)
        regime = "stable" if n >= ctx.n0 else "below-n0"
        entries.append(EpsilonEntry(n, eps, w, eps * w, regime))
    return EpsilonSequence(ctx, tuple(entries))


def rank_sequence(ctx: TwistContext, rank_base: int, n_to: int,
                  n_from: int = 1) -> list[int]:
    """Ranks from an assumed base rank at level n_from - 1 upward."""
    if rank_base < 0:
        raise ValueError("base rank must be nonnegative")
    seq = epsilon_sequence(ctx, n_from, n_to)
    ranks = []
    cur = rank_base
    for entry in seq.entries:
        cur = cur + entry.rank_delta
        if entry.rank_delta % euler_phi_ppower(ctx.p, entry.n):
            raise AssertionError("rank congruence broken")
        ranks.append(cur)
    return ranks


# ---------------------------------------------------------------------------
# distribution of vanishing-order parities

@dataclass(frozen=True)
class LimitClassification:
    shape: str  # "single" or "oscillating"
    plus_even: Fraction
    plus_odd: Fraction
    minus_even: Fraction
    minus_odd: Fraction

    @property
    def single_plus(self) -> Fraction:
        if self.shape != "single":
            raise ValueError("series oscillates between two limits")
        return self.plus_even


@dataclass(frozen=True)
class DistributionSeries:
    ctx: TwistContext
    n_max: int
    p_plus: tuple
    p_minus: tuple
    limits: LimitClassification | None
    mode: str
    assumed_levels: tuple  # levels below n0 whose sign rule is extrapolated
    level_counts: tuple    # (#plus, #minus) per level


def distribution_series(ctx: TwistContext, n_max: int,
                        mode: str = "case-machine") -> DistributionSeries:
    """Cumulative even/odd vanishing-order fractions through level N.

    Level n carries weight phi(p^n) (the trivial level weighs 1); the
    case-machine mode signs each level by the stable-regime rule, the
    enumerated mode counts signs over explicitly built twist characters
    and requires the explicit local character in the context.
    """
    if n_max < 1:
        raise ValueError("need n_max >= 1")
    if mode == "case-machine":
        counts = [level_sign_counts(ctx, n) for n in range(0, n_max + 1)]
    elif mode == "enumerated":
        counts = [_enumerated_counts(ctx, n) for n in range(0, n_max + 1)]
    else:
        raise ValueError(f"unknown mode {mode!r}")

    p = ctx.p
    plus_series, minus_series = [], []
    cplus = cminus = 0
    for n, (a, b) in enumerate(counts):
        cplus += a
        cminus += b
        total = p ** n
        plus_series.append(Fraction(cplus, total))
        minus_series.append(Fraction(cminus, total))

    try:
        limits = _classify_limits(ctx, plus_series, minus_series)
    except ValueError:
        limits = None  # n_max too small; enumerated runs are short on purpose
    assumed = tuple(n for n in range(0, n_max + 1) if n < ctx.n0)
    return DistributionSeries(ctx, n_max, tuple(plus_series),
                              tuple(minus_series), limits, mode,
                              assumed, tuple(counts))


def _enumerated_counts(ctx: TwistContext, n: int) -> tuple[int, int]:
    """Sign counts at level n from explicitly built twist characters."""
    if ctx.kind is Kind.SPLIT:
        return level_sign_counts(ctx, n)  # quotient is identically 1
    if ctx.phi_char is None or ctx.algebra is None:
        raise ValueError("enumerated mode needs the explicit local character")
    if n <= ctx.j:
        w = euler_phi_ppower(ctx.p, n)
        return (w, 0) if ctx.w_phi == 1 else (0, w)
    n_seeds = euler_phi_ppower(ctx.p, n - ctx.j)
    weight = euler_phi_ppower(ctx.p, n) // n_seeds  # global twists per seed
    plus = minus = 0
    for seed in range(n_seeds):
        rho = tower_character(ctx.algebra, n, ctx.j, seed)
        sign = ctx.w_phi * twist_quotient(ctx, n, rho=rho).quotient
        if sign == 1:
            plus += weight
        else:
            minus += weight
    return plus, minus


def _classify_limits(ctx: TwistContext, plus, minus) -> LimitClassification:
    """Exact subsequence limits of the cumulative series.

    For every kind the tails satisfy v_N = L + c p^(-N) exactly, so two
    terms of matching parity determine L; consistency across one more term
    is asserted before the value is believed.
    """
    def extrapolate(series, parity):
        idx = [i for i in range(len(series)) if i % 2 == parity and i > ctx.j]
        if len(idx) < 3:
            raise ValueError("n_max too small to classify limits")
        p2 = Fraction(ctx.p ** 2)
        last, prev, prev2 = idx[-1], idx[-2], idx[-3]
        lim = (p2 * series[last] - series[prev]) / (p2 - 1)
        lim_check = (p2 * series[prev] - series[prev2]) / (p2 - 1)
        if lim != lim_check:
            raise ArithmeticError("series tail is not geometric; cannot classify")
        return lim

    pe = extrapolate(plus, 0)
    po = extrapolate(plus, 1)
    me = extrapolate(minus, 0)
    mo = extrapolate(minus, 1)
    shape = "single" if (pe == po and me == mo) else "oscillating"
    return LimitClassification(shape, pe, po, me, mo)


def expected_limits(ctx: TwistContext) -> LimitClassification:
    """Limit table entries implied by the stable-regime case machine."""
    p = ctx.p
    if ctx.kind is Kind.SPLIT:
        hi = Fraction(1) if ctx.w_phi == 1 else Fraction(0)
        return LimitClassification("single", hi, hi, 1 - hi, 1 - hi)
    if ctx.kind is Kind.RAMIFIED:
        half = Fraction(1, 2)
        return LimitClassification("single", half, half, half, half)
    big, small = Fraction(p, p + 1), Fraction(1, p + 1)
    even_sign = ctx.w_phi if (ctx.j + ctx.f_phi) % 2 else -ctx.w_phi
    if even_sign == 1:
        return LimitClassification("oscillating", big, small, small, big)
    return LimitClassification("oscillating", small, big, big, small)


def inert_mass_formulas(p: int, N: int) -> tuple[Fraction, Fraction]:
    """Closed forms for the even-level and odd-level cumulative masses."""
    pn = Fraction(1, p ** N)
    if N % 2 == 0:
        return (p + pn) / (p + 1), (1 - pn) / (p + 1)
    return (1 + pn) / (p + 1), (p - pn) / (p + 1)
