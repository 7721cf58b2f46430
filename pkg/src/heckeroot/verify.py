"""Oracle-vs-closed-form verification suites.

Every suite compares an exact formula against an independent computation
over a declared desk-scale grid and reports one line per instance.  Each
suite also accepts a sabotage descriptor that corrupts exactly one input
by one unit; a healthy build must then fail, which is the negative
control.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .qmodz import QmodZ
from .quadring import Kind, PrecisionError, default_discriminant, make_algebra
from .chargroup import (UnitCharacter, character_at_level,
                        multiply_characters, unit_group_basis)
from .localcft import (conductor_of_level, decomposition_group_order,
                       eigenspace_structure, tower_character)
from .rootnum import (TwistContext, constrained_characters, kappa_character,
                      legendre, relative_root_inert_sign,
                      relative_root_ramified_closed, root_number_oracle,
                      twist_quotient, _gauss_unit_data)
from .predictor import (distribution_series, epsilon_sequence,
                        euler_phi_ppower, expected_limits,
                        inert_mass_formulas, rank_sequence)

SUITE_NAMES = ("gauss", "inert-sign", "tower", "twist", "distribution")

FULL, REDUCED = "full", "reduced"  # grid scale; mutation runs use the small one


@dataclass(frozen=True)
class Sabotage:
    """One-unit corruption of a single input, chosen by seed."""
    target: str
    index: int

    @classmethod
    def from_seed(cls, seed: int, menu: tuple) -> "Sabotage":
        rng = random.Random(seed)
        return cls(rng.choice(menu), rng.randrange(10 ** 9))


@dataclass
class Instance:
    key: str
    expected: str
    got: str
    ok: bool


@dataclass
class SuiteReport:
    suite: str
    instances: list = field(default_factory=list)
    notes: tuple = ()
    error: str | None = None

    @property
    def passed(self) -> int:
        return sum(1 for i in self.instances if i.ok)

    @property
    def failed(self) -> int:
        return sum(1 for i in self.instances if not i.ok)

    @property
    def ok(self) -> bool:
        return self.error is None and self.failed == 0

    def add(self, key, expected, got, ok) -> bool:
        self.instances.append(Instance(key, str(expected), str(got), ok))
        return ok


def _nonresidue_times_p(p: int) -> int:
    r = 2
    while legendre(r, p) != -1:
        r += 1
    return p * r


def _pattern_discriminant(p: int, kind: Kind) -> int:
    """Discriminant whose completion has torsion-free principal units.

    p = 3 ramified needs D/3 to be a non-residue mod 3: otherwise the
    completion is Q_3(zeta_3), whose 3-torsion breaks the alternating
    eigenspace pattern (see the k=4 structure of that field).
    """
    if kind is Kind.RAMIFIED:
        return _nonresidue_times_p(p) if p == 3 else p
    return default_discriminant(p, kind)


def _conductor_bump(chi: UnitCharacter) -> UnitCharacter:
    # reinterpret the character one conductor level up; closed forms then
    # read the top-layer class off a level where chi is trivial
    f = chi.conductor + 1
    basis = unit_group_basis(chi.alg, f)
    values = tuple(chi.eval(g) for g in basis.gens)
    return UnitCharacter(basis, values, chi.at_pi, f)


def _perturbed_gauss_sum(chi: UnitCharacter) -> complex:
    """Oracle numerator with one unit-class summand nudged by one unit."""
    alg = chi.alg
    f = chi.conductor
    chi = character_at_level(chi, f)
    data, _ = _gauss_unit_data(alg, f)
    total = 0j
    for i, (t, vec) in enumerate(data):
        val = t - sum((v * e for v, e in zip(chi.values, vec)), QmodZ(0))
        if i == 0:
            val = val + QmodZ(1, alg.p)  # one step in the p-part lattice
        total += val.exp()
    return total * (chi.at_pi * (f + alg.m_star)).exp() / \
        (alg.residue_size ** (f / 2.0))


def _oracle_quotient(chi: UnitCharacter, perturb: bool = False) -> complex:
    num = (_perturbed_gauss_sum(chi) if perturb
           else root_number_oracle(chi).approx)
    return num / root_number_oracle(kappa_character(chi.alg)).approx


# ---------------------------------------------------------------------------
# suite: gauss  (ramified closed form against the Gauss-sum oracle)

GAUSS_MENU = ("char-value", "legendre", "conductor")


def suite_gauss(precision: int = 8, tol: float = 1e-9,
                sabotage: Sabotage | None = None, fail_fast: bool = False,
                scale: str = FULL) -> SuiteReport:
    report = SuiteReport("gauss")
    primes = (3, 5, 7) if scale == FULL else (3,)
    fs = (1, 2, 4) if scale == FULL else (1, 2)
    jobs = []
    for p in primes:
        for D in (p, _nonresidue_times_p(p)):
            alg = make_algebra(p, Kind.RAMIFIED, D, precision)
            for f in fs:
                jobs.extend((alg, chi)
                            for chi in constrained_characters(alg, f, exact_f=f))
    pick = sabotage.index % len(jobs) if sabotage is not None else None

    for i, (alg, chi) in enumerate(jobs):
        key = f"p={alg.p} D={alg.D} f={chi.conductor} chi={chi.signature()[4]}"
        closed_chi, flip, perturb = chi, 1, False
        if pick == i:
            if sabotage.target == "char-value":
                perturb = True
            elif sabotage.target == "legendre":
                flip = -1
            else:
                closed_chi = _conductor_bump(chi)
        try:
            closed, _ = relative_root_ramified_closed(closed_chi)
            value = closed.approx * flip
            oracle = _oracle_quotient(chi, perturb)
            ok = report.add(key, f"{value:.12g}", f"{oracle:.12g}",
                            abs(value - oracle) <= tol)
        except PrecisionError:
            raise
        except (ArithmeticError, ValueError) as exc:
            ok = report.add(key, "computable", f"error: {exc}", False)
        if fail_fast and not ok:
            return report
    return report


# ---------------------------------------------------------------------------
# suite: inert-sign

INERT_MENU = ("char-value", "legendre", "conductor")


def suite_inert_sign(precision: int = 8, tol: float = 1e-9,
                     sabotage: Sabotage | None = None, fail_fast: bool = False,
                     scale: str = FULL) -> SuiteReport:
    report = SuiteReport("inert-sign")
    grid = ((3, 1, (1, 2, 3)), (5, 2, (1, 2, 3))) if scale == FULL \
        else ((3, 1, (1, 2)),)
    jobs = []
    for p, D, fs in grid:
        alg = make_algebra(p, Kind.INERT, D, precision)
        for f in fs:
            jobs.extend((alg, chi)
                        for chi in constrained_characters(alg, f, exact_f=f))
    pick = sabotage.index % len(jobs) if sabotage is not None else None

    for i, (alg, chi) in enumerate(jobs):
        key = f"p={alg.p} f={chi.conductor} chi={chi.signature()[4]}"
        flip, cond_shift, perturb = 1, 0, False
        if pick == i:
            if sabotage.target == "char-value":
                perturb = True
            elif sabotage.target == "legendre":
                flip = -1
            else:
                cond_shift = 1
        try:
            sign = relative_root_inert_sign(chi) * flip * (-1) ** cond_shift
            oracle = _oracle_quotient(chi, perturb)
            good = abs(oracle.imag) <= tol and \
                (1 if oracle.real > 0 else -1) == sign
            ok = report.add(key, f"{sign:+d}", f"{oracle:.12g}", good)
        except PrecisionError:
            raise
        except (ArithmeticError, ValueError) as exc:
            ok = report.add(key, "computable", f"error: {exc}", False)
        if fail_fast and not ok:
            return report
    return report


# ---------------------------------------------------------------------------
# suite: tower

TOWER_MENU = ("conductor", "eigenspace-order", "group-order")


def _expected_eigenspaces(p: int, kind: Kind, k: int):
    if kind is Kind.INERT:
        side = (p ** (k - 1),) if k >= 2 else ()
        return side, side
    if k == 1:
        return (), ()
    if k % 2:  # k = 2t+1: both C_{p^t}
        t = (k - 1) // 2
        return (p ** t,), (p ** t,)
    t = k // 2  # k = 2t: plus C_{p^(t-1)}, minus C_{p^t}
    plus = (p ** (t - 1),) if t >= 2 else ()
    return plus, (p ** t,)


def suite_tower(precision: int = 8, sabotage: Sabotage | None = None,
                fail_fast: bool = False, scale: str = FULL) -> SuiteReport:
    report = SuiteReport("tower")
    primes = (3, 5, 7) if scale == FULL else (3,)
    kmax = 5 if scale == FULL else 3
    nj_max = 6 if scale == FULL else 2
    eig_jobs, level_jobs = [], []
    for p in primes:
        for kind in (Kind.INERT, Kind.RAMIFIED):
            D = _pattern_discriminant(p, kind)
            for k in range(1, kmax + 1):
                eig_jobs.append((p, kind, D, k))
    for kind in (Kind.INERT, Kind.RAMIFIED):
        for n in range(0, nj_max + 1):
            for j in range(0, nj_max + 1):
                level_jobs.append((kind, n, j))
    picks = {t: None for t in TOWER_MENU}
    if sabotage is not None:
        if sabotage.target == "eigenspace-order":
            # only levels with a nonempty minus part can be corrupted
            usable = [i for i, (_, _, _, k) in enumerate(eig_jobs) if k >= 2]
            picks[sabotage.target] = usable[sabotage.index % len(usable)]
        else:
            picks[sabotage.target] = sabotage.index % len(level_jobs)

    for i, (p, kind, D, k) in enumerate(eig_jobs):
        alg = make_algebra(p, kind, D, max(precision, k))
        got = eigenspace_structure(alg, k)
        plus, minus = got.plus, got.minus
        if picks["eigenspace-order"] == i and minus:
            minus = (minus[0] * p,) + minus[1:]
        want_plus, want_minus = _expected_eigenspaces(p, kind, k)
        ok = report.add(f"eig {kind.value} p={p} k={k}",
                        f"+{want_plus} -{want_minus}", f"+{plus} -{minus}",
                        plus == want_plus and minus == want_minus)
        if fail_fast and not ok:
            return report
    for i, (kind, n, j) in enumerate(level_jobs):
        got_f = conductor_of_level(kind, n, j)
        if picks["conductor"] == i:
            got_f += 1
        want_f = 0 if n <= j else (n - j + 1 if kind is Kind.INERT
                                   else 2 * (n - j))
        got_d = decomposition_group_order(3, kind, n, j)
        if picks["group-order"] == i:
            got_d *= 3
        want_d = 3 ** max(n - j, 0)
        ok = report.add(f"level {kind.value} n={n} j={j}",
                        f"f={want_f} |D|={want_d}", f"f={got_f} |D|={got_d}",
                        got_f == want_f and got_d == want_d)
        if fail_fast and not ok:
            return report
    return report


# ---------------------------------------------------------------------------
# suite: twist  (oracle quotient vs case machine, plus the zero-sum counts)

TWIST_MENU = ("char-value", "legendre", "conductor")


def suite_twist(precision: int = 10, tol: float = 1e-9,
                sabotage: Sabotage | None = None, fail_fast: bool = False,
                scale: str = FULL) -> SuiteReport:
    report = SuiteReport("twist")
    if scale == FULL:
        grid = ((Kind.INERT, 3, 1), (Kind.INERT, 5, 2),
                (Kind.RAMIFIED, 3, 6), (Kind.RAMIFIED, 5, 5))
        f_max, levels = 3, (1, 2)
    else:
        grid = ((Kind.INERT, 3, 1), (Kind.RAMIFIED, 3, 6))
        f_max, levels = 2, (1,)

    jobs = []
    for kind, p, D in grid:
        alg = make_algebra(p, kind, D, precision)
        fs = [f for f in range(0 if kind is Kind.INERT else 1, f_max + 1)
              if not (kind is Kind.RAMIFIED and f > 1 and f % 2)]
        for f_phi in fs:
            for phi in constrained_characters(alg, max(f_phi, 1), exact_f=f_phi):
                ctx = TwistContext.from_character(phi, w_phi=1, j=0)
                for n in levels:
                    for seed in range(euler_phi_ppower(p, n)):
                        jobs.append((alg, ctx, phi, n, seed))
    pick = sabotage.index % len(jobs) if sabotage is not None else None

    for i, (alg, ctx, phi, n, seed) in enumerate(jobs):
        rho = tower_character(alg, n, 0, seed)
        key = (f"{alg.kind.value} p={alg.p} f_phi={phi.conductor} n={n} "
               f"seed={seed} chi={phi.signature()[4]}")
        mutated = sabotage.target if pick == i else None
        try:
            quotient = twist_quotient(ctx, n, rho=rho).quotient
            prod = multiply_characters(phi, rho.char)
            if mutated == "legendre":
                quotient = -quotient
            if mutated == "conductor":
                prod = _conductor_bump(prod)
            num = (_perturbed_gauss_sum(prod) if mutated == "char-value"
                   else root_number_oracle(prod).approx)
            q = num / root_number_oracle(phi).approx
            good = abs(q.imag) <= tol and (1 if q.real > 0 else -1) == quotient
            ok = report.add(key, f"{quotient:+d}", f"{q:.12g}", good)
        except PrecisionError:
            raise
        except (ArithmeticError, ValueError) as exc:
            ok = report.add(key, "computable", f"error: {exc}", False)
        if fail_fast and not ok:
            return report

    # ramified zero-sum at stable levels: exactly half the seeds each sign
    for kind, p, D in grid:
        if kind is not Kind.RAMIFIED:
            continue
        alg = make_algebra(p, kind, D, precision)
        for f_phi in (1, 2):
            phi = next(iter(constrained_characters(alg, f_phi, exact_f=f_phi)))
            ctx = TwistContext.from_character(phi, w_phi=1, j=0)
            ds = distribution_series(ctx, max(levels), mode="enumerated")
            for n in levels:
                if 2 * n <= f_phi:
                    continue  # boundary level, outside the stable regime
                plus, minus = ds.level_counts[n]
                half = euler_phi_ppower(p, n) // 2
                ok = report.add(f"zero-sum ram p={p} f_phi={f_phi} n={n}",
                                f"{half}+{half}", f"{plus}+{minus}",
                                plus == half and minus == half)
                if fail_fast and not ok:
                    return report
    return report


# ---------------------------------------------------------------------------
# suite: distribution  (series closed forms, limits, epsilon branches)

DIST_MENU = ("sign", "conductor", "weight")


def _series_matches(ctx: TwistContext, N: int, plus, minus) -> bool:
    p = ctx.p
    if ctx.kind is Kind.SPLIT:
        return (plus, minus) == ((1, 0) if ctx.w_phi == 1 else (0, 1))
    if ctx.kind is Kind.RAMIFIED:
        lead = (1 + ctx.w_phi * Fraction(1, p ** (N - ctx.j))) / 2
        return plus == lead and minus == 1 - lead
    even_mass, odd_mass = inert_mass_formulas(p, N)
    even_sign = ctx.w_phi if (ctx.j + ctx.f_phi) % 2 else -ctx.w_phi
    want_plus = even_mass if even_sign == 1 else odd_mass
    return plus == want_plus and minus == 1 - want_plus


def suite_distribution(n_max: int = 12, sabotage: Sabotage | None = None,
                       fail_fast: bool = False, scale: str = FULL) -> SuiteReport:
    report = SuiteReport("distribution")
    primes = (3, 5, 7) if scale == FULL else (3,)
    nm = n_max if scale == FULL else 8
    ctxs = []
    for p in primes:
        for w in (1, -1):
            ctxs.append(TwistContext(Kind.SPLIT, p, 0, 0, w))
            ctxs.append(TwistContext(Kind.RAMIFIED, p, 0, 1, w))
            for f_phi in (0, 1):  # both parities of j + f(phi_p)
                ctxs.append(TwistContext(Kind.INERT, p, 0, f_phi, w))
    pick = None
    if sabotage is not None:
        applicable = [i for i, c in enumerate(ctxs)
                      if sabotage.target != "conductor" or c.kind is not Kind.SPLIT]
        pick = applicable[sabotage.index % len(applicable)]

    for i, ctx in enumerate(ctxs):
        use = ctx
        if pick == i and sabotage.target == "conductor":
            # bump the structural exponent the series pairing depends on
            if ctx.kind is Kind.INERT:
                use = TwistContext(ctx.kind, ctx.p, ctx.j, ctx.f_phi + 1, ctx.w_phi)
            else:
                use = TwistContext(ctx.kind, ctx.p, ctx.j + 1, ctx.f_phi, ctx.w_phi)
        ds = distribution_series(use, nm)
        plus = list(ds.p_plus)
        minus = list(ds.p_minus)
        if pick == i and sabotage.target == "sign":
            plus[nm], minus[nm] = minus[nm], plus[nm]
        if pick == i and sabotage.target == "weight":
            plus[nm] = plus[nm] + Fraction(1, ctx.p ** nm)
        ok_series = all(_series_matches(ctx, N, plus[N], minus[N])
                        for N in range(1, nm + 1))
        partition = all(plus[N] + minus[N] == 1 for N in range(nm + 1))
        ok_lim = ds.limits == expected_limits(ctx)
        key = f"dist {ctx.kind.value} p={ctx.p} W={ctx.w_phi:+d} f_phi={ctx.f_phi}"
        ok = report.add(key, "series+limits",
                        f"series={'ok' if ok_series and partition else 'BAD'} "
                        f"limits={'ok' if ok_lim else 'BAD'}",
                        ok_series and partition and ok_lim)
        if fail_fast and not ok:
            return report

    for ctx in ctxs:
        seq = epsilon_sequence(ctx, 1, nm)
        allowed = {ctx.d} if ctx.kind is Kind.RAMIFIED else {0, 2 * ctx.d}
        eps_ok = all(e.epsilon in allowed for e in seq.entries)
        if ctx.kind is Kind.INERT:
            eps_ok = eps_ok and all(
                seq.entries[k].epsilon != seq.entries[k + 1].epsilon
                for k in range(len(seq.entries) - 1))
        ranks = rank_sequence(ctx, 0, nm)
        cong = all((b - a) % euler_phi_ppower(ctx.p, k + 2) == 0
                   for k, (a, b) in enumerate(zip(ranks, ranks[1:])))
        ok = report.add(f"epsilon {ctx.kind.value} p={ctx.p} W={ctx.w_phi:+d} "
                        f"f_phi={ctx.f_phi}",
                        "branch+congruence", "ok" if eps_ok and cong else "BAD",
                        eps_ok and cong)
        if fail_fast and not ok:
            return report
    return report


# ---------------------------------------------------------------------------

_MENUS = {"gauss": GAUSS_MENU, "inert-sign": INERT_MENU, "tower": TOWER_MENU,
          "twist": TWIST_MENU, "distribution": DIST_MENU}


def run_suite(name: str, sabotage_seed: int | None = None,
              fail_fast: bool = False, scale: str | None = None,
              precision: int = 8, tol: float = 1e-9) -> SuiteReport:
    if name not in _MENUS:
        raise ValueError(f"unknown suite {name!r}; pick from {SUITE_NAMES}")
    sab = None
    if sabotage_seed is not None:
        sab = Sabotage.from_seed(sabotage_seed, _MENUS[name])
        if scale is None:
            scale = REDUCED
    if scale is None:
        scale = FULL
    try:
        if name == "gauss":
            return suite_gauss(precision, tol, sab, fail_fast, scale)
        if name == "inert-sign":
            return suite_inert_sign(precision, tol, sab, fail_fast, scale)
        if name == "tower":
            return suite_tower(precision, sab, fail_fast, scale)
        if name == "twist":
            return suite_twist(max(precision, 10), tol, sab, fail_fast, scale)
        return suite_distribution(12, sab, fail_fast, scale)
    except PrecisionError as exc:
        report = SuiteReport(name)
        report.error = f"precision exhaustion: {exc}"
        return report
