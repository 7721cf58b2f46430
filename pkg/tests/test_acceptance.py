"""Acceptance gate: one criterion per test, one printed verdict line each.

Run as `pytest tests/test_acceptance.py -v -s` for the live verdict lines.
Every tolerance is pinned here; nothing is deferred to later calibration.
"""

import time
from fractions import Fraction

from heckeroot.qmodz import QmodZ
from heckeroot.quadring import Kind, make_algebra
from heckeroot.chargroup import multiply_characters
from heckeroot.localcft import tower_character
from heckeroot.rootnum import (TwistContext, constrained_characters,
                               relative_root_inert_sign,
                               relative_root_ramified_closed,
                               relative_root_oracle, root_number_oracle,
                               twist_quotient)
from heckeroot.predictor import (distribution_series, epsilon_sequence,
                                 euler_phi_ppower, expected_limits,
                                 inert_mass_formulas, rank_sequence)
from heckeroot.verify import (SUITE_NAMES, run_suite, suite_distribution,
                              suite_gauss, suite_inert_sign, suite_tower,
                              suite_twist)

TOL = 1e-9


def _verdict(num, name, ok, detail):
    print(f"ACCEPTANCE {num} [{name}]: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num} ({name}) failed: {detail}"


def test_criterion_1_gauss_vs_closed_form():
    t0 = time.time()
    report = suite_gauss(precision=8, tol=TOL)
    dt = time.time() - t0
    ok = report.ok and dt < 60
    _verdict(1, "ramified closed form vs Gauss oracle", ok,
             f"{len(report.instances)} characters, {report.failed} mismatches, "
             f"{dt:.1f}s")


def test_criterion_2_inert_sign_law():
    t0 = time.time()
    report = suite_inert_sign(precision=8, tol=TOL)
    dt = time.time() - t0
    ok = report.ok and dt < 60
    _verdict(2, "inert sign law vs Gauss oracle", ok,
             f"{len(report.instances)} characters, {report.failed} mismatches, "
             f"{dt:.1f}s")


def test_criterion_3_tower_structure():
    report = suite_tower(precision=8)
    eig = sum(1 for i in report.instances if i.key.startswith("eig"))
    lev = sum(1 for i in report.instances if i.key.startswith("level"))
    ok = report.ok and eig == 30 and lev == 98
    _verdict(3, "tower eigenspaces and conductor grid", ok,
             f"{eig} eigenspace cells + {lev} level cells, "
             f"{report.failed} mismatches, exact")


def test_criterion_4_twist_quotient_cross_validation():
    t0 = time.time()
    report = suite_twist(precision=10, tol=TOL)
    dt = time.time() - t0
    pairs = sum(1 for i in report.instances if not i.key.startswith("zero-sum"))
    ok = report.ok and dt < 300
    _verdict(4, "twist quotient vs oracle over every seed", ok,
             f"{pairs} (phi, rho) pairs, {report.failed} mismatches, {dt:.1f}s")


def test_criterion_5_ramified_zero_sum():
    checked = 0
    ok = True
    for p, D in ((3, 6), (5, 5)):
        alg = make_algebra(p, Kind.RAMIFIED, D, 10)
        for f_phi in (1, 2):
            for phi in constrained_characters(alg, f_phi, exact_f=f_phi):
                ctx = TwistContext.from_character(phi, w_phi=1, j=0)
                ds = distribution_series(ctx, 2, mode="enumerated")
                for n in (1, 2):
                    if 2 * n <= f_phi:
                        continue  # outside the stable regime
                    plus, minus = ds.level_counts[n]
                    half = euler_phi_ppower(p, n) // 2
                    ok = ok and plus == half and minus == half
                    checked += 1
    _verdict(5, "ramified half-and-half sign counts", ok,
             f"{checked} (phi, level) cells, exact")


def test_criterion_6_distribution_series():
    ok = True
    rows = 0
    for p in (3, 5, 7):
        for w in (1, -1):
            for f_phi in (0, 1):  # the four inert table rows via j+f parity
                ctx = TwistContext(Kind.INERT, p, 0, f_phi, w)
                ds = distribution_series(ctx, 12)
                even_sign = w if f_phi % 2 else -w
                for N in range(1, 13):
                    even_mass, odd_mass = inert_mass_formulas(p, N)
                    want = even_mass if even_sign == 1 else odd_mass
                    ok = ok and ds.p_plus[N] == want \
                        and ds.p_minus[N] == 1 - want
                ok = ok and ds.limits == expected_limits(ctx)
                ok = ok and {ds.limits.plus_even, ds.limits.plus_odd} == \
                    {Fraction(1, p + 1), Fraction(p, p + 1)}
                rows += 1
            split = distribution_series(TwistContext(Kind.SPLIT, p, 0, 0, w), 12)
            ok = ok and split.limits == expected_limits(
                TwistContext(Kind.SPLIT, p, 0, 0, w))
            ok = ok and all(v == (1 if w == 1 else 0) for v in split.p_plus)
            ram = distribution_series(TwistContext(Kind.RAMIFIED, p, 0, 1, w), 12)
            ok = ok and ram.limits.plus_even == Fraction(1, 2) \
                and ram.limits.shape == "single"
            for N in range(1, 13):
                lead = (1 + w * Fraction(1, p ** N)) / 2
                ok = ok and ram.p_plus[N] == lead
            rows += 2
    _verdict(6, "distribution partial sums and limit table", ok,
             f"{rows} (kind, sign, parity) rows at N <= 12, exact rationals")


def test_criterion_7_rank_jump_table():
    ok = True
    cells = 0
    for p in (3, 5, 7):
        for w in (1, -1):
            s = epsilon_sequence(TwistContext(Kind.SPLIT, p, 0, 0, w), 1, 8)
            ok = ok and all(e.epsilon == (0 if w == 1 else 2)
                            for e in s.entries)
            r = epsilon_sequence(TwistContext(Kind.RAMIFIED, p, 0, 1, w,
                                              d=2), 1, 8)
            ok = ok and all(e.epsilon == 2 for e in r.entries)
            cells += 2
            for f_phi in (0, 1):
                ctx = TwistContext(Kind.INERT, p, 0, f_phi, w)
                seq = epsilon_sequence(ctx, 1, 8)
                eps = [e.epsilon for e in seq.entries]
                w_tilde = (1 - w) // 2
                if f_phi % 2 == 0:  # j + f even: 2d iff n = W~ mod 2
                    want = [2 if n % 2 == w_tilde % 2 else 0
                            for n in range(1, 9)]
                else:
                    want = [0 if n % 2 == w_tilde % 2 else 2
                            for n in range(1, 9)]
                ok = ok and eps == want
                ranks = [0] + rank_sequence(ctx, 0, 8)
                ok = ok and all(
                    (ranks[n] - ranks[n - 1]) % euler_phi_ppower(p, n) == 0
                    for n in range(1, 9))
                cells += 1
    _verdict(7, "rank-jump branch table and congruence", ok,
             f"{cells} branch cells over p in (3,5,7), exact")


def test_criterion_8_negative_controls():
    undetected = []
    for name in SUITE_NAMES:
        for seed in range(10):
            report = run_suite(name, sabotage_seed=seed, fail_fast=True)
            if report.ok:
                undetected.append((name, seed))
    _verdict(8, "mutation checks", not undetected,
             f"{len(SUITE_NAMES) * 10} perturbations, "
             f"undetected: {undetected or 'none'}")
