"""Batch front-end: verification suites, single-shot computations, tables.

Exit codes: 0 success, 1 mathematical mismatch, 2 configuration error,
3 precision exhaustion.  JSON output uses sorted keys so reports
round-trip byte-identically.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .qmodz import QmodZ
from .quadring import (Kind, PrecisionError, default_discriminant,
                       make_algebra)
from .localcft import (conductor_of_level, decomposition_group_order,
                       eigenspace_structure)
from .rootnum import (TwistContext, constrained_characters,
                      global_twisted_root_number, l_class,
                      root_number_oracle, twist_quotient)
from .chargroup import AdditiveCharacter, canonical_additive
from .predictor import (distribution_series, epsilon_sequence,
                        expected_limits, mw_finitely_generated)
from .verify import SUITE_NAMES, run_suite

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_PRECISION = 0, 1, 2, 3


def _emit_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=1)


def _parse_sign(text: str) -> int:
    if text in ("+1", "1"):
        return 1
    if text == "-1":
        return -1
    raise ValueError(f"expected +1 or -1, got {text!r}")


def _parse_fourth_root(text: str) -> QmodZ:
    table = {"+1": QmodZ(0), "1": QmodZ(0), "-1": QmodZ(1, 2),
             "+i": QmodZ(1, 4), "i": QmodZ(1, 4), "-i": QmodZ(3, 4)}
    if text not in table:
        raise ValueError(f"expected one of +1,-1,+i,-i, got {text!r}")
    return table[text]


def _require(args: argparse.Namespace, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise ValueError("missing required parameter(s): "
                         + ", ".join("--" + n for n in missing))


def _root_number_json(value) -> dict:
    sym = value.symbol()
    return {
        "exact": sym if sym is not None else
                 (str(value.exact) if value.exact is not None else None),
        "approx": [value.approx.real, value.approx.imag],
    }


def _load_config(path: str) -> dict:
    """key = value lines; keys mirror long flag names, flags override."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


_CONFIG_TYPES = {
    "format": str, "precision": int, "tolerance": float, "p": int,
    "kind": str, "D": int, "f": int, "char_index": int, "psi_m": int,
    "j": int, "f_phi": int, "W_phi": str, "l1": int, "l2": int,
    "phi_pi": str, "n": int, "d": int, "n_from": int, "n_to": int,
    "N_max": int, "mode": str, "k": int, "suite": str, "sabotage": int,
    "out_dir": str,
}


def _apply_config(args: argparse.Namespace, argv):
    if not getattr(args, "config", None):
        return
    overrides = _load_config(args.config)
    argv = list(argv if argv is not None else sys.argv[1:])
    for key, val in overrides.items():
        if not hasattr(args, key) or key not in _CONFIG_TYPES:
            raise ValueError(f"unknown config key {key!r}")
        flag = "--" + key.replace("_", "-")
        if any(tok == flag or tok.startswith(flag + "=") for tok in argv):
            continue  # an explicit flag beats the file
        setattr(args, key, _CONFIG_TYPES[key](val))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file mirroring the flags")
    common.add_argument("--format", choices=("json", "csv", "human"),
                        default="human")
    common.add_argument("--precision", type=int, default=8,
                        help="pi-adic working precision N")
    common.add_argument("--tolerance", type=float, default=1e-9)

    ap = argparse.ArgumentParser(
        prog="heckeroot",
        description="Exact local root numbers of anticyclotomic twists, "
                    "rank-growth sequences, and their verification suites.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    v = add_parser("verify", help="run an oracle-vs-closed-form suite")
    v.add_argument("suite", choices=SUITE_NAMES + ("all",))
    v.add_argument("--sabotage", type=int, default=None, metavar="SEED",
                   help="negative control: corrupt one input and expect failure")

    r = add_parser("root-number", help="one local root number by Gauss sum")
    r.add_argument("--p", type=int, default=None)
    r.add_argument("--kind", default=None)
    r.add_argument("--D", type=int, default=None)
    r.add_argument("--f", type=int, default=None)
    r.add_argument("--char-index", type=int, default=0,
                   help="index into the constrained characters at level f")
    r.add_argument("--psi-m", type=int, default=None,
                   help="additive character parameter m (default canonical)")

    t = add_parser("twist", help="twisted root number from symbolic data")
    t.add_argument("--p", type=int, default=None)
    t.add_argument("--kind", default=None)
    t.add_argument("--j", type=int, default=0)
    t.add_argument("--f-phi", type=int, default=None)
    t.add_argument("--W-phi", default=None)
    t.add_argument("--l2", type=int, default=None)
    t.add_argument("--phi-pi", default=None)
    t.add_argument("--n", type=int, default=None)
    t.add_argument("--l1", type=int, default=None)
    t.add_argument("--d", type=int, default=1)

    w = add_parser("tower", help="eigenspace structure and level data")
    w.add_argument("--p", type=int, default=None)
    w.add_argument("--kind", default=None)
    w.add_argument("--D", type=int, default=None)
    w.add_argument("--k", type=int, default=None)
    w.add_argument("--n", type=int, default=None)
    w.add_argument("--j", type=int, default=0)

    e = add_parser("epsilon", help="rank-jump coefficients along the tower")
    e.add_argument("--kind", default=None)
    e.add_argument("--p", type=int, default=None)
    e.add_argument("--j", type=int, default=0)
    e.add_argument("--f-phi", type=int, default=None)
    e.add_argument("--W-phi", default=None)
    e.add_argument("--d", type=int, default=1)
    e.add_argument("--n-from", type=int, default=1)
    e.add_argument("--n-to", type=int, default=None)

    d = add_parser("distribution", help="vanishing-order parity series")
    d.add_argument("--kind", default=None)
    d.add_argument("--p", type=int, default=None)
    d.add_argument("--j", type=int, default=0)
    d.add_argument("--f-phi", type=int, default=None)
    d.add_argument("--W-phi", default=None)
    d.add_argument("--N-max", type=int, default=None)
    d.add_argument("--mode", choices=("case-machine", "enumerated"),
                   default="case-machine")

    b = add_parser("tables", help="regenerate the case tables as CSV")
    b.add_argument("--out-dir", default="tables")
    return ap


# ---------------------------------------------------------------------------
# subcommand bodies

def cmd_verify(args) -> int:
    suites = SUITE_NAMES if args.suite == "all" else (args.suite,)
    reports = [run_suite(name, sabotage_seed=args.sabotage,
                         precision=args.precision, tol=args.tolerance)
               for name in suites]
    if args.format == "json":
        payload = [{
            "suite": r.suite,
            "passed": r.passed,
            "failed": r.failed,
            "error": r.error,
            "instances": [{"key": i.key, "expected": i.expected,
                           "got": i.got, "ok": i.ok} for i in r.instances],
        } for r in reports]
        print(_emit_json(payload))
    else:
        for r in reports:
            for inst in r.instances:
                print(f"{'OK  ' if inst.ok else 'FAIL'} [{r.suite}] {inst.key}"
                      + ("" if inst.ok else f"  expected {inst.expected}, got {inst.got}"))
            status = "PASS" if r.ok else f"FAIL ({r.error or r.failed})"
            print(f"== suite {r.suite}: {r.passed}/{len(r.instances)} ok -> {status}")
    if any(r.error for r in reports):
        return EXIT_PRECISION
    return EXIT_OK if all(r.ok for r in reports) else EXIT_MISMATCH


def cmd_root_number(args) -> int:
    _require(args, "p", "kind", "f")
    kind = Kind.parse(args.kind)
    if kind is Kind.SPLIT:
        raise ValueError("split root numbers are componentwise; "
                         "use the inert/ramified oracle or the twist machine")
    D = args.D if args.D is not None else default_discriminant(args.p, kind)
    alg = make_algebra(args.p, kind, D, args.precision)
    psi = AdditiveCharacter(args.psi_m) if args.psi_m is not None \
        else canonical_additive(alg)
    if args.precision < args.f + psi.m + 2:
        raise ValueError(f"precision {args.precision} < f + m + 2")
    chars = list(constrained_characters(alg, max(args.f, 1), exact_f=args.f))
    if not 0 <= args.char_index < len(chars):
        raise ValueError(f"char-index out of range [0, {len(chars)})")
    chi = chars[args.char_index]
    value = root_number_oracle(chi, psi)
    l = None
    if kind is Kind.RAMIFIED and chi.conductor >= 2:
        l = l_class(chi)
    out = _root_number_json(value)
    out.update({"f": chi.conductor, "l_chi": l,
                "chi_pi": str(chi.at_pi), "p": args.p, "kind": kind.value,
                "D": D, "psi_m": psi.m})
    print(_emit_json(out) if args.format != "human" else
          f"W = {value.approx:.12g} (exact: {out['exact']}), f={chi.conductor}, l_chi={l}")
    return EXIT_OK


def cmd_twist(args) -> int:
    _require(args, "p", "kind", "f-phi", "W-phi", "n")
    kind = Kind.parse(args.kind)
    ctx = TwistContext(kind, args.p, args.j, args.f_phi,
                       _parse_sign(args.W_phi), d=args.d, l2=args.l2,
                       phi_pi=_parse_fourth_root(args.phi_pi)
                       if args.phi_pi else None)
    result = global_twisted_root_number(ctx, args.n, l1=args.l1)
    quotient = twist_quotient(ctx, args.n, l1=args.l1)
    out = {
        "W_chi": "+1" if result.value == 1 else "-1",
        "quotient": "+1" if quotient.quotient == 1 else "-1",
        "branch": result.branch,
        "assumed": result.assumed,
        "notes": list(result.notes),
    }
    print(_emit_json(out) if args.format != "human" else
          f"W(chi) = {out['W_chi']} (quotient {out['quotient']}, branch {result.branch})")
    return EXIT_OK


def cmd_tower(args) -> int:
    _require(args, "p", "kind")
    kind = Kind.parse(args.kind)
    out = {"p": args.p, "kind": kind.value}
    if args.k is not None:
        D = args.D if args.D is not None else default_discriminant(args.p, kind)
        alg = make_algebra(args.p, kind, D, max(args.precision, args.k))
        eig = eigenspace_structure(alg, args.k)
        out.update({"D": D, "k": args.k, "plus": list(eig.plus),
                    "minus": list(eig.minus)})
    if args.n is not None:
        out.update({
            "n": args.n, "j": args.j,
            "f_rho": conductor_of_level(kind, args.n, args.j),
            "group_order": decomposition_group_order(args.p, kind, args.n, args.j),
        })
    if args.k is None and args.n is None:
        raise ValueError("give --k (eigenspaces) and/or --n (level data)")
    print(_emit_json(out) if args.format != "human" else str(out))
    return EXIT_OK


def cmd_epsilon(args) -> int:
    _require(args, "kind", "p", "f-phi", "W-phi", "n-to")
    ctx = TwistContext(Kind.parse(args.kind), args.p, args.j, args.f_phi,
                       _parse_sign(args.W_phi), d=args.d)
    seq = epsilon_sequence(ctx, args.n_from, args.n_to)
    rows = [(e.n, e.epsilon, e.phi_pn, e.rank_delta, e.regime)
            for e in seq.entries]
    if args.format == "json":
        print(_emit_json([{"n": n, "epsilon_n": e, "phi_pn": w,
                           "rank_delta": rd, "regime": reg}
                          for n, e, w, rd, reg in rows]))
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(["n", "epsilon_n", "phi_pn", "rank_delta", "regime"])
        writer.writerows(rows)
    return EXIT_OK


def cmd_distribution(args) -> int:
    _require(args, "kind", "p", "f-phi", "W-phi", "N-max")
    ctx = TwistContext(Kind.parse(args.kind), args.p, args.j, args.f_phi,
                       _parse_sign(args.W_phi))
    ds = distribution_series(ctx, args.N_max, mode=args.mode)
    want = expected_limits(ctx)
    matches = ds.limits == want if ds.limits is not None else None
    notes = []
    if ctx.kind is Kind.INERT:
        notes.append("limit rows computed from the sign case machine; the "
                     "even-N/odd-N pairing follows the oracle-validated "
                     "alternation")
    out = {
        "series": [{"N": n, "P_plus": str(ds.p_plus[n]),
                    "P_minus": str(ds.p_minus[n])}
                   for n in range(args.N_max + 1)],
        "limits": _limits_json(ds.limits),
        "matches_paper_table": matches,
        "finitely_generated": mw_finitely_generated(ctx),
        "assumed_levels": list(ds.assumed_levels),
        "mode": ds.mode,
        "notes": notes,
    }
    print(_emit_json(out) if args.format != "human" else
          "\n".join(f"N={row['N']:2d}  P+ = {row['P_plus']:>12s}  "
                    f"P- = {row['P_minus']:>12s}" for row in out["series"])
          + f"\nlimits: {out['limits']}  matches: {matches}")
    return EXIT_OK


def _limits_json(limits):
    if limits is None:
        return None
    return {
        "shape": limits.shape,
        "P_plus_even_N": str(limits.plus_even),
        "P_plus_odd_N": str(limits.plus_odd),
        "P_minus_even_N": str(limits.minus_even),
        "P_minus_odd_N": str(limits.minus_odd),
    }


def cmd_tables(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    # rank-jump table: every kind x sign x parity cell, from the case machine
    with open(out_dir / "rank_jump_table.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "j_plus_f_parity", "W_phi",
                    "epsilon_even_n", "epsilon_odd_n"])
        for kind in (Kind.SPLIT, Kind.INERT, Kind.RAMIFIED):
            for parity in (0, 1):
                if kind is not Kind.INERT and parity == 1:
                    continue
                for wphi in (1, -1):
                    f_phi = parity if kind is Kind.INERT else \
                        (1 if kind is Kind.RAMIFIED else 0)
                    ctx = TwistContext(kind, 3, 0, f_phi, wphi)
                    seq = epsilon_sequence(ctx, 1, 2)
                    eps = {e.n % 2: e.epsilon for e in seq.entries}
                    w.writerow([kind.value, parity if kind is Kind.INERT else "",
                                f"{wphi:+d}", f"{eps[0]}d", f"{eps[1]}d"])

    # distribution-limit table, computed from the exact series
    with open(out_dir / "distribution_limits_table.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "p", "j_plus_f_parity", "W_phi", "P_plus_even_N",
                    "P_plus_odd_N", "P_minus_even_N", "P_minus_odd_N"])
        for kind, parities in ((Kind.SPLIT, (0,)), (Kind.INERT, (0, 1)),
                               (Kind.RAMIFIED, (0,))):
            for parity in parities:
                for wphi in (1, -1):
                    f_phi = parity if kind is Kind.INERT else \
                        (1 if kind is Kind.RAMIFIED else 0)
                    ctx = TwistContext(kind, 3, 0, f_phi, wphi)
                    lim = distribution_series(ctx, 12).limits
                    w.writerow([kind.value, 3,
                                parity if kind is Kind.INERT else "",
                                f"{wphi:+d}", lim.plus_even, lim.plus_odd,
                                lim.minus_even, lim.minus_odd])

    # ramified twist branch table with symbolic entries
    with open(out_dir / "ramified_twist_branches.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p_mod_4", "conductor_relation", "quotient"])
        rows = [
            ("1", "f_rho > f_phi > 1", "(l1 * l2^-1 | p)"),
            ("1", "f_rho = f_phi > 1", "(l1 * l2^-1 | p)"),
            ("1", "f_rho < f_phi, f_phi > 1", "1"),
            ("1", "f_rho > f_phi = 1", "(l1 | p) * phi_pi"),
            ("3", "f_rho > f_phi > 1", "(l1 * l2^-1 | p) * (-1)^((f_rho - f_phi)/2)"),
            ("3", "f_rho = f_phi > 1", "(l1 * l2^-1 | p)"),
            ("3", "f_rho < f_phi, f_phi > 1", "1"),
            ("3", "f_rho > f_phi = 1", "(l1 | p) * (-1)^(f_rho/2 + 1) * i / phi_pi"),
        ]
        w.writerows(rows)
    print(f"wrote 3 tables under {out_dir}/")
    return EXIT_OK


_COMMANDS = {
    "verify": cmd_verify,
    "root-number": cmd_root_number,
    "twist": cmd_twist,
    "tower": cmd_tower,
    "epsilon": cmd_epsilon,
    "distribution": cmd_distribution,
    "tables": cmd_tables,
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        _apply_config(args, argv)
    except (ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args)
    except PrecisionError as exc:
        print(f"precision exhaustion: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (ValueError, ArithmeticError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
