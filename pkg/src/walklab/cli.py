"""Command-line front end.

Subcommands: validate, compute, kernels, verify, report.  Exit codes:
0 success, 1 computation or verification failure, 2 usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import engine, report, verify
from .asymptotics import TheoremId
from .errors import WalklabError
from .kernels import build_kernels
from .laws import lattice_structure, load_law, moments


def _ints(s: str):
    return tuple(int(v) for v in s.split(","))


def _floats(s: str):
    return tuple(float(v) for v in s.split(","))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="walklab",
        description="Exact kernels and asymptotic laws for mean-zero "
                    "lattice walks with absorption.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="validate a step-law config")
    v.add_argument("--law", required=True)

    c = sub.add_parser("compute", help="emit an n-step kernel slice as CSV")
    c.add_argument("--law", required=True)
    c.add_argument("--mode", required=True,
                   choices=["free", "point", "halfline", "partial"])
    c.add_argument("--x", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--alpha", type=float, default=0.5)
    c.add_argument("--out", required=True)

    k = sub.add_parser("kernels", help="build and dump potential/ladder "
                                       "tables and constants")
    k.add_argument("--law", required=True)
    k.add_argument("--out-dir", required=True)
    k.add_argument("--table-window", type=int, default=80)
    k.add_argument("--pair-window", type=int, default=400)

    w = sub.add_parser("verify", help="compare a limit theorem against "
                                      "the exact engine on a scaled grid")
    w.add_argument("--law", required=True)
    w.add_argument("--theorem", required=True,
                   choices=[t.value for t in TheoremId])
    w.add_argument("--xi", type=_floats, default=(0.2,))
    w.add_argument("--eta", type=_floats, default=(0.2,))
    w.add_argument("--n", type=_ints, default=(256, 1024, 4096))
    w.add_argument("--alpha", type=float, default=0.5)
    w.add_argument("--ell", type=float, default=1.0)
    w.add_argument("--a-circ", type=float, default=2.0)
    w.add_argument("--ys", type=_ints, default=None,
                   help="literal y values (entrance-law theorems)")
    w.add_argument("--tol", type=float, default=0.15,
                   help="max relative error at the largest n "
                        "(engineering calibration)")
    w.add_argument("--out", required=True)
    w.add_argument("--summary", default=None)

    r = sub.add_parser("report", help="run the invariant suite and emit "
                                      "a summary")
    r.add_argument("--law", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--n-big", type=int, default=4096)
    return p


def cmd_validate(args) -> int:
    law = load_law(args.law)
    m = moments(law)
    s = lattice_structure(law)
    print(f"law {law.name}: valid")
    print(f"  sigma2 = {m.sigma2}, E[Y^3] = {m.m3}, lambda3 = {m.lambda3}")
    print(f"  period = {s.period}, congruence class = {s.shift}")
    print(f"  left_continuous = {m.left_continuous}, "
          f"right_continuous = {m.right_continuous}")
    return 0


def cmd_compute(args) -> int:
    law = load_law(args.law)
    if args.mode == "free":
        sl = engine.evolve_free(law, args.x, args.n)
    elif args.mode == "point":
        sl, _ = engine.absorbed_at_origin(law, args.x, args.n)
    elif args.mode == "halfline":
        sl, _ = engine.absorbed_on_halfline(law, args.x, args.n)
    else:
        sl = engine.partial_absorption(law, args.alpha, args.x, args.n)
    report.emit_slice(sl, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_kernels(args) -> int:
    law = load_law(args.law)
    k = build_kernels(law, table_X=args.table_window, pair_X=args.pair_window)
    os.makedirs(args.out_dir, exist_ok=True)
    report.emit_potential_table(k, os.path.join(args.out_dir, "potential.csv"))
    report.emit_harmonic_tables(k, os.path.join(args.out_dir, "harmonic.csv"))
    report.emit_entrance_laws(k, os.path.join(args.out_dir, "entrance.csv"))
    report.atomic_write(os.path.join(args.out_dir, "constants.txt"),
                        report.constants_block(k))
    print(report.constants_block(k), end="")
    return 0


def cmd_verify(args) -> int:
    law = load_law(args.law)
    k = build_kernels(law)
    spec = verify.GridSpec(
        theorem=TheoremId(args.theorem), ns=args.n, xis=args.xi,
        etas=args.eta, a_circ=args.a_circ, alpha=args.alpha, ell=args.ell,
        ys_literal=args.ys)
    rep = verify.compare_grid(spec, k)
    slopes = verify.convergence_report([rep])
    report.emit_comparison(rep, args.out)
    text = report.summary_text([rep], slopes, k)
    if args.summary:
        report.atomic_write(args.summary, text)
    print(text, end="")
    final_err = rep.max_rel_err(max(args.n))
    if rep.rows and final_err > args.tol:
        print(f"FAIL: max rel_err {final_err:.3g} at n={max(args.n)} "
              f"exceeds tol {args.tol}")
        return 1
    print(f"PASS: max rel_err {final_err:.3g} at n={max(args.n)}")
    return 0


def cmd_report(args) -> int:
    law = load_law(args.law)
    k = build_kernels(law)
    results = verify.invariant_suite(law, k, n_big=args.n_big)
    text = report.constants_block(k) + report.invariants_text(results)
    report.atomic_write(args.out, text)
    print(text, end="")
    return 1 if any(r.status == "fail" for r in results) else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"validate": cmd_validate, "compute": cmd_compute,
                "kernels": cmd_kernels, "verify": cmd_verify,
                "report": cmd_report}
    try:
        return handlers[args.command](args)
    except WalklabError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
