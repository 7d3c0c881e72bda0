"""Command-line front end.

Exit codes: 0 on success, 1 when a checked invariant fails, 2 on bad input.
"""

import argparse
import sys

import numpy as np

from . import __version__
from .equidiag import DEFAULT_TOL, equi_diagonalize, read_matrix_file
from .errors import ConvergenceError, DimensionError, NormalizationError, ParseError, UsageError
from .locc import (MAX_LEAVES, PROTOCOL_TOL, check_stage_cascade, completeness_defect,
                   leaf_overlap_sum, locc_distance, run_locc)
from .measure import global_distance
from .mixed import random_density_pair, read_density_file, transition_equidiag_gap
from .oracle import SearchConfig, optimize_global_measurement, sample_bound_check
from .rand import GENERATOR_ID, ginibre, make_rng
from .report import Report, emit_report, format_report
from .selftest import run_checks
from .statekit import inner_product, random_state_pair, read_state_file

DEFAULTS = {
    "tol_equidiag": DEFAULT_TOL,
    "tol_protocol": PROTOCOL_TOL,
    "leaf_cap": MAX_LEAVES,
    "restarts": 8,
    "steps": 400,
}


def _ints(text):
    return tuple(int(x) for x in text.replace(",", " ").split())


def build_parser():
    p = argparse.ArgumentParser(prog="loccdist", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=None,
                        help="equi-diagonalization tolerance (default: 1e-10 x matrix scale)")
        sp.add_argument("--out", default=None, help="also write the report here")

    for name, helptext in [("pure", "overlap and global distance"),
                           ("locc", "run the LOCC protocol and print its transcript")]:
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--states", help="state file holding two states")
        sp.add_argument("--dims", type=_ints, default=(2, 2),
                        help='layout for a random pair when --states is absent, e.g. "2 3"')
        if name == "locc":
            sp.add_argument("--order", type=_ints, default=None, help='party order, e.g. "2 0 1"')

    sp = sub.add_parser("equidiag", help="equi-diagonalize a matrix")
    common(sp)
    sp.add_argument("--matrix", help="matrix file; a random matrix is used when absent")
    sp.add_argument("--dim", type=int, default=4)

    sp = sub.add_parser("oracle", help="brute-force bound and tightness checks")
    common(sp)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--restarts", type=int, default=DEFAULTS["restarts"])
    sp.add_argument("--steps", type=int, default=DEFAULTS["steps"])
    sp.add_argument("--states", help="state pair for the tightness search")

    sp = sub.add_parser("mixed", help="Bures angle and the transition-operator measurement")
    common(sp)
    sp.add_argument("--rho1")
    sp.add_argument("--rho2")
    sp.add_argument("--dim", type=int, default=2)

    sp = sub.add_parser("selftest", help="run the invariant sweep")
    sp.add_argument("--out", default=None)
    return p


def _new_report(args, config):
    return Report(args.command, __version__, GENERATOR_ID,
                  config={**config, **{f"default.{k}": v for k, v in DEFAULTS.items()}})


def _state_pair(args, config):
    if args.states:
        states = read_state_file(args.states)
        if len(states) != 2:
            raise UsageError(f"{args.states} holds {len(states)} state(s); need two")
        config["states"] = args.states
        return states
    config["dims"] = list(args.dims)
    config["seed"] = args.seed
    return random_state_pair(args.dims, args.seed)


def _add_degrees(r):
    # every distance also in degrees, listed after the radian values
    for key in [k for k in r.values if k.startswith("d_")]:
        r.values[f"{key}_deg"] = float(np.degrees(r.values[key]))


def _split(z):
    return float(np.real(z)), float(np.imag(z))


def cmd_pure(args):
    config = {}
    s1, s2 = _state_pair(args, config)
    if s1.layout != s2.layout:
        raise DimensionError(f"layouts differ: {s1.layout.dims} vs {s2.layout.dims}")
    r = _new_report(args, config)
    o = inner_product(s1, s2)
    r.values["overlap_re"], r.values["overlap_im"] = _split(o)
    r.values["d_global"] = global_distance(s1, s2)
    return r


def cmd_locc(args):
    config = {}
    s1, s2 = _state_pair(args, config)
    if s1.layout != s2.layout:
        raise DimensionError(f"layouts differ: {s1.layout.dims} vs {s2.layout.dims}")
    config["order"] = list(args.order) if args.order else list(range(s1.layout.n_parties))
    config["tol"] = args.tol if args.tol is not None else "default"
    r = _new_report(args, config)
    t = run_locc(s1, s2, args.order, tol=args.tol)
    cascade = check_stage_cascade(t)
    d_global = global_distance(s1, s2)
    d_locc = locc_distance(t)
    r.values["overlap_re"], r.values["overlap_im"] = _split(t.overlap)
    r.values["d_global"] = d_global
    r.values["d_locc"] = d_locc
    r.values["leaf_abs_sum"] = leaf_overlap_sum(t)
    r.values["cascade_sibling"] = cascade.sibling
    r.values["cascade_parent"] = cascade.parent
    r.values["cascade_telescope"] = cascade.telescope
    r.values["completeness_defect"] = completeness_defect(t)
    r.table_name = "leaves"
    r.table_header = ("outcome", "amp_re", "amp_im", "p1", "p2")
    r.rows = [(leaf.label, *_split(leaf.amplitude), leaf.p1, leaf.p2) for leaf in t.leaves]
    if abs(d_locc - d_global) > PROTOCOL_TOL:
        r.violations.append(f"LOCC distance {d_locc:.17g} differs from global distance {d_global:.17g}")
    if cascade.worst() > PROTOCOL_TOL:
        r.violations.append(f"stage-amplitude cascade violated by {cascade.worst():.3e}")
    return r


def cmd_equidiag(args):
    config = {"tol": args.tol if args.tol is not None else "default"}
    if args.matrix:
        m = read_matrix_file(args.matrix)
        config["matrix"] = args.matrix
    else:
        m = ginibre(make_rng(args.seed), args.dim)
        config.update(dim=args.dim, seed=args.seed)
    r = _new_report(args, config)
    res = equi_diagonalize(m, args.tol)
    n = m.shape[0]
    r.values["dim"] = n
    r.values["tau_re"], r.values["tau_im"] = _split(res.tau)
    r.values["residual"] = res.residual
    r.values["unitarity_defect"] = float(np.max(np.abs(res.basis.conj().T @ res.basis - np.eye(n))))
    r.table_name = "basis"
    r.table_header = ("row", "col", "re", "im")
    r.rows = [(i, j, *_split(res.basis[i, j])) for i in range(n) for j in range(n)]
    return r


def cmd_oracle(args):
    config = {"dim": args.dim, "trials": args.trials, "seed": args.seed,
              "restarts": args.restarts, "steps": args.steps}
    cfg = SearchConfig(restarts=args.restarts, steps=args.steps, seed=args.seed)
    if args.states:
        states = read_state_file(args.states)
        if len(states) != 2:
            raise UsageError(f"{args.states} holds {len(states)} state(s); need two")
        s1, s2 = states
        config["states"] = args.states
    else:
        s1, s2 = random_state_pair([args.dim], args.seed)
    r = _new_report(args, config)
    violation = sample_bound_check(args.dim, args.trials, args.seed)
    best, basis = optimize_global_measurement(s1, s2, cfg)
    d_global = global_distance(s1, s2)
    r.values["bound_max_violation"] = violation
    r.values["d_global"] = d_global
    r.values["d_search"] = best
    r.values["search_shortfall"] = d_global - best
    if violation > 1e-12:
        r.violations.append(f"measurement bound violated by {violation:.3e}")
    if best > d_global + 1e-12:
        r.violations.append(f"search exceeded the global distance by {best - d_global:.3e}")
    return r


def cmd_mixed(args):
    config = {"dim": args.dim, "seed": args.seed}
    if args.rho1 or args.rho2:
        if not (args.rho1 and args.rho2):
            raise UsageError("--rho1 and --rho2 must be given together")
        r1, r2 = read_density_file(args.rho1), read_density_file(args.rho2)
        config = {"rho1": args.rho1, "rho2": args.rho2}
    else:
        r1, r2 = random_density_pair(args.dim, args.seed)
    r = _new_report(args, config)
    g = transition_equidiag_gap(r1, r2)
    r.values["d_bures"] = g.d_bures
    r.values["d_equidiag"] = g.d_equidiag
    r.values["gap"] = g.gap
    if g.gap < -1e-9:
        r.violations.append(f"equi-diagonal measurement exceeded the Bures angle by {-g.gap:.3e}")
    return r


def cmd_selftest(args):
    r = Report("selftest", __version__, GENERATOR_ID)
    r.table_name = "checks"
    r.table_header = ("check", "value", "tolerance", "status")
    for name, value, tol, ok in run_checks():
        r.rows.append((name, value, tol, "PASS" if ok else "FAIL"))
        if not ok:
            r.violations.append(f"{name}: {value:.3e} > {tol:.1e}")
    r.values["checks"] = len(r.rows)
    r.values["failed"] = len(r.violations)
    return r


COMMANDS = {
    "pure": cmd_pure,
    "locc": cmd_locc,
    "equidiag": cmd_equidiag,
    "oracle": cmd_oracle,
    "mixed": cmd_mixed,
    "selftest": cmd_selftest,
}


def run_command(argv):
    """Parse ``argv``, run it and write ``--out`` if given.

    Returns ``(exit_code, report)``; the report is ``None`` on bad input.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (0 if exc.code == 0 else 2), None
    try:
        if getattr(args, "tol", None) is not None and args.tol <= 0:
            raise UsageError("--tol must be positive")
        report = COMMANDS[args.command](args)
        _add_degrees(report)
    except (ParseError, DimensionError, UsageError, NormalizationError, OSError) as exc:
        print(f"loccdist: error: {exc}", file=sys.stderr)
        return 2, None
    except ConvergenceError as exc:
        print(f"loccdist: equi-diagonalization failed: {exc}", file=sys.stderr)
        return 1, None
    if args.out:
        try:
            emit_report(report, args.out)
        except OSError as exc:
            print(f"loccdist: cannot write report: {exc}", file=sys.stderr)
            return 2, report
    return (1 if report.violations else 0), report


def main(argv=None):
    code, report = run_command(sys.argv[1:] if argv is None else argv)
    if report is not None:
        sys.stdout.write(format_report(report))
        for msg in report.violations:
            print(f"loccdist: invariant violated: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
