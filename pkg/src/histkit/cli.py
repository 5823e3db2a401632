"""``histkit`` command line: seeded demonstrations that write JSON/CSV artifacts.

Each subcommand is a thin adapter over the library. It writes a
``manifest.json`` plus its data files into ``--out``; data files depend
only on the arguments, so reruns are byte-identical. The manifest keeps
its run timestamp under a separate ``run`` key.

Exit codes: 0 success, 1 usage (including arguments rejected by a
precondition), 2 numerical check failed, 3 I/O error.
"""
import argparse
import datetime
import json
import math
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__, _kernels, io
from .bell import (
    facet_report,
    optimize_chsh_axes,
    singlet_correlation,
    tsirelson_rescale_check,
)
from .config import load_tolerances
from .errors import HistkitError, ValidationError
from .histories import HistoryFamily, frequency_distribution, is_delta_consistent
from .models import (
    LocalChannel,
    SingletSystem,
    double_slit_frequencies,
    evidence_curve,
    golden_double_slit,
    marginal_isospectrality,
    marginal_shift,
    no_signaling_check,
    singlet_frequencies,
)
from .operators import SIGMA_X, SIGMA_Y, State, uncertainty_check
from .repair import check_report, repair_history, repair_threshold
from .sampling import (
    near_commuting_history,
    random_classical_correlation,
    random_deterministic_correlation,
    random_hermitian,
    random_kraus,
    random_outcome_family,
    random_pure_state,
    random_quantum_correlation,
    random_state,
    random_unit_vector,
    rng_from,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

# (command, backing topic, one-line summary) in display order
DEMOS = [
    ("chsh", "Tsirelson bound", "optimal singlet axes reach the CHSH value 2*sqrt(2)"),
    ("polytope", "classical polytope", "CHSH facets and Tsirelson rescaling on random samples"),
    ("repair", "consistency repair", "repair a near-consistent history; distances vs C_n bounds"),
    ("history", "master formula", "frequency distribution of a random history family"),
    ("double-slit", "interference, dephasing", "screen frequencies, interference and evidence vs coupling"),
    ("singlet", "EPR singlet", "singlet frequencies and perfect anticorrelation on random axes"),
    ("no-signal", "no-signaling", "far marginal under random local channels"),
    ("marginals", "entangled marginals", "isospectral marginals of random pure bipartite states"),
    ("uncertainty", "uncertainty relation", "uncertainty relation on random states and observables"),
]


class NumericalFailure(Exception):
    """A checked bound did not hold; carries the summary to write anyway."""


class Run:
    """Output plumbing shared by the subcommands."""

    def __init__(self, args, tolerances):
        self.args = args
        self.tol = tolerances
        self.out = Path(args.out)
        self.files = []

    def json(self, name, obj):
        self._write(name, io.dumps(obj))

    def table(self, name, header, rows):
        if self.args.format == "csv":
            self._write(f"{name}.csv", io.table_to_csv(header, rows))
        else:
            self._write(f"{name}.json", io.table_to_json(header, rows))

    def _write(self, name, text):
        (self.out / name).write_text(text, encoding="utf-8", newline="\n")
        self.files.append(name)


def _trials(args, default):
    return default if args.trials is None else args.trials


def cmd_chsh(run):
    opt = optimize_chsh_axes()
    alice, bob = opt.axes[:2], opt.axes[2:]
    gamma = singlet_correlation(alice, bob)
    rep = facet_report(gamma)
    target = 2.0 * math.sqrt(2.0)
    run.json("optimal_axes.json", {
        "schema_version": io.SCHEMA_VERSION,
        "angles_deg": {k: math.degrees(a) for k, a in zip("tuvw", opt.angles)},
        "axes": {k: [float(x) for x in ax] for k, ax in zip("tuvw", opt.axes)},
        "value": opt.value,
        "error": opt.value - target,
    })
    run.json("facets.json", io.facet_report_to_json(rep))
    if run.args.format == "csv":
        run._write("correlation.csv", io.correlation_to_csv(gamma.gamma))
    else:
        run.json("correlation.json", {"gamma": gamma.gamma.tolist()})
    if abs(rep.max_abs - target) > run.tol["chsh"]:
        raise NumericalFailure(f"max facet {rep.max_abs!r} differs from 2*sqrt(2)")
    return {"max_facet": rep.max_abs}


def cmd_polytope(run):
    rng = rng_from(run.args.seed)
    trials = _trials(run.args, 1000)
    rows = []
    worst = {"deterministic": 0.0, "mixture": 0.0, "quantum": 0.0, "quantum_rescaled": 0.0}
    rescaled_ok = True
    for i in range(trials):
        for kind, g in (
            ("deterministic", random_deterministic_correlation(rng)),
            ("mixture", random_classical_correlation(rng)),
            ("quantum", random_quantum_correlation(rng)),
        ):
            rep = facet_report(g)
            rows.append([i, kind, rep.max_abs])
            worst[kind] = max(worst[kind], rep.max_abs)
            if kind == "quantum":
                res = tsirelson_rescale_check(g)
                rescaled_ok &= res.classical
                worst["quantum_rescaled"] = max(worst["quantum_rescaled"], facet_report(res.scaled).max_abs)
    run.table("samples", ["trial", "kind", "max_abs_facet"], rows)
    summary = {"trials": trials, "max_abs_facet": worst, "rescaled_all_classical": rescaled_ok}
    if max(worst["deterministic"], worst["mixture"]) > 2.0 + run.tol["facet"] or not rescaled_ok:
        raise NumericalFailure("classical facet bound violated", summary)
    return summary


def cmd_repair(run):
    rng = rng_from(run.args.seed)
    n, dim = run.args.n or 3, run.args.dim or 8
    events = near_commuting_history(rng, n, dim, 1e-5)
    eps = run.args.epsilon if run.args.epsilon is not None else repair_threshold(n) / 2
    report = repair_history(events, eps)
    run.json("repair_report.json", dict(io.repair_report_to_json(report), schema_version=io.SCHEMA_VERSION))
    rows = [
        [j, d, b, r if r is not None else "", c]
        for j, (d, b, r, c) in enumerate(
            zip(report.per_step_distance, report.per_step_bound, report.ratios(), report.commutator_residuals + [0.0]),
            start=1,
        )
    ]
    run.table("distances", ["slot", "distance", "bound", "ratio", "commutator_residual"], rows)
    try:
        check_report(report, run.tol["commutator"])
    except ValidationError as exc:
        raise NumericalFailure(str(exc)) from None
    return {"n": n, "dim": dim, "epsilon": eps, "bounds_satisfied": report.bounds_satisfied()}


def cmd_history(run):
    rng = rng_from(run.args.seed)
    n, dim = run.args.n or 3, run.args.dim or 4
    delta = 0.9 if run.args.delta is None else run.args.delta
    family = HistoryFamily([random_outcome_family(rng, dim) for _ in range(n)])
    state = random_state(rng, dim)
    table = frequency_distribution(state, family)
    run.table("distribution", io.distribution_header(n), io.distribution_rows(table))
    cons = is_delta_consistent(state, family, delta)
    total = math.fsum(table.values())
    summary = {"n": n, "dim": dim, "total": total, "delta": delta,
               "min_evidence": cons.min_evidence, "delta_consistent": cons.consistent}
    if abs(total - 1.0) > run.tol["sum_rule"]:
        raise NumericalFailure("distribution does not sum to 1", summary)
    return summary


def cmd_double_slit(run):
    lam = 0.0 if run.args.lam is None else run.args.lam
    model = golden_double_slit().with_lambda(lam)
    rows = []
    for b in range(model.bins):
        f = double_slit_frequencies(model, b)
        rows.append([b, f.f_r, f.f_l, f.f_both, f.interference])
    run.table("screen", ["bin", "f_r", "f_l", "f_both", "interference"], rows)
    grid = sorted({0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, lam})
    curve = evidence_curve(golden_double_slit(), grid)
    run.table("evidence_curve", ["lambda", "min_evidence"], [list(p) for p in curve])
    gap = max(abs(r[3] - r[1] - r[2] - r[4]) for r in rows)
    summary = {"lambda": lam, "bins": model.bins, "max_abs_interference": max(abs(r[4]) for r in rows),
               "sum_rule_gap": gap}
    if gap > run.tol["dephasing"]:
        raise NumericalFailure("sum rule f_r + f_l + interference = f_both violated", summary)
    return summary


def cmd_singlet(run):
    rng = rng_from(run.args.seed)
    rows = []
    worst = 0.0
    for i in range(_trials(run.args, 100)):
        axis = random_unit_vector(rng)
        f = singlet_frequencies(axis)
        cond = f.down_R_given_up_L
        rows.append([i, *map(float, axis), f.up_L, f.down_L, cond, f.up_R_and_up_L])
        worst = max(worst, abs(f.up_L - 0.5), abs(f.down_L - 0.5), abs(cond - 1.0), f.up_R_and_up_L)
    run.table("frequencies", ["trial", "n_x", "n_y", "n_z", "up_L", "down_L", "down_R_given_up_L", "up_R_and_up_L"],
              rows)
    summary = {"trials": len(rows), "max_deviation": worst}
    if worst > 1e-12:
        raise NumericalFailure("singlet frequencies deviate from 1/2 and perfect anticorrelation", summary)
    return summary


def cmd_no_signal(run):
    rng = rng_from(run.args.seed)
    d = run.args.dim or 2
    rows = []
    for i in range(_trials(run.args, 200)):
        rho = random_state(rng, d * d).density_matrix()
        chan = LocalChannel(random_kraus(rng, d, int(rng.integers(1, 5))))
        delta, _, _ = marginal_shift(rho, (d, d), chan)
        rows.append([i, len(chan.operator_sum), delta])
    run.table("marginal_shift", ["trial", "kraus_ops", "delta_norm"], rows)
    singlet = no_signaling_check(SingletSystem(), LocalChannel.projective(
        [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]))
    summary = {"trials": len(rows), "dim": d, "max_delta_norm": max(r[2] for r in rows),
               "singlet_filter_delta_norm": singlet.delta_norm,
               "singlet_post_spin_R": [float(x) for x in singlet.post_spin_R]}
    if summary["max_delta_norm"] > run.tol["no_signal"]:
        raise NumericalFailure("far marginal changed under a local channel", summary)
    return summary


def cmd_marginals(run):
    rng = rng_from(run.args.seed)
    d1 = run.args.dim or 3
    d2 = d1 + 2
    rows = []
    for i in range(_trials(run.args, 200)):
        res = marginal_isospectrality(random_pure_state(rng, d1 * d2), (d1, d2))
        rows.append([i, res.max_gap, res.pure_marginals])
    run.table("isospectrality", ["trial", "max_gap", "pure_marginals"], rows)
    summary = {"trials": len(rows), "dims": [d1, d2], "max_gap": max(r[1] for r in rows)}
    if summary["max_gap"] > run.tol["isospectral"]:
        raise NumericalFailure("marginal spectra differ", summary)
    return summary


def cmd_uncertainty(run):
    rng = rng_from(run.args.seed)
    d = run.args.dim or 3
    rows = []
    ok = True
    for i in range(_trials(run.args, 500)):
        res = uncertainty_check(random_state(rng, d), random_hermitian(rng, d), random_hermitian(rng, d),
                                tol=run.tol["uncertainty"])
        rows.append([i, res.lhs, res.rhs, res.holds])
        ok &= res.holds
    run.table("uncertainty", ["trial", "lhs", "rhs", "holds"], rows)
    sat = uncertainty_check(State.pure([1, 0]), SIGMA_X, SIGMA_Y)
    summary = {"trials": len(rows), "dim": d, "all_hold": ok,
               "saturation": {"lhs": sat.lhs, "rhs": sat.rhs}}
    if not ok:
        raise NumericalFailure("uncertainty relation violated", summary)
    return summary


COMMANDS = {
    "chsh": cmd_chsh,
    "polytope": cmd_polytope,
    "repair": cmd_repair,
    "history": cmd_history,
    "double-slit": cmd_double_slit,
    "singlet": cmd_singlet,
    "no-signal": cmd_no_signal,
    "marginals": cmd_marginals,
    "uncertainty": cmd_uncertainty,
}


def list_demos(machine=False):
    """Text table (or JSON array) of the demos and the topic each illustrates."""
    if machine:
        return json.dumps([{"command": c, "reference": r, "summary": s} for c, r, s in DEMOS], indent=2)
    width = max(len(c) for c, _, _ in DEMOS)
    return "\n".join(f"{c:<{width}}  {r:<24}  {s}" for c, r, s in DEMOS)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for the single random generator (default 0)")
    common.add_argument("--out", default=".", help="output directory (created if missing)")
    common.add_argument("--format", choices=("json", "csv"), default="csv", help="format of tabular data files")
    common.add_argument("--trials", type=int, help="number of random trials")
    common.add_argument("--dim", type=int, help="Hilbert space dimension")
    common.add_argument("--n", type=int, help="number of time slots / events")
    common.add_argument("--lambda", dest="lam", type=float, help="environment coupling (double-slit)")
    common.add_argument("--epsilon", type=float, help="repair tolerance")
    common.add_argument("--delta", type=float, help="consistency threshold")

    ap = _Parser(prog="histkit", description="Seeded demonstrations of event histories and quantum correlations.")
    ap.add_argument("--version", action="version", version=f"histkit {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    lst = sub.add_parser("list", help="list the demos")
    lst.add_argument("--machine", action="store_true", help="JSON output")
    for name, ref, summary in DEMOS:
        sub.add_parser(name, parents=[common], help=f"{summary} ({ref})")
    return ap


def manifest(args, tolerances, files, summary):
    return {
        "schema_version": io.SCHEMA_VERSION,
        "command": args.command,
        "seed": args.seed,
        "arguments": {k: getattr(args, k) for k in ("format", "trials", "dim", "n", "lam", "epsilon", "delta")},
        "versions": {"histkit": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version(), "eigensolver_backend": _kernels.BACKEND},
        "tolerances": tolerances,
        "files": sorted(files),
        "summary": summary,
        "run": {"timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat()},
    }


def run(args):
    """Execute one parsed command; returns the process exit code."""
    try:
        tolerances = load_tolerances()
    except ValidationError as exc:
        print(f"histkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        r = Run(args, tolerances)
        status = EXIT_OK
        try:
            summary = COMMANDS[args.command](r)
        except NumericalFailure as exc:
            print(f"histkit {args.command}: {exc.args[0]}", file=sys.stderr)
            summary = exc.args[1] if len(exc.args) > 1 else {"error": exc.args[0]}
            status = EXIT_NUMERIC
        except HistkitError as exc:
            # structural or precondition rejections are bad arguments; solver failures are numerical
            print(f"histkit {args.command}: {exc}", file=sys.stderr)
            summary = {"error": str(exc)}
            status = EXIT_USAGE if isinstance(exc, ValueError) else EXIT_NUMERIC
        io.write_json(out / "manifest.json", manifest(args, tolerances, r.files, summary))
    except OSError as exc:
        print(f"histkit: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return status


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command is None:
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.command == "list":
        print(list_demos(args.machine))
        return EXIT_OK
    if args.trials is not None and args.trials < 1:
        ap.error("--trials must be positive")
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
