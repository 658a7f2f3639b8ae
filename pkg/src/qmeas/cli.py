"""Command-line interface.

Exit codes: 0 ok / satisfied, 1 I/O or parse error, 2 validation error or
infeasible decomposition, 3 inequality violation or cross-check failure.
Angles are in radians. Set QMEAS_LOG to quiet, info or debug.
"""

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import models
from .exceptions import InfeasibleError, QmeasError, ValidationError
from .io import (
    ParseError,
    bivariate_entry,
    build,
    dump_operator_file,
    load_operator_file,
    observable_entry,
    povm_entry,
    state_entry,
)
from .linalg import min_eigenvalue
from .nonideality import entropic_ur_report, joint_nonideal_report
from .povm import diagnose
from .simulate import empirical_report, outcome_probabilities, sample_outcomes

log = logging.getLogger("qmeas")

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_VIOLATED = 0, 1, 2, 3
SWEEP_TOL = 1e-8
SWEEP_COLUMNS = ("a", "J_lambda", "J_mu", "bound", "sum_minus_bound")


def _setup_logging():
    level = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("QMEAS_LOG", "quiet").lower(), logging.WARNING
    )
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def fmt(x):
    """17 significant digits, so CSV values round-trip exactly."""
    return format(float(x), ".17g")


def _emit_json(doc, out):
    text = json.dumps(doc, indent=1) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _open_csv(out):
    if out:
        return open(out, "w", encoding="utf-8", newline="")
    return None


def _write_rows(out, header, rows):
    fh = _open_csv(out)
    try:
        w = csv.writer(fh or sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if fh:
            fh.close()


def _require(objs, role, count, what):
    if len(objs) < count:
        raise ValidationError(f"file needs {count} object(s) with role {role!r} ({what})")
    return objs[:count]


def cmd_validate(args):
    f = load_operator_file(args.file)
    verdicts = []
    ok = True
    for obj in f.objects:
        entry = {"name": obj.name, "role": obj.role}
        if obj.role in ("povm", "pvm", "bivariate"):
            diag = diagnose(obj.data)
            entry["min_eigenvalues"] = list(diag.min_eigenvalues)
            entry["completeness_residual"] = diag.completeness_residual
        elif obj.role == "state":
            entry["min_eigenvalue"] = min_eigenvalue(obj.data)
            entry["trace"] = float(np.trace(obj.data).real)
        try:
            value = build(obj)
            entry["valid"] = True
            if obj.role == "povm":
                entry["is_pvm"] = value.is_pvm
        except ValidationError as exc:
            entry["valid"] = False
            entry["error"] = str(exc)
            ok = False
        verdicts.append(entry)
    _emit_json({"valid": ok, "objects": verdicts}, args.out)
    return EXIT_OK if ok else EXIT_INVALID


def cmd_martens(args):
    f = load_operator_file(args.file)
    (biv,) = _require(f.by_role("bivariate"), "bivariate", 1, "joint measurement")
    A, B = _require(f.by_role("pvm"), "pvm", 2, "row and column observables")
    biv, A, B = build(biv), build(A), build(B)
    try:
        rep = joint_nonideal_report(biv, A, B)
    except InfeasibleError as exc:
        _emit_json({"status": "infeasible", "marginal": exc.which, "residual": exc.residual,
                    "error": str(exc)}, args.out)
        return EXIT_INVALID
    doc = {"status": "satisfied" if rep.satisfied else "violated", **rep.to_dict()}
    _emit_json(doc, args.out)
    return EXIT_OK if rep.satisfied else EXIT_VIOLATED


def cmd_entropic(args):
    f = load_operator_file(args.file)
    (rho,) = _require(f.by_role("state"), "state", 1, "state")
    A, B = _require(f.by_role("pvm"), "pvm", 2, "observables")
    rep = entropic_ur_report(build(rho), build(A), build(B))
    doc = {"status": "satisfied" if rep.satisfied else "violated", **rep._asdict()}
    _emit_json(doc, args.out)
    return EXIT_OK if rep.satisfied else EXIT_VIOLATED


def neutron_sweep_rows(a_steps, chi):
    """Rows ``(a, J_lambda, J_mu, bound, sum_minus_bound)`` plus the worst closed-form gap."""
    obs = models.observables(chi)
    rows = []
    worst = 0.0
    for a in np.linspace(0.0, 1.0, a_steps):
        a = float(a)
        rep = joint_nonideal_report(models.neutron_bivariate(chi, a), obs.path, obs.interference)
        lam, mu = models.neutron_nonideality_closed_form(a)
        J_l, J_m = models.neutron_J_closed_form(a)
        gap = max(
            np.max(np.abs(rep.lam - lam)),
            np.max(np.abs(rep.mu - mu)),
            abs(rep.J_lambda - J_l),
            abs(rep.J_mu - J_m),
        )
        log.debug("a=%s gap=%.3e", a, gap)
        worst = max(worst, float(gap))
        slack = rep.J_lambda + rep.J_mu - rep.martens_bound
        rows.append((a, rep.J_lambda, rep.J_mu, rep.martens_bound, slack))
    return rows, worst


def cmd_neutron_sweep(args):
    if args.a_steps < 2:
        raise ValidationError("--a-steps must be at least 2")
    rows, worst = neutron_sweep_rows(args.a_steps, args.chi)
    if worst > SWEEP_TOL:
        log.error("numerical recovery disagrees with closed forms by %.3e", worst)
        return EXIT_VIOLATED
    if min(r[-1] for r in rows) < -1e-9:
        log.error("inequality violated in sweep")
        return EXIT_VIOLATED
    _write_rows(args.out, SWEEP_COLUMNS, [[fmt(x) for x in r] for r in rows])
    log.info("wrote %d sweep rows, max closed-form gap %.3e", len(rows), worst)
    return EXIT_OK


def cmd_photon(args):
    ch = models.PhotonChannel(args.eta, args.nmax)
    _, lam = models.photon_povm(ch)
    means = models.photon_mean_counts(lam)
    header = ["n", "mean_detected"] + [f"lambda_{m}" for m in range(ch.n_max + 1)]
    rows = [[str(n), fmt(means[n])] + [fmt(x) for x in lam[:, n]] for n in range(ch.n_max + 1)]
    _write_rows(args.out, header, rows)
    return EXIT_OK


def cmd_simulate(args):
    f = load_operator_file(args.file)
    (rho,) = _require(f.by_role("state"), "state", 1, "state")
    meas = [o for o in f.objects if o.role in ("bivariate", "povm", "pvm")]
    (meas,) = _require(meas, "povm|pvm|bivariate", 1, "measurement")
    rho = build(rho)
    povm = build(meas)
    povm = getattr(povm, "pvm", povm)
    counts = sample_outcomes(rho, povm, args.shots, args.seed)
    p = outcome_probabilities(rho, povm)
    doc = {
        "measurement": meas.name,
        "shots": counts.shots,
        "seed": args.seed,
        "generator": "numpy PCG64, inverse CDF over row-major probabilities",
        "counts": counts.counts.tolist(),
        "probabilities": p.tolist(),
    }
    if counts.shots > 0:
        doc["report"] = empirical_report(counts, p)._asdict()
    _emit_json(doc, args.out)
    return EXIT_OK


def cmd_neutron_export(args):
    obs = models.observables(args.chi)
    entries = [
        state_entry("rho", np.eye(2) / 2),
        povm_entry("neutron", models.neutron_povm(args.chi, args.a)),
        bivariate_entry("R", models.neutron_bivariate(args.chi, args.a)),
        observable_entry("path", obs.path),
        observable_entry("interference", obs.interference),
    ]
    dump_operator_file(args.out, 2, entries)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="qmeas",
        description="Generalized quantum measurement toolkit. Angles are in radians.",
        epilog="Exit codes: 0 ok, 1 I/O or parse error, 2 invalid or infeasible, "
        "3 inequality violated or cross-check failed. Env QMEAS_LOG=quiet|info|debug.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
        return sp

    sp = add("validate", cmd_validate, "validate every object in an operator file")
    sp.add_argument("file")
    sp = add("martens", cmd_martens, "joint non-ideality report for a bivariate POVM and two PVMs")
    sp.add_argument("file")
    sp = add("entropic-check", cmd_entropic, "entropic uncertainty check for a state and two PVMs")
    sp.add_argument("file")
    sp = add("neutron-sweep", cmd_neutron_sweep, "J_lambda / J_mu over the transmission coefficient")
    sp.add_argument("--a-steps", type=int, default=101, metavar="N")
    sp.add_argument("--chi", type=float, default=0.0, metavar="RAD", help="phase shift in radians")
    sp = add("photon", cmd_photon, "binomial non-ideality matrix of an inefficient photon counter")
    sp.add_argument("--eta", type=float, required=True, metavar="X")
    sp.add_argument("--nmax", type=int, required=True, metavar="N")
    sp = add("simulate", cmd_simulate, "sample outcomes of the file's state and first measurement")
    sp.add_argument("file")
    sp.add_argument("--shots", type=int, default=10000, metavar="N")
    sp.add_argument("--seed", type=int, default=0, metavar="N")
    sp = add("neutron-export", cmd_neutron_export, "write the neutron model as an operator file")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--chi", type=float, default=0.0, metavar="RAD", help="phase shift in radians")
    return p


def main(argv=None):
    _setup_logging()
    args = build_parser().parse_args(argv)
    if args.command == "neutron-export" and not args.out:
        args.out = "/dev/stdout"
    try:
        return args.func(args)
    except (OSError, ParseError) as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValidationError, InfeasibleError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except QmeasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
