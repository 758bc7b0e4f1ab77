"""Command-line entry point.

Subcommands: ``analyze`` (certificate computation), ``verify-sector``,
``simulate``, ``plot-w`` and ``check`` (the bundled-example acceptance
suite).  Exit codes: 0 success, 1 error, 2 infeasible, 3 sector violation.
All outputs are JSON or CSV; certificate documents are byte-reproducible
apart from the timestamp inside their manifest section.
"""
from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import Infeasible, certify_fixed_tau, minimize_bound
from .checks import run_checks
from .errors import AllInfeasible, SectorBoundError
from .fock import FockSpace, TruncationLeakWarning, simulate
from .model import AnalysisConfig, config_to_dict, load_config
from .reference import paper_comparison_block
from .sector import PolarGrid, SectorReport, verify_sector

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_SECTOR_VIOLATION = 3


def _read_config(path: str, symmetrize: bool = False):
    text = Path(path).read_text(encoding="utf-8")
    return load_config(text, symmetrize=symmetrize), text


def _manifest(command: str, config_path: str, config_text: str, outputs):
    return {
        "command": command,
        "config_path": str(config_path),
        "config_sha256": hashlib.sha256(config_text.encode("utf-8")).hexdigest(),
        "tool_version": __version__,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": [str(p) for p in outputs],
    }


def _complex_record(x) -> dict:
    x = complex(x)
    return {"re": x.real, "im": x.imag}


def _matrix_records(a):
    return [[_complex_record(x) for x in row] for row in np.asarray(a)]


def _sector_report_dict(report: SectorReport) -> dict:
    return {
        "tolerance": report.tolerance,
        "note": report.note,
        "all_pass": bool(report.all_pass()),
        "conditions": {
            name: {
                "max_violation": float(c.max_violation),
                "witness_z": _complex_record(c.witness_z),
                "samples": int(c.samples),
                "passed": bool(c.passes(report.tolerance)),
            }
            for name, c in report.conditions.items()
        },
    }


def _dump_json(doc: dict, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _run_sector_verification(config: AnalysisConfig):
    if config.cost is None or config.nonlinearity is None:
        return None
    return verify_sector(config.cost.scalar_shadow, config.nonlinearity.f_z,
                         config.nonlinearity.f_zz, config.sector,
                         PolarGrid(), tolerance=1e-9)


def cmd_analyze(args) -> int:
    config, text = _read_config(args.config, args.symmetrize)
    kappa_mode = args.kappa_mode or config.kappa_mode

    report = _run_sector_verification(config)
    if report is None:
        print("note: no cost/nonlinearity in config; sector verification "
              "skipped", file=sys.stderr)
    elif not report.all_pass():
        name, cond = report.worst()
        msg = (f"sector condition {name!r} violated by "
               f"{cond.max_violation:.3e} at z = {cond.witness_z}")
        if args.strict_sector:
            print(msg, file=sys.stderr)
            return EXIT_SECTOR_VIOLATION
        print(f"warning: {msg}", file=sys.stderr)

    tau_fixed = args.tau1 if args.tau1 is not None else config.tau1_fixed
    solver = config.solver
    if tau_fixed is not None:
        cert = certify_fixed_tau(tau_fixed, config.plant, config.sector,
                                 kappa_mode=kappa_mode,
                                 eps=solver.eps_margin, tol=solver.tol,
                                 max_iter=solver.max_iter)
        if isinstance(cert, Infeasible):
            print(f"infeasible at tau1 = {tau_fixed}", file=sys.stderr)
            return EXIT_INFEASIBLE
        trace = [(cert.tau1, cert.bound)]
    else:
        try:
            outcome = minimize_bound(config.plant, config.sector,
                                     config.tau1_search,
                                     kappa_mode=kappa_mode,
                                     eps=solver.eps_margin, tol=solver.tol,
                                     max_iter=solver.max_iter)
        except AllInfeasible:
            print("no feasible tau1 on grid", file=sys.stderr)
            return EXIT_INFEASIBLE
        cert = outcome.certificate
        trace = outcome.trace

    out_dir = Path(args.out_dir)
    cert_path = out_dir / "certificate.json"
    config_echo = config_to_dict(config)
    doc = {
        "manifest": _manifest("analyze", args.config, text, [cert_path]),
        "plant_echo": config_echo["plant"],
        "sector_echo": config_echo["sector"],
        "kappa_mode": cert.kappa_mode,
        "tau1": cert.tau1,
        "kappa": cert.kappa,
        "zeta": cert.zeta,
        "mu": _complex_record(cert.mu),
        "trace_term": cert.trace_term,
        "bound": cert.bound,
        "feasibility_margin": cert.feasibility_margin,
        "P": _matrix_records(cert.P),
        "tau1_trace": [
            [t, "infeasible" if b is None else b] for t, b in trace
        ],
        "sector_report": None if report is None else _sector_report_dict(report),
        "paper_comparison": paper_comparison_block(config.plant, config.sector),
        "solver": {
            "status": cert.solver_status,
            "iterations": cert.solver_iterations,
            "duality_gap": cert.duality_gap,
        },
    }
    _dump_json(doc, cert_path)
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(f"certified bound {cert.bound:.6g} at tau1 = {cert.tau1:.6g} "
              f"({cert.kappa_mode}); feasibility margin "
              f"{cert.feasibility_margin:.3e}")
        print(f"wrote {cert_path}")
    return EXIT_OK


def cmd_verify_sector(args) -> int:
    config, text = _read_config(args.config)
    if config.cost is None or config.nonlinearity is None:
        print("config has no cost/nonlinearity block to verify",
              file=sys.stderr)
        return EXIT_ERROR
    report = _run_sector_verification(config)
    out_dir = Path(args.out_dir)
    report_path = out_dir / "sector_report.json"
    doc = {
        "manifest": _manifest("verify-sector", args.config, text,
                              [report_path]),
        "sector_report": _sector_report_dict(report),
    }
    _dump_json(doc, report_path)
    if args.dump_csv:
        _dump_sector_csv(config, Path(args.dump_csv))
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    if report.all_pass():
        print("sector conditions pass")
        return EXIT_OK
    name, cond = report.worst()
    print(f"sector condition {name!r} violated by {cond.max_violation:.3e} "
          f"at witness z = {cond.witness_z}")
    return EXIT_SECTOR_VIOLATION


def _dump_sector_csv(config: AnalysisConfig, path: Path):
    grid = PolarGrid()
    rows = ["z_re,z_im,W,abs_fz_sq,abs_fzz_sq"]
    for z in grid.points():
        w = float(config.cost.scalar_shadow(z))
        fz = abs(complex(config.nonlinearity.f_z(z))) ** 2
        fzz = abs(complex(config.nonlinearity.f_zz(z))) ** 2
        rows.append(f"{float(z.real)!r},{float(z.imag)!r},{w!r},{fz!r},{fzz!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")


def cmd_simulate(args) -> int:
    config, text = _read_config(args.config)
    if config.cost is None or config.nonlinearity is None:
        print("simulation needs both cost and nonlinearity blocks",
              file=sys.stderr)
        return EXIT_ERROR
    sim = config.simulate
    space = FockSpace(config.plant.n_modes, sim.cutoff)
    with warnings.catch_warnings():
        warnings.simplefilter("always", TruncationLeakWarning)
        result = simulate(space, config.plant, config.nonlinearity,
                          config.cost, sim.t_final, sim.dt,
                          initial=sim.initial_state, ordering=args.ordering)
    if result.truncation_leak:
        print("warning: truncation leak (top Fock level population exceeded "
              "1e-6); increase simulate.cutoff", file=sys.stderr)
        if args.strict_truncation:
            return EXIT_ERROR

    out_dir = Path(args.out_dir)
    csv_path = out_dir / "simulation.csv"
    out_dir.mkdir(parents=True, exist_ok=True)
    with csv_path.open("w", encoding="utf-8") as fh:
        fh.write("t,expW,running_avg,top_level_population\n")
        for k in range(len(result.times)):
            fh.write(f"{float(result.times[k])!r},{float(result.exp_w[k])!r},"
                     f"{float(result.running_avg[k])!r},"
                     f"{float(result.top_population[k])!r}\n")

    summary = {
        "manifest": _manifest("simulate", args.config, text, [csv_path]),
        "cutoff": sim.cutoff,
        "t_final": sim.t_final,
        "dt": sim.dt,
        "ordering": args.ordering,
        "final_average": result.final_average,
        "max_trace_drift": result.max_trace_drift,
        "truncation_leak": result.truncation_leak,
    }
    comparison_failed = False
    if args.against:
        cert_doc = json.loads(Path(args.against).read_text(encoding="utf-8"))
        bound = float(cert_doc["bound"])
        ok = result.final_average <= bound
        comparison_failed = not ok
        summary["certified_bound"] = bound
        summary["within_bound"] = ok
        print(f"{'PASS' if ok else 'FAIL'}: running average "
              f"{result.final_average:.6g} {'<=' if ok else '>'} certified "
              f"bound {bound:.6g}")
    summary_path = out_dir / "simulation_summary.json"
    _dump_json(summary, summary_path)
    print(f"final running average {result.final_average:.6g} "
          f"(trace drift {result.max_trace_drift:.2e}); wrote {csv_path}")
    return EXIT_ERROR if comparison_failed else EXIT_OK


def cmd_plot_w(args) -> int:
    config, _ = _read_config(args.config)
    if config.cost is None:
        print("config has no cost block", file=sys.stderr)
        return EXIT_ERROR
    xs = np.linspace(-args.x_max, args.x_max, args.points)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "w_profile.csv"
    with path.open("w", encoding="utf-8") as fh:
        fh.write("x,W\n")
        for x in xs:
            fh.write(f"{float(x)!r},"
                     f"{float(config.cost.scalar_shadow(complex(x)))!r}\n")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_check(args) -> int:
    only = args.only.split(",") if args.only else None
    results = run_checks(only)
    if args.json:
        doc = [
            {"criterion": r.criterion, "passed": r.passed,
             "detail": r.detail, "seconds": r.seconds}
            for r in results
        ]
        print(json.dumps(doc, indent=2))
    else:
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"{r.criterion:4s} {status}  [{r.seconds:8.2f}s]  {r.detail}")
        n_pass = sum(r.passed for r in results)
        print(f"{n_pass}/{len(results)} criteria passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sectorbound",
        description="Certified cost bounds for uncertain open quantum "
                    "systems with sector-bounded nonlinearities.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute a performance certificate")
    p.add_argument("config")
    p.add_argument("--kappa-mode", choices=("literal",
                                            "derivation_consistent"))
    p.add_argument("--tau1", type=float,
                   help="certify at this fixed tau1 instead of searching")
    p.add_argument("--strict-sector", action="store_true")
    p.add_argument("--symmetrize", action="store_true",
                   help="average structurally asymmetric inputs before "
                        "validation")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify-sector", help="check the sector conditions")
    p.add_argument("config")
    p.add_argument("--dump-csv", help="write per-sample values to this CSV")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify_sector)

    p = sub.add_parser("simulate", help="integrate the master equation")
    p.add_argument("config")
    p.add_argument("--against", help="certificate JSON to compare against")
    p.add_argument("--strict-truncation", action="store_true")
    p.add_argument("--ordering", choices=("as_written", "symmetrized"),
                   default="as_written")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plot-w", help="dump the scalar cost profile as CSV")
    p.add_argument("config")
    p.add_argument("--x-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=601)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_plot_w)

    p = sub.add_parser("check", help="run the bundled-example acceptance "
                                     "suite")
    p.add_argument("--only", help="comma-separated criteria ids, e.g. A1,A5")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SectorBoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
