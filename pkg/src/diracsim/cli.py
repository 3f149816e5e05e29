"""Command line interface.

Exit codes: 0 success, 2 config parse or validation error, 3 physics error
(truncation overflow, degenerate mass, grid too small, ...), 4 check failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import checks, scenarios
from .errors import DiracSimError, ParseError, ValidationError
from .hamiltonians import mhz

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_CHECK = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diracsim",
        description="Dirac-equation quantum simulation on a driven qubit-resonator system",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario config and write CSV output")
    run.add_argument("config", help="path to a key=value config file")
    run.add_argument("--out-dir", default=".", help="output directory (default: cwd)")
    run.add_argument("--nmax", type=int, default=None, help="override Fock truncation")
    run.add_argument("--dt", type=float, default=None, help="override integrator step (ns)")
    run.add_argument("--plot", action="store_true", help="also render PNG figures")

    chk = sub.add_parser("check", help="run the invariant check battery")
    chk.add_argument("--full", action="store_true", help="large truncation, 20 seeds")

    sweep = sub.add_parser("sweep-rwa", help="strong-drive deviation sweep for a fig2 scenario")
    sweep.add_argument("scenario", help="fig2 scenario id, e.g. fig2_massless")
    sweep.add_argument(
        "--omegas",
        default="50,100,200,400",
        help="comma list of strong-drive frequencies in MHz (default 50,100,200,400)",
    )
    sweep.add_argument("--out-dir", default=".")
    sweep.add_argument("--nmax", type=int, default=None)
    sweep.add_argument("--dt", type=float, default=0.01)

    sub.add_parser("list-scenarios", help="list registered scenario ids")
    return parser


def _cmd_run(args) -> int:
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = scenarios.parse_config(text)
        if args.nmax is not None:
            config = replace(config, n_max=args.nmax)
        if args.dt is not None:
            stride = max(1, int(round(scenarios.SAMPLE_SPACING / args.dt)))
            config = replace(config, dt=args.dt, stride=stride)
    except (ParseError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        written = scenarios.run_scenario(config, args.out_dir, plot=args.plot)
    except DiracSimError as exc:
        print(f"physics error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_check(args) -> int:
    report = checks.run_checks("full" if args.full else "fast")
    print(report.format())
    return EXIT_OK if report.all_passed else EXIT_CHECK


def _cmd_sweep(args) -> int:
    try:
        omegas = [mhz(float(v)) for v in args.omegas.split(",") if v.strip()]
        if not omegas:
            raise ValueError("empty omega list")
    except ValueError as exc:
        print(f"config error: bad --omegas: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    kwargs = {"dt": args.dt}
    if args.nmax is not None:
        kwargs["n_max"] = args.nmax
    try:
        rows = scenarios.sweep_rwa(omegas, args.scenario, **kwargs)
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DiracSimError as exc:
        print(f"physics error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{args.scenario}_rwa_sweep.csv"
    scenarios.write_sweep_csv(rows, args.scenario, path)
    print(path)
    return EXIT_OK


def _cmd_list(_args) -> int:
    for sid, scn in scenarios.SCENARIOS.items():
        print(
            f"{sid}: lam={scn.lam_factor:g}g xi={scn.xi_factor:g}g "
            f"spin={scn.spin} alpha={scn.alpha:g} t_end={scn.t_end:g}ns "
            f"frame={scn.frame} outputs={','.join(scn.outputs)}"
        )
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "run": _cmd_run,
        "check": _cmd_check,
        "sweep-rwa": _cmd_sweep,
        "list-scenarios": _cmd_list,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
