# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

"""qslkit command line: point evaluations, scans and the verification suite.

Exit status: 0 success, 1 numerical non-convergence, 2 invalid parameters,
3 input/output failure, 4 failed verification.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

log = logging.getLogger("qslkit")

UNITS_NOTE = ("Frequencies (lambda, gamma0, eta-scaled rates, temperature) are in units "
              "of omega0 for jc and of omega_c for dephasing; times are in the inverse unit.")


def _add_common(parser):
    parser.add_argument("--config", metavar="FILE",
                        help="flat key=value file; command-line flags override its values")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="more logging (repeat for debug output)")
    quad = parser.add_argument_group("quadrature")
    quad.add_argument("--nodes", type=int, help="Simpson nodes per average (odd)")
    quad.add_argument("--rel-tol", type=float, help="node-doubling relative tolerance")
    quad.add_argument("--max-refinements", type=int, help="node doublings before giving up")


def _add_state(parser):
    state = parser.add_argument_group("initial state",
                                      "either --coherence/--phase/--sz or --rx/--ry/--rz")
    state.add_argument("--coherence", type=float, help="l1 coherence C (default 0)")
    state.add_argument("--phase", type=float, help="coherence phase in radians (default 0)")
    state.add_argument("--sz", type=float, help="population <sigma_z> (default 0)")
    state.add_argument("--rx", type=float, help="Bloch component x")
    state.add_argument("--ry", type=float, help="Bloch component y")
    state.add_argument("--rz", type=float, help="Bloch component z")


def _add_jc(parser, required=True):
    group = parser.add_argument_group("Jaynes-Cummings model")
    group.add_argument("--lambda", dest="lam", type=float, required=required,
                       help="reservoir spectral width")
    group.add_argument("--gamma0", type=float, required=required, help="coupling strength")
    group.add_argument("--omega0", type=float, help="transition frequency (default 1)")


def _add_dephasing(parser, required=True):
    group = parser.add_argument_group("dephasing model")
    group.add_argument("--eta", type=float, required=required, help="bath coupling")
    group.add_argument("--s", type=float, required=required,
                       help="ohmicity (>= 0.05; < 1 sub-Ohmic, > 1 super-Ohmic)")
    group.add_argument("--omega-c", type=float, help="cutoff frequency (default 1)")
    group.add_argument("--temperature", type=float,
                       help="bath temperature, k_B = 1 (default 0, analytic branch)")


def build_parser() -> argparse.ArgumentParser:
    from .__about__ import __version__
    parser = argparse.ArgumentParser(prog="qslkit", epilog=UNITS_NOTE,
                                     description="Quantum speed limit bounds for the damped "
                                                 "Jaynes-Cummings and pure-dephasing qubit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    parser.commands = {}

    sub = commands.add_parser("jc", help="bound for one Jaynes-Cummings evaluation",
                              epilog=UNITS_NOTE)
    _add_common(sub)
    _add_jc(sub)
    _add_state(sub)
    sub.add_argument("--tau", type=float, required=True, help="driving time")
    sub.add_argument("--format", choices=("text", "json"), default="text")
    parser.commands["jc"] = sub

    sub = commands.add_parser("dephasing", help="bound for one pure-dephasing evaluation",
                              epilog=UNITS_NOTE)
    _add_common(sub)
    _add_dephasing(sub)
    _add_state(sub)
    sub.add_argument("--tau", type=float, required=True, help="driving time")
    sub.add_argument("--format", choices=("text", "json"), default="text")
    parser.commands["dephasing"] = sub

    sub = commands.add_parser("scan", help="two-axis parameter scan to CSV or JSON",
                              epilog=UNITS_NOTE)
    _add_common(sub)
    sub.add_argument("--model", choices=("jc", "dephasing"), required=True)
    sub.add_argument("--axis1", required=True, metavar="NAME:MIN:MAX:COUNT")
    sub.add_argument("--axis2", required=True, metavar="NAME:MIN:MAX:COUNT")
    sub.add_argument("--gamma0-log", action="store_true",
                     help="geometric spacing for a gamma0 axis")
    _add_jc(sub, required=False)
    _add_dephasing(sub, required=False)
    _add_state(sub)
    sub.add_argument("--tau", type=float, help="driving time (unless scanned)")
    sub.add_argument("--threads", type=int,
                     help="worker processes, 0 = all CPUs (default: QSLKIT_THREADS)")
    sub.add_argument("--format", choices=("csv", "json"),
                     help="output format (default: from the output suffix, else csv)")
    sub.add_argument("-o", "--output", metavar="PATH", help="output file (default: stdout)")
    parser.commands["scan"] = sub

    from .verify import CHECK_NAMES
    sub = commands.add_parser("verify", help="run the cross-module verification suite")
    _add_common(sub)
    sub.add_argument("--check", action="append", choices=("all",) + CHECK_NAMES,
                     help="check to run (repeatable, default all)")
    sub.add_argument("--samples", type=int, help="sample count for sampled checks")
    sub.add_argument("--seed", type=int, help="random seed of the sweeps")
    sub.add_argument("--model", choices=("jc", "dephasing"),
                     help="restrict model-specific sweeps")
    sub.add_argument("--gamma0", type=float, help="JC coupling for the derivative-bound sweep")
    sub.add_argument("--lambda", dest="lam", type=float, help="JC spectral width (default 15)")
    sub.add_argument("--steps", type=int, help="Runge-Kutta steps of the oracles")
    parser.commands["verify"] = sub
    return parser


def _file_tokens(subparser, values):
    """Turn flat config entries into flag tokens this subcommand accepts."""
    known = {}
    for action in subparser._actions:
        for option in action.option_strings:
            known[option] = action
    tokens = []
    for key, value in values.items():
        option = "--" + key.replace("_", "-")
        if option not in known or key in ("config", "help", "verbose"):
            log.debug("ignoring config key %r for this command", key)
            continue
        action = known[option]
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                tokens.append(option)
        elif isinstance(action, argparse._AppendAction):
            tokens.extend(t for item in value.split(",") for t in (option, item.strip()))
        else:
            tokens.extend((option, value))
    return tokens


def parse_args(argv=None):
    """Parse ``argv`` with --config values inserted ahead of the explicit flags."""
    from ._config import load_flat_config
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    pre_args, _ = pre.parse_known_args(argv)
    if pre_args.config:
        command = next((arg for arg in argv if arg in parser.commands), None)
        if command is not None:
            values = load_flat_config(pre_args.config)
            at = argv.index(command) + 1
            argv = argv[:at] + _file_tokens(parser.commands[command], values) + argv[at:]
    return parser.parse_args(argv)


def _state(args):
    from ._exceptions import ParameterError
    from .qubit import BlochState
    bloch = [args.rx, args.ry, args.rz]
    polar = [args.coherence, args.phase, args.sz]
    if any(v is not None for v in bloch) and any(v is not None for v in polar):
        raise ParameterError("give the state either as --coherence/--phase/--sz "
                             "or as --rx/--ry/--rz, not both")
    if any(v is not None for v in bloch):
        return BlochState(*(0.0 if v is None else v for v in bloch))
    return BlochState.from_coherence(args.coherence or 0.0, args.sz or 0.0,
                                     args.phase or 0.0)


def _quad(args):
    from .engine import QuadratureConfig
    return QuadratureConfig.from_config(nodes=args.nodes, rel_tol=args.rel_tol,
                                        max_refinements=args.max_refinements)


def _print_point(header, result, extras, fmt, out):
    if fmt == "json":
        document = dict(header, result=result.to_dict(), **extras)
        out.write(json.dumps(document, indent=1) + "\n")
        return
    lines = [(key, value) for key, value in header.items()]
    lines += list(result.to_dict().items())
    lines += list(extras.items())
    width = max(len(key) for key, _ in lines)
    text = []
    for key, value in lines:
        if isinstance(value, dict):
            value = " ".join(f"{k}={v:.17g}" if isinstance(v, float) else f"{k}={v}"
                             for k, v in value.items())
        elif isinstance(value, bool) or value is None:
            value = "-" if value is None else str(value).lower()
        elif isinstance(value, float):
            value = format(value, ".17g")
        text.append(f"{key:<{width}}  {value}")
    out.write("\n".join(text) + "\n")


def cmd_jc(args, out=None):
    out = out or sys.stdout
    from .jc import JcParams, jc_qsl, jc_regime, jc_branch
    p = JcParams(lam=args.lam, gamma0=args.gamma0,
                 omega0=1.0 if args.omega0 is None else args.omega0)
    s0 = _state(args)
    quad = _quad(args)
    result = jc_qsl(p, s0, args.tau, quad)
    header = dict(model="jc", params=dict(lam=p.lam, gamma0=p.gamma0, omega0=p.omega0),
                  state=dict(rx=s0.rx, ry=s0.ry, rz=s0.rz))
    extras = dict(regime=jc_regime(p).value, branch=jc_branch(p).kind.value)
    _print_point(header, result, extras, args.format, out)
    return 0


def cmd_dephasing(args, out=None):
    out = out or sys.stdout
    from .dephasing import DephasingParams, dephasing_qsl, negative_rate_intervals
    p = DephasingParams(eta=args.eta, s=args.s,
                        omega_c=1.0 if args.omega_c is None else args.omega_c,
                        temperature=0.0 if args.temperature is None else args.temperature)
    s0 = _state(args)
    quad = _quad(args)
    result = dephasing_qsl(p, s0, args.tau, quad)
    header = dict(model="dephasing",
                  params=dict(eta=p.eta, s=p.s, omega_c=p.omega_c, temperature=p.temperature),
                  state=dict(rx=s0.rx, ry=s0.ry, rz=s0.rz))
    intervals = negative_rate_intervals(p, args.tau)
    if args.format == "json":
        extras = dict(negative_rate_intervals=[list(iv) for iv in intervals])
    else:
        extras = dict(negative_rate_intervals=", ".join(f"[{a:.6g}, {b:.6g}]"
                                                        for a, b in intervals) or "none")
    _print_point(header, result, extras, args.format, out)
    return 0


def _scan_grid(args):
    from .scan import Axis, ScanGrid
    axis1 = Axis.parse(args.axis1, log=args.gamma0_log and args.axis1.startswith("gamma0:"))
    axis2 = Axis.parse(args.axis2, log=args.gamma0_log and args.axis2.startswith("gamma0:"))
    if args.model == "jc":
        fixed = {"lambda": args.lam, "gamma0": args.gamma0, "omega0": args.omega0}
    else:
        fixed = dict(eta=args.eta, s=args.s, omega_c=args.omega_c,
                     temperature=args.temperature)
    fixed.update(coherence=args.coherence, sz=args.sz, phase=args.phase, tau=args.tau)
    axes = {axis1.name, axis2.name}
    if "sz" not in axes and fixed["sz"] is None:
        fixed["sz"] = 0.0
    if any(getattr(args, name) is not None for name in ("rx", "ry", "rz")):
        from ._exceptions import ParameterError
        raise ParameterError("scans take the state as --coherence/--phase/--sz")
    return ScanGrid(args.model, axis1, axis2, fixed=fixed)


def cmd_scan(args, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    from .scan import run_scan, emit_csv, emit_json, scan_summary
    grid = _scan_grid(args)
    quad = _quad(args)
    fmt = args.format or ("json" if (args.output or "").endswith(".json") else "csv")
    start = time.perf_counter()
    records = run_scan(grid, quad, threads=args.threads)
    destination = args.output if args.output else out
    if fmt == "json":
        emit_json(records, destination, grid=grid, quad=quad)
    else:
        emit_csv(records, destination)
    summary = scan_summary(records, time.perf_counter() - start)
    (out if args.output else err).write(summary + "\n")
    return 0


def cmd_verify(args, out=None):
    out = out or sys.stdout
    from rich.console import Console
    from rich.table import Table
    from ._exceptions import QSL_EVERIFY
    from .__config__ import config
    from .verify import VerifyOptions, run_checks
    seed = args.seed if args.seed is not None else int(config.get("SEED", 20190101))
    steps = args.steps if args.steps is not None else int(config.get("ORACLE_STEPS", 10000))
    options = VerifyOptions(seed=seed, samples=args.samples, model=args.model,
                            gamma0=args.gamma0, lam=15.0 if args.lam is None else args.lam,
                            steps=steps, quad=_quad(args))
    results = run_checks(args.check, options)
    console = Console(file=out, highlight=False)
    table = Table(title=f"qslkit verify (seed {seed})")
    table.add_column("check")
    table.add_column("status")
    table.add_column("worst", justify="right")
    table.add_column("tol", justify="right")
    table.add_column("detail")
    for res in results:
        table.add_row(res.name, "pass" if res.passed else "FAIL",
                      f"{res.worst:.3g}", f"{res.tol:.3g}", res.detail)
    console.print(table)
    failed = [res for res in results if not res.passed]
    if failed:
        worst = max(failed, key=lambda res: res.worst)
        console.print(f"{len(failed)} check(s) failed; worst slack {worst.worst:.6g} "
                      f"in {worst.name}")
        return QSL_EVERIFY
    return 0


_COMMANDS = dict(jc=cmd_jc, dephasing=cmd_dephasing, scan=cmd_scan, verify=cmd_verify)


def main(argv=None):
    from ._exceptions import QslError
    try:
        args = parse_args(argv)
    except QslError as exc:
        print(f"qslkit: error: {exc}", file=sys.stderr)
        return exc.error
    logging.basicConfig(level=max(logging.DEBUG, logging.WARNING - 10 * args.verbose),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except QslError as exc:
        print(f"qslkit: error: {exc}", file=sys.stderr)
        return exc.error


if __name__ == "__main__":
    sys.exit(main())
