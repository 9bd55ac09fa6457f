"""Command line: ``histloc scenario``, ``histloc locate`` and ``histloc check-family``.

Exit status is 0 when every check passes, 1 when a claim fails or a family
is inconsistent, and 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import scenarios
from .circuit import BUILTIN_CIRCUITS, TimedCircuit, builtin_circuit
from .config import Config, resolve_config
from .histories import HistoryFamily, consistency_check
from .infoloc import default_lambda_grid, locate_channel
from .qmath import basis_ket

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(payload: dict, text: str, cfg: Config, out) -> None:
    if cfg.format == "json":
        out.write(json.dumps(scenarios.to_jsonable(payload), sort_keys=True, indent=2) + "\n")
    else:
        out.write(text + "\n")


def _load_circuit(source: str) -> TimedCircuit:
    if source.replace("-", "_") in BUILTIN_CIRCUITS:
        return builtin_circuit(source)
    path = Path(source)
    if not path.is_file():
        raise UsageError(f"{source!r} is neither a builtin circuit ({', '.join(sorted(BUILTIN_CIRCUITS))}) nor a file")
    try:
        return TimedCircuit.from_json(path.read_text())
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read circuit from {source}: {exc}") from exc


def cmd_scenario(args, cfg: Config, out) -> int:
    if args.name == "all":
        reports = scenarios.build_all(cfg)
        missing = scenarios.unchecked_claims(reports)
        ok = all(r.passed for r in reports) and not missing
        payload = {
            "schema": scenarios.SCHEMA,
            "passed": ok,
            "unchecked_claims": missing,
            "reports": [r.to_dict() for r in reports],
        }
        text = "\n".join([r.to_text() for r in reports] + [f"unchecked claims: {missing}"] * bool(missing))
    else:
        reports = [scenarios.build(args.name, cfg)]
        missing = []
        ok = reports[0].passed
        payload, text = reports[0].to_dict(), reports[0].to_text()
    _emit(payload, text, cfg, out)
    failing = [c.claim_id for r in reports for c in r.checks if not c.passed] + missing
    if failing:
        print("failing claims: " + " ".join(failing), file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_locate(args, cfg: Config, out) -> int:
    circuit = _load_circuit(args.circuit)
    if args.time not in circuit.times:
        raise UsageError(f"time {args.time!r} not in circuit times {list(circuit.times)}")
    if not 0 <= args.input_qubit < circuit.n_qubits:
        raise UsageError(f"input qubit {args.input_qubit} out of range")
    if circuit.params:
        raise UsageError("locate needs a circuit without free parameters")
    env = basis_ket("0" * (circuit.n_qubits - 1))
    grid = default_lambda_grid(cfg.lambda_grid_size, cfg.seed)
    report = locate_channel(circuit, args.input_qubit, env, args.time, grid, cfg.eps_support, cfg.seed)
    payload = {"schema": scenarios.SCHEMA, "circuit": circuit.name or args.circuit, **report.to_dict()}
    names = ["{" + ",".join(s) + "}" for s in report.minimal_names()]
    text = f"{circuit.name or args.circuit} @ {args.time}: minimal subsets {' '.join(names) or '(none)'}"
    _emit(payload, text, cfg, out)
    return EXIT_OK


def cmd_check_family(args, cfg: Config, out) -> int:
    path = Path(args.file)
    if not path.is_file():
        raise UsageError(f"no such family file: {args.file}")
    try:
        family = HistoryFamily.from_json(path.read_text())
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read family from {args.file}: {exc}") from exc
    report = consistency_check(family, cfg.eps_consistency)
    payload = {"schema": scenarios.SCHEMA, **report.to_dict()}
    verdict = "consistent" if report.consistent else "INCONSISTENT"
    text = f"{family.name or args.file}: {verdict} (worst overlap {report.worst_overlap:.3g}, eps {report.eps:g})"
    _emit(payload, text, cfg, out)
    return EXIT_OK if report.consistent else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file with run settings")
    common.add_argument("--format", choices=("json", "text"), default=None)
    common.add_argument("--seed", type=int, default=None, help="lambda grid seed (HISTLOC_SEED overrides)")
    common.add_argument("--lambda-grid-size", type=int, default=None)
    common.add_argument("--eps-norm", type=float, default=None)
    common.add_argument("--eps-consistency", type=float, default=None)
    common.add_argument("--eps-support", type=float, default=None)

    parser = argparse.ArgumentParser(prog="histloc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scenario", parents=[common], help="run a named scenario and check its claims")
    p.add_argument("name", choices=sorted(scenarios.SCENARIOS) + ["all"])
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("locate", parents=[common], help="minimal qubit subsets carrying a one-qubit channel")
    p.add_argument("--circuit", required=True, help="builtin name or circuit JSON file")
    p.add_argument("--time", required=True)
    p.add_argument("--input-qubit", type=int, default=0)
    p.set_defaults(func=cmd_locate)

    p = sub.add_parser("check-family", parents=[common], help="consistency check of a family JSON file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check_family)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    overrides = {
        "format": args.format,
        "seed": args.seed,
        "lambda_grid_size": args.lambda_grid_size,
        "eps_norm": args.eps_norm,
        "eps_consistency": args.eps_consistency,
        "eps_support": args.eps_support,
    }
    try:
        cfg = resolve_config(args.config, overrides)
        return args.func(args, cfg, out)
    except (UsageError, ValueError, OSError) as exc:
        print(f"histloc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
