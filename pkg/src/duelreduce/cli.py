"""Command-line entry point: list, run, verify-matrix, selftest."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import kernel
from .env import ARM_NAMES, PreferenceMatrixEnvironment, verify_relaxed_properties
from .harness import (
    DEFAULT_HORIZON,
    DEFAULT_RUNS,
    emit_audit_csv,
    emit_csv,
    make_spec,
    registry_json,
    run_cell_metrics,
    scenario_registry,
)

OUTPUT_DIR_ENV = "DUELREDUCE_OUTPUT_DIR"


class CliError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="duelreduce", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    ls = sub.add_parser("list", help="print the built-in scenarios")
    ls.add_argument("--json", action="store_true", help="full registry as JSON")

    run = sub.add_parser("run", help="simulate a scenario and write a regret CSV")
    run.add_argument("--scenario", required=True)
    run.add_argument("--algs", default=",".join(kernel.ALGORITHMS), help="comma-separated list")
    run.add_argument("--runs", type=int, default=DEFAULT_RUNS)
    run.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", help=f"output CSV (default: ${OUTPUT_DIR_ENV}/<scenario>.csv or stdout)")
    run.add_argument("--metric", choices=("av", "choice"), default="av")
    run.add_argument("--no-permute", action="store_true", help="keep the listed arm order")
    run.add_argument("--audit", help="also write per-run arm permutations to this CSV")
    run.add_argument("--workers", type=int, default=1)

    vm = sub.add_parser("verify-matrix", help="check relaxed transitivity/triangle properties")
    vm.add_argument("--file", required=True, help="JSON: list of rows, or {'epsilon': rows}")

    sub.add_parser("selftest", help="run the built-in invariant checks")
    return p


def _cmd_list(args) -> int:
    if args.json:
        print(registry_json())
        return 0
    for name, env in scenario_registry().items():
        d = env.describe()
        if d["kind"] == "utility":
            print(f"{name:16s} mu={d['mu']} link={d['link']}")
        else:
            print(f"{name:16s} preference matrix ({len(d['epsilon'])} arms)")
    return 0


def _write(path: Path, data: bytes) -> None:
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


def _cmd_run(args) -> int:
    try:
        spec = make_spec(
            args.scenario,
            algorithms=tuple(a.strip() for a in args.algs.split(",") if a.strip()),
            runs=args.runs,
            horizon=args.horizon,
            base_seed=args.seed,
            permute=not args.no_permute,
        )
    except KeyError:
        raise CliError(f"unknown scenario {args.scenario!r} (see `duelreduce list`)") from None
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if isinstance(spec.environment, PreferenceMatrixEnvironment) and args.metric == "choice":
        raise CliError("choice regret is undefined for preference-matrix scenarios")

    summaries, audit = [], []
    for alg in spec.algorithms:
        cell = run_cell_metrics(spec, alg, (args.metric,), workers=args.workers)
        summaries.append(cell.summaries[args.metric])
        audit += [(spec.name, alg, seed, perm) for seed, perm in cell.permutations]
    data = emit_csv(summaries)

    if args.out:
        _write(Path(args.out), data)
    elif os.environ.get(OUTPUT_DIR_ENV):
        _write(Path(os.environ[OUTPUT_DIR_ENV]) / f"{spec.name}.csv", data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    if args.audit:
        _write(Path(args.audit), emit_audit_csv(audit))
    return 0


def _load_matrix(path: str):
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON ({exc})") from None
    names = None
    order = None
    if isinstance(doc, dict):
        names, order = doc.get("names"), doc.get("order")
        doc = doc.get("epsilon")
    try:
        eps = np.asarray(doc, dtype=float)
    except (TypeError, ValueError):
        raise CliError(f"{path}: epsilon must be a numeric square matrix") from None
    return eps, names, order


def _cmd_verify(args) -> int:
    eps, names, order = _load_matrix(args.file)
    if names is None and len(eps) <= len(ARM_NAMES):
        names = ARM_NAMES[: len(eps)]
    try:
        report = verify_relaxed_properties(eps, order)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    print(report.format(names))
    return 0


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return 0 if run_selftest() else 1


COMMANDS = {"list": _cmd_list, "run": _cmd_run, "verify-matrix": _cmd_verify, "selftest": _cmd_selftest}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"duelreduce: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
