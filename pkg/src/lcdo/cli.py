"""Command-line interface.

Subcommands:
  evaluate <config> <checkpoint|init>   print the energy breakdown, write one CSV row
  minimize <config>                     run the optimizer; write trace.csv, final.vtk, final.ckpt
  sweep-lambda <config> --ladder ...    warm-started anchoring-strength sweep; write sweep.csv
  validate                              run the certification suites

Exit codes: 0 success, 1 validation failure, 2 malformed config/arguments,
3 inadmissible elastic constants, 4 iteration budget exhausted (artifacts
still written), 5 checkpoint checksum mismatch.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .checkpoint import ChecksumError, CheckpointFormatError, load_checkpoint, save_checkpoint
from .config import ConfigError, RunConfig, load_config
from .elastic import EricksenError
from .energy import normal_residual, total_energy, variational_gradients
from .grid import FieldState, integrate
from .initialize import build_state
from .optimize import (
    ProjectionError,
    RunReport,
    SweepRow,
    TraceRow,
    minimize_full,
    project_volume,
    sweep_lambda,
)
from .selfcheck import run_all
from .vtkio import write_vtk

__all__ = ["main", "entry", "TRACE_COLUMNS", "SWEEP_COLUMNS"]

EXIT_OK = 0
EXIT_VALIDATE_FAIL = 1
EXIT_CONFIG = 2
EXIT_ERICKSEN = 3
EXIT_BUDGET = 4
EXIT_CHECKSUM = 5

TRACE_COLUMNS = (
    "iter",
    "e_total",
    "e_bulk",
    "e_perimeter",
    "e_anchor_outer",
    "e_inner_isotropic",
    "e_inner_anchor",
    "volume",
    "grad_norm_n",
    "grad_norm_phi",
    "grad_norm_v",
    "tau_n",
    "tau_phi",
    "tau_v",
    "eps_phi",
    "eps_v",
)

SWEEP_COLUMNS = (
    "lambda",
    "e_total",
    "e_bulk",
    "e_perimeter",
    "e_anchor_outer",
    "e_inner_isotropic",
    "e_inner_anchor",
    "volume",
    "max_n_dot_nu",
    "nondecreasing",
)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _trace_line(row: TraceRow) -> str:
    e = row.energy
    vals = (
        str(row.iteration),
        _fmt(e.e_total),
        _fmt(e.e_bulk),
        _fmt(e.e_perimeter),
        _fmt(e.e_anchor_outer),
        _fmt(e.e_inner_isotropic),
        _fmt(e.e_inner_anchor),
        _fmt(row.volume),
        _fmt(row.grad_norm_n),
        _fmt(row.grad_norm_phi),
        _fmt(row.grad_norm_v),
        _fmt(row.tau_n),
        _fmt(row.tau_phi),
        _fmt(row.tau_v),
        _fmt(row.eps_phi),
        _fmt(row.eps_v),
    )
    return ",".join(vals)


def write_trace(path: str, rows: list[TraceRow]) -> None:
    lines = [",".join(TRACE_COLUMNS)]
    lines.extend(_trace_line(r) for r in rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sweep(path: str, rows: list[SweepRow]) -> None:
    lines = [",".join(SWEEP_COLUMNS)]
    prev = None
    for r in rows:
        e = r.energy
        nondecreasing = 1 if prev is None or e.e_total >= prev - 1e-12 * max(1.0, abs(prev)) else 0
        prev = e.e_total
        lines.append(
            ",".join(
                (
                    _fmt(r.lam),
                    _fmt(e.e_total),
                    _fmt(e.e_bulk),
                    _fmt(e.e_perimeter),
                    _fmt(e.e_anchor_outer),
                    _fmt(e.e_inner_isotropic),
                    _fmt(e.e_inner_anchor),
                    _fmt(r.volume),
                    _fmt(r.residual),
                    str(nondecreasing),
                )
            )
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _initial_state(cfg: RunConfig) -> FieldState:
    state = build_state(cfg.grid, cfg.shape, cfg.director, cfg.diffuse.eps_phi, cfg.seed)
    state.phi = project_volume(cfg.grid, state.phi, cfg.m)
    return state


def _state_from_arg(cfg: RunConfig, source: str) -> tuple[FieldState, int]:
    if source == "init":
        return _initial_state(cfg), 0
    ckpt = load_checkpoint(source)
    if ckpt.config.grid != cfg.grid:
        raise ConfigError(
            f"checkpoint grid {ckpt.config.grid.shape} does not match config grid {cfg.grid.shape}"
        )
    return ckpt.state, ckpt.iteration


def _print_breakdown(eb, volume: float, stream=None) -> None:
    stream = stream or sys.stdout
    print(f"e_bulk            = {_fmt(eb.e_bulk)}", file=stream)
    print(f"e_perimeter       = {_fmt(eb.e_perimeter)}", file=stream)
    print(f"e_anchor_outer    = {_fmt(eb.e_anchor_outer)}", file=stream)
    print(f"e_inner_isotropic = {_fmt(eb.e_inner_isotropic)}", file=stream)
    print(f"e_inner_anchor    = {_fmt(eb.e_inner_anchor)}", file=stream)
    print(f"e_total           = {_fmt(eb.e_total)}", file=stream)
    print(f"volume            = {_fmt(volume)}", file=stream)


def cmd_evaluate(args) -> int:
    cfg = load_config(args.config)
    state, iteration = _state_from_arg(cfg, args.source)
    eb = total_energy(state, cfg.elastic, cfg.surface, cfg.diffuse)
    volume = integrate(cfg.grid, state.phi)
    _print_breakdown(eb, volume)
    g_n, g_phi, g_v = variational_gradients(state, cfg.elastic, cfg.surface, cfg.diffuse)
    cell = cfg.grid.cell_volume

    def l2(g: np.ndarray) -> float:
        dens = g / cell
        return float(np.sqrt(np.sum(dens * dens) * cell))

    sched = cfg.schedule
    tau0 = sched.tau_n if sched.tau_n is not None else 0.0
    row = TraceRow(
        iteration=iteration,
        energy=eb,
        volume=volume,
        grad_norm_n=l2(g_n),
        grad_norm_phi=l2(g_phi),
        grad_norm_v=l2(g_v),
        tau_n=tau0,
        tau_phi=sched.tau_phi if sched.tau_phi is not None else 0.0,
        tau_v=sched.tau_v if sched.tau_v is not None else 0.0,
        eps_phi=cfg.diffuse.eps_phi,
        eps_v=cfg.diffuse.eps_v,
    )
    write_trace(args.out, [row])
    return EXIT_OK


def cmd_minimize(args) -> int:
    cfg = load_config(args.config)
    source = args.init_from if args.init_from else "init"
    state, _ = _state_from_arg(cfg, source)
    outdir = args.outdir
    os.makedirs(outdir, exist_ok=True)

    if cfg.schedule.mode == "tangential-continuation":
        sweep_rows, final_state, reports = sweep_lambda(
            state, cfg.m, cfg.elastic, cfg.surface, cfg.diffuse, cfg.schedule
        )
        rows: list[TraceRow] = []
        for rep in reports:
            for r in rep.rows:
                rows.append(
                    TraceRow(
                        iteration=len(rows) + 1,
                        energy=r.energy,
                        volume=r.volume,
                        grad_norm_n=r.grad_norm_n,
                        grad_norm_phi=r.grad_norm_phi,
                        grad_norm_v=r.grad_norm_v,
                        tau_n=r.tau_n,
                        tau_phi=r.tau_phi,
                        tau_v=r.tau_v,
                        eps_phi=r.eps_phi,
                        eps_v=r.eps_v,
                    )
                )
        report = RunReport(rows=rows, termination=reports[-1].termination)
        write_sweep(os.path.join(outdir, "sweep.csv"), sweep_rows)
    else:
        report, final_state = minimize_full(
            state, cfg.m, cfg.elastic, cfg.surface, cfg.diffuse, cfg.schedule
        )

    write_trace(os.path.join(outdir, "trace.csv"), report.rows)
    write_vtk(os.path.join(outdir, "final.vtk"), final_state)
    save_checkpoint(
        os.path.join(outdir, "final.ckpt"),
        cfg,
        final_state,
        iteration=report.rows[-1].iteration if report.rows else 0,
    )
    final = report.final_energy
    _print_breakdown(final, report.rows[-1].volume)
    print(f"termination       = {report.termination}")
    if cfg.schedule.mode == "tangential-projection":
        print(f"max |n.nu|        = {_fmt(normal_residual(final_state, cfg.diffuse))}")
    return EXIT_OK if report.termination == "converged" else EXIT_BUDGET


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    try:
        ladder = tuple(float(p) for p in args.ladder.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"--ladder expects comma-separated numbers, got {args.ladder!r}") from None
    if len(ladder) == 0 or list(ladder) != sorted(set(ladder)):
        raise ConfigError(f"--ladder must be strictly increasing, got {args.ladder!r}")
    state = _initial_state(cfg)
    rows, final_state, _ = sweep_lambda(
        state, cfg.m, cfg.elastic, cfg.surface, cfg.diffuse, cfg.schedule, ladder,
        frozen_shape=args.frozen_shape,
    )
    os.makedirs(args.outdir, exist_ok=True)
    write_sweep(os.path.join(args.outdir, "sweep.csv"), rows)
    write_vtk(os.path.join(args.outdir, "final.vtk"), final_state)
    save_checkpoint(os.path.join(args.outdir, "final.ckpt"), cfg, final_state)
    for row in rows:
        print(f"lambda={_fmt(row.lam)} e_total={_fmt(row.energy.e_total)} max|n.nu|={_fmt(row.residual)}")
    return EXIT_OK


def cmd_validate(args) -> int:
    names = args.suites.split(",") if args.suites else None
    results = run_all(names)
    width = max(len(f"{r.suite}: {r.name}") for r in results)
    failed = 0
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        label = f"{r.suite}: {r.name}"
        print(f"{tag}  {label:<{width}}  {r.detail}")
        failed += 0 if r.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VALIDATE_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcdo", description="Liquid-crystal droplet shape optimization")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="evaluate the energy of an initial state or checkpoint")
    p_eval.add_argument("config")
    p_eval.add_argument("source", help="'init' or a checkpoint path")
    p_eval.add_argument("--out", default="evaluate.csv", help="CSV row output path")
    p_eval.set_defaults(func=cmd_evaluate)

    p_min = sub.add_parser("minimize", help="run the alternating minimization")
    p_min.add_argument("config")
    p_min.add_argument("--outdir", default=".", help="directory for trace.csv, final.vtk, final.ckpt")
    p_min.add_argument("--init-from", default=None, help="start fields from a checkpoint")
    p_min.set_defaults(func=cmd_minimize)

    p_sweep = sub.add_parser("sweep-lambda", help="warm-started anchoring-strength sweep")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--ladder", required=True, help="strictly increasing lambda values, comma-separated")
    p_sweep.add_argument("--outdir", default=".", help="directory for sweep.csv")
    p_sweep.add_argument(
        "--frozen-shape", action="store_true", help="relax the director only, keeping the initial droplet"
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="run the oracle and property certification suites")
    p_val.add_argument("--suites", default=None, help="comma-separated subset of suites")
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except EricksenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERICKSEN
    except ChecksumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECKSUM
    except (ConfigError, CheckpointFormatError, ProjectionError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
