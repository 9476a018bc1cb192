"""``tphase`` command line: run, cusp-sweep, compare and check.

Exit codes: 0 success, 1 configuration error, 2 blow-up, 3 equilibrium
demanded but not reached.
"""
from __future__ import annotations

import argparse
import dataclasses
import datetime as _dt
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config, resolved_parameters
from .dynamics import DIAGNOSTIC_COLUMNS, BlowUpError, RunResult, SimState, run_to_equilibrium
from .experiments import (
    LensGeometry,
    NonConvergenceError,
    comparison_experiment,
    comparison_pair,
    cusp_experiment,
    cusp_spec,
    epsilon_robustness,
    initial_state_for,
    lens_initial,
    slab_initial,
    smooth_noise,
)
from .grid import Grid2D
from .io import RunManifest, atomic_write, config_hash, field_csv_bytes, write_csv, write_snapshot
from .params import NONDEGENERATE, ParameterError, validate
from .verification import verification_suite

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_NONCONVERGED = 0, 1, 2, 3
FIELD_CSV_LIMIT = 128 * 128

log = logging.getLogger("tphase")

CUSP_COLUMNS = (
    "ratio",
    "mode",
    "epsilon",
    "cusp_height",
    "relative_energy_loss",
    "cusp_width",
    "energy_per_interface",
    "converged",
    "time",
    "steps",
)
COMPARE_COLUMNS = ("time", "l2_c", "l2_d", "l2_c3", "energy_a", "energy_b", "relative_energy_difference")


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


class Session:
    """Output directory and manifest bookkeeping for one invocation."""

    def __init__(self, command: str, cfg: RunConfig, out_root: Path):
        self.cfg = cfg
        self.hash = config_hash({"command": command, **cfg.raw})
        self.dir = out_root / f"{command}-{self.hash[:12]}"
        self.dir.mkdir(parents=True, exist_ok=True)
        self.t0 = time.perf_counter()
        self.manifest = RunManifest(
            config_hash=self.hash,
            parameters=resolved_parameters(cfg),
            output_dir=str(self.dir),
            version=__version__,
            started=_now(),
        )
        self.manifest.write(self.dir / "manifest.json")

    def path(self, name: str) -> Path:
        return self.dir / name

    def close(self, status: str, **extra) -> None:
        self.manifest.status = status
        self.manifest.finished = _now()
        self.manifest.wall_seconds = time.perf_counter() - self.t0
        self.manifest.extra.update(extra)
        self.manifest.write(self.dir / "manifest.json")


def field_names(model: str) -> tuple[str, str]:
    return ("c", "d") if model == NONDEGENERATE else ("phi", "psi")


def write_state(session: Session, state: SimState, spec, grid: Grid2D, tag: str, csv_too: bool = False) -> None:
    for name, data in zip(field_names(spec.model), (state.u, state.v)):
        write_snapshot(session.path(f"snapshots/{tag}_{name}.bin"), data, name, state.time, grid.Lx, grid.Ly)
        if csv_too and data.size <= FIELD_CSV_LIMIT:
            atomic_write(session.path(f"snapshots/{tag}_{name}.csv"), field_csv_bytes(data))


def write_diagnostics(path: Path, run: RunResult) -> None:
    write_csv(path, DIAGNOSTIC_COLUMNS, [r.as_row() for r in run.history])


def initial_fields(cfg: RunConfig, grid: Grid2D):
    spec, ic = cfg.spec, cfg.initial
    width = spec.interface_width
    if ic.shape == "slab":
        phi, psi = slab_initial(grid, width)
    elif ic.shape == "lens":
        geom = LensGeometry(ic.interface_y, (ic.centre_x, ic.centre_y), ic.radius)
        phi, psi = lens_initial(grid, width, geom)
    else:
        raise ConfigError(f"initial.shape must be 'slab' or 'lens', not {ic.shape!r}")
    if ic.perturbation:
        psi = psi - ic.perturbation * 0.5 * (1 + smooth_noise(grid, np.random.default_rng(ic.seed)))
    return phi, psi


# --------------------------------------------------------------------------
# commands


def cmd_run(cfg: RunConfig, session: Session, snapshot_every: int) -> int:
    spec = cfg.spec
    n = spec.numerics
    grid = Grid2D(n.Nx, n.Ny, n.Lx, n.Ly)
    state = initial_state_for(spec, *initial_fields(cfg, grid))
    write_state(session, state, spec, grid, "initial", cfg.field_csv)
    counter = {"k": 0}

    def on_output(st: SimState) -> None:
        counter["k"] += 1

    run = run_to_equilibrium(state, spec, grid, snapshot_every=snapshot_every or None, callback=on_output)
    write_diagnostics(session.path("diagnostics.csv"), run)
    for snap in run.snapshots:
        write_state(session, snap, spec, grid, f"step{snap.step:09d}")
    write_state(session, run.state, spec, grid, "final", cfg.field_csv)
    print(f"run: {len(run.history)} records, t={run.state.time:.6g}, converged={run.converged}")
    if cfg.require_equilibrium and not run.converged:
        print("error: equilibrium not reached before t_end", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def _cusp_point(args):
    ratio, mode, spec, require = args
    return cusp_experiment(ratio, mode, spec, require_convergence=require, keep_run=True)


def _robustness_point(args):
    ratio, eps_list, spec = args
    return epsilon_robustness(ratio, "inconsistent", eps_list, spec)


def _pool_map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def cmd_cusp_sweep(cfg: RunConfig, session: Session, jobs: int) -> int:
    sweep = cfg.cusp_sweep
    points = [(r, m, cfg.spec, cfg.require_equilibrium) for m in sweep.modes for r in sweep.ratios]
    results = _pool_map(_cusp_point, points, jobs)
    n = cfg.spec.numerics
    grid = Grid2D(n.Nx, n.Ny, n.Lx, n.Ly)
    rows = []
    for res in results:
        rows.append(res.summary())
        tag = f"cusp_{res.mode}_r{res.ratio:g}"
        write_diagnostics(session.path(f"{tag}_diagnostics.csv"), res.run)
        write_state(session, res.final, cusp_spec(cfg.spec, res.ratio, res.mode), grid, tag)
    write_csv(session.path("cusp_summary.csv"), CUSP_COLUMNS, rows)
    if sweep.epsilons:
        rob = _robustness_point((sweep.robustness_ratio, sweep.epsilons, cfg.spec))
        write_csv(session.path("epsilon_robustness.csv"), CUSP_COLUMNS, [r.summary() for r in rob])
    for row in rows:
        print(f"ratio={row['ratio']:g} mode={row['mode']} height={row['cusp_height']:.4g} loss={row['relative_energy_loss']:.4g}")
    return EXIT_OK


def cmd_compare(cfg: RunConfig, session: Session) -> int:
    a, b = comparison_pair(cfg.compare_kind, cfg.spec)
    if cfg.second_numerics:
        b = dataclasses.replace(b, numerics=dataclasses.replace(b.numerics, **cfg.second_numerics))
    res = comparison_experiment((a, b))
    write_csv(session.path("compare.csv"), COMPARE_COLUMNS, res.rows())
    grid = Grid2D(a.numerics.Nx, a.numerics.Ny, a.numerics.Lx, a.numerics.Ly)
    write_state(session, res.final_a, a, grid, "final_first")
    write_state(session, res.final_b, b, grid, "final_second")
    print(
        f"compare ({cfg.compare_kind}): max L2 = {res.max_l2:.3e}, "
        f"max relative energy difference = {res.max_relative_energy_difference:.3e}"
    )
    return EXIT_OK


def cmd_check(cfg: RunConfig, session: Session) -> int:
    results, pinned = verification_suite(cfg.spec)
    lines = [r.line() for r in results]
    lines.append("pinned potential parameters: " + ", ".join(f"{k}={v:.12g}" for k, v in pinned.items()))
    report = "\n".join(lines) + "\n"
    atomic_write(session.path("check_report.txt"), report.encode())
    write_csv(
        session.path("check.csv"),
        ("check", "error", "tolerance", "ok"),
        [(r.name, r.error, r.tolerance, r.ok) for r in results],
    )
    print(report, end="")
    return EXIT_OK if all(r.ok for r in results) else EXIT_CONFIG


COMMANDS = ("run", "cusp-sweep", "compare", "check")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tphase", description="Ternary Cahn-Hilliard simulations.")
    p.add_argument("--version", action="version", version=f"tphase {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("config", type=Path)
    p.add_argument("--out", type=Path, default=Path("tphase-out"), help="output root (TPHASE_OUT overrides)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--snapshot-every", type=int, default=None, help="snapshot interval in steps")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    out_root = Path(os.environ["TPHASE_OUT"]) if os.environ.get("TPHASE_OUT") else args.out
    try:
        cfg = load_config(args.config)
        if args.snapshot_every is not None:
            cfg = dataclasses.replace(cfg, snapshot_every=args.snapshot_every)
        problems = validate(cfg.spec)
        if problems:
            raise ConfigError("invalid configuration: " + "; ".join(problems))
    except (ConfigError, ParameterError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG

    session = Session(args.command, cfg, out_root)
    try:
        if args.command == "run":
            code = cmd_run(cfg, session, cfg.snapshot_every)
        elif args.command == "cusp-sweep":
            code = cmd_cusp_sweep(cfg, session, args.jobs)
        elif args.command == "compare":
            code = cmd_compare(cfg, session)
        else:
            code = cmd_check(cfg, session)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_CONFIG
    except BlowUpError as exc:
        print(f"error: simulation blew up: {exc}", file=sys.stderr)
        code = EXIT_BLOWUP
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_NONCONVERGED
    session.close({0: "ok", 1: "config-error", 2: "blow-up", 3: "not-converged"}.get(code, "failed"), exit_code=code)
    return code


if __name__ == "__main__":
    sys.exit(main())
