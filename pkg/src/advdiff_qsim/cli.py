"""Command-line front end: ``run``, ``verify`` and ``bench``.

Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .boundary import reflect_problem, symmetry_defect
from .errors import ConfigurationError, ConsistencyError, NumericalError
from .lattice import Boundary
from .lcu import SimulationConfig, run_simulation
from .scenarios import SCENARIOS, Scenario, heat, mse_metric, taylor_green

log = logging.getLogger("advdiff_qsim")

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "scenario": None,
    "nx": None,
    "nt": None,
    "ra": 0.1,
    "rh": 0.1,
    "dims": None,
    "bc": "periodic",
    "mode": "both",
    "snapshots": "0,0.1,0.2,1",
    "out": "out",
    "tol": 1e-10,
    "seed": 0,
    "shots": "off",
}
RUN_KEYS = tuple(DEFAULTS)
AXIS_NAMES = ("ix", "iy", "iz")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


class UsageError(Exception):
    pass


def _parse_list(value, cast):
    if isinstance(value, (list, tuple)):
        return [cast(v) for v in value]
    return [cast(v) for v in str(value).split(",") if v.strip()]


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, the optional JSON file and explicit flags (flags win)."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a flat JSON object")
        unknown = set(data) - set(RUN_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update(data)
    for key in RUN_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if not cfg["scenario"]:
        raise UsageError("no scenario given (use --scenario or a config file)")
    if cfg["scenario"] not in SCENARIOS:
        raise UsageError(f"unknown scenario {cfg['scenario']!r}; choose from {', '.join(SCENARIOS)}")
    if cfg["mode"] not in ("quantum", "classical", "both"):
        raise UsageError(f"mode must be quantum, classical or both, got {cfg['mode']!r}")
    return cfg


def build_scenario(cfg: dict) -> Scenario:
    name = cfg["scenario"]
    dims = cfg["dims"]
    if name == "taylor-green":
        if dims not in (None, 2):
            raise ConfigurationError("taylor-green is two-dimensional")
        dims = 2
    else:
        dims = 1 if dims is None else int(dims)
    bc = _parse_list(cfg["bc"], Boundary.parse)
    if len(bc) == 1:
        bc = bc * dims
    if len(bc) != dims:
        raise ConfigurationError(f"{len(bc)} boundary flags for a {dims}-d problem")
    if name == "taylor-green":
        if any(b is not Boundary.PERIODIC for b in bc):
            raise ConfigurationError("reflecting walls need a mirror-symmetric velocity; "
                                     "taylor-green runs on the periodic domain only")
        return taylor_green(int(cfg["nx"] or 64), int(1400 if cfg["nt"] is None else cfg["nt"]),
                            float(cfg["ra"]), float(cfg["rh"]))
    return heat(int(cfg["nx"] or 32), int(200 if cfg["nt"] is None else cfg["nt"]),
                float(cfg["rh"]), dims, tuple(bc))


def snapshot_steps(fractions, n_steps: int) -> list[int]:
    steps = sorted({int(round(float(f) * n_steps)) for f in fractions})
    bad = [s for s in steps if not 0 <= s <= n_steps]
    if bad:
        raise ConfigurationError("snapshot fractions must lie in [0, 1]")
    return steps


def _write_snapshot(path: Path, grid, columns: dict[str, np.ndarray]):
    idx = np.arange(grid.size)
    coords = [(idx // s) % n for s, n in zip(grid.strides, grid.shape)]
    names = list(AXIS_NAMES[: grid.dims]) if grid.dims <= 3 else [f"i{j}" for j in range(grid.dims)]
    header = ",".join(names + list(columns))
    with path.open("w", newline="\n") as fh:
        fh.write(header + "\n")
        for m in range(grid.size):
            cells = [str(int(c[m])) for c in coords] + [fmt(v[m]) for v in columns.values()]
            fh.write(",".join(cells) + "\n")


def cmd_run(cfg: dict) -> int:
    scenario = build_scenario(cfg)
    mode = cfg["mode"]
    shots = None if str(cfg["shots"]).lower() == "off" else int(cfg["shots"])
    if shots is not None and shots < 1:
        raise ConfigurationError("--shots must be 'off' or a positive integer")
    steps = snapshot_steps(_parse_list(cfg["snapshots"], float), scenario.n_steps)

    problem = None
    field0, params = scenario.field0, scenario.params
    if not scenario.grid.is_periodic:
        problem = reflect_problem(scenario.field0, scenario.velocity, params.dt, params.diffusivity)
        field0, params = problem.field0, problem.params

    sim_cfg = SimulationConfig(
        params=params, n_steps=scenario.n_steps, snapshots=tuple(steps),
        quantum=mode in ("quantum", "both"), classical=mode in ("classical", "both"),
        tol=float(cfg["tol"]), shots=shots, seed=int(cfg["seed"]),
    )
    log.info("running %s on %s grid for %d steps", scenario.name, scenario.grid.shape, scenario.n_steps)
    report = run_simulation(field0, sim_cfg)

    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    symmetry = {}
    mse = {}
    for t in steps:
        cols = {}
        q = report.quantum_snapshots.get(t)
        c = report.classical_snapshots.get(t)
        if problem is not None:
            if q is not None:
                symmetry[t] = max(symmetry_defect(q, dim, par) for dim, par in problem.reflected)
                # quantum parity is only preserved up to the encoding error
                q = problem.restrict(q, tol=np.inf, normalize=True)
            if c is not None:
                c = problem.restrict(c)
        if q is not None:
            cols["quantum"] = q.values
        if c is not None:
            cols["classical"] = c.values
        if q is not None and c is not None:
            mse[t] = mse_metric(q, c)
        _write_snapshot(out / f"snapshot_{t:06d}.csv", scenario.grid, cols)

    ledger = report.ledger
    if sim_cfg.quantum:
        with (out / "probability.csv").open("w", newline="\n") as fh:
            cols = ["step", "p_t", "cumulative", "classical_norm_ratio"]
            if ledger.survivors is not None:
                cols.append("survivors")
            fh.write(",".join(cols) + "\n")
            for i, (p, cum) in enumerate(zip(ledger.per_step, ledger.cumulative)):
                row = [str(i + 1), fmt(p), fmt(cum)]
                row.append(fmt(ledger.classical_norm_ratio[i]) if ledger.classical_norm_ratio else "")
                if ledger.survivors is not None:
                    row.append(str(ledger.survivors[i]))
                fh.write(",".join(row) + "\n")

    summary = {
        "parameters": {**scenario.describe(), "mode": mode, "tol": sim_cfg.tol,
                       "seed": sim_cfg.seed, "shots": shots, "snapshot_steps": steps,
                       "boundary": [b.value for b in scenario.grid.boundary]},
        "steps_run": report.steps,
        "system_qubits": scenario.grid.n_qubits,
        "ancilla_qubits": scenario.n_ancilla,
        "simulated_qubits": report.n_qubits,
    }
    if sim_cfg.quantum:
        summary["cumulative_probability"] = ledger.total
        summary["matvecs_per_step"] = report.matvecs_per_step
        if ledger.survivors is not None:
            summary["shots_survived"] = ledger.survivors[-1] if ledger.survivors else shots
    if sim_cfg.classical:
        summary["classical_norm_ratio"] = ledger.classical_norm_ratio[-1] if ledger.classical_norm_ratio else 1.0
    if mse:
        summary["mse_percent"] = {str(t): v for t, v in mse.items()}
        summary["final_mse_percent"] = mse[steps[-1]]
        summary["max_mse_percent"] = max(mse.values())
    if symmetry:
        summary["reflection_symmetry_defect"] = {str(t): v for t, v in symmetry.items()}
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    # wall time is kept apart so the other artifacts stay byte-stable
    (out / "timing.json").write_text(json.dumps({"wall_time_seconds": report.wall_time}) + "\n")
    print(f"{scenario.name}: {report.steps} steps, "
          + (f"cumulative probability {ledger.total:.6f}, " if sim_cfg.quantum else "")
          + (f"max MSE {max(mse.values()):.4f}% " if mse else "")
          + f"-> {out}")
    return EXIT_OK


def cmd_verify(seed: int) -> int:
    from .verify import run_checks

    results = run_checks(seed=seed)
    for name, ok, detail in results:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_NUMERIC


def cmd_bench(sizes, steps: int, dims: int, csv_path: str | None) -> int:
    from .bench import benchmark, format_table

    rows = benchmark(sizes, steps=steps, dims=dims)
    print(format_table(rows))
    if csv_path:
        keys = list(rows[0])
        with open(csv_path, "w", newline="\n") as fh:
            fh.write(",".join(keys) + "\n")
            for r in rows:
                fh.write(",".join(fmt(r[k]) if isinstance(r[k], float) else str(r[k]) for k in keys) + "\n")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="advdiff-qsim", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario and write CSV/JSON artifacts")
    r.add_argument("--config", help="flat JSON file of run options; flags override it")
    r.add_argument("--scenario", help=f"one of: {', '.join(SCENARIOS)}")
    r.add_argument("--nx", type=int)
    r.add_argument("--nt", type=int)
    r.add_argument("--ra", type=float, help="max advection number max(sum|v_j|) dt/dx")
    r.add_argument("--rh", type=float, help="diffusion number D dt/dx^2")
    r.add_argument("--dims", type=int)
    r.add_argument("--bc", help="periodic|neumann|dirichlet, one value or comma list per dimension")
    r.add_argument("--mode", choices=["quantum", "classical", "both"])
    r.add_argument("--snapshots", help="comma list of t/T fractions")
    r.add_argument("--out", help="artifact directory")
    r.add_argument("--tol", type=float, help="exponential-action tolerance")
    r.add_argument("--seed", type=int)
    r.add_argument("--shots", help="'off' or number of sampled trajectories")

    v = sub.add_parser("verify", help="dense-oracle consistency checks on small grids")
    v.add_argument("--seed", type=int, default=1234)

    b = sub.add_parser("bench", help="wall time and step count against grid size")
    b.add_argument("--sizes", default="16,32,64,128")
    b.add_argument("--steps", type=int, default=10)
    b.add_argument("--dims", type=int, default=2)
    b.add_argument("--csv")
    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            return cmd_run(resolve_config(args))
        if args.command == "verify":
            return cmd_verify(args.seed)
        return cmd_bench(_parse_list(args.sizes, int), args.steps, args.dims, args.csv)
    except (UsageError, ConfigurationError) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ConsistencyError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
