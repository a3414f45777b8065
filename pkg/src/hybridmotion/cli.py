"""Command-line front end: scenario runs, comparisons, parameter sweeps.

Commands
    run <scenario>       execute a preset or scenario file, write artifacts
    compare <scenario>   run both variants and add a delta report
    sweep <scenario> --param <path> --values v1,v2,...   one row per value
    presets              list the built-in scenarios

Every run writes, per variant, a trajectory CSV (t, x, v, d, u_pd) and an
events CSV (t, guard, c, pre_v, post_v, gain), plus metrics.json and a
manifest.json that echoes the command line and the fully resolved scenario,
enough to reproduce the run exactly. Identical command and seed produce
byte-identical CSVs. Floats are written with full round-trip precision.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import (
    DomainError,
    NumericalDivergenceError,
    SimulationError,
    ZenoSuspicionError,
)
from .scenarios import (
    PRESET_SUMMARIES,
    from_dict,
    preset_names,
    resolve,
    run_scenario,
)

OUT_DIR_ENV = "HYBRIDMOTION_OUT"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ZENO = 3
EXIT_DIVERGED = 4


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(cell) for cell in row) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _trajectory_rows(traj):
    return zip(traj.t, traj.x, traj.v, traj.d, traj.u_pd)


def _event_rows(traj):
    for ev in traj.jumps:
        yield (ev.t_event, ev.guard.value, ev.c_used, ev.pre_state.v,
               ev.post_state.v, ev.gain_applied)


def _load_scenario_dict(ref: str, overrides, seed):
    """Resolve a preset name or scenario file path into a full dict."""
    path = Path(ref)
    if path.suffix == ".json" or path.exists():
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        return resolve(raw, overrides, seed)
    return resolve(ref, overrides, seed)


def _emit_artifacts(out_root: Path, data: dict, result, argv, seed):
    out_dir = out_root / data["name"]
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = {}
    for variant, traj in result.trajectories.items():
        traj_path = out_dir / f"trajectory_{variant}.csv"
        events_path = out_dir / f"events_{variant}.csv"
        _write_csv(traj_path, ("t", "x", "v", "d", "u_pd"), _trajectory_rows(traj))
        _write_csv(events_path, ("t", "guard", "c", "pre_v", "post_v", "gain"),
                   _event_rows(traj))
        artifacts[f"trajectory_{variant}"] = str(traj_path)
        artifacts[f"events_{variant}"] = str(events_path)

    metrics_path = out_dir / "metrics.json"
    _write_json(metrics_path, result.summary())
    artifacts["metrics"] = str(metrics_path)

    manifest_path = out_dir / "manifest.json"
    _write_json(manifest_path, {
        "tool": "hybridmotion",
        "version": __version__,
        "argv": list(argv),
        "seed": seed,
        "scenario": data,
        "artifacts": {k: os.path.relpath(v, out_dir) for k, v in artifacts.items()},
    })
    artifacts["manifest"] = str(manifest_path)
    return out_dir, artifacts


def _out_root(args) -> Path:
    if args.out:
        return Path(args.out)
    env = os.environ.get(OUT_DIR_ENV)
    return Path(env) if env else Path("runs")


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def cmd_run(args, argv) -> int:
    data = _load_scenario_dict(args.scenario, args.set or (), args.seed)
    spec = from_dict(data)
    result = run_scenario(spec)
    out_dir, _ = _emit_artifacts(_out_root(args), data, result, argv, args.seed)
    for variant, traj in result.trajectories.items():
        rep = traj.settling_report()
        _say(args, f"{spec.name} [{variant}] settling_time={rep.settling_time} "
                   f"jumps={rep.jump_count} final_x={rep.final_state.x:.6g}")
    _say(args, f"artifacts in {out_dir}")
    return EXIT_OK


def cmd_compare(args, argv) -> int:
    data = _load_scenario_dict(args.scenario, args.set or (), args.seed)
    data["variants"] = "both"
    spec = from_dict(data)
    result = run_scenario(spec)
    out_dir, _ = _emit_artifacts(_out_root(args), data, result, argv, args.seed)
    cmp_ = result.summary()["comparison"]
    _say(args, f"{spec.name} settling on/off: {cmp_['settling_time_on']} / "
               f"{cmp_['settling_time_off']} (ratio {cmp_['settling_time_ratio']})")
    _say(args, f"jumps on/off: {cmp_['jump_count_on']} / {cmp_['jump_count_off']}; "
               f"peak speed ratio {cmp_['peak_speed_ratio']}")
    _say(args, f"artifacts in {out_dir}")
    return EXIT_OK


SWEEP_COLUMNS = ("param", "value", "status", "settling_time", "first_entry_time",
                 "overshoot", "peak_speed", "jump_count", "final_x", "final_v",
                 "error")


def cmd_sweep(args, argv) -> int:
    base = _load_scenario_dict(args.scenario, args.set or (), args.seed)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise DomainError("sweep needs at least one value")

    rows = []
    for raw in values:
        row = {"param": args.param, "value": raw}
        try:
            data = json.loads(json.dumps(base))  # deep copy
            from .scenarios import apply_override
            apply_override(data, args.param, raw)
            data["variants"] = "impulses_on"  # sweeps study the hybrid run
            spec = from_dict(data)
            result = run_scenario(spec)
            rep = result.trajectories["impulses_on"].settling_report()
            row.update(status="ok", settling_time=rep.settling_time,
                       first_entry_time=rep.first_entry_time,
                       overshoot=rep.overshoot, peak_speed=rep.peak_speed,
                       jump_count=rep.jump_count, final_x=rep.final_state.x,
                       final_v=rep.final_state.v, error="")
        except (DomainError, ZenoSuspicionError, NumericalDivergenceError) as exc:
            row.update(status="rejected", settling_time="", first_entry_time="",
                       overshoot="", peak_speed="", jump_count="", final_x="",
                       final_v="", error=str(exc).replace(",", ";"))
        rows.append(row)

    out_dir = _out_root(args) / f"{base['name']}__sweep__{args.param.replace('.', '_')}"
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "sweep.csv"
    _write_csv(csv_path, SWEEP_COLUMNS,
               ([("" if row[c] is None else row[c]) for c in SWEEP_COLUMNS]
                for row in rows))
    _write_json(out_dir / "manifest.json", {
        "tool": "hybridmotion",
        "version": __version__,
        "argv": list(argv),
        "seed": args.seed,
        "scenario": base,
        "sweep": {"param": args.param, "values": values},
        "artifacts": {"sweep": "sweep.csv"},
    })
    for row in rows:
        _say(args, f"{args.param}={row['value']}: {row['status']}"
                   + (f" settling={row['settling_time']} jumps={row['jump_count']}"
                      if row["status"] == "ok" else f" ({row['error']})"))
    _say(args, f"artifacts in {out_dir}")
    return EXIT_OK


def cmd_presets(args, argv) -> int:
    for name in preset_names():
        print(f"{name:26s} {PRESET_SUMMARIES[name]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridmotion",
        description="Impulse-based hybrid motion control simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV} or ./runs)")
        p.add_argument("--seed", type=int, help="seed for the time-varying damping model")
        p.add_argument("--set", action="append", metavar="PATH=VALUE",
                       help="override a scenario field, e.g. controller.gamma=0.7")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")

    p_run = sub.add_parser("run", help="run a preset or scenario file")
    p_run.add_argument("scenario", help="preset name or path to a scenario JSON file")
    add_common(p_run)

    p_cmp = sub.add_parser("compare", help="run both variants and report deltas")
    p_cmp.add_argument("scenario")
    add_common(p_cmp)

    p_sweep = sub.add_parser("sweep", help="run one scenario across parameter values")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("--param", required=True, help="dotted field path, e.g. controller.gamma")
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    add_common(p_sweep)

    sub.add_parser("presets", help="list built-in scenarios")
    return parser


_COMMANDS = {
    "run": cmd_run,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
    "presets": cmd_presets,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args, argv)
    except ZenoSuspicionError as exc:
        print(f"error: zeno suspicion: {exc}", file=sys.stderr)
        return EXIT_ZENO
    except NumericalDivergenceError as exc:
        print(f"error: numerical divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (DomainError, SimulationError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
