"""Command line interface: single runs, seed batches, metric recomputation, comparison.

Outputs are deterministic byte for byte: rerunning the same command over
the same inputs reproduces identical trace and metrics files.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .config import (
    STRATEGIES,
    ConfigError,
    ScenarioConfig,
    emit_scenario,
    load_scenario,
)
from .metrics import compute_metrics, metrics_to_dict
from .simulator import run_scenario
from .traceio import (
    aggregate_metrics,
    metrics_from_trace_file,
    read_metrics_json,
    write_metrics_json,
    write_trace_csv,
)


@dataclass(frozen=True)
class RunManifest:
    """One batch: a scenario, the seeds and strategies to sweep, and the output dir."""

    config_path: str
    seeds: tuple[int, ...]
    strategies: tuple[str, ...]
    out_dir: str


def validate_manifest(manifest: RunManifest) -> None:
    if not manifest.seeds:
        raise ConfigError("seeds: at least one seed is required")
    if len(set(manifest.seeds)) != len(manifest.seeds):
        raise ConfigError("seeds: must be unique")
    if not manifest.strategies:
        raise ConfigError("strategies: at least one strategy is required")
    for strategy in manifest.strategies:
        if strategy not in STRATEGIES:
            raise ConfigError(f"strategy: must be one of {STRATEGIES}")


def load_config(path) -> ScenarioConfig:
    """Load and validate a scenario file (missing file reported as an error)."""
    if not Path(path).is_file():
        raise ConfigError(f"{path}: no such config file")
    return load_scenario(path)


def _trace_name(strategy: str, seed: int) -> str:
    return f"trace_{strategy}_{seed}.csv"


def _metrics_name(strategy: str, seed: int) -> str:
    return f"metrics_{strategy}_{seed}.json"


def _run_one(config: ScenarioConfig, out_dir: str) -> dict:
    """Run one (strategy, seed) scenario and write its trace and metrics files."""
    trace = run_scenario(config)
    summary = compute_metrics(trace)
    out = Path(out_dir)
    write_trace_csv(trace, out / _trace_name(config.strategy, config.seed))
    data = metrics_to_dict(summary)
    write_metrics_json(data, out / _metrics_name(config.strategy, config.seed))
    return data


def _parse_seeds(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise ConfigError(f"seeds: could not parse {text!r} as comma-separated integers")


def _apply_overrides(config: ScenarioConfig, args) -> ScenarioConfig:
    if getattr(args, "seed", None) is not None:
        config = replace(config, seed=args.seed)
    if getattr(args, "strategy", None):
        strategy = args.strategy if isinstance(args.strategy, str) else args.strategy[0]
        if strategy not in STRATEGIES:
            raise ConfigError(f"strategy: must be one of {STRATEGIES}")
        config = replace(config, strategy=strategy)
    if getattr(args, "beam_width", None) is not None:
        config = replace(config, beam_width=args.beam_width)
    return config


def cmd_run(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    emit_scenario(config, out / "resolved_config.yaml")
    data = _run_one(config, out)
    print(
        f"{config.strategy} seed={config.seed}: "
        f"ate_mean={data['ate_mean']:.4f} ate_p95={data['ate_p95']:.4f}"
    )
    return 0


def cmd_batch(args) -> int:
    manifest = RunManifest(
        config_path=args.config,
        seeds=_parse_seeds(args.seeds),
        strategies=tuple(args.strategy) if args.strategy else (),
        out_dir=args.out,
    )
    base = load_config(manifest.config_path)
    if not manifest.strategies:
        manifest = replace(manifest, strategies=(base.strategy,))
    validate_manifest(manifest)
    if args.beam_width is not None:
        base = replace(base, beam_width=args.beam_width)

    out = Path(manifest.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_scenario(base, out / "resolved_config.yaml")
    jobs = [
        replace(base, strategy=strategy, seed=seed)
        for strategy in manifest.strategies
        for seed in manifest.seeds
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            entries = list(pool.map(_run_one, jobs, [str(out)] * len(jobs)))
    else:
        entries = [_run_one(job, str(out)) for job in jobs]

    write_metrics_json(aggregate_metrics(entries), out / "aggregate.json")
    files = sorted(
        [_trace_name(j.strategy, j.seed) for j in jobs]
        + [_metrics_name(j.strategy, j.seed) for j in jobs]
        + ["aggregate.json", "resolved_config.yaml", "index.json"]
    )
    write_metrics_json(
        {
            "config": str(manifest.config_path),
            "out": str(manifest.out_dir),
            "seeds": list(manifest.seeds),
            "strategies": list(manifest.strategies),
            "files": files,
        },
        out / "index.json",
    )
    for entry in entries:
        print(
            f"{entry['strategy']} seed={entry['seed']}: "
            f"ate_mean={entry['ate_mean']:.4f}"
        )
    return 0


def cmd_metrics(args) -> int:
    config = load_config(args.config)
    if not Path(args.trace).is_file():
        raise ConfigError(f"{args.trace}: no such trace file")
    strategy = args.strategy or config.strategy
    seed = args.seed if args.seed is not None else config.seed
    summary = metrics_from_trace_file(
        args.trace,
        config.bmav_destinations,
        config.success_accuracy,
        config.success_time_limits,
        strategy=strategy,
        seed=seed,
    )
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_metrics_json(summary, out)
    print(f"wrote {out}")
    return 0


def cmd_compare(args) -> int:
    entries = []
    for path in args.metrics:
        if not Path(path).is_file():
            raise ConfigError(f"{path}: no such metrics file")
        entries.append(read_metrics_json(path))
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_metrics_json(aggregate_metrics(entries), out)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mavloc",
        description="Cooperative localization simulator for heterogeneous MAV swarms",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and emit its trace and metrics")
    run.add_argument("--config", required=True, help="scenario YAML file")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--strategy", choices=STRATEGIES, default=None)
    run.add_argument("--beam-width", type=int, default=None, dest="beam_width")
    run.set_defaults(func=cmd_run)

    batch = sub.add_parser("batch", help="sweep strategies and seeds, then aggregate")
    batch.add_argument("--config", required=True)
    batch.add_argument("--out", required=True)
    batch.add_argument("--seeds", required=True, help="comma-separated seed list")
    batch.add_argument(
        "--strategy",
        choices=STRATEGIES,
        action="append",
        help="strategy to include (repeatable; default: the scenario's)",
    )
    batch.add_argument("--beam-width", type=int, default=None, dest="beam_width")
    batch.add_argument("--jobs", type=int, default=1, help="parallel runs")
    batch.set_defaults(func=cmd_batch)

    metrics = sub.add_parser("metrics", help="recompute metrics from a trace file")
    metrics.add_argument("trace", help="trace CSV emitted by run or batch")
    metrics.add_argument("--config", required=True)
    metrics.add_argument("--out", required=True, help="output metrics JSON path")
    metrics.add_argument("--strategy", choices=STRATEGIES, default=None)
    metrics.add_argument("--seed", type=int, default=None)
    metrics.set_defaults(func=cmd_metrics)

    compare = sub.add_parser("compare", help="aggregate metrics files across strategies")
    compare.add_argument("metrics", nargs="+", help="metrics JSON files")
    compare.add_argument("--out", required=True, help="output aggregate JSON path")
    compare.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
