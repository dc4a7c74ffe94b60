"""File formats: CSV step traces, JSON metrics, and cross-run aggregates.

Floats are written with `repr`, which round-trips exactly, so recomputing
metrics from a trace file reproduces the original metrics byte for byte.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .metrics import MetricsSummary, compute_metrics_from_arrays, metrics_to_dict
from .simulator import SimTrace

TRACE_COLUMNS = (
    "t",
    "entity_kind",
    "entity_id",
    "true_x",
    "true_y",
    "est_x",
    "est_y",
    "cov_xx",
    "cov_xy",
    "cov_yy",
    "group_id",
    "observed_by",
)


def _fmt(value: float) -> str:
    return repr(float(value))


def write_trace_csv(trace: SimTrace, path) -> None:
    """One row per entity per timestep; fields that do not apply stay empty."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for record in trace.records:
            for j, pose in enumerate(record.amav_poses):
                writer.writerow(
                    [record.t, "amav", j, _fmt(pose.x1), _fmt(pose.x2)]
                    + [""] * 7
                )
            for i in range(len(record.bmav_true)):
                cov = record.bmav_cov[i]
                writer.writerow(
                    [
                        record.t,
                        "bmav",
                        i,
                        _fmt(record.bmav_true[i][0]),
                        _fmt(record.bmav_true[i][1]),
                        _fmt(record.bmav_est[i][0]),
                        _fmt(record.bmav_est[i][1]),
                        _fmt(cov[0, 0]),
                        _fmt(cov[0, 1]),
                        _fmt(cov[1, 1]),
                        record.group_of[i],
                        ";".join(str(j) for j in record.observed_by[i]),
                    ]
                )


@dataclass(eq=False)
class TraceTable:
    """Arrays recovered from a trace file, enough to recompute every metric."""

    true_positions: np.ndarray  # (T, N, 2)
    est_positions: np.ndarray  # (T, N, 2)
    covariances: np.ndarray  # (T, N, 2, 2)
    amav_positions: np.ndarray  # (T, M, 2)


def read_trace_csv(path) -> TraceTable:
    bmav_rows: dict[int, dict[int, list[float]]] = {}
    amav_rows: dict[int, dict[int, list[float]]] = {}
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if tuple(header) != TRACE_COLUMNS:
            raise ValueError(f"{path}: unexpected trace header {header}")
        for row in reader:
            t = int(row[0])
            entity_id = int(row[2])
            if row[1] == "amav":
                amav_rows.setdefault(t, {})[entity_id] = [float(row[3]), float(row[4])]
            elif row[1] == "bmav":
                bmav_rows.setdefault(t, {})[entity_id] = [float(v) for v in row[3:10]]
            else:
                raise ValueError(f"{path}: unknown entity kind {row[1]!r}")
    steps = sorted(bmav_rows)
    if steps != list(range(len(steps))):
        raise ValueError(f"{path}: trace is missing timesteps")
    n = len(bmav_rows[steps[0]])
    m = len(amav_rows[steps[0]]) if amav_rows else 0
    true_positions = np.empty((len(steps), n, 2))
    est_positions = np.empty((len(steps), n, 2))
    covariances = np.empty((len(steps), n, 2, 2))
    amav_positions = np.empty((len(steps), m, 2))
    for t in steps:
        for i in range(n):
            tx, ty, ex, ey, cxx, cxy, cyy = bmav_rows[t][i]
            true_positions[t, i] = (tx, ty)
            est_positions[t, i] = (ex, ey)
            covariances[t, i] = ((cxx, cxy), (cxy, cyy))
        for j in range(m):
            amav_positions[t, j] = amav_rows[t][j]
    return TraceTable(true_positions, est_positions, covariances, amav_positions)


def metrics_from_trace_file(
    path,
    destinations,
    accuracy_grid,
    time_grid,
    strategy: str = "",
    seed: int = 0,
) -> MetricsSummary:
    """Recompute run metrics from an emitted trace file."""
    table = read_trace_csv(path)
    return compute_metrics_from_arrays(
        table.true_positions,
        table.est_positions,
        table.covariances,
        np.asarray(destinations, dtype=float),
        accuracy_grid,
        time_grid,
        strategy=strategy,
        seed=seed,
    )


def write_metrics_json(metrics: MetricsSummary | dict, path) -> None:
    data = metrics if isinstance(metrics, dict) else metrics_to_dict(metrics)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle, sort_keys=True, indent=2)
        handle.write("\n")


def read_metrics_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def aggregate_metrics(entries: list[dict]) -> dict:
    """Cross-run comparison: per-strategy means of every reported metric.

    CDF curves are averaged pointwise across seeds (all runs report the
    same quantile fractions), and the success grid is averaged per cell.
    """
    by_strategy: dict[str, list[dict]] = {}
    for entry in sorted(entries, key=lambda d: (d["strategy"], d["seed"])):
        by_strategy.setdefault(entry["strategy"], []).append(entry)
    strategies = {}
    for strategy, group in sorted(by_strategy.items()):
        cdf_values = np.array([[point[0] for point in g["ate_cdf"]] for g in group])
        fractions = [point[1] for point in group[0]["ate_cdf"]]
        success_keys = sorted(group[0]["success"])
        strategies[strategy] = {
            "seeds": [g["seed"] for g in group],
            "ate_mean_per_seed": [g["ate_mean"] for g in group],
            "ate_mean": float(np.mean([g["ate_mean"] for g in group])),
            "ate_p50": float(np.mean([g["ate_p50"] for g in group])),
            "ate_p95": float(np.mean([g["ate_p95"] for g in group])),
            "xi_T": float(np.mean([g["xi_T"] for g in group])),
            "ate_cdf": [
                [float(v), float(f)] for v, f in zip(cdf_values.mean(axis=0), fractions)
            ],
            "success": {
                key: float(np.mean([g["success"][key] for g in group]))
                for key in success_keys
            },
        }
    return {"strategies": strategies}
