"""Run metrics: trajectory error statistics, navigation success, cumulative uncertainty."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simulator import SimTrace

CDF_POINTS = 101


@dataclass(eq=False)
class MetricsSummary:
    """Summary of one run; `ate` holds the full per-BMAV error series (N, T)."""

    strategy: str
    seed: int
    ate: np.ndarray
    ate_mean: float
    ate_p50: float
    ate_p95: float
    ate_cdf: list[list[float]]
    success: dict[str, float]
    xi_t: float


def success_key(eps: float, tau: int) -> str:
    return f"{eps:g}_{tau:g}"


def compute_metrics_from_arrays(
    true_positions: np.ndarray,
    est_positions: np.ndarray,
    covariances: np.ndarray,
    destinations: np.ndarray,
    accuracy_grid,
    time_grid,
    strategy: str = "",
    seed: int = 0,
) -> MetricsSummary:
    """Metrics from raw (T, N, ...) arrays; shared by live runs and trace files.

    The error series is the per-step distance between true and estimated
    positions.  Success under (eps, tau) counts BMAVs whose true position
    comes within eps of their destination during the first tau steps.  The
    error CDF is reported as 101 evenly spaced quantile points.
    """
    errors = np.linalg.norm(true_positions - est_positions, axis=2)  # (T, N)
    ate = errors.T
    pooled = np.sort(errors.reshape(-1))
    fractions = np.linspace(0.0, 1.0, CDF_POINTS)
    quantiles = np.quantile(pooled, fractions)
    cdf = [[float(q), float(f)] for q, f in zip(quantiles, fractions)]

    dest_dist = np.linalg.norm(
        true_positions - destinations[np.newaxis, :, :], axis=2
    )  # (T, N)
    success: dict[str, float] = {}
    for eps in accuracy_grid:
        for tau in time_grid:
            reached = (dest_dist[: min(int(tau), len(dest_dist))] <= eps).any(axis=0)
            success[success_key(eps, tau)] = float(reached.mean())

    xi_t = float(covariances[:, :, 0, 0].sum() + covariances[:, :, 1, 1].sum())
    return MetricsSummary(
        strategy=strategy,
        seed=seed,
        ate=ate,
        ate_mean=float(errors.mean()),
        ate_p50=float(np.percentile(pooled, 50)),
        ate_p95=float(np.percentile(pooled, 95)),
        ate_cdf=cdf,
        success=success,
        xi_t=xi_t,
    )


def compute_metrics(
    trace: SimTrace, accuracy_grid=None, time_grid=None
) -> MetricsSummary:
    """Metrics for a completed run; grids default to the scenario's settings."""
    config = trace.config
    if accuracy_grid is None:
        accuracy_grid = config.success_accuracy
    if time_grid is None:
        time_grid = config.success_time_limits
    true_positions = np.stack([r.bmav_true for r in trace.records])
    est_positions = np.stack([r.bmav_est for r in trace.records])
    covariances = np.stack([r.bmav_cov for r in trace.records])
    destinations = np.asarray(config.bmav_destinations, dtype=float)
    return compute_metrics_from_arrays(
        true_positions,
        est_positions,
        covariances,
        destinations,
        accuracy_grid,
        time_grid,
        strategy=trace.strategy,
        seed=trace.seed,
    )


def metrics_to_dict(metrics: MetricsSummary) -> dict:
    """JSON-ready form with the documented schema keys."""
    return {
        "strategy": metrics.strategy,
        "seed": metrics.seed,
        "ate_mean": metrics.ate_mean,
        "ate_p50": metrics.ate_p50,
        "ate_p95": metrics.ate_p95,
        "ate_cdf": metrics.ate_cdf,
        "success": dict(sorted(metrics.success.items())),
        "xi_T": metrics.xi_t,
    }
