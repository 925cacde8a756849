"""Evaluation quantities computed from frame results.

Normalized throughput is the fraction of channels that carried a decoded
packet; channel loading is active users per channel of a mode. Predictor
quality is reported as mean squared error of the backlog estimate, normalized
by the class population so scenarios of different size are comparable.
"""

from __future__ import annotations

import math

import numpy as np

from .slicing import SlicingPlan
from .traffic import BacklogState


def normalized_throughput(result) -> float:
    """Success channels over total channels for one frame; NaN when no channels."""
    l_u, l_m = result.plan_summary
    total = l_u + l_m
    if total == 0:
        return math.nan
    return (result.served_u + result.served_m) / total


def channel_loading(backlog: BacklogState, plan: SlicingPlan) -> tuple[float, float]:
    """Active users per channel, per mode; NaN for modes without channels."""
    cl_u = backlog.active_u / plan.l_u if plan.l_u else math.nan
    cl_m = backlog.active_m / plan.l_m if plan.l_m else math.nan
    return cl_u, cl_m


def predictor_mse(predictions, truths, population: int) -> float:
    """Population-normalized mean squared error of a backlog estimator."""
    preds = np.asarray(predictions, dtype=float)
    true = np.asarray(truths, dtype=float)
    if preds.size == 0 or preds.shape != true.shape:
        raise ValueError("predictions and truths must be equal-length and non-empty")
    if population < 1:
        raise ValueError("population must be >= 1")
    return float(np.mean(((preds - true) / population) ** 2))


def predictor_mse_raw(predictions, truths) -> float:
    """Unnormalized mean squared error, in users squared."""
    preds = np.asarray(predictions, dtype=float)
    true = np.asarray(truths, dtype=float)
    if preds.size == 0 or preds.shape != true.shape:
        raise ValueError("predictions and truths must be equal-length and non-empty")
    return float(np.mean((preds - true) ** 2))


def mean_and_stderr(samples) -> tuple[float, float]:
    """NaN-aware mean and standard error across realization samples.

    Values are sorted before reduction so the result is exactly invariant to
    sample order (floating-point sums are not associative).
    """
    data = np.asarray(samples, dtype=float)
    finite = np.sort(data[np.isfinite(data)])
    if finite.size == 0:
        return math.nan, math.nan
    if finite.size == 1:
        return float(finite[0]), 0.0
    return float(np.mean(finite)), float(np.std(finite, ddof=1) / math.sqrt(finite.size))
