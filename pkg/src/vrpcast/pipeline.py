"""End-to-end orchestration: ingest -> stationarity -> lag selection ->
patterns -> training -> forecasting -> evaluation, with all artifacts
written as CSV/JSON."""

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import lag_select, mlp, series_ops, stat_tests, trainers
from .data_ingest import TimeSeries, load_csv
from .errors import PipelineStageError, TrainingError, VrpcastError

log = logging.getLogger(__name__)

ACF_MAX_LAG = 20


@dataclass(frozen=True)
class PipelineConfig:
    input_path: Optional[str] = None
    mode: str = "power"
    train_fraction: float = 0.8
    lag: Optional[int] = None            # None = entropy-based selection
    max_lag: int = 12
    bins: int = lag_select.DEFAULT_BINS
    hidden: Optional[int] = None         # None = grid search over h_range
    h_range: tuple = (2, 25)             # inclusive bounds
    algorithm: str = "brnn"
    max_epochs: int = 1000
    forecast_horizon: int = 1
    out_dir: Optional[str] = None
    seed: int = 0

    def train_config(self, algorithm: Optional[str] = None) -> trainers.TrainConfig:
        return trainers.TrainConfig(
            algorithm=algorithm or self.algorithm,
            max_epochs=self.max_epochs,
            seed=self.seed,
        )

    @classmethod
    def from_dict(cls, payload: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "h_range" in payload:
            payload = dict(payload, h_range=tuple(payload["h_range"]))
        return cls(**payload)


@dataclass(frozen=True)
class EvalReport:
    train_stats: stat_tests.ErrorStats
    test_stats: stat_tests.ErrorStats
    acf_actual: tuple
    acf_forecast: tuple
    acf_fidelity: float
    paired_ttest: stat_tests.TTestResult
    two_sample_ttest: stat_tests.TTestResult
    provenance: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "train_stats": self.train_stats.to_dict(),
            "test_stats": self.test_stats.to_dict(),
            "acf_actual": list(self.acf_actual),
            "acf_forecast": list(self.acf_forecast),
            "acf_fidelity": self.acf_fidelity,
            "paired_ttest": self.paired_ttest.to_dict(),
            "two_sample_ttest": self.two_sample_ttest.to_dict(),
            "provenance": self.provenance,
        }


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(c) if isinstance(c, float) else str(c) for c in row) + "\n")


def _stage(stage, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except VrpcastError as exc:
        raise PipelineStageError(stage, str(exc)) from exc


def one_step_predictions_watts(model, patterns, values):
    """One-step forecasts in watts for every pattern, each anchored on the
    actual previous observation. Returns (actual_watts, predicted_watts)."""
    pred_norm = mlp.forward_batch(model, patterns.inputs)
    pred_resid = patterns.norm.invert(pred_norm)
    p = patterns.lag
    idx = np.arange(patterns.n_patterns)
    anchors = values[idx + p]
    actual = values[idx + p + 1]
    return actual, anchors + pred_resid


def forecast_multi_step(model, last_window, horizon, norm, last_observed_value):
    """Iterated one-step forecasts; window holds the most recent residuals
    (watt units, oldest first). Returns watt-level forecasts."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    window = np.asarray(last_window, dtype=float).copy()
    if window.shape != (model.input_dim,):
        raise ValueError(f"window must have length {model.input_dim}")
    preds_resid = np.empty(horizon)
    for step in range(horizon):
        pred_norm = mlp.forward(model, norm.apply(window))
        if not np.isfinite(pred_norm):
            raise TrainingError(f"non-finite forecast at horizon step {step + 1}")
        resid = float(norm.invert(pred_norm))
        preds_resid[step] = resid
        window = np.concatenate([window[1:], [resid]])
    return series_ops.undifference(preds_resid, last_observed_value)


def evaluate(model, patterns, values, provenance=None) -> EvalReport:
    """Error statistics, ACF comparison and hypothesis tests in watt units."""
    actual, predicted = one_step_predictions_watts(model, patterns, values)
    split = patterns.split_index
    train_stats = stat_tests.error_stats(actual[:split], predicted[:split])
    test_stats = stat_tests.error_stats(actual[split:], predicted[split:])
    acf_actual = series_ops.acf(actual[split:], ACF_MAX_LAG)
    acf_forecast = series_ops.acf(predicted[split:], ACF_MAX_LAG)
    fidelity = float(np.mean(np.abs(acf_actual[1:] - acf_forecast[1:])))
    paired = stat_tests.paired_ttest(actual[split:], predicted[split:])
    target_resid = patterns.norm.invert(patterns.targets)
    two_sample = stat_tests.two_sample_ttest(target_resid[:split], target_resid[split:])
    return EvalReport(
        train_stats=train_stats,
        test_stats=test_stats,
        acf_actual=tuple(float(v) for v in acf_actual),
        acf_forecast=tuple(float(v) for v in acf_forecast),
        acf_fidelity=fidelity,
        paired_ttest=paired,
        two_sample_ttest=two_sample,
        provenance=provenance or {},
    )


def _prepare(series: TimeSeries, config: PipelineConfig):
    """Shared front half of the pipeline: stationarity, lag, patterns."""
    values = series.values
    kpss_raw = _stage("kpss-raw", stat_tests.kpss_level, values)
    diff = _stage("difference", series_ops.difference, series)
    kpss_resid = _stage("kpss-residuals", stat_tests.kpss_level, diff.residuals)
    if kpss_resid.reject_at_5pct:
        raise PipelineStageError(
            "kpss-residuals",
            "first differences are still non-stationary at 5%; "
            "second differencing is not supported",
        )
    profile = None
    if config.lag is not None:
        lag = config.lag
    else:
        # lag selection sees the training prefix only (no test leakage)
        n_train_resid = int(np.floor(config.train_fraction * diff.residuals.size))
        profile = _stage(
            "lag-selection",
            lag_select.entropy_profile,
            diff.residuals[:n_train_resid],
            config.max_lag,
            config.bins,
        )
        lag = profile.selected_lag
    patterns = _stage(
        "extract-patterns",
        series_ops.extract_patterns,
        diff.residuals,
        lag,
        config.train_fraction,
    )
    return values, diff, kpss_raw, kpss_resid, profile, patterns


def _choose_hidden(patterns, config: PipelineConfig):
    if config.hidden is not None:
        return config.hidden, None
    lo, hi = config.h_range
    best_h, table = _stage(
        "grid-search",
        trainers.grid_search_hidden,
        patterns,
        range(lo, hi + 1),
        config.train_config(),
    )
    return best_h, table


def _model_provenance(config, algorithm, lag, hidden, report, patterns, diff, values):
    return {
        "algorithm": algorithm,
        "seed": config.seed,
        "lag": lag,
        "hidden": hidden,
        "train_fraction": config.train_fraction,
        "epochs_used": report.epochs_used,
        "converged": report.converged,
        "final_objective": report.final_objective,
        "alpha": report.alpha,
        "beta": report.beta,
        "gamma_effective": report.gamma_effective,
        "norm": {"min": patterns.norm.min, "max": patterns.norm.max},
        "last_window_residuals": [float(v) for v in diff.residuals[-lag:]],
        "last_observed_value": float(values[-1]),
    }


def run_pipeline(config: PipelineConfig, series: Optional[TimeSeries] = None):
    """Full experiment on one training algorithm.

    Returns (model, EvalReport, provenance dict). Artifacts are written to
    config.out_dir when set."""
    if series is None:
        if config.input_path is None:
            raise ValueError("config.input_path or an in-memory series is required")
        series = _stage("load", load_csv, config.input_path, config.mode)
    values, diff, kpss_raw, kpss_resid, profile, patterns = _prepare(series, config)
    if not kpss_raw.reject_at_5pct:
        log.info("raw series already level-stationary by KPSS; differencing anyway")
    hidden, grid_table = _choose_hidden(patterns, config)
    model0 = mlp.init(patterns.lag, hidden, config.seed)
    model, report = _stage(
        "train", trainers.train, model0, patterns, config.train_config()
    )
    provenance = _model_provenance(
        config, config.algorithm, patterns.lag, hidden, report, patterns, diff, values
    )
    eval_report = evaluate(model, patterns, values, provenance)
    if config.out_dir:
        _write_artifacts(
            config.out_dir, series, diff, kpss_raw, kpss_resid, profile,
            patterns, grid_table, model, report, eval_report, provenance,
        )
    return model, eval_report, provenance


def _write_artifacts(out_dir, series, diff, kpss_raw, kpss_resid, profile,
                     patterns, grid_table, model, report, eval_report, provenance):
    os.makedirs(out_dir, exist_ok=True)
    _write_csv(
        os.path.join(out_dir, "series.csv"),
        ["timestamp", "vrp_watts"],
        [(ts.isoformat(), float(v)) for ts, v in zip(series.timestamps, series.values)],
    )
    _write_csv(
        os.path.join(out_dir, "residuals.csv"),
        ["index", "residual_watts"],
        [(i, float(v)) for i, v in enumerate(diff.residuals)],
    )
    _write_json(os.path.join(out_dir, "kpss.json"), {
        "raw": kpss_raw.to_dict(), "residuals": kpss_resid.to_dict(),
    })
    if profile is not None:
        with open(os.path.join(out_dir, "entropy_profile.csv"), "w", encoding="utf-8") as fh:
            fh.write(profile.to_csv())
    if grid_table is not None:
        _write_json(os.path.join(out_dir, "grid_search.json"), grid_table)
    mlp.save(model, os.path.join(out_dir, "model.json"), provenance)
    _write_json(os.path.join(out_dir, "train_report.json"), report.to_dict())
    _write_json(os.path.join(out_dir, "eval_report.json"), eval_report.to_dict())


def compare_algorithms(config: PipelineConfig, series: Optional[TimeSeries] = None):
    """Run the identical pipeline once per training algorithm (same seed,
    hidden size and patterns) and emit a per-algorithm error table."""
    if series is None:
        if config.input_path is None:
            raise ValueError("config.input_path or an in-memory series is required")
        series = _stage("load", load_csv, config.input_path, config.mode)
    values, diff, _, _, profile, patterns = _prepare(series, config)
    hidden, _ = _choose_hidden(patterns, config)
    table = {}
    for algorithm in trainers.ALGORITHMS:
        model0 = mlp.init(patterns.lag, hidden, config.seed)
        try:
            model, report = trainers.train(
                model0, patterns, config.train_config(algorithm)
            )
        except VrpcastError as exc:
            table[algorithm] = {"error": str(exc)}
            continue
        provenance = _model_provenance(
            config, algorithm, patterns.lag, hidden, report, patterns, diff, values
        )
        eval_report = evaluate(model, patterns, values, provenance)
        table[algorithm] = {
            "train_stats": eval_report.train_stats.to_dict(),
            "test_stats": eval_report.test_stats.to_dict(),
            "converged": report.converged,
            "epochs_used": report.epochs_used,
        }
    result = {
        "lag": patterns.lag,
        "hidden": hidden,
        "seed": config.seed,
        "algorithms": table,
    }
    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        _write_json(os.path.join(config.out_dir, "comparison.json"), result)
    return result
