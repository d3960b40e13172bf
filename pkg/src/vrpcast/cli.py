"""Command-line front end. Thin wrappers over the library; no numeric
logic lives here.

Exit codes: 0 success, 1 usage error, 2 data or numeric failure.
"""

import argparse
import json
import logging
import os
import sys

from . import lag_select, mlp, pipeline, series_ops, stat_tests, trainers
from .data_ingest import SYNTHETIC_KINDS, generate_synthetic, load_csv, save_csv
from .errors import VrpcastError

DEFAULT_SEED = 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_hidden(text):
    """Single size '9' or inclusive range '2:25'."""
    if ":" in text:
        lo, hi = text.split(":", 1)
        return (int(lo), int(hi))
    return int(text)


def _build_parser():
    parser = _Parser(prog="vrpcast", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def add_common(p, *, data=True, training=False):
        if data:
            p.add_argument("--input", help="input CSV path")
            p.add_argument("--mode", choices=("power", "radiance"), default="power")
        p.add_argument("--out", help="output directory or file")
        p.add_argument("--config", help="JSON config file (flags take precedence)")
        if training:
            p.add_argument("--lag", type=int, help="lag window p (default: entropy-selected)")
            p.add_argument("--bins", type=int, default=lag_select.DEFAULT_BINS)
            p.add_argument("--hidden", type=_parse_hidden,
                           help="hidden size, or a:b range for grid search")
            p.add_argument("--algo", choices=trainers.ALGORITHMS, default=None)
            p.add_argument("--train-fraction", type=float, default=None)
            p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("ingest", help="load and clean a CSV series")
    add_common(p)

    p = sub.add_parser("stationarity", help="KPSS on the raw and differenced series")
    add_common(p)

    p = sub.add_parser("lags", help="entropy profile and selected lag")
    add_common(p)
    p.add_argument("--bins", type=int, default=lag_select.DEFAULT_BINS)
    p.add_argument("--max-lag", type=int, default=12)

    p = sub.add_parser("train", help="run the pipeline with one algorithm")
    add_common(p, training=True)

    p = sub.add_parser("forecast", help="iterated multi-step forecast from a saved model")
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--input", help="optional CSV to refresh the forecast window")
    p.add_argument("--mode", choices=("power", "radiance"), default="power")
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help=argparse.SUPPRESS)

    p = sub.add_parser("evaluate", help="evaluate a saved model on a series")
    p.add_argument("--model", required=True)
    add_common(p)

    p = sub.add_parser("compare", help="run LM, SCG and BRNN on identical patterns")
    add_common(p, training=True)

    p = sub.add_parser("synth", help="write a deterministic synthetic series")
    p.add_argument("--kind", choices=SYNTHETIC_KINDS, default="persistence_bursts")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--spec", help="JSON file with the full generator spec")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--config", help=argparse.SUPPRESS)

    return parser


def _pipeline_config(args):
    payload = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            payload = json.load(fh)
    flag_map = {
        "input": "input_path",
        "mode": "mode",
        "lag": "lag",
        "bins": "bins",
        "algo": "algorithm",
        "train_fraction": "train_fraction",
        "seed": "seed",
        "out": "out_dir",
    }
    for flag, key in flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            payload[key] = value
    hidden = getattr(args, "hidden", None)
    if hidden is not None:
        if isinstance(hidden, tuple):
            payload["h_range"] = hidden
            payload.pop("hidden", None)
        else:
            payload["hidden"] = hidden
    payload.setdefault("seed", DEFAULT_SEED)
    payload.setdefault("mode", "power")
    return pipeline.PipelineConfig.from_dict(payload)


def _require_input(args):
    if not getattr(args, "input", None) and not getattr(args, "config", None):
        print("error: --input (or --config with input_path) is required", file=sys.stderr)
        raise SystemExit(1)


def _cmd_ingest(args):
    cfg = _pipeline_config(args)
    series = load_csv(cfg.input_path, cfg.mode)
    print(f"loaded {len(series)} usable observations "
          f"({series.timestamps[0].isoformat()} .. {series.timestamps[-1].isoformat()})")
    if cfg.out_dir:
        os.makedirs(cfg.out_dir, exist_ok=True)
        out = os.path.join(cfg.out_dir, "series.csv")
        save_csv(series, out)
        print(f"wrote {out}")


def _cmd_stationarity(args):
    cfg = _pipeline_config(args)
    series = load_csv(cfg.input_path, cfg.mode)
    raw = stat_tests.kpss_level(series.values)
    diff = series_ops.difference(series)
    resid = stat_tests.kpss_level(diff.residuals)
    for name, result in (("raw", raw), ("differenced", resid)):
        verdict = "reject stationarity" if result.reject_at_5pct else "stationary (fail to reject)"
        print(f"{name}: KPSS statistic {result.statistic:.4f} "
              f"(truncation lag {result.truncation_lag}) -> {verdict} at 5%")
    if cfg.out_dir:
        os.makedirs(cfg.out_dir, exist_ok=True)
        out = os.path.join(cfg.out_dir, "kpss.json")
        pipeline._write_json(out, {"raw": raw.to_dict(), "residuals": resid.to_dict()})
        print(f"wrote {out}")


def _cmd_lags(args):
    cfg = _pipeline_config(args)
    series = load_csv(cfg.input_path, cfg.mode)
    diff = series_ops.difference(series)
    profile = lag_select.entropy_profile(diff.residuals, args.max_lag, cfg.bins)
    for lag, delta in zip(profile.lags, profile.delta):
        print(f"lag {lag:3d}  delta {delta:.6f}")
    print(f"selected lag: {profile.selected_lag}")
    if cfg.out_dir:
        os.makedirs(cfg.out_dir, exist_ok=True)
        out = os.path.join(cfg.out_dir, "entropy_profile.csv")
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(profile.to_csv())
        print(f"wrote {out}")


def _cmd_train(args):
    cfg = _pipeline_config(args)
    model, report, provenance = pipeline.run_pipeline(cfg)
    stats = report.test_stats
    print(f"algorithm {provenance['algorithm']}, lag {provenance['lag']}, "
          f"hidden {provenance['hidden']}, epochs {provenance['epochs_used']}")
    print(f"test ME {stats.mean_error:.6g} W, MSE {stats.mean_squared_error:.6g} W^2, "
          f"R^2 {stats.r_squared if stats.r_squared is not None else 'undefined'}")
    if cfg.out_dir:
        print(f"artifacts in {cfg.out_dir}")


def _cmd_forecast(args):
    model, provenance = mlp.load(args.model)
    norm = series_ops.NormParams(**provenance["norm"])
    if args.input:
        series = load_csv(args.input, args.mode)
        diff = series_ops.difference(series)
        window = diff.residuals[-model.input_dim:]
        last_value = float(series.values[-1])
    else:
        window = provenance["last_window_residuals"]
        last_value = provenance["last_observed_value"]
    forecast = pipeline.forecast_multi_step(model, window, args.steps, norm, last_value)
    for step, value in enumerate(forecast, start=1):
        print(f"step {step}: {value:.6g} W")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        out = os.path.join(args.out, "forecast.csv")
        pipeline._write_csv(out, ["step", "forecast_watts"],
                            [(i + 1, float(v)) for i, v in enumerate(forecast)])
        print(f"wrote {out}")


def _cmd_evaluate(args):
    cfg = _pipeline_config(args)
    model, provenance = mlp.load(args.model)
    series = load_csv(cfg.input_path, cfg.mode)
    diff = series_ops.difference(series)
    patterns = series_ops.extract_patterns(
        diff.residuals, provenance["lag"], provenance.get("train_fraction", 0.8)
    )
    report = pipeline.evaluate(model, patterns, series.values, provenance)
    stats = report.test_stats
    print(f"test ME {stats.mean_error:.6g} W, MSE {stats.mean_squared_error:.6g} W^2, "
          f"R^2 {stats.r_squared if stats.r_squared is not None else 'undefined'}")
    print(f"ACF fidelity (mean abs diff, lags 1-20): {report.acf_fidelity:.4f}")
    if cfg.out_dir:
        os.makedirs(cfg.out_dir, exist_ok=True)
        out = os.path.join(cfg.out_dir, "eval_report.json")
        pipeline._write_json(out, report.to_dict())
        print(f"wrote {out}")


def _cmd_compare(args):
    cfg = _pipeline_config(args)
    result = pipeline.compare_algorithms(cfg)
    print(f"lag {result['lag']}, hidden {result['hidden']}, seed {result['seed']}")
    for algorithm, entry in result["algorithms"].items():
        if "error" in entry:
            print(f"{algorithm}: failed ({entry['error']})")
            continue
        stats = entry["test_stats"]
        print(f"{algorithm}: test ME {stats['mean_error']:.6g} W, "
              f"MSE {stats['mean_squared_error']:.6g} W^2, R^2 {stats['r_squared']}")
    if cfg.out_dir:
        print(f"wrote {os.path.join(cfg.out_dir, 'comparison.json')}")


def _cmd_synth(args):
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            spec = json.load(fh)
        spec.setdefault("kind", args.kind)
        spec.setdefault("n", args.n)
    else:
        spec = {"kind": args.kind, "n": args.n}
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    series = generate_synthetic(spec, seed)
    save_csv(series, args.out)
    print(f"wrote {len(series)} observations to {args.out}")


_COMMANDS = {
    "ingest": _cmd_ingest,
    "stationarity": _cmd_stationarity,
    "lags": _cmd_lags,
    "train": _cmd_train,
    "forecast": _cmd_forecast,
    "evaluate": _cmd_evaluate,
    "compare": _cmd_compare,
    "synth": _cmd_synth,
}

_NEEDS_INPUT = {"ingest", "stationarity", "lags", "train", "evaluate", "compare"}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.subcommand in _NEEDS_INPUT:
        try:
            _require_input(args)
        except SystemExit as exc:
            return int(exc.code)
    try:
        _COMMANDS[args.subcommand](args)
    except (VrpcastError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
