"""``stlf`` command-line interface.

Subcommands: ``generate``, ``train``, ``forecast``, ``evaluate``, ``compare``.
Options may also come from a ``key=value`` config file (``--config``);
flags given on the command line win. Outputs go under ``--out-dir``, which
defaults to ``$STLF_OUTPUT_DIR`` or ``./stlf-out``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 training did not
converge (or failed), 4 I/O error.
"""

from __future__ import annotations

import argparse
import datetime as dt
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .data import SyntheticConfig, format_csv, format_holidays, generate_synthetic, parse_csv, parse_holidays
from .domain import denormalize
from .errors import (
    AllRulesZeroError,
    ConfigError,
    DataError,
    EnergyIncreaseError,
    MaxIterationsError,
    NoRuleFiredError,
    PersistenceError,
    RuleSyntaxError,
    StlfError,
    TrainingError,
)
from .eval import compare_models, dumps_json, format_table, mf_sweep_grid, plot_csv, report_json, evaluate_model
from .features import N_OUTPUTS, encode_input
from .fuzzy.membership import SHAPES
from .fuzzy.rulefile import format_rulebases
from .persist import load_bundle, save_bundle
from .pipeline import (
    MODEL_KINDS,
    SCOPES,
    DateRange,
    RunConfig,
    check_disjoint,
    default_split,
    make_bundle,
    parse_range,
    split_samples,
    train_model,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_TRAIN, EXIT_IO = 0, 1, 2, 3, 4
OUTPUT_ENV = "STLF_OUTPUT_DIR"
DEFAULT_OUTPUT = "stlf-out"

log = logging.getLogger("stlf")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# option name -> (type, default); shared by flags and config files
OPTIONS = {
    "data": (str, None),
    "holidays": (str, None),
    "out_dir": (str, None),
    "model": (str, "mlp"),
    "scope": (str, "both"),
    "learning_rate": (float, 0.01),
    "max_epochs": (int, 10000),
    "error_target": (float, 1e-4),
    "seed": (int, 0),
    "momentum": (float, 0.9),
    "mf": (str, "gaussian"),
    "hidden": (int, None),
    "centers": (int, 298),
    "fnn_head": (str, "ann"),
    "map_denominator": (str, "predicted"),
    "train_range": (str, None),
    "test_range": (str, None),
    "days": (int, 365),
    "start": (str, "2000-01-01"),
    "noise": (float, 10.0),
    "weekend_dip": (float, 0.15),
    "base_peak": (float, 1000.0),
    "temp_coupling": (float, 8.0),
    "holiday_dates": (str, ""),
}


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` comments; keys use dashes or underscores."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in OPTIONS:
            raise ConfigError(f"{path}:{lineno}: unknown option {key!r}")
        out[key] = value
    return out


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from the config file, then from the defaults."""
    config = read_config(args.config) if getattr(args, "config", None) else {}
    for key, (typ, default) in OPTIONS.items():
        if getattr(args, key, None) is not None:
            continue
        if key in config:
            try:
                setattr(args, key, typ(config[key]))
            except ValueError:
                raise ConfigError(f"bad value for {key}: {config[key]!r}") from None
        else:
            setattr(args, key, default)
    if args.out_dir is None:
        args.out_dir = os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT
    return args


def _add_options(p: argparse.ArgumentParser, *names: str) -> None:
    for name in names:
        typ, default = OPTIONS[name]
        flag = "--" + name.replace("_", "-")
        extra = {}
        if name == "model":
            extra["choices"] = MODEL_KINDS
        elif name == "scope":
            extra["choices"] = SCOPES
        elif name == "mf":
            extra["choices"] = SHAPES
        p.add_argument(flag, dest=name, type=typ, default=None, help=f"default: {default}", **extra)


TRAIN_OPTIONS = (
    "model", "scope", "learning_rate", "max_epochs", "error_target", "seed",
    "momentum", "mf", "hidden", "centers", "fnn_head",
)  # fmt: skip


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stlf", description="Short-term load forecasting with neural and fuzzy models.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic hourly dataset")
    g.add_argument("--config")
    g.add_argument("--out", help="CSV path (default: <out-dir>/load.csv)")
    _add_options(g, "out_dir", "days", "start", "seed", "noise", "weekend_dip", "base_peak", "temp_coupling", "holiday_dates")

    t = sub.add_parser("train", help="train one model")
    t.add_argument("--config")
    _add_options(t, "data", "holidays", "out_dir", "train_range", "test_range", *TRAIN_OPTIONS)

    f = sub.add_parser("forecast", help="48-hour forecast from a saved model")
    f.add_argument("--config")
    f.add_argument("--model-file", required=True)
    f.add_argument("--date", required=True, help="first forecast day, YYYY-MM-DD")
    f.add_argument("--out", help="CSV path (default: <out-dir>/forecast-<date>.csv)")
    _add_options(f, "data", "holidays", "out_dir")

    e = sub.add_parser("evaluate", help="score saved models on a test range")
    e.add_argument("--config")
    e.add_argument("--model-file", action="append", required=True)
    _add_options(e, "data", "holidays", "out_dir", "test_range", "map_denominator")

    c = sub.add_parser("compare", help="train and compare several models")
    c.add_argument("--config")
    c.add_argument("--models", default=",".join(MODEL_KINDS), help="comma-separated kinds")
    c.add_argument("--model-file", action="append", help="compare saved models instead of training")
    c.add_argument("--sweep-mf", action="store_true", help="evaluate the FIS under every membership shape")
    _add_options(c, "data", "holidays", "out_dir", "train_range", "test_range", "map_denominator", *[
        o for o in TRAIN_OPTIONS if o != "model"
    ])
    return parser


# -- helpers ----------------------------------------------------------------------


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def _holidays_path(data: Path) -> Path:
    return data.with_suffix(".holidays")


def load_dataset(args):
    if not args.data:
        raise UsageError("--data is required")
    data = Path(args.data)
    hol = Path(args.holidays) if args.holidays else _holidays_path(data)
    holidays = parse_holidays(hol.read_text(encoding="utf-8")) if hol.exists() else frozenset()
    return parse_csv(data.read_text(encoding="utf-8"), holidays)


def _ranges(args, dataset) -> tuple[DateRange, DateRange]:
    train_d, test_d = default_split(dataset)
    train = parse_range(args.train_range) if args.train_range else train_d
    test = parse_range(args.test_range) if args.test_range else test_d
    check_disjoint(train, test)
    return train, test


def _run_config(args, model: str | None = None) -> RunConfig:
    return RunConfig(
        model=model or args.model,
        scope=args.scope,
        learning_rate=args.learning_rate,
        max_epochs=args.max_epochs,
        error_target=args.error_target,
        seed=args.seed,
        momentum=args.momentum,
        shape=args.mf,
        n_hidden=args.hidden,
        n_centers=args.centers,
        fnn_head=args.fnn_head,
        map_denominator=getattr(args, "map_denominator", "predicted") or "predicted",
    )


def _model_dir(args, run: RunConfig, suffix: str = "") -> Path:
    name = run.model if run.scope == "both" else f"{run.model}-{run.scope}"
    return Path(args.out_dir) / (name + suffix)


def _trace_csv(trace) -> str:
    return "epoch,mse\n" + "".join(f"{i},{m!r}\n" for i, m in enumerate(trace.mse, start=1))


def _train_one(args, dataset, run: RunConfig, train: DateRange, test: DateRange, out: Path):
    split = split_samples(dataset, train, test, run.scope)
    load_norm = split.bundle_norms[0]
    model, trace = train_model(split.train, run, load_norm)
    bundle = make_bundle(model, split, run, train)
    out.mkdir(parents=True, exist_ok=True)
    save_bundle(bundle, out / "model.json")
    if trace is not None:
        _write(out / "trace.csv", _trace_csv(trace))
    if run.model == "fis":
        _write(out / "rules.txt", format_rulebases({f"h{h:02d}": r for h, r in enumerate(model.rulebases)}))
    return model, trace, split


# -- commands -------------------------------------------------------------------


def cmd_generate(args) -> int:
    holidays = tuple(dt.date.fromisoformat(s.strip()) for s in args.holiday_dates.split(",") if s.strip())
    cfg = SyntheticConfig(
        start_date=dt.date.fromisoformat(args.start),
        num_days=args.days,
        base_peak=args.base_peak,
        weekend_dip=args.weekend_dip,
        holiday_dates=holidays,
        temp_coupling=args.temp_coupling,
        noise_std=args.noise,
        seed=args.seed,
    )
    dataset = generate_synthetic(cfg)
    path = Path(args.out) if args.out else Path(args.out_dir) / "load.csv"
    _write(path, format_csv(dataset))
    _write(_holidays_path(path), format_holidays(dataset.holidays))
    print(f"wrote {len(dataset)} rows to {path}")
    return EXIT_OK


def cmd_train(args) -> int:
    dataset = load_dataset(args)
    train, test = _ranges(args, dataset)
    run = _run_config(args)
    out = _model_dir(args, run)
    model, trace, split = _train_one(args, dataset, run, train, test, out)
    print(f"trained {run.model} ({run.scope}) on {len(split.train)} samples; model in {out / 'model.json'}")
    if trace is not None:
        print(f"epochs {trace.epochs}, final MSE {trace.final_mse:.6g}, converged {trace.converged}")
        if not trace.converged:
            print(f"error target {run.error_target} not reached within {run.max_epochs} epochs", file=sys.stderr)
            return EXIT_TRAIN
    return EXIT_OK


def cmd_forecast(args) -> int:
    bundle = load_bundle(args.model_file)
    dataset = load_dataset(args)
    day = dt.date.fromisoformat(args.date)
    start = dt.datetime.combine(day, dt.time())
    x = encode_input(dataset, start, bundle.load_norm, bundle.weather_norms)
    p_n = np.asarray(bundle.model.predict(x[None, :]), dtype=np.float64)[0]
    if p_n.shape != (N_OUTPUTS,):
        raise ConfigError(f"model produced {p_n.shape[0]} values, expected {N_OUTPUTS}")
    mw = denormalize(bundle.load_norm, np.clip(p_n, 0.0, 1.0))
    lines = ["timestamp,predicted_mw\n"]
    for h, v in enumerate(mw):
        lines.append(f"{(start + dt.timedelta(hours=h)).strftime('%Y-%m-%dT%H:%M')},{float(v)!r}\n")
    path = Path(args.out) if args.out else Path(args.out_dir) / f"forecast-{day.isoformat()}.csv"
    _write(path, "".join(lines))
    print(f"wrote {N_OUTPUTS} hourly forecasts to {path}")
    return EXIT_OK


def _emit_reports(out: Path, reports) -> None:
    for r in reports:
        _write(out / r.model_name / "report.json", report_json(r))
        _write(out / r.model_name / "forecast.csv", plot_csv([r]))
    _write(out / "forecasts.csv", plot_csv(reports))


def _emit_tables(out: Path, reports) -> str:
    tables = compare_models(reports)
    text = "\n".join(format_table(t) for t in tables)
    _write(out / "comparison.txt", text)
    _write(out / "comparison.json", dumps_json([t.to_dict() for t in tables]))
    return text


def cmd_evaluate(args) -> int:
    dataset = load_dataset(args)
    out = Path(args.out_dir)
    reports = []
    _, default_test = default_split(dataset)
    test = parse_range(args.test_range) if args.test_range else default_test
    for mf in args.model_file:
        bundle = load_bundle(mf)
        if not bundle.train_range:
            raise ConfigError(f"{mf} records no training range")
        train = DateRange(*map(dt.date.fromisoformat, bundle.train_range))
        split = split_samples(dataset, train, test, bundle.scope)
        name = Path(mf).parent.name or bundle.kind
        # score with the normalizers stored in the model, not refitted ones
        report = evaluate_model(
            bundle.model, split.test, bundle.load_norm, name=name, dataset=dataset, map_denominator=args.map_denominator
        )
        reports.append(report)
        print(f"{name}: MAPE {report.overall[0]:.3f}%  MAP {report.overall[1]:.3f}%")
    _emit_reports(out, reports)
    if len(reports) >= 2:
        print(_emit_tables(out, reports))
    return EXIT_OK


def cmd_compare(args) -> int:
    if args.model_file:
        args.model_file = list(args.model_file)
        return cmd_evaluate(args)
    dataset = load_dataset(args)
    train, test = _ranges(args, dataset)
    out = Path(args.out_dir)
    reports = []
    if args.sweep_mf:
        by_shape = {}
        for shape in SHAPES:
            args.mf = shape
            run = _run_config(args, "fis")
            model, _, split = _train_one(args, dataset, run, train, test, out / f"fis-{shape}")
            by_shape[shape] = evaluate_model(
                model, split.test, split.bundle_norms[0], name=f"fis-{shape}", dataset=dataset,
                map_denominator=run.map_denominator,
            )  # fmt: skip
        grids = [mf_sweep_grid(by_shape, "weekday"), mf_sweep_grid(by_shape, "weekend")]
        text = "\n".join(format_table(g) for g in grids)
        _write(out / "mf-sweep.txt", text)
        _write(out / "mf-sweep.json", dumps_json([g.to_dict() for g in grids]))
        print(text)
        return EXIT_OK
    kinds = [k.strip() for k in args.models.split(",") if k.strip()]
    for kind in kinds:
        if kind not in MODEL_KINDS:
            raise UsageError(f"unknown model {kind!r}; expected one of {MODEL_KINDS}")
    for kind in kinds:
        run = _run_config(args, kind)
        model, trace, split = _train_one(args, dataset, run, train, test, _model_dir(args, run))
        if trace is not None and not trace.converged:
            log.info("%s stopped at max_epochs with MSE %.3g", kind, trace.final_mse)
        report = evaluate_model(
            model, split.test, split.bundle_norms[0], name=_model_dir(args, run).name, dataset=dataset,
            map_denominator=run.map_denominator,
        )  # fmt: skip
        reports.append(report)
    _emit_reports(out, reports)
    if len(reports) >= 2:
        print(_emit_tables(out, reports))
    else:
        r = reports[0]
        print(f"{r.model_name}: MAPE {r.overall[0]:.3f}%  MAP {r.overall[1]:.3f}%")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "forecast": cmd_forecast,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
}

_TRAINING_FAILURES = (TrainingError, NoRuleFiredError, AllRulesZeroError, MaxIterationsError, EnergyIncreaseError)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (UsageError, ConfigError)):
        return EXIT_USAGE
    if isinstance(exc, (DataError, RuleSyntaxError)):
        return EXIT_DATA
    if isinstance(exc, _TRAINING_FAILURES):
        return EXIT_TRAIN
    if isinstance(exc, (PersistenceError, OSError)):
        return EXIT_IO
    return EXIT_USAGE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a command is required")
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
        _resolve(args)
        return COMMANDS[args.command](args)
    except (UsageError, StlfError, OSError) as exc:
        code = exit_code_for(exc)
        if isinstance(exc, UsageError):
            parser.print_usage(sys.stderr)
        print(f"stlf: error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
