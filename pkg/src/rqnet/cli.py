"""
Command-line front end.

    rqnet analyze  --input sp500.csv --input dax.csv --embed-m 4
    rqnet windows  --input sp500.csv --preset short --out-dir out/
    rqnet trend    --input out/windows_long.csv --range 2007-06-01:2008-08-31
    rqnet export-rp --input sp500.csv --embed-m 4
    rqnet export-network --input sp500.csv --embed-m 4

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines, then command-line flags (flags win). Exit codes:
0 success, 1 some inputs failed, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import datetime as dt
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, network, recurrence
from .embedding import (EmbeddingParams, autocorrelation,
                        dimension_from_fractions, embed, estimate_delay,
                        fnn_dimension, fnn_fractions)
from .errors import ConfigError, DegenerateSeries, RqnetError
from .output import write_columns, write_table
from .preprocess import (TimeSeries, business_days, calendar_days, detrend,
                         forward_fill, read_price_csv, uniform_deviate)
from .trend import trend_in_range
from .window import (MEASURES, RECURRENCE_MEASURES, WindowConfig,
                     gfc_preset, heatmap_table, short_preset,
                     windowed_measures)

logger = logging.getLogger("rqnet")

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _measures(text):
    if isinstance(text, (tuple, list)):
        return tuple(text)
    return tuple(m.strip().upper() for m in str(text).split(",") if m.strip())


def _opt_int(text):
    if text is None or str(text).strip().lower() in ("", "auto", "none"):
        return None
    return int(text)


@dataclass
class RunConfig:
    inputs: list = field(default_factory=list)
    calendar: str = "business"
    detrend_degree: int = 3
    embed_m: Optional[int] = None
    tau: Optional[int] = None
    m_max: int = 10
    max_lag: Optional[int] = None
    epsilon: float = 0.25
    norm: str = "euclidean"
    l_min: int = 2
    v_min: int = 2
    include_loi: bool = False
    preset: Optional[str] = None
    window_length: Optional[int] = None
    window_step: Optional[int] = None
    measures: Optional[tuple] = None
    normalize: bool = True
    ranges: tuple = ()
    alpha: float = 0.05
    start: Optional[int] = None
    end: Optional[int] = None
    jobs: int = 1
    out_dir: str = "."
    format: str = "csv"

    def describe(self, command):
        """Effective settings for output headers.

        ``jobs`` and ``out_dir`` are left out: they never change results.
        """
        meta = {"rqnet_version": __version__, "command": command}
        for i, (path, label) in enumerate(self.inputs):
            meta[f"input.{i}"] = f"{label}={path}"
        for f in fields(self):
            if f.name in ("inputs", "jobs", "out_dir"):
                continue
            value = getattr(self, f.name)
            if isinstance(value, (tuple, list)):
                value = ",".join(str(v) for v in value)
            meta[f.name] = "auto" if value is None else value
        return meta


CONVERTERS = {
    "calendar": str, "detrend_degree": int, "embed_m": _opt_int,
    "tau": _opt_int, "m_max": int, "max_lag": _opt_int, "epsilon": float,
    "norm": str, "l_min": int, "v_min": int, "include_loi": _bool,
    "preset": lambda s: None if str(s).lower() in ("", "none") else str(s),
    "window_length": _opt_int, "window_step": _opt_int,
    "measures": _measures, "normalize": _bool, "alpha": float,
    "start": _opt_int, "end": _opt_int, "jobs": int, "out_dir": str,
    "format": str,
}


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment.

    ``input``, ``label`` and ``range`` may repeat; other keys keep their
    last value.
    """
    settings = {"input": [], "label": [], "range": []}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key in ("input", "label", "range"):
            settings[key].append(value)
        elif key in CONVERTERS:
            settings[key] = value
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return settings


def build_config(args) -> RunConfig:
    file_settings = read_config_file(args.config) if args.config else {
        "input": [], "label": [], "range": []}
    cfg = RunConfig()
    for name, conv in CONVERTERS.items():
        flag = getattr(args, name, None)
        try:
            if flag is not None:
                setattr(cfg, name, conv(flag))
            elif name in file_settings:
                setattr(cfg, name, conv(file_settings[name]))
        except ValueError as exc:
            raise ConfigError(f"bad value for {name}: {exc}") from None

    paths = args.input or file_settings["input"]
    labels = args.label or file_settings["label"]
    ranges = getattr(args, "range", None) or file_settings["range"]
    if labels and len(labels) != len(paths):
        raise ConfigError("give one --label per --input, or none")
    if not labels:
        labels = [Path(p).stem for p in paths]
    cfg.inputs = list(zip(paths, labels))
    cfg.ranges = tuple(ranges)
    return cfg


def validate(cfg: RunConfig, command: str) -> None:
    if not cfg.inputs:
        raise ConfigError("no --input given")
    paths = [p for p, _ in cfg.inputs]
    if len(set(paths)) != len(paths):
        raise ConfigError("input paths must be distinct")
    labels = [l for _, l in cfg.inputs]
    if len(set(labels)) != len(labels):
        raise ConfigError("labels must be distinct")
    if not cfg.epsilon > 0:
        raise ConfigError("epsilon must be positive")
    if cfg.norm not in recurrence.NORMS:
        raise ConfigError(f"norm must be one of {recurrence.NORMS}")
    if cfg.calendar not in ("business", "all", "none"):
        raise ConfigError("calendar must be business, all or none")
    if cfg.format not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    if cfg.detrend_degree < 0:
        raise ConfigError("detrend degree must be >= 0")
    if cfg.embed_m is not None and cfg.embed_m < 1:
        raise ConfigError("--embed-m must be >= 1")
    if cfg.tau is not None and cfg.tau < 1:
        raise ConfigError("--tau must be >= 1")
    if cfg.l_min < 2 or cfg.v_min < 2:
        raise ConfigError("minimum line lengths must be >= 2")
    if not 0 < cfg.alpha < 1:
        raise ConfigError("alpha must lie in (0, 1)")
    if cfg.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    if cfg.measures is not None:
        unknown = [m for m in cfg.measures if m not in MEASURES]
        if unknown:
            raise ConfigError(f"unknown measures {unknown}; "
                              f"choose from {','.join(MEASURES)}")
        if not cfg.measures:
            raise ConfigError("empty measure list")
    if command == "windows":
        explicit = cfg.window_length is not None or cfg.window_step is not None
        if cfg.preset is not None and explicit:
            raise ConfigError("give either --preset or an explicit window, "
                              "not both")
        if cfg.preset is None and not explicit:
            raise ConfigError("give --preset or --window-length/--window-step")
        if cfg.preset not in (None, "gfc", "short"):
            raise ConfigError("preset must be gfc or short")
        if explicit and (cfg.window_length is None or cfg.window_step is None):
            raise ConfigError("explicit windows need both length and step")
    if command == "trend":
        parse_ranges(cfg.ranges)


# ---------------------------------------------------------------- pipeline

@dataclass
class Prepared:
    label: str
    detrended: TimeSeries
    deviate: TimeSeries


def prepare(path, label, cfg: RunConfig) -> Prepared:
    """CSV -> calendar fill -> polynomial detrend -> uniform deviate."""
    raw = read_price_csv(path, label)
    if cfg.calendar == "none":
        ts = TimeSeries(raw.prices, label=label, dates=raw.dates)
    else:
        if cfg.calendar == "business":
            first = next((d for d in raw.dates if d.weekday() < 5),
                         raw.dates[0])
            days = business_days(first, raw.dates[-1])
        else:
            days = calendar_days(raw.dates[0], raw.dates[-1])
        ts = forward_fill(raw, days)
    det_ts = detrend(ts, cfg.detrend_degree)
    return Prepared(label, det_ts, uniform_deviate(det_ts))


def _delay(series, cfg):
    return cfg.tau if cfg.tau is not None else estimate_delay(
        series, cfg.max_lag)


def _error_text(exc):
    return f"{type(exc).__name__}: {exc}"


def _map(fn, items, jobs):
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


def _safe(fn):
    def run(item):
        try:
            return fn(item), None
        except (RqnetError, OSError, ValueError) as exc:
            logger.debug("%s: %s", item[1], _error_text(exc))
            return None, exc
    return run


def _report_failures(failures):
    for label, exc in failures:
        print(f"{label}: {_error_text(exc)}", file=sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


# ---------------------------------------------------------------- analyze

def cmd_analyze(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = cfg.describe("analyze")

    def stage_one(item):
        path, label = item
        prep = prepare(path, label, cfg)
        tau = _delay(prep.deviate, cfg)
        max_lag = cfg.max_lag if cfg.max_lag is not None else len(prep.deviate) // 2
        acf = autocorrelation(prep.deviate, max_lag)
        fractions, m_fnn = None, None
        if cfg.embed_m is None:
            fractions = fnn_fractions(prep.deviate, tau, cfg.m_max)
            m_fnn = dimension_from_fractions(fractions)
        return prep, tau, acf, fractions, m_fnn

    first = _map(_safe(stage_one), cfg.inputs, cfg.jobs)
    failures = []
    ok = []
    for (path, label), (res, exc) in zip(cfg.inputs, first):
        if exc is not None:
            failures.append((label, exc))
        else:
            ok.append(res)

    # cross-market comparison embeds everything at the largest FNN dimension
    if cfg.embed_m is not None:
        m_used = cfg.embed_m
    else:
        m_used = max((r[4] for r in ok), default=1)

    for prep, tau, acf, fractions, m_fnn in ok:
        rows = [("acf", lag, v) for lag, v in enumerate(acf)]
        if fractions is not None:
            rows += [("fnn", m, v) for m, v in enumerate(fractions, 1)]
        write_table(out / f"embedding_{prep.label}", cfg.format,
                    ["kind", "index", "value"], rows,
                    {**meta, "label": prep.label, "tau": tau})

    def stage_two(item):
        prep, tau, _, _, m_fnn = item[0]
        traj = embed(prep.deviate, EmbeddingParams(m_used, tau))
        R = recurrence.recurrence_matrix(traj, cfg.epsilon, cfg.norm)
        net = network.to_network(R)
        path_report = network.characteristic_path_length(net)
        return dict(
            label=prep.label, n_values=len(prep.deviate),
            start_date=prep.deviate.start_date,
            end_date=prep.deviate.dates[-1] if prep.deviate.dates else None,
            tau=tau, m_fnn=m_fnn, m=m_used, n_states=len(traj),
            det=recurrence.det(R, cfg.l_min, cfg.include_loi),
            lam=recurrence.lam(R, cfg.v_min),
            cc=network.clustering_coefficient(net),
            cpl=path_report.cpl,
            reachable_fraction=path_report.reachable_fraction,
            components=path_report.n_components,
            status="ok", error="")

    second = _map(_safe(stage_two), [(r, r[0].label) for r in ok],
                  cfg.jobs) if ok else []
    results = {}
    for res, (row, exc) in zip(ok, second):
        if exc is not None:
            failures.append((res[0].label, exc))
        else:
            results[res[0].label] = row

    columns = ["label", "n_values", "start_date", "end_date", "tau", "m_fnn",
               "m", "n_states", "det", "lam", "cc", "cpl",
               "reachable_fraction", "components", "status", "error"]
    failed = dict(failures)
    rows = []
    for _, label in cfg.inputs:
        if label in results:
            rows.append([results[label][c] for c in columns])
        else:
            exc = failed[label]
            rows.append([label] + [None] * (len(columns) - 3)
                        + [type(exc).__name__, str(exc)])
    write_table(out / "analyze", cfg.format, columns, rows, meta)
    return _report_failures(
        [(l, failed[l]) for _, l in cfg.inputs if l in failed])


# ---------------------------------------------------------------- windows

def window_config_for(prep: Prepared, cfg: RunConfig) -> WindowConfig:
    common = dict(epsilon=cfg.epsilon, normalize=cfg.normalize,
                  norm=cfg.norm, l_min=cfg.l_min, v_min=cfg.v_min,
                  include_loi=cfg.include_loi)
    if cfg.measures:
        common["measures"] = cfg.measures
    if cfg.preset == "gfc":
        return gfc_preset(_delay(prep.deviate, cfg),
                          dimension=cfg.embed_m or 4, **common)
    if cfg.preset == "short":
        return short_preset(**common)
    embedding = None
    if cfg.embed_m is not None and cfg.embed_m > 1:
        embedding = EmbeddingParams(cfg.embed_m, _delay(prep.deviate, cfg))
    common.setdefault("measures", ("DET", "LAM"))
    return WindowConfig(cfg.window_length, cfg.window_step, embedding,
                        **common)


def market_windows(prep: Prepared, cfg: RunConfig):
    wcfg = window_config_for(prep, cfg)
    if wcfg.normalize:
        return windowed_measures(prep.detrended, wcfg, cfg.jobs)
    # without per-window normalisation the recurrence measures run on the
    # global deviate; variance and AC1 always see detrended values
    rec = tuple(m for m in wcfg.measures if m in RECURRENCE_MEASURES)
    stat = tuple(m for m in wcfg.measures if m not in RECURRENCE_MEASURES)
    parts = []
    if rec:
        parts.append(windowed_measures(prep.deviate,
                                       replace(wcfg, measures=rec), cfg.jobs))
    if stat:
        parts.append(windowed_measures(prep.detrended,
                                       replace(wcfg, measures=stat), cfg.jobs))
    series = parts[0]
    for p in parts[1:]:
        series = series.merge(p)
    series.config = wcfg
    series.values = {m: series.values[m] for m in wcfg.measures}
    series.status = {m: series.status[m] for m in wcfg.measures}
    return series


def cmd_windows(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = cfg.describe("windows")
    failures = []
    done = []
    for path, label in cfg.inputs:
        try:
            prep = prepare(path, label, cfg)
            done.append(market_windows(prep, cfg))
        except (RqnetError, OSError, ValueError) as exc:
            logger.error("%s: %s", label, _error_text(exc))
            failures.append((label, exc))

    for s in done:
        meta[f"market.{s.label}"] = " ".join(
            f"{k}={v}" for k, v in s.config.describe().items())
    for label, exc in failures:
        meta[f"market.{label}"] = f"failed {type(exc).__name__}"

    columns = ["label", "center_index", "center_date", "measure", "value",
               "status"]
    rows = []
    for s in done:
        for k, c in enumerate(s.centers.tolist()):
            date = s.dates[k] if s.dates else None
            for m in s.measures:
                rows.append([s.label, c, date, m, s.values[m][k],
                             s.status[m][k]])
    write_table(out / "windows_long", cfg.format, columns, rows, meta)

    for s in done:
        cols = ["center_index", "center_date"] + list(s.measures)
        write_columns(
            out / f"{s.label}_windows.dat", cols,
            ([c, s.dates[k] if s.dates else None]
             + [s.values[m][k] for m in s.measures]
             for k, c in enumerate(s.centers.tolist())),
            {**meta_base(meta), "label": s.label})

    measures = done[0].measures if done else ()
    for m in measures:
        group = [s for s in done if m in s.values]
        table = heatmap_table(group, m)
        cols = ["label", "change_score"] + [str(c) for c in
                                             table.centers.tolist()]
        hm_meta = {**meta_base(meta), "measure": m}
        if table.dates:
            hm_meta["center_dates"] = " ".join(d.isoformat()
                                               for d in table.dates)
        write_table(out / f"heatmap_{m}", cfg.format, cols,
                    ([lab, sc] + list(row) for lab, sc, row in
                     zip(table.labels, table.scores, table.values)),
                    hm_meta)
    return _report_failures(failures)


def meta_base(meta):
    return {k: v for k, v in meta.items() if not k.startswith("market.")}


# ---------------------------------------------------------------- trend

def _parse_bound(text):
    text = text.strip()
    try:
        return "date", dt.date.fromisoformat(text)
    except ValueError:
        pass
    try:
        return "index", int(text)
    except ValueError:
        raise ConfigError(f"range bound {text!r} is neither an ISO date "
                          "nor an integer index") from None


def parse_ranges(specs):
    """``START:END`` (inclusive; ISO dates or window-centre indices)."""
    ranges = []
    for spec in specs or ("all",):
        if spec == "all":
            ranges.append(("all", None, None, "all"))
            continue
        if ":" not in spec:
            raise ConfigError(f"range {spec!r} must look like START:END")
        a, b = spec.split(":", 1)
        ka, va = _parse_bound(a)
        kb, vb = _parse_bound(b)
        if ka != kb:
            raise ConfigError(f"range {spec!r} mixes dates and indices")
        if va > vb:
            raise ConfigError(f"range {spec!r} is empty")
        ranges.append((ka, va, vb, spec))
    return ranges


def read_long_csv(path):
    """Measure series from a ``windows_long.csv``, keyed (label, measure)."""
    series = {}
    with open(path, newline="") as fh:
        lines = [l for l in fh if not l.startswith("#")]
    reader = csv.DictReader(lines)
    need = {"label", "center_index", "center_date", "measure", "value",
            "status"}
    if reader.fieldnames is None or not need <= set(reader.fieldnames):
        raise ConfigError(f"{path}: not a long-format measure file")
    for row in reader:
        key = (row["label"], row["measure"])
        date = dt.date.fromisoformat(row["center_date"]) \
            if row["center_date"] else None
        value = float(row["value"]) if row["value"] else math.nan
        series.setdefault(key, []).append(
            (int(row["center_index"]), date, value))
    return series


def cmd_trend(cfg: RunConfig) -> int:
    ranges = parse_ranges(cfg.ranges)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = cfg.describe("trend")
    columns = ["label", "measure", "range", "n", "S", "tau", "variance", "z",
               "p", "direction", "n_effective_ratio", "status"]
    rows = []
    failures = []
    loaded = []
    for path, _ in cfg.inputs:
        try:
            loaded.append((path, read_long_csv(path)))
        except (OSError, ValueError) as exc:
            failures.append((str(path), exc))
    if any(kind == "date" for kind, *_ in ranges):
        for path, data in loaded:
            if any(p[1] is None for pts in data.values() for p in pts):
                raise ConfigError(f"{path}: date range given but window "
                                  "centres carry no dates")
    for path, data in loaded:
        keys = [k for k in data if cfg.measures is None or k[1] in
                cfg.measures]
        order = {m: i for i, m in enumerate(cfg.measures or MEASURES)}
        labels = list(dict.fromkeys(k[0] for k in keys))
        keys.sort(key=lambda k: (labels.index(k[0]), order.get(k[1], 99)))
        for key in keys:
            points = data[key]
            for kind, lo, hi, name in ranges:
                if kind == "all":
                    sel = points
                elif kind == "date":
                    sel = [p for p in points if lo <= p[1] <= hi]
                else:
                    sel = [p for p in points if lo <= p[0] <= hi]
                try:
                    res, n = trend_in_range([p[2] for p in sel], cfg.alpha)
                    rows.append([key[0], key[1], name, n, res.S, res.tau,
                                 res.variance, res.z, res.p, res.direction,
                                 res.n_effective_ratio, "ok"])
                except DegenerateSeries:
                    n = int(np.sum(np.isfinite([p[2] for p in sel])))
                    rows.append([key[0], key[1], name, n] + [None] * 7
                                + ["DegenerateSeries"])
    write_table(out / "trend", cfg.format, columns, rows, meta)
    return _report_failures(failures)


# ---------------------------------------------------------------- exports

def _export_inputs(cfg: RunConfig):
    for path, label in cfg.inputs:
        prep = prepare(path, label, cfg)
        series = prep.deviate
        if cfg.start is not None or cfg.end is not None:
            series = uniform_deviate(series.slice(cfg.start or 0,
                                                  cfg.end or len(series)))
        tau = _delay(series, cfg)
        m = cfg.embed_m or fnn_dimension(series, tau, cfg.m_max)
        traj = embed(series, EmbeddingParams(m, tau))
        R = recurrence.recurrence_matrix(traj, cfg.epsilon, cfg.norm)
        yield label, R, {"N": R.n, "epsilon": cfg.epsilon, "m": m, "tau": tau,
                         "norm": cfg.norm}


def _run_exports(cfg, command, write):
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    failures = []
    for path, label in cfg.inputs:
        try:
            sub = replace(cfg, inputs=[(path, label)])
            for label_, R, meta in _export_inputs(sub):
                write(out, label_, R, {**meta, "label": label_,
                                       "command": command})
        except (RqnetError, OSError, ValueError) as exc:
            logger.error("%s: %s", label, _error_text(exc))
            failures.append((label, exc))
    return _report_failures(failures)


def cmd_export_rp(cfg: RunConfig) -> int:
    def write(out, label, R, meta):
        recurrence.write_rp_binary(out / f"{label}.rp", R)
        i, j = recurrence.upper_coordinates(R.bits, R.n)
        write_table(out / f"{label}_rp", "csv", ["i", "j"],
                    zip(i.tolist(), j.tolist()), meta)
    return _run_exports(cfg, "export-rp", write)


def cmd_export_network(cfg: RunConfig) -> int:
    def write(out, label, R, meta):
        network.write_edge_list(out / f"{label}_network.csv",
                                network.to_network(R), meta)
    return _run_exports(cfg, "export-network", write)


COMMANDS = {
    "analyze": cmd_analyze,
    "windows": cmd_windows,
    "trend": cmd_trend,
    "export-rp": cmd_export_rp,
    "export-network": cmd_export_network,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", action="append",
                        help="input file (repeatable)")
    common.add_argument("--label", action="append",
                        help="label for the matching --input")
    common.add_argument("--config", help="key = value settings file")
    common.add_argument("--epsilon", type=float)
    common.add_argument("--embed-m", dest="embed_m",
                        help="embedding dimension, or 'auto'")
    common.add_argument("--tau", help="embedding delay, or 'auto'")
    common.add_argument("--m-max", dest="m_max", type=int)
    common.add_argument("--max-lag", dest="max_lag")
    common.add_argument("--detrend-degree", dest="detrend_degree", type=int)
    common.add_argument("--calendar", choices=("business", "all", "none"))
    common.add_argument("--norm", choices=recurrence.NORMS)
    common.add_argument("--l-min", dest="l_min", type=int)
    common.add_argument("--v-min", dest="v_min", type=int)
    common.add_argument("--include-loi", dest="include_loi",
                        action="store_const", const="true")
    common.add_argument("--alpha", type=float)
    common.add_argument("--jobs", type=int)
    common.add_argument("--out-dir", dest="out_dir")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(
        prog="rqnet", description="Recurrence plot and recurrence network "
        "analysis of daily price series.")
    parser.add_argument("--version", action="version",
                        version=f"rqnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common],
                   help="full-series DET, LAM, CC, CPL per market")
    w = sub.add_parser("windows", parents=[common],
                       help="sliding-window measure series")
    w.add_argument("--preset", choices=("gfc", "short"))
    w.add_argument("--window-length", dest="window_length", type=int)
    w.add_argument("--window-step", dest="window_step", type=int)
    w.add_argument("--measures", help="comma list of " + ",".join(MEASURES))
    w.add_argument("--no-normalize", dest="normalize", action="store_const",
                   const="false",
                   help="skip the per-window uniform deviate")
    t = sub.add_parser("trend", parents=[common],
                       help="modified Mann-Kendall tests on window output")
    t.add_argument("--range", action="append",
                   help="START:END, ISO dates or centre indices (repeatable)")
    t.add_argument("--measures")
    for name in ("export-rp", "export-network"):
        e = sub.add_parser(name, parents=[common])
        e.add_argument("--start", type=int, help="first index of a slice")
        e.add_argument("--end", type=int, help="end index (exclusive)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = build_config(args)
        validate(cfg, args.command)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
