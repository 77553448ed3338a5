"""Command-line front end.

Subcommands: simulate, backtest, oracle, agents, mix, eigenrisk.  Options can
come from --config JSON (keys named like the long flags) with explicit flags
taking precedence.  Every command writes its artifacts plus a manifest.json
into --outdir; outputs are byte-identical for a fixed (config, seed).

Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.
The TRENDLAB_THREADS environment variable caps the worker pool used for
independent runs.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, backtest, estimation, herding, market_model, portfolios, sharpe_oracle
from .errors import IngestError, TrendlabError
from .market_model import ModelParams, ReturnsPanel

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

_EPOCH = datetime.date(2000, 1, 3)  # a Monday; synthetic panels get weekday dates


class ConfigError(TrendlabError):
    """Bad command-line or config-file value."""


def _g12(x: float) -> float:
    """Round a float to 12 significant digits for stable report diffs."""
    return float(f"{float(x):.12g}")


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return _g12(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    return obj


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(text.encode("utf-8"))
    os.replace(tmp, path)


def _write_json(path: Path, payload: dict) -> None:
    _atomic_write(path, json.dumps(_jsonify(payload), sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header: list, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _max_workers(n_tasks: int) -> int:
    cap = os.environ.get("TRENDLAB_THREADS", "")
    try:
        limit = int(cap) if cap else (os.cpu_count() or 1)
    except ValueError:
        raise ConfigError(f"TRENDLAB_THREADS must be an integer, got {cap!r}")
    return max(1, min(n_tasks, limit))


def _trading_dates(n: int) -> list:
    dates, day = [], _EPOCH
    while len(dates) < n:
        if day.weekday() < 5:
            dates.append(day.isoformat())
        day += datetime.timedelta(days=1)
    return dates


# ---------------------------------------------------------------------------
# panel io
# ---------------------------------------------------------------------------

def _sidecar(path: Path) -> Path:
    return path.with_suffix(".meta.json")


def export_panel(panel: ReturnsPanel, path: Path) -> None:
    """Panel to CSV (full float precision, so re-ingestion is bit-exact)."""
    path = Path(path)
    header = ["date"] + [f"asset_{j + 1}" for j in range(panel.n_assets)]
    dates = _trading_dates(panel.n_days)
    rows = (
        [dates[t]] + [repr(float(x)) for x in panel.returns[t]]
        for t in range(panel.n_days)
    )
    _write_csv(path, header, rows)
    _write_json(_sidecar(path), {"asset_classes": list(panel.asset_classes), "seed": panel.seed})


def ingest_csv(path) -> ReturnsPanel:
    """Read a returns panel: ISO dates strictly increasing, no gaps in cells."""
    path = Path(path)
    if not path.exists():
        raise IngestError(f"panel file {path} does not exist")
    meta_path = _sidecar(path)
    if not meta_path.exists():
        raise IngestError(f"missing sidecar {meta_path.name} with asset classes")
    try:
        meta = json.loads(meta_path.read_text())
        classes = tuple(meta["asset_classes"])
        seed = int(meta.get("seed", 0))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise IngestError(f"bad sidecar {meta_path.name}: {exc}")

    lines = path.read_text().splitlines()
    if not lines:
        raise IngestError("panel file is empty", line=1)
    header = lines[0].split(",")
    if header[0] != "date" or len(header) < 2:
        raise IngestError("header must be 'date,<asset>...'", line=1)
    n = len(header) - 1
    if len(classes) != n:
        raise IngestError(f"sidecar lists {len(classes)} classes for {n} assets")

    rows, prev_date = [], None
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != n + 1:
            raise IngestError(f"expected {n + 1} cells, found {len(cells)}", line=lineno)
        try:
            date = datetime.date.fromisoformat(cells[0])
        except ValueError:
            raise IngestError(f"unparseable date {cells[0]!r}", line=lineno)
        if prev_date is not None and date <= prev_date:
            raise IngestError(f"dates must be strictly increasing at {date}", line=lineno)
        prev_date = date
        values = []
        for cell in cells[1:]:
            cell = cell.strip()
            if not cell:
                raise IngestError("missing value", line=lineno)
            try:
                value = float(cell)
            except ValueError:
                raise IngestError(f"unparseable number {cell!r}", line=lineno)
            if not np.isfinite(value):
                raise IngestError(f"non-finite value {cell!r}", line=lineno)
            values.append(value)
        rows.append(values)
    if not rows:
        raise IngestError("panel has no data rows", line=2)
    return ReturnsPanel(returns=np.array(rows), asset_classes=classes, seed=seed)


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int
    outdir: Path
    options: dict


def _manifest(cfg: RunConfig) -> dict:
    body = {"command": cfg.command, "seed": cfg.seed, "options": _jsonify(cfg.options)}
    digest = hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()
    return {
        **body,
        "config_hash": digest,
        "versions": {
            "trendlab": __version__,
            "numpy": np.__version__,
            "python": f"{sys.version_info.major}.{sys.version_info.minor}",
        },
    }


def _positive_int(name: str, value) -> int:
    try:
        out = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if out < 1:
        raise ConfigError(f"{name} must be >= 1, got {out}")
    return out


def _rate(name: str, value) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if not 0.0 < out < 1.0:
        raise ConfigError(f"{name} must be in (0,1), got {out}")
    return out


def _float(name: str, value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}")


def _parse_grid(spec: str) -> np.ndarray:
    """start:step:stop grid, inclusive of both ends."""
    try:
        start, step, stop = (float(x) for x in str(spec).split(":"))
    except ValueError:
        raise ConfigError(f"grid must look like start:step:stop, got {spec!r}")
    if step <= 0 or stop < start:
        raise ConfigError(f"bad grid {spec!r}")
    count = int(round((stop - start) / step))
    grid = start + step * np.arange(count + 1)
    return grid[grid <= stop + 1e-12]


def _strategy_list(value) -> list:
    names = [s.strip() for s in str(value).split(",") if s.strip()]
    if not names:
        raise ConfigError("no strategies given")
    for name in names:
        if name not in backtest.STRATEGY_KINDS:
            raise ConfigError(f"unknown strategy {name!r}")
    if len(set(names)) != len(names):
        raise ConfigError("duplicate strategy names")
    return names


def _build_model(opts: dict) -> ModelParams:
    n = _positive_int("n", opts["n"])
    drift = opts.get("drift", 0.0)
    if isinstance(drift, str):
        drift = [_float("drift", x) for x in drift.split(",") if x.strip()]
    if isinstance(drift, (list, tuple)):
        drift_vec = np.asarray(drift, dtype=float)
        if drift_vec.shape == (1,):
            drift_vec = np.full(n, drift_vec[0])
    else:
        drift_vec = np.full(n, _float("drift", drift))
    if drift_vec.shape != (n,):
        raise ConfigError(f"drift needs 1 or {n} values")

    noise = opts.get("noise_cov")
    if noise is not None:
        noise_cov = np.asarray(noise, dtype=float)
    else:
        rho = _float("noise-corr", opts.get("noise_corr", 0.3))
        if not -1.0 / max(n - 1, 1) < rho < 1.0:
            raise ConfigError(f"noise-corr {rho} is outside the valid equicorrelation range")
        noise_cov = np.full((n, n), rho)
        np.fill_diagonal(noise_cov, 1.0)

    trend = opts.get("trend_cov")
    if trend is not None:
        trend_cov = np.asarray(trend, dtype=float)
    else:
        structure = str(opts.get("trend_structure", "identity"))
        scale = _float("trend-scale", opts.get("trend_scale", 1.0))
        if structure == "none":
            trend_cov = np.zeros((n, n))
        elif structure == "identity":
            trend_cov = scale * np.eye(n)
        elif structure == "market":
            trend_cov = scale * np.full((n, n), 1.0 / n)
        elif structure == "proportional":
            trend_cov = scale * noise_cov
        else:
            raise ConfigError(f"unknown trend-structure {structure!r}")

    classes = opts.get("classes")
    if classes:
        class_list = tuple(s.strip() for s in str(classes).split(","))
    else:
        class_list = ("stock",) * n
    try:
        return ModelParams(
            n=n, drift=drift_vec, noise_cov=noise_cov, trend_cov=trend_cov,
            trend_amp=_float("trend-amp", opts.get("trend_amp", 0.05)),
            trend_decay=_rate("trend-decay", opts.get("trend_decay", 0.02)),
            asset_classes=class_list,
        )
    except TrendlabError as exc:
        raise ConfigError(str(exc))


def _strategy_config(kind: str, opts: dict) -> backtest.StrategyConfig:
    warmup = opts.get("warmup")
    try:
        return backtest.StrategyConfig(
            kind=kind,
            signal_rate=_rate("eta", opts.get("eta", 0.01)),
            cov_rate=_rate("eta-cov", opts.get("eta_cov", estimation.DEFAULT_COV_RATE)),
            var_rate=_rate("eta-var", opts.get("eta_var", estimation.DEFAULT_VAR_RATE)),
            cleaner=str(opts.get("cleaner", "rie")),
            warmup=None if warmup is None else _positive_int("warmup", warmup),
        )
    except TrendlabError as exc:
        raise ConfigError(str(exc))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_simulate(cfg: RunConfig) -> None:
    model = _build_model(cfg.options)
    n_days = _positive_int("T", cfg.options.get("T", 1000))
    panel = market_model.simulate(model, n_days, cfg.seed)
    export_panel(panel, cfg.outdir / "panel.csv")


def _run_strategies(panel: ReturnsPanel, names: list, opts: dict) -> list:
    configs = [_strategy_config(name, opts) for name in names]
    workers = _max_workers(len(configs))
    if workers == 1:
        return [backtest.run(panel, c) for c in configs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: backtest.run(panel, c), configs))


def _pnl_rows(names: list, results: list) -> tuple:
    warmup = max(r.warmup for r in results)
    n_days = len(results[0].pnl)
    dates = _trading_dates(n_days)
    rows = (
        [dates[t]] + [f"{float(r.pnl[t]):.12g}" for r in results]
        for t in range(warmup, n_days)
    )
    return ["date"] + list(names), rows


def _write_positions(cfg: RunConfig, name: str, result) -> None:
    dates = _trading_dates(len(result.pnl))
    rows = (
        [dates[t], f"asset_{j + 1}", f"{float(result.positions[t, j]):.12g}"]
        for t in range(result.warmup, len(result.pnl))
        for j in range(result.positions.shape[1])
    )
    _write_csv(cfg.outdir / f"positions_{name}.csv", ["date", "asset", "position"], rows)


def _cmd_backtest(cfg: RunConfig) -> None:
    panel = ingest_csv(cfg.options["panel"])
    names = _strategy_list(cfg.options.get("strategy", "arp,nm,ew,rp,torp"))
    results = _run_strategies(panel, names, cfg.options)

    header, rows = _pnl_rows(names, results)
    _write_csv(cfg.outdir / "pnl.csv", header, rows)
    for name, result in zip(names, results):
        _write_positions(cfg, name, result)

    summary = {"sharpes": {}, "correlations": None, "mix": None}
    for name, result in zip(names, results):
        summary["sharpes"][name] = result.sharpe
    if len(results) >= 2:
        corr = backtest.strategy_correlations(results)
        summary["correlations"] = {"labels": list(names), "matrix": corr}
        mix = backtest.optimal_mix(results, seed=cfg.seed)
        summary["mix"] = {"weights": dict(zip(names, mix.weights)), "sharpe": mix.sharpe}
    _write_json(cfg.outdir / "summary.json", summary)

    _write_eigenrisk(cfg, panel, names, results)


def _write_eigenrisk(cfg: RunConfig, panel, names, results) -> None:
    corr, vols = backtest.pipeline_estimates(panel, _strategy_config(names[0], cfg.options))
    profiles = [backtest.realized_risk(r, corr, panel) for r in results]
    header = ["eigenvalue"] + list(names)
    rows = (
        [f"{profiles[0].eigenvalues[k]:.12g}"] + [f"{p.risks[k]:.12g}" for p in profiles]
        for k in range(len(profiles[0].eigenvalues))
    )
    _write_csv(cfg.outdir / "eigenrisk.csv", header, rows)

    assets = [f"asset_{j + 1}" for j in range(panel.n_assets)]
    _write_csv(cfg.outdir / "correlation.csv", assets,
               ([f"{corr[i, j]:.12g}" for j in range(panel.n_assets)]
                for i in range(panel.n_assets)))
    _write_csv(cfg.outdir / "volatilities.csv", ["asset", "volatility"],
               ([assets[j], f"{vols[j]:.12g}"] for j in range(panel.n_assets)))


def _cmd_eigenrisk(cfg: RunConfig) -> None:
    panel = ingest_csv(cfg.options["panel"])
    names = _strategy_list(cfg.options.get("strategy", "arp,nm,ew"))
    results = _run_strategies(panel, names, cfg.options)
    _write_eigenrisk(cfg, panel, names, results)


def _cmd_oracle(cfg: RunConfig) -> None:
    n = _positive_int("n", cfg.options.get("n", 2))
    if n > sharpe_oracle.EXACT_MAX_ASSETS:
        raise ConfigError(f"oracle needs n <= {sharpe_oracle.EXACT_MAX_ASSETS}")
    t = _positive_int("t", cfg.options.get("t", 500))
    if t < 2:
        raise ConfigError("t must be >= 2")
    rate = _rate("eta", cfg.options.get("eta", 0.01))
    n_models = _positive_int("models", cfg.options.get("models", 20))

    rng = np.random.default_rng(cfg.seed)
    reports = []
    for _ in range(n_models):
        model = sharpe_oracle.sample_weak_trend_model(rng, n, rate=rate, t=t)
        exact = sharpe_oracle.brute_force_optimal(model, rate, t)
        s2_exact = sharpe_oracle.squared_sharpe(model, rate, exact, t)
        entry = {
            "model_hash": hashlib.sha256(np.ascontiguousarray(model.noise_cov).tobytes()
                                         + np.ascontiguousarray(model.trend_cov).tobytes()
                                         + np.ascontiguousarray(model.drift).tobytes()).hexdigest()[:16],
            "sharpe2_exact": s2_exact,
            "residual_exact": sharpe_oracle.stationarity_residual(model, rate, exact, t),
        }
        for form in ("simple", "sandwich"):
            w = sharpe_oracle.approx_optimal(model, rate, t, form=form)
            s2 = sharpe_oracle.squared_sharpe(model, rate, w, t)
            entry[f"residual_{form}"] = sharpe_oracle.stationarity_residual(model, rate, w, t)
            entry[f"sharpe2_{form}"] = s2
            entry[f"ratio_{form}"] = s2 / s2_exact if s2_exact > 0 else float("nan")
        reports.append(entry)
    _write_json(cfg.outdir / "oracle.json", {"n": n, "t": t, "eta": rate, "models": reports})


def _cmd_agents(cfg: RunConfig) -> None:
    params = herding.AgentSimParams(
        agents=_positive_int("A", cfg.options.get("A", 1000)),
        strategies=_positive_int("N", cfg.options.get("N", 50)),
        coupling=_float("j", cfg.options.get("j", 1.5)),
        steps=_positive_int("T", cfg.options.get("T", 50)),
        reps=_positive_int("M", cfg.options.get("M", 100)),
        seed=cfg.seed,
    )
    if params.coupling < 0:
        raise ConfigError("j must be non-negative")

    result = herding.run(params)
    fractions = result.fractions[0]  # one representative repetition
    header = ["t"] + [f"S{k + 1}" for k in range(params.strategies)]
    rows = (
        [str(t)] + [f"{fractions[t, k]:.12g}" for k in range(params.strategies)]
        for t in range(params.steps + 1)
    )
    _write_csv(cfg.outdir / "trajectory.csv", header, rows)

    grid = _parse_grid(cfg.options.get("jgrid", "0:0.5:4"))
    curve = herding.transition_curve(params, grid)
    rows = (
        [f"{curve.couplings[i]:.12g}", f"{curve.max_fraction[i]:.12g}", f"{curve.stderr[i]:.12g}"]
        for i in range(len(grid))
    )
    _write_csv(cfg.outdir / "transition.csv", ["j", "max_interest", "stderr"], rows)


def _read_pnl(path) -> tuple:
    path = Path(path)
    if not path.exists():
        raise IngestError(f"pnl file {path} does not exist")
    lines = path.read_text().splitlines()
    if len(lines) < 3:
        raise IngestError("pnl file needs a header and at least two rows")
    header = lines[0].split(",")
    if header[0] != "date" or len(header) < 2:
        raise IngestError("pnl header must be 'date,<strategy>...'", line=1)
    names = header[1:]
    data = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise IngestError(f"expected {len(header)} cells, found {len(cells)}", line=lineno)
        try:
            data.append([float(c) for c in cells[1:]])
        except ValueError:
            raise IngestError("unparseable pnl value", line=lineno)
    return names, np.array(data)


def _cmd_mix(cfg: RunConfig) -> None:
    names, data = _read_pnl(cfg.options["pnl"])
    pair = [s.strip() for s in str(cfg.options.get("pair", ",".join(names[:2]))).split(",")]
    if len(pair) != 2:
        raise ConfigError("pair must name exactly two strategies")
    for name in pair:
        if name not in names:
            raise ConfigError(f"strategy {name!r} not present in pnl file")
    step = _float("grid", cfg.options.get("grid", 0.01))
    if not 0.0 < step <= 0.5:
        raise ConfigError(f"grid step must be in (0, 0.5], got {step}")
    results = [
        backtest.BacktestResult(pnl=data[:, names.index(name)], positions=None,
                                warmup=0, strategy=name)
        for name in pair
    ]
    grid, sharpes = backtest.sweep_mix_curve(results, step=step)
    rows = (
        [f"{grid[i]:.12g}", f"{sharpes[i]:.12g}"] for i in range(len(grid))
    )
    _write_csv(cfg.outdir / "mixcurve.csv", [f"weight_{pair[1]}", "sharpe"], rows)


_COMMANDS = {
    "simulate": _cmd_simulate,
    "backtest": _cmd_backtest,
    "oracle": _cmd_oracle,
    "agents": _cmd_agents,
    "mix": _cmd_mix,
    "eigenrisk": _cmd_eigenrisk,
}


def run_command(cfg: RunConfig) -> None:
    """Validate minimally, run the command, and write the manifest."""
    if cfg.command not in _COMMANDS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    _COMMANDS[cfg.command](cfg)
    _write_json(cfg.outdir / "manifest.json", _manifest(cfg))


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON file with option defaults")
    sub.add_argument("--seed", type=int, help="random seed (default 0)")
    sub.add_argument("--outdir", help="output directory (default out/<command>)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trendlab",
                                     description="Trend-following portfolio lab")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="generate a synthetic returns panel")
    p.add_argument("--n", type=int, help="asset count")
    p.add_argument("--T", type=int, help="number of days")
    p.add_argument("--drift", help="per-day drift, scalar or comma list")
    p.add_argument("--noise-corr", dest="noise_corr", type=float, help="equicorrelation of the noise")
    p.add_argument("--trend-structure", dest="trend_structure",
                   choices=["none", "identity", "market", "proportional"])
    p.add_argument("--trend-scale", dest="trend_scale", type=float)
    p.add_argument("--trend-amp", dest="trend_amp", type=float)
    p.add_argument("--trend-decay", dest="trend_decay", type=float)
    p.add_argument("--classes", help="comma list of stock/bond/fx labels")
    _add_common(p)

    p = subs.add_parser("backtest", help="run strategies over a panel")
    p.add_argument("--panel", help="panel CSV (with .meta.json sidecar)")
    p.add_argument("--strategy", help="comma list from rp,nm,arp,torp,ew,zero")
    p.add_argument("--eta", type=float, help="signal EMA rate")
    p.add_argument("--eta-cov", dest="eta_cov", type=float, help="weekly covariance EMA rate")
    p.add_argument("--eta-var", dest="eta_var", type=float, help="daily variance EMA rate")
    p.add_argument("--cleaner", choices=list(estimation.CLEANERS))
    p.add_argument("--warmup", type=int, help="override the warm-up day count")
    _add_common(p)

    p = subs.add_parser("eigenrisk", help="per-eigenmode realized risk of strategies")
    p.add_argument("--panel")
    p.add_argument("--strategy")
    p.add_argument("--eta", type=float)
    p.add_argument("--eta-cov", dest="eta_cov", type=float)
    p.add_argument("--eta-var", dest="eta_var", type=float)
    p.add_argument("--cleaner", choices=list(estimation.CLEANERS))
    p.add_argument("--warmup", type=int)
    _add_common(p)

    p = subs.add_parser("oracle", help="analytic optimality report on random models")
    p.add_argument("--n", type=int, help="asset count (<= 3)")
    p.add_argument("--t", type=int, help="evaluation time")
    p.add_argument("--eta", type=float, help="signal EMA rate")
    p.add_argument("--models", type=int, help="number of random models")
    _add_common(p)

    p = subs.add_parser("agents", help="interacting-agents herding simulation")
    p.add_argument("--A", type=int, help="agent count")
    p.add_argument("--N", type=int, help="strategy count")
    p.add_argument("--T", type=int, help="steps per run")
    p.add_argument("--M", type=int, help="repetitions")
    p.add_argument("--j", type=float, help="coupling for trajectory.csv")
    p.add_argument("--jgrid", help="start:step:stop coupling grid for transition.csv")
    _add_common(p)

    p = subs.add_parser("mix", help="two-strategy Sharpe mixing curve from a pnl.csv")
    p.add_argument("--pnl", help="pnl.csv produced by the backtest command")
    p.add_argument("--pair", help="two strategy names, comma separated")
    p.add_argument("--grid", type=float, help="mixing weight grid step")
    _add_common(p)

    return parser


_REQUIRED = {"backtest": ["panel"], "eigenrisk": ["panel"], "mix": ["pnl"]}


def _resolve(args: argparse.Namespace) -> RunConfig:
    options = {}
    if args.config:
        config_path = Path(args.config)
        if not config_path.exists():
            raise ConfigError(f"config file {config_path} does not exist")
        try:
            loaded = json.loads(config_path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}")
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        options.update(loaded)

    for key, value in vars(args).items():
        if key in ("command", "config", "seed", "outdir") or value is None:
            continue
        options[key] = value

    seed = args.seed if args.seed is not None else int(options.pop("seed", 0))
    outdir = args.outdir or options.pop("outdir", None) or f"out/{args.command}"
    for key in _REQUIRED.get(args.command, []):
        if key not in options or options[key] in (None, ""):
            raise ConfigError(f"--{key} is required for {args.command}")
        if not Path(str(options[key])).exists():
            raise ConfigError(f"{key} file {options[key]} does not exist")
    return RunConfig(command=args.command, seed=seed, outdir=Path(outdir), options=options)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the problem
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        run_command(_resolve(args))
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IngestError as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TrendlabError as exc:
        print(f"error: numeric: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
