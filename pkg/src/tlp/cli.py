"""Command-line front end.

Configuration files are JSON. An experiment file has the shape::

    {
      "name": "varma11",
      "dgp": {"A": [[0.7, 0.1], [0.4, 0.6]], "Gamma": [[1, 0], [-0.5, 1]],
              "ma_coeffs": [[[1, 0], [0, 1]]], "mis_scale": 1.0, "mis_power": -0.5},
      "T": 200, "n_reps": 200, "seed": 7,
      "target": {"response": 2, "shock": 1, "h_max": 20},
      "methods": ["LP", "VAR", "SLP", "TLP"],
      "bootstrap": {"B1": 100, "B2": 50, "p": 10, "q": 8}
    }

A file holding only the ``dgp`` block or only the ``bootstrap`` block parses
to a :class:`DgpSpec` or :class:`BootstrapConfig`. Long MA polynomials can be
written as ``"ma_geometric": {"matrix": ..., "decay": 0.9, "lags": 100}``.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import platform
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from .bootstrap import BootstrapConfig, Centering, run_msdb
from .core import ALL_METHODS, Method, RngStream, ShockTarget, TimeSeriesPanel, TlpError
from .dgp import DgpSpec, GarchParams, InnovationLaw, geometric_ma, simulate
from .estimators import estimate_lp, estimate_var
from .experiment import ExperimentDesign, MetricsTable, compare_centering, run_experiment

log = logging.getLogger(__name__)

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME, EXIT_IO = 0, 2, 3, 4
METRIC_COLUMNS = ["method", "horizon", "coverage", "length", "bias", "sd", "rmse", "n_effective"]
PLOTTED = ("coverage", "length", "bias", "sd", "rmse")
CONFIG_DIR = Path(__file__).with_name("configs")


class ConfigError(Exception):
    pass


class ParseError(ConfigError):
    """Malformed file or field; the message carries the line when known."""


class ValidationError(ConfigError):
    """Well-formed file whose values break a model invariant."""


# ---------------------------------------------------------------------------
# Config parsing

DGP_KEYS = {"A", "Gamma", "ma_coeffs", "ma_geometric", "mis_scale", "mis_power",
            "innovation_law", "garch", "burn_in", "name"}
BOOT_KEYS = {"B1", "B2", "alpha", "centering", "p", "q", "seed", "block_length",
             "per_b1_weights", "min_valid_t", "max_retries", "lambda_grid_size", "chunk"}
EXPERIMENT_KEYS = {"name", "dgp", "T", "n_reps", "seed", "target", "methods", "bootstrap"}
TARGET_KEYS = {"response", "shock", "h_max"}
GARCH_KEYS = {"omega", "alpha", "beta"}
GEOMETRIC_KEYS = {"matrix", "decay", "lags"}


class _Reader:
    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source

    def where(self, key: str) -> str:
        needle = f'"{key}"'
        pos = self.text.find(needle)
        if pos < 0:
            return self.source
        return f"{self.source}:{self.text.count(chr(10), 0, pos) + 1}"

    def fail(self, key: str, msg: str):
        raise ParseError(f"{self.where(key)}: field {key!r}: {msg}")

    def check_keys(self, obj, allowed, section: str):
        if not isinstance(obj, dict):
            raise ParseError(f"{self.where(section)}: section {section!r} must be an object")
        for key in obj:
            if key not in allowed:
                self.fail(key, f"unknown key in {section!r} (allowed: {', '.join(sorted(allowed))})")

    def number(self, obj, key, default=None, integer=False):
        if key not in obj:
            if default is None:
                self.fail(key, "is required")
            return default
        val = obj[key]
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            self.fail(key, f"expected a number, got {val!r}")
        if integer:
            if isinstance(val, float) and not val.is_integer():
                self.fail(key, f"expected an integer, got {val!r}")
            return int(val)
        return float(val)

    def matrix(self, val, key):
        try:
            arr = np.array(val, dtype=float)
        except (TypeError, ValueError):
            self.fail(key, "expected a matrix given row by row")
        if arr.ndim != 2:
            self.fail(key, "expected a matrix given row by row")
        return arr


def _dgp_from(obj, rd: _Reader) -> DgpSpec:
    rd.check_keys(obj, DGP_KEYS, "dgp")
    if "A" not in obj or "Gamma" not in obj:
        rd.fail("dgp", "needs both 'A' and 'Gamma'")
    A = rd.matrix(obj["A"], "A")
    G = rd.matrix(obj["Gamma"], "Gamma")
    if "ma_coeffs" in obj and "ma_geometric" in obj:
        rd.fail("ma_geometric", "give either 'ma_coeffs' or 'ma_geometric', not both")
    ma = ()
    if "ma_coeffs" in obj:
        if not isinstance(obj["ma_coeffs"], list):
            rd.fail("ma_coeffs", "expected a list of matrices")
        ma = tuple(rd.matrix(m, "ma_coeffs") for m in obj["ma_coeffs"])
    elif "ma_geometric" in obj:
        geo = obj["ma_geometric"]
        rd.check_keys(geo, GEOMETRIC_KEYS, "ma_geometric")
        ma = geometric_ma(rd.matrix(geo.get("matrix"), "matrix"), rd.number(geo, "decay"),
                          rd.number(geo, "lags", integer=True))
    law = obj.get("innovation_law", "gaussian")
    try:
        law = InnovationLaw(law)
    except ValueError:
        rd.fail("innovation_law", f"expected one of {[m.value for m in InnovationLaw]}")
    garch = None
    if "garch" in obj:
        rd.check_keys(obj["garch"], GARCH_KEYS, "garch")
        g = obj["garch"]
        garch = GarchParams(rd.number(g, "omega"), rd.number(g, "alpha"), rd.number(g, "beta"))
    try:
        return DgpSpec(
            A=A,
            Gamma=G,
            ma_coeffs=ma,
            mis_scale=rd.number(obj, "mis_scale", 0.0),
            mis_power=rd.number(obj, "mis_power", 0.0),
            innovation_law=law,
            garch_params=garch,
            burn_in=rd.number(obj, "burn_in", 500, integer=True),
            name=str(obj.get("name", "custom")),
        )
    except TlpError as exc:
        raise ValidationError(str(exc)) from exc


def _bootstrap_from(obj, rd: _Reader, seed: int | None = None) -> BootstrapConfig:
    rd.check_keys(obj, BOOT_KEYS, "bootstrap")
    defaults = BootstrapConfig()
    kwargs = {}
    for key in ("B1", "B2", "p", "q", "min_valid_t", "max_retries", "lambda_grid_size", "chunk"):
        kwargs[key] = rd.number(obj, key, getattr(defaults, key), integer=True)
    kwargs["alpha"] = rd.number(obj, "alpha", defaults.alpha)
    if obj.get("block_length") is not None:
        kwargs["block_length"] = rd.number(obj, "block_length", integer=True)
    if "per_b1_weights" in obj:
        if not isinstance(obj["per_b1_weights"], bool):
            rd.fail("per_b1_weights", "expected true or false")
        kwargs["per_b1_weights"] = obj["per_b1_weights"]
    try:
        kwargs["centering"] = Centering(obj.get("centering", defaults.centering.value))
    except ValueError:
        rd.fail("centering", f"expected one of {[c.value for c in Centering]}")
    kwargs["master_seed"] = rd.number(obj, "seed", defaults.master_seed if seed is None else seed, integer=True)
    try:
        return BootstrapConfig(**kwargs)
    except TlpError as exc:
        raise ValidationError(str(exc)) from exc


def _experiment_from(obj, rd: _Reader) -> ExperimentDesign:
    rd.check_keys(obj, EXPERIMENT_KEYS, "experiment")
    seed = rd.number(obj, "seed", 0, integer=True)
    dgp = _dgp_from(obj["dgp"], rd)
    boot = _bootstrap_from(obj.get("bootstrap", {}), rd, seed)
    tgt = obj.get("target", {"response": 2, "shock": 1, "h_max": 20})
    rd.check_keys(tgt, TARGET_KEYS, "target")
    methods = obj.get("methods", [m.value for m in ALL_METHODS])
    if not isinstance(methods, list):
        rd.fail("methods", "expected a list")
    try:
        methods = tuple(Method(m) for m in methods)
    except ValueError:
        rd.fail("methods", f"expected a subset of {[m.value for m in ALL_METHODS]}")
    try:
        target = ShockTarget(rd.number(tgt, "response", integer=True), rd.number(tgt, "shock", integer=True),
                             rd.number(tgt, "h_max", integer=True))
        return ExperimentDesign(
            dgp=dgp,
            T=rd.number(obj, "T", integer=True),
            n_reps=rd.number(obj, "n_reps", integer=True),
            bootstrap=boot,
            target=target,
            methods=methods,
            master_seed=seed,
            name=str(obj.get("name", dgp.name)),
        )
    except TlpError as exc:
        raise ValidationError(str(exc)) from exc


def parse_config_text(text: str, source: str = "<config>"):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    rd = _Reader(text, source)
    if not isinstance(obj, dict):
        raise ParseError(f"{source}: top level must be an object")
    if "dgp" in obj:
        return _experiment_from(obj, rd)
    if "A" in obj:
        return _dgp_from(obj, rd)
    if "B1" in obj or "B2" in obj:
        return _bootstrap_from(obj, rd)
    raise ParseError(f"{source}: cannot tell the config kind (expected 'dgp', 'A' or 'B1' at top level)")


def parse_config(path):
    """Load an :class:`ExperimentDesign`, :class:`DgpSpec` or :class:`BootstrapConfig`."""
    path = Path(path)
    return parse_config_text(path.read_text(encoding="utf-8"), str(path))


def shipped_config(name: str) -> Path:
    return CONFIG_DIR / f"{name}.json"


# ---------------------------------------------------------------------------
# Serialisation back to plain JSON

def dgp_to_dict(spec: DgpSpec) -> dict:
    out = {
        "name": spec.name,
        "A": spec.A.tolist(),
        "Gamma": spec.Gamma.tolist(),
        "ma_coeffs": [m.tolist() for m in spec.ma_coeffs],
        "mis_scale": spec.mis_scale,
        "mis_power": spec.mis_power,
        "innovation_law": spec.innovation_law.value,
        "burn_in": spec.burn_in,
    }
    if spec.garch_params is not None:
        out["garch"] = asdict(spec.garch_params)
    return out


def bootstrap_to_dict(cfg: BootstrapConfig) -> dict:
    out = asdict(cfg)
    out["centering"] = cfg.centering.value
    out["seed"] = out.pop("master_seed")
    return out


def design_to_dict(design: ExperimentDesign) -> dict:
    t = design.target
    return {
        "name": design.name,
        "dgp": dgp_to_dict(design.dgp),
        "T": design.T,
        "n_reps": design.n_reps,
        "seed": design.master_seed,
        "target": {"response": t.response, "shock": t.shock, "h_max": t.h_max},
        "methods": [m.value for m in design.methods],
        "bootstrap": bootstrap_to_dict(design.bootstrap),
    }


# ---------------------------------------------------------------------------
# Output

def _fmt(x: float) -> str:
    # repr round-trips exactly and never depends on the locale
    return repr(float(x))


def write_metrics_csv(table: MetricsTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRIC_COLUMNS)
        for row in table.rows():
            m, h, *vals, n_eff = row
            w.writerow([m, h, *(_fmt(v) for v in vals), n_eff])


def read_metrics_csv(path, nominal: float = 0.90) -> MetricsTable:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ParseError(f"{path}: no data rows")
    methods = tuple(dict.fromkeys(Method(r["method"]) for r in rows))
    horizons = np.array(sorted({int(r["horizon"]) for r in rows}))
    cols = {c: {m: np.empty(len(horizons)) for m in methods} for c in PLOTTED}
    pos = {h: n for n, h in enumerate(horizons)}
    for r in rows:
        for c in PLOTTED:
            cols[c][Method(r["method"])][pos[int(r["horizon"])]] = float(r[c])
    return MetricsTable(methods, horizons, cols["coverage"], cols["length"], cols["bias"],
                        cols["sd"], cols["rmse"], int(rows[0]["n_effective"]), nominal)


COLOURS = {Method.LP: "#1f77b4", Method.VAR: "#d62728", Method.SLP: "#9467bd", Method.TLP: "#2ca02c"}


def svg_chart(table: MetricsTable, metric: str, width: int = 640, height: int = 400) -> str:
    """Line chart of one metric against the horizon, one polyline per method."""
    series = table.metric(metric)
    left, right, top, bottom = 60, 110, 30, 45
    pw, ph = width - left - right, height - top - bottom
    hs = table.horizons.astype(float)
    values = np.concatenate([np.asarray(series[m], float) for m in table.methods])
    values = values[np.isfinite(values)]
    lo, hi = (float(values.min()), float(values.max())) if values.size else (0.0, 1.0)
    if metric == "coverage":
        lo, hi = min(lo, table.nominal), max(hi, table.nominal)
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    h_span = max(hs.max() - hs.min(), 1.0)

    def sx(h):
        return left + (h - hs.min()) / h_span * pw

    def sy(v):
        return top + (hi - v) / (hi - lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" data-y-min="{lo!r}" data-y-max="{hi!r}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-family="sans-serif" font-size="14">{metric}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for v in np.linspace(lo + pad, hi - pad, 5):
        out.append(f'<text x="{left - 6}" y="{sy(v) + 4:.2f}" text-anchor="end" font-family="sans-serif" '
                   f'font-size="10">{v:.3g}</text>')
    for h in table.horizons[:: max(1, len(table.horizons) // 10)]:
        out.append(f'<text x="{sx(h):.2f}" y="{top + ph + 15}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="10">{int(h)}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 8}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="12">horizon</text>')
    if metric == "coverage":
        y = sy(table.nominal)
        out.append(f'<line class="nominal" data-value="{table.nominal!r}" x1="{left}" y1="{y:.4f}" '
                   f'x2="{left + pw}" y2="{y:.4f}" stroke="gray" stroke-dasharray="6,4"/>')
    for n, m in enumerate(table.methods):
        pts = " ".join(f"{sx(h):.2f},{sy(v):.2f}" for h, v in zip(hs, series[m]) if np.isfinite(v))
        colour = COLOURS.get(m, "black")
        out.append(f'<polyline class="series" data-method="{m}" fill="none" stroke="{colour}" '
                   f'stroke-width="2" points="{pts}"/>')
        ly = top + 15 + 18 * n
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" '
                   f'stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly + 4}" font-family="sans-serif" font-size="12">{m}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def run_meta(config: dict, extra: dict | None = None) -> dict:
    meta = {
        "config": config,
        "seed": config.get("seed", config.get("bootstrap", {}).get("seed")),
        "block_length_rule": "ceil(T ** (1/3)) unless bootstrap.block_length is set",
        "lambda_grid": "0 plus lambda_grid_size log-spaced points from 1e-4 to 1e4 times sum(X'X)",
        "quantile_method": "numpy linear interpolation",
        "versions": {
            "tlp": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    }
    if extra:
        meta.update(extra)
    return meta


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_results(table: MetricsTable, out_dir, emit_plots: bool = False, config: dict | None = None,
                  bands=None) -> list:
    """Write ``metrics.csv``, ``run_meta.json`` and optionally one SVG per metric."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "metrics.csv", out / "run_meta.json"]
    write_metrics_csv(table, written[0])
    write_json(run_meta(config or {}, {"centering": table.centering.value, "n_effective": table.n_effective}),
               written[1])
    if bands is not None:
        path = out / "bands.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "horizon", "point", "lower", "upper"])
            for m, (point, band) in bands.items():
                for h in range(len(point)):
                    w.writerow([str(m), h, _fmt(point[h]), _fmt(band[h, 0]), _fmt(band[h, 1])])
        written.append(path)
    if emit_plots:
        for metric in PLOTTED:
            path = out / f"{metric}.svg"
            path.write_text(svg_chart(table, metric), encoding="utf-8")
            written.append(path)
    return written


# ---------------------------------------------------------------------------
# Commands

def _load(args):
    cfg = parse_config(args.config)
    if args.seed is not None:
        if isinstance(cfg, ExperimentDesign):
            cfg = cfg.with_seed(args.seed)
        elif isinstance(cfg, BootstrapConfig):
            cfg = replace(cfg, master_seed=args.seed)
    if args.reps is not None and isinstance(cfg, ExperimentDesign):
        cfg = replace(cfg, n_reps=args.reps)
    return cfg


def _need_design(cfg, command: str) -> ExperimentDesign:
    if not isinstance(cfg, ExperimentDesign):
        raise ValidationError(f"'{command}' needs an experiment config (with a 'dgp' section)")
    return cfg


def _panel_for(args, cfg) -> tuple[TimeSeriesPanel, dict]:
    if args.data:
        try:
            values = np.loadtxt(args.data, delimiter=",", skiprows=1, ndmin=2)
        except ValueError as exc:
            raise ParseError(f"{args.data}: {exc}") from exc
        return TimeSeriesPanel(values), {"data": str(args.data)}
    if isinstance(cfg, ExperimentDesign):
        spec, T, seed = cfg.dgp, cfg.T, cfg.master_seed
    elif isinstance(cfg, DgpSpec):
        if args.T is None:
            raise ValidationError("a bare dgp config needs --T")
        spec, T, seed = cfg, args.T, args.seed or 0
    else:
        raise ValidationError("need --data or a config with a dgp section")
    T = args.T or T
    panel = simulate(spec, T, RngStream(seed, (0, 0)))
    return panel, {"simulated": {"T": T, "seed": seed, "stream": [0, 0]}}


def _write_panel(panel: TimeSeriesPanel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"y{c + 1}" for c in range(panel.k)])
        for row in panel.values:
            w.writerow([_fmt(v) for v in row])


def cmd_simulate(args, cfg, out: Path) -> None:
    panel, source = _panel_for(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    _write_panel(panel, out / "panel.csv")
    conf = design_to_dict(cfg) if isinstance(cfg, ExperimentDesign) else dgp_to_dict(cfg)
    write_json(run_meta(conf, source), out / "run_meta.json")


def cmd_estimate(args, cfg, out: Path) -> None:
    design = _need_design(cfg, "estimate")
    target = design.target
    panel, source = _panel_for(args, cfg)
    lp = estimate_lp(panel, target, design.p)
    var = estimate_var(panel, target, design.q)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "irf.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["horizon", "LP", "VAR"])
        for h in range(target.n_horizons):
            w.writerow([h, _fmt(lp.beta[h]), _fmt(var.beta[h])])
    write_json(run_meta(design_to_dict(design), source), out / "run_meta.json")


def cmd_msdb(args, cfg, out: Path) -> None:
    design = _need_design(cfg, "msdb")
    panel, source = _panel_for(args, cfg)
    ens = run_msdb(panel, design.target, design.bootstrap, RngStream(design.master_seed, (0, 1)))
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "bands.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "horizon", "point", "lower", "upper", "tcrit", "sd"])
        for m in design.methods:
            b = ens.bands[m]
            for h in range(design.target.n_horizons):
                w.writerow([str(m), h, _fmt(ens.point(m)[h]), _fmt(b[h, 0]), _fmt(b[h, 1]),
                            _fmt(ens.tcrit[m][h]), _fmt(math.sqrt(ens.sigma_first[m][0, h]))])
    extra = dict(source)
    extra.update(lambda_tilde=ens.lambda_tilde, tlp_weights=ens.tlp_weights_first[0].tolist(), redraws=ens.redraws)
    write_json(run_meta(design_to_dict(design), extra), out / "run_meta.json")


def cmd_montecarlo(args, cfg, out: Path) -> None:
    design = _need_design(cfg, "montecarlo")
    table = run_experiment(design, args.workers)
    write_results(table, out, args.plots, design_to_dict(design))


def cmd_compare(args, cfg, out: Path) -> None:
    design = _need_design(cfg, "compare-centering")
    mean_table, pseudo_table = compare_centering(design, args.workers)
    conf = design_to_dict(design)
    for table in (mean_table, pseudo_table):
        write_results(table, out / table.centering.value, args.plots, conf)


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "msdb": cmd_msdb,
    "montecarlo": cmd_montecarlo,
    "compare-centering": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tlp", description="Targeted local projections with double-bootstrap bands")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="JSON config file, or the name of a shipped config")
    ap.add_argument("--out", default="out", help="output directory")
    ap.add_argument("--seed", type=int, default=None, help="override the master seed")
    ap.add_argument("--workers", type=int, default=None, help="worker processes (default: $TLP_WORKERS or 1)")
    ap.add_argument("--plots", action="store_true", help="write one SVG chart per metric")
    ap.add_argument("--reps", type=int, default=None, help="override n_reps")
    ap.add_argument("--T", type=int, default=None, help="sample size for simulate/estimate/msdb")
    ap.add_argument("--data", default=None, help="CSV panel (header row, one column per variable)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if not os.path.exists(args.config) and shipped_config(args.config).exists():
        args.config = str(shipped_config(args.config))
    try:
        cfg = _load(args)
        if args.workers is not None and args.workers < 1:
            raise ValidationError("--workers must be positive")
        COMMANDS[args.command](args, cfg, Path(args.out))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except TlpError as exc:
        print(f"estimation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
