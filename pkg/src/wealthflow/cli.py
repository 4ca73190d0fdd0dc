"""
Command-line driver.

    wealthflow run    [options]                 single simulation
    wealthflow batch  [options] [--seeds ...]   canonical multi-seed batch
    wealthflow metrics FILE                     inequality report for a money vector
    wealthflow plot KIND INPUT [INPUT ...]      SVG from run/batch JSON

Exit status: 0 success, 1 runtime/data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import metrics
from .charity import parse_strategy
from .engine import CANONICAL_SEEDS, RunResult, SimConfig, run
from .errors import ConfigError
from .experiment import BatchReport, emit_series, emit_table, make_report, run_seeds, series_csv, transfers_csv
from .svg import histogram_svg, series_svg

DEFAULT_BIN_WIDTH = 10
PLOT_KINDS = ("histogram", "gap", "returns", "variance")

# config-file key -> SimConfig field
_KEYS = {
    "agents": "num_agents",
    "money": "initial_money",
    "ticks": "max_ticks",
    "seed": "seed",
    "threshold": "critical_threshold",
    "init": "init_mode",
    "snapshot_ticks": "snapshot_ticks",
    "random_donors": "random_donors",
}
_EXTRA_KEYS = {"strategy", "params", "seeds", "name", "workers", "format"}


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    subcommand: str
    sim: Optional[SimConfig] = None
    seeds: list[int] = field(default_factory=lambda: list(CANONICAL_SEEDS))
    out_dir: Path = Path("out")
    formats: tuple[str, ...] = ("csv", "json")
    name: str = "exp"
    workers: int = 1
    config_path: Optional[Path] = None
    # metrics / plot
    inputs: list[Path] = field(default_factory=list)
    kind: Optional[str] = None
    output: Optional[Path] = None
    bin_width: int = DEFAULT_BIN_WIDTH
    as_json: bool = False
    column: Optional[str] = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _sim_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key=value config file; flags override it")
    p.add_argument("--seed", type=int)
    p.add_argument("--agents", type=int, help="number of agents (default 500)")
    p.add_argument("--money", type=int, help="initial money per agent (default 100)")
    p.add_argument("--ticks", type=int, help="ticks to simulate (default 9000)")
    p.add_argument("--threshold", type=int, help="critical gap threshold (default 0)")
    p.add_argument("--init", choices=("equal", "unequal"))
    p.add_argument("--strategy", help="charity strategy A, B or C (default: none)")
    p.add_argument("--params", help="strategy parameters, e.g. c=100,d=20")
    p.add_argument("--random-donors", action="store_true", default=None,
                   help="pick B/C donors uniformly within their decile")
    p.add_argument("--snapshot-ticks", help="comma-separated ticks for metric snapshots")
    p.add_argument("--out", type=Path, help="output directory (else $WEALTHFLOW_OUT, else ./out)")
    p.add_argument("--name", help="experiment name used as file prefix")
    p.add_argument("--format", help="comma-separated table formats: csv,json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wealthflow", description="Closed money-exchange economy with sadaqah strategies.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run one simulation")
    _sim_options(p)

    p = sub.add_parser("batch", help="run one simulation per seed and emit tables")
    _sim_options(p)
    p.add_argument("--seeds", help="comma-separated seeds (default 1000,2000,...,10000)")
    p.add_argument("--workers", type=int, help="parallel worker processes")

    p = sub.add_parser("metrics", help="inequality metrics of a money-vector file")
    p.add_argument("input", type=Path)
    p.add_argument("--column", help="CSV column name or 0-based index")
    p.add_argument("--json", action="store_true", dest="as_json")

    p = sub.add_parser("plot", help="render an SVG from run or batch JSON")
    p.add_argument("kind", help="one of: " + ", ".join(PLOT_KINDS))
    p.add_argument("inputs", type=Path, nargs="+")
    p.add_argument("--output", "-o", type=Path)
    p.add_argument("--bin-width", type=int, default=DEFAULT_BIN_WIDTH)
    return parser


def read_config_file(path: Path) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or (key not in _KEYS and key not in _EXTRA_KEYS):
            raise UsageError(f"{path}:{lineno}: unrecognised config line {line!r}")
        values[key] = val.strip()
    return values


def _int_list(text: str, what: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"malformed {what}: {text!r}") from None


def _truthy(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


def parse_cli(argv: Optional[list[str]] = None) -> CliConfig:
    args = build_parser().parse_args(argv)
    cfg = CliConfig(subcommand=args.subcommand)

    if args.subcommand == "metrics":
        cfg.inputs, cfg.as_json, cfg.column = [args.input], args.as_json, args.column
        return cfg
    if args.subcommand == "plot":
        if args.kind not in PLOT_KINDS:
            raise UsageError(f"unknown plot kind {args.kind!r}; expected one of {', '.join(PLOT_KINDS)}")
        if args.bin_width < 1:
            raise UsageError("--bin-width must be >= 1")
        cfg.kind, cfg.inputs, cfg.output, cfg.bin_width = args.kind, args.inputs, args.output, args.bin_width
        return cfg

    file_vals = read_config_file(args.config) if args.config else {}
    cfg.config_path = args.config
    flags = {
        "seed": args.seed,
        "agents": args.agents,
        "money": args.money,
        "ticks": args.ticks,
        "threshold": args.threshold,
        "init": args.init,
        "strategy": args.strategy,
        "params": args.params,
        "random_donors": args.random_donors,
        "snapshot_ticks": args.snapshot_ticks,
        "name": args.name,
        "format": args.format,
        "seeds": getattr(args, "seeds", None),
        "workers": getattr(args, "workers", None),
    }
    merged = {**file_vals, **{k: v for k, v in flags.items() if v is not None}}

    sim_kwargs = {}
    try:
        for key, fname in _KEYS.items():
            if key not in merged:
                continue
            val = merged[key]
            if fname == "snapshot_ticks":
                sim_kwargs[fname] = tuple(_int_list(str(val), "snapshot ticks"))
            elif fname == "random_donors":
                sim_kwargs[fname] = val if isinstance(val, bool) else _truthy(val)
            elif fname == "init_mode":
                sim_kwargs[fname] = str(val)
            else:
                sim_kwargs[fname] = int(val)
        if merged.get("strategy") and merged["strategy"].lower() != "none":
            sim_kwargs["strategy"] = parse_strategy(merged["strategy"], merged.get("params"))
        elif merged.get("params"):
            raise UsageError("--params given without --strategy")
        cfg.sim = SimConfig(**sim_kwargs)
    except (ConfigError, ValueError) as exc:
        raise UsageError(str(exc)) from None

    if "seeds" in merged:
        cfg.seeds = _int_list(str(merged["seeds"]), "seeds")
        if not cfg.seeds:
            raise UsageError("empty seed list")
    elif "seed" in merged and args.subcommand == "batch":
        cfg.seeds = [cfg.sim.seed]
    if "workers" in merged:
        cfg.workers = max(1, int(merged["workers"]))
    if "format" in merged:
        fmts = tuple(f.strip().lower() for f in str(merged["format"]).split(",") if f.strip())
        bad = set(fmts) - {"csv", "json"}
        if bad or not fmts:
            raise UsageError(f"unsupported format(s): {merged['format']!r}")
        cfg.formats = fmts
    cfg.name = merged.get("name") or ("baseline" if cfg.sim.strategy is None else "sadaqah")
    if args.out is not None:
        cfg.out_dir = args.out
    elif os.environ.get("WEALTHFLOW_OUT"):
        cfg.out_dir = Path(os.environ["WEALTHFLOW_OUT"])
    return cfg


# ---------------------------------------------------------------- outputs


def _provenance(cfg: CliConfig, seeds: list[int]) -> dict:
    return {"config": cfg.sim.to_dict(), "seeds": list(seeds)}


def _csv_with_provenance(body: str, prov: dict) -> str:
    head = f"# config: {json.dumps(prov['config'], sort_keys=True)}\r\n# seeds: {json.dumps(prov['seeds'])}\r\n"
    return head + body


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _fname(cfg: CliConfig, what: str, ext: str) -> Path:
    return cfg.out_dir / f"{cfg.name}_{what}_{cfg.sim.strategy_tag}.{ext}"


def _histogram_doc(money, bin_width: int, title: str, prov: Optional[dict]) -> str:
    return histogram_svg(metrics.histogram(money, bin_width), bin_width, title=title, metadata=prov)


def _gap_doc(result: RunResult, prov: Optional[dict]) -> str:
    s = emit_series(result, "gap")
    c = result.config
    title = f"Bottom 50% minus top 10% money (seed {c.seed}, strategy {c.strategy_tag})"
    return series_svg({"gap": (s["tick"], s["gap"])}, title, "tick", "money gap", zero_line=True, metadata=prov)


def _per_run_doc(reports: list[BatchReport], kind: str, prov: Optional[dict]) -> str:
    data = {}
    for rep in reports:
        s = emit_series(rep, "return_periods" if kind == "returns" else "variance")
        ys = s["return_periods"] if kind == "returns" else s["variance"]
        data[f"strategy {rep.config.strategy_tag}"] = (s["run"], ys)
    if kind == "returns":
        return series_svg(data, "Return periods per run", "run", "return periods (log scale)",
                          log_y=True, markers=True, metadata=prov)
    return series_svg(data, "Final money variance per run", "run", "variance", markers=True, metadata=prov)


def cmd_run(cfg: CliConfig) -> list[Path]:
    result = run(cfg.sim)
    prov = _provenance(cfg, [cfg.sim.seed])
    written = [_write(_fname(cfg, "run", "json"), result.to_json(indent=None) + "\n")]
    written.append(_write(_fname(cfg, "series-gap", "csv"),
                          _csv_with_provenance(series_csv(emit_series(result, "gap")), prov)))
    snaps = [result.snapshots[t] for t in sorted(result.snapshots)]
    cols = list(snaps[0])
    written.append(_write(_fname(cfg, "snapshots", "csv"),
                          _csv_with_provenance(series_csv({c: [s[c] for s in snaps] for c in cols}), prov)))
    if cfg.sim.strategy is not None:
        written.append(_write(_fname(cfg, "transfers", "csv"),
                              _csv_with_provenance(transfers_csv(result.charity_ledger), prov)))
    title = f"Money distribution at tick {cfg.sim.max_ticks}"
    written.append(_write(_fname(cfg, "plot-histogram", "svg"),
                          _histogram_doc(result.final_money, DEFAULT_BIN_WIDTH, title, prov)))
    written.append(_write(_fname(cfg, "plot-gap", "svg"), _gap_doc(result, prov)))
    return written


def cmd_batch(cfg: CliConfig) -> list[Path]:
    results = run_seeds(cfg.sim, cfg.seeds, cfg.workers)
    seeds = [r.config.seed for r in results]
    prov = _provenance(cfg, seeds)
    written = []
    for tick in cfg.sim.snapshot_ticks:
        report = make_report(results, tick)
        for fmt in cfg.formats:
            doc = emit_table(report, "snapshot", fmt)
            if fmt == "csv":
                doc = _csv_with_provenance(doc, prov)
            written.append(_write(_fname(cfg, f"table-t{tick}", fmt), doc))
    final = make_report(results)
    for fmt in cfg.formats:
        doc = emit_table(final, "outcome", fmt)
        if fmt == "csv":
            doc = _csv_with_provenance(doc, prov)
        written.append(_write(_fname(cfg, "table-outcome", fmt), doc))
    written.append(_write(_fname(cfg, "batch", "json"), final.to_json() + "\n"))
    for series in ("return_periods", "variance"):
        doc = series_csv(emit_series(final, series))
        written.append(_write(_fname(cfg, f"series-{series.replace('_', '')}", "csv"),
                              _csv_with_provenance(doc, prov)))
    first = results[0]
    written.append(_write(_fname(cfg, "series-gap-run1", "csv"),
                          _csv_with_provenance(series_csv(emit_series(first, "gap")), prov)))
    written.append(_write(_fname(cfg, "plot-gap-run1", "svg"), _gap_doc(first, prov)))
    title = f"Money distribution at tick {cfg.sim.max_ticks}, run 1"
    written.append(_write(_fname(cfg, "plot-histogram-run1", "svg"),
                          _histogram_doc(first.final_money, DEFAULT_BIN_WIDTH, title, prov)))
    written.append(_write(_fname(cfg, "plot-returns", "svg"), _per_run_doc([final], "returns", prov)))
    written.append(_write(_fname(cfg, "plot-variance", "svg"), _per_run_doc([final], "variance", prov)))
    return written


class DataError(Exception):
    pass


def read_money_file(path: Path, column: Optional[str] = None) -> list[float]:
    """One number per line, or one column of a CSV (first column unless ``column`` is given)."""
    lines = path.read_text().splitlines()
    values = []
    col_idx = None
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if col_idx is None:
            if column is not None and not column.isdigit():
                if column not in cells:
                    raise DataError(f"{path}:{lineno}: column {column!r} not in header")
                col_idx = cells.index(column)
                continue
            col_idx = int(column) if column is not None else 0
            try:
                float(cells[col_idx])
            except (ValueError, IndexError):
                continue  # header row
        try:
            val = float(cells[col_idx])
        except (ValueError, IndexError):
            raise DataError(f"{path}:{lineno}: not a number: {raw!r}") from None
        if val < 0 or val != val or val in (float("inf"), float("-inf")):
            raise DataError(f"{path}:{lineno}: money must be finite and nonnegative, got {raw!r}")
        values.append(val)
    if not values:
        raise DataError(f"{path}: no values")
    return values


def metrics_report(values) -> dict:
    rec = metrics.snapshot_record(0, values)
    fit = metrics.bg_fit(values) if sum(values) > 0 else None
    return {
        "n": len(values),
        "mean": rec["mean"],
        "variance": rec["variance"],
        "gini": rec["gini"],
        "ge_beta2": rec["ge_beta2"],
        "atkinson_e1": rec["atkinson_e1"],
        "decile_ratio_10": _decile_ratio(values),
        "ks_stat": rec["ks_stat"],
        "bg_T": None if fit is None else fit.T,
    }


def _decile_ratio(values):
    try:
        r = metrics.decile_dispersion(values, 10)
    except ConfigError:
        return None
    return "inf" if r == float("inf") else r


def cmd_metrics(cfg: CliConfig) -> str:
    report = metrics_report(read_money_file(cfg.inputs[0], cfg.column))
    if cfg.as_json:
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    width = max(len(k) for k in report)
    lines = []
    for k, v in report.items():
        shown = "n/a" if v is None else (f"{v:.6g}" if isinstance(v, float) else str(v))
        lines.append(f"{k:<{width}}  {shown}")
    return "\n".join(lines) + "\n"


def _load_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"{path}: {exc}") from None


def cmd_plot(cfg: CliConfig) -> str:
    docs = [_load_json(p) for p in cfg.inputs]
    if cfg.kind in ("histogram", "gap"):
        if len(docs) != 1 or "final_money" not in docs[0]:
            raise UsageError(f"plot {cfg.kind} takes exactly one run JSON")
        result = RunResult.from_dict(docs[0])
        prov = {"config": result.config.to_dict(), "seeds": [result.config.seed]}
        if cfg.kind == "histogram":
            title = f"Money distribution at tick {result.config.max_ticks}"
            return _histogram_doc(result.final_money, cfg.bin_width, title, prov)
        return _gap_doc(result, prov)
    if not all("rows" in d for d in docs):
        raise UsageError(f"plot {cfg.kind} takes batch JSON files")
    reports = [BatchReport.from_dict(d) for d in docs]
    prov = {"configs": [r.config.to_dict() for r in reports], "seeds": [r.seeds for r in reports]}
    return _per_run_doc(reports, cfg.kind, prov)


def main(argv: Optional[list[str]] = None) -> int:
    try:
        cfg = parse_cli(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        if cfg.subcommand == "run":
            for path in cmd_run(cfg):
                print(path)
        elif cfg.subcommand == "batch":
            for path in cmd_batch(cfg):
                print(path)
        elif cfg.subcommand == "metrics":
            sys.stdout.write(cmd_metrics(cfg))
        elif cfg.subcommand == "plot":
            doc = cmd_plot(cfg)
            if cfg.output:
                print(_write(cfg.output, doc))
            else:
                sys.stdout.write(doc)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (DataError, ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
