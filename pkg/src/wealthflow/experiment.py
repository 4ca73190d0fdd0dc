"""
Multi-seed batches, return-period counting and table/series export.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .engine import RunResult, SimConfig, run
from .errors import ConfigError

SNAPSHOT_COLUMNS = ("run", "mean", "variance", "top10", "bottom50", "diff", "critical_tick")
OUTCOME_COLUMNS = ("run", "return_periods", "top10", "bottom50", "variance", "diff")


def count_return_periods(
    gaps: Sequence[int],
    threshold: int = 0,
    first_critical: Optional[int] = None,
    intervened: Optional[Sequence[int]] = None,
) -> int:
    """Re-entries into the critical region after the first entry.

    ``gaps`` is position-indexed; ``first_critical`` is the position of the
    first entry (found by scanning when omitted). Counts positions ``t`` past
    it with ``gaps[t] <= threshold < gaps[t - 1]``.

    ``intervened`` flags positions where a charity strategy acted on the
    critical state. An intervention pushes the system out of the critical
    stage, so a critical position right after one is also a re-entry. Without
    flags this is the plain downward-crossing count.
    """
    if first_critical is None:
        first_critical = next((i for i, g in enumerate(gaps) if g <= threshold), None)
        if first_critical is None:
            return 0
    count = 0
    for t in range(first_critical + 1, len(gaps)):
        if gaps[t] > threshold:
            continue
        if gaps[t - 1] > threshold or (intervened is not None and intervened[t - 1]):
            count += 1
    return count


@dataclass
class RunSummary:
    run_id: int
    seed: int
    tick: int
    mean: float
    variance: float
    top10_money: int
    bottom50_money: int
    diff: int
    first_critical_tick: Optional[int]
    return_periods: int


def summarize(result: RunResult, tick: Optional[int] = None, run_id: int = 1) -> RunSummary:
    """Reduce a run to one table row as seen at the end of ``tick`` (default: last tick)."""
    config = result.config
    if tick is None:
        tick = config.max_ticks
    if tick not in result.snapshots:
        raise ConfigError(f"tick {tick} is not a snapshot tick of this run")
    snap = result.snapshots[tick]
    bottom, top = snap["bottom50_money"], snap["top10_money"]
    first = result.first_critical_tick
    if first is not None and first > tick:
        first = None
    if tick == config.max_ticks:
        periods = result.return_periods
    else:
        h = result.gap_history
        pos = None if first is None else first - h.tick[0]
        n = tick - h.tick[0] + 1
        periods = 0 if pos is None else count_return_periods(
            h.pre_gap[:n], config.critical_threshold, pos, h.intervened[:n]
        )
    return RunSummary(
        run_id=run_id,
        seed=config.seed,
        tick=tick,
        mean=snap["mean"],
        variance=snap["variance"],
        top10_money=top,
        bottom50_money=bottom,
        diff=bottom - top,
        first_critical_tick=first,
        return_periods=periods,
    )


@dataclass
class BatchReport:
    config: SimConfig  # seed field is the first seed; rows carry their own
    seeds: list[int]
    tick: int
    rows: list[RunSummary]
    aggregates: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.aggregates:
            self.aggregates = aggregate(self.rows)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "seeds": list(self.seeds),
            "tick": self.tick,
            "rows": [asdict(r) for r in self.rows],
            "aggregates": self.aggregates,
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "BatchReport":
        return cls(
            config=SimConfig.from_dict(data["config"]),
            seeds=list(data["seeds"]),
            tick=data["tick"],
            rows=[RunSummary(**r) for r in data["rows"]],
            aggregates=dict(data["aggregates"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "BatchReport":
        return cls.from_dict(json.loads(text))


def aggregate(rows: Sequence[RunSummary]) -> dict:
    n = len(rows)
    if n == 0:
        return {}
    return {
        "mean_return_periods": math.fsum(r.return_periods for r in rows) / n,
        "mean_variance": math.fsum(r.variance for r in rows) / n,
        "mean_diff": math.fsum(r.diff for r in rows) / n,
    }


def _run_seed(config: SimConfig, seed: int) -> RunResult:
    try:
        return run(config.replace(seed=seed))
    except ConfigError as exc:
        raise ConfigError(f"seed {seed}: {exc}") from exc


def run_seeds(config: SimConfig, seeds: Sequence[int], workers: int = 1) -> list[RunResult]:
    """One run per seed, returned in ascending seed order regardless of ``workers``."""
    seeds = sorted(set(int(s) for s in seeds))
    if not seeds:
        raise ConfigError("need at least one seed")
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_seed, [config] * len(seeds), seeds))
    return [_run_seed(config, s) for s in seeds]


def make_report(results: Sequence[RunResult], tick: Optional[int] = None) -> BatchReport:
    results = sorted(results, key=lambda r: r.config.seed)
    rows = [summarize(r, tick, run_id=i + 1) for i, r in enumerate(results)]
    config = results[0].config
    return BatchReport(
        config=config,
        seeds=[r.config.seed for r in results],
        tick=config.max_ticks if tick is None else tick,
        rows=rows,
    )


def run_batch(config: SimConfig, seeds: Sequence[int], tick: Optional[int] = None, workers: int = 1) -> BatchReport:
    return make_report(run_seeds(config, seeds, workers), tick)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def table_rows(report: BatchReport, kind: str) -> tuple[tuple[str, ...], list[list]]:
    kind = kind.lower()
    if kind == "snapshot":
        return SNAPSHOT_COLUMNS, [
            [r.run_id, r.mean, r.variance, r.top10_money, r.bottom50_money, r.diff, r.first_critical_tick]
            for r in report.rows
        ]
    if kind in ("outcome", "strategyoutcome", "strategy_outcome"):
        return OUTCOME_COLUMNS, [
            [r.run_id, r.return_periods, r.top10_money, r.bottom50_money, r.variance, r.diff]
            for r in report.rows
        ]
    raise ConfigError(f"unknown table kind {kind!r}")


def emit_table(report: BatchReport, kind: str = "snapshot", fmt: str = "csv") -> str:
    """Render a per-run snapshot table (``snapshot``) or a strategy outcome table (``outcome``)."""
    columns, rows = table_rows(report, kind)
    fmt = fmt.lower()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(columns)
        writer.writerows([_fmt(v) for v in row] for row in rows)
        return buf.getvalue()
    if fmt == "json":
        return json.dumps(
            {"kind": kind, "columns": list(columns), "rows": rows, "report": report.to_dict()},
            indent=2,
            sort_keys=True,
        )
    raise ValueError(f"unsupported table format {fmt!r}")


def emit_series(source, series: str) -> dict[str, list]:
    """Columnar series: ``gap`` from a RunResult, ``return_periods``/``variance`` from a BatchReport.

    The return-period series also carries ``log10_return_periods``; a count of
    zero has no logarithm and is emitted as None.
    """
    series = series.lower().replace("_", "").replace("-", "")
    if series in ("gap", "gapovertime"):
        h = source.gap_history
        return {"tick": list(h.tick), "gap": list(h.gap)}
    if series in ("returnperiods", "returnperiodsperrun"):
        counts = [r.return_periods for r in source.rows]
        return {
            "run": [r.run_id for r in source.rows],
            "return_periods": counts,
            "log10_return_periods": [math.log10(c) if c > 0 else None for c in counts],
        }
    if series in ("variance", "varianceperrun"):
        return {"run": [r.run_id for r in source.rows], "variance": [r.variance for r in source.rows]}
    raise ConfigError(f"unknown series {series!r}")


def series_csv(columns: dict[str, list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    names = list(columns)
    writer.writerow(names)
    writer.writerows([_fmt(v) for v in row] for row in zip(*columns.values()))
    return buf.getvalue()


TRANSFER_COLUMNS = ("tick", "strategy", "units_moved", "gap_before", "gap_after")


def transfers_csv(ledger) -> str:
    """One row per charity intervention in a run's ledger."""
    return series_csv({c: [getattr(r, c) for r in ledger.records] for c in TRANSFER_COLUMNS})


def parse_table_csv(text: str) -> list[dict]:
    """Read a CSV produced by :func:`emit_table`, skipping ``#`` provenance lines."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = []
    for rec in csv.DictReader(lines):
        rows.append({k: (None if v == "" else float(v)) for k, v in rec.items()})
    return rows
