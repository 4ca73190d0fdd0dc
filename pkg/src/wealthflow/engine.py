"""
World state and the tick loop of the closed money-exchange economy.

Each tick every agent, visited in a freshly shuffled order, hands one unit
of money to a uniformly chosen other agent if it holds at least one unit.
With a charity strategy configured, the decile gap is checked after the
exchange and the strategy fires once whenever the gap is at or below the
critical threshold.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .charity import (
    StrategySpec,
    TransferRecord,
    apply_strategy,
    check_strategy,
    gap_parts,
    partition_deciles,
    tail_counts,
    strategy_from_dict,
)
from .errors import ConfigError
from .metrics import snapshot_record

CANONICAL_SEEDS = tuple(range(1000, 10001, 1000))
DEFAULT_SNAPSHOT_TICKS = (100, 1000, 9000)


@dataclass(frozen=True)
class AgentState:
    id: int
    money: int


@dataclass(frozen=True)
class SimConfig:
    num_agents: int = 500
    initial_money: int = 100
    init_mode: str = "equal"
    max_ticks: int = 9000
    seed: int = 1000
    critical_threshold: int = 0
    strategy: Optional[StrategySpec] = None
    # None -> the canonical 100/1000/9000 ticks that fall inside the run, plus the last tick
    snapshot_ticks: Optional[tuple[int, ...]] = None
    random_donors: bool = False

    def __post_init__(self):
        if self.num_agents < 10:
            raise ConfigError(f"num_agents must be >= 10, got {self.num_agents}")
        if self.initial_money < 1:
            raise ConfigError(f"initial_money must be >= 1, got {self.initial_money}")
        if self.max_ticks < 0:
            raise ConfigError(f"max_ticks must be >= 0, got {self.max_ticks}")
        mode = self.init_mode.lower()
        if mode not in ("equal", "unequal"):
            raise ConfigError(f"init_mode must be 'equal' or 'unequal', got {self.init_mode!r}")
        object.__setattr__(self, "init_mode", mode)
        if self.snapshot_ticks is None:
            ticks = {t for t in DEFAULT_SNAPSHOT_TICKS if t <= self.max_ticks} | {self.max_ticks}
        else:
            ticks = set(int(t) for t in self.snapshot_ticks)
            bad = [t for t in ticks if not 0 <= t <= self.max_ticks]
            if bad:
                raise ConfigError(f"snapshot ticks {sorted(bad)} outside [0, {self.max_ticks}]")
        object.__setattr__(self, "snapshot_ticks", tuple(sorted(ticks)))
        if self.strategy is not None:
            check_strategy(self.strategy, self.num_agents)

    @property
    def total_money(self) -> int:
        return self.num_agents * self.initial_money

    @property
    def strategy_tag(self) -> str:
        return "none" if self.strategy is None else self.strategy.tag

    def to_dict(self) -> dict:
        out = asdict(self)
        out["strategy"] = None if self.strategy is None else self.strategy.to_dict()
        out["snapshot_ticks"] = list(self.snapshot_ticks)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        data = dict(data)
        data["strategy"] = strategy_from_dict(data.get("strategy"))
        if data.get("snapshot_ticks") is not None:
            data["snapshot_ticks"] = tuple(data["snapshot_ticks"])
        return cls(**data)

    def replace(self, **changes) -> "SimConfig":
        data = {**{f: getattr(self, f) for f in self.__dataclass_fields__}, **changes}
        return SimConfig(**data)


@dataclass
class CharityLedger:
    interventions: int = 0
    units_moved: int = 0
    records: list[TransferRecord] = field(default_factory=list)

    def add(self, record: TransferRecord) -> None:
        self.interventions += 1
        self.units_moved += record.units_moved
        self.records.append(record)

    def to_dict(self) -> dict:
        return {
            "interventions": self.interventions,
            "units_moved": self.units_moved,
            "records": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CharityLedger":
        return cls(
            interventions=data["interventions"],
            units_moved=data["units_moved"],
            records=[TransferRecord.from_dict(r) for r in data["records"]],
        )


@dataclass
class GapHistory:
    """Columnar per-tick record. ``pre_gap`` is the post-exchange, pre-charity gap
    that the critical test sees; ``gap`` is the end-of-tick gap."""

    tick: list[int] = field(default_factory=list)
    bottom50: list[int] = field(default_factory=list)
    top10: list[int] = field(default_factory=list)
    gap: list[int] = field(default_factory=list)
    pre_gap: list[int] = field(default_factory=list)
    intervened: list[int] = field(default_factory=list)  # 1 where a strategy fired

    def __len__(self) -> int:
        return len(self.tick)

    def append(self, tick, bottom50, top10, pre_gap, intervened=0):
        self.tick.append(tick)
        self.bottom50.append(bottom50)
        self.top10.append(top10)
        self.gap.append(bottom50 - top10)
        self.pre_gap.append(pre_gap)
        self.intervened.append(intervened)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "GapHistory":
        return cls(**{k: list(v) for k, v in data.items()})


@dataclass
class WorldState:
    tick: int
    money: np.ndarray
    rng: np.random.Generator
    charity_rng: Optional[np.random.Generator] = None
    gap_history: GapHistory = field(default_factory=GapHistory)
    charity_ledger: CharityLedger = field(default_factory=CharityLedger)
    last_moved: int = 0
    bottom_count: int = 0  # agents in deciles 1-5
    top_count: int = 0  # agents in decile 10

    def __post_init__(self):
        if not self.bottom_count:
            self.bottom_count, self.top_count = tail_counts(len(self.money))

    @property
    def agents(self) -> list[AgentState]:
        return [AgentState(i, int(m)) for i, m in enumerate(self.money)]


def init_world(config: SimConfig) -> WorldState:
    rng = np.random.default_rng(config.seed)
    n, total = config.num_agents, config.total_money
    if config.init_mode == "equal":
        money = np.full(n, config.initial_money, dtype=np.int64)
    else:
        # uniform random composition: sorted cut points in [0, total]
        cuts = np.sort(rng.integers(0, total + 1, size=n - 1))
        money = np.diff(np.concatenate(([0], cuts, [total]))).astype(np.int64)
    # charity draws come from their own stream so donor sampling never shifts the exchange stream
    charity_rng = np.random.default_rng([config.seed, 1]) if config.random_donors else None
    return WorldState(tick=0, money=money, rng=rng, charity_rng=charity_rng)


def _exchange(world: WorldState) -> tuple[int, int]:
    moved, bottom, top = _kernels.exchange_gap(world.money, world.rng, world.bottom_count, world.top_count)
    world.last_moved = moved
    world.tick += 1
    return bottom, top


def exchange_tick(world: WorldState) -> WorldState:
    """Run one exchange round in place, append the end-of-tick gap, return ``world``."""
    bottom, top = _exchange(world)
    world.gap_history.append(world.tick, bottom, top, bottom - top)
    return world


def step(world: WorldState, config: SimConfig) -> WorldState:
    bottom, top = _exchange(world)
    world.gap_history.append(world.tick, bottom, top, bottom - top)
    _maybe_intervene(world, config)
    return world


def _maybe_intervene(world: WorldState, config: SimConfig) -> None:
    # acts on the history entry of the tick just exchanged
    h = world.gap_history
    if config.strategy is None or h.pre_gap[-1] > config.critical_threshold:
        return
    snapshot = partition_deciles(world.money)
    record = apply_strategy(world.money, snapshot, config.strategy, tick=world.tick, rng=world.charity_rng)
    world.charity_ledger.add(record)
    bottom, top = gap_parts(world.money)
    h.bottom50[-1], h.top10[-1], h.gap[-1] = bottom, top, bottom - top
    h.intervened[-1] = 1


@dataclass
class RunResult:
    config: SimConfig
    final_money: np.ndarray
    gap_history: GapHistory
    charity_ledger: CharityLedger
    snapshots: dict[int, dict]
    first_critical_tick: Optional[int]
    return_periods: int

    def gap_parts_at(self, tick: int) -> tuple[int, int]:
        """(bottom50, top10) at the end of ``tick``."""
        if tick == 0:
            return self.snapshots[0]["bottom50_money"], self.snapshots[0]["top10_money"]
        i = tick - self.gap_history.tick[0]
        return self.gap_history.bottom50[i], self.gap_history.top10[i]

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "final_money": self.final_money.tolist(),
            "gap_history": self.gap_history.to_dict(),
            "charity_ledger": self.charity_ledger.to_dict(),
            "snapshots": [self.snapshots[t] for t in sorted(self.snapshots)],
            "first_critical_tick": self.first_critical_tick,
            "return_periods": self.return_periods,
        }

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunResult":
        return cls(
            config=SimConfig.from_dict(data["config"]),
            final_money=np.asarray(data["final_money"], dtype=np.int64),
            gap_history=GapHistory.from_dict(data["gap_history"]),
            charity_ledger=CharityLedger.from_dict(data["charity_ledger"]),
            snapshots={s["tick"]: s for s in data["snapshots"]},
            first_critical_tick=data["first_critical_tick"],
            return_periods=data["return_periods"],
        )

    @classmethod
    def from_json(cls, text: str) -> "RunResult":
        return cls.from_dict(json.loads(text))


def _snapshot(world: WorldState) -> dict:
    record = snapshot_record(world.tick, world.money)
    record["bottom50_money"], record["top10_money"] = gap_parts(world.money)
    return record


def _advance(world: WorldState, config: SimConfig, n_ticks: int) -> None:
    """Equivalent to ``n_ticks`` calls of :func:`step`, with the exchange loop compiled."""
    bottoms = np.empty(n_ticks, dtype=np.int64)
    tops = np.empty(n_ticks, dtype=np.int64)
    h = world.gap_history
    while n_ticks > 0:
        done = _kernels.run_span(
            world.money, world.rng, world.bottom_count, world.top_count, n_ticks,
            config.critical_threshold, config.strategy is not None, bottoms, tops,
        )
        b = bottoms[:done].tolist()
        t = tops[:done].tolist()
        g = [x - y for x, y in zip(b, t)]
        h.tick.extend(range(world.tick + 1, world.tick + done + 1))
        h.bottom50.extend(b)
        h.top10.extend(t)
        h.gap.extend(g)
        h.pre_gap.extend(g)
        h.intervened.extend([0] * done)
        world.tick += done
        n_ticks -= done
        _maybe_intervene(world, config)


def run(config: SimConfig) -> RunResult:
    from .experiment import count_return_periods

    world = init_world(config)
    snapshots = {}
    if 0 in config.snapshot_ticks:
        snapshots[0] = _snapshot(world)
    for target in config.snapshot_ticks:
        if target > world.tick:
            _advance(world, config, target - world.tick)
            snapshots[target] = _snapshot(world)
    if world.tick < config.max_ticks:
        _advance(world, config, config.max_ticks - world.tick)

    threshold = config.critical_threshold
    h = world.gap_history
    first = next((i for i, g in enumerate(h.pre_gap) if g <= threshold), None)
    return RunResult(
        config=config,
        final_money=world.money.copy(),
        gap_history=h,
        charity_ledger=world.charity_ledger,
        snapshots=snapshots,
        first_critical_tick=None if first is None else h.tick[first],
        return_periods=count_return_periods(h.pre_gap, threshold, first, h.intervened),
    )
