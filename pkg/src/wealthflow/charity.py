"""
Decile bookkeeping, the critical-stage test and the three sadaqah allocation
strategies.

Strategies act on a plain ``int64`` money array indexed by agent id and
mutate it in place. Every function returns a :class:`TransferRecord` whose
donor outflow equals recipient inflow.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from ._kernels import tail_sums
from .errors import ConfigError


@dataclass(frozen=True)
class StrategyA:
    """Richest agent gives one unit to the poorest agent."""

    tag = "A"

    def to_dict(self) -> dict:
        return {"tag": "A"}


@dataclass(frozen=True)
class StrategyB:
    """``c``% of decile 10 give one unit each, spread over ``d``% of the bottom half."""

    c: float = 100
    d: float = 20
    tag = "B"

    def __post_init__(self):
        _check_percents(c=self.c, d=self.d)

    def to_dict(self) -> dict:
        return {"tag": "B", **asdict(self)}


@dataclass(frozen=True)
class StrategyC:
    """Deciles 10, 9, 8 (``k``, ``p``, ``v``%) fund deciles 1, 2, 3 (``x``, ``y``, ``z``%) channel by channel."""

    k: float = 100
    p: float = 60
    v: float = 40
    x: float = 100
    y: float = 60
    z: float = 40
    tag = "C"

    def __post_init__(self):
        _check_percents(**asdict(self))

    def to_dict(self) -> dict:
        return {"tag": "C", **asdict(self)}


StrategySpec = Union[StrategyA, StrategyB, StrategyC]

_STRATEGIES = {"A": StrategyA, "B": StrategyB, "C": StrategyC}


def _check_percents(**percents):
    for name, val in percents.items():
        if not 0 <= val <= 100:
            raise ConfigError(f"percent {name}={val} outside [0, 100]")


def strategy_from_dict(data: Optional[dict]) -> Optional[StrategySpec]:
    if data is None:
        return None
    data = dict(data)
    tag = data.pop("tag")
    return _STRATEGIES[tag](**data)


def parse_strategy(name: str, params: Union[str, dict, None] = None) -> StrategySpec:
    """Build a strategy from a tag and ``"c=100,d=20"``-style parameters.

    Omitted parameters keep their canonical defaults.
    """
    tag = name.strip().upper()
    if tag not in _STRATEGIES:
        raise ConfigError(f"unknown strategy {name!r}; expected A, B or C")
    if isinstance(params, str):
        parsed = {}
        for item in filter(None, (p.strip() for p in params.split(","))):
            key, sep, val = item.partition("=")
            if not sep:
                raise ConfigError(f"malformed strategy parameter {item!r}")
            try:
                parsed[key.strip()] = float(val)
            except ValueError:
                raise ConfigError(f"non-numeric strategy parameter {item!r}") from None
        params = parsed
    params = dict(params or {})
    cls = _STRATEGIES[tag]
    allowed = set(cls.__dataclass_fields__)
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"strategy {tag} takes no parameter(s) {sorted(unknown)}")
    params = {k: int(v) if float(v).is_integer() else v for k, v in params.items()}
    return cls(**params)


def decile_sizes(n: int) -> list[int]:
    """Ten group sizes; the ``n % 10`` leftover agents go one each to the richest deciles."""
    if n < 10:
        raise ConfigError(f"need at least 10 agents for deciles, got {n}")
    base, extra = divmod(n, 10)
    return [base + (1 if i >= 10 - extra else 0) for i in range(10)]


def tail_counts(n: int) -> tuple[int, int]:
    """(size of deciles 1-5, size of decile 10)."""
    sizes = decile_sizes(n)
    return sum(sizes[:5]), sizes[9]


def gap_parts(money: np.ndarray) -> tuple[int, int]:
    """(bottom-50% money, top-10% money) without building a full snapshot."""
    bottom_count, top_count = tail_counts(money.shape[0])
    bottom, top = tail_sums(money, bottom_count, top_count)
    return int(bottom), int(top)


@dataclass
class DecileSnapshot:
    ordering: np.ndarray  # agent ids ascending by (money, id)
    decile_members: list[np.ndarray]  # decile 1 (poorest) first
    decile_totals: np.ndarray
    bottom50_money: int
    top10_money: int

    @property
    def gap(self) -> int:
        return self.bottom50_money - self.top10_money

    def decile_of(self, agent_id: int) -> int:
        """1-based decile index of an agent."""
        for i, members in enumerate(self.decile_members):
            if agent_id in members:
                return i + 1
        raise KeyError(agent_id)


def partition_deciles(money) -> DecileSnapshot:
    money = np.asarray(money, dtype=np.int64)
    sizes = decile_sizes(money.shape[0])
    # stable sort keeps ties in id order
    ordering = np.argsort(money, kind="stable")
    bounds = np.cumsum([0] + sizes)
    members = [ordering[bounds[i]:bounds[i + 1]] for i in range(10)]
    totals = np.array([int(money[m].sum()) for m in members], dtype=np.int64)
    return DecileSnapshot(
        ordering=ordering,
        decile_members=members,
        decile_totals=totals,
        bottom50_money=int(totals[:5].sum()),
        top10_money=int(totals[9]),
    )


def is_critical(snapshot_or_gap, threshold: int = 0) -> bool:
    gap = getattr(snapshot_or_gap, "gap", snapshot_or_gap)
    return gap <= threshold


@dataclass
class TransferRecord:
    tick: int
    strategy: str
    donors: list[int] = field(default_factory=list)
    donor_amounts: list[int] = field(default_factory=list)
    recipients: list[int] = field(default_factory=list)
    recipient_amounts: list[int] = field(default_factory=list)
    gap_before: Optional[int] = None
    gap_after: Optional[int] = None

    @property
    def units_moved(self) -> int:
        return sum(self.donor_amounts)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["units_moved"] = self.units_moved
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "TransferRecord":
        data = {k: v for k, v in data.items() if k != "units_moved"}
        return cls(**data)


def percent_count(percent: float, size: int) -> int:
    """Round-half-up of ``percent``% of ``size``, in exact arithmetic."""
    return math.floor(Fraction(percent) * size / 100 + Fraction(1, 2))


def check_strategy(strategy: StrategySpec, n: int) -> None:
    """Reject percent settings that would collect units with nobody to receive them at population ``n``."""
    sizes = decile_sizes(n)
    if isinstance(strategy, StrategyB):
        channels = [(strategy.c, sizes[9], strategy.d, sum(sizes[:5]))]
    elif isinstance(strategy, StrategyC):
        s = strategy
        channels = [(s.k, sizes[9], s.x, sizes[0]), (s.p, sizes[8], s.y, sizes[1]), (s.v, sizes[7], s.z, sizes[2])]
    else:
        return
    for donor_pct, donor_size, recip_pct, recip_size in channels:
        if percent_count(donor_pct, donor_size) > 0 and percent_count(recip_pct, recip_size) == 0:
            raise ConfigError(
                f"strategy {strategy.tag}: {recip_pct}% of {recip_size} agents rounds to no recipients "
                f"while {donor_pct}% of {donor_size} donate"
            )


def _channel(money, donor_pool, n_donors, recipient_pool, n_recipients, rng, record):
    # pools are in ascending (money, id) order
    if n_donors == 0:
        return
    if rng is None:
        donors = donor_pool[len(donor_pool) - n_donors:][::-1]
    else:
        donors = rng.choice(donor_pool, size=n_donors, replace=False)
    givers = [int(a) for a in donors if money[a] >= 1]
    units = len(givers)
    if units == 0:
        return
    if n_recipients == 0:
        raise ConfigError(f"{units} unit(s) collected but no recipients selected")
    recipients = recipient_pool[:n_recipients]
    base, extra = divmod(units, n_recipients)
    amounts = [base + (1 if i < extra else 0) for i in range(n_recipients)]
    for a in givers:
        money[a] -= 1
    for r, amt in zip(recipients, amounts):
        if amt:
            money[r] += amt
            record.recipients.append(int(r))
            record.recipient_amounts.append(amt)
    record.donors.extend(givers)
    record.donor_amounts.extend([1] * units)


def _finish(money, snapshot, record):
    record.gap_before = snapshot.gap
    bottom, top = gap_parts(money)
    record.gap_after = bottom - top
    return record


def apply_strategy_a(money: np.ndarray, snapshot: DecileSnapshot, *, tick: int = 0) -> TransferRecord:
    richest = int(snapshot.ordering[-1])
    poorest = int(snapshot.ordering[0])
    if money[richest] < 1:
        raise RuntimeError("richest agent holds no money; total money must be zero")
    record = TransferRecord(tick=tick, strategy="A")
    money[richest] -= 1
    money[poorest] += 1
    record.donors.append(richest)
    record.donor_amounts.append(1)
    record.recipients.append(poorest)
    record.recipient_amounts.append(1)
    return _finish(money, snapshot, record)


def apply_strategy_b(
    money: np.ndarray,
    snapshot: DecileSnapshot,
    c: float,
    d: float,
    *,
    tick: int = 0,
    rng: Optional[np.random.Generator] = None,
) -> TransferRecord:
    """Pass ``rng`` to pick decile-10 donors uniformly instead of richest-first."""
    _check_percents(c=c, d=d)
    top = snapshot.decile_members[9]
    bottom_half = np.concatenate(snapshot.decile_members[:5])
    record = TransferRecord(tick=tick, strategy="B")
    _channel(
        money,
        top,
        percent_count(c, len(top)),
        bottom_half,
        percent_count(d, len(bottom_half)),
        rng,
        record,
    )
    return _finish(money, snapshot, record)


def apply_strategy_c(
    money: np.ndarray,
    snapshot: DecileSnapshot,
    k: float,
    p: float,
    v: float,
    x: float,
    y: float,
    z: float,
    *,
    tick: int = 0,
    rng: Optional[np.random.Generator] = None,
) -> TransferRecord:
    _check_percents(k=k, p=p, v=v, x=x, y=y, z=z)
    deciles = snapshot.decile_members
    record = TransferRecord(tick=tick, strategy="C")
    for donor_decile, donor_pct, recip_decile, recip_pct in ((9, k, 0, x), (8, p, 1, y), (7, v, 2, z)):
        donors = deciles[donor_decile]
        recipients = deciles[recip_decile]
        _channel(
            money,
            donors,
            percent_count(donor_pct, len(donors)),
            recipients,
            percent_count(recip_pct, len(recipients)),
            rng,
            record,
        )
    return _finish(money, snapshot, record)


def apply_strategy(
    money: np.ndarray,
    snapshot: DecileSnapshot,
    strategy: StrategySpec,
    *,
    tick: int = 0,
    rng: Optional[np.random.Generator] = None,
) -> TransferRecord:
    if isinstance(strategy, StrategyA):
        return apply_strategy_a(money, snapshot, tick=tick)
    if isinstance(strategy, StrategyB):
        return apply_strategy_b(money, snapshot, strategy.c, strategy.d, tick=tick, rng=rng)
    if isinstance(strategy, StrategyC):
        s = strategy
        return apply_strategy_c(money, snapshot, s.k, s.p, s.v, s.x, s.y, s.z, tick=tick, rng=rng)
    raise TypeError(f"not a strategy: {strategy!r}")
