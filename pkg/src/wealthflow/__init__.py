"""Agent-based closed money-exchange economy with sadaqah redistribution strategies."""

from .charity import StrategyA, StrategyB, StrategyC, parse_strategy
from .engine import CANONICAL_SEEDS, RunResult, SimConfig, init_world, run, step
from .errors import ConfigError, DegenerateInputError, MetricDomainError
from .experiment import BatchReport, count_return_periods, run_batch

__all__ = [
    "BatchReport",
    "CANONICAL_SEEDS",
    "ConfigError",
    "DegenerateInputError",
    "MetricDomainError",
    "RunResult",
    "SimConfig",
    "StrategyA",
    "StrategyB",
    "StrategyC",
    "count_return_periods",
    "init_world",
    "parse_strategy",
    "run",
    "run_batch",
    "step",
]
