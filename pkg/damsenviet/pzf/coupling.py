"""Pathwise couplings of two forcing processes on one graph.

A low process runs exactly as :func:`~damsenviet.pzf.forcing.run_process`
would with the same seed. A high process shares its randomness: a pair
forced in the low process is forced in the high one too, an unforced
shared pair gets a top-up with probability ``(q - p) / (1 - p)``, and a
pair only the high process can use is drawn fresh with probability ``q``.
Every high-process pair is therefore forced with probability ``q``, and the
low blue set stays inside the high one.
"""
from __future__ import annotations
from typing import (
    Any,
    Optional,
    Iterable,
    Tuple,
    List,
    Dict,
)
from dataclasses import dataclass
import csv
import json
import logging
import math
import os
import numpy as np
from typeguard import typechecked
from .forcing import ForcingRule, ProcessState, probabilistic_step, row_entries
from .graph import Graph
from .utils import (
    expect,
    derive_seed,
    make_rng,
    trial_stream,
    topup_stream,
)

__all__ = [
    "CoupledRun",
    "EventEstimate",
    "coupled_run_subset",
    "coupled_run_alternative",
    "estimate_force_event_probability",
    "write_coupled_runs",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoupledRun:
    """Blue-count trajectories of a coupled pair and the containment verdict.

    ``first_violation`` is the first round with a low blue vertex missing
    from the high process; ``validity_violation`` is set when the high
    process was ever given a smaller probability than the low one.
    """

    kind: str
    seed: int
    low_trajectory: Tuple[int, ...]
    high_trajectory: Tuple[int, ...]
    contained: bool
    first_violation: Optional[int]
    validity_violation: bool

    def to_json(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "low_trajectory": list(self.low_trajectory),
            "high_trajectory": list(self.high_trajectory),
            "contained": self.contained,
            "first_violation": self.first_violation,
            "validity_violation": self.validity_violation,
        }

    def verdict_row(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "contained": int(self.contained),
            "first_violation": "" if self.first_violation is None else self.first_violation,
            "validity_violation": int(self.validity_violation),
            "low_rounds": len(self.low_trajectory) - 1,
            "high_rounds": len(self.high_trajectory) - 1,
        }


def _candidates(g: Graph, state: ProcessState) -> np.ndarray:
    positions = row_entries(g, np.flatnonzero(state.blue))
    return positions[~state.blue[g.indices[positions]]]


def _probabilities(
    g: Graph, state: ProcessState, rule: ForcingRule, positions: np.ndarray
) -> np.ndarray:
    sources = g.edge_sources[positions]
    closed = state.blue_neighbor_count[sources] + 1.0
    degrees = g.degree[sources].astype(np.float64)
    return rule.edge_probabilities(closed, degrees, state.round)


def coupled_step(
    g: Graph,
    low: ProcessState,
    high: ProcessState,
    low_rule: ForcingRule,
    high_rule: ForcingRule,
    shared: np.random.Generator,
    topup: np.random.Generator,
) -> Tuple[ProcessState, ProcessState]:
    """Advances both processes one round on shared randomness."""
    low_positions = _candidates(g, low)
    low_probability = _probabilities(g, low, low_rule, low_positions)
    low_forced = shared.random(len(low_positions)) < low_probability

    high_positions = _candidates(g, high)
    high_probability = _probabilities(g, high, high_rule, high_positions)
    draws = topup.random(len(high_positions))
    if len(low_positions) == 0:
        is_shared = np.zeros(len(high_positions), dtype=bool)
        base = np.zeros(len(high_positions))
        copied = is_shared
    else:
        # both candidate arrays ascend, so shared pairs are found by bisection
        index = np.searchsorted(low_positions, high_positions)
        clipped = np.minimum(index, len(low_positions) - 1)
        is_shared = (index < len(low_positions)) & (
            low_positions[clipped] == high_positions
        )
        base = np.where(is_shared, low_probability[clipped], 0.0)
        copied = is_shared & low_forced[clipped]
    below = high_probability < base
    with np.errstate(divide="ignore", invalid="ignore"):
        extra = np.where(base < 1.0, (high_probability - base) / (1.0 - base), 0.0)
    extra = np.clip(extra, 0.0, 1.0)
    high_forced = np.where(is_shared, copied | (draws < extra), draws < high_probability)
    violation = bool(np.any(below & is_shared))
    if high_rule.is_active(high.round) and len(high_positions) > 0:
        sources = g.edge_sources[high_positions]
        violation |= bool(np.any(high_rule.d_lower > g.degree[sources]))
    low_new = np.unique(g.indices[low_positions[low_forced]]).astype(np.int64)
    high_new = np.unique(g.indices[high_positions[high_forced]]).astype(np.int64)
    return low.advanced(g, low_new), high.advanced(g, high_new, violation)


def _coupled_run(
    kind: str,
    g: Graph,
    low_start: Iterable[int],
    high_start: Iterable[int],
    low_rule: ForcingRule,
    high_rule: ForcingRule,
    rounds: int,
    seed: int,
) -> CoupledRun:
    low = ProcessState.initial(g, low_start)
    high = ProcessState.initial(g, high_start)
    shared = make_rng(derive_seed(seed, trial_stream))
    topup = make_rng(derive_seed(seed, topup_stream))
    first_violation = None if not np.any(low.blue & ~high.blue) else 0
    while low.round < rounds and (low.blue_count < g.n or high.blue_count < g.n):
        low, high = coupled_step(g, low, high, low_rule, high_rule, shared, topup)
        if first_violation is None and np.any(low.blue & ~high.blue):
            first_violation = low.round
    if first_violation is not None:
        logger.warning("%s coupling lost containment at round %d", kind, first_violation)
    return CoupledRun(
        kind=kind,
        seed=seed,
        low_trajectory=low.blue_count_trajectory,
        high_trajectory=high.blue_count_trajectory,
        contained=first_violation is None,
        first_violation=first_violation,
        validity_violation=high.coupling_violation,
    )


@typechecked
def coupled_run_subset(
    g: Graph, s1: Iterable[int], s2: Iterable[int], rounds: int, seed: int
) -> CoupledRun:
    """Couples standard processes started from ``s1 ⊆ s2``.

    :param g: the graph
    :type g: Graph
    :param s1: low start set, nonempty
    :type s1: Iterable[int]
    :param s2: high start set, containing s1
    :type s2: Iterable[int]
    :param rounds: rounds to run
    :type rounds: int
    :param seed: the pair's seed
    :type seed: int
    :return: the coupled run
    :rtype: CoupledRun
    """
    s1 = frozenset(int(v) for v in s1)
    s2 = frozenset(int(v) for v in s2)
    expect("s1", sorted(s1), f"be a subset of s2 {sorted(s2)}", lambda s: s1 <= s2)
    expect("rounds", rounds, "be non-negative", lambda r: r >= 0)
    rule = ForcingRule.standard()
    return _coupled_run("subset", g, s1, s2, rule, rule, rounds, seed)


@typechecked
def coupled_run_alternative(
    g: Graph, start: Iterable[int], rule: ForcingRule, rounds: int, seed: int
) -> CoupledRun:
    """Couples the standard process with an alternative one from one start.

    :param g: the graph
    :type g: Graph
    :param start: the common start set
    :type start: Iterable[int]
    :param rule: an alternative rule
    :type rule: ForcingRule
    :param rounds: rounds to run
    :type rounds: int
    :param seed: the pair's seed
    :type seed: int
    :return: the coupled run, standard process low
    :rtype: CoupledRun
    """
    expect("rule", rule, "be an alternative rule", lambda r: r.variant == "alternative")
    expect("rounds", rounds, "be non-negative", lambda r: r >= 0)
    start = frozenset(int(v) for v in start)
    return _coupled_run(
        "alternative", g, start, start, ForcingRule.standard(), rule, rounds, seed
    )


@dataclass(frozen=True)
class EventEstimate:
    successes: int
    trials: int

    @property
    def estimate(self) -> float:
        return self.successes / self.trials

    @property
    def standard_error(self) -> float:
        estimate = self.estimate
        return math.sqrt(estimate * (1.0 - estimate) / self.trials)

    def to_json(self) -> Dict[str, Any]:
        return {
            "successes": self.successes,
            "trials": self.trials,
            "estimate": self.estimate,
            "standard_error": self.standard_error,
        }


@typechecked
def estimate_force_event_probability(
    g: Graph,
    start: Iterable[int],
    target: Iterable[int],
    rounds: int,
    trials: int,
    seed: int,
) -> EventEstimate:
    """Estimates the chance that ``target`` is blue after ``rounds`` rounds.

    Trial ``k`` runs the standard process with seed ``derive_seed(seed, k)``.

    :param g: the graph
    :type g: Graph
    :param start: start set
    :type start: Iterable[int]
    :param target: vertices that must all be blue
    :type target: Iterable[int]
    :param rounds: rounds allowed
    :type rounds: int
    :param trials: number of trials
    :type trials: int
    :param seed: master seed
    :type seed: int
    :return: the estimate with its binomial standard error
    :rtype: EventEstimate
    """
    expect("trials", trials, "be at least 1", lambda t: t >= 1)
    expect("rounds", rounds, "be non-negative", lambda r: r >= 0)
    start = frozenset(int(v) for v in start)
    target = np.fromiter((int(v) for v in target), dtype=np.int64)
    rule = ForcingRule.standard()
    initial = ProcessState.initial(g, start)
    if np.all(initial.blue[target]):
        return EventEstimate(trials, trials)
    successes = 0
    for k in range(trials):
        state = initial
        rng = make_rng(derive_seed(derive_seed(seed, k), trial_stream))
        while state.round < rounds and not np.all(state.blue[target]):
            state = probabilistic_step(g, state, rule, rng)
        successes += bool(np.all(state.blue[target]))
    return EventEstimate(successes, trials)


def write_coupled_runs(runs: List[CoupledRun], out_dir: str, stem: str) -> Tuple[str, str]:
    """Writes ``<stem>.jsonl`` with one run per line and ``<stem>_verdicts.csv``.

    :return: the two paths
    """
    os.makedirs(out_dir, exist_ok=True)
    jsonl_path = os.path.join(out_dir, f"{stem}.jsonl")
    csv_path = os.path.join(out_dir, f"{stem}_verdicts.csv")
    with open(jsonl_path, "w") as file:
        for run in runs:
            file.write(json.dumps(run.to_json(), separators=(",", ":")) + "\n")
    with open(csv_path, "w", newline="") as file:
        fields = list(CoupledRun.verdict_row(runs[0]).keys()) if runs else ["kind"]
        writer = csv.DictWriter(file, fieldnames=fields)
        writer.writeheader()
        for run in runs:
            writer.writerow(run.verdict_row())
    logger.info("wrote %d coupled runs to %s", len(runs), jsonl_path)
    return jsonl_path, csv_path
