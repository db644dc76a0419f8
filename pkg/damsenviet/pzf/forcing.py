from __future__ import annotations
from typing import (
    Any,
    Optional,
    Iterable,
    Iterator,
    Mapping,
    Tuple,
    List,
    Dict,
    FrozenSet,
)
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import json
import logging
import math
import numpy as np
from typeguard import typechecked
from .exceptions import DeserializeException, InvariantViolationException
from .graph import Graph, GraphSpec, vertex_mask
from .utils import (
    autorepr,
    expect,
    derive_seed,
    make_rng,
    trial_stream,
)

__all__ = [
    "ForcingRule",
    "ProcessState",
    "Status",
    "TrialRecord",
    "force_probability",
    "probabilistic_step",
    "classical_step",
    "run_process",
    "run_with_shadow",
    "default_max_rounds",
]

logger = logging.getLogger(__name__)


class ForcingRule:
    """Class storing the per-edge forcing law of a round.

    The standard rule forces each edge ``uv`` (``u`` blue, ``v`` white) with
    probability ``|N[u] ∩ Z| / deg(u)``. The alternative rule replaces it by
    ``min{|N[u] ∩ Z| / d_lower, 1}`` on the rounds it is active for; a round
    is identified by the number of rounds completed before it.
    """

    def __init__(
        self,
        variant: str = "standard",
        d_lower: Optional[float] = None,
        active_rounds: Optional[Iterable[int]] = None,
    ):
        """Instantiates a ForcingRule.

        :param variant: "standard" or "alternative"
        :type variant: str
        :param d_lower: the alternative divisor, required for alternative
        :type d_lower: Optional[float]
        :param active_rounds: round indices the alternative law applies to,
            None for every round
        :type active_rounds: Optional[Iterable[int]]
        """
        expect(
            "variant",
            variant,
            "be standard or alternative",
            lambda v: v in ("standard", "alternative"),
        )
        if variant == "standard":
            expect("d_lower", d_lower, "be unset for standard", lambda d: d is None)
            expect(
                "active_rounds",
                active_rounds,
                "be unset for standard",
                lambda r: r is None,
            )
        else:
            expect(
                "d_lower", d_lower, "be positive", lambda d: d is not None and d > 0
            )
        self.__variant = variant
        self.__d_lower = None if d_lower is None else float(d_lower)
        self.__active_rounds = (
            None if active_rounds is None else frozenset(int(i) for i in active_rounds)
        )

    @classmethod
    def standard(cls) -> ForcingRule:
        return cls("standard")

    @classmethod
    def alternative(
        cls, d_lower: float, active_rounds: Optional[Iterable[int]] = None
    ) -> ForcingRule:
        return cls("alternative", d_lower, active_rounds)

    @classmethod
    def from_omega(
        cls,
        n: int,
        p: float,
        omega: float,
        active_rounds: Optional[Iterable[int]] = None,
    ) -> ForcingRule:
        """Alternative rule with ``d_lower = (1 - 1/omega)(n - 1)p``.

        :param n: vertex count
        :type n: int
        :param p: edge probability
        :type p: float
        :param omega: slack parameter, greater than 1
        :type omega: float
        :return: the rule
        :rtype: ForcingRule
        """
        expect("omega", omega, "be greater than 1", lambda w: w > 1)
        return cls.alternative((1.0 - 1.0 / omega) * (n - 1) * p, active_rounds)

    def __str__(self) -> str:
        return repr(self)

    def __repr__(self) -> str:
        return autorepr(
            self,
            {
                "variant": self.variant,
                "d_lower": self.d_lower,
                "active_rounds": self.active_rounds,
            },
        )

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, ForcingRule):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash((self.variant, self.d_lower, self.active_rounds))

    @property
    def variant(self) -> str:
        """Gets the rule variant.

        :return: "standard" or "alternative"
        :rtype: str
        """
        return self.__variant

    @property
    def d_lower(self) -> Optional[float]:
        """Gets the alternative divisor.

        :return: divisor, None for standard
        :rtype: Optional[float]
        """
        return self.__d_lower

    @property
    def active_rounds(self) -> Optional[FrozenSet[int]]:
        """Gets the alternative index set.

        :return: round indices, None meaning every round
        :rtype: Optional[FrozenSet[int]]
        """
        return self.__active_rounds

    def is_active(self, round_index: int) -> bool:
        """Determines whether the alternative law governs the round that
        follows ``round_index`` completed rounds.

        :param round_index: completed rounds
        :type round_index: int
        :return: whether the alternative law applies
        :rtype: bool
        """
        if self.variant == "standard":
            return False
        return self.active_rounds is None or round_index in self.active_rounds

    def edge_probabilities(
        self,
        closed_counts: np.ndarray,
        degrees: np.ndarray,
        round_index: int,
    ) -> np.ndarray:
        """Per-source forcing probability for sources with the given closed
        blue counts ``|N[u] ∩ Z|`` and degrees."""
        if self.is_active(round_index):
            return np.minimum(closed_counts / self.d_lower, 1.0)
        return closed_counts / degrees

    def to_json(self) -> Dict[str, Any]:
        if self.variant == "standard":
            return {"variant": "standard"}
        return {
            "variant": "alternative",
            "d_lower": self.d_lower,
            "active_rounds": None
            if self.active_rounds is None
            else sorted(self.active_rounds),
        }

    @classmethod
    def from_json(cls, rule_json: Dict[str, Any]) -> ForcingRule:
        if not isinstance(rule_json, dict) or "variant" not in rule_json:
            raise DeserializeException("rule needs a variant", rule_json)
        if rule_json["variant"] == "standard":
            return cls.standard()
        return cls.alternative(rule_json.get("d_lower"), rule_json.get("active_rounds"))


class ProcessState:
    """Class storing the blue set of a running process and its history.

    ``newly_blue`` is ``Y_i``, the vertices turned blue by the latest round
    (the start set at round 0); ``blue_count_trajectory[i]`` is
    ``b_i = |Y_{<=i}|``.
    """

    def __init__(
        self,
        blue: np.ndarray,
        round: int,
        blue_count_trajectory: Tuple[int, ...],
        newly_blue: np.ndarray,
        blue_neighbor_count: np.ndarray,
        blue_edges: int,
        blue_edge_trajectory: Optional[Tuple[int, ...]] = None,
        max_white_degree_trajectory: Optional[Tuple[int, ...]] = None,
        coupling_violation: bool = False,
    ):
        for array in (blue, newly_blue, blue_neighbor_count):
            array.setflags(write=False)
        self.__blue = blue
        self.__round = round
        self.__blue_count_trajectory = blue_count_trajectory
        self.__newly_blue = newly_blue
        self.__blue_neighbor_count = blue_neighbor_count
        self.__blue_edges = blue_edges
        self.__blue_edge_trajectory = blue_edge_trajectory
        self.__max_white_degree_trajectory = max_white_degree_trajectory
        self.__coupling_violation = coupling_violation

    @classmethod
    def initial(
        cls,
        g: Graph,
        start: Iterable[int],
        record_blue_edges: bool = False,
        record_white_degree: bool = False,
    ) -> ProcessState:
        """Builds the round-0 state with blue set ``start``.

        :param g: the graph
        :type g: Graph
        :param start: initial blue vertices, nonempty
        :type start: Iterable[int]
        :param record_blue_edges: record ``e(Y_{<=i})`` every round
        :type record_blue_edges: bool
        :param record_white_degree: record ``max deg_{Y_{i-1}}(v)`` over white
            ``v`` every round
        :type record_white_degree: bool
        :return: the state
        :rtype: ProcessState
        """
        start = sorted(set(start))
        expect("start", start, "be nonempty", lambda s: len(s) > 0)
        blue = vertex_mask(g, start)
        counts = np.bincount(
            g.indices[blue[g.edge_sources]], minlength=g.n
        ).astype(np.int64)
        blue_edges = int(counts[blue].sum()) // 2
        return cls(
            blue=blue,
            round=0,
            blue_count_trajectory=(int(blue.sum()),),
            newly_blue=np.flatnonzero(blue),
            blue_neighbor_count=counts,
            blue_edges=blue_edges,
            blue_edge_trajectory=(blue_edges,) if record_blue_edges else None,
            max_white_degree_trajectory=() if record_white_degree else None,
        )

    def __str__(self) -> str:
        return repr(self)

    def __repr__(self) -> str:
        return autorepr(
            self,
            {
                "round": self.round,
                "blue_count": self.blue_count,
                "newly_blue": len(self.newly_blue),
            },
        )

    @property
    def blue(self) -> np.ndarray:
        """Gets the read-only blue membership vector.

        :return: blue mask
        :rtype: np.ndarray
        """
        return self.__blue

    @property
    def blue_set(self) -> FrozenSet[int]:
        return frozenset(int(v) for v in np.flatnonzero(self.__blue))

    @property
    def blue_count(self) -> int:
        return self.__blue_count_trajectory[-1]

    @property
    def round(self) -> int:
        """Gets completed rounds.

        :return: round counter
        :rtype: int
        """
        return self.__round

    @property
    def blue_count_trajectory(self) -> Tuple[int, ...]:
        return self.__blue_count_trajectory

    @property
    def newly_blue(self) -> np.ndarray:
        """Gets ``Y_i`` as an ascending vertex array.

        :return: newly blue vertices
        :rtype: np.ndarray
        """
        return self.__newly_blue

    @property
    def blue_neighbor_count(self) -> np.ndarray:
        """Gets ``|N(u) ∩ Z|`` for every vertex ``u``.

        :return: blue neighbor counts
        :rtype: np.ndarray
        """
        return self.__blue_neighbor_count

    @property
    def blue_edges(self) -> int:
        """Gets ``e(Y_{<=i})``, the edges inside the blue set."""
        return self.__blue_edges

    @property
    def blue_edge_trajectory(self) -> Optional[Tuple[int, ...]]:
        return self.__blue_edge_trajectory

    @property
    def max_white_degree_trajectory(self) -> Optional[Tuple[int, ...]]:
        """Gets, for each completed round ``i >= 1``, the largest
        ``deg_{Y_{i-1}}(v)`` over vertices ``v`` white before round ``i``."""
        return self.__max_white_degree_trajectory

    @property
    def coupling_violation(self) -> bool:
        """Gets whether an alternative round ever used a probability below
        the standard one."""
        return self.__coupling_violation

    def advanced(
        self,
        g: Graph,
        newly_blue: np.ndarray,
        coupling_violation: bool = False,
    ) -> ProcessState:
        """Returns the successor state after ``newly_blue`` turned blue."""
        blue = self.blue.copy()
        blue[newly_blue] = True
        counts = self.blue_neighbor_count.copy()
        positions = row_entries(g, newly_blue)
        np.add.at(counts, g.indices[positions], 1)
        old_inner = int(self.blue_neighbor_count[newly_blue].sum())
        new_inner = int(counts[newly_blue].sum())
        blue_edges = self.blue_edges + old_inner + (new_inner - old_inner) // 2
        edge_trajectory = self.blue_edge_trajectory
        if edge_trajectory is not None:
            edge_trajectory = edge_trajectory + (blue_edges,)
        degree_trajectory = self.max_white_degree_trajectory
        if degree_trajectory is not None:
            degree_trajectory = degree_trajectory + (self._max_white_degree(g),)
        return ProcessState(
            blue=blue,
            round=self.round + 1,
            blue_count_trajectory=self.blue_count_trajectory
            + (self.blue_count + len(newly_blue),),
            newly_blue=newly_blue,
            blue_neighbor_count=counts,
            blue_edges=blue_edges,
            blue_edge_trajectory=edge_trajectory,
            max_white_degree_trajectory=degree_trajectory,
            coupling_violation=self.coupling_violation or coupling_violation,
        )

    def _max_white_degree(self, g: Graph) -> int:
        positions = row_entries(g, self.newly_blue)
        targets = g.indices[positions]
        targets = targets[~self.blue[targets]]
        if len(targets) == 0:
            return 0
        return int(np.bincount(targets).max())


def row_entries(g: Graph, vertices: np.ndarray) -> np.ndarray:
    """Positions in ``g.indices`` of the rows of ``vertices``, in order."""
    vertices = np.asarray(vertices, dtype=np.int64)
    starts = g.indptr[vertices]
    lengths = g.degree[vertices]
    total = int(lengths.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths)
    return offsets + np.arange(total, dtype=np.int64)


@typechecked
def force_probability(g: Graph, blue: Iterable[int], u: int) -> Fraction:
    """Computes ``|N[u] ∩ Z| / deg(u)``, the chance that blue ``u`` forces
    any given white neighbor this round.

    :param g: the graph
    :type g: Graph
    :param blue: the blue set Z
    :type blue: Iterable[int]
    :param u: a blue vertex
    :type u: int
    :raises IllegalValueException: u is white or isolated
    :return: the forcing probability, in (0, 1]
    :rtype: Fraction
    """
    mask = vertex_mask(g, blue)
    expect("u", u, "be blue", lambda u: 0 <= u < g.n and bool(mask[u]))
    expect("u", u, "have at least one neighbor", lambda u: g.degree[u] >= 1)
    closed = 1 + int(mask[g.neighbors(u)].sum())
    # a fully blue closed neighborhood has nothing left to force
    return min(Fraction(closed, int(g.degree[u])), Fraction(1))


@typechecked
def probabilistic_step(
    g: Graph,
    state: ProcessState,
    rule: ForcingRule,
    rng: np.random.Generator,
) -> ProcessState:
    """Performs one synchronised round of probabilistic zero forcing.

    Every pair (blue ``u``, white neighbor ``v``) is forced independently with
    the rule's probability for ``u``; ``v`` turns blue when at least one of
    its pairs is forced. One uniform draw is consumed per pair, ``u``
    ascending then ``v`` ascending.

    :param g: the graph
    :type g: Graph
    :param state: current state
    :type state: ProcessState
    :param rule: forcing rule
    :type rule: ForcingRule
    :param rng: the trial's generator
    :type rng: np.random.Generator
    :return: the successor state
    :rtype: ProcessState
    """
    blue = state.blue
    positions = row_entries(g, np.flatnonzero(blue))
    positions = positions[~blue[g.indices[positions]]]
    sources = g.edge_sources[positions]
    closed = state.blue_neighbor_count[sources] + 1.0
    degrees = g.degree[sources].astype(np.float64)
    probabilities = rule.edge_probabilities(closed, degrees, state.round)
    violation = False
    if rule.is_active(state.round) and len(sources) > 0:
        violation = bool(np.any(rule.d_lower > degrees))
        if violation:
            logger.warning(
                "round %d: d_lower %.4g exceeds the degree of a forcing vertex",
                state.round,
                rule.d_lower,
            )
    forced = rng.random(len(positions)) < probabilities
    newly_blue = np.unique(g.indices[positions[forced]]).astype(np.int64)
    logger.debug(
        "round %d: %d candidate pairs, %d new blue",
        state.round + 1,
        len(positions),
        len(newly_blue),
    )
    return state.advanced(g, newly_blue, violation)


def classical_mask(g: Graph, blue: np.ndarray) -> np.ndarray:
    white_entry = ~blue[g.indices]
    white_count = np.bincount(g.edge_sources[white_entry], minlength=g.n)
    forcing = blue & (white_count == 1)
    successor = blue.copy()
    successor[g.indices[forcing[g.edge_sources] & white_entry]] = True
    return successor


@typechecked
def classical_step(g: Graph, blue: Iterable[int]) -> FrozenSet[int]:
    """Applies the zero forcing color change rule to every blue vertex at once.

    :param g: the graph
    :type g: Graph
    :param blue: the blue set
    :type blue: Iterable[int]
    :return: blue plus every vertex that is the only white neighbor of a
        blue vertex
    :rtype: FrozenSet[int]
    """
    successor = classical_mask(g, vertex_mask(g, blue))
    return frozenset(int(v) for v in np.flatnonzero(successor))


class Status(str, Enum):
    forced = "forced"
    round_cap_reached = "round_cap_reached"


@dataclass(frozen=True)
class TrialRecord:
    """One realised run of a forcing process."""

    seed: int
    trial: int
    n: int
    p: Optional[float]
    family: Optional[str]
    start: Tuple[int, ...]
    rule: ForcingRule
    status: Status
    pt: Optional[int]
    b_trajectory: Tuple[int, ...]
    e_blue_trajectory: Optional[Tuple[int, ...]] = None
    crossings: Dict[str, Optional[int]] = field(default_factory=dict)
    coupling_violation: bool = False
    max_white_degree_trajectory: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        forced = self.b_trajectory[-1] == self.n
        if forced != (self.status == Status.forced):
            raise InvariantViolationException("status disagrees with final blue set", self)
        if forced and self.pt != self.b_trajectory.index(self.n):
            raise InvariantViolationException("pt is not the first full round", self)

    @property
    def newly_blue_counts(self) -> Tuple[int, ...]:
        """Gets ``y_i = b_i - b_{i-1}`` for ``i >= 1``."""
        b = self.b_trajectory
        return tuple(b[i] - b[i - 1] for i in range(1, len(b)))

    def to_json(self) -> Dict[str, Any]:
        record_json: Dict[str, Any] = {
            "seed": self.seed,
            "trial": self.trial,
            "n": self.n,
            "p": self.p,
            "family": self.family,
            "start": list(self.start),
            "rule": self.rule.to_json(),
            "status": self.status.value,
            "pt": self.pt,
            "b_trajectory": list(self.b_trajectory),
        }
        if self.e_blue_trajectory is not None:
            record_json["e_blue_trajectory"] = list(self.e_blue_trajectory)
        record_json["crossings"] = dict(self.crossings)
        record_json["coupling_violation"] = self.coupling_violation
        if self.max_white_degree_trajectory is not None:
            record_json["max_white_degree_trajectory"] = list(
                self.max_white_degree_trajectory
            )
        return record_json

    def to_jsonl(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, record_json: Dict[str, Any]) -> TrialRecord:
        """Deserialises one record.

        :raises DeserializeException: a required field is missing
        """
        required = ("seed", "trial", "n", "start", "rule", "status", "pt", "b_trajectory")
        missing = [key for key in required if key not in record_json]
        if missing:
            raise DeserializeException(f"record is missing {missing}", record_json)
        optional_tuple = lambda key: (
            None if record_json.get(key) is None else tuple(record_json[key])
        )
        return cls(
            seed=record_json["seed"],
            trial=record_json["trial"],
            n=record_json["n"],
            p=record_json.get("p"),
            family=record_json.get("family"),
            start=tuple(record_json["start"]),
            rule=ForcingRule.from_json(record_json["rule"]),
            status=Status(record_json["status"]),
            pt=record_json["pt"],
            b_trajectory=tuple(record_json["b_trajectory"]),
            e_blue_trajectory=optional_tuple("e_blue_trajectory"),
            crossings=dict(record_json.get("crossings", {})),
            coupling_violation=bool(record_json.get("coupling_violation", False)),
            max_white_degree_trajectory=optional_tuple("max_white_degree_trajectory"),
        )

    @classmethod
    def from_jsonl(cls, line: str) -> TrialRecord:
        try:
            return cls.from_json(json.loads(line))
        except json.JSONDecodeError as error:
            raise DeserializeException(str(error), line)


def default_max_rounds(n: int, p: float) -> int:
    """``64 (log2 log2 n + log2(1/p) + 1)``, far above any predicted time.

    :param n: vertex count
    :type n: int
    :param p: edge probability or graph density
    :type p: float
    :return: round cap
    :rtype: int
    """
    loglog = math.log2(math.log2(n)) if n > 2 else 0.0
    inverse = math.log2(1.0 / p) if 0.0 < p < 1.0 else 0.0
    return int(math.ceil(64 * (max(loglog, 0.0) + inverse + 1)))


def density(g: Graph) -> float:
    if g.n < 2:
        return 1.0
    return 2.0 * g.m / (g.n * (g.n - 1))


def crossing_rounds(
    trajectory: Tuple[int, ...], thresholds: Optional[Any]
) -> Dict[str, Optional[int]]:
    """First round whose blue count is at or above each threshold.

    ``thresholds`` is a mapping name -> blue count, or any object with a
    ``crossing_targets()`` method returning one.
    """
    if thresholds is None:
        return {}
    if isinstance(thresholds, Mapping):
        targets = dict(thresholds)
    else:
        targets = thresholds.crossing_targets()
    crossings: Dict[str, Optional[int]] = {}
    for name, target in targets.items():
        crossings[name] = next(
            (i for i, b in enumerate(trajectory) if b >= target), None
        )
    return crossings


def iterate_rounds(
    g: Graph,
    state: ProcessState,
    rule: ForcingRule,
    rng: np.random.Generator,
    max_rounds: int,
) -> Iterator[ProcessState]:
    """Yields successive states until the graph is blue or the cap is hit."""
    while state.blue_count < g.n and state.round < max_rounds:
        state = probabilistic_step(g, state, rule, rng)
        yield state


def _record(
    g: Graph,
    state: ProcessState,
    start: Tuple[int, ...],
    rule: ForcingRule,
    seed: int,
    trial: int,
    graph_spec: Optional[GraphSpec],
    thresholds: Optional[Any],
) -> TrialRecord:
    forced = state.blue_count == g.n
    if not forced:
        logger.warning(
            "trial %d hit the round cap at %d rounds with %d/%d blue",
            trial,
            state.round,
            state.blue_count,
            g.n,
        )
    return TrialRecord(
        seed=seed,
        trial=trial,
        n=g.n,
        p=None if graph_spec is None else graph_spec.p,
        family=None if graph_spec is None else graph_spec.family,
        start=start,
        rule=rule,
        status=Status.forced if forced else Status.round_cap_reached,
        pt=state.round if forced else None,
        b_trajectory=state.blue_count_trajectory,
        e_blue_trajectory=state.blue_edge_trajectory,
        crossings=crossing_rounds(state.blue_count_trajectory, thresholds),
        coupling_violation=state.coupling_violation,
        max_white_degree_trajectory=state.max_white_degree_trajectory,
    )


@typechecked
def run_process(
    g: Graph,
    start: Iterable[int],
    rule: ForcingRule,
    seed: int,
    max_rounds: Optional[int] = None,
    thresholds: Optional[Any] = None,
    trial: int = 0,
    graph_spec: Optional[GraphSpec] = None,
    record_blue_edges: bool = False,
    record_white_degree: bool = False,
) -> TrialRecord:
    """Runs a forcing process until every vertex is blue or the cap is hit.

    :param g: the graph
    :type g: Graph
    :param start: initial blue set, nonempty
    :type start: Iterable[int]
    :param rule: forcing rule
    :type rule: ForcingRule
    :param seed: the trial seed
    :type seed: int
    :param max_rounds: round cap, defaults to :func:`default_max_rounds`
    :type max_rounds: Optional[int]
    :param thresholds: blue-count thresholds whose first crossing is recorded
    :type thresholds: Optional[Any]
    :param trial: trial index stored in the record
    :type trial: int
    :param graph_spec: spec stored in the record
    :type graph_spec: Optional[GraphSpec]
    :param record_blue_edges: record ``e(Y_{<=i})``
    :type record_blue_edges: bool
    :param record_white_degree: record the largest white degree into ``Y_{i-1}``
    :type record_white_degree: bool
    :return: the trial record
    :rtype: TrialRecord
    """
    start = tuple(sorted(set(int(v) for v in start)))
    if max_rounds is None:
        max_rounds = default_max_rounds(g.n, density(g))
    expect("max_rounds", max_rounds, "be at least 1", lambda r: r >= 1)
    state = ProcessState.initial(g, start, record_blue_edges, record_white_degree)
    rng = make_rng(derive_seed(seed, trial_stream))
    for state in iterate_rounds(g, state, rule, rng, max_rounds):
        pass
    return _record(g, state, start, rule, seed, trial, graph_spec, thresholds)


@typechecked
def run_with_shadow(
    g: Graph,
    start: Iterable[int],
    seed: int,
    max_rounds: Optional[int] = None,
) -> Tuple[TrialRecord, Tuple[FrozenSet[int], ...], bool]:
    """Runs the standard process with the classical sequence in lockstep.

    :param g: the graph
    :type g: Graph
    :param start: initial blue set
    :type start: Iterable[int]
    :param seed: the trial seed
    :type seed: int
    :param max_rounds: round cap
    :type max_rounds: Optional[int]
    :return: the record, the classical sets ``Z_0, Z_1, ...`` for every
        executed round, and whether ``Z_t`` stayed inside the blue set
    :rtype: Tuple[TrialRecord, Tuple[FrozenSet[int], ...], bool]
    """
    start = tuple(sorted(set(int(v) for v in start)))
    if max_rounds is None:
        max_rounds = default_max_rounds(g.n, density(g))
    expect("max_rounds", max_rounds, "be at least 1", lambda r: r >= 1)
    rule = ForcingRule.standard()
    state = ProcessState.initial(g, start)
    classical = state.blue.copy()
    trajectory: List[FrozenSet[int]] = [frozenset(start)]
    contained = True
    rng = make_rng(derive_seed(seed, trial_stream))
    for state in iterate_rounds(g, state, rule, rng, max_rounds):
        classical = classical_mask(g, classical)
        trajectory.append(frozenset(int(v) for v in np.flatnonzero(classical)))
        if np.any(classical & ~state.blue):
            contained = False
    if not contained:
        logger.warning("classical forcing escaped the probabilistic blue set")
    record = _record(g, state, start, rule, seed, 0, None, None)
    return record, tuple(trajectory), contained
