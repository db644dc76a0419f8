from __future__ import annotations
from typing import (
    Any,
    Optional,
    Iterable,
    Tuple,
    List,
    Dict,
    FrozenSet,
)
from fractions import Fraction
import logging
import math
from typeguard import typechecked
from .exceptions import InvariantViolationException
from .graph import Graph, is_connected
from .utils import (
    autorepr,
    expect,
    fraction_str,
    to_bitmask,
    from_bitmask,
)

__all__ = [
    "TransitionDistribution",
    "ExpectationTable",
    "transition_distribution",
    "expected_propagation_time",
    "expectation_table",
    "is_monotone",
    "min_expected_propagation_time",
    "expected_minimum_propagation_time",
    "survival_function",
    "monotonicity_violations",
    "exact_size_cap",
]

logger = logging.getLogger(__name__)

# largest vertex count the exact solver accepts by default
exact_size_cap = 12


class TransitionDistribution:
    """Exact one-round law of the successor blue set.

    Successors of probability zero are omitted.
    """

    def __init__(self, base: FrozenSet[int], entries: Dict[FrozenSet[int], Fraction]):
        """Instantiates a TransitionDistribution.

        :param base: the blue set Z
        :type base: FrozenSet[int]
        :param entries: successor blue set -> probability
        :type entries: Dict[FrozenSet[int], Fraction]
        :raises InvariantViolationException: probabilities do not sum to 1 or
            a successor does not contain the base
        """
        total = sum(entries.values(), Fraction(0))
        if total != 1:
            raise InvariantViolationException(
                f"transition probabilities sum to {total}", entries
            )
        if not all(base <= successor for successor in entries):
            raise InvariantViolationException("successor lost a blue vertex", entries)
        self.__base = frozenset(base)
        self.__entries = dict(entries)

    def __str__(self) -> str:
        return repr(self)

    def __repr__(self) -> str:
        return autorepr(self, {"base": sorted(self.base), "outcomes": len(self)})

    def __len__(self) -> int:
        return len(self.__entries)

    def __iter__(self):
        return iter(self.__entries)

    def __getitem__(self, successor: Iterable[int]) -> Fraction:
        return self.__entries.get(frozenset(successor), Fraction(0))

    @property
    def base(self) -> FrozenSet[int]:
        """Gets the blue set the round starts from.

        :return: Z
        :rtype: FrozenSet[int]
        """
        return self.__base

    @property
    def entries(self) -> Dict[FrozenSet[int], Fraction]:
        return dict(self.__entries)

    @property
    def added(self) -> Dict[FrozenSet[int], Fraction]:
        """Gets the law of the newly blue set ``Z' \\ Z``."""
        return {
            successor - self.base: probability
            for successor, probability in self.__entries.items()
        }

    @property
    def stay_probability(self) -> Fraction:
        return self[self.base]

    def to_json(self) -> Dict[str, Any]:
        return {
            "base": sorted(self.base),
            "entries": [
                {"added": sorted(added), "probability": fraction_str(probability)}
                for added, probability in sorted(
                    self.added.items(), key=lambda item: sorted(item[0])
                )
            ],
        }


class ExpectationTable:
    """Exact expected remaining rounds, keyed by blue set."""

    def __init__(self, n: int, values: Dict[FrozenSet[int], Fraction]):
        full = frozenset(range(n))
        if values.get(full, Fraction(0)) != 0:
            raise InvariantViolationException("completed state has nonzero value", values)
        if any(value < 0 for value in values.values()):
            raise InvariantViolationException("negative expectation", values)
        self.__n = n
        self.__values = dict(values)
        self.__values[full] = Fraction(0)

    def __str__(self) -> str:
        return repr(self)

    def __repr__(self) -> str:
        return autorepr(self, {"n": self.n, "states": len(self)})

    def __len__(self) -> int:
        return len(self.__values)

    def __iter__(self):
        return iter(self.__values)

    def __contains__(self, blue: Iterable[int]) -> bool:
        return frozenset(blue) in self.__values

    def __getitem__(self, blue: Iterable[int]) -> Fraction:
        return self.__values[frozenset(blue)]

    @property
    def n(self) -> int:
        return self.__n

    def items(self):
        return self.__values.items()

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "values": [
                {"blue": sorted(blue), "expected": fraction_str(value)}
                for blue, value in sorted(
                    self.__values.items(), key=lambda item: (len(item[0]), sorted(item[0]))
                )
            ],
        }


class _Solver:
    """Memoised absorbing-chain solve over bitmask blue sets."""

    def __init__(self, g: Graph):
        self.n = g.n
        self.full = (1 << g.n) - 1
        self.adjacency = [to_bitmask(int(v) for v in g.neighbors(u)) for u in range(g.n)]
        self.degree = [int(d) for d in g.degree]
        self.memo: Dict[int, Fraction] = {self.full: Fraction(0)}

    def force_probabilities(self, blue: int) -> List[Tuple[int, Fraction]]:
        """``(v, r(v))`` for each white ``v`` with a blue neighbor."""
        closed = {}
        for u in range(self.n):
            if blue >> u & 1:
                closed[u] = Fraction(
                    1 + bin(self.adjacency[u] & blue).count("1"), self.degree[u]
                )
        probabilities = []
        for v in range(self.n):
            if blue >> v & 1 or not self.adjacency[v] & blue:
                continue
            stay = Fraction(1)
            for u in from_bitmask(self.adjacency[v] & blue):
                stay *= 1 - closed[u]
            probabilities.append((v, 1 - stay))
        return probabilities

    def transitions(self, blue: int) -> Dict[int, Fraction]:
        outcomes = {blue: Fraction(1)}
        for v, r in self.force_probabilities(blue):
            following: Dict[int, Fraction] = {}
            for mask, probability in outcomes.items():
                if r < 1:
                    following[mask] = probability * (1 - r)
                if r > 0:
                    following[mask | 1 << v] = probability * r
            outcomes = following
        return outcomes

    def expected(self, blue: int) -> Fraction:
        if blue in self.memo:
            return self.memo[blue]
        outcomes = self.transitions(blue)
        stay = outcomes.pop(blue, Fraction(0))
        if stay >= 1:
            raise InvariantViolationException(
                "blue set cannot grow", sorted(from_bitmask(blue))
            )
        total = Fraction(1)
        for successor, probability in outcomes.items():
            total += probability * self.expected(successor)
        value = total / (1 - stay)
        self.memo[blue] = value
        return value


def _check_solvable(g: Graph, size_cap: Optional[int]) -> None:
    cap = exact_size_cap if size_cap is None else size_cap
    expect("n", g.n, f"be at most the exact size cap {cap}", lambda n: n <= cap)
    expect("graph", g, "be connected", is_connected)


def _start_mask(g: Graph, start: Iterable[int]) -> int:
    start = sorted(set(int(v) for v in start))
    expect("start", start, "be nonempty", lambda s: len(s) > 0)
    expect(
        "start", start, f"lie within 0..{g.n - 1}", lambda s: all(0 <= v < g.n for v in s)
    )
    return to_bitmask(start)


@typechecked
def transition_distribution(g: Graph, blue: Iterable[int]) -> TransitionDistribution:
    """Computes the exact successor law of one probabilistic forcing round.

    Each white ``v`` independently turns blue with probability
    ``r(v) = 1 - prod_{u in N(v) ∩ Z} (1 - |N[u] ∩ Z| / deg(u))``; whites
    without blue neighbors have ``r(v) = 0`` and are not enumerated.

    :param g: a connected graph
    :type g: Graph
    :param blue: the blue set, nonempty and not all of V
    :type blue: Iterable[int]
    :raises IllegalValueException: blue empty or complete, g disconnected
    :return: the distribution
    :rtype: TransitionDistribution
    """
    mask = _start_mask(g, blue)
    expect("blue", sorted(from_bitmask(mask)), "leave a white vertex", lambda s: len(s) < g.n)
    expect("graph", g, "be connected", is_connected)
    outcomes = _Solver(g).transitions(mask)
    return TransitionDistribution(
        from_bitmask(mask),
        {from_bitmask(successor): probability for successor, probability in outcomes.items()},
    )


@typechecked
def expected_propagation_time(
    g: Graph, start: Iterable[int], size_cap: Optional[int] = None
) -> Fraction:
    """Solves ``E[pt(G, Z)]`` exactly.

    Recurses over blue sets reachable from ``start`` with
    ``E[Z] = (1 + sum_{Z' != Z} P(Z -> Z') E[Z']) / (1 - P(Z -> Z))`` and
    ``E[V] = 0``.

    :param g: a connected graph
    :type g: Graph
    :param start: nonempty start set
    :type start: Iterable[int]
    :param size_cap: largest admissible n, defaults to :data:`exact_size_cap`
    :type size_cap: Optional[int]
    :return: the expected propagation time
    :rtype: Fraction
    """
    _check_solvable(g, size_cap)
    mask = _start_mask(g, start)
    value = _Solver(g).expected(mask)
    logger.debug("E[pt] from %s = %s", sorted(from_bitmask(mask)), value)
    return value


@typechecked
def min_expected_propagation_time(
    g: Graph, size_cap: Optional[int] = None
) -> Tuple[int, Fraction]:
    """Minimises the expected propagation time over singleton starts.

    :param g: a connected graph
    :type g: Graph
    :param size_cap: largest admissible n
    :type size_cap: Optional[int]
    :return: the lowest minimising vertex and its value
    :rtype: Tuple[int, Fraction]
    """
    _check_solvable(g, size_cap)
    solver = _Solver(g)
    best: Optional[Tuple[int, Fraction]] = None
    for v in range(g.n):
        value = solver.expected(1 << v)
        if best is None or value < best[1]:
            best = (v, value)
    return best


@typechecked
def expectation_table(
    g: Graph,
    start: Optional[Iterable[int]] = None,
    size_cap: Optional[int] = None,
) -> ExpectationTable:
    """Tabulates expected remaining rounds.

    With a start set the table covers the blue sets reachable from it;
    without one it covers every nonempty blue set.

    :param g: a connected graph
    :type g: Graph
    :param start: optional start set
    :type start: Optional[Iterable[int]]
    :param size_cap: largest admissible n
    :type size_cap: Optional[int]
    :return: the table
    :rtype: ExpectationTable
    """
    _check_solvable(g, size_cap)
    solver = _Solver(g)
    if start is not None:
        solver.expected(_start_mask(g, start))
    else:
        for mask in range(1, solver.full + 1):
            solver.expected(mask)
    return ExpectationTable(
        g.n, {from_bitmask(mask): value for mask, value in solver.memo.items()}
    )


@typechecked
def survival_function(
    g: Graph, start: Iterable[int], rounds: int, size_cap: Optional[int] = None
) -> Tuple[Fraction, ...]:
    """Computes ``P(pt > t)`` for ``t = 0..rounds`` by pushing the exact law
    of the blue set forward one round at a time.

    :param g: a connected graph
    :type g: Graph
    :param start: nonempty start set
    :type start: Iterable[int]
    :param rounds: last round to report
    :type rounds: int
    :param size_cap: largest admissible n
    :type size_cap: Optional[int]
    :return: ``rounds + 1`` tail probabilities, non-increasing
    :rtype: Tuple[Fraction, ...]
    """
    _check_solvable(g, size_cap)
    expect("rounds", rounds, "be non-negative", lambda r: r >= 0)
    solver = _Solver(g)
    law = {_start_mask(g, start): Fraction(1)}
    cache: Dict[int, Dict[int, Fraction]] = {}
    survival = []
    for _ in range(rounds + 1):
        done = law.pop(solver.full, Fraction(0))
        survival.append(1 - done if not survival else survival[-1] - done)
        following: Dict[int, Fraction] = {}
        for mask, probability in law.items():
            if mask not in cache:
                cache[mask] = solver.transitions(mask)
            for successor, step in cache[mask].items():
                following[successor] = following.get(successor, Fraction(0)) + probability * step
        law = following
    return tuple(survival)


@typechecked
def expected_minimum_propagation_time(
    g: Graph,
    tolerance: float = 1e-12,
    max_rounds: int = 1000,
    size_cap: Optional[int] = None,
) -> float:
    """Computes ``E[min_v pt(G, v)]`` over independent singleton runs.

    Sums ``prod_v P(pt(G, v) > t)`` over ``t`` until a term drops below
    ``tolerance``. This never exceeds :func:`min_expected_propagation_time`.

    :param g: a connected graph
    :type g: Graph
    :param tolerance: stop once a term falls below this
    :type tolerance: float
    :param max_rounds: hard horizon
    :type max_rounds: int
    :param size_cap: largest admissible n
    :type size_cap: Optional[int]
    :raises InvariantViolationException: the horizon was reached first
    :return: the expectation
    :rtype: float
    """
    _check_solvable(g, size_cap)
    expect("max_rounds", max_rounds, "be at least 1", lambda r: r >= 1)
    horizon = min(8, max_rounds)
    while True:
        tails = [survival_function(g, [v], horizon, size_cap) for v in range(g.n)]
        terms = [math.prod(float(tail[t]) for tail in tails) for t in range(horizon + 1)]
        if terms[-1] < tolerance:
            return math.fsum(terms)
        if horizon >= max_rounds:
            raise InvariantViolationException(
                f"minimum propagation time tail above {tolerance} at round {horizon}", terms
            )
        horizon = min(2 * horizon, max_rounds)


def monotonicity_violations(
    table: ExpectationTable,
) -> List[Tuple[FrozenSet[int], FrozenSet[int]]]:
    """Pairs ``Z ⊊ Z'`` of tabulated sets with ``E[Z'] > E[Z]``."""
    keyed = [(to_bitmask(blue), value, blue) for blue, value in table.items()]
    violations = []
    for small, small_value, small_set in keyed:
        for large, large_value, large_set in keyed:
            if small != large and small & large == small and large_value > small_value:
                violations.append((small_set, large_set))
    return violations


def is_monotone(table: ExpectationTable) -> bool:
    """Determines whether more blue never means more expected rounds.

    :param table: an expectation table
    :type table: ExpectationTable
    :return: whether ``E[Z'] <= E[Z]`` for all tabulated ``Z ⊆ Z'``
    :rtype: bool
    """
    violations = monotonicity_violations(table)
    if violations:
        logger.warning("%d monotonicity violations, first %s", len(violations), violations[0])
    return not violations
