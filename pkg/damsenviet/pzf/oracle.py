"""Exhaustive rational oracles for one alternative forcing round on G(n, p).

Both oracles expose the random graph around a start set ``Y0`` together
with the first round of the alternative process: every pair inside ``Y0``
and every pair from ``Y0`` to the outside is enumerated, and each pair
``(u, v)`` leaving ``Y0`` is in one of three states: absent, present but
not forced by ``u``, or present and forced by ``u``. A blue ``u`` forces
with probability ``q_u = min{(1 + deg_{Y0}(u)) / d_lower, 1}``.
"""
from __future__ import annotations
from typing import (
    Any,
    Union,
    Iterable,
    Iterator,
    Tuple,
    List,
    Dict,
    FrozenSet,
)
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb
import logging
from typeguard import typechecked
from .utils import expect, fraction_str

__all__ = [
    "OracleReport",
    "verify_lemma_edge_probability",
    "verify_edge_count_domination",
    "edge_probability_size_cap",
    "domination_size_cap",
]

logger = logging.getLogger(__name__)

edge_probability_size_cap = 6
domination_size_cap = 5

Rational = Union[Fraction, int, str]

_absent, _kept, _forced = 0, 1, 2


@dataclass(frozen=True)
class OracleReport:
    """Outcome of an exhaustive oracle.

    For the edge probability oracle ``worst`` is the largest conditional
    edge probability found; for the domination oracle it is the smallest
    gap ``P(|S| + Bin >= k) - P(e(Y0, S) >= k)``.
    """

    kind: str
    n: int
    p: Fraction
    y0: Tuple[int, ...]
    d_lower: Fraction
    events: int
    checks: int
    worst: Fraction
    passed: bool
    witness: Dict[str, Any] = field(default_factory=dict)
    agreements: Dict[str, bool] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        def encode(value: Any) -> Any:
            if isinstance(value, Fraction):
                return fraction_str(value)
            if isinstance(value, (list, tuple, frozenset, set)):
                return [encode(item) for item in (sorted(value) if isinstance(value, (set, frozenset)) else value)]
            if isinstance(value, dict):
                return {key: encode(item) for key, item in value.items()}
            return value

        return {
            "kind": self.kind,
            "n": self.n,
            "p": fraction_str(self.p),
            "y0": list(self.y0),
            "d_lower": fraction_str(self.d_lower),
            "events": self.events,
            "checks": self.checks,
            "worst": fraction_str(self.worst),
            "passed": self.passed,
            "witness": encode(self.witness),
            "agreements": dict(self.agreements),
        }


def _validate(
    n: int, p: Rational, y0: Iterable[int], d_lower: Rational, cap: int
) -> Tuple[Fraction, Tuple[int, ...], Fraction]:
    expect("n", n, f"be within 2..{cap} for exhaustive enumeration", lambda n: 2 <= n <= cap)
    p = Fraction(p)
    expect("p", p, "lie strictly between 0 and 1", lambda p: 0 < p < 1)
    y0 = tuple(sorted(set(int(v) for v in y0)))
    expect(
        "y0",
        y0,
        f"be a nonempty proper subset of 0..{n - 1}",
        lambda s: 0 < len(s) < n and all(0 <= v < n for v in s),
    )
    d_lower = Fraction(d_lower)
    expect("d_lower", d_lower, "be positive", lambda d: d > 0)
    return p, y0, d_lower


def _configurations(
    n: int, p: Fraction, y0: Tuple[int, ...], d_lower: Fraction
) -> Iterator[Tuple[FrozenSet[Tuple[int, int]], Dict[int, Fraction], List[Tuple[int, int]], Iterator]]:
    """Yields, per edge configuration inside ``y0``, its edges, the force
    probabilities it induces and a generator of weighted pair states."""
    outside = [v for v in range(n) if v not in y0]
    inside_pairs = list(combinations(y0, 2))
    cross_pairs = [(u, v) for u in y0 for v in outside]
    for present in product((False, True), repeat=len(inside_pairs)):
        edges = frozenset(pair for pair, on in zip(inside_pairs, present) if on)
        inside_weight = Fraction(1)
        for on in present:
            inside_weight *= p if on else 1 - p
        force = {}
        for u in y0:
            closed = 1 + sum(1 for pair in edges if u in pair)
            force[u] = min(Fraction(closed) / d_lower, Fraction(1))
        state_weight = {
            u: (1 - p, p * (1 - force[u]), p * force[u]) for u in y0
        }

        def outcomes(inside_weight=inside_weight, state_weight=state_weight):
            for states in product((_absent, _kept, _forced), repeat=len(cross_pairs)):
                weight = inside_weight
                for (u, _), state in zip(cross_pairs, states):
                    weight *= state_weight[u][state]
                    if weight == 0:
                        break
                if weight != 0:
                    yield states, weight

        yield edges, force, cross_pairs, outcomes()


@typechecked
def verify_lemma_edge_probability(
    n: int, p: Rational, y0: Iterable[int], d_lower: Rational
) -> OracleReport:
    """Checks that forcing outcomes never raise the chance of an edge.

    Conditions on the edges inside ``Y0`` and on the sets ``S_u`` of
    vertices each ``u`` in ``Y0`` forced, and for every ``u`` and every
    ``v`` outside ``Y0 ∪ S_u`` computes ``P(uv present | event)`` exactly.
    The maximum must not exceed ``p``. The report also states whether every
    value equals ``p(1 - q_u) / (1 - p q_u)`` and whether it equals
    ``p(1 - q_u)(1 - p q_u)``.

    :param n: vertex count, at most :data:`edge_probability_size_cap`
    :type n: int
    :param p: edge probability, strictly between 0 and 1
    :type p: Rational
    :param y0: start set, nonempty and proper
    :type y0: Iterable[int]
    :param d_lower: alternative divisor
    :type d_lower: Rational
    :return: the report; ``worst`` is the maximal conditional probability
    :rtype: OracleReport
    """
    p, y0, d_lower = _validate(n, p, y0, d_lower, edge_probability_size_cap)
    events = 0
    checks = 0
    worst = Fraction(0)
    witness: Dict[str, Any] = {}
    quotient_agrees = True
    product_agrees = True
    for edges, force, cross_pairs, outcomes in _configurations(n, p, y0, d_lower):
        event_weight: Dict[Tuple, Fraction] = defaultdict(Fraction)
        edge_weight: Dict[Tuple, Dict[Tuple[int, int], Fraction]] = defaultdict(
            lambda: defaultdict(Fraction)
        )
        for states, weight in outcomes:
            forced = {u: set() for u in y0}
            for (u, v), state in zip(cross_pairs, states):
                if state == _forced:
                    forced[u].add(v)
            key = tuple(frozenset(forced[u]) for u in y0)
            event_weight[key] += weight
            for (u, v), state in zip(cross_pairs, states):
                if state == _kept:
                    edge_weight[key][(u, v)] += weight
        for key, weight in event_weight.items():
            events += 1
            sets = dict(zip(y0, key))
            for u, v in cross_pairs:
                if v in sets[u]:
                    continue
                checks += 1
                value = edge_weight[key][(u, v)] / weight
                q = force[u]
                quotient_agrees &= value == p * (1 - q) / (1 - p * q)
                product_agrees &= value == p * (1 - q) * (1 - p * q)
                if value > worst or not witness:
                    worst = max(worst, value)
                    witness = {
                        "inside_edges": sorted(edges),
                        "forced": {str(w): sets[w] for w in y0},
                        "u": u,
                        "v": v,
                        "force_probability": q,
                        "conditional": value,
                    }
    passed = worst <= p
    if not passed:
        logger.warning("edge probability oracle: %s exceeds p = %s", worst, p)
    return OracleReport(
        kind="edge_probability",
        n=n,
        p=p,
        y0=y0,
        d_lower=d_lower,
        events=events,
        checks=checks,
        worst=worst,
        passed=passed,
        witness=witness,
        agreements={"quotient": quotient_agrees, "displayed_product": product_agrees},
    )


def binomial_tail(trials: int, p: Fraction, shift: int, k: int) -> Fraction:
    """``P(shift + Bin(trials, p) >= k)`` exactly."""
    return sum(
        (
            comb(trials, j) * p ** j * (1 - p) ** (trials - j)
            for j in range(max(0, k - shift), trials + 1)
        ),
        Fraction(0),
    )


@typechecked
def verify_edge_count_domination(
    n: int, p: Rational, y0: Iterable[int], d_lower: Rational
) -> OracleReport:
    """Checks ``e(Y0, S)`` is dominated by ``|S| + Bin(|Y0| |S|, p)``.

    ``S`` is the set of vertices turned blue in the round. Each event fixes
    the edges inside ``Y0`` and ``S``; dominance is checked CDF-wise on the
    exact conditional law of ``e(Y0, S)``.

    :param n: vertex count, at most :data:`domination_size_cap`
    :type n: int
    :param p: edge probability
    :type p: Rational
    :param y0: start set
    :type y0: Iterable[int]
    :param d_lower: alternative divisor
    :type d_lower: Rational
    :return: the report; ``worst`` is the smallest tail gap
    :rtype: OracleReport
    """
    p, y0, d_lower = _validate(n, p, y0, d_lower, domination_size_cap)
    events = 0
    checks = 0
    worst = None
    witness: Dict[str, Any] = {}
    for edges, _, cross_pairs, outcomes in _configurations(n, p, y0, d_lower):
        laws: Dict[FrozenSet[int], Dict[int, Fraction]] = defaultdict(
            lambda: defaultdict(Fraction)
        )
        for states, weight in outcomes:
            s = frozenset(v for (_, v), state in zip(cross_pairs, states) if state == _forced)
            count = sum(
                1 for (_, v), state in zip(cross_pairs, states) if state != _absent and v in s
            )
            laws[s][count] += weight
        for s, law in laws.items():
            events += 1
            total = sum(law.values(), Fraction(0))
            trials = len(y0) * len(s)
            for k in range(0, len(s) + trials + 1):
                checks += 1
                tail = sum((w for count, w in law.items() if count >= k), Fraction(0)) / total
                gap = binomial_tail(trials, p, len(s), k) - tail
                if worst is None or gap < worst:
                    worst = gap
                    witness = {"inside_edges": sorted(edges), "s": s, "k": k, "gap": gap}
    passed = worst >= 0
    if not passed:
        logger.warning("domination oracle: tail gap %s below zero", worst)
    return OracleReport(
        kind="edge_count_domination",
        n=n,
        p=p,
        y0=y0,
        d_lower=d_lower,
        events=events,
        checks=checks,
        worst=worst,
        passed=passed,
        witness=witness,
    )
