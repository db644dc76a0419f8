from __future__ import annotations
from typing import (
    Any,
    Optional,
    Tuple,
    List,
    Dict,
)
from dataclasses import dataclass
import logging
import math
from mpmath import mp, mpf
from typeguard import typechecked
from .exceptions import InvariantViolationException
from .forcing import TrialRecord
from .utils import expect, with_precision

__all__ = [
    "BoundPrediction",
    "PhaseThresholds",
    "EtaSequence",
    "DegreeEnvelope",
    "LowerBoundHorizons",
    "RoundAudit",
    "predict_bounds",
    "chernoff_tail",
    "phase_thresholds",
    "phase_upper_estimate",
    "eta_sequence",
    "audit_rounds",
    "lower_bound_horizons",
    "degree_envelope",
    "universal_lower_bound",
    "bounds_precision",
]

logger = logging.getLogger(__name__)

# significant digits used while evaluating closed forms
bounds_precision = 30

# smallest n for which every iterated logarithm used here is positive
min_bound_n = 16


def _log_log(n: int) -> Tuple[mpf, mpf]:
    """Natural ``log log n`` and ``log log log n``."""
    loglog = mp.log(mp.log(n))
    return loglog, mp.log(loglog)


def _log2_log2(n: int) -> mpf:
    return mp.log(mp.log(n, 2), 2)


def _check_n(n: int) -> None:
    expect("n", n, f"be at least {min_bound_n}", lambda n: n >= min_bound_n)


@dataclass(frozen=True)
class BoundPrediction:
    """Upper and lower round predictions for ``G(n, p)`` without slack."""

    n: int
    p: float
    upper: float
    lower: float
    regime: str
    hypothesis_met: bool

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "p": self.p,
            "upper": self.upper,
            "lower": self.lower,
            "regime": self.regime,
            "hypothesis_met": self.hypothesis_met,
        }


@with_precision(bounds_precision)
@typechecked
def predict_bounds(n: int, p: float) -> BoundPrediction:
    """Evaluates ``log2 log2 n + log3(1/p)`` and ``max(log2 log2 n, log4(1/p))``.

    The regime is dense when ``p >= 1 / ln(n)^2`` and sparse otherwise. A
    warning is logged when ``pn <= ln n``.

    :param n: vertex count, at least 16
    :type n: int
    :param p: edge probability in (0, 1]
    :type p: float
    :return: the prediction
    :rtype: BoundPrediction
    """
    _check_n(n)
    expect("p", p, "lie within (0, 1]", lambda p: 0 < p <= 1)
    loglog = _log2_log2(n)
    inverse = 1 / mpf(p)
    upper = loglog + mp.log(inverse, 3)
    lower = max(loglog, mp.log(inverse, 4))
    hypothesis_met = p * n > math.log(n)
    if not hypothesis_met:
        logger.warning("pn = %.4g does not exceed ln n = %.4g", p * n, math.log(n))
    if lower > upper:
        raise InvariantViolationException("lower bound exceeds upper bound", (n, p))
    regime = "dense" if p >= 1 / math.log(n) ** 2 else "sparse"
    return BoundPrediction(n, p, float(upper), float(lower), regime, hypothesis_met)


@with_precision(bounds_precision)
@typechecked
def chernoff_tail(eps: float, mean: float) -> float:
    """Returns ``2 exp(-eps^2 mean / 3)``.

    The value bounds ``P(|X - EX| >= eps EX)`` for sums of independent
    indicators and is not clamped to 1.

    :param eps: relative deviation in (0, 3/2)
    :type eps: float
    :param mean: expectation of X, non-negative
    :type mean: float
    :return: the tail bound, in [0, 2]
    :rtype: float
    """
    expect("eps", eps, "lie within (0, 3/2)", lambda e: 0 < e < 1.5)
    expect("mean", mean, "be non-negative", lambda m: m >= 0)
    return float(min(max(2 * mp.exp(-mpf(eps) ** 2 * mean / 3), 0), 2))


@with_precision(bounds_precision)
@typechecked
def universal_lower_bound(n: int) -> float:
    """Returns ``log2 log2 n``, below which no connected graph finishes in
    expectation; 0 for ``n <= 2``."""
    expect("n", n, "be at least 1", lambda n: n >= 1)
    if n <= 2:
        return 0.0
    return float(max(_log2_log2(n), 0))


@dataclass(frozen=True)
class DegreeEnvelope:
    d: float
    d_lower: float
    d_upper: float


@typechecked
def degree_envelope(n: int, p: float, omega: float) -> DegreeEnvelope:
    """``d = p(n - 1)`` with ``d_lower = (1 - 1/omega) d`` and
    ``d_upper = (1 + 1/omega) d``."""
    expect("omega", omega, "be greater than 1", lambda w: w > 1)
    d = p * (n - 1)
    return DegreeEnvelope(d, (1 - 1 / omega) * d, (1 + 1 / omega) * d)


@dataclass(frozen=True)
class PhaseThresholds:
    """Round budgets and blue-count thresholds of the four growth phases.

    ``t2`` is 0 and ``has_phase2`` False when ``b2 <= b1``. ``t_phase4`` is
    the base of the phase 4 growth estimate, taken as ``b3 p``.
    """

    n: int
    p: float
    omega: float
    d: float
    growth: float
    t1: float
    t2: float
    t3: float
    t4: float
    b1: float
    b2: float
    b3: float
    b4: float
    has_phase2: bool
    t_phase4: float

    @property
    def upper_estimate(self) -> float:
        """Total rounds of the phase argument, two final rounds included."""
        return self.t1 + self.t2 + self.t3 + self.t4 + 2

    def crossing_targets(self) -> Dict[str, float]:
        targets = {"b1": self.b1}
        if self.has_phase2:
            targets["b2"] = self.b2
        targets["b3"] = self.b3
        targets["b4"] = self.b4
        return targets

    def phase4_growth(self, i: int) -> float:
        """Least new-blue count of phase 4 round ``i``,
        ``t^(2^(i-1)) / p * 8^(2 - 2^i)``, computed in logs."""
        expect("i", i, "be at least 1", lambda i: i >= 1)
        exponent = 2 ** (i - 1) * math.log(self.t_phase4) - math.log(self.p)
        exponent += (2 - 2 ** i) * math.log(8)
        return math.exp(min(exponent, 700.0))

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "p": self.p,
            "omega": self.omega,
            "d": self.d,
            "growth": self.growth,
            "t1": self.t1,
            "t2": self.t2,
            "t3": self.t3,
            "t4": self.t4,
            "b1": self.b1,
            "b2": self.b2,
            "b3": self.b3,
            "b4": self.b4,
            "has_phase2": self.has_phase2,
            "t_phase4": self.t_phase4,
            "upper_estimate": self.upper_estimate,
        }


@with_precision(bounds_precision)
@typechecked
def phase_thresholds(n: int, p: float, omega: float) -> PhaseThresholds:
    """Computes the phase thresholds with natural iterated logarithms.

    :param n: vertex count, at least 16
    :type n: int
    :param p: edge probability in (0, 1]
    :type p: float
    :param omega: slack parameter, greater than 1
    :type omega: float
    :raises IllegalValueException: phase 2 is needed but ``3(1 - omega^(-1/4))``
        does not exceed 1
    :return: the thresholds
    :rtype: PhaseThresholds
    """
    _check_n(n)
    expect("p", p, "lie within (0, 1]", lambda p: 0 < p <= 1)
    expect("omega", omega, "be greater than 1", lambda w: w > 1)
    loglog, logloglog = _log_log(n)
    d = mpf(p) * (n - 1)
    t1 = loglog / logloglog
    b1 = t1 * (1 - logloglog / loglog)
    b2 = n / (d * omega)
    growth = 3 * (1 - mpf(omega) ** (-mpf(1) / 4))
    has_phase2 = b2 > b1
    if has_phase2:
        expect("omega", omega, "give phase 2 a growth factor above 1", lambda _: growth > 1)
        t2 = mp.log(b2 / b1, growth)
    else:
        t2 = mpf(0)
    b3 = n * loglog / (d * logloglog ** 2)
    b4 = mp.sqrt(n / (mpf(p) * omega))
    return PhaseThresholds(
        n=n,
        p=p,
        omega=float(omega),
        d=float(d),
        growth=float(growth),
        t1=float(t1),
        t2=float(t2),
        t3=float(t1),
        t4=float(_log2_log2(n)),
        b1=float(b1),
        b2=float(b2),
        b3=float(b3),
        b4=float(b4),
        has_phase2=bool(has_phase2),
        t_phase4=float(b3 * p),
    )


@typechecked
def phase_upper_estimate(n: int, p: float, omega: float) -> float:
    """Returns ``t1 + t2 + t3 + t4 + 2``.

    :param n: vertex count
    :type n: int
    :param p: edge probability
    :type p: float
    :param omega: slack parameter
    :type omega: float
    :return: total rounds of the phase argument
    :rtype: float
    """
    return phase_thresholds(n, p, omega).upper_estimate


@dataclass(frozen=True)
class EtaSequence:
    """Iterates of ``eta_{j+1} = (3/4 + eps/2) eta_j + 3 eps / 2 + 6 r`` with
    ``eps = p^(c1/3)`` and ``r = p^((1 - c2)/2)``.

    ``envelope`` is ``3 eps + 12 r``. The recursion's limit ``fixed_point``
    is about twice that, so the envelope only covers the first iterates;
    ``envelope_violations`` lists the indices it misses.
    """

    p: float
    eps: float
    c1: float
    c2: float
    values: Tuple[float, ...]
    envelope: float
    fixed_point: Optional[float]

    @property
    def ratio(self) -> float:
        return 0.75 + self.eps / 2

    @property
    def envelope_violations(self) -> Tuple[int, ...]:
        return tuple(j for j, eta in enumerate(self.values) if eta > self.envelope)

    @property
    def envelope_holds(self) -> bool:
        return not self.envelope_violations

    @property
    def is_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.values, self.values[1:]))

    def relative_gap(self, j: int = -1) -> Optional[float]:
        """``|eta_j - eta*| / eta*``, None without a fixed point."""
        if self.fixed_point is None:
            return None
        return abs(self.values[j] - self.fixed_point) / self.fixed_point

    def to_json(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "eps": self.eps,
            "c1": self.c1,
            "c2": self.c2,
            "envelope": self.envelope,
            "fixed_point": self.fixed_point,
            "envelope_violations": list(self.envelope_violations),
            "values": list(self.values),
        }


@with_precision(bounds_precision)
@typechecked
def eta_sequence(p: float, c1: float, c2: float, count: int) -> EtaSequence:
    """Iterates the error recursion from ``eta_0 = 0``.

    When ``eps < 1/2`` the iterates increase towards
    ``((3/2) eps + 6 r) / (1/4 - eps/2)``; exceeding that limit raises.

    :param p: edge probability in (0, 1)
    :type p: float
    :param c1: lower exponent in (0, 1)
    :type c1: float
    :param c2: upper exponent in (c1, 1)
    :type c2: float
    :param count: number of iterates after eta_0
    :type count: int
    :raises InvariantViolationException: an iterate exceeds the limit
    :return: the sequence of ``count + 1`` values
    :rtype: EtaSequence
    """
    expect("p", p, "lie within (0, 1)", lambda p: 0 < p < 1)
    expect("c1", c1, "lie within (0, 1)", lambda c: 0 < c < 1)
    expect("c2", c2, f"lie within ({c1}, 1)", lambda c: c1 < c < 1)
    expect("count", count, "be at least 1", lambda c: c >= 1)
    eps = mpf(p) ** (mpf(c1) / 3)
    r = mpf(p) ** ((1 - mpf(c2)) / 2)
    ratio = mpf(3) / 4 + eps / 2
    shift = mpf(3) / 2 * eps + 6 * r
    values = [mpf(0)]
    for _ in range(count):
        values.append(ratio * values[-1] + shift)
    fixed_point = shift / (mpf(1) / 4 - eps / 2) if eps < mpf(1) / 2 else None
    if fixed_point is not None:
        # iterates approach the limit from below
        slack = fixed_point * mpf(10) ** (-bounds_precision + 5)
        overshoot = [j for j, eta in enumerate(values) if eta > fixed_point + slack]
        if overshoot:
            raise InvariantViolationException(
                f"eta_{overshoot[0]} exceeds the fixed point", [float(v) for v in values]
            )
    return EtaSequence(
        p=p,
        eps=float(eps),
        c1=c1,
        c2=c2,
        values=tuple(float(v) for v in values),
        envelope=float(3 * eps + 12 * r),
        fixed_point=None if fixed_point is None else float(fixed_point),
    )


@dataclass(frozen=True)
class LowerBoundHorizons:
    """Start sizes and horizons of the two lower-bound arguments.

    ``dense_horizon`` is None when ``4 omega ln n / p`` reaches ``n^(1/3)``.
    """

    dense_start: float
    dense_horizon: Optional[float]
    sparse_start: float
    sparse_horizon: float
    sparse_stop: float

    def to_json(self) -> Dict[str, Any]:
        return {
            "dense_start": self.dense_start,
            "dense_horizon": self.dense_horizon,
            "sparse_start": self.sparse_start,
            "sparse_horizon": self.sparse_horizon,
            "sparse_stop": self.sparse_stop,
        }


@with_precision(bounds_precision)
@typechecked
def lower_bound_horizons(
    n: int, p: float, omega: float, c1: float, c2: float
) -> LowerBoundHorizons:
    """Evaluates the start sizes, horizons and sparse stopping size.

    :param n: vertex count, at least 16
    :type n: int
    :param p: edge probability in (0, 1)
    :type p: float
    :param omega: slack parameter, greater than 1
    :type omega: float
    :param c1: lower exponent
    :type c1: float
    :param c2: upper exponent, above c1
    :type c2: float
    :return: the horizons
    :rtype: LowerBoundHorizons
    """
    _check_n(n)
    expect("p", p, "lie within (0, 1)", lambda p: 0 < p < 1)
    expect("omega", omega, "be greater than 1", lambda w: w > 1)
    expect("c1", c1, "lie within (0, 1)", lambda c: 0 < c < 1)
    expect("c2", c2, f"lie within ({c1}, 1)", lambda c: c1 < c < 1)
    inverse = 1 / mpf(p)
    dense_start = omega * mp.log(n) / mpf(p)
    ratio = mp.log(mpf(n) ** (mpf(1) / 3), 2) / mp.log(4 * dense_start, 2)
    dense_horizon = float(mp.log(ratio, 2)) if ratio > 1 else None
    return LowerBoundHorizons(
        dense_start=float(dense_start),
        dense_horizon=dense_horizon,
        sparse_start=float(inverse ** c1),
        sparse_horizon=float((c2 - c1) * mp.log(inverse, 4)),
        sparse_stop=float(2 * inverse ** c2),
    )


@dataclass(frozen=True)
class RoundAudit:
    """Per-round good-round flags of one trial.

    ``growth[k]`` and ``degree[k]`` describe round ``k + 1``; a degree entry
    of None means the property was not recorded.
    """

    regime: str
    growth: Tuple[bool, ...]
    degree: Tuple[Optional[bool], ...]

    @property
    def good(self) -> Tuple[bool, ...]:
        return tuple(
            g and (d is None or d) for g, d in zip(self.growth, self.degree)
        )

    @property
    def first_bad_round(self) -> Optional[int]:
        return next((k + 1 for k, ok in enumerate(self.good) if not ok), None)

    @property
    def degree_audited(self) -> bool:
        return any(d is not None for d in self.degree)

    def bad_fraction(self, rounds: Optional[int] = None) -> float:
        """Share of bad rounds among the first ``rounds`` (all by default)."""
        flags = self.good if rounds is None else self.good[:rounds]
        if not flags:
            return 0.0
        return sum(1 for ok in flags if not ok) / len(flags)

    def to_json(self) -> Dict[str, Any]:
        return {
            "regime": self.regime,
            "good": list(self.good),
            "growth": list(self.growth),
            "degree": ["unaudited" if d is None else d for d in self.degree],
            "first_bad_round": self.first_bad_round,
        }


@typechecked
def audit_rounds(
    record: TrialRecord,
    p: float,
    regime: str,
    c1: Optional[float] = None,
    c2: Optional[float] = None,
) -> RoundAudit:
    """Marks every round of a trial good or bad.

    Dense: round ``i`` grows properly when ``y_i <= 3 b_{i-1}^2``; its degree
    property ``max deg_{Y_{i-1}}(v) <= 2 p y_{i-1}`` is checked when the
    trial recorded white degrees. Sparse: round ``j`` grows properly when
    ``y_j <= (3 + eta_{j-1})(1 + eps) b_{j-1}`` and its average-degree
    property is ``2 e(Y_{<=j}) / b_j <= 2 + eta_j``.

    :param record: the trial
    :type record: TrialRecord
    :param p: edge probability of the sampled graph
    :type p: float
    :param regime: "dense" or "sparse"
    :type regime: str
    :param c1: sparse lower exponent
    :type c1: Optional[float]
    :param c2: sparse upper exponent
    :type c2: Optional[float]
    :raises IllegalValueException: a required trajectory or exponent is missing
    :return: the audit
    :rtype: RoundAudit
    """
    expect("regime", regime, "be dense or sparse", lambda r: r in ("dense", "sparse"))
    b = record.b_trajectory
    y = (b[0],) + record.newly_blue_counts
    rounds = len(b) - 1
    growth: List[bool] = []
    degree: List[Optional[bool]] = []
    if regime == "dense":
        degrees = record.max_white_degree_trajectory
        for i in range(1, rounds + 1):
            growth.append(y[i] <= 3 * b[i - 1] ** 2)
            if degrees is None:
                degree.append(None)
            else:
                degree.append(degrees[i - 1] <= 2 * p * y[i - 1])
        return RoundAudit(regime, tuple(growth), tuple(degree))
    expect(
        "record",
        record.e_blue_trajectory,
        "carry a blue-edge trajectory for a sparse audit",
        lambda e: e is not None,
    )
    expect("c1", c1, "be given for a sparse audit", lambda c: c is not None)
    expect("c2", c2, "be given for a sparse audit", lambda c: c is not None)
    eta = eta_sequence(p, c1, c2, max(rounds, 1))
    edges = record.e_blue_trajectory
    for j in range(1, rounds + 1):
        growth.append(y[j] <= (3 + eta.values[j - 1]) * (1 + eta.eps) * b[j - 1])
        degree.append(2 * edges[j] / b[j] <= 2 + eta.values[j])
    return RoundAudit(regime, tuple(growth), tuple(degree))
