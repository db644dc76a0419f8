from __future__ import annotations
from typing import (
    Any,
    Optional,
    Iterable,
    Iterator,
    Sequence,
    Tuple,
    List,
    Dict,
    FrozenSet,
)
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import csv
import hashlib
import json
import logging
import math
import os
import time
import numpy as np
from scipy.stats import linregress
from typeguard import typechecked
from .bounds import BoundPrediction, PhaseThresholds, phase_thresholds, predict_bounds
from .exceptions import DeserializeException, IllegalValueException
from .forcing import (
    ForcingRule,
    Status,
    TrialRecord,
    default_max_rounds,
    density,
    run_process,
)
from .graph import Graph, GraphSpec
from .utils import (
    autorepr,
    expect,
    derive_seed,
    make_rng,
    engine_version,
    graph_stream,
    start_stream,
)

__all__ = [
    "StartPolicy",
    "ExperimentConfig",
    "SummaryStats",
    "SweepRow",
    "SweepTable",
    "GrowthFit",
    "run_trials",
    "summarize",
    "sweep",
    "fit_growth",
    "run_experiment",
    "write_records",
    "read_records",
    "write_manifest",
    "write_command_manifest",
]

logger = logging.getLogger(__name__)

start_kinds = ("vertex", "set", "all_singletons_min", "random_set")


class StartPolicy:
    """Class storing how a trial picks its initial blue set.

    ``random_set`` draws ``size - 1`` further vertices uniformly to join
    ``vertex``; ``all_singletons_min`` runs one process per vertex and keeps
    the fastest.
    """

    def __init__(
        self,
        kind: str,
        vertex: Optional[int] = None,
        vertices: Optional[Iterable[int]] = None,
        size: Optional[int] = None,
    ):
        expect("kind", kind, f"be one of {start_kinds}", lambda k: k in start_kinds)
        if kind in ("vertex", "random_set"):
            expect("vertex", vertex, "be a vertex id", lambda v: v is not None and v >= 0)
        if kind == "set":
            expect("vertices", vertices, "be given", lambda vs: vs is not None)
            vertices = tuple(sorted(set(int(v) for v in vertices)))
            expect("vertices", vertices, "be nonempty", lambda vs: len(vs) > 0)
        if kind == "random_set":
            expect("size", size, "be at least 1", lambda s: s is not None and s >= 1)
        self.__kind = kind
        self.__vertex = vertex
        self.__vertices = vertices
        self.__size = size

    @classmethod
    def fixed_vertex(cls, vertex: int) -> StartPolicy:
        return cls("vertex", vertex=vertex)

    @classmethod
    def fixed_set(cls, vertices: Iterable[int]) -> StartPolicy:
        return cls("set", vertices=vertices)

    @classmethod
    def singletons_min(cls) -> StartPolicy:
        return cls("all_singletons_min")

    @classmethod
    def random_set(cls, size: int, vertex: int = 0) -> StartPolicy:
        return cls("random_set", vertex=vertex, size=size)

    @classmethod
    def parse(cls, text: str) -> StartPolicy:
        """Parses ``3``, ``0,4,7``, ``min`` or ``random:<size>[@<vertex>]``.

        :raises IllegalValueException: unrecognised text
        """
        text = text.strip()
        try:
            if text == "min":
                return cls.singletons_min()
            if text.startswith("random:"):
                size, _, vertex = text[len("random:") :].partition("@")
                return cls.random_set(int(size), int(vertex) if vertex else 0)
            if "," in text:
                return cls.fixed_set(int(v) for v in text.split(",") if v)
            return cls.fixed_vertex(int(text))
        except ValueError:
            raise IllegalValueException(f"expected a start policy, got {text!r}", text)

    def __str__(self) -> str:
        return repr(self)

    def __repr__(self) -> str:
        return autorepr(self, self.to_json())

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, StartPolicy):
            return NotImplemented
        return self.to_json() == other.to_json()

    @property
    def kind(self) -> str:
        return self.__kind

    @property
    def vertex(self) -> Optional[int]:
        return self.__vertex

    @property
    def vertices(self) -> Optional[Tuple[int, ...]]:
        return self.__vertices

    @property
    def size(self) -> Optional[int]:
        return self.__size

    def resolve(self, g: Graph, seed: int) -> List[FrozenSet[int]]:
        """Start sets for one trial; more than one only for
        ``all_singletons_min``.

        :raises IllegalValueException: the policy does not fit the graph
        """
        if self.kind == "all_singletons_min":
            return [frozenset([v]) for v in range(g.n)]
        if self.kind == "set":
            expect(
                "start set",
                self.vertices,
                f"lie within 0..{g.n - 1}",
                lambda vs: all(v < g.n for v in vs),
            )
            return [frozenset(self.vertices)]
        expect("start vertex", self.vertex, f"lie within 0..{g.n - 1}", lambda v: v < g.n)
        if self.kind == "vertex":
            return [frozenset([self.vertex])]
        expect("size", self.size, f"be at most {g.n}", lambda s: s <= g.n)
        rng = make_rng(derive_seed(seed, start_stream))
        others = np.array([v for v in range(g.n) if v != self.vertex], dtype=np.int64)
        chosen = rng.choice(others, size=self.size - 1, replace=False)
        return [frozenset([self.vertex] + [int(v) for v in chosen])]

    def to_json(self) -> Dict[str, Any]:
        policy_json: Dict[str, Any] = {"kind": self.kind}
        if self.vertex is not None:
            policy_json["vertex"] = self.vertex
        if self.vertices is not None:
            policy_json["vertices"] = list(self.vertices)
        if self.size is not None:
            policy_json["size"] = self.size
        return policy_json

    @classmethod
    def from_json(cls, policy_json: Dict[str, Any]) -> StartPolicy:
        if not isinstance(policy_json, dict) or "kind" not in policy_json:
            raise DeserializeException("start policy needs a kind", policy_json)
        unknown = set(policy_json) - {"kind", "vertex", "vertices", "size"}
        if unknown:
            raise DeserializeException(f"unknown start policy keys {sorted(unknown)}", policy_json)
        return cls(
            policy_json["kind"],
            policy_json.get("vertex"),
            policy_json.get("vertices"),
            policy_json.get("size"),
        )


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a batch of trials depends on.

    Exactly one of ``graph`` and ``graph_file`` is set. A random graph is
    sampled once from ``master_seed`` unless ``resample_graph`` asks for one
    graph per trial.
    """

    graph: Optional[GraphSpec] = None
    graph_file: Optional[str] = None
    start: StartPolicy = field(default_factory=lambda: StartPolicy.fixed_vertex(0))
    rule: ForcingRule = field(default_factory=ForcingRule.standard)
    trials: int = 100
    max_rounds: Optional[int] = None
    master_seed: int = 0
    workers: int = 1
    out_dir: Optional[str] = None
    thresholds_omega: Optional[float] = None
    record_blue_edges: bool = False
    record_white_degree: bool = False
    resample_graph: bool = False

    def __post_init__(self):
        expect("trials", self.trials, "be at least 1", lambda t: t >= 1)
        expect("workers", self.workers, "be at least 1", lambda w: w >= 1)
        expect(
            "graph",
            (self.graph, self.graph_file),
            "name exactly one of a graph spec and a graph file",
            lambda pair: (pair[0] is None) != (pair[1] is None),
        )
        if self.resample_graph:
            expect("graph", self.graph, "be a graph spec to resample", lambda s: s is not None)
        if self.max_rounds is not None:
            expect("max_rounds", self.max_rounds, "be at least 1", lambda r: r >= 1)

    def load_graph(self, seed: Optional[int] = None) -> Graph:
        """Builds or reads the graph; ``seed`` defaults to the master seed.

        :raises DeserializeException: the graph file cannot be read
        """
        if self.graph_file is not None:
            try:
                return Graph.read(self.graph_file)
            except OSError as error:
                raise DeserializeException(str(error), self.graph_file)
        return self.graph.build(self.master_seed if seed is None else seed)

    def to_json(self) -> Dict[str, Any]:
        return {
            "graph": None if self.graph is None else self.graph.to_json(),
            "graph_file": self.graph_file,
            "start": self.start.to_json(),
            "rule": self.rule.to_json(),
            "trials": self.trials,
            "max_rounds": self.max_rounds,
            "master_seed": self.master_seed,
            "workers": self.workers,
            "out_dir": self.out_dir,
            "thresholds_omega": self.thresholds_omega,
            "record_blue_edges": self.record_blue_edges,
            "record_white_degree": self.record_white_degree,
            "resample_graph": self.resample_graph,
        }

    @property
    def digest(self) -> str:
        """sha256 of the canonical JSON form, excluding the worker hint and
        output directory, which never change results."""
        config_json = self.to_json()
        del config_json["workers"], config_json["out_dir"]
        canonical = json.dumps(config_json, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @classmethod
    def from_json(cls, config_json: Dict[str, Any]) -> ExperimentConfig:
        """Deserialises a config, rejecting unknown keys.

        :param config_json: the config object
        :type config_json: Dict[str, Any]
        :raises DeserializeException: unknown keys or malformed members
        :return: the config
        :rtype: ExperimentConfig
        """
        if not isinstance(config_json, dict):
            raise DeserializeException("config must be a json object", config_json)
        known = set(cls.__dataclass_fields__)
        unknown = set(config_json) - known
        if unknown:
            raise DeserializeException(f"unknown config keys {sorted(unknown)}", config_json)
        values = dict(config_json)
        if values.get("graph") is not None:
            values["graph"] = GraphSpec.from_json(values["graph"])
        if "start" in values:
            values["start"] = StartPolicy.from_json(values["start"])
        if "rule" in values:
            values["rule"] = ForcingRule.from_json(values["rule"])
        return cls(**values)

    @classmethod
    def read(cls, file_path: str) -> ExperimentConfig:
        with open(file_path, "r") as file:
            try:
                return cls.from_json(json.load(file))
            except json.JSONDecodeError as error:
                raise DeserializeException(str(error), file_path)


def _graph_p(config: ExperimentConfig, g: Graph) -> float:
    if config.graph is not None and config.graph.p is not None:
        return config.graph.p
    return density(g)


def _thresholds(config: ExperimentConfig, g: Optional[Graph]) -> Optional[PhaseThresholds]:
    if config.thresholds_omega is None:
        return None
    if g is None:
        n, p = config.graph.n, config.graph.p or 0.0
    else:
        n, p = g.n, _graph_p(config, g)
    if n < 16 or p <= 0:
        logger.warning("phase thresholds need n >= 16 and p > 0, skipping")
        return None
    return phase_thresholds(n, p, config.thresholds_omega)


def _run_trial(
    config: ExperimentConfig,
    shared_graph: Optional[Graph],
    thresholds: Optional[PhaseThresholds],
    trial: int,
) -> TrialRecord:
    seed = derive_seed(config.master_seed, trial)
    g = shared_graph
    if g is None:
        g = config.load_graph(derive_seed(seed, graph_stream))
    max_rounds = config.max_rounds
    if max_rounds is None:
        max_rounds = default_max_rounds(g.n, _graph_p(config, g))
    best: Optional[TrialRecord] = None
    starts = config.start.resolve(g, seed)
    for start in starts:
        process_seed = seed if len(starts) == 1 else derive_seed(seed, start_stream, min(start))
        record = run_process(
            g,
            start,
            config.rule,
            process_seed,
            max_rounds=max_rounds,
            thresholds=thresholds,
            trial=trial,
            graph_spec=config.graph,
            record_blue_edges=config.record_blue_edges,
            record_white_degree=config.record_white_degree,
        )
        if best is None or _faster(record, best):
            best = record
    return replace(best, seed=config.master_seed)


def _faster(record: TrialRecord, best: TrialRecord) -> bool:
    if record.status != Status.forced:
        return False
    return best.status != Status.forced or record.pt < best.pt


@typechecked
def run_trials(config: ExperimentConfig, g: Optional[Graph] = None) -> Iterator[TrialRecord]:
    """Runs ``config.trials`` independent trials in trial order.

    Trial ``k`` draws from ``derive_seed(master_seed, k)``. Under
    ``all_singletons_min`` a trial runs one process per vertex and yields the
    record of the fastest (lowest vertex on ties). Output does not depend on
    the worker count.

    :param config: the experiment
    :type config: ExperimentConfig
    :param g: a graph to use instead of loading one
    :type g: Optional[Graph]
    :return: the records
    :rtype: Iterator[TrialRecord]
    """
    shared_graph = g
    if shared_graph is None and not config.resample_graph:
        shared_graph = config.load_graph()
    thresholds = _thresholds(config, shared_graph)
    logger.info(
        "running %d trials with %d workers, master seed %d",
        config.trials,
        config.workers,
        config.master_seed,
    )
    trials = range(config.trials)
    if config.workers == 1:
        for trial in trials:
            yield _run_trial(config, shared_graph, thresholds, trial)
        return
    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        # map yields in submission order
        yield from executor.map(
            lambda trial: _run_trial(config, shared_graph, thresholds, trial), trials
        )


@dataclass(frozen=True)
class SummaryStats:
    """Order statistics and moments of propagation times.

    Cap-hit trials are counted but excluded from every statistic; with no
    forced trial the statistics are None and ``empty`` is set. ``values``
    holds the sorted propagation times when the stats were computed rather
    than read back from a table, and is what :meth:`merge` combines.
    """

    total: int
    count: int
    cap_hits: int
    mean: Optional[float]
    standard_error: Optional[float]
    median: Optional[float]
    q10: Optional[float]
    q90: Optional[float]
    min: Optional[float]
    max: Optional[float]
    values: Optional[Tuple[float, ...]] = field(default=None, compare=False, repr=False)

    moment_keys = ("mean", "standard_error", "median", "q10", "q90", "min", "max")

    @property
    def empty(self) -> bool:
        return self.count == 0

    @classmethod
    def from_values(cls, values: Iterable[float], cap_hits: int = 0) -> SummaryStats:
        data = np.sort(np.asarray(list(values), dtype=np.float64))
        count = len(data)
        if count == 0:
            return cls(cap_hits, 0, cap_hits, None, None, None, None, None, None, None, ())
        standard_error = None
        if count > 1:
            standard_error = float(np.std(data, ddof=1) / math.sqrt(count))
        return cls(
            total=count + cap_hits,
            count=count,
            cap_hits=cap_hits,
            mean=float(np.mean(data)),
            standard_error=standard_error,
            median=float(np.median(data)),
            q10=float(np.quantile(data, 0.1)),
            q90=float(np.quantile(data, 0.9)),
            min=float(data[0]),
            max=float(data[-1]),
            values=tuple(data.tolist()),
        )

    def merge(self, other: SummaryStats) -> SummaryStats:
        """Stats of the union of both samples, equal to summarising the
        concatenated records.

        :raises IllegalValueException: either side lacks its values
        """
        for name, stats in (("self", self), ("other", other)):
            expect(name, stats, "carry its sample values", lambda s: s.values is not None)
        return SummaryStats.from_values(
            self.values + other.values, cap_hits=self.cap_hits + other.cap_hits
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            "total": self.total,
            "count": self.count,
            "cap_hits": self.cap_hits,
            "mean": self.mean,
            "standard_error": self.standard_error,
            "median": self.median,
            "q10": self.q10,
            "q90": self.q90,
            "min": self.min,
            "max": self.max,
        }


@typechecked
def summarize(records: Iterable[TrialRecord]) -> SummaryStats:
    """Summarises propagation times over forced records.

    :param records: at least one record
    :type records: Iterable[TrialRecord]
    :return: the statistics
    :rtype: SummaryStats
    """
    records = list(records)
    expect("records", len(records), "be at least 1", lambda c: c >= 1)
    pts = [record.pt for record in records if record.status == Status.forced]
    stats = SummaryStats.from_values(pts, cap_hits=len(records) - len(pts))
    if stats.cap_hits:
        logger.warning("%d of %d trials hit the round cap", stats.cap_hits, stats.total)
    return stats


@dataclass(frozen=True)
class SweepRow:
    n: int
    p: float
    stats: Optional[SummaryStats]
    prediction: Optional[BoundPrediction] = None
    error: Optional[str] = None

    @property
    def loglog_n(self) -> float:
        return math.log2(math.log2(self.n)) if self.n > 2 else 0.0

    @property
    def log_inv_p(self) -> float:
        return math.log(1.0 / self.p)

    def value(self, name: str) -> Optional[float]:
        """Looks up a column by name.

        :raises IllegalValueException: unknown column
        """
        expect("axis", name, f"be one of {SweepTable.columns}", lambda a: a in SweepTable.columns)
        return self.to_row()[name]

    def to_row(self) -> Dict[str, Any]:
        stats = self.stats.to_json() if self.stats is not None else {}
        return {
            "n": self.n,
            "p": self.p,
            "loglog_n": self.loglog_n,
            "log_inv_p": self.log_inv_p,
            "count": stats.get("count"),
            "cap_hits": stats.get("cap_hits"),
            "mean": stats.get("mean"),
            "standard_error": stats.get("standard_error"),
            "median": stats.get("median"),
            "q10": stats.get("q10"),
            "q90": stats.get("q90"),
            "min": stats.get("min"),
            "max": stats.get("max"),
            "upper": None if self.prediction is None else self.prediction.upper,
            "lower": None if self.prediction is None else self.prediction.lower,
            "regime": None if self.prediction is None else self.prediction.regime,
            "error": self.error,
        }


@dataclass(frozen=True)
class SweepTable:
    rows: Tuple[SweepRow, ...]

    columns = (
        "n",
        "p",
        "loglog_n",
        "log_inv_p",
        "count",
        "cap_hits",
        "mean",
        "standard_error",
        "median",
        "q10",
        "q90",
        "min",
        "max",
        "upper",
        "lower",
        "regime",
        "error",
    )

    def __len__(self) -> int:
        return len(self.rows)

    def complete_rows(self) -> List[SweepRow]:
        """Rows that ran and forced at least one trial."""
        return [
            row
            for row in self.rows
            if row.error is None and row.stats is not None and not row.stats.empty
        ]

    def write_csv(self, file_path: str) -> None:
        with open(file_path, "w", newline="") as file:
            writer = csv.DictWriter(file, fieldnames=list(self.columns))
            writer.writeheader()
            for row in self.rows:
                writer.writerow(
                    {key: "" if value is None else value for key, value in row.to_row().items()}
                )
        logger.info("wrote %d sweep rows to %s", len(self.rows), file_path)

    @classmethod
    def read_csv(cls, file_path: str) -> SweepTable:
        """Reads a table written by :meth:`write_csv`; predictions are
        recomputed from ``n`` and ``p``.

        :raises DeserializeException: a row lacks ``n`` or ``p``
        """

        def number(text: str, kind=float):
            return None if text in ("", None) else kind(text)

        rows = []
        with open(file_path, "r", newline="") as file:
            for line in csv.DictReader(file):
                try:
                    n, p = int(line["n"]), float(line["p"])
                except (KeyError, TypeError, ValueError):
                    raise DeserializeException("sweep row needs n and p", dict(line))
                stats = None
                if line.get("count") not in ("", None):
                    count = int(line["count"])
                    cap_hits = number(line.get("cap_hits"), int) or 0
                    stats = SummaryStats(
                        count + cap_hits,
                        count,
                        cap_hits,
                        *(number(line.get(key)) for key in SummaryStats.moment_keys),
                    )
                prediction = predict_bounds(n, p) if n >= 16 and 0 < p <= 1 else None
                rows.append(SweepRow(n, p, stats, prediction, line.get("error") or None))
        return cls(tuple(rows))


@typechecked
def sweep(grid: Sequence[Tuple[int, float]], template: ExperimentConfig) -> SweepTable:
    """Runs the template once per ``(n, p)`` cell on ``G(n, p)``.

    A failing cell is recorded with its error and the sweep continues.

    :param grid: the cells
    :type grid: Sequence[Tuple[int, float]]
    :param template: config whose graph is replaced per cell
    :type template: ExperimentConfig
    :return: one row per cell, with predicted bounds when ``n >= 16``
    :rtype: SweepTable
    """
    expect("grid", list(grid), "be nonempty", lambda g: len(g) > 0)
    rows: List[SweepRow] = []
    for n, p in grid:
        logger.info("sweep cell n=%d p=%g", n, p)
        try:
            config = replace(template, graph=GraphSpec("gnp", n, p), graph_file=None)
            stats = summarize(run_trials(config))
            prediction = predict_bounds(n, p) if n >= 16 and 0 < p <= 1 else None
            rows.append(SweepRow(n, p, stats, prediction))
        except Exception as error:
            logger.error("sweep cell n=%d p=%g failed: %s", n, p, error)
            rows.append(SweepRow(n, p, None, None, f"{type(error).__name__}: {error}"))
    return SweepTable(tuple(rows))


@dataclass(frozen=True)
class GrowthFit:
    model: str
    slope: float
    intercept: float
    max_residual: float
    rvalue: float

    def to_json(self) -> Dict[str, Any]:
        return {
            "model": self.model,
            "slope": self.slope,
            "intercept": self.intercept,
            "max_residual": self.max_residual,
            "rvalue": self.rvalue,
        }


growth_models = {"loglog_n": "loglog_n", "log_inv_p": "log_inv_p"}


@typechecked
def fit_growth(table: SweepTable, model: str) -> GrowthFit:
    """Least-squares fit of median propagation time against a regressor.

    ``loglog_n`` regresses on ``log2 log2 n``, ``log_inv_p`` on ``ln(1/p)``.

    :param table: sweep output, at least three complete rows
    :type table: SweepTable
    :param model: "loglog_n" or "log_inv_p"
    :type model: str
    :raises IllegalValueException: too few rows or a constant regressor
    :return: slope, intercept and largest absolute residual
    :rtype: GrowthFit
    """
    expect("model", model, f"be one of {tuple(growth_models)}", lambda m: m in growth_models)
    rows = table.complete_rows()
    expect("table", len(rows), "have at least 3 complete rows", lambda c: c >= 3)
    x = np.array([row.value(growth_models[model]) for row in rows], dtype=np.float64)
    y = np.array([row.stats.median for row in rows], dtype=np.float64)
    expect("regressor", x.tolist(), "take more than one value", lambda xs: np.ptp(xs) > 0)
    fit = linregress(x, y)
    residuals = y - (fit.slope * x + fit.intercept)
    return GrowthFit(
        model=model,
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        max_residual=float(np.max(np.abs(residuals))),
        rvalue=float(fit.rvalue),
    )


def write_records(records: Iterable[TrialRecord], file_path: str) -> int:
    """Writes records as JSONL, ordered by trial index.

    :return: number of records written
    """
    ordered = sorted(records, key=lambda record: record.trial)
    with open(file_path, "w") as file:
        for record in ordered:
            file.write(record.to_jsonl() + "\n")
    logger.info("wrote %d records to %s", len(ordered), file_path)
    return len(ordered)


def read_records(file_path: str) -> List[TrialRecord]:
    with open(file_path, "r") as file:
        return [TrialRecord.from_jsonl(line) for line in file if line.strip()]


def write_manifest(
    file_path: str,
    config: ExperimentConfig,
    sampler_mode: str,
    wall_time: float,
    grid: Optional[Sequence[Tuple[int, float]]] = None,
) -> Dict[str, Any]:
    """Writes the JSON manifest that pins a run down.

    :return: the manifest
    """
    manifest = {
        "engine_version": engine_version,
        "config": config.to_json(),
        "config_sha256": config.digest,
        "master_seed": config.master_seed,
        "grid": None if grid is None else [list(cell) for cell in grid],
        "sampler_mode": sampler_mode,
        "wall_time": wall_time,
    }
    with open(file_path, "w") as file:
        json.dump(manifest, file, indent=2)
    return manifest


def write_command_manifest(
    file_path: str,
    command: str,
    arguments: Dict[str, Any],
    master_seed: Optional[int],
    graph: Optional[Dict[str, Any]],
    sampler_mode: Optional[str],
    wall_time: float,
) -> Dict[str, Any]:
    """Writes the manifest of a subcommand that has no experiment config.

    ``arguments`` must be JSON values; its digest leaves out ``out``, which
    never changes results.

    :return: the manifest
    """
    hashed = {key: value for key, value in arguments.items() if key != "out"}
    canonical = json.dumps(hashed, sort_keys=True, separators=(",", ":"))
    manifest = {
        "engine_version": engine_version,
        "command": command,
        "arguments": arguments,
        "arguments_sha256": hashlib.sha256(canonical.encode("utf-8")).hexdigest(),
        "master_seed": master_seed,
        "graph": graph,
        "sampler_mode": sampler_mode,
        "wall_time": wall_time,
    }
    with open(file_path, "w") as file:
        json.dump(manifest, file, indent=2, sort_keys=True)
    return manifest


def run_experiment(config: ExperimentConfig) -> Tuple[List[TrialRecord], SummaryStats]:
    """Runs trials, summarises them and, with ``out_dir`` set, writes
    ``records.jsonl``, ``summary.csv`` and ``manifest.json``."""
    began = time.perf_counter()
    g = None if config.resample_graph else config.load_graph()
    records = list(run_trials(config, g))
    stats = summarize(records)
    if config.out_dir is not None:
        os.makedirs(config.out_dir, exist_ok=True)
        write_records(records, os.path.join(config.out_dir, "records.jsonl"))
        with open(os.path.join(config.out_dir, "summary.csv"), "w", newline="") as file:
            writer = csv.DictWriter(file, fieldnames=list(stats.to_json()))
            writer.writeheader()
            writer.writerow({k: "" if v is None else v for k, v in stats.to_json().items()})
        mode = "resampled" if g is None else g.sampler_mode
        write_manifest(
            os.path.join(config.out_dir, "manifest.json"),
            config,
            mode,
            time.perf_counter() - began,
        )
    return records, stats
