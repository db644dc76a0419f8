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
from dataclasses import dataclass, field
import logging
import math
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from typeguard import typechecked
from .exceptions import DeserializeException, InvariantViolationException
from .utils import (
    autorepr,
    expect,
    derive_seed,
    make_rng,
    graph_stream,
    sets_stream,
)

__all__ = [
    "Graph",
    "GraphSpec",
    "ExpansionReport",
    "families",
    "sample_gnp",
    "named_graph",
    "neighborhood",
    "is_connected",
    "check_expansion",
    "sparse_threshold",
]

logger = logging.getLogger(__name__)

families = ("gnp", "path", "cycle", "star", "complete")

# below this edge probability G(n, p) is sampled by geometric skipping
sparse_threshold = 0.1


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``.

    Adjacency is stored in compressed sparse row form: the neighbors of
    ``u`` are ``indices[indptr[u]:indptr[u + 1]]``, ascending.
    """

    def __init__(
        self,
        n: int,
        indptr: np.ndarray,
        indices: np.ndarray,
        sampler_mode: str = "explicit",
    ):
        """Instantiates a Graph from compressed rows and checks its invariants.

        :param n: vertex count, at least 1
        :type n: int
        :param indptr: row offsets, length n + 1
        :type indptr: np.ndarray
        :param indices: concatenated ascending neighbor lists
        :type indices: np.ndarray
        :param sampler_mode: how the graph was produced, kept for manifests
        :type sampler_mode: str
        :raises InvariantViolationException: adjacency is not a simple
            symmetric graph
        """
        expect("n", n, "be at least 1", lambda n: n >= 1)
        self.__n = n
        self.__indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.__indices = np.ascontiguousarray(indices, dtype=np.int32)
        self.__degree = np.diff(self.__indptr)
        self.__sources: Optional[np.ndarray] = None
        self.__sampler_mode = sampler_mode
        self.__check()
        for array in (self.__indptr, self.__indices, self.__degree):
            array.setflags(write=False)

    def __check(self) -> None:
        n = self.__n
        indptr, indices = self.__indptr, self.__indices
        if len(indptr) != n + 1 or indptr[0] != 0 or indptr[-1] != len(indices):
            raise InvariantViolationException("malformed row offsets", indptr)
        if len(indices) == 0:
            return
        if indices.min() < 0 or indices.max() >= n:
            raise InvariantViolationException("neighbor id out of range", None)
        sources = np.repeat(np.arange(n, dtype=np.int64), self.__degree)
        if np.any(sources == indices):
            raise InvariantViolationException("self-loop present", None)
        # strictly ascending within each row, rows may restart
        step = np.diff(indices.astype(np.int64))
        row_start = np.zeros(len(indices), dtype=bool)
        row_start[indptr[:-1][self.__degree > 0]] = True
        if np.any((step <= 0) & ~row_start[1:]):
            raise InvariantViolationException("adjacency not sorted or duplicated", None)
        forward = sources * n + indices
        backward = np.sort(indices.astype(np.int64) * n + sources)
        if not np.array_equal(forward, backward):
            raise InvariantViolationException("adjacency is not symmetric", None)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Any,
        sampler_mode: str = "explicit",
    ) -> Graph:
        """Builds a Graph from an edge collection.

        :param n: vertex count
        :type n: int
        :param edges: pairs ``(u, v)`` with ``u != v``; order is irrelevant
        :type edges: Any
        :param sampler_mode: how the edges were produced
        :type sampler_mode: str
        :return: the graph
        :rtype: Graph
        """
        pairs = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        sources = np.concatenate([pairs[:, 0], pairs[:, 1]])
        targets = np.concatenate([pairs[:, 1], pairs[:, 0]])
        order = np.lexsort((targets, sources))
        sources, targets = sources[order], targets[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(sources, minlength=n), out=indptr[1:])
        return cls(n, indptr, targets, sampler_mode)

    def __str__(self) -> str:
        return repr(self)

    def __repr__(self) -> str:
        return autorepr(
            self,
            {
                "n": self.n,
                "m": self.m,
                "sampler_mode": self.sampler_mode,
            },
        )

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None

    @property
    def n(self) -> int:
        """Gets vertex count.

        :return: vertex count
        :rtype: int
        """
        return self.__n

    @property
    def m(self) -> int:
        """Gets edge count.

        :return: edge count
        :rtype: int
        """
        return len(self.__indices) // 2

    @property
    def indptr(self) -> np.ndarray:
        """Gets read-only row offsets.

        :return: row offsets, length n + 1
        :rtype: np.ndarray
        """
        return self.__indptr

    @property
    def indices(self) -> np.ndarray:
        """Gets read-only concatenated neighbor lists.

        :return: neighbor ids
        :rtype: np.ndarray
        """
        return self.__indices

    @property
    def degree(self) -> np.ndarray:
        """Gets read-only per-vertex degrees.

        :return: degrees
        :rtype: np.ndarray
        """
        return self.__degree

    @property
    def edge_sources(self) -> np.ndarray:
        """Gets the row owning each entry of :attr:`indices`.

        Together with :attr:`indices` this enumerates every directed pair
        ``(u, v)`` in canonical order: ``u`` ascending, then ``v`` ascending.

        :return: source vertex per adjacency entry
        :rtype: np.ndarray
        """
        if self.__sources is None:
            sources = np.repeat(np.arange(self.n, dtype=np.int32), self.degree)
            sources.setflags(write=False)
            self.__sources = sources
        return self.__sources

    @property
    def sampler_mode(self) -> str:
        """Gets how the graph was produced (dense, sparse, named, file, explicit).

        :return: sampler mode
        :rtype: str
        """
        return self.__sampler_mode

    @property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        """Gets per-vertex ascending neighbor tuples.

        :return: adjacency lists
        :rtype: Tuple[Tuple[int, ...], ...]
        """
        return tuple(tuple(int(v) for v in self.neighbors(u)) for u in range(self.n))

    @property
    def min_degree(self) -> int:
        return int(self.degree.min())

    @property
    def max_degree(self) -> int:
        return int(self.degree.max())

    def neighbors(self, u: int) -> np.ndarray:
        """Gets the ascending neighbors of ``u``.

        :param u: a vertex
        :type u: int
        :return: read-only view of N(u)
        :rtype: np.ndarray
        """
        return self.__indices[self.__indptr[u] : self.__indptr[u + 1]]

    def edges(self) -> np.ndarray:
        """Gets the edges ``u < v`` in ascending lexicographic order.

        :return: array of shape (m, 2)
        :rtype: np.ndarray
        """
        keep = self.edge_sources < self.indices
        return np.stack([self.edge_sources[keep], self.indices[keep]], axis=1)

    def to_edge_list(self) -> str:
        """Serialises to the edge-list text format.

        The header line is ``n m``; each following line is ``u v`` with
        ``u < v`` in ascending lexicographic order.

        :return: edge-list text
        :rtype: str
        """
        lines = [f"{self.n} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in self.edges().tolist())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edge_list(cls, text: str) -> Graph:
        """Deserialises the edge-list text format.

        :param text: edge-list text
        :type text: str
        :raises DeserializeException: malformed header or edge line, edges
            out of order, or edge count mismatch
        :return: the graph
        :rtype: Graph
        """
        lines = [line.strip() for line in text.strip().splitlines()]
        if len(lines) == 0:
            raise DeserializeException("edge list is empty", text)
        header = lines[0].split()
        if len(header) != 2 or not all(token.isdigit() for token in header):
            raise DeserializeException("header must be 'n m'", lines[0])
        n, m = int(header[0]), int(header[1])
        if n < 1:
            raise DeserializeException("vertex count must be at least 1", lines[0])
        if len(lines) - 1 != m:
            raise DeserializeException(
                f"header declares {m} edges, found {len(lines) - 1}", lines[0]
            )
        edges: List[Tuple[int, int]] = []
        for line in lines[1:]:
            tokens = line.split()
            if len(tokens) != 2 or not all(token.isdigit() for token in tokens):
                raise DeserializeException("edge line must be 'u v'", line)
            u, v = int(tokens[0]), int(tokens[1])
            if not u < v < n:
                raise DeserializeException("edge must satisfy u < v < n", line)
            if len(edges) > 0 and (u, v) <= edges[-1]:
                raise DeserializeException("edges must be strictly ascending", line)
            edges.append((u, v))
        return cls.from_edges(n, edges, sampler_mode="file")

    def write(self, file_path: str) -> None:
        with open(file_path, "w") as file:
            file.write(self.to_edge_list())
        logger.info("wrote graph n=%d m=%d to %s", self.n, self.m, file_path)

    @classmethod
    def read(cls, file_path: str) -> Graph:
        with open(file_path, "r") as file:
            return cls.from_edge_list(file.read())


class GraphSpec:
    """Class storing a named or random graph family with its parameters."""

    def __init__(self, family: str, n: int, p: Optional[float] = None):
        """Instantiates a GraphSpec.

        :param family: one of gnp, path, cycle, star, complete
        :type family: str
        :param n: vertex count (leaf count for star)
        :type n: int
        :param p: edge probability, required for gnp
        :type p: Optional[float]
        """
        expect("family", family, f"be one of {families}", lambda f: f in families)
        expect("n", n, "be at least 1", lambda n: n >= 1)
        if family == "gnp":
            expect("p", p, "be within [0, 1]", lambda p: p is not None and 0 <= p <= 1)
        if family == "cycle":
            expect("n", n, "be at least 3 for a cycle", lambda n: n >= 3)
        self.__family = family
        self.__n = n
        self.__p = None if p is None else float(p)

    def __str__(self) -> str:
        return repr(self)

    def __repr__(self) -> str:
        return autorepr(self, {"family": self.family, "n": self.n, "p": self.p})

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, GraphSpec):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash((self.family, self.n, self.p))

    @property
    def family(self) -> str:
        """Gets family name.

        :return: family name
        :rtype: str
        """
        return self.__family

    @property
    def n(self) -> int:
        """Gets the size parameter.

        :return: vertex count, or leaf count for a star
        :rtype: int
        """
        return self.__n

    @property
    def p(self) -> Optional[float]:
        """Gets edge probability, None for named families.

        :return: edge probability
        :rtype: Optional[float]
        """
        return self.__p

    @property
    def expected_degree(self) -> Optional[float]:
        """Gets ``p(n - 1)`` for gnp, None for named families.

        :return: expected degree
        :rtype: Optional[float]
        """
        if self.family != "gnp":
            return None
        return self.p * (self.n - 1)

    def build(self, seed: int = 0) -> Graph:
        """Constructs the graph; the seed matters only for gnp.

        :param seed: 64-bit seed
        :type seed: int
        :return: the graph
        :rtype: Graph
        """
        if self.family == "gnp":
            return sample_gnp(self.n, self.p, seed)
        return named_graph(self)

    def to_json(self) -> Dict[str, Any]:
        return {"family": self.family, "n": self.n, "p": self.p}

    @classmethod
    def from_json(cls, spec_json: Dict[str, Any]) -> GraphSpec:
        """Deserialises a GraphSpec.

        :param spec_json: object with family, n and optionally p
        :type spec_json: Dict[str, Any]
        :raises DeserializeException: missing or unknown keys
        :return: the spec
        :rtype: GraphSpec
        """
        if not isinstance(spec_json, dict) or "family" not in spec_json or "n" not in spec_json:
            raise DeserializeException("graph spec needs family and n", spec_json)
        unknown = set(spec_json) - {"family", "n", "p"}
        if unknown:
            raise DeserializeException(f"unknown graph spec keys {sorted(unknown)}", spec_json)
        return cls(spec_json["family"], spec_json["n"], spec_json.get("p"))


@typechecked
def sample_gnp(n: int, p: float, seed: int) -> Graph:
    """Samples G(n, p).

    Every unordered pair is included independently with probability ``p``.
    Pairs are visited in ascending lexicographic order; for ``p`` below
    :data:`sparse_threshold` the gaps between included pairs are drawn
    geometrically instead, which is a different stream with the same law.

    :param n: vertex count
    :type n: int
    :param p: edge probability
    :type p: float
    :param seed: 64-bit seed
    :type seed: int
    :return: the sampled graph, ``sampler_mode`` "dense" or "sparse"
    :rtype: Graph
    """
    expect("n", n, "be at least 1", lambda n: n >= 1)
    expect("p", p, "be within [0, 1]", lambda p: 0.0 <= p <= 1.0)
    rng = make_rng(derive_seed(seed, graph_stream))
    mode = "sparse" if p < sparse_threshold else "dense"
    pair_count = n * (n - 1) // 2
    if pair_count == 0 or p == 0.0:
        edges = np.empty((0, 2), dtype=np.int64)
    elif mode == "dense":
        rows: List[np.ndarray] = []
        for u in range(n - 1):
            hits = np.flatnonzero(rng.random(n - u - 1) < p) + (u + 1)
            rows.append(np.stack([np.full(len(hits), u), hits], axis=1))
        edges = np.concatenate(rows)
    else:
        edges = _pairs_from_positions(n, _skip_positions(rng, pair_count, p))
    graph = Graph.from_edges(n, edges, sampler_mode=mode)
    logger.debug("sampled G(%d, %g) seed=%d mode=%s m=%d", n, p, seed, mode, graph.m)
    return graph


def _skip_positions(rng: np.random.Generator, pair_count: int, p: float) -> np.ndarray:
    chunk = max(1024, int(pair_count * p * 1.1))
    chunks: List[np.ndarray] = []
    last = -1
    while last < pair_count:
        positions = last + np.cumsum(rng.geometric(p, size=chunk))
        last = int(positions[-1])
        chunks.append(positions[positions < pair_count])
    return np.concatenate(chunks)


def _pairs_from_positions(n: int, positions: np.ndarray) -> np.ndarray:
    rows = np.arange(n, dtype=np.int64)
    # pairs preceding row u in lexicographic order
    offsets = rows * (2 * n - rows - 1) // 2
    u = np.searchsorted(offsets, positions, side="right") - 1
    v = positions - offsets[u] + u + 1
    return np.stack([u, v], axis=1)


@typechecked
def named_graph(spec: GraphSpec) -> Graph:
    """Builds a named family with canonical labels.

    Paths and cycles are labelled consecutively, the star center is vertex
    0 followed by ``n`` leaves, and the complete graph has every pair.

    :param spec: a non-random graph spec
    :type spec: GraphSpec
    :return: the graph
    :rtype: Graph
    """
    expect("family", spec.family, "be a named family", lambda f: f != "gnp")
    n = spec.n
    if spec.family == "path":
        edges = [(u, u + 1) for u in range(n - 1)]
        return Graph.from_edges(n, edges, sampler_mode="named")
    if spec.family == "cycle":
        edges = [(u, u + 1) for u in range(n - 1)] + [(0, n - 1)]
        return Graph.from_edges(n, edges, sampler_mode="named")
    if spec.family == "star":
        edges = [(0, leaf) for leaf in range(1, n + 1)]
        return Graph.from_edges(n + 1, edges, sampler_mode="named")
    u, v = np.triu_indices(n, k=1)
    return Graph.from_edges(n, np.stack([u, v], axis=1), sampler_mode="named")


def vertex_mask(g: Graph, s: Iterable[int]) -> np.ndarray:
    """Boolean membership vector of ``s``.

    :raises IllegalValueException: a member is not a vertex of ``g``
    """
    members = np.fromiter((int(v) for v in s), dtype=np.int64)
    expect(
        "vertex set",
        members.tolist(),
        f"lie within 0..{g.n - 1}",
        lambda vs: all(0 <= v < g.n for v in vs),
    )
    mask = np.zeros(g.n, dtype=bool)
    mask[members] = True
    return mask


def neighborhood_mask(g: Graph, mask: np.ndarray) -> np.ndarray:
    """Boolean vector of N(S) for S given as a membership vector."""
    out = np.zeros(g.n, dtype=bool)
    out[g.indices[mask[g.edge_sources]]] = True
    out &= ~mask
    return out


@typechecked
def neighborhood(g: Graph, s: Iterable[int]) -> FrozenSet[int]:
    """Computes N(S), the vertices outside S adjacent to some member of S.

    :param g: the graph
    :type g: Graph
    :param s: vertex set
    :type s: Iterable[int]
    :return: N(S), disjoint from S
    :rtype: FrozenSet[int]
    """
    mask = vertex_mask(g, s)
    return frozenset(int(v) for v in np.flatnonzero(neighborhood_mask(g, mask)))


@typechecked
def is_connected(g: Graph) -> bool:
    """Determines whether the graph has a single component.

    :param g: the graph
    :type g: Graph
    :return: whether g is connected
    :rtype: bool
    """
    if g.n == 1:
        return True
    adjacency = csr_matrix(
        (np.ones(len(g.indices), dtype=np.int8), g.indices, g.indptr),
        shape=(g.n, g.n),
    )
    count, _ = connected_components(adjacency, directed=False)
    return bool(count == 1)


@dataclass(frozen=True)
class ExpansionReport:
    """Degree concentration and small-set expansion measured on one graph."""

    n: int
    d: float
    omega: float
    min_degree: int
    max_degree: int
    degree_deviation: float
    set_size_cap: int
    set_sizes: Tuple[int, ...]
    neighborhood_sizes: Tuple[int, ...]
    set_deviations: Tuple[float, ...]
    degree_tolerance: Optional[float] = None
    set_tolerance: Optional[float] = None

    @property
    def max_set_deviation(self) -> float:
        return max(self.set_deviations, default=0.0)

    @property
    def degree_passed(self) -> bool:
        return self.degree_tolerance is None or self.degree_deviation <= self.degree_tolerance

    @property
    def sets_passed(self) -> bool:
        return self.set_tolerance is None or self.max_set_deviation <= self.set_tolerance

    @property
    def flagged_sets(self) -> Tuple[int, ...]:
        """Indices of sampled sets whose deviation exceeds the tolerance."""
        if self.set_tolerance is None:
            return ()
        return tuple(
            i for i, dev in enumerate(self.set_deviations) if dev > self.set_tolerance
        )

    @property
    def passed(self) -> bool:
        return self.degree_passed and self.sets_passed

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "d": self.d,
            "omega": self.omega,
            "min_degree": self.min_degree,
            "max_degree": self.max_degree,
            "degree_deviation": self.degree_deviation,
            "set_size_cap": self.set_size_cap,
            "max_set_deviation": self.max_set_deviation,
            "degree_tolerance": self.degree_tolerance,
            "set_tolerance": self.set_tolerance,
            "passed": self.passed,
        }


@typechecked
def check_expansion(
    g: Graph,
    omega: float,
    sample_count: int,
    seed: int,
    d: Optional[float] = None,
    degree_tolerance: Optional[float] = None,
    set_tolerance: Optional[float] = None,
    graph_spec: Optional[GraphSpec] = None,
) -> ExpansionReport:
    """Audits degree concentration and expansion of small sets.

    Every degree is compared with ``d``; then ``sample_count`` sets are drawn,
    each of size ``s`` uniform in ``[1, n/(d omega)]`` and uniform among
    ``s``-subsets, and ``|N(S)|`` is compared with ``s d``. Deviations are
    relative and reported raw; tolerances only set the pass flags.

    :param g: the graph
    :type g: Graph
    :param omega: expansion parameter, greater than 1
    :type omega: float
    :param sample_count: number of random sets
    :type sample_count: int
    :param seed: 64-bit seed for the set sampler
    :type seed: int
    :param d: reference degree, defaults to ``p(n - 1)`` of a gnp
        ``graph_spec`` and otherwise to the average degree of g
    :type d: Optional[float]
    :param degree_tolerance: bound on the degree deviation, if any
    :type degree_tolerance: Optional[float]
    :param set_tolerance: bound on each set deviation, if any
    :type set_tolerance: Optional[float]
    :param graph_spec: the family g was built from, if known
    :type graph_spec: Optional[GraphSpec]
    :return: the report
    :rtype: ExpansionReport
    """
    expect("omega", omega, "be greater than 1", lambda w: w > 1)
    expect("sample_count", sample_count, "be non-negative", lambda c: c >= 0)
    if d is None and graph_spec is not None:
        d = graph_spec.expected_degree
    if d is None:
        d = 2.0 * g.m / g.n
    expect("d", d, "be positive", lambda d: d > 0)
    degree = g.degree.astype(np.float64)
    degree_deviation = float(np.max(np.abs(degree - d)) / d)
    cap = max(1, min(g.n, int(math.floor(g.n / (d * omega)))))
    rng = make_rng(derive_seed(seed, sets_stream))
    sizes: List[int] = []
    neighborhood_sizes: List[int] = []
    deviations: List[float] = []
    for _ in range(sample_count):
        s = int(rng.integers(1, cap + 1))
        mask = np.zeros(g.n, dtype=bool)
        mask[rng.choice(g.n, size=s, replace=False)] = True
        size = int(neighborhood_mask(g, mask).sum())
        sizes.append(s)
        neighborhood_sizes.append(size)
        deviations.append(abs(size - s * d) / (s * d))
    report = ExpansionReport(
        n=g.n,
        d=float(d),
        omega=float(omega),
        min_degree=g.min_degree,
        max_degree=g.max_degree,
        degree_deviation=degree_deviation,
        set_size_cap=cap,
        set_sizes=tuple(sizes),
        neighborhood_sizes=tuple(neighborhood_sizes),
        set_deviations=tuple(deviations),
        degree_tolerance=degree_tolerance,
        set_tolerance=set_tolerance,
    )
    if not report.passed:
        logger.warning(
            "expansion audit flagged: degree deviation %.4g, worst set deviation %.4g",
            report.degree_deviation,
            report.max_set_deviation,
        )
    return report
