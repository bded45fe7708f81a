import itertools
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from minorsep.config import ConstantsProfile
from minorsep.graph_core import Graph, VertexSet
from minorsep.helpers import (
    InvariantStatus,
    MinorPattern,
    OutcomeKind,
    PatternRole,
    SepKind,
)
from minorsep.wbfs import WTree


@dataclass(frozen=True)
class MinorModel:
    """
    Branch sets certifying a clique or biclique minor of a host graph.

    The sets are pairwise disjoint, each induces a connected subgraph, and every pair
    that the pattern joins is linked by at least one host edge.

    Generalized Format::

        <pattern> <order> <branch set 1> ... <branch set N>

    Examples::

        <clique> <2> {0, 1} {2, 3}               K_2 on the path 0-1-2-3
        <clique> <4> {0} {1} {2} {3}             K_4 inside K_4
        <biclique> <3> A1 A2 A3 B1 B2 B3         K_{3,3}, A side listed first

    Use Cases::

        - KPR reports a deep layering:
            the extracted K_{h,h} model is kept and contracted to K_h.

        - The separator loop exhausts its iterations:
            the stochastic connector is sampled into a K_t model.
    """

    branch_sets: tuple[VertexSet, ...]
    pattern: MinorPattern = MinorPattern.CLIQUE

    @classmethod
    def from_lists(cls, sets, pattern=MinorPattern.CLIQUE) -> "MinorModel":
        return cls(tuple(VertexSet(s) for s in sets), MinorPattern(pattern))

    @property
    def t(self) -> int:
        """Clique order, or side size for a biclique."""
        if self.pattern == MinorPattern.BICLIQUE:
            return len(self.branch_sets) // 2
        return len(self.branch_sets)

    def pattern_edges(self) -> list[tuple[int, int]]:
        """Index pairs of branch sets that must be adjacent."""
        if self.pattern == MinorPattern.BICLIQUE:
            h = self.t
            return [(i, h + j) for i in range(h) for j in range(h)]
        return list(itertools.combinations(range(len(self.branch_sets)), 2))

    @property
    def size(self) -> int:
        return sum(len(s) for s in self.branch_sets)

    def __str__(self) -> str:
        return f"{self.pattern.value} minor of order {self.t} ({self.size} vertices)"


@dataclass(frozen=True)
class PatternGraph:
    """
    The doubly subdivided clique used as the embedding pattern.

    Vertices ``0..t-1`` are branch vertices; then, for each pair ``i < j`` in
    lexicographic order, one ``a`` and one ``b`` subdivision vertex. ``labels[v]`` is
    ``(i,)`` for a branch vertex and ``(i, j)`` for a subdivision vertex.
    """

    t: int
    roles: tuple[PatternRole, ...]
    labels: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def n(self) -> int:
        return len(self.roles)

    @property
    def m(self) -> int:
        return len(self.edges)

    def subdivision_of(self, i: int, j: int) -> tuple[int, int]:
        """Ids of the two subdivision vertices on the edge between branches i < j."""
        idx = self.t + 2 * _pair_index(self.t, i, j)
        return idx, idx + 1


def _pair_index(t: int, i: int, j: int) -> int:
    return i * t - i * (i + 1) // 2 + (j - i - 1)


@dataclass(frozen=True)
class AlmostEmbedding:
    """
    Vertex map and edge paths of a pattern into a host graph.

    ``edge_paths[e]`` runs from ``vertex_map[u]`` to ``vertex_map[v]`` for pattern edge
    ``e = (u, v)``, and ``edge_trees[e]`` is the index of the tree it was cut from.
    """

    vertex_map: tuple[int, ...]
    edge_paths: tuple[tuple[int, ...], ...]
    edge_trees: tuple[int, ...] = ()


@dataclass(frozen=True)
class EmbeddingFailure:
    """A rejected sample. ``reason`` is one of ``outside``, ``collision``, ``crossing``."""

    reason: str
    detail: str = ""

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class MinorSearchFailure:
    attempts: int
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class DenserSubgraph:
    """
    Very dense induced subgraph returned when the subdivision search gets stuck;
    ``id_map[new] == old`` translates back to the graph it was taken from.
    """

    graph: Graph
    id_map: np.ndarray


@dataclass(frozen=True)
class KprDecomposition:
    """
    Round separators and BFS trees witnessing a deep layering.

    ``trees[i]`` spans the component of G minus the earlier separators that holds
    ``component``; ``separators[i]`` is the cut taken in that round.
    """

    separators: tuple[VertexSet, ...]
    trees: tuple[WTree, ...]
    delta: int
    h: int
    component: VertexSet


@dataclass(frozen=True)
class KprOutcome:
    """
    Result of one vertex-weighted KPR run.

    Examples::

        <separated> S=|{...}| C*=|{...}| rounds=[3, 0]
        <minor> K_h model, plus the K_{h,h} it came from when h >= 3
    """

    kind: OutcomeKind
    separator: VertexSet = field(default_factory=VertexSet)
    round_separators: tuple[VertexSet, ...] = ()
    component: VertexSet = field(default_factory=VertexSet)
    round_trees: tuple[WTree, ...] = ()
    model: MinorModel | None = None
    biclique: MinorModel | None = None
    fallback_rounds: int = 0

    @property
    def is_separated(self) -> bool:
        return self.kind == OutcomeKind.SEPARATED

    @property
    def round_sizes(self) -> list[int]:
        return [len(s) for s in self.round_separators]


@dataclass(eq=False)
class IterationRecord:
    """
    State of the separator loop at one iteration.

    ``weights`` is the weight array the iteration ran with and ``reweighted`` the one
    handed to the next iteration (the same array object as the next record's
    ``weights``). Both are None when a trace is loaded from disk without replay.
    """

    t: int
    separator: VertexSet
    component_size: int
    root: int | None
    total_weight: int
    checksum: str
    weights: np.ndarray | None = None
    reweighted: np.ndarray | None = None
    tree: WTree | None = None
    returned: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "t": self.t,
            "separator_size": len(self.separator),
            "separator": self.separator.tolist(),
            "component_size": self.component_size,
            "root": self.root,
            "total_weight": self.total_weight,
            "checksum": self.checksum,
            "returned": self.returned,
        }


@dataclass(eq=False)
class RunTrace:
    """
    Per-iteration history of one separator-loop run on a graph of ``n`` vertices.

    ``vertices`` names the vertices of the input graph whose induced subgraph the run
    worked on, or None when it ran on the input graph itself. ``contracted`` marks a
    run on a contracted quotient, which no induced subgraph reproduces.
    """

    n: int
    h: int
    profile: ConstantsProfile
    seed: int = 0
    bfs_on_component: bool = False
    records: list[IterationRecord] = field(default_factory=list)
    vertices: VertexSet | None = None
    contracted: bool = False

    def relabel(self, component: VertexSet, id_map: np.ndarray) -> "RunTrace":
        """Re-anchor a run recorded on the subgraph induced by ``component``."""
        if not self.contracted:
            if self.vertices is None:
                self.vertices = component
            else:
                self.vertices = self.vertices.map_through(id_map)
        return self

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def peak_weight(self) -> int:
        return max((r.total_weight for r in self.records), default=0)

    @property
    def trees(self) -> list[WTree]:
        return [r.tree for r in self.records if r.tree is not None]


@dataclass(eq=False)
class SepResult:
    """
    Outcome of a separator search.

    Generalized Format::

        <separator> S, max component
        <minor> model
        <indeterminate> collected trees, best separator so far

    ``traces`` holds one RunTrace per inner loop run; ``balanced`` tells whether the
    separator met the requested balance.
    """

    kind: SepKind
    separator: VertexSet | None = None
    model: MinorModel | None = None
    trees: tuple[WTree, ...] = ()
    traces: tuple[RunTrace, ...] = ()
    balanced: bool = False
    max_component: int = 0
    rounds: int = 1

    @property
    def trace(self) -> RunTrace | None:
        return self.traces[-1] if self.traces else None

    def __str__(self) -> str:
        if self.kind == SepKind.MINOR and self.model is not None:
            return f"minor: {self.model}"
        size = len(self.separator) if self.separator is not None else 0
        return f"{self.kind.value}: |S|={size}, largest component {self.max_component}"


@dataclass(frozen=True)
class SepReport:
    """Exact balance certificate of a separator."""

    valid: bool
    n: int
    alpha: Fraction
    separator_size: int
    max_component_fraction: Fraction
    components: dict[int, int]

    def to_dict(self) -> dict[str, Any]:
        return {
            "valid": self.valid,
            "n": self.n,
            "alpha": str(self.alpha),
            "separator_size": self.separator_size,
            "max_component_fraction": str(self.max_component_fraction),
            "components": {str(k): v for k, v in sorted(self.components.items())},
        }


@dataclass(frozen=True)
class ModelReport:
    valid: bool
    violation: str | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.valid

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class ConnectorReport:
    """
    Exact check of the two stochastic-connector conditions.

    ``collisions[(i, j)]`` is the probability that random root paths of trees ``i``
    and ``j`` meet; every value must be at most ``threshold``.
    """

    k: int
    n: int
    sizes: tuple[int, ...]
    size_ok: tuple[bool, ...]
    collisions: dict[tuple[int, int], Fraction]
    threshold: Fraction

    @property
    def valid(self) -> bool:
        return all(self.size_ok) and all(
            p <= self.threshold for p in self.collisions.values()
        )

    @property
    def worst(self) -> Fraction:
        return max(self.collisions.values(), default=Fraction(0))

    def to_dict(self) -> dict[str, Any]:
        return {
            "valid": self.valid,
            "k": self.k,
            "n": self.n,
            "sizes": list(self.sizes),
            "size_ok": list(self.size_ok),
            "threshold": str(self.threshold),
            "worst_collision": str(self.worst),
        }


@dataclass(frozen=True)
class InvariantCheck:
    t: int
    invariant: int
    status: InvariantStatus
    detail: str = ""


@dataclass(frozen=True)
class InvariantReport:
    """All invariant checks of a trace, one entry per (iteration, invariant)."""

    checks: tuple[InvariantCheck, ...]

    @property
    def passed(self) -> bool:
        return not self.failures()

    def failures(self) -> list[InvariantCheck]:
        return [c for c in self.checks if c.status == InvariantStatus.FAIL]

    def status(self, t: int, invariant: int) -> InvariantStatus:
        for check in self.checks:
            if check.t == t and check.invariant == invariant:
                return check.status
        raise KeyError((t, invariant))

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "checks": [
                {
                    "t": c.t,
                    "invariant": c.invariant,
                    "status": c.status.value,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }


@dataclass(frozen=True)
class BenchRecord:
    family: str
    n: int
    m: int
    h: int
    profile: str
    seed: int
    separator_size: int
    max_component_fraction: float
    wall_ms: float
    peak_weight: int
    kind: str = SepKind.SEPARATOR.value

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)
