"""Labeled graphs, infinite graph families, and their induced prefixes.

Vertices are 1-based. A family is a rule producing, for every n >= 1, the
graph induced on vertices 1..n, with the guarantee that prefix(n) is the
restriction of prefix(n+1) to the first n vertices.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

__all__ = [
    "Graph",
    "GraphFamily",
    "GraphParseError",
    "prefix",
    "new_edges_at",
    "parse_graph",
    "render_graph",
]

FAMILY_KINDS = ("path", "star", "complete", "empty", "binary_tree", "random", "explicit")
TAIL_RULES = ("isolated", "path-continue")


class GraphParseError(ValueError):
    """Raised for malformed graph text, with the offending line number."""


@dataclass(frozen=True)
class Graph:
    """Finite labeled graph: vertex set {1..n_vertices} plus undirected edges."""

    n_vertices: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ValueError(f"n_vertices must be positive, got {self.n_vertices}")
        object.__setattr__(self, "edges", frozenset(self.edges))
        for (i, j) in self.edges:
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if not (1 <= i < j <= self.n_vertices):
                raise ValueError(f"edge ({i}, {j}) out of range for {self.n_vertices} vertices")

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return False
        if i > j:
            i, j = j, i
        return (i, j) in self.edges

    def restrict(self, n: int) -> "Graph":
        """Induced subgraph on vertices 1..n."""
        if not (1 <= n <= self.n_vertices):
            raise ValueError(f"cannot restrict {self.n_vertices}-vertex graph to {n}")
        return Graph(n, frozenset(e for e in self.edges if e[1] <= n))


def _pair_hash_unit(seed: int, i: int, j: int) -> float:
    # Stable across runs and platforms, unlike Python's salted hash().
    digest = hashlib.blake2b(
        struct.pack("<qqq", seed, i, j), digest_size=8
    ).digest()
    return struct.unpack("<Q", digest)[0] / 2.0**64


@dataclass(frozen=True)
class GraphFamily:
    """Rule for an infinite labeled graph, queried through finite prefixes.

    kind is one of: path, star, complete, empty, binary_tree, random,
    explicit.  random needs (seed, edge_probability); explicit needs a base
    Graph plus a tail rule saying how vertices beyond the base behave
    ("isolated" or "path-continue").
    """

    kind: str
    seed: int = 0
    edge_probability: float = 0.5
    base: Graph | None = None
    tail: str = "isolated"

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.kind == "random" and not (0.0 <= self.edge_probability <= 1.0):
            raise ValueError("edge_probability must be in [0, 1]")
        if self.kind == "explicit":
            if self.base is None:
                raise ValueError("explicit family needs a base graph")
            if self.tail not in TAIL_RULES:
                raise ValueError(f"unknown tail rule {self.tail!r}")

    def _adjacent(self, i: int, j: int) -> bool:
        """Adjacency of i < j in the infinite graph."""
        if self.kind == "path":
            return j == i + 1
        if self.kind == "star":
            return i == 1
        if self.kind == "complete":
            return True
        if self.kind == "empty":
            return False
        if self.kind == "binary_tree":
            return i == j // 2
        if self.kind == "random":
            return _pair_hash_unit(self.seed, i, j) < self.edge_probability
        # explicit
        m = self.base.n_vertices
        if j <= m:
            return self.base.has_edge(i, j)
        if self.tail == "isolated":
            return False
        # path-continue: chain m - (m+1) - (m+2) - ...
        return j == i + 1 and i >= m

    def label(self) -> str:
        if self.kind == "random":
            return f"random(seed={self.seed}, p={self.edge_probability})"
        if self.kind == "explicit":
            return f"explicit({self.base.n_vertices} vertices, tail={self.tail})"
        return self.kind


def prefix(family: GraphFamily, n: int) -> Graph:
    """Graph induced on vertices 1..n. Deterministic for a fixed family."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    edges = frozenset(
        (i, j) for j in range(2, n + 1) for i in range(1, j) if family._adjacent(i, j)
    )
    return Graph(n, edges)


def new_edges_at(family: GraphFamily, n: int) -> list[tuple[int, int]]:
    """Edges of prefix(n) absent from prefix(n-1); all are incident to vertex n."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return sorted((i, n) for i in range(1, n) if family._adjacent(i, n))


def parse_graph(text: str) -> Graph:
    """Parse the edge-list text format.

    First (non-comment) line holds the vertex count, then one "i j" edge per
    line. '#' starts a comment.
    """
    n_vertices = None
    edges = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n_vertices is None:
            if len(fields) != 1:
                raise GraphParseError(f"line {lineno}: expected vertex count, got {raw!r}")
            try:
                n_vertices = int(fields[0])
            except ValueError:
                raise GraphParseError(f"line {lineno}: vertex count is not an integer: {raw!r}")
            if n_vertices < 1:
                raise GraphParseError(f"line {lineno}: vertex count must be positive")
            continue
        if len(fields) != 2:
            raise GraphParseError(f"line {lineno}: expected 'i j', got {raw!r}")
        try:
            i, j = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphParseError(f"line {lineno}: edge endpoints are not integers: {raw!r}")
        if i == j:
            raise GraphParseError(f"line {lineno}: self-loop on vertex {i}")
        if not (1 <= i <= n_vertices and 1 <= j <= n_vertices):
            raise GraphParseError(f"line {lineno}: vertex out of range 1..{n_vertices}")
        edges.add((min(i, j), max(i, j)))
    if n_vertices is None:
        raise GraphParseError("line 1: empty graph text, vertex count missing")
    return Graph(n_vertices, frozenset(edges))


def render_graph(g: Graph) -> str:
    lines = [str(g.n_vertices)]
    lines.extend(f"{i} {j}" for i, j in g.sorted_edges())
    return "\n".join(lines) + "\n"
