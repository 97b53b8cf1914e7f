"""Directed graph model, edge-list I/O and synthetic generators.

Graphs are immutable.  Out-edge lists are stored sorted, so two graphs
compare equal exactly when their node counts, edge sets and labels agree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .errors import FormatError, ParameterError, ParseError

_INT_TOKEN = re.compile(r"^[0-9]+$")
_NODES_HEADER = re.compile(r"^#\s*nodes\s*:?\s*([0-9]+)\s*$")


class NodeMap:
    """Insertion-ordered bijection between labels and node indices."""

    def __init__(self, labels: Iterable[str] = ()):
        self._index: dict[str, int] = {}
        for label in labels:
            self.add(label)

    def add(self, label: str) -> int:
        idx = self._index.get(label)
        if idx is None:
            idx = len(self._index)
            self._index[label] = idx
        return idx

    def index(self, label: str) -> int:
        return self._index[label]

    def labels(self) -> tuple[str, ...]:
        return tuple(self._index)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def __len__(self) -> int:
        return len(self._index)


@dataclass(frozen=True)
class DirectedGraph:
    n_nodes: int
    out_edges: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if len(self.out_edges) != self.n_nodes:
            raise ParameterError("out_edges must have one entry per node")
        if self.labels is not None and len(self.labels) != self.n_nodes:
            raise ParameterError("labels must have one entry per node")
        for src, targets in enumerate(self.out_edges):
            for a, b in zip(targets, targets[1:]):
                if a >= b:
                    raise ParameterError(f"out-edges of node {src} must be strictly increasing")
            if targets and (targets[0] < 0 or targets[-1] >= self.n_nodes):
                raise ParameterError(f"node {src} has a target outside [0, {self.n_nodes})")

    @classmethod
    def from_edges(
        cls,
        n_nodes: int,
        edges: Iterable[tuple[int, int]],
        labels: Sequence[str] | None = None,
    ) -> "DirectedGraph":
        """Build a graph, collapsing duplicate edges."""
        buckets: list[set[int]] = [set() for _ in range(n_nodes)]
        for src, dst in edges:
            if not (0 <= src < n_nodes and 0 <= dst < n_nodes):
                raise ParameterError(f"edge ({src}, {dst}) outside [0, {n_nodes})")
            buckets[src].add(dst)
        out = tuple(tuple(sorted(b)) for b in buckets)
        return cls(n_nodes, out, None if labels is None else tuple(labels))

    @cached_property
    def n_edges(self) -> int:
        return sum(len(t) for t in self.out_edges)

    @cached_property
    def out_degree(self) -> np.ndarray:
        return np.array([len(t) for t in self.out_edges], dtype=np.int64)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) of the out-adjacency, as int64 arrays."""
        indptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
        np.cumsum(self.out_degree, out=indptr[1:])
        indices = np.fromiter(
            (t for targets in self.out_edges for t in targets), dtype=np.int64, count=self.n_edges
        )
        return indptr, indices

    def edges(self) -> Iterator[tuple[int, int]]:
        for src, targets in enumerate(self.out_edges):
            for dst in targets:
                yield src, dst

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.edges())

    def node_map(self) -> NodeMap:
        if self.labels is None:
            return NodeMap(str(i) for i in range(self.n_nodes))
        return NodeMap(self.labels)


# ---------------------------------------------------------------- I/O


def load_edge_list(source: IO[str] | Iterable[str], n_nodes: int | None = None) -> DirectedGraph:
    """Parse an edge list from a text stream.

    Integer tokens are used as node indices directly.  String tokens are
    mapped to indices in order of first appearance and kept as labels.
    A ``# nodes: N`` comment fixes the node count, which keeps isolated
    nodes alive across a write/load round trip.
    """
    pairs: list[tuple[str, str]] = []
    style = None
    header_n = None
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _NODES_HEADER.match(line)
            if m:
                header_n = int(m.group(1))
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"expected 2 tokens, got {len(tokens)}", line=lineno)
        kinds = {"int" if _INT_TOKEN.match(t) else "str" for t in tokens}
        if len(kinds) > 1 or (style is not None and kinds != {style}):
            raise FormatError("integer and string node tokens are mixed", line=lineno)
        style = kinds.pop()
        pairs.append((tokens[0], tokens[1]))

    if style == "str":
        nodes = NodeMap()
        edges = [(nodes.add(a), nodes.add(b)) for a, b in pairs]
        return DirectedGraph.from_edges(len(nodes), edges, nodes.labels())

    edges = [(int(a), int(b)) for a, b in pairs]
    n = max((max(e) for e in edges), default=-1) + 1
    for hint in (header_n, n_nodes):
        if hint is not None:
            if hint < n:
                raise ParseError(f"node count {hint} is smaller than the largest index {n - 1}")
            n = hint
    return DirectedGraph.from_edges(n, edges)


def write_edge_list(g: DirectedGraph, sink: IO[str]) -> None:
    """Write integer edges, one per line, preceded by a node-count header."""
    sink.write(f"# nodes: {g.n_nodes}\n")
    for src, dst in g.edges():
        sink.write(f"{src} {dst}\n")


def load_labels(source: IO[str] | Iterable[str]) -> list[str]:
    """Parse an ``index<TAB>label`` file into a dense label list."""
    found: dict[int, str] = {}
    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        idx, sep, label = line.partition("\t")
        if not sep or not _INT_TOKEN.match(idx):
            raise ParseError("expected 'index<TAB>label'", line=lineno)
        found[int(idx)] = label
    if sorted(found) != list(range(len(found))):
        raise ParseError("label indices must cover 0..n-1 without gaps")
    return [found[i] for i in range(len(found))]


def write_labels(g: DirectedGraph, sink: IO[str]) -> None:
    for idx, label in enumerate(g.node_map().labels()):
        sink.write(f"{idx}\t{label}\n")


def read_graph(edges_path: str | Path, labels_path: str | Path | None = None) -> DirectedGraph:
    """Load an edge-list file plus an optional companion label file."""
    labels = None
    if labels_path is not None:
        with open(labels_path, encoding="utf-8") as fh:
            labels = load_labels(fh)
    with open(edges_path, encoding="utf-8") as fh:
        g = load_edge_list(fh, n_nodes=None if labels is None else len(labels))
    if labels is not None:
        if g.labels is not None:
            raise FormatError("a label file cannot accompany a string-token edge list")
        if g.n_nodes != len(labels):
            raise ParseError(f"edge list has {g.n_nodes} nodes but {len(labels)} labels were given")
        g = DirectedGraph(g.n_nodes, g.out_edges, tuple(labels))
    return g


def write_graph(g: DirectedGraph, edges_path: str | Path, labels_path: str | Path | None = None) -> None:
    with open(edges_path, "w", encoding="utf-8") as fh:
        write_edge_list(g, fh)
    if labels_path is not None:
        with open(labels_path, "w", encoding="utf-8") as fh:
            write_labels(g, fh)


# ---------------------------------------------------------- transforms


def invert_links(g: DirectedGraph) -> DirectedGraph:
    return DirectedGraph.from_edges(g.n_nodes, ((d, s) for s, d in g.edges()), g.labels)


def to_undirected(g: DirectedGraph) -> DirectedGraph:
    """Symmetric closure of the edge set."""

    def both():
        for s, d in g.edges():
            yield s, d
            yield d, s

    return DirectedGraph.from_edges(g.n_nodes, both(), g.labels)


# ---------------------------------------------------------- generators


def _require_positive(**kwargs):
    for name, value in kwargs.items():
        if value < 1:
            raise ParameterError(f"{name} must be >= 1, got {value}")


def generate_chain(n: int) -> DirectedGraph:
    _require_positive(n=n)
    return DirectedGraph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def generate_cycle(n: int) -> DirectedGraph:
    _require_positive(n=n)
    return DirectedGraph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def generate_grid(w: int, h: int) -> DirectedGraph:
    """Directed w x h lattice; node (x, y) links right and down."""
    _require_positive(w=w, h=h)

    def edges():
        for y in range(h):
            for x in range(w):
                i = y * w + x
                if x + 1 < w:
                    yield i, i + 1
                if y + 1 < h:
                    yield i, i + w

    return DirectedGraph.from_edges(w * h, edges())


def generate_preferential(n: int, m: int, seed: int) -> DirectedGraph:
    """Growing network with in-degree preferential attachment.

    Node t links to min(m, t) distinct earlier nodes, each drawn with
    probability proportional to (in-degree + 1).  Repeated draws of the
    same target are discarded and redrawn.
    """
    _require_positive(m=m)
    if n <= m:
        raise ParameterError(f"need n > m, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    # every node owns one ticket plus one per incoming link
    tickets: list[int] = [0]
    edges = []
    for t in range(1, n):
        chosen: list[int] = []
        while len(chosen) < min(m, t):
            target = tickets[int(rng.integers(len(tickets)))]
            if target not in chosen:
                chosen.append(target)
        for target in chosen:
            edges.append((t, target))
            tickets.append(target)
        tickets.append(t)
    return DirectedGraph.from_edges(n, edges)


def random_digraph(n: int, mean_degree: float, seed: int, dangling_fraction: float = 0.0) -> DirectedGraph:
    """Erdos-Renyi style directed graph, used as a test corpus.

    A ``dangling_fraction`` of the nodes (chosen at random) gets no
    out-links at all.
    """
    _require_positive(n=n)
    rng = np.random.default_rng(seed)
    p = min(1.0, mean_degree / n)
    mask = rng.random((n, n)) < p
    if dangling_fraction > 0:
        mask[rng.random(n) < dangling_fraction, :] = False
    src, dst = np.nonzero(mask)
    return DirectedGraph.from_edges(n, zip(src.tolist(), dst.tolist()))
