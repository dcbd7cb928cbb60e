"""Entropy ranges for states outside the set where entropy is measurable.

States are nodes of a directed accessibility graph; an edge u -> v means a
weight process from u to v exists, and composite processes make any path a
weight process too. Nodes in Sigma carry an entropy value; every other node
gets the interval between the best Sigma lower bound that reaches it and the
best Sigma upper bound it can reach.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Iterable, Mapping

import networkx as nx
import numpy as np

from .errors import GraphError, InconsistentGraphError

Node = Hashable
_S_TOL = 1e-12


class AccessibilityGraph:
    """Immutable accessibility graph with Sigma entropies.

    ``entropies`` maps every node to its entropy, or ``None`` for nodes
    outside Sigma.
    """

    def __init__(self, entropies: Mapping[Node, float | None], edges: Iterable[tuple[Node, Node]], validate: bool = True):
        g = nx.DiGraph()
        g.add_nodes_from(entropies)
        for u, v in edges:
            if u not in entropies or v not in entropies:
                raise GraphError(f"edge ({u!r}, {v!r}) references an unknown node")
            g.add_edge(u, v)
        self._g = nx.freeze(g)
        self._S = {n: (None if s is None else float(s)) for n, s in entropies.items()}
        self._desc: dict[Node, frozenset] = {}
        self._anc: dict[Node, frozenset] = {}
        if validate:
            self.validate()

    @property
    def nodes(self) -> list[Node]:
        return list(self._g.nodes)

    @property
    def edges(self) -> list[tuple[Node, Node]]:
        return list(self._g.edges)

    @property
    def sigma(self) -> dict[Node, float]:
        return {n: s for n, s in self._S.items() if s is not None}

    def entropy(self, node: Node) -> float | None:
        self._require(node)
        return self._S[node]

    def in_sigma(self, node: Node) -> bool:
        return self.entropy(node) is not None

    def _require(self, node: Node) -> None:
        if node not in self._S:
            raise GraphError(f"unknown node {node!r}")

    def descendants(self, node: Node) -> frozenset:
        """Nodes reachable from ``node`` by a path of length >= 1."""
        self._require(node)
        if node not in self._desc:
            d = set(nx.descendants(self._g, node))
            # a cycle through node makes it its own descendant
            if any(p == node or p in d for p in self._g.pred[node]):
                d.add(node)
            self._desc[node] = frozenset(d)
        return self._desc[node]

    def ancestors(self, node: Node) -> frozenset:
        """Nodes from which ``node`` is reachable by a path of length >= 1."""
        self._require(node)
        if node not in self._anc:
            a = set(nx.ancestors(self._g, node))
            if node in self.descendants(node):
                a.add(node)
            self._anc[node] = frozenset(a)
        return self._anc[node]

    def reachable(self, u: Node, v: Node) -> bool:
        """Whether a weight process (a path of length >= 1) leads from u to v."""
        return v in self.descendants(u)

    def validate(self) -> None:
        sigma = self.sigma
        for u, su in sigma.items():
            for v in self.descendants(u):
                sv = self._S[v]
                if sv is not None and sv < su - _S_TOL:
                    raise InconsistentGraphError(
                        f"path {u!r} -> {v!r} lowers the entropy from {su} to {sv}"
                    )
        for n, s in self._S.items():
            if s is None:
                _sigma_neighbours(self, n)

    @classmethod
    def from_dict(cls, data: Mapping, validate: bool = True) -> "AccessibilityGraph":
        try:
            entropies = {}
            for item in data["nodes"]:
                node = item["id"]
                if node in entropies:
                    raise GraphError(f"duplicate node id {node!r}")
                s = item.get("S")
                entropies[node] = None if s is None else float(s)
            edges = [(u, v) for u, v in data.get("edges", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed graph data: {exc}") from exc
        return cls(entropies, edges, validate=validate)

    def to_dict(self) -> dict:
        return {
            "nodes": [{"id": n, "S": s} for n, s in self._S.items()],
            "edges": [[u, v] for u, v in self._g.edges],
        }


def load_graph(path: str | Path, validate: bool = True) -> AccessibilityGraph:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise GraphError(f"graph file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise GraphError(f"cannot parse {path}: {exc}") from exc
    return AccessibilityGraph.from_dict(data, validate=validate)


def _sigma_neighbours(g: AccessibilityGraph, node: Node) -> tuple[list[float], list[float]]:
    sigma = g.sigma
    before = [sigma[u] for u in g.ancestors(node) if u in sigma]
    after = [sigma[v] for v in g.descendants(node) if v in sigma]
    if not before:
        raise GraphError(f"node {node!r} cannot be reached from any Sigma state")
    if not after:
        raise GraphError(f"node {node!r} cannot reach any Sigma state")
    return before, after


@dataclass(frozen=True)
class EntropyRangeResult:
    low: float
    high: float

    def __post_init__(self):
        if self.low > self.high + _S_TOL:
            raise InconsistentGraphError(f"entropy range is inverted: [{self.low}, {self.high}]")

    def contains(self, other: "EntropyRangeResult", tol: float = _S_TOL) -> bool:
        return self.low - tol <= other.low and other.high <= self.high + tol


def entropy_range(g: AccessibilityGraph, node: Node) -> EntropyRangeResult:
    s = g.entropy(node)
    if s is not None:
        return EntropyRangeResult(s, s)
    before, after = _sigma_neighbours(g, node)
    return EntropyRangeResult(max(before), min(after))


class Verdict(str, enum.Enum):
    FORBIDDEN = "forbidden"
    UNDETERMINED = "not determined by ranges"


def assert_nondecrease(g: AccessibilityGraph, a1: Node, a2: Node) -> Verdict:
    """Decide from entropy ranges whether a weight process a2 -> a1 is impossible.

    Raises ``InconsistentGraphError`` when the ranges forbid the process but
    the graph contains it anyway.
    """
    r1, r2 = entropy_range(g, a1), entropy_range(g, a2)
    if r2.low > r1.high:
        if g.reachable(a2, a1):
            raise InconsistentGraphError(
                f"ranges forbid {a2!r} -> {a1!r} (low {r2.low} > high {r1.high}) but the graph has such a path"
            )
        return Verdict.FORBIDDEN
    return Verdict.UNDETERMINED


def product_graph(ga: AccessibilityGraph, gb: AccessibilityGraph) -> AccessibilityGraph:
    """Accessibility graph of the composite when A and B evolve through separate weight processes."""
    reach_a = {a: ga.descendants(a) | {a} for a in ga.nodes}
    reach_b = {b: gb.descendants(b) | {b} for b in gb.nodes}
    nodes = [(a, b) for a in ga.nodes for b in gb.nodes]
    entropies = {}
    for a, b in nodes:
        sa, sb = ga.entropy(a), gb.entropy(b)
        entropies[(a, b)] = None if sa is None or sb is None else sa + sb
    edges = [
        ((a, b), (a2, b2))
        for a, b in nodes
        for a2 in reach_a[a]
        for b2 in reach_b[b]
        if (a2, b2) != (a, b)
    ]
    return AccessibilityGraph(entropies, edges, validate=False)


@dataclass(frozen=True)
class AdditivityVerdict:
    holds: bool
    product_range: EntropyRangeResult
    bound: EntropyRangeResult


def check_range_additivity(
    ga: AccessibilityGraph, gb: AccessibilityGraph, node_a: Node, node_b: Node, product: AccessibilityGraph | None = None
) -> AdditivityVerdict:
    """Check that the composite's range lies inside the sum of the component ranges."""
    ra, rb = entropy_range(ga, node_a), entropy_range(gb, node_b)
    g = product if product is not None else product_graph(ga, gb)
    rab = entropy_range(g, (node_a, node_b))
    bound = EntropyRangeResult(ra.low + rb.low, ra.high + rb.high)
    return AdditivityVerdict(bound.contains(rab), rab, bound)


def random_accessibility_graph(
    rng: np.random.Generator, n_nodes: int, edge_prob: float = 0.3, sigma_prob: float = 0.5
) -> AccessibilityGraph:
    """Random valid graph: latent entropies never decrease along edges; Sigma reveals some of them.

    The lowest and highest latent nodes always belong to Sigma, and every
    other node is linked to them when it lacks a Sigma ancestor or descendant.
    """
    if n_nodes < 2:
        raise GraphError("need at least 2 nodes")
    latent = np.sort(rng.uniform(0.0, 10.0, size=n_nodes))
    in_sigma = rng.uniform(size=n_nodes) < sigma_prob
    in_sigma[0] = in_sigma[-1] = True
    edges = {(i, j) for i in range(n_nodes) for j in range(i + 1, n_nodes) if rng.uniform() < edge_prob}
    g = nx.DiGraph()
    g.add_nodes_from(range(n_nodes))
    g.add_edges_from(edges)
    for x in range(1, n_nodes - 1):
        if in_sigma[x]:
            continue
        if not any(in_sigma[u] for u in nx.ancestors(g, x)):
            g.add_edge(0, x)
        if not any(in_sigma[v] for v in nx.descendants(g, x)):
            g.add_edge(x, n_nodes - 1)
    entropies = {i: (float(latent[i]) if in_sigma[i] else None) for i in range(n_nodes)}
    return AccessibilityGraph(entropies, g.edges)
