"""Concept taxonomy loading and shortest-path replacement costs.

The on-disk format is line oriented::

    # nodes=3 edges=2          (optional header; checked when present)
    N java skills Java
    N oop skills Object-oriented programming
    N cpp skills C++
    E java oop
    E oop cpp

A JSON document with ``nodes`` (objects with ``concept_id``, ``category``,
``label``) and ``edges`` (two-element arrays) is accepted as well.
Edges are undirected and have unit length.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .errors import ConceptLookupError, ParseError
from .model import CostModel, is_valid_category

UNREACHABLE = None

_HEADER_RE = re.compile(r"^#\s*nodes\s*=\s*(\d+)\s+edges\s*=\s*(\d+)\s*$")


@dataclass(frozen=True)
class Node:
    concept_id: str
    category: str
    label: str


class TaxonomyGraph:
    """Immutable undirected concept graph with cached BFS distances."""

    def __init__(self, nodes, edges):
        self._nodes = {}
        for node in nodes:
            if node.concept_id in self._nodes:
                raise ParseError(f"duplicate concept_id {node.concept_id!r}")
            self._nodes[node.concept_id] = node
        adj = {cid: set() for cid in self._nodes}
        canon = set()
        for a, b in edges:
            for end in (a, b):
                if end not in self._nodes:
                    raise ParseError(f"edge endpoint {end!r} is not a declared node")
            if a == b:
                raise ParseError(f"self-loop on {a!r}")
            canon.add((a, b) if a < b else (b, a))
            adj[a].add(b)
            adj[b].add(a)
        self._edges = frozenset(canon)
        self._adj = {cid: frozenset(n) for cid, n in adj.items()}
        self._dist_cache = {}

    @property
    def nodes(self) -> dict:
        return dict(self._nodes)

    @property
    def edges(self) -> frozenset:
        return self._edges

    def __contains__(self, concept_id) -> bool:
        return concept_id in self._nodes

    def __len__(self):
        return len(self._nodes)

    def node(self, concept_id) -> Node:
        try:
            return self._nodes[concept_id]
        except KeyError:
            raise ConceptLookupError(f"unknown concept {concept_id!r}") from None

    def label(self, concept_id, default=None) -> str:
        node = self._nodes.get(concept_id)
        if node is None:
            return concept_id if default is None else default
        return node.label

    def neighbors(self, concept_id) -> frozenset:
        self.node(concept_id)
        return self._adj[concept_id]

    def vocabulary(self, category) -> list:
        """Concept ids of ``category`` in declaration order."""
        return [cid for cid, n in self._nodes.items() if n.category == category]

    def categories(self) -> list:
        seen = []
        for n in self._nodes.values():
            if n.category not in seen:
                seen.append(n.category)
        return seen

    def distances_from(self, source) -> dict:
        """BFS edge counts from ``source`` to every reachable node."""
        self.node(source)
        dist = self._dist_cache.get(source)
        if dist is None:
            dist = {source: 0}
            queue = deque([source])
            while queue:
                u = queue.popleft()
                for v in self._adj[u]:
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        queue.append(v)
            self._dist_cache[source] = dist
        return dist

    def precompute(self):
        """Fill the all-pairs cache; call before sharing across threads."""
        for cid in self._nodes:
            self.distances_from(cid)
        return self

    def __eq__(self, other):
        if not isinstance(other, TaxonomyGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __repr__(self):
        return f"TaxonomyGraph(nodes={len(self._nodes)}, edges={len(self._edges)})"


def _parse_text(text):
    nodes, edges = [], []
    declared = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER_RE.match(line)
            if m and declared is None:
                declared = (int(m.group(1)), int(m.group(2)))
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "N":
            if len(parts) < 4:
                raise ParseError("node line needs: N <concept_id> <category> <label...>", lineno)
            if not is_valid_category(parts[2]):
                raise ParseError(f"invalid category token {parts[2]!r}", lineno)
            nodes.append((lineno, Node(parts[1], parts[2], " ".join(parts[3:]))))
        elif tag == "E":
            if len(parts) != 3:
                raise ParseError("edge line needs: E <concept_id> <concept_id>", lineno)
            edges.append((lineno, parts[1], parts[2]))
        else:
            raise ParseError(f"unknown record type {tag!r}", lineno)

    seen = set()
    for lineno, node in nodes:
        if node.concept_id in seen:
            raise ParseError(f"duplicate concept_id {node.concept_id!r}", lineno)
        seen.add(node.concept_id)
    for lineno, a, b in edges:
        for end in (a, b):
            if end not in seen:
                raise ParseError(f"edge endpoint {end!r} is not a declared node", lineno)
        if a == b:
            raise ParseError(f"self-loop on {a!r}", lineno)

    graph = TaxonomyGraph([n for _, n in nodes], [(a, b) for _, a, b in edges])
    if declared is not None and declared != (len(graph), len(graph.edges)):
        raise ParseError(
            f"header declares nodes={declared[0]} edges={declared[1]}, "
            f"file has nodes={len(graph)} edges={len(graph.edges)}"
        )
    return graph


def _parse_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    try:
        nodes = [
            Node(str(n["concept_id"]), str(n["category"]), str(n.get("label", n["concept_id"])))
            for n in doc["nodes"]
        ]
        edges = [(str(a), str(b)) for a, b in doc["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed taxonomy JSON: {exc}") from None
    for n in nodes:
        if not is_valid_category(n.category):
            raise ParseError(f"invalid category token {n.category!r}")
    return TaxonomyGraph(nodes, edges)


def load_taxonomy(source: Union[bytes, str]) -> TaxonomyGraph:
    """Parse taxonomy text (edge-list format or JSON) into a graph."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if source.lstrip().startswith("{"):
        return _parse_json(source)
    return _parse_text(source)


def load_taxonomy_file(path) -> TaxonomyGraph:
    return load_taxonomy(Path(path).read_bytes())


def toy_taxonomy() -> TaxonomyGraph:
    """The bundled 68-concept demonstration taxonomy."""
    text = resources.files("matchforge.data").joinpath("toy_taxonomy.txt").read_text("utf-8")
    return load_taxonomy(text)


def dump_taxonomy(graph: TaxonomyGraph) -> str:
    lines = [f"# nodes={len(graph)} edges={len(graph.edges)}"]
    for node in graph.nodes.values():
        lines.append(f"N {node.concept_id} {node.category} {node.label}")
    for a, b in sorted(graph.edges):
        lines.append(f"E {a} {b}")
    return "\n".join(lines) + "\n"


def shortest_path_len(graph: TaxonomyGraph, a, b) -> Optional[int]:
    """Edge count of the shortest path from ``a`` to ``b``, or ``UNREACHABLE``."""
    graph.node(b)
    return graph.distances_from(a).get(b, UNREACHABLE)


@dataclass(frozen=True)
class Substitutable:
    cost: float
    path_length: int


class _NotSubstitutable:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NotSubstitutable"

    def __reduce__(self):
        return (_NotSubstitutable, ())


NOT_SUBSTITUTABLE = _NotSubstitutable()


def substitution_path(graph: TaxonomyGraph, a, b, cutoff: int) -> Optional[int]:
    """Path length usable for substitution, or None when the pair is too far apart.

    Concepts missing from the taxonomy behave as isolated nodes.
    """
    if a == b:
        return 0
    if a not in graph or b not in graph:
        return None
    d = graph.distances_from(a).get(b)
    if d is None or d > cutoff:
        return None
    return d


def replacement_cost(model: CostModel, category, a, b, graph: TaxonomyGraph):
    """Unweighted replacement cost of concept ``a`` by ``b`` within ``category``."""
    alpha = model.costs(category).alpha
    length = substitution_path(graph, a, b, model.path_cutoff)
    if length is None:
        return NOT_SUBSTITUTABLE
    return Substitutable(alpha * length, length)
