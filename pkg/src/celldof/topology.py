"""Graph model of a cell-based converter active network.

A converter arm (controllable voltage source in series with a conductance or
inductance) is one oriented edge; converter terminals are vertices.  The
classical arrangements are complete k-partite graphs, so a generator for
those is provided alongside the incidence / degree / adjacency / Laplacian
constructions.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ratmat import RationalMatrix, as_fraction

INFINITE = None  # external conductance marker: ideally stiff connection


def _per_edge(value, m: int, what: str) -> tuple[Fraction, ...]:
    """Broadcast a scalar or normalize a per-edge sequence of rationals."""
    if value is None:
        return tuple(Fraction(1) for _ in range(m))
    if isinstance(value, (int, str, Fraction)):
        return tuple(as_fraction(value) for _ in range(m))
    vals = tuple(as_fraction(x) for x in value)
    if len(vals) != m:
        raise ValueError(f"{what}: expected {m} entries, got {len(vals)}")
    return vals


@dataclass(frozen=True)
class Topology:
    """Oriented graph with per-edge arm parameters.

    ``partitions`` is optional structural metadata (disjoint vertex sets
    covering all vertices).  ``external_conductance`` holds one entry per
    vertex; ``None`` inside the tuple means an ideally stiff (infinite)
    external connection.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    partitions: tuple[tuple[int, ...], ...] | None = None
    edge_conductance: tuple[Fraction, ...] | None = None
    edge_inductance: tuple[Fraction, ...] | None = None
    external_conductance: tuple[Fraction | None, ...] | None = None

    def __post_init__(self):
        n = self.n_vertices
        if n < 1:
            raise ValueError("topology needs at least one vertex")
        edges = tuple((int(t), int(h)) for t, h in self.edges)
        object.__setattr__(self, "edges", edges)
        seen = set()
        for tail, head in edges:
            if not (0 <= tail < n and 0 <= head < n):
                raise ValueError(f"edge ({tail},{head}) out of range for {n} vertices")
            if tail == head:
                raise ValueError(f"self-loop at vertex {tail}")
            key = frozenset((tail, head))
            if key in seen:
                raise ValueError(f"duplicate undirected edge {{{tail},{head}}}")
            seen.add(key)
        if self.partitions is not None:
            parts = tuple(tuple(int(v) for v in p) for p in self.partitions)
            object.__setattr__(self, "partitions", parts)
            flat = [v for p in parts for v in p]
            if sorted(flat) != list(range(n)):
                raise ValueError("partitions must be disjoint and cover all vertices")
        m = len(edges)
        g = _per_edge(self.edge_conductance, m, "edge_conductance")
        l = _per_edge(self.edge_inductance, m, "edge_inductance")
        if any(x <= 0 for x in g):
            raise ValueError("edge conductances must be positive")
        if any(x <= 0 for x in l):
            raise ValueError("edge inductances must be positive")
        object.__setattr__(self, "edge_conductance", g)
        object.__setattr__(self, "edge_inductance", l)
        if self.external_conductance is not None:
            ext = tuple(
                None if x is None else as_fraction(x) for x in self.external_conductance
            )
            if len(ext) != n:
                raise ValueError(f"external_conductance: expected {n} entries, got {len(ext)}")
            if any(x is not None and x < 0 for x in ext):
                raise ValueError("external conductances must be >= 0")
            object.__setattr__(self, "external_conductance", ext)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> list[tuple[int, int]]:
        """(neighbor, edge index) pairs for vertex v, sorted by neighbor index."""
        out = []
        for j, (tail, head) in enumerate(self.edges):
            if tail == v:
                out.append((head, j))
            elif head == v:
                out.append((tail, j))
        out.sort()
        return out

    def uniform_conductance(self) -> Fraction | None:
        """The common arm conductance, or None when weights are heterogeneous."""
        if not self.edges:
            return Fraction(1)
        first = self.edge_conductance[0]
        return first if all(g == first for g in self.edge_conductance) else None


def complete_kpartite(sizes: Sequence[int]) -> Topology:
    """Complete k-partite graph on consecutive partitions of the given sizes.

    Edge order is lexicographic by (partition pair, tail, head) with the
    lower vertex index as tail, which makes generated incidence matrices
    reproducible across runs.
    """
    sizes = list(sizes)
    if not sizes:
        raise ValueError("need at least one partition size")
    if any(int(s) < 1 for s in sizes):
        raise ValueError("partition sizes must be >= 1")
    sizes = [int(s) for s in sizes]
    bounds = [0]
    for s in sizes:
        bounds.append(bounds[-1] + s)
    parts = [tuple(range(bounds[i], bounds[i + 1])) for i in range(len(sizes))]
    edges = []
    for i in range(len(sizes)):
        for j in range(i + 1, len(sizes)):
            for t in parts[i]:
                for h in parts[j]:
                    edges.append((t, h))
    return Topology(n_vertices=bounds[-1], edges=tuple(edges), partitions=tuple(parts))


def incidence(t: Topology) -> RationalMatrix:
    """Edge-by-vertex incidence matrix: -1 at tail, +1 at head."""
    rows = []
    for tail, head in t.edges:
        row = [0] * t.n_vertices
        row[tail] = -1
        row[head] = 1
        rows.append(row)
    return RationalMatrix(rows, ncols=t.n_vertices)


def laplacian(t: Topology) -> RationalMatrix:
    """Weighted graph Laplacian B^T diag(w) B with w = per-edge conductances."""
    b = incidence(t)
    w = RationalMatrix.diagonal(t.edge_conductance)
    return b.T * w * b


def degree_adjacency(t: Topology) -> tuple[RationalMatrix, RationalMatrix]:
    """Unit-weight degree and adjacency matrices (D - A equals the unit Laplacian)."""
    n = t.n_vertices
    deg = [0] * n
    adj = [[0] * n for _ in range(n)]
    for tail, head in t.edges:
        deg[tail] += 1
        deg[head] += 1
        adj[tail][head] = 1
        adj[head][tail] = 1
    return RationalMatrix.diagonal(deg), RationalMatrix(adj, ncols=n)


def connected_components(t: Topology) -> tuple[tuple[int, ...], ...]:
    """Vertex sets of the connected components, BFS from the lowest index."""
    unseen = set(range(t.n_vertices))
    comps = []
    while unseen:
        start = min(unseen)
        comp = [start]
        unseen.discard(start)
        queue = [start]
        while queue:
            v = queue.pop(0)
            for w, _ in t.neighbors(v):
                if w in unseen:
                    unseen.discard(w)
                    comp.append(w)
                    queue.append(w)
        comps.append(tuple(sorted(comp)))
    return tuple(comps)


# -- JSON interchange -------------------------------------------------------

def _frac_str(x: Fraction) -> str:
    return str(x)


def topology_to_dict(t: Topology) -> dict:
    doc: dict = {
        "n": t.n_vertices,
        "edges": [[tail, head] for tail, head in t.edges],
    }
    if t.partitions is not None:
        doc["partitions"] = [list(p) for p in t.partitions]
    doc["g_arm"] = [_frac_str(g) for g in t.edge_conductance]
    doc["l_arm"] = [_frac_str(x) for x in t.edge_inductance]
    if t.external_conductance is not None:
        doc["g_ext"] = ["inf" if x is None else _frac_str(x) for x in t.external_conductance]
    return doc


def _parse_ext(value):
    if value == "inf":
        return None
    return as_fraction(value)


def topology_from_dict(doc: dict) -> Topology:
    try:
        n = int(doc["n"])
        edges = tuple((int(e[0]), int(e[1])) for e in doc["edges"])
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed topology document: {exc}") from exc
    partitions = None
    if doc.get("partitions") is not None:
        partitions = tuple(tuple(int(v) for v in p) for p in doc["partitions"])
    g_ext = None
    if doc.get("g_ext") is not None:
        g_ext = tuple(_parse_ext(x) for x in doc["g_ext"])
    return Topology(
        n_vertices=n,
        edges=edges,
        partitions=partitions,
        edge_conductance=doc.get("g_arm"),
        edge_inductance=doc.get("l_arm"),
        external_conductance=g_ext,
    )


def load_topology(path: str) -> Topology:
    with open(path, "r", encoding="utf-8") as fh:
        return topology_from_dict(json.load(fh))
