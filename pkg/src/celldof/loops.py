"""Internal circulating-current degrees of freedom.

Arm sources can drive currents around cycles of the edge graph that are
invisible at every terminal.  These live in the cycle space (the kernel of
B^T), which is orthogonal to anything generated from nodal modes, so the
full arm current is the superposition of the nodal part and the loop part.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ratmat import RationalMatrix, as_fraction, gram_schmidt
from .spectral import ModalMatrix, SpectralBasis, edge_currents_from_modes
from .topology import Topology, incidence


class InvalidLoopError(ValueError):
    """A claimed loop row is not a circulation (violates a vertex balance)."""


@dataclass(frozen=True)
class LoopBasis:
    """Loop-sign rows, their rank, and an orthogonal rational basis.

    ``columns`` spans the same space as the sign rows; squared norms are kept
    separate so callers can apply the (generally irrational) normalization in
    floating point only where needed.
    """

    signs: RationalMatrix          # k x m rows of {-1, 0, +1}
    rank: int
    columns: RationalMatrix        # m x r orthogonal columns
    squared_norms: tuple[Fraction, ...]
    labels: tuple[str, ...]

    @property
    def n_loops(self) -> int:
        return self.rank

    def edge_members(self) -> tuple[tuple[int, ...], ...]:
        """Edge indices participating in each basis column."""
        return tuple(
            tuple(i for i, x in enumerate(self.columns.col(j)) if x != 0)
            for j in range(self.columns.ncols)
        )


def fundamental_cycles(t: Topology) -> RationalMatrix:
    """Loop-sign rows from the fundamental cycles of a deterministic forest.

    The spanning forest is grown breadth-first from vertex 0 (components in
    increasing start order, neighbors visited by index); each non-tree edge
    yields one row, oriented so that edge carries +1.
    """
    n, m = t.n_vertices, t.n_edges
    parent_edge: dict[int, tuple[int, int]] = {}  # vertex -> (parent, edge idx)
    tree_edges: set[int] = set()
    seen: set[int] = set()
    for start in range(n):
        if start in seen:
            continue
        seen.add(start)
        queue = [start]
        while queue:
            v = queue.pop(0)
            for w, eidx in t.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    parent_edge[w] = (v, eidx)
                    tree_edges.add(eidx)
                    queue.append(w)

    def path_to_root(v: int) -> list[tuple[int, int, int]]:
        # (edge idx, from, to) hops walking v up to its root
        hops = []
        while v in parent_edge:
            p, eidx = parent_edge[v]
            hops.append((eidx, v, p))
            v = p
        return hops

    rows = []
    for eidx, (tail, head) in enumerate(t.edges):
        if eidx in tree_edges:
            continue
        row = [Fraction(0)] * m
        row[eidx] = Fraction(1)
        up_tail = path_to_root(tail)
        up_head = path_to_root(head)
        # strip the common suffix above the meeting point
        while up_tail and up_head and up_tail[-1][0] == up_head[-1][0]:
            up_tail.pop()
            up_head.pop()
        # cycle runs tail -> root-ward along up_tail reversed? no: traverse
        # head up to the meet, then down to tail: head-side hops go with the
        # walk, tail-side hops are traversed backwards.
        for hop_eidx, frm, to in up_head:
            sign = 1 if t.edges[hop_eidx] == (frm, to) else -1
            row[hop_eidx] += sign
        for hop_eidx, frm, to in up_tail:
            sign = 1 if t.edges[hop_eidx] == (to, frm) else -1
            row[hop_eidx] += sign
        rows.append(row)
    return RationalMatrix(rows, ncols=m)


def loop_basis(t: Topology, signs: RationalMatrix) -> LoopBasis:
    """Orthogonal rational basis of the loop space spanned by sign rows."""
    b_t = incidence(t).T
    for k, row in enumerate(signs.rows):
        balance = b_t.matvec(row)
        for v, val in enumerate(balance):
            if val != 0:
                raise InvalidLoopError(
                    f"loop row {k} is not a circulation: vertex {v} balance {val}"
                )
    ortho, sqnorms = gram_schmidt(signs.rows)
    columns = RationalMatrix.from_columns(ortho, nrows=t.n_edges)
    labels = tuple(f"phi{i + 1}" for i in range(len(ortho)))
    return LoopBasis(
        signs=signs,
        rank=len(ortho),
        columns=columns,
        squared_norms=sqnorms,
        labels=labels,
    )


def topology_loops(t: Topology) -> LoopBasis:
    return loop_basis(t, fundamental_cycles(t))


def loop_dofs(x_e: Sequence, lb: LoopBasis) -> tuple[Fraction, ...]:
    """Project an edge vector onto the (unnormalized) loop basis columns."""
    vals = tuple(as_fraction(x) for x in x_e)
    return lb.columns.T.matvec(vals)


def edge_currents_full(
    t: Topology,
    basis: SpectralBasis,
    modal: ModalMatrix,
    i_dec: Sequence,
    lb: LoopBasis | None = None,
    i_loop: Sequence | None = None,
) -> tuple[Fraction, ...]:
    """Arm currents from nodal mode currents plus circulating loop currents.

    Loop coordinates are taken against the unnormalized rational columns.
    """
    nodal = edge_currents_from_modes(t, basis, modal, i_dec)
    if i_loop is None or not len(tuple(i_loop)):
        return nodal
    if lb is None:
        raise ValueError("loop currents supplied without a loop basis")
    vals = tuple(as_fraction(x) for x in i_loop)
    if len(vals) != lb.columns.ncols:
        raise ValueError(f"expected {lb.columns.ncols} loop currents, got {len(vals)}")
    circulating = lb.columns.matvec(vals)
    return tuple(a + b for a, b in zip(nodal, circulating))
