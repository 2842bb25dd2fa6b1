"""Port structure analysis and topology classification.

Two independent notions of port decoupling are computed:

* mode supports: a nodal mode whose eigenvector lives entirely inside one
  terminal subset is a dedicated handle for that subset;
* injection transfer: a port pair is current-decoupled when every balanced
  current injection at one port produces zero voltage difference across the
  other, solved exactly on the conductance Laplacian.

Galvanic isolation is a pure connectivity question.  The (GIP, DCP) pair
maps onto four topology categories CT-1..CT-4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .ratmat import RationalMatrix
from .spectral import SpectralBasis
from .topology import Topology, connected_components, laplacian


@dataclass(frozen=True)
class PortSpec:
    """Named ordered vertex subsets acting as ports.

    Ports may share a terminal (a common return node); two ports with the
    same vertex set are rejected.
    """

    ports: tuple[tuple[str, tuple[int, ...]], ...]

    def __post_init__(self):
        if not self.ports:
            raise ValueError("need at least one port")
        seen = []
        for name, vertices in self.ports:
            if not vertices:
                raise ValueError(f"port {name!r} is empty")
            if len(set(vertices)) != len(vertices):
                raise ValueError(f"port {name!r} repeats a vertex")
            vs = frozenset(vertices)
            if vs in seen:
                raise ValueError(f"two ports share the same vertex set {sorted(vs)}")
            seen.append(vs)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "PortSpec":
        ports = doc.get("ports")
        if not isinstance(ports, Mapping):
            raise ValueError('ports document must look like {"ports": {"P1": [0, 2]}}')
        return cls(tuple((str(k), tuple(int(v) for v in vs)) for k, vs in ports.items()))

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.ports)


@dataclass(frozen=True)
class Classification:
    gip: bool
    dcp: bool
    category: str
    forced_couplings: tuple[tuple[str, str], ...] = ()

    @property
    def synthetic(self) -> bool:
        return bool(self.forced_couplings)


def category_for(gip: bool, dcp: bool) -> str:
    return {
        (True, False): "CT-1",
        (True, True): "CT-2",
        (False, True): "CT-3",
        (False, False): "CT-4",
    }[(bool(gip), bool(dcp))]


def _validate_ports(t: Topology, spec: PortSpec) -> None:
    for name, vertices in spec.ports:
        for v in vertices:
            if not 0 <= v < t.n_vertices:
                raise ValueError(f"port {name!r} names vertex {v} outside the topology")


def galvanically_isolated(t: Topology, spec: PortSpec) -> bool:
    """True when no conductive path joins vertices of different ports."""
    _validate_ports(t, spec)
    comp_of = {}
    for k, comp in enumerate(connected_components(t)):
        for v in comp:
            comp_of[v] = k
    used: dict[int, str] = {}
    for name, vertices in spec.ports:
        for v in vertices:
            c = comp_of[v]
            if used.get(c, name) != name:
                return False
            used[c] = name
    return True


def _grounded_response(
    l_mat: RationalMatrix,
    comp: Sequence[int],
    injection: Mapping[int, Fraction],
) -> dict[int, Fraction]:
    """Exact nodal voltages on one component for a balanced injection."""
    interior = [v for v in comp[1:]]
    response = {comp[0]: Fraction(0)}
    if not interior:
        return response
    reduced = l_mat.submatrix(interior, interior)
    rhs = [injection.get(v, Fraction(0)) for v in interior]
    sol = reduced.solve(rhs)
    response.update(dict(zip(interior, sol)))
    return response


def current_decoupled(t: Topology, spec: PortSpec) -> bool:
    """Injection-transfer test for every ordered port pair.

    The injection space of a port is spanned by consecutive terminal
    differences, restricted per connected component so each injection is
    physical.  Voltage differences are only meaningful between observed
    terminals sharing a component.
    """
    _validate_ports(t, spec)
    l_mat = laplacian(t)
    comps = connected_components(t)
    comp_of = {}
    for k, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = k
    for a_name, a_vertices in spec.ports:
        injections = []
        for k in range(len(comps)):
            local = [v for v in a_vertices if comp_of[v] == k]
            for u, v in zip(local, local[1:]):
                injections.append((k, {u: Fraction(1), v: Fraction(-1)}))
        for b_name, b_vertices in spec.ports:
            if b_name == a_name:
                continue
            for comp_idx, injection in injections:
                response = _grounded_response(l_mat, comps[comp_idx], injection)
                observed = [
                    v for v in b_vertices if comp_of[v] == comp_idx
                ]
                for u, v in zip(observed, observed[1:]):
                    if response[u] != response[v]:
                        return False
    return True


def classify_ports(
    t: Topology,
    spec: PortSpec,
    forced_couplings: Sequence[tuple[str, str]] = (),
) -> Classification:
    """GIP/DCP classification of a port arrangement.

    ``forced_couplings`` declares port pairs tied together by external or
    source-side behaviour the conductance graph cannot express; any such
    declaration switches current decoupling off (and marks the result
    synthetic).
    """
    _validate_ports(t, spec)
    names = spec.names()
    for a, b in forced_couplings:
        if a not in names or b not in names:
            raise ValueError(f"forced coupling names unknown port: {(a, b)}")
    gip = galvanically_isolated(t, spec)
    dcp = current_decoupled(t, spec) and not forced_couplings
    return Classification(
        gip=gip,
        dcp=dcp,
        category=category_for(gip, dcp),
        forced_couplings=tuple(forced_couplings),
    )


# -- decoupled ports from mode supports -----------------------------------------

@dataclass(frozen=True)
class ModeAssignment:
    label: str
    eigenvalue: Fraction
    partition: int | None  # index into the partition list, None if unassigned


@dataclass(frozen=True)
class PortReport:
    assignments: tuple[ModeAssignment, ...]
    ports: tuple[tuple[tuple[int, ...], tuple[str, ...]], ...]

    def port_vertex_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(vertices) for vertices, _ in self.ports)


def decoupled_ports(
    basis: SpectralBasis, partitions: Sequence[Sequence[int]]
) -> PortReport:
    """Assign modes to the terminal subsets their eigenvectors live in.

    A partition owning at least one dedicated mode is an independently
    drivable port; the all-terminal modes stay unassigned.
    """
    parts = [tuple(p) for p in partitions]
    assignments = []
    for j, (label, ev) in enumerate(zip(basis.labels, basis.eigenvalues)):
        support = {i for i, x in enumerate(basis.vectors.col(j)) if x != 0}
        assigned = None
        for k, p in enumerate(parts):
            if support and support <= set(p):
                assigned = k
                break
        assignments.append(ModeAssignment(label=label, eigenvalue=ev, partition=assigned))
    ports = []
    for k, p in enumerate(parts):
        owned = tuple(a.label for a in assignments if a.partition == k)
        if owned:
            ports.append((tuple(p), owned))
    return PortReport(assignments=tuple(assignments), ports=tuple(ports))


def partition_mode_dimension(
    basis: SpectralBasis, eigenvalue, partition: Sequence[int]
) -> int:
    """Dimension of the eigenspace slice supported inside one partition.

    Basis-independent: intersects the eigenspace with the coordinate
    subspace of the partition, so it is stable under any re-orthogonalization
    of degenerate eigenspaces.
    """
    ev = Fraction(eigenvalue)
    cols = [
        basis.vectors.col(j) for j, e in enumerate(basis.eigenvalues) if e == ev
    ]
    if not cols:
        return 0
    inside = set(partition)
    outside = [i for i in range(basis.n) if i not in inside]
    if not outside:
        return len(cols)
    w = RationalMatrix.from_columns(cols, nrows=basis.n)
    w_out = w.submatrix(outside, range(w.ncols))
    return len(w_out.nullspace())


# -- Clarke transition -----------------------------------------------------------

_SQRT3 = math.sqrt(3.0)

#: published transition matrix for the star topology, kept for comparison
REFERENCE_TRANSITION = (
    (0.0, -1.0 / 3.0, -1.0 / 3.0),
    (
        4.0 * (math.sqrt(3.0) - math.sqrt(2.0)) / 9.0,
        math.sqrt(3.0) / 9.0,
        -math.sqrt(2.0) / 9.0,
    ),
    (4.0 / 3.0, 0.0, 0.0),
)


def clarke_matrix(variant: str = "amplitude") -> tuple[tuple[float, ...], ...]:
    """Three-phase alpha-beta-zero transform, amplitude- or power-invariant."""
    if variant == "amplitude":
        s = 2.0 / 3.0
        zero = (0.5 * s, 0.5 * s, 0.5 * s)
    elif variant == "power":
        s = math.sqrt(2.0 / 3.0)
        r = 1.0 / math.sqrt(2.0)
        zero = (r * s, r * s, r * s)
    else:
        raise ValueError(f"unknown Clarke variant {variant!r}")
    return (
        (s, -0.5 * s, -0.5 * s),
        (0.0, _SQRT3 / 2.0 * s, -_SQRT3 / 2.0 * s),
        zero,
    )


@dataclass(frozen=True)
class ClarkeTransition:
    variant: str
    transition: tuple[tuple[float, ...], ...]  # T with T * reduced = C
    clarke: tuple[tuple[float, ...], ...]
    residual: float
    reference_max_diff: float


def solve_transition(
    target: Sequence[Sequence[float]], source: RationalMatrix
) -> tuple[tuple[float, ...], ...]:
    """T with T * source = target, via the exact rational inverse of source."""
    inv = source.inverse()
    inv_f = inv.as_float()
    n = source.nrows
    return tuple(
        tuple(sum(target[i][k] * inv_f[k][j] for k in range(n)) for j in range(n))
        for i in range(len(target))
    )


def clarke_transition(basis: SpectralBasis, variant: str = "amplitude") -> ClarkeTransition:
    """Transition from the star-topology mode transform to the Clarke frame.

    The hub terminal (vertex 0) is fixed to zero and the zero mode dropped,
    leaving an invertible 3x3 reduced transform R; T solves T R = C exactly
    up to float rounding.
    """
    if basis.n != 4 or sorted(basis.eigenvalues) != [0, 1, 1, 4]:
        raise ValueError("Clarke transition is defined for the star (K_{3,1}) basis")
    zero_row = basis.eigenvalues.index(Fraction(0))
    keep_rows = [i for i in range(4) if i != zero_row]
    reduced = basis.vectors_inv.submatrix(keep_rows, [1, 2, 3])
    c = clarke_matrix(variant)
    t_mat = solve_transition(c, reduced)
    red_f = reduced.as_float()
    residual = max(
        abs(sum(t_mat[i][k] * red_f[k][j] for k in range(3)) - c[i][j])
        for i in range(3)
        for j in range(3)
    )
    ref_diff = max(
        abs(t_mat[i][j] - REFERENCE_TRANSITION[i][j]) for i in range(3) for j in range(3)
    )
    return ClarkeTransition(
        variant=variant,
        transition=t_mat,
        clarke=c,
        residual=residual,
        reference_max_diff=ref_diff,
    )
