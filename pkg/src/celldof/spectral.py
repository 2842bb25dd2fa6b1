"""Laplacian eigen-decomposition and nodal normal-mode machinery.

The eigenvectors of a topology's Laplacian are its nodal degrees of freedom:
the diagonalized nodal relation turns the vertex charge-balance equation
``L u_v = i_v`` into per-mode scalar Ohm laws.  Complete multipartite graphs
have a closed-form integer spectrum, which keeps the whole analysis exact;
anything else falls back to a floating Jacobi eigensolver.

Conventions fixed here:

* eigenvalue order defaults to zero modes first, then ascending; callers
  (e.g. the topology catalog) may pin any explicit order;
* within a degenerate eigenspace, basis columns come from the RREF nullspace
  followed by Gram-Schmidt, scaled to primitive integer vectors whose first
  nonzero entry is negative (zero modes stay positive) - published bases are
  compared by eigenspace span, never entry by entry;
* the zero-mode row of the inverse transform is the component average.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ratmat import (
    RationalMatrix,
    as_fraction,
    gram_schmidt,
    primitive,
    schur_complement,
)
from .topology import Topology, connected_components, incidence, laplacian


class UnsupportedSpectrumError(ValueError):
    """Eigenbasis requested for a spectrum that is not exactly rational."""


class InfeasibleInjectionError(ValueError):
    """Decoupled current injected into a zero mode (violates charge balance)."""


_GREEK = (
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta",
    "iota", "kappa", "lambda", "mu", "nu", "xi", "omicron", "pi", "rho",
    "sigma", "tau", "upsilon",
)


def mode_labels(eigenvalues: Sequence[Fraction]) -> tuple[str, ...]:
    """Zero modes labelled '0' ('0_2', ... for extra components), then Greek."""
    labels = []
    zeros = 0
    nonzero = 0
    for ev in eigenvalues:
        if ev == 0:
            zeros += 1
            labels.append("0" if zeros == 1 else f"0_{zeros}")
        else:
            labels.append(_GREEK[nonzero] if nonzero < len(_GREEK) else f"mode{nonzero}")
            nonzero += 1
    return tuple(labels)


@dataclass(frozen=True)
class SpectralBasis:
    """Eigenvalues with an eigenvector matrix, its exact inverse, and labels."""

    eigenvalues: tuple[Fraction, ...]
    vectors: RationalMatrix
    vectors_inv: RationalMatrix
    labels: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def label_index(self, label: str) -> int:
        return self.labels.index(label)

    def zero_slots(self) -> tuple[int, ...]:
        return tuple(i for i, ev in enumerate(self.eigenvalues) if ev == 0)

    def to_modes(self, x_v: Sequence) -> tuple[Fraction, ...]:
        return self.vectors_inv.matvec(x_v)

    def from_modes(self, x_dec: Sequence) -> tuple[Fraction, ...]:
        return self.vectors.matvec(x_dec)


@dataclass(frozen=True)
class ModalMatrix:
    """Diagonal modal relation: scale (G_a or 1/L_a) times the eigenvalues."""

    eigenvalues: tuple[Fraction, ...]
    scale: Fraction
    kind: str  # "resistive" | "inductive"

    @property
    def diagonal(self) -> tuple[Fraction, ...]:
        return tuple(self.scale * ev for ev in self.eigenvalues)

    def pinv_diagonal(self) -> tuple[Fraction, ...]:
        """Pseudo-inverse diagonal: zero stays zero."""
        return tuple(Fraction(0) if d == 0 else 1 / d for d in self.diagonal)


def modal_conductance(basis: SpectralBasis, g_arm) -> ModalMatrix:
    g = as_fraction(g_arm)
    if g <= 0:
        raise ValueError("arm conductance must be positive")
    return ModalMatrix(eigenvalues=basis.eigenvalues, scale=g, kind="resistive")


def modal_inductive(basis: SpectralBasis, l_arm) -> ModalMatrix:
    l = as_fraction(l_arm)
    if l <= 0:
        raise ValueError("arm inductance must be positive")
    return ModalMatrix(eigenvalues=basis.eigenvalues, scale=1 / l, kind="inductive")


# -- spectrum ----------------------------------------------------------------

def multipartite_partition(t: Topology) -> tuple[tuple[int, ...], ...] | None:
    """Partition classes if the graph is complete multipartite, else None.

    Classes are the connected components of the complement graph; the graph
    is complete multipartite exactly when no class contains an edge and all
    cross-class pairs are adjacent.
    """
    n = t.n_vertices
    adjacent = [set() for _ in range(n)]
    for tail, head in t.edges:
        adjacent[tail].add(head)
        adjacent[head].add(tail)
    unseen = set(range(n))
    classes = []
    while unseen:
        start = min(unseen)
        unseen.discard(start)
        cls = [start]
        queue = [start]
        while queue:
            v = queue.pop(0)
            mates = [w for w in unseen if w not in adjacent[v]]
            for w in mates:
                unseen.discard(w)
                cls.append(w)
                queue.append(w)
        classes.append(tuple(sorted(cls)))
    for cls in classes:
        for i, u in enumerate(cls):
            for v in cls[i + 1:]:
                if v in adjacent[u]:
                    return None
    class_of = {}
    for k, cls in enumerate(classes):
        for v in cls:
            class_of[v] = k
    expected_edges = sum(
        len(a) * len(b) for i, a in enumerate(classes) for b in classes[i + 1:]
    )
    if len(t.edges) != expected_edges:
        return None
    for tail, head in t.edges:
        if class_of[tail] == class_of[head]:
            return None
    return tuple(classes)


def multipartite_spectrum(sizes: Sequence[int]) -> tuple[Fraction, ...]:
    """Closed-form Laplacian spectrum of K_{s1,...,sk}, ascending.

    {0} once, {n} with multiplicity k-1, and {n - s_i} with multiplicity
    s_i - 1 for each class.  For k = 2 this is the familiar bipartite
    pattern {x+y, y x(x-1 times), x (y-1 times), 0}.
    """
    n = sum(sizes)
    values = [Fraction(0)]
    values.extend([Fraction(n)] * (len(sizes) - 1))
    for s in sizes:
        values.extend([Fraction(n - s)] * (s - 1))
    return tuple(sorted(values))


@dataclass(frozen=True)
class SpectrumResult:
    values: tuple
    exact: bool
    method: str  # "multipartite" | "jacobi"


def spectrum(t: Topology) -> SpectrumResult:
    """Eigenvalue multiset of the (weighted) Laplacian, zero first then ascending.

    Complete multipartite graphs with a uniform arm conductance use the
    closed form (exact rationals, scaled by the common weight).  Everything
    else goes through the cyclic Jacobi eigensolver; eigenvalues within 1e-8
    of an integer are snapped, and the result is flagged approximate when
    any eigenvalue refuses to snap.
    """
    w = t.uniform_conductance()
    if w is not None:
        classes = multipartite_partition(t)
        if classes is not None:
            vals = tuple(w * ev for ev in multipartite_spectrum([len(c) for c in classes]))
            return SpectrumResult(values=vals, exact=True, method="multipartite")
    values, _ = jacobi_eigensystem(laplacian(t).as_float())
    snapped, all_int = snap_integers(values)
    return SpectrumResult(values=tuple(snapped), exact=all_int, method="jacobi")


def jacobi_eigensystem(
    a: list[list[float]], tol: float = 1e-12, max_sweeps: int = 100
) -> tuple[list[float], list[list[float]]]:
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Returns eigenvalues sorted ascending and the matching eigenvector columns.
    Deterministic: sweeps run over (p, q) pairs in fixed row-major order.
    """
    n = len(a)
    a = [row[:] for row in a]
    v = [[float(i == j) for j in range(n)] for i in range(n)]
    if n < 2:
        return [a[i][i] for i in range(n)], v
    for _ in range(max_sweeps):
        off = math.sqrt(sum(a[i][j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p][q]) < tol / (n * n):
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q])
                sign = 1.0 if theta >= 0 else -1.0
                t_ = sign / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t_ * t_ + 1.0)
                s = t_ * c
                for k in range(n):
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = c * akp - s * akq
                    a[k][q] = s * akp + c * akq
                for k in range(n):
                    apk, aqk = a[p][k], a[q][k]
                    a[p][k] = c * apk - s * aqk
                    a[q][k] = s * apk + c * aqk
                for k in range(n):
                    vkp, vkq = v[k][p], v[k][q]
                    v[k][p] = c * vkp - s * vkq
                    v[k][q] = s * vkp + c * vkq
    order = sorted(range(n), key=lambda i: a[i][i])
    values = [a[i][i] for i in order]
    vectors = [[v[i][order[j]] for j in range(n)] for i in range(n)]
    return values, vectors


def snap_integers(values: Sequence[float], tol: float = 1e-8) -> tuple[list, bool]:
    """Round near-integer floats to Fractions; report whether all snapped."""
    out = []
    all_int = True
    for x in values:
        r = round(x)
        if abs(x - r) <= tol:
            out.append(Fraction(r))
        else:
            out.append(x)
            all_int = False
    return out, all_int


# -- eigenbasis ---------------------------------------------------------------

def _canonical_column(vec: Sequence[Fraction], zero_mode: bool) -> tuple[Fraction, ...]:
    v = primitive(vec)
    lead = next((x for x in v if x != 0), None)
    if lead is None:
        return v
    if zero_mode:
        return v if lead > 0 else tuple(-x for x in v)
    return v if lead < 0 else tuple(-x for x in v)


def eigenbasis(
    l_matrix: RationalMatrix,
    eigenvalues: Sequence,
    labels: Sequence[str] | None = None,
) -> SpectralBasis:
    """Exact eigenbasis of a symmetric rational matrix with known spectrum.

    ``eigenvalues`` is the full ordered list (with multiplicity); eigenvectors
    per eigenvalue are the exact nullspace of L - lambda I, orthogonalized
    within each eigenspace.
    """
    n = l_matrix.nrows
    if l_matrix.ncols != n:
        raise ValueError("eigenbasis needs a square matrix")
    evs = []
    for ev in eigenvalues:
        if isinstance(ev, float):
            raise UnsupportedSpectrumError(
                f"non-rational eigenvalue {ev!r}: use the floating Jacobi path"
            )
        evs.append(as_fraction(ev))
    if len(evs) != n:
        raise ValueError(f"expected {n} eigenvalues, got {len(evs)}")

    columns: dict[int, tuple[Fraction, ...]] = {}
    done: set[Fraction] = set()
    for ev in evs:
        if ev in done:
            continue
        done.add(ev)
        slots = [i for i, x in enumerate(evs) if x == ev]
        shifted = l_matrix - ev * RationalMatrix.identity(n)
        kernel = shifted.nullspace()
        if len(kernel) != len(slots):
            raise ValueError(
                f"eigenvalue {ev} has multiplicity {len(kernel)}, expected {len(slots)}"
            )
        ortho, _ = gram_schmidt(kernel)
        for slot, vec in zip(slots, ortho):
            columns[slot] = _canonical_column(vec, zero_mode=(ev == 0))
    p = RationalMatrix.from_columns([columns[i] for i in range(n)], nrows=n)
    p_inv = p.inverse()
    lab = tuple(labels) if labels is not None else mode_labels(evs)
    if len(lab) != n:
        raise ValueError("label count mismatch")
    return SpectralBasis(eigenvalues=tuple(evs), vectors=p, vectors_inv=p_inv, labels=lab)


def basis_from_inverse_rows(
    l_matrix: RationalMatrix,
    eigenvalues: Sequence,
    inverse_rows: Sequence[Sequence],
    labels: Sequence[str] | None = None,
) -> SpectralBasis:
    """Basis from explicitly given inverse-transform rows (reference bases).

    Each row must be an exact eigenvector of the (symmetric) matrix for its
    stated eigenvalue; the eigenvector matrix is the exact inverse.
    """
    evs = tuple(as_fraction(ev) for ev in eigenvalues)
    p_inv = RationalMatrix(inverse_rows, ncols=l_matrix.ncols)
    for row, ev in zip(p_inv.rows, evs):
        if l_matrix.matvec(row) != tuple(ev * x for x in row):
            raise ValueError(f"row {row} is not an eigenvector for eigenvalue {ev}")
    p = p_inv.inverse()
    lab = tuple(labels) if labels is not None else mode_labels(evs)
    return SpectralBasis(eigenvalues=evs, vectors=p, vectors_inv=p_inv, labels=lab)


def topology_basis(t: Topology, order: Sequence | None = None) -> SpectralBasis:
    """Canonical basis of a topology's unit-weight structural Laplacian."""
    b = incidence(t)
    l_unit = b.T * b
    if order is None:
        res = spectrum(
            Topology(n_vertices=t.n_vertices, edges=t.edges, partitions=t.partitions)
        )
        if not res.exact:
            raise UnsupportedSpectrumError(
                "non-integer spectrum: no exact eigenbasis (Jacobi values available)"
            )
        order = res.values
    return eigenbasis(l_unit, order)


# -- mode transforms on edges --------------------------------------------------

def edge_voltage_matrix(t: Topology, basis: SpectralBasis) -> RationalMatrix:
    """Coefficients of arm voltages over decoupled modes: B P."""
    return incidence(t) * basis.vectors


def edge_current_matrix(t: Topology, basis: SpectralBasis) -> RationalMatrix:
    """Coefficients of arm currents over decoupled mode currents.

    Arm currents are recovered as B P diag(lambda)^+ applied to the decoupled
    currents: the modal relation inverts the current to a modal voltage and
    the arm conductance cancels, so the map is scale-free and KCL
    (B^T i_e = i_v) holds exactly.
    """
    bp = edge_voltage_matrix(t, basis)
    pinv_diag = [Fraction(0) if ev == 0 else 1 / ev for ev in basis.eigenvalues]
    return bp * RationalMatrix.diagonal(pinv_diag)


def edge_voltages_from_modes(
    t: Topology, basis: SpectralBasis, u_dec: Sequence
) -> tuple[Fraction, ...]:
    return edge_voltage_matrix(t, basis).matvec(u_dec)


def edge_currents_from_modes(
    t: Topology, basis: SpectralBasis, modal: ModalMatrix, i_dec: Sequence
) -> tuple[Fraction, ...]:
    """Arm currents from decoupled nodal currents (zero-mode slots must be 0)."""
    vals = tuple(as_fraction(x) for x in i_dec)
    for slot in basis.zero_slots():
        if vals[slot] != 0:
            raise InfeasibleInjectionError(
                f"nonzero current {vals[slot]} in zero mode '{basis.labels[slot]}'"
            )
    if modal.eigenvalues != basis.eigenvalues:
        raise ValueError("modal matrix does not match the basis eigenvalues")
    return edge_current_matrix(t, basis).matvec(vals)


# -- composite Laplacian -------------------------------------------------------

def composite_laplacian(t: Topology, mode: str = "kron") -> RationalMatrix:
    """Laplacian seen from the external systems through their conductances.

    ``kron``: each terminal with a finite external conductance is joined to
    an auxiliary boundary node through that conductance; all internal
    terminals are then eliminated (Kron reduction).  This reproduces the
    scalar series law G_a G_ext / (G_a + G_ext) on a single edge and keeps
    symmetry for arbitrary graphs.

    ``literal``: the symmetrized matrix-fraction form
    (L G (L+G)^{-1} + (L+G)^{-1} G L) / 2, kept as a comparison mode; it
    requires every external conductance to be finite.
    """
    if t.external_conductance is None:
        raise ValueError("topology has no external conductances")
    l_w = laplacian(t)
    ext = t.external_conductance
    finite = [i for i, g in enumerate(ext) if g is not None]
    if not finite:
        return l_w
    if mode == "kron":
        n = t.n_vertices
        aux_of = {i: n + k for k, i in enumerate(finite)}
        size = n + len(finite)
        rows = [[Fraction(0)] * size for _ in range(size)]
        for i in range(n):
            for j in range(n):
                rows[i][j] = l_w.rows[i][j]
        for i in finite:
            g = ext[i]
            if g == 0:
                continue
            a = aux_of[i]
            rows[i][i] += g
            rows[a][a] += g
            rows[i][a] -= g
            rows[a][i] -= g
        keep = [aux_of[i] if i in aux_of else i for i in range(n)]
        return schur_complement(RationalMatrix(rows, ncols=size), keep)
    if mode == "literal":
        if len(finite) != t.n_vertices:
            raise ValueError("literal mode needs a finite conductance at every terminal")
        g = RationalMatrix.diagonal([ext[i] for i in range(t.n_vertices)])
        inv = (l_w + g).inverse()
        half = Fraction(1, 2)
        return half * (l_w * g * inv + inv * g * l_w)
    raise ValueError(f"unknown composite mode {mode!r}")
