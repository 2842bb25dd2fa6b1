"""Instantaneous power decomposition over decoupled voltage/current modes.

Elementwise node (or arm) power u .* i expands into a fixed linear
combination of products of decoupled modes: p = C [u_dec (x) i_dec], where
the coefficient matrix depends only on the eigenbasis (and on the loop basis
for arms).  Term columns are ordered voltage-major, matching the tensor
product of the mode vectors; a term label records (current mode, voltage
mode).  Identically-zero columns are dropped, which is what removes every
zero-mode product from the arm-side matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .loops import LoopBasis
from .ratmat import RationalMatrix, as_fraction, gram_schmidt
from .spectral import ModalMatrix, SpectralBasis, edge_current_matrix, edge_voltage_matrix
from .topology import Topology


@dataclass(frozen=True)
class PowerTermLabel:
    """A mixed product term: current mode times voltage mode."""

    current_mode: str
    voltage_mode: str

    def __str__(self):
        return f"p({self.current_mode},{self.voltage_mode})"


@dataclass(frozen=True)
class PowerMatrix:
    """Coefficient matrix over labelled decoupled power terms."""

    coeffs: RationalMatrix
    labels: tuple[PowerTermLabel, ...]

    def column(self, current_mode: str, voltage_mode: str) -> tuple[Fraction, ...]:
        target = PowerTermLabel(current_mode, voltage_mode)
        for j, lab in enumerate(self.labels):
            if lab == target:
                return self.coeffs.col(j)
        raise KeyError(f"no term {target}")

    def has_term(self, current_mode: str, voltage_mode: str) -> bool:
        return PowerTermLabel(current_mode, voltage_mode) in self.labels

    def total(self) -> dict[PowerTermLabel, Fraction]:
        """Column sums: the overall power balance over the labelled terms."""
        out = {}
        for j, lab in enumerate(self.labels):
            s = sum(self.coeffs.col(j), Fraction(0))
            if s != 0:
                out[lab] = s
        return out

    def evaluate(self, u_dec: Sequence, i_dec: Sequence,
                 mode_index: dict[str, int], loop_index: dict[str, int] | None = None,
                 u_loop: Sequence = (), i_loop: Sequence = ()) -> tuple[Fraction, ...]:
        """Numeric reconstruction: coeffs times the labelled term values."""
        terms = []
        for lab in self.labels:
            if loop_index and lab.current_mode in loop_index:
                i_val = as_fraction(i_loop[loop_index[lab.current_mode]])
            else:
                i_val = as_fraction(i_dec[mode_index[lab.current_mode]])
            if loop_index and lab.voltage_mode in loop_index:
                u_val = as_fraction(u_loop[loop_index[lab.voltage_mode]])
            else:
                u_val = as_fraction(u_dec[mode_index[lab.voltage_mode]])
            terms.append(u_val * i_val)
        return self.coeffs.matvec(terms)


def _assemble(u_cols, u_labels, i_cols, i_labels) -> PowerMatrix:
    """Voltage-major product columns; all-zero columns are dropped."""
    nrows = len(u_cols[0]) if u_cols else 0
    columns = []
    labels = []
    for u_col, u_lab in zip(u_cols, u_labels):
        for i_col, i_lab in zip(i_cols, i_labels):
            col = tuple(a * b for a, b in zip(u_col, i_col))
            if any(col):
                columns.append(col)
                labels.append(PowerTermLabel(current_mode=i_lab, voltage_mode=u_lab))
    coeffs = RationalMatrix.from_columns(columns, nrows=nrows)
    return PowerMatrix(coeffs=coeffs, labels=tuple(labels))


def node_power_matrix(basis: SpectralBasis) -> PowerMatrix:
    """Node powers over mode products: entry (k,(i,j)) is P[k,i] P[k,j]."""
    cols = basis.vectors.columns()
    return _assemble(cols, basis.labels, cols, basis.labels)


def edge_power_matrix(
    t: Topology,
    basis: SpectralBasis,
    modal: ModalMatrix,
    loops: LoopBasis | None = None,
    include_loop_voltage: bool = False,
) -> PowerMatrix:
    """Arm powers over mode products, optionally extended with loop currents.

    Loop-side voltages are neglected by default (the usual operating
    hypothesis: circulating voltage drops are small next to the nodal mode
    voltages); ``include_loop_voltage`` restores the full product set.
    """
    if include_loop_voltage and loops is None:
        raise ValueError("include_loop_voltage requires a loop basis")
    if modal.eigenvalues != basis.eigenvalues:
        raise ValueError("modal matrix does not match the basis eigenvalues")
    u_mat = edge_voltage_matrix(t, basis)
    i_mat = edge_current_matrix(t, basis)
    u_cols = list(u_mat.columns())
    u_labels = list(basis.labels)
    i_cols = list(i_mat.columns())
    i_labels = list(basis.labels)
    if loops is not None and loops.rank:
        loop_cols = list(loops.columns.columns())
        i_cols += loop_cols
        i_labels += list(loops.labels)
        if include_loop_voltage:
            u_cols += loop_cols
            u_labels += list(loops.labels)
    return _assemble(u_cols, u_labels, i_cols, i_labels)


def power_rank_basis(
    coeffs: RationalMatrix,
) -> tuple[int, RationalMatrix, tuple[Fraction, ...]]:
    """Count of independent powers and an orthogonal row basis (norms apart)."""
    ortho, sqnorms = gram_schmidt(coeffs.rows)
    basis = RationalMatrix(ortho, ncols=coeffs.ncols)
    return len(ortho), basis, sqnorms


def decoupled_power_patterns(b_p: RationalMatrix, pm: PowerMatrix) -> PowerMatrix:
    """Patterns of a power basis applied to raw powers: rows of B_p times coeffs."""
    if b_p.ncols != pm.coeffs.nrows:
        raise ValueError(
            f"basis expects {b_p.ncols} powers, matrix has {pm.coeffs.nrows} rows"
        )
    return PowerMatrix(coeffs=b_p * pm.coeffs, labels=pm.labels)


def change_power_basis(b_src: RationalMatrix, transition: RationalMatrix) -> RationalMatrix:
    """Re-express a power basis through a square transition matrix."""
    if transition.nrows != transition.ncols:
        raise ValueError("transition matrix must be square")
    if transition.ncols != b_src.nrows:
        raise ValueError("transition/basis dimension mismatch")
    return transition * b_src


def power_balance(
    t: Topology,
    basis: SpectralBasis,
    modal: ModalMatrix,
    loops: LoopBasis | None = None,
    include_loop_voltage: bool = False,
) -> dict[PowerTermLabel, Fraction]:
    """Total arm power as a combination of decoupled terms.

    Equals the total node power on the shared (nodal-mode) terms; enabling
    the loop voltage adds the loop self-terms that account for the power
    absorbed by the arm impedances under circulating current.
    """
    pm = edge_power_matrix(
        t, basis, modal, loops=loops, include_loop_voltage=include_loop_voltage
    )
    return pm.total()


def energy(p_series: Sequence[float], e0: float, dt: float) -> list[float]:
    """Trapezoidal cumulative integral of a sampled power, offset by E0."""
    if len(p_series) == 0:
        raise ValueError("empty power series")
    if dt <= 0:
        raise ValueError("dt must be positive")
    out = [float(e0)]
    for k in range(1, len(p_series)):
        out.append(out[-1] + 0.5 * dt * (float(p_series[k - 1]) + float(p_series[k])))
    return out


@dataclass(frozen=True)
class PowerDecomposition:
    """Node and arm power matrices with their ranks and extracted bases."""

    nodes: PowerMatrix
    edges: PowerMatrix
    node_rank: int
    edge_rank: int
    node_basis: RationalMatrix
    node_basis_norms: tuple[Fraction, ...]
    edge_basis: RationalMatrix
    edge_basis_norms: tuple[Fraction, ...]
    include_loop_voltage: bool


def power_decomposition(
    t: Topology,
    basis: SpectralBasis,
    modal: ModalMatrix,
    loops: LoopBasis | None = None,
    include_loop_voltage: bool = False,
) -> PowerDecomposition:
    nodes = node_power_matrix(basis)
    edges = edge_power_matrix(
        t, basis, modal, loops=loops, include_loop_voltage=include_loop_voltage
    )
    n_rank, n_basis, n_norms = power_rank_basis(nodes.coeffs)
    e_rank, e_basis, e_norms = power_rank_basis(edges.coeffs)
    return PowerDecomposition(
        nodes=nodes,
        edges=edges,
        node_rank=n_rank,
        edge_rank=e_rank,
        node_basis=n_basis,
        node_basis_norms=n_norms,
        edge_basis=e_basis,
        edge_basis_norms=e_norms,
        include_loop_voltage=include_loop_voltage,
    )
