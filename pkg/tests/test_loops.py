"""Cycle space detection, loop bases, and full edge-current superposition."""
import random
from fractions import Fraction

import pytest

from celldof import (
    InvalidLoopError,
    RationalMatrix,
    Topology,
    complete_kpartite,
    connected_components,
    edge_currents_full,
    fundamental_cycles,
    incidence,
    loop_basis,
    loop_dofs,
    modal_conductance,
    topology_basis,
    topology_loops,
)
from celldof.ratmat import dot

from util import mat, random_fraction, random_kpartite


class TestFundamentalCycles:
    def test_tree_has_no_loops(self):
        t = complete_kpartite([3, 1])  # the star is a spanning tree already
        n = fundamental_cycles(t)
        assert n.nrows == 0 and n.ncols == 3

    def test_triangle_loop_signs(self, entry_d):
        n = fundamental_cycles(entry_d.topology)
        assert n == mat([[1, 1, 1]])

    def test_ring_loop_signs(self, entry_2v):
        n = fundamental_cycles(entry_2v.topology)
        assert n == mat([[1, 1, 1, 1]])

    def test_mmc_two_loops_span_published_rows(self, entry_2y):
        n = fundamental_cycles(entry_2y.topology)
        assert n.nrows == 2
        published = entry_2y.loop_signs_published
        stacked = RationalMatrix(list(n.rows) + list(published.rows), ncols=6)
        assert n.rank() == published.rank() == stacked.rank() == 2

    def test_rows_are_circulations(self):
        rng = random.Random(30)
        for _ in range(20):
            t = random_kpartite(rng)
            n = fundamental_cycles(t)
            b_t = incidence(t).T
            for row in n.rows:
                assert b_t.matvec(row) == tuple([0] * t.n_vertices)
                assert set(row) <= {Fraction(-1), Fraction(0), Fraction(1)}

    def test_cycle_rank_formula(self):
        rng = random.Random(31)
        for _ in range(25):
            t = random_kpartite(rng)
            c = len(connected_components(t))
            assert fundamental_cycles(t).nrows == t.n_edges - t.n_vertices + c


class TestLoopBasis:
    def test_triangle_basis(self, entry_d):
        lb = topology_loops(entry_d.topology)
        assert lb.rank == 1
        assert lb.columns.col(0) == (1, 1, 1)
        assert lb.squared_norms == (3,)
        assert lb.labels == ("phi1",)
        assert lb.edge_members() == ((0, 1, 2),)

    def test_mmc_columns_annihilated_by_incidence(self, entry_2y):
        lb = topology_loops(entry_2y.topology)
        assert lb.rank == 2
        b_t = incidence(entry_2y.topology).T
        for j in range(2):
            assert b_t.matvec(lb.columns.col(j)) == (0, 0, 0, 0, 0)
        assert dot(lb.columns.col(0), lb.columns.col(1)) == 0

    def test_duplicate_rows_collapse(self, entry_d):
        n = mat([[1, 1, 1], [1, 1, 1]])
        lb = loop_basis(entry_d.topology, n)
        assert lb.rank == 1

    def test_non_circulation_rejected(self, entry_d):
        with pytest.raises(InvalidLoopError) as err:
            loop_basis(entry_d.topology, mat([[1, 0, 0]]))
        assert "vertex" in str(err.value)

    def test_loop_space_dimension(self):
        rng = random.Random(32)
        for _ in range(20):
            t = random_kpartite(rng)
            lb = topology_loops(t)
            b = incidence(t)
            assert lb.rank + b.rank() == t.n_edges


class TestLoopDofs:
    def test_triangle_projection(self, entry_d):
        lb = topology_loops(entry_d.topology)
        assert loop_dofs((1, 1, 1), lb) == (3,)
        assert loop_dofs((0, 0, 0), lb) == (0,)

    def test_nodal_currents_have_zero_loop_coordinates(self):
        rng = random.Random(33)
        for _ in range(15):
            t = random_kpartite(rng)
            lb = topology_loops(t)
            if lb.rank == 0:
                continue
            basis = topology_basis(t)
            modal = modal_conductance(basis, 1)
            i_dec = [random_fraction(rng) for _ in range(t.n_vertices)]
            for slot in basis.zero_slots():
                i_dec[slot] = Fraction(0)
            from celldof import edge_currents_from_modes

            i_e = edge_currents_from_modes(t, basis, modal, i_dec)
            assert loop_dofs(i_e, lb) == tuple([0] * lb.rank)

    def test_loop_space_orthogonal_to_cut_space(self):
        rng = random.Random(34)
        for _ in range(15):
            t = random_kpartite(rng)
            lb = topology_loops(t)
            b = incidence(t)
            if lb.rank:
                zeros = RationalMatrix.zeros(t.n_vertices, lb.rank)
                assert b.T * lb.columns == zeros

    def test_length_mismatch(self, entry_d):
        lb = topology_loops(entry_d.topology)
        with pytest.raises(ValueError):
            loop_dofs((1, 1), lb)


class TestEdgeCurrentsFull:
    def test_ring_loop_only_gives_uniform_arm_current(self, entry_2v):
        topo = entry_2v.topology
        basis = entry_2v.reference_basis()
        modal = modal_conductance(basis, 1)
        lb = topology_loops(topo)
        i_e = edge_currents_full(topo, basis, modal, (0, 0, 0, 0), lb, (1,))
        assert i_e == (1, 1, 1, 1)

    def test_without_loop_reduces_to_nodal_map(self, entry_d):
        topo = entry_d.topology
        basis = entry_d.reference_basis()
        modal = modal_conductance(basis, 1)
        lb = topology_loops(topo)
        nodal_only = edge_currents_full(topo, basis, modal, (0, 2, 1), lb, (0,))
        from celldof import edge_currents_from_modes

        assert nodal_only == edge_currents_from_modes(topo, basis, modal, (0, 2, 1))

    def test_triangle_full_matrix_against_published(self, entry_d):
        # derived full map is (1/3)[[0,2,1,3],[0,-1,1,3],[0,-1,-2,3]]: the
        # published row-3 nodal sign is the ledgered deviation
        topo = entry_d.topology
        basis = entry_d.reference_basis()
        modal = modal_conductance(basis, 1)
        lb = topology_loops(topo)
        third = Fraction(1, 3)
        for unit, expected in [
            ((0, 1, 0, 0), (2 * third, -third, -third)),
            ((0, 0, 1, 0), (third, third, -2 * third)),
            ((0, 0, 0, 1), (1, 1, 1)),
        ]:
            i_dec, i_loop = unit[:3], unit[3:]
            assert edge_currents_full(topo, basis, modal, i_dec, lb, i_loop) == expected

    def test_loop_currents_never_touch_terminals(self):
        rng = random.Random(35)
        for _ in range(15):
            t = random_kpartite(rng)
            lb = topology_loops(t)
            if lb.rank == 0:
                continue
            basis = topology_basis(t)
            modal = modal_conductance(basis, 1)
            i_loop = [random_fraction(rng) for _ in range(lb.rank)]
            zero_dec = [Fraction(0)] * t.n_vertices
            i_e = edge_currents_full(t, basis, modal, zero_dec, lb, i_loop)
            assert incidence(t).T.matvec(i_e) == tuple([0] * t.n_vertices)

    def test_missing_basis_rejected(self, entry_d):
        topo = entry_d.topology
        basis = entry_d.reference_basis()
        modal = modal_conductance(basis, 1)
        with pytest.raises(ValueError):
            edge_currents_full(topo, basis, modal, (0, 1, 0), None, (1,))
