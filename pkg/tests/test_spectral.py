"""Spectrum closed form, eigenbases, modal relations, composite Laplacian."""
import random
from fractions import Fraction

import pytest

from celldof import (
    InfeasibleInjectionError,
    RationalMatrix,
    Topology,
    UnsupportedSpectrumError,
    complete_kpartite,
    composite_laplacian,
    edge_currents_from_modes,
    edge_voltages_from_modes,
    eigenbasis,
    incidence,
    laplacian,
    modal_conductance,
    modal_inductive,
    spectrum,
    topology_basis,
)
from celldof.spectral import (
    edge_current_matrix,
    edge_voltage_matrix,
    jacobi_eigensystem,
    mode_labels,
    multipartite_partition,
    multipartite_spectrum,
)

from util import mat, random_fraction, random_kpartite


def _sorted_floats(values):
    return sorted(float(v) for v in values)


class TestSpectrum:
    def test_bipartite_closed_form(self):
        # K_{3,2}: {5, 3, 2, 2, 0}
        res = spectrum(complete_kpartite([3, 2]))
        assert res.exact and res.method == "multipartite"
        assert sorted(res.values) == [0, 2, 2, 3, 5]

    def test_k222_matches_jacobi_oracle(self):
        t = complete_kpartite([2, 2, 2])
        res = spectrum(t)
        assert sorted(res.values) == [0, 4, 4, 4, 6, 6]
        oracle, _ = jacobi_eigensystem(laplacian(t).as_float())
        for a, b in zip(_sorted_floats(res.values), oracle):
            assert abs(a - b) < 1e-9

    def test_single_edge(self):
        # characteristic polynomial of [[1,-1],[-1,1]] is x^2 - 2x: roots {0, 2}
        res = spectrum(complete_kpartite([1, 1]))
        assert sorted(res.values) == [0, 2]

    def test_uniform_weight_scales_spectrum(self):
        t0 = complete_kpartite([2, 1])
        t = Topology(n_vertices=3, edges=t0.edges, edge_conductance="7/3")
        res = spectrum(t)
        assert sorted(res.values) == [0, Fraction(7, 3) * 1, Fraction(7, 3) * 3]

    def test_non_multipartite_falls_back_to_jacobi(self):
        # bowtie (two triangles sharing a vertex): integer spectrum {0,1,3,3,5}
        t = Topology(
            n_vertices=5, edges=((0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4))
        )
        assert multipartite_partition(t) is None
        res = spectrum(t)
        assert res.method == "jacobi" and res.exact
        assert sorted(res.values) == [0, 1, 3, 3, 5]

    def test_non_integer_spectrum_flagged(self):
        # path on 4 vertices has irrational eigenvalues 2 +- sqrt(2)
        t = Topology(n_vertices=4, edges=((0, 1), (1, 2), (2, 3)))
        res = spectrum(t)
        assert res.method == "jacobi" and not res.exact

    def test_zero_modes_count_components(self):
        t = Topology(n_vertices=4, edges=((0, 1), (2, 3)))
        res = spectrum(t)
        assert sorted(res.values) == [0, 0, 2, 2]

    def test_closed_form_vs_jacobi_all_partitions_up_to_12(self):
        def partitions_of(n, max_part=None):
            max_part = max_part or n
            if n == 0:
                yield []
                return
            for k in range(min(n, max_part), 0, -1):
                for rest in partitions_of(n - k, k):
                    yield [k] + rest

        for n in range(1, 13):
            for sizes in partitions_of(n):
                t = complete_kpartite(sizes)
                exact = _sorted_floats(multipartite_spectrum(sizes))
                oracle, _ = jacobi_eigensystem(laplacian(t).as_float())
                assert all(abs(a - b) < 1e-9 for a, b in zip(exact, oracle)), sizes


class TestEigenbasis:
    def test_diagonalization_exact(self):
        rng = random.Random(20)
        for _ in range(15):
            t = random_kpartite(rng)
            basis = topology_basis(t)
            l_unit = laplacian(t)
            lam = RationalMatrix.diagonal(basis.eigenvalues)
            assert l_unit * basis.vectors == basis.vectors * lam
            assert basis.vectors * basis.vectors_inv == RationalMatrix.identity(t.n_vertices)

    def test_zero_mode_row_is_average(self):
        basis = topology_basis(complete_kpartite([3, 2]))
        assert basis.vectors_inv.rows[0] == tuple([Fraction(1, 5)] * 5)

    def test_v_topology_matches_published_rows(self, entry_v):
        # our canonical choice lands exactly on the published V transform
        basis = entry_v.computed_basis()
        assert basis.vectors_inv.rows == entry_v.published_inverse_rows

    def test_eigenvector_supports_per_partition(self):
        rng = random.Random(21)
        for _ in range(15):
            t = random_kpartite(rng)
            n = t.n_vertices
            basis = topology_basis(t)
            for j, ev in enumerate(basis.eigenvalues):
                col = basis.vectors.col(j)
                for p in t.partitions:
                    if ev == n - len(p) and ev not in (0, n):
                        if all(col[v] == 0 for v in range(n) if v not in p):
                            assert sum(col[v] for v in p) == 0

    def test_eigenvalue_multiplicity_mismatch_rejected(self):
        l_i = mat([[1, -1], [-1, 1]])
        with pytest.raises(ValueError):
            eigenbasis(l_i, [0, 3])

    def test_float_eigenvalue_rejected(self):
        with pytest.raises(UnsupportedSpectrumError):
            eigenbasis(mat([[1, -1], [-1, 1]]), [0.0, 2.0])

    def test_trivial_graph(self):
        basis = eigenbasis(mat([[0]]), [0])
        assert basis.vectors == mat([[1]])

    def test_disconnected_zero_modes(self):
        t = Topology(n_vertices=4, edges=((0, 1), (2, 3)))
        basis = eigenbasis(laplacian(t), [0, 0, 2, 2])
        assert basis.labels == ("0", "0_2", "alpha", "beta")
        for j in (0, 1):
            col = basis.vectors.col(j)
            support = {i for i, x in enumerate(col) if x != 0}
            assert support in ({0, 1}, {2, 3})
            assert len({col[i] for i in support}) == 1  # constant on the component

    def test_mode_labels(self):
        assert mode_labels([0, 1, 3]) == ("0", "alpha", "beta")
        assert mode_labels([0, 0, 2]) == ("0", "0_2", "alpha")


class TestModeTransforms:
    def test_round_trip_exact(self):
        rng = random.Random(22)
        basis = topology_basis(complete_kpartite([3, 2]))
        for _ in range(50):
            x = tuple(random_fraction(rng) for _ in range(5))
            assert basis.from_modes(basis.to_modes(x)) == x

    def test_constant_input_excites_only_zero_mode(self, entry_2y):
        basis = entry_2y.reference_basis()
        x_dec = basis.to_modes((1, 1, 1, 1, 1))
        assert x_dec == (1, 0, 0, 0, 0)

    def test_single_edge_transform(self):
        basis = topology_basis(complete_kpartite([1, 1]))
        assert basis.to_modes((0, 1)) == (Fraction(1, 2), Fraction(1, 2))


class TestModalMatrices:
    def test_modal_conductance_2y(self, entry_2y):
        modal = modal_conductance(entry_2y.reference_basis(), Fraction(7, 2))
        assert modal.diagonal == tuple(Fraction(7, 2) * v for v in (0, 3, 5, 2, 2))

    def test_modal_conductance_y(self, entry_y):
        modal = modal_conductance(entry_y.reference_basis(), 1)
        assert modal.diagonal == (0, 4, 1, 1)

    def test_single_edge_modal(self):
        modal = modal_conductance(topology_basis(complete_kpartite([1, 1])), 1)
        assert modal.diagonal == (0, 2)

    def test_inductive_scale(self):
        basis = topology_basis(complete_kpartite([1, 2]))
        modal = modal_inductive(basis, Fraction(1, 200))
        assert modal.diagonal == (0, 200, 600)
        assert modal.kind == "inductive"

    def test_positive_parameters_required(self):
        basis = topology_basis(complete_kpartite([1, 1]))
        with pytest.raises(ValueError):
            modal_conductance(basis, 0)
        with pytest.raises(ValueError):
            modal_inductive(basis, -1)


class TestEdgeMaps:
    def test_v_voltage_coefficients(self, entry_v):
        assert edge_voltage_matrix(entry_v.topology, entry_v.reference_basis()) == mat(
            [[0, -1, 3], [0, 1, 3]]
        )

    def test_d_current_coefficients_keep_kcl(self, entry_d):
        topo = entry_d.topology
        basis = entry_d.reference_basis()
        ec = edge_current_matrix(topo, basis)
        assert ec == entry_d.edge_current_reference
        # the published row-3 sign breaks vertex balance; the derived one holds
        b_t = incidence(topo).T
        modes_kept = RationalMatrix.diagonal(
            [0 if ev == 0 else 1 for ev in basis.eigenvalues]
        )
        assert b_t * ec == basis.vectors * modes_kept
        assert b_t * entry_d.edge_current_published != basis.vectors * modes_kept

    def test_zero_modes_give_zero_edge_variables(self, entry_v):
        topo, basis = entry_v.topology, entry_v.reference_basis()
        assert edge_voltages_from_modes(topo, basis, (5, 0, 0)) == (0, 0)

    def test_kcl_for_any_admissible_injection(self):
        rng = random.Random(23)
        for _ in range(15):
            t = random_kpartite(rng)
            basis = topology_basis(t)
            modal = modal_conductance(basis, Fraction(rng.randint(1, 9)))
            i_dec = [random_fraction(rng) for _ in range(t.n_vertices)]
            for slot in basis.zero_slots():
                i_dec[slot] = Fraction(0)
            i_e = edge_currents_from_modes(t, basis, modal, i_dec)
            i_v = basis.from_modes(i_dec)
            assert incidence(t).T.matvec(i_e) == i_v

    def test_zero_mode_injection_rejected(self, entry_v):
        topo, basis = entry_v.topology, entry_v.reference_basis()
        modal = modal_conductance(basis, 1)
        with pytest.raises(InfeasibleInjectionError):
            edge_currents_from_modes(topo, basis, modal, (1, 0, 0))


class TestCompositeLaplacian:
    def test_requires_external_conductances(self):
        with pytest.raises(ValueError):
            composite_laplacian(complete_kpartite([1, 1]))

    def test_all_infinite_returns_laplacian(self):
        t = Topology(
            n_vertices=2, edges=((0, 1),), external_conductance=(None, None)
        )
        assert composite_laplacian(t) == laplacian(t)

    def test_single_edge_series_law(self):
        # boundary - g_ext - terminal - g_arm - terminal - g_ext - boundary
        g_arm, g_ext = Fraction(3), Fraction(5)
        t = Topology(
            n_vertices=2,
            edges=((0, 1),),
            edge_conductance=(g_arm,),
            external_conductance=(g_ext, g_ext),
        )
        series = 1 / (1 / g_ext + 1 / g_arm + 1 / g_ext)
        reduced = composite_laplacian(t)
        assert reduced == RationalMatrix([[series, -series], [-series, series]])

    def test_stiff_externals_recover_laplacian(self):
        t0 = complete_kpartite([3, 2])
        t = Topology(
            n_vertices=5,
            edges=t0.edges,
            external_conductance=tuple(Fraction(10 ** 6) for _ in range(5)),
        )
        reduced = composite_laplacian(t).as_float()
        base = laplacian(t).as_float()
        for i in range(5):
            for j in range(5):
                if base[i][j]:
                    assert abs(reduced[i][j] - base[i][j]) / abs(base[i][j]) < 1e-5

    def test_zero_external_decouples_terminal(self):
        t = Topology(
            n_vertices=3,
            edges=((0, 1), (1, 2), (2, 0)),
            external_conductance=(Fraction(1), Fraction(1), Fraction(0)),
        )
        reduced = composite_laplacian(t)
        assert all(x == 0 for x in reduced.rows[2])
        assert all(reduced.rows[i][2] == 0 for i in range(3))

    def test_uniform_external_matches_literal_form(self):
        # with a uniform finite conductance the boundary reduction and the
        # matrix-fraction form agree exactly (both are functions of L)
        rng = random.Random(24)
        for _ in range(10):
            t0 = random_kpartite(rng, max_n=8)
            g = Fraction(rng.randint(1, 9), rng.randint(1, 4))
            t = Topology(
                n_vertices=t0.n_vertices,
                edges=t0.edges,
                external_conductance=tuple(g for _ in range(t0.n_vertices)),
            )
            assert composite_laplacian(t, "kron") == composite_laplacian(t, "literal")

    def test_literal_needs_all_finite(self):
        t = Topology(
            n_vertices=2, edges=((0, 1),), external_conductance=(Fraction(1), None)
        )
        with pytest.raises(ValueError):
            composite_laplacian(t, "literal")

    def test_mixed_infinite_kron(self):
        # one ideal terminal, one through a conductance
        g = Fraction(2)
        t = Topology(
            n_vertices=2, edges=((0, 1),), external_conductance=(None, g)
        )
        reduced = composite_laplacian(t)
        series = 1 / (1 / Fraction(1) + 1 / g)
        assert reduced == RationalMatrix([[series, -series], [-series, series]])
