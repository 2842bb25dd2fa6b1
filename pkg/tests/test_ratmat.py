"""Exact linear algebra core: everything must hold with equality, no tolerances."""
import random
from fractions import Fraction

import pytest

from celldof import RationalMatrix, SingularMatrixError, gram_schmidt, hadamard, kron, schur_complement
from celldof.ratmat import dot, primitive

from util import mat, random_fraction


class TestConstruction:
    def test_rejects_floats(self):
        with pytest.raises(TypeError):
            RationalMatrix([[0.5]])

    def test_parses_fraction_strings(self):
        m = mat([["1/3", "2"], ["-5/6", "0"]])
        assert m.rows[0][0] == Fraction(1, 3)
        assert m.rows[1][0] == Fraction(-5, 6)

    def test_ragged_rows_rejected(self):
        with pytest.raises(ValueError):
            RationalMatrix([[1, 2], [3]])

    def test_empty_matrix_needs_ncols(self):
        m = RationalMatrix([], ncols=3)
        assert (m.nrows, m.ncols) == (0, 3)
        assert m.T.nrows == 3 and m.T.ncols == 0
        with pytest.raises(ValueError):
            RationalMatrix([])

    def test_immutable_and_hashable(self):
        m = mat([[1, 2], [3, 4]])
        with pytest.raises(AttributeError):
            m.nrows = 5
        assert hash(m) == hash(mat([[1, 2], [3, 4]]))


class TestArithmetic:
    def test_matmul_and_scalar(self):
        a = mat([[1, 2], [3, 4]])
        b = mat([[0, 1], [1, 0]])
        assert a * b == mat([[2, 1], [4, 3]])
        assert 2 * a == mat([[2, 4], [6, 8]])
        assert a * Fraction(1, 2) == mat([["1/2", 1], ["3/2", 2]])

    def test_matvec(self):
        a = mat([[1, 2], [3, 4]])
        assert a.matvec((1, 1)) == (3, 7)
        with pytest.raises(ValueError):
            a.matvec((1, 2, 3))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            mat([[1, 2]]) * mat([[1, 2]])


class TestRref:
    def test_identity_is_own_rref(self):
        m = RationalMatrix.identity(3)
        reduced, pivots = m.rref()
        assert reduced == m
        assert pivots == (0, 1, 2)

    def test_rank_one_by_construction(self):
        reduced, pivots = mat([[1, 2], [2, 4]]).rref()
        assert reduced == mat([[1, 2], [0, 0]])
        assert pivots == (0,)

    def test_idempotent(self):
        rng = random.Random(1)
        for _ in range(40):
            m = mat([[random_fraction(rng) for _ in range(4)] for _ in range(3)])
            once, piv1 = m.rref()
            twice, piv2 = once.rref()
            assert once == twice and piv1 == piv2

    def test_rank_equals_transpose_rank(self):
        rng = random.Random(2)
        for _ in range(40):
            m = mat([[random_fraction(rng) for _ in range(5)] for _ in range(3)])
            assert m.rank() == m.T.rank()


class TestNullspaceInverse:
    def test_nullspace_exact(self):
        l_d = mat([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
        basis = l_d.nullspace()
        assert l_d.rank() == 2
        assert len(basis) == 1
        assert l_d.matvec(basis[0]) == (0, 0, 0)
        # the kernel is the constant vector
        assert primitive(basis[0]) == (1, 1, 1)

    def test_inverse_identity(self):
        assert RationalMatrix.identity(4).inverse() == RationalMatrix.identity(4)

    def test_inverse_roundtrip_random(self):
        rng = random.Random(3)
        found = 0
        while found < 20:
            m = mat([[random_fraction(rng) for _ in range(4)] for _ in range(4)])
            if m.rank() < 4:
                continue
            found += 1
            assert m * m.inverse() == RationalMatrix.identity(4)

    def test_singular_inverse_reports_rank(self):
        m = mat([[1, 2], [2, 4]])
        with pytest.raises(SingularMatrixError) as err:
            m.inverse()
        assert err.value.rank == 1

    def test_solve(self):
        m = mat([[2, 1], [1, 3]])
        x = m.solve((5, 10))
        assert m.matvec(x) == (5, 10)
        with pytest.raises(SingularMatrixError):
            mat([[1, 1], [1, 1]]).solve((1, 2))


class TestProducts:
    def test_kron_order(self):
        # all product combinations, first factor major
        assert kron((1, 2), (3, 5)) == (3, 5, 6, 10)

    def test_kron_identity_factor(self):
        x = (Fraction(3, 2), Fraction(-1), Fraction(7))
        assert kron(x, (1,)) == x

    def test_kron_matches_double_loop(self):
        rng = random.Random(4)
        for _ in range(30):
            u = [random_fraction(rng) for _ in range(rng.randint(1, 4))]
            v = [random_fraction(rng) for _ in range(rng.randint(1, 4))]
            expected = tuple(a * b for a in u for b in v)
            assert kron(u, v) == expected
            assert len(kron(u, v)) == len(u) * len(v)

    def test_hadamard(self):
        assert hadamard((1, 2), (3, 5)) == (3, 10)
        with pytest.raises(ValueError):
            hadamard((1, 2), (1,))


class TestGramSchmidt:
    def test_single_vector(self):
        cols, norms = gram_schmidt([(1, 1, 1)])
        assert cols == ((1, 1, 1),)
        assert norms == (3,)

    def test_two_vectors(self):
        cols, norms = gram_schmidt([(1, 0), (1, 1)])
        assert cols == ((1, 0), (0, 1))
        assert norms == (1, 1)

    def test_dependent_columns_dropped(self):
        cols, norms = gram_schmidt([(1, 2), (2, 4), (0, 1)])
        assert len(cols) == 2

    def test_pairwise_orthogonal_exactly(self):
        rng = random.Random(5)
        for _ in range(25):
            vecs = [
                tuple(random_fraction(rng) for _ in range(5)) for _ in range(4)
            ]
            cols, norms = gram_schmidt(vecs)
            for i in range(len(cols)):
                assert dot(cols[i], cols[i]) == norms[i]
                for j in range(i + 1, len(cols)):
                    assert dot(cols[i], cols[j]) == 0


class TestSchurComplement:
    def test_block_diagonal_untouched(self):
        m = mat([[1, 0, 0], [0, 5, 2], [0, 2, 3]])
        assert schur_complement(m, [0]) == mat([[1]])

    def test_scalar_schur(self):
        a, b, c = Fraction(7), Fraction(2), Fraction(5)
        m = RationalMatrix([[a, b], [b, c]])
        assert schur_complement(m, [0]) == RationalMatrix([[a - b * b / c]])

    def test_series_conductance_chain(self):
        # g1 - g2 chain over three nodes reduces to the series law g1 g2/(g1+g2)
        g1, g2 = Fraction(3), Fraction(5)
        l_chain = RationalMatrix([
            [g1, -g1, 0],
            [-g1, g1 + g2, -g2],
            [0, -g2, g2],
        ])
        red = schur_complement(l_chain, [0, 2])
        series = g1 * g2 / (g1 + g2)
        assert red == RationalMatrix([[series, -series], [-series, series]])

    def test_singular_block_raises(self):
        m = mat([[1, 1, 0], [1, 1, 0], [0, 0, 1]])
        with pytest.raises(SingularMatrixError):
            schur_complement(m, [2])
