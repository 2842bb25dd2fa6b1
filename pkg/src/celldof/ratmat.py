"""Exact rational dense linear algebra.

Every analysis result in this package (Laplacians, eigenbases, loop bases,
power coefficient matrices) is a matrix of exact rationals, so that fixture
comparisons are plain equality tests rather than tolerance checks.  Floating
point only enters at the display layer and in the time-domain simulator.

Matrices are immutable; entries are ``fractions.Fraction``.  Vectors are
plain tuples of ``Fraction``.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


class SingularMatrixError(ValueError):
    """Raised when an inversion/elimination meets a rank-deficient block."""

    def __init__(self, message: str, rank: int | None = None):
        super().__init__(message)
        self.rank = rank


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to Fraction; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational entry")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"refusing inexact entry of type {type(value).__name__}: {value!r}")


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise ValueError(f"dot: length mismatch {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def hadamard(u: Sequence[Fraction], v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Entrywise product of two equal-length columns."""
    if len(u) != len(v):
        raise ValueError(f"hadamard: length mismatch {len(u)} vs {len(v)}")
    return tuple(a * b for a, b in zip(u, v))


def kron(u: Sequence[Fraction], v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Tensor product of two columns, first-factor-major order.

    kron((u1, u2), (ia, ib)) = (u1*ia, u1*ib, u2*ia, u2*ib).
    """
    return tuple(a * b for a in u for b in v)


def primitive(vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Scale a rational vector to primitive integer form (gcd 1), keeping sign."""
    vec = tuple(Fraction(x) for x in vec)
    if all(x == 0 for x in vec):
        return vec
    den_lcm = 1
    for x in vec:
        den_lcm = den_lcm * x.denominator // gcd(den_lcm, x.denominator)
    ints = [int(x * den_lcm) for x in vec]
    g = 0
    for k in ints:
        g = gcd(g, abs(k))
    return tuple(Fraction(k // g) for k in ints)


class RationalMatrix:
    """Immutable dense matrix of exact rationals."""

    __slots__ = ("_rows", "_ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        norm = tuple(tuple(as_fraction(x) for x in row) for row in rows)
        if norm:
            ncols = len(norm[0])
            if any(len(r) != ncols for r in norm):
                raise ValueError("ragged rows")
        elif ncols is None:
            raise ValueError("empty matrix needs an explicit column count")
        object.__setattr__(self, "_rows", norm)
        object.__setattr__(self, "_ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("RationalMatrix is immutable")

    # -- construction -----------------------------------------------------
    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols=ncols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def diagonal(cls, values: Sequence) -> "RationalMatrix":
        vals = [as_fraction(v) for v in values]
        n = len(vals)
        return cls([[vals[i] if i == j else 0 for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int | None = None) -> "RationalMatrix":
        cols = [tuple(as_fraction(x) for x in c) for c in columns]
        if cols:
            nrows = len(cols[0])
            if any(len(c) != nrows for c in cols):
                raise ValueError("ragged columns")
            return cls([[c[i] for c in cols] for i in range(nrows)])
        if nrows is None:
            raise ValueError("empty column list needs an explicit row count")
        return cls([[] for _ in range(nrows)], ncols=0)

    # -- shape and access --------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(self.col(j) for j in range(self._ncols))

    @property
    def T(self) -> "RationalMatrix":
        if self._rows:
            return RationalMatrix(zip(*self._rows), ncols=self.nrows)
        return RationalMatrix([[] for _ in range(self._ncols)], ncols=0)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix(
            [[self._rows[i][j] for j in col_idx] for i in row_idx], ncols=len(col_idx)
        )

    def is_zero(self) -> bool:
        return all(x == 0 for row in self._rows for x in row)

    def as_float(self) -> list[list[float]]:
        return [[float(x) for x in row] for row in self._rows]

    # -- algebra -----------------------------------------------------------
    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RationalMatrix)
            and self._ncols == other._ncols
            and self._rows == other._rows
        )

    def __hash__(self):
        return hash((self._rows, self._ncols))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in row) for row in self._rows)
        return f"RationalMatrix({self.nrows}x{self.ncols}: {body})"

    def __neg__(self):
        return RationalMatrix([[-x for x in row] for row in self._rows], ncols=self._ncols)

    def __add__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch in addition")
        return RationalMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._rows, other._rows)],
            ncols=self._ncols,
        )

    def __sub__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RationalMatrix):
            if self._ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} * {other.nrows}x{other.ncols}")
            cols = other.columns()
            return RationalMatrix(
                [[dot(row, c) for c in cols] for row in self._rows], ncols=other.ncols
            )
        try:
            s = as_fraction(other)
        except TypeError:
            return NotImplemented
        return RationalMatrix([[x * s for x in row] for row in self._rows], ncols=self._ncols)

    def __rmul__(self, other):
        try:
            s = as_fraction(other)
        except TypeError:
            return NotImplemented
        return RationalMatrix([[x * s for x in row] for row in self._rows], ncols=self._ncols)

    def matvec(self, v: Sequence) -> tuple[Fraction, ...]:
        vv = tuple(as_fraction(x) for x in v)
        if len(vv) != self._ncols:
            raise ValueError(f"matvec: vector length {len(vv)} != {self._ncols} columns")
        return tuple(dot(row, vv) for row in self._rows)

    def augment(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.nrows != other.nrows:
            raise ValueError("augment: row count mismatch")
        return RationalMatrix(
            [r1 + r2 for r1, r2 in zip(self._rows, other._rows)],
            ncols=self._ncols + other._ncols,
        )

    # -- elimination -------------------------------------------------------
    def rref(self) -> tuple["RationalMatrix", tuple[int, ...]]:
        """Reduced row-echelon form and the strictly increasing pivot columns."""
        m = [list(row) for row in self._rows]
        nrows, ncols = self.nrows, self._ncols
        pivots: list[int] = []
        r = 0
        for c in range(ncols):
            if r == nrows:
                break
            pr = next((i for i in range(r, nrows) if m[i][c] != 0), None)
            if pr is None:
                continue
            m[r], m[pr] = m[pr], m[r]
            piv = m[r][c]
            m[r] = [x / piv for x in m[r]]
            for i in range(nrows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
        return RationalMatrix(m, ncols=ncols), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> tuple[tuple[Fraction, ...], ...]:
        """Columns spanning the exact kernel, one per free column of the RREF."""
        reduced, pivots = self.rref()
        free = [c for c in range(self._ncols) if c not in pivots]
        basis = []
        for fc in free:
            v = [Fraction(0)] * self._ncols
            v[fc] = Fraction(1)
            for r, pc in enumerate(pivots):
                v[pc] = -reduced.rows[r][fc]
            basis.append(tuple(v))
        return tuple(basis)

    def inverse(self) -> "RationalMatrix":
        if self.nrows != self._ncols:
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        reduced, pivots = self.augment(RationalMatrix.identity(n)).rref()
        if len(pivots) < n or pivots[n - 1] != n - 1:
            raise SingularMatrixError(
                f"singular matrix: rank {self.rank()} < {n}", rank=self.rank()
            )
        return reduced.submatrix(range(n), range(n, 2 * n))

    def solve(self, rhs: Sequence) -> tuple[Fraction, ...]:
        """Solve M x = rhs for square nonsingular M."""
        if self.nrows != self._ncols:
            raise ValueError("solve needs a square matrix")
        b = RationalMatrix([[as_fraction(x)] for x in rhs], ncols=1)
        if b.nrows != self.nrows:
            raise ValueError("solve: rhs length mismatch")
        reduced, pivots = self.augment(b).rref()
        if len(pivots) < self.nrows or any(p >= self.nrows for p in pivots):
            raise SingularMatrixError(
                f"singular matrix: rank {self.rank()} < {self.nrows}", rank=self.rank()
            )
        return reduced.col(self.nrows)


def stack_rows(rows: Sequence[Sequence], ncols: int) -> RationalMatrix:
    """Matrix from a possibly-empty list of row vectors."""
    return RationalMatrix(rows, ncols=ncols)


def gram_schmidt(
    columns: Sequence[Sequence[Fraction]],
) -> tuple[tuple[tuple[Fraction, ...], ...], tuple[Fraction, ...]]:
    """Orthogonalize columns over the rationals, in order.

    Returns the pairwise-orthogonal nonzero columns and their squared norms.
    Normalization factors are generally irrational, so they are left to the
    caller; dependent inputs reduce to zero columns and are dropped.
    """
    ortho: list[tuple[Fraction, ...]] = []
    sqnorms: list[Fraction] = []
    for col in columns:
        v = [as_fraction(x) for x in col]
        for u, n2 in zip(ortho, sqnorms):
            f = dot(v, u) / n2
            if f != 0:
                v = [a - f * b for a, b in zip(v, u)]
        n2 = dot(v, v)
        if n2 != 0:
            ortho.append(tuple(v))
            sqnorms.append(n2)
    return tuple(ortho), tuple(sqnorms)


def schur_complement(m: RationalMatrix, keep: Sequence[int]) -> RationalMatrix:
    """Schur complement onto the kept index set: M_kk - M_ke M_ee^{-1} M_ek.

    The eliminated diagonal block must be nonsingular.
    """
    keep = list(keep)
    if m.nrows != m.ncols:
        raise ValueError("schur_complement needs a square matrix")
    if len(set(keep)) != len(keep):
        raise ValueError("duplicate indices in keep set")
    elim = [i for i in range(m.nrows) if i not in set(keep)]
    if not elim:
        return m.submatrix(keep, keep)
    m_kk = m.submatrix(keep, keep)
    m_ke = m.submatrix(keep, elim)
    m_ek = m.submatrix(elim, keep)
    m_ee = m.submatrix(elim, elim)
    try:
        m_ee_inv = m_ee.inverse()
    except SingularMatrixError as exc:
        raise SingularMatrixError(
            f"eliminated block is singular (rank {exc.rank} of {len(elim)})", rank=exc.rank
        ) from exc
    return m_kk - m_ke * m_ee_inv * m_ek
