"""Dense GF(2) linear algebra.

Vectors and matrices are numpy arrays with 0/1 entries.  Internally rows are
packed into Python integers (bit j of a row word = column j), so a row XOR is
one word-parallel big-int operation.  Elimination pivots on the first set bit
of each row, scanning columns first to last.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np


def as_bit_vector(v, length: int | None = None) -> np.ndarray:
    """Coerce to a 1-D uint8 array of 0/1 values."""
    a = np.asarray(v, dtype=np.uint8)
    if a.ndim != 1:
        raise ValueError(f"expected a vector, got shape {a.shape}")
    if length is not None and a.shape[0] != length:
        raise ValueError(f"expected length {length}, got {a.shape[0]}")
    if a.size and a.max() > 1:
        raise ValueError("entries must be 0 or 1")
    return a


def as_bit_matrix(m) -> np.ndarray:
    """Coerce to a 2-D uint8 array of 0/1 values."""
    a = np.asarray(m, dtype=np.uint8)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    if a.size and a.max() > 1:
        raise ValueError("entries must be 0 or 1")
    return a


def pack_rows(m: np.ndarray) -> list[int]:
    """Pack each matrix row into an integer (bit j = column j)."""
    m = as_bit_matrix(m)
    if m.shape[1] == 0:
        return [0] * m.shape[0]
    packed = np.packbits(m, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def pack_vector(v) -> int:
    v = as_bit_vector(v)
    if v.size == 0:
        return 0
    return int.from_bytes(np.packbits(v, bitorder="little").tobytes(), "little")


def unpack_vector(x: int, n: int) -> np.ndarray:
    buf = np.frombuffer(x.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(buf, count=n, bitorder="little")


def mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product over GF(2)."""
    return (a.astype(np.int64) @ b.astype(np.int64)) % 2


class _OnlineRref:
    """Incrementally maintained reduced row echelon form of packed rows.

    Rows are inserted one at a time; earlier rows take priority, so a row that
    becomes dependent/contradictory never displaces one already kept.
    """

    __slots__ = ("pivots",)

    def __init__(self) -> None:
        self.pivots: dict[int, int] = {}  # pivot column -> fully reduced row

    def reduce(self, row: int) -> int:
        # Pivot rows are mutually reduced (set bits only at their own pivot
        # plus free columns), so one pass clears every pivot bit of `row`.
        for col, pivot_row in self.pivots.items():
            if (row >> col) & 1:
                row ^= pivot_row
        return row

    def insert_reduced(self, row: int, col: int) -> None:
        for c, r in self.pivots.items():
            if (r >> col) & 1:
                self.pivots[c] = r ^ row
        self.pivots[col] = row

    def insert(self, row: int) -> int:
        """Reduce and keep `row`. Returns its pivot column, or -1 if dependent."""
        row = self.reduce(row)
        if not row:
            return -1
        col = (row & -row).bit_length() - 1
        self.insert_reduced(row, col)
        return col


@dataclass
class PackedSolution:
    """Solution of a packed linear system, free variables forced to zero.

    When the system is inconsistent, `particular` still solves the subsystem
    of equations kept by priority order; `violated` lists the indices of the
    dropped (unsatisfiable) equations.
    """

    consistent: bool
    particular: int
    basis: list[int]
    violated: list[int]
    rank: int


def solve_packed(rows: Sequence[int], ncols: int, rhs: int) -> PackedSolution:
    """Solve the packed system rows[i] . x = bit i of rhs over GF(2)."""
    rref = _OnlineRref()
    aug = 1 << ncols
    violated: list[int] = []
    for i, row in enumerate(rows):
        word = rref.reduce(row | (aug if (rhs >> i) & 1 else 0))
        if not word:
            continue
        col = (word & -word).bit_length() - 1
        if col == ncols:
            violated.append(i)
        else:
            rref.insert_reduced(word, col)
    pivots = rref.pivots
    particular = 0
    for col, row in pivots.items():
        if (row >> ncols) & 1:
            particular |= 1 << col
    basis = []
    if len(pivots) < ncols:
        for free in range(ncols):
            if free in pivots:
                continue
            vec = 1 << free
            for col, row in pivots.items():
                if (row >> free) & 1:
                    vec |= 1 << col
            basis.append(vec)
    return PackedSolution(not violated, particular, basis, violated, len(pivots))


@dataclass
class SolutionSpace:
    """Affine solution set of a GF(2) linear system.

    status is "inconsistent", "unique", or "affine"; in the affine case the
    solutions are particular + span(basis), 2**dimension of them in total.
    """

    status: str
    particular: np.ndarray | None
    basis: list[np.ndarray] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Draw a uniform random solution."""
        if self.particular is None:
            raise ValueError("inconsistent system has no solutions")
        x = self.particular.copy()
        if self.basis:
            coeffs = rng.integers(0, 2, len(self.basis))
            for coeff, vec in zip(coeffs, self.basis):
                if coeff:
                    x ^= vec
        return x

    def solutions(self, cap: int = 20) -> Iterator[np.ndarray]:
        """Enumerate all solutions (2**dimension of them)."""
        if self.particular is None:
            return
        if self.dimension > cap:
            raise ValueError(f"solution space dimension {self.dimension} exceeds cap {cap}")
        for mask in range(1 << self.dimension):
            x = self.particular.copy()
            for j, vec in enumerate(self.basis):
                if (mask >> j) & 1:
                    x ^= vec
            yield x


def rank(m) -> int:
    """Rank over GF(2)."""
    rref = _OnlineRref()
    for row in pack_rows(m):
        rref.insert(row)
    return len(rref.pivots)


def solve(a, b) -> SolutionSpace:
    """Solve A x = b over GF(2), returning the full solution space.

    The particular solution sets all free variables to zero.
    """
    a = as_bit_matrix(a)
    b = as_bit_vector(b)
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"rhs length {b.shape[0]} does not match {a.shape[0]} rows")
    ncols = a.shape[1]
    sol = solve_packed(pack_rows(a), ncols, pack_vector(b))
    if not sol.consistent:
        return SolutionSpace("inconsistent", None)
    particular = unpack_vector(sol.particular, ncols)
    basis = [unpack_vector(v, ncols) for v in sol.basis]
    return SolutionSpace("affine" if basis else "unique", particular, basis)


def nullspace(m) -> list[np.ndarray]:
    """Basis of {x : M x = 0}, with cols - rank(M) elements."""
    m = as_bit_matrix(m)
    sol = solve_packed(pack_rows(m), m.shape[1], 0)
    return [unpack_vector(v, m.shape[1]) for v in sol.basis]


def rref_with_pivots(m) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form and its pivot columns, rows sorted by pivot."""
    m = as_bit_matrix(m)
    rref = _OnlineRref()
    for row in pack_rows(m):
        rref.insert(row)
    cols = m.shape[1]
    pivots = tuple(sorted(rref.pivots))
    reduced = np.zeros((len(pivots), cols), dtype=np.uint8)
    for i, col in enumerate(pivots):
        reduced[i] = unpack_vector(rref.pivots[col], cols)
    return reduced, pivots


def invert(m) -> np.ndarray:
    """Inverse of a square GF(2) matrix."""
    m = as_bit_matrix(m)
    n = m.shape[0]
    if m.shape[1] != n:
        raise ValueError("matrix must be square")
    rref = _OnlineRref()
    for i, row in enumerate(pack_rows(m)):
        if rref.insert(row | (1 << (n + i))) >= n:
            raise ValueError("matrix is singular")
    inv = np.zeros((n, n), dtype=np.uint8)
    for col, word in rref.pivots.items():
        inv[col] = unpack_vector(word >> n, n)
    return inv
