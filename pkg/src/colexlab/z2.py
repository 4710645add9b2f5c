"""Linear algebra over GF(2) and Z2 chain complexes.

Chains, Pauli supports and syndromes are all plain 1-D ``uint8`` arrays of
0/1 entries.  Matrices are wrapped in :class:`Z2Matrix`; elimination runs on a
bit-packed copy of the rows so that row additions are byte-wide XORs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np


def bitchain(bits: Iterable[int] | np.ndarray, length: Optional[int] = None) -> np.ndarray:
    """Return an immutable 0/1 vector.

    ``bits`` is either a dense 0/1 sequence, or (when ``length`` is given) the
    list of set positions.
    """
    if length is not None:
        out = np.zeros(length, dtype=np.uint8)
        idx = np.fromiter(bits, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= length):
            raise IndexError("bit position out of range")
        np.bitwise_xor.at(out, idx, 1)
    else:
        out = np.asarray(bits, dtype=np.uint8) & 1
        out = out.copy()
    out.setflags(write=False)
    return out


def weight(c: np.ndarray) -> int:
    return int(np.count_nonzero(c))


def support(c: np.ndarray) -> list[int]:
    return np.flatnonzero(c).tolist()


@dataclass(frozen=True, eq=False)
class Z2Matrix:
    """Dense matrix over GF(2); ``data`` is a read-only ``uint8`` array."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.uint8) & 1
        if arr.ndim != 2:
            raise ValueError("Z2Matrix needs a 2-D array")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Z2Matrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> "Z2Matrix":
        return cls(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_supports(cls, supports: Sequence[Iterable[int]], cols: int) -> "Z2Matrix":
        """One row per support list."""
        arr = np.zeros((len(supports), cols), dtype=np.uint8)
        for i, s in enumerate(supports):
            for j in s:
                arr[i, j] ^= 1
        return cls(arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def T(self) -> "Z2Matrix":
        return Z2Matrix(self.data.T)

    def __matmul__(self, other):
        if isinstance(other, Z2Matrix):
            return Z2Matrix(matmul(self.data, other.data))
        return matmul(self.data, np.asarray(other, dtype=np.uint8))

    def __eq__(self, other):
        if not isinstance(other, Z2Matrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.shape, self.data.tobytes()))

    def is_zero(self) -> bool:
        return not self.data.any()

    def __repr__(self):
        return f"Z2Matrix({self.rows}x{self.cols})"


def _as_array(M) -> np.ndarray:
    if isinstance(M, Z2Matrix):
        return M.data
    return np.asarray(M, dtype=np.uint8) & 1


def matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix (or matrix-vector) product mod 2."""
    # int32 accumulation keeps the dot product exact for any desk-scale size
    return (A.astype(np.int32) @ B.astype(np.int32) & 1).astype(np.uint8)


def _rref(A: np.ndarray, pivot_cols: Optional[int] = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form, pivoting on the lowest available row index.

    Returns the bit-packed reduced rows and the pivot columns; row ``i`` of the
    result has its leading one in column ``pivots[i]``.  Only the first
    ``pivot_cols`` columns are used as pivots (all by default).
    """
    m, n = A.shape
    P = np.packbits(A, axis=1) if n else np.zeros((m, 0), dtype=np.uint8)
    pivots: list[int] = []
    r = 0
    for c in range(n if pivot_cols is None else pivot_cols):
        if r == m:
            break
        byte, bit = c >> 3, np.uint8(0x80 >> (c & 7))
        hits = np.flatnonzero(P[r:, byte] & bit)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            P[[r, p]] = P[[p, r]]
        others = np.flatnonzero(P[:, byte] & bit)
        others = others[others != r]
        if others.size:
            P[others] ^= P[r]
        pivots.append(c)
        r += 1
    return P, pivots


def _unpack(P: np.ndarray, n: int) -> np.ndarray:
    return np.unpackbits(P, axis=1, count=n) if P.size else np.zeros((P.shape[0], n), dtype=np.uint8)


def rref(M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``M`` (nonzero rows only) and its pivots."""
    A = _as_array(M)
    P, piv = _rref(A)
    return _unpack(P[: len(piv)], A.shape[1]), piv


def rank(M) -> int:
    return len(_rref(_as_array(M))[1])


def solve(M, b) -> Optional[np.ndarray]:
    """Some ``x`` with ``M x = b``, or ``None`` when the system is inconsistent.

    Free variables are set to zero, so the answer is fixed for fixed ``M, b``.
    """
    A = _as_array(M)
    b = np.asarray(b, dtype=np.uint8) & 1
    if b.ndim != 1 or b.shape[0] != A.shape[0]:
        raise ValueError(f"right-hand side has length {b.shape[0]}, matrix has {A.shape[0]} rows")
    n = A.shape[1]
    aug = np.concatenate([A, b[:, None]], axis=1)
    P, piv = _rref(aug)
    if piv and piv[-1] == n:
        return None
    R = _unpack(P[: len(piv)], n + 1)
    x = np.zeros(n, dtype=np.uint8)
    x[piv] = R[:, n]
    return x


def solve_many(M, B) -> Optional[np.ndarray]:
    """Column-wise :func:`solve` for a matrix of right-hand sides.

    Returns ``X`` with ``M X = B``, or ``None`` if any column is inconsistent.
    """
    A = _as_array(M)
    B = np.asarray(B, dtype=np.uint8).reshape(A.shape[0], -1) & 1
    n = A.shape[1]
    P, piv = _rref(np.concatenate([A, B], axis=1), pivot_cols=n)
    R = _unpack(P, n + B.shape[1])
    if R[len(piv):, n:].any():
        return None
    X = np.zeros((n, B.shape[1]), dtype=np.uint8)
    X[piv] = R[: len(piv), n:]
    return X


def nullspace_basis(M) -> list[np.ndarray]:
    """Basis of ``ker M``, one vector per free column in increasing order."""
    A = _as_array(M)
    n = A.shape[1]
    R, piv = rref(A)
    free = [c for c in range(n) if c not in set(piv)]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.uint8)
        v[f] = 1
        if piv:
            v[piv] = R[:, f]
        basis.append(v)
    return basis


def row_basis(M) -> np.ndarray:
    """Rows of the reduced echelon form: a basis of the row space."""
    return rref(M)[0]


def in_rowspan(v, M) -> bool:
    A = _as_array(M)
    if A.shape[0] == 0:
        return not np.any(v)
    return solve(A.T, v) is not None


def independent_rows(M) -> list[int]:
    """Indices of a maximal independent subset of rows, greedily in order."""
    A = _as_array(M)
    _, piv = _rref(np.ascontiguousarray(A.T))
    return piv


def inverse(M) -> np.ndarray:
    A = _as_array(M)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse needs a square matrix")
    R, piv = rref(np.concatenate([A, np.eye(n, dtype=np.uint8)], axis=1))
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ValueError("matrix is singular over GF(2)")
    return R[:n, n:]


def quotient_representatives(cycles: Sequence[np.ndarray], boundaries: np.ndarray, n: int) -> list[np.ndarray]:
    """Members of ``cycles`` that are independent modulo the row space of ``boundaries``.

    Scans ``cycles`` in order and keeps each one that raises the rank.
    """
    base = np.asarray(boundaries, dtype=np.uint8).reshape(-1, n)
    stack = np.concatenate([base, np.asarray(cycles, dtype=np.uint8).reshape(-1, n)], axis=0)
    keep = [i - base.shape[0] for i in independent_rows(stack) if i >= base.shape[0]]
    return [np.asarray(cycles[i], dtype=np.uint8) for i in keep]


@dataclass(frozen=True)
class HomologySummary:
    cycle_rank: int
    boundary_rank: int

    @property
    def betti(self) -> int:
        return self.cycle_rank - self.boundary_rank


@dataclass(frozen=True, eq=False)
class ChainComplex:
    """Z2 chain complex ``C_top -> ... -> C_1 -> C_0``.

    ``boundaries[i - 1]`` is the map from dimension ``i`` to ``i - 1`` and has
    shape ``(dims[i - 1], dims[i])``.
    """

    dims: tuple[int, ...]
    boundaries: tuple[Z2Matrix, ...] = field(default=())

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        bds = tuple(b if isinstance(b, Z2Matrix) else Z2Matrix(b) for b in self.boundaries)
        if len(bds) != len(dims) - 1:
            raise ValueError(f"{len(dims)} groups need {len(dims) - 1} boundary maps, got {len(bds)}")
        for i, b in enumerate(bds, start=1):
            if b.shape != (dims[i - 1], dims[i]):
                raise ValueError(f"boundary {i} has shape {b.shape}, expected {(dims[i - 1], dims[i])}")
        for i in range(len(bds) - 1):
            if not (bds[i] @ bds[i + 1]).is_zero():
                raise ValueError(f"boundary {i + 1} composed with boundary {i + 2} is not zero")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "boundaries", bds)

    def boundary(self, i: int) -> Z2Matrix:
        """Map from dimension ``i`` to ``i - 1``; zero outside the stored range."""
        if 1 <= i < len(self.dims):
            return self.boundaries[i - 1]
        if i == 0:
            return Z2Matrix.zeros(0, self.dims[0])
        if i == len(self.dims):
            return Z2Matrix.zeros(self.dims[-1], 0)
        raise IndexError(f"no boundary map {i}")

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return self.dims == other.dims and self.boundaries == other.boundaries

    def __hash__(self):
        return hash((self.dims, self.boundaries))


def homology(cx: ChainComplex, i: int) -> HomologySummary:
    if not 0 <= i < len(cx.dims):
        raise IndexError(f"homology index {i} outside 0..{len(cx.dims) - 1}")
    d_i = cx.boundary(i)
    d_next = cx.boundary(i + 1)
    return HomologySummary(cycle_rank=cx.dims[i] - rank(d_i), boundary_rank=rank(d_next))


def dualize(cx: ChainComplex) -> ChainComplex:
    """Reverse the complex and transpose every map (the coboundary complex)."""
    return ChainComplex(dims=cx.dims[::-1], boundaries=tuple(b.T for b in reversed(cx.boundaries)))
