"""Sparse Boolean matrix kernels over the Boolean semiring.

Matrices are stored in an immutable CSR layout (row pointer + sorted column
indices); the set of stored positions is the relation the matrix represents.
All kernels return canonical matrices (sorted, deduplicated), so equality is
structural. Internally every position set is manipulated as a flat array of
``row * ncols + col`` keys, which keeps the kernels vectorised and
deterministic regardless of thread count.
"""

import os

import numpy as np

_INT = np.int64


def kernel_thread_cap() -> int:
    """Upper bound on kernel-internal parallelism, from ``RPQ_THREADS``.

    The kernels below are sequential numpy code, so any cap is honoured
    trivially; the variable exists so callers can pin the degree of
    parallelism without caring about the backend.
    """
    raw = os.environ.get("RPQ_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"RPQ_THREADS must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"RPQ_THREADS must be >= 1, got {value}")
    return value


def _empty_indices() -> np.ndarray:
    return np.empty(0, dtype=_INT)


class SparseBoolMatrix:
    """CSR-style sparse Boolean matrix; stored positions are the 1-entries.

    Instances are immutable: the underlying arrays are marked read-only and
    every kernel allocates a fresh result, which makes matrices safe to share
    across threads.
    """

    __slots__ = ("nrows", "ncols", "indptr", "indices", "_keys")

    def __init__(self, nrows: int, ncols: int, indptr: np.ndarray, indices: np.ndarray):
        # Trusted constructor: arrays must already be canonical CSR.
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        self.indptr = np.asarray(indptr, dtype=_INT)
        self.indices = np.asarray(indices, dtype=_INT)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        self._keys = None

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "SparseBoolMatrix":
        if nrows < 0 or ncols < 0:
            raise ValueError(f"dimensions must be non-negative, got {nrows}x{ncols}")
        return cls(nrows, ncols, np.zeros(nrows + 1, dtype=_INT), _empty_indices())

    @classmethod
    def identity(cls, n: int) -> "SparseBoolMatrix":
        if n < 0:
            raise ValueError(f"dimension must be non-negative, got {n}")
        return cls(n, n, np.arange(n + 1, dtype=_INT), np.arange(n, dtype=_INT))

    @classmethod
    def from_coo(cls, nrows: int, ncols: int, rows, cols) -> "SparseBoolMatrix":
        """Build from (possibly duplicated, unordered) coordinate lists."""
        if nrows < 0 or ncols < 0:
            raise ValueError(f"dimensions must be non-negative, got {nrows}x{ncols}")
        rows = np.asarray(rows, dtype=_INT)
        cols = np.asarray(cols, dtype=_INT)
        if rows.shape != cols.shape:
            raise ValueError("row and column lists must have equal length")
        if rows.size == 0:
            return cls.zero(nrows, ncols)
        if rows.min() < 0 or rows.max() >= nrows or cols.min() < 0 or cols.max() >= ncols:
            raise ValueError(f"position out of bounds for {nrows}x{ncols} matrix")
        keys = np.unique(rows * ncols + cols)
        return _from_keys(nrows, ncols, keys)

    @classmethod
    def from_pairs(cls, nrows: int, ncols: int, pairs) -> "SparseBoolMatrix":
        pairs = list(pairs)
        rows = [r for r, _ in pairs]
        cols = [c for _, c in pairs]
        return cls.from_coo(nrows, ncols, rows, cols)

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def keys(self) -> np.ndarray:
        """Sorted flat keys ``row * ncols + col`` of the stored positions."""
        if self._keys is None:
            row_ids = np.repeat(np.arange(self.nrows, dtype=_INT), np.diff(self.indptr))
            self._keys = row_ids * self.ncols + self.indices
            self._keys.setflags(write=False)
        return self._keys

    def row(self, i: int) -> np.ndarray:
        if not 0 <= i < self.nrows:
            raise IndexError(f"row {i} out of range for {self.nrows}x{self.ncols} matrix")
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def get(self, i: int, j: int) -> bool:
        row = self.row(i)
        pos = np.searchsorted(row, j)
        return bool(pos < row.size and row[pos] == j)

    def to_coo(self) -> tuple[np.ndarray, np.ndarray]:
        row_ids = np.repeat(np.arange(self.nrows, dtype=_INT), np.diff(self.indptr))
        return row_ids, self.indices.copy()

    def pairs(self) -> list[tuple[int, int]]:
        rows, cols = self.to_coo()
        return list(zip(rows.tolist(), cols.tolist()))

    def validate(self) -> None:
        """Check the CSR invariants; raises AssertionError on violation."""
        assert self.indptr.shape == (self.nrows + 1,)
        assert self.indptr[0] == 0 and self.indptr[-1] == self.indices.size
        assert np.all(np.diff(self.indptr) >= 0)
        if self.indices.size:
            assert self.indices.min() >= 0 and self.indices.max() < self.ncols
            for i in range(self.nrows):
                row = self.indices[self.indptr[i] : self.indptr[i + 1]]
                assert np.all(np.diff(row) > 0), f"row {i} not strictly increasing"

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseBoolMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.indices.size == other.indices.size
            and bool(np.array_equal(self.indptr, other.indptr))
            and bool(np.array_equal(self.indices, other.indices))
        )

    __hash__ = None

    def __matmul__(self, other: "SparseBoolMatrix") -> "SparseBoolMatrix":
        return bool_matmul(self, other)

    def __or__(self, other: "SparseBoolMatrix") -> "SparseBoolMatrix":
        return or_sum(self, other)

    def __repr__(self) -> str:
        return f"SparseBoolMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


def _from_keys(nrows: int, ncols: int, keys: np.ndarray) -> SparseBoolMatrix:
    """Build a matrix from sorted, deduplicated flat keys."""
    if keys.size == 0:
        return SparseBoolMatrix.zero(nrows, ncols)
    rows = keys // ncols
    cols = keys % ncols
    counts = np.bincount(rows, minlength=nrows)
    indptr = np.concatenate(([0], np.cumsum(counts))).astype(_INT)
    return SparseBoolMatrix(nrows, ncols, indptr, cols)


def _require_same_shape(a: SparseBoolMatrix, b: SparseBoolMatrix, op: str) -> None:
    if a.shape != b.shape:
        raise ValueError(f"{op}: dimension mismatch {a.shape} vs {b.shape}")


def zero(nrows: int, ncols: int) -> SparseBoolMatrix:
    """All-zero matrix of the given dimensions."""
    return SparseBoolMatrix.zero(nrows, ncols)


def identity(n: int) -> SparseBoolMatrix:
    """Diagonal matrix with 1 at every (i, i)."""
    return SparseBoolMatrix.identity(n)


def transpose(a: SparseBoolMatrix) -> SparseBoolMatrix:
    """Matrix with (i, j) present iff (j, i) is present in the input."""
    if a.nnz == 0:
        return SparseBoolMatrix.zero(a.ncols, a.nrows)
    rows, cols = a.to_coo()
    keys = np.sort(cols * a.nrows + rows)
    return _from_keys(a.ncols, a.nrows, keys)


def or_sum(a: SparseBoolMatrix, b: SparseBoolMatrix) -> SparseBoolMatrix:
    """Elementwise OR: union of the two position sets."""
    _require_same_shape(a, b, "or_sum")
    if a.nnz == 0:
        return b
    if b.nnz == 0:
        return a
    keys = np.union1d(a.keys(), b.keys())
    return _from_keys(a.nrows, a.ncols, keys)


def mask(a: SparseBoolMatrix, m: SparseBoolMatrix) -> SparseBoolMatrix:
    """Restrict a to the positions present in m (elementwise AND)."""
    _require_same_shape(a, m, "mask")
    if a.nnz == 0 or m.nnz == 0:
        return SparseBoolMatrix.zero(a.nrows, a.ncols)
    keys = np.intersect1d(a.keys(), m.keys(), assume_unique=True)
    return _from_keys(a.nrows, a.ncols, keys)


def mask_complement(a: SparseBoolMatrix, m: SparseBoolMatrix) -> SparseBoolMatrix:
    """Restrict a to the positions absent from m.

    Equivalent to masking with the complement of m, but the (dense)
    complement is never materialised.
    """
    _require_same_shape(a, m, "mask_complement")
    if a.nnz == 0 or m.nnz == 0:
        return a
    keys = np.setdiff1d(a.keys(), m.keys(), assume_unique=True)
    return _from_keys(a.nrows, a.ncols, keys)


def bool_matmul(a: SparseBoolMatrix, b: SparseBoolMatrix) -> SparseBoolMatrix:
    """Boolean matrix product: (i, k) present iff some j links a and b.

    Row-wise sparse accumulation: for every stored (i, j) of a, row j of b is
    gathered, and the gathered positions are merged per result row.
    """
    if a.ncols != b.nrows:
        raise ValueError(f"bool_matmul: inner dimension mismatch {a.shape} x {b.shape}")
    if a.nnz == 0 or b.nnz == 0:
        return SparseBoolMatrix.zero(a.nrows, b.ncols)
    a_rows = np.repeat(np.arange(a.nrows, dtype=_INT), np.diff(a.indptr))
    starts = b.indptr[a.indices]
    lens = b.indptr[a.indices + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return SparseBoolMatrix.zero(a.nrows, b.ncols)
    seg_starts = np.cumsum(lens) - lens
    offsets = np.arange(total, dtype=_INT) - np.repeat(seg_starts, lens)
    gathered = b.indices[np.repeat(starts, lens) + offsets]
    keys = np.unique(np.repeat(a_rows, lens) * b.ncols + gathered)
    return _from_keys(a.nrows, b.ncols, keys)
