"""Nonnegative matrix storage with dense and sparse backends.

Term-document matrices are huge and mostly zeros, while factor matrices are
small and dense.  ``DataMatrix`` hides the storage choice behind one
interface so downstream computations (residuals, products, elementwise
ratios) give the same answer on either layout.  Residual evaluation streams
over column blocks, so the reconstruction ``H @ W`` is never materialized in
full for large inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

__all__ = [
    "DataMatrix",
    "FactorPair",
    "reconstruct",
    "row_residual_norms",
    "read_snapshot",
    "write_snapshot",
]

# Largest number of dense float64 entries one residual block may occupy
# (32 MiB).  Matrices below this bound are handled in a single block, which
# keeps the residual of an exactly factorizable input bit-exact zero.
_BLOCK_ENTRIES = 1 << 22


def _validate_entries(values: np.ndarray, what: str) -> None:
    if values.size == 0:
        return
    if not np.isfinite(values).all():
        raise ValueError(f"{what} contains non-finite entries")
    lo = values.min()
    if lo < 0.0:
        raise ValueError(f"{what} contains negative entries (min {lo})")


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class DataMatrix:
    """A ``D x N`` matrix of nonnegative reals, dense or compressed sparse column.

    Values are validated and frozen at construction; instances are immutable
    and safe to share across threads.
    """

    def __init__(self, values):
        if sparse.issparse(values):
            mat = sparse.csc_array(values, dtype=np.float64, copy=True)
            mat.sum_duplicates()
            mat.eliminate_zeros()
            mat.sort_indices()
            if mat.shape[0] < 1 or mat.shape[1] < 1:
                raise ValueError("matrix must have at least one row and one column")
            _validate_entries(mat.data, "matrix")
            _freeze(mat.data)
            _freeze(mat.indices)
            _freeze(mat.indptr)
            self._values = mat
            self._is_sparse = True
        else:
            arr = np.array(values, dtype=np.float64)
            if arr.ndim != 2:
                raise ValueError(f"matrix must be 2-dimensional, got {arr.ndim} axes")
            if arr.shape[0] < 1 or arr.shape[1] < 1:
                raise ValueError("matrix must have at least one row and one column")
            _validate_entries(arr, "matrix")
            self._values = _freeze(arr)
            self._is_sparse = False

    # -- basic properties ---------------------------------------------------

    @property
    def values(self):
        """Underlying storage (read-only ndarray or csc_array)."""
        return self._values

    @property
    def is_sparse(self) -> bool:
        return self._is_sparse

    @property
    def shape(self) -> tuple[int, int]:
        return self._values.shape

    @property
    def rows(self) -> int:
        return self._values.shape[0]

    @property
    def cols(self) -> int:
        return self._values.shape[1]

    @property
    def nnz(self) -> int:
        if self._is_sparse:
            return int(self._values.nnz)
        return int(np.count_nonzero(self._values))

    def __repr__(self) -> str:
        layout = "sparse" if self._is_sparse else "dense"
        return f"DataMatrix({self.rows}x{self.cols}, {layout}, nnz={self.nnz})"

    # -- layout conversions -------------------------------------------------

    def toarray(self) -> np.ndarray:
        """Dense copy of the matrix (always writable)."""
        if self._is_sparse:
            return self._values.toarray()
        return self._values.copy()

    def to_sparse(self) -> "DataMatrix":
        if self._is_sparse:
            return self
        return DataMatrix(sparse.csc_array(self._values))

    def to_dense(self) -> "DataMatrix":
        if not self._is_sparse:
            return self
        return DataMatrix(self._values.toarray())

    # -- computations -------------------------------------------------------

    def column_block(self, start: int, stop: int) -> np.ndarray:
        """Dense view/copy of columns ``start:stop``."""
        block = self._values[:, start:stop]
        if self._is_sparse:
            return block.toarray()
        return block

    def blocks(self):
        """Yield ``(start, stop)`` column ranges bounded by the block budget."""
        step = max(1, _BLOCK_ENTRIES // max(1, self.rows))
        for start in range(0, self.cols, step):
            yield start, min(start + step, self.cols)

    def matmul(self, other: np.ndarray) -> np.ndarray:
        """``X @ other`` as a dense array."""
        return self._values @ other

    def rmatmul(self, other: np.ndarray) -> np.ndarray:
        """``other @ X`` as a dense array."""
        return other @ self._values

    def row_sumsq(self) -> np.ndarray:
        """Per-row sum of squared entries."""
        if self._is_sparse:
            return np.asarray(self._values.multiply(self._values).sum(axis=1)).ravel()
        return np.einsum("ij,ij->i", self._values, self._values)

    def sum(self) -> float:
        return float(self._values.sum())

    def divide_by_product(self, h: np.ndarray, w: np.ndarray, eps: float) -> "DataMatrix":
        """Elementwise ratio ``X / (HW + eps)``, preserving the storage layout.

        For sparse storage the ratio is evaluated only at stored positions,
        so the result keeps the sparsity pattern of ``X``.
        """
        if h.shape[0] != self.rows:
            raise ValueError(
                f"row count mismatch: matrix has {self.rows} rows, basis has {h.shape[0]}"
            )
        if w.shape[1] != self.cols:
            raise ValueError(
                f"column count mismatch: matrix has {self.cols} columns, "
                f"coefficients have {w.shape[1]}"
            )
        if self._is_sparse:
            mat = self._values
            row_idx = mat.indices
            col_idx = np.repeat(np.arange(self.cols), np.diff(mat.indptr))
            prod = np.einsum("ik,ki->i", h[row_idx, :], w[:, col_idx])
            data = mat.data / (prod + eps)
            out = sparse.csc_array(
                (data, mat.indices.copy(), mat.indptr.copy()), shape=self.shape
            )
            return DataMatrix(out)
        out = np.empty_like(self._values)
        for start, stop in self.blocks():
            out[:, start:stop] = self._values[:, start:stop] / (h @ w[:, start:stop] + eps)
        return DataMatrix(out)

    def triplets(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Nonzero entries as ``(rows, cols, values)`` in row-major order."""
        if self._is_sparse:
            coo = self._values.tocoo()
            order = np.lexsort((coo.col, coo.row))
            return coo.row[order], coo.col[order], coo.data[order]
        r, c = np.nonzero(self._values)
        return r, c, self._values[r, c]


@dataclass(frozen=True, eq=False)
class FactorPair:
    """Nonnegative basis ``H`` (D x K) and coefficients ``W`` (K x N)."""

    h: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=np.float64)
        w = np.asarray(self.w, dtype=np.float64)
        if h.ndim != 2 or w.ndim != 2:
            raise ValueError("factors must be 2-dimensional matrices")
        if h.shape[1] != w.shape[0]:
            raise ValueError(
                f"inner rank mismatch: basis has K={h.shape[1]}, "
                f"coefficients have K={w.shape[0]}"
            )
        rank = h.shape[1]
        limit = min(h.shape[0], w.shape[1])
        if not 1 <= rank <= limit:
            raise ValueError(f"rank {rank} outside [1, min(D, N)={limit}]")
        _validate_entries(h, "basis matrix")
        _validate_entries(w, "coefficient matrix")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "w", w)

    @property
    def rank(self) -> int:
        return self.h.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.h.shape[0], self.w.shape[1]


def reconstruct(factors: FactorPair) -> DataMatrix:
    """Materialize the product ``HW`` as a dense nonnegative matrix."""
    return DataMatrix(factors.h @ factors.w)


def row_residual_norms(x: DataMatrix, factors: FactorPair) -> np.ndarray:
    """Euclidean norm of each row of ``X - HW``.

    Runs over column blocks so the full reconstruction is never held in
    memory; small matrices fit in a single block and an exactly factorizable
    input yields exact zeros.
    """
    if factors.h.shape[0] != x.rows:
        raise ValueError(
            f"row count mismatch: matrix has {x.rows} rows, basis has {factors.h.shape[0]}"
        )
    if factors.w.shape[1] != x.cols:
        raise ValueError(
            f"column count mismatch: matrix has {x.cols} columns, "
            f"coefficients have {factors.w.shape[1]}"
        )
    acc = np.zeros(x.rows)
    for start, stop in x.blocks():
        resid = x.column_block(start, stop) - factors.h @ factors.w[:, start:stop]
        acc += np.einsum("ij,ij->i", resid, resid)
    return np.sqrt(acc)


def write_snapshot(matrix: DataMatrix, path) -> None:
    """Write the debugging snapshot: header ``D N nnz`` then 0-indexed
    ``row col value`` triplets, one per line, row-major order."""
    rows, cols, vals = matrix.triplets()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{matrix.rows} {matrix.cols} {len(vals)}\n")
        for r, c, v in zip(rows, cols, vals):
            fh.write(f"{int(r)} {int(c)} {float(v)!r}\n")


def read_snapshot(path) -> DataMatrix:
    """Read a snapshot file back into a sparse DataMatrix."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError(f"{path}: line 1: expected header 'D N nnz'")
        try:
            n_rows, n_cols, nnz = (int(tok) for tok in header)
        except ValueError:
            raise ValueError(f"{path}: line 1: expected integer header 'D N nnz'") from None
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=np.float64)
        for i in range(nnz):
            line = fh.readline()
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}: line {i + 2}: expected 'row col value'")
            try:
                rows[i], cols[i] = int(parts[0]), int(parts[1])
                vals[i] = float(parts[2])
            except ValueError:
                raise ValueError(f"{path}: line {i + 2}: malformed triplet {line!r}") from None
            if not (0 <= rows[i] < n_rows and 0 <= cols[i] < n_cols):
                raise ValueError(f"{path}: line {i + 2}: index out of range")
    mat = sparse.coo_array((vals, (rows, cols)), shape=(n_rows, n_cols)).tocsc()
    return DataMatrix(mat)
