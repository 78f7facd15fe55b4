"""Pattern-constrained symmetric matrices and dense symmetric eigensolving.

The eigensolver is a cyclic Jacobi iteration (rotations to convergence),
which keeps the whole stack free of external LAPACK behavior and yields
orthogonal eigenvectors by construction.  The hot kernel is JIT-compiled
when numba is available and falls back to plain numpy loops otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SymmetricMatrix",
    "EigResult",
    "MatrixFormatError",
    "eigh",
    "eigh_dense",
    "op_norm",
    "op_norm_dense",
    "hausdorff",
    "render_matrix_csv",
    "parse_matrix_csv",
]

_MAX_SWEEPS = 64
# Convergence: off-diagonal Frobenius norm <= _OFF_TOL_REL * frobenius(A).
_OFF_TOL_REL = 1e-14


class MatrixFormatError(ValueError):
    """Raised for malformed matrix CSV text."""


def _jacobi_kernel_py(a: np.ndarray, v: np.ndarray) -> int:
    """Cyclic Jacobi sweeps on a (modified in place); v accumulates rotations.

    Returns the number of sweeps used, or -1 if the off-diagonal mass did
    not fall below the relative threshold.
    """
    n = a.shape[0]
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += a[i, j] * a[i, j]
    tol = _OFF_TOL_REL * math.sqrt(fro)
    for sweep in range(_MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += 2.0 * a[p, q] * a[p, q]
        if math.sqrt(off) <= tol:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for i in range(n):
                    if i != p and i != q:
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = aip * c - aiq * s
                        a[p, i] = a[i, p]
                        a[i, q] = aiq * c + aip * s
                        a[q, i] = a[i, q]
                app = a[p, p]
                aqq = a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = vip * c - viq * s
                    v[i, q] = viq * c + vip * s
    return -1


try:
    from numba import njit

    _jacobi_kernel = njit(cache=True)(_jacobi_kernel_py)
except ImportError:  # pragma: no cover - numba is a declared dependency
    _jacobi_kernel = _jacobi_kernel_py


@dataclass(frozen=True)
class EigResult:
    """Full symmetric eigendecomposition, values ascending."""

    values: np.ndarray
    vectors: np.ndarray  # orthonormal columns, vectors[:, k] pairs with values[k]


def eigh_dense(dense: np.ndarray) -> EigResult:
    """Jacobi eigendecomposition of a dense symmetric array."""
    a = np.array(dense, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    n = a.shape[0]
    v = np.eye(n)
    sweeps = _jacobi_kernel(a, v)
    if sweeps < 0:
        raise RuntimeError(f"Jacobi iteration did not converge in {_MAX_SWEEPS} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    # Sign convention: the largest-magnitude component of each vector is
    # positive (first such index on ties).
    for k in range(n):
        col = v[:, k]
        if col[np.argmax(np.abs(col))] < 0.0:
            v[:, k] = -col
    return EigResult(values=w, vectors=v)


def op_norm_dense(dense: np.ndarray) -> float:
    vals = eigh_dense(dense).values
    return float(np.max(np.abs(vals)))


@dataclass
class SymmetricMatrix:
    """Symmetric matrix with structurally-zero entries off a sparse pattern.

    diag holds the n diagonal entries; offdiag maps 1-based edges (i, j)
    with i < j to values.  Pairs not present are exactly zero.
    """

    order: int
    diag: np.ndarray
    offdiag: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be positive, got {self.order}")
        self.diag = np.array(self.diag, dtype=float)
        if self.diag.shape != (self.order,):
            raise ValueError(f"diag must have length {self.order}")
        if not np.all(np.isfinite(self.diag)):
            raise ValueError("diagonal entries must be finite")
        for (i, j), val in self.offdiag.items():
            if not (1 <= i < j <= self.order):
                raise ValueError(f"off-diagonal key ({i}, {j}) out of range")
            if not math.isfinite(val):
                raise ValueError(f"entry at ({i}, {j}) is not finite")

    def pattern(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.offdiag)

    def entry(self, i: int, j: int) -> float:
        if i == j:
            return float(self.diag[i - 1])
        if i > j:
            i, j = j, i
        return self.offdiag.get((i, j), 0.0)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.order, self.order))
        a[np.diag_indices(self.order)] = self.diag
        for (i, j), val in self.offdiag.items():
            a[i - 1, j - 1] = val
            a[j - 1, i - 1] = val
        return a

    def direct_sum(self, scalar: float) -> "SymmetricMatrix":
        """Append one vertex carrying `scalar`, connected to nothing."""
        return SymmetricMatrix(
            order=self.order + 1,
            diag=np.append(self.diag, float(scalar)),
            offdiag=dict(self.offdiag),
        )

    @staticmethod
    def from_dense(dense: np.ndarray) -> "SymmetricMatrix":
        """Sparse view of a dense symmetric array; nonzeros define the pattern."""
        a = np.asarray(dense, dtype=float)
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise ValueError("matrix is not symmetric")
        off = {}
        for i in range(n):
            for j in range(i + 1, n):
                if a[i, j] != 0.0:
                    off[(i + 1, j + 1)] = float(a[i, j])
        return SymmetricMatrix(order=n, diag=np.diag(a).copy(), offdiag=off)


def eigh(a: SymmetricMatrix) -> EigResult:
    return eigh_dense(a.to_dense())


def op_norm(a: SymmetricMatrix) -> float:
    """Largest absolute eigenvalue."""
    return op_norm_dense(a.to_dense())


def hausdorff(s, t) -> float:
    """Hausdorff distance between two nonempty finite sets of reals."""
    s = np.asarray(sorted(s), dtype=float)
    t = np.asarray(sorted(t), dtype=float)
    if s.size == 0 or t.size == 0:
        raise ValueError("hausdorff distance needs nonempty sets")
    gaps = np.abs(s[:, None] - t[None, :])
    d_st = np.max(np.min(gaps, axis=1))  # worst s against its nearest t
    d_ts = np.max(np.min(gaps, axis=0))  # worst t against its nearest s
    return float(max(d_st, d_ts))


def render_matrix_csv(a: SymmetricMatrix) -> str:
    """Dense CSV, 17 significant digits per entry for exact round trips."""
    dense = a.to_dense()
    lines = [",".join(f"{v:.17g}" for v in row) for row in dense]
    return "\n".join(lines) + "\n"


def parse_matrix_csv(text: str) -> SymmetricMatrix:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            rows.append([float(f) for f in line.split(",")])
        except ValueError:
            raise MatrixFormatError(f"line {lineno}: non-numeric entry in {raw!r}")
    n = len(rows)
    if n == 0:
        raise MatrixFormatError("empty matrix text")
    for lineno, row in enumerate(rows, start=1):
        if len(row) != n:
            raise MatrixFormatError(
                f"line {lineno}: expected {n} columns, got {len(row)}"
            )
    dense = np.asarray(rows, dtype=float)
    if not np.array_equal(dense, dense.T):
        raise MatrixFormatError("matrix is not symmetric")
    if not np.all(np.isfinite(dense)):
        raise MatrixFormatError("matrix entries must be finite")
    return SymmetricMatrix.from_dense(dense)
