"""Tensor-product operator algebra on truncated Hilbert spaces.

Conventions used throughout the package:

* The ground / vacuum state of every subsystem is index 0.
* Composite indices are row-major: the first listed subsystem varies
  slowest, so composite matrices follow ``numpy.kron`` ordering.
* Vectorization is column-stacking, ``vec(rho) = rho.flatten(order='F')``.
  Under this convention left multiplication ``A rho`` becomes
  ``(I kron A) vec(rho)`` and right multiplication ``rho B`` becomes
  ``(B^T kron I) vec(rho)``.

All operators are immutable after construction and safe to share across
processes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

#: Absolute magnitude below which matrix entries are not stored.
DROP_TOLERANCE = 1e-14


class DimensionError(ValueError):
    """Raised for invalid subsystem dimensions or shape mismatches."""


class AlgebraError(ValueError):
    """Raised when operands of an algebraic operation live on different spaces."""


@dataclass(frozen=True)
class HilbertSpace:
    """An ordered tensor product of finite-dimensional subsystems.

    Parameters
    ----------
    dims:
        Subsystem dimensions, one entry per tensor factor. Two-level
        systems use dimension 2; truncated bosonic modes use their Fock
        cutoff (>= 1).
    """

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise DimensionError("a Hilbert space needs at least one subsystem")
        if any(d < 1 for d in dims):
            raise DimensionError(f"subsystem dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)


def _pruned(matrix: sp.spmatrix, tol: float) -> sp.csr_matrix:
    m = sp.csr_matrix(matrix, dtype=complex)
    if m.nnz:
        m.data[np.abs(m.data) <= tol] = 0.0
        m.eliminate_zeros()
    m.sort_indices()
    return m


class SparseOperator:
    """A sparse linear operator attached to a :class:`HilbertSpace`.

    Entries with magnitude at or below ``drop_tol`` are never stored, so
    algebraic cancellation does not accumulate explicit zeros.
    """

    __slots__ = ("space", "matrix")

    def __init__(self, matrix, space: HilbertSpace, drop_tol: float = DROP_TOLERANCE):
        m = _pruned(matrix, drop_tol)
        d = space.total_dim
        if m.shape != (d, d):
            raise DimensionError(
                f"matrix shape {m.shape} does not match space dimension {d}"
            )
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError("SparseOperator is immutable")

    # -- basic queries -------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def items(self):
        """Yield ``((row, col), amplitude)`` for every stored entry."""
        coo = self.matrix.tocoo()
        for r, c, v in zip(coo.row, coo.col, coo.data):
            yield (int(r), int(c)), complex(v)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    # -- algebra -------------------------------------------------------

    def _check_space(self, other: "SparseOperator") -> None:
        if self.space != other.space:
            raise AlgebraError(
                f"operands live on different spaces: {self.space.dims} vs {other.space.dims}"
            )

    def dagger(self) -> "SparseOperator":
        return SparseOperator(self.matrix.conjugate().T, self.space)

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_space(other)
        return SparseOperator(self.matrix + other.matrix, self.space)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_space(other)
        return SparseOperator(self.matrix - other.matrix, self.space)

    def __mul__(self, scalar: complex) -> "SparseOperator":
        return SparseOperator(self.matrix * scalar, self.space)

    __rmul__ = __mul__

    def __neg__(self) -> "SparseOperator":
        return self * (-1.0)

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_space(other)
        return SparseOperator(self.matrix @ other.matrix, self.space)

    def __repr__(self) -> str:
        return f"SparseOperator(dims={self.space.dims}, nnz={self.nnz})"


# -- constructors ------------------------------------------------------


def annihilation(dim: int) -> SparseOperator:
    """Bosonic lowering operator on a ``dim``-level truncated Fock space.

    Matrix elements are ``<n-1| a |n> = sqrt(n)`` for ``1 <= n < dim``.
    ``dim=1`` gives the 1x1 zero operator (vacuum-only space).
    """
    dim = int(dim)
    if dim < 1:
        raise DimensionError(f"annihilation needs dim >= 1, got {dim}")
    n = np.arange(1, dim)
    m = sp.csr_matrix((np.sqrt(n), (n - 1, n)), shape=(dim, dim), dtype=complex)
    return SparseOperator(m, HilbertSpace((dim,)))


def lowering_two_level() -> SparseOperator:
    """Two-level lowering operator ``|g><e|`` with ground state at index 0."""
    m = sp.csr_matrix(([1.0], ([0], [1])), shape=(2, 2), dtype=complex)
    return SparseOperator(m, HilbertSpace((2,)))


def identity(space: HilbertSpace) -> SparseOperator:
    return SparseOperator(sp.identity(space.total_dim, dtype=complex, format="csr"), space)


def embed(op: SparseOperator, space: HilbertSpace, slot: int) -> SparseOperator:
    """Lift a single-subsystem operator into ``space`` at position ``slot``.

    The result acts as ``op`` on the chosen subsystem and as identity on
    every other factor.
    """
    if not 0 <= slot < space.n_subsystems:
        raise DimensionError(f"slot {slot} out of range for {space.dims}")
    if op.space.total_dim != space.dims[slot]:
        raise DimensionError(
            f"operator dimension {op.space.total_dim} does not fit slot {slot} "
            f"of {space.dims}"
        )
    result = None
    for i, d in enumerate(space.dims):
        factor = op.matrix if i == slot else sp.identity(d, dtype=complex, format="csr")
        result = factor if result is None else sp.kron(result, factor, format="csr")
    return SparseOperator(result, space)


# -- vectorization -----------------------------------------------------


def _super_space(space: HilbertSpace) -> HilbertSpace:
    d = space.total_dim
    return HilbertSpace((d * d,))


def vectorize_left(op: SparseOperator) -> SparseOperator:
    """Superoperator for left multiplication, ``vec(A rho) = vectorize_left(A) vec(rho)``.

    Column-stacking convention: returns ``I kron A`` on a space of
    dimension ``total_dim**2``.
    """
    d = op.space.total_dim
    eye = sp.identity(d, dtype=complex, format="csr")
    return SparseOperator(sp.kron(eye, op.matrix, format="csr"), _super_space(op.space))


def vectorize_right(op: SparseOperator) -> SparseOperator:
    """Superoperator for right multiplication, ``vec(rho B) = vectorize_right(B) vec(rho)``.

    Column-stacking convention: returns ``B^T kron I``.
    """
    d = op.space.total_dim
    eye = sp.identity(d, dtype=complex, format="csr")
    return SparseOperator(sp.kron(op.matrix.T, eye, format="csr"), _super_space(op.space))


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stack a density matrix into a vector."""
    return np.asarray(rho).flatten(order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    return np.asarray(v).reshape((dim, dim), order="F")
