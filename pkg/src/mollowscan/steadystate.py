"""Steady-state solution of the assembled Liouvillians.

``L vec(rho) = 0`` with ``Tr rho = 1`` is solved as a bordered sparse
linear system: one redundant row of L (the first) is replaced by the
trace-constraint row and the resulting nonsingular system is handed to
a direct sparse LU factorization. Above a configurable size cap the
solver falls back to preconditioned LGMRES at the same tolerance.

The trace is enforced by the constraint row; afterwards the Hermitian
part of the solution is taken and renormalized. The reported residual
``|| L vec(rho) ||_2`` is always computed against the unmodified
Liouvillian, so any damage done by that massaging would show up there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .hilbert import unvec, vec
from .models import (
    ConfigurationError,
    LiouvillianMatrix,
    ModelKind,
    ModelParams,
    assemble,
    cavity_slot,
)

DEFAULT_TOLERANCE = 1e-10
#: Superoperator dimension above which the direct factorization is not attempted.
DIRECT_SIZE_CAP = 300_000
#: Truncation ladder abort threshold (per bosonic mode).
DEFAULT_DIM_CAP = 64


class SolverError(RuntimeError):
    """Raised when no steady state meeting the tolerance could be produced."""


class NonUniqueSteadyStateError(SolverError):
    """Raised when the bordered system is singular (degenerate steady-state manifold)."""


class TruncationError(RuntimeError):
    """Raised when the truncation ladder hits its cap without converging."""


@dataclass(frozen=True)
class SteadyState:
    """A solved steady state with its certification numbers.

    ``min_eigenvalue`` is diagnostic only: negative values are reported,
    never projected away, so truncation problems stay visible.
    """

    rho: np.ndarray
    residual: float
    trace_error: float
    min_eigenvalue: float


def _bordered(matrix: sp.spmatrix, dim: int) -> sp.csc_matrix:
    # drop row 0 of L, then add the trace row: ones at columns i * (dim + 1)
    coo = matrix.tocoo()
    keep = coo.row != 0
    rows = np.concatenate([coo.row[keep], np.zeros(dim, dtype=coo.row.dtype)])
    cols = np.concatenate([coo.col[keep], np.arange(dim) * (dim + 1)])
    data = np.concatenate([coo.data[keep], np.ones(dim, dtype=complex)])
    n = dim * dim
    return sp.csc_matrix((data, (rows, cols)), shape=(n, n))


def _solve_direct(bordered: sp.csc_matrix, b: np.ndarray) -> np.ndarray:
    try:
        lu = spla.splu(bordered)
    except RuntimeError as exc:  # splu signals exact singularity this way
        raise NonUniqueSteadyStateError(
            f"bordered Liouvillian is singular; steady state not unique ({exc})"
        ) from exc
    return lu.solve(b)


def _solve_iterative(bordered: sp.csc_matrix, b: np.ndarray) -> np.ndarray:
    # An incomplete-LU preconditioner helps on mildly stiff systems but
    # stagnates (or comes out singular) on strongly detuned ones, where
    # plain LGMRES still grinds through. Try it briefly, then drop it.
    m = None
    try:
        precond = spla.spilu(bordered, drop_tol=1e-4, fill_factor=10)
        m = spla.LinearOperator(bordered.shape, precond.solve)
    except RuntimeError:
        pass
    if m is not None:
        x, info = spla.lgmres(bordered, b, M=m, rtol=1e-13, atol=1e-14, maxiter=500)
        if info == 0:
            return x
    x, info = spla.lgmres(bordered, b, rtol=1e-13, atol=1e-14, maxiter=20000)
    if info != 0:
        resid = float(np.linalg.norm(bordered @ x - b))
        raise SolverError(
            f"iterative steady-state solve did not converge (info={info}, residual={resid:.3e})"
        )
    return x


def solve(
    lv: LiouvillianMatrix,
    tol: float = DEFAULT_TOLERANCE,
    method: str = "auto",
    direct_cap: int = DIRECT_SIZE_CAP,
) -> SteadyState:
    """Solve for the unique steady state of an assembled Liouvillian.

    Parameters
    ----------
    lv:
        Liouvillian from :func:`mollowscan.models.assemble`.
    tol:
        Residual acceptance threshold, relative to the largest
        superoperator entry magnitude.
    method:
        ``"auto"`` picks direct LU below ``direct_cap`` superoperator
        rows and LGMRES above; ``"direct"`` / ``"iterative"`` force one.
    """
    if method not in ("auto", "direct", "iterative"):
        raise ValueError(f"unknown method {method!r}")
    d = lv.space.total_dim
    n = d * d
    scale = max(lv.max_entry(), 1.0)
    if lv.trace_defect() > 1e-10 * scale:
        raise SolverError("Liouvillian is not trace-annihilating; refusing to solve")

    bordered = _bordered(lv.matrix.matrix, d)
    b = np.zeros(n, dtype=complex)
    b[0] = 1.0
    if method == "direct" or (method == "auto" and n <= direct_cap):
        x = _solve_direct(bordered, b)
    else:
        x = _solve_iterative(bordered, b)

    rho = unvec(x, d)
    rho = 0.5 * (rho + rho.conj().T)
    trace = float(rho.trace().real)
    if not math.isfinite(trace) or abs(trace) < 1e-6:
        raise NonUniqueSteadyStateError(
            f"solution trace {trace} is degenerate; steady state not unique"
        )
    rho = rho / trace

    residual = float(np.linalg.norm(lv.matrix.matrix @ vec(rho)))
    threshold = tol * scale
    if not math.isfinite(residual) or residual > threshold:
        raise SolverError(
            f"steady-state residual {residual:.3e} exceeds tolerance {threshold:.3e}"
        )
    trace_error = abs(float(rho.trace().real) - 1.0)
    min_eig = float(np.linalg.eigvalsh(rho).min())
    return SteadyState(rho=rho, residual=residual, trace_error=trace_error, min_eigenvalue=min_eig)


# -- truncation convergence --------------------------------------------


def _observable_value(kind: ModelKind, params: ModelParams, observable: str, solver_tol: float) -> float:
    from .observables import photon_stats

    lv = assemble(kind, params)
    state = solve(lv, tol=solver_tol)
    stats = photon_stats(state.rho, lv.space, cavity_slot(kind))
    if observable == "n_a":
        return stats.n_a
    if stats.g2 is None:
        raise SolverError("g2 undefined at this point (cavity population below floor)")
    return stats.g2


def _ladder_dims(kind: ModelKind) -> tuple[str, ...]:
    if kind is ModelKind.SOURCE_ONLY:
        raise ConfigurationError("SourceOnly has no bosonic truncation to converge")
    if kind in (ModelKind.CASCADED_OMS, ModelKind.CLASSICAL_OMS):
        return ("n_cavity", "n_mech")
    return ("n_cavity",)


def converge_truncation(
    kind: ModelKind | str,
    params: ModelParams,
    observable: str = "n_a",
    start_dims: dict[str, int] | None = None,
    tol: float = 1e-6,
    cap: int = DEFAULT_DIM_CAP,
    solver_tol: float = DEFAULT_TOLERANCE,
) -> tuple[dict[str, int], float]:
    """Find truncations at which ``observable`` is converged to ``tol``.

    Each participating Fock dimension is doubled until the observable
    changes by less than ``tol`` relatively between successive rungs;
    the certified (smaller) dimensions and the observable value there
    are returned. For the optomechanical kinds the cavity dimension is
    converged first with the mechanical dimension held, then the
    mechanical one with the certified cavity dimension; the couplings
    studied here are weak enough that the two ladders are independent
    at the stated tolerances.

    ``tol=math.inf`` skips the ladder and returns the starting
    dimensions with their observable value.
    """
    if isinstance(kind, str):
        kind = ModelKind.parse(kind)
    if observable not in ("n_a", "g2"):
        raise ValueError(f"observable must be 'n_a' or 'g2', got {observable!r}")
    if tol <= 0:
        raise ValueError("tol must be positive")

    names = _ladder_dims(kind)
    dims = {name: getattr(params, name) for name in names}
    if start_dims:
        unknown = set(start_dims) - set(names)
        if unknown:
            raise ConfigurationError(f"start_dims keys {sorted(unknown)} not used by {kind.value}")
        dims.update({k: int(v) for k, v in start_dims.items()})

    current = params.with_updates(**dims)
    value = _observable_value(kind, current, observable, solver_tol)
    if math.isinf(tol):
        return dims, value

    for name in names:
        while True:
            doubled = dims[name] * 2
            if doubled > cap:
                raise TruncationError(
                    f"{name} ladder exceeded cap {cap} without converging "
                    f"{observable} to {tol} (last value {value:.6e})"
                )
            trial_dims = dict(dims, **{name: doubled})
            trial = params.with_updates(**trial_dims)
            trial_value = _observable_value(kind, trial, observable, solver_tol)
            change = abs(trial_value - value) / max(abs(trial_value), 1e-300)
            if change < tol:
                break  # dims[name] is certified; keep its value
            dims = trial_dims
            value = trial_value
    return dims, value
