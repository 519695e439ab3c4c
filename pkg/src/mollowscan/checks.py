"""Small-instance invariant suite behind the CLI ``check`` verb.

Each check is cheap (dims of a few dozen at most) and exercises one
structural property end to end: vectorization against dense products,
trace preservation, the dense brute-force master-equation right-hand
side, and solver physicality. Random draws use a fixed seed so the
suite is deterministic.
"""

from __future__ import annotations

import numpy as np

from .hilbert import (
    HilbertSpace,
    SparseOperator,
    annihilation,
    embed,
    lowering_two_level,
    vec,
    vectorize_left,
    vectorize_right,
)
from .models import ModelKind, ModelParams, assemble, cavity_slot
from .observables import photon_stats
from .steadystate import solve

SEED = 20240811


def _random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / rho.trace()


def _dense_rhs_jc(params: ModelParams, rho: np.ndarray) -> np.ndarray:
    """Master-equation right-hand side evaluated with plain dense algebra."""
    import math

    nc = params.n_cavity
    space = HilbertSpace((2, nc, 2))
    sig_s = embed(lowering_two_level(), space, 0).to_dense()
    a = embed(annihilation(nc), space, 1).to_dense()
    sig = embed(lowering_two_level(), space, 2).to_dense()

    drive = math.sqrt(params.mu1) * params.omega_drive
    h = params.delta_s * (sig_s.conj().T @ sig_s) + drive * (sig_s + sig_s.conj().T)
    h = h + params.delta * (a.conj().T @ a) + params.atom_detuning * (sig.conj().T @ sig)
    h = h + params.g * (sig.conj().T @ a + sig @ a.conj().T)

    def lind(op, rate):
        od = op.conj().T
        return rate * 0.5 * (2 * op @ rho @ od - rho @ od @ op - od @ op @ rho)

    out = 1j * (rho @ h - h @ rho)
    out = out + lind(sig_s, params.gamma_s) + lind(a, params.kappa) + lind(sig, params.gamma)
    c = math.sqrt(params.mu2 * params.gamma_s * params.kappa)
    ad = a.conj().T
    out = out - c * ((ad @ sig_s @ rho - sig_s @ rho @ ad) + (rho @ sig_s.conj().T @ a - a @ rho @ sig_s.conj().T))
    return out


def run_checks() -> list[tuple[str, bool, str]]:
    """Run every invariant; returns (name, passed, detail) triples."""
    rng = np.random.default_rng(SEED)
    results: list[tuple[str, bool, str]] = []

    def record(name: str, passed: bool, detail: str) -> None:
        results.append((name, bool(passed), detail))

    # vectorization against dense brute force
    worst = 0.0
    for _ in range(5):
        d = int(rng.integers(2, 5))
        space = HilbertSpace((d,))
        a_mat = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        b_mat = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rho = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        a_op = SparseOperator(a_mat, space)
        b_op = SparseOperator(b_mat, space)
        lhs = (vectorize_left(a_op) @ vectorize_right(b_op)).matrix @ vec(rho)
        rhs = vec(a_mat @ rho @ b_mat)
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    record("vectorization-dense-oracle", worst < 1e-10, f"max abs err {worst:.2e}")

    # trace annihilation for every model kind
    params = ModelParams(n_cavity=3, n_mech=3, g=0.0)
    worst = 0.0
    for kind in ModelKind:
        p = params
        if kind in (ModelKind.CASCADED_JC, ModelKind.CASCADED_JC_THERMAL, ModelKind.CLASSICAL_JC):
            p = params.with_updates(g=0.05)
        if kind in (ModelKind.CASCADED_OMS, ModelKind.CLASSICAL_OMS):
            p = params.with_updates(g_m=0.05)
        if kind is ModelKind.CASCADED_JC_THERMAL:
            p = p.with_updates(n_th=0.1)
        lv = assemble(kind, p)
        worst = max(worst, lv.trace_defect() / max(lv.max_entry(), 1.0))
    record("trace-annihilation-all-kinds", worst < 1e-10, f"worst relative defect {worst:.2e}")

    # assembled superoperator vs dense right-hand side at n_cavity=3
    p = ModelParams(n_cavity=3, g=0.07, delta=1.3, omega_drive=2.0)
    lv = assemble(ModelKind.CASCADED_JC, p)
    worst = 0.0
    for _ in range(3):
        rho = _random_density(rng, lv.space.total_dim)
        via_super = (lv.matrix.matrix @ vec(rho)).reshape(rho.shape, order="F")
        dense = _dense_rhs_jc(p, rho)
        worst = max(worst, float(np.abs(via_super - dense).max()))
    record("dense-rhs-brute-force", worst < 1e-12, f"max abs err {worst:.2e}")

    # hermiticity preservation of the flow
    lv = assemble(ModelKind.CASCADED_JC, ModelParams(n_cavity=3, g=0.05))
    worst = 0.0
    for _ in range(3):
        rho = _random_density(rng, lv.space.total_dim)
        out = (lv.matrix.matrix @ vec(rho)).reshape(rho.shape, order="F")
        worst = max(worst, float(np.abs(out - out.conj().T).max()))
    record("hermiticity-preservation", worst < 1e-10, f"max anti-Hermitian part {worst:.2e}")

    # solver physicality on a small cascaded model
    lv = assemble(ModelKind.CASCADED_JC, ModelParams(n_cavity=4, g=0.01, delta=5.0))
    state = solve(lv)
    ok = (
        state.trace_error <= 1e-10
        and state.residual <= 1e-10 * max(lv.max_entry(), 1.0)
        and state.min_eigenvalue >= -1e-8
    )
    record(
        "steady-state-physicality",
        ok,
        f"residual {state.residual:.2e}, trace err {state.trace_error:.2e}, "
        f"min eig {state.min_eigenvalue:.2e}",
    )

    # source-only analytic excited population
    p = ModelParams(omega_drive=2.0, gamma_s=0.3)
    lv = assemble(ModelKind.SOURCE_ONLY, p)
    state = solve(lv)
    pop = float(state.rho[1, 1].real)
    expected = 4 * p.mu1 * p.omega_drive**2 / (p.gamma_s**2 + 8 * p.mu1 * p.omega_drive**2)
    err = abs(pop - expected)
    record("source-excited-population", err < 1e-10, f"abs err {err:.2e}")

    # undriven model relaxes to vacuum
    lv = assemble(ModelKind.CASCADED_JC, ModelParams(omega_drive=0.0, n_cavity=3))
    state = solve(lv)
    stats = photon_stats(state.rho, lv.space, cavity_slot(ModelKind.CASCADED_JC))
    record("undriven-vacuum", stats.n_a < 1e-12, f"n_a {stats.n_a:.2e}")

    return results
