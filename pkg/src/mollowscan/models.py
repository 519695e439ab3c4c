"""Liouvillian assembly for the cascaded source->target model families.

The source is a coherently driven two-level emitter whose output field
feeds a target (a Jaynes-Cummings cavity or an optomechanical cavity)
through a unidirectional dissipative coupling: the target sees the
source light, the source never sees the target. Classical-drive kinds
replace the quantum source with a coherent drive on the target cavity
and carry no source slot at all.

All rates are expressed in units of the target cavity linewidth kappa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
import scipy.sparse as sp

from .hilbert import (
    HilbertSpace,
    SparseOperator,
    annihilation,
    embed,
    lowering_two_level,
    vectorize_left,
    vectorize_right,
)

MU_SUM_TOLERANCE = 1e-12
TRACE_DEFECT_TOLERANCE = 1e-10


class ConfigurationError(ValueError):
    """Raised for invalid or inconsistent model parameters."""


class ModelKind(str, Enum):
    SOURCE_ONLY = "SourceOnly"
    CASCADED_JC = "CascadedJC"
    CASCADED_OMS = "CascadedOMS"
    CASCADED_JC_THERMAL = "CascadedJCThermal"
    CLASSICAL_JC = "ClassicalJC"
    CLASSICAL_OMS = "ClassicalOMS"

    @classmethod
    def parse(cls, name: str) -> "ModelKind":
        for kind in cls:
            if kind.value == name:
                return kind
        valid = ", ".join(k.value for k in cls)
        raise ConfigurationError(f"unknown model kind {name!r}; expected one of {valid}")


_NONNEGATIVE = (
    "kappa", "gamma_s", "gamma", "gamma_m", "omega_drive",
    "mu1", "mu2", "g", "g_m", "omega_m", "n_th",
)


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of every model family, in units of kappa.

    ``delta_a=None`` means the target atom follows the cavity detuning
    (atom resonant with its cavity), which keeps the coupled spectra
    symmetric about delta=0.
    """

    kappa: float = 1.0
    gamma_s: float = 0.02
    gamma: float = 0.001
    gamma_m: float = 0.001
    omega_drive: float = 8.0
    mu1: float = 0.5
    mu2: float = 0.5
    delta: float = 0.0
    delta_s: float = 0.0
    delta_a: float | None = None
    g: float = 0.0
    g_m: float = 0.0
    omega_m: float = 5.0
    n_th: float = 0.0
    n_cavity: int = 8
    n_mech: int = 12

    def __post_init__(self) -> None:
        for name in _NONNEGATIVE:
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0, got {getattr(self, name)}")
        if abs(self.mu1 + self.mu2 - 1.0) > MU_SUM_TOLERANCE:
            raise ConfigurationError(
                f"mu1 + mu2 must equal 1 within {MU_SUM_TOLERANCE}, got {self.mu1 + self.mu2}"
            )
        for name in ("n_cavity", "n_mech"):
            value = getattr(self, name)
            if int(value) != value or value < 2:
                raise ConfigurationError(f"{name} must be an integer >= 2, got {value}")
        object.__setattr__(self, "n_cavity", int(self.n_cavity))
        object.__setattr__(self, "n_mech", int(self.n_mech))

    @property
    def atom_detuning(self) -> float:
        return self.delta if self.delta_a is None else self.delta_a

    def with_updates(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class LiouvillianMatrix:
    """A superoperator on ``space.total_dim ** 2`` together with its physical space."""

    space: HilbertSpace
    matrix: SparseOperator

    def __add__(self, other: "LiouvillianMatrix") -> "LiouvillianMatrix":
        if self.space != other.space:
            raise ConfigurationError("cannot add Liouvillians on different spaces")
        return LiouvillianMatrix(self.space, self.matrix + other.matrix)

    def __mul__(self, scalar: float) -> "LiouvillianMatrix":
        return LiouvillianMatrix(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def trace_defect(self) -> float:
        """Max-magnitude entry of ``vec(I)^T L``; zero for trace-preserving dynamics."""
        d = self.space.total_dim
        # vec(I) has ones exactly at the diagonal positions i * (d + 1)
        idx = np.arange(d) * (d + 1)
        tr = sp.csr_matrix(
            (np.ones(d), (np.zeros(d, dtype=int), idx)), shape=(1, d * d), dtype=complex
        )
        row = (tr @ self.matrix.matrix).toarray().ravel()
        return float(np.abs(row).max()) if row.size else 0.0

    def max_entry(self) -> float:
        data = self.matrix.matrix.data
        return float(abs(data).max()) if data.size else 0.0


# -- spaces and slots --------------------------------------------------


def space_for(kind: ModelKind, params: ModelParams) -> HilbertSpace:
    """Composite space for a model kind, slot order (source, cavity, matter)."""
    nc, nm = params.n_cavity, params.n_mech
    if kind is ModelKind.SOURCE_ONLY:
        return HilbertSpace((2,))
    if kind in (ModelKind.CASCADED_JC, ModelKind.CASCADED_JC_THERMAL):
        return HilbertSpace((2, nc, 2))
    if kind is ModelKind.CASCADED_OMS:
        return HilbertSpace((2, nc, nm))
    if kind is ModelKind.CLASSICAL_JC:
        return HilbertSpace((nc, 2))
    if kind is ModelKind.CLASSICAL_OMS:
        return HilbertSpace((nc, nm))
    raise ConfigurationError(f"unhandled kind {kind}")


def cavity_slot(kind: ModelKind) -> int:
    """Index of the target cavity within the composite space."""
    if kind is ModelKind.SOURCE_ONLY:
        raise ConfigurationError("SourceOnly has no target cavity")
    if kind in (ModelKind.CLASSICAL_JC, ModelKind.CLASSICAL_OMS):
        return 0
    return 1


# -- Hamiltonians ------------------------------------------------------


def source_hamiltonian(params: ModelParams) -> SparseOperator:
    """Driven source emitter in the rotating frame, on its bare 2-dim space.

    ``H_s = delta_s sigma+ sigma- + sqrt(mu1) Omega (sigma- + sigma+)``
    with the drive phase taken real.
    """
    sm = lowering_two_level()
    sp_ = sm.dagger()
    drive = math.sqrt(params.mu1) * params.omega_drive
    return params.delta_s * (sp_ @ sm) + drive * (sm + sp_)


def jc_hamiltonian(params: ModelParams) -> SparseOperator:
    """Target atom-cavity Hamiltonian on [source, cavity, atom], identity on the source slot."""
    space = HilbertSpace((2, params.n_cavity, 2))
    a = embed(annihilation(params.n_cavity), space, 1)
    sm = embed(lowering_two_level(), space, 2)
    ad, spd = a.dagger(), sm.dagger()
    h = params.delta * (ad @ a) + params.atom_detuning * (spd @ sm)
    return h + params.g * (spd @ a + sm @ ad)


def oms_hamiltonian(params: ModelParams) -> SparseOperator:
    """Target optomechanical Hamiltonian on [source, cavity, mech]; commutes with a+a."""
    space = HilbertSpace((2, params.n_cavity, params.n_mech))
    a = embed(annihilation(params.n_cavity), space, 1)
    b = embed(annihilation(params.n_mech), space, 2)
    na = a.dagger() @ a
    h = params.delta * na + params.omega_m * (b.dagger() @ b)
    return h + params.g_m * (na @ (b + b.dagger()))


# -- superoperator building blocks -------------------------------------


def hamiltonian_term(h: SparseOperator) -> LiouvillianMatrix:
    """Coherent part ``-i [H, rho]`` as a superoperator."""
    sup = (-1j) * (vectorize_left(h) - vectorize_right(h))
    return LiouvillianMatrix(h.space, sup)


def dissipator(jump_op: SparseOperator, rate: float) -> LiouvillianMatrix:
    """Lindblad damping ``rate/2 (2 O rho O+ - rho O+O - O+O rho)``."""
    if rate < 0:
        raise ConfigurationError(f"dissipator rate must be >= 0, got {rate}")
    odo = jump_op.dagger() @ jump_op
    sandwich = vectorize_right(jump_op.dagger()) @ vectorize_left(jump_op)
    sup = sandwich - 0.5 * (vectorize_left(odo) + vectorize_right(odo))
    return LiouvillianMatrix(jump_op.space, rate * sup)


def _cascade_bracket(s: SparseOperator, t: SparseOperator) -> SparseOperator:
    # {[t+, s rho] + [rho s+, t]} in superoperator form
    return (
        vectorize_left(t.dagger() @ s)
        - vectorize_left(s) @ vectorize_right(t.dagger())
        + vectorize_right(s.dagger() @ t)
        - vectorize_left(t) @ vectorize_right(s.dagger())
    )


def cascaded_term(params: ModelParams, space: HilbertSpace) -> LiouvillianMatrix:
    """Unidirectional source->cavity coupling.

    Implements ``-sqrt(mu2 gamma_s kappa) {[a+, sigma_s rho] + [rho sigma_s+, a]}``
    with the source at slot 0 and the cavity at slot 1. The source
    operator never multiplies target operators from the right in a way
    that could feed back.
    """
    if space.n_subsystems < 2 or space.dims[0] != 2:
        raise ConfigurationError("cascaded term needs a source slot 0 and cavity slot 1")
    sig_s = embed(lowering_two_level(), space, 0)
    a = embed(annihilation(space.dims[1]), space, 1)
    coeff = -math.sqrt(params.mu2 * params.gamma_s * params.kappa)
    return LiouvillianMatrix(space, coeff * _cascade_bracket(sig_s, a))


def _thermal_cascaded_term(params: ModelParams, space: HilbertSpace) -> LiouvillianMatrix:
    # counter-rotating partner line: -sqrt(mu2 gamma_s kappa) {[a, sigma_s+ rho] + [rho sigma_s, a+]}
    sig_s = embed(lowering_two_level(), space, 0)
    a = embed(annihilation(space.dims[1]), space, 1)
    coeff = -math.sqrt(params.mu2 * params.gamma_s * params.kappa)
    return LiouvillianMatrix(space, coeff * _cascade_bracket(sig_s.dagger(), a.dagger()))


# -- assembly ----------------------------------------------------------


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigurationError(message)


def _validate_kind(kind: ModelKind, params: ModelParams) -> None:
    if kind in (ModelKind.CASCADED_JC, ModelKind.CLASSICAL_JC,
                ModelKind.CASCADED_JC_THERMAL, ModelKind.SOURCE_ONLY):
        _require(params.g_m == 0, f"{kind.value} does not use g_m; got g_m={params.g_m}")
    if kind in (ModelKind.CASCADED_OMS, ModelKind.CLASSICAL_OMS, ModelKind.SOURCE_ONLY):
        _require(params.g == 0, f"{kind.value} does not use g; got g={params.g}")
    if kind is not ModelKind.CASCADED_JC_THERMAL:
        _require(
            params.n_th == 0,
            f"{kind.value} is a zero-temperature model; use CascadedJCThermal for n_th > 0",
        )


def assemble(kind: ModelKind | str, params: ModelParams) -> LiouvillianMatrix:
    """Build the full Liouvillian for one model kind.

    Raises :class:`ConfigurationError` when the parameters carry
    couplings the kind does not use (e.g. optomechanical g_m for a
    Jaynes-Cummings kind), so a config typo cannot silently run the
    wrong model.
    """
    if isinstance(kind, str):
        kind = ModelKind.parse(kind)
    _validate_kind(kind, params)
    space = space_for(kind, params)

    if kind is ModelKind.SOURCE_ONLY:
        sig_s = lowering_two_level()
        lv = hamiltonian_term(source_hamiltonian(params))
        lv = lv + dissipator(sig_s, params.gamma_s)
    elif kind is ModelKind.CASCADED_JC:
        h = embed(source_hamiltonian(params), space, 0) + jc_hamiltonian(params)
        lv = hamiltonian_term(h)
        lv = lv + dissipator(embed(lowering_two_level(), space, 0), params.gamma_s)
        lv = lv + dissipator(embed(annihilation(params.n_cavity), space, 1), params.kappa)
        lv = lv + dissipator(embed(lowering_two_level(), space, 2), params.gamma)
        lv = lv + cascaded_term(params, space)
    elif kind is ModelKind.CASCADED_JC_THERMAL:
        h = embed(source_hamiltonian(params), space, 0) + jc_hamiltonian(params)
        sig_s = embed(lowering_two_level(), space, 0)
        a = embed(annihilation(params.n_cavity), space, 1)
        sig = embed(lowering_two_level(), space, 2)
        nth = params.n_th
        lv = hamiltonian_term(h)
        lv = lv + dissipator(sig_s.dagger(), params.gamma_s * nth)
        lv = lv + dissipator(a.dagger(), params.kappa * nth)
        lv = lv + dissipator(sig.dagger(), params.gamma * nth)
        lv = lv + dissipator(sig_s, params.gamma_s * (nth + 1.0))
        lv = lv + dissipator(a, params.kappa * (nth + 1.0))
        lv = lv + dissipator(sig, params.gamma * (nth + 1.0))
        lv = lv + (nth + 1.0) * cascaded_term(params, space)
        lv = lv + nth * _thermal_cascaded_term(params, space)
    elif kind is ModelKind.CASCADED_OMS:
        h = embed(source_hamiltonian(params), space, 0) + oms_hamiltonian(params)
        lv = hamiltonian_term(h)
        lv = lv + dissipator(embed(lowering_two_level(), space, 0), params.gamma_s)
        lv = lv + dissipator(embed(annihilation(params.n_cavity), space, 1), params.kappa)
        lv = lv + dissipator(embed(annihilation(params.n_mech), space, 2), params.gamma_m)
        lv = lv + cascaded_term(params, space)
    elif kind is ModelKind.CLASSICAL_JC:
        a = embed(annihilation(params.n_cavity), space, 0)
        sm = embed(lowering_two_level(), space, 1)
        h = params.delta * (a.dagger() @ a) + params.atom_detuning * (sm.dagger() @ sm)
        h = h + params.g * (sm.dagger() @ a + sm @ a.dagger())
        h = h + params.omega_drive * (a + a.dagger())
        lv = hamiltonian_term(h)
        lv = lv + dissipator(a, params.kappa)
        lv = lv + dissipator(sm, params.gamma)
    elif kind is ModelKind.CLASSICAL_OMS:
        a = embed(annihilation(params.n_cavity), space, 0)
        b = embed(annihilation(params.n_mech), space, 1)
        na = a.dagger() @ a
        h = params.delta * na + params.omega_m * (b.dagger() @ b)
        h = h + params.g_m * (na @ (b + b.dagger()))
        h = h + params.omega_drive * (a + a.dagger())
        lv = hamiltonian_term(h)
        lv = lv + dissipator(a, params.kappa)
        lv = lv + dissipator(b, params.gamma_m)
    else:
        raise ConfigurationError(f"unhandled kind {kind}")

    defect = lv.trace_defect()
    scale = max(lv.max_entry(), 1.0)
    if defect > TRACE_DEFECT_TOLERANCE * scale:
        raise RuntimeError(
            f"assembled Liouvillian is not trace-preserving: defect {defect:.3e}"
        )
    return lv
