"""Liouvillian assembly: structure, validation, and dense oracles."""

import math

import numpy as np
import pytest

from mollowscan.hilbert import HilbertSpace, annihilation, embed, lowering_two_level
from mollowscan.models import (
    ConfigurationError,
    LiouvillianMatrix,
    ModelKind,
    ModelParams,
    assemble,
    cascaded_term,
    cavity_slot,
    dissipator,
    hamiltonian_term,
    jc_hamiltonian,
    oms_hamiltonian,
    source_hamiltonian,
    space_for,
)

rng = np.random.default_rng(20240811)


def dense_random_rho(d: int) -> np.ndarray:
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = m @ m.conj().T
    return rho / rho.trace()


def apply(lv: LiouvillianMatrix, rho: np.ndarray) -> np.ndarray:
    d = lv.space.total_dim
    return (lv.matrix.matrix @ rho.flatten(order="F")).reshape((d, d), order="F")


# -- parameters ---------------------------------------------------------


def test_params_validation():
    with pytest.raises(ConfigurationError):
        ModelParams(kappa=-1.0)
    with pytest.raises(ConfigurationError):
        ModelParams(mu1=0.7, mu2=0.4)  # must sum to 1
    with pytest.raises(ConfigurationError):
        ModelParams(n_cavity=1)
    p = ModelParams(delta=2.0)
    assert p.atom_detuning == 2.0  # tracks the cavity by default
    assert p.with_updates(delta_a=0.5).atom_detuning == 0.5


def test_kind_parsing_and_spaces():
    assert ModelKind.parse("CascadedJC") is ModelKind.CASCADED_JC
    with pytest.raises(ConfigurationError):
        ModelKind.parse("NoSuchModel")
    p = ModelParams(n_cavity=5, n_mech=7)
    assert space_for(ModelKind.SOURCE_ONLY, p).dims == (2,)
    assert space_for(ModelKind.CASCADED_JC, p).dims == (2, 5, 2)
    assert space_for(ModelKind.CASCADED_OMS, p).dims == (2, 5, 7)
    assert space_for(ModelKind.CLASSICAL_JC, p).dims == (5, 2)
    assert space_for(ModelKind.CLASSICAL_OMS, p).dims == (5, 7)
    assert cavity_slot(ModelKind.CASCADED_JC) == 1
    assert cavity_slot(ModelKind.CLASSICAL_OMS) == 0
    with pytest.raises(ConfigurationError):
        cavity_slot(ModelKind.SOURCE_ONLY)


def test_kind_coupling_validation():
    with pytest.raises(ConfigurationError):
        assemble(ModelKind.CASCADED_JC, ModelParams(g_m=0.1))
    with pytest.raises(ConfigurationError):
        assemble(ModelKind.CASCADED_OMS, ModelParams(g=0.1))
    with pytest.raises(ConfigurationError):
        # zero-temperature kinds refuse a bath occupancy
        assemble(ModelKind.CASCADED_JC, ModelParams(n_th=0.1))


# -- Hamiltonians -------------------------------------------------------


def test_source_hamiltonian_matrix():
    p = ModelParams(delta_s=1.5, omega_drive=8.0, mu1=0.5, mu2=0.5)
    h = source_hamiltonian(p).to_dense()
    drive = math.sqrt(0.5) * 8.0
    expected = np.array([[0.0, drive], [drive, 1.5]])
    assert np.allclose(h, expected, atol=1e-15)


def test_target_hamiltonians_hermitian():
    p = ModelParams(g=0.3, delta=1.0, n_cavity=4)
    hjc = jc_hamiltonian(p).to_dense()
    assert np.allclose(hjc, hjc.conj().T, atol=1e-14)
    p2 = ModelParams(g_m=0.3, delta=-0.7, n_cavity=4, n_mech=5)
    hom = oms_hamiltonian(p2).to_dense()
    assert np.allclose(hom, hom.conj().T, atol=1e-14)


def test_oms_hamiltonian_conserves_photon_number():
    p = ModelParams(g_m=0.4, delta=0.3, n_cavity=4, n_mech=6)
    h = oms_hamiltonian(p)
    space = h.space
    na = embed(annihilation(4).dagger() @ annihilation(4), space, 1)
    comm = (h @ na - na @ h).to_dense()
    assert np.abs(comm).max() < 1e-12


def test_oms_polaron_spectrum():
    """Radiation-pressure sector energies must shift by -g_m^2 n^2 / omega_m.

    Within a fixed photon-number sector the mechanical part is a displaced
    oscillator, so the lowest sector eigenvalue is exact and checks the
    sign and strength of the coupling term independently of any solver.
    """
    g_m, om = 0.3, 5.0
    nm = 40
    b = annihilation(nm).to_dense()
    for n in (0, 1, 2, 3):
        h_sector = om * (b.conj().T @ b) + g_m * n * (b + b.conj().T)
        eigmin = np.linalg.eigvalsh(h_sector).min()
        assert eigmin == pytest.approx(-(g_m * n) ** 2 / om, abs=1e-10)


# -- superoperator pieces -----------------------------------------------


def test_hamiltonian_term_dense_oracle():
    h = annihilation(3) + annihilation(3).dagger()
    rho = dense_random_rho(3)
    hd = h.to_dense()
    expected = -1j * (hd @ rho - rho @ hd)
    assert np.allclose(apply(hamiltonian_term(h), rho), expected, atol=1e-14)


def test_dissipator_dense_oracle():
    o = annihilation(4)
    rate = 0.37
    rho = dense_random_rho(4)
    od = o.to_dense()
    odo = od.conj().T @ od
    expected = rate * (od @ rho @ od.conj().T - 0.5 * (odo @ rho + rho @ odo))
    assert np.allclose(apply(dissipator(o, rate), rho), expected, atol=1e-14)
    with pytest.raises(ConfigurationError):
        dissipator(o, -0.1)


def test_cascaded_term_dense_oracle():
    """The unidirectional coupling against a literal dense transcription."""
    p = ModelParams(n_cavity=3)
    space = HilbertSpace((2, 3, 2))
    lv = cascaded_term(p, space)
    sig = embed(lowering_two_level(), space, 0).to_dense()
    a = embed(annihilation(3), space, 1).to_dense()
    ad = a.conj().T
    c = math.sqrt(p.mu2 * p.gamma_s * p.kappa)
    rho = dense_random_rho(space.total_dim)
    expected = -c * ((ad @ (sig @ rho) - sig @ rho @ ad) + (rho @ sig.conj().T @ a - a @ rho @ sig.conj().T))
    assert np.allclose(apply(lv, rho), expected, atol=1e-13)


# -- assembly invariants ------------------------------------------------

ALL_KINDS = [
    (ModelKind.SOURCE_ONLY, {}),
    (ModelKind.CASCADED_JC, {"g": 0.02, "n_cavity": 3}),
    (ModelKind.CASCADED_JC_THERMAL, {"g": 0.02, "n_cavity": 3, "n_th": 0.15}),
    (ModelKind.CASCADED_OMS, {"g_m": 0.1, "n_cavity": 3, "n_mech": 3}),
    (ModelKind.CLASSICAL_JC, {"g": 0.02, "n_cavity": 3, "omega_drive": 0.3}),
    (ModelKind.CLASSICAL_OMS, {"g_m": 0.1, "n_cavity": 3, "n_mech": 3, "omega_drive": 0.3}),
]


@pytest.mark.parametrize("kind,overrides", ALL_KINDS, ids=[k.value for k, _ in ALL_KINDS])
def test_assembled_liouvillian_annihilates_trace(kind, overrides):
    lv = assemble(kind, ModelParams(delta=0.8, **overrides))
    assert lv.trace_defect() < 1e-12 * max(lv.max_entry(), 1.0)


@pytest.mark.parametrize("kind,overrides", ALL_KINDS, ids=[k.value for k, _ in ALL_KINDS])
def test_assembled_liouvillian_preserves_hermiticity(kind, overrides):
    lv = assemble(kind, ModelParams(delta=0.8, **overrides))
    rho = dense_random_rho(lv.space.total_dim)
    out = apply(lv, rho)
    assert np.abs(out - out.conj().T).max() < 1e-12


def test_thermal_reduces_to_zero_temperature_exactly():
    p = ModelParams(g=0.01, delta=3.0, n_cavity=4)
    cold = assemble(ModelKind.CASCADED_JC, p)
    thermal = assemble(ModelKind.CASCADED_JC_THERMAL, p.with_updates(n_th=0.0))
    diff = (thermal.matrix.matrix - cold.matrix.matrix).tocoo()
    assert diff.nnz == 0 or np.abs(diff.data).max() == 0.0
