"""Photon statistics, deviations, window finding, classification."""

import numpy as np
import pytest

from mollowscan.hilbert import HilbertSpace
from mollowscan.observables import (
    ComparisonError,
    PhotonStats,
    WindowError,
    classify,
    deviation,
    expectation,
    find_mollow_windows,
    photon_stats,
    refined_maximum,
)


def fock_mixture(dim: int, weights: dict[int, float]) -> np.ndarray:
    rho = np.zeros((dim, dim), dtype=complex)
    for n, w in weights.items():
        rho[n, n] = w
    return rho


def test_photon_stats_on_known_mixture():
    # diagonal cavity state: n_a and g2 have exact finite sums
    space = HilbertSpace((4,))
    rho = fock_mixture(4, {0: 0.5, 1: 0.3, 2: 0.2})
    stats = photon_stats(rho, space, 0)
    n_a = 0.3 * 1 + 0.2 * 2
    g2_num = 0.2 * 2 * 1  # sum n(n-1) p_n
    assert stats.n_a == pytest.approx(n_a, rel=1e-14)
    assert stats.g2 == pytest.approx(g2_num / n_a**2, rel=1e-14)


def test_photon_stats_vacuum_has_undefined_g2():
    space = HilbertSpace((3,))
    rho = fock_mixture(3, {0: 1.0})
    stats = photon_stats(rho, space, 0)
    assert stats.n_a == 0.0
    assert stats.g2 is None


def test_photon_stats_rejects_unphysical_population():
    space = HilbertSpace((3,))
    rho = fock_mixture(3, {0: 1.0 + 1e-6, 1: -1e-6})
    with pytest.raises(ValueError):
        photon_stats(rho, space, 0)


def test_expectation_shape_guard():
    space = HilbertSpace((3,))
    with pytest.raises(ValueError):
        expectation(np.eye(4), np.eye(3))


def test_deviation_pairs_and_guards():
    a = PhotonStats(n_a=2.0, g2=1.5)
    b = PhotonStats(n_a=1.5, g2=1.1)
    assert deviation(a, b) == (pytest.approx(0.5), pytest.approx(0.4))
    d_na, d_g2 = deviation(a, PhotonStats(n_a=1.0, g2=None))
    assert d_na == pytest.approx(1.0)
    assert d_g2 is None
    with pytest.raises(ComparisonError):
        deviation(a, b, setting_g=5.0, setting_0=5.0001)
    # matching tags pass through
    assert deviation(a, b, setting_g=5.0, setting_0=5.0)[0] == pytest.approx(0.5)


def triplet_curve(axis: np.ndarray) -> np.ndarray:
    out = np.zeros_like(axis)
    for center, height, width in ((-11.0, 0.5, 2.0), (0.0, 1.0, 2.0), (11.0, 0.5, 2.0)):
        out += height * np.exp(-((axis - center) / width) ** 2)
    return out


def test_find_mollow_windows_on_synthetic_triplet():
    axis = np.linspace(-20, 20, 401)
    win = find_mollow_windows(axis, triplet_curve(axis))
    assert win.center == pytest.approx(0.0, abs=1e-6)
    assert win.side_left == pytest.approx(-11.0, abs=1e-3)
    assert win.side_right == pytest.approx(11.0, abs=1e-3)
    assert win.half_left == pytest.approx(-5.5, abs=1e-3)
    assert win.half_right == pytest.approx(5.5, abs=1e-3)
    assert set(win.named()) == {"center", "side_left", "side_right", "half_left", "half_right"}


def test_find_mollow_windows_needs_three_peaks():
    axis = np.linspace(-5, 5, 101)
    single = np.exp(-(axis**2))
    with pytest.raises(WindowError):
        find_mollow_windows(axis, single)


def test_find_mollow_windows_input_validation():
    with pytest.raises(ValueError):
        find_mollow_windows(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    axis = np.array([0.0, 1.0, 1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        find_mollow_windows(axis, np.ones(5))


def test_refined_maximum_recovers_parabola_vertex():
    # the quadratic refinement is exact on a quadratic
    axis = np.linspace(0.0, 2.0, 21)
    values = 3.0 - (axis - 0.7321) ** 2
    pos, val = refined_maximum(axis, values)
    assert pos == pytest.approx(0.7321, abs=1e-12)
    assert val == pytest.approx(3.0, abs=1e-12)


def test_refined_maximum_needs_bracketed_peak():
    axis = np.linspace(0.0, 1.0, 11)
    with pytest.raises(WindowError):
        refined_maximum(axis, axis**2)  # monotone: maximum sits on the edge


def test_classify_bands():
    assert classify(0.2) == "antibunched"
    assert classify(0.98) == "coherent-like"  # inside the +-0.05 band
    assert classify(1.04) == "coherent-like"
    assert classify(1.5) == "bunched"
    assert classify(2.0) == "bunched"
    assert classify(5.0) == "superbunched"
    with pytest.raises(ValueError):
        classify(-0.1)
