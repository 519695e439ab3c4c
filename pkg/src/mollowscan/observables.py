"""Measured quantities: photon number, g2, deviations, triplet windows.

The detection signal of the whole scheme lives here: the target cavity
is read out through its mean photon number n_a and equal-time
second-order correlation g2, and weak internal coupling shows up as the
deviation of those numbers from their uncoupled baselines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import HilbertSpace, SparseOperator, annihilation, embed

#: Below this mean photon number the g2 ratio is numerically meaningless.
G2_FLOOR = 1e-12

#: Half-width of the g2 band treated as coherent-like.
COHERENT_BAND = 0.05


class ComparisonError(ValueError):
    """Raised when deviations are requested between mismatched scan settings."""


class WindowError(RuntimeError):
    """Raised when a scan does not expose the three-peak structure."""


@dataclass(frozen=True)
class PhotonStats:
    """Cavity photon statistics; ``g2 is None`` means undefined (empty cavity)."""

    n_a: float
    g2: float | None


@dataclass(frozen=True)
class MollowWindows:
    """Spectral windows of the source triplet, in units of kappa.

    half_left / half_right are the midpoints between the central peak
    and the respective side peak by definition.
    """

    center: float
    side_left: float
    side_right: float
    half_left: float
    half_right: float

    def named(self) -> dict[str, float]:
        return {
            "center": self.center,
            "side_left": self.side_left,
            "side_right": self.side_right,
            "half_left": self.half_left,
            "half_right": self.half_right,
        }


def expectation(rho: np.ndarray, op) -> complex:
    """Tr(op rho) for a dense density matrix and a (sparse) operator."""
    matrix = op.matrix if isinstance(op, SparseOperator) else np.asarray(op)
    if matrix.shape != rho.shape:
        raise ValueError(f"shape mismatch: operator {matrix.shape} vs state {rho.shape}")
    return complex((matrix @ rho).trace())


def photon_stats(rho: np.ndarray, space: HilbertSpace, cavity_slot: int, floor: float = G2_FLOOR) -> PhotonStats:
    """Mean photon number and g2 of the cavity mode at ``cavity_slot``."""
    a = embed(annihilation(space.dims[cavity_slot]), space, cavity_slot)
    ad = a.dagger()
    n_a = expectation(rho, ad @ a).real
    if n_a < 0:
        if n_a < -1e-10:
            raise ValueError(f"state gives negative photon number {n_a}")
        n_a = 0.0
    if n_a < floor:
        return PhotonStats(n_a=n_a, g2=None)
    g2_num = expectation(rho, ad @ ad @ a @ a).real
    return PhotonStats(n_a=n_a, g2=max(g2_num, 0.0) / n_a**2)


def deviation(
    stats_g: PhotonStats,
    stats_0: PhotonStats,
    setting_g: float | None = None,
    setting_0: float | None = None,
) -> tuple[float, float | None]:
    """Deviation pair (|n_a(g) - n_a(0)|, |g2(g) - g2(0)|).

    When both ``setting_*`` tags are given (e.g. the detuning each set of
    stats was computed at) they must agree, so deviations cannot be
    formed between different scan points by accident. The g2 deviation
    is ``None`` when either g2 is undefined.
    """
    if setting_g is not None and setting_0 is not None:
        if abs(setting_g - setting_0) > 1e-12:
            raise ComparisonError(
                f"deviation between mismatched settings: {setting_g} vs {setting_0}"
            )
    d_na = abs(stats_g.n_a - stats_0.n_a)
    if stats_g.g2 is None or stats_0.g2 is None:
        return d_na, None
    return d_na, abs(stats_g.g2 - stats_0.g2)


def _local_maxima(values: np.ndarray) -> list[int]:
    # plateau-safe: strictly rising into the point, non-rising out of it
    return [
        i
        for i in range(1, len(values) - 1)
        if values[i] > values[i - 1] and values[i] >= values[i + 1]
    ]


def _refine(axis: np.ndarray, values: np.ndarray, i: int) -> tuple[float, float]:
    """Quadratic vertex through the three points around a discrete maximum."""
    d1 = 0.5 * (values[i + 1] - values[i - 1])
    d2 = values[i + 1] - 2.0 * values[i] + values[i - 1]
    if d2 >= 0:  # flat or degenerate; keep the grid point
        return float(axis[i]), float(values[i])
    offset = -d1 / d2
    step = axis[i + 1] - axis[i]
    return float(axis[i] + offset * step), float(values[i] + 0.5 * d1 * offset)


def find_mollow_windows(axis: np.ndarray, n_a: np.ndarray) -> MollowWindows:
    """Locate the triplet windows from a baseline (uncoupled) n_a scan.

    ``axis`` must be a sorted detuning grid wide enough to contain the
    central peak and both side peaks; peak positions are refined by
    quadratic interpolation through the three surrounding grid points.
    """
    axis = np.asarray(axis, dtype=float)
    n_a = np.asarray(n_a, dtype=float)
    if axis.ndim != 1 or axis.shape != n_a.shape or len(axis) < 5:
        raise ValueError("need matching 1-d arrays with at least 5 points")
    if np.any(np.diff(axis) <= 0):
        raise ValueError("axis must be strictly increasing")

    maxima = _local_maxima(n_a)
    if len(maxima) < 3:
        raise WindowError(
            f"found {len(maxima)} local maxima; need 3 (drive too weak to resolve the triplet?)"
        )
    i_center = max(maxima, key=lambda i: n_a[i])
    left = [i for i in maxima if i < i_center]
    right = [i for i in maxima if i > i_center]
    if not left or not right:
        raise WindowError("no side peak on one side of the central peak; widen the scan")
    i_left = max(left, key=lambda i: n_a[i])
    i_right = max(right, key=lambda i: n_a[i])

    center, _ = _refine(axis, n_a, i_center)
    side_left, _ = _refine(axis, n_a, i_left)
    side_right, _ = _refine(axis, n_a, i_right)
    return MollowWindows(
        center=center,
        side_left=side_left,
        side_right=side_right,
        half_left=0.5 * (center + side_left),
        half_right=0.5 * (center + side_right),
    )


def refined_maximum(axis: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Position and value of the tallest interior maximum of a sampled curve.

    Uses the same quadratic refinement as the window finder. Raises
    :class:`WindowError` when no grid point is a local maximum, i.e. the
    scan does not bracket the peak.
    """
    axis = np.asarray(axis, dtype=float)
    values = np.asarray(values, dtype=float)
    if axis.ndim != 1 or axis.shape != values.shape or len(axis) < 3:
        raise ValueError("need matching 1-d arrays with at least 3 points")
    if np.any(np.diff(axis) <= 0):
        raise ValueError("axis must be strictly increasing")
    maxima = _local_maxima(values)
    if not maxima:
        raise WindowError("no interior maximum; widen the scan")
    i = max(maxima, key=lambda j: values[j])
    return _refine(axis, values, i)


def classify(g2: float) -> str:
    """Photon-statistics class of a g2 value.

    The coherent-like band ``|g2 - 1| <= 0.05`` takes precedence over
    the antibunched/bunched split, otherwise it would be unreachable.
    """
    if g2 < 0:
        raise ValueError(f"g2 must be nonnegative, got {g2}")
    if abs(g2 - 1.0) <= COHERENT_BAND:
        return "coherent-like"
    if g2 < 1.0:
        return "antibunched"
    if g2 <= 2.0:
        return "bunched"
    return "superbunched"
