"""Closed-form photon statistics of the uncoupled (g = 0) cascaded cavity.

These expressions are transcribed exactly as published, term by term,
and serve as an independent end-to-end check on the numerical pipeline.
Suspected misprints are NOT repaired here: the mean-photon-number
formula is validated against the numerics to high accuracy, while the
resonant g2 formula disagrees with the numerical steady state by orders
of magnitude at the reference parameters (it is dimensionally
inhomogeneous as printed). :func:`discrepancy_report` surfaces that
disagreement as data instead of silently fixing either side.

Sums whose terms span many orders of magnitude are evaluated with
compensated summation (``math.fsum``) over the printed term groups.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum


@dataclass(frozen=True)
class OracleInput:
    """Parameters entering the closed forms (target coupling g = 0 implied)."""

    omega_drive: float
    gamma_s: float
    kappa: float = 1.0
    mu1: float = 0.5
    mu2: float = 0.5
    delta: float = 0.0

    def __post_init__(self) -> None:
        if self.kappa <= 0 or self.gamma_s <= 0:
            raise ValueError("kappa and gamma_s must be strictly positive")
        if self.omega_drive < 0 or self.mu1 < 0 or self.mu2 < 0:
            raise ValueError("omega_drive, mu1, mu2 must be nonnegative")
        if abs(self.mu1 + self.mu2 - 1.0) > 1e-12:
            raise ValueError(f"mu1 + mu2 must equal 1, got {self.mu1 + self.mu2}")


def na_closed_form(inp: OracleInput) -> float:
    """Mean cavity photon number versus detuning for the uncoupled target."""
    om, gs, k = inp.omega_drive, inp.gamma_s, inp.kappa
    mu1, mu2 = inp.mu1, inp.mu2
    d2 = inp.delta * inp.delta

    a1 = fsum([
        64.0 * k * d2**3,
        16.0 * d2**2 * fsum([
            8.0 * mu1 * om**2 * (2.0 * gs - k),
            6.0 * gs**2 * k,
            8.0 * gs * k**2,
            3.0 * k**3,
        ]),
    ])
    a2 = fsum([
        32.0 * mu1 * d2 * om**2 * fsum([
            16.0 * om**2 * mu1 * (gs + k),
            8.0 * gs**3,
            23.0 * gs**2 * k,
            16.0 * gs * k**2,
            2.0 * k**3,
        ]),
        4.0 * k * d2 * fsum([
            9.0 * gs**4,
            28.0 * gs**3 * k,
            32.0 * gs**2 * k**2,
            16.0 * gs * k**3,
            3.0 * k**4,
        ]),
    ])
    a3 = fsum([
        8.0 * mu1 * k * om**2 * fsum([
            4.0 * gs**4,
            16.0 * gs**3 * k,
            23.0 * gs**2 * k**2,
            14.0 * gs * k**3,
            3.0 * k**4,
        ]),
        k * (gs + k) ** 2 * (2.0 * gs + k) * fsum([
            2.0 * gs**3,
            5.0 * gs**2 * k,
            4.0 * gs * k**2,
            k**3,
        ]),
        128.0 * om**4 * k**2 * mu1**2 * (gs + k),
    ])
    a = fsum([a1, a2, a3])

    b = fsum([
        16.0 * d2**2,
        256.0 * om**4 * mu1**2,
        4.0 * d2 * (5.0 * gs**2 + 6.0 * gs * k + 2.0 * k**2),
        32.0 * om**2 * mu1 * (2.0 * gs**2 + 3.0 * gs * k + k**2 - 4.0 * d2),
        (gs + k) ** 2 * (4.0 * gs**2 + 4.0 * gs * k + k**2),
    ])

    numerator = 16.0 * om**2 * gs * mu1 * mu2 * a
    denominator = (
        b
        * (4.0 * d2 + k**2)
        * (8.0 * mu1 * om**2 + gs**2)
        * (4.0 * d2 + gs**2 + 2.0 * gs * k + k**2)
    )
    return numerator / denominator


def na_resonant(inp: OracleInput) -> float:
    """Mean cavity photon number at zero detuning (the closed form's own resonant limit)."""
    om, gs, k = inp.omega_drive, inp.gamma_s, inp.kappa
    mu1, mu2 = inp.mu1, inp.mu2
    numerator = 16.0 * om**2 * gs * mu1 * mu2 * fsum([
        8.0 * mu1 * om**2 * k,
        2.0 * gs**3,
        5.0 * gs**2 * k,
        4.0 * gs * k**2,
        k**3,
    ])
    denominator = (
        k
        * (gs + k)
        * (8.0 * mu1 * om**2 + gs**2)
        * fsum([16.0 * mu1 * om**2, 2.0 * gs**2, 3.0 * gs * k, k**2])
    )
    return numerator / denominator


def g2_resonant(inp: OracleInput) -> float:
    """Resonant g2 closed form, transcribed as printed.

    Note the published expression carries no explicit mu1 factors even
    though the companion photon-number formula does; it is kept verbatim
    and its disagreement with the numerics is reported, not patched.
    """
    om, gs, k = inp.omega_drive, inp.gamma_s, inp.kappa

    c1 = (8.0 * om**2 * k * gs + 24.0 * om**2 * k**2) * fsum([
        4.0 * gs**3,
        18.0 * gs**2 * k,
        29.0 * gs * k**2,
        17.0 * k**3,
    ])
    c2 = fsum([
        4.0 * gs**3,
        12.0 * gs**2 * k,
        11.0 * gs * k**2,
        3.0 * k**3,
    ]) * (gs**2 + 5.0 * gs * k + 6.0 * k**2) ** 2
    c = fsum([c1, 192.0 * om**4 * k**2 * (gs + 2.0 * k) * c2])

    d1 = fsum([8.0 * om**2 * k, 2.0 * gs**3, 5.0 * gs**2 * k, 4.0 * gs * k**2, k**3]) ** 2
    d = d1 * fsum([16.0 * om**2, 2.0 * gs**2, 9.0 * gs * k, 9.0 * k**2])

    numerator = (
        c
        * fsum([8.0 * om**2 * gs, 8.0 * k * om**2, gs**3, k * gs**2])
        * fsum([16.0 * om**2, 2.0 * gs**2, 3.0 * gs * k, k**2])
    )
    denominator = (
        d
        * (8.0 * om**2 + gs**2 + 3.0 * gs * k + 2.0 * k**2)
        * (gs**2 + 5.0 * gs * k + 6.0 * k**2)
    )
    return numerator / denominator


def discrepancy_report(
    inp: OracleInput,
    numeric_na: float | None = None,
    numeric_g2: float | None = None,
    flag_threshold: float = 1e-3,
) -> dict:
    """Pair the closed forms with numerical values and flag disagreements.

    Returns a flat dict safe to serialize: analytic values, numeric
    values, relative errors (``None`` where no numeric value was given)
    and a ``flagged`` marker per observable when the relative error
    exceeds ``flag_threshold``.
    """
    report: dict = {
        "delta": inp.delta,
        "analytic_na": na_closed_form(inp),
        "analytic_na_resonant": na_resonant(inp),
        "analytic_g2_resonant": g2_resonant(inp),
        "numeric_na": numeric_na,
        "numeric_g2": numeric_g2,
        "na_rel_error": None,
        "g2_rel_error": None,
        "na_flagged": False,
        "g2_flagged": False,
    }
    if numeric_na is not None:
        rel = abs(report["analytic_na"] - numeric_na) / max(abs(numeric_na), 1e-300)
        report["na_rel_error"] = rel
        report["na_flagged"] = rel > flag_threshold
    if numeric_g2 is not None:
        rel = abs(report["analytic_g2_resonant"] - numeric_g2) / max(abs(numeric_g2), 1e-300)
        report["g2_rel_error"] = rel
        report["g2_flagged"] = rel > flag_threshold
    return report
