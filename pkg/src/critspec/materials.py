"""SI-unit materials estimate for the echo coherence time.

Everything else in the package works in natural units (hbar = k_B = 1,
J = a = 1 unless stated).  This module restores SI factors for one
concrete estimate: a spin qubit at distance d from a 2D van der Waals
ferromagnet in the high-temperature exchange-limited regime, where

    1/T2 = 2 (gamma/2 hbar)^2 (g_s mu_B mu_0 S)^2/(16 pi a^4 d^2)
             * hbar k_B T xi^4/(J^2 a^4),   gamma = g_sigma mu_B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "MaterialParams",
    "CRI3",
    "cri3_t2_estimate",
    "field_prefactor_si",
    "MU_0", "MU_B", "HBAR", "K_B", "EV",
]

# CODATA 2018
MU_0 = 1.25663706212e-6   # N / A^2
MU_B = 9.2740100783e-24   # J / T
HBAR = 1.054571817e-34    # J s
K_B = 1.380649e-23        # J / K
EV = 1.602176634e-19      # J


@dataclass(frozen=True)
class MaterialParams:
    """Sample and probe parameters in SI units.

    J: exchange energy (J), a: lattice constant (m), S: spin magnitude,
    g_s: sample g-factor, g_sigma: probe g-factor.
    """

    J: float
    a: float
    S: float
    g_s: float = 2.0
    g_sigma: float = 2.0

    def __post_init__(self):
        for name in ("J", "a", "S", "g_s", "g_sigma"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite")


# monolayer CrI3: J = 2.2 meV, a = 0.687 nm, S = 3/2
CRI3 = MaterialParams(J=2.2e-3 * EV, a=0.687e-9, S=1.5)


def field_prefactor_si(material: MaterialParams, d: float) -> float:
    """Mean-square field weight (g_s mu_B mu_0 S)^2/(16 pi a^4 d^2), SI."""
    if not d > 0.0:
        raise ValueError("d must be positive")
    m = material
    return (m.g_s * MU_B * MU_0 * m.S) ** 2 / (16.0 * math.pi * m.a**4 * d**2)


def cri3_t2_estimate(material: MaterialParams, T: float, d: float, xi: float) -> float:
    """Echo coherence time T2 in seconds for SI inputs (K, m, m).

    Exchange-limited paramagnetic regime: relaxation rate ~ J/hbar per
    correlation area, field from a sample patch of size xi.  Scales as
    d^2/(T xi^4).
    """
    if not (T > 0.0 and d > 0.0 and xi > 0.0):
        raise ValueError("T, d, xi must be positive")
    m = material
    gamma = m.g_sigma * MU_B
    rate = (2.0 * (gamma / (2.0 * HBAR)) ** 2
            * field_prefactor_si(m, d)
            * HBAR * K_B * T * xi**4 / (m.J**2 * m.a**4))
    return 1.0 / rate
