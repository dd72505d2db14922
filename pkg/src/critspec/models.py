"""Dynamic susceptibilities and structure factors of the sample models.

Four interchangeable families, all overdamped per mode:

* ModelA      -- non-conserved mean-field relaxational dynamics (z = 2)
* ModelB      -- conserved order parameter, Gamma(q) = sigma_s q^2 (z = 4)
* DiffusiveO3 -- hydrodynamic spin diffusion with uniform chi_u and D_s
* TfimQC      -- phenomenological quantum-critical form, relaxation ~ T

Every one of them reduces per mode to a Lorentzian pair (chi_q, r_q):

    chi(q, omega) = chi_q r_q / (r_q - i omega)
    S(q, omega)   = 2 T chi_q r_q / (r_q^2 + omega^2)      (classical FDT)

so the classical fluctuation-dissipation relation S = (2T/omega) Im chi
holds to rounding by construction.  lorentzian_parameters exposes the pair;
the noise engine and the stochastic oracle both build on it.

xi = math.inf is the critical point: xi^{-2} is then exactly 0.0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelA",
    "ModelB",
    "DiffusiveO3",
    "TfimQC",
    "O3Regime",
    "SampleModel",
    "lorentzian_parameters",
    "lorentzian_coupling",
    "chi",
    "structure_factor",
    "fdt_convert",
    "o3_transport",
    "as_lorentzian_model",
]

CLASSICAL = "classical"
QUANTUM = "quantum"


def _positive(name, value, allow_inf=False):
    ok = value > 0.0 and (allow_inf or math.isfinite(value))
    if not ok:
        raise ValueError(f"{name} must be positive{'' if allow_inf else ' and finite'}")


def _temperature(value):
    if not (math.isfinite(value) and value >= 0.0):
        raise ValueError("temperature must be finite and non-negative")


@dataclass(frozen=True)
class ModelA:
    """Non-conserved relaxational dynamics: chi = Gamma0/(Gamma0 J (xi^-2 + q^2) - i omega)."""

    J: float
    gamma0: float
    xi: float
    T: float

    def __post_init__(self):
        _positive("J", self.J)
        _positive("gamma0", self.gamma0)
        _positive("xi", self.xi, allow_inf=True)
        _temperature(self.T)

    @property
    def inv_xi_sq(self) -> float:
        return 0.0 if math.isinf(self.xi) else self.xi**-2


@dataclass(frozen=True)
class ModelB:
    """Conserved dynamics, Gamma(q) = sigma_s q^2: relaxation rate sigma_s J q^2 (q^2 + xi^-2)."""

    J: float
    sigma_s: float
    xi: float
    T: float

    def __post_init__(self):
        _positive("J", self.J)
        _positive("sigma_s", self.sigma_s)
        _positive("xi", self.xi, allow_inf=True)
        _temperature(self.T)

    @property
    def inv_xi_sq(self) -> float:
        return 0.0 if math.isinf(self.xi) else self.xi**-2


@dataclass(frozen=True)
class DiffusiveO3:
    """Hydrodynamic spin diffusion: chi = chi_u D_s q^2/(-i omega + D_s q^2)."""

    chi_u: float
    D_s: float
    T: float

    def __post_init__(self):
        _positive("chi_u", self.chi_u)
        _positive("D_s", self.D_s)
        _temperature(self.T)


@dataclass(frozen=True)
class TfimQC:
    """Quantum-critical Ising form: chi = chi(0,0)/(1 - i omega/Gamma + q^2 xi^2).

    chi(0,0) = T^{(eta-2)/z}, Gamma = T, xi = c/T^{1/z}; valid at the critical
    coupling for temperatures small compared to microscopic scales.
    """

    c: float
    T: float
    z: float = 1.0
    eta: float = 0.0

    def __post_init__(self):
        _positive("c", self.c)
        _positive("T", self.T)
        _positive("z", self.z)
        if not math.isfinite(self.eta):
            raise ValueError("eta must be finite")

    @property
    def xi(self) -> float:
        return self.c / self.T ** (1.0 / self.z)

    @property
    def gamma_rate(self) -> float:
        return self.T

    @property
    def chi00(self) -> float:
        return self.T ** ((-2.0 + self.eta) / self.z)


@dataclass(frozen=True)
class O3Regime:
    """O(3) sigma-model regime near a quantum critical point.

    delta is the stiffness rho_s on the ordered side, the gap Delta on the
    paramagnet side, and is ignored at criticality.  Observables go through
    o3_transport, which maps the regime onto DiffusiveO3 coefficients.
    """

    c: float
    T: float
    delta: float = 0.0
    side: str = "critical"

    def __post_init__(self):
        if self.side not in ("ordered", "critical", "paramagnet"):
            raise ValueError(f"unknown O3 regime {self.side!r}")
        _positive("c", self.c)
        _positive("T", self.T)
        if self.side != "critical":
            _positive("delta", self.delta)

    def to_diffusive(self) -> DiffusiveO3:
        chi_u, d_s = o3_transport(self)
        return DiffusiveO3(chi_u=chi_u, D_s=d_s, T=self.T)


SampleModel = ModelA | ModelB | DiffusiveO3 | TfimQC | O3Regime


def as_lorentzian_model(model):
    """Resolve O3Regime to its diffusive coefficients; pass others through."""
    if isinstance(model, O3Regime):
        return model.to_diffusive()
    return model


def lorentzian_parameters(model, q):
    """Per-mode static susceptibility chi_q and relaxation rate r_q.

    Returns (chi_q, r_q) broadcast over q (q >= 0, |q| for vectors).  At a
    critical point chi_q diverges as q -> 0 for Model A/B; callers that
    need the product chi_q r_q should use the stable coupling below.
    """
    m = as_lorentzian_model(model)
    qq = np.asarray(q, dtype=float)
    if np.any(qq < 0.0):
        raise ValueError("momentum magnitude must be non-negative")
    if isinstance(m, ModelA):
        with np.errstate(divide="ignore"):
            chi_q = 1.0 / (m.J * (m.inv_xi_sq + qq**2))
        r_q = m.gamma0 * m.J * (m.inv_xi_sq + qq**2)
        return chi_q, r_q
    if isinstance(m, ModelB):
        with np.errstate(divide="ignore"):
            chi_q = 1.0 / (m.J * (m.inv_xi_sq + qq**2))
        r_q = m.sigma_s * qq**2 * m.J * (m.inv_xi_sq + qq**2)
        return chi_q, r_q
    if isinstance(m, DiffusiveO3):
        chi_q = np.broadcast_to(np.float64(m.chi_u), qq.shape).copy() if qq.shape else np.float64(m.chi_u)
        return chi_q, m.D_s * qq**2
    if isinstance(m, TfimQC):
        lor = 1.0 + (qq * m.xi) ** 2
        return m.chi00 / lor, m.gamma_rate * lor
    raise TypeError(f"not a sample model: {type(model).__name__}")


def lorentzian_coupling(model, q):
    """chi_q * r_q evaluated without the intermediate divergence."""
    m = as_lorentzian_model(model)
    qq = np.asarray(q, dtype=float)
    if isinstance(m, ModelA):
        return np.broadcast_to(np.float64(m.gamma0), qq.shape)
    if isinstance(m, ModelB):
        return m.sigma_s * qq**2
    if isinstance(m, DiffusiveO3):
        return m.chi_u * m.D_s * qq**2
    if isinstance(m, TfimQC):
        return np.broadcast_to(np.float64(m.chi00 * m.gamma_rate), qq.shape)
    raise TypeError(f"not a sample model: {type(model).__name__}")


def chi(model, q, omega):
    """Dynamic susceptibility chi(q, omega), complex.

    q is the momentum magnitude (or an array of them).  omega = 0 returns
    the static susceptibility; at a critical point that diverges as q -> 0
    and the divergence is returned as inf rather than masked.
    """
    qq = np.asarray(q, dtype=float)
    ww = np.asarray(omega, dtype=float)
    if not (np.all(np.isfinite(qq)) and np.all(np.isfinite(ww))):
        raise ValueError("chi needs finite q and omega")
    _, r_q = lorentzian_parameters(model, qq)
    num = lorentzian_coupling(model, qq)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.asarray(num / (r_q - 1j * ww), dtype=complex)
        # q = 0 conserved modes: coupling and rate both vanish; the static
        # limit is still the finite chi_q, so patch omega == 0 separately.
        static = np.broadcast_to(ww == 0.0, out.shape)
        if np.any(static):
            chi_q, _ = lorentzian_parameters(model, qq)
            out[static] = np.broadcast_to(chi_q, out.shape)[static] + 0.0j
    if np.ndim(q) == 0 and np.ndim(omega) == 0:
        return complex(out)
    return out


def structure_factor(model, q, omega):
    """Classical dynamic structure factor S(q, omega) = 2 T chi_q r_q/(r_q^2 + omega^2).

    Identical to (2T/omega) Im chi(q, omega) for omega != 0 and equal to its
    analytic omega -> 0 limit at omega = 0.  Diverges (returns inf) only at
    r_q = omega = 0 with nonzero coupling, i.e. exactly at a critical point.
    """
    m = as_lorentzian_model(model)
    qq = np.asarray(q, dtype=float)
    ww = np.asarray(omega, dtype=float)
    _, r_q = lorentzian_parameters(m, qq)
    num = 2.0 * m.T * lorentzian_coupling(m, qq)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / (r_q**2 + ww**2)
    out = np.where(np.broadcast_to(num == 0.0, np.shape(out)), 0.0, out)
    if np.ndim(q) == 0 and np.ndim(omega) == 0:
        return float(out)
    return out


def fdt_convert(im_chi, omega, temperature, mode=CLASSICAL):
    """Convert Im chi to a symmetrized structure factor.

    classical: S = (2 T / omega) Im chi
    quantum:   S = 2 Im chi / (1 - e^{-omega/T}), hbar = 1

    The two agree as omega -> 0 (the quantum denominator is evaluated with
    expm1, so small omega/T is exact to rounding).  omega = 0 itself is a
    0/0 pointwise and raises; use structure_factor for analytic limits.
    """
    ww = np.asarray(omega, dtype=float)
    ic = np.asarray(im_chi, dtype=float)
    if np.any(ww == 0.0):
        raise ValueError("fdt_convert is pointwise ill-defined at omega = 0; "
                         "structure_factor carries the analytic limit")
    if temperature <= 0.0:
        raise ValueError("fdt_convert needs a positive temperature")
    if mode == CLASSICAL:
        out = 2.0 * temperature * ic / ww
    elif mode == QUANTUM:
        out = 2.0 * ic / (-np.expm1(-ww / temperature))
    else:
        raise ValueError(f"unknown FDT mode {mode!r}")
    if np.ndim(im_chi) == 0 and np.ndim(omega) == 0:
        return float(out)
    return out


# O(3) sigma-model transport.  chi_u = (T/c^2) Phi_u(delta/T) and
# D_s = (c^2/T) Phi_D(delta/T) with the scaling functions known in the three
# regimes; the 0.3 in the critical product D_s chi_u is a one-significant-
# figure literature input, carried verbatim.
_O3_CRITICAL_PHI_U = (math.sqrt(5.0) / math.pi) * math.log((math.sqrt(5.0) + 1.0) / 2.0)


def o3_transport(model: O3Regime):
    """Uniform susceptibility and spin-diffusion constant (chi_u, D_s).

    ordered    (T << rho_s): chi_u = (T/c^2)[2 rho_s/(3T) + 1/(3 pi)],
                             D_s = (c^2/T) sqrt(T/rho_s) e^{2 pi rho_s/T}
    critical              :  chi_u = (sqrt5/pi) ln((sqrt5+1)/2) T/c^2,
                             D_s = 0.3/chi_u
    paramagnet (T << Delta): chi_u = (Delta/(pi c^2)) e^{-Delta/T},
                             D_s = pi c^2 ln^2(Delta/T) e^{Delta/T}/Delta

    Warns when the requested regime is outside its window (delta/T <= 1).
    """
    if not isinstance(model, O3Regime):
        raise TypeError("o3_transport takes an O3Regime")
    c, t = model.c, model.T
    if model.side == "critical":
        chi_u = _O3_CRITICAL_PHI_U * t / c**2
        return chi_u, 0.3 / chi_u
    ratio = model.delta / t
    if ratio <= 1.0:
        warnings.warn(
            f"O3 {model.side} transport used at delta/T = {ratio:.3g} <= 1; "
            "expressions hold for T well below delta",
            stacklevel=2,
        )
    if model.side == "ordered":
        rho_s = model.delta
        chi_u = (t / c**2) * (2.0 * rho_s / (3.0 * t) + 1.0 / (3.0 * math.pi))
        d_s = (c**2 / t) * math.sqrt(t / rho_s) * math.exp(2.0 * math.pi * rho_s / t)
        return chi_u, d_s
    gap = model.delta
    chi_u = gap / (math.pi * c**2) * math.exp(-gap / t)
    d_s = math.pi * c**2 * math.log(gap / t) ** 2 * math.exp(gap / t) / gap
    return chi_u, d_s
