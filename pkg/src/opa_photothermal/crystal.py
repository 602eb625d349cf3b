"""Crystal physics: phase-matched coupling, its temperature sensitivity and
the one-pole thermal response of the heated interaction volume."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT, hbar, pi

from .config import CavityRates, OpaParams
from .errors import SingularInput

# below this |dk z / 2| the series form of d(eps)/d(dk) is used
SERIES_THRESHOLD = 1e-4


@dataclass(frozen=True)
class CouplingState:
    delta_k: float
    eps_bar: complex
    d_eps_d_dk: complex
    d_eps_dz: complex


@dataclass(frozen=True)
class ThermalCoeffs:
    """Photothermal coupling coefficients.

    ``C_a``/``C_b`` convert an absorbed-power quadrature of each carrier into a
    coupling-strength fluctuation, ``Pi_a``/``Pi_b`` into a temperature drive,
    and ``K_a``/``K_b`` convert temperature into resonance-frequency shifts.
    """

    omega_T: float
    H_T_scale: float
    C_a: complex
    C_b: complex
    Pi_a: float
    Pi_b: float
    K_a: float
    K_b: float


def phase_mismatch(dT_offset, xi):
    return xi * dT_offset


def coupling_strength(delta_k, z, kappa0):
    """Complex nonlinear coupling ``kappa0 z exp(i x) sinc(x)``, ``x = dk z / 2``."""
    x = delta_k * z / 2
    # np.sinc is the normalized sinc
    return kappa0 * z * np.exp(1j * x) * np.sinc(x / pi)


def _near_cot_pole(x):
    if x == 0:
        return False
    m = np.round(x / pi)
    return m != 0 and abs(x - m * pi) <= 1e-12 * max(1.0, abs(x))


def coupling_derivatives(delta_k, z, kappa0):
    """Return ``(d eps / d dk, d eps / d z)``.

    The z-derivative is evaluated as ``eps (dk / 2) (i + cot(dk z / 2))``,
    which equals ``kappa0 exp(i dk z)`` and is finite at ``dk = 0``.
    """
    x = delta_k * z / 2
    if _near_cot_pole(x):
        raise SingularInput(f"dk z / 2 = {x} sits on a cot pole (sinc zero)")
    eps = coupling_strength(delta_k, z, kappa0)
    if abs(x) < SERIES_THRESHOLD:
        d_dk = eps * (0.5j * z - delta_k * z ** 2 / 12)
    else:
        d_dk = eps * (0.5j * z - 1 / delta_k + (z / 2) / np.tan(x))
    d_dz = kappa0 * np.exp(2j * x)
    return complex(d_dk), complex(d_dz)


def coupling_state(p: OpaParams) -> CouplingState:
    dk = phase_mismatch(p.dT_offset, p.xi)
    d_dk, d_dz = coupling_derivatives(dk, p.z, p.kappa0)
    return CouplingState(dk, complex(coupling_strength(dk, p.z, p.kappa0)), d_dk, d_dz)


def thermal_cutoff(p: OpaParams) -> float:
    return p.kappa_th / (p.C * p.rho * p.r0 ** 2)


def thermal_response(Omega, omega_T, C, rho, V):
    """Temperature per absorbed watt, ``1 / ((i Omega + Omega_T) C rho V)``."""
    return 1.0 / ((1j * np.asarray(Omega) + omega_T) * C * rho * V)


def detuning_coefficient(wavelength, n, dn_dT, alpha):
    """Resonance shift per kelvin from thermo-refraction plus expansion."""
    return 2 * pi * SPEED_OF_LIGHT / wavelength * (dn_dT / n + alpha)


def photothermal_coeffs(p: OpaParams, rates: CavityRates, ss, cs: CouplingState) -> ThermalCoeffs:
    heat_capacity = p.C * p.rho * p.mode_volume
    # temperature derivative of the coupling; the crystal length follows alpha_a
    d_eps_dT = cs.d_eps_d_dk * p.xi + cs.d_eps_dz * p.alpha_a * p.z
    pi_a = hbar * p.omega_a * np.sqrt(2 * rates.gamma_a_abs) * abs(ss.a_bar) / heat_capacity
    pi_b = hbar * p.omega_b * np.sqrt(2 * rates.gamma_b_abs) * abs(ss.b_bar) / heat_capacity
    return ThermalCoeffs(
        omega_T=thermal_cutoff(p),
        H_T_scale=1.0 / heat_capacity,
        C_a=complex(pi_a * d_eps_dT),
        C_b=complex(pi_b * d_eps_dT),
        Pi_a=float(pi_a),
        Pi_b=float(pi_b),
        K_a=detuning_coefficient(p.lambda_a, p.index_a, p.dn_a_dT, p.alpha_a),
        K_b=detuning_coefficient(p.lambda_b, p.index_b, p.dn_b_dT, p.alpha_b),
    )
