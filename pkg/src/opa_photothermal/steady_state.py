"""Coherent operating point of the OPA below threshold (undepleted pump).

Field amplitudes are photon-flux normalized: an input of power P at angular
frequency w has ``|A_in|**2 = P / (hbar w)`` photons per second, and the
intra-cavity amplitudes are in sqrt(photon number).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar

from .config import CavityRates, OpaParams, derive_rates
from .crystal import CouplingState, coupling_state
from .errors import AboveThreshold, ZeroCoupling


@dataclass(frozen=True)
class SteadyState:
    a_bar: complex
    b_bar: complex
    A_in_bar: complex
    B_in_bar: complex
    P_th: float
    P_pump: float
    gain: float
    coupling: CouplingState

    @property
    def eps_bar(self) -> complex:
        return self.coupling.eps_bar


def pump_steady(B_in_bar, rates: CavityRates, omega_b_det):
    return np.sqrt(2 * rates.gamma_b_in) * B_in_bar / (rates.gamma_b_tot - 1j * omega_b_det)


def seed_steady(A_in_bar, b_bar, eps_bar, rates: CavityRates, omega_a_det):
    """Intra-cavity seed amplitude including parametric (de)amplification.

    Solves ``0 = (i w - g) a + eps* a* b + sqrt(2 g_in) A_in`` for ``a``; the
    ``eps* b s*`` term carries the relative pump/seed phase.
    """
    g = rates.gamma_a_tot
    scale = g ** 2 + omega_a_det ** 2
    denom = scale - abs(eps_bar) ** 2 * abs(b_bar) ** 2
    # a margin at rounding level counts as threshold
    if denom <= 1e-12 * scale:
        raise AboveThreshold(
            f"|eps||b| = {abs(eps_bar) * abs(b_bar):.6g} reaches sqrt(g^2 + w^2) = "
            f"{np.sqrt(g ** 2 + omega_a_det ** 2):.6g}")
    s = np.sqrt(2 * rates.gamma_a_in) * A_in_bar
    return ((g + 1j * omega_a_det) * s + np.conj(eps_bar) * b_bar * np.conj(s)) / denom


def threshold_amplitude(rates: CavityRates, eps_bar) -> float:
    if abs(eps_bar) == 0:
        raise ZeroCoupling("threshold undefined for zero nonlinear coupling")
    if rates.gamma_b_in == 0:
        return np.inf
    return rates.gamma_a_tot * rates.gamma_b_tot / (abs(eps_bar) * np.sqrt(2 * rates.gamma_b_in))


def threshold_power(rates: CavityRates, eps_bar, hbar_omega_b) -> float:
    """On-resonance pump power at which the seed denominator vanishes."""
    return hbar_omega_b * threshold_amplitude(rates, eps_bar) ** 2


def operating_point(p: OpaParams, rates: CavityRates = None) -> SteadyState:
    """Steady intra-cavity amplitudes for ``p``.

    Without coupling the threshold is infinite, so a nonzero ``pump_fraction``
    cannot be turned into a power and raises :class:`ZeroCoupling`; give the
    pump in watts (``P_pump``) instead.
    """
    rates = derive_rates(p) if rates is None else rates
    cs = coupling_state(p)
    hw_a = hbar * p.omega_a
    hw_b = hbar * p.omega_b

    if cs.eps_bar == 0:
        P_th = np.inf
    else:
        P_th = threshold_power(rates, cs.eps_bar, hw_b)

    if p.pump_fraction is not None:
        if p.pump_fraction == 0:
            B_mag = 0.0
        else:
            B_mag = np.sqrt(p.pump_fraction) * threshold_amplitude(rates, cs.eps_bar)
        P_pump = hw_b * B_mag ** 2
    else:
        P_pump = p.P_pump
        B_mag = np.sqrt(P_pump / hw_b)
    B_in = B_mag * np.exp(1j * p.phi_b)
    A_in = np.sqrt(p.P_seed / hw_a) * np.exp(1j * p.phi_a)

    b_bar = pump_steady(B_in, rates, p.omega_b_det)
    a_bar = seed_steady(A_in, b_bar, cs.eps_bar, rates, p.omega_a_det)

    # gain from a unit seed with the same phase, so it is defined for P_seed = 0
    unit = np.exp(1j * p.phi_a)
    on = seed_steady(unit, b_bar, cs.eps_bar, rates, p.omega_a_det)
    off = seed_steady(unit, 0.0, cs.eps_bar, rates, p.omega_a_det)
    gain = abs(on) ** 2 / abs(off) ** 2 if off != 0 else 1.0

    return SteadyState(
        a_bar=complex(a_bar), b_bar=complex(b_bar), A_in_bar=complex(A_in), B_in_bar=complex(B_in),
        P_th=float(P_th), P_pump=float(P_pump), gain=float(gain), coupling=cs,
    )
