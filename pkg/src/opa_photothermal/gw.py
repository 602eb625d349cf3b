"""Projection of squeezed-light variances onto the quantum noise of a
conventional (lossless, Michelson with arm cavities) GW interferometer.

All spectral densities are returned as strain^2/Hz; divide by ``h_sql**2`` for
SQL-normalized curves.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np
from scipy.constants import hbar, pi

from .errors import InvariantViolation, MissingFilterLinewidth, ZeroFrequency

FREQUENCY_DEPENDENT = "frequency-dependent"


@dataclass(frozen=True)
class IfoParams:
    """Interferometer parameters.

    The defaults are representative advanced-detector values: 40 kg mirrors,
    4 km arms, a 100 Hz arm-cavity linewidth and operation at the SQL power.
    ``theta`` is the injected squeeze angle in radians, or the string
    ``"frequency-dependent"`` for the ideal rotation ``theta = -Phi``.
    """

    m: float = 40.0
    L: float = 4e3
    gamma_arm: float = 2 * pi * 100.0
    power_ratio: float = 1.0
    theta: Union[float, str] = 0.0
    gamma_f: Optional[float] = None

    def __post_init__(self):
        problems = [name for name in ("m", "L", "gamma_arm", "power_ratio") if not getattr(self, name) > 0]
        if self.gamma_f is not None and not self.gamma_f > 0:
            problems.append("gamma_f")
        if isinstance(self.theta, str) and self.theta != FREQUENCY_DEPENDENT:
            problems.append("theta")
        if problems:
            raise InvariantViolation(f"invalid interferometer parameters: {', '.join(problems)}")

    def replace(self, **changes) -> "IfoParams":
        return replace(self, **changes)


def _positive(Omega):
    Omega = np.asarray(Omega, dtype=float)
    if np.any(Omega <= 0):
        raise ZeroFrequency("sideband frequency must be positive")
    return Omega


def h_sql(Omega, m, L):
    """Strain amplitude density at the standard quantum limit."""
    Omega = _positive(Omega)
    return np.sqrt(8 * hbar / (m * Omega ** 2 * L ** 2))


def eta_coupling(Omega, power_ratio, gamma_arm):
    Omega = _positive(Omega)
    g4 = gamma_arm ** 4
    return 2 * power_ratio * g4 / (Omega ** 2 * (gamma_arm ** 2 + Omega ** 2))


def phi_angle(eta):
    """``arccot(eta)`` on the branch (0, pi/2) for positive ``eta``."""
    return np.arctan2(1.0, np.asarray(eta, dtype=float))


def gw_noise(Omega, V1, V2, ifo: IfoParams = IfoParams()):
    """Noise spectral density with the squeezed field injected at angle ``ifo.theta``."""
    Omega = _positive(Omega)
    eta = eta_coupling(Omega, ifo.power_ratio, ifo.gamma_arm)
    phi = phi_angle(eta)
    theta = -phi if ifo.theta == FREQUENCY_DEPENDENT else ifo.theta
    h2 = h_sql(Omega, ifo.m, ifo.L) ** 2
    angle = theta + phi
    return 0.5 * h2 * (1 / eta + eta) * (V1 * np.cos(angle) ** 2 + V2 * np.sin(angle) ** 2)


def filter_weights(Omega, gamma_f):
    """Pass (``zeta1``) and vacuum-replacement (``zeta2``) weights of the amplitude filter."""
    Omega = np.asarray(Omega, dtype=float)
    den = gamma_f ** 2 + Omega ** 2
    return Omega ** 2 / den, gamma_f ** 2 / den


def filtered_noise(Omega, V1, V2, ifo: IfoParams):
    """Noise spectral density with an amplitude filter of linewidth ``ifo.gamma_f``."""
    if ifo.gamma_f is None:
        raise MissingFilterLinewidth("the amplitude-filter scheme needs gamma_f")
    Omega = _positive(Omega)
    eta = eta_coupling(Omega, ifo.power_ratio, ifo.gamma_arm)
    zeta1, zeta2 = filter_weights(Omega, ifo.gamma_f)
    h2 = h_sql(Omega, ifo.m, ifo.L) ** 2
    return h2 / (2 * eta) * (zeta1 * (V1 + eta ** 2 * V2) + zeta2 * (1 + eta ** 2))
