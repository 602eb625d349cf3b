"""Output quadrature variance spectra of the fundamental field.

Variances are normalized to shot noise (vacuum = 1).  ``V1`` is the amplitude
quadrature, ``V2`` the phase quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import bisect

from .config import CavityRates, OpaParams, derive_rates
from .crystal import ThermalCoeffs, photothermal_coeffs
from .dynamics import (
    SystemMatrices, ThetaSet, build_photothermal_matrices, build_system_matrices,
    transfer_matrices, transfer_matrices_reduced, zero_photothermal,
)
from .errors import AssumptionViolated, NoCutoffFound
from .steady_state import SteadyState, operating_point

# mid-band reference frequency used by cutoff_estimate unless overridden
PLATEAU_HZ = 1e5


class SpectrumPoint(NamedTuple):
    omega: float
    V1: float
    V2: float


@dataclass(frozen=True)
class Model:
    """Everything frequency-independent needed to evaluate spectra of ``params``."""

    params: OpaParams
    rates: CavityRates
    steady: SteadyState
    thermal: ThermalCoeffs
    system: SystemMatrices
    photothermal: bool = True

    def theta(self, Omega) -> ThetaSet:
        if self.photothermal:
            pm = build_photothermal_matrices(Omega, self.steady, self.thermal, self.rates)
        else:
            pm = zero_photothermal(Omega)
        return transfer_matrices(Omega, self.system, pm)

    def theta_reduced(self, Omega) -> ThetaSet:
        return transfer_matrices_reduced(Omega, self.system)

    def variances(self, Omega):
        return output_variances(self.theta(Omega), self.params.input_variances)


def build_model(p: OpaParams, photothermal: bool = True) -> Model:
    """Assemble the operating point and coupling matrices.

    ``photothermal=False`` drops the thermal coupling matrices but keeps the
    absorption loss and its vacuum port, which isolates the photothermal excess.
    """
    rates = derive_rates(p)
    ss = operating_point(p, rates)
    tc = photothermal_coeffs(p, rates, ss, ss.coupling)
    sm = build_system_matrices(ss, rates, (p.omega_a_det, p.omega_b_det))
    return Model(p, rates, ss, tc, sm, photothermal)


def output_variances(ts: ThetaSet, input_variances):
    """Amplitude and phase variances of the fundamental output.

    Seed/pump quadratures are weighted by ``input_variances`` (order
    ``V_A1, V_A2, V_B1, V_B2``); all vacuum ports enter with unit weight.
    """
    w = np.asarray(input_variances, dtype=float)
    vac = (np.abs(ts.Theta_out) ** 2 + np.abs(ts.Theta_sc) ** 2 + np.abs(ts.Theta_abs) ** 2).sum(axis=-1)
    seeded = (np.abs(ts.Theta_in) ** 2 * w).sum(axis=-1)
    V = seeded + vac
    return V[..., 0], V[..., 1]


def log_grid(f_min=1.0, f_max=1e8, points_per_decade=400):
    """Log-spaced angular-frequency grid (rad/s) between two frequencies in Hz."""
    n = int(round(np.log10(f_max / f_min) * points_per_decade)) + 1
    return 2 * np.pi * np.logspace(np.log10(f_min), np.log10(f_max), n)


def variance_spectrum(p: OpaParams, Omega, photothermal: bool = True):
    """Arrays ``(V1, V2)`` on the angular-frequency grid ``Omega``."""
    return build_model(p, photothermal).variances(np.asarray(Omega, dtype=float))


def spectrum(p: OpaParams, grid) -> list:
    """Frequency-ordered :class:`SpectrumPoint` list for angular frequencies ``grid``."""
    Omega = np.sort(np.asarray(grid, dtype=float))
    V1, V2 = variance_spectrum(p, Omega)
    return [SpectrumPoint(float(w), float(v1), float(v2)) for w, v1, v2 in zip(Omega, V1, V2)]


def limiting_theta(Omega, ss: SteadyState, rates: CavityRates, tc: ThermalCoeffs,
                   detunings=(0.0, 0.0), ratio_max=0.1) -> ThetaSet:
    """Closed-form rows 1-2 of the transfer matrices in the weak-seed,
    resonant, scatter-free limit with the pump at phase 0 or pi.

    Rows 3-4 are returned as NaN.
    """
    violations = []
    if ss.b_bar == 0 or abs(ss.a_bar) / abs(ss.b_bar) >= ratio_max:
        violations.append(f"|a|/|b| must be < {ratio_max}")
    if detunings[0] != 0 or detunings[1] != 0:
        violations.append("mean detunings must vanish")
    if rates.gamma_a_sc != 0 or rates.gamma_b_sc != 0:
        violations.append("intra-cavity scattering must vanish")
    if abs(ss.b_bar.imag) > 1e-9 * abs(ss.b_bar):
        violations.append("pump phase must be 0 or pi (real b)")
    Omega = np.asarray(Omega, dtype=float)
    if np.any(Omega >= rates.gamma_a_tot):
        violations.append("Omega must lie within the cavity linewidth")
    if violations:
        raise AssumptionViolated(violations)

    g = rates.gamma_a_tot
    ga_in, ga_out, ga_abs = rates.gamma_a_in, rates.gamma_a_out, rates.gamma_a_abs
    gb, gb_in, gb_out, gb_abs = rates.gamma_b_tot, rates.gamma_b_in, rates.gamma_b_out, rates.gamma_b_abs
    a, b, e, Cb = ss.a_bar, ss.b_bar, ss.eps_bar, tc.C_b
    ac, bc, ec, Cbc = np.conj(a), np.conj(b), np.conj(e), np.conj(tc.C_b)

    den = g ** 2 - abs(e) ** 2 * abs(b) ** 2
    plus = e * bc + ec * b
    minus = ec * b - e * bc
    q_plus = a * bc * Cb * (g + ec * b) + ac * b * Cbc * (g + e * bc)
    q_minus = a * bc * Cb * (g - ec * b) - ac * b * Cbc * (g - e * bc)
    thermal = -1.0 / (Omega - 1j * tc.omega_T)
    s2 = 2 * np.sqrt(2)

    shape = Omega.shape + (4, 4)
    T_in, T_out, T_sc, T_abs = (np.full(shape, np.nan, dtype=complex) for _ in range(4))
    for T in (T_in, T_out, T_abs):
        T[..., :2, 3] = 0.0
    T_sc[..., :2, :] = 0.0

    r_in, r_abs = np.sqrt(ga_in * ga_out), np.sqrt(ga_abs * ga_out)
    # amplitude row
    T_in[..., 0, 0] = r_in * (2 * g + plus) / den
    T_in[..., 0, 1] = 1j * r_in * minus / den
    T_in[..., 0, 2] = thermal * s2 * 1j * np.sqrt(ga_out * gb_abs * gb_in) * q_plus / (gb * den)
    T_out[..., 0, 0] = (-g ** 2 + 2 * ga_out * g + ga_out * plus + abs(e) ** 2 * abs(b) ** 2) / den
    T_out[..., 0, 1] = 1j * ga_out * minus / den
    T_out[..., 0, 2] = thermal * s2 * 1j * np.sqrt(ga_out * gb_abs * gb_out) * q_plus / (gb * den)
    T_abs[..., 0, 0] = r_abs * (2 * g + plus) / den
    T_abs[..., 0, 1] = 1j * r_abs * minus / den
    T_abs[..., 0, 2] = thermal * 1j * np.sqrt(2 * ga_out) * (2 * gb_abs - gb) * q_plus / (gb * den)
    # phase row
    T_in[..., 1, 0] = 1j * r_in * minus / den
    T_in[..., 1, 1] = r_in * (2 * g - plus) / den
    T_in[..., 1, 2] = thermal * s2 * np.sqrt(ga_out * gb_abs * gb_in) * q_minus / (gb * den)
    T_out[..., 1, 0] = 1j * ga_out * minus / den
    T_out[..., 1, 1] = (-g ** 2 + 2 * ga_out * g - ga_out * plus + abs(e) ** 2 * abs(b) ** 2) / den
    T_out[..., 1, 2] = thermal * s2 * np.sqrt(ga_out * gb_abs * gb_out) * q_minus / (gb * den)
    T_abs[..., 1, 0] = 1j * r_abs * minus / den
    T_abs[..., 1, 1] = r_abs * (2 * g - plus) / den
    T_abs[..., 1, 2] = thermal * np.sqrt(2 * ga_out) * (2 * gb_abs - gb) * q_minus / (gb * den)
    return ThetaSet(T_in, T_out, T_sc, T_abs)


def cutoff_estimate(spec, quadrature: int = 2, plateau_hz: float = PLATEAU_HZ) -> float:
    """Photothermal knee: angular frequency below the mid band at which the
    chosen variance first rises 3 dB above its value at ``plateau_hz``.

    ``spec`` is a sequence of :class:`SpectrumPoint` (or an ``(N, 3)`` array of
    ``omega, V1, V2``).  The curve is interpolated monotonically in log-log
    coordinates and the crossing refined by bisection.
    """
    arr = np.asarray([tuple(pt) for pt in spec], dtype=float)
    arr = arr[np.argsort(arr[:, 0])]
    omega, V = arr[:, 0], arr[:, quadrature]
    logw, logv = np.log(omega), np.log(V)
    curve = PchipInterpolator(logw, logv)

    w_ref = 2 * np.pi * plateau_hz
    if not omega[0] < w_ref <= omega[-1]:
        raise NoCutoffFound(f"spectrum does not span the plateau reference {plateau_hz} Hz")
    level = float(curve(np.log(w_ref))) + np.log(2.0)

    below = np.nonzero(omega <= w_ref)[0]
    above_level = logv[below] >= level
    if not np.any(above_level):
        raise NoCutoffFound("variance never rises 3 dB above the mid-band plateau")
    # highest grid point under the reference that is already 3 dB up
    hi_idx = below[np.nonzero(above_level)[0][-1]]
    lo, hi = logw[hi_idx], logw[hi_idx + 1]
    root = bisect(lambda x: float(curve(x)) - level, lo, hi, xtol=1e-12)
    return float(np.exp(root))
