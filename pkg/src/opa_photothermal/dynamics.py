"""Linearized fluctuation dynamics in the frequency domain.

Vectors are ordered ``(da, da^dagger, db, db^dagger)``.  Every function that
takes ``Omega`` accepts a scalar or a 1-d array; array inputs give stacked
``(N, 4, 4)`` matrices and all frequencies are solved in one batched call.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import CavityRates
from .crystal import ThermalCoeffs
from .errors import SingularSystem
from .steady_state import SteadyState

# quadrature transform: (X1_a, X2_a, X1_b, X2_b) = LAMBDA @ (da, da+, db, db+)
LAMBDA = np.array([
    [1, 1, 0, 0],
    [1j, -1j, 0, 0],
    [0, 0, 1, 1],
    [0, 0, 1j, -1j],
], dtype=complex)
LAMBDA_INV = 0.5 * np.array([
    [1, -1j, 0, 0],
    [1, 1j, 0, 0],
    [0, 0, 1, -1j],
    [0, 0, 1, 1j],
], dtype=complex)

# conditioning beyond which the system matrix is treated as singular
_MAX_COND = 1e13


@dataclass(frozen=True)
class SystemMatrices:
    M_c: np.ndarray
    M_in: np.ndarray
    M_out: np.ndarray
    M_sc: np.ndarray
    M_abs: np.ndarray


@dataclass(frozen=True)
class PhotothermalMatrices:
    M_eps_c: np.ndarray
    M_eps_abs: np.ndarray
    M_omega_c: np.ndarray
    M_omega_abs: np.ndarray


@dataclass(frozen=True)
class ThetaSet:
    Theta_in: np.ndarray
    Theta_out: np.ndarray
    Theta_sc: np.ndarray
    Theta_abs: np.ndarray

    def as_tuple(self):
        return self.Theta_in, self.Theta_out, self.Theta_sc, self.Theta_abs


def _diag_sqrt(ga, gb):
    return np.diag(np.sqrt([2 * ga, 2 * ga, 2 * gb, 2 * gb])).astype(complex)


def build_system_matrices(ss: SteadyState, rates: CavityRates, detunings=(0.0, 0.0)) -> SystemMatrices:
    wa, wb = detunings
    ga, gb = rates.gamma_a_tot, rates.gamma_b_tot
    a, b, e = ss.a_bar, ss.b_bar, ss.eps_bar
    ac, bc, ec = np.conj(a), np.conj(b), np.conj(e)
    M_c = np.array([
        [1j * wa - ga, ec * b, ec * ac, 0],
        [e * bc, -1j * wa - ga, 0, e * a],
        [-e * a, 0, 1j * wb - gb, 0],
        [0, -ec * ac, 0, -1j * wb - gb],
    ], dtype=complex)
    return SystemMatrices(
        M_c=M_c,
        M_in=_diag_sqrt(rates.gamma_a_in, rates.gamma_b_in),
        M_out=_diag_sqrt(rates.gamma_a_out, rates.gamma_b_out),
        M_sc=_diag_sqrt(rates.gamma_a_sc, rates.gamma_b_sc),
        M_abs=_diag_sqrt(rates.gamma_a_abs, rates.gamma_b_abs),
    )


def build_photothermal_matrices(Omega, ss: SteadyState, tc: ThermalCoeffs,
                                rates: CavityRates) -> PhotothermalMatrices:
    Omega = np.asarray(Omega, dtype=float)
    a, b = ss.a_bar, ss.b_bar
    ac, bc = np.conj(a), np.conj(b)
    sa, sb = np.sqrt(2 * rates.gamma_a_abs), np.sqrt(2 * rates.gamma_b_abs)

    # coupling fluctuation: rows 1 and 4 see the adjoint d(eps)^dagger
    row_eps = np.array([ac * b, a * bc, -0.5 * a ** 2, -0.5 * ac ** 2])
    conj_row = np.array([True, False, False, True])
    C_col = np.array([tc.C_a, tc.C_a, tc.C_b, tc.C_b])
    C_ij = np.where(conj_row[:, None], np.conj(C_col)[None, :], C_col[None, :])
    eps_abs = -row_eps[:, None] * C_ij
    eps_c = -eps_abs * np.array([sa, sa, sb, sb])[None, :]

    # detuning fluctuation (real, so d(omega)^dagger = d(omega))
    row_w = np.array([1j * a * tc.K_a, -1j * ac * tc.K_a, 1j * b * tc.K_b, -1j * bc * tc.K_b])
    Pi_col = np.array([tc.Pi_a, tc.Pi_a, tc.Pi_b, tc.Pi_b])
    w_abs = -row_w[:, None] * Pi_col[None, :]
    w_c = -w_abs * np.array([sa, sa, sb, sb])[None, :]

    pref = 1.0 / (1j * Omega + tc.omega_T)
    pref = pref[..., None, None]
    return PhotothermalMatrices(
        M_eps_c=pref * eps_c, M_eps_abs=pref * eps_abs,
        M_omega_c=pref * w_c, M_omega_abs=pref * w_abs,
    )


def zero_photothermal(Omega) -> PhotothermalMatrices:
    shape = np.shape(Omega) + (4, 4)
    z = np.zeros(shape, dtype=complex)
    return PhotothermalMatrices(z, z, z, z)


def _solve(Omega, A_extra, sm: SystemMatrices, rhs_abs):
    Omega = np.asarray(Omega, dtype=float)
    eye = np.eye(4)
    A = 1j * Omega[..., None, None] * eye - sm.M_c - A_extra
    A = np.broadcast_to(A, np.shape(Omega) + (4, 4))
    cond = np.linalg.cond(A)
    bad = ~np.isfinite(cond) | (cond > _MAX_COND)
    if np.any(bad):
        raise SingularSystem(float(np.atleast_1d(Omega)[np.argmax(np.atleast_1d(bad))]))
    rhs_abs = np.broadcast_to(rhs_abs, A.shape)
    rhs = np.concatenate([
        np.broadcast_to(sm.M_in, A.shape), np.broadcast_to(sm.M_out, A.shape),
        np.broadcast_to(sm.M_sc, A.shape), rhs_abs,
    ], axis=-1)
    G = np.linalg.solve(A, rhs)
    blocks = [sm.M_out @ G[..., 4 * k:4 * k + 4] for k in range(4)]
    blocks[1] = blocks[1] - eye
    return ThetaSet(*(LAMBDA @ blk @ LAMBDA_INV for blk in blocks))


def transfer_matrices(Omega, sm: SystemMatrices, pm: PhotothermalMatrices) -> ThetaSet:
    """Quadrature-basis transfer matrices from every input port to the output."""
    return _solve(Omega, pm.M_eps_c + pm.M_omega_c, sm, sm.M_abs + pm.M_eps_abs + pm.M_omega_abs)


def transfer_matrices_reduced(Omega, sm: SystemMatrices) -> ThetaSet:
    """Transfer matrices without photothermal coupling and without the
    absorption-vacuum port (its ``Theta_abs`` is identically zero)."""
    shape = np.shape(Omega) + (4, 4)
    theta = _solve(Omega, np.zeros((4, 4)), sm, np.zeros((4, 4), dtype=complex))
    return ThetaSet(theta.Theta_in, theta.Theta_out, theta.Theta_sc, np.zeros(shape, dtype=complex))
