"""Time-domain Monte-Carlo check of the frequency-domain spectra.

The fluctuation equations are rebuilt here directly from the complex Langevin
equations for ``da``, ``db`` and a first-order temperature state, without
using the matrices of :mod:`opa_photothermal.dynamics`.  The real state is

    x = (Re da, Im da, Re db, Im db, dT)

driven by 16 independent white-noise quadratures (two per open port of each
mode).  Because the system is linear with constant coefficients it is
discretized exactly: the step propagator is ``expm(A h)`` and the injected
noise is the exact Gaussian increment conditioned on the Wiener increments,
so the step size is limited only by the frequency resolution wanted, not by
the stiffness ratio ``gamma_b / Omega_T``.  The homodyne record is the
box-average of the output quadrature over each step, and Welch periodograms of
independent seeded replicas are averaged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, solve_continuous_lyapunov
from scipy.signal import welch

from .config import OpaParams, derive_rates
from .crystal import photothermal_coeffs
from .errors import UnstableIntegration
from .steady_state import operating_point

PORTS = ("in", "out", "sc", "abs")
# samples per Welch segment; the step is chosen so that the probe is bin 16
NPERSEG = 1600
PROBE_BIN = 16


@dataclass(frozen=True)
class LinearSDE:
    """``dx = A x dt + B dW`` with ``E[dW dW^T] = diag(q) dt`` and output
    ``y dt = c x dt + d dW`` for each quadrature (rows of ``c`` and ``d``)."""

    A: np.ndarray
    B: np.ndarray
    q: np.ndarray
    c: np.ndarray
    d: np.ndarray


@dataclass(frozen=True)
class OracleEstimate:
    freq_hz: float
    V1: float
    V2: float
    V1_err: float
    V2_err: float
    replicas: int
    segments: int


def _complex_map(alpha, beta=0.0):
    """Real 2x2 block of ``z -> alpha z + beta conj(z)``."""
    return np.array([
        [alpha.real + beta.real, -alpha.imag + beta.imag],
        [alpha.imag + beta.imag, alpha.real - beta.real],
    ])


def _as_pair(z):
    return np.array([z.real, z.imag])


def langevin_system(p: OpaParams) -> LinearSDE:
    """Assemble the real linear SDE for the operating point of ``p``."""
    rates = derive_rates(p)
    ss = operating_point(p, rates)
    tc = photothermal_coeffs(p, rates, ss, ss.coupling)
    a, b, e = complex(ss.a_bar), complex(ss.b_bar), complex(ss.eps_bar)
    ga, gb = rates.gamma_a_tot, rates.gamma_b_tot
    wa, wb = p.omega_a_det, p.omega_b_det
    # temperature derivative of the coupling, recovered from C = Pi * de/dT
    if tc.Pi_b != 0:
        de_dT = tc.C_b / tc.Pi_b
    elif tc.Pi_a != 0:
        de_dT = tc.C_a / tc.Pi_a
    else:
        de_dT = 0.0
    de_dT = complex(de_dT)

    A = np.zeros((5, 5))
    # d(da)/dt = (i wa - ga) da + e* b da* + e* a* db + a* b de* + i a K_a dT
    A[0:2, 0:2] = _complex_map(1j * wa - ga, np.conj(e) * b)
    A[0:2, 2:4] = _complex_map(np.conj(e) * np.conj(a))
    A[0:2, 4] = _as_pair(np.conj(a) * b * np.conj(de_dT) + 1j * a * tc.K_a)
    # d(db)/dt = (i wb - gb) db - e a da - a^2 de / 2 + i b K_b dT
    A[2:4, 2:4] = _complex_map(1j * wb - gb)
    A[2:4, 0:2] = _complex_map(-e * a)
    A[2:4, 4] = _as_pair(-0.5 * a * a * de_dT + 1j * b * tc.K_b)
    # dT/dt = -Omega_T dT + sum_x Pi_x (sqrt(2 g_abs) 2 Re dx - 2 Re dv_abs)
    A[4, 4] = -tc.omega_T
    A[4, 0] = tc.Pi_a * 2 * np.sqrt(2 * rates.gamma_a_abs)
    A[4, 2] = tc.Pi_b * 2 * np.sqrt(2 * rates.gamma_b_abs)

    # noise channels: mode (a, b) x port x quadrature; dv = (X1 - i X2) / 2
    B = np.zeros((5, 16))
    q = np.ones(16)
    d = np.zeros((2, 16))
    for m, (mode, pi_x) in enumerate((("a", tc.Pi_a), ("b", tc.Pi_b))):
        for k, port in enumerate(PORTS):
            col = 8 * m + 2 * k
            g = getattr(rates, f"gamma_{mode}_{port}")
            s = np.sqrt(2 * g)
            B[2 * m, col] = s / 2
            B[2 * m + 1, col + 1] = -s / 2
            if port == "abs":
                B[4, col] = -pi_x
            if port == "in":
                q[col:col + 2] = p.input_variances[2 * m:2 * m + 2]
            if mode == "a" and port == "out":
                d[0, col] = -1.0
                d[1, col + 1] = -1.0
    # X1 = 2 Re(dA_out), X2 = -2 Im(dA_out), dA_out = sqrt(2 g_out) da - dv_out
    s_out = np.sqrt(2 * rates.gamma_a_out)
    c = np.zeros((2, 5))
    c[0, 0] = 2 * s_out
    c[1, 1] = -2 * s_out
    return LinearSDE(A, B, q, c, d)


def _discretize(sys: LinearSDE, h: float):
    """Exact one-step propagator and noise statistics.

    Returns ``Phi``, the gain ``G`` mapping the Wiener increment ``dW`` onto the
    conditional mean of the state noise, the Cholesky factor of the
    conditional covariance, and the stationary covariance.
    """
    A, B, Q = sys.A, sys.B, np.diag(sys.q)
    eig = np.linalg.eigvals(A)
    if np.any(eig.real >= 0):
        raise UnstableIntegration(f"drift matrix has eigenvalues with Re >= 0: {eig[eig.real >= 0]}")
    BQB = B @ Q @ B.T
    P_inf = solve_continuous_lyapunov(A, -BQB)
    P_inf = 0.5 * (P_inf + P_inf.T)
    Phi = expm(A * h)
    S_ww = P_inf - Phi @ P_inf @ Phi.T
    # Cov(w, dW) = A^{-1} (Phi - I) B Q
    C_wd = np.linalg.solve(A, (Phi - np.eye(5)) @ B @ Q)
    var_dW = sys.q * h
    G = np.divide(C_wd, var_dW, out=np.zeros_like(C_wd), where=var_dW > 0)
    S_cond = S_ww - G @ C_wd.T
    S_cond = 0.5 * (S_cond + S_cond.T)
    vals, vecs = np.linalg.eigh(S_cond)
    L = vecs * np.sqrt(np.clip(vals, 0.0, None))
    return Phi, G, L, P_inf


def _simulate(sys: LinearSDE, h: float, n_steps: int, rng: np.random.Generator, chunk: int = 4096):
    """One replica: box-averaged output quadratures, shape ``(2, n_steps)``."""
    Phi, G, L, P_inf = _discretize(sys, h)
    vals, vecs = np.linalg.eigh(P_inf)
    x = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ rng.standard_normal(5)
    sd = np.sqrt(sys.q * h)
    A_inv = np.linalg.inv(sys.A)
    # y h = c A^{-1} (x_{n+1} - x_n - B dW) + d dW
    cAi = sys.c @ A_inv
    out_dW = sys.d - cAi @ sys.B
    PhiT = Phi.T
    y = np.empty((2, n_steps))
    for start in range(0, n_steps, chunk):
        m = min(chunk, n_steps - start)
        dW = rng.standard_normal((m, 16)) * sd
        w = dW @ G.T + rng.standard_normal((m, 5)) @ L.T
        xs = np.empty((m + 1, 5))
        xs[0] = x
        for i in range(m):
            x = x @ PhiT + w[i]
            xs[i + 1] = x
        y[:, start:start + m] = (np.diff(xs, axis=0) @ cAi.T + dW @ out_dW.T).T / h
    return y


def sde_oracle(p: OpaParams, probe_freqs, duration=None, rng_seed: int = 0,
               replicas: int = 32, segments: int = 64) -> list:
    """Monte-Carlo estimates of ``(V1, V2)`` at each probe frequency (Hz).

    For each probe the step is ``h = 0.01 / f`` and Welch segments hold
    ``NPERSEG`` samples, so the probe falls exactly on a periodogram bin.
    ``duration`` (seconds of simulated time per replica and probe) overrides
    ``segments``; it must cover at least 64 half-overlapping segments.
    Replicas use independent child seeds of ``rng_seed`` and the reported
    error is the standard error of the replica mean.
    """
    sys = langevin_system(p)
    seeds = np.random.SeedSequence(rng_seed).spawn(len(probe_freqs))
    results = []
    for f, seed in zip(probe_freqs, seeds):
        f = float(f)
        h = 0.01 / f
        if duration is None:
            n_steps = (segments + 1) * NPERSEG // 2
        else:
            n_steps = int(round(duration / h))
            if (n_steps // (NPERSEG // 2)) - 1 < 64:
                raise ValueError(f"duration {duration} s gives fewer than 64 Welch segments at {f} Hz")
        est = []
        for child in seed.spawn(replicas):
            y = _simulate(sys, h, n_steps, np.random.default_rng(child))
            _, psd = welch(y, fs=1.0 / h, window="hann", nperseg=NPERSEG,
                           noverlap=NPERSEG // 2, return_onesided=True, axis=-1)
            # one-sided PSD of the quadrature -> two-sided (shot noise = 1)
            est.append(psd[:, PROBE_BIN] / 2)
        est = np.array(est)
        mean = est.mean(axis=0)
        err = est.std(axis=0, ddof=1) / np.sqrt(replicas) if replicas > 1 else np.full(2, np.nan)
        n_seg = n_steps // (NPERSEG // 2) - 1
        results.append(OracleEstimate(f, float(mean[0]), float(mean[1]),
                                      float(err[0]), float(err[1]), replicas, n_seg))
    return results
