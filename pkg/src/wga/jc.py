"""Closed-form results when one resonator superposition decouples from the atom.

In that regime the atom couples only to the JC mode ``A`` with strength
``G+``, and the correlated two-photon scattering is that of a single-mode
Jaynes-Cummings system; the free mode ``B`` only enters the one-photon
background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateJC, OnShellPole
from .linalg import eig_general
from .model import ModelParams, apply_dissipation, jc_transform
from .onephoton import amplitudes_closed
from .twophoton import Channel, TwoPhotonConfig, channel_prefactor, outgoing_momenta


@dataclass(frozen=True)
class JcSpectrum:
    """JC eigenvalues; index 0 is the ``-`` branch (lower real part), index 1 the ``+`` branch."""

    lambda_1: np.ndarray
    lambda_2: np.ndarray
    omega_A: complex
    omega_B: complex
    G_plus: float


def jc_spectrum(p: ModelParams) -> JcSpectrum:
    """Eigenvalues of the JC Hamiltonian in its one- and two-excitation blocks.

    Raises:
        NotSingleMode: the system is in the two-mode regime.
    """
    p = apply_dissipation(p)
    t = jc_transform(p)
    G, wA, om = t.G_plus, t.omega_A, p.Omega
    one = np.array([[om, G], [G, wA]], dtype=complex)
    two = np.array([[2 * wA, math.sqrt(2) * G], [math.sqrt(2) * G, wA + om]], dtype=complex)
    return JcSpectrum(eig_general(one).values, eig_general(two).values, t.omega_A, t.omega_B, G)


def _closed_kernel(p: ModelParams, cfg: TwoPhotonConfig, delta_p: complex, channel: Channel) -> complex:
    p = apply_dissipation(p)
    spec = jc_spectrum(p)
    E, wA, om, G = cfg.E, spec.omega_A, p.Omega, spec.G_plus
    g_a, g_b = complex(p.g_a), complex(p.g_b)
    ks = (cfg.k1, cfg.k2)
    ps = outgoing_momenta(channel, E, delta_p)

    if channel is Channel.REFLECTED:
        coupling = g_b.conjugate() ** 2 * g_a**2
        out_sign = 1
    else:
        coupling = abs(g_a) ** 4
        out_sign = -1

    numerator = -2 * coupling * (E - wA - om) * ((E - 2 * om) * (E - 2 * wA) - 4 * G**2)
    denominator = np.prod(E - spec.lambda_2)
    for lam in spec.lambda_1:
        for k, q in zip(ks, ps):
            denominator *= (k - lam) * (q + out_sign * lam)
    if abs(denominator) == 0:
        raise OnShellPole("closed-form kernel denominator vanishes")
    return complex(numerator / denominator)


def kernel_U_closed(p: ModelParams, cfg: TwoPhotonConfig, delta_p: complex) -> complex:
    """Single-mode closed form of the reflected kernel ``U``."""
    return _closed_kernel(p, cfg, delta_p, Channel.REFLECTED)


def kernel_W_closed(p: ModelParams, cfg: TwoPhotonConfig, delta_p: complex) -> complex:
    """Single-mode closed form of the transmitted kernel ``W``."""
    return _closed_kernel(p, cfg, delta_p, Channel.TRANSMITTED)


def correlated_profile(spec: JcSpectrum, cfg: TwoPhotonConfig, x) -> np.ndarray:
    """The function ``F(x)`` multiplying the correlated part of the single-mode wavefunctions."""
    lam_m, lam_p = spec.lambda_1
    if abs(lam_p - lam_m) < 1e-10:
        raise DegenerateJC("lambda_1+ and lambda_1- coincide")
    E = cfg.E
    ax = np.abs(np.asarray(x, dtype=float))
    num = (E - 2 * lam_p) * np.exp(1j * (E / 2 - lam_m) * ax) - (E - 2 * lam_m) * np.exp(1j * (E / 2 - lam_p) * ax)
    den = lam_p - lam_m
    for lam, lam2 in zip(spec.lambda_1, spec.lambda_2):
        den *= (E - lam2) * (cfg.k1 - lam) * (cfg.k2 - lam)
    return num / den


def wavefunction_closed(p: ModelParams, cfg: TwoPhotonConfig, x):
    """Single-mode outgoing wavefunction (centre-of-mass phase dropped).

    Raises:
        NotSingleMode: the system is in the two-mode regime.
        DegenerateJC: the two single-excitation JC eigenvalues coincide.
    """
    p = apply_dissipation(p)
    spec = jc_spectrum(p)
    a1, a2 = amplitudes_closed(p, cfg.k1), amplitudes_closed(p, cfg.k2)
    g_a, g_b = complex(p.g_a), complex(p.g_b)
    if cfg.channel is Channel.REFLECTED:
        amp = a1.R * a2.R
        coupling = g_b.conjugate() ** 2 * g_a**2
    else:
        amp = a1.T * a2.T
        coupling = abs(g_a) ** 4
    pref = channel_prefactor(p, cfg.channel)
    x_arr = np.asarray(x, dtype=float)
    psi = (amp * np.cos(cfg.delta_k * x_arr) - pref * coupling * correlated_profile(spec, cfg, x_arr)) / (2 * math.pi)
    return complex(psi) if psi.ndim == 0 else psi
