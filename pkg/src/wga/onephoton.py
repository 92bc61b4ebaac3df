"""Single-photon transmission and reflection amplitudes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergentAmplitude
from .linalg import solve_resolvent
from .model import A_DAG_VAC, B_DAG_VAC, ModelParams, apply_dissipation, build_heff1

DEFAULT_DETUNING_RANGE = (-15.0, 15.0)
DEFAULT_POINTS = 2001


@dataclass(frozen=True)
class OnePhotonAmps:
    k: np.ndarray | float
    T: np.ndarray | complex
    R: np.ndarray | complex


@dataclass(frozen=True)
class Spectrum:
    k: np.ndarray
    T2: np.ndarray
    R2: np.ndarray
    argT: np.ndarray
    argR: np.ndarray

    columns = ("k", "T2", "R2", "argT", "argR")

    def as_columns(self) -> list[np.ndarray]:
        return [self.k, self.T2, self.R2, self.argT, self.argR]


def denominator(p: ModelParams, k):
    """``D(k) = det(k - H_eff)`` for the single-excitation block (dissipation applied)."""
    p = apply_dissipation(p)
    k = np.asarray(k)
    c = k - p.alpha
    g_a, g_b, h = complex(p.g_a), complex(p.g_b), complex(p.h)
    return (
        c * ((k - p.Omega) * c - p.G_plus**2)
        - g_a.conjugate() * g_b * h
        - g_b.conjugate() * g_a * h.conjugate()
        - abs(h) ** 2 * (k - p.Omega)
    )


def amplitudes_closed(p: ModelParams, k) -> OnePhotonAmps:
    """Closed-form ``T_k`` and ``R_k``; ``k`` may be a scalar or an array.

    Raises:
        DivergentAmplitude: ``|D(k)| < 1e-14`` somewhere on ``k``.
    """
    p = apply_dissipation(p)
    k_arr = np.asarray(k, dtype=float)
    g_a, g_b, h = complex(p.g_a), complex(p.g_b), complex(p.h)
    if g_a == 0 and g_b == 0:
        # The atom decouples; cancel its (k - Omega) factor from numerator and D.
        c = k_arr - p.alpha
        D = c**2 - abs(h) ** 2
        if np.any(np.abs(D) < 1e-14):
            raise DivergentAmplitude("D(k) vanishes; parameters are corrupt")
        R = -1j * p.V_L * p.V_R.conjugate() * h / D
        T = 1 - 1j * p.Gamma * c / D
    else:
        D = denominator(p, k_arr)
        if np.any(np.abs(D) < 1e-14):
            raise DivergentAmplitude("D(k) vanishes; parameters are corrupt")
        R = -1j * p.V_L * p.V_R.conjugate() * (g_a * g_b.conjugate() + h * (k_arr - p.Omega)) / D
        T = 1 - 1j * p.Gamma * ((k_arr - p.Omega) * (k_arr - p.alpha) - abs(g_b) ** 2) / D
    if k_arr.ndim == 0:
        return OnePhotonAmps(float(k_arr), complex(T), complex(R))
    return OnePhotonAmps(k_arr, T, R)


def amplitudes_resolvent(p: ModelParams, k: float) -> OnePhotonAmps:
    """``T`` and ``R`` from matrix elements of ``(k - H_eff)^{-1}`` between ``a^dag|0>`` and ``a^dag|0>``/``b^dag|0>``."""
    p = apply_dissipation(p)
    H = build_heff1(p).entries
    if p.g_a == 0 and p.g_b == 0:
        # Decoupled atom: solve in the resonator block only.
        w = np.zeros(3, dtype=complex)
        w[1:] = solve_resolvent(H[1:, 1:], k, A_DAG_VAC[1:])
    else:
        w = solve_resolvent(H, k, A_DAG_VAC)
    T = 1 - 1j * abs(p.V_R) ** 2 * (A_DAG_VAC @ w)
    R = -1j * p.V_L * p.V_R.conjugate() * (B_DAG_VAC @ w)
    return OnePhotonAmps(float(k), complex(T), complex(R))


def default_k_grid(p: ModelParams, points: int = DEFAULT_POINTS) -> np.ndarray:
    lo, hi = DEFAULT_DETUNING_RANGE
    return np.real(p.omega_c) + np.linspace(lo, hi, points)


def spectrum_scan(p: ModelParams, k_grid) -> Spectrum:
    """Transmission/reflection probabilities and phases on ``k_grid`` (in grid order)."""
    k_grid = np.asarray(k_grid, dtype=float)
    amps = amplitudes_closed(p, k_grid)
    T, R = np.atleast_1d(amps.T), np.atleast_1d(amps.R)
    return Spectrum(
        np.atleast_1d(k_grid),
        np.abs(T) ** 2,
        np.abs(R) ** 2,
        np.angle(T),
        np.angle(R),
    )
