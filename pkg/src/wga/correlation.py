"""Second-order correlation functions of the outgoing photon pair."""

from __future__ import annotations

import cmath
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
import scipy.signal

from .errors import VanishingBackground
from .model import ModelParams, apply_dissipation
from .onephoton import amplitudes_closed
from .twophoton import (
    Channel,
    ResidueCalculator,
    TwoPhotonConfig,
    channel_prefactor,
    two_photon_wavefunction,
)

BACKGROUND_NORMALIZED = "BackgroundNormalized"
BACKGROUND_FLOOR = 1e-12
DEFAULT_TAU_MAX = 5.0
DEFAULT_TAU_POINTS = 501
PROMINENCE = 0.01


@dataclass(frozen=True)
class CorrelationTrace:
    """``g2(tau) = |psi(tau)|^2 / |psi_background(tau)|^2`` on a delay grid (units of 1/Gamma).

    The plane-wave pair has a non-decaying background, so the textbook
    normalization by the single-photon density diverges; dividing by the
    uncorrelated background at the same delay gives ``g2 -> 1`` at large delay.
    """

    channel: Channel
    E: float
    delta_k: float
    tau: np.ndarray = field(repr=False)
    g2: np.ndarray = field(repr=False)
    normalization: str = BACKGROUND_NORMALIZED

    columns = ("tau", "g2")

    def as_columns(self) -> list[np.ndarray]:
        return [self.tau, self.g2]


def default_tau_grid(tau_max: float = DEFAULT_TAU_MAX, points: int = DEFAULT_TAU_POINTS) -> np.ndarray:
    return np.linspace(0.0, tau_max, points)


def g2_trace(p: ModelParams, cfg: TwoPhotonConfig, tau_grid: Iterable[float] | None = None) -> CorrelationTrace:
    """Correlation trace from the residue-theorem wavefunction.

    Raises:
        VanishingBackground: ``|A_k1 A_k2|`` is below 1e-12, so the normalization is undefined.
    """
    tau = default_tau_grid() if tau_grid is None else np.asarray(tau_grid, dtype=float)
    wf = two_photon_wavefunction(p, cfg)
    if abs(wf.amplitude) < BACKGROUND_FLOOR:
        raise VanishingBackground(f"background amplitude {abs(wf.amplitude):.3g} underflows")
    with np.errstate(divide="ignore", invalid="ignore"):
        g2 = np.abs(wf(tau)) ** 2 / np.abs(wf.background(tau)) ** 2
    return CorrelationTrace(cfg.channel, cfg.E, cfg.delta_k, tau, g2)


def g2_zero(p: ModelParams, E, channel: Channel | str = Channel.REFLECTED, calc: ResidueCalculator | None = None):
    """``g2(0)`` for equal-energy pairs (``delta_k = 0``) at total energies ``E``.

    Entries whose background amplitude underflows come back as ``nan``.
    """
    channel = Channel.parse(channel)
    p = apply_dissipation(p)
    if calc is None:
        calc = ResidueCalculator(p, channel)
    E = np.asarray(E, dtype=float)
    amps = amplitudes_closed(p, E / 2)
    single = amps.R if channel is Channel.REFLECTED else amps.T
    background = np.asarray(single) ** 2
    correlated = 0.5 * channel_prefactor(p, channel) * np.sum(calc.residues(E), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        g2 = np.abs(background + correlated) ** 2 / np.abs(background) ** 2
    g2 = np.where(np.abs(background) < BACKGROUND_FLOOR, np.nan, g2)
    return float(g2) if g2.ndim == 0 else g2


def with_relative_phase(p: ModelParams, theta0: float) -> ModelParams:
    """Set ``arg(g_b/g_a) = theta0`` keeping ``|g_b|`` and ``g_a``."""
    g_a = complex(p.g_a)
    unit = g_a / abs(g_a) if g_a != 0 else 1.0
    return replace(p, g_b=abs(p.g_b) * cmath.exp(1j * theta0) * unit)


@dataclass(frozen=True)
class G2ZeroMap:
    """``ln g2_R(0)`` over ``(E/2, theta0)``; ``ln_g2[i, j]`` at ``(E_half[i], theta0[j])``."""

    E_half: np.ndarray
    theta0: np.ndarray
    ln_g2: np.ndarray
    flag: np.ndarray
    contour: list[tuple[float, float]]

    columns = ("E_half", "theta0", "ln_g2_0", "flag")

    def as_columns(self) -> list[np.ndarray]:
        e, t = np.meshgrid(self.E_half, self.theta0, indexing="ij")
        return [e.ravel(), t.ravel(), self.ln_g2.ravel(), self.flag.ravel().astype(int)]


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("WGA_THREADS", "1")))
    except ValueError:
        return 1


def unit_contour(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> list[tuple[float, float]]:
    """Points where ``z[i, j]`` (on ``x[i], y[j]``) crosses zero, by linear interpolation along both axes."""
    pts: list[tuple[float, float]] = []
    for i in range(len(x)):
        for j in range(len(y)):
            if i + 1 < len(x):
                a, b = z[i, j], z[i + 1, j]
                if np.isfinite(a) and np.isfinite(b) and a * b < 0:
                    t = a / (a - b)
                    pts.append((float(x[i] + t * (x[i + 1] - x[i])), float(y[j])))
            if j + 1 < len(y):
                a, b = z[i, j], z[i, j + 1]
                if np.isfinite(a) and np.isfinite(b) and a * b < 0:
                    t = a / (a - b)
                    pts.append((float(x[i]), float(y[j] + t * (y[j + 1] - y[j]))))
    return pts


def g2_zero_map(p_base: ModelParams, E_half_grid: Sequence[float], theta0_grid: Sequence[float]) -> G2ZeroMap:
    """``ln g2_R(0)`` for equal-energy reflected pairs over incident energy and relative coupling phase.

    ``E_half_grid`` holds absolute single-photon energies ``E/2``. Cells with
    a vanishing reflection background are flagged and hold ``nan``.
    """
    E_half = np.asarray(E_half_grid, dtype=float)
    theta0 = np.asarray(theta0_grid, dtype=float)

    def column(th: float) -> np.ndarray:
        return g2_zero(with_relative_phase(p_base, th), 2 * E_half, Channel.REFLECTED)

    workers = min(_worker_count(), max(1, len(theta0)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cols = list(pool.map(column, theta0))
    else:
        cols = [column(th) for th in theta0]
    g2 = np.stack(cols, axis=1) if cols else np.empty((len(E_half), 0))
    flag = ~np.isfinite(g2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ln_g2 = np.where(flag, np.nan, np.log(g2))
    return G2ZeroMap(E_half, theta0, ln_g2, flag, unit_contour(E_half, theta0, ln_g2))


@dataclass(frozen=True)
class Extremum:
    location: float
    value: float
    kind: str  # "max" or "min"


def find_extrema(x: Sequence[float], y: Sequence[float], prominence: float = PROMINENCE) -> list[Extremum]:
    """Interior local maxima and minima of ``y(x)`` with at least the given prominence, sorted by ``x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = []
    for sign, kind in ((1.0, "max"), (-1.0, "min")):
        idx, _ = scipy.signal.find_peaks(sign * y, prominence=prominence)
        out.extend(Extremum(float(x[i]), float(y[i]), kind) for i in idx)
    return sorted(out, key=lambda e: e.location)


def maxima(x, y, prominence: float = PROMINENCE) -> list[Extremum]:
    return [e for e in find_extrema(x, y, prominence) if e.kind == "max"]
