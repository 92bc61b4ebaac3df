"""Two-photon scattering: correlated kernels, their residues, and outgoing wavefunctions.

Conventions. Two right-moving photons with momenta ``k1 = E/2 + dk`` and
``k2 = E/2 - dk`` scatter into two reflected photons with momenta
``p1 = -(E/2 - dp)``, ``p2 = -(E/2 + dp)`` (kernel ``U``) or two transmitted
photons with ``p1 = E/2 + dp``, ``p2 = E/2 - dp`` (kernel ``W``). Both
kernels are rational in ``dp`` with simple poles at ``+-(E/2 - alpha_l)``,
``alpha_l`` the eigenvalues of the single-excitation effective Hamiltonian;
the apparent real poles at ``dp = +-dk`` cancel in the symmetrized sum.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.integrate
import scipy.ndimage

from .errors import ConvergenceWarning, OnShellPole
from .linalg import eig_general, solve_resolvent, solve_resolvent_batch
from .model import (
    A_DAG,
    A_DAG_VAC,
    B_DAG,
    B_DAG_VAC,
    ModelParams,
    apply_dissipation,
    build_heff1,
    build_heff2,
)
from .onephoton import amplitudes_closed

SINGULAR_RADIUS = 1e-8
SINGULAR_OFFSET = 1e-3
ON_SHELL_TOL = 1e-12

QUAD_WINDOW = 200.0
QUAD_POINTS = 200_001
QUAD_RTOL = 1e-5


class Channel(str, enum.Enum):
    REFLECTED = "R"
    TRANSMITTED = "T"

    @classmethod
    def parse(cls, value: "Channel | str") -> "Channel":
        if isinstance(value, cls):
            return value
        key = str(value).strip().upper()
        aliases = {"R": cls.REFLECTED, "REFLECTED": cls.REFLECTED, "T": cls.TRANSMITTED, "TRANSMITTED": cls.TRANSMITTED}
        if key not in aliases:
            raise ValueError(f"unknown channel {value!r}")
        return aliases[key]


@dataclass(frozen=True)
class TwoPhotonConfig:
    """Incident photon pair: total energy ``E`` and relative momentum ``delta_k``.

    Energies are absolute (``omega_c`` included); the pair is right-moving
    because physical frequencies sit far above the resonance detunings.
    """

    E: float
    delta_k: float = 0.0
    channel: Channel = Channel.REFLECTED

    def __post_init__(self):
        object.__setattr__(self, "channel", Channel.parse(self.channel))

    @property
    def k1(self) -> float:
        return self.E / 2 + self.delta_k

    @property
    def k2(self) -> float:
        return self.E / 2 - self.delta_k


def _channel_ops(channel: Channel) -> tuple[np.ndarray, np.ndarray]:
    """``<0|c`` as a row on the single-excitation space and ``c`` from two to one excitation."""
    if channel is Channel.REFLECTED:
        return B_DAG_VAC, B_DAG.T
    return A_DAG_VAC, A_DAG.T


def _matrix_element(p: ModelParams, channel: Channel, eps: complex, k1: complex, k2: complex) -> complex:
    """One ``F`` term with outgoing energy ``eps`` (``-p1`` when reflected, ``p1`` when transmitted)."""
    if abs(eps - k1) < ON_SHELL_TOL:
        raise OnShellPole(f"outgoing energy {eps} equals incident k1 = {k1}")
    p = apply_dissipation(p)
    H1 = build_heff1(p).entries
    H2 = build_heff2(p).entries
    bra, C = _channel_ops(channel)
    x = solve_resolvent(H1, k2, A_DAG_VAC)
    y = solve_resolvent(H1.T, eps, bra)
    z = solve_resolvent(H2, k1 + k2, A_DAG @ x)
    return complex(y @ C @ z + (y @ A_DAG_VAC) * (bra @ x) / (eps - k1))


def f1(p: ModelParams, p1: complex, p2: complex, k1: complex, k2: complex) -> complex:
    """Reflected-pair matrix element ``F1(p1, p2; k1, k2)``.

    ``<0| b G1(-p1) b G2(k1+k2) a^dag G1(k2) a^dag |0>
    + <0| b G1(-p1) a^dag b G1(k2) a^dag |0> / (-p1 - k1)``
    with ``Gn(z) = (z - H_eff^(n))^{-1}``. ``p2`` enters only through energy
    conservation and is accepted for symmetry of the call signature.
    """
    return _matrix_element(p, Channel.REFLECTED, -p1, k1, k2)


def f2(p: ModelParams, p1: complex, p2: complex, k1: complex, k2: complex) -> complex:
    """Transmitted-pair matrix element ``F2(p1, p2; k1, k2)`` (``a`` replaces ``b``, ``p1`` replaces ``-p1``)."""
    return _matrix_element(p, Channel.TRANSMITTED, p1, k1, k2)


def outgoing_momenta(channel: Channel, E, delta_p):
    if channel is Channel.REFLECTED:
        return -(E / 2 - delta_p), -(E / 2 + delta_p)
    return E / 2 + delta_p, E / 2 - delta_p


def _near_singular(delta_k, delta_p):
    return (np.abs(delta_p - delta_k) < SINGULAR_RADIUS) | (np.abs(delta_p + delta_k) < SINGULAR_RADIUS)


def _removable_limit(fn, delta_p):
    """Limit of ``fn`` at a removable singularity from symmetric samples.

    Richardson-combines the means at offsets ``h`` and ``2h``; smaller offsets
    lose accuracy to cancellation between the individually divergent terms.
    """
    h = SINGULAR_OFFSET
    m1 = 0.5 * (fn(delta_p + h) + fn(delta_p - h))
    m2 = 0.5 * (fn(delta_p + 2 * h) + fn(delta_p - 2 * h))
    return (4 * m1 - m2) / 3


def _symmetrized_scalar(p: ModelParams, cfg: TwoPhotonConfig, delta_p: complex, channel: Channel) -> complex:
    f = f1 if channel is Channel.REFLECTED else f2
    if _near_singular(cfg.delta_k, delta_p):
        return _removable_limit(lambda d: _symmetrized_scalar(p, cfg, d, channel), delta_p)
    q1, q2 = outgoing_momenta(channel, cfg.E, delta_p)
    k1, k2 = cfg.k1, cfg.k2
    return f(p, q1, q2, k1, k2) + f(p, q1, q2, k2, k1) + f(p, q2, q1, k1, k2) + f(p, q2, q1, k2, k1)


def kernel_U(p: ModelParams, cfg: TwoPhotonConfig, delta_p: complex) -> complex:
    """Symmetrized reflected kernel ``U`` at outgoing relative momentum ``delta_p``."""
    return _symmetrized_scalar(p, cfg, delta_p, Channel.REFLECTED)


def kernel_W(p: ModelParams, cfg: TwoPhotonConfig, delta_p: complex) -> complex:
    """Symmetrized transmitted kernel ``W`` at outgoing relative momentum ``delta_p``."""
    return _symmetrized_scalar(p, cfg, delta_p, Channel.TRANSMITTED)


def kernel(p: ModelParams, cfg: TwoPhotonConfig, delta_p: complex) -> complex:
    return _symmetrized_scalar(p, cfg, delta_p, cfg.channel)


def kernel_values(p: ModelParams, channel: Channel | str, E, delta_k, delta_p) -> np.ndarray:
    """Vectorized kernel ``U`` or ``W``; ``E``, ``delta_k`` and ``delta_p`` broadcast together.

    Same algebra as :func:`kernel_U`/:func:`kernel_W`, evaluated with batched
    linear solves instead of one call per matrix element.
    """
    channel = Channel.parse(channel)
    p = apply_dissipation(p)
    E, dk, dp = np.broadcast_arrays(
        np.asarray(E, dtype=complex), np.asarray(delta_k, dtype=complex), np.asarray(delta_p, dtype=complex)
    )
    out = np.empty(E.shape, dtype=complex)
    bad = _near_singular(dk, dp)
    good = ~bad
    if np.any(good):
        out[good] = _kernel_batch(p, channel, E[good], dk[good], dp[good])
    if np.any(bad):
        Eb, dkb = E[bad], dk[bad]
        out[bad] = _removable_limit(lambda d: _kernel_batch(p, channel, Eb, dkb, d), dp[bad])
    return out


def _kernel_batch(p: ModelParams, channel: Channel, E, dk, dp) -> np.ndarray:
    H1 = build_heff1(p).entries
    H2 = build_heff2(p).entries
    bra, C = _channel_ops(channel)
    k1, k2 = E / 2 + dk, E / 2 - dk
    eps1, eps2 = E / 2 - dp, E / 2 + dp

    x1 = solve_resolvent_batch(H1, k1, A_DAG_VAC)
    x2 = solve_resolvent_batch(H1, k2, A_DAG_VAC)
    z1 = solve_resolvent_batch(H2, E, x1 @ A_DAG.T)
    z2 = solve_resolvent_batch(H2, E, x2 @ A_DAG.T)
    r1, r2 = x1 @ bra, x2 @ bra

    total = np.zeros(E.shape, dtype=complex)
    for eps in (eps1, eps2):
        y = solve_resolvent_batch(H1, eps, bra, transpose=True)
        yC = y @ C
        y_in = y @ A_DAG_VAC
        total += np.einsum("...i,...i->...", yC, z2) + y_in * r2 / (eps - k1)
        total += np.einsum("...i,...i->...", yC, z1) + y_in * r1 / (eps - k2)
    return total


@dataclass(frozen=True)
class KernelResidues:
    """Residues of a kernel (as a function of ``delta_p``) at its upper-half-plane poles.

    The kernel is recovered exactly as
    ``sum_l residues[l] * (1/(dp - poles[l]) - 1/(dp + poles[l]))``.
    """

    poles: np.ndarray
    residues: np.ndarray
    eigenvalues: np.ndarray

    def reconstruct(self, delta_p) -> np.ndarray:
        dp = np.asarray(delta_p, dtype=complex)[..., None]
        return np.sum(self.residues * (1 / (dp - self.poles) - 1 / (dp + self.poles)), axis=-1)


class ResidueCalculator:
    """Spectral residue machinery for one parameter set and channel.

    Decomposes both effective Hamiltonians once; residues for any
    ``(E, delta_k)`` then follow from partial fractions of the resolvent chain
    without further linear algebra, so large energy sweeps are cheap.
    """

    def __init__(self, p: ModelParams, channel: Channel | str):
        self.params = apply_dissipation(p)
        self.channel = Channel.parse(channel)
        es1 = eig_general(build_heff1(self.params).entries)
        es2 = eig_general(build_heff2(self.params).entries)
        bra, C = _channel_ops(self.channel)
        r1, l1 = es1.right_vectors, es1.left_vectors
        r2, l2 = es2.right_vectors, es2.left_vectors

        self.alpha = es1.values
        self.beta = es2.values
        out_w = bra @ r1  # <0|c r_l
        in_w = A_DAG_VAC @ l1  # l_m^T a^dag|0>
        # chain[l, n, m] = <0|c P_l c Q_n a^dag P_m a^dag|0>
        left_chain = out_w[:, None] * (l1.T @ C @ r2)
        right_chain = (l2.T @ A_DAG @ r1) * in_w[None, :]
        self._chain = left_chain[:, :, None] * right_chain[None, :, :]
        self._direct = out_w * in_w  # <0|c P_l a^dag|0>

    def _g1_weight(self, k):
        """``<0|c G1(k) a^dag|0>`` via partial fractions."""
        k = np.asarray(k, dtype=complex)[..., None]
        return np.sum(self._direct / (k - self.alpha), axis=-1)

    def residues(self, E, delta_k=0.0) -> np.ndarray:
        """Residues at ``E/2 - alpha_l``; output shape ``broadcast(E, delta_k).shape + (3,)``."""
        E, dk = np.broadcast_arrays(np.asarray(E, dtype=complex), np.asarray(delta_k, dtype=complex))
        k1, k2 = E / 2 + dk, E / 2 - dk
        e2 = 1 / (E[..., None] - self.beta)  # (..., 5)
        total = np.zeros(E.shape + (len(self.alpha),), dtype=complex)
        for kA, kB in ((k1, k2), (k2, k1)):
            g1 = 1 / (kB[..., None] - self.alpha)  # (..., 3)
            chain = np.einsum("lnm,...n,...m->...l", self._chain, e2, g1)
            direct = self._direct * (self._g1_weight(kB)[..., None] / (self.alpha - kA[..., None]))
            total -= chain + direct
        return total

    def poles(self, E) -> np.ndarray:
        return np.asarray(E, dtype=complex)[..., None] / 2 - self.alpha

    def kernel_residues(self, cfg: TwoPhotonConfig) -> KernelResidues:
        return KernelResidues(self.poles(cfg.E), self.residues(cfg.E, cfg.delta_k), self.alpha.copy())


def kernel_residues(p: ModelParams, cfg: TwoPhotonConfig) -> KernelResidues:
    """Residues of ``U`` (reflected) or ``W`` (transmitted) at the poles ``E/2 - alpha_l``."""
    return ResidueCalculator(p, cfg.channel).kernel_residues(cfg)


def channel_prefactor(p: ModelParams, channel: Channel) -> complex:
    if channel is Channel.REFLECTED:
        return p.V_L**2 * p.V_R.conjugate() ** 2
    return abs(p.V_R) ** 4


def background_amplitude(p: ModelParams, cfg: TwoPhotonConfig) -> complex:
    """``R_k1 R_k2`` or ``T_k1 T_k2``."""
    a1 = amplitudes_closed(p, cfg.k1)
    a2 = amplitudes_closed(p, cfg.k2)
    if cfg.channel is Channel.REFLECTED:
        return a1.R * a2.R
    return a1.T * a2.T


@dataclass(frozen=True)
class TwoPhotonWavefunction:
    """Outgoing pair wavefunction in the relative coordinate ``x`` (centre-of-mass phase dropped).

    ``psi(x) = [A cos(dk x) + prefactor/2 * sum_l c_l exp(i p_l |x|)] / (2 pi)``.
    """

    E: float
    k1: float
    k2: float
    channel: Channel
    amplitude: complex
    prefactor: complex
    poles: np.ndarray = field(repr=False)
    residues: np.ndarray = field(repr=False)

    @property
    def delta_k(self) -> float:
        return (self.k1 - self.k2) / 2

    def background(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.amplitude * np.cos(self.delta_k * x) / (2 * math.pi)

    def bound(self, x) -> np.ndarray:
        ax = np.abs(np.asarray(x, dtype=float))[..., None]
        s = np.sum(self.residues * np.exp(1j * self.poles * ax), axis=-1)
        return 0.5 * self.prefactor * s / (2 * math.pi)

    def __call__(self, x) -> np.ndarray:
        return self.background(x) + self.bound(x)


def two_photon_wavefunction(p: ModelParams, cfg: TwoPhotonConfig, calc: ResidueCalculator | None = None) -> TwoPhotonWavefunction:
    p = apply_dissipation(p)
    if calc is None:
        calc = ResidueCalculator(p, cfg.channel)
    kr = calc.kernel_residues(cfg)
    return TwoPhotonWavefunction(
        cfg.E,
        cfg.k1,
        cfg.k2,
        cfg.channel,
        background_amplitude(p, cfg),
        channel_prefactor(p, cfg.channel),
        kr.poles,
        kr.residues,
    )


def wavefunction_residue(p: ModelParams, cfg: TwoPhotonConfig, x):
    """Outgoing wavefunction by the residue theorem; scalar or array ``x``."""
    psi = two_photon_wavefunction(p, cfg)(x)
    return complex(psi) if np.ndim(psi) == 0 else psi


def _trapezoid_integral(p, cfg, x, window, n_points):
    grid = np.linspace(-window, window, n_points)
    values = kernel_values(p, cfg.channel, cfg.E, cfg.delta_k, grid)
    integrand = np.exp(1j * grid * x) * values / (2j * math.pi)
    full = scipy.integrate.trapezoid(integrand, grid)
    coarse = scipy.integrate.trapezoid(integrand[::2], grid[::2])
    return full, coarse


def wavefunction_quadrature(
    p: ModelParams,
    cfg: TwoPhotonConfig,
    x: float,
    window: float = QUAD_WINDOW,
    n_points: int = QUAD_POINTS,
) -> complex:
    """Outgoing wavefunction by direct trapezoid quadrature over ``delta_p`` (test oracle).

    The window is widened to the next multiple of ``pi/x`` so the leading
    ``sin(window x)/window^2`` truncation term of the ``1/dp^2`` tail vanishes.

    Warns:
        ConvergenceWarning: halving the number of points changes the integral
            by more than 1e-5 relative.
    """
    if x <= 0:
        raise ValueError("quadrature oracle requires x > 0")
    p = apply_dissipation(p)
    if n_points % 2 == 0:
        n_points += 1
    step = math.pi / x
    window = math.ceil(window / step) * step
    full, coarse = _trapezoid_integral(p, cfg, x, window, n_points)
    if abs(full - coarse) > QUAD_RTOL * max(abs(full), 1e-300):
        warnings.warn(
            f"quadrature not converged: |I_n - I_n/2| = {abs(full - coarse):.3g}",
            ConvergenceWarning,
            stacklevel=2,
        )
    amp = background_amplitude(p, cfg)
    pref = channel_prefactor(p, cfg.channel)
    return complex((amp * math.cos(cfg.delta_k * x) + 0.5 * pref * full) / (2 * math.pi))


@dataclass(frozen=True)
class FluorescenceMap:
    """Background fluorescence on a ``(delta_k, delta_p)`` lattice; ``values[i, j]`` at ``(dk[i], dp[j])``."""

    E: float
    delta_k: np.ndarray
    delta_p: np.ndarray
    values: np.ndarray

    columns = ("dk", "dp", "B_R")

    def as_columns(self) -> list[np.ndarray]:
        dk, dp = np.meshgrid(self.delta_k, self.delta_p, indexing="ij")
        return [dk.ravel(), dp.ravel(), self.values.ravel()]

    def local_maxima(self, rel_threshold: float = 0.01) -> list[tuple[float, float, float]]:
        """Interior 8-neighbour maxima above ``rel_threshold`` times the global maximum."""
        v = self.values
        neighbours = scipy.ndimage.maximum_filter(v, size=3, mode="constant", cval=-np.inf)
        strict = scipy.ndimage.generic_filter(
            v, lambda w: np.sum(w == w[4]) == 1, size=3, mode="constant", cval=-np.inf
        )
        mask = (v == neighbours) & strict.astype(bool) & (v > rel_threshold * v.max())
        mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = False
        idx = np.argwhere(mask)
        return [(float(self.delta_k[i]), float(self.delta_p[j]), float(v[i, j])) for i, j in idx]


def fluorescence_map(p: ModelParams, E: float, dk_grid, dp_grid) -> FluorescenceMap:
    """Two-photon background fluorescence ``|V_R|^4 |V_L|^4 |U|^2 / (4 pi^2)``."""
    dk_grid = np.asarray(dk_grid, dtype=float)
    dp_grid = np.asarray(dp_grid, dtype=float)
    dk, dp = np.meshgrid(dk_grid, dp_grid, indexing="ij")
    U = kernel_values(p, Channel.REFLECTED, E, dk, dp)
    scale = abs(p.V_R) ** 4 * abs(p.V_L) ** 4 / (4 * math.pi**2)
    return FluorescenceMap(float(E), dk_grid, dp_grid, scale * np.abs(U) ** 2)
