"""Physical parameters and effective Hamiltonians of the waveguide/resonator/atom system.

All energies are in units of the waveguide-resonator decay rate ``Gamma``.
The single-excitation basis is ``(|e,0,0>, |g,1,0>, |g,0,1>)`` and the
two-excitation basis is ``(|g,2,0>, |e,1,0>, |g,1,1>, |e,0,1>, |g,0,2>)``,
where the two integers are the photon numbers of the clockwise mode ``a``
and the counter-clockwise mode ``b``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

import numpy as np

from .errors import (
    InvalidParams,
    NegativeDissipation,
    NonFiniteValue,
    NonPositiveGamma,
    NotSingleMode,
    ZeroCoupling,
)

DECOUPLING_TOL = 1e-9

REAL_KEYS = ("omega_c", "Omega", "Gamma", "gamma_a", "gamma_c")
COMPLEX_KEYS = ("g_a", "g_b", "h")
PHASE_KEYS = ("phase_VR", "phase_VL")
CANONICAL_ORDER = ("omega_c", "Omega", "Gamma", "g_a", "g_b", "h", "gamma_a", "gamma_c")

BASIS_1 = ("|e,0,0>", "|g,1,0>", "|g,0,1>")
BASIS_2 = ("|g,2,0>", "|e,1,0>", "|g,1,1>", "|e,0,1>", "|g,0,2>")

_SQRT2 = math.sqrt(2.0)

# a^dagger and b^dagger from the single- to the two-excitation subspace
# (rows: BASIS_2, columns: BASIS_1). The annihilators are the transposes.
A_DAG = np.array(
    [
        [0.0, _SQRT2, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0],
    ]
)
B_DAG = np.array(
    [
        [0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 0.0, _SQRT2],
    ]
)
# a^dagger|0> and b^dagger|0> in the single-excitation subspace.
A_DAG_VAC = np.array([0.0, 1.0, 0.0])
B_DAG_VAC = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class ModelParams:
    """Constants of the Hamiltonian in units of Gamma.

    ``omega_c`` and ``Omega`` are real for validated input; after
    :func:`apply_dissipation` they carry the intrinsic losses as negative
    imaginary parts and ``gamma_a``/``gamma_c`` are reset to zero.
    """

    omega_c: complex = 0.0
    Omega: complex = 0.0
    Gamma: float = 1.0
    g_a: complex = 0.0
    g_b: complex = 0.0
    h: complex = 0.0
    gamma_a: float = 0.0
    gamma_c: float = 0.0
    phase_VR: float = 0.0
    phase_VL: float = 0.0

    @property
    def alpha(self) -> complex:
        """Complex frequency of a bare resonator mode, ``omega_c - i Gamma/2``."""
        return self.omega_c - 0.5j * self.Gamma

    @property
    def G_plus(self) -> float:
        return math.hypot(abs(self.g_a), abs(self.g_b))

    @property
    def V_R(self) -> complex:
        return math.sqrt(self.Gamma) * cmath.exp(1j * self.phase_VR)

    @property
    def V_L(self) -> complex:
        return math.sqrt(self.Gamma) * cmath.exp(1j * self.phase_VL)

    @property
    def theta_h(self) -> float:
        return cmath.phase(self.h)

    @property
    def theta_0(self) -> float:
        """Relative phase ``arg(g_b / g_a)``; zero when either coupling vanishes."""
        if self.g_a == 0 or self.g_b == 0:
            return 0.0
        return cmath.phase(self.g_b / self.g_a)

    @property
    def is_dissipation_applied(self) -> bool:
        return self.gamma_a == 0 and self.gamma_c == 0


class RegimeTag(str, enum.Enum):
    SINGLE_MODE = "SingleModeDecoupled"
    TWO_MODE = "TwoMode"


@dataclass(frozen=True)
class Regime:
    """Result of :func:`classify_regime`.

    ``cross_coupling`` is the normalized A-B mixing ``|h g_b^2 - h* g_a^2| / G+^2``.
    ``ratio_gb_over_ga`` and ``ratio_ga_over_gb`` report whether
    ``g_b/g_a = +-exp(-i theta_h)`` and ``g_a/g_b = +-exp(-i theta_h)`` hold;
    only the first coincides with a vanishing cross-coupling.
    """

    tag: RegimeTag
    branch_sign: int = 1
    cross_coupling: float = 0.0
    ratio_gb_over_ga: bool = False
    ratio_ga_over_gb: bool = False

    @property
    def single_mode(self) -> bool:
        return self.tag is RegimeTag.SINGLE_MODE


@dataclass(frozen=True)
class EffectiveHamiltonian:
    dim: int
    entries: np.ndarray = field(repr=False)
    basis_labels: tuple[str, ...]


@dataclass(frozen=True)
class JcTransform:
    omega_A: complex
    omega_B: complex
    G_plus: float


def _real(raw: Mapping[str, Any], key: str, default: float) -> float:
    value = raw.get(key, default)
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise InvalidParams(f"{key}: expected a real number, got {value!r}") from exc
    if not math.isfinite(value):
        raise NonFiniteValue(f"{key} is not finite")
    return value


def _complex(raw: Mapping[str, Any], key: str) -> complex:
    value = raw.get(key, 0.0)
    if isinstance(value, Mapping):
        extra = set(value) - {"mod", "arg"}
        if extra:
            raise InvalidParams(f"{key}: unexpected keys {sorted(extra)}")
        mod = _real(value, "mod", 0.0)
        arg = _real(value, "arg", 0.0)
        if mod < 0:
            raise InvalidParams(f"{key}.mod must be non-negative")
        return cmath.rect(mod, arg)
    try:
        value = complex(value)
    except (TypeError, ValueError) as exc:
        raise InvalidParams(f"{key}: expected a complex number, got {value!r}") from exc
    if not cmath.isfinite(value):
        raise NonFiniteValue(f"{key} is not finite")
    return value


def validate_params(raw: Mapping[str, Any]) -> ModelParams:
    """Build a :class:`ModelParams` from a mapping of raw values.

    Couplings may be given as ``{"mod": r, "arg": phi}`` objects (the JSON
    file format) or as plain complex numbers. Missing keys take their
    defaults (``Gamma = 1``, everything else zero).
    """
    unknown = set(raw) - set(REAL_KEYS + COMPLEX_KEYS + PHASE_KEYS)
    if unknown:
        raise InvalidParams(f"unknown parameter keys: {sorted(unknown)}")

    reals = {k: _real(raw, k, 1.0 if k == "Gamma" else 0.0) for k in REAL_KEYS}
    couplings = {k: _complex(raw, k) for k in COMPLEX_KEYS}
    phases = {k: _real(raw, k, 0.0) for k in PHASE_KEYS}

    if reals["Gamma"] <= 0:
        raise NonPositiveGamma(f"Gamma must be positive, got {reals['Gamma']}")
    for key in ("gamma_a", "gamma_c"):
        if reals[key] < 0:
            raise NegativeDissipation(f"{key} must be non-negative, got {reals[key]}")
    return ModelParams(**reals, **couplings, **phases)


def _canonical_number(x: float) -> float:
    return float(f"{x:.15g}") + 0.0


def params_to_dict(p: ModelParams) -> dict[str, Any]:
    """Serialize to the JSON parameter-file layout (canonical key order)."""
    out: dict[str, Any] = {}
    for key in CANONICAL_ORDER:
        value = getattr(p, key)
        if key in COMPLEX_KEYS:
            value = complex(value)
            out[key] = {
                "mod": _canonical_number(abs(value)),
                "arg": _canonical_number(cmath.phase(value)),
            }
        else:
            if isinstance(value, complex):
                if value.imag != 0:
                    raise InvalidParams(f"{key} is complex and cannot be serialized")
                value = value.real
            out[key] = _canonical_number(value)
    for key in PHASE_KEYS:
        if getattr(p, key) != 0:
            out[key] = _canonical_number(getattr(p, key))
    return out


def apply_dissipation(p: ModelParams) -> ModelParams:
    """Fold intrinsic losses into complex frequencies.

    ``Omega -> Omega - i gamma_a`` and ``omega_c -> omega_c - i gamma_c``.
    The loss rates are zeroed on the result, so applying twice is harmless.
    """
    if p.gamma_a == 0 and p.gamma_c == 0:
        return p
    return replace(
        p,
        Omega=complex(p.Omega) - 1j * p.gamma_a,
        omega_c=complex(p.omega_c) - 1j * p.gamma_c,
        gamma_a=0.0,
        gamma_c=0.0,
    )


def classify_regime(p: ModelParams, tol: float = DECOUPLING_TOL) -> Regime:
    """Decide whether some superposition of the resonator modes decouples from the atom.

    With ``A = (g_a a + g_b b)/G+`` and ``B = (g_b* a - g_a* b)/G+`` the
    intermodal term ``h b^dag a + h.c.`` contributes a diagonal shift
    ``2 Re(h g_a* g_b)/G+^2`` to ``A^dag A`` (and its negative to ``B^dag B``)
    and an A-B mixing ``(h g_b^2 - h* g_a^2)/G+^2``. The system is effectively
    single-mode when the mixing vanishes, or trivially when ``h = 0``.

    Raises:
        ZeroCoupling: ``g_a = g_b = 0`` while ``h != 0``.
    """
    g_a, g_b, h = complex(p.g_a), complex(p.g_b), complex(p.h)
    G2 = abs(g_a) ** 2 + abs(g_b) ** 2

    if h == 0:
        return Regime(RegimeTag.SINGLE_MODE, branch_sign=1, cross_coupling=0.0)
    if G2 == 0:
        raise ZeroCoupling("g_a = g_b = 0 with h != 0: mode transform undefined")

    cross = abs(h * g_b**2 - h.conjugate() * g_a**2) / G2
    phase = cmath.exp(-1j * cmath.phase(h))
    gb_over_ga = g_a != 0 and min(abs(g_b / g_a - phase), abs(g_b / g_a + phase)) < tol
    ga_over_gb = g_b != 0 and min(abs(g_a / g_b - phase), abs(g_a / g_b + phase)) < tol

    equal_moduli = abs(abs(g_a) - abs(g_b)) < tol * max(1.0, math.sqrt(G2))
    if equal_moduli and cross < tol:
        shift = 2.0 * (h * g_a.conjugate() * g_b).real / G2
        sign = 1 if shift >= 0 else -1
        return Regime(RegimeTag.SINGLE_MODE, sign, cross, bool(gb_over_ga), bool(ga_over_gb))
    return Regime(RegimeTag.TWO_MODE, 1, cross, bool(gb_over_ga), bool(ga_over_gb))


def build_heff1(p: ModelParams) -> EffectiveHamiltonian:
    """Single-excitation effective Hamiltonian (3x3, non-Hermitian)."""
    a = p.alpha
    g_a, g_b, h = complex(p.g_a), complex(p.g_b), complex(p.h)
    m = np.array(
        [
            [p.Omega, g_a, g_b],
            [g_a.conjugate(), a, h.conjugate()],
            [g_b.conjugate(), h, a],
        ],
        dtype=complex,
    )
    return EffectiveHamiltonian(3, m, BASIS_1)


def build_heff2(p: ModelParams) -> EffectiveHamiltonian:
    """Two-excitation effective Hamiltonian (5x5, non-Hermitian)."""
    a = p.alpha
    om = p.Omega
    g_a, g_b, h = complex(p.g_a), complex(p.g_b), complex(p.h)
    ga_c, gb_c, h_c = g_a.conjugate(), g_b.conjugate(), h.conjugate()
    s = _SQRT2
    m = np.array(
        [
            [2 * a, s * ga_c, s * h_c, 0, 0],
            [s * g_a, a + om, g_b, h_c, 0],
            [s * h, gb_c, 2 * a, ga_c, s * h_c],
            [0, h, g_a, a + om, s * g_b],
            [0, 0, s * h, s * gb_c, 2 * a],
        ],
        dtype=complex,
    )
    return EffectiveHamiltonian(5, m, BASIS_2)


def jc_transform(p: ModelParams, tol: float = DECOUPLING_TOL) -> JcTransform:
    """Frequencies of the JC mode ``A`` and the free mode ``B``.

    Raises:
        NotSingleMode: the system is in the two-mode regime.
        ZeroCoupling: ``G+ = 0``.
    """
    regime = classify_regime(p, tol)
    if not regime.single_mode:
        raise NotSingleMode(f"cross-coupling {regime.cross_coupling:.3g} does not vanish")
    if p.G_plus == 0:
        raise ZeroCoupling("G+ = 0: the atom is decoupled from both modes")
    shift = regime.branch_sign * abs(p.h)
    return JcTransform(p.alpha + shift, p.alpha - shift, p.G_plus)


def mode_basis_change(p: ModelParams) -> np.ndarray:
    """Columns are ``|e>``, ``A^dag|0>`` and ``B^dag|0>`` in the original single-excitation basis."""
    g_a, g_b = complex(p.g_a), complex(p.g_b)
    G = p.G_plus
    return np.array(
        [
            [1, 0, 0],
            [0, g_a.conjugate() / G, g_b / G],
            [0, g_b.conjugate() / G, -g_a / G],
        ],
        dtype=complex,
    )
