"""Photon scattering off a waveguide-coupled whispering-gallery resonator with a two-level atom."""

__version__ = "0.1.0"

from .model import ModelParams, Regime, RegimeTag, apply_dissipation, classify_regime, validate_params  # noqa: E402
from .twophoton import Channel, TwoPhotonConfig  # noqa: E402

__all__ = [
    "Channel",
    "ModelParams",
    "Regime",
    "RegimeTag",
    "TwoPhotonConfig",
    "__version__",
    "apply_dissipation",
    "classify_regime",
    "validate_params",
]
