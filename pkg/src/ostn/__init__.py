"""Outage analysis for an overlay satellite-terrestrial IoT network.

Closed-form lower-bound and asymptotic outage probabilities under hybrid
extra-terrestrial plus terrestrial interference, cross-validated against a
Monte Carlo simulation of the raw system equations.
"""

from .fading import NakagamiParams, SRParams, SRUnifiedCoeffs
from .interference import InterferenceConfig, WsCoeffs

__all__ = [
    "NakagamiParams",
    "SRParams",
    "SRUnifiedCoeffs",
    "InterferenceConfig",
    "WsCoeffs",
]

__version__ = "0.1.0"
