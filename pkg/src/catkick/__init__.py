"""Conditional single-photon optomechanics at desk scale.

Closed-form conditional states, count rates, entanglement and Wigner
negativity of conditionally driven optomechanical cavities, with a direct
no-jump integrator as ground truth.  See the README for the CLI.
"""

from .model import BathCheck, DerivedParams, MZParams, ModelParams, bath_validity, derive

__all__ = [
    "BathCheck",
    "DerivedParams",
    "MZParams",
    "ModelParams",
    "bath_validity",
    "derive",
]
