"""Homoclinic-tangle analysis for the asymmetrically forced damped Duffing oscillator."""

from .chaos import LyapunovConfig, LyapunovReport
from .dynamics import EnergyBranch, Params, PhaseState
from .integrate import IntegratorConfig
from .melnikov import Region, Side
from .smf import Pair, SecondaryBifurcation, StructuralIndexSet

__all__ = [
    "EnergyBranch",
    "IntegratorConfig",
    "LyapunovConfig",
    "LyapunovReport",
    "Pair",
    "Params",
    "PhaseState",
    "Region",
    "SecondaryBifurcation",
    "Side",
    "StructuralIndexSet",
]

__version__ = "0.1.0"
