"""Radial solutions of the Kirchhoff equation built by rescaling scalar-field bound states."""
from .errors import KatlasError
from .groundstate import BoundState, RadialProfile, ShootingConfig, find_bound_state
from .kirchhoff import KirchhoffSolution, SolutionAtlas, build_atlas, continuum_family, lift
from .nonlinearity import PowerNonlinearity, check_berestycki_lions
from .rescale import Branch, KirchhoffParams

__all__ = [
    "BoundState", "Branch", "KatlasError", "KirchhoffParams", "KirchhoffSolution", "PowerNonlinearity",
    "RadialProfile", "ShootingConfig", "SolutionAtlas", "build_atlas", "check_berestycki_lions",
    "continuum_family", "find_bound_state", "lift",
]
__version__ = "0.1.0"
