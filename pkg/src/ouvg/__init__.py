"""Exact simulation of Variance-Gamma-driven Ornstein-Uhlenbeck processes and energy pricing."""
from .errors import ConfigError, DomainError
from .ou import (
    OUVGParams,
    PathSet,
    TimeGrid,
    full_cumulant,
    gamma_ou_increment,
    increment_cumulant,
    simulate_skeleton,
    stationary_cumulant,
    step_ousvg,
    step_ouvg,
    theoretical_moments,
)
from .sampling import RngStream
from .special_functions import dilog
from .vg import GammaDiffParams, VGParams, to_gamma_difference, vg_char_exponent, vg_cumulant

__version__ = "0.1.0"
