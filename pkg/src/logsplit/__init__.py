"""Splitting Fourier solvers for the logarithmic Schrödinger equation with local energy regularization."""

__version__ = "0.1.0"

from .analytic import GaussonSpec, decay_constant, gausson_field, gausson_value, superpose
from .grid import DomainSpec, Field, norm_h1, norm_l1, norm_l2, norm_linf, sample
from .integrators import EvolveConfig, IntegrationBlowupError, SplitScheme, evolve, flow_A, flow_B, step
from .observables import energy, energy_error, error_norms, mass
from .regularization import Regularization, big_f, f_prime, f_second, f_value

__all__ = [
    "DomainSpec", "Field", "GaussonSpec", "EvolveConfig", "IntegrationBlowupError",
    "Regularization", "SplitScheme", "big_f", "decay_constant", "energy", "energy_error",
    "error_norms", "evolve", "f_prime", "f_second", "f_value", "flow_A", "flow_B",
    "gausson_field", "gausson_value", "mass", "norm_h1", "norm_l1", "norm_l2", "norm_linf",
    "sample", "step", "superpose",
]
