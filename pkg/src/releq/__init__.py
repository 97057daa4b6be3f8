"""Spectral stability of relative equilibria of the planar n-body problem
for homogeneous and quasihomogeneous potentials."""

from .criteria import (
    Criterion,
    StabilityReport,
    alpha_sign_condition,
    classify_homogeneous,
    classify_quasihomogeneous,
    g_function,
    mass_function_f,
    routh_bound,
    solve_critical_radius,
    z_star,
)
from .equilibria import AngularVelocitySet, RelativeEquilibrium, angular_velocities, lagrange_triangle
from .linearization import Classification, QuadraticFactor
from .oracle import full_spectrum, z_root_classification
from .potentials import Homogeneous, MassVector, PlanarConfiguration, Quasihomogeneous

__version__ = "0.1.0"
