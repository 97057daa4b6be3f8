"""
Lagrange equilateral-triangle relative equilibria and their angular velocities.

A configuration x is a relative equilibrium when grad U(x) + omega^2 M x = 0.
For three bodies the equilateral triangle with its center of mass at the
origin is one for every choice of masses, simultaneously for each
homogeneous term of the potential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .exceptions import DomainError
from .potentials import (
    Homogeneous,
    MassVector,
    PlanarConfiguration,
    PotentialSpec,
    gradient,
    homogeneous_energy,
)

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class AngularVelocitySet:
    """Squared angular velocities of the a-term, the b-term, and their sum."""

    omega1_sq: float
    omega2_sq: float
    omega_sq: float

    @property
    def omega_hat(self):
        """Rotation rate of the frame; the positive root is used."""
        return self.omega_sq**0.5


@dataclass(frozen=True, eq=False)
class RelativeEquilibrium:
    config: PlanarConfiguration
    masses: MassVector
    spec: PotentialSpec
    omegas: AngularVelocitySet
    side: float

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def omega_hat(self):
        return self.omegas.omega_hat

    @property
    def scale(self) -> float:
        """Characteristic length: the largest distance of a body from the origin."""
        return float(max(abs(float(c)) for c in self.config.coords))

    def residual(self):
        return residual(self.config, self.masses, self.spec, self.omegas.omega_sq)


def angular_velocities(config, masses, spec: PotentialSpec) -> AngularVelocitySet:
    """omega_1^2 = a V / (x^T M x) and omega_2^2 = b W / (x^T M x).

    Only meaningful when ``config`` is a relative equilibrium of each
    homogeneous term separately (true for the Lagrange triangle).
    """
    config = config if isinstance(config, PlanarConfiguration) else PlanarConfiguration(config)
    masses = MassVector.of(masses)
    inertia = config.moment_of_inertia(masses)
    parts = [p * homogeneous_energy(config, masses, p) / inertia for p in spec.exponents]
    w1 = parts[0]
    w2 = parts[1] if len(parts) > 1 else w1 * 0
    return AngularVelocitySet(w1, w2, w1 + w2)


def residual(config, masses, spec: PotentialSpec, omega_sq) -> float:
    """Euclidean norm of grad U(x) + omega^2 M x."""
    config = config if isinstance(config, PlanarConfiguration) else PlanarConfiguration(config)
    masses = MassVector.of(masses)
    r = gradient(config, masses, spec) + omega_sq * masses.diagonal() * config.coords
    return sum(v * v for v in r) ** 0.5


def triangle_vertices(r, sqrt3) -> list:
    """Unrecentered vertices (r, 0), (-r/2, r sqrt3/2), (-r/2, -r sqrt3/2)."""
    return [[r, 0 * r], [-r / 2, r * sqrt3 / 2], [-r / 2, -r * sqrt3 / 2]]


def lagrange_triangle(masses, spec: PotentialSpec, side=None, *, high_precision=False) -> RelativeEquilibrium:
    """Equilateral triangle relative equilibrium with mutual distance ``side``.

    Parameters
    ----------
    masses : MassVector or sequence of 3 floats
    spec : Homogeneous or Quasihomogeneous
    side : float, optional
        Mutual distance r0 between the bodies. Defaults to sqrt(3) for a
        homogeneous potential (the size does not affect its stability) and is
        required for a quasihomogeneous one.
    high_precision : bool
        Build the configuration from ``mpmath.mpf`` numbers at the current
        ``mpmath.mp.dps``. Used by the oracle.

    Returns
    -------
    RelativeEquilibrium
        Vertices labelled as above, translated so the center of mass is at the
        origin, with angular velocities from :func:`angular_velocities`.
    """
    masses = MassVector.of(masses)
    if masses.n != 3:
        raise DomainError(f"the Lagrange triangle needs exactly 3 masses, got {masses.n}")
    if side is None:
        if not isinstance(spec, Homogeneous):
            raise DomainError("a quasihomogeneous triangle needs an explicit side length")
        side = SQRT3
    if not side > 0:
        raise DomainError(f"side must be positive, got {side}")

    if high_precision:
        m = np.array([mpmath.mpf(float(v)) for v in masses.masses], dtype=object)
        sqrt3 = mpmath.sqrt(3)
        # the default side is exactly sqrt(3), not its double rounding
        r0 = sqrt3 if side == SQRT3 else mpmath.mpf(float(side))
        pts = np.array(triangle_vertices(r0 / sqrt3, sqrt3), dtype=object)
    else:
        m = masses.masses
        r0 = float(side)
        pts = np.array(triangle_vertices(r0 / SQRT3, SQRT3), dtype=float)

    c = (m[:, None] * pts).sum(axis=0) / m.sum()
    pts = pts - c
    mv = MassVector(m)
    config = PlanarConfiguration(pts.reshape(-1))
    omegas = angular_velocities(config, mv, spec)
    return RelativeEquilibrium(config, mv, spec, omegas, r0)
