"""
Homogeneous and quasihomogeneous pair potentials for the planar n-body problem.

The potential function follows the convention ``m_i q_i'' = +dU/dq_i`` with

    U(q) = sum_{i<j} m_i m_j / |q_i - q_j|**a            (homogeneous)
    U(q) = sum_{i<j} m_i m_j (|q_i - q_j|**-a + |q_i - q_j|**-b)   (quasihomogeneous)

so U > 0 and the force is attractive. No gravitational constant appears.

All routines work with plain float arrays and with ``dtype=object`` arrays of
``mpmath.mpf`` numbers; the latter is what the high-precision oracle uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import mpmath
import numpy as np

from .exceptions import CollisionError, DomainError
from .tolerances import COLLISION_DISTANCE


@dataclass(frozen=True, eq=False)
class MassVector:
    """The n positive masses of the bodies."""

    masses: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.masses)
        if m.dtype != object:
            m = m.astype(float)
        if m.ndim != 1 or m.size < 2:
            raise DomainError(f"need at least two masses, got shape {m.shape}")
        if not all(mi > 0 for mi in m):
            raise DomainError(f"masses must be positive, got {list(m)}")
        object.__setattr__(self, "masses", m)

    @classmethod
    def of(cls, values: Union["MassVector", Iterable[float]]) -> "MassVector":
        if isinstance(values, cls):
            return values
        return cls(np.array(list(values)))

    @property
    def n(self) -> int:
        return int(self.masses.size)

    @property
    def total(self):
        return sum(self.masses[1:], self.masses[0])

    @property
    def sigma2(self):
        """Sum of pairwise products, m1m2 + m1m3 + m2m3 for three bodies."""
        m = self.masses
        out = m[0] * 0
        for i in range(m.size):
            for j in range(i + 1, m.size):
                out = out + m[i] * m[j]
        return out

    def diagonal(self) -> np.ndarray:
        """Diagonal of the 2n x 2n mass matrix, (m1, m1, ..., mn, mn)."""
        return np.repeat(self.masses, 2)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"MassVector({[float(m) for m in self.masses]})"


@dataclass(frozen=True, eq=False)
class PlanarConfiguration:
    """Positions of n bodies flattened as (x1, y1, x2, y2, ...)."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords)
        if c.dtype != object:
            c = c.astype(float)
        c = c.reshape(-1)
        if c.size % 2 or c.size < 4:
            raise DomainError(f"coords must hold 2n values with n >= 2, got {c.size}")
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_points(cls, points: Sequence[Sequence[float]]) -> "PlanarConfiguration":
        return cls(np.asarray(points).reshape(-1))

    @property
    def n(self) -> int:
        return self.coords.size // 2

    @property
    def points(self) -> np.ndarray:
        return self.coords.reshape(-1, 2)

    def center_of_mass(self, masses: MassVector) -> np.ndarray:
        m = MassVector.of(masses).masses
        pts = self.points
        return (m[:, None] * pts).sum(axis=0) / m.sum()

    def moment_of_inertia(self, masses: MassVector):
        """x^T M x about the origin."""
        d = MassVector.of(masses).diagonal()
        return (d * self.coords * self.coords).sum()


@dataclass(frozen=True)
class Homogeneous:
    """Potential sum m_i m_j / d_ij**a with a > 0."""

    a: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        if not self.a > 0:
            raise DomainError(f"exponent a must be positive, got {self.a}")

    @property
    def exponents(self) -> tuple:
        return (self.a,)


@dataclass(frozen=True)
class Quasihomogeneous:
    """Sum of two homogeneous potentials with exponents a > b > 0."""

    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not self.b > 0:
            raise DomainError(f"exponent b must be positive, got {self.b}")
        if not self.a > self.b:
            raise DomainError(f"need a > b, got a={self.a}, b={self.b}")

    @property
    def exponents(self) -> tuple:
        return (self.a, self.b)


PotentialSpec = Union[Homogeneous, Quasihomogeneous]


def make_spec(a: float, b: float | None = None) -> PotentialSpec:
    if b is None:
        return Homogeneous(a)
    return Quasihomogeneous(a, b)


def _pairs(config: PlanarConfiguration):
    """Yield (j, k, dx, dy, d) with (dx, dy) = q_k - q_j for j < k."""
    pts = config.points
    for j in range(config.n):
        for k in range(j + 1, config.n):
            dx = pts[k, 0] - pts[j, 0]
            dy = pts[k, 1] - pts[j, 1]
            d = (dx * dx + dy * dy) ** 0.5
            if not d >= COLLISION_DISTANCE:
                raise CollisionError(j, k, d)
            yield j, k, dx, dy, d


def _check(config, masses):
    config = config if isinstance(config, PlanarConfiguration) else PlanarConfiguration(config)
    masses = MassVector.of(masses)
    if masses.n != config.n:
        raise DomainError(f"{masses.n} masses for {config.n} bodies")
    return config, masses


def _exponent(config, exponent):
    # a + 2 must be formed at the working precision, not in double
    return mpmath.mpf(exponent) if config.coords.dtype == object else float(exponent)


def homogeneous_energy(config, masses, exponent):
    """sum_{i<j} m_i m_j / d_ij**exponent."""
    config, masses = _check(config, masses)
    exponent = _exponent(config, exponent)
    m = masses.masses
    total = 0
    for j, k, _, _, d in _pairs(config):
        total = total + m[j] * m[k] / d**exponent
    return total


def homogeneous_gradient(config, masses, exponent) -> np.ndarray:
    config, masses = _check(config, masses)
    exponent = _exponent(config, exponent)
    m = masses.masses
    grad = np.zeros(2 * config.n, dtype=config.coords.dtype)
    for j, k, dx, dy, d in _pairs(config):
        # d/dq_k of d**-p is -p d**-(p+2) (q_k - q_j)
        c = exponent * m[j] * m[k] / d ** (exponent + 2)
        grad[2 * k] -= c * dx
        grad[2 * k + 1] -= c * dy
        grad[2 * j] += c * dx
        grad[2 * j + 1] += c * dy
    return grad


def homogeneous_hessian(config, masses, exponent) -> np.ndarray:
    """Hessian of one homogeneous term, assembled from its 2x2 pair blocks.

    Off-diagonal block (j, k) is p m_j m_k / d**(p+2) [I - (p+2) u u^T] with
    u the unit vector from body j to body k; diagonal blocks are minus the
    sum of the other blocks in their row. The assembly is exactly symmetric.
    """
    config, masses = _check(config, masses)
    exponent = _exponent(config, exponent)
    m = masses.masses
    n = config.n
    H = np.zeros((2 * n, 2 * n), dtype=config.coords.dtype)
    for j, k, dx, dy, d in _pairs(config):
        c = exponent * m[j] * m[k] / d ** (exponent + 2)
        ux, uy = dx / d, dy / d
        q = exponent + 2
        bxx = c * (1 - q * ux * ux)
        byy = c * (1 - q * uy * uy)
        bxy = -c * q * ux * uy
        block = np.array([[bxx, bxy], [bxy, byy]], dtype=H.dtype)
        H[2 * j:2 * j + 2, 2 * k:2 * k + 2] = block
        H[2 * k:2 * k + 2, 2 * j:2 * j + 2] = block
        H[2 * j:2 * j + 2, 2 * j:2 * j + 2] -= block
        H[2 * k:2 * k + 2, 2 * k:2 * k + 2] -= block
    return H


def potential_energy(config, masses, spec: PotentialSpec):
    """Value of the potential function U at a configuration.

    Raises
    ------
    CollisionError
        If two bodies coincide.
    """
    return sum(homogeneous_energy(config, masses, p) for p in spec.exponents)


def gradient(config, masses, spec: PotentialSpec) -> np.ndarray:
    """Euclidean gradient of U in the 2n coordinates."""
    parts = [homogeneous_gradient(config, masses, p) for p in spec.exponents]
    return sum(parts[1:], parts[0])


def hessian(config, masses, spec: PotentialSpec) -> np.ndarray:
    """Symmetric 2n x 2n Hessian of U; for quasihomogeneous specs the sum of both terms."""
    parts = [homogeneous_hessian(config, masses, p) for p in spec.exponents]
    return sum(parts[1:], parts[0])
