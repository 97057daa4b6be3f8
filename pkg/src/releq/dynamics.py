"""
Nonlinear equations of motion in the uniformly rotating frame,

    x' = w J x + M^-1 y,        y' = grad U(x) + w J y,

integrated with classical fixed-step RK4. Used to confirm that relative
equilibria are fixed points and that measured growth of small deviations
matches the largest real part of the linearized spectrum.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .equilibria import RelativeEquilibrium
from .exceptions import CollisionError, IntegrationError, ReleqError
from .linearization import build_linearization, symplectic_j
from .potentials import MassVector, PotentialSpec, potential_energy
from .tolerances import COLLISION_DISTANCE


class GrowthValidationError(ReleqError):
    """No exponential growth where the linear spectrum predicts it."""


@dataclass(frozen=True)
class PhaseState:
    x: np.ndarray
    y: np.ndarray
    t: float = 0.0

    def vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])


def _force(x: np.ndarray, m: np.ndarray, exponents) -> np.ndarray:
    """Vectorized grad U for float coordinates."""
    pts = x.reshape(-1, 2)
    diff = pts[None, :, :] - pts[:, None, :]  # diff[j, k] = q_k - q_j
    d2 = (diff**2).sum(-1)
    n = len(m)
    iu = ~np.eye(n, dtype=bool)
    d = np.sqrt(d2[iu])
    if d.min(initial=np.inf) < COLLISION_DISTANCE:
        k = int(np.argmin(d))
        j, kk = np.argwhere(iu)[k]
        raise CollisionError(int(j), int(kk), float(d[k]))
    mm = np.outer(m, m)
    coef = np.zeros((n, n))
    for p in exponents:
        c = np.zeros((n, n))
        c[iu] = p * mm[iu] / d ** (p + 2)
        coef += c
    # body j is pulled toward every k
    return (coef[:, :, None] * diff).sum(axis=1).reshape(-1)


class RotatingFrame:
    """Right-hand sides for a fixed mass vector, potential, and rotation rate."""

    def __init__(self, masses, spec: PotentialSpec, omega_hat: float):
        self.masses = MassVector.of(masses)
        self.m = np.asarray(self.masses.masses, dtype=float)
        self.minv = 1.0 / np.repeat(self.m, 2)
        self.exponents = spec.exponents
        self.spec = spec
        self.w = float(omega_hat)
        self.n = len(self.m)

    def _jv(self, v):
        out = np.empty_like(v)
        out[0::2] = v[1::2]
        out[1::2] = -v[0::2]
        return out

    def rhs(self, z: np.ndarray) -> np.ndarray:
        x, y = z[: 2 * self.n], z[2 * self.n:]
        dx = self.w * self._jv(x) + self.minv * y
        dy = _force(x, self.m, self.exponents) + self.w * self._jv(y)
        return np.concatenate([dx, dy])

    def inertial_rhs(self, z: np.ndarray) -> np.ndarray:
        q, p = z[: 2 * self.n], z[2 * self.n:]
        return np.concatenate([self.minv * p, _force(q, self.m, self.exponents)])

    def hamiltonian(self, z: np.ndarray) -> float:
        """1/2 y^T M^-1 y - U(x) - w x^T J y."""
        x, y = z[: 2 * self.n], z[2 * self.n:]
        return float(0.5 * y @ (self.minv * y) - potential_energy(x, self.masses, self.spec)
                     - self.w * x @ self._jv(y))


def rk4_step(f, z, dt):
    k1 = f(z)
    k2 = f(z + 0.5 * dt * k1)
    k3 = f(z + 0.5 * dt * k2)
    k4 = f(z + dt * k3)
    return z + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def vector_field(state: PhaseState, masses, spec: PotentialSpec, omega_hat: float):
    """(x', y') of the rotating-frame equations at ``state``."""
    frame = RotatingFrame(masses, spec, omega_hat)
    dz = frame.rhs(state.vector())
    n2 = 2 * frame.n
    return dz[:n2], dz[n2:]


def equilibrium_state(re: RelativeEquilibrium) -> PhaseState:
    """(x*, y*) with y* = -w M J x*."""
    x = np.asarray(re.config.coords, dtype=float)
    J = symplectic_j(re.n)
    y = -float(re.omega_hat) * np.repeat(np.asarray(re.masses.masses, dtype=float), 2) * (J @ x)
    return PhaseState(x, y, 0.0)


def default_dt(omega_hat: float) -> float:
    """One thousandth of a rotation period."""
    return 2 * math.pi / float(omega_hat) / 1000


def _run(f, z0, dt, steps, t0=0.0, stride=1):
    """RK4 from z0; returns (times, states) sampled every ``stride`` steps.

    Stops early (returning what it has) at a collision.
    """
    z = np.array(z0, dtype=float)
    times, states = [t0], [z.copy()]
    for i in range(1, steps + 1):
        try:
            z = rk4_step(f, z, dt)
        except CollisionError:
            break
        if not np.all(np.isfinite(z)):
            raise IntegrationError(i)
        if i % stride == 0 or i == steps:
            times.append(t0 + i * dt)
            states.append(z.copy())
    return np.array(times), np.array(states)


def integrate(initial: PhaseState, masses, spec: PotentialSpec, omega_hat: float,
              dt: float, steps: int, stride: int = 1) -> list:
    """Fixed-step RK4 trajectory of the rotating-frame system.

    Returns ``steps + 1`` states when ``stride`` is 1; ends early if two
    bodies collide.

    Raises
    ------
    IntegrationError
        If the state becomes non-finite.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    frame = RotatingFrame(masses, spec, omega_hat)
    n2 = 2 * frame.n
    times, states = _run(frame.rhs, initial.vector(), dt, steps, initial.t, stride)
    return [PhaseState(s[:n2], s[n2:], float(t)) for t, s in zip(times, states)]


def integrate_inertial(q0, p0, masses, spec: PotentialSpec, dt: float, steps: int):
    """RK4 in the inertial frame; returns the final (q, p)."""
    frame = RotatingFrame(masses, spec, 0.0)
    _, states = _run(frame.inertial_rhs, np.concatenate([q0, p0]), dt, steps)
    z = states[-1]
    return z[: 2 * frame.n], z[2 * frame.n:]


def rotate(v: np.ndarray, theta: float) -> np.ndarray:
    """Apply R(theta): each pair multiplied by [[cos, sin], [-sin, cos]]."""
    c, s = math.cos(theta), math.sin(theta)
    out = np.empty_like(v)
    out[0::2] = c * v[0::2] + s * v[1::2]
    out[1::2] = -s * v[0::2] + c * v[1::2]
    return out


def _leading_mode(re: RelativeEquilibrium):
    """Eigenvalue of S with the largest real part outside the symmetry modes
    (0 and +-i w), and the real part of its eigenvector."""
    lin = build_linearization(re)
    S = np.asarray(lin.s, dtype=float)
    w = float(lin.omega_hat)
    lam, vecs = np.linalg.eig(S)
    mu = lam / w
    trivial = (np.abs(mu) < 1e-4) | (np.abs(np.abs(mu) - 1) < 1e-4) & (np.abs(mu.real) < 1e-4)
    order = np.lexsort((-np.abs(mu.imag), -np.where(trivial, -np.inf, lam.real)))
    i = order[0]
    v = vecs[:, i]
    # rotate the phase so the real part carries as much of v as possible
    v = v * np.exp(-0.5j * np.angle(v @ v))
    return lam[i], np.real(v)


def _deviation_history(re, perturbation_scale, t_max, stop_at=None):
    frame = RotatingFrame(re.masses, re.spec, re.omega_hat)
    z_eq = equilibrium_state(re).vector()
    lam, v = _leading_mode(re)
    d0 = perturbation_scale * re.scale * v / np.linalg.norm(v)
    dt = default_dt(re.omega_hat)
    steps = int(math.ceil(t_max / dt))
    z = z_eq + d0
    ts, devs = [0.0], [np.linalg.norm(d0)]
    for i in range(1, steps + 1):
        z = rk4_step(frame.rhs, z, dt)
        if not np.all(np.isfinite(z)):
            raise IntegrationError(i)
        dev = np.linalg.norm(z - z_eq)
        ts.append(i * dt)
        devs.append(dev)
        if stop_at is not None and dev >= stop_at:
            break
    return lam, np.array(ts), np.array(devs)


def growth_rate(re: RelativeEquilibrium, perturbation_scale: float = 1e-8,
                horizon: Optional[float] = None) -> float:
    """Measured exponential growth rate of a small deviation.

    The deviation starts along the unstable eigenvector of S with size
    ``perturbation_scale * re.scale``; the rate is the least-squares slope of
    log |deviation| against t while the deviation stays below 1e-3 * scale.

    Raises
    ------
    GrowthValidationError
        If no positive growth is seen.
    """
    limit = 1e-3 * re.scale
    lam, _ = _leading_mode(re)
    if horizon is None:
        sigma = max(float(lam.real), 1e-3 * float(re.omega_hat))
        horizon = 1.5 * math.log(limit / (perturbation_scale * re.scale)) / sigma
    _, ts, devs = _deviation_history(re, perturbation_scale, horizon, stop_at=limit)
    keep = devs < limit
    if keep.sum() < 10:
        raise GrowthValidationError("too few samples in the linear regime")
    slope = np.polyfit(ts[keep], np.log(devs[keep]), 1)[0]
    if not slope > 0:
        raise GrowthValidationError(f"no positive growth (slope {slope:.3e})")
    return float(slope)


def max_deviation_ratio(re: RelativeEquilibrium, perturbation_scale: float = 1e-8,
                        periods: float = 10.0) -> float:
    """max_t |deviation(t)| / |deviation(0)| over ``periods`` rotations,
    starting along the least stable non-symmetry mode."""
    t_max = periods * 2 * math.pi / float(re.omega_hat)
    _, _, devs = _deviation_history(re, perturbation_scale, t_max)
    return float(devs.max() / devs[0])


def trajectory_header(n: int) -> list:
    cols = ["t"]
    for i in range(1, n + 1):
        cols += [f"x{i}", f"y{i}_pos"]
    for i in range(1, n + 1):
        cols += [f"px{i}", f"py{i}"]
    return cols


def write_trajectory_csv(trajectory, path, stride: int = 1) -> None:
    """Rows of t, positions, momenta for every ``stride``-th state."""
    n = trajectory[0].x.size // 2

    def dump(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trajectory_header(n))
        for st in trajectory[::stride]:
            w.writerow([f"{v:.17g}" for v in [st.t, *st.x, *st.y]])

    if hasattr(path, "write"):
        dump(path)
    else:
        with open(path, "w", newline="") as fh:
            dump(fh)
