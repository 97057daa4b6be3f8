"""
Linearization of the rotating-frame equations at a relative equilibrium and
its factorization through subspaces invariant under both J and M^-1 D grad U.

Every two-dimensional such subspace contributes a quadratic factor
Q(z) = z^2 + alpha z + beta to the stability polynomial G(z), z = mu^2,
where mu is an eigenvalue of the linearization divided by the rotation rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import linear_sum_assignment

from .equilibria import RelativeEquilibrium
from .exceptions import ConsistencyError, DomainError
from .potentials import Homogeneous, hessian
from .tolerances import BOUNDARY_TOL


class Classification(str, Enum):
    SPECTRALLY_STABLE = "stable"
    UNSTABLE = "unstable"
    BOUNDARY = "boundary"

    def __str__(self):
        return self.value


def symplectic_j(n: int, dtype=float) -> np.ndarray:
    """Block-diagonal J with n copies of K = [[0, 1], [-1, 0]]."""
    K = np.array([[0, 1], [-1, 0]], dtype=dtype)
    J = np.zeros((2 * n, 2 * n), dtype=dtype)
    for i in range(n):
        J[2 * i:2 * i + 2, 2 * i:2 * i + 2] = K
    return J


@dataclass(frozen=True)
class QuadraticFactor:
    """Q(z) = z^2 + alpha z + beta."""

    alpha: float
    beta: float

    @classmethod
    def from_eigenvalues(cls, eta, xi) -> "QuadraticFactor":
        return cls(2 - eta - xi, (1 + eta) * (1 + xi))

    @property
    def discriminant(self) -> float:
        return self.alpha**2 - 4 * self.beta

    def roots(self) -> np.ndarray:
        return np.roots([1.0, float(self.alpha), float(self.beta)]).astype(complex)

    @property
    def real_negative(self) -> bool:
        """Both roots real and negative (strict alpha, beta, non-strict discriminant)."""
        return self.alpha > 0 and self.beta > 0 and self.discriminant >= 0

    def classify(self, tol: float = BOUNDARY_TOL) -> Classification:
        """Spectral classification of this factor alone.

        Roots that are zero or real and negative are stable. A discriminant
        within ``tol`` of zero with otherwise stable signs is a boundary case,
        except for an exact double root (the translation factor).
        """
        scale = max(1.0, abs(float(self.alpha)) ** 2, abs(float(self.beta)))
        if self.alpha < -tol or self.beta < -tol * scale:
            return Classification.UNSTABLE
        disc = self.discriminant
        if disc < -tol * scale:
            return Classification.UNSTABLE
        if abs(disc) <= tol * scale and disc != 0 and self.beta > tol:
            return Classification.BOUNDARY
        return Classification.SPECTRALLY_STABLE


@dataclass(frozen=True, eq=False)
class LinearizationMatrix:
    """S = [[w J, M^-1], [D grad U, w J]] acting on (x, y) deviations."""

    s: np.ndarray
    omega_hat: float

    @property
    def n(self) -> int:
        return self.s.shape[0] // 4

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(np.asarray(self.s, dtype=float))

    def char_poly_asymmetry(self) -> float:
        """Largest odd-degree coefficient of the normalized characteristic polynomial.

        Zero for a Hamiltonian matrix.
        """
        s = np.asarray(self.s, dtype=float) / float(self.omega_hat)
        coeffs = np.poly(s)
        odd = coeffs[1::2]
        return float(np.max(np.abs(odd)) / np.max(np.abs(coeffs)))


@dataclass(frozen=True, eq=False)
class ReducedTriangleMatrix:
    """C = omega^-2 M^-1 D grad U for the Lagrange triangle."""

    c: np.ndarray
    normalization: float
    config_eigenvalue: float = field(default=0.0)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(np.asarray(self.c, dtype=float))


def build_linearization(re: RelativeEquilibrium) -> LinearizationMatrix:
    """Assemble the 4n x 4n linearization at ``re`` with w = +sqrt(omega^2)."""
    n = re.n
    dtype = re.config.coords.dtype
    H = hessian(re.config, re.masses, re.spec)
    w = re.omega_hat
    J = symplectic_j(n, dtype)
    minv = np.zeros((2 * n, 2 * n), dtype=dtype)
    for i, m in enumerate(re.masses.diagonal()):
        minv[i, i] = 1 / m
    S = np.block([[w * J, minv], [H, w * J]])
    return LinearizationMatrix(S, w)


def normalized_hessian(re: RelativeEquilibrium) -> np.ndarray:
    """omega^-2 M^-1 D grad U."""
    H = hessian(re.config, re.masses, re.spec)
    d = re.masses.diagonal()
    return (H / d[:, None]) / re.omegas.omega_sq


def reduced_matrix(re: RelativeEquilibrium, mu: complex) -> np.ndarray:
    """A(mu) = M^-1 D grad U / w^2 + (1 - mu^2) I + 2 mu J.

    Its determinant vanishes exactly at the normalized eigenvalues mu = lambda / |w|.
    """
    n = re.n
    C = np.asarray(normalized_hessian(re), dtype=float)
    return C + (1 - mu * mu) * np.eye(2 * n) + 2 * mu * symplectic_j(n)


def pair_opposites(values: np.ndarray) -> tuple[np.ndarray, float]:
    """Split a spectrum closed under negation into representatives of {mu, -mu}.

    Pairs are matched greedily by nearest distance between v and -w.
    Returns the representatives and the worst pairing error.
    """
    remaining = list(np.asarray(values, dtype=complex))
    reps, worst = [], 0.0
    while remaining:
        v = remaining.pop(0)
        if not remaining:
            reps.append(v)
            worst = max(worst, abs(2 * v))
            break
        dists = [abs(v + w) for w in remaining]
        i = int(np.argmin(dists))
        worst = max(worst, dists[i])
        w = remaining.pop(i)
        reps.append((v - w) / 2)
    return np.array(reps, dtype=complex), worst


@dataclass(frozen=True)
class StabilityPolynomialRoots:
    z: np.ndarray
    pairing_error: float
    ill_conditioned: bool


def stability_polynomial_roots(re: RelativeEquilibrium) -> StabilityPolynomialRoots:
    """The 2n roots of G(z) as squares of ±-paired normalized eigenvalues of S."""
    lin = build_linearization(re)
    mu = lin.eigenvalues() / float(re.omega_hat)
    reps, err = pair_opposites(mu)
    radius = max(1.0, float(np.max(np.abs(mu))))
    return StabilityPolynomialRoots(reps**2, err, err > 1e-8 * radius)


def translation_factor() -> QuadraticFactor:
    """Factor from span{(1,0,...,1,0), (0,1,...,0,1)}: eta = xi = 0, Q = (z+1)^2."""
    return QuadraticFactor.from_eigenvalues(0.0, 0.0)


def config_eigenvalue(re: RelativeEquilibrium) -> float:
    """Eigenvalue of omega^-2 M^-1 D grad U along x: 1 + (a w1^2 + b w2^2)/w^2."""
    om = re.omegas
    exps = re.spec.exponents
    weighted = exps[0] * om.omega1_sq
    if len(exps) > 1:
        weighted = weighted + exps[1] * om.omega2_sq
    return 1 + weighted / om.omega_sq


def configuration_factor(re: RelativeEquilibrium) -> QuadraticFactor:
    """Factor from span{x, Jx}: eta from :func:`config_eigenvalue`, xi = -1, so beta = 0."""
    eta = config_eigenvalue(re)
    return QuadraticFactor(2 - (eta - 1), 0.0)


def _m_gram_schmidt(vectors, d, basis=()):
    """Orthonormalize ``vectors`` in <u, v> = u^T M v against ``basis`` and each other."""
    out = list(basis)
    for v in vectors:
        w = np.array(v, dtype=float)
        for _ in range(2):
            for b in out:
                w = w - (b @ (d * w)) * b
        nrm = np.sqrt(w @ (d * w))
        if nrm > 1e-10 * np.sqrt(v @ (d * v) + 1e-300):
            out.append(w / nrm)
    return out[len(basis):]


@dataclass(frozen=True, eq=False)
class InvariantSubspaces:
    """M-orthonormal bases (as columns) of the three invariant subspaces."""

    translation: np.ndarray
    configuration: np.ndarray
    complement: np.ndarray


def invariant_subspaces(re: RelativeEquilibrium) -> InvariantSubspaces:
    """Translation plane, span{x, Jx}, and their M-orthogonal complement.

    The complement is completed by M-Gram-Schmidt on the coordinate axes;
    for n = 3 it is two-dimensional and also J-invariant.
    """
    n = re.n
    d = np.asarray(re.masses.diagonal(), dtype=float)
    J = symplectic_j(n)
    x = np.asarray(re.config.coords, dtype=float)
    ex = np.tile([1.0, 0.0], n)
    ey = np.tile([0.0, 1.0], n)
    trans = _m_gram_schmidt([ex, ey], d)
    conf = _m_gram_schmidt([x, J @ x], d, trans)
    rest = []
    for i in range(2 * n):
        if len(trans) + len(conf) + len(rest) == 2 * n:
            break
        e = np.zeros(2 * n)
        e[i] = 1.0
        new = _m_gram_schmidt([e], d, trans + conf + rest)
        if new:
            # keep the complement closed under J: add Je alongside e
            rest += new
            rest += _m_gram_schmidt([J @ new[0]], d, trans + conf + rest)
    return InvariantSubspaces(np.column_stack(trans), np.column_stack(conf), np.column_stack(rest))


def restricted_factor(re: RelativeEquilibrium, basis: np.ndarray) -> QuadraticFactor:
    """Quadratic factor from a two-dimensional M-orthonormal invariant subspace.

    eta and xi are the eigenvalues of omega^-2 M^-1 D grad U restricted to the
    subspace; in an M-orthonormal basis the restriction is B^T H B / omega^2.
    """
    if basis.shape[1] != 2:
        raise DomainError(f"need a two-dimensional subspace, got {basis.shape[1]}")
    H = np.asarray(hessian(re.config, re.masses, re.spec), dtype=float)
    R = basis.T @ H @ basis / float(re.omegas.omega_sq)
    R = (R + R.T) / 2
    eta, xi = np.linalg.eigvalsh(R)
    return QuadraticFactor.from_eigenvalues(eta, xi)


def _require_triangle(re):
    if re.n != 3:
        raise DomainError(f"triangle factorization needs n = 3, got n = {re.n}")


def triangle_reduced_matrix(re: RelativeEquilibrium) -> ReducedTriangleMatrix:
    """6x6 matrix omega^-2 M^-1 D grad U assembled from the generic Hessian."""
    _require_triangle(re)
    C = np.asarray(normalized_hessian(re), dtype=float)
    return ReducedTriangleMatrix(C, float(re.omegas.omega_sq), float(config_eigenvalue(re)))


def remaining_factor_closed_form(re: RelativeEquilibrium) -> QuadraticFactor:
    _require_triangle(re)
    f = float(re.masses.sigma2 / re.masses.total**2)
    if isinstance(re.spec, Homogeneous):
        a = re.spec.a
        return QuadraticFactor(2 - a, 0.75 * (a + 2) ** 2 * f)
    a, b = re.spec.a, re.spec.b
    r0 = float(re.side)
    # divide numerator and denominator by r0**(b+2) to keep the powers tame
    s = r0 ** (a - b)
    alpha = -(a * (a - 2) + b * (b - 2) * s) / (a + b * s)
    ratio = (b * (b + 2) * s + a * (a + 2)) / (b * s + a)
    return QuadraticFactor(alpha, 0.75 * f * ratio**2)


def remaining_factor_from_traces(re: RelativeEquilibrium) -> QuadraticFactor:
    """eta + xi and eta xi from Tr C and (Tr(C)^2 - Tr(C^2))/2, given the known
    eigenvalues {0, 0, -1, kappa} with kappa the configuration eigenvalue."""
    red = triangle_reduced_matrix(re)
    C = red.c
    kappa = red.config_eigenvalue
    tr = np.trace(C)
    e2 = 0.5 * (tr**2 - np.trace(C @ C))
    s = tr - (kappa - 1)
    # e2 = e2(known) + (sum known) * s + eta*xi, with e2(known) = -kappa
    p = e2 + kappa - (kappa - 1) * s
    return QuadraticFactor(2 - s, 1 + s + p)


def remaining_factor(re: RelativeEquilibrium, rtol: float = 1e-9) -> QuadraticFactor:
    """Factor of G from the complement of the translation and configuration planes.

    Returned from the closed form after checking it against trace arithmetic on
    the numeric reduced matrix.

    Raises
    ------
    ConsistencyError
        If the two routes differ by more than ``rtol`` (relative, floor 1).
    """
    closed = remaining_factor_closed_form(re)
    traced = remaining_factor_from_traces(re)
    for name in ("alpha", "beta"):
        u, v = getattr(closed, name), getattr(traced, name)
        if abs(u - v) > rtol * max(1.0, abs(u)):
            raise ConsistencyError(f"{name}: closed form {u!r} vs trace identity {v!r}")
    return closed


def factor_eigenvalues(q: QuadraticFactor) -> tuple[complex, complex]:
    """(eta, xi) recovered from alpha = 2 - eta - xi and beta = (1+eta)(1+xi)."""
    s = 2 - q.alpha
    p = q.beta - 1 - s
    r = np.roots([1.0, -s, p]).astype(complex)
    return r[0], r[1]


def classify_by_factors(re: RelativeEquilibrium) -> Classification:
    """Root-sign classification of the three quadratic factors of the triangle."""
    factors = [translation_factor(), configuration_factor(re), remaining_factor(re)]
    labels = [q.classify() for q in factors]
    if Classification.UNSTABLE in labels:
        return Classification.UNSTABLE
    if Classification.BOUNDARY in labels:
        return Classification.BOUNDARY
    return Classification.SPECTRALLY_STABLE


def match_multisets(a, b) -> float:
    """Largest distance in the optimal one-to-one matching of two complex multisets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"sizes differ: {a.shape} vs {b.shape}")
    cost = np.abs(a[:, None] - b[None, :])
    i, j = linear_sum_assignment(cost)
    return float(cost[i, j].max()) if cost.size else 0.0
