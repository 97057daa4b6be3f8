"""
Closed-form stability criteria for the Lagrange triangle.

Homogeneous potential of degree -a: any relative equilibrium with a > 2 is
spectrally unstable; for a < 2 the triangle is stable iff

    f = sigma2 / (m1 + m2 + m3)^2  <=  (1/3) ((2 - a) / (2 + a))^2.

Quasihomogeneous potential with exponents a > b: stable iff the
configuration-plane coefficient alpha is positive and f <= g(a, b, r0), where
r0 is the side of the triangle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from scipy.optimize import bisect

from .exceptions import DomainError
from .linearization import Classification, QuadraticFactor
from .potentials import MassVector
from .tolerances import BOUNDARY_TOL

#: the homogeneous exponent where the stable region changes topology
A_TOPOLOGY = 14 - 8 * math.sqrt(3)


class Criterion(str, Enum):
    THEOREM1 = "Theorem1"  # homogeneous, a > 2
    THEOREM2 = "Theorem2"  # quasihomogeneous, alpha < 0 for every size
    ROUTH = "Routh"
    GENERALIZED_ROUTH = "GeneralizedRouth"
    ALPHA_SIGN = "AlphaSign"  # quasihomogeneous, alpha < 0 at this size only

    def __str__(self):
        return self.value


class Regime(str, Enum):
    """Ordering of the exponents relative to 2."""

    BOTH_BELOW = "0<b<a<2"
    STRADDLE = "b<2<a"
    BOTH_ABOVE = "2<b<a"


@dataclass
class StabilityReport:
    classification: Classification
    criterion: Criterion
    f_value: float
    quadratic: QuadraticFactor
    g_value: Optional[float] = None
    bound: Optional[float] = None
    alpha_config: Optional[float] = None
    critical_radii: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "classification": self.classification.value,
            "criterion": self.criterion.value,
            "f": self.f_value,
            "alpha": float(self.quadratic.alpha),
            "beta": float(self.quadratic.beta),
        }
        if self.bound is not None:
            out["bound"] = self.bound
        if self.g_value is not None:
            out["g"] = self.g_value
        if self.alpha_config is not None:
            out["alpha_config"] = self.alpha_config
        if self.critical_radii:
            out["critical_radii"] = dict(self.critical_radii)
        return out


def mass_function_f(masses) -> float:
    """sigma2 / (sum of masses)^2; lies in (0, 1/3] for three bodies, 1/3 iff equal."""
    mv = MassVector.of(masses)
    return float(mv.sigma2 / mv.total**2)


def routh_bound(a: float) -> float:
    """(1/3) ((2 - a) / (2 + a))^2."""
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    return ((2 - a) / (2 + a)) ** 2 / 3


def _compare(f, g, tol=BOUNDARY_TOL) -> Classification:
    if abs(f - g) <= tol:
        return Classification.BOUNDARY
    return Classification.SPECTRALLY_STABLE if f < g else Classification.UNSTABLE


def classify_homogeneous(masses, a: float) -> StabilityReport:
    """Classify the Lagrange triangle under a homogeneous potential of degree -a."""
    mv = MassVector.of(masses)
    if mv.n != 3:
        raise DomainError(f"the Routh criterion is for three bodies, got {mv.n}")
    f = mass_function_f(mv)
    bound = routh_bound(a)
    quad = QuadraticFactor(2 - a, 0.75 * (a + 2) ** 2 * f)
    if a > 2 + BOUNDARY_TOL:
        return StabilityReport(Classification.UNSTABLE, Criterion.THEOREM1, f, quad,
                               bound=bound, alpha_config=2 - a)
    return StabilityReport(_compare(f, bound), Criterion.ROUTH, f, quad,
                           bound=bound, alpha_config=2 - a)


def _check_ab(a, b):
    if not (a > b > 0):
        raise DomainError(f"need a > b > 0, got a={a}, b={b}")


def _check_r0(r0):
    if not r0 > 0:
        raise DomainError(f"r0 must be positive, got {r0}")


def regime(a: float, b: float) -> Regime:
    """Which exponent ordering applies. a = 2 joins the first regime (alpha > 0
    for every size) and b = 2 the last (alpha < 0 for every size)."""
    _check_ab(a, b)
    if b >= 2:
        return Regime.BOTH_ABOVE
    if a <= 2:
        return Regime.BOTH_BELOW
    return Regime.STRADDLE


def _h(a, b, r0):
    s = r0 ** (a - b)
    return (b * (b - 2) * s + a * (a - 2)) / (b * (b + 2) * s + a * (a + 2))


def g_function(a: float, b: float, r0: float) -> float:
    """Right-hand side of the generalized Routh inequality,

    (1/3) [(b(b-2) r0^(a-b) + a(a-2)) / (b(b+2) r0^(a-b) + a(a+2))]^2.

    Tends to routh_bound(a) as r0 -> 0 and routh_bound(b) as r0 -> inf.
    """
    _check_ab(a, b)
    _check_r0(r0)
    if math.isinf(r0 ** (a - b)):
        return routh_bound(b)
    return _h(a, b, r0) ** 2 / 3


def alpha_sign_condition(a: float, b: float, r0: float) -> float:
    """[(a^2-2a) r0^(b+2) + (b^2-2b) r0^(a+2)] / [a r0^(b+2) + b r0^(a+2)].

    This is minus the configuration-plane alpha; a positive value means the
    triangle is unstable for every choice of masses.
    """
    _check_ab(a, b)
    _check_r0(r0)
    s = r0 ** (a - b)
    if math.isinf(s):
        return b - 2
    return (a * (a - 2) + b * (b - 2) * s) / (a + b * s)


def z_star(a: float, b: float) -> float:
    """Side at which alpha changes sign, [-(a^2-2a)/(b^2-2b)]^(1/(a-b)); needs b < 2 < a."""
    _check_ab(a, b)
    if not (b < 2 < a):
        raise DomainError(f"z* exists only for b < 2 < a, got a={a}, b={b}")
    return (-(a * a - 2 * a) / (b * b - 2 * b)) ** (1 / (a - b))


def _bracket_root(fn, lo, hi, lo_min=1e-9, hi_max=1e9):
    """Root of ``fn`` on r0 > 0 by bisection in log r0.

    The bracket [lo, hi] grows by factors of 10 (never below ``lo_min`` or
    above ``hi_max``) until ``fn`` changes sign; None if it never does.
    """
    lo_min = min(lo, lo_min)
    while True:
        flo, fhi = fn(lo), fn(hi)
        if flo == 0:
            return lo
        if fhi == 0:
            return hi
        if (flo < 0) != (fhi < 0):
            t = bisect(lambda t: fn(math.exp(t)), math.log(lo), math.log(hi),
                       xtol=1e-14, rtol=1e-14, maxiter=500)
            return math.exp(t)
        if lo <= lo_min and hi >= hi_max:
            return None
        lo = max(lo / 10, lo_min)
        hi = min(hi * 10, hi_max)


def solve_critical_radius(f: float, a: float, b: float) -> Optional[float]:
    """Side r0 where g(a, b, r0) = f on the branch that decides stability.

    For 0 < b < a <= 2 this is r0* (g increases from routh_bound(a) to
    routh_bound(b)); for b < 2 < a it is z1* on (z*, inf). Smaller triangles
    are unstable, larger ones stable. Returns None when f is outside the
    range of g on that branch or the root lies outside [1e-9, 1e9].
    """
    _check_ab(a, b)
    if not (0 < f < 1 / 3 + 1e-15):
        raise DomainError(f"f must lie in (0, 1/3], got {f}")
    reg = regime(a, b)
    if reg is Regime.BOTH_ABOVE:
        return None
    if reg is Regime.BOTH_BELOW:
        lo = 1e-6
        if not (routh_bound(a) < f < routh_bound(b)):
            return None
    else:
        lo = z_star(a, b)
        if not (f < routh_bound(b)):
            return None

    hi = max(1e6, lo * 10)
    lo_min = 1e-9 if reg is Regime.BOTH_BELOW else lo
    return _bracket_root(lambda r: g_function(a, b, r) - f, lo, hi, lo_min, max(1e9, hi))


def critical_radius_closed_form(f: float, a: float, b: float) -> Optional[float]:
    """Inverse of g on its stabilizing branch from the Mobius form in s = r0^(a-b).

    On that branch sqrt(3 f) = (a(2-a) + b(2-b) s) / (a(a+2) + b(b+2) s).
    """
    k = math.sqrt(3 * f)
    num = k * a * (a + 2) - a * (2 - a)
    den = b * (2 - b) - k * b * (b + 2)
    if den <= 0:
        return None
    s = num / den
    if s <= 0:
        return None
    return s ** (1 / (a - b))


def classify_quasihomogeneous(masses, a: float, b: float, r0: float) -> StabilityReport:
    """Classify the Lagrange triangle of side r0 under V + W with exponents a > b."""
    mv = MassVector.of(masses)
    if mv.n != 3:
        raise DomainError(f"the generalized Routh criterion is for three bodies, got {mv.n}")
    _check_ab(a, b)
    _check_r0(r0)
    reg = regime(a, b)
    f = mass_function_f(mv)
    g = g_function(a, b, r0)
    minus_alpha = alpha_sign_condition(a, b, r0)
    s = r0 ** (a - b)
    ratio = (b * (b + 2) * s + a * (a + 2)) / (b * s + a) if not math.isinf(s) else b + 2
    quad = QuadraticFactor(-minus_alpha, 0.75 * f * ratio**2)

    radii = {}
    if reg is Regime.STRADDLE:
        radii["z_star"] = z_star(a, b)
        z1 = solve_critical_radius(f, a, b)
        if z1 is not None:
            radii["z1_star"] = z1
    elif reg is Regime.BOTH_BELOW:
        r0s = solve_critical_radius(f, a, b)
        if r0s is not None:
            radii["r0_star"] = r0s

    def report(cls, crit):
        return StabilityReport(cls, crit, f, quad, g_value=g, alpha_config=-minus_alpha,
                               critical_radii=radii)

    if minus_alpha > BOUNDARY_TOL:
        crit = Criterion.THEOREM2 if reg is Regime.BOTH_ABOVE else Criterion.ALPHA_SIGN
        return report(Classification.UNSTABLE, crit)
    # alpha ~ 0 makes g ~ 0, so the comparison below reports instability
    return report(_compare(f, g), Criterion.GENERALIZED_ROUTH)


def region_label(f: float, a: float, b: float) -> str:
    """Size-independent label of a mass triple: 'unstable', 'stable',
    'size_dependent', or 'boundary' on the separating curves."""
    reg = regime(a, b)
    if reg is Regime.BOTH_ABOVE:
        return "unstable"
    upper = routh_bound(b)
    if abs(f - upper) <= BOUNDARY_TOL:
        return "boundary"
    if f > upper:
        return "unstable"
    if reg is Regime.BOTH_BELOW:
        lower = routh_bound(a)
        if abs(f - lower) <= BOUNDARY_TOL:
            return "boundary"
        if f < lower:
            return "stable"
    return "size_dependent"


def critical_mass_ratio(a: float, m3: float = 1e-12) -> float:
    """Ratio m2 / (m1 + m2) in (0, 1/2) where f(m1, m2, m3) meets routh_bound(a).

    With m3 -> 0 this is the restricted-problem threshold, (1 - sqrt(23/27)) / 2
    for a = 1.
    """
    bound = routh_bound(a)

    def fn(mu):
        return mass_function_f([1 - mu, mu, m3]) - bound

    if fn(1e-15) >= 0 or fn(0.5) <= 0:
        raise DomainError(f"no crossing for a={a}, m3={m3}")
    return bisect(fn, 1e-15, 0.5, xtol=1e-16, rtol=1e-15, maxiter=200)
