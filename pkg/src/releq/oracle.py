"""
Brute-force spectral classification from the full 4n x 4n linearization.

Nothing here uses the closed-form criteria: the spectrum of S is computed with
a dense nonsymmetric eigensolver and classified by the size of real parts.

The zero and drift eigenvalues of every relative equilibrium sit in 2x2
Jordan blocks, so rounding in double precision moves them off the imaginary
axis by about sqrt(eps) ~ 1e-8, which is the size of the tolerance itself.
When the double-precision result falls in that ambiguous band the
equilibrium, Hessian and S are rebuilt with mpmath at ``REFINE_DPS`` digits
and the eigenvalues recomputed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

import mpmath
import numpy as np

from .equilibria import RelativeEquilibrium, lagrange_triangle
from .exceptions import ReleqError
from .linearization import Classification, build_linearization, pair_opposites
from .tolerances import spectral_tol

REFINE_DPS = 30
#: above this normalized real part a double-precision instability is unambiguous
REFINE_CEILING = 1e-5


class EigensolverError(ReleqError):
    def __init__(self, message, condition):
        self.condition = condition
        super().__init__(f"{message} (condition estimate {condition:.3e})")


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    normalized: np.ndarray
    z_roots: np.ndarray
    classification: Classification
    max_real_part: float
    pairing_error: float = 0.0
    refined: bool = False
    residual: float = 0.0


def _margin(mu: np.ndarray) -> float:
    """Largest |Re mu| / max(1, |mu|)."""
    return float(np.max(np.abs(mu.real) / np.maximum(1.0, np.abs(mu))))


def _band(margin: float, tol: float) -> Classification:
    if margin <= tol:
        return Classification.SPECTRALLY_STABLE
    if margin < 10 * tol:
        return Classification.BOUNDARY
    return Classification.UNSTABLE


def _double_spectrum(re):
    lin = build_linearization(re)
    S = np.asarray(lin.s, dtype=float)
    try:
        lam, vecs = np.linalg.eig(S)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc), float(np.linalg.cond(S))) from exc
    if not np.all(np.isfinite(lam)):
        raise EigensolverError("non-finite eigenvalues", float(np.linalg.cond(S)))
    norms = np.linalg.norm(vecs, axis=0)
    res = np.linalg.norm(S @ vecs - vecs * lam, axis=0) / (np.linalg.norm(S, 2) * norms)
    return lam, float(lin.omega_hat), float(res.max())


def _refined_normalized(re) -> Optional[np.ndarray]:
    """Normalized spectrum of a rebuilt high-precision triangle, or None if
    the equilibrium cannot be reconstructed."""
    if re.n != 3:
        return None
    with mpmath.workdps(REFINE_DPS):
        hp = lagrange_triangle(re.masses.masses.astype(float), re.spec, float(re.side),
                               high_precision=True)
        lin = build_linearization(hp)
        S = mpmath.matrix(lin.s.tolist()) / lin.omega_hat
        ev = mpmath.eig(S, left=False, right=False)
        return np.array([complex(v) for v in ev])


def full_spectrum(re: RelativeEquilibrium, tol: Optional[float] = None) -> SpectrumReport:
    """All 4n eigenvalues of S, classified by their real parts.

    Stable when every normalized eigenvalue has |Re mu| <= tol * max(1, |mu|),
    boundary when the worst margin lies in (tol, 10 tol), unstable otherwise.
    """
    tol = spectral_tol() if tol is None else tol
    lam, w, res = _double_spectrum(re)
    mu = lam / w
    margin = _margin(mu)
    refined = False
    if tol < margin < REFINE_CEILING:
        mu_hp = _refined_normalized(re)
        if mu_hp is not None:
            mu, refined = mu_hp, True
            lam = mu * w
            margin = _margin(mu)
    reps, perr = pair_opposites(mu)
    return SpectrumReport(lam, mu, reps**2, _band(margin, tol), margin, perr, refined, res)


def z_root_classification(re: RelativeEquilibrium, tol: Optional[float] = None) -> SpectrumReport:
    """Classify from the roots z = mu^2 of the stability polynomial.

    Stable when every z is zero or real and negative, up to ``tol``.
    """
    tol = spectral_tol() if tol is None else tol
    rep = full_spectrum(re, tol)
    z = rep.z_roots
    scale = np.maximum(1.0, np.abs(z))
    # |Im z| = 2 |Re mu| |Im mu|, so the z-band is twice the mu-band near |mu| = 1
    bad_imag = np.abs(z.imag) / scale
    bad_real = np.maximum(z.real, 0.0) / scale
    zmargin = float(max(np.max(bad_imag) / 2, np.sqrt(np.max(bad_real))))
    out = SpectrumReport(rep.eigenvalues, rep.normalized, z, _band(zmargin, tol),
                         rep.max_real_part, rep.pairing_error, rep.refined, rep.residual)
    return out


@dataclass
class Sample:
    masses: tuple
    a: float
    b: Optional[float] = None
    r0: Optional[float] = None


@dataclass
class AgreementRow:
    sample: Sample
    closed_form: Classification
    oracle: Classification
    max_real_part: float
    refined: bool

    @property
    def match(self) -> bool:
        return self.closed_form == self.oracle


@dataclass
class AgreementTable:
    rows: list = field(default_factory=list)
    runtime: float = 0.0

    @property
    def mismatches(self) -> int:
        return sum(not r.match for r in self.rows)

    def __len__(self):
        return len(self.rows)


def agreement_harness(samples: Iterable[Sample], tol: Optional[float] = None) -> AgreementTable:
    """Compare the closed-form classification with the oracle sample by sample."""
    # imported lazily: the oracle itself never depends on the closed forms
    from .criteria import classify_homogeneous, classify_quasihomogeneous
    from .potentials import make_spec

    start = time.perf_counter()
    table = AgreementTable()
    for s in samples:
        spec = make_spec(s.a, s.b)
        if s.b is None:
            closed = classify_homogeneous(s.masses, s.a).classification
        else:
            closed = classify_quasihomogeneous(s.masses, s.a, s.b, s.r0).classification
        re = lagrange_triangle(s.masses, spec, s.r0)
        rep = full_spectrum(re, tol)
        table.rows.append(AgreementRow(s, closed, rep.classification, rep.max_real_part, rep.refined))
    table.runtime = time.perf_counter() - start
    return table
