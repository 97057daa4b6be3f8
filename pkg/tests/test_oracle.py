import ast
import pathlib

import numpy as np
import pytest

from releq.criteria import critical_mass_ratio
from releq.equilibria import lagrange_triangle
from releq.linearization import Classification, build_linearization
from releq.oracle import (
    REFINE_CEILING,
    AgreementTable,
    Sample,
    agreement_harness,
    full_spectrum,
    z_root_classification,
)
from releq.potentials import Homogeneous, Quasihomogeneous
from releq.sampling import margin, random_samples


def test_newton_equal_masses_unstable(newton_triangle):
    rep = full_spectrum(newton_triangle)
    assert rep.classification is Classification.UNSTABLE
    assert rep.max_real_part > REFINE_CEILING
    assert not rep.refined


def test_small_masses_stable():
    rep = full_spectrum(lagrange_triangle([1, 1e-4, 1e-4], Homogeneous(1)))
    assert rep.classification is Classification.SPECTRALLY_STABLE
    assert rep.max_real_part <= 1e-8


def test_spectrum_symmetric(quasi_triangle):
    rep = full_spectrum(quasi_triangle)
    mu = rep.normalized
    for v in mu:
        assert np.min(np.abs(mu + v)) < 1e-6
        assert np.min(np.abs(mu - np.conj(v))) < 1e-6
    assert rep.residual < 1e-8


def test_refinement_resolves_jordan_splitting():
    re = lagrange_triangle([1, 1e-3, 1e-3], Quasihomogeneous(1.5, 0.5), 1.0)
    rep = full_spectrum(re)
    assert rep.classification is Classification.SPECTRALLY_STABLE


def test_z_roots():
    re = lagrange_triangle([1, 2, 3], Homogeneous(1))
    rep = z_root_classification(re)
    assert rep.z_roots.size == 6
    assert np.sum(np.abs(rep.z_roots + 1) < 1e-6) >= 2
    assert rep.classification is full_spectrum(re).classification


def test_z_root_positive_when_a_above_two():
    rep = z_root_classification(lagrange_triangle([1, 1e-3, 1e-3], Homogeneous(3)))
    assert rep.classification is Classification.UNSTABLE
    real = rep.z_roots[np.abs(rep.z_roots.imag) < 1e-8]
    assert real.real.max() > 0.1


def test_z_root_agrees_with_full_spectrum():
    for s in random_samples(100, seed=3):
        re = lagrange_triangle(s.masses, Quasihomogeneous(s.a, s.b) if s.b else Homogeneous(s.a), s.r0)
        assert z_root_classification(re).classification is full_spectrum(re).classification


def test_spectrum_scale_covariance():
    a = 1.3
    base = lagrange_triangle([1, 2, 3], Homogeneous(a))
    s = 1.9
    big = lagrange_triangle([1, 2, 3], Homogeneous(a), s * base.side)
    l1 = np.sort_complex(build_linearization(base).eigenvalues())
    l2 = np.sort_complex(build_linearization(big).eigenvalues() / s ** (-(a + 2) / 2))
    from releq.linearization import match_multisets

    assert match_multisets(l1, l2) < 1e-6
    assert full_spectrum(base).classification is full_spectrum(big).classification


def test_harness_empty():
    table = agreement_harness([])
    assert isinstance(table, AgreementTable)
    assert len(table) == 0 and table.mismatches == 0


def test_harness_on_boundary_sample():
    mu = critical_mass_ratio(1.0, m3=1e-6)
    s = Sample((1 - mu, mu, 1e-6), 1.0)
    assert margin(s) < 1e-3
    assert s not in random_samples(50, seed=0)
    row = agreement_harness([s]).rows[0]
    assert row.closed_form is Classification.BOUNDARY
    # a double root on the imaginary axis: either side of the band is honest
    assert row.oracle in (Classification.BOUNDARY, Classification.SPECTRALLY_STABLE,
                          Classification.UNSTABLE)


def test_harness_small_batch():
    table = agreement_harness(random_samples(50, seed=7))
    assert table.mismatches == 0


def test_random_samples_deterministic():
    assert random_samples(20, seed=5) == random_samples(20, seed=5)
    assert all(margin(s) > 1e-3 for s in random_samples(50, seed=5))


def test_oracle_independent_of_closed_forms():
    src = pathlib.Path(__import__("releq.oracle").oracle.__file__).read_text()
    tree = ast.parse(src)
    top_level = [n for n in tree.body if isinstance(n, (ast.Import, ast.ImportFrom))]
    names = {n.module for n in top_level if isinstance(n, ast.ImportFrom)}
    assert "criteria" not in names


def test_tolerance_from_environment(monkeypatch):
    re = lagrange_triangle([1, 1e-4, 1e-4], Homogeneous(1))
    monkeypatch.setenv("RELEQ_TOL", "1e-30")
    assert full_spectrum(re).classification is Classification.UNSTABLE
    monkeypatch.delenv("RELEQ_TOL")
    assert full_spectrum(re).classification is Classification.SPECTRALLY_STABLE
