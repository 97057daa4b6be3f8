"""Reproducible random samples away from the closed-form stability boundaries."""

from __future__ import annotations

import numpy as np

from .criteria import alpha_sign_condition, g_function, mass_function_f, routh_bound
from .oracle import Sample


def _masses(rng) -> tuple:
    if rng.random() < 0.4:
        m = rng.dirichlet([1.0, 1.0, 1.0])
    else:
        small = 10 ** rng.uniform(-4, -0.5, size=2)
        m = rng.permutation(np.array([1.0, *small]))
    return tuple(float(v) for v in m)


def margin(sample: Sample) -> float:
    """Distance of a sample from the nearest closed-form decision boundary."""
    f = mass_function_f(sample.masses)
    if sample.b is None:
        return min(abs(f - routh_bound(sample.a)), abs(sample.a - 2))
    return min(abs(f - g_function(sample.a, sample.b, sample.r0)),
               abs(alpha_sign_condition(sample.a, sample.b, sample.r0)))


def random_samples(count: int, seed: int, min_margin: float = 1e-3,
                   homogeneous_fraction: float = 0.5) -> list:
    """``count`` mixed homogeneous/quasihomogeneous triangle samples with
    margin > ``min_margin``; deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        m = _masses(rng)
        if rng.random() < homogeneous_fraction:
            s = Sample(m, float(rng.uniform(0.05, 3.0)))
        else:
            b = float(rng.uniform(0.05, 2.9))
            a = b + float(rng.uniform(0.05, 2.5))
            r0 = float(10 ** rng.uniform(-1, 1))
            s = Sample(m, a, b, r0)
        if margin(s) > min_margin:
            out.append(s)
    return out
