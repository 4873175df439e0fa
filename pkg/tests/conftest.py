"""Shared fixtures and random-draw helpers for the test suite."""

import dataclasses

import numpy as np
import pytest

from cournotlab import (
    DelayConfig,
    MarketParams,
    delay_free_stable,
    epsilon_triple,
    k_factor,
)

# the running example used throughout: four private firms, one public firm
SEC4 = dict(b=1.0, delta=0.4, alpha=1.0, n=4, a0=2.0, a1=2.5)


@pytest.fixture
def sec4():
    return MarketParams(**SEC4)


def sec4_at(alpha):
    return MarketParams(**{**SEC4, "alpha": alpha})


def draw_market(rng, n_max=8, alpha_range=(0.05, 2.0)):
    """Admissible parameters with both positivity assumptions holding.

    a1 >= a0 makes the private-output assumption automatic; the public
    one is kept by sampling a1 below its bound with a 2% margin.
    """
    n = int(rng.integers(1, n_max + 1))
    delta = float(rng.uniform(0.05, 0.95))
    a0 = float(rng.uniform(0.5, 3.0))
    gamma = 2.0 + (n - 1) * delta
    a1_hi = a0 * gamma / (n * delta)
    a1 = float(rng.uniform(a0, min(0.98 * a1_hi, 3.0 * a0))) if a1_hi > a0 else a0
    return MarketParams(
        b=float(rng.uniform(0.5, 2.0)),
        delta=delta,
        alpha=float(rng.uniform(*alpha_range)),
        n=n,
        a0=a0,
        a1=a1,
    )


def draw_stable_market(rng, n_max=8, eps1_margin=1e-3):
    """Parameters strictly inside the zero-delay stability region."""
    while True:
        n = int(rng.integers(1, n_max + 1))
        delta_hi = 0.95 if n == 1 else min(0.95, 1.9 / (n - 1))
        delta = float(rng.uniform(0.05, delta_hi))
        a0 = float(rng.uniform(0.5, 3.0))
        gamma = 2.0 + (n - 1) * delta
        a1_hi = a0 * gamma / (n * delta)
        a1 = float(rng.uniform(a0, min(0.95 * a1_hi, 3.0 * a0))) if a1_hi > a0 else a0
        try:
            p = MarketParams(b=float(rng.uniform(0.5, 2.0)), delta=delta,
                             alpha=1.0, n=n, a0=a0, a1=a1)
            eps = epsilon_triple(p)
        except Exception:
            continue
        eps2, eps0 = eps.eps2, eps.eps0
        if eps2 >= 0.999:
            continue
        bound = (1.0 - eps2 - eps0) / (1.0 - eps2 + eps0)
        alpha_max = (bound + 1.0) / k_factor(p)
        if 0.95 * alpha_max <= 0.05:
            continue
        alpha = float(rng.uniform(0.05, 0.95 * alpha_max))
        p = dataclasses.replace(p, alpha=alpha)
        rep = delay_free_stable(epsilon_triple(p))
        if rep.stable and rep.eps1_margin > eps1_margin:
            return p


def draw_delay_independent_delays(rng, max_delay=12):
    """Random delays with tau2 = 0 or tau0 + tau1 = tau2."""
    if rng.integers(0, 2) == 0:
        return DelayConfig(int(rng.integers(0, max_delay + 1)),
                           int(rng.integers(0, max_delay + 1)), 0)
    t0 = int(rng.integers(0, max_delay + 1))
    t1 = int(rng.integers(0, max_delay + 1 - t0))
    return DelayConfig(t0, t1, t0 + t1)


def pair_nonzero_roots(poly_roots, eigenvalues):
    """Greedy-match each nonzero polynomial root to its closest eigenvalue.

    Returns (max pairing distance, leftover eigenvalue moduli).  Matching
    runs from the polynomial side: the embedded padding produces exact
    zeros whose numerical images smear (defective eigenvalue), so they
    must be left over rather than paired.
    """
    pool = list(np.asarray(eigenvalues, dtype=complex))
    worst = 0.0
    for z in poly_roots:
        if z == 0:
            continue
        dists = [abs(z - w) for w in pool]
        j = int(np.argmin(dists))
        worst = max(worst, dists[j])
        pool.pop(j)
    leftovers = np.abs(np.array(pool)) if pool else np.array([])
    return worst, leftovers
