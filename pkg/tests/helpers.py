"""Shared random draws and manufactured solutions used across the suite."""

from __future__ import annotations

import numpy as np

from stokesbc import BcSpec, FluidConstants, derive_mode
from stokesbc.halfspace import ModeSolution
from stokesbc.profiles import ScalarModeProfile, VectorModeProfile

# All nine admissible boundary-condition pairs, normal family outermost.
ALL_BCS = tuple(BcSpec(a, b) for b in (0, 1, -1) for a in (0, 1, -1))
# The six pairs whose boundary symbol exists in closed form (beta != -1).
SYMBOL_BCS = tuple(BcSpec(a, b) for b in (0, 1) for a in (0, 1, -1))

STANDARD = FluidConstants(1.0, 1.0, 1.0)


def standard_mode(abs_xi=1.0, lam=0.0):
    return derive_mode(STANDARD, lam, (abs_xi,))


def draw_mode(rng, n_tangential=1):
    """One admissible mode from the standard sweep box.

    log-uniform |xi| in [1e-2, 1e2], lambda on i[0, 1e2], epsilon from
    {1e-2, 1, 1e2}, rho and mu log-uniform in [0.1, 10].
    """
    abs_xi = 10.0 ** rng.uniform(-2.0, 2.0)
    lam = 1j * rng.uniform(0.0, 100.0)
    eps = float(rng.choice([1e-2, 1.0, 1e2]))
    rho = 10.0 ** rng.uniform(-1.0, 1.0)
    mu = 10.0 ** rng.uniform(-1.0, 1.0)
    if n_tangential == 1:
        xi = (abs_xi,)
    else:
        direction = rng.normal(size=n_tangential)
        direction /= np.linalg.norm(direction)
        xi = tuple(abs_xi * direction)
    return derive_mode(FluidConstants(rho, mu, eps), lam, xi)


def complex_amp(rng):
    return complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))


def random_profile(mode, rng, n_terms=3, max_power=1):
    terms = []
    for i in range(n_terms):
        rate = 0.3 + rng.uniform(0.0, 3.0) + 0.8 * i
        power = int(rng.integers(0, max_power + 1))
        terms.append((complex_amp(rng), rate, power))
    return ScalarModeProfile(mode.xi, terms)


def manufacture_solution(mode, bc, rng):
    """A decaying profile trio satisfying the homogeneous tangential row.

    The wall rows are kept consistent by construction: v(0) = 0 for
    alpha = 0, and v'(0) = -alpha i xi w(0) otherwise, which zeroes the
    traction row for alpha = +-1.  A power-1 term in each component
    exercises the polynomial-carrying convolution paths downstream.
    """
    xi = mode.xi[0]
    r1, r2, r3 = 0.4 + rng.uniform(0.0, 2.6, 3) + np.array([0.0, 0.9, 1.7])
    a1, b1, b2, d1 = (complex_amp(rng) for _ in range(4))
    w0 = b1 + b2
    if bc.alpha == 0:
        a2 = -a1
    else:
        a2 = (bc.alpha * 1j * xi * w0 - a1 * r1 + d1) / r2
    v = ScalarModeProfile(mode.xi, [(a1, r1, 0), (a2, r2, 0), (d1, r3, 1)])
    w = ScalarModeProfile(
        mode.xi, [(b1, r1, 0), (b2, r3, 0), (complex_amp(rng), r2, 1)]
    )
    p = ScalarModeProfile(
        mode.xi,
        [(complex_amp(rng), r2, 0), (complex_amp(rng), r3, 0), (complex_amp(rng), r1, 1)],
    )
    return ModeSolution(mode, bc, VectorModeProfile(mode.xi, (v,), w), p)


def solution_sup_gap(a, b, y):
    """sup over y of the velocity/pressure mismatch, relative to a's scale."""
    vel_gap = np.max(np.abs(a.velocity.evaluate(y) - b.velocity.evaluate(y)))
    p_gap = np.max(np.abs(a.pressure(y) - b.pressure(y)))
    scale = max(
        np.max(np.abs(a.velocity.evaluate(y))), np.max(np.abs(a.pressure(y)))
    )
    return max(vel_gap, p_gap) / scale
