"""Shared fixtures and independent oracles.

The oracles deliberately avoid the code paths under test: extended
precision (mpmath) for special functions, adaptive quadrature for the
integral definitions, first-integral quadrature for the radial profile,
and an exhaustive discrete Gibbs sum for the Metropolis sampler.
"""

import math

import mpmath
import numpy as np
import pytest

mpmath.mp.dps = 40


# ---------------------------------------------------------------------------
# special function oracles

def besselk_scaled_oracle(m: int, t: float) -> float:
    """e^t K_m(t) in 40-digit arithmetic."""
    with mpmath.workdps(40):
        return float(mpmath.exp(t) * mpmath.besselk(m, t))


def theta_integral_oracle(k: int, x: float) -> float:
    """Direct quadrature of the defining even integral of Theta_k."""
    with mpmath.workdps(30):
        f = lambda t: x**k * mpmath.exp(-k * t * t) / (1 - x * x * mpmath.exp(-2 * t * t))
        val = 2 * mpmath.quad(f, [0, mpmath.inf])
        return float(mpmath.sqrt(2 / mpmath.pi) * val)


def polylog_half_oracle(x: float) -> float:
    with mpmath.workdps(40):
        return float(mpmath.polylog(mpmath.mpf(1) / 2, x))


def erfc_integral_oracle(x: float) -> float:
    """Adaptive quadrature of (2/sqrt(pi)) int_x^inf e^{-s^2} ds."""
    with mpmath.workdps(30):
        val = mpmath.quad(lambda s: mpmath.exp(-s * s), [x, mpmath.inf])
        return float(2 / mpmath.sqrt(mpmath.pi) * val)


# ---------------------------------------------------------------------------
# radial profile oracles

def _bulk_w(u: float, k: float = 2.0) -> float:
    s = u * u
    return k * s - 2.0 * s * s + s * s * s


def profile_oracle(s_values, rtol: float = 1e-12):
    """Flat-interface profile by quadrature of the first integral.

    The screened profile with u(0)=1, u(inf)=0 satisfies
    u'' = W'(u)/4 and hence u' = -sqrt(W(u)/2); the arc length to reach
    height u is s(u) = int_u^1 dv / sqrt(W(v)/2). Inverted by bisection.
    Independent of any closed form.
    """
    from scipy.integrate import quad
    from scipy.optimize import brentq

    def arc(u):
        val, _ = quad(lambda v: 1.0 / math.sqrt(_bulk_w(v) / 2.0), u, 1.0,
                      epsabs=1e-14, epsrel=1e-13, limit=400)
        return val

    out = []
    for s in np.atleast_1d(s_values):
        if s <= 0:
            out.append(1.0)
            continue
        # u decays like e^{-s}; bracket generously
        lo, hi = math.exp(-s) * 1e-3, 1.0 - 1e-15
        out.append(brentq(lambda u: arc(u) - s, lo, hi, xtol=1e-15, rtol=8.9e-16))
    return np.array(out)


def curved_profile_oracle(radius: float, s_max: float = 30.0, n: int = 4000):
    """Radial minimizer outside a disk of the given (blown-up) radius.

    Solves w'' + w'/rho = W'(w)/4 on [radius, radius + s_max] with
    w(radius) = 1 and decay at the far end, via a collocation BVP
    solver started from the flat-interface profile. Returns (s, w(s))
    with s the distance from the disk surface.
    """
    from scipy.integrate import solve_bvp

    def rhs(rho, y):
        u, up = y
        s = u * u
        wprime = (2.0 * 2.0 * u + -8.0 * s * u + 6.0 * s * s * u)
        return np.vstack([up, 0.25 * wprime - up / rho])

    def bc(ya, yb):
        return np.array([ya[0] - 1.0, yb[0]])

    rho = np.linspace(radius, radius + s_max, n)
    guess = np.vstack([np.exp(-(rho - radius)), -np.exp(-(rho - radius))])
    sol = solve_bvp(rhs, bc, rho, guess, tol=1e-10, max_nodes=200000)
    assert sol.status == 0, sol.message
    s = np.linspace(0, s_max, n)
    return s, sol.sol(radius + s)[0]


# ---------------------------------------------------------------------------
# discrete Gibbs oracle for the Metropolis sampler

def gibbs_pair_distance_hist(side: int, half_width: float, temperature: float,
                             epsilon_sq: float, bin_edges: np.ndarray):
    """Exact pair-distance histogram of three hard repulsive disks.

    Degree-1 particles (angle-independent repulsion exp(-gap/eps^2))
    on a side x side grid of positions in the square of the given
    half-width. Sums Boltzmann weights over all (side^2)^3 placements
    and returns the normalized histogram of the three pair distances.
    """
    xs = np.linspace(-half_width, half_width, side)
    px, py = np.meshgrid(xs, xs, indexing="ij")
    pos = np.column_stack([px.ravel(), py.ravel()])  # (S, 2)
    S = len(pos)
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    v = np.where(dist > 2.0, np.exp(-np.maximum(dist - 2.0, 0.0) / epsilon_sq), np.inf)
    np.fill_diagonal(v, np.inf)

    # weights w[a,b,c] = exp(-(V_ab+V_ac+V_bc)/T)
    e_ab = v[:, :, None]
    e_ac = v[:, None, :]
    e_bc = v[None, :, :]
    total = e_ab + e_ac + e_bc
    w = np.exp(-total / temperature)
    w[~np.isfinite(total)] = 0.0

    hist = np.zeros(len(bin_edges) - 1)
    d_ab = np.broadcast_to(dist[:, :, None], (S, S, S))
    d_ac = np.broadcast_to(dist[:, None, :], (S, S, S))
    d_bc = np.broadcast_to(dist[None, :, :], (S, S, S))
    for d in (d_ab, d_ac, d_bc):
        h, _ = np.histogram(d.ravel(), bins=bin_edges, weights=w.ravel())
        hist += h
    norm = hist.sum()
    assert norm > 0
    return hist / norm


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20250819)
