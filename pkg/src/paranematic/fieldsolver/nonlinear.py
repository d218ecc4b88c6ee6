"""Nonlinear exterior solve by energy descent on the FD grid.

Minimizes the blown-up discrete energy

    E(u) = sum h^2 [ 1/2 |grad u|^2 + 1/4 W(u) ]

with Barzilai-Borwein steps guarded by Armijo backtracking.  The quadratic
part reuses the cut-cell form from the linear module, so matched linear and
nonlinear runs on the same grid share their discretization error.
"""

from __future__ import annotations

from collections import deque

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from ..errors import NonConverged
from ..model import ParticleConfiguration, PotentialParameters
from .finite_difference import (_ENERGY_ARM_FLOOR, GridSolution, _Grid,
                                _assemble, _pack, build_grid)

_ARMIJO_C = 1e-4
_BACKTRACK_MAX = 40


def radial_nonlinear_profile(s):
    """Explicit 1-D boundary-layer profile with value 1 at s = 0.

    Decays like 2/sqrt(1+sqrt(2)) * e^{-s}; the cosh/sinh form overflows
    past s ~ 350, where the tail form takes over seamlessly.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("profile argument must be nonnegative")
    out = np.empty(s.shape)
    safe = s < 300
    ss = s[safe]
    out[safe] = np.sqrt(2.0 / (1.0 + np.cosh(2 * ss) + np.sqrt(2.0) * np.sinh(2 * ss)))
    out[~safe] = 2.0 / np.sqrt(1.0 + np.sqrt(2.0)) * np.exp(-s[~safe])
    return out if out.ndim else float(out)


def _symmetric_form(grid: _Grid):
    """Sparse edge operator L, Dirichlet load b and constant c0 such that the
    gradient part of the energy is Re<u, Lu> - 2 Re<u, b> + c0."""
    K = len(grid.xs)
    h = grid.h
    diag = np.zeros(K)
    rows, cols, vals = [], [], []
    load = np.zeros(K, dtype=complex)
    c0 = 0.0
    for d in (0, 2):
        nb = grid.neighbor[d]
        linked = nb >= 0
        i = np.nonzero(linked)[0]
        j = nb[linked]
        ones = np.ones(len(i))
        rows += [i, j]
        cols += [j, i]
        vals += [-ones, -ones]
        np.add.at(diag, i, 1.0)
        np.add.at(diag, j, 1.0)
    for d in range(4):
        cut = grid.neighbor[d] < 0
        i = np.nonzero(cut)[0]
        w = h / np.maximum(grid.arm[d, cut], _ENERGY_ARM_FLOOR * h)
        np.add.at(diag, i, w)
        load[i] += w * grid.dval[d, cut]
        c0 += float(np.sum(w * np.abs(grid.dval[d, cut]) ** 2))
    rows.append(np.arange(K))
    cols.append(np.arange(K))
    vals.append(diag)
    L = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(K, K))
    return L, load, c0


def solve_nonlinear(config: ParticleConfiguration, h: float,
                    padding: float = 10.0,
                    params: PotentialParameters | None = None,
                    tol: float = 1e-8, maxiter: int = 20000,
                    _grid: _Grid | None = None) -> GridSolution:
    """Descend to the discrete minimizer; energy includes the 1/4 W term."""
    params = params if params is not None else PotentialParameters()
    k = params.kT_coefficient
    grid = _grid if _grid is not None else build_grid(config, h, padding)
    L, load, c0 = _symmetric_form(grid)
    wh2 = grid.mass_w * h * h

    def total_energy(u, Lu):
        egrad = np.vdot(u, Lu).real - 2.0 * np.vdot(u, load).real + c0
        s = np.abs(u) ** 2
        wterm = float(np.sum(wh2 * (k * s - 2.0 * s * s + s * s * s)))
        return 0.5 * egrad + 0.25 * wterm

    def gradient(u, Lu):
        s = np.abs(u) ** 2
        return Lu - load + 0.5 * (k - 4.0 * s + 3.0 * s * s) * wh2 * u

    # start from the linearization about u = 0 (mass k/2), same grid
    A, rhs = _assemble(grid, mass_coeff=0.5 * k)
    lu = splu(A.tocsc())
    u = lu.solve(rhs.real).astype(complex)
    if np.any(rhs.imag):
        u = u + 1j * lu.solve(rhs.imag)

    Lu = L @ u
    energy = total_energy(u, Lu)
    g = gradient(u, Lu)
    gmax = float(np.max(np.abs(g), initial=0.0))
    step = 0.1
    prev_u = prev_g = None
    # nonmonotone Armijo reference (Grippo-Lucidi-Lampariello); a monotone
    # guard degrades Barzilai-Borwein to steepest-descent speed
    recent = deque([energy], maxlen=10)
    for iteration in range(maxiter):
        if gmax < tol:
            return _pack(grid, u, energy, energy)
        if prev_u is not None:
            du = u - prev_u
            dg = g - prev_g
            denom = np.vdot(du, dg).real
            if denom > 0:
                step = np.vdot(du, du).real / denom
            step = min(max(step, 1e-12), 1e6)
        gnorm2 = np.vdot(g, g).real
        Lg = L @ g
        alpha = step
        e_ref = max(recent)
        for _ in range(_BACKTRACK_MAX):
            u_try = u - alpha * g
            Lu_try = Lu - alpha * Lg
            e_try = total_energy(u_try, Lu_try)
            if e_try <= e_ref - _ARMIJO_C * alpha * gnorm2:
                break
            alpha *= 0.5
        else:
            raise NonConverged("line search stalled in the nonlinear descent",
                               iterations=iteration, residual=gmax)
        prev_u, prev_g = u, g
        u, Lu, energy = u_try, Lu_try, e_try
        recent.append(energy)
        g = gradient(u, Lu)
        gmax = float(np.max(np.abs(g), initial=0.0))
    raise NonConverged("nonlinear descent hit the iteration limit",
                       iterations=maxiter, residual=gmax)
