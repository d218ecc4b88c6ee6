"""Metropolis annealing of anchored colloids with the screened pair coupling.

Randomness contract: the generator is a seeded numpy Generator.  The state
builder consumes, in order, the position jitter (N x 2 uniforms), the angles
(N uniforms), and, for mixed compositions, one permutation.  Every sweep then
consumes one standard-normal block of shape (N, 4) whose per-particle columns
are (position-x, position-y, angle, acceptance); the acceptance normal maps
to a uniform through the normal CDF.  Rejected proposals consume their draws
all the same, so trajectories are reproducible across builds and chunkings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.special import ndtr

from .errors import ConfigError

_ANGLE_SIGMA = 2.0 * math.pi / 50.0
_SIGMA_LO = 0.025
_SIGMA_HI = 0.5
_NN_CUTOFF = 2.05
_REFRESH_EVERY = 500


@njit(cache=True)
def _pair_v(dx, dy, w1, w2, d1, d2, eps_sq, cutoff):
    dist = math.hypot(dx, dy)
    if dist <= 2.0:
        return np.inf
    gap = dist - 2.0
    if gap > cutoff:
        return 0.0
    radial = math.exp(-gap / eps_sq)
    if d1 == d2:
        sign = 1.0 if d1 % 2 == 1 else -1.0
        return sign * radial * math.cos((d1 - 1) * (w1 - w2))
    alpha = math.atan2(dy, dx)
    sign = 1.0 if d2 % 2 == 0 else -1.0
    phase = (d1 - d2) * alpha + (d2 - 1) * w2 - (d1 - 1) * w1
    return sign * radial * math.cos(phase)


@njit(cache=True)
def _energy_sum(pos, ang, deg, eps_sq, cutoff):
    n = pos.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            v = _pair_v(pos[j, 0] - pos[i, 0], pos[j, 1] - pos[i, 1],
                        ang[i], ang[j], deg[i], deg[j], eps_sq, cutoff)
            if v == np.inf:
                return np.inf
            total += v
    return total


@njit(cache=True)
def _particle_energy(pos, ang, deg, i, xi, yi, wi, eps_sq, cutoff):
    n = pos.shape[0]
    total = 0.0
    for j in range(n):
        if j == i:
            continue
        v = _pair_v(pos[j, 0] - xi, pos[j, 1] - yi, wi, ang[j],
                    deg[i], deg[j], eps_sq, cutoff)
        if v == np.inf:
            return np.inf
        total += v
    return total


@njit(cache=True)
def _contact_gap(pos, i, xi, yi, box_half):
    """Smallest surface gap seen from particle i; walls act as neighbors."""
    n = pos.shape[0]
    best = box_half - abs(xi)
    wall_y = box_half - abs(yi)
    if wall_y < best:
        best = wall_y
    for j in range(n):
        if j == i:
            continue
        gap = math.hypot(pos[j, 0] - xi, pos[j, 1] - yi) - 2.0
        if gap < best:
            best = gap
    return best


@njit(cache=True)
def _run_sweeps(pos, ang, deg, eps_sq, cutoff, box_half, energy,
                temps, normals, uniforms, accepted):
    two_pi = 2.0 * math.pi
    n = pos.shape[0]
    for s in range(temps.shape[0]):
        temp = temps[s]
        count = 0
        for i in range(n):
            gap = _contact_gap(pos, i, pos[i, 0], pos[i, 1], box_half)
            sigma = min(max(_SIGMA_LO, gap), _SIGMA_HI)
            xi = pos[i, 0] + sigma * normals[s, i, 0]
            yi = pos[i, 1] + sigma * normals[s, i, 1]
            wi = (ang[i] + _ANGLE_SIGMA * normals[s, i, 2]) % two_pi
            if abs(xi) > box_half or abs(yi) > box_half:
                continue
            e_old = _particle_energy(pos, ang, deg, i, pos[i, 0], pos[i, 1],
                                     ang[i], eps_sq, cutoff)
            e_new = _particle_energy(pos, ang, deg, i, xi, yi, wi,
                                     eps_sq, cutoff)
            if e_new == np.inf:
                continue
            delta = e_new - e_old
            if delta <= 0.0:
                accept = True
            elif temp > 0.0:
                accept = uniforms[s, i] < math.exp(-delta / temp)
            else:
                accept = False
            if accept:
                pos[i, 0] = xi
                pos[i, 1] = yi
                ang[i] = wi
                energy += delta
                count += 1
        accepted[s] = count
    return energy


@dataclass
class Schedule:
    """Linear cooling: temperature T_start (1 - s/sweeps) at sweep s."""

    t_start: float = 0.25
    t_end: float = 0.0
    sweeps: int = 25000

    def __post_init__(self):
        if self.sweeps < 0:
            raise ConfigError("sweep count must be nonnegative")
        if self.t_start < self.t_end or self.t_end < 0:
            raise ConfigError("need t_start >= t_end >= 0")

    def temperature(self, sweep: int) -> float:
        if self.sweeps == 0:
            return self.t_start
        frac = sweep / self.sweeps
        return self.t_start + (self.t_end - self.t_start) * frac


@dataclass
class AnnealState:
    positions: np.ndarray
    angles: np.ndarray
    degrees: np.ndarray
    epsilon_sq: float = 0.4
    cutoff_gap: float | None = None
    box_half_width: float = 23.0
    rng: np.random.Generator = field(default_factory=np.random.default_rng)
    energy: float = 0.0
    sweep_index: int = 0

    def __post_init__(self):
        self.positions = np.ascontiguousarray(self.positions, dtype=float)
        self.angles = np.ascontiguousarray(self.angles, dtype=float)
        self.degrees = np.ascontiguousarray(self.degrees, dtype=np.int64)
        if self.cutoff_gap is None:
            self.cutoff_gap = 30.0 * self.epsilon_sq
        if np.any(np.abs(self.positions) > self.box_half_width):
            raise ConfigError("initial positions leave the box")

    def copy(self) -> "AnnealState":
        dup = AnnealState.__new__(AnnealState)
        dup.positions = self.positions.copy()
        dup.angles = self.angles.copy()
        dup.degrees = self.degrees.copy()
        dup.epsilon_sq = self.epsilon_sq
        dup.cutoff_gap = self.cutoff_gap
        dup.box_half_width = self.box_half_width
        dup.rng = np.random.default_rng()
        dup.rng.bit_generator.state = self.rng.bit_generator.state
        dup.energy = self.energy
        dup.sweep_index = self.sweep_index
        return dup


def total_energy(state: AnnealState) -> float:
    """Half the sum over ordered pairs; +inf flags an overlapping state."""
    return float(_energy_sum(state.positions, state.angles, state.degrees,
                             state.epsilon_sq, state.cutoff_gap))


def lattice_initial_state(seed: int = 1, degrees=2, n_side: int = 16,
                          spacing: float = 2.2, jitter: float = 0.05,
                          epsilon_sq: float = 0.4,
                          box_half_width: float = 23.0) -> AnnealState:
    """Jittered square lattice with uniform random anchoring angles.

    `degrees` is a single winding number or a pair (da, db) split half and
    half and shuffled; the mixture ratio is a choice, not a given.
    """
    rng = np.random.default_rng(seed)
    n = n_side * n_side
    line = (np.arange(n_side) - (n_side - 1) / 2.0) * spacing
    gx, gy = np.meshgrid(line, line)
    pos = np.stack([gx.ravel(), gy.ravel()], axis=1)
    pos = pos + rng.uniform(-jitter, jitter, size=(n, 2))
    ang = rng.uniform(0.0, 2.0 * math.pi, size=n)
    if np.isscalar(degrees):
        deg = np.full(n, int(degrees), dtype=np.int64)
    else:
        da, db = (int(d) for d in degrees)
        deg = np.full(n, da, dtype=np.int64)
        deg[n // 2:] = db
        deg = deg[rng.permutation(n)]
    state = AnnealState(positions=pos, angles=ang, degrees=deg,
                        epsilon_sq=epsilon_sq, box_half_width=box_half_width,
                        rng=rng)
    state.energy = total_energy(state)
    return state


def propose(state: AnnealState, i: int, rng: np.random.Generator):
    """Single-particle trial move: Gaussian step with contact-aware width."""
    z = rng.standard_normal(3)
    gap = _contact_gap(state.positions, i, state.positions[i, 0],
                       state.positions[i, 1], state.box_half_width)
    sigma = min(max(_SIGMA_LO, gap), _SIGMA_HI)
    new_pos = state.positions[i] + sigma * z[:2]
    new_angle = (state.angles[i] + _ANGLE_SIGMA * z[2]) % (2.0 * math.pi)
    return new_pos, new_angle


def _sweep_block(state: AnnealState, temps: np.ndarray) -> np.ndarray:
    n = len(state.positions)
    draws = state.rng.standard_normal((len(temps), n, 4))
    uniforms = ndtr(draws[:, :, 3])
    steps = np.ascontiguousarray(draws[:, :, :3])
    accepted = np.zeros(len(temps), dtype=np.int64)
    state.energy = float(_run_sweeps(
        state.positions, state.angles, state.degrees, state.epsilon_sq,
        state.cutoff_gap, state.box_half_width, state.energy,
        np.asarray(temps, dtype=float), steps, uniforms, accepted))
    state.sweep_index += len(temps)
    return accepted


def sweep(state: AnnealState, temperature: float,
          rng: np.random.Generator | None = None) -> int:
    """Trial every particle once in index order at fixed temperature."""
    if rng is not None:
        state.rng = rng
    return int(_sweep_block(state, np.array([temperature]))[0])


@dataclass(frozen=True)
class Snapshot:
    sweep: int
    temperature: float
    energy: float
    positions: np.ndarray
    angles: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    snapshots: tuple
    state: AnnealState
    accepted: np.ndarray
    schedule: Schedule


def anneal(initial: AnnealState, sched: Schedule,
           snapshot_every: int = 1000) -> Trajectory:
    """Linear-schedule annealing with periodic snapshots and a final one.

    The input state is left untouched.  The energy cache is recomputed in
    full every 500 sweeps to stop drift in the incremental updates.
    """
    if snapshot_every <= 0:
        snapshot_every = max(sched.sweeps, 1)
    state = initial.copy()
    snaps = [Snapshot(state.sweep_index, sched.temperature(0), state.energy,
                      state.positions.copy(), state.angles.copy())]
    accepted = np.zeros(sched.sweeps, dtype=np.int64)
    done = 0
    while done < sched.sweeps:
        stop = min(done + _REFRESH_EVERY - done % _REFRESH_EVERY,
                   done + snapshot_every - done % snapshot_every,
                   sched.sweeps)
        temps = np.array([sched.temperature(s) for s in range(done, stop)])
        accepted[done:stop] = _sweep_block(state, temps)
        done = stop
        if done % _REFRESH_EVERY == 0:
            state.energy = total_energy(state)
        if done % snapshot_every == 0 or done == sched.sweeps:
            snaps.append(Snapshot(state.sweep_index, sched.temperature(done),
                                  state.energy, state.positions.copy(),
                                  state.angles.copy()))
    return Trajectory(tuple(snaps), state, accepted, sched)


@dataclass(frozen=True)
class NeighborStats:
    """Contact-pair census of a configuration.

    Angle entries exist only where the coupling has an angular part:
    degree-1 pairs appear in the pair lists but not in the angle arrays.
    """

    nn_pairs: np.ndarray
    second_pairs: np.ndarray
    nn_relative_angles: np.ndarray
    nn_angle_degrees: np.ndarray
    second_relative_angles: np.ndarray
    second_angle_degrees: np.ndarray
    mixed_contact_angles: np.ndarray

    def nn_alignment(self, d: int) -> float:
        """Mean cos((d-1) dw) over nearest-neighbor pairs of degree d."""
        return self._alignment(self.nn_relative_angles,
                               self.nn_angle_degrees, d)

    def second_alignment(self, d: int) -> float:
        return self._alignment(self.second_relative_angles,
                               self.second_angle_degrees, d)

    @staticmethod
    def _alignment(angles, degs, d):
        if d == 1:
            return 1.0
        sel = degs == d
        if not np.any(sel):
            return float("nan")
        return float(np.mean(np.cos((d - 1) * angles[sel])))


def _pair_lists(positions: np.ndarray):
    n = len(positions)
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.hypot(diff[:, :, 0], diff[:, :, 1])
    close = dist < _NN_CUTOFF
    np.fill_diagonal(close, False)
    iu, ju = np.nonzero(np.triu(close, 1))
    nn = np.stack([iu, ju], axis=1) if len(iu) else np.zeros((0, 2), dtype=int)
    second = []
    for i in range(n):
        for j in range(i + 1, n):
            if close[i, j]:
                continue
            if np.any(close[i] & close[j]):
                second.append((i, j))
    second = np.array(second, dtype=int) if second else np.zeros((0, 2), dtype=int)
    return nn, second


def neighbor_stats(state: AnnealState) -> NeighborStats:
    pos, ang, deg = state.positions, state.angles, state.degrees
    nn, second = _pair_lists(pos)

    def reduced(pairs):
        rel, rel_deg = [], []
        for i, j in pairs:
            d = deg[i]
            if d != deg[j] or d == 1:
                continue
            period = 2.0 * math.pi / abs(d - 1)
            rel.append((ang[i] - ang[j]) % period)
            rel_deg.append(d)
        return (np.array(rel, dtype=float),
                np.array(rel_deg, dtype=np.int64))

    nn_rel, nn_deg = reduced(nn)
    sec_rel, sec_deg = reduced(second)
    mixed = []
    for i, j in nn:
        di, dj = deg[i], deg[j]
        if di == dj:
            continue
        alpha = math.atan2(pos[j, 1] - pos[i, 1], pos[j, 0] - pos[i, 0])
        phase = (di - dj) * alpha - (di - 1) * ang[i] + (dj - 1) * ang[j]
        mixed.append(phase % math.pi)
    return NeighborStats(nn, second, nn_rel, nn_deg, sec_rel, sec_deg,
                         np.array(mixed, dtype=float))
