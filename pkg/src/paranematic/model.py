"""Domain types: boundary data, particles, configurations, scalings.

Lengths live in blown-up units (disk radius 1/eps^2, field decay length 1)
unless a configuration is explicitly tagged as physical. All energy and
solver code converts to blown-up units on entry; energies are invariant
under the change of scale, so nothing needs converting back.
"""

from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigError, OverlapError

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

TWO_PI = 2.0 * math.pi


def _as_mode_dict(modes) -> dict[int, complex]:
    out = {}
    for m, amp in dict(modes).items():
        if m != int(m):
            raise ValueError(f"mode index must be an integer, got {m!r}")
        amp = complex(amp)
        if amp != 0:
            out[int(m)] = amp
    return out


@dataclass(frozen=True)
class BoundaryData:
    """Dirichlet datum on one disk boundary as a finite Fourier sum.

    g(theta) = sum_m modes[m] * e^{i m theta}, theta the polar angle
    in the disk's local frame.
    """

    modes: tuple[tuple[int, complex], ...]
    kind: str = "general"
    degree: int | None = None
    orientation: float | None = None

    @staticmethod
    def constant(g: float) -> "BoundaryData":
        """Constant datum g(theta) = g (mode 0 only)."""
        g = float(g)
        modes = ((0, complex(g)),) if g != 0.0 else ()
        return BoundaryData(modes=modes, kind="constant")

    @staticmethod
    def canonical(d: int, omega: float) -> "BoundaryData":
        """Degree-d anchoring datum g(theta) = e^{i(d theta - (d-1) omega)}.

        A single Fourier mode m = d with amplitude e^{-i(d-1)omega};
        unit mean-square norm for every d and omega.
        """
        d = int(d)
        amp = cmath.exp(-1j * (d - 1) * omega)
        return BoundaryData(
            modes=((d, amp),), kind="canonical", degree=d, orientation=float(omega)
        )

    @staticmethod
    def from_modes(modes: Mapping[int, complex]) -> "BoundaryData":
        items = tuple(sorted(_as_mode_dict(modes).items()))
        return BoundaryData(modes=items, kind="general")

    def as_dict(self) -> dict[int, complex]:
        return dict(self.modes)

    @property
    def is_constant(self) -> bool:
        return all(m == 0 for m, _ in self.modes)

    @property
    def constant_value(self) -> complex:
        if not self.is_constant:
            raise ValueError("boundary datum is not constant")
        return self.as_dict().get(0, 0.0 + 0.0j)

    @property
    def max_mode(self) -> int:
        return max((abs(m) for m, _ in self.modes), default=0)

    def sample(self, theta):
        """Evaluate g at angle(s) theta. Accepts scalars or arrays."""
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, dtype=complex)
        for m, amp in self.modes:
            out += amp * np.exp(1j * m * theta)
        return out if out.shape else complex(out)

    def mean_square(self) -> float:
        """Angular mean of |g|^2; equals sum_m |g_m|^2 (Parseval)."""
        return float(sum(abs(amp) ** 2 for _, amp in self.modes))

    def h1_norm_sq(self) -> float:
        """Sobolev norm sum_m (1 + m^2) |g_m|^2 of the boundary trace."""
        return float(sum((1 + m * m) * abs(amp) ** 2 for m, amp in self.modes))

    def comb_average(self, k: int) -> complex:
        """Average of g over the k-th roots of unity, (1/k) sum_j g(2 pi j / k).

        Computed from the mode side as sum_p g_{pk}: only Fourier modes
        that are multiples of k survive the averaging.
        """
        k = int(k)
        if k < 1:
            raise ValueError(f"comb_average needs k >= 1, got {k}")
        return complex(sum(amp for m, amp in self.modes if m % k == 0))


@dataclass(frozen=True)
class Particle:
    """One disk-shaped colloid: center and radius in blown-up units."""

    center: tuple[float, float]
    radius: float
    data: BoundaryData

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"particle radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @property
    def center_array(self) -> np.ndarray:
        return np.array(self.center, dtype=float)


@dataclass(frozen=True)
class PotentialParameters:
    """Bulk potential W(u) = kT_coefficient |u|^2 - 2|u|^4 + |u|^6.

    The quadratic coefficient k(T) must exceed 4/3 (weakly ordered
    regime, W >= 0 with a single well at 0).
    """

    kT_coefficient: float = 2.0

    def __post_init__(self):
        if not self.kT_coefficient > 4.0 / 3.0:
            raise ValueError(
                f"kT_coefficient must exceed 4/3, got {self.kT_coefficient}"
            )


BLOWN_UP = "blown_up"
PHYSICAL = "physical"


@dataclass(frozen=True)
class ParticleConfiguration:
    """A set of disjoint disks with boundary data and the scale eps.

    scaling records the unit system of the stored coordinates. Solvers
    and energy formulas operate on the blown-up view (``blown_up()``);
    the conversion is x -> x/eps^2 and leaves all energies unchanged.
    """

    particles: tuple[Particle, ...]
    epsilon: float
    scaling: str = BLOWN_UP

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.scaling not in (BLOWN_UP, PHYSICAL):
            raise ValueError(f"unknown scaling {self.scaling!r}")
        object.__setattr__(self, "particles", tuple(self.particles))
        # Disjointness check in the stored units.
        pts = self.particles
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                d = math.dist(pts[i].center, pts[j].center)
                if d <= pts[i].radius + pts[j].radius:
                    raise OverlapError(
                        f"particles {i} and {j} overlap or touch "
                        f"(center distance {d:.6g}, radii sum "
                        f"{pts[i].radius + pts[j].radius:.6g})"
                    )

    @staticmethod
    def of(particles: Iterable[Particle], epsilon: float,
           scaling: str = BLOWN_UP) -> "ParticleConfiguration":
        return ParticleConfiguration(tuple(particles), float(epsilon), scaling)

    def blown_up(self) -> "ParticleConfiguration":
        if self.scaling == BLOWN_UP:
            return self
        s = 1.0 / self.epsilon**2
        return self._rescaled(s, BLOWN_UP)

    def physical(self) -> "ParticleConfiguration":
        if self.scaling == PHYSICAL:
            return self
        return self._rescaled(self.epsilon**2, PHYSICAL)

    def _rescaled(self, s: float, scaling: str) -> "ParticleConfiguration":
        parts = tuple(
            Particle((p.center[0] * s, p.center[1] * s), p.radius * s, p.data)
            for p in self.particles
        )
        return ParticleConfiguration(parts, self.epsilon, scaling)

    def gaps(self) -> dict[tuple[int, int], float]:
        """Half surface-to-surface distances b_ij in blown-up units."""
        cfg = self.blown_up()
        out = {}
        for i in range(len(cfg.particles)):
            for j in range(i + 1, len(cfg.particles)):
                out[(i, j)] = neck_gap(cfg.particles[i], cfg.particles[j], cfg.epsilon)
        return out

    @property
    def max_mode(self) -> int:
        return max((p.data.max_mode for p in self.particles), default=0)


def make_canonical(d: int, omega: float) -> BoundaryData:
    """Degree-d boundary datum with orientation omega. See BoundaryData.canonical."""
    return BoundaryData.canonical(d, omega)


def neck_gap(p: Particle, q: Particle, eps: float) -> float:
    """Half gap b between two disks, (|center diff| - r_p - r_q)/2.

    Inputs are expected in blown-up units; b is the quantity every pair
    formula is written in. Tangent or overlapping disks raise
    OverlapError since the formulas need b > 0.
    """
    d = math.dist(p.center, q.center)
    b = 0.5 * (d - p.radius - q.radius)
    if b <= 0.0:
        raise OverlapError(
            f"disks overlap or touch: center distance {d:.6g}, "
            f"radii {p.radius:.6g} + {q.radius:.6g}"
        )
    return b


def closest_boundary_points(p: Particle, q: Particle):
    """Mutually nearest boundary points of two disjoint disks.

    Returns (point on p's circle, point on q's circle, alpha) where
    alpha is the polar angle of q's center as seen from p's center.
    Both points lie on the segment joining the centers.
    """
    cp, cq = p.center_array, q.center_array
    diff = cq - cp
    d = float(np.hypot(*diff))
    if d <= p.radius + q.radius:
        raise OverlapError("disks overlap or touch; no positive gap")
    e = diff / d
    alpha = float(math.atan2(e[1], e[0]))
    return cp + p.radius * e, cq - q.radius * e, alpha


# ---------------------------------------------------------------------------
# Configuration files (TOML)

def _parse_data(raw, where: str) -> BoundaryData:
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: 'data' must be a table")
    keys = set(raw)
    if "constant" in keys:
        if keys - {"constant"}:
            raise ConfigError(f"{where}: 'constant' excludes other data keys")
        return BoundaryData.constant(float(raw["constant"]))
    if "degree" in keys:
        if keys - {"degree", "omega"}:
            raise ConfigError(f"{where}: degree data takes only 'degree' and 'omega'")
        return BoundaryData.canonical(int(raw["degree"]), float(raw.get("omega", 0.0)))
    if "modes" in keys:
        if keys - {"modes"}:
            raise ConfigError(f"{where}: 'modes' excludes other data keys")
        modes = {}
        for entry in raw["modes"]:
            if len(entry) != 3:
                raise ConfigError(f"{where}: each mode entry is [m, re, im]")
            m, re, im = entry
            modes[int(m)] = complex(float(re), float(im))
        return BoundaryData.from_modes(modes)
    raise ConfigError(f"{where}: data needs one of 'constant', 'degree', 'modes'")


def load_toml(path) -> dict:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            return _toml.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"configuration file not found: {path}")
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}")


def load_particle_config(path) -> ParticleConfiguration:
    """Read a particle configuration from a TOML file.

    Keys: epsilon (required), scaling ('blown_up' default, or
    'physical'), mode_cutoff (optional solver hint), and one
    [[particles]] table per disk with x, y, optional radius (default
    1/eps^2 blown-up, 1 physical) and a data table (constant = g /
    degree = d, omega = w / modes = [[m, re, im], ...]).
    """
    doc = load_toml(path)
    try:
        eps = float(doc["epsilon"])
    except KeyError:
        raise ConfigError(f"{path}: missing required key 'epsilon'")
    scaling = doc.get("scaling", BLOWN_UP)
    if scaling not in (BLOWN_UP, PHYSICAL):
        raise ConfigError(f"{path}: scaling must be 'blown_up' or 'physical'")
    raw_particles = doc.get("particles", [])
    if not raw_particles:
        raise ConfigError(f"{path}: no [[particles]] tables")
    default_radius = 1.0 if scaling == PHYSICAL else 1.0 / eps**2
    particles = []
    for n, raw in enumerate(raw_particles):
        where = f"{path}: particles[{n}]"
        try:
            x, y = float(raw["x"]), float(raw["y"])
        except KeyError as exc:
            raise ConfigError(f"{where}: missing coordinate {exc}")
        radius = float(raw.get("radius", default_radius))
        data = _parse_data(raw.get("data", {"constant": 1.0}), where)
        particles.append(Particle((x, y), radius, data))
    try:
        return ParticleConfiguration(tuple(particles), eps, scaling)
    except (ValueError, OverlapError) as exc:
        raise ConfigError(f"{path}: {exc}")


def stacked_pair(g1: BoundaryData | float, g2: BoundaryData | float,
                 b: float, eps: float, radius: float | None = None) -> ParticleConfiguration:
    """Two disks on the vertical axis with half gap b (blown-up units).

    Disk 1 on top, disk 2 below, mirroring the geometry the pair
    expansions are stated in. Scalars are wrapped as constant data.
    """
    if not isinstance(g1, BoundaryData):
        g1 = BoundaryData.constant(g1)
    if not isinstance(g2, BoundaryData):
        g2 = BoundaryData.constant(g2)
    r = 1.0 / eps**2 if radius is None else radius
    c = r + b
    return ParticleConfiguration(
        (Particle((0.0, c), r, g1), Particle((0.0, -c), r, g2)), eps, BLOWN_UP
    )
