"""Closed-form interaction energies for well-separated disk colloids.

Conventions. kappa denotes the minimum of the quadratic exterior energy
int(|grad u|^2 + |u|^2) over fields matching the boundary data; it is
what the boundary-flux quadrature of the field solver returns. All pair
formulas are exact up to the stated remainder scales, with unquantified
constants taken as 1 for reporting (order-of-magnitude budgets, not
certified intervals).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import specfun
from .errors import OverlapError
from .model import BoundaryData, ParticleConfiguration, closest_boundary_points, neck_gap

SQRT_PI = math.sqrt(math.pi)

# Pair terms beyond this half-gap are below double-precision relevance
# for every tolerance used here (e^{-2b} < 4e-18).
NECK_CUTOFF = 20.0


@dataclass(frozen=True)
class EnergyBreakdown:
    """Asymptotic energy split: per-particle part, per-neck terms, budget.

    neck_terms maps unordered pair indices to the interaction value of
    that neck; remainder_bound is the e^{-4b}-scale error budget with
    unit constant.
    """

    self_energy: float
    neck_terms: tuple[tuple[tuple[int, int], float], ...]
    remainder_bound: float

    @property
    def neck_total(self) -> float:
        return math.fsum(v for _, v in self.neck_terms)

    @property
    def total(self) -> float:
        return self.self_energy + self.neck_total


def self_energy_mode(m: int, r1: float, eps: float) -> float:
    """Exterior energy of a single disk carrying the pure mode e^{i m theta}.

    Equals -(2 pi r1 / eps^2) K_m'(z)/K_m(z) at z = r1/eps^2, with r1
    the physical disk radius (blown-up radius r1/eps^2). Positive, and
    increasing in |m|. Evaluated through scaled Bessel values, using
    K_m' = -(K_{m-1} + K_{m+1})/2.
    """
    if not (r1 > 0.0 and eps > 0.0):
        raise ValueError(f"self_energy_mode needs r1, eps > 0, got {r1}, {eps}")
    m = abs(int(m))
    z = r1 / eps**2
    km = specfun.bessel_k_scaled(m, z)
    km_minus = specfun.bessel_k_scaled(abs(m - 1), z)
    km_plus = specfun.bessel_k_scaled(m + 1, z)
    return (2.0 * math.pi * z) * 0.5 * (km_minus + km_plus) / km


def two_particle_large_b(g1: float, g2: float, b: float, eps: float) -> EnergyBreakdown:
    """Leading pair expansion for constant data at large half-gap b.

    self = (2 pi / eps^2)(g1^2 + g2^2), one neck term
    -4 g1 g2 sqrt(pi) e^{-2b} / eps, remainder budget e^{-4b}/eps.
    Like-signed data attract (negative neck), opposite-signed repel.
    """
    if not b > 0.0:
        raise ValueError(f"two_particle_large_b needs b > 0, got {b}")
    self_energy = (2.0 * math.pi / eps**2) * (g1 * g1 + g2 * g2)
    neck = -4.0 * g1 * g2 * SQRT_PI * math.exp(-2.0 * b) / eps
    remainder = math.exp(-4.0 * b) / eps
    return EnergyBreakdown(self_energy, (((0, 1), neck),), remainder)


def _theta_or_zero(k: int, x: float) -> float:
    # theta_k has an open domain; at underflowed x the series value is 0.
    return specfun.theta_k(k, x) if x > 0.0 else 0.0


def _polylog_or_zero(x: float) -> float:
    return specfun.polylog_half(x) if x > 0.0 else 0.0


def order_one_self_bracket(b: float) -> float:
    """Boundary-layer self-interaction series at order-one separation.

    Li_{1/2}(e^{-4b}) + Theta_4(e^{-2b}) + e^{-4b}; multiplies
    sqrt(pi/2)/eps * (g1^2+g2^2) in the order-one pair expansion. Sums
    the data's repeated reflections between the two boundaries.
    """
    x = math.exp(-2.0 * b)
    return _polylog_or_zero(x * x) + _theta_or_zero(4, x) + x * x


def order_one_neck_bracket(b: float) -> float:
    """Neck coupling series e^{-2b} + Theta_3(e^{-2b})/sqrt(2)."""
    x = math.exp(-2.0 * b)
    return x + _theta_or_zero(3, x) / math.sqrt(2.0)


def two_particle_O1(g1: float, g2: float, b: float, eps: float,
                    include_pi_constant: bool = True) -> EnergyBreakdown:
    """Pair expansion kept accurate down to order-one half-gaps b.

    self = (2 pi / eps^2)(g1^2+g2^2)
           + sqrt(pi/2)/eps * [Li_{1/2}(e^{-4b}) + Theta_4(e^{-2b}) + e^{-4b}] (g1^2+g2^2)
           (+ pi when include_pi_constant, the order-one single-particle
            constant for unit-amplitude data),
    neck = -(4 sqrt(pi)/eps) [e^{-2b} + Theta_3(e^{-2b})/sqrt(2)] g1 g2.

    The remainder budget is 1: the expansion is exact to o(1) in eps at
    fixed b, and the dropped term is an order-one constant.
    """
    if not b > 0.0:
        raise ValueError(f"two_particle_O1 needs b > 0, got {b}")
    gsq = g1 * g1 + g2 * g2
    self_energy = (2.0 * math.pi / eps**2) * gsq
    self_energy += math.sqrt(math.pi / 2.0) / eps * order_one_self_bracket(b) * gsq
    if include_pi_constant:
        self_energy += math.pi
    neck = -(4.0 * SQRT_PI / eps) * order_one_neck_bracket(b) * g1 * g2
    return EnergyBreakdown(self_energy, (((0, 1), neck),), 1.0)


def _neck_term(data1: BoundaryData, data2: BoundaryData, alpha: float,
               b: float, eps: float) -> float:
    """Single-neck interaction for a pair whose center line has polar angle alpha.

    -(2 sqrt(pi) e^{-2b}/eps)(g1(p) conj(g2(q)) + conj(g1(p)) g2(q)),
    with p the boundary point of disk 1 facing disk 2 (local angle
    alpha) and q the point of disk 2 facing disk 1 (local angle
    alpha + pi).
    """
    gp = data1.sample(alpha)
    gq = data2.sample(alpha + math.pi)
    cross = 2.0 * (gp * gq.conjugate()).real
    return -2.0 * SQRT_PI * math.exp(-2.0 * b) / eps * cross


def nonconstant_pair_energy(data1: BoundaryData, data2: BoundaryData,
                            b: float, eps: float) -> EnergyBreakdown:
    """Pair expansion for general Fourier boundary data at large b.

    Geometry: disk 1 above disk 2 on the vertical axis (the facing
    points sit at local angles 3 pi/2 and pi/2). self = (2 pi / eps^2)
    (mean|g1|^2 + mean|g2|^2); the neck couples only the boundary
    values at the facing points; remainder budget
    e^{-4b} (|g1|_{H1}^2 + |g2|_{H1}^2)/eps.
    """
    if not b > 0.0:
        raise ValueError(f"nonconstant_pair_energy needs b > 0, got {b}")
    self_energy = (2.0 * math.pi / eps**2) * (data1.mean_square() + data2.mean_square())
    neck = _neck_term(data1, data2, -0.5 * math.pi, b, eps)
    remainder = math.exp(-4.0 * b) * (data1.h1_norm_sq() + data2.h1_norm_sq()) / eps
    return EnergyBreakdown(self_energy, (((0, 1), neck),), remainder)


def multi_particle_energy(config: ParticleConfiguration,
                          neck_cutoff: float = NECK_CUTOFF) -> EnergyBreakdown:
    """Superposition energy of a many-disk configuration.

    self: exact single-disk mode energies summed over every particle's
    modes (not just their leading 2 pi/eps^2 part). necks: one term per
    unordered pair with half-gap below neck_cutoff, from the facing-point
    pair formula. Valid when every retained gap satisfies b_ij >> 1;
    the remainder budget accumulates e^{-4 b_ij} pair budgets.
    """
    cfg = config.blown_up()
    eps = cfg.epsilon
    parts = cfg.particles
    self_energy = 0.0
    for p in parts:
        r_phys = p.radius * eps**2
        for m, amp in p.data.modes:
            self_energy += abs(amp) ** 2 * self_energy_mode(m, r_phys, eps)
    necks = []
    remainder = 0.0
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            b = neck_gap(parts[i], parts[j], eps)
            if b > neck_cutoff:
                continue
            _, _, alpha = closest_boundary_points(parts[i], parts[j])
            necks.append(((i, j), _neck_term(parts[i].data, parts[j].data, alpha, b, eps)))
            remainder += (math.exp(-4.0 * b)
                          * (parts[i].data.h1_norm_sq() + parts[j].data.h1_norm_sq()) / eps)
    return EnergyBreakdown(self_energy, tuple(necks), remainder)


# ---------------------------------------------------------------------------
# Monte Carlo pair potential

@dataclass(frozen=True)
class PairPotentialSpec:
    """Reduced pair potential for the annealing runs.

    Hard-core unit disks (infinite energy at center distance <= 2) with
    an exponentially screened angular coupling; all separation-independent
    prefactors are dropped since they do not move the minimizers. The
    default cutoff 30 eps^2 keeps the neglected magnitude below e^{-30}.
    """

    d1: int
    d2: int
    epsilon_sq: float = 0.4
    cutoff_gap: float | None = None

    def __post_init__(self):
        if not self.epsilon_sq > 0:
            raise ValueError(f"epsilon_sq must be positive, got {self.epsilon_sq}")
        if self.cutoff_gap is None:
            object.__setattr__(self, "cutoff_gap", 30.0 * self.epsilon_sq)


def mc_pair_potential(spec: PairPotentialSpec, r, omega1: float, omega2: float) -> float:
    """Screened angular pair potential of two anchored disks.

    r is the center offset (particle 2 minus particle 1). Equal degrees
    d couple through (-1)^{d+1} exp(-(|r|-2)/eps^2) cos((d-1)(w1-w2)):
    even degrees align parallel, odd degrees anti-parallel. Mixed
    degrees couple through the boundary values at the facing points,
    (-1)^{d2} exp(...) cos((d1-d2) alpha + (d2-1) w2 - (d1-1) w1) with
    alpha the polar angle of r, so the optimum depends on where the
    neighbor sits, not only on orientations.
    """
    rx, ry = float(r[0]), float(r[1])
    dist = math.hypot(rx, ry)
    if dist <= 2.0:
        return math.inf
    gap = dist - 2.0
    if gap > spec.cutoff_gap:
        return 0.0
    radial = math.exp(-gap / spec.epsilon_sq)
    d1, d2 = spec.d1, spec.d2
    if d1 == d2:
        sign = 1.0 if d1 % 2 == 1 else -1.0  # (-1)^{d+1}
        return sign * radial * math.cos((d1 - 1) * (omega1 - omega2))
    alpha = math.atan2(ry, rx)
    sign = 1.0 if d2 % 2 == 0 else -1.0  # (-1)^{d2}
    phase = (d1 - d2) * alpha + (d2 - 1) * omega2 - (d1 - 1) * omega1
    return sign * radial * math.cos(phase)
