"""Self-check suites behind the `verify` subcommand.

Each check records the measured quantity next to the bound it must meet,
so the CSV report reads as evidence rather than a bare pass/fail bit.
Suites stay under a minute combined; the heavyweight statistical gates
live in the acceptance tests, not here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SUITES = ("specfun", "asymptotics", "solver", "montecarlo")


@dataclass(frozen=True)
class VerifyCheck:
    suite: str
    name: str
    measured: float
    required: str
    passed: bool


def _check(suite, name, measured, required, ok) -> VerifyCheck:
    return VerifyCheck(suite, name, float(measured), required, bool(ok))


def _verify_specfun() -> list[VerifyCheck]:
    from . import specfun
    from .model import BoundaryData

    out = []
    xs = np.linspace(0.01, 0.95, 50)
    worst = max(abs(specfun.theta_k(2, x) - specfun.polylog_half(x * x))
                for x in xs)
    out.append(_check("specfun", "theta2_equals_polylog_half", worst,
                      "<= 1e-10", worst <= 1e-10))
    for k in (3, 4):
        x = 1e-3
        lim = math.sqrt(2.0 / k)
        err = abs(specfun.theta_k(k, x) / x**k - lim)
        out.append(_check("specfun", f"theta{k}_small_argument_limit", err,
                          "<= 1e-5", err <= 1e-5))
    table = {0: 2, 1: 0, 2: -2, 3: 0, 4: 2, 6: -2, -2: -2, 9: 0}
    worst = max(abs(specfun.interaction_coefficient(k) - v)
                for k, v in table.items())
    out.append(_check("specfun", "mode_coupling_constant_table", worst,
                      "== 0", worst == 0))

    # averaging identity: the mean of f over the k-th roots of unity keeps
    # exactly the modes divisible by k
    rng = np.random.default_rng(12)
    modes = {m: complex(*rng.standard_normal(2)) for m in range(-12, 13)}
    data = BoundaryData.from_modes(modes)
    worst = 0.0
    for k in (2, 3, 5, 8):
        theta = rng.uniform(0.0, 2.0 * math.pi, size=7)
        brute = np.mean([data.sample(theta + 2.0 * math.pi * j / k)
                         for j in range(k)], axis=0)
        kept = sum(c * np.exp(1j * m * theta) for m, c in modes.items()
                   if m % k == 0)
        worst = max(worst, float(np.max(np.abs(brute - kept))))
    out.append(_check("specfun", "root_of_unity_averaging", worst,
                      "<= 1e-12", worst <= 1e-12))

    t = 3.7
    worst = max(
        abs(specfun.bessel_k_scaled(m + 1, t)
            - (specfun.bessel_k_scaled(m - 1, t)
               + 2 * m / t * specfun.bessel_k_scaled(m, t)))
        / specfun.bessel_k_scaled(m + 1, t)
        for m in range(1, 7))
    out.append(_check("specfun", "bessel_recurrence", worst,
                      "<= 1e-12", worst <= 1e-12))
    return out


def _verify_asymptotics() -> list[VerifyCheck]:
    from .asymptotics import (multi_particle_energy, nonconstant_pair_energy,
                              self_energy_mode, two_particle_O1,
                              two_particle_large_b)
    from .model import make_canonical, stacked_pair

    out = []
    eps, b = 0.15, 4.0
    lb = two_particle_large_b(1.0, 1.0, b, eps)
    o1 = two_particle_O1(1.0, 1.0, b, eps)
    rel = abs(lb.neck_total - o1.neck_total) / abs(o1.neck_total)
    out.append(_check("asymptotics", "neck_large_b_matches_order_one", rel,
                      "<= 1e-6", rel <= 1e-6))

    ok = True
    signs = []
    for d in (1, 2, 3):
        cfg = stacked_pair(make_canonical(d, 0.0), make_canonical(d, 0.0),
                           b=2.0, eps=0.15)
        neck = multi_particle_energy(cfg).neck_total
        signs.append(math.copysign(1.0, neck))
        ok &= signs[-1] == (1.0 if d % 2 == 1 else -1.0)
    out.append(_check("asymptotics", "neck_sign_alternates_with_degree",
                      signs[0] - signs[1], "d=1,3 repel; d=2 attracts", ok))

    r2 = nonconstant_pair_energy(make_canonical(2, 0.0), make_canonical(2, 0.3),
                                 b=2.0, eps=0.15).remainder_bound
    r3 = nonconstant_pair_energy(make_canonical(2, 0.0), make_canonical(2, 0.3),
                                 b=3.0, eps=0.15).remainder_bound
    err = abs(r3 / r2 - math.exp(-4.0))
    out.append(_check("asymptotics", "remainder_scales_like_exp_minus_4b", err,
                      "<= 1e-9", err <= 1e-9))

    pair = stacked_pair(1.0, 0.7, b=2.5, eps=0.2)
    both = multi_particle_energy(pair)
    direct = two_particle_large_b(1.0, 0.7, 2.5, 0.2)
    diff = abs(both.neck_total - direct.neck_total)
    diff = max(diff, abs(both.self_energy
                         - (1.0 + 0.49) * self_energy_mode(0, 1.0, 0.2)))
    out.append(_check("asymptotics", "multi_particle_reduces_to_pair", diff,
                      "<= 1e-12", diff <= 1e-12))
    return out


def _verify_solver() -> list[VerifyCheck]:
    from .asymptotics import self_energy_mode
    from .fieldsolver import solve_collocation, solve_fd, tail_decay_rate
    from .model import (BoundaryData, Particle, ParticleConfiguration,
                        stacked_pair)

    out = []
    eps = 0.15
    bs = np.array([2.0, 3.0, 4.0, 5.0])
    self_exact = 2.0 * self_energy_mode(0, 1.0, eps)
    logs = []
    for b in bs:
        sol = solve_collocation(stacked_pair(1.0, 1.0, b=float(b), eps=eps))
        logs.append(math.log(abs(sol.energy - self_exact)))
    slope = float(np.polyfit(bs, logs, 1)[0])
    out.append(_check("solver", "interaction_slope_in_b", slope,
                      "-2 +/- 0.1", -2.1 <= slope <= -1.9))

    data = BoundaryData.from_modes({0: 0.8, 2: 0.5 + 0.3j, -3: 0.4j})
    cfg = ParticleConfiguration(
        (Particle((0.0, 0.0), 1.0 / 0.5**2, data),), 0.5)
    sol = solve_collocation(cfg)
    by_modes = sum(abs(c) ** 2 * self_energy_mode(abs(m), 1.0, 0.5)
                   for m, c in data.as_dict().items())
    rel = abs(sol.energy - by_modes) / by_modes
    out.append(_check("solver", "mode_sum_matches_flux_energy", rel,
                      "<= 1e-8", rel <= 1e-8))

    pair = stacked_pair(1.0, 1.0, b=2.0, eps=0.5)
    ref = solve_collocation(pair)
    fd = solve_fd(pair, h=0.1, padding=10.0)
    rel = abs(fd.energy - ref.energy) / abs(ref.energy)
    budget = max(0.01, math.exp(-10.0))
    out.append(_check("solver", "fd_matches_collocation", rel,
                      f"<= {budget:g}", rel <= budget))

    single = ParticleConfiguration(
        (Particle((0.0, 0.0), 4.0, BoundaryData.constant(1.0)),), 0.5)
    rate = tail_decay_rate(solve_fd(single, h=0.1, padding=10.0), (1.0, 0.0))
    out.append(_check("solver", "linear_tail_rate", rate,
                      "1 +/- 0.02", abs(rate - 1.0) <= 0.02))
    return out


def _verify_montecarlo() -> list[VerifyCheck]:
    from . import montecarlo as mc

    out = []
    runs = []
    for _ in range(2):
        st = mc.lattice_initial_state(seed=7, degrees=2)
        tr = mc.anneal(st, mc.Schedule(sweeps=50), snapshot_every=50)
        runs.append((tr.state.positions.copy(), tr.state.angles.copy()))
    diff = max(float(np.max(np.abs(runs[0][0] - runs[1][0]))),
               float(np.max(np.abs(runs[0][1] - runs[1][1]))))
    out.append(_check("montecarlo", "same_seed_bit_identical", diff,
                      "== 0", diff == 0.0))

    st = mc.lattice_initial_state(seed=3, degrees=3)
    for _ in range(100):
        mc.sweep(st, 0.25)
    drift = abs(st.energy - mc.total_energy(st))
    budget = 1e-9 * (1.0 + abs(st.energy))
    out.append(_check("montecarlo", "incremental_energy_consistent", drift,
                      f"<= {budget:.3e}", drift <= budget))

    st = mc.lattice_initial_state(seed=2, degrees=2)
    tr = mc.anneal(st, mc.Schedule(sweeps=500), snapshot_every=100)
    margin = math.inf
    for sn in tr.snapshots:
        d = np.hypot(*(sn.positions[:, None, :]
                       - sn.positions[None, :, :]).transpose(2, 0, 1))
        np.fill_diagonal(d, np.inf)
        margin = min(margin, float(d.min()) - 2.0,
                     st.box_half_width - float(np.abs(sn.positions).max()))
    out.append(_check("montecarlo", "hard_core_and_box_margins", margin,
                      "> 0", margin > 0.0))

    st = mc.lattice_initial_state(seed=1, degrees=2)
    tr = mc.anneal(st, mc.Schedule(sweeps=2000), snapshot_every=2000)
    align = mc.neighbor_stats(tr.state).nn_alignment(2)
    out.append(_check("montecarlo", "degree2_neighbors_align", align,
                      ">= 0.5", align >= 0.5))
    return out


def run_verify(suite: str = "all") -> list[VerifyCheck]:
    """Run one named suite (or all of them) and return the check rows."""
    if suite not in _SUITES + ("all",):
        raise ValueError(f"unknown suite {suite!r}; "
                         f"pick one of {', '.join(_SUITES + ('all',))}")
    runners = {
        "specfun": _verify_specfun,
        "asymptotics": _verify_asymptotics,
        "solver": _verify_solver,
        "montecarlo": _verify_montecarlo,
    }
    names = _SUITES if suite == "all" else (suite,)
    checks: list[VerifyCheck] = []
    for name in names:
        checks.extend(runners[name]())
    return checks
