"""Domain type and geometry tests."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from paranematic import (
    BoundaryData,
    ConfigError,
    OverlapError,
    Particle,
    ParticleConfiguration,
    PotentialParameters,
    closest_boundary_points,
    load_particle_config,
    make_canonical,
    neck_gap,
    stacked_pair,
)


def unit_disk(x, y, data=None, r=1.0):
    return Particle((x, y), r, data or BoundaryData.constant(1.0))


class TestBoundaryData:
    def test_constant(self):
        g = BoundaryData.constant(0.7)
        assert g.is_constant
        assert g.as_dict() == {0: 0.7 + 0j}
        assert g.mean_square() == pytest.approx(0.49)

    def test_canonical_single_mode(self):
        g = make_canonical(3, math.pi / 2)
        assert g.as_dict() == {3: pytest.approx(cmath.exp(-1j * math.pi))}
        assert g.as_dict()[3] == pytest.approx(-1.0)
        assert g.mean_square() == pytest.approx(1.0)

    def test_canonical_degree_one_rotation_invariant(self):
        for omega in (0.0, 1.3, -2.0):
            assert make_canonical(1, omega).as_dict() == {1: 1.0 + 0j}

    @given(st.integers(-5, 5), st.floats(-3.2, 3.2))
    def test_canonical_samples_match_formula(self, d, omega):
        g = make_canonical(d, omega)
        theta = np.linspace(0, 2 * math.pi, 64, endpoint=False)
        want = np.exp(1j * (d * theta - (d - 1) * omega))
        assert np.allclose(g.sample(theta), want, atol=1e-14)

    def test_parseval(self):
        g = BoundaryData.from_modes({0: 1.0, 2: 0.5 - 0.5j, -3: 2.0j})
        theta = np.linspace(0, 2 * math.pi, 4096, endpoint=False)
        quad = np.mean(np.abs(g.sample(theta)) ** 2)
        assert quad == pytest.approx(g.mean_square(), rel=1e-12)

    def test_h1_norm(self):
        g = BoundaryData.from_modes({1: 2.0, -2: 1.0j})
        assert g.h1_norm_sq() == pytest.approx((1 + 1) * 4 + (1 + 4) * 1)

    def test_zero_modes_dropped(self):
        g = BoundaryData.from_modes({0: 0.0, 1: 1.0})
        assert g.as_dict() == {1: 1.0 + 0j}

    def test_comb_average_equals_root_sampling(self):
        rng = np.random.default_rng(7)
        for k in (1, 2, 3, 5, 8):
            modes = {int(m): complex(*rng.normal(size=2)) for m in rng.integers(-12, 13, 6)}
            g = BoundaryData.from_modes(modes)
            samples = np.mean([g.sample(2 * math.pi * j / k) for j in range(1, k + 1)])
            assert g.comb_average(k) == pytest.approx(samples, abs=1e-12)


class TestGeometry:
    def test_neck_gap_blownup(self):
        eps = 0.25
        r = 1 / eps**2
        b0 = 1.5
        p = unit_disk(0, 0, r=r)
        q = unit_disk(0, 2 * r + 2 * b0, r=r)
        assert neck_gap(p, q, eps) == pytest.approx(b0)
        assert neck_gap(q, p, eps) == pytest.approx(b0)

    def test_tangent_raises(self):
        p, q = unit_disk(0, 0), unit_disk(2.0, 0)
        with pytest.raises(OverlapError):
            neck_gap(p, q, 1.0)

    def test_closest_points_vertical(self):
        top = unit_disk(0, 3.0)
        bottom = unit_disk(0, 0.0)
        pp, qq, alpha = closest_boundary_points(top, bottom)
        # facing points at local angles 3pi/2 and pi/2
        ang_p = math.atan2(pp[1] - 3.0, pp[0]) % (2 * math.pi)
        ang_q = math.atan2(qq[1], qq[0]) % (2 * math.pi)
        assert ang_p == pytest.approx(3 * math.pi / 2)
        assert ang_q == pytest.approx(math.pi / 2)
        assert alpha == pytest.approx(-math.pi / 2)

    def test_closest_points_horizontal(self):
        left, right = unit_disk(0, 0), unit_disk(5.0, 0)
        pp, qq, alpha = closest_boundary_points(left, right)
        assert alpha == 0.0
        assert pp == pytest.approx([1.0, 0.0])
        assert qq == pytest.approx([4.0, 0.0])

    def test_closest_points_overlap_raises(self):
        with pytest.raises(OverlapError):
            closest_boundary_points(unit_disk(0, 0), unit_disk(1.5, 0))


class TestConfiguration:
    def test_rejects_overlap(self):
        with pytest.raises(OverlapError):
            ParticleConfiguration((unit_disk(0, 0), unit_disk(1.0, 0)), 0.5)

    def test_epsilon_domain(self):
        with pytest.raises(ValueError):
            ParticleConfiguration((unit_disk(0, 0),), 0.0)
        with pytest.raises(ValueError):
            ParticleConfiguration((unit_disk(0, 0),), 1.5)
        ParticleConfiguration((unit_disk(0, 0),), 1.0)  # boundary value allowed

    def test_scaling_round_trip_preserves_gaps(self):
        eps = 0.3
        cfg = stacked_pair(1.0, -1.0, b=2.0, eps=eps)
        round_trip = cfg.physical().blown_up()
        for (pair, b1), (_, b2) in zip(cfg.gaps().items(), round_trip.gaps().items()):
            assert b1 == pytest.approx(b2, rel=1e-14)

    def test_physical_ingestion(self):
        eps = 0.5
        phys = ParticleConfiguration(
            (Particle((0, 0), 1.0, BoundaryData.constant(1)),
             Particle((0, 2.5), 1.0, BoundaryData.constant(1))),
            eps, scaling="physical")
        blown = phys.blown_up()
        assert blown.particles[0].radius == pytest.approx(1 / eps**2)
        # physical surface gap 0.5 -> blown-up gap 2, so b = 1
        assert blown.gaps()[(0, 1)] == pytest.approx(1.0)

    def test_potential_parameters_guard(self):
        with pytest.raises(ValueError):
            PotentialParameters(kT_coefficient=1.0)
        assert PotentialParameters().kT_coefficient == 2.0


class TestConfigFile:
    def test_load(self, tmp_path):
        cfg_file = tmp_path / "pair.toml"
        cfg_file.write_text(
            """
epsilon = 0.15
[[particles]]
x = 0.0
y = 47.444
data = { constant = 1.0 }
[[particles]]
x = 0.0
y = -47.444
data = { degree = 3, omega = 0.5 }
"""
        )
        cfg = load_particle_config(cfg_file)
        assert cfg.epsilon == 0.15
        assert cfg.particles[0].radius == pytest.approx(1 / 0.15**2)
        assert cfg.particles[1].data.degree == 3

    def test_modes_entry(self, tmp_path):
        cfg_file = tmp_path / "modes.toml"
        cfg_file.write_text(
            """
epsilon = 0.5
[[particles]]
x = 0.0
y = 0.0
data = { modes = [[0, 1.0, 0.0], [2, 0.5, -0.5]] }
"""
        )
        cfg = load_particle_config(cfg_file)
        assert cfg.particles[0].data.as_dict() == {0: 1.0 + 0j, 2: 0.5 - 0.5j}

    def test_missing_epsilon(self, tmp_path):
        f = tmp_path / "bad.toml"
        f.write_text("[[particles]]\nx = 0.0\ny = 0.0\n")
        with pytest.raises(ConfigError, match="epsilon"):
            load_particle_config(f)

    def test_overlap_reported_as_config_error(self, tmp_path):
        f = tmp_path / "overlap.toml"
        f.write_text(
            """
epsilon = 0.5
[[particles]]
x = 0.0
y = 0.0
[[particles]]
x = 1.0
y = 0.0
"""
        )
        with pytest.raises(ConfigError):
            load_particle_config(f)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_particle_config(tmp_path / "nope.toml")
