"""Closed-form energy expansion and pair potential tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paranematic import (
    BoundaryData,
    EnergyBreakdown,
    PairPotentialSpec,
    bessel_k_scaled,
    make_canonical,
    mc_pair_potential,
    multi_particle_energy,
    nonconstant_pair_energy,
    order_one_neck_bracket,
    order_one_self_bracket,
    self_energy_mode,
    stacked_pair,
    two_particle_O1,
    two_particle_large_b,
)

SQRT_PI = math.sqrt(math.pi)


class TestSelfEnergy:
    def test_mode_zero_unit_disk(self):
        # flux of K_0(r)/K_0(1) through the unit circle
        want = 2 * math.pi * bessel_k_scaled(1, 1.0) / bessel_k_scaled(0, 1.0)
        assert self_energy_mode(0, 1.0, 1.0) == pytest.approx(want, rel=1e-14)

    def test_large_argument_limit(self):
        # K_1/K_0 -> 1, so the energy approaches 2 pi / eps^2 + pi from
        # below with deviation ~ pi eps^2 / 4
        eps = 0.02
        val = self_energy_mode(0, 1.0, eps)
        assert val - 2 * math.pi / eps**2 == pytest.approx(math.pi, abs=1e-3)

    def test_monotone_in_order(self):
        vals = [self_energy_mode(m, 1.0, 0.3) for m in range(6)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_negative_order_symmetry(self):
        assert self_energy_mode(-3, 1.0, 0.4) == self_energy_mode(3, 1.0, 0.4)


class TestTwoParticleExpansions:
    def test_swap_symmetry(self):
        a = two_particle_O1(1.0, -0.5, 2.0, 0.2)
        b = two_particle_O1(-0.5, 1.0, 2.0, 0.2)
        assert a.total == pytest.approx(b.total, rel=1e-14)

    def test_large_b_agreement_rate(self):
        # the two-term tail truncation drifts from the full series like exp(-4b)
        eps = 0.15
        diffs = []
        for b in (3.0, 4.0, 5.0):
            full = two_particle_O1(1.0, 1.0, b, eps, include_pi_constant=False)
            trunc = two_particle_large_b(1.0, 1.0, b, eps)
            diffs.append(abs(full.total - trunc.total))
        rate1 = math.log(diffs[0] / diffs[1])
        rate2 = math.log(diffs[1] / diffs[2])
        assert rate1 == pytest.approx(4.0, abs=0.8)
        assert rate2 == pytest.approx(4.0, abs=0.8)

    def test_leading_order_dominates(self):
        eps = 0.15
        bd = two_particle_O1(2.0, 1.0, 3.0, eps)
        lead = 2 * math.pi / eps**2 * (4 + 1)
        assert bd.self_energy == pytest.approx(lead, rel=0.01)

    def test_neck_sign_follows_product(self):
        attract = two_particle_O1(1.0, 1.0, 2.0, 0.3)
        repel = two_particle_O1(1.0, -1.0, 2.0, 0.3)
        assert attract.neck_total < 0 < repel.neck_total
        assert attract.self_energy == pytest.approx(repel.self_energy, rel=1e-14)

    def test_brackets_positive_and_decaying(self):
        xs = [0.5, 1.0, 2.0, 4.0]
        selfs = [order_one_self_bracket(b) for b in xs]
        necks = [order_one_neck_bracket(b) for b in xs]
        assert all(v > 0 for v in selfs + necks)
        assert all(a > b for a, b in zip(selfs, selfs[1:]))
        assert all(a > b for a, b in zip(necks, necks[1:]))

    def test_neck_bracket_leading_term(self):
        # bracket = e^{-2b} (1 + o(1)) as b grows
        b = 6.0
        assert order_one_neck_bracket(b) == pytest.approx(
            math.exp(-2 * b), rel=1e-4)

    def test_lj_like_minimum_for_weak_second_amplitude(self):
        # amplitudes (1, 0.2): repulsive self correction beats the weak
        # attraction at short range, attraction wins farther out
        eps = 0.15
        bs = np.linspace(0.1, 3.0, 120)
        o1 = [two_particle_O1(1.0, 0.2, b, eps).total for b in bs]
        d = np.diff(o1)
        assert d[0] < 0 and d[-1] > 0
        assert np.sum(np.abs(np.diff(np.sign(d)))) == 2  # one interior minimum


class TestBreakdownArithmetic:
    def test_totals(self):
        bd = EnergyBreakdown(10.0, (((0, 1), -2.0), ((1, 2), 0.5)), 0.1)
        assert bd.neck_total == pytest.approx(-1.5)
        assert bd.total == pytest.approx(8.5)


class TestGeneralData:
    def test_constant_matches_two_particle_form(self):
        eps, b = 0.2, 2.5
        g1, g2 = 1.0, -0.7
        bd_pair = nonconstant_pair_energy(
            BoundaryData.constant(g1), BoundaryData.constant(g2), b, eps)
        neck = -4 * SQRT_PI * math.exp(-2 * b) / eps * g1 * g2
        assert bd_pair.neck_total == pytest.approx(neck, rel=1e-12)

    def test_canonical_neck_angle_dependence(self):
        # facing values of e^{i d theta} differ by a factor (-1)^d between
        # the two poles, so odd degrees repel when aligned
        eps, b = 0.15, 3.0
        for d in (1, 2, 3):
            for omega in (0.0, math.pi / 4, math.pi / 2):
                bd = nonconstant_pair_energy(
                    make_canonical(d, 0.0), make_canonical(d, omega), b, eps)
                want = (-1) ** (d + 1) * (4 * SQRT_PI * math.exp(-2 * b) / eps) \
                    * math.cos((d - 1) * omega)
                assert bd.neck_total == pytest.approx(want, abs=1e-12)

    def test_multi_particle_matches_pair_helper(self):
        eps, b = 0.2, 2.0
        cfg = stacked_pair(1.0, 0.5, b=b, eps=eps)
        multi = multi_particle_energy(cfg)
        pair = nonconstant_pair_energy(
            BoundaryData.constant(1.0), BoundaryData.constant(0.5), b, eps)
        assert multi.neck_total == pytest.approx(pair.neck_total, rel=1e-12)
        want_self = self_energy_mode(0, 1.0, eps) * (1 + 0.25)
        assert multi.self_energy == pytest.approx(want_self, rel=1e-12)

    def test_neck_cutoff_prunes_far_pairs(self):
        from paranematic import Particle, ParticleConfiguration
        eps = 0.3
        r = 1 / eps**2
        g = BoundaryData.constant(1.0)
        far = ParticleConfiguration(
            (Particle((0, 0), r, g), Particle((0, 2 * r + 100.0), r, g)), eps)
        bd = multi_particle_energy(far, neck_cutoff=20.0)
        assert bd.neck_terms == ()

    def test_remainder_scales_with_h1(self):
        eps, b = 0.2, 2.0
        small = nonconstant_pair_energy(
            make_canonical(1, 0.0), make_canonical(1, 0.0), b, eps)
        big = nonconstant_pair_energy(
            make_canonical(5, 0.0), make_canonical(5, 0.0), b, eps)
        assert big.remainder_bound > small.remainder_bound


class TestPairPotential:
    def test_hard_core(self):
        spec = PairPotentialSpec(1, 1)
        assert mc_pair_potential(spec, (1.99, 0.0), 0.0, 0.0) == math.inf
        assert mc_pair_potential(spec, (2.0, 0.0), 0.0, 0.0) == math.inf

    def test_cutoff(self):
        spec = PairPotentialSpec(1, 1, epsilon_sq=0.4)
        far = 2.0 + 31 * 0.4
        assert mc_pair_potential(spec, (far, 0.0), 0.0, 0.0) == 0.0

    def test_degree_one_isotropic_repulsion(self):
        # odd degree, no angular dependence: pure repulsion
        spec = PairPotentialSpec(1, 1, epsilon_sq=0.4)
        v = mc_pair_potential(spec, (2.4, 0.0), 1.0, 2.0)
        assert v == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_degree_two_alignment(self):
        spec = PairPotentialSpec(2, 2, epsilon_sq=0.4)
        r = (2.4, 0.0)
        aligned = mc_pair_potential(spec, r, 0.3, 0.3)
        anti = mc_pair_potential(spec, r, 0.3, 0.3 + math.pi)
        crossed = mc_pair_potential(spec, r, 0.3, 0.3 + math.pi / 2)
        assert aligned == pytest.approx(-math.exp(-1.0), rel=1e-12)
        assert anti == pytest.approx(math.exp(-1.0), rel=1e-12)
        assert crossed == pytest.approx(0.0, abs=1e-12)

    def test_degree_three_quadrupolar(self):
        spec = PairPotentialSpec(3, 3, epsilon_sq=0.4)
        r = (2.4, 0.0)
        same = mc_pair_potential(spec, r, 0.0, 0.0)
        quarter = mc_pair_potential(spec, r, 0.0, math.pi / 4)
        half = mc_pair_potential(spec, r, 0.0, math.pi / 2)
        assert same == pytest.approx(math.exp(-1.0), rel=1e-12)
        assert quarter == pytest.approx(0.0, abs=1e-12)
        assert half == pytest.approx(-math.exp(-1.0), rel=1e-12)

    @given(st.floats(-3.0, 3.0), st.floats(-3.0, 3.0), st.floats(2.05, 8.0),
           st.floats(0.0, 6.2))
    @settings(max_examples=60)
    def test_equal_degree_depends_on_angle_difference(self, w1, w2, dist, bearing):
        spec = PairPotentialSpec(2, 2)
        r = (dist * math.cos(bearing), dist * math.sin(bearing))
        shift = 0.83
        v1 = mc_pair_potential(spec, r, w1, w2)
        v2 = mc_pair_potential(spec, r, w1 + shift, w2 + shift)
        assert v1 == pytest.approx(v2, abs=1e-12)

    def test_mixed_degree_rotation_covariance(self):
        # rotating the separation AND both orientations together is a symmetry
        spec = PairPotentialSpec(1, 3, epsilon_sq=0.4)
        phi = 0.77
        base = mc_pair_potential(spec, (2.4, 0.0), 0.2, 1.1)
        rot = mc_pair_potential(
            spec, (2.4 * math.cos(phi), 2.4 * math.sin(phi)), 0.2 + phi, 1.1 + phi)
        assert rot == pytest.approx(base, rel=1e-12)

    def test_mixed_degree_pole_optimum(self):
        # a degree-3 particle prefers a degree-1 neighbor along its axes
        spec = PairPotentialSpec(1, 3, epsilon_sq=0.4)
        dist = 2.4
        omega3 = 0.0

        def v(alpha):
            r = (dist * math.cos(alpha), dist * math.sin(alpha))
            return mc_pair_potential(spec, r, 0.0, omega3)

        alphas = np.linspace(0, 2 * math.pi, 720, endpoint=False)
        vals = np.array([v(a) for a in alphas])
        best = alphas[np.argmin(vals)]
        # optimum at alpha = 0 mod pi (the symmetry axes of e^{3 i theta}
        # relative to omega = 0)
        assert min(best % math.pi, math.pi - best % math.pi) < 0.02
        assert vals.min() == pytest.approx(-math.exp(-1.0), rel=1e-9)

    def test_equal_degree_optimum_structure(self):
        # even degree: minimum at delta = 0; odd degree > 1: at pi/(d-1)
        dist = 2.4
        for d, want in ((2, 0.0), (3, math.pi / 2)):
            spec = PairPotentialSpec(d, d, epsilon_sq=0.4)
            deltas = np.linspace(0, 2 * math.pi, 1440, endpoint=False)
            vals = [mc_pair_potential(spec, (dist, 0.0), 0.0, w) for w in deltas]
            best = deltas[int(np.argmin(vals))]
            period = 2 * math.pi / (d - 1)
            assert min(best % period, period - best % period) == pytest.approx(
                want % period, abs=0.01)
