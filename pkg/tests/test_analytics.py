import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainwave import analytics as an
from chainwave.errors import DomainError, NoRootError, UnsupportedModelError
from chainwave.models import DisorderSpec, HnParams, ModelSpec, SshParams
from chainwave.states import GaussianPacket

FIG3_SPEC = ModelSpec("hatano_nelson", 400, hn=HnParams(2.0, 1.5))
FIG2_SPEC = ModelSpec("hatano_nelson", 200, hn=HnParams(2.0, 0.2))
SSH = ModelSpec("nh_ssh", 100, ssh=SshParams(0.4, 1.0, 0.5))


class TestVelocities:
    def test_strong_asymmetry(self):
        v = an.velocities(FIG2_SPEC)
        assert v.v_h == pytest.approx(1.264911, abs=5e-7)
        assert v.v_nh == -2.2

    def test_hermitian_limit(self):
        v = an.velocities(ModelSpec("hatano_nelson", 4, hn=HnParams(1.0, 1.0)))
        assert v.v_h == 2.0 and abs(v.v_nh) == 2.0

    def test_mild_asymmetry(self):
        v = an.velocities(FIG3_SPEC)
        assert v.v_h == pytest.approx(3.464102, abs=5e-7)
        assert v.v_nh == -3.5

    @given(st.floats(0.05, 5.0), st.floats(0.05, 5.0))
    @settings(max_examples=60, deadline=None)
    def test_amgm_bound(self, t_l, t_r):
        v = an.velocities(ModelSpec("hatano_nelson", 4, hn=HnParams(t_l, t_r)))
        assert abs(v.v_nh) >= v.v_h - 1e-12
        if abs(t_l - t_r) > 1e-9:
            assert abs(v.v_nh) > v.v_h

    def test_ssh_velocity(self):
        assert an.ssh_hermitian_velocity(SSH) == pytest.approx(0.6244998, abs=5e-8)
        uniform = ModelSpec("nh_ssh", 4, ssh=SshParams(1.0, 1.0, 0.0))
        assert an.ssh_hermitian_velocity(uniform) == pytest.approx(2.0)
        big_t1 = ModelSpec("nh_ssh", 4, ssh=SshParams(2.0, 0.5, 0.0))
        assert an.ssh_hermitian_velocity(big_t1) == pytest.approx(1.0)  # 2*a*t2

    def test_ssh_edge_period(self):
        assert an.ssh_edge_period(SSH) == pytest.approx(640.513, abs=5e-3)

    def test_variant_errors(self):
        with pytest.raises(UnsupportedModelError):
            an.velocities(SSH)
        with pytest.raises(UnsupportedModelError):
            an.ssh_hermitian_velocity(FIG3_SPEC)


class TestTransformedGaussian:
    def test_identity_at_unit_ratio(self):
        tg = an.transformed_gaussian(GaussianPacket(10.0, 2.0, 0.0), 1.0)
        assert tg.log_c == 0.0 and tg.n0_shifted == 10.0

    def test_shift_value(self):
        tg = an.transformed_gaussian(GaussianPacket(300.0, 3.0, 0.0), math.sqrt(0.75))
        assert tg.n0_shifted == pytest.approx(302.589, abs=5e-4)

    def test_shift_sign_tracks_ratio(self):
        up = an.transformed_gaussian(GaussianPacket(0.0, 2.0, 0.0), 2.0)
        dn = an.transformed_gaussian(GaussianPacket(0.0, 2.0, 0.0), 0.5)
        assert up.n0_shifted == -dn.n0_shifted < 0


class TestPeakExpansion:
    def test_quadratic_coefficient(self):
        p = GaussianPacket(300.0, 3.0, 0.0)
        _, b, _ = an.peak_expansion(p, FIG3_SPEC, 2)
        assert b == pytest.approx(-0.09589402, abs=1e-8)

    def test_continuum_cross_check(self):
        # a*B == drift / (2 m sigma^2) exactly at k0 = 0
        p = GaussianPacket(300.0, 3.0, 0.0)
        _, b, _ = an.peak_expansion(p, FIG3_SPEC, 2)
        cp = an.continuum_params(FIG3_SPEC)
        assert abs(FIG3_SPEC.a * b - cp.drift / (2 * cp.mass * p.sigma ** 2)) <= 1e-12 * abs(b)

    def test_parity_in_k0(self):
        pp = GaussianPacket(0.0, 3.0, 0.6)
        pm = GaussianPacket(0.0, 3.0, -0.6)
        ap, bp, cp_ = an.peak_expansion(pp, FIG3_SPEC, 3)
        am, bm, cm = an.peak_expansion(pm, FIG3_SPEC, 3)
        assert am == -ap and cm == -cp_ and bm == bp

    def test_orders(self):
        p = GaussianPacket(0.0, 3.0, 0.6)
        a1 = an.peak_expansion(p, FIG3_SPEC, 1)
        a2 = an.peak_expansion(p, FIG3_SPEC, 2)
        a3 = an.peak_expansion(p, FIG3_SPEC, 3)
        assert a1[1] == a1[2] == 0.0
        assert a2[0] == a1[0] and a2[2] == 0.0
        assert a3[:2] == a2[:2] and a3[2] != 0.0


class TestContinuum:
    def test_parameters(self):
        cp = an.continuum_params(FIG3_SPEC)
        assert cp.mass == pytest.approx(0.288675, abs=5e-7)
        # ln(0.75) sqrt(3) = -0.4982800 (this is the value consistent with
        # the quadratic peak coefficient through b/(2 m sigma^2))
        assert cp.drift == pytest.approx(-0.4982800, abs=5e-7)
        assert cp.e0 == pytest.approx(3.464102, abs=5e-7)

    def test_reference_family_recovery(self):
        # a0 != a: invariants unchanged, reference couplings satisfy both
        # family constraints
        spec = ModelSpec("hatano_nelson", 50, a=0.5, hn=HnParams(2.0, 1.5))
        cp = an.continuum_params(spec, a0=1.0)
        assert cp.mass == pytest.approx(1.0 / (2 * 0.25 * math.sqrt(3.0)))
        assert (0.5 ** 2) * math.sqrt(2.0 * 1.5) == pytest.approx(
            1.0 * math.sqrt(cp.t_l0 * cp.t_r0)
        )
        assert math.log(cp.t_r0 / cp.t_l0) == pytest.approx(
            (1.0 / 0.5) * math.log(1.5 / 2.0)
        )

    def test_hermitian_drift_free(self):
        cp = an.continuum_params(ModelSpec("hatano_nelson", 4, hn=HnParams(1.0, 1.0)))
        assert cp.drift == 0.0

    def test_peak_trajectory(self):
        cp = an.continuum_params(FIG3_SPEC)
        p0 = GaussianPacket(300.0, 3.0, 0.0)
        assert an.continuum_peak(cp, p0, 0.0) == 300.0
        assert an.continuum_peak(cp, p0, 10.0) == pytest.approx(300.0 - 0.09589402 * 100.0, abs=1e-6)
        p4 = GaussianPacket(300.0, 3.0, math.pi / 4)
        v0 = (math.pi / 4) / cp.mass
        assert v0 == pytest.approx(2.720699, abs=5e-7)

    def test_reflection_kink(self):
        cp = an.continuum_params(FIG3_SPEC)
        p4 = GaussianPacket(300.0, 3.0, math.pi / 4)
        t_hit = 100.0 * cp.mass / p4.k0
        f = lambda t: an.continuum_peak_with_reflection(cp, p4, 100.0, t)
        assert f(t_hit - 1e-6) == pytest.approx(f(t_hit + 1e-6), abs=1e-4)
        # local velocities right at the kink: carrier flip changes the
        # velocity by -2 k0/m
        d = 1e-5
        v_before = (f(t_hit - d) - f(t_hit - 2 * d)) / d
        v_after = (f(t_hit + 2 * d) - f(t_hit + d)) / d
        assert v_after - v_before == pytest.approx(-2 * p4.k0 / cp.mass, rel=1e-3)


class TestReflection:
    P4 = GaussianPacket(300.0, 3.0, math.pi / 4)

    def test_hit_times(self):
        ref = an.reflection_prediction(self.P4, FIG3_SPEC, 100.0)
        assert ref.t_hit_continuum == pytest.approx(36.755, abs=5e-4)
        assert ref.t_hit_lattice == pytest.approx(40.825, abs=5e-4)
        assert ref.t_delta == pytest.approx(39.1, abs=0.05)

    def test_t_delta_consistent_with_cubic_route(self):
        # t_delta == |C| t_hit^3 / A to leading order
        ref = an.reflection_prediction(self.P4, FIG3_SPEC, 100.0)
        alt = abs(ref.coeff_c) * ref.t_hit_lattice ** 3 / ref.coeff_a
        assert ref.t_delta == pytest.approx(alt, rel=1e-9)

    def test_cubic_no_root_at_large_distance(self):
        ref = an.reflection_prediction(self.P4, FIG3_SPEC, 100.0)
        assert ref.t_transition_cubic is None
        with pytest.raises(NoRootError):
            an.reflection_transition_time(self.P4, FIG3_SPEC, 100.0)

    def test_cubic_root_exists_at_small_distance(self):
        ref = an.reflection_prediction(self.P4, FIG3_SPEC, 20.0)
        assert ref.t_transition_cubic is not None
        t = ref.t_transition_cubic
        assert ref.coeff_a * t + ref.coeff_c * t ** 3 == pytest.approx(20.0, abs=1e-8)

    def test_parity(self):
        pm = GaussianPacket(300.0, 3.0, -math.pi / 4)
        rp = an.reflection_prediction(self.P4, FIG3_SPEC, 100.0)
        rm = an.reflection_prediction(pm, FIG3_SPEC, 100.0)
        # machine-exact: A, C odd; B even (computed from |k0| internally,
        # so compare against the raw expansion)
        ap, bp, cp_ = an.peak_expansion(self.P4, FIG3_SPEC, 3)
        am, bm, cm = an.peak_expansion(pm, FIG3_SPEC, 3)
        assert am == -ap and cm == -cp_ and bm == bp
        assert rm.t_hit_lattice == rp.t_hit_lattice

    def test_slow_packet_never_hits(self):
        p = GaussianPacket(300.0, 3.0, 1e-9)
        ref = an.reflection_prediction(p, FIG3_SPEC, 100.0)
        assert ref.t_hit_continuum > 1e9

    def test_zero_momentum_rejected(self):
        with pytest.raises(DomainError):
            an.reflection_prediction(GaussianPacket(300.0, 3.0, 0.0), FIG3_SPEC, 100.0)


class TestCriticalSigmaReflection:
    def test_bracket_and_monotonicity(self):
        got = {}
        for d in (50.0, 60.0, 70.0):
            got[d] = an.critical_sigma_reflection(FIG3_SPEC, d, math.pi / 4)
        assert 1.5 < got[50.0] < 2.0
        assert got[50.0] < got[60.0] < got[70.0]

    def test_hermitian_never_crosses(self):
        spec = ModelSpec("hatano_nelson", 40, hn=HnParams(1.0, 1.0))
        with pytest.raises(NoRootError):
            an.critical_sigma_reflection(spec, 50.0, math.pi / 4)


class TestDisorder:
    SPEC = ModelSpec(
        "hatano_nelson", 400, hn=HnParams(2.0, 1.5), disorder=DisorderSpec(1e-7, 1)
    )
    P4 = GaussianPacket(300.0, 3.0, math.pi / 4)

    def test_saturation_bundle(self):
        d = an.disorder_prediction(self.SPEC, self.P4, -math.pi / 2)
        assert d.t_s == pytest.approx(1.269, abs=5e-4)
        assert d.growth_rate == 1.0
        assert d.v_s == pytest.approx(4 * d.v_s_main_text, rel=1e-12)
        assert d.v_s == pytest.approx(
            4.0 * (1e-14 / 3.0) / 400.0 / 2.474874 ** 2, rel=1e-6
        )

    def test_transition_time(self):
        d = an.disorder_prediction(self.SPEC, self.P4, -math.pi / 2)
        assert d.t_transition == pytest.approx(26.68, abs=0.02)

    def test_weak_disorder_pushes_transition_out(self):
        weak = ModelSpec(
            "hatano_nelson", 400, hn=HnParams(2.0, 1.5), disorder=DisorderSpec(1e-9, 1)
        )
        d1 = an.disorder_prediction(self.SPEC, self.P4, -math.pi / 2)
        d2 = an.disorder_prediction(weak, self.P4, -math.pi / 2)
        assert d2.t_transition > d1.t_transition
        tiny = ModelSpec(
            "hatano_nelson", 400, hn=HnParams(2.0, 1.5), disorder=DisorderSpec(1e-16, 1)
        )
        d3 = an.disorder_prediction(tiny, self.P4, -math.pi / 2)
        assert math.isinf(d3.t_transition)

    def test_degenerate_target_rejected(self):
        with pytest.raises(DomainError):
            an.disorder_prediction(self.SPEC, self.P4, self.P4.k0)

    def test_critical_sigma_monotone_in_w(self):
        s4 = an.critical_sigma_disorder(self.SPEC, self.P4, 1e-4)
        s7 = an.critical_sigma_disorder(self.SPEC, self.P4, 1e-7)
        assert s4 < s7  # larger disorder floor is reached by narrower packets

    def test_critical_sigma_dual_form(self):
        # solving for w at the returned sigma_c reproduces the input w
        w = 1e-4
        sc = an.critical_sigma_disorder(self.SPEC, self.P4, w)
        packet_at_sc = GaussianPacket(300.0, sc, math.pi / 4)
        assert an.critical_disorder_amplitude(self.SPEC, packet_at_sc) == pytest.approx(w, rel=1e-6)


class TestLocalization:
    def test_band_center_value(self):
        spec = ModelSpec(
            "hatano_nelson", 50, hn=HnParams(1.0, 1.0), disorder=DisorderSpec(0.1, 1)
        )
        assert an.localization_length(spec, 0.0) == pytest.approx(600.0)

    def test_band_edge_zero(self):
        spec = ModelSpec(
            "hatano_nelson", 50, hn=HnParams(1.0, 1.0), disorder=DisorderSpec(0.1, 1)
        )
        assert an.localization_length(spec, 2.0) == pytest.approx(0.0, abs=1e-12)
        with pytest.raises(DomainError):
            an.localization_length(spec, 2.0001)

    def test_weak_disorder_regime_justification(self):
        spec = ModelSpec(
            "hatano_nelson", 400, hn=HnParams(2.0, 1.5), disorder=DisorderSpec(1e-7, 1)
        )
        xi = an.localization_length(spec, 0.0)
        assert xi == pytest.approx(1.8e15, rel=1e-6)
        assert xi > 400 * 1e9


class TestEdgeTimestamps:
    def test_strong_chain_values(self):
        ts = an.edge_timestamps(FIG2_SPEC, 100.0)
        assert ts["t1"] == pytest.approx(45.45, abs=5e-3)
        assert ts["t2"] == pytest.approx(79.06, abs=5e-3)
        assert ts["t3"] == pytest.approx(237.2, abs=5e-2)
        assert ts["t4"] == pytest.approx((4 * 200 - 100) / 1.2649110640673518, rel=1e-12)

    def test_ordering(self):
        ts = an.edge_timestamps(FIG2_SPEC, 150.0)
        assert ts["t1"] < ts["t2"] < ts["t3"] < ts["t4"]

    def test_domain(self):
        with pytest.raises(DomainError):
            an.edge_timestamps(FIG2_SPEC, 0.0)
        with pytest.raises(DomainError):
            an.edge_timestamps(FIG2_SPEC, 200.0)


class TestSaddlePoint:
    HERM = ModelSpec("hatano_nelson", 400, hn=HnParams(math.sqrt(3.0), math.sqrt(3.0)))
    P = GaussianPacket(200.0, 3.0, math.pi / 4)

    def test_domain_floor(self):
        with pytest.raises(DomainError):
            an.saddle_point_amplitude(self.P, self.HERM, 210.0, 0.1)

    def test_branches(self):
        t = 20.0
        vmax = 2 * math.sqrt(3.0)
        peak_site = 200.0 + t * vmax * math.sin(math.pi / 4)
        inside, b1 = an.saddle_point_amplitude(self.P, self.HERM, peak_site, t)
        assert b1 == "inside"
        outside, b2 = an.saddle_point_amplitude(self.P, self.HERM, 200.0 + 1.5 * t * vmax, t)
        assert b2 == "outside"
        edge, b3 = an.saddle_point_amplitude(self.P, self.HERM, 200.0 + t * vmax, t)
        assert b3 == "cone-edge"
        assert abs(outside) < abs(edge) < abs(inside)

    def test_peak_decay_exponent(self):
        # k0 = 0 at the packet center: amplitude decays like t^(-1/2)
        p0 = GaussianPacket(200.0, 3.0, 0.0)
        a1, _ = an.saddle_point_amplitude(p0, self.HERM, 200.0, 20.0)
        a2, _ = an.saddle_point_amplitude(p0, self.HERM, 200.0, 80.0)
        assert abs(a1) / abs(a2) == pytest.approx(2.0, rel=1e-12)

    def test_nh_form_reduces_to_hermitian_at_unit_ratio(self):
        got = an.nh_gaussian_approximation(self.P, self.HERM, 220.0, 20.0)
        herm, _ = an.saddle_point_amplitude(self.P, self.HERM, 220.0, 20.0)
        assert got == pytest.approx(math.log10(abs(herm)), abs=1e-12)

    def test_nh_peak_saturates_at_hermitian_velocity(self):
        # the approximation's peak speed approaches v_h from above (never
        # the true front speed |v_nh|)
        p = GaussianPacket(300.0, 3.0, 0.0)
        speeds = []
        for t in (50.0, 200.0, 800.0, 3200.0):
            m1 = an.nh_peak_position(p, FIG3_SPEC, t)
            m2 = an.nh_peak_position(p, FIG3_SPEC, t * 1.01)
            speeds.append(abs(m2 - m1) / (0.01 * t))
        vh = an.velocities(FIG3_SPEC).v_h
        assert speeds[0] > speeds[1] > speeds[2] > speeds[3] > vh
        assert speeds[-1] == pytest.approx(vh, rel=0.01)
        assert speeds[-1] < abs(an.velocities(FIG3_SPEC).v_nh) - 0.03
