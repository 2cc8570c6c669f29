import numpy as np
import pytest
from scipy.linalg import expm

from chainwave.errors import (
    BackendUnsupportedError,
    InvalidParameterError,
    PrecisionError,
)
from chainwave.evolution import (
    EvolutionConfig,
    check_precision,
    cross_validate,
    edge_amplitude_log10,
    evolve,
    evolve_via_transform,
)
from chainwave.models import (
    DisorderSpec,
    HnParams,
    ModelSpec,
    build_hamiltonian,
)
from chainwave.states import GaussianPacket, delta_state, gaussian_state


def stepper(bits=53, tol=1e-11, **kw):
    return EvolutionConfig(
        backend="precision_stepper", precision_bits=bits, stepper_tolerance=tol, **kw
    )


def spectral(bits=53, **kw):
    return EvolutionConfig(backend="spectral_transform", precision_bits=bits, **kw)


class TestBasics:
    def test_time_zero_returns_initial(self, hn_strong):
        spec = hn_strong(20)
        psi0 = delta_state(10, 20)
        h = build_hamiltonian(spec)
        for cfg in (stepper(keep_states=True), spectral(106, keep_states=True)):
            psi0_b = delta_state(10, 20, cfg.precision_bits)
            traj = evolve(h, psi0_b, [0.0], cfg)
            out = traj.states[0]
            assert np.allclose(out.to_complex128(), psi0.values, atol=0)

    def test_rejects_bad_times(self, hn_strong):
        h = build_hamiltonian(hn_strong(10))
        psi0 = delta_state(5, 10)
        with pytest.raises(InvalidParameterError):
            evolve(h, psi0, [], stepper())
        with pytest.raises(InvalidParameterError):
            evolve(h, psi0, [2.0, 1.0], stepper())

    def test_spectral_rejects_disorder(self, hn_strong):
        spec = hn_strong(10, disorder=DisorderSpec(1e-3, 1))
        h = build_hamiltonian(spec)
        with pytest.raises(BackendUnsupportedError):
            evolve(h, delta_state(5, 10), [1.0], spectral())

    def test_stepper_matches_dense_expm(self, hn_strong):
        # independent oracle: scipy dense matrix exponential, small chain
        spec = hn_strong(16)
        h = build_hamiltonian(spec)
        rng = np.random.default_rng(11)
        v = rng.normal(size=16) + 1j * rng.normal(size=16)
        from chainwave.states import StateVector

        traj = evolve(h, StateVector(v.copy(), 53), [3.0], stepper(keep_states=True))
        want = expm(-1j * h.dense() * 3.0) @ v
        got = traj.states[0].to_complex128()
        assert np.abs(got - want).max() / np.abs(want).max() < 1e-10

    def test_pbc_stepper_matches_dense_expm(self, hn_strong):
        spec = hn_strong(12, boundary="pbc")
        h = build_hamiltonian(spec)
        v = np.zeros(12, dtype=complex)
        v[4] = 1.0
        from chainwave.states import StateVector

        traj = evolve(h, StateVector(v.copy(), 53), [2.5], stepper(keep_states=True))
        want = expm(-1j * h.dense() * 2.5) @ v
        assert np.abs(traj.states[0].to_complex128() - want).max() < 1e-11

    def test_dimer_spectral_matches_dense_expm(self, ssh_spec):
        spec = ssh_spec(8)
        h = build_hamiltonian(spec)
        v = np.zeros(16, dtype=complex)
        v[0] = 1.0
        from chainwave.states import StateVector

        traj = evolve(h, StateVector(v.copy(), 53), [4.0], spectral(keep_states=True))
        want = expm(-1j * h.dense() * 4.0) @ v
        assert np.abs(traj.states[0].to_complex128() - want).max() < 1e-10

    def test_dimer_spectral_high_precision(self, ssh_spec):
        # the mpmath-backed eigensolver path; cross-checked against expm
        spec = ssh_spec(4)
        h = build_hamiltonian(spec, 106)
        psi0 = delta_state(1, 8, 106)
        traj = evolve(h, psi0, [3.0], spectral(106, keep_states=True))
        want = expm(-1j * h.dense() * 3.0)[:, 0]
        got = traj.states[0].to_complex128()
        assert np.abs(got - want).max() < 1e-12

    def test_dimer_spectral_size_guard(self, ssh_spec):
        spec = ssh_spec(150)
        h = build_hamiltonian(spec, 106)
        with pytest.raises(BackendUnsupportedError):
            evolve(h, delta_state(1, 300, 106), [1.0], spectral(106))


class TestPhysicalInvariants:
    def test_hermitian_norm_conservation(self):
        spec = ModelSpec("hatano_nelson", 60, hn=HnParams(1.0, 1.0))
        h = build_hamiltonian(spec)
        psi0 = gaussian_state(GaussianPacket(30.0, 3.0, 0.5), 60)
        traj = evolve(h, psi0, [25.0, 100.0], stepper(tol=1e-12, keep_states=True))
        n0 = psi0.l2_log10()
        for s in traj.states:
            assert abs(10.0 ** (s.l2_log10() - n0) - 1.0) < 1e-10

    def test_semigroup(self, hn_strong):
        spec = hn_strong(30)
        h = build_hamiltonian(spec)
        psi0 = delta_state(15, 30)
        direct = evolve(h, psi0, [7.0], stepper(keep_states=True)).states[0]
        half = evolve(h, psi0, [3.0], stepper(keep_states=True)).states[0]
        half.time_tag = 0.0
        again = evolve(h, half, [4.0], stepper(keep_states=True)).states[0]
        a, b = again.to_complex128(), direct.to_complex128()
        assert np.abs(a - b).max() / np.abs(b).max() < 1e-8

    def test_growth_rate_of_global_max(self, hn_strong):
        # after front formation, before boundary arrival:
        # d ln max|psi|^2 / dt -> 2 (t_l - t_r) within 5%
        # (212 bits keeps the transform's rounding floor far below the front)
        spec = hn_strong(200)
        psi0 = delta_state(100, 200, 212)
        times = np.arange(10.0, 41.0, 2.0)
        traj = evolve_via_transform(spec, psi0, times, spectral(212))
        peaks = traj.snapshot_max_log10() * np.log(10.0)
        rate = np.polyfit(times, peaks, 1)[0]
        assert abs(rate / (2 * 1.8) - 1.0) < 0.05

    def test_backend_equivalence_including_tails(self, hn_strong):
        spec = hn_strong(40)
        psi0 = delta_state(20, 40, 212)
        dev = cross_validate(spec, psi0, [10.0], stepper(bits=212, tol=1e-11))
        assert dev < 1e-8

    def test_backend_equivalence_at_depth_200(self, hn_strong):
        # deepest certifiable shell at 212 bits: a packet seeded at one edge
        # read out across the chain reaches |psi|^2 ~ 1e-199 at t=16
        spec = hn_strong(100)
        psi0 = delta_state(5, 100, 212)
        traj = evolve_via_transform(spec, delta_state(5, 100, 212), [16.0], spectral(212))
        assert traj.log10_abs2[0].min() < -195.0
        dev = cross_validate(
            spec, psi0, [16.0], stepper(bits=212, tol=1e-11), depth_log10_abs2=-200.0
        )
        assert dev < 1e-8

    def test_delta_front_positions(self, hn_strong):
        # non-reciprocal front: peak near x0 - (t_l + t_r) t while inside
        # the chain, pinned at the amplified edge afterwards
        spec = hn_strong(200)
        psi0 = delta_state(100, 200, 212)
        traj = evolve_via_transform(spec, psi0, [30.0, 60.0], spectral(212))
        peak30 = int(traj.log10_abs2[0].argmax()) + 1
        peak60 = int(traj.log10_abs2[1].argmax()) + 1
        assert abs(peak30 - (100 - 2.2 * 30)) <= 3
        assert peak60 <= 5


class TestPrecisionGuard:
    def fig4_like(self, n=400):
        spec = ModelSpec("hatano_nelson", n, hn=HnParams(2.0, 1.5))
        psi0 = gaussian_state(GaussianPacket(300.0, 3.0, np.pi / 4), n)
        return spec, psi0

    def test_flags_low_precision_clean_gaussian(self):
        spec, psi0 = self.fig4_like()
        with pytest.raises(PrecisionError) as err:
            check_precision(spec, psi0, 100.0, spectral(53))
        assert err.value.suggested_bits >= 106

    def test_passes_wide_mantissa(self):
        spec, psi0 = self.fig4_like()
        psi0 = gaussian_state(GaussianPacket(300.0, 3.0, np.pi / 4), 400, 212)
        check_precision(spec, psi0, 100.0, spectral(212))

    def test_delta_states_pass(self, hn_strong):
        spec = hn_strong(200)
        check_precision(spec, delta_state(100, 200), 250.0, spectral(53))

    def test_disorder_swamping_flagged(self, hn_mild):
        spec = hn_mild(100, disorder=DisorderSpec(1e-15, seed=1))
        psi0 = gaussian_state(GaussianPacket(50.0, 3.0, 0.0), 100)
        with pytest.raises(PrecisionError):
            check_precision(spec, psi0, 40.0, stepper(53))

    def test_allow_low_precision_bypasses(self):
        spec, psi0 = self.fig4_like(100)
        cfg = spectral(53, allow_low_precision=True, keep_states=False)
        # must not raise inside evolve
        evolve_via_transform(spec, psi0, [1.0], cfg)


class TestEdgeSeries:
    def test_delta_at_edge_is_unity_under_max(self, hn_strong):
        spec = hn_strong(30)
        h = build_hamiltonian(spec)
        traj = evolve(h, delta_state(1, 30), [0.0], stepper())
        from chainwave.evolution import edge_amplitude_series

        series = edge_amplitude_series(traj, 1, "max")
        assert series[0, 1] == 1.0

    def test_normalization_modes(self, hn_strong):
        spec = hn_strong(60)
        psi0 = delta_state(30, 60, 106)
        traj = evolve_via_transform(spec, psi0, [0.0, 5.0], spectral(106))
        raw = edge_amplitude_log10(traj, 1, "none")
        rel = edge_amplitude_log10(traj, 1, "max")
        l2 = edge_amplitude_log10(traj, 1, "l2")
        assert rel[1] <= 0 and l2[1] <= 0
        assert raw[0] == -np.inf  # delta started elsewhere
        # max normalization at the argmax site is exactly 0
        mx = traj.log10_abs2[1].argmax() + 1
        assert edge_amplitude_log10(traj, int(mx), "max")[1] == 0.0
