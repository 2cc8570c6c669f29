import numpy as np
import pytest

from chainwave.errors import UnsupportedModelError
from chainwave.models import (
    DisorderSpec,
    HnParams,
    ModelSpec,
    SshParams,
    build_hamiltonian,
    obc_spectrum_hn,
)
from chainwave.transform import (
    SimilarityTransform,
    hermitian_counterpart,
    make_transform,
    pseudo_hermiticity_residual,
)
from conftest import dense_eig_sorted


class TestMakeTransform:
    def test_chain_diag_pattern(self, hn_strong):
        s = make_transform(hn_strong(3))
        r = np.sqrt(0.1)
        assert s.r == pytest.approx(0.3162278, abs=5e-8)
        assert np.allclose(s.diag, [r, r ** 2, r ** 3], rtol=1e-14)

    def test_reciprocal_identity(self):
        spec = ModelSpec("hatano_nelson", 5, hn=HnParams(1.0, 1.0))
        s = make_transform(spec)
        assert s.r == 1.0
        assert np.allclose(s.diag, np.ones(5))

    def test_dimer_diag_pattern(self):
        spec = ModelSpec("nh_ssh", 2, ssh=SshParams(0.4, 1.0, 0.5))
        s = make_transform(spec)
        r = np.sqrt(0.65 / 0.15)
        assert s.r == pytest.approx(2.081666, abs=5e-7)
        assert np.allclose(s.diag, [1.0, r, r, r ** 2], rtol=1e-14)

    def test_rejects_pbc(self, hn_strong):
        with pytest.raises(UnsupportedModelError):
            make_transform(hn_strong(6, boundary="pbc"))

    def test_roundtrip(self, hn_strong):
        # S(S^-1 v) = v to working precision
        s = make_transform(hn_strong(40))
        rng = np.random.default_rng(5)
        v = rng.normal(size=40) + 1j * rng.normal(size=40)
        back = np.exp(s.log_diag) * (np.exp(-s.log_diag) * v)
        assert np.allclose(back, v, rtol=1e-13)


class TestHermitianCounterpart:
    def test_chain_uniform_hopping(self, hn_strong):
        spec = hn_strong(10)
        hp = hermitian_counterpart(build_hamiltonian(spec), make_transform(spec))
        t0 = np.sqrt(0.4)
        assert np.allclose(hp.upper, t0, rtol=1e-15)
        assert np.allclose(hp.lower, t0, rtol=1e-15)
        assert hp.upper[0] == pytest.approx(0.6324555, abs=5e-8)

    def test_hermitian_input_unchanged(self):
        spec = ModelSpec("hatano_nelson", 6, hn=HnParams(1.0, 1.0))
        h = build_hamiltonian(spec)
        hp = hermitian_counterpart(h, make_transform(spec))
        assert np.array_equal(hp.dense(), h.dense())

    def test_dimer_effective_hoppings(self):
        spec = ModelSpec("nh_ssh", 2, ssh=SshParams(0.4, 1.0, 0.5))
        hp = hermitian_counterpart(build_hamiltonian(spec), make_transform(spec))
        tt1 = np.sqrt(0.65 * 0.15)
        assert hp.upper[0] == pytest.approx(tt1, rel=1e-14)
        assert hp.upper[0] == pytest.approx(0.3122499, abs=5e-8)
        assert hp.upper[1] == pytest.approx(1.0, rel=1e-15)
        assert np.array_equal(hp.upper, hp.lower)

    def test_hermitization_residual_within_ulps(self, hn_strong, ssh_spec):
        # max |H' - H'^dagger| <= 10 ulp of the hopping scale
        for spec in (hn_strong(30), ssh_spec(15)):
            hp = hermitian_counterpart(build_hamiltonian(spec), make_transform(spec))
            gap = np.abs(hp.upper - hp.lower).max()
            assert gap <= 10 * np.spacing(np.abs(hp.upper).max())

    def test_spectrum_preserved(self, hn_strong):
        # eigenvalues of H and H' agree to 1e-10 relative for n <= 50
        spec = hn_strong(50)
        h = build_hamiltonian(spec, 106)
        hp = hermitian_counterpart(h, make_transform(spec, 106))
        ev_h = dense_eig_sorted(h).real
        ev_hp = dense_eig_sorted(hp).real
        scale = np.abs(ev_h).max()
        assert np.abs(ev_h - ev_hp).max() / scale < 1e-10
        ana = np.sort(obc_spectrum_hn(spec).energies.real)
        assert np.abs(ev_hp - ana).max() / scale < 1e-10


class TestResidual:
    def test_clean_chain_residual_tracks_precision(self, hn_strong):
        spec = hn_strong(10)
        h = build_hamiltonian(spec)
        for bits in (53, 106, 212):
            s = make_transform(spec, bits)
            assert pseudo_hermiticity_residual(h, s) <= 10.0 ** (-0.3 * bits)

    def test_disorder_commutes(self, hn_strong):
        clean = hn_strong(12)
        dirty = hn_strong(12, disorder=DisorderSpec(1e-3, seed=3))
        s = make_transform(clean, 106)
        h = build_hamiltonian(dirty, 106)
        assert pseudo_hermiticity_residual(h, s) <= 1e-30

    def test_wrong_ratio_detected(self, hn_strong):
        spec = hn_strong(10)
        h = build_hamiltonian(spec)
        good = make_transform(spec)
        bad = SimilarityTransform(
            log_diag=np.arange(1, 11) * np.log(good.r + 1e-3),
            r=good.r + 1e-3,
            precision_bits=53,
            model=spec,
            exact_pattern=False,
        )
        assert pseudo_hermiticity_residual(h, bad) > 1e-4
