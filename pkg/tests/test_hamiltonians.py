import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tcxy import hilbert
from tcxy.errors import ConfigurationError, SingularDetuningError
from tcxy.freefermion import XYParams
from tcxy.hamiltonians import (
    SystemParams,
    build_eff,
    build_eff_rotating,
    build_eff_s,
    build_full,
    spin_chain,
    validity_report,
)

from conftest import TWO_PI, fig2_params


def small(**kw):
    xy = dict(lam=0.8, gamma=0.6, h=0.3, n_spins=3)
    xy.update({k: kw.pop(k) for k in list(kw) if k in xy})
    base = dict(omega0=5.0, omega_a=3.0, g=0.4, n_bar=2.0, fock_cutoff=8)
    base.update(kw)
    return SystemParams(xy=XYParams(**xy), **base)


def comm(a, b):
    return a @ b - b @ a


def ops(p):
    spec = p.hilbert
    return (
        hilbert.collective_spin(spec, "z"),
        hilbert.number_op(spec),
        hilbert.collective_spin(spec, "+"),
        hilbert.collective_spin(spec, "-"),
    )


class TestParams:
    def test_detuning_tracks_field(self):
        p = small(h=0.3)
        assert p.detuning == pytest.approx(5.0 - 0.3 - 3.0)
        assert p.with_field(1.1).detuning == pytest.approx(5.0 - 1.1 - 3.0)

    def test_caption_detuning(self):
        assert fig2_params().detuning / TWO_PI == pytest.approx(10e6, rel=1e-6)

    def test_negative_photon_number(self):
        with pytest.raises(ConfigurationError):
            small(n_bar=-1.0)

    def test_default_cutoff_used(self):
        assert fig2_params().hilbert.fock_cutoff == hilbert.default_cutoff(40.0)

    def test_alpha(self):
        p = small(n_bar=9.0, alpha_phase=math.pi / 2)
        assert p.alpha == pytest.approx(3j)


class TestFull:
    def test_decoupled_spectrum(self):
        p = small(lam=0.0, h=0.0, g=0.0, n_spins=2, fock_cutoff=3)
        evals = np.sort(np.linalg.eigvalsh(build_full(p)))
        expected = sorted(p.omega0 * m + p.omega_a * n for m in (-1, 0, 0, 1) for n in range(4))
        assert np.allclose(evals, expected, atol=1e-12)

    def test_jaynes_cummings_blocks(self):
        # 2x2 block oracle: |up, n>, |down, n+1>
        cut = 10
        p = small(lam=0.0, n_spins=1, fock_cutoff=cut, omega0=4.0, omega_a=3.5, g=0.3, h=0.2)
        w = p.omega0 - p.xy.h
        expected = [-w / 2, w / 2 + p.omega_a * cut]
        for n in range(cut):
            mid = p.omega_a * (n + 0.5)
            split = math.sqrt(((w - p.omega_a) / 2) ** 2 + p.g**2 * (n + 1))
            expected += [mid - split, mid + split]
        assert np.allclose(np.linalg.eigvalsh(build_full(p)), sorted(expected), atol=1e-12)

    def test_excitation_number_conserved_without_chain_coupling(self):
        p = small(lam=0.0)
        jz, num, _, _ = ops(p)
        h = build_full(p)
        assert np.abs(comm(h, jz + num)).max() <= 1e-12 * np.abs(h).max()

    def test_chain_breaks_conservation_when_anisotropic(self):
        p = small(gamma=0.6)
        jz, num, _, _ = ops(p)
        assert np.abs(comm(build_full(p), jz + num)).max() > 1e-3

    def test_periodic_bond_present(self):
        xy = XYParams(1.0, 1.0, 0.0, 3)
        h = spin_chain(xy)
        spec = hilbert.HilbertSpec(3, 0)
        bond = hilbert.pauli_site(spec, 3, "x") @ hilbert.pauli_site(spec, 1, "x")
        # coefficient of sigma^x_3 sigma^x_1 is -lam/2 for gamma = 1
        assert np.trace(h @ bond).real / 8 == pytest.approx(-0.5)


class TestEffective:
    def test_decoupled_eff_s(self):
        p = small(g=0.0)
        expected = np.kron(spin_chain(XYParams(0.8, 0.6, 0.3 - 5.0, 3)), np.eye(9))
        assert np.abs(build_eff_s(p) - expected).max() == 0.0

    def test_exchange_difference(self):
        p = small()
        _, _, jp, jm = ops(p)
        chi = p.g**2 / p.detuning
        assert np.abs(build_eff_s(p) - build_eff(p) - chi * jp @ jm).max() <= 1e-12

    def test_eff_conserves_photons(self):
        for p in (small(), small(gamma=2.0, h=-0.5)):
            _, num, _, _ = ops(p)
            h = build_eff(p)
            assert np.abs(comm(h, num)).max() <= 1e-12 * np.abs(h).max()

    def test_eff_s_conservation(self):
        p = small(lam=0.0)
        jz, num, _, _ = ops(p)
        h = build_eff_s(p)
        assert np.abs(comm(h, num)).max() <= 1e-12 * np.abs(h).max()
        assert np.abs(comm(h, jz)).max() <= 1e-12 * np.abs(h).max()

    def test_eff_diagonal_without_chain_coupling(self):
        p = small(lam=0.0)
        jz, num, _, _ = ops(p)
        h = build_eff(p)
        chi = p.g**2 / p.detuning
        expected = (p.omega0 - p.xy.h) * np.diag(jz).real + 2 * chi * np.diag(jz).real * np.diag(num).real
        assert np.abs(h - np.diag(np.diag(h))).max() == 0.0
        assert np.allclose(np.diag(h).real, expected, atol=1e-12)

    def test_caption_hermitian(self):
        p = fig2_params(n_bar=4.0)
        for build in (build_eff, build_eff_s, build_eff_rotating):
            assert hilbert.is_hermitian(build(p))

    def test_rotating_decoupled(self):
        p = small(g=0.0)
        assert np.abs(build_eff_rotating(p) + p.detuning * hilbert.number_op(p.hilbert)).max() == 0.0

    def test_rotating_term_ordering(self):
        p = fig2_params()
        d, g2, n, nb = abs(p.detuning), p.g**2, p.n_spins, p.n_bar
        assert d * nb > 10 * g2 * n * nb / d
        assert d * nb > 10 * g2 * n * n / d

    @pytest.mark.parametrize("build", [build_eff, build_eff_s, build_eff_rotating])
    def test_zero_detuning(self, build):
        with pytest.raises(SingularDetuningError):
            build(small(omega0=3.3, omega_a=3.0, h=0.3))

    @settings(max_examples=25, deadline=None)
    @given(
        st.floats(0, 2),
        st.floats(0, 3),
        st.floats(-2, 2),
        st.floats(0, 1),
        st.integers(1, 3),
        st.integers(1, 6),
    )
    def test_all_builders_hermitian(self, lam, gamma, h, g, n, cut):
        p = SystemParams(omega0=7.0, omega_a=2.0, g=g, xy=XYParams(lam, gamma, h, n), fock_cutoff=cut)
        for build in (build_full, build_eff, build_eff_s, build_eff_rotating):
            assert hilbert.is_hermitian(build(p))


class TestValidity:
    def test_caption_ratios(self):
        r = validity_report(fig2_params())
        assert r.r1 == pytest.approx((10 / 1.05) ** 2 / 4, rel=1e-6)
        assert r.r1 == pytest.approx(22.7, abs=0.05)
        assert r.r2 == pytest.approx((10 / 1.05) ** 2 * 40 / 16, rel=1e-6)
        assert r.r4 == 10.0
        assert r.passed

    def test_no_coupling(self):
        r = validity_report(small(g=0.0, n_bar=100.0))
        assert math.isinf(r.r1) and math.isinf(r.r2)
        assert r.passed == (min(r.r3, r.r4) >= 10)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.01, 10), st.floats(0.001, 5), st.floats(0, 500), st.floats(1, 20))
    def test_pass_flag(self, delta, g, nb, threshold):
        p = SystemParams(omega0=delta + 1.0, omega_a=1.0, g=g, xy=XYParams(0.1, 1, 0.0, 4), n_bar=nb)
        r = validity_report(p, threshold)
        assert r.passed == (min(r.r1, r.r2, r.r3, r.r4) >= threshold)
        assert r.as_dict()["pass"] == r.passed
