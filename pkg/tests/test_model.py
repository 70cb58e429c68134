"""Chain diagonalization, coupling geometry, and derived Markov parameters."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vibrolang import (
    DiscreteBath,
    DomainError,
    ThermalState,
    chain_eigenmodes,
    derived_markov_params,
    kelvin_to_angfreq,
    vibron_phonon_couplings,
)
from vibrolang.model import (
    HBAR_OVER_KB_K_PS,
    build_chain,
    markov_rate_band_form,
    pair_vibron_phonon_couplings,
    polaron_shift_discrete,
)


def _bath(n=200, k0=12.25, gamma_m=0.05, **kw):
    omega_max = 2.0 * np.sqrt(k0 / 1.0)
    dk = k0 * np.sqrt(4.0 * gamma_m / omega_max)
    return DiscreteBath(n_cells=n, k0=k0, m0=1.0, dk=dk, **kw)


class TestChainModes:
    def test_band_edges_and_monotonicity(self):
        bath = _bath()
        w = chain_eigenmodes(bath)
        assert np.all(np.diff(w) > 0)
        assert w[0] > 0
        assert w[-1] < bath.omega_max
        # half-chain of length 2N+1
        assert len(w) == 2 * bath.n_cells + 1

    def test_sine_dispersion(self):
        bath = _bath(n=50)
        k = np.arange(1, 2 * bath.n_cells + 2)
        expect = bath.omega_max * np.sin(
            np.pi * k / (2.0 * (2 * bath.n_cells + 2))
        )
        np.testing.assert_allclose(chain_eigenmodes(bath), expect, rtol=1e-12)

    def test_even_parity_modes_decouple(self):
        bath = _bath(n=64)
        alphas = vibron_phonon_couplings(bath, nu=1.0)
        k = np.arange(1, 2 * bath.n_cells + 2)
        assert np.all(alphas[k % 2 == 1] == 0.0)
        assert np.any(alphas[k % 2 == 0] != 0.0)

    def test_coupling_sum_rule(self):
        # sum_k alpha_k^2 nu / omega_k = (N/(N+1)) Gamma_m omega_max / 2
        gamma_m, nu = 0.05, 1.0
        bath = _bath(n=300, gamma_m=gamma_m)
        freqs = chain_eigenmodes(bath)
        alphas = vibron_phonon_couplings(bath, nu=nu)
        total = np.sum(alphas**2 * nu / freqs)
        n = bath.n_cells
        expect = (n / (n + 1.0)) * gamma_m * bath.omega_max / 2.0
        np.testing.assert_allclose(total, expect, rtol=1e-10)

    def test_pair_couplings_mirror_symmetry(self):
        bath = _bath(n=40)
        a1, a2 = pair_vibron_phonon_couplings(bath, 1.0, 2)
        # modes are symmetric or antisymmetric about the center site
        np.testing.assert_allclose(np.abs(a1), np.abs(a2), atol=1e-12)

    def test_pair_couplings_reject_bad_j(self):
        bath = _bath(n=40)
        with pytest.raises(DomainError):
            pair_vibron_phonon_couplings(bath, 1.0, 0)

    def test_pair_coupling_weight_conserved(self):
        # the symmetric/antisymmetric split preserves the single-molecule
        # total weight: (a1^2 + a2^2)/1 = 2 alpha^2 summed over the band
        bath = _bath(n=120)
        alphas = vibron_phonon_couplings(bath, nu=1.0)
        a1, a2 = pair_vibron_phonon_couplings(bath, 1.0, 1)
        np.testing.assert_allclose(
            np.sum(a1**2 + a2**2), 2.0 * np.sum(alphas**2), rtol=1e-8
        )


class TestDerivedParams:
    def test_markov_rate_formula(self):
        bath = _bath(k0=12.25, gamma_m=0.05)
        nu_s, gamma_m = derived_markov_params(bath, nu=1.0)
        np.testing.assert_allclose(gamma_m, 0.05, rtol=1e-12)
        np.testing.assert_allclose(
            gamma_m, markov_rate_band_form(bath), rtol=1e-12
        )
        np.testing.assert_allclose(
            nu_s, gamma_m * bath.omega_max / 2.0, rtol=1e-12
        )

    def test_omega_max(self):
        bath = DiscreteBath(n_cells=10, k0=12.25, m0=1.0, dk=1.0)
        np.testing.assert_allclose(bath.omega_max, 7.0, rtol=1e-14)

    def test_polaron_shift_discrete(self):
        bath = _bath(n=60, ktot=3.0, dx=0.1)
        modes = build_chain(bath, nu=1.0)
        np.testing.assert_allclose(
            polaron_shift_discrete(modes),
            np.sum(modes.lambda_k**2 * modes.frequencies),
            rtol=1e-12,
        )

    def test_invalid_bath(self):
        with pytest.raises(DomainError):
            DiscreteBath(n_cells=0, k0=1.0, m0=1.0, dk=0.1)
        with pytest.raises(DomainError):
            DiscreteBath(n_cells=5, k0=-1.0, m0=1.0, dk=0.1)
        with pytest.raises(DomainError):
            DiscreteBath(n_cells=5, k0=1.0, m0=1.0, dk=0.1, qfactor=0.0)


class TestThermalState:
    def test_kelvin_conversion(self):
        np.testing.assert_allclose(
            kelvin_to_angfreq(HBAR_OVER_KB_K_PS), 1.0, rtol=1e-12
        )

    def test_occupation_zero_temperature(self):
        th = ThermalState(temperature=0.0)
        assert th.coth_half_beta(1.0) == 1.0

    @given(st.floats(0.05, 50.0), st.floats(0.05, 20.0))
    @settings(max_examples=60, deadline=None)
    def test_occupation_detailed_balance(self, temp, omega):
        # nbar/(nbar+1) = exp(-beta omega)
        th = ThermalState(temperature=temp)
        nbar = th.occupation(omega)
        np.testing.assert_allclose(
            nbar / (nbar + 1.0), np.exp(-omega / temp), rtol=1e-10
        )

    @given(st.floats(0.01, 10.0), st.floats(0.1, 10.0))
    @settings(max_examples=60, deadline=None)
    def test_from_occupation_round_trip(self, nbar, omega):
        th = ThermalState.from_occupation(nbar, omega)
        np.testing.assert_allclose(th.occupation(omega), nbar, rtol=1e-9)

    def test_coth_classical_limit(self):
        th = ThermalState(temperature=2.0)
        np.testing.assert_allclose(
            th.coth_half_beta(1e-6), 2.0 * 2.0 / 1e-6, rtol=1e-6
        )
