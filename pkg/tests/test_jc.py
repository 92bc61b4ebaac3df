import math

import numpy as np
import pytest

from wga.errors import DegenerateJC, NotSingleMode
from wga.jc import correlated_profile, jc_spectrum, kernel_U_closed, kernel_W_closed, wavefunction_closed
from wga.model import ModelParams
from wga.output import load_preset
from wga.twophoton import Channel, TwoPhotonConfig, kernel_values, wavefunction_residue

from _support import random_single_mode


def test_resonances_figure_a():
    spec = jc_spectrum(ModelParams(Gamma=1e-12, g_a=5, g_b=5))
    np.testing.assert_allclose(spec.lambda_1.real, [-math.sqrt(50), math.sqrt(50)], atol=1e-9)


def test_resonances_figure_b():
    spec = jc_spectrum(load_preset("fig_spectrum_b"))
    np.testing.assert_allclose(spec.lambda_1.real, [-5.07, 9.07], atol=0.01)


def test_two_excitation_block_in_full_spectrum():
    p = load_preset("fig_spectrum_b")
    spec = jc_spectrum(p)
    from wga.linalg import eig_general
    from wga.model import build_heff2

    full = eig_general(build_heff2(p).entries).values
    for lam in spec.lambda_2:
        assert np.min(np.abs(full - lam)) < 1e-9


def test_twomode_rejected():
    with pytest.raises(NotSingleMode):
        jc_spectrum(load_preset("fig_twomode"))


def test_gb_zero_reflected_kernel_vanishes():
    p = ModelParams(Omega=1.0, g_a=3.0)
    cfg = TwoPhotonConfig(2.5, 0.4)
    assert kernel_U_closed(p, cfg, 0.7) == 0
    assert kernel_W_closed(p, cfg, 0.7) != 0


def test_ga_zero_transmitted_correlations_vanish():
    p = ModelParams(Omega=1.0, g_b=3.0)
    cfg = TwoPhotonConfig(2.5, 0.4, Channel.TRANSMITTED)
    x = np.linspace(0, 4, 9)
    np.testing.assert_allclose(wavefunction_closed(p, cfg, x), wavefunction_residue(p, cfg, x), atol=1e-14)
    from wga.twophoton import two_photon_wavefunction

    wf = two_photon_wavefunction(p, cfg)
    np.testing.assert_allclose(wf.bound(x), 0, atol=1e-14)


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("channel", [Channel.REFLECTED, Channel.TRANSMITTED])
def test_closed_forms_match_general(seed, channel):
    rng = np.random.default_rng(seed)
    p = random_single_mode(rng)
    cfg = TwoPhotonConfig(2 * float(p.omega_c) + rng.uniform(-10, 10), rng.uniform(0, 3), channel)
    closed = kernel_U_closed if channel is Channel.REFLECTED else kernel_W_closed
    for dp in rng.uniform(-10, 10, 5):
        assert kernel_values(p, channel, cfg.E, cfg.delta_k, dp) == pytest.approx(closed(p, cfg, dp), rel=1e-8)
    x = np.linspace(0, 6, 13)
    np.testing.assert_allclose(wavefunction_closed(p, cfg, x), wavefunction_residue(p, cfg, x), rtol=1e-8, atol=1e-14)


def test_background_only_far_away():
    p = load_preset("fig_spectrum_a")
    cfg = TwoPhotonConfig(-14.0)
    spec = jc_spectrum(p)
    assert abs(correlated_profile(spec, cfg, 1e3)) < 1e-12


def test_degenerate_jc():
    p = ModelParams(Gamma=1.0, g_a=5, g_b=5)
    spec = jc_spectrum(p)
    object.__setattr__(spec, "lambda_1", np.array([1.0 + 0j, 1.0 + 0j]))
    with pytest.raises(DegenerateJC):
        correlated_profile(spec, TwoPhotonConfig(0.5), 1.0)


@pytest.mark.parametrize("seed", range(4))
def test_jc_levels_are_heff1_eigenvalues(seed):
    from wga.linalg import eig_general
    from wga.model import build_heff1

    p = random_single_mode(np.random.default_rng(seed))
    spec = jc_spectrum(p)
    expected = np.sort_complex(np.append(spec.lambda_1, spec.omega_B))
    got = np.sort_complex(eig_general(build_heff1(p).entries).values)
    np.testing.assert_allclose(got, expected, atol=1e-10)
