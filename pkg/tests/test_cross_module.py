"""Invariants that tie the phase-space model, the closed forms and the number-basis oracle together."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussphase import fock_oracle as fo
from gaussphase import gaussian_core as gc
from gaussphase import metrology as met

SPECS = [
    gc.Coherent(1.2j),
    gc.Coherent(gc.signal_amplitude(10.0)),
    gc.Thermal(0.8),
    gc.SqueezedVacuum(0.6, 0.5),
    gc.SqueezedThermal(0.4, 1.0, 0.3),
    gc.DisplacedThermal(1.5j, 0.5),
    gc.DisplacedSqueezed(2j, 0.5, 0.3),
]


def oracle_state(spec, D):
    alpha, r, theta, nt = gc.state_parameters(spec)
    return fo.gaussian_fock(alpha, r, theta, nt, D)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: type(s).__name__)
def test_input_moments_match_oracle(spec):
    state = oracle_state(spec, 80)
    g = gc.make_state(spec)
    n, _ = fo.photon_moments(state)
    mean, var = fo.quadrature_stats(state)
    assert n == pytest.approx(gc.mean_photon(g), abs=1e-6)
    assert (mean, var) == pytest.approx(gc.quadrature_moments(g), abs=1e-6)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: type(s).__name__)
@pytest.mark.parametrize("T, phi", [(1.0, 0.0), (0.6, 0.4), (0.3, -1.1)])
def test_output_moments_match_oracle(spec, T, phi):
    out = fo.protocol_output(oracle_state(spec, 70), T, phi)
    g = gc.output_state(gc.ProtocolConfig(spec, phi, T))
    mean, var = fo.quadrature_stats(out)
    assert (mean, var) == pytest.approx(gc.quadrature_moments(g), abs=1e-6)
    assert fo.photon_moments(out)[0] == pytest.approx(gc.mean_photon(g), abs=1e-6)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: type(s).__name__)
def test_density_moments_match_phase_space(spec):
    state = oracle_state(spec, 80)
    g = gc.make_state(spec)
    m, v = gc.quadrature_moments(g)
    x = fo.default_grid(gc.mean_photon(g), v)
    p = fo.quadrature_pdf(state, x)
    mean = np.trapezoid(x * p, x)
    var = np.trapezoid((x - mean) ** 2 * p, x)
    assert (mean, var) == pytest.approx((m, v), abs=1e-6)


@pytest.mark.parametrize("T", [0.3, 0.7, 1.0])
@pytest.mark.parametrize("phi", [0.0, 0.5, 1.0])
def test_numeric_cfi_on_coherent_grid(T, phi):
    pdf = fo.ProtocolPdf(fo.coherent_fock(gc.signal_amplitude(10.0), 60), T)
    expect = 2 * T * 10 * math.cos(phi) ** 2
    assert fo.numeric_cfi(pdf, phi) == pytest.approx(expect, rel=1e-3)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: type(s).__name__)
def test_cutoff_doubling_gate(spec):
    a = fo.quadrature_stats(fo.protocol_output(oracle_state(spec, 50), 0.7, 0.3))
    b = fo.quadrature_stats(fo.protocol_output(oracle_state(spec, 100), 0.7, 0.3))
    assert a == pytest.approx(b, rel=1e-6, abs=1e-9)


# --- phase-space invariants -----------------------------------------------------------


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 1), st.floats(0, 2))
def test_phase_composition(p1, p2, r, nt):
    s = gc.make_state(gc.SqueezedThermal(r, 0.4, nt))
    s = gc.GaussianState(s.mean + np.array([0.7, -0.2]), s.cov)
    a = gc.apply_phase(gc.apply_phase(s, 0, p1), 0, p2)
    b = gc.apply_phase(s, 0, p1 + p2)
    np.testing.assert_allclose(a.mean, b.mean, atol=1e-10)
    np.testing.assert_allclose(a.cov, b.cov, atol=1e-10)


@given(st.floats(0, 1.2), st.floats(0, 2), st.floats(0, 1), st.floats(0, 1.5), st.floats(-3, 3))
@settings(max_examples=60)
def test_symplectic_spectrum_preserved(r, nt, T, r2, phi):
    s = gc.make_state(gc.SqueezedThermal(r, 0.2, nt)).tensor(gc.make_state(gc.SqueezedVacuum(r2)))
    before = gc.symplectic_eigenvalues(s.cov)
    after = gc.apply_beamsplitter(gc.apply_phase(s, 0, phi), 0, 1, T)
    np.testing.assert_allclose(np.sort(gc.symplectic_eigenvalues(after.cov)), np.sort(before), atol=1e-9)


# --- closed-form optimum ----------------------------------------------------------------


@pytest.mark.parametrize("n", [0.1, 1.0, 10.0, 100.0])
def test_optimal_split_beats_fine_grid(n):
    best = met.split_cfi_squeezed(met.optimal_alpha2(n), n)
    grid = np.linspace(0, n, 100_001)
    m = n - grid
    values = 2 * grid / (1 + m - np.sqrt(m * (1 + m)))
    assert best >= values.max() * (1 - 1e-12)


@pytest.mark.parametrize("n", [0.1, 1.0, 10.0, 100.0, 1000.0])
def test_max_cfi_consistent_with_optimum(n):
    assert met.max_cfi(n) == pytest.approx(met.split_cfi_squeezed(met.optimal_alpha2(n), n), rel=1e-9)
