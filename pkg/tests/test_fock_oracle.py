import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussphase import fock_oracle as fo
from gaussphase.errors import CutoffTooSmall, ParameterError

SQRT10 = math.sqrt(10)


def normal_pdf(x, mean, var):
    return np.exp(-((x - mean) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)


# --- states -----------------------------------------------------------------------


def test_coherent_vacuum():
    v = fo.coherent_fock(0, 10)
    np.testing.assert_allclose(v.amps, np.eye(10)[0])


@pytest.mark.parametrize("alpha, D, tol", [(1.0, 30, 1e-10), (1j * SQRT10, 60, 1e-6)])
def test_coherent_photon_number(alpha, D, tol):
    n, _ = fo.photon_moments(fo.coherent_fock(alpha, D))
    assert n == pytest.approx(abs(alpha) ** 2, abs=tol)


def test_coherent_cutoff_too_small():
    with pytest.raises(CutoffTooSmall, match="increase the cutoff"):
        fo.coherent_fock(1j * SQRT10, 12)


def test_squeezed_reduces_to_coherent():
    a = fo.squeezed_displaced_fock(0.7 - 0.4j, 0.0, 0.0, 30)
    b = fo.coherent_fock(0.7 - 0.4j, 30)
    assert abs(np.vdot(a.amps, b.amps)) == pytest.approx(1.0, abs=1e-10)


def test_squeezed_vacuum_photons_and_parity():
    v = fo.squeezed_displaced_fock(0, 0.5, 0.0, 40)
    n, _ = fo.photon_moments(v)
    assert n == pytest.approx(math.sinh(0.5) ** 2, abs=1e-10)
    assert np.max(np.abs(v.amps[1::2])) < 1e-12


def test_thermal_vacuum_projector():
    rho = fo.thermal_fock(0.0, 8)
    np.testing.assert_allclose(rho.matrix, np.diag(np.eye(8)[0]))


def test_thermal_moments_and_purity():
    rho = fo.thermal_fock(1.0, 60)
    n, _ = fo.photon_moments(rho)
    assert n == pytest.approx(1.0, abs=1e-9)
    assert rho.purity() == pytest.approx(1 / 3, abs=1e-6)


def test_gaussian_fock_returns_vector_when_pure():
    assert isinstance(fo.gaussian_fock(1j, 0.3, 0.0, 0.0, 30), fo.FockVector)
    assert isinstance(fo.gaussian_fock(1j, 0.0, 0.0, 0.5, 40), fo.FockDensity)


def test_fock_vector_shape_checks():
    with pytest.raises(ParameterError):
        fo.FockVector(4, np.ones(5))
    with pytest.raises(ParameterError):
        fo.FockDensity(2, np.array([[1, 1], [0, 0]]))


# --- unitaries ----------------------------------------------------------------------


def test_splitter_identity():
    u = fo.bs_fock(1.0, 8).toarray()
    np.testing.assert_allclose(u, np.eye(64), atol=1e-12)


@given(st.floats(0, 1))
@settings(max_examples=15, deadline=None)
def test_splitter_unitary_and_conserving(T):
    D = 8
    u = fo.bs_fock(T, D).toarray()
    np.testing.assert_allclose(u.conj().T @ u, np.eye(D * D), atol=1e-9)
    n = np.arange(D)
    total = np.diag((n[:, None] + n[None, :]).ravel().astype(float))
    assert np.max(np.abs(u @ total - total @ u)) < 1e-9


def test_balanced_splitter_splits_coherent():
    D = 40
    alpha = 1j * 2.0
    vac = fo.coherent_fock(0, D)
    out = fo.apply_bs(fo.product(fo.coherent_fock(alpha, D), vac), 0.5, swap=True)
    half = fo.coherent_fock(alpha / math.sqrt(2), D)
    target = fo.product(half, half)
    assert abs(np.vdot(target.amps, out.amps)) ** 2 > 1 - 1e-6


def test_phase_operator_diagonal():
    p = fo.phase_fock(0.3, 5)
    np.testing.assert_allclose(np.diag(p), np.exp(1j * 0.3 * np.arange(5)))


# --- quadrature densities -------------------------------------------------------------


def test_vacuum_density():
    x = np.linspace(-8, 8, 801)
    p = fo.quadrature_pdf(fo.coherent_fock(0, 10), x)
    assert np.max(np.abs(p - normal_pdf(x, 0, 1))) < 1e-8


@pytest.mark.parametrize("phi", [0.0, 0.4, math.pi / 2])
def test_protocol_density_coherent(phi):
    x = np.linspace(-14, 14, 1401)
    out = fo.protocol_output(fo.coherent_fock(1j * SQRT10, 60), 1.0, phi)
    p = fo.quadrature_pdf(out, x)
    assert np.max(np.abs(p - normal_pdf(x, -math.sqrt(20) * math.sin(phi), 1))) < 1e-6


def test_thermal_density():
    x = np.linspace(-12, 12, 1201)
    p = fo.quadrature_pdf(fo.thermal_fock(1.0, 80), x)
    assert np.max(np.abs(p - normal_pdf(x, 0, 3))) < 1e-8


def test_density_normalised():
    state = fo.gaussian_fock(2j, 0.4, 0.3, 0.0, 50)
    x = fo.default_grid(4.0, 3.0)
    assert np.trapezoid(fo.quadrature_pdf(state, x), x) == pytest.approx(1.0, abs=1e-8)


def test_quadrature_stats_squeezed_second_moment():
    # matches covariance propagation at |alpha|^2 = 4, r = 0.5, phi = 0.1 (see test_metrology)
    from gaussphase import gaussian_core as gc
    from gaussphase import metrology as met

    state = fo.squeezed_displaced_fock(2j, 0.5, 0.0, 60)
    mean, var = fo.quadrature_stats(fo.protocol_output(state, 1.0, 0.1))
    cfg = gc.ProtocolConfig(gc.DisplacedSqueezed(2j, 0.5), 0.1)
    assert var + mean * mean == pytest.approx(met.expected_X2(cfg), abs=1e-7)


# --- Fisher information --------------------------------------------------------------


def test_numeric_cfi_coherent_origin():
    pdf = fo.ProtocolPdf(fo.coherent_fock(1j * SQRT10, 60), 1.0)
    assert fo.numeric_cfi(pdf, 0.0) == pytest.approx(20.0, rel=1e-3)


def test_numeric_cfi_balanced():
    pdf = fo.ProtocolPdf(fo.coherent_fock(1j * SQRT10, 60), 0.5)
    assert fo.numeric_cfi(pdf, 0.0) == pytest.approx(10.0, rel=1e-3)


def test_numeric_cfi_phase_independent():
    x = np.linspace(-6, 6, 601)
    assert fo.numeric_cfi(lambda phi: normal_pdf(x, 0, 1), 0.2, x=x) == pytest.approx(0.0, abs=1e-12)


def test_photon_moments_vacuum():
    vac = fo.product(fo.coherent_fock(0, 6), fo.coherent_fock(0, 6))
    assert fo.photon_moments(vac, 0) == (0.0, 0.0)


def test_qfi_coherent():
    assert fo.numeric_qfi_pure(fo.coherent_fock(1j * SQRT10, 60)) == pytest.approx(20.0, rel=1e-5)


def test_qfi_displaced_squeezed():
    expect = (math.e + 1) + math.sinh(1.0) ** 2 / 2 + math.sinh(0.5) ** 2
    state = fo.squeezed_displaced_fock(1j, 0.5, 0.0, 40)
    assert fo.numeric_qfi_pure(state) == pytest.approx(expect, rel=1e-3)


def test_qfi_rejects_mixed():
    with pytest.raises(ParameterError):
        fo.numeric_qfi_pure(fo.thermal_fock(0.5, 30))


# --- intensity difference -------------------------------------------------------------


def test_difference_vacuum():
    vac = fo.coherent_fock(0, 10)
    assert fo.intensity_difference_moments(vac, 0.0) == pytest.approx((0.0, 0.0), abs=1e-14)


@pytest.mark.parametrize("beta2", [1.0, 4.0, 9.0])
def test_difference_moments_coherent(beta2):
    gamma = 0.6 + 0.8j
    mean, second = fo.intensity_difference_moments(fo.coherent_fock(gamma, 30), math.sqrt(beta2))
    x_mean = 2 * gamma.real
    assert mean == pytest.approx(math.sqrt(beta2) * x_mean, abs=1e-5)
    assert second == pytest.approx(beta2 * (x_mean**2 + 1) + abs(gamma) ** 2, abs=1e-4)
