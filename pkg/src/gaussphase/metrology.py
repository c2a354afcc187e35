"""Homodyne moments, sensitivities and Fisher informations of the interferometer.

Two routes compute the same output statistics:

* propagation of the covariance matrix through :mod:`gaussian_core`
  (used for the moments themselves), and
* the transfer coefficient ``g(phi)`` with ``a_out = g a_in + (vacuum)``, which
  gives closed-form phase derivatives for every input class.

The printed closed forms for coherent, displaced thermal and displaced squeezed
inputs are kept as separate functions so they can be checked against both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import gaussian_core as gc
from .errors import MixedState, NoThreshold, ParameterError, ZeroSignal, ZeroVariance
from .gaussian_core import FiniteLO, ProtocolConfig

SIGNAL_FLOOR = 1e-12
FD_STEP = 1e-5
FD_CHECK_STEP = 1e-6
FD_CHECK_RTOL = 1e-4


# --- transfer coefficient ---------------------------------------------------


def transfer_coefficient(T, phi, convention="real"):
    """Return ``(g, dg/dphi)`` for the detected port; works on arrays of ``phi``."""
    t, rr = math.sqrt(T), math.sqrt(1.0 - T)
    sign = 1.0 if convention == "real" else -1.0
    e = np.exp(1j * np.asarray(phi, dtype=float))
    g = (t * e + sign * rr) / math.sqrt(2)
    dg = 1j * t * e / math.sqrt(2)
    return g, dg


def moment_model(spec, T, convention="real"):
    """Return ``phi -> (mu, var, dmu, dvar)`` for the detected quadrature.

    The input state is built once, so the returned callable is cheap enough for
    likelihood scans.  It accepts scalar or array ``phi``.
    """
    state = gc.make_state(spec)
    alpha = state.amplitude(0)
    vxx, vpp, vxp = state.cov[0, 0], state.cov[1, 1], state.cov[0, 1]
    half_sum, half_diff = (vxx + vpp) / 2, (vxx - vpp) / 2

    def moments(phi):
        g, dg = transfer_coefficient(T, phi, convention)
        g2, dg2 = g * g, 2 * g * dg
        gabs2 = np.abs(g) ** 2
        dgabs2 = 2 * np.real(np.conj(g) * dg)
        mu = 2 * np.real(g * alpha)
        dmu = 2 * np.real(dg * alpha)
        var = gabs2 * half_sum + np.real(g2) * half_diff - np.imag(g2) * vxp + 1 - gabs2
        dvar = dgabs2 * (half_sum - 1) + np.real(dg2) * half_diff - np.imag(dg2) * vxp
        return mu, var, dmu, dvar

    return moments


def analytic_moments(spec, T, phi, convention="real"):
    """Mean and variance of ``X_A`` and their phase derivatives, ``(mu, var, dmu, dvar)``."""
    return moment_model(spec, T, convention)(phi)


def _signal_scale(spec):
    return max(1.0, math.sqrt(gc.total_photons(spec)))


def _derivatives(cfg, derivative):
    if derivative == "analytic":
        _, _, dmu, dvar = analytic_moments(cfg.input, cfg.T, cfg.phi, cfg.convention)
        return float(dmu), float(dvar)
    if derivative == "numeric":
        return numeric_derivatives(cfg)
    raise ParameterError("derivative must be 'analytic' or 'numeric'")


def _numeric_derivatives(cfg, step):
    lo = output_moments(cfg.replace(phi=cfg.phi - step))
    hi = output_moments(cfg.replace(phi=cfg.phi + step))
    return (hi[0] - lo[0]) / (2 * step), (hi[1] - lo[1]) / (2 * step)


def numeric_derivatives(cfg: ProtocolConfig) -> tuple[float, float]:
    """Central differences of ``(mean, variance)`` with a step-halving consistency check."""
    coarse = _numeric_derivatives(cfg, FD_STEP)
    fine = _numeric_derivatives(cfg, FD_CHECK_STEP)
    for c, f in zip(coarse, fine):
        if abs(c - f) > FD_CHECK_RTOL * max(1.0, abs(c)):
            raise ParameterError(f"finite-difference derivative unstable ({c!r} vs {f!r})")
    return coarse


# --- homodyne moments --------------------------------------------------------


def output_moments(cfg: ProtocolConfig) -> tuple[float, float]:
    """``(<X_A>, Var X_A)`` by covariance-matrix propagation."""
    return gc.quadrature_moments(gc.output_state(cfg), 0)


def expected_X(cfg: ProtocolConfig) -> float:
    return output_moments(cfg)[0]


def expected_X2(cfg: ProtocolConfig) -> float:
    mu, var = output_moments(cfg)
    return var + mu * mu


def coherent_expected_X(alpha2, T, phi):
    """Closed form for the input ``i|alpha|``."""
    return -math.sqrt(2 * T * alpha2) * math.sin(phi)


def coherent_expected_X2(alpha2, T, phi):
    return T * alpha2 * (1 - math.cos(2 * phi)) + 1


def delta_phi_error_prop(cfg: ProtocolConfig) -> float:
    """Error-propagation sensitivity ``sqrt(Var X) / |d<X>/dphi|``."""
    _, var = output_moments(cfg)
    dmu, _ = _derivatives(cfg, "analytic")
    if abs(dmu) <= SIGNAL_FLOOR * _signal_scale(cfg.input):
        raise ZeroSignal(f"d<X>/dphi vanishes for {type(cfg.input).__name__} at phi={cfg.phi}")
    return math.sqrt(var) / abs(dmu)


def xi_coefficient(cfg: ProtocolConfig) -> float:
    """Photon number at the detected port relative to ``|beta|^2``."""
    if not isinstance(cfg.lo, FiniteLO):
        raise ParameterError("xi is only defined for a finite local oscillator")
    return gc.mean_photon(gc.output_state(cfg), 0) / abs(cfg.lo.beta) ** 2


def delta_phi_finite_lo(cfg: ProtocolConfig, xi: Optional[float] = None) -> float:
    """Sensitivity with the finite local-oscillator term added to the variance.

    ``xi`` defaults to the value implied by the actual output photon number;
    pass a number to pin it (the independent axis of the CFI surface).
    """
    if xi is None:
        xi = xi_coefficient(cfg)
    elif not (math.isfinite(xi) and xi >= 0):
        raise ParameterError("xi must be non-negative")
    _, var = output_moments(cfg)
    dmu, _ = _derivatives(cfg, "analytic")
    if abs(dmu) <= SIGNAL_FLOOR * _signal_scale(cfg.input):
        raise ZeroSignal(f"d<X>/dphi vanishes for {type(cfg.input).__name__} at phi={cfg.phi}")
    return math.sqrt(var + xi) / abs(dmu)


def homodyne_difference_moments(cfg: ProtocolConfig) -> tuple[float, float]:
    """First and second moment of the photocurrent difference after BS3."""
    if not isinstance(cfg.lo, FiniteLO):
        raise ParameterError("difference moments need a finite local oscillator")
    b = abs(cfg.lo.beta)
    out = gc.output_state(cfg)
    mu, var = gc.quadrature_moments(out, 0)
    return b * mu, b * b * (var + mu * mu) + gc.mean_photon(out, 0)


# --- Fisher information -------------------------------------------------------


def cfi_gaussian(cfg: ProtocolConfig, derivative: str = "analytic") -> float:
    """Fisher information of the Gaussian homodyne distribution.

    ``(dmu)^2 / var + 2 (d sqrt(var))^2 / var``; the second term vanishes when
    the variance does not depend on the phase.
    """
    _, var = output_moments(cfg)
    if var <= 0:
        raise ZeroVariance(f"quadrature variance {var!r} is not positive")
    dmu, dvar = _derivatives(cfg, derivative)
    dsd = dvar / (2 * math.sqrt(var))
    return (dmu * dmu + 2 * dsd * dsd) / var


def cfi_surface(alpha2, T_grid, xi_grid) -> np.ndarray:
    """CFI at the working point on a (T, xi) grid; rows follow ``T_grid``."""
    T = np.asarray(T_grid, dtype=float)
    xi = np.asarray(xi_grid, dtype=float)
    if T.size == 0 or xi.size == 0:
        raise ParameterError("grids must be non-empty")
    if np.any((T < 0) | (T > 1)) or np.any(xi < 0) or alpha2 < 0:
        raise ParameterError("need T in [0, 1], xi >= 0 and alpha2 >= 0")
    return 2 * alpha2 * T[:, None] / (1 + xi[None, :])


def qfi_photon_number(spec: gc.StateSpec, convention: str = "real") -> float:
    """Four times the photon-number variance of the phase arm after BS1."""
    if not gc.make_state(spec).is_pure():
        raise MixedState(f"{type(spec).__name__} input is mixed; the photon-variance QFI needs a pure state")
    return 4 * gc.photon_variance(gc.after_first_splitter(spec, convention), 0)


def qfi_displaced_squeezed(alpha2: float, r: float) -> float:
    if r < 0 or alpha2 < 0:
        raise ParameterError("need r >= 0 and alpha2 >= 0")
    return (math.exp(2 * r) + 1) * alpha2 + math.sinh(2 * r) ** 2 / 2 + math.sinh(r) ** 2


# --- displaced inputs -------------------------------------------------------


def sensitivity_displaced_thermal(alpha_abs: float, n_thermal: float, phi: float = 0.0) -> float:
    denom = abs(math.sqrt(2) * alpha_abs * math.cos(phi))
    if denom <= SIGNAL_FLOOR * max(1.0, alpha_abs):
        raise ZeroSignal("displaced thermal state carries no phase signal here")
    return math.sqrt(n_thermal + 1) / denom


def cfi_displaced_thermal(alpha2: float, n_thermal: float, phi: float = 0.0) -> float:
    """Inverse squared displaced-thermal sensitivity; zero when there is no signal."""
    return 2 * alpha2 * math.cos(phi) ** 2 / (n_thermal + 1)


def threshold_displaced_thermal(n_thermal: float) -> float:
    """Smallest ``|alpha|^2`` beating the shot-noise limit at fixed thermal photons."""
    if n_thermal < 0:
        raise ParameterError("n_thermal must be non-negative")
    if n_thermal >= 1:
        raise NoThreshold(f"no displacement reaches the shot-noise limit for n_thermal={n_thermal}")
    return (n_thermal**2 + n_thermal) / (1 - n_thermal)


def _squeeze_noise(r, theta, phi):
    return math.cosh(r) ** 2 - math.sinh(r) * math.cosh(r) * math.cos(2 * phi + theta)


def sensitivity_displaced_squeezed(alpha_abs: float, r: float, theta: float = 0.0, phi: float = 0.0) -> float:
    denom = abs(math.sqrt(2) * alpha_abs * math.cos(phi))
    if denom <= SIGNAL_FLOOR * max(1.0, alpha_abs):
        raise ZeroSignal("displaced squeezed state carries no phase signal here")
    return math.sqrt(_squeeze_noise(r, theta, phi)) / denom


def cfi_displaced_squeezed(alpha2: float, r: float, theta: float = 0.0, phi: float = 0.0) -> float:
    return 2 * alpha2 * math.cos(phi) ** 2 / _squeeze_noise(r, theta, phi)


def threshold_displaced_squeezed(n_squeezed: float) -> float:
    if n_squeezed < 0:
        raise ParameterError("n_squeezed must be non-negative")
    q = math.sqrt(n_squeezed * (n_squeezed + 1))
    denom = 1 - n_squeezed + q
    if denom <= 0:
        raise NoThreshold(f"no finite threshold for n_squeezed={n_squeezed}")
    return n_squeezed * (n_squeezed + 1 - q) / denom


def split_cfi_squeezed(alpha2: float, total: float) -> float:
    """Working-point CFI when ``total`` photons split into displacement and squeezing."""
    if not (0 <= alpha2 <= total):
        raise ParameterError("alpha2 must lie in [0, total]")
    return cfi_displaced_squeezed(alpha2, math.asinh(math.sqrt(total - alpha2)))


def split_cfi_thermal(alpha2: float, total: float) -> float:
    if not (0 <= alpha2 <= total):
        raise ParameterError("alpha2 must lie in [0, total]")
    return cfi_displaced_thermal(alpha2, total - alpha2)


def optimal_alpha2(n_total: float) -> float:
    """Displacement photons maximising the displaced-squeezed CFI at fixed total."""
    if n_total <= 0:
        raise ParameterError("n_total must be positive")
    n = n_total
    return 2 * (1 + 3 * n + 2 * n * n - math.sqrt(1 + 3 * n + 3 * n * n + n**3)) / (3 + 4 * n)


def max_cfi(n_total: float) -> float:
    if n_total <= 0:
        raise ParameterError("n_total must be positive")
    n = n_total
    s = math.sqrt((1 + n) ** 3)
    h1 = 2 * s - 3 * n - 2
    h2 = 2 * s + n + 1
    return (4 + 12 * n + 8 * n * n - 4 * s) / (1 + n + 2 * s - math.sqrt(h1 * h2))


def snl(n_total: float) -> tuple[float, float]:
    """Shot-noise ``(delta_phi, fisher)`` for ``n_total`` photons."""
    if n_total <= 0:
        raise ParameterError("n_total must be positive")
    return 1 / math.sqrt(n_total), float(n_total)


# --- reports ----------------------------------------------------------------


@dataclass(frozen=True)
class SensitivityReport:
    delta_phi: float
    cfi: float
    qfi: Optional[float]
    snl_delta_phi: float
    config: ProtocolConfig
    xi: Optional[float] = None

    def as_dict(self) -> dict:
        spec = self.config.input
        return {
            "state": type(spec).__name__,
            "phi": self.config.phi,
            "T": self.config.T,
            "delta_phi": self.delta_phi,
            "cfi": self.cfi,
            "qfi": self.qfi,
            "snl_delta_phi": self.snl_delta_phi,
            "xi": self.xi,
        }


def sensitivity_report(cfg: ProtocolConfig, xi: Optional[float] = None) -> SensitivityReport:
    """Sensitivity summary; ``cfi`` is the inverse square of ``delta_phi``."""
    if isinstance(cfg.lo, FiniteLO):
        xi_val = xi_coefficient(cfg) if xi is None else xi
        dphi = delta_phi_finite_lo(cfg, xi_val)
    else:
        xi_val = None
        dphi = delta_phi_error_prop(cfg)
    try:
        qfi = qfi_photon_number(cfg.input, cfg.convention)
    except MixedState:
        qfi = None
    n = gc.total_photons(cfg.input)
    return SensitivityReport(
        delta_phi=dphi,
        cfi=1 / dphi**2,
        qfi=qfi,
        snl_delta_phi=snl(n)[0],
        config=cfg,
        xi=xi_val,
    )
