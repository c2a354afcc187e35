"""Phase-space simulation of bosonic Gaussian states through the interferometer.

Quadratures follow ``X = a + a^dag`` and ``P = i(a^dag - a)`` so the vacuum
covariance is the identity and ``[X, P] = 2i``.  Vectors are ordered
``(X1, P1, X2, P2, ...)``.

The interferometer is: input on mode 0 with vacuum on mode 1, a 50:50 splitter
(BS1), a phase shift on mode 0, then a splitter of transmissivity ``T`` (BS2).
Homodyne detection acts on mode 0 afterwards.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ParameterError

SYMMETRY_TOL = 1e-12
UNCERTAINTY_TOL = 1e-9

CONVENTIONS = ("real", "symmetric")


def rotation(angle: float) -> np.ndarray:
    """Phase-space rotation taking the amplitude ``alpha`` to ``alpha * exp(i angle)``."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix (vacuum gives all ones)."""
    n = cov.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ cov))
    return np.sort(ev)[::2]


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix of an ``n_modes`` Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray
    n_modes: int = field(init=False)

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        if mean.ndim != 1 or mean.size % 2 or cov.shape != (mean.size, mean.size):
            raise ParameterError(f"inconsistent shapes mean={mean.shape} cov={cov.shape}")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ParameterError("mean and covariance must be finite")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * scale:
            raise ParameterError("covariance matrix is not symmetric")
        nu = symplectic_eigenvalues(cov)
        if np.min(nu) < 1.0 - UNCERTAINTY_TOL:
            raise ParameterError(f"covariance violates the uncertainty relation (min nu = {np.min(nu):.3g})")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "n_modes", mean.size // 2)

    @classmethod
    def vacuum(cls, n_modes: int = 1) -> "GaussianState":
        return cls(np.zeros(2 * n_modes), np.eye(2 * n_modes))

    def tensor(self, other: "GaussianState") -> "GaussianState":
        n, m = 2 * self.n_modes, 2 * other.n_modes
        cov = np.zeros((n + m, n + m))
        cov[:n, :n] = self.cov
        cov[n:, n:] = other.cov
        return GaussianState(np.concatenate([self.mean, other.mean]), cov)

    def amplitude(self, mode: int = 0) -> complex:
        """Complex mean field ``<a>`` of ``mode``."""
        _check_mode(self, mode)
        return complex(self.mean[2 * mode], self.mean[2 * mode + 1]) / 2

    def is_pure(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(symplectic_eigenvalues(self.cov) - 1.0) < tol))


# --- input state descriptions -------------------------------------------------


def _nonneg(name, value):
    if not (math.isfinite(value) and value >= 0):
        raise ParameterError(f"{name} must be a finite non-negative number, got {value!r}")


@dataclass(frozen=True)
class Coherent:
    alpha: complex

    def __post_init__(self):
        if not cmath.isfinite(complex(self.alpha)):
            raise ParameterError("alpha must be finite")


@dataclass(frozen=True)
class Thermal:
    n_thermal: float

    def __post_init__(self):
        _nonneg("n_thermal", self.n_thermal)


@dataclass(frozen=True)
class SqueezedVacuum:
    r: float
    theta: float = 0.0

    def __post_init__(self):
        _nonneg("r", self.r)


@dataclass(frozen=True)
class SqueezedThermal:
    r: float
    theta: float = 0.0
    n_thermal: float = 0.0

    def __post_init__(self):
        _nonneg("r", self.r)
        _nonneg("n_thermal", self.n_thermal)


@dataclass(frozen=True)
class DisplacedThermal:
    alpha: complex
    n_thermal: float

    def __post_init__(self):
        if not cmath.isfinite(complex(self.alpha)):
            raise ParameterError("alpha must be finite")
        _nonneg("n_thermal", self.n_thermal)


@dataclass(frozen=True)
class DisplacedSqueezed:
    alpha: complex
    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not cmath.isfinite(complex(self.alpha)):
            raise ParameterError("alpha must be finite")
        _nonneg("r", self.r)


StateSpec = Union[Coherent, Thermal, SqueezedVacuum, SqueezedThermal, DisplacedThermal, DisplacedSqueezed]
STATE_CLASSES = (Coherent, Thermal, SqueezedVacuum, SqueezedThermal, DisplacedThermal, DisplacedSqueezed)


def signal_amplitude(photons: float) -> complex:
    """Displacement ``i*sqrt(photons)``; the imaginary axis puts the optimum at phi = 0."""
    _nonneg("photons", photons)
    return 1j * math.sqrt(photons)


def state_parameters(spec: StateSpec) -> tuple[complex, float, float, float]:
    """Return ``(alpha, r, theta, n_thermal)`` for any input class."""
    alpha = complex(getattr(spec, "alpha", 0.0))
    r = float(getattr(spec, "r", 0.0))
    theta = float(getattr(spec, "theta", 0.0))
    n_thermal = float(getattr(spec, "n_thermal", 0.0))
    if not isinstance(spec, STATE_CLASSES):
        raise ParameterError(f"unknown state class {type(spec).__name__}")
    return alpha, r, theta, n_thermal


def total_photons(spec: StateSpec) -> float:
    """Mean photon number of the input state."""
    return mean_photon(make_state(spec), 0)


# --- local oscillator and protocol -----------------------------------------


@dataclass(frozen=True)
class IdealLO:
    """Infinitely strong local oscillator (no finite-amplitude correction)."""


@dataclass(frozen=True)
class FiniteLO:
    beta: complex

    def __post_init__(self):
        b = complex(self.beta)
        if not cmath.isfinite(b) or abs(b) == 0:
            raise ParameterError("finite local oscillator needs 0 < |beta| < inf")


@dataclass(frozen=True)
class ProtocolConfig:
    """Interferometer and measurement settings for one working point."""

    input: StateSpec
    phi: float = 0.0
    T: float = 1.0
    lo: Union[IdealLO, FiniteLO] = IdealLO()
    convention: str = "real"

    def __post_init__(self):
        if not isinstance(self.input, STATE_CLASSES):
            raise ParameterError(f"unknown state class {type(self.input).__name__}")
        if not (0.0 <= self.T <= 1.0):
            raise ParameterError(f"transmissivity must lie in [0, 1], got {self.T!r}")
        if not math.isfinite(self.phi):
            raise ParameterError("phi must be finite")
        if self.convention not in CONVENTIONS:
            raise ParameterError(f"convention must be one of {CONVENTIONS}")
        if not isinstance(self.lo, (IdealLO, FiniteLO)):
            raise ParameterError("lo must be IdealLO or FiniteLO")

    def replace(self, **changes) -> "ProtocolConfig":
        from dataclasses import replace

        return replace(self, **changes)


# --- operations ---------------------------------------------------------------


def make_state(spec: StateSpec) -> GaussianState:
    """Single-mode state D(alpha) S(r, theta) rho_T S^dag D^dag in phase space."""
    alpha, r, theta, n_thermal = state_parameters(spec)
    rot = rotation(theta / 2)
    cov = (2 * n_thermal + 1) * rot @ np.diag([math.exp(-2 * r), math.exp(2 * r)]) @ rot.T
    cov = (cov + cov.T) / 2
    return GaussianState(np.array([2 * alpha.real, 2 * alpha.imag]), cov)


def _check_mode(state: GaussianState, mode: int):
    if not (isinstance(mode, (int, np.integer)) and 0 <= mode < state.n_modes):
        raise ParameterError(f"mode {mode!r} out of range for a {state.n_modes}-mode state")


def passive_symplectic(unitary: np.ndarray) -> np.ndarray:
    """Phase-space matrix of the passive transformation ``a -> U a``."""
    u = np.atleast_2d(np.asarray(unitary, dtype=complex))
    n = u.shape[0]
    s = np.zeros((2 * n, 2 * n))
    for j in range(n):
        for k in range(n):
            re, im = u[j, k].real, u[j, k].imag
            s[2 * j : 2 * j + 2, 2 * k : 2 * k + 2] = [[re, -im], [im, re]]
    return s


def apply_passive(state: GaussianState, modes, unitary) -> GaussianState:
    """Apply a passive linear-optics unitary acting on ``modes``."""
    modes = list(modes)
    for m in modes:
        _check_mode(state, m)
    if len(set(modes)) != len(modes):
        raise ParameterError("modes must be distinct")
    s_small = passive_symplectic(unitary)
    idx = [i for m in modes for i in (2 * m, 2 * m + 1)]
    s = np.eye(2 * state.n_modes)
    s[np.ix_(idx, idx)] = s_small
    cov = s @ state.cov @ s.T
    return GaussianState(s @ state.mean, (cov + cov.T) / 2)


def apply_phase(state: GaussianState, mode: int, phi: float) -> GaussianState:
    """Phase shift ``exp(i phi a^dag a)`` on one mode."""
    return apply_passive(state, [mode], [[cmath.exp(1j * phi)]])


def beamsplitter_unitary(T: float, convention: str = "real") -> np.ndarray:
    """Mode-mixing matrix of a splitter with transmissivity ``T``.

    ``"real"``: ``a' = sqrt(T) a + sqrt(1-T) b``, ``b' = -sqrt(1-T) a + sqrt(T) b``.
    ``"symmetric"``: reflected amplitudes pick up a factor ``i``.
    """
    if not (0.0 <= T <= 1.0):
        raise ParameterError(f"transmissivity must lie in [0, 1], got {T!r}")
    t, rr = math.sqrt(T), math.sqrt(1.0 - T)
    if convention == "real":
        return np.array([[t, rr], [-rr, t]], dtype=complex)
    if convention == "symmetric":
        return np.array([[t, 1j * rr], [1j * rr, t]], dtype=complex)
    raise ParameterError(f"convention must be one of {CONVENTIONS}")


def apply_beamsplitter(state, mode_a, mode_b, T, convention="real") -> GaussianState:
    return apply_passive(state, [mode_a, mode_b], beamsplitter_unitary(T, convention))


def reduce(state: GaussianState, mode: int) -> GaussianState:
    """Marginal of a single mode."""
    _check_mode(state, mode)
    sl = slice(2 * mode, 2 * mode + 2)
    return GaussianState(state.mean[sl], state.cov[sl, sl])


def mean_photon(state: GaussianState, mode: int = 0) -> float:
    _check_mode(state, mode)
    x, p = state.mean[2 * mode], state.mean[2 * mode + 1]
    vxx, vpp = state.cov[2 * mode, 2 * mode], state.cov[2 * mode + 1, 2 * mode + 1]
    return float((x * x + p * p) / 4 + (vxx + vpp - 2) / 4)


def photon_variance(state: GaussianState, mode: int = 0) -> float:
    """Variance of ``a^dag a`` on one mode."""
    single = reduce(state, mode)
    v, d = single.cov, single.mean
    return float((np.trace(v @ v) - 2) / 8 + d @ v @ d / 4)


def quadrature_moments(state: GaussianState, mode: int = 0) -> tuple[float, float]:
    """``(<X>, Var X)`` of one mode."""
    _check_mode(state, mode)
    return float(state.mean[2 * mode]), float(state.cov[2 * mode, 2 * mode])


def after_first_splitter(spec: StateSpec, convention: str = "real") -> GaussianState:
    """Two-mode state after BS1 (input on mode 0, vacuum on mode 1)."""
    state = make_state(spec).tensor(GaussianState.vacuum(1))
    if convention == "real":
        # Feeding the splitter in reversed mode order sends +alpha/sqrt2 into both arms.
        return apply_beamsplitter(state, 1, 0, 0.5, "real")
    return apply_beamsplitter(state, 0, 1, 0.5, convention)


def interferometer(cfg: ProtocolConfig) -> GaussianState:
    """Two-mode state leaving BS2."""
    state = after_first_splitter(cfg.input, cfg.convention)
    state = apply_phase(state, 0, cfg.phi)
    return apply_beamsplitter(state, 0, 1, cfg.T, cfg.convention)


def output_state(cfg: ProtocolConfig) -> GaussianState:
    """Reduced state of the detected output port."""
    return reduce(interferometer(cfg), 0)
