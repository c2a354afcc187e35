"""Brute-force number-basis simulation used to certify the closed forms.

Nothing here imports :mod:`gaussian_core` or :mod:`metrology`; the oracle is an
independent route from input parameters to output statistics.

Conventions: single-mode vectors have length ``D``; two-mode vectors are stored
flat with index ``n_a * D + n_b``.  Beam splitters use the real convention
``a' = sqrt(T) a + sqrt(1-T) b``.  Quadrature densities are reported in units of
``X = a + a^dag`` (vacuum variance 1); Hermite functions are evaluated in
``x = X / sqrt(2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.special import gammaln

from .errors import CutoffTooSmall, GridTooCoarse, ParameterError

DEFAULT_LEAK = 1e-8
UNITARY_TOL = 1e-9
PDF_FLOOR = 1e-300
# densities below this fraction of the peak are round-off from the density contraction
PDF_NOISE = 1e-13
GRID_POINTS = 2001
RICHARDSON_RTOL = 1e-3


@dataclass(frozen=True, eq=False)
class FockVector:
    """Truncated pure state on one or two modes."""

    cutoff: int
    amps: np.ndarray
    n_modes: int = field(init=False)

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).ravel()
        if self.cutoff < 2:
            raise ParameterError("cutoff must be at least 2")
        if amps.size == self.cutoff:
            n_modes = 1
        elif amps.size == self.cutoff**2:
            n_modes = 2
        else:
            raise ParameterError(f"{amps.size} amplitudes do not fit cutoff {self.cutoff}")
        if not np.all(np.isfinite(amps)):
            raise ParameterError("amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "n_modes", n_modes)

    @property
    def norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def tensor(self) -> np.ndarray:
        """Amplitudes as a ``(D, D)`` array indexed ``[n_a, n_b]``."""
        if self.n_modes != 2:
            raise ParameterError("tensor view needs a two-mode vector")
        return self.amps.reshape(self.cutoff, self.cutoff)


@dataclass(frozen=True, eq=False)
class FockDensity:
    """Truncated single-mode density matrix."""

    cutoff: int
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.shape != (self.cutoff, self.cutoff):
            raise ParameterError(f"density shape {rho.shape} does not match cutoff {self.cutoff}")
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > 1e-10:
            raise ParameterError("density matrix is not Hermitian")
        rho = (rho + rho.conj().T) / 2
        rho.flags.writeable = False
        object.__setattr__(self, "matrix", rho)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def components(self, floor: float = 1e-15):
        """Eigen-decomposition ``[(weight, vector), ...]`` with negligible weights dropped."""
        w, v = np.linalg.eigh(self.matrix)
        return [(float(w[k]), v[:, k]) for k in range(len(w)) if w[k] > floor]

    @classmethod
    def from_vector(cls, vec: FockVector) -> "FockDensity":
        if vec.n_modes != 1:
            raise ParameterError("from_vector needs a single-mode vector")
        return cls(vec.cutoff, np.outer(vec.amps, vec.amps.conj()))


SingleMode = Union[FockVector, FockDensity]


# --- operators ----------------------------------------------------------------


def annihilation(D: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, D, dtype=float)), 1)


def _expm_unitary(generator: np.ndarray) -> np.ndarray:
    u = scipy.linalg.expm(generator)
    dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if dev > UNITARY_TOL:
        raise ParameterError(f"matrix exponential lost unitarity ({dev:.2e})")
    return u


def _work_dim(D):
    return 2 * D + 20


def _gaussian_unitary(alpha: complex, r: float, theta: float, dim: int) -> np.ndarray:
    """``D(alpha) S(r, theta)`` in a ``dim``-level basis."""
    a = annihilation(dim)
    ad = a.conj().T
    disp = _expm_unitary(alpha * ad - np.conj(alpha) * a)
    sq = _expm_unitary(0.5 * r * (np.exp(-1j * theta) * (a @ a) - np.exp(1j * theta) * (ad @ ad)))
    return disp @ sq


def _check_leak(kept: float, leak: float, what: str, D: int):
    lost = 1.0 - kept
    if lost > leak:
        raise CutoffTooSmall(
            f"{what} loses {lost:.2e} probability beyond cutoff {D} (budget {leak:.0e}); increase the cutoff"
        )


# --- states -------------------------------------------------------------------


def coherent_fock(alpha: complex, D: int, leak: float = DEFAULT_LEAK) -> FockVector:
    n = np.arange(D)
    alpha = complex(alpha)
    if alpha == 0:
        amps = np.zeros(D, dtype=complex)
        amps[0] = 1.0
        return FockVector(D, amps)
    log_mag = -abs(alpha) ** 2 / 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    amps = np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))
    vec = FockVector(D, amps)
    _check_leak(vec.norm, leak, "coherent state", D)
    return vec


def squeezed_displaced_fock(alpha: complex, r: float, theta: float, D: int, leak: float = DEFAULT_LEAK) -> FockVector:
    """``D(alpha) S(r, theta) |0>`` computed in a padded basis and truncated to ``D``."""
    if r < 0:
        raise ParameterError("r must be non-negative")
    u = _gaussian_unitary(complex(alpha), r, theta, _work_dim(D))
    vec = FockVector(D, u[:D, 0])
    _check_leak(vec.norm, leak, "squeezed displaced state", D)
    return vec


def thermal_fock(n_thermal: float, D: int, leak: float = DEFAULT_LEAK) -> FockDensity:
    if n_thermal < 0:
        raise ParameterError("n_thermal must be non-negative")
    m = np.arange(D)
    if n_thermal == 0:
        p = (m == 0).astype(float)
    else:
        p = np.exp(m * math.log(n_thermal) - (m + 1) * math.log1p(n_thermal))
    rho = FockDensity(D, np.diag(p))
    _check_leak(rho.trace, leak, "thermal state", D)
    return rho


def gaussian_fock(alpha: complex, r: float, theta: float, n_thermal: float, D: int, leak: float = DEFAULT_LEAK):
    """``D S rho_T S^dag D^dag``; returns a vector when the state is pure."""
    if n_thermal == 0:
        if r == 0:
            return coherent_fock(alpha, D, leak)
        return squeezed_displaced_fock(alpha, r, theta, D, leak)
    if n_thermal < 0 or r < 0:
        raise ParameterError("r and n_thermal must be non-negative")
    dim = _work_dim(D)
    m = np.arange(dim)
    weights = np.exp(m * math.log(n_thermal) - (m + 1) * math.log1p(n_thermal))
    u = _gaussian_unitary(complex(alpha), r, theta, dim)[:D, :]
    rho = (u * weights) @ u.conj().T
    out = FockDensity(D, (rho + rho.conj().T) / 2)
    _check_leak(out.trace, leak, "mixed Gaussian state", D)
    return out


# --- two-mode unitaries ---------------------------------------------------------


def bs_fock(T: float, D: int) -> scipy.sparse.csr_matrix:
    """Beam splitter ``exp(theta (a^dag b - a b^dag))`` with ``cos(theta) = sqrt(T)``.

    The generator conserves total photon number, so it is exponentiated block by
    block; the result is a sparse ``D^2 x D^2`` matrix.
    """
    if not (0.0 <= T <= 1.0):
        raise ParameterError(f"transmissivity must lie in [0, 1], got {T!r}")
    theta = math.acos(math.sqrt(T))
    rows, cols, vals = [], [], []
    for total in range(2 * D - 1):
        na = np.arange(max(0, total - D + 1), min(total, D - 1) + 1)
        nb = total - na
        k = na.size
        gen = np.zeros((k, k))
        for i in range(k - 1):
            # a^dag b raises n_a by one
            amp = math.sqrt((na[i] + 1) * nb[i])
            gen[i + 1, i] = amp
            gen[i, i + 1] = -amp
        block = _expm_unitary(theta * gen) if k > 1 else np.ones((1, 1))
        idx = na * D + nb
        rr, cc = np.meshgrid(idx, idx, indexing="ij")
        rows.append(rr.ravel())
        cols.append(cc.ravel())
        vals.append(block.ravel())
    u = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(D * D, D * D)
    )
    return u.tocsr()


def phase_fock(phi: float, D: int) -> np.ndarray:
    return np.diag(np.exp(1j * phi * np.arange(D)))


def product(a: FockVector, b: FockVector) -> FockVector:
    if a.cutoff != b.cutoff or a.n_modes != 1 or b.n_modes != 1:
        raise ParameterError("product needs two single-mode vectors with equal cutoff")
    return FockVector(a.cutoff, np.outer(a.amps, b.amps))


def apply_bs(psi: FockVector, T: float, swap: bool = False, unitary=None) -> FockVector:
    """Beam splitter on a two-mode vector; ``swap`` feeds the modes in reverse order."""
    D = psi.cutoff
    u = bs_fock(T, D) if unitary is None else unitary
    t = psi.tensor()
    if swap:
        t = t.T
    out = (u @ t.ravel()).reshape(D, D)
    if swap:
        out = out.T
    return FockVector(D, out)


def apply_phase_a(psi: FockVector, phi: float) -> FockVector:
    t = psi.tensor() * np.exp(1j * phi * np.arange(psi.cutoff))[:, None]
    return FockVector(psi.cutoff, t)


def reduced_density(psi: FockVector, mode: int = 0) -> FockDensity:
    t = psi.tensor()
    if mode == 0:
        return FockDensity(psi.cutoff, t @ t.conj().T)
    if mode == 1:
        return FockDensity(psi.cutoff, t.T @ t.conj())
    raise ParameterError("mode must be 0 or 1")


def _pure_components(state: SingleMode):
    if isinstance(state, FockVector):
        if state.n_modes != 1:
            raise ParameterError("expected a single-mode state")
        return [(1.0, state.amps)]
    return state.components()


def after_first_splitter(state: SingleMode):
    """Two-mode components after the 50:50 splitter (vacuum on the second port)."""
    D = state.cutoff
    u = bs_fock(0.5, D)
    vac = np.zeros(D, dtype=complex)
    vac[0] = 1.0
    out = []
    for w, v in _pure_components(state):
        psi = FockVector(D, np.outer(v, vac))
        out.append((w, apply_bs(psi, 0.5, swap=True, unitary=u)))
    return out


def protocol_output(state: SingleMode, T: float, phi: float) -> FockDensity:
    """Reduced density of the detected port after BS1, phase and BS2."""
    D = state.cutoff
    u2 = bs_fock(T, D)
    rho = np.zeros((D, D), dtype=complex)
    for w, psi in after_first_splitter(state):
        psi = apply_bs(apply_phase_a(psi, phi), T, unitary=u2)
        rho += w * reduced_density(psi, 0).matrix
    return FockDensity(D, rho)


# --- statistics ----------------------------------------------------------------


def photon_moments(state, mode: int = 0) -> tuple[float, float]:
    """``(<n>, <n^2>)`` on ``mode`` for a single- or two-mode state."""
    if isinstance(state, FockDensity):
        p = np.real(np.diag(state.matrix))
    elif state.n_modes == 1:
        p = np.abs(state.amps) ** 2
    else:
        p = np.sum(np.abs(state.tensor()) ** 2, axis=1 - mode)
    n = np.arange(p.size)
    total = p.sum()
    return float(n @ p / total), float(n**2 @ p / total)


def quadrature_stats(state: SingleMode) -> tuple[float, float]:
    """``(<X>, Var X)`` from matrix elements, with ``X^2 = a^2 + a^dag^2 + 2n + 1``."""
    D = state.cutoff
    rho = FockDensity.from_vector(state).matrix if isinstance(state, FockVector) else state.matrix
    a = annihilation(D)
    ad = a.T
    norm = np.trace(rho).real
    mean = np.trace(rho @ (a + ad)).real / norm
    second = np.trace(rho @ (a @ a + ad @ ad + 2 * np.diag(np.arange(D)))).real / norm + 1
    return float(mean), float(second - mean * mean)


def hermite_functions(D: int, x: np.ndarray) -> np.ndarray:
    """Normalised oscillator eigenfunctions ``psi_n(x)``, shape ``(D, len(x))``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((D, x.size))
    out[0] = math.pi**-0.25 * np.exp(-(x**2) / 2)
    if D > 1:
        out[1] = math.sqrt(2) * x * out[0]
    for n in range(1, D - 1):
        out[n + 1] = math.sqrt(2 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def quadrature_pdf(state: SingleMode, X_grid) -> np.ndarray:
    """Density of the homodyne outcome ``X`` on the given grid."""
    X = np.asarray(X_grid, dtype=float)
    psi = hermite_functions(state.cutoff, X / math.sqrt(2))
    if isinstance(state, FockVector):
        p_x = np.abs(state.amps @ psi) ** 2
    else:
        p_x = np.real(np.einsum("mi,mn,ni->i", psi, state.matrix, psi))
    return p_x / math.sqrt(2)


def default_grid(photons: float, variance: float = 1.0, points: int = GRID_POINTS) -> np.ndarray:
    """Symmetric grid wide enough for the mean and at least ten standard deviations."""
    half = max(2 * math.sqrt(photons) + 6, 2 * math.sqrt(photons) + 10 * math.sqrt(variance))
    return np.linspace(-half, half, points)


class ProtocolPdf:
    """Callable ``phi -> p(X | phi)`` on a fixed grid, built from a number-basis input."""

    def __init__(self, state: SingleMode, T: float, x=None):
        self.state = state
        self.T = T
        if x is None:
            n, n2 = photon_moments(state)
            _, var = quadrature_stats(state)
            x = default_grid(n, max(1.0, var))
        self.x = np.asarray(x, dtype=float)
        self._components = after_first_splitter(state)
        self._u2 = bs_fock(T, state.cutoff)

    def __call__(self, phi: float) -> np.ndarray:
        D = self.state.cutoff
        rho = np.zeros((D, D), dtype=complex)
        for w, psi in self._components:
            out = apply_bs(apply_phase_a(psi, phi), self.T, unitary=self._u2)
            rho += w * reduced_density(out, 0).matrix
        return quadrature_pdf(FockDensity(D, rho), self.x)


def _fisher(pdf_family, x, phi, dphi):
    lo = pdf_family(phi - dphi)
    hi = pdf_family(phi + dphi)
    mid = np.maximum(pdf_family(phi), PDF_FLOOR)
    dp = (hi - lo) / (2 * dphi)
    integrand = np.where(mid > PDF_NOISE * mid.max(), dp * dp / mid, 0.0)
    return float(np.trapezoid(integrand, x))


def numeric_cfi(pdf_family: Callable, phi: float, dphi: float = 1e-4, x=None) -> float:
    """Fisher information ``int (dp/dphi)^2 / p dX`` by central differences.

    ``pdf_family`` maps a phase to densities on ``x`` (taken from
    ``pdf_family.x`` when not given).  A second evaluation at ``dphi / 2``
    guards against step-size error.
    """
    if x is None:
        x = pdf_family.x
    coarse = _fisher(pdf_family, x, phi, dphi)
    fine = _fisher(pdf_family, x, phi, dphi / 2)
    if abs(coarse - fine) > RICHARDSON_RTOL * max(abs(fine), 1e-12):
        raise GridTooCoarse(f"Fisher information changed from {coarse:.6g} to {fine:.6g} on halving dphi")
    return coarse


def intensity_difference_moments(state_a: SingleMode, beta: complex, leak: float = 1e-6) -> tuple[float, float]:
    """First two moments of ``n_c - n_d`` after mixing ``state_a`` with ``|beta>`` on a 50:50 splitter.

    With the real splitter convention the difference operator is
    ``a^dag b + b^dag a``, so a real ``beta`` reads out the ``X`` quadrature.
    """
    D = state_a.cutoff
    lo = coherent_fock(beta, D, leak)
    u = bs_fock(0.5, D)
    idx = np.arange(D)
    diff = idx[:, None] - idx[None, :]
    m1 = m2 = weight = 0.0
    for w, v in _pure_components(state_a):
        psi = apply_bs(FockVector(D, np.outer(v, lo.amps)), 0.5, unitary=u)
        p = np.abs(psi.tensor()) ** 2
        m1 += w * float(np.sum(diff * p))
        m2 += w * float(np.sum(diff**2 * p))
        weight += w * float(p.sum())
    _check_leak(weight, leak, "signal and local oscillator", D)
    return m1 / weight, m2 / weight


def numeric_qfi_pure(state: FockVector) -> float:
    """``4 Var(n_a)`` on the two-mode state after BS1 for a pure input."""
    if not isinstance(state, FockVector):
        raise ParameterError("numeric_qfi_pure needs a pure input vector")
    ((_, psi2),) = after_first_splitter(state)
    n, n2 = photon_moments(psi2, 0)
    return 4 * (n2 - n * n)
