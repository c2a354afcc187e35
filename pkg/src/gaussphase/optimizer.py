"""Deterministic one-dimensional maximisation: coarse grid, then golden section."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonFinite, ParameterError
from . import metrology

INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class ScanResult:
    argmax: float
    max_value: float
    evaluations: int
    bracket: tuple[float, float]


class _Counted:
    def __init__(self, f):
        self.f = f
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        y = float(self.f(x))
        if not math.isfinite(y):
            raise NonFinite(f"objective returned {y!r} at x={x!r}")
        return y


def golden_section_max(f, a, b, tol):
    """Shrink ``[a, b]`` around a maximum of a unimodal ``f`` until ``b - a < tol``.

    Returns ``(x_best, f_best)`` over all probes.
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc >= fd else (d, fd)
    while b - a >= tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            if fc > best[1]:
                best = (c, fc)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            if fd > best[1]:
                best = (d, fd)
        if c >= d:
            # interval collapsed to rounding precision
            break
    return best


def maximize_scalar(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-8, grid: int = 1001) -> ScanResult:
    """Maximise ``f`` on ``[lo, hi]``.

    A uniform grid of ``grid`` points locates the best cell; golden-section
    search then refines inside the neighbouring cells.  The result is a pure
    function of the inputs.
    """
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ParameterError(f"invalid interval [{lo!r}, {hi!r}]")
    if tol <= 0 or grid < 3:
        raise ParameterError("need tol > 0 and at least 3 grid points")
    fc = _Counted(f)
    xs = np.linspace(lo, hi, grid)
    ys = np.array([fc(x) for x in xs])
    i = int(np.argmax(ys))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, grid - 1)]
    x_best, y_best = golden_section_max(fc, a, b, tol)
    if ys[i] >= y_best:
        x_best, y_best = xs[i], ys[i]
    return ScanResult(float(x_best), float(y_best), fc.calls, (float(a), float(b)))


def local_maxima(values) -> int:
    """Number of strict interior local maxima plus maximal end points."""
    v = np.asarray(values, dtype=float)
    count = int(np.sum((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])))
    count += int(v[0] > v[1]) + int(v[-1] > v[-2])
    return count


def argmax_split(n_total: float, tol: float = 1e-8) -> ScanResult:
    """Best displacement share of ``n_total`` photons for a displaced squeezed input."""
    if n_total <= 0:
        raise ParameterError("n_total must be positive")
    return maximize_scalar(lambda x: metrology.split_cfi_squeezed(x, n_total), 0.0, n_total, tol)


def argmax_transmissivity(alpha2: float, phi: float = 0.0, tol: float = 1e-8) -> ScanResult:
    """Best BS2 transmissivity for a coherent input ``i|alpha|``."""
    from .gaussian_core import Coherent, ProtocolConfig, signal_amplitude

    spec = Coherent(signal_amplitude(alpha2))
    return maximize_scalar(lambda T: metrology.cfi_gaussian(ProtocolConfig(spec, phi, T)), 0.0, 1.0, tol)
