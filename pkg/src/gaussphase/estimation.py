"""Monte-Carlo homodyne experiments and maximum-likelihood phase estimation.

Each trial draws ``M`` homodyne outcomes from the exact Gaussian outcome
distribution and maximises the Gaussian log-likelihood over the phase.  The
spread of the estimates over ``K`` trials is compared with the Cramer-Rao bound
``1 / (M * F_c)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import ndtri

from . import metrology
from .errors import BoundaryHit, ParameterError, ZeroSignal
from .gaussian_core import ProtocolConfig
from .optimizer import maximize_scalar

DEFAULT_BUDGET = 10**8
SEARCH_HALF_WIDTH = 0.5
MLE_GRID = 401
MLE_TOL = 1e-8


@dataclass(frozen=True)
class McRun:
    config: ProtocolConfig
    samples_per_trial: int
    trials: int
    seed: int
    true_phi: Optional[float] = None
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.samples_per_trial < 1 or self.trials < 1:
            raise ParameterError("samples_per_trial and trials must be positive")
        if self.trials < 2:
            raise ParameterError("at least two trials are needed for a variance")
        if self.samples_per_trial * self.trials > self.budget:
            raise ParameterError(f"M*K = {self.samples_per_trial * self.trials} exceeds the budget {self.budget}")
        if not (0 <= self.seed < 2**64):
            raise ParameterError("seed must be a 64-bit unsigned integer")
        if self.true_phi is None:
            object.__setattr__(self, "true_phi", self.config.phi)

    @property
    def truth(self) -> ProtocolConfig:
        return self.config.replace(phi=self.true_phi)


@dataclass(frozen=True)
class McReport:
    phi_hat_mean: float
    phi_hat_var: float
    crb: float
    ratio: float
    true_phi: float
    samples_per_trial: int
    trials: int
    seed: int
    boundary_hits: int = 0
    estimates: np.ndarray = field(default=None, repr=False, compare=False)

    def as_dict(self) -> dict:
        return {
            "phi_hat_mean": self.phi_hat_mean,
            "phi_hat_var": self.phi_hat_var,
            "crb": self.crb,
            "ratio": self.ratio,
            "true_phi": self.true_phi,
            "samples_per_trial": self.samples_per_trial,
            "trials": self.trials,
            "seed": self.seed,
            "boundary_hits": self.boundary_hits,
        }


def stream_generator(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for trial ``index``; independent of evaluation order."""
    key = np.random.SeedSequence([seed, index]).generate_state(2, dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def standard_normals(seed: int, index: int, size: int) -> np.ndarray:
    """Inverse-CDF normals from the uniform stream of trial ``index``."""
    u = stream_generator(seed, index).random(size)
    # shift off zero so the inverse CDF stays finite
    return ndtri(u + 2.0**-54)


def _check_signal(cfg: ProtocolConfig):
    # raises ZeroSignal for phase-insensitive inputs
    metrology.delta_phi_error_prop(cfg)


def sample_homodyne(run: McRun) -> np.ndarray:
    """``(K, M)`` array of homodyne outcomes at the true phase."""
    truth = run.truth
    _check_signal(truth)
    mu, var = metrology.output_moments(truth)
    sd = math.sqrt(var)
    out = np.empty((run.trials, run.samples_per_trial))
    for i in range(run.trials):
        out[i] = mu + sd * standard_normals(run.seed, i, run.samples_per_trial)
    return out


def log_likelihood(model, mean, mean_sq):
    """Per-sample Gaussian log-likelihood from sufficient statistics."""

    def ll(phi):
        mu, var, _, _ = model(phi)
        return -0.5 * math.log(var) - (mean_sq - 2 * mu * mean + mu * mu) / (2 * var)

    return ll


def mle_phase(samples, config: ProtocolConfig, search_interval=None) -> float:
    """Maximum-likelihood phase for one stream of homodyne outcomes.

    Raises :class:`BoundaryHit` (carrying the clipped estimate) when the
    maximiser sits on an edge of ``search_interval``.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ParameterError("no samples")
    if search_interval is None:
        search_interval = (config.phi - SEARCH_HALF_WIDTH, config.phi + SEARCH_HALF_WIDTH)
    lo, hi = search_interval
    model = metrology.moment_model(config.input, config.T, config.convention)
    ll = log_likelihood(model, float(x.mean()), float(np.mean(x * x)))
    res = maximize_scalar(ll, lo, hi, MLE_TOL, grid=MLE_GRID)
    edge = 10 * MLE_TOL
    if res.argmax - lo <= edge or hi - res.argmax <= edge:
        raise BoundaryHit(res.argmax)
    return res.argmax


def mc_report(run: McRun, search_interval=None) -> McReport:
    """Run all trials and compare the estimator variance with the Cramer-Rao bound."""
    samples = sample_homodyne(run)
    estimates = np.empty(run.trials)
    hits = 0
    for i in range(run.trials):
        try:
            estimates[i] = mle_phase(samples[i], run.config, search_interval)
        except BoundaryHit as exc:
            estimates[i] = exc.estimate
            hits += 1
    fisher = metrology.cfi_gaussian(run.truth)
    if fisher <= 0:
        raise ZeroSignal("Fisher information vanishes at the true phase")
    crb = 1.0 / (run.samples_per_trial * fisher)
    var = float(np.var(estimates, ddof=1))
    return McReport(
        phi_hat_mean=float(np.mean(estimates)),
        phi_hat_var=var,
        crb=crb,
        ratio=var / crb,
        true_phi=float(run.true_phi),
        samples_per_trial=run.samples_per_trial,
        trials=run.trials,
        seed=run.seed,
        boundary_hits=hits,
        estimates=estimates,
    )
