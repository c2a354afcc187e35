"""Exception types raised across the package."""


class GaussphaseError(Exception):
    """Base class for all package errors."""


class ParameterError(GaussphaseError, ValueError):
    """A state, protocol or grid parameter is outside its valid domain."""


class ZeroSignal(GaussphaseError):
    """The homodyne mean does not depend on the phase at the requested point."""


class ZeroVariance(GaussphaseError):
    """The quadrature variance vanished (unphysical for valid states)."""


class MixedState(GaussphaseError):
    """A pure-state formula was requested for a mixed input."""


class NoThreshold(GaussphaseError):
    """No finite displacement threshold exists for the requested state."""


class CutoffTooSmall(GaussphaseError):
    """Truncated Fock basis loses more probability than the leakage budget allows."""


class GridTooCoarse(GaussphaseError):
    """Finite-difference Fisher information failed its Richardson consistency check."""


class NonFinite(GaussphaseError):
    """An objective function returned NaN or infinity."""


class BoundaryHit(GaussphaseError):
    """The likelihood maximiser landed on the edge of the search interval.

    The clipped estimate is kept on ``estimate`` so callers may still use it.
    """

    def __init__(self, estimate, message=None):
        self.estimate = float(estimate)
        super().__init__(message or f"maximiser hit the search boundary at {self.estimate:.6g}")
