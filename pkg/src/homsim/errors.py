"""Exception hierarchy.

The CLI maps these onto its documented exit codes; library users can catch
:class:`HomsimError` to get everything raised deliberately by this package.
"""

from __future__ import annotations


class HomsimError(Exception):
    """Base class for all errors raised by homsim."""


class ConfigError(HomsimError):
    """Invalid experiment/curve file: schema violation, bad field, bad bounds."""


class GridTooNarrowError(HomsimError):
    """Frequency grid span too small for the requested pulse; quadrature would truncate."""


class GridMismatchError(HomsimError):
    """Two spectral amplitudes do not share the same grid (or carrier)."""


class FitConvergenceError(HomsimError):
    """Least-squares iteration failed to converge within the iteration cap."""


class DipNotFoundError(HomsimError):
    """Fitted dip depth not significant (visibility below 3 sigma) or unphysical."""


class InfeasibleWidthError(HomsimError):
    """Measured dip narrower than the dispersion-free minimum width."""


class MonteCarloError(HomsimError):
    """Monte-Carlo resampling aborted (trial failure rate above threshold)."""
