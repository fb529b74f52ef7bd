"""Exception hierarchy for the ptdoublet package.

Every error raised by the library derives from PtDoubletError so callers can
catch package failures with a single except clause. Subclasses are grouped by
the stage that raises them: contour construction, branch tracking, spectral
algebra, wavefunction evaluation, and the finite-difference oracle.
"""

from __future__ import annotations


class PtDoubletError(Exception):
    """Base class for all errors raised by this package."""


class SingularPoint(PtDoubletError):
    """Evaluation requested exactly at a singular point of the map or potential."""


class ContourTooCloseToSingularity(PtDoubletError):
    """A contour grid violates the configured safety margin to the singular set."""


class BranchUndefined(PtDoubletError):
    """A branch-tracked quantity was requested too far from its anchoring grid."""


class NoBoundStates(PtDoubletError):
    """The Eckart well is too shallow to bind any state (A <= 1)."""


class DegenerateCubic(PtDoubletError):
    """The cubic constraint degenerates (beta = 0); use the linear-root path."""


class InvalidDelta(PtDoubletError):
    """A non-positive decay parameter delta was supplied."""


class InadmissibleN(PtDoubletError):
    """The requested nodal count N has no admissible state for these parameters."""


class BadParameters(PtDoubletError):
    """Hypergeometric parameters outside the terminating-series contract."""


class GridTooCoarse(PtDoubletError):
    """Too few grid points for the requested stencil or fit."""


class WindingNotInteger(PtDoubletError):
    """The boundary winding is too far from an integer to certify a node count."""


class TailTooShort(PtDoubletError):
    """Not enough usable tail points for a decay-rate fit."""


class AsymmetricGrid(PtDoubletError):
    """An operation requiring a symmetric grid received an asymmetric one."""


class NoConvergence(PtDoubletError):
    """An iterative eigenvalue computation failed to converge."""


class ShiftIsEigenvalue(PtDoubletError):
    """An inverse-iteration shift is numerically indistinguishable from an eigenvalue."""


class DenseCapExceeded(PtDoubletError):
    """A dense eigensolve was requested above the configured size cap."""
