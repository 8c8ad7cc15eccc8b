"""Exception types shared across the package."""


class TropicalPantsError(Exception):
    """Base class for all package errors."""


class DomainError(TropicalPantsError, ValueError):
    """Input outside the documented domain of an operation."""


class DegeneracyError(TropicalPantsError):
    """A lifting function is not generic: some supporting hyperplane
    touches more lattice points than a simplex allows, or a linear
    system that must be uniquely solvable is singular."""


class CertificationError(TropicalPantsError):
    """An internal consistency certificate failed (cell count, volume,
    face sharing, cross-path agreement)."""


class LemmaViolationError(TropicalPantsError):
    """A combinatorial identity that must hold for the canonical lift
    failed.  Indicates a bug upstream; never masked."""


class CoverageError(TropicalPantsError):
    """A numeric sampling produced no usable points in the requested window."""


class BranchError(TropicalPantsError):
    """Root-branch tracking became ambiguous (two candidate roots
    equidistant from the prediction)."""


class NumericError(TropicalPantsError):
    """A floating-point computation produced non-finite or non-convergent
    results."""
