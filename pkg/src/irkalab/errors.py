"""Exception and warning types shared across the package."""


class IrkaLabError(Exception):
    """Base class for all errors raised by this package."""


class SingularShift(IrkaLabError):
    """A shifted matrix s*I - A is numerically singular at the requested point."""


class RepeatedPoles(IrkaLabError):
    """Eigenvalue separation fell below the deflation tolerance."""


class UnstableSystem(IrkaLabError):
    """A system required to be stable has an eigenvalue with Re >= 0."""


class UnstableMatrix(IrkaLabError):
    """A matrix required to be Hurwitz has an eigenvalue with Re >= 0."""


class ResidualTooLarge(IrkaLabError):
    """A direct solve produced a residual above the acceptance threshold."""


class RankDeficientBasis(IrkaLabError):
    """Assembled projection basis has numerical rank below its column count."""


class SingularGramian(IrkaLabError):
    """The oblique-projection matrix W^T V is numerically singular."""


class MirroredShiftInvalid(IrkaLabError):
    """Mirroring an unstable reduced pole produced a left-half-plane shift."""


class PoleCollision(IrkaLabError):
    """A pole of the full model coincides with a pole of the reduced model."""


class DegenerateError(IrkaLabError):
    """The error system is numerically zero; its zero structure is undefined."""


class NotAFixedPoint(IrkaLabError):
    """A reduced model does not satisfy the first-order optimality residuals."""


class NonZipReduced(IrkaLabError):
    """A reduced model lacks the real-negative-pole / positive-residue form."""


class FdMismatchWarning(UserWarning):
    """Analytic and finite-difference shift-map Jacobians disagree."""
