"""Exception types shared across the package."""


class PaflowError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 3


class InputError(PaflowError):
    exit_code = 2


class ShapeMismatch(InputError):
    pass


class SwitchViolation(PaflowError):
    pass


class DegenerateForm(PaflowError):
    pass


class NotPrimitive(PaflowError):
    pass


class NoConvergence(PaflowError):
    pass


class NotSymplectic(PaflowError):
    pass


class NotReciprocal(PaflowError):
    pass


class NotPseudoAnosov(PaflowError):
    pass


class SignViolation(PaflowError):
    pass


class NotDiagonalizable(PaflowError):
    pass


class NegativeRealEigenvalue(PaflowError):
    pass


class SpectrumOnCut(PaflowError):
    pass


class BadParams(PaflowError):
    pass


class DecompositionMismatch(PaflowError):
    pass


class LeftCone(PaflowError):
    pass


class ZeroLength(PaflowError):
    pass


class NotHyperbolic(PaflowError):
    pass


class SharedEndpoint(PaflowError):
    pass


class NotTransverse(PaflowError):
    pass


class NoRealSolution(PaflowError):
    pass


class DegenerateGluing(PaflowError):
    pass


class DepthTooSmall(PaflowError):
    pass


class NotSimple(PaflowError):
    pass


class BadConfiguration(PaflowError):
    pass
