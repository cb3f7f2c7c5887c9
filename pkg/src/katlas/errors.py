"""Exception hierarchy shared by the solver, algebra and atlas layers."""


class KatlasError(Exception):
    """Base class for all domain errors raised by katlas."""


class InvalidNonlinearity(KatlasError, ValueError):
    pass


class NoPositiveZero(KatlasError):
    pass


class PreconditionError(KatlasError, ValueError):
    pass


class IntegratorFailure(KatlasError):
    pass


class Inconclusive(KatlasError):
    pass


class BracketNotFound(KatlasError):
    pass


class NoConvergence(KatlasError):
    pass


class TailTooShort(KatlasError):
    pass


class NotApplicable(KatlasError):
    pass


class DegenerateRequiresA(KatlasError, ValueError):
    pass


class OutOfRange(KatlasError, ValueError):
    pass


class ContinuumCase(KatlasError):
    """Raised by lift when N=4, a=0 and b*D = 1: every rescaling is a solution."""


class NotOnContinuum(KatlasError, ValueError):
    pass


class OutOfRegime(KatlasError, ValueError):
    pass


class EmptyAtlas(KatlasError):
    pass
