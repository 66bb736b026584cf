"""Exception types shared across the package."""


class MixcertError(Exception):
    """Base class for all mixcert errors."""


class NonStochasticError(MixcertError):
    """A transition matrix has a negative entry or a row that does not sum to 1."""


class TooSmallError(MixcertError):
    """The state space must contain at least two states."""


class NotErgodicError(MixcertError):
    """The chain is not ergodic (reducible or periodic), or its stationary solve failed."""


class NotReversibleError(MixcertError):
    """The chain violates detailed balance beyond tolerance."""


class BadInitError(MixcertError):
    """Invalid initial state or initial distribution for simulation."""


class BadParamsError(MixcertError):
    """Chain family or experiment parameters out of range."""


class PathTooShortError(MixcertError):
    """A sample path with fewer than two observations cannot be processed."""


class EmptyResultError(MixcertError):
    """Subsampling would leave fewer than two observations."""


class DomainError(MixcertError):
    """Numeric argument outside its admissible range."""


class NotSymmetricError(MixcertError):
    """Matrix handed to the symmetric eigensolver is not symmetric within tolerance."""


class NoConvergenceError(MixcertError):
    """The eigensolver failed to converge."""


class SingularSystemError(MixcertError):
    """A linear system was singular or its solution failed the residual check."""


class AxiomViolationError(MixcertError):
    """A computed group inverse violates the defining axioms beyond tolerance."""


class SourceExhaustedError(MixcertError):
    """A path source ran out of observations before the requested prefix length."""


class DivergedError(MixcertError):
    """Iterative total-variation mixing search exceeded its iteration cap."""
