"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-range input (dimension mismatch, empty set, bad file)."""


class PreconditionError(ValueError):
    """An operation's mathematical hypothesis does not hold on the given input.

    ``verdict`` carries the failed :class:`~selfcontract.curves.PredicateVerdict`
    when the precondition is a curve predicate, ``pair`` the offending index
    pair for pairwise hypotheses.
    """

    def __init__(self, message, verdict=None, pair=None):
        super().__init__(message)
        self.verdict = verdict
        self.pair = pair


class SolverError(RuntimeError):
    """An inner numerical solver did not reach its tolerance."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual
