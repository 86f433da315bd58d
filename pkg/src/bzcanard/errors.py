"""Exception hierarchy shared by all modules."""


class BZError(Exception):
    """Base class for numeric failures raised by this package."""


class ParamsError(BZError, ValueError):
    """Invalid model parameters or state."""


class DomainError(BZError, ValueError):
    """A formula was evaluated at a pole or outside its domain."""


class NoHopfRoots(BZError):
    """The trace function has no sign change on (x1, x2).

    ``threshold`` is the largest eps for which Hopf points exist at this q.
    """

    def __init__(self, message, threshold):
        super().__init__(message)
        self.threshold = threshold


class DegenerateFold(BZError):
    """Second derivative of the critical curve vanishes (q close to q*)."""


class SignChangeNotFound(BZError):
    pass


class NoCrossing(BZError):
    """Integration terminated before reaching the requested section crossings."""


class NoConvergence(BZError):
    """Return map did not settle within the allowed number of returns.

    ``last`` holds the estimate built from the final loop, when one exists.
    """

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class ConvergedToEquilibrium(BZError):
    """The orbit collapsed onto the equilibrium: no cycle in this basin."""


class OrbitEscaped(BZError):
    """The orbit left every bounded region (finite-time blow-up)."""


class BracketInvalid(BZError, ValueError):
    pass
