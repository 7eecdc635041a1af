"""Exception and warning types shared by every module."""


class CasimirError(Exception):
    """Base class for errors raised by this package."""


class PoleError(CasimirError, ArithmeticError):
    """An analytic continuation was evaluated exactly at one of its poles."""


class DomainError(CasimirError, ValueError):
    """An argument lies outside the domain where the routine is defined or certified."""


class EdgeError(DomainError):
    """A side point lies on an edge of the box, where the normal is undefined."""


class BracketError(CasimirError):
    """A root or extremum search was given a bracket that does not enclose one."""


class FitError(CasimirError):
    """A least-squares fit was ill-posed or badly conditioned."""


class ContinuationNote(UserWarning):
    """A value was returned through analytic continuation rather than the integral."""
