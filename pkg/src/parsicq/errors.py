"""Exception hierarchy shared by the library and the command line tool."""


class CQError(Exception):
    """Base class for all errors raised by :mod:`parsicq`."""


class ConfigurationError(CQError, ValueError):
    """Invalid parameters, mismatched inputs or unsupported combinations."""


class NumericalError(CQError, ArithmeticError):
    """A computation hit a pole, a branch cut or produced non-finite values."""


class KernelPoleError(NumericalError):
    """A Laplace-domain kernel was evaluated at (or next to) a pole."""
