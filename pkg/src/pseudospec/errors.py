"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`PseudospecError`.
The CLI maps :class:`InputError` and :class:`BudgetError` to distinct exit codes;
anything else is reported as an internal error.
"""


class PseudospecError(Exception):
    pass


class InputError(PseudospecError, ValueError):
    """Invalid arguments: bad shapes, non-finite entries, violated preconditions."""


class DimensionError(InputError):
    pass


class SingularityError(InputError):
    """A deformation parameter is (numerically) not invertible."""


class WindowTooSmallError(InputError):
    pass


class SamplingError(InputError):
    """Every random draw was rejected."""


class NoDataError(InputError):
    """Nothing left to estimate from after filtering."""


class BudgetError(PseudospecError):
    """An enumeration would exceed its point/word budget."""
