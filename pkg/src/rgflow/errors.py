"""Exception hierarchy shared by every rgflow module."""


class RGFlowError(Exception):
    """Base class for all rgflow errors."""


class NonFiniteInput(RGFlowError, ValueError):
    pass


class SingularDenominator(RGFlowError, ArithmeticError):
    """The nonequilibrium denominator ``J_par/(4 pi hbar nu_f) - 1`` is too close to zero."""


class ZeroGr(RGFlowError, ValueError):
    """The PT invariant ``g_i/g_r`` is undefined at ``g_r = 0``."""


class InvalidControl(RGFlowError, ValueError):
    pass


class DomainZero(RGFlowError, ValueError):
    """Ei is logarithmically singular at the origin."""


class EiOverflow(RGFlowError, OverflowError):
    pass


class DomainLog(RGFlowError, ValueError):
    """A logarithm in a closed-form relation received a nonpositive argument."""


class DegenerateA(RGFlowError, ValueError):
    """``A`` hit one of the poles ``A = 1`` or ``A = 2`` of the PT closed form."""


class InvariantSingular(RGFlowError, ValueError):
    """``inv = 1`` puts the Ei argument of the PT self-energy at zero."""


class InvalidBracket(RGFlowError, ValueError):
    pass


class InvalidGrid(RGFlowError, ValueError):
    pass
