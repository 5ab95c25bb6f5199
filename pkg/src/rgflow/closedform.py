"""Implicit first integrals of the RG flows, written as residual functionals.

A residual is ``lhs - rhs - constant`` for one of the closed-form
relations; a state lies on the curve labelled by ``constant`` when the
residual is zero, and the relation is a first integral of an ODE when the
residual stays constant along that ODE's solutions.

Sign conventions were fixed by finite-difference checks of each
antiderivative and are exported as constants:

* :data:`JPERP_INTEGRAND_SIGN` - the ``(J_perp, nu_f)`` relation integrates
  ``d ln J_perp = -(1 + t) / (t**2 (t**2 + t - 1)) dt`` with ``t = J_perp/nu_f``;
  the ``+`` sign is not a first integral of it.
* :data:`JPAR_INTEGRAND_SIGN` - the ``(J_par~, nu_f)`` relation integrates
  ``dJ / dnu_f = +(1 + J**3) / nu_f**2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateA, DomainLog, NonFiniteInput
from .integrate import StepControl, Termination
from .portrait import System, run_cell
from .special import ei  # noqa: F401  re-exported

SQRT5 = math.sqrt(5.0)
SQRT3 = math.sqrt(3.0)
# branch point of the second logarithm, the positive root of t**2 + t - 1
JPERP_BRANCH_T = (SQRT5 - 1.0) / 2.0
JPERP_INTEGRAND_SIGN = -1
JPAR_INTEGRAND_SIGN = +1
_LOG_GUARD = 8.0 * np.finfo(float).eps


class RelationKind(enum.Enum):
    JPERP_NUF = "JperpNuf"
    JPAR_NUF = "JparNuf"
    PT_SOLUTION = "PTSolution"


@dataclass(frozen=True)
class ImplicitRelation:
    """A closed-form relation together with its integration constant."""

    kind: RelationKind
    constant: float

    def __post_init__(self):
        if not math.isfinite(self.constant):
            raise NonFiniteInput("integration constant must be finite")

    def residual(self, *args, **kwargs) -> float:
        fn = {RelationKind.JPERP_NUF: residual_jperp_nuf,
              RelationKind.JPAR_NUF: residual_jpar_nuf,
              RelationKind.PT_SOLUTION: residual_pt_solution}[self.kind]
        return fn(*args, self.constant, **kwargs)


def _log(arg: float, scale: float, absolute: bool, what: str) -> float:
    if abs(arg) <= _LOG_GUARD * scale:
        raise DomainLog(f"log argument {what} = {arg!r} is at its branch point")
    if arg < 0.0:
        if not absolute:
            raise DomainLog(f"log argument {what} = {arg!r} is negative; pass absolute=True "
                            "to use its magnitude")
        arg = -arg
    return math.log(arg)


# ---------------------------------------------------------------------------
# (J_perp, nu_f)

def jperp_nuf_rhs(t: float, nu_f: float, absolute: bool = False) -> float:
    """Right-hand side of the ``log(J_perp)`` relation, ``t = J_perp / nu_f``."""
    if t <= 0.0:
        raise DomainLog(f"t = {t!r} must be positive")
    first = _log(2.0 * t + SQRT5 + 1.0, SQRT5 + 1.0, absolute, "2t+sqrt5+1")
    second = _log(-2.0 * t + SQRT5 - 1.0, SQRT5 + 1.0, absolute, "-2t+sqrt5-1")
    return (-1.0 / t + 2.0 * math.log(t)
            - (5.0 - 2.0 * SQRT5) / 5.0 * first
            - (2.0 * SQRT5 + 5.0) / 5.0 * second)


def residual_jperp_nuf(j_perp: float, nu_f: float, C: float, absolute: bool = False) -> float:
    """``log(J_perp) - rhs(J_perp / nu_f) - C``.

    The second logarithm is real only for ``t < (sqrt5 - 1)/2``. Beyond it
    :class:`DomainLog` is raised unless ``absolute=True``, which switches to
    ``log|.|`` (the caller opts into the other branch explicitly).
    """
    if not (j_perp > 0.0 and nu_f > 0.0):
        raise DomainLog(f"need j_perp > 0 and nu_f > 0, got {j_perp!r}, {nu_f!r}")
    t = j_perp / nu_f
    return math.log(j_perp) - jperp_nuf_rhs(t, nu_f, absolute) - C


def separated_jperp_integrand(t: float) -> float:
    """``(1 + t) / (t**2 (t**2 + t - 1))``, the separated integrand before the sign."""
    return (1.0 + t) / (t * t * (t * t + t - 1.0))


def separated_jperp_partial_fractions(t: float) -> float:
    """Same integrand assembled from ``-2/t - 1/t**2 + (2t + 3)/(t**2 + t - 1)``."""
    return -2.0 / t - 1.0 / (t * t) + (2.0 * t + 3.0) / (t * t + t - 1.0)


def flow_jperp_nuf_slope(j_perp: float, nu_f: float) -> float:
    """``dJ_perp / dnu_f`` from dividing the nonequilibrium beta functions.

    Both carry the same denominator, so the ratio is ``1 + J_perp / nu_f``.
    This does not match the separated integrand; both are kept as written.
    """
    return 1.0 + j_perp / nu_f


# ---------------------------------------------------------------------------
# (J_par~, nu_f)

def jpar_nuf_lhs(jt_par: float) -> float:
    if jt_par == -1.0:
        raise DomainLog("ln(J + 1) is singular at J = -1")
    return (math.atan((2.0 * jt_par - 1.0) / SQRT3) / SQRT3
            + math.log(abs(jt_par + 1.0)) / 3.0
            - math.log(jt_par * jt_par - jt_par + 1.0) / 6.0)


def residual_jpar_nuf(jt_par: float, nu_f: float, c: float) -> float:
    """``lhs(J) - (-1/nu_f + c)``; its ``J``-derivative is ``1 / (1 + J**3)``.

    For ``J < -1`` the ``ln(J + 1)`` term uses ``|J + 1|``.
    """
    if nu_f == 0.0:
        raise DomainLog("nu_f = 0")
    return jpar_nuf_lhs(jt_par) + 1.0 / nu_f - c


def jpar_nuf_slope(jt_par: float, nu_f: float) -> float:
    """``dJ/dnu_f`` implied by the relation: ``(1 + J**3) / nu_f**2``."""
    return JPAR_INTEGRAND_SIGN * (1.0 + jt_par ** 3) / (nu_f * nu_f)


# ---------------------------------------------------------------------------
# PT closed form

def pt_a_variable(g_r, inv):
    """``a = 5 g_r**2 (1 - inv**2)``."""
    return 5.0 * np.square(g_r) * (1.0 - inv * inv)


def pt_A(inv: float) -> float:
    """``A = 10 (1 - inv**2)``."""
    return 10.0 * (1.0 - inv * inv)


def residual_pt_solution(a: float, k: float, A: float, rhs_const: float) -> float:
    """Residual of the closed-form PT relation in ``(a, K)``::

        -log(a/K)/(A-1) + (3-2A)/((A-1)(2-A)) log((2-A) a/K) - log(a)/2 - rhs_const

    Raises
    ------
    DegenerateA
        At ``A = 1`` or ``A = 2``.
    DomainLog
        If ``a``, ``K`` or ``(2 - A) a / K`` is not positive.
    """
    if A == 1.0 or A == 2.0:
        raise DegenerateA(f"A = {A} is a pole of the closed form")
    if not (a > 0.0 and k > 0.0):
        raise DomainLog(f"need a > 0 and K > 0, got a={a!r}, K={k!r}")
    ratio = a / k
    shifted = (2.0 - A) * ratio
    if shifted <= 0.0:
        raise DomainLog(f"(2 - A) a/K = {shifted!r} must be positive")
    coef = (3.0 - 2.0 * A) / ((A - 1.0) * (2.0 - A))
    return (-math.log(ratio) / (A - 1.0) + coef * math.log(shifted)
            - 0.5 * math.log(a) - rhs_const)


def pt_solution_substituted_slope(a: float, k: float) -> float:
    """``d ln K / da = -(1 + a / (1 - a/K))``, the substituted form the closed form is built on."""
    return -(1.0 + a / (1.0 - a / k))


def pt_solution_level_exponent(A: float) -> float:
    """Exponent ``p`` of the level curves ``K ~ a**p`` of :func:`residual_pt_solution`.

    The residual depends on ``(a, K)`` only through ``log a`` and ``log K``
    linearly, so its level sets are power laws with ``p = 2 - A/2``.
    """
    return 2.0 - 0.5 * A


def pt_reduced_slope(a: float, k: float) -> float:
    """``d ln K / da`` of the reduced PT flow, ``-K / (10 (2 - K + a))``.

    Obtained by dividing the reduced beta functions after substituting
    ``a = 5 g_r**2 (1 - inv**2)``; independent of ``inv``.
    """
    return -k / (10.0 * (2.0 - k + a))


# ---------------------------------------------------------------------------
# Hermitian KT limit

class KTRegime(enum.Enum):
    WEAK = "weak-coupling"
    STRONG = "strong-coupling"
    FIXED = "fixed-point"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class KTReport:
    k0: float
    g0: float
    regime: KTRegime
    termination: Termination
    l_end: float
    k_end: float
    g_end: float


def hermitian_kt_limit_check(k0: float, g0: float, l_max: float = 50.0,
                             ctrl: StepControl | None = None) -> KTReport:
    """Integrate the PT flow on ``g_i = 0`` and classify the KT side.

    ``STRONG`` means the run blew up; ``WEAK`` that it reached ``l_max``
    with ``|g_r|`` below its start; ``FIXED`` that nothing moved
    (``g0 = 0``).
    """
    ctrl = ctrl or StepControl(l_max=l_max)
    traj = run_cell(System.PT, (k0, g0, 0.0), ctrl)
    k_end, g_end = float(traj.final[0]), float(traj.final[1])
    if traj.termination is Termination.BLOWUP:
        regime = KTRegime.STRONG
    elif traj.termination is Termination.REACHED_L_MAX:
        if g0 == 0.0:
            regime = KTRegime.FIXED
        elif abs(g_end) < abs(g0):
            regime = KTRegime.WEAK
        else:
            regime = KTRegime.UNRESOLVED
    else:
        regime = KTRegime.UNRESOLVED
    return KTReport(k0, g0, regime, traj.termination, traj.l_end, k_end, g_end)
