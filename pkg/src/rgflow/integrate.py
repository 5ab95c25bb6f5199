"""Adaptive Dormand-Prince 5(4) integration of autonomous flows.

The flow parameter ``l`` only increases. A run stops on the first of:

* ``l`` reaching ``l_max``;
* the vector field raising :class:`~rgflow.errors.SingularDenominator`, or
  the step size collapsing while an optional ``guard`` function is about
  to vanish (a pole of the field);
* the state leaving the box ``|y|_inf <= blowup_cap``;
* the proposed step falling below ``h_min``; if the state is then
  e-folding faster than the step scale can resolve (a finite-time
  singularity of the flow) the run is reported as a blowup;
* a sign change of one of the event functions, located by bisection.

Only accepted steps are recorded; there is no dense interpolation.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidControl, NonFiniteInput, SingularDenominator

# Dormand & Prince (1980) tableau.
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# difference between the 5th- and embedded 4th-order weights
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
_A_ROWS = [np.array(row) for row in _A]

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
EVENT_TOL = 1e-10
# a step underflow counts as a pole (or a runaway) when the guard is
# projected to vanish (or the state to e-fold) within this many accepted
# step lengths
_HORIZON = 1e3


class Termination(enum.Enum):
    REACHED_L_MAX = "ReachedLMax"
    SINGULAR_DENOMINATOR = "SingularDenominator"
    BLOWUP = "Blowup"
    STEP_UNDERFLOW = "StepUnderflow"
    EVENT_HIT = "EventHit"


@dataclass(frozen=True)
class StepControl:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    h_init: float = 1e-3
    h_min: float = 1e-12
    l_max: float = 10.0

    def __post_init__(self):
        ok = (self.rel_tol > 0 and self.abs_tol > 0 and 0 < self.h_min <= self.h_init
              and self.l_max > 0 and all(math.isfinite(v) for v in
                                         (self.rel_tol, self.abs_tol, self.h_init,
                                          self.h_min, self.l_max)))
        if not ok:
            raise InvalidControl(f"malformed step control {self}")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Accepted samples of one integration run.

    ``l`` has shape ``(n,)`` and ``states`` shape ``(n, dim)``. ``event_l``
    is set only for ``EVENT_HIT``; ``event_bracket`` then holds the final
    bisection interval. ``note`` carries per-trajectory flags such as
    ``"invariant-untracked"``.
    """

    l: np.ndarray
    states: np.ndarray
    termination: Termination
    event_l: Optional[float] = None
    event_bracket: Optional[tuple] = None
    event_index: Optional[int] = None
    note: str = ""

    @property
    def samples(self):
        return list(zip(self.l.tolist(), self.states))

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def l_end(self) -> float:
        return float(self.l[-1])

    def __len__(self):
        return len(self.l)


def _step(field, y, h, k0, k):
    """One Dormand-Prince step; fills ``k`` and returns ``(y5, err)``."""
    k[0] = k0
    for i in range(1, 7):
        k[i] = field(y + h * (_A_ROWS[i] @ k[:i]))
    return y + h * (_B @ k), h * (_E @ k)


def _error_norm(y, y_new, err, ctrl):
    scale = ctrl.abs_tol + ctrl.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.max(np.abs(err) / scale))


def _locate_event(field, event, y, k0, h, g0, k):
    """Bisect the step size on which ``event`` changes sign."""
    lo, hi = 0.0, h
    y_hi = None
    while hi - lo > EVENT_TOL:
        mid = 0.5 * (lo + hi)
        y_mid, _ = _step(field, y, mid, k0, k)
        g_mid = event(y_mid)
        if g_mid == 0.0:
            lo = hi = mid
            y_hi = y_mid
            break
        if (g_mid > 0) == (g0 > 0):
            lo = mid
        else:
            hi, y_hi = mid, y_mid
    if y_hi is None:
        y_hi, _ = _step(field, y, hi, k0, k)
    return lo, hi, y_hi


def _approaching_pole(guard, ls, ys, h_last):
    if guard is None or len(ls) < 2:
        return False
    g1, g0 = guard(ys[-1]), guard(ys[-2])
    dl = ls[-1] - ls[-2]
    if g1 == 0.0:
        return True
    slope = (g1 - g0) / dl
    if slope == 0.0 or (slope > 0) == (g1 > 0):
        return False
    return abs(g1 / slope) <= _HORIZON * h_last


def _running_away(ls, ys, h_last):
    if len(ls) < 2:
        return False
    n1, n0 = np.max(np.abs(ys[-1])), np.max(np.abs(ys[-2]))
    if not (n1 > n0 > 0):
        return False
    rate = math.log(n1 / n0) / (ls[-1] - ls[-2])
    return 1.0 / rate <= _HORIZON * h_last


def integrate(field: Callable, s0, ctrl: StepControl = StepControl(),
              events: Sequence[Callable] = (), *, blowup_cap: float = 1e6,
              guard: Optional[Callable] = None) -> Trajectory:
    """Integrate ``dy/dl = field(y)`` from ``l = 0``.

    Parameters
    ----------
    field : callable
        Maps a state array to its derivative. May raise
        :class:`SingularDenominator`.
    s0 : array_like
        Initial state.
    ctrl : StepControl
        Tolerances and step bounds. Each accepted step satisfies
        ``|err_i| <= abs_tol + rel_tol * |y_i|`` componentwise.
    events : sequence of callable
        Scalar functions of the state; a sign change stops the run with
        ``EVENT_HIT`` and ``event_l`` bracketed to ``1e-10``.
    blowup_cap : float
        Runaway threshold on ``max |y_i|``.
    guard : callable, optional
        Scalar function vanishing at the poles of ``field``. Lets a step
        underflow next to a pole be reported as ``SINGULAR_DENOMINATOR``.

    Returns
    -------
    Trajectory
    """
    if not isinstance(ctrl, StepControl):
        raise InvalidControl(f"expected StepControl, got {type(ctrl).__name__}")
    y = np.array(s0, dtype=float).reshape(-1)
    if not np.all(np.isfinite(y)):
        raise NonFiniteInput(f"non-finite initial state {y}")

    ls, ys = [0.0], [y]

    def done(termination, **kw):
        return Trajectory(np.array(ls), np.array(ys), termination, **kw)

    try:
        k0 = np.asarray(field(y), dtype=float)
    except SingularDenominator:
        return done(Termination.SINGULAR_DENOMINATOR)

    dim = y.size
    k = np.empty((7, dim))
    g_prev = [ev(y) for ev in events]
    l, h, h_last = 0.0, ctrl.h_init, ctrl.h_init
    l_max = ctrl.l_max

    with np.errstate(all="ignore"):
        while l < l_max:
            remaining = l_max - l
            last_step = h >= remaining
            if last_step:
                h = remaining
            try:
                y_new, err_vec = _step(field, y, h, k0, k)
            except SingularDenominator:
                return done(Termination.SINGULAR_DENOMINATOR)

            if np.all(np.isfinite(y_new)) and np.all(np.isfinite(err_vec)):
                err = _error_norm(y, y_new, err_vec, ctrl)
            else:
                err = math.inf

            if err <= 1.0:
                l_new = l_max if last_step else l + h
                g_new = [ev(y_new) for ev in events]
                hit = None
                for i, (a, b) in enumerate(zip(g_prev, g_new)):
                    if a != 0.0 and (b == 0.0 or (a > 0) != (b > 0)):
                        lo, hi, y_hit = _locate_event(field, events[i], y, k0, h, a, k)
                        if hit is None or hi < hit[1]:
                            hit = (lo, hi, y_hit, i)
                if hit is not None and l + hit[1] < l_max:
                    lo, hi, y_hit, i = hit
                    ls.append(l + hi)
                    ys.append(y_hit)
                    return done(Termination.EVENT_HIT, event_l=l + 0.5 * (lo + hi),
                                event_bracket=(l + lo, l + hi), event_index=i)

                l, y, h_last = l_new, y_new, h
                ls.append(l)
                ys.append(y)
                g_prev = g_new
                k0 = k[6].copy()
                if l >= l_max:
                    break
                if np.max(np.abs(y)) > blowup_cap:
                    return done(Termination.BLOWUP)
                factor = _MAX_FACTOR if err == 0.0 else min(
                    _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err ** -0.2))
            else:
                factor = _MIN_FACTOR if not math.isfinite(err) else max(
                    _MIN_FACTOR, _SAFETY * err ** -0.2)
            h *= factor
            if h < ctrl.h_min or l + h == l:
                if _approaching_pole(guard, ls, ys, h_last):
                    return done(Termination.SINGULAR_DENOMINATOR)
                if _running_away(ls, ys, h_last):
                    return done(Termination.BLOWUP)
                return done(Termination.STEP_UNDERFLOW)

    return done(Termination.REACHED_L_MAX)
