"""Self-energy matrices, their degeneracy locus, and the PT self-energy.

The Keldysh self-energy reduces to ``weight * M`` with::

    M = [[Jt_par**2 + Jt_par*Jt_perp,  J_par (nu_f + Jt_perp)**2 - 2 Jt_par nu_f],
         [same,                        0                                      ]]

``M`` is real symmetric, so its eigenvalues never coalesce with a shared
eigenvector; "exceptional" points here are the literal degeneracy locus
``gap = sqrt(m11**2 + 4 m12**2) = 0``, which needs ``m11`` and ``m12`` to
vanish together.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidBracket, InvalidGrid, InvariantSingular, NonFiniteInput
from .portrait import GridSpec
from .special import EULER_GAMMA, ei

M_VARIABLES = ("jt_par", "jt_perp", "j_par", "nu_f", "weight")


@dataclass(frozen=True)
class SelfEnergyMatrix:
    m11: float
    m12: float
    m21: float
    m22: float
    eigenvalues: tuple
    gap: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])


def symmetric_eigenvalues(m11: float, m12: float):
    """Ascending eigenvalues of ``[[m11, m12], [m12, 0]]`` and their gap.

    The small eigenvalue comes from the determinant ``-m12**2`` to avoid
    cancellation when ``|m12| << |m11|``; it is formed as
    ``-m12 * (m12 / big)`` so tiny entries do not underflow.
    """
    gap = math.hypot(m11, 2.0 * m12)
    if gap == 0.0:
        return (0.0, 0.0), 0.0
    if m11 >= 0.0:
        big = 0.5 * (m11 + gap)
        return (-m12 * (m12 / big), big), gap
    small = 0.5 * (m11 - gap)
    return (small, -m12 * (m12 / small)), gap


def build_m(jt_par: float, jt_perp: float, j_par: float, nu_f: float,
            weight: float = 1.0) -> SelfEnergyMatrix:
    for v in (jt_par, jt_perp, j_par, nu_f, weight):
        if not math.isfinite(v):
            raise NonFiniteInput(f"non-finite input {v!r}")
    m11 = weight * (jt_par * jt_par + jt_par * jt_perp)
    m12 = weight * (j_par * (nu_f + jt_perp) ** 2 - 2.0 * jt_par * nu_f)
    eigenvalues, gap = symmetric_eigenvalues(m11, m12)
    return SelfEnergyMatrix(m11, m12, m12, 0.0, eigenvalues, gap)


def m_entries(jt_par, jt_perp, j_par, nu_f, weight=1.0):
    """Vectorized ``(m11, m12)``."""
    m11 = weight * (jt_par * jt_par + jt_par * jt_perp)
    m12 = weight * (j_par * (nu_f + jt_perp) ** 2 - 2.0 * jt_par * nu_f)
    return m11, m12


# ---------------------------------------------------------------------------
# degeneracy locus

@dataclass(frozen=True)
class LocusPoint:
    axis1: float
    axis2: float
    gap: float
    row: int
    col: int


def gap_grid(scan: GridSpec) -> np.ndarray:
    """``gap`` on every scan node, shape ``scan.counts`` (row index along ``axes[0]``)."""
    given = set(scan.axes) | set(scan.frozen_dict)
    unknown = sorted(given - set(M_VARIABLES))
    if unknown:
        raise InvalidGrid(f"unknown self-energy variables {unknown}")
    coords = dict(weight=1.0)
    coords.update(scan.frozen_dict)
    missing = [v for v in M_VARIABLES if v not in coords and v not in scan.axes]
    if missing:
        raise InvalidGrid(f"scan leaves {missing} unset")
    a0, a1 = np.meshgrid(scan.axis_values(0), scan.axis_values(1), indexing="ij")
    coords[scan.axes[0]] = a0
    coords[scan.axes[1]] = a1
    m11, m12 = m_entries(**coords)
    return np.hypot(m11, 2.0 * m12) * np.ones_like(a0)


def degeneracy_locus(scan: GridSpec, tol: float) -> list:
    """Scan nodes where the eigenvalue gap of ``M`` is at most ``tol``.

    Returns a list of :class:`LocusPoint` in row-major order; empty when
    the scan misses both analytic lines' crossings.
    """
    gaps = gap_grid(scan)
    v0, v1 = scan.axis_values(0), scan.axis_values(1)
    rows, cols = np.nonzero(gaps <= tol)
    return [LocusPoint(float(v0[r]), float(v1[c]), float(gaps[r, c]), int(r), int(c))
            for r, c in zip(rows, cols)]


def separatrix_jt_par(jt_perp, c: float = 0.0):
    """Line ``Jt_par = -Jt_perp + c`` (``m11 = 0`` at ``c = 0``)."""
    return -np.asarray(jt_perp) + c


def separatrix_j_par(nu_f, a: float, b: float):
    """Line ``J_par = a sqrt(nu_f) - b nu_f``; ``a``, ``b`` are free parameters."""
    nu_f = np.asarray(nu_f)
    return a * np.sqrt(nu_f) - b * nu_f


def analytic_crossings(j_par: float, nu_f: float):
    """Solutions ``(jt_par, jt_perp)`` of ``m11 = 0`` and ``m12 = 0`` at fixed ``(j_par, nu_f)``.

    ``m11 = 0`` splits into ``jt_par = 0`` (then ``jt_perp = -nu_f``) and
    ``jt_par = -jt_perp`` (then a quadratic in ``jt_perp``).
    """
    out = []
    if j_par != 0.0:
        out.append((0.0, -nu_f))
        # j_par s**2 + 2 nu_f (j_par + 1) s + j_par nu_f**2 = 0
        qa, qb, qc = j_par, 2.0 * nu_f * (j_par + 1.0), j_par * nu_f * nu_f
        disc = qb * qb - 4.0 * qa * qc
        if disc >= 0.0:
            for s in sorted({(-qb - math.sqrt(disc)) / (2 * qa), (-qb + math.sqrt(disc)) / (2 * qa)}):
                out.append((-s, s))
    else:
        # m12 = -2 jt_par nu_f, zero only on jt_par = 0 (or nu_f = 0), any jt_perp
        out.append((0.0, math.nan))
    return out


# ---------------------------------------------------------------------------
# PT self-energy

class SigmaPhase(enum.Enum):
    REAL = "real"
    IMAGINARY = "imaginary"
    REJECTED = "complex-rejected"


@dataclass(frozen=True)
class PTSelfEnergyParams:
    g: float
    inv: float
    c1: float
    f_qw: float = 1.0

    def __post_init__(self):
        if not self.g > 0.0:
            raise ValueError(f"g = |g| must be positive, got {self.g!r}")


@dataclass(frozen=True)
class SigmaPT:
    value: complex
    magnitude: float
    phase: SigmaPhase
    radicand: float


def _ei_argument(g: float, inv: float) -> float:
    if inv * inv == 1.0:
        raise InvariantSingular("inv**2 = 1 puts Ei at zero argument")
    return 10.0 * (inv * inv - 1.0) / g


def pt_radicand(g: float, inv: float, c1: float) -> float:
    """The quantity under the square root of the PT self-energy::

        R = 5 I**2 c1 e**(10/g) - 10 I**2 e**(10/g) Ei(x) + 10 e**(10/g) Ei(x)
            + 2 e**(10 I**2/g) - 5 c1 e**(10/g),      x = 10 (I**2 - 1)/g

    grouped as ``e**(10/g) (I**2 - 1)(5 c1 - 10 Ei(x)) + 2 e**(10 I**2/g)``.
    """
    x = _ei_argument(g, inv)
    return math.exp(10.0 / g) * (inv * inv - 1.0) * (5.0 * c1 - 10.0 * ei(x)) \
        + 2.0 * math.exp(10.0 * inv * inv / g)


def pt_radicand_scaled(g: float, inv: float, c1: float) -> float:
    """``R * exp(-10 I**2 / g)``: same sign as ``R``, no overflow for small ``g``."""
    x = _ei_argument(g, inv)
    return math.exp(-x) * (inv * inv - 1.0) * (5.0 * c1 - 10.0 * ei(x)) + 2.0


def pt_radicand_series(g: float, inv: float, c1: float) -> float:
    """Scaled radicand with ``Ei(x) ~ gamma + ln|x| + x`` (small ``x``)."""
    x = _ei_argument(g, inv)
    ei_approx = EULER_GAMMA + math.log(abs(x)) + x
    return math.exp(-x) * (inv * inv - 1.0) * (5.0 * c1 - 10.0 * ei_approx) + 2.0


def c1_for_root(g: float, inv: float) -> float:
    """The ``c1`` that puts a zero of the radicand at ``g``; ``R`` is linear in ``c1``."""
    x = _ei_argument(g, inv)
    return 2.0 * ei(x) - 0.4 * math.exp(x) / (inv * inv - 1.0)


def sigma_pt(p: PTSelfEnergyParams) -> SigmaPT:
    """PT self-energy ``-f/sqrt(5(I**2-1)) exp(-5 I**2/g) sqrt(R)``.

    Evaluated on principal square-root branches. With ``R > 0`` the result
    is imaginary for ``I < 1`` and real for ``I > 1``. A negative radicand
    is not an error: the value is still returned, tagged
    ``SigmaPhase.REJECTED``.
    """
    scaled = pt_radicand_scaled(p.g, p.inv, p.c1)
    prefactor = -p.f_qw / np.sqrt(complex(5.0 * (p.inv * p.inv - 1.0)))
    value = complex(prefactor * np.sqrt(complex(scaled)))
    if scaled < 0.0:
        phase = SigmaPhase.REJECTED
    elif p.inv * p.inv < 1.0 and scaled > 0.0:
        phase = SigmaPhase.IMAGINARY
    else:
        phase = SigmaPhase.REAL
    try:
        radicand = pt_radicand(p.g, p.inv, p.c1)
    except OverflowError:
        radicand = math.copysign(math.inf, scaled)
    return SigmaPT(value, abs(value), phase, radicand)


@dataclass(frozen=True)
class SeparatrixRoot:
    """Zero ``g*`` of the radicand and the two matching points in the ``(g_r, g_i)`` plane."""

    g: float
    g_r: float
    g_i: float

    @property
    def points(self):
        return (self.g_r, self.g_i), (-self.g_r, -self.g_i)


def bisect_root(fn, lo: float, hi: float, rtol: float = 1e-10) -> Optional[float]:
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        return None
    while hi - lo > rtol * max(abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def pt_separatrix(inv: float, c1: float, bracket) -> Optional[SeparatrixRoot]:
    """Zero of the PT radicand in ``g`` on ``bracket``, or ``None`` without a sign change.

    The root is the radius of the circle ``g_r**2 + g_i**2 = g*2``; the line
    ``g_i = inv g_r`` cuts it at the two returned points.
    """
    g_lo, g_hi = (float(b) for b in bracket)
    if not (0.0 < g_lo < g_hi) or not math.isfinite(g_hi):
        raise InvalidBracket(f"need 0 < g_lo < g_hi, got {bracket!r}")
    root = bisect_root(lambda g: pt_radicand_scaled(g, inv, c1), g_lo, g_hi)
    if root is None:
        return None
    g_r = root / math.sqrt(1.0 + inv * inv)
    return SeparatrixRoot(root, g_r, inv * g_r)
