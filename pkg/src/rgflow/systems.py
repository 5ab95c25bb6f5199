"""Coupling types, beta functions and Keldysh rotations.

Two flows live here:

* the nonequilibrium sine-Gordon flow in ``(J_par, J_perp, nu_f)``, driven by
  the denominator ``D = J_par / (4 pi hbar nu_f) - 1``;
* the PT-symmetric flow in ``(K, g_r, g_i)``, together with its exact
  invariant ``inv = g_i / g_r`` and the two-variable reduction that holds
  ``inv`` fixed.

The ``*_field`` functions adapt the beta functions to the state-vector
layout used by :mod:`rgflow.integrate` (always the field order of the
corresponding dataclass).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidControl, NonFiniteInput, SingularDenominator, ZeroGr

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class EngineConfig:
    """Units and guards shared by the flows.

    ``hbar`` sets the unit folded into the nonequilibrium denominator,
    ``eps_sing`` is the smallest admissible ``|D|`` and ``blowup_cap`` the
    coupling magnitude that counts as a runaway flow.
    """

    hbar: float = 1.0
    eps_sing: float = 1e-8
    blowup_cap: float = 1e6

    def __post_init__(self):
        if not (self.hbar > 0 and self.eps_sing > 0 and self.blowup_cap > 1):
            raise InvalidControl(
                f"need hbar > 0, eps_sing > 0, blowup_cap > 1; got {self}")


DEFAULT_CONFIG = EngineConfig()


@dataclass(frozen=True)
class NeqCouplings:
    j_par: float
    j_perp: float
    nu_f: float

    def as_array(self) -> np.ndarray:
        return np.array([self.j_par, self.j_perp, self.nu_f], dtype=float)

    @classmethod
    def from_array(cls, state) -> "NeqCouplings":
        return cls(float(state[0]), float(state[1]), float(state[2]))


@dataclass(frozen=True)
class PTCouplings:
    k: float
    g_r: float
    g_i: float

    @property
    def invariant(self) -> float:
        return pt_invariant(self)

    def as_array(self) -> np.ndarray:
        return np.array([self.k, self.g_r, self.g_i], dtype=float)

    @classmethod
    def from_array(cls, state) -> "PTCouplings":
        return cls(float(state[0]), float(state[1]), float(state[2]))


def _check_finite(*values):
    for v in values:
        if not math.isfinite(v):
            raise NonFiniteInput(f"non-finite coupling {v!r}")


# ---------------------------------------------------------------------------
# nonequilibrium flow

def neq_denominator(s: NeqCouplings, cfg: EngineConfig = DEFAULT_CONFIG) -> float:
    """``D = J_par / (4 pi hbar nu_f) - 1``.

    At ``nu_f = 0`` the ratio is only defined on the line ``J_par = 0``,
    where it is taken as zero (``D = -1``); elsewhere ``D`` is unbounded
    and :class:`SingularDenominator` is raised.
    """
    _check_finite(s.j_par, s.j_perp, s.nu_f)
    if s.nu_f == 0.0:
        if s.j_par == 0.0:
            return -1.0
        raise SingularDenominator("nu_f = 0 with J_par != 0 makes D unbounded")
    return s.j_par / (FOUR_PI * cfg.hbar * s.nu_f) - 1.0


def beta_neq(s: NeqCouplings, cfg: EngineConfig = DEFAULT_CONFIG):
    """Nonequilibrium beta functions.

    Returns
    -------
    tuple of float
        ``(dJ_par, dnu_f, dJ_perp)`` per unit ``log l``, in that order::

            dJ_par  = 1/D - J_perp * D
            dnu_f   = nu_f**2 / D
            dJ_perp = nu_f**2 / D + nu_f * J_perp / D

    Raises
    ------
    SingularDenominator
        If ``|D| <= cfg.eps_sing``.
    NonFiniteInput
        If any coupling is NaN or infinite.
    """
    d = neq_denominator(s, cfg)
    if abs(d) <= cfg.eps_sing:
        raise SingularDenominator(f"|D| = {abs(d):.3g} <= eps_sing = {cfg.eps_sing:g}")
    nu = s.nu_f
    d_jpar = 1.0 / d - s.j_perp * d
    d_nu = nu * nu / d
    d_jperp = nu * nu / d + nu * s.j_perp / d
    return d_jpar, d_nu, d_jperp


def neq_field(cfg: EngineConfig = DEFAULT_CONFIG):
    """Vector field over the state ``[j_par, j_perp, nu_f]``."""
    four_pi_hbar = FOUR_PI * cfg.hbar
    eps = cfg.eps_sing

    def field(y):
        j_par, j_perp, nu = y[0], y[1], y[2]
        if nu == 0.0:
            d = neq_denominator(NeqCouplings(j_par, j_perp, nu), cfg)
        else:
            d = j_par / (four_pi_hbar * nu) - 1.0
        if abs(d) <= eps:
            raise SingularDenominator(f"|D| = {abs(d):.3g} <= eps_sing")
        return np.array([1.0 / d - j_perp * d,
                         nu * nu / d + nu * j_perp / d,
                         nu * nu / d])

    return field


def neq_denominator_fn(cfg: EngineConfig = DEFAULT_CONFIG):
    """``state -> D`` for use as an integrator guard or event."""
    four_pi_hbar = FOUR_PI * cfg.hbar

    def denominator(y):
        return y[0] / (four_pi_hbar * y[2]) - 1.0 if y[2] != 0.0 else -1.0

    return denominator


# ---------------------------------------------------------------------------
# PT-symmetric flow

def beta_pt(s: PTCouplings):
    """PT-symmetric beta functions ``(dK/dl, dg_r/dl, dg_i/dl)``."""
    k, gr, gi = s.k, s.g_r, s.g_i
    _check_finite(k, gr, gi)
    return (-(gr * gr - gi * gi) * k * k,
            (2.0 - k) * gr + 5.0 * gr ** 3 - 5.0 * gi * gi * gr,
            (2.0 - k) * gi - 5.0 * gi ** 3 + 5.0 * gr * gr * gi)


def beta_pt_reduced(k: float, g_r: float, inv: float):
    """Two-variable PT flow with the invariant held fixed.

    ``dK/dl = -g_r**2 (1 - inv**2) K**2`` and
    ``dg_r/dl = (2 - K) g_r + 5 g_r**3 (1 - inv**2)``.
    """
    _check_finite(k, g_r, inv)
    w = 1.0 - inv * inv
    return -g_r * g_r * w * k * k, (2.0 - k) * g_r + 5.0 * g_r ** 3 * w


def pt_invariant(s: PTCouplings) -> float:
    if s.g_r == 0.0:
        raise ZeroGr("g_i/g_r is undefined at g_r = 0")
    return s.g_i / s.g_r


def pt_field():
    """Vector field over ``[k, g_r, g_i]``."""

    def field(y):
        k, gr, gi = y[0], y[1], y[2]
        return np.array([-(gr * gr - gi * gi) * k * k,
                         (2.0 - k) * gr + 5.0 * gr ** 3 - 5.0 * gi * gi * gr,
                         (2.0 - k) * gi - 5.0 * gi ** 3 + 5.0 * gr * gr * gi])

    return field


def pt_reduced_field(inv: float):
    """Vector field over ``[k, g_r]`` at fixed invariant."""
    w = 1.0 - inv * inv

    def field(y):
        k, gr = y[0], y[1]
        return np.array([-gr * gr * w * k * k, (2.0 - k) * gr + 5.0 * gr ** 3 * w])

    return field


# ---------------------------------------------------------------------------
# Keldysh rotations

class RotationLabel(enum.Enum):
    SIGMA_Y = "SigmaY"
    SIGMA_X = "SigmaX"
    SIGMA_Z = "SigmaZ"
    BOSON = "Boson"


@dataclass(frozen=True)
class RotationMatrix:
    entries: np.ndarray
    label: RotationLabel

    def is_unitary(self, tol: float = 1e-12) -> bool:
        u = self.entries
        return bool(np.all(np.abs(u @ u.conj().T - np.eye(2)) <= tol))


_ROTATIONS = {
    RotationLabel.SIGMA_Y: [[1, 1], [-1j, 1j]],
    RotationLabel.SIGMA_X: [[1, 1], [1j, -1j]],
    RotationLabel.SIGMA_Z: [[1, 1], [1, -1]],
    RotationLabel.BOSON: [[1, 1], [1, -1]],
}


def keldysh_rotation(label) -> RotationMatrix:
    """Keldysh rotation taking contour components ``(1, 2)`` to ``(+, -)``.

    ``label`` may be a :class:`RotationLabel` or its string value.
    """
    label = RotationLabel(label)
    entries = np.array(_ROTATIONS[label], dtype=complex) / math.sqrt(2.0)
    entries.setflags(write=False)
    return RotationMatrix(entries, label)
