"""Self-checks run by ``rgflow verify``.

Each check integrates or evaluates something with the package and
compares it against an independent route (an exact invariant, a
quadrature, a closed-form root). Checks never raise; failures come back as
``CheckResult(passed=False)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sp_integrate

from . import closedform as cf
from .integrate import StepControl, integrate
from .portrait import GridSpec, System, run_cell
from .spectra import analytic_crossings, degeneracy_locus
from .special import ei

GROUPS = ("invariant", "residual", "ei", "degeneracy")
INVARIANT_RTOL = 1e-9
RESIDUAL_DRIFT = 1e-6
EI_RTOL = 1e-10


@dataclass(frozen=True)
class CheckResult:
    group: str
    name: str
    passed: bool
    detail: str


def ei_quadrature(x: float) -> float:
    """Ei by adaptive quadrature; Cauchy-weighted principal value for ``x > 0``."""
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=500)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sp_integrate.IntegrationWarning)
        if x < 0.0:
            val, _ = sp_integrate.quad(lambda t: math.exp(-t) / t, -x, np.inf, **opts)
            return -val
        tail, _ = sp_integrate.quad(lambda t: math.exp(t) / t, -np.inf, -1.0, **opts)
        pv, _ = sp_integrate.quad(math.exp, -1.0, x, weight="cauchy", wvar=0.0, **opts)
    return tail + pv


def pt_random_states(n: int, seed: int = 0):
    """``n`` PT states with ``K in [0.5, 4]``, ``g_r in [0.01, 0.5]``, ``g_i in [-0.5, 0.5]``."""
    rng = np.random.default_rng(seed)
    return np.column_stack([rng.uniform(0.5, 4.0, n), rng.uniform(0.01, 0.5, n),
                            rng.uniform(-0.5, 0.5, n)])


def invariant_drift(traj) -> float:
    """``max |I(l) - I(0)| / max(1, |I(0)|)`` along a PT trajectory."""
    inv = traj.states[:, 2] / traj.states[:, 1]
    return float(np.max(np.abs(inv - inv[0])) / max(1.0, abs(inv[0])))


def check_invariant(ctrl: StepControl, n: int = 5):
    worst = max(invariant_drift(run_cell(System.PT, s, ctrl)) for s in pt_random_states(n))
    yield CheckResult("invariant", "pt-invariant-drift", worst <= INVARIANT_RTOL,
                      f"max relative drift {worst:.3g} (limit {INVARIANT_RTOL:g})")
    traj = run_cell(System.PT, (1.5, 0.1, 0.0), ctrl)
    worst = float(np.max(np.abs(traj.states[:, 2])))
    yield CheckResult("invariant", "hermitian-closure", worst <= 1e-12, f"max |g_i| {worst:.3g}")


def _drift(values) -> float:
    values = np.asarray(values)
    return float(values.max() - values.min())


def jperp_separated_trajectory(t0: float, j0: float, t1: float, ctrl: StepControl):
    """Solve ``d ln J / dt = sign * integrand(t)``; returns ``(t, J)`` samples."""
    sign = cf.JPERP_INTEGRAND_SIGN

    def field(y):
        return np.array([1.0, sign * cf.separated_jperp_integrand(y[0])])

    traj = integrate(field, [t0, math.log(j0)], StepControl(
        ctrl.rel_tol, ctrl.abs_tol, min(ctrl.h_init, t1 - t0), ctrl.h_min, t1 - t0))
    return traj.states[:, 0], np.exp(traj.states[:, 1])


def jpar_implied_trajectory(nu0: float, j0: float, nu1: float, ctrl: StepControl):
    """Solve ``dJ/dnu = (1 + J**3)/nu**2``; returns ``(nu, J)`` samples."""

    def field(y):
        return np.array([1.0, cf.jpar_nuf_slope(y[1], y[0])])

    traj = integrate(field, [nu0, j0], StepControl(
        ctrl.rel_tol, ctrl.abs_tol, min(ctrl.h_init, nu1 - nu0), ctrl.h_min, nu1 - nu0))
    return traj.states[:, 0], traj.states[:, 1]


def check_residuals(ctrl: StepControl):
    t, j = jperp_separated_trajectory(0.1, 0.05, 0.5, ctrl)
    d = _drift([cf.residual_jperp_nuf(jj, jj / tt, 0.0) for tt, jj in zip(t, j)])
    yield CheckResult("residual", "jperp-nuf-constancy", d <= RESIDUAL_DRIFT, f"drift {d:.3g}")

    nu, j = jpar_implied_trajectory(1.0, 0.2, 3.0, ctrl)
    d = _drift([cf.residual_jpar_nuf(jj, n, 0.0) for n, jj in zip(nu, j)])
    yield CheckResult("residual", "jpar-nuf-constancy", d <= RESIDUAL_DRIFT, f"drift {d:.3g}")

    A = cf.pt_A(0.95)
    p = cf.pt_solution_level_exponent(A)
    a = np.geomspace(0.01, 0.2, 7)
    d = _drift([cf.residual_pt_solution(aa, 2.0 * (aa / 0.01) ** p, A, 0.0) for aa in a])
    yield CheckResult("residual", "pt-solution-level-set", d <= RESIDUAL_DRIFT, f"drift {d:.3g}")


def check_ei(n: int = 40):
    worst = 0.0
    for x in np.geomspace(1e-3, 50.0, n):
        for s in (1.0, -1.0):
            ref = ei_quadrature(s * x)
            worst = max(worst, abs(ei(s * x) - ref) / abs(ref))
    yield CheckResult("ei", "ei-vs-quadrature", worst <= EI_RTOL,
                      f"max relative error {worst:.3g} over {2 * n} points")


def check_degeneracy():
    # j_par = 4, nu_f = 1 puts the analytic crossings on the scan nodes
    grid = GridSpec(("jt_par", "jt_perp"), ((-1.0, 1.0), (-1.0, 1.0)), (201, 201),
                    (("j_par", 4.0), ("nu_f", 1.0), ("weight", 1.0)))
    locus = degeneracy_locus(grid, 1e-6)
    found = {(round(p.axis1, 9), round(p.axis2, 9)) for p in locus}
    crossings = [(a, b) for a, b in analytic_crossings(4.0, 1.0)
                 if -1.0 <= a <= 1.0 and -1.0 <= b <= 1.0]
    hit = all((round(a, 9), round(b, 9)) in found for a, b in crossings)
    yield CheckResult("degeneracy", "crossings-in-locus", hit and bool(crossings),
                      f"{len(crossings)} crossings, {len(locus)} locus points")


def run_checks(only=None, ctrl: StepControl = StepControl()):
    """Run the selected check groups and return their results in order."""
    groups = GROUPS if not only else tuple(only)
    unknown = set(groups) - set(GROUPS)
    if unknown:
        raise ValueError(f"unknown check groups {sorted(unknown)}; choose from {GROUPS}")
    runners = {
        "invariant": lambda: check_invariant(ctrl),
        "residual": lambda: check_residuals(ctrl),
        "ei": check_ei,
        "degeneracy": check_degeneracy,
    }
    results = []
    for g in GROUPS:
        if g not in groups:
            continue
        try:
            results.extend(runners[g]())
        except Exception as exc:  # a crashing check is a failing check
            results.append(CheckResult(g, g, False, f"{type(exc).__name__}: {exc}"))
    return results
