"""Acceptance criteria, one pass/fail line each.

Run under pytest (``pytest -m acceptance -s``) or directly with
``python3 tests/test_acceptance.py``. Every criterion is evaluated at its
stated tolerance and runtime budget; nothing is relaxed to make it pass.
"""
import math
import os
import subprocess
import sys
import tempfile
import time

import numpy as np
import pytest
from scipy.optimize import fsolve

from rgflow import GridSpec, StepControl, System, Termination, flow_portrait, run_cell
from rgflow import closedform as cf
from rgflow.spectra import build_m, c1_for_root, degeneracy_locus, pt_radicand, pt_separatrix
from rgflow.special import ei
from rgflow.verification import (ei_quadrature, invariant_drift, jpar_implied_trajectory,
                                 jperp_separated_trajectory, pt_random_states)
from rgflow.integrate import integrate

pytestmark = pytest.mark.acceptance


def _line(n, title, ok, detail):
    return f"[acceptance {n}] {'PASS' if ok else 'FAIL'}  {title}: {detail}"


# ---------------------------------------------------------------------------

def criterion_1():
    t0 = time.perf_counter()
    worst = 0.0
    for s in pt_random_states(100, seed=20240611):
        worst = max(worst, invariant_drift(run_cell(System.PT, s, StepControl(l_max=10.0))))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and dt < 5.0
    return ok, f"max relative drift {worst:.2e} (limit 1e-9), {dt:.2f} s (limit 5 s)"


KT_GRID = "k=0:4:21,g_r=0:0.5:21"


def criterion_2():
    t0 = time.perf_counter()
    grid = GridSpec.parse(KT_GRID, "g_i=0")
    portrait = flow_portrait(System.PT, grid, StepControl())
    dt = time.perf_counter() - t0
    codes = portrait.terminations()
    ks, grs = grid.axis_values(0), grid.axis_values(1)
    classes = {c for c in codes.ravel()}
    problems = []
    if classes != {Termination.BLOWUP, Termination.REACHED_L_MAX}:
        problems.append(f"classes {sorted(c.value for c in classes)}")
    # per g_r column: ReachedLMax must be an upper interval in K
    boundary = []
    for j in range(len(grs)):
        weak = codes[:, j] == Termination.REACHED_L_MAX
        first = int(np.argmax(weak)) if weak.any() else len(ks)
        if not weak[first:].all():
            problems.append(f"non-interval at g_r={grs[j]:g}")
        boundary.append(ks[first] if first < len(ks) else math.inf)
    if any(b < a for a, b in zip(boundary[1:], boundary[2:])):
        problems.append("boundary not monotone in g_r")
    # nearest-to-zero nonzero g_r column should meet K = 2 within the KT wedge plus one cell
    dk = ks[1] - ks[0]
    if not abs(boundary[1] - 2.0) <= 10.0 * grs[1] + dk:
        problems.append(f"boundary at g_r={grs[1]:g} is K={boundary[1]:g}")
    for i, k in enumerate(ks):
        for j, g in enumerate(grs):
            if g >= 0.05 and k < 2.0 - 10.0 * g and codes[i, j] == Termination.REACHED_L_MAX:
                problems.append(f"weak cell at K={k:g}, g_r={g:g}")
    ok = not problems and dt < 30.0
    counts = {c.value: int(np.sum(codes == c)) for c in classes}
    detail = (f"{counts}, boundary K at g_r={grs[1]:g}: {boundary[1]:g}, {dt:.1f} s (limit 30 s)"
              + (f"; problems: {problems}" if problems else ""))
    return ok, detail


def _pt_reduced_drifts(n=10, seed=7):
    rng = np.random.default_rng(seed)
    drifts, oracle_drifts = [], []
    while len(drifts) < n:
        inv = rng.uniform(0.9, 0.99)
        A = cf.pt_A(inv)
        if abs(A - 1.0) < 0.05:
            continue
        k0, g0 = rng.uniform(0.5, 4.0), rng.uniform(0.05, 0.3)
        traj = run_cell(System.PT_REDUCED, (k0, g0, inv * g0), StepControl(l_max=10.0))
        a = cf.pt_a_variable(traj.states[:, 1], inv)
        res = [cf.residual_pt_solution(aa, kk, A, 0.0) for aa, kk in zip(a, traj.states[:, 0])]
        drifts.append(max(res) - min(res))
        # the substituted-form oracle, integrated in a from the same start
        a0, a1 = a[0], a[-1]
        if a1 > a0:
            sub = integrate(lambda y: np.array([1.0, cf.pt_solution_substituted_slope(y[0], math.exp(y[1]))]),
                            [a0, math.log(k0)], StepControl(h_init=min(1e-3, a1 - a0), l_max=a1 - a0))
            r = []
            for aa, lk in sub.states:
                try:
                    r.append(cf.residual_pt_solution(aa, math.exp(lk), A, 0.0))
                except cf.DomainLog:
                    break
            if len(r) > 1:
                oracle_drifts.append(max(r) - min(r))
    return drifts, oracle_drifts


def criterion_3():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    ctrl = StepControl()
    jperp = []
    for _ in range(10):
        t_start = rng.uniform(0.02, 0.2)
        t_end = rng.uniform(t_start + 0.1, 0.6)
        t, j = jperp_separated_trajectory(t_start, rng.uniform(0.05, 3.0), t_end, ctrl)
        r = [cf.residual_jperp_nuf(jj, jj / tt, 0.0) for tt, jj in zip(t, j)]
        jperp.append(max(r) - min(r))
    jpar = []
    for _ in range(10):
        nu0 = rng.uniform(0.5, 1.5)
        nu, j = jpar_implied_trajectory(nu0, rng.uniform(-0.8, 0.5), nu0 + 2.0, ctrl)
        r = [cf.residual_jpar_nuf(jj, n, 0.0) for n, jj in zip(nu, j)]
        jpar.append(max(r) - min(r))
    pt, pt_oracle = _pt_reduced_drifts()
    dt = time.perf_counter() - t0
    parts = {"jperp_nuf": max(jperp), "jpar_nuf": max(jpar), "pt_solution": max(pt)}
    ok = all(v <= 1e-6 for v in parts.values()) and dt < 10.0
    detail = ", ".join(f"{k} drift {v:.2e}" for k, v in parts.items())
    if pt_oracle:
        detail += f" (substituted-form oracle drift {max(pt_oracle):.2e})"
    return ok, detail + f", limit 1e-6, {dt:.2f} s (limit 10 s)"


def criterion_4():
    t0 = time.perf_counter()
    mags = np.geomspace(1e-3, 50.0, 1000)
    worst, where = 0.0, None
    for x in np.concatenate([mags, -mags]):
        err = abs(ei(x) / ei_quadrature(x) - 1.0)
        if err > worst:
            worst, where = err, x
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and dt < 5.0
    return ok, f"max relative error {worst:.2e} at x={where:.4g} over 2000 points, {dt:.2f} s (limit 5 s)"


def criterion_5():
    t0 = time.perf_counter()
    j_par, nu = 4.0, 1.0
    grid = GridSpec(("jt_par", "jt_perp"), ((-1.0, 1.0), (-1.0, 1.0)), (201, 201),
                    (("j_par", j_par), ("nu_f", nu), ("weight", 1.0)))
    locus = degeneracy_locus(grid, 1e-6)

    def system(v):
        a, b = v
        return [a * (a + b), j_par * (nu + b) ** 2 - 2.0 * a * nu]

    roots = []
    for start in [(0.1, -0.9), (0.4, -0.4), (0.6, -0.6), (-0.1, -1.1), (0.9, -0.3)]:
        sol, info, flag, _ = fsolve(system, start, full_output=True, xtol=1e-14)
        if flag == 1 and max(abs(v) for v in system(sol)) < 1e-12 and np.all(np.abs(sol) <= 1.0 + 1e-9):
            if not any(np.allclose(sol, r, atol=1e-9) for r in roots):
                roots.append(sol)
    found = [any(abs(p.axis1 - r[0]) <= 1e-9 and abs(p.axis2 - r[1]) <= 1e-9 for p in locus) for r in roots]
    dt = time.perf_counter() - t0
    ok = bool(roots) and all(found) and dt < 10.0
    pts = ", ".join(f"({r[0]:.6g}, {r[1]:.6g})" for r in roots)
    return ok, (f"roots {pts} in locus: {found}; {len(locus)} locus points; "
                f"{dt:.2f} s (limit 10 s)")


def criterion_6():
    t0 = time.perf_counter()
    g = 5.0
    target = 2.0 * math.exp(10.0 / g)
    devs = {d: pt_radicand(g, 1.0 + d, 0.0) / target - 1.0 for d in (1e-4, -1e-4)}
    limit_ok = all(abs(v) <= 5e-3 for v in devs.values())
    c1 = c1_for_root(1.0, 0.5)
    root = pt_separatrix(0.5, c1, (0.5, 1.7))
    root_ok = root is not None and abs(root.g - 1.0) <= 1e-10
    dt = time.perf_counter() - t0
    ok = limit_ok and root_ok and dt < 1.0
    dev_txt = ", ".join(f"inv=1{d:+g}: {v:+.3%}" for d, v in devs.items())
    return ok, (f"R/(2e^2)-1 at {dev_txt} (limit 0.5%); constructed root "
                f"{root.g if root else None!r} (limit 1e-10); {dt:.3f} s (limit 1 s)")


def _flow_csv(threads, out_dir):
    prefix = os.path.join(out_dir, f"t{threads}")
    env = dict(os.environ, RGFLOW_THREADS=str(threads))
    proc = subprocess.run([sys.executable, "-m", "rgflow.cli", "flow", "--system", "pt", "--grid",
                           KT_GRID, "--freeze", "g_i=0", "--out", prefix, "--format", "csv"],
                          env=env, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(proc.stderr)
    with open(prefix + ".csv", "rb") as fh:
        return fh.read()


def criterion_7():
    with tempfile.TemporaryDirectory() as d:
        a, b = _flow_csv(1, d), _flow_csv(8, d)
    ok = a == b
    return ok, f"RGFLOW_THREADS=1 vs 8: {'identical' if ok else 'different'} CSV ({len(a)} bytes)"


CRITERIA = [
    (1, "exact-invariant conservation", criterion_1),
    (2, "KT topology on the Hermitian slice", criterion_2),
    (3, "first-integral residual constancy", criterion_3),
    (4, "Ei accuracy", criterion_4),
    (5, "degeneracy locus contains the analytic root", criterion_5),
    (6, "PT separatrix limit and constructed root", criterion_6),
    (7, "determinism across worker counts", criterion_7),
]


@pytest.mark.parametrize("n, title, fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(n, title, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + _line(n, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for n, title, fn in CRITERIA:
        ok, detail = fn()
        results.append(ok)
        print(_line(n, title, ok, detail), flush=True)
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
