import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rgflow import DegenerateA, DomainLog, ImplicitRelation, NonFiniteInput, RelationKind, StepControl
from rgflow import closedform as cf
from rgflow.systems import NeqCouplings, beta_neq, beta_pt_reduced
from rgflow.verification import jpar_implied_trajectory, jperp_separated_trajectory

FD_H = 1e-6


def _fd(fn, x, h=FD_H):
    return (fn(x + h) - fn(x - h)) / (2 * h)


# --- (J_perp, nu_f) ----------------------------------------------------------

def test_partial_fractions():
    for t in (0.1, 0.3, 0.5, 1.2, 3.0, -0.4):
        assert cf.separated_jperp_partial_fractions(t) == pytest.approx(
            cf.separated_jperp_integrand(t), rel=1e-12)


@pytest.mark.parametrize("t", [0.05, 0.1, 0.2, 0.35, 0.5, 0.6])
def test_rhs_derivative_pins_negative_sign(t):
    slope = _fd(lambda u: cf.jperp_nuf_rhs(u, 1.0), t)
    target = cf.separated_jperp_integrand(t)
    assert slope == pytest.approx(cf.JPERP_INTEGRAND_SIGN * target, rel=1e-6)
    assert cf.JPERP_INTEGRAND_SIGN == -1
    assert abs(slope - target) > 1e-3 * abs(target)


@pytest.mark.parametrize("t", [0.8, 1.5, 4.0])
def test_rhs_derivative_beyond_branch_with_abs(t):
    slope = _fd(lambda u: cf.jperp_nuf_rhs(u, 1.0, absolute=True), t)
    assert slope == pytest.approx(-cf.separated_jperp_integrand(t), rel=1e-6)


def test_branch_point_raises():
    with pytest.raises(DomainLog):
        cf.residual_jperp_nuf(cf.JPERP_BRANCH_T, 1.0, 0.0)
    with pytest.raises(DomainLog):
        cf.residual_jperp_nuf(cf.JPERP_BRANCH_T, 1.0, 0.0, absolute=True)


def test_beyond_branch_needs_opt_in():
    with pytest.raises(DomainLog):
        cf.residual_jperp_nuf(1.0, 1.0, 0.0)
    assert math.isfinite(cf.residual_jperp_nuf(1.0, 1.0, 0.0, absolute=True))


@pytest.mark.parametrize("j, nu", [(0.0, 1.0), (-1.0, 1.0), (0.1, 0.0), (0.1, -2.0)])
def test_jperp_domain(j, nu):
    with pytest.raises(DomainLog):
        cf.residual_jperp_nuf(j, nu, 0.0)


@pytest.mark.parametrize("t0, j0, t1", [(0.1, 0.05, 0.5), (0.2, 2.0, 0.55), (0.02, 1.0, 0.3)])
def test_jperp_constancy_on_separated_ode(t0, j0, t1):
    t, j = jperp_separated_trajectory(t0, j0, t1, StepControl())
    res = [cf.residual_jperp_nuf(jj, jj / tt, 0.0) for tt, jj in zip(t, j)]
    assert max(res) - min(res) <= 1e-8
    assert t[-1] == pytest.approx(t1)


def test_jperp_constant_labels_curve():
    rel = ImplicitRelation(RelationKind.JPERP_NUF, 1.25)
    r0 = cf.residual_jperp_nuf(0.2, 1.0, 0.0)
    assert rel.residual(0.2, 1.0) == pytest.approx(r0 - 1.25)


def test_flow_slope_is_ratio_of_beta_functions():
    s = NeqCouplings(3.0, 0.4, 0.7)
    dj, dnu, djperp = beta_neq(s)
    assert cf.flow_jperp_nuf_slope(0.4, 0.7) == pytest.approx(djperp / dnu, rel=1e-14)


def test_flow_slope_differs_from_separated_form():
    # dividing the flow gives 1 + t; the separated ODE gives J * (-integrand) * dt/dnu
    j, nu = 0.2, 1.0
    t = j / nu
    # along the separated relation dJ/dnu follows from d ln J = -f(t) dt, t = J/nu
    f = -cf.separated_jperp_integrand(t)
    sep_slope = f * j * (-t / nu) / (1.0 - f * j / nu)
    assert abs(sep_slope - cf.flow_jperp_nuf_slope(j, nu)) > 0.1


def test_implicit_relation_constant_finite():
    with pytest.raises(NonFiniteInput):
        ImplicitRelation(RelationKind.JPAR_NUF, math.inf)


# --- (J_par~, nu_f) ----------------------------------------------------------

@pytest.mark.parametrize("j", [-0.5, 0.0, 0.5, 2.0])
def test_jpar_lhs_derivative(j):
    assert _fd(cf.jpar_nuf_lhs, j) == pytest.approx(1.0 / (1.0 + j ** 3), abs=1e-6)


@pytest.mark.parametrize("nu0, j0, nu1", [(1.0, 0.2, 3.0), (0.5, -0.5, 2.0), (2.0, 1.0, 4.0)])
def test_jpar_constancy_on_implied_ode(nu0, j0, nu1):
    nu, j = jpar_implied_trajectory(nu0, j0, nu1, StepControl())
    res = [cf.residual_jpar_nuf(jj, n, 0.0) for n, jj in zip(nu, j)]
    assert max(res) - min(res) <= 1e-8


def test_jpar_large_nu_limit():
    c = 0.3
    expect = math.atan(-1.0 / math.sqrt(3.0)) / math.sqrt(3.0) - c
    assert cf.residual_jpar_nuf(0.0, 1e12, c) == pytest.approx(expect, abs=1e-11)


def test_jpar_pole():
    with pytest.raises(DomainLog):
        cf.residual_jpar_nuf(-1.0, 1.0, 0.0)
    with pytest.raises(DomainLog):
        cf.residual_jpar_nuf(0.5, 0.0, 0.0)


def test_jpar_below_minus_one_uses_abs():
    assert _fd(cf.jpar_nuf_lhs, -3.0) == pytest.approx(1.0 / (1.0 - 27.0), abs=1e-6)


def test_jpar_sign_constant():
    assert cf.JPAR_INTEGRAND_SIGN == 1
    assert cf.jpar_nuf_slope(0.5, 2.0) == pytest.approx(1.125 / 4.0)


# --- PT closed form ------------------------------------------------------------

def test_pt_a_and_A():
    assert cf.pt_a_variable(0.2, 0.5) == pytest.approx(5 * 0.04 * 0.75)
    assert cf.pt_A(0.5) == pytest.approx(7.5)
    assert cf.pt_A(1.0) == 0.0


def test_pt_A_zero_is_regular():
    assert math.isfinite(cf.residual_pt_solution(0.1, 2.0, 0.0, 0.0))


@pytest.mark.parametrize("A", [1.0, 2.0])
def test_pt_degenerate_A(A):
    with pytest.raises(DegenerateA):
        cf.residual_pt_solution(0.1, 2.0, A, 0.0)


def test_pt_near_two_is_large_but_finite():
    assert abs(cf.residual_pt_solution(0.1, 2.0, 2.0 - 1e-9, 0.0)) > 1e6


@pytest.mark.parametrize("a, k, A", [(0.0, 1.0, 0.5), (0.1, -1.0, 0.5), (0.1, 1.0, 3.0)])
def test_pt_domain(a, k, A):
    with pytest.raises(DomainLog):
        cf.residual_pt_solution(a, k, A, 0.0)


@pytest.mark.parametrize("a, k, A", [(0.1, 2.0, 0.5), (0.3, 1.1, 1.5), (0.05, 3.0, 0.0)])
def test_pt_rescaling_a_only(a, k, A):
    lam = 2.0
    coef = (3 - 2 * A) / ((A - 1) * (2 - A)) - 1 / (A - 1) - 0.5
    shifted = cf.residual_pt_solution(lam * a, k, A, coef * math.log(lam))
    assert shifted == pytest.approx(cf.residual_pt_solution(a, k, A, 0.0), abs=1e-13)


@pytest.mark.parametrize("a, k, A", [(0.1, 2.0, 0.5), (0.3, 1.1, 1.5), (0.05, 3.0, 0.0)])
def test_pt_rescaling_a_and_k(a, k, A):
    lam = 2.0
    shifted = cf.residual_pt_solution(lam * a, lam * k, A, -0.5 * math.log(lam))
    assert shifted == pytest.approx(cf.residual_pt_solution(a, k, A, 0.0), abs=1e-13)


@pytest.mark.xfail(strict=True, reason="the stated shift belongs to a -> lambda a with K fixed; "
                   "scaling K too leaves only the -log(lambda)/2 term")
def test_pt_rescaling_as_stated():
    a, k, A, lam = 0.1, 2.0, 0.5, 2.0
    coef = (3 - 2 * A) / ((A - 1) * (2 - A)) - 1 / (A - 1) - 0.5
    shifted = cf.residual_pt_solution(lam * a, lam * k, A, coef * math.log(lam))
    assert shifted == pytest.approx(cf.residual_pt_solution(a, k, A, 0.0), abs=1e-12)


# (2 - A) > 0 needs inv**2 > 0.8
@given(st.floats(0.9, 0.999), st.floats(1e-3, 0.5), st.floats(0.2, 5.0))
def test_pt_level_sets_are_power_laws(inv, a0, k0):
    A = cf.pt_A(inv)
    if A in (1.0, 2.0):
        return
    p = cf.pt_solution_level_exponent(A)
    r0 = cf.residual_pt_solution(a0, k0, A, 0.0)
    for s in (0.5, 2.0, 7.0):
        r = cf.residual_pt_solution(s * a0, k0 * s ** p, A, 0.0)
        assert r == pytest.approx(r0, abs=1e-10 * max(1.0, abs(r0)))


@pytest.mark.parametrize("k, g_r, inv", [(2.5, 0.1, 0.3), (1.0, 0.2, 0.0), (3.0, 0.05, 0.8)])
def test_reduced_slope_matches_flow(k, g_r, inv):
    dk, dg = beta_pt_reduced(k, g_r, inv)
    a = cf.pt_a_variable(g_r, inv)
    da = 10.0 * g_r * (1 - inv * inv) * dg
    assert cf.pt_reduced_slope(a, k) == pytest.approx((dk / k) / da, rel=1e-12)


def test_substituted_slope_value():
    assert cf.pt_solution_substituted_slope(0.1, 2.0) == pytest.approx(-(1 + 0.1 / 0.95))


# --- KT report -----------------------------------------------------------------

def test_kt_report_fields():
    r = cf.hermitian_kt_limit_check(2.5, 0.01)
    assert r.regime is cf.KTRegime.WEAK
    assert r.g_end < 0.01 and r.k_end > 2.0
    r = cf.hermitian_kt_limit_check(1.5, 0.01)
    assert r.regime is cf.KTRegime.STRONG and r.l_end < 50.0
