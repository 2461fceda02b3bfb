from __future__ import annotations

from fractions import Fraction as Q

import mpmath
import pytest

from conftest import radial_to_sympy, sym_d, sym_delta, xsyms
from riesz_forms.conformal import (BGSpec, beurling_ahlfors_check, branson_gover, apply_diffop,
                                   complementary_interval, knapp_stein_multiplier,
                                   pairing_prefactor, verify_complementary_interval,
                                   verify_intertwining_bg, verify_intertwining_knapp_stein,
                                   verify_recurrence, verify_z_ratio, z_eigenvalue)
from riesz_forms.errors import UsageError
from riesz_forms.exterior import basis_indices
from riesz_forms.radial import RadialExpr, laplacian, monomial_forms
from riesz_forms.riesz import DiffOpLP, Multiplier
from riesz_forms.scalars import L, Affine


# --------------------------------------------------------------------------
# Branson-Gover operators

def test_bg_examples():
    assert branson_gover(4, 1, 1) == DiffOpLP(4, 1, {1: (2, 0)})
    for N in range(1, 4):
        assert branson_gover(6, 3, N) == DiffOpLP(6, 3, {N: (N, -N)})
    spec = BGSpec(5, 2, 3)
    assert (spec.alpha_N, spec.beta_N) == (Q(7, 2), Q(-5, 2))
    assert branson_gover(4, 1, 0) == DiffOpLP(4, 1, {0: (1, 1)})


def test_bg_on_functions_is_power_of_laplacian():
    n, N = 3, 2
    op = branson_gover(n, 0, N)
    for mono in monomial_forms(n, 0, 4):
        lap2 = laplacian(laplacian(mono))
        assert apply_diffop(op, mono) == lap2.scale(Q(n, 2) + N)


def test_bg_application_against_sympy():
    n = 4
    omega = RadialExpr.monomial(n, (0, 2, 0, 0), (1,))
    got = apply_diffop(branson_gover(n, 1, 1), omega)
    assert got == RadialExpr.term(n, (1,), -4)
    sym = radial_to_sympy(omega)
    dd = sym_delta(sym_d(sym, n), n)
    assert {k: 2 * v for k, v in dd.items() if v != 0} == {(1,): -4}


def test_bg_kills_constant_forms():
    for p in range(4):
        for idx in basis_indices(3, p):
            assert apply_diffop(branson_gover(3, p, 1), RadialExpr.term(3, idx)).is_zero


def test_bg_usage_errors():
    with pytest.raises(UsageError):
        BGSpec(3, 1, -1)
    with pytest.raises(UsageError):
        branson_gover(3, 4, 1)


# --------------------------------------------------------------------------
# recurrence

def test_recurrence_examples():
    assert verify_recurrence(6, 2, 1).passed
    assert verify_recurrence(4, 2, 1).status == "inapplicable"
    # alpha_0, beta_0 nonzero but beta_1 = 0 blocks N = 2 on 1-forms in R^4
    assert verify_recurrence(4, 1, 2).status == "inapplicable"
    assert verify_recurrence(4, 0, 2).passed


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_recurrence_all_applicable(n):
    for p in range(n + 1):
        for N in (1, 2):
            res = verify_recurrence(n, p, N)
            assert res.status in ("pass", "inapplicable"), res.detail


def test_recurrence_rejects_n0():
    with pytest.raises(UsageError):
        verify_recurrence(3, 1, 0)


# --------------------------------------------------------------------------
# intertwining

@pytest.mark.parametrize("n,p", [(3, 1), (4, 2), (3, 0), (4, 1)])
def test_bg_intertwining_first_order(n, p):
    for j in range(1, n + 1):
        assert verify_intertwining_bg(n, p, 1, j).passed


def test_bg_intertwining_trivial_order():
    assert verify_intertwining_bg(3, 1, 0, 2).passed


def test_bg_intertwining_detects_wrong_weight():
    # the identity fails for a perturbed operator: flip the sign of beta
    from riesz_forms import polyform
    from riesz_forms.radial import operators_agree
    n, p, N, j = 3, 1, 1, 1
    wrong = DiffOpLP(n, p, {1: (Q(5, 2), Q(1, 2))})
    res = operators_agree(lambda u: polyform.dpi_plus(j, Q(-5, 2), wrong.apply(u)),
                          lambda u: wrong.apply(polyform.dpi_plus(j, Q(-1, 2), u)),
                          polyform.monomials(n, p, 3), "perturbed", {})
    assert res.failed


@pytest.mark.parametrize("n", [3, 4])
def test_knapp_stein_intertwining(n):
    for p in range(n + 1):
        for j in range(1, n + 1):
            assert verify_intertwining_knapp_stein(n, p, j).passed


def test_knapp_stein_multiplier_functions():
    m = knapp_stein_multiplier(3, 0)
    assert m.Q.is_zero
    assert m.P == Q(3, 2) + (Q(3, 2) - L)


# --------------------------------------------------------------------------
# positivity and spectrum

def test_complementary_interval_examples():
    assert complementary_interval(4, 1).interval == (-1, 1)
    for n in range(1, 7):
        assert complementary_interval(n, 0).interval == (Q(-n, 2), Q(n, 2))
    assert complementary_interval(4, 2).empty
    assert complementary_interval(4, 3).empty


@pytest.mark.parametrize("n", range(1, 7))
def test_complementary_interval_scan(n):
    for p in range(n + 1):
        res = complementary_interval(n, p)
        assert res.agrees and res.prefactor_positive
        if not res.empty:
            a = Q(n, 2) - p
            assert res.first_positive == -a + res.step
            assert res.last_positive == a - res.step
        assert verify_complementary_interval(n, p).passed


def test_pairing_prefactor_value():
    mpmath.mp.dps = 30
    lam = mpmath.mpf(1) / 3
    want = 2 ** (2 * lam) * mpmath.pi ** 2 * mpmath.gamma(lam) / mpmath.gamma(3 - lam)
    assert pairing_prefactor(4).evaluate(Q(1, 3)) == pytest.approx(float(want), rel=1e-12)


@pytest.mark.parametrize("n", range(1, 7))
def test_z_ratio(n):
    for p in range(n + 1):
        for j in range(1, 5):
            assert verify_z_ratio(n, p, j).passed


def test_z_at_zero():
    # every ratio collapses to 1 except G(l)/G(-l), whose limit is -1
    mpmath.mp.dps = 40
    eps = mpmath.mpf(10) ** -20
    for n in (2, 4, 5):
        for p in range(n + 1):
            for q in (0, 1):
                h = mpmath.mpf(n) / 2
                want = (mpmath.gamma(h + 2 + eps) / mpmath.gamma(h + 2 - eps)
                        * mpmath.gamma(h - p + q + eps) / mpmath.gamma(h - p + q - eps))
                got = float(z_eigenvalue(n, p, 2, q, 0))
                assert got == pytest.approx(float(want), abs=1e-12)
                assert abs(got) == 1


def test_z_value_against_mpmath():
    mpmath.mp.dps = 30
    h, j, p, q, lam = 2, 1, 1, 1, mpmath.mpf(1) / 2
    want = (mpmath.gamma(h + j + lam) / mpmath.gamma(h + j - lam)
            * mpmath.gamma(h - p + q + lam) / mpmath.gamma(h - p + q - lam))
    got = float(z_eigenvalue(4, 1, 1, 1, Q(1, 2)))
    assert got == pytest.approx(float(want), rel=1e-13)


def test_z_usage_errors():
    with pytest.raises(UsageError):
        z_eigenvalue(4, 1, 0, 0)
    with pytest.raises(UsageError):
        z_eigenvalue(4, 1, 1, 2)


# --------------------------------------------------------------------------
# Beurling-Ahlfors

@pytest.mark.parametrize("n", [2, 4, 6])
def test_beurling_ahlfors(n):
    assert beurling_ahlfors_check(n).passed
    m = Multiplier.reflection(n, n // 2)
    assert m.compose(m) == Multiplier.identity(n, n // 2)


def test_beurling_ahlfors_needs_even_dimension():
    with pytest.raises(UsageError):
        beurling_ahlfors_check(3)
