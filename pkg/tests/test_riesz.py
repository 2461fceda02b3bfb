from __future__ import annotations

import random
from fractions import Fraction as Q

import mpmath
import numpy as np
import pytest

from riesz_forms.errors import HypothesisViolation, UsageError
from riesz_forms.exterior import basis_indices, ix_ex_at
from riesz_forms.riesz import (DiffOpLP, Multiplier, RieszParams, alpha_coeff, beta_coeff,
                               bernstein_sato_operator, cd_coefficients, classical_fourier,
                               convolution_closed_form, convolution_constant, double_fourier, family,
                               fourier, fourier_constant, gjms_residue_formula,
                               knapp_stein_residue_formula, residue_at, semigroup_compose,
                               semigroup_targets, verify_bernstein_sato,
                               verify_bernstein_sato_spatial, verify_classical,
                               verify_double_fourier, verify_residue, verify_semigroup)
from riesz_forms.conformal import branson_gover
from riesz_forms.scalars import L, ONE_R, Affine, GammaExpr, LambdaRational


# --------------------------------------------------------------------------
# parameters and C, D

def test_cd_examples():
    n = 5
    for p in range(n + 1):
        C, D = cd_coefficients(family("knapp-stein", n, p))
        assert C == L + 2 * p
        assert D == -(L + 2 * n - 2 * p)
        C, D = cd_coefficients(family("scalar", n, p))
        assert C == L and D == L
        C, D = cd_coefficients(family("self-dual", n, p))
        mu = -L - n
        assert C == -L * alpha_coeff(n, p, mu)
        assert D == -L * beta_coeff(n, p, mu)
    C, D = cd_coefficients(family("riesz", 4, 0))
    assert C == L and D == LambdaRational.const(-4)


def test_family_errors():
    with pytest.raises(UsageError):
        family("bogus", 3, 1)
    with pytest.raises(UsageError):
        family("custom", 3, 1, A=1)
    with pytest.raises(UsageError):
        family("riesz", 3, 4)
    with pytest.raises(UsageError):
        RieszParams(3, 1, ONE_R / L, ONE_R)


# --------------------------------------------------------------------------
# Fourier transform

def _radial_transform_oracle(n, lam):
    """Transform of r^lam at |xi| = 1 for n = 1, 3 through the Mellin
    transforms of cos and sin, cross-checked by quadrature away from 0."""
    mpmath.mp.dps = 30
    lam = mpmath.mpf(lam.numerator) / lam.denominator
    if n == 1:
        s = lam + 1
        value = 2 * mpmath.gamma(s) * mpmath.cos(mpmath.pi * s / 2)
        tail = 2 * mpmath.quadosc(lambda r: r ** lam * mpmath.cos(r), [1, mpmath.inf], omega=1)
        head = 2 * mpmath.quad(lambda r: r ** lam * mpmath.cos(r), [0, 1])
    else:
        s = lam + 2
        value = 4 * mpmath.pi * mpmath.gamma(s) * mpmath.sin(mpmath.pi * s / 2)
        tail = 4 * mpmath.pi * mpmath.quadosc(lambda r: r ** (lam + 1) * mpmath.sin(r), [1, mpmath.inf], omega=1)
        head = 4 * mpmath.pi * mpmath.quad(lambda r: r ** (lam + 1) * mpmath.sin(r), [0, 1])
    assert abs(head + tail - value) < 1e-6 * abs(value)
    return value


@pytest.mark.parametrize("n,lam", [(1, Q(-1, 3)), (1, Q(-3, 4)), (3, Q(-3, 2)), (3, Q(-7, 4))])
def test_classical_constant_against_quadrature(n, lam):
    want = float(_radial_transform_oracle(n, lam))
    assert classical_fourier(n).evaluate(lam) == pytest.approx(want, rel=1e-8)
    c, m = fourier(family("riesz", n, 0))
    assert (c * m.P).evaluate(lam) == pytest.approx(want, rel=1e-8)


@pytest.mark.parametrize("n", range(1, 7))
def test_classical_specialization(n):
    assert verify_classical(n).passed


def test_fourier_shape():
    c, m = fourier(family("knapp-stein", 4, 1))
    assert m.rpow == Affine(-1, -6)
    assert c == fourier_constant(4)
    # knapp-stein constant collapses to 2^(l+n) ... / G(-(l-2)/2) times (alpha, beta) at -(l+n)/2
    half = Affine(Q(-1, 2), -2).as_rational()
    twice = c * -2
    assert twice * alpha_coeff(4, 1, half) == c * m.P
    assert twice * beta_coeff(4, 1, half) == c * m.Q


@pytest.mark.parametrize("name", ["riesz", "scalar", "knapp-stein", "self-dual"])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_double_fourier(name, n):
    for p in range(n + 1):
        assert verify_double_fourier(family(name, n, p)).passed


def test_double_fourier_custom():
    params = family("custom", 4, 2, A=L * L + 1, B=L - 3)
    assert verify_double_fourier(params).passed


def test_fourier_constant_poles():
    c = fourier_constant(3)
    for k in range(4):
        assert c.pole_order(-3 - 2 * k) == 1
    assert c.pole_order(Q(-1, 2)) == 0


# --------------------------------------------------------------------------
# multiplier algebra

def test_multiplier_compose_examples():
    n, p = 3, 1
    ident = Multiplier.identity(n, p)
    m = Multiplier(n, p, Affine(1, 2), L + 1, L * L)
    assert ident.compose(m) == m and m.compose(ident) == m
    refl = Multiplier.reflection(n, p)
    assert refl.compose(refl).is_identity
    proj = Multiplier(n, p, Affine(0, -2), 1, 0)
    assert proj.compose(proj) == proj


def test_projector_matrix_oracle():
    xi = [0.3, -1.1, 0.7]
    n, p = 3, 1
    P = np.array(ix_ex_at(xi, p), dtype=float) / np.dot(xi, xi)
    assert np.allclose(P @ P, P)
    I = np.eye(len(basis_indices(n, p)))
    R = 2 * P - I  # r^-2 (i eps - eps i)
    assert np.allclose(R @ R, I)


def test_multiplier_polynomial_flag():
    assert Multiplier.identity(3, 1).is_polynomial
    assert not Multiplier.reflection(3, 1).is_polynomial
    assert Multiplier.reflection(3, 0).is_polynomial
    assert Multiplier(3, 1, Affine(0, 2), 1, 5).is_polynomial
    assert not Multiplier(3, 1, Affine(1, 0), 1, 1).is_polynomial


# --------------------------------------------------------------------------
# Bernstein-Sato

def test_bernstein_sato_first_order_shape():
    params = family("self-dual", 4, 2)
    op, _ = bernstein_sato_operator(params, 1)
    C, D = cd_coefficients(params)
    a, b = op.coefficient(1)
    assert a.as_rational() == C * D.subs(Affine(1, 2))
    assert b.as_rational() == C.subs(Affine(1, 2)) * D


def test_bernstein_sato_laplacian_case():
    # functions: Laplacian of r^(l+2) is (l+2)(l+n) r^l
    n = 3
    op, rhs = bernstein_sato_operator(family("riesz", n, 0), 1)
    a, _ = op.coefficient(1)
    C, D = cd_coefficients(family("riesz", n, 0))
    # delta d = -Laplacian, so rhs / (-a) must be (l+2)(l+n)
    assert rhs / (-a.as_rational()) == (L + 2) * (L + n)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_bernstein_sato_knapp_stein_ratios(k):
    n = 5
    for p in range(1, n):
        op, _ = bernstein_sato_operator(family("knapp-stein", n, p), k)
        a, b = (x.as_rational() for x in op.coefficient(k))
        ratio_a = (L + 2 * p) / (L + 2 * p + 2 * k)
        ratio_b = (L + 2 * n - 2 * p) / (L + 2 * n - 2 * p + 2 * k)
        assert a / b == ratio_a / ratio_b


@pytest.mark.parametrize("name", ["riesz", "scalar", "knapp-stein", "self-dual"])
def test_bernstein_sato_all(name):
    for n in range(1, 7):
        for p in range(n + 1):
            for k in (1, 2, 3):
                assert verify_bernstein_sato(family(name, n, p), k).passed


@pytest.mark.parametrize("name", ["riesz", "knapp-stein", "self-dual"])
def test_bernstein_sato_spatial(name):
    for n in (2, 3):
        for p in range(n + 1):
            for k in (1, 2):
                assert verify_bernstein_sato_spatial(family(name, n, p), k).passed


def test_bernstein_sato_numeric_spot_check():
    # symbol identity at l = 1/2 and a random xi, with plain numpy matrices
    rng = random.Random(7)
    n, p, k = 4, 2, 2
    lam = Q(1, 2)
    params = family("riesz", n, p)
    op, rhs = bernstein_sato_operator(params, k)
    xi = [rng.uniform(-1, 1) for _ in range(n)]
    r2 = sum(t * t for t in xi)
    ie = np.array(ix_ex_at(xi, p), dtype=float)
    ei = r2 * np.eye(len(ie)) - ie

    def image(shift):
        c, m = fourier(params)
        at = lam + shift
        s = float(m.rpow(at))
        return c.evaluate(at) * r2 ** (s / 2) * (m.P.to_float(at) * ie + m.Q.to_float(at) * ei)

    a, b = (float(x.evaluate(lam)) for x in op.coefficient(k))
    symbol = r2 ** (k - 1) * (a * ie + b * ei)
    assert np.allclose(symbol @ image(2 * k), rhs.to_float(lam) * image(0), rtol=1e-9)


def test_bernstein_sato_rejects_k0():
    with pytest.raises(UsageError):
        bernstein_sato_operator(family("riesz", 2, 0), 0)


# --------------------------------------------------------------------------
# residues

@pytest.mark.parametrize("n", range(1, 7))
def test_knapp_stein_residues_are_branson_gover(n):
    for p in range(n + 1):
        for k in range(1, 4):
            res = residue_at(family("knapp-stein", n, p), k)
            assert res.diff_op == knapp_stein_residue_formula(n, p, k)
            # proportional to L_2k
            K = GammaExpr.make(Q(2 * (-1) ** k, 4 ** k * __import__("math").factorial(k)), None,
                               Q(n, 2), [(Affine(0, Q(n, 2) + k + 1), -1)])
            assert res.diff_op == branson_gover(n, p, k).scale(K)


@pytest.mark.parametrize("n", range(1, 7))
def test_gjms_residues(n):
    for k in range(0, 4):
        res = residue_at(family("riesz", n, 0), k)
        assert res.diff_op == gjms_residue_formula(n, k)


def test_gjms_residue_numeric():
    # residue of c(l) C(l) at l=-n-2k by a contour average with mpmath
    n, k = 3, 1
    c, m = fourier(family("riesz", n, 0))
    f = c * m.P
    pole = -n - 2 * k
    eps = mpmath.mpf("1e-8")
    approx = eps * (f.evaluate(Q(pole) + Q(1, 10 ** 8)))
    want = gjms_residue_formula(n, k).coefficient(k)[0].evaluate(0)
    assert float(approx) == pytest.approx(want, rel=1e-6)


def test_knapp_stein_k0_routes_agree():
    n = 5
    for p in range(n + 1):
        res = residue_at(family("knapp-stein", n, p), 0)
        C, D = cd_coefficients(family("knapp-stein", n, p))
        total = res.constant * (res.multiplier.P + res.multiplier.Q)
        if 0 < p < n:
            assert C(-n) + D(-n) == -2 * (n - 2 * p)
        alpha0, beta0 = Q(n, 2) - p, Q(n, 2) - p
        if 0 < p < n:
            want = knapp_stein_residue_formula(n, p, 0).coefficient(0)
            assert total == want[0] + want[1]
            assert alpha0 + beta0 == n - 2 * p


def test_k0_residue_is_multiple_of_identity():
    # C(-n) = D(-n) holds for every polynomial (A, B)
    for name in ("riesz", "scalar", "knapp-stein", "self-dual"):
        for p in range(5):
            params = family(name, 4, p)
            C, D = cd_coefficients(params)
            assert C(-4) == D(-4)
            assert residue_at(params, 0).differential
    params = family("custom", 3, 1, A=L * L, B=L + 7)
    C, D = cd_coefficients(params)
    assert C(-3) == D(-3)


def test_verify_residue_statuses():
    assert verify_residue(family("scalar", 4, 1), 2).passed
    assert verify_residue(family("self-dual", 4, 2), 1).status == "inapplicable"
    with pytest.raises(UsageError):
        residue_at(family("riesz", 2, 0), -1)


# --------------------------------------------------------------------------
# convolution and semigroup

def test_convolution_riesz_functions():
    for n in range(1, 7):
        got = convolution_constant(family("riesz", n, 0))
        want = GammaExpr.make(ONE_R, None, n, [(Affine(1, Q(-n, 2)), 1), (Affine(-1, Q(n, 2)), 1),
                                               (Affine(1, 0), -1), (Affine(-1, n), -1)])
        assert got == want


def test_convolution_knapp_stein():
    for n in range(2, 7):
        for p in range(1, n):
            got = convolution_constant(family("knapp-stein", n, p))
            a1 = alpha_coeff(n, p, (n - 2 * L) / 2)
            a2 = alpha_coeff(n, p, (2 * L - n) / 2)
            want = GammaExpr.make(a1 * a2, None, n, [
                (Affine(1, Q(-n, 2)), 1), (Affine(-1, Q(n, 2)), 1),
                (Affine(-1, n + 1), -1), (Affine(1, 1), -1)])
            assert got == want
            assert got == convolution_closed_form(family("knapp-stein", n, p))


def test_convolution_scalar_and_violation():
    got = convolution_constant(family("scalar", 4, 2))
    assert got == convolution_closed_form(family("scalar", 4, 2))
    with pytest.raises(HypothesisViolation) as info:
        convolution_constant(family("riesz", 4, 2))
    assert info.value.residual is not None


@pytest.mark.parametrize("nu", [Q(1, 3), Q(5, 2), Q(3)])
def test_semigroup_named_families(nu):
    for name in ("riesz", "scalar", "knapp-stein"):
        for n in (2, 3, 4):
            for p in range(n + 1):
                params = family(name, n, p)
                assert verify_semigroup(params, params, nu).passed


def test_semigroup_scalar_product():
    n, nu = 3, Q(5, 2)
    X, Y = semigroup_targets(family("scalar", n, 1), family("scalar", n, 1), nu)
    # C(l-n) C'(nu-n) = (l-n)(nu-n) written in mu = l + nu - n
    assert X == (L - nu) * (nu - n)
    assert Y == X
    out = semigroup_compose(family("scalar", n, 1), family("scalar", n, 1), nu)
    C, D = cd_coefficients(out)
    assert C == X and D == Y
