from __future__ import annotations

import random
from fractions import Fraction as Q

import numpy as np
import pytest
import sympy as sp

from conftest import LAM, numeric_compare, radial_to_sympy, sym_d, sym_delta, xsyms
from riesz_forms.errors import UnsupportedError, UsageError
from riesz_forms.exterior import basis_indices, ix_ex_at
from riesz_forms import polyform
from riesz_forms.polyform import PolyForm
from riesz_forms.radial import (RadialExpr, algebraic_ix_ex, codifferential, d_delta, delta_d,
                                dpi_plus, exterior_d, fourier_side_D2, laplacian, monomial_forms,
                                partial, verify_radial_identity)
from riesz_forms.scalars import L, Affine

T = RadialExpr.term


def random_expr(rng, n, p, terms=3):
    out = RadialExpr.zero(n, p)
    bases = basis_indices(n, p)
    for _ in range(terms):
        alpha = [rng.randint(0, 2) for _ in range(n)]
        rpow = Affine(rng.choice([0, 1]), rng.choice([-2, 0, 2, Q(1, 2)]))
        coeff = L * rng.randint(-3, 3) + rng.randint(-3, 3)
        out = out + T(n, rng.choice(bases), coeff, rpow, alpha)
    return out


# --------------------------------------------------------------------------
# examples

def test_partial_examples():
    n = 3
    r_l = T(n, (), 1, Affine(1, 0))
    assert partial(1, r_l) == T(n, (), L, Affine(1, -2), (1, 0, 0))
    assert partial(1, T(2, (1,), 1, 0, (0, 1))).is_zero
    got = partial(2, T(2, (1,), 1, Affine(1, 0), (0, 1)))
    want = T(2, (1,), L, Affine(1, -2), (0, 2)) + T(2, (1,), 1, Affine(1, 0))
    assert got == want


def test_partial_finite_difference():
    e = T(2, (1,), 1, Affine(1, 0), (0, 1))
    got = partial(2, e)
    x = np.array([0.7, -0.4])
    h = 1e-6
    f = lambda y: e.evaluate(2, y)[(1,)]
    fd = (f(x + [0, h]) - f(x - [0, h])) / (2 * h)
    assert got.evaluate(2, x)[(1,)] == pytest.approx(fd, rel=1e-8)


def test_exterior_d_examples():
    assert exterior_d(RadialExpr.monomial(2, (0, 2), (1,))) == T(2, (1, 2), -2, 0, (0, 1))
    assert exterior_d(RadialExpr.monomial(2, (1, 0), (1,))).is_zero
    r_l = T(3, (), 1, Affine(1, 0))
    assert exterior_d(exterior_d(r_l)).is_zero


def test_codifferential_examples():
    assert codifferential(T(3, (), 1, Affine(1, 0))).is_zero
    assert codifferential(exterior_d(RadialExpr.monomial(2, (2, 0)))) == T(2, (), -2)
    assert codifferential(RadialExpr.monomial(2, (0, 1), (1, 2))) == T(2, (1,), 1)


def test_algebraic_examples():
    e1 = T(2, (1,))
    total = algebraic_ix_ex("i_x eps_x", e1) + algebraic_ix_ex("eps_x i_x", e1)
    assert total == T(2, (1,), 1, 2)
    assert algebraic_ix_ex("i_x", e1) == RadialExpr.monomial(2, (1, 0))
    want = RadialExpr.monomial(2, (2, 0), (1,)) + RadialExpr.monomial(2, (1, 1), (2,))
    assert algebraic_ix_ex("eps_x i_x", e1) == want


def test_algebraic_unknown_action():
    with pytest.raises(UsageError):
        algebraic_ix_ex("nonsense", T(2, (1,)))


# --------------------------------------------------------------------------
# properties against the sympy oracle

@pytest.mark.parametrize("n,p", [(2, 0), (2, 1), (3, 1), (3, 2)])
def test_d_and_delta_match_sympy(n, p):
    rng = random.Random(10 * n + p)
    for trial in range(4):
        e = random_expr(rng, n, p)
        sym = radial_to_sympy(e)
        if p < n:
            assert numeric_compare(exterior_d(e), sym_d(sym, n), n, seed=trial)
        if p > 0:
            assert numeric_compare(codifferential(e), sym_delta(sym, n), n, seed=trial)


def test_d_squared_and_delta_squared_vanish():
    rng = random.Random(5)
    for i in range(500):
        n = rng.randint(1, 4)
        p = rng.randint(0, n)
        e = random_expr(rng, n, p, terms=2)
        if p + 2 <= n:
            assert exterior_d(exterior_d(e)).is_zero
        if p >= 2:
            assert codifferential(codifferential(e)).is_zero


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_delta_d_is_minus_laplacian_on_functions(n):
    rng = random.Random(n)
    for _ in range(5):
        e = random_expr(rng, n, 0)
        assert codifferential(exterior_d(e)) == -laplacian(e)
        sym = radial_to_sympy(e).get((), 0)
        lap = sum(sp.diff(sym, x, 2) for x in xsyms(n))
        assert numeric_compare(laplacian(e), {(): lap}, n)


def test_delta_d_numbers():
    assert delta_d(RadialExpr.monomial(2, (2, 0))) == T(2, (), -2)
    e = RadialExpr.monomial(2, (2, 0))
    assert (delta_d(e) + d_delta(e)) == T(2, (), -2)


@pytest.mark.parametrize("n", range(1, 7))
def test_radial_identity_all_degrees(n):
    for p in range(n + 1):
        assert verify_radial_identity(n, p).passed


def test_radial_identity_numeric_oracle_n3_p1():
    n, p = 3, 1
    xs = xsyms(n)
    r = sp.sqrt(sum(x ** 2 for x in xs))
    for idx in basis_indices(n, p):
        start = {idx: r ** (LAM + 2)}
        lhs = sym_delta(sym_d(start, n), n)
        beta = T(n, idx)
        rhs = (beta.times_rpow(Affine(1, 0)).scale(-(L + 2) * (n - p))
               + algebraic_ix_ex("i_x eps_x", beta).times_rpow(Affine(1, -2)).scale(-(L + 2) * L))
        assert numeric_compare(rhs, lhs, n, lam=Q(1))


def test_symbol_correspondence_on_plane_wave_polynomials():
    # delta d ((x.xi)^2 beta) = -2 i_xi eps_xi beta and d delta likewise with eps_xi i_xi
    rng = random.Random(3)
    for n in (2, 3, 4):
        for p in range(n + 1):
            xi = [rng.randint(-3, 3) for _ in range(n)]
            m1 = ix_ex_at(xi, p)
            r2 = sum(t * t for t in xi)
            basis = basis_indices(n, p)
            for col, J in enumerate(basis):
                f = PolyForm(n, p)
                for a in range(n):
                    for b in range(n):
                        alpha = [0] * n
                        alpha[a] += 1
                        alpha[b] += 1
                        f = f + PolyForm(n, p, {(tuple(alpha), J): Q(xi[a] * xi[b])})
                dd = polyform.power("delta d", 1, f)
                ddl = polyform.power("d delta", 1, f)
                zero = (0,) * n
                for row, I in enumerate(basis):
                    want_dd = -2 * m1[row][col] if p < n else 0
                    want_ddl = -2 * ((r2 if row == col else 0) - m1[row][col]) if p > 0 else 0
                    assert dd.terms.get((zero, I), 0) == want_dd
                    assert ddl.terms.get((zero, I), 0) == want_ddl


# --------------------------------------------------------------------------
# conformal actions

def test_dpi_plus_on_constant_forms():
    n = 3
    for p in range(n + 1):
        for idx in basis_indices(n, p):
            for j in range(1, n + 1):
                got = dpi_plus(j, L, T(n, idx))
                want = T(n, idx, -L, 0, [1 if i == j - 1 else 0 for i in range(n)])
                from riesz_forms.radial import rotation_part
                for k in range(1, n + 1):
                    if k != j:
                        want = want + rotation_part(j, k, T(n, idx)).times_x(k)
                assert got == want


def test_dpi_plus_scalar_examples():
    assert dpi_plus(2, L, T(3, ())) == T(3, (), -L, 0, (0, 1, 0))
    got = dpi_plus(1, L, RadialExpr.monomial(3, (1, 0, 0)))
    want = T(3, (), Q(-1, 2), 2) + T(3, (), 1 - L, 0, (2, 0, 0))
    assert got == want


def test_dpi_plus_rejects_non_polynomial():
    with pytest.raises(UnsupportedError):
        dpi_plus(1, L, T(2, (), 1, Affine(1, 0)))


def test_polyform_dpi_matches_radial():
    for n in (2, 3):
        for p in range(n + 1):
            for mono in monomial_forms(n, p, 2):
                for j in range(1, n + 1):
                    a = dpi_plus(j, Q(-5, 2), mono)
                    b = polyform.dpi_plus(j, Q(-5, 2), PolyForm.from_radial(mono)).to_radial()
                    assert a == b


def test_fourier_side_d2_examples():
    n = 3
    for idx in basis_indices(n, 1):
        assert fourier_side_D2(1, L, T(n, idx)).is_zero
    got = fourier_side_D2(1, L, RadialExpr.monomial(n, (1, 0, 0)))
    assert got == T(n, (), -(L + n))
    a, b = T(n, (1,), 1, 0, (1, 1, 0)), T(n, (2,), 1, 2)
    assert fourier_side_D2(2, L, a + b) == fourier_side_D2(2, L, a) + fourier_side_D2(2, L, b)


def test_axis_checks():
    with pytest.raises(UsageError):
        partial(4, T(3, ()))
    with pytest.raises(UsageError):
        dpi_plus(0, L, T(3, ()))
