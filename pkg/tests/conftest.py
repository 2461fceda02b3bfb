"""Shared oracles for the test suite, coded independently of the package."""

from __future__ import annotations

import random
from fractions import Fraction

import sympy as sp

LAM = sp.Symbol("l")


def xsyms(n):
    return sp.symbols(f"x1:{n + 1}", real=True)


def perm_sign(seq):
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def oracle_wedge(k, idx):
    """e_k ^ e_idx as (sign, sorted idx) via permutation signs."""
    if k in idx:
        return 0, ()
    seq = (k,) + tuple(idx)
    return perm_sign(seq), tuple(sorted(seq))


def oracle_contract(k, idx):
    if k not in idx:
        return 0, ()
    pos = idx.index(k)
    return (-1) ** pos, tuple(i for i in idx if i != k)


def to_sympy_rational(r):
    num = sum(sp.Rational(c.numerator, c.denominator) * LAM ** i for i, c in enumerate(r.num))
    den = sum(sp.Rational(c.numerator, c.denominator) * LAM ** i for i, c in enumerate(r.den))
    return num / den


def radial_to_sympy(e):
    """Dict basis -> sympy expression in x1..xn and l."""
    xs = xsyms(e.n)
    r = sp.sqrt(sum(x ** 2 for x in xs))
    out = {}
    for (s, alpha, idx), c in e.terms.items():
        term = to_sympy_rational(c) * r ** (sp.Rational(s.a) * LAM + sp.Rational(s.b))
        for x, a in zip(xs, alpha):
            term *= x ** a
        out[idx] = out.get(idx, 0) + term
    return out


def sym_d(form, n):
    xs = xsyms(n)
    out = {}
    for idx, f in form.items():
        for k in range(1, n + 1):
            s, j = oracle_wedge(k, idx)
            if s:
                out[j] = out.get(j, 0) + s * sp.diff(f, xs[k - 1])
    return out


def sym_delta(form, n):
    xs = xsyms(n)
    out = {}
    for idx, f in form.items():
        for k in range(1, n + 1):
            s, j = oracle_contract(k, idx)
            if s:
                out[j] = out.get(j, 0) - s * sp.diff(f, xs[k - 1])
    return out


def numeric_compare(got_expr, sym_form, n, lam=Fraction(1, 3), seed=0, points=3, rel=1e-9):
    """Compare a RadialExpr against a sympy form dictionary at random points."""
    rng = random.Random(seed)
    xs = xsyms(n)
    for _ in range(points):
        x = [rng.uniform(0.3, 1.7) * rng.choice((-1, 1)) for _ in range(n)]
        got = got_expr.evaluate(lam, x)
        subs = {LAM: sp.Rational(lam.numerator, lam.denominator), **dict(zip(xs, x))}
        keys = set(got) | set(sym_form)
        for k in keys:
            want = float(sp.N(sp.sympify(sym_form.get(k, 0)).subs(subs)))
            have = got.get(k, 0.0)
            scale = max(1.0, abs(want))
            if abs(have - want) > rel * scale:
                return False
    return True
