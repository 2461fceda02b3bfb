"""Polynomial-coefficient forms with rational coefficients.

A lean companion to :class:`~riesz_forms.radial.RadialExpr` for the
purely polynomial computations (operator identities checked on monomial
test forms).  Terms are keyed by (alpha, I) for x^alpha e_I; no r-powers
appear, so derivatives are plain monomial rules and the actions of powers of
delta d and d delta on unit monomials are memoized.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Dict, Iterator, Mapping, Tuple

from .errors import UnsupportedError, UsageError
from .exterior import Index, basis_indices, contract_index, wedge_index
from .radial import RadialExpr, _rotation_table
from .scalars import Affine, LambdaRational

Alpha = Tuple[int, ...]
PKey = Tuple[Alpha, Index]
Terms = Tuple[Tuple[PKey, Fraction], ...]


class PolyForm:
    """Immutable sum of c * x^alpha * e_I with rational c, degree p on R^n."""

    __slots__ = ("n", "p", "terms")

    def __init__(self, n: int, p: int, terms: Mapping[PKey, Fraction] = None):
        if not 0 <= p <= n:
            raise UsageError(f"degree {p} outside 0..{n}")
        self.n = n
        self.p = p
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def monomial(cls, n: int, alpha, basis=(), coeff=1) -> "PolyForm":
        return cls(n, len(basis), {(tuple(alpha), tuple(basis)): Fraction(coeff)})

    @classmethod
    def from_radial(cls, e: RadialExpr) -> "PolyForm":
        if not e.is_polynomial:
            raise UnsupportedError("expression is not polynomial")
        acc: Dict[PKey, Fraction] = {}
        for (s, alpha, idx), c in e.terms.items():
            if not c.is_constant:
                raise UnsupportedError("coefficients depend on l")
            cv = c.constant_value()
            for beta, m in _r2_power(e.n, int(s.b) // 2):
                key = (tuple(a + b for a, b in zip(alpha, beta)), idx)
                acc[key] = acc.get(key, 0) + cv * m
        return cls(e.n, e.p, acc)

    def to_radial(self) -> RadialExpr:
        zero = Affine()
        return RadialExpr(self.n, self.p, {(zero, a, i): LambdaRational.const(c)
                                           for (a, i), c in self.terms.items()})

    def _lin(self, acc: Dict[PKey, Fraction], p: int) -> "PolyForm":
        return PolyForm(self.n, p, acc)

    def __add__(self, other: "PolyForm") -> "PolyForm":
        if (self.n, self.p) != (other.n, other.p):
            raise UsageError("mismatched (n,p)")
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0) + v
        return PolyForm(self.n, self.p, acc)

    def __neg__(self) -> "PolyForm":
        return PolyForm(self.n, self.p, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def scale(self, c) -> "PolyForm":
        c = Fraction(c)
        return PolyForm(self.n, self.p, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, PolyForm):
            return NotImplemented
        return (self.n, self.p) == (other.n, other.p) and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.p, frozenset(self.terms.items())))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_polynomial(self) -> bool:
        return True

    def times_x(self, k: int) -> "PolyForm":
        acc = {}
        for (a, i), c in self.terms.items():
            acc[a[:k - 1] + (a[k - 1] + 1,) + a[k:], i] = c
        return PolyForm(self.n, self.p, acc)

    def times_r2(self) -> "PolyForm":
        acc: Dict[PKey, Fraction] = {}
        for (a, i), c in self.terms.items():
            for k in range(self.n):
                key = (a[:k] + (a[k] + 2,) + a[k + 1:], i)
                acc[key] = acc.get(key, 0) + c
        return PolyForm(self.n, self.p, acc)

    def __str__(self):
        return str(self.to_radial())

    def __repr__(self):
        return f"PolyForm(n={self.n}, p={self.p}: {self})"


@lru_cache(maxsize=None)
def _r2_power(n: int, j: int) -> Tuple[Tuple[Alpha, int], ...]:
    """(x_1^2 + ... + x_n^2)^j as (alpha, coefficient) pairs."""
    acc: Dict[Alpha, int] = {(0,) * n: 1}
    for _ in range(j):
        nxt: Dict[Alpha, int] = {}
        for a, c in acc.items():
            for k in range(n):
                b = a[:k] + (a[k] + 2,) + a[k + 1:]
                nxt[b] = nxt.get(b, 0) + c
        acc = nxt
    return tuple(sorted(acc.items()))


def _add_into(acc: Dict[PKey, Fraction], items, scale) -> None:
    for k, v in items:
        acc[k] = acc.get(k, 0) + v * scale


def _partial_unit(k: int, alpha: Alpha):
    m = alpha[k - 1]
    if not m:
        return None
    return alpha[:k - 1] + (m - 1,) + alpha[k:], m


@lru_cache(maxsize=None)
def _d_unit(n: int, alpha: Alpha, idx: Index) -> Terms:
    acc: Dict[PKey, Fraction] = {}
    for k in range(1, n + 1):
        dk = _partial_unit(k, alpha)
        if dk is None:
            continue
        sign, out = wedge_index(k, idx)
        if sign:
            key = (dk[0], out)
            acc[key] = acc.get(key, 0) + sign * dk[1]
    return tuple((k, Fraction(v)) for k, v in acc.items() if v)


@lru_cache(maxsize=None)
def _delta_unit(n: int, alpha: Alpha, idx: Index) -> Terms:
    acc: Dict[PKey, Fraction] = {}
    for k in range(1, n + 1):
        dk = _partial_unit(k, alpha)
        if dk is None:
            continue
        sign, out = contract_index(k, idx)
        if sign:
            key = (dk[0], out)
            acc[key] = acc.get(key, 0) - sign * dk[1]
    return tuple((k, Fraction(v)) for k, v in acc.items() if v)


def _compose_units(first, second, n: int, key: PKey) -> Terms:
    acc: Dict[PKey, Fraction] = {}
    for k1, c1 in first(n, *key):
        _add_into(acc, second(n, *k1), c1)
    return tuple((k, v) for k, v in acc.items() if v)


@lru_cache(maxsize=None)
def _power_unit(which: str, k: int, n: int, alpha: Alpha, idx: Index) -> Terms:
    """(delta d)^k or (d delta)^k applied to x^alpha e_idx."""
    if k == 0:
        return (((alpha, idx), Fraction(1)),)
    if which == "delta d":
        step = _compose_units(_d_unit, _delta_unit, n, (alpha, idx))
    else:
        step = _compose_units(_delta_unit, _d_unit, n, (alpha, idx))
    if k == 1:
        return step
    acc: Dict[PKey, Fraction] = {}
    for key, c in step:
        _add_into(acc, _power_unit(which, k - 1, n, *key), c)
    return tuple((kk, v) for kk, v in acc.items() if v)


def power(which: str, k: int, f: PolyForm) -> PolyForm:
    """(delta d)^k f or (d delta)^k f."""
    if which not in ("delta d", "d delta"):
        raise UsageError(f"unknown operator {which!r}")
    if k and ((which == "delta d" and f.p == f.n) or (which == "d delta" and f.p == 0)):
        return PolyForm(f.n, f.p)
    acc: Dict[PKey, Fraction] = {}
    for key, c in f.terms.items():
        _add_into(acc, _power_unit(which, k, f.n, *key), c)
    return PolyForm(f.n, f.p, acc)


def exterior_d(f: PolyForm) -> PolyForm:
    if f.p == f.n:
        return PolyForm(f.n, f.n)
    acc: Dict[PKey, Fraction] = {}
    for key, c in f.terms.items():
        _add_into(acc, _d_unit(f.n, *key), c)
    return PolyForm(f.n, f.p + 1, acc)


def codifferential(f: PolyForm) -> PolyForm:
    if f.p == 0:
        return PolyForm(f.n, 0)
    acc: Dict[PKey, Fraction] = {}
    for key, c in f.terms.items():
        _add_into(acc, _delta_unit(f.n, *key), c)
    return PolyForm(f.n, f.p - 1, acc)


def partial(k: int, f: PolyForm) -> PolyForm:
    acc: Dict[PKey, Fraction] = {}
    for (a, i), c in f.terms.items():
        dk = _partial_unit(k, a)
        if dk is not None:
            key = (dk[0], i)
            acc[key] = acc.get(key, 0) + c * dk[1]
    return PolyForm(f.n, f.p, acc)


def euler(f: PolyForm) -> PolyForm:
    return PolyForm(f.n, f.p, {(a, i): c * sum(a) for (a, i), c in f.terms.items()})


def dpi_plus(j: int, weight, f: PolyForm) -> PolyForm:
    """Same operator as :func:`riesz_forms.radial.dpi_plus` with a rational
    weight, on polynomial forms."""
    if not 1 <= j <= f.n:
        raise UsageError(f"axis {j} out of range 1..{f.n}")
    w = Fraction(weight)
    out = partial(j, f).times_r2().scale(Fraction(-1, 2))
    out = out + (euler(f) - f.scale(w)).times_x(j)
    if f.p:
        for k in range(1, f.n + 1):
            if k == j:
                continue
            table = _rotation_table(f.n, f.p, j, k)
            acc: Dict[PKey, Fraction] = {}
            for (a, i), c in f.terms.items():
                for o, m in table[i]:
                    key = (a[:k - 1] + (a[k - 1] + 1,) + a[k:], o)
                    acc[key] = acc.get(key, 0) + c * m
            out = out + PolyForm(f.n, f.p, acc)
    return out


def monomials(n: int, p: int, max_degree: int, min_degree: int = 0) -> Iterator[PolyForm]:
    """x^alpha e_I for min_degree <= |alpha| <= max_degree in a fixed order."""
    bases = basis_indices(n, p)
    for deg in range(min_degree, max_degree + 1):
        for combo in combinations_with_replacement(range(n), deg):
            alpha = [0] * n
            for i in combo:
                alpha[i] += 1
            alpha = tuple(alpha)
            for idx in bases:
                yield PolyForm(n, p, {(alpha, idx): Fraction(1)})
