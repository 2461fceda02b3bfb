"""Symbolic calculus on radial form expressions.

A :class:`RadialExpr` is a finite sum of terms ``c(l) * r^(a l + b) * x^alpha * e_I``
on R^n with a fixed form degree p.  The class is closed under partial
derivatives, d, the codifferential, multiplication by x_k and the algebraic
actions of i_x and eps_x, which is all the identities below need.

Canonical form: ``x_n^2`` is always rewritten as ``r^2 - sum_{k<n} x_k^2``,
so every monomial has x_n-degree at most one.  With that rule the
representation is unique and structural equality is mathematical equality.

Sign conventions: d = sum_k e_k ^ d_k and delta = -sum_k i_{e_k} d_k, so that
delta d = -Laplacian on functions.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

from .errors import UnsupportedError, UsageError
from .exterior import Index, basis_indices, contract_index, format_basis, wedge_index
from .report import CheckResult, combine, outcome
from .scalars import ONE_R, Affine, LambdaRational, as_rational

Alpha = Tuple[int, ...]
Key = Tuple[Affine, Alpha, Index]

_R0 = Affine()


@lru_cache(maxsize=None)
def _reduce_alpha(alpha: Alpha) -> Tuple[Tuple[int, Alpha, int], ...]:
    """Expand x^alpha as sum c * r^(2 j) x^beta with beta_n <= 1."""
    n = len(alpha)
    if alpha[-1] < 2:
        return ((0, alpha, 1),)
    base = alpha[:-1] + (alpha[-1] - 2,)
    acc: Dict[Tuple[int, Alpha], int] = {}
    for j, beta, c in _reduce_alpha(base):
        acc[j + 1, beta] = acc.get((j + 1, beta), 0) + c
    for k in range(n - 1):
        shifted = base[:k] + (base[k] + 2,) + base[k + 1:]
        for j, beta, c in _reduce_alpha(shifted):
            acc[j, beta] = acc.get((j, beta), 0) - c
    return tuple((j, beta, c) for (j, beta), c in sorted(acc.items()) if c)


def _as_coeff(c) -> LambdaRational:
    return as_rational(c)


def _as_affine(s) -> Affine:
    if isinstance(s, Affine):
        return s
    if isinstance(s, (int, Fraction)):
        return Affine(0, s)
    raise TypeError(f"r-power must be affine in l, got {s!r}")


class RadialExpr:
    """Immutable canonical sum of radial form terms on R^n of degree p."""

    __slots__ = ("n", "p", "terms", "_hash")

    def __init__(self, n: int, p: int, terms: Mapping[Key, LambdaRational] = None, *,
                 _canonical: bool = False):
        if n < 1:
            raise UsageError(f"ambient dimension must be positive, got {n}")
        if not 0 <= p <= n:
            raise UsageError(f"degree {p} outside 0..{n}")
        self.n = n
        self.p = p
        self._hash = None
        if _canonical:
            self.terms = terms
            return
        acc: Dict[Key, LambdaRational] = {}
        for (s, alpha, idx), c in (terms or {}).items():
            s = _as_affine(s)
            alpha = tuple(alpha)
            idx = tuple(idx)
            if len(alpha) != n or any(a < 0 for a in alpha):
                raise UsageError(f"bad multi-index {alpha} for n={n}")
            if len(idx) != p or any(not 1 <= i <= n for i in idx) or list(idx) != sorted(set(idx)):
                raise UsageError(f"bad basis {idx} for (n,p)=({n},{p})")
            _accumulate(acc, s, alpha, idx, _as_coeff(c))
        self.terms = _prune(acc)

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, n: int, p: int) -> "RadialExpr":
        return cls(n, p, {}, _canonical=True)

    @classmethod
    def term(cls, n: int, basis: Sequence[int] = (), coeff=1, rpow=0,
             alpha: Optional[Sequence[int]] = None) -> "RadialExpr":
        """``coeff * r^rpow * x^alpha * e_basis``."""
        basis = tuple(basis)
        alpha = tuple(alpha) if alpha is not None else (0,) * n
        return cls(n, len(basis), {(_as_affine(rpow), alpha, basis): coeff})

    @classmethod
    def monomial(cls, n: int, alpha: Sequence[int], basis: Sequence[int] = (), coeff=1) -> "RadialExpr":
        return cls.term(n, basis, coeff, 0, alpha)

    @classmethod
    def coordinate(cls, n: int, k: int, basis: Sequence[int] = ()) -> "RadialExpr":
        alpha = [0] * n
        alpha[k - 1] = 1
        return cls.term(n, basis, 1, 0, alpha)

    # arithmetic -----------------------------------------------------------
    def _check(self, other: "RadialExpr") -> None:
        if not isinstance(other, RadialExpr):
            raise TypeError(f"expected RadialExpr, got {type(other).__name__}")
        if (self.n, self.p) != (other.n, other.p):
            raise UsageError(f"mismatched (n,p): ({self.n},{self.p}) vs ({other.n},{other.p})")

    def __add__(self, other: "RadialExpr") -> "RadialExpr":
        self._check(other)
        acc = dict(self.terms)
        for key, c in other.terms.items():
            acc[key] = acc[key] + c if key in acc else c
        return RadialExpr(self.n, self.p, _prune(acc), _canonical=True)

    def __neg__(self) -> "RadialExpr":
        return RadialExpr(self.n, self.p, {k: -c for k, c in self.terms.items()}, _canonical=True)

    def __sub__(self, other: "RadialExpr") -> "RadialExpr":
        return self + (-other)

    def scale(self, c) -> "RadialExpr":
        c = _as_coeff(c)
        if c.is_zero:
            return RadialExpr.zero(self.n, self.p)
        return RadialExpr(self.n, self.p, {k: v * c for k, v in self.terms.items()}, _canonical=True)

    def __mul__(self, c):
        if isinstance(c, (int, Fraction, LambdaRational)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def times_rpow(self, s) -> "RadialExpr":
        """Multiply by r^s."""
        s = _as_affine(s)
        return RadialExpr(self.n, self.p, {(k[0] + s, k[1], k[2]): c for k, c in self.terms.items()},
                          _canonical=True)

    def times_x(self, k: int) -> "RadialExpr":
        """Multiply by the coordinate x_k."""
        _check_axis(k, self.n)
        acc: Dict[Key, LambdaRational] = {}
        for (s, alpha, idx), c in self.terms.items():
            a = alpha[:k - 1] + (alpha[k - 1] + 1,) + alpha[k:]
            _accumulate(acc, s, a, idx, c)
        return RadialExpr(self.n, self.p, _prune(acc), _canonical=True)

    def __eq__(self, other):
        if not isinstance(other, RadialExpr):
            return NotImplemented
        return (self.n, self.p) == (other.n, other.p) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.p, frozenset(self.terms.items())))
        return self._hash

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Key, LambdaRational]]:
        return iter(sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0])))

    @property
    def is_polynomial(self) -> bool:
        """True when every r-power is a non-negative even integer, i.e. the
        expression is a polynomial form."""
        return all(s.a == 0 and s.b >= 0 and s.b.denominator == 1 and s.b % 2 == 0
                   for s, _, _ in self.terms)

    def degree_bound(self) -> int:
        """Maximal total polynomial degree, counting r^2 as degree two."""
        if not self.is_polynomial:
            raise UnsupportedError("degree of a non-polynomial expression")
        return max((int(s.b) + sum(a) for s, a, _ in self.terms), default=0)

    def evaluate(self, lam: float, x: Sequence[float]) -> Dict[Index, float]:
        """Floating value at parameter ``lam`` and point ``x``, per basis form."""
        x = [float(t) for t in x]
        if len(x) != self.n:
            raise UsageError(f"point has {len(x)} coordinates, expected {self.n}")
        r = math.sqrt(sum(t * t for t in x))
        out: Dict[Index, float] = {}
        for (s, alpha, idx), c in self.terms.items():
            val = c.to_float(lam) * r ** float(s.a * Fraction(lam) + s.b)
            for xi, a in zip(x, alpha):
                if a:
                    val *= xi ** a
            out[idx] = out.get(idx, 0.0) + val
        return out

    def subs(self, aff: Affine) -> "RadialExpr":
        """Substitute l -> aff(l) in coefficients and r-powers."""
        acc: Dict[Key, LambdaRational] = {}
        for (s, alpha, idx), c in self.terms.items():
            key = (s.compose(aff), alpha, idx)
            v = c.subs(aff)
            acc[key] = acc[key] + v if key in acc else v
        return RadialExpr(self.n, self.p, _prune(acc), _canonical=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (s, alpha, idx), c in self:
            factors = []
            cs = str(c)
            if c != 1:
                factors.append(f"({cs})" if (" " in cs or "/" in cs) else cs)
            if s != _R0:
                factors.append(f"r^({s})")
            for i, a in enumerate(alpha, start=1):
                if a == 1:
                    factors.append(f"x{i}")
                elif a:
                    factors.append(f"x{i}^{a}")
            if idx:
                factors.append(format_basis(idx, self.n))
            parts.append("*".join(factors) if factors else "1")
        return " + ".join(parts)

    def __repr__(self):
        return f"RadialExpr(n={self.n}, p={self.p}: {self})"


def _sort_key(key: Key):
    s, alpha, idx = key
    return (s.a, s.b, alpha, idx)


def _accumulate(acc: Dict[Key, LambdaRational], s: Affine, alpha: Alpha, idx: Index,
                c: LambdaRational) -> None:
    if c.is_zero:
        return
    if alpha[-1] < 2:
        key = (s, alpha, idx)
        acc[key] = acc[key] + c if key in acc else c
        return
    for j, beta, m in _reduce_alpha(alpha):
        key = (s + 2 * j if j else s, beta, idx)
        v = c * m
        acc[key] = acc[key] + v if key in acc else v


def _prune(acc: Dict[Key, LambdaRational]) -> Dict[Key, LambdaRational]:
    return {k: v for k, v in acc.items() if not v.is_zero}


def _check_axis(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise UsageError(f"axis {k} out of range 1..{n}")


# --------------------------------------------------------------------------
# differential operators

def partial(k: int, e: RadialExpr) -> RadialExpr:
    """d/dx_k by the Leibniz rule; d_k r^s = s x_k r^(s-2)."""
    _check_axis(k, e.n)
    acc: Dict[Key, LambdaRational] = {}
    for (s, alpha, idx), c in e.terms.items():
        if s.a or s.b:
            a = alpha[:k - 1] + (alpha[k - 1] + 1,) + alpha[k:]
            _accumulate(acc, s - 2, a, idx, c * s.as_rational())
        m = alpha[k - 1]
        if m:
            a = alpha[:k - 1] + (m - 1,) + alpha[k:]
            _accumulate(acc, s, a, idx, c * m)
    return RadialExpr(e.n, e.p, _prune(acc), _canonical=True)


def _form_map(e: RadialExpr, new_p: int, action) -> RadialExpr:
    """Apply a basis-level map idx -> {idx': int} to every term."""
    acc: Dict[Key, LambdaRational] = {}
    for (s, alpha, idx), c in e.terms.items():
        for out, m in action(idx):
            key = (s, alpha, out)
            v = c * m
            acc[key] = acc[key] + v if key in acc else v
    return RadialExpr(e.n, new_p, _prune(acc), _canonical=True)


def _wedge_action(k):
    def act(idx):
        sign, out = wedge_index(k, idx)
        return ((out, sign),) if sign else ()
    return act


def _contract_action(k):
    def act(idx):
        sign, out = contract_index(k, idx)
        return ((out, sign),) if sign else ()
    return act


def wedge_e(k: int, e: RadialExpr) -> RadialExpr:
    """e_k ^ e (constant-axis wedge)."""
    _check_axis(k, e.n)
    if e.p == e.n:
        return RadialExpr.zero(e.n, e.n)
    return _form_map(e, e.p + 1, _wedge_action(k))


def contract_e(k: int, e: RadialExpr) -> RadialExpr:
    """i_{e_k} e."""
    _check_axis(k, e.n)
    if e.p == 0:
        return RadialExpr.zero(e.n, 0)
    return _form_map(e, e.p - 1, _contract_action(k))


def _sum(exprs: Iterable[RadialExpr], n: int, p: int) -> RadialExpr:
    acc: Dict[Key, LambdaRational] = {}
    for ex in exprs:
        for key, c in ex.terms.items():
            acc[key] = acc[key] + c if key in acc else c
    return RadialExpr(n, p, _prune(acc), _canonical=True)


def exterior_d(e: RadialExpr) -> RadialExpr:
    """d = sum_k e_k ^ d_k."""
    if e.p == e.n:
        return RadialExpr.zero(e.n, e.n)
    return _sum((wedge_e(k, partial(k, e)) for k in range(1, e.n + 1)), e.n, e.p + 1)


def codifferential(e: RadialExpr) -> RadialExpr:
    """delta = -sum_k i_{e_k} d_k."""
    if e.p == 0:
        return RadialExpr.zero(e.n, 0)
    return -_sum((contract_e(k, partial(k, e)) for k in range(1, e.n + 1)), e.n, e.p - 1)


def laplacian(e: RadialExpr) -> RadialExpr:
    """sum_k d_k^2 acting componentwise."""
    return _sum((partial(k, partial(k, e)) for k in range(1, e.n + 1)), e.n, e.p)


def euler(e: RadialExpr) -> RadialExpr:
    """sum_k x_k d_k; homogeneous terms are eigenvectors."""
    acc = {}
    for (s, alpha, idx), c in e.terms.items():
        v = c * (s + sum(alpha)).as_rational()
        if not v.is_zero:
            acc[s, alpha, idx] = v
    return RadialExpr(e.n, e.p, acc, _canonical=True)


ALGEBRAIC_ACTIONS = ("i_x", "eps_x", "i_x eps_x", "eps_x i_x")


def interior_x(e: RadialExpr) -> RadialExpr:
    """i_x = sum_k x_k i_{e_k}."""
    if e.p == 0:
        return RadialExpr.zero(e.n, 0)
    return _sum((contract_e(k, e).times_x(k) for k in range(1, e.n + 1)), e.n, e.p - 1)


def epsilon_x(e: RadialExpr) -> RadialExpr:
    """eps_x = sum_k x_k e_k ^ ."""
    if e.p == e.n:
        return RadialExpr.zero(e.n, e.n)
    return _sum((wedge_e(k, e).times_x(k) for k in range(1, e.n + 1)), e.n, e.p + 1)


def algebraic_ix_ex(which: str, e: RadialExpr) -> RadialExpr:
    """Apply one of ``"i_x"``, ``"eps_x"``, ``"i_x eps_x"``, ``"eps_x i_x"``."""
    if which == "i_x":
        return interior_x(e)
    if which == "eps_x":
        return epsilon_x(e)
    if which == "i_x eps_x":
        if e.p == e.n:
            return RadialExpr.zero(e.n, e.n)
        return interior_x(epsilon_x(e))
    if which == "eps_x i_x":
        if e.p == 0:
            return RadialExpr.zero(e.n, 0)
        return epsilon_x(interior_x(e))
    raise UsageError(f"unknown algebraic action {which!r}; expected one of {ALGEBRAIC_ACTIONS}")


@lru_cache(maxsize=200_000)
def _unit_second_order(which: str, n: int, p: int, key: Key) -> Tuple[Tuple[Key, LambdaRational], ...]:
    unit = RadialExpr(n, p, {key: ONE_R}, _canonical=True)
    if which == "delta d":
        out = codifferential(exterior_d(unit))
    else:
        out = exterior_d(codifferential(unit))
    return tuple(out.terms.items())


def _apply_cached(which: str, e: RadialExpr) -> RadialExpr:
    """Linear extension of a memoized action on unit terms."""
    acc: Dict[Key, LambdaRational] = {}
    for key, c in e.terms.items():
        for k2, v in _unit_second_order(which, e.n, e.p, key):
            v = v * c
            acc[k2] = acc[k2] + v if k2 in acc else v
    return RadialExpr(e.n, e.p, _prune(acc), _canonical=True)


def delta_d(e: RadialExpr) -> RadialExpr:
    if e.p == e.n:
        return RadialExpr.zero(e.n, e.n)
    return _apply_cached("delta d", e)


def d_delta(e: RadialExpr) -> RadialExpr:
    if e.p == 0:
        return RadialExpr.zero(e.n, 0)
    return _apply_cached("d delta", e)


# --------------------------------------------------------------------------
# the radial identities for delta d and d delta

def verify_radial_identity(n: int, p: int) -> CheckResult:
    """Check, for every constant basis p-form beta and formal l,

        delta d (r^(l+2) beta) = -(l+2)(n-p) r^l beta - (l+2) l r^(l-2) i_x eps_x beta
        d delta (r^(l+2) beta) = -(l+2) p r^l beta - (l+2) l r^(l-2) eps_x i_x beta
    """
    if not 0 <= p <= n:
        raise UsageError(f"degree {p} outside 0..{n}")
    lam = Affine(1, 0)
    l = lam.as_rational()
    results = []
    for idx in basis_indices(n, p):
        beta = RadialExpr.term(n, idx)
        start = beta.times_rpow(lam + 2)
        for name, lhs_op, trace, alg in (
            ("delta d", delta_d, n - p, "i_x eps_x"),
            ("d delta", d_delta, p, "eps_x i_x"),
        ):
            lhs = lhs_op(start)
            rhs = (beta.times_rpow(lam).scale(-(l + 2) * trace)
                   + algebraic_ix_ex(alg, beta).times_rpow(lam - 2).scale(-(l + 2) * l))
            diff = lhs - rhs
            results.append(outcome(f"{name} {format_basis(idx, n)}", diff.is_zero,
                                   {"basis": format_basis(idx, n)},
                                   "" if diff.is_zero else f"difference {diff}", diff or None))
    return combine("radial identity", results, {"n": n, "p": p})


# --------------------------------------------------------------------------
# infinitesimal conformal action and its Fourier image

@lru_cache(maxsize=None)
def _rotation_table(n: int, p: int, j: int, k: int) -> Dict[Index, Tuple[Tuple[Index, int], ...]]:
    """Basis action of e_j ^ i_{e_k} - e_k ^ i_{e_j} on p-forms."""
    table = {}
    for idx in basis_indices(n, p):
        acc: Dict[Index, int] = {}
        for a, b, sgn in ((j, k, 1), (k, j, -1)):
            s1, mid = contract_index(b, idx)
            if not s1:
                continue
            s2, out = wedge_index(a, mid)
            if s2:
                acc[out] = acc.get(out, 0) + sgn * s1 * s2
        table[idx] = tuple((o, c) for o, c in sorted(acc.items()) if c)
    return table


def rotation_part(j: int, k: int, e: RadialExpr) -> RadialExpr:
    """(e_j ^ i_{e_k} - e_k ^ i_{e_j}) e."""
    _check_axis(j, e.n)
    _check_axis(k, e.n)
    if j == k or e.p == 0:
        return RadialExpr.zero(e.n, e.p)
    table = _rotation_table(e.n, e.p, j, k)
    return _form_map(e, e.p, lambda idx: table[idx])


def dpi_plus(j: int, weight, e: RadialExpr) -> RadialExpr:
    """Infinitesimal action of E_j^+ with weight ``weight`` on a polynomial form:

        (-1/2 r^2 d_j + x_j(-weight + E)) e + sum_k x_k (e_j ^ i_{e_k} - e_k ^ i_{e_j}) e

    where E is the Euler operator.
    """
    _check_axis(j, e.n)
    if not e.is_polynomial:
        raise UnsupportedError("dpi_plus acts on polynomial-coefficient forms only")
    w = as_rational(weight)
    first = partial(j, e).times_rpow(2).scale(Fraction(-1, 2))
    second = (euler(e) - e.scale(w)).times_x(j)
    rot = _sum((rotation_part(j, k, e).times_x(k) for k in range(1, e.n + 1) if k != j), e.n, e.p)
    return first + second + rot


def fourier_side_D2(j: int, weight, e: RadialExpr) -> RadialExpr:
    """Fourier image of dpi_plus(j, weight) up to the global factor -i:

        1/2 xi_j Lap e - (weight + n + E) d_j e + sum_k d_k (e_j ^ i_{e_k} - e_k ^ i_{e_j}) e

    with the variable of ``e`` read as the frequency xi.
    """
    _check_axis(j, e.n)
    w = as_rational(weight) + e.n
    dj = partial(j, e)
    first = laplacian(e).times_x(j).scale(Fraction(1, 2))
    second = -(euler(dj) + dj.scale(w))
    rot = _sum((partial(k, rotation_part(j, k, e)) for k in range(1, e.n + 1) if k != j), e.n, e.p)
    return first + second + rot


def monomial_forms(n: int, p: int, max_degree: int) -> Iterator[RadialExpr]:
    """All x^alpha e_I with |alpha| <= max_degree, in a fixed order.

    Monomials with x_n-degree >= 2 are included; their canonical forms
    contain r^2 but they remain polynomial.
    """
    bases = basis_indices(n, p)
    for deg in range(max_degree + 1):
        for combo in combinations_with_replacement(range(n), deg):
            alpha = [0] * n
            for i in combo:
                alpha[i] += 1
            for idx in bases:
                yield RadialExpr.term(n, idx, 1, 0, alpha)


def operators_agree(op1, op2, forms, name: str = "operator equality", params=None) -> CheckResult:
    """Compare two linear operators on a finite family of test forms.

    For differential operators of order <= m with polynomial coefficients
    the monomial forms of degree <= m are a complete test family: the action
    on them determines every coefficient triangularly.
    """
    count = 0
    for mono in forms:
        count += 1
        diff = op1(mono) - op2(mono)
        if not diff.is_zero:
            return outcome(name, False, params, f"differ on {mono}: {diff}", diff)
    return outcome(name, True, params, f"agree on {count} test forms")
