"""Riesz distributions on p-forms and their exact Fourier-side calculus.

The family is

    R^l_{A,B}(x) = r^(l-2)(x) (A(l) i_x eps_x + B(l) eps_x i_x)

and everything here is reduced to the two-dimensional algebra spanned by
i_xi eps_xi and eps_xi i_xi, with

    (i_xi eps_xi)^2 = r^2 i_xi eps_xi,  (eps_xi i_xi)^2 = r^2 eps_xi i_xi,
    i_xi eps_xi eps_xi i_xi = eps_xi i_xi i_xi eps_xi = 0.

Fourier convention: F(f)(xi) = integral f(x) exp(+i <x, xi>) dx, so that
d -> -i eps_xi, delta -> +i i_xi and delta d -> i_xi eps_xi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, Optional, Tuple

from .errors import (HypothesisViolation, NotDifferentialOperatorError, UnsupportedError,
                     UsageError)
from . import polyform
from .polyform import PolyForm
from .radial import RadialExpr, algebraic_ix_ex, d_delta, delta_d
from .report import CheckResult, outcome
from .scalars import (L, ONE_R, ZERO_R, Affine, GammaExpr, LambdaRational, as_rational,
                      pochhammer)

Q = Fraction
LAM = Affine(1, 0)


def _q(x) -> LambdaRational:
    return as_rational(x)


def _g(x) -> GammaExpr:
    if isinstance(x, GammaExpr):
        return x.normalize()
    return GammaExpr(as_rational(x)).normalize()


# --------------------------------------------------------------------------
# parameters and families

@dataclass(frozen=True)
class RieszParams:
    """Data (n, p, A, B) of the family R^l_{A,B} on p-forms of R^n.

    A and B must be polynomial in l unless ``extended`` is set, which admits
    rational parameters (experimental: pole bookkeeping of A and B is not
    attempted).
    """

    n: int
    p: int
    A: LambdaRational
    B: LambdaRational
    extended: bool = False
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise UsageError(f"ambient dimension must be positive, got {self.n}")
        if not 0 <= self.p <= self.n:
            raise UsageError(f"degree {self.p} outside 0..{self.n}")
        object.__setattr__(self, "A", _q(self.A))
        object.__setattr__(self, "B", _q(self.B))
        if not self.extended and not (self.A.is_polynomial and self.B.is_polynomial):
            raise UsageError("A and B must be polynomial in l; pass extended=True for rational data")

    def with_degree(self, p: int) -> "RieszParams":
        return RieszParams(self.n, p, self.A, self.B, self.extended, self.name)

    def __str__(self):
        return f"{self.name}(n={self.n}, p={self.p}, A={self.A}, B={self.B})"


def alpha_coeff(n: int, p: int, lam=L) -> LambdaRational:
    """alpha_l = n/2 - p + l."""
    return _q(lam) + (Q(n, 2) - p)


def beta_coeff(n: int, p: int, lam=L) -> LambdaRational:
    """beta_l = n/2 - p - l."""
    return (Q(n, 2) - p) - _q(lam)


FAMILIES = ("riesz", "scalar", "knapp-stein", "self-dual", "custom")


def family(name: str, n: int, p: int, A=None, B=None) -> RieszParams:
    """Named parameter families.

    ``riesz``        (A, B) = (1, 0)
    ``scalar``       (A, B) = (1, 1); the kernel is r^l times the identity
    ``knapp-stein``  (A, B) = (1, -1)
    ``self-dual``    (A, B) = (alpha_l, beta_l)
    ``custom``       user-supplied polynomials A, B
    """
    if name == "riesz":
        return RieszParams(n, p, ONE_R, ZERO_R, name=name)
    if name == "scalar":
        return RieszParams(n, p, ONE_R, ONE_R, name=name)
    if name == "knapp-stein":
        return RieszParams(n, p, ONE_R, -ONE_R, name=name)
    if name == "self-dual":
        return RieszParams(n, p, alpha_coeff(n, p), beta_coeff(n, p), name=name)
    if name == "custom":
        if A is None or B is None:
            raise UsageError("custom family needs both A and B")
        return RieszParams(n, p, _q(A), _q(B), name=name)
    raise UsageError(f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}")


def cd_coefficients(params: RieszParams) -> Tuple[LambdaRational, LambdaRational]:
    """C = (l+p)A - pB and D = -(n-p)A + (l+n-p)B."""
    n, p, A, B = params.n, params.p, params.A, params.B
    C = (L + p) * A - B * p
    D = A * (-(n - p)) + (L + (n - p)) * B
    return C, D


# --------------------------------------------------------------------------
# multipliers

@dataclass(frozen=True)
class Multiplier:
    """r^rpow(xi) (P i_xi eps_xi + Q eps_xi i_xi) on p-forms of R^n.

    On 0-forms eps_xi i_xi vanishes and on n-forms i_xi eps_xi does, so the
    corresponding coefficient is set to zero; this makes equality exact.
    """

    n: int
    p: int
    rpow: Affine
    P: LambdaRational
    Q: LambdaRational

    def __post_init__(self):
        rpow = self.rpow if isinstance(self.rpow, Affine) else Affine(0, self.rpow)
        object.__setattr__(self, "rpow", rpow)
        P, Qc = _q(self.P), _q(self.Q)
        if self.p == 0:
            Qc = ZERO_R
        if self.p == self.n:
            P = ZERO_R
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "Q", Qc)

    @classmethod
    def identity(cls, n: int, p: int) -> "Multiplier":
        return cls(n, p, Affine(0, -2), ONE_R, ONE_R)

    @classmethod
    def reflection(cls, n: int, p: int) -> "Multiplier":
        """r^-2 (i eps - eps i): reflection in the hyperplane orthogonal to xi."""
        return cls(n, p, Affine(0, -2), ONE_R, -ONE_R)

    def compose(self, other: "Multiplier") -> "Multiplier":
        if (self.n, self.p) != (other.n, other.p):
            raise UsageError("multipliers act on different spaces")
        return Multiplier(self.n, self.p, self.rpow + other.rpow + 2, self.P * other.P, self.Q * other.Q)

    __matmul__ = compose

    def subs(self, aff: Affine) -> "Multiplier":
        return Multiplier(self.n, self.p, self.rpow.compose(aff), self.P.subs(aff), self.Q.subs(aff))

    def at(self, lam0) -> "Multiplier":
        """Freeze l = lam0."""
        return self.subs(Affine(0, Q(lam0)))

    @property
    def is_identity(self) -> bool:
        return self == Multiplier.identity(self.n, self.p)

    @property
    def is_polynomial(self) -> bool:
        """True when the symbol is a polynomial in xi, i.e. the multiplier
        comes from a constant-coefficient differential operator."""
        if not self.rpow.is_constant:
            return False
        s = self.rpow.b
        if s.denominator != 1 or s % 2:
            return False
        if s >= 0:
            return True
        if s == -2:
            # r^-2 (P i eps + Q eps i) is a polynomial only when it is P * Id
            return self.p in (0, self.n) or self.P == self.Q
        return False

    def apply(self, e: RadialExpr) -> RadialExpr:
        """Multiply a radial expression (in the frequency variable) pointwise."""
        if (e.n, e.p) != (self.n, self.p):
            raise UsageError("form space mismatch")
        out = RadialExpr.zero(self.n, self.p)
        if not self.P.is_zero:
            out = out + algebraic_ix_ex("i_x eps_x", e).scale(self.P)
        if not self.Q.is_zero:
            out = out + algebraic_ix_ex("eps_x i_x", e).scale(self.Q)
        return out.times_rpow(self.rpow)

    def __str__(self):
        return f"r^({self.rpow})*[({self.P})*i_xi eps_xi + ({self.Q})*eps_xi i_xi]"


@dataclass(frozen=True)
class ScaledMultiplier:
    """constant * multiplier, compared by the products constant*P and
    constant*Q so that factors may move freely between the two parts."""

    constant: GammaExpr
    multiplier: Multiplier

    def parts(self) -> Tuple[GammaExpr, GammaExpr]:
        c = self.constant
        return c * self.multiplier.P, c * self.multiplier.Q

    def compose(self, other: "ScaledMultiplier") -> "ScaledMultiplier":
        return ScaledMultiplier(self.constant * other.constant, self.multiplier.compose(other.multiplier))

    def difference(self, other: "ScaledMultiplier") -> Optional[str]:
        """None when equal; otherwise a description of the first mismatch."""
        m1, m2 = self.multiplier, other.multiplier
        if (m1.n, m1.p) != (m2.n, m2.p):
            return "different form spaces"
        zero1 = all(x.is_zero for x in self.parts())
        zero2 = all(x.is_zero for x in other.parts())
        if zero1 and zero2:
            return None
        if m1.rpow != m2.rpow:
            return f"r-powers differ: {m1.rpow} vs {m2.rpow}"
        for label, a, b in zip(("i_xi eps_xi", "eps_xi i_xi"), self.parts(), other.parts()):
            if a == b:
                continue
            if b.is_zero or a.is_zero:
                return f"{label} coefficient: {a} vs {b}"
            ratio = a / b
            return f"{label} coefficient ratio {ratio} (expected 1)"
        return None

    def __eq__(self, other):
        if not isinstance(other, ScaledMultiplier):
            return NotImplemented
        return self.difference(other) is None

    def __hash__(self):
        return hash((self.multiplier.n, self.multiplier.p, self.multiplier.rpow))

    def __str__(self):
        return f"{self.constant} * {self.multiplier}"


# --------------------------------------------------------------------------
# Fourier transform

def fourier_constant(n: int) -> GammaExpr:
    """c(l) = -2^(l+n-1) pi^(n/2) G((l+n)/2) / G(1 - l/2)."""
    return GammaExpr.make(
        -ONE_R, Affine(1, n - 1), Q(n, 2),
        [(Affine(Q(1, 2), Q(n, 2)), 1), (Affine(Q(-1, 2), 1), -1)],
    )


def fourier(params: RieszParams) -> Tuple[GammaExpr, Multiplier]:
    """F(R^l_{A,B})(xi) = c(l) r^(-l-n-2)(xi) (C i_xi eps_xi + D eps_xi i_xi)."""
    C, D = cd_coefficients(params)
    m = Multiplier(params.n, params.p, Affine(-1, -params.n - 2), C, D)
    return fourier_constant(params.n), m


def fourier_scaled(params: RieszParams) -> ScaledMultiplier:
    c, m = fourier(params)
    return ScaledMultiplier(c, m)


def double_fourier(params: RieszParams) -> Tuple[GammaExpr, LambdaRational, LambdaRational]:
    """Transform F(R^l_{A,B}) once more, reading C(l), D(l) as the parameters
    of the family at exponent mu = -l-n.  Returns (constant, A2, B2) with
    F(F(R^l_{A,B})) = constant * R^l_{A2,B2}; inversion predicts
    constant * A2 = (2 pi)^n A and likewise for B.
    """
    n, p = params.n, params.p
    c = fourier_constant(n)
    mu = Affine(-1, -n)
    C, D = cd_coefficients(params)
    c2 = fourier_constant(n).subs(mu)
    mu_r = mu.as_rational()
    A2 = (mu_r + p) * C - D * p
    B2 = C * (-(n - p)) + (mu_r + (n - p)) * D
    return c * c2, A2, B2


# --------------------------------------------------------------------------
# weighted sums of powers of delta d and d delta

Coeff = GammaExpr


class DiffOpLP:
    """sum_k a_k (delta d)^k + b_k (d delta)^k on p-forms of R^n.

    The k = 0 entry (a_0, b_0) denotes a_0 Pi_1 + b_0 Pi_2 where
    Pi_1 = r^-2 i_xi eps_xi and Pi_2 = r^-2 eps_xi i_xi are the Fourier
    symbols of the complementary projectors onto the ranges of delta d and
    d delta; it is the differential operator a_0 Id exactly when a_0 = b_0
    (or when only one projector is nonzero, p = 0 or p = n).  With this
    reading (delta d)^k has symbol r^(2k) Pi_1 for every k >= 0 and
    composition multiplies coefficients power by power.
    """

    __slots__ = ("n", "p", "terms")

    def __init__(self, n: int, p: int, terms: Dict[int, Tuple] = None):
        if not 0 <= p <= n:
            raise UsageError(f"degree {p} outside 0..{n}")
        self.n = n
        self.p = p
        clean: Dict[int, Tuple[Coeff, Coeff]] = {}
        for k, (a, b) in (terms or {}).items():
            if k < 0:
                raise UsageError(f"negative power {k}")
            a, b = _g(a), _g(b)
            if p == 0:
                b = GammaExpr.zero()
            if p == n:
                a = GammaExpr.zero()
            if a.is_zero and b.is_zero:
                continue
            clean[k] = (a, b)
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def identity(cls, n: int, p: int) -> "DiffOpLP":
        return cls(n, p, {0: (1, 1)})

    @classmethod
    def power(cls, n: int, p: int, k: int, a=1, b=1) -> "DiffOpLP":
        return cls(n, p, {k: (a, b)})

    def _check(self, other: "DiffOpLP") -> None:
        if (self.n, self.p) != (other.n, other.p):
            raise UsageError("operators act on different spaces")

    def __add__(self, other: "DiffOpLP") -> "DiffOpLP":
        self._check(other)
        acc = dict(self.terms)
        for k, (a, b) in other.terms.items():
            if k in acc:
                a0, b0 = acc[k]
                acc[k] = (a0 + a, b0 + b)
            else:
                acc[k] = (a, b)
        return DiffOpLP(self.n, self.p, acc)

    def __neg__(self) -> "DiffOpLP":
        return self.scale(-1)

    def __sub__(self, other: "DiffOpLP") -> "DiffOpLP":
        return self + (-other)

    def scale(self, c) -> "DiffOpLP":
        c = _g(c)
        return DiffOpLP(self.n, self.p, {k: (c * a, c * b) for k, (a, b) in self.terms.items()})

    def compose(self, other: "DiffOpLP") -> "DiffOpLP":
        """self after other; (delta d)(d delta) = 0 keeps the two parts apart."""
        self._check(other)
        out = DiffOpLP(self.n, self.p)
        for k1, (a1, b1) in self.terms.items():
            for k2, (a2, b2) in other.terms.items():
                out = out + DiffOpLP(self.n, self.p, {k1 + k2: (a1 * a2, b1 * b2)})
        return out

    __matmul__ = compose

    def __eq__(self, other):
        if not isinstance(other, DiffOpLP):
            return NotImplemented
        return (self.n, self.p) == (other.n, other.p) and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.p, tuple(self.terms)))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_differential(self) -> bool:
        if 0 not in self.terms or self.p in (0, self.n):
            return True
        a, b = self.terms[0]
        return a == b

    @property
    def order(self) -> int:
        return 2 * max(self.terms, default=0)

    def coefficient(self, k: int) -> Tuple[GammaExpr, GammaExpr]:
        return self.terms.get(k, (GammaExpr.zero(), GammaExpr.zero()))

    def symbol(self) -> ScaledMultiplier:
        """Fourier symbol of a single-power operator as constant * multiplier."""
        if len(self.terms) > 1:
            raise UnsupportedError("symbol of a sum of different powers is not a single multiplier")
        if not self.terms:
            return ScaledMultiplier(GammaExpr.zero(), Multiplier(self.n, self.p, Affine(0, -2), 0, 0))
        (k, (a, b)), = self.terms.items()
        if a.transcendental_key() == b.transcendental_key() or a.is_zero or b.is_zero:
            base = b if a.is_zero else a
            c = GammaExpr(ONE_R, base.two, base.pi_exp, base.gammas)
            P = (a / c).as_rational() if not a.is_zero else ZERO_R
            Qc = (b / c).as_rational() if not b.is_zero else ZERO_R
            return ScaledMultiplier(c, Multiplier(self.n, self.p, Affine(0, 2 * k - 2), P, Qc))
        raise UnsupportedError("coefficients with different transcendental parts")

    def _constant_coefficients(self):
        out = {}
        for k, (a, b) in self.terms.items():
            pair = []
            for c in (a, b):
                if c.is_zero:
                    pair.append(Q(0))
                    continue
                if not c.is_rational:
                    return None
                r = c.as_rational()
                if not r.is_constant:
                    return None
                pair.append(r.constant_value())
            out[k] = tuple(pair)
        return out

    def _apply_poly(self, f: PolyForm, coeffs) -> PolyForm:
        out = PolyForm(f.n, f.p)
        for k, (a, b) in coeffs.items():
            if k == 0:
                out = out + f.scale(b if self.p == self.n else a)
                continue
            if a:
                out = out + polyform.power("delta d", k, f).scale(a)
            if b:
                out = out + polyform.power("d delta", k, f).scale(b)
        return out

    def apply(self, e):
        """Apply to a RadialExpr or PolyForm by iterating d and delta;
        coefficients must be rational functions of l."""
        if (e.n, e.p) != (self.n, self.p):
            raise UsageError("form space mismatch")
        if not self.is_differential:
            raise NotDifferentialOperatorError("k = 0 part is a non-trivial projector combination")
        coeffs = self._constant_coefficients()
        if isinstance(e, PolyForm):
            if coeffs is None:
                raise UnsupportedError("polynomial forms need constant rational coefficients")
            return self._apply_poly(e, coeffs)
        if coeffs is not None and e.is_polynomial and all(c.is_constant for c in e.terms.values()):
            return self._apply_poly(PolyForm.from_radial(e), coeffs).to_radial()
        out = RadialExpr.zero(self.n, self.p)
        for k, (a, b) in self.terms.items():
            ca = a.as_rational() if not a.is_zero else ZERO_R
            cb = b.as_rational() if not b.is_zero else ZERO_R
            if k == 0:
                out = out + e.scale(cb if self.p == self.n else ca)
                continue
            if not ca.is_zero:
                t = e
                for _ in range(k):
                    t = delta_d(t)
                out = out + t.scale(ca)
            if not cb.is_zero:
                t = e
                for _ in range(k):
                    t = d_delta(t)
                out = out + t.scale(cb)
        return out

    def __call__(self, e: RadialExpr) -> RadialExpr:
        return self.apply(e)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, (a, b) in self.terms.items():
            if k == 0 and self.is_differential:
                c = b if self.p == self.n else a
                parts.append(f"({c})*Id")
                continue
            dd = "Pi_1" if k == 0 else ("(delta d)" if k == 1 else f"(delta d)^{k}")
            dl = "Pi_2" if k == 0 else ("(d delta)" if k == 1 else f"(d delta)^{k}")
            if not a.is_zero:
                parts.append(f"({a})*{dd}")
            if not b.is_zero:
                parts.append(f"({b})*{dl}")
        return " + ".join(parts)

    def __repr__(self):
        return f"DiffOpLP(n={self.n}, p={self.p}: {self})"


# --------------------------------------------------------------------------
# Bernstein-Sato operators

def bernstein_sato_operator(params: RieszParams, k: int) -> Tuple[DiffOpLP, LambdaRational]:
    """D_2k = C(l) D(l+2k) (delta d)^k + C(l+2k) D(l) (d delta)^k and the
    constant b(l) = (-1)^k 4^k (l/2)_k ((l+n)/2)_k C(l+2k) D(l+2k) with
    D_2k R^(l+2k) = b(l) R^l."""
    if k < 1:
        raise UsageError(f"order parameter must be positive, got {k}")
    n = params.n
    C, D = cd_coefficients(params)
    shift = Affine(1, 2 * k)
    C2, D2 = C.subs(shift), D.subs(shift)
    op = DiffOpLP(n, params.p, {k: (C * D2, C2 * D)})
    rhs = (pochhammer(L / 2, k) * pochhammer((L + n) / 2, k) * C2 * D2) * ((-4) ** k)
    return op, rhs


def verify_bernstein_sato(params: RieszParams, k: int) -> CheckResult:
    """Check symbol(D_2k) * F(R^(l+2k)) == b(l) * F(R^l) exactly."""
    op, rhs = bernstein_sato_operator(params, k)
    shifted = fourier_scaled(params)
    shift = Affine(1, 2 * k)
    shifted = ScaledMultiplier(shifted.constant.subs(shift), shifted.multiplier.subs(shift))
    lhs = op.symbol().compose(shifted)
    base = fourier_scaled(params)
    right = ScaledMultiplier(base.constant * rhs, base.multiplier)
    diff = lhs.difference(right)
    return outcome("bernstein-sato", diff is None,
                   {"family": params.name, "n": params.n, "p": params.p, "k": k},
                   diff or "symbol identity exact", diff)


def _r_family(params: RieszParams, lam: Affine, beta_idx) -> RadialExpr:
    """R^lam_{A(lam),B(lam)} applied to the constant basis form e_beta."""
    n = params.n
    beta = RadialExpr.term(n, beta_idx)
    A, B = params.A.subs(lam), params.B.subs(lam)
    out = RadialExpr.zero(n, params.p)
    if not A.is_zero:
        out = out + algebraic_ix_ex("i_x eps_x", beta).scale(A)
    if not B.is_zero:
        out = out + algebraic_ix_ex("eps_x i_x", beta).scale(B)
    return out.times_rpow(lam - 2)


def verify_bernstein_sato_spatial(params: RieszParams, k: int) -> CheckResult:
    """The same identity checked pointwise in x (away from the origin) by
    applying D_2k to the kernel with the radial calculus."""
    from .exterior import basis_indices

    op, rhs = bernstein_sato_operator(params, k)
    meta = {"family": params.name, "n": params.n, "p": params.p, "k": k}
    for idx in basis_indices(params.n, params.p):
        lhs = op.apply(_r_family(params, Affine(1, 2 * k), idx))
        right = _r_family(params, LAM, idx).scale(rhs)
        diff = lhs - right
        if not diff.is_zero:
            return outcome("bernstein-sato (x side)", False, meta, f"difference {diff}", diff)
    return outcome("bernstein-sato (x side)", True, meta, "kernel identity exact")


# --------------------------------------------------------------------------
# residues

@dataclass(frozen=True)
class Residue:
    """Residue of F(R^l_{A,B}) at l = -n-2k.

    ``scaled`` is the residue as constant * multiplier (multiplier frozen at
    the pole); ``diff_op`` is the same object as a differential operator
    applied to the Dirac mass, or None when the k = 0 residue is not
    differential.
    """

    params: RieszParams
    k: int
    pole: Fraction
    constant: GammaExpr
    multiplier: Multiplier
    diff_op: Optional[DiffOpLP]

    @property
    def differential(self) -> bool:
        return self.diff_op is not None

    @property
    def scaled(self) -> ScaledMultiplier:
        return ScaledMultiplier(self.constant, self.multiplier)


def residue_at(params: RieszParams, k: int) -> Residue:
    """Residue at l = -n-2k computed from the analytically continued Gamma
    constant, without dividing by C(-n) or D(-n)."""
    if k < 0:
        raise UsageError(f"k must be non-negative, got {k}")
    n, p = params.n, params.p
    pole = Q(-n - 2 * k)
    c, m = fourier(params)
    if params.extended:
        # A, B may have poles: take residues of c*C and c*D separately
        rc = (c * m.P).residue_at(pole)
        rd = (c * m.Q).residue_at(pole)
        base = rc if not rc.is_zero else rd
        unit = GammaExpr(ONE_R, base.two, base.pi_exp, base.gammas)
        P = (rc / unit).as_rational() if not rc.is_zero else ZERO_R
        Qc = (rd / unit).as_rational() if not rd.is_zero else ZERO_R
        mult = Multiplier(n, p, Affine(0, 2 * k - 2), P, Qc)
        const = unit
    else:
        const = c.residue_at(pole)
        mult = m.at(pole)
    op = DiffOpLP(n, p, {k: (const * mult.P, const * mult.Q)})
    return Residue(params, k, pole, const, mult, op if op.is_differential else None)


def residue_closed_form(params: RieszParams, k: int) -> ScaledMultiplier:
    """The residue written through C(-n), D(-n):

        K [C(-n-2k)/C(-n) r^(2k) Pi_1 + D(-n-2k)/D(-n) r^(2k) Pi_2] R^0_{C(-n),D(-n)}

    with K = (-1)^(k+1) pi^(n/2) / (4^k k! G(n/2+k+1)).  Requires the
    divisions to be defined on the form degree at hand.
    """
    n, p = params.n, params.p
    C, D = cd_coefficients(params)
    c0, d0 = C(-n), D(-n)
    ck, dk = C(-n - 2 * k), D(-n - 2 * k)
    if (p < n and c0 == 0) or (p > 0 and d0 == 0):
        raise HypothesisViolation("C(-n) or D(-n) vanishes; closed form undefined",
                                  residual=(c0, d0))
    K = GammaExpr.make(Q((-1) ** (k + 1), 4 ** k * factorial(k)), None, Q(n, 2),
                       [(Affine(0, Q(n, 2) + k + 1), -1)])
    P = Q(ck) / c0 if p < n else Q(0)
    Qc = Q(dk) / d0 if p > 0 else Q(0)
    projected = Multiplier(n, p, Affine(0, 2 * k - 2), P, Qc)
    r0 = Multiplier(n, p, Affine(0, -2), c0, d0)
    return ScaledMultiplier(K, projected.compose(r0))


# --------------------------------------------------------------------------
# convolution and semigroup identities

def _relevant_cd(p: int, n: int):
    return p < n, p > 0


def convolution_constant(params1: RieszParams, params2: Optional[RieszParams] = None) -> GammaExpr:
    """K(l) with R^(2(l-n))_{A,B} * R^(-2l)_{A',B'} = K(l) delta_0.

    Requires C(2l-2n) C'(-2l) = D(2l-2n) D'(-2l) (only the components
    present on p-forms are compared).  The constant is obtained from the
    product of the two Fourier images and equals

        pi^n G((2l-n)/2) G((n-2l)/2) / (4 G(n-l+1) G(l+1)) C(2l-2n) C'(-2l).
    """
    params2 = params2 or params1
    n, p = params1.n, params1.p
    if (params2.n, params2.p) != (n, p):
        raise UsageError("both families must act on the same p-forms")
    s1 = Affine(2, -2 * n)
    s2 = Affine(-2, 0)
    C1, D1 = (x.subs(s1) for x in cd_coefficients(params1))
    C2, D2 = (x.subs(s2) for x in cd_coefficients(params2))
    has_p, has_q = _relevant_cd(p, n)
    if has_p and has_q:
        residual = C1 * C2 - D1 * D2
        if not residual.is_zero:
            raise HypothesisViolation(f"C C' - D D' = {residual} is not zero", residual=residual)
    f1, f2 = fourier_scaled(params1), fourier_scaled(params2)
    prod = ScaledMultiplier(f1.constant.subs(s1), f1.multiplier.subs(s1)).compose(
        ScaledMultiplier(f2.constant.subs(s2), f2.multiplier.subs(s2)))
    m = prod.multiplier
    if m.rpow != Affine(0, -2):
        raise AssertionError(f"composed multiplier has r-power {m.rpow}")
    coeff = m.P if has_p else m.Q
    return prod.constant * coeff


def convolution_closed_form(params1: RieszParams, params2: Optional[RieszParams] = None) -> GammaExpr:
    """pi^n G((2l-n)/2) G((n-2l)/2) / (4 G(n-l+1) G(l+1)) times the relevant
    coefficient product."""
    params2 = params2 or params1
    n, p = params1.n, params1.p
    C1, D1 = (x.subs(Affine(2, -2 * n)) for x in cd_coefficients(params1))
    C2, D2 = (x.subs(Affine(-2, 0)) for x in cd_coefficients(params2))
    prod = C1 * C2 if p < n else D1 * D2
    base = GammaExpr.make(Q(1, 4), None, n, [
        (Affine(1, Q(-n, 2)), 1), (Affine(-1, Q(n, 2)), 1),
        (Affine(-1, n + 1), -1), (Affine(1, 1), -1)])
    return base * prod


def semigroup_normalization(n: int) -> GammaExpr:
    """N(l) = -G(-(l-n-2)/2) / (2^(l-1) pi^(n/2) G(l/2)); N(l) c(l-n) = 1."""
    return GammaExpr.make(-ONE_R, Affine(-1, 1), Q(-n, 2),
                          [(Affine(Q(-1, 2), Q(n + 2, 2)), 1), (Affine(Q(1, 2), 0), -1)])


def semigroup_compose(params1: RieszParams, params2: RieszParams, nu) -> RieszParams:
    """Parameters (A'', B'') with  Rbar^l_{A,B} * Rbar^nu_{A',B'} = Rbar^(l+nu)_{A'',B''}.

    ``nu`` is a fixed rational; l stays formal.  The result is returned as a
    family in its own exponent mu = l + nu - n, i.e. A''(mu), B''(mu), and is
    genuinely rational in general (extended mode).  Here Rbar^l = N(l) R^(l-n)
    with Fourier image r^(-l-2)(C(l-n), D(l-n)).
    """
    n, p = params1.n, params1.p
    if (params2.n, params2.p) != (n, p):
        raise UsageError("both families must act on the same p-forms")
    nu = Q(nu)
    C1, D1 = cd_coefficients(params1)
    C2, D2 = cd_coefficients(params2)
    # in terms of mu: l - n = mu - nu
    to_l = Affine(1, -nu)
    X = C1.subs(to_l) * C2(nu - n)
    Y = D1.subs(to_l) * D2(nu - n)
    S = L + n  # l + nu
    den = S * (S - n)
    A2 = ((S - p) * X + Y * p) / den
    B2 = (X * (n - p) + (S - n + p) * Y) / den
    return RieszParams(n, p, A2, B2, extended=True, name="semigroup")


def semigroup_targets(params1: RieszParams, params2: RieszParams, nu) -> Tuple[LambdaRational, LambdaRational]:
    """C(l-n) C'(nu-n) and D(l-n) D'(nu-n) written in mu = l + nu - n."""
    n = params1.n
    nu = Q(nu)
    C1, D1 = cd_coefficients(params1)
    C2, D2 = cd_coefficients(params2)
    to_l = Affine(1, -nu)
    return C1.subs(to_l) * C2(nu - n), D1.subs(to_l) * D2(nu - n)


def verify_semigroup(params1: RieszParams, params2: RieszParams, nu) -> CheckResult:
    """cd_coefficients of the composed family reproduce the products."""
    out = semigroup_compose(params1, params2, nu)
    C, D = cd_coefficients(out)
    X, Y = semigroup_targets(params1, params2, nu)
    n, p = params1.n, params1.p
    has_p, has_q = _relevant_cd(p, n)
    ok = (not has_p or C == X) and (not has_q or D == Y)
    meta = {"family1": params1.name, "family2": params2.name, "n": n, "p": p, "nu": str(Q(nu))}
    detail = "C'' = C C', D'' = D D'" if ok else f"C''-CC' = {C - X}, D''-DD' = {D - Y}"
    return outcome("semigroup", ok, meta, detail)


# --------------------------------------------------------------------------
# closed forms of the named families

def classical_fourier(n: int) -> GammaExpr:
    """2^(l+n) pi^(n/2) G((l+n)/2) / G(-l/2): the transform of r^l on R^n."""
    return GammaExpr.make(ONE_R, Affine(1, n), Q(n, 2),
                          [(Affine(Q(1, 2), Q(n, 2)), 1), (Affine(Q(-1, 2), 0), -1)])


def verify_classical(n: int) -> CheckResult:
    """F(R^l_{1,0}) on functions equals the classical transform of r^l.

    On 0-forms i_xi eps_xi = r^2, so the image is c(l) C(l) r^(-l-n)."""
    c, m = fourier(family("riesz", n, 0))
    got = (c * m.P).normalize()
    want = classical_fourier(n)
    ok = got == want and m.rpow + 2 == Affine(-1, -n)
    return outcome("classical specialization", ok, {"n": n}, f"{got} vs {want}")


def verify_double_fourier(params: RieszParams) -> CheckResult:
    """F(F(R^l_{A,B})) = (2 pi)^n R^l_{A,B} on the relevant components."""
    const, A2, B2 = double_fourier(params)
    target = GammaExpr.make(ONE_R, Affine(0, params.n), params.n, [])
    has_p, has_q = _relevant_cd(params.p, params.n)
    ok = True
    if has_p:
        ok &= const * A2 == target * params.A
    if has_q:
        ok &= const * B2 == target * params.B
    meta = {"family": params.name, "n": params.n, "p": params.p}
    return outcome("double fourier", ok, meta, f"constant {const}; A2 = {A2}, B2 = {B2}")


def knapp_stein_residue_formula(n: int, p: int, k: int) -> DiffOpLP:
    """(-1)^k 2 pi^(n/2) / (4^k k! G(n/2+k+1)) (alpha_k (delta d)^k + beta_k (d delta)^k);
    at k = 0 the pair (alpha_0, beta_0) weights the two projectors."""
    K = GammaExpr.make(Q(2 * (-1) ** k, 4 ** k * factorial(k)), None, Q(n, 2),
                       [(Affine(0, Q(n, 2) + k + 1), -1)])
    a, b = Q(n, 2) - p + k, Q(n, 2) - p - k
    return DiffOpLP(n, p, {k: (K * a, K * b)})


def gjms_residue_formula(n: int, k: int) -> DiffOpLP:
    """2 pi^(n/2) / (4^k k! G(n/2+k)) Delta^k on functions, written with
    Delta^k = (-1)^k (delta d)^k."""
    K = GammaExpr.make(Q(2 * (-1) ** k, 4 ** k * factorial(k)), None, Q(n, 2),
                       [(Affine(0, Q(n, 2) + k), -1)])
    return DiffOpLP(n, 0, {k: (K, 0)})


def verify_residue(params: RieszParams, k: int) -> CheckResult:
    """Compare residue_at with the closed form for the family.

    Knapp-Stein data use the alpha/beta formula; (1,0) on functions the
    GJMS formula; other data the expression through C(-n), D(-n), which is
    inapplicable where those vanish."""
    meta = {"family": params.name, "n": params.n, "p": params.p, "k": k}
    res = residue_at(params, k)
    got = DiffOpLP(params.n, params.p, {k: (res.constant * res.multiplier.P,
                                            res.constant * res.multiplier.Q)})
    A, B = params.A, params.B
    if A == ONE_R and B == -ONE_R:
        want = knapp_stein_residue_formula(params.n, params.p, k)
    elif A == ONE_R and B.is_zero and params.p == 0:
        want = gjms_residue_formula(params.n, k)
    else:
        try:
            closed = residue_closed_form(params, k)
        except HypothesisViolation as exc:
            return CheckResult("residue", "inapplicable", meta, str(exc))
        ca, cb = closed.parts()
        want = DiffOpLP(params.n, params.p, {k: (ca, cb)})
    return outcome("residue", got == want, meta, f"{got}" if got == want else f"{got} vs {want}")
