"""Exact scalars in one formal spectral parameter ``l`` (for λ).

``LambdaRational``
    reduced rational functions in ``l`` over Q.
``Affine``
    affine forms ``a*l + b`` with rational a, b; used for r-powers, powers of
    two and Gamma arguments.
``GammaExpr``
    products q(l) * 2^(a l + b) * pi^c * prod Gamma(arg_i)^(m_i), kept in a
    canonical form under Gamma(z+1) = z Gamma(z).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple, Union

from .errors import PoleError, UnsupportedError, UnsupportedPoleError, UsageError

Q = Fraction
Poly = Tuple[Fraction, ...]
Number = Union[int, Fraction]

_ZERO: Poly = ()
_ONE: Poly = (Q(1),)


# --------------------------------------------------------------------------
# dense univariate polynomials over Q, low degree first, no trailing zeros

def _trim(c) -> Poly:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _pneg(a: Poly) -> Poly:
    return tuple(-c for c in a)


def _pscale(a: Poly, s) -> Poly:
    if s == 0:
        return _ZERO
    return tuple(c * s for c in a)


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return _ZERO
    if len(a) == 1:
        return _pscale(b, a[0])
    if len(b) == 1:
        return _pscale(a, b[0])
    out = [Q(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def _pdivmod(a: Poly, b: Poly) -> Tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    lead = b[-1]
    if len(r) - 1 < db:
        return _ZERO, _trim(r)
    quo = [Q(0)] * (len(r) - db)
    for i in range(len(r) - 1 - db, -1, -1):
        c = r[i + db] / lead
        quo[i] = c
        if c:
            for j, bj in enumerate(b):
                r[i + j] -= c * bj
    return _trim(quo), _trim(r[:db])


def _pmonic(a: Poly) -> Poly:
    lead = a[-1]
    return a if lead == 1 else tuple(c / lead for c in a)


def _pgcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, _pdivmod(a, b)[1]
    return _pmonic(a) if a else _ONE


def _peval(a: Poly, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _pcompose_affine(a: Poly, s, t) -> Poly:
    """a(s*l + t)."""
    out: Poly = _ZERO
    lin = _trim((Q(t), Q(s)))
    for c in reversed(a):
        out = _padd(_pmul(out, lin), (c,) if c else _ZERO)
    return out


def _pderiv(a: Poly) -> Poly:
    return _trim(tuple(i * c for i, c in enumerate(a) if i))


def _fmt_q(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_poly(a: Poly, var: str = "l") -> str:
    if not a:
        return "0"
    parts = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = _fmt_q(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{_fmt_q(mag)}*{mono}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


# --------------------------------------------------------------------------

class LambdaRational:
    """Reduced rational function num(l)/den(l) over Q with monic denominator.

    Instances are immutable.  Arithmetic accepts ints and Fractions on either
    side.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=_ZERO, den=_ONE, *, _reduced: bool = False):
        if isinstance(num, (int, Fraction)):
            num = (Q(num),)
        if isinstance(den, (int, Fraction)):
            den = (Q(den),)
        num = _trim(Q(c) for c in num) if not _reduced else num
        den = _trim(Q(c) for c in den) if not _reduced else den
        if not _reduced:
            if not den:
                raise ZeroDivisionError("zero denominator")
            if not num:
                den = _ONE
            elif len(den) == 1:
                if den[0] != 1:
                    num = _pscale(num, 1 / den[0])
                    den = _ONE
            else:
                g = _pgcd(num, den)
                if len(g) > 1:
                    num = _pdivmod(num, g)[0]
                    den = _pdivmod(den, g)[0]
                lead = den[-1]
                if lead != 1:
                    num = _pscale(num, 1 / lead)
                    den = _pscale(den, 1 / lead)
        self.num = num
        self.den = den
        self._hash = None

    # constructors ---------------------------------------------------------
    @classmethod
    def const(cls, c: Number) -> "LambdaRational":
        c = Q(c)
        return cls((c,) if c else _ZERO, _ONE, _reduced=True)

    @classmethod
    def poly(cls, coeffs: Iterable[Number]) -> "LambdaRational":
        """Polynomial from coefficients, constant term first."""
        return cls(tuple(Q(c) for c in coeffs), _ONE)

    @classmethod
    def var(cls) -> "LambdaRational":
        return cls((Q(0), Q(1)), _ONE, _reduced=True)

    @classmethod
    def linear(cls, a: Number, b: Number) -> "LambdaRational":
        """a*l + b."""
        return cls(_trim((Q(b), Q(a))), _ONE, _reduced=True)

    # predicates -----------------------------------------------------------
    @property
    def is_polynomial(self) -> bool:
        return len(self.den) == 1

    @property
    def is_constant(self) -> bool:
        return len(self.den) == 1 and len(self.num) <= 1

    @property
    def is_zero(self) -> bool:
        return not self.num

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise UsageError(f"{self} is not constant")
        return self.num[0] if self.num else Q(0)

    def degree(self) -> int:
        return len(self.num) - len(self.den)

    # arithmetic -----------------------------------------------------------
    @staticmethod
    def _lift(x) -> "LambdaRational":
        if isinstance(x, LambdaRational):
            return x
        if isinstance(x, (int, Fraction)):
            return LambdaRational.const(x)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if not o.num:
            return self
        if not self.num:
            return o
        if len(self.den) == 1 and len(o.den) == 1:
            return LambdaRational(_padd(self.num, o.num), _ONE, _reduced=True)
        if self.den == o.den:
            return LambdaRational(_padd(self.num, o.num), self.den)
        return LambdaRational(_padd(_pmul(self.num, o.den), _pmul(o.num, self.den)),
                              _pmul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return LambdaRational(_pneg(self.num), self.den, _reduced=True)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return ZERO_R
            return LambdaRational(_pscale(self.num, Q(other)), self.den, _reduced=True)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if len(self.den) == 1 and len(o.den) == 1:
            return LambdaRational(_pmul(self.num, o.num), _ONE, _reduced=True)
        return LambdaRational(_pmul(self.num, o.num), _pmul(self.den, o.den))

    __rmul__ = __mul__

    def inverse(self) -> "LambdaRational":
        if not self.num:
            raise ZeroDivisionError("inverse of zero rational function")
        return LambdaRational(self.den, self.num)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return LambdaRational(_pscale(self.num, 1 / Q(other)), self.den, _reduced=True)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE_R
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, LambdaRational):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            if len(self.den) != 1 or len(self.num) > 1:
                return False
            return (self.num[0] if self.num else 0) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_constant:
                self._hash = hash(self.num[0] if self.num else Q(0))
            else:
                self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    # evaluation and substitution -----------------------------------------
    def __call__(self, x):
        """Value at ``x``; exact for int/Fraction input."""
        d = _peval(self.den, x)
        if d == 0:
            raise PoleError(f"{self} has a pole at l = {x}")
        return _peval(self.num, x) / d

    def compose_affine(self, a: Number, b: Number) -> "LambdaRational":
        """Substitute l -> a*l + b."""
        a, b = Q(a), Q(b)
        if a == 1 and b == 0:
            return self
        return LambdaRational(_pcompose_affine(self.num, a, b), _pcompose_affine(self.den, a, b))

    def subs(self, aff: "Affine") -> "LambdaRational":
        return self.compose_affine(aff.a, aff.b)

    def order_at(self, x0: Fraction) -> int:
        """Order of vanishing at x0 (negative for a pole)."""
        root = (Q(-x0), Q(1))

        def mult(pol):
            m = 0
            while pol:
                q, r = _pdivmod(pol, root)
                if r:
                    break
                pol = q
                m += 1
            return m

        if not self.num:
            raise UsageError("order of the zero function is undefined")
        return mult(self.num) - mult(self.den)

    def residue_at(self, x0: Fraction) -> Fraction:
        """Residue at a simple pole (zero where regular)."""
        x0 = Q(x0)
        order = self.order_at(x0) if self.num else 0
        if order >= 0:
            return Q(0)
        if order < -1:
            raise UnsupportedPoleError(f"pole of order {-order} at l = {x0}")
        q, _ = _pdivmod(self.den, (Q(-x0), Q(1)))
        return _peval(self.num, x0) / _peval(q, x0)

    def to_float(self, x: float) -> float:
        return float(_peval(self.num, x)) / float(_peval(self.den, x))

    # presentation ---------------------------------------------------------
    def __str__(self):
        n = _fmt_poly(self.num)
        if len(self.den) == 1:
            return n
        d = _fmt_poly(self.den)
        if len(self.num) > 1:
            n = f"({n})"
        return f"{n}/({d})"

    def __repr__(self):
        return f"LambdaRational({self})"


ZERO_R = LambdaRational(_ZERO, _ONE, _reduced=True)
ONE_R = LambdaRational(_ONE, _ONE, _reduced=True)
L = LambdaRational.var()


def as_rational(x) -> LambdaRational:
    if isinstance(x, LambdaRational):
        return x
    if isinstance(x, (int, Fraction)):
        return LambdaRational.const(x)
    if isinstance(x, Affine):
        return LambdaRational.linear(x.a, x.b)
    raise TypeError(f"cannot interpret {x!r} as a rational function of l")


def pochhammer(x, k: int) -> LambdaRational:
    """Rising factorial (x)_k = x (x+1) ... (x+k-1)."""
    x = as_rational(x)
    out = ONE_R
    for i in range(k):
        out = out * (x + i)
    return out


# --------------------------------------------------------------------------

class Affine:
    """The affine form a*l + b with rational coefficients."""

    __slots__ = ("a", "b", "_hash")

    def __init__(self, a: Number = 0, b: Number = 0):
        self.a = Q(a)
        self.b = Q(b)
        self._hash = hash((self.a, self.b))

    @classmethod
    def const(cls, b: Number) -> "Affine":
        return cls(0, b)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Affine):
            return self.a == other.a and self.b == other.b
        return NotImplemented

    def __lt__(self, other):
        return (self.a, self.b) < (other.a, other.b)

    def __add__(self, other):
        if isinstance(other, Affine):
            return Affine(self.a + other.a, self.b + other.b)
        if isinstance(other, (int, Fraction)):
            return Affine(self.a, self.b + other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Affine(-self.a, -self.b)

    def __sub__(self, other):
        if isinstance(other, (Affine, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, s):
        if isinstance(s, (int, Fraction)):
            return Affine(self.a * s, self.b * s)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, s):
        if isinstance(s, (int, Fraction)):
            return Affine(self.a / Q(s), self.b / Q(s))
        return NotImplemented

    def __call__(self, x):
        return self.a * x + self.b

    @property
    def is_constant(self) -> bool:
        return self.a == 0

    def compose(self, other: "Affine") -> "Affine":
        """self(other(l))."""
        return Affine(self.a * other.a, self.a * other.b + self.b)

    def as_rational(self) -> LambdaRational:
        return LambdaRational.linear(self.a, self.b)

    def __str__(self):
        return _fmt_poly(_trim((self.b, self.a)))

    def __repr__(self):
        return f"Affine({self})"


# --------------------------------------------------------------------------

def _frac_part(b: Fraction) -> Tuple[Fraction, int]:
    """b = b0 + m with m = floor(b), b0 in [0, 1)."""
    m = math.floor(b)
    return b - m, m


def _is_nonpos_int(z: Fraction) -> bool:
    return z.denominator == 1 and z <= 0


GammaFactors = Tuple[Tuple[Affine, int], ...]


class GammaExpr:
    """q(l) * 2^(two) * pi^(pi_exp) * prod Gamma(arg)^m.

    Construct with :meth:`make` (normalizes) or the raw constructor (keeps
    fields verbatim; pass through :func:`normalize` before comparing).
    Arithmetic results are always normalized.

    Canonical form: every Gamma argument with slope a != 0 is reduced by
    integer steps to offset b in [0, 1), constant arguments to (0, 1);
    Gamma(1) is dropped and Gamma(1/2) folded into pi^(1/2); the constant part
    of the power of two lies in [0, 1).
    """

    __slots__ = ("prefactor", "two", "pi_exp", "gammas", "canonical")

    def __init__(self, prefactor=ONE_R, two: Optional[Affine] = None, pi_exp: Number = 0,
                 gammas: Iterable[Tuple[Affine, int]] = (), *, _canonical: bool = False):
        self.prefactor = as_rational(prefactor)
        self.two = two if two is not None else Affine()
        self.pi_exp = Q(pi_exp)
        self.gammas: GammaFactors = tuple((g if isinstance(g, Affine) else Affine(*g), int(m))
                                          for g, m in gammas)
        self.canonical = _canonical

    @classmethod
    def make(cls, prefactor=ONE_R, two: Optional[Affine] = None, pi_exp: Number = 0,
             gammas: Iterable[Tuple[Affine, int]] = ()) -> "GammaExpr":
        return normalize(cls(prefactor, two, pi_exp, gammas))

    @classmethod
    def gamma(cls, arg: Affine, power: int = 1) -> "GammaExpr":
        return cls.make(gammas=[(arg, power)])

    @classmethod
    def rational(cls, q) -> "GammaExpr":
        return cls.make(prefactor=q)

    @classmethod
    def zero(cls) -> "GammaExpr":
        return cls(ZERO_R, _canonical=True)

    @classmethod
    def one(cls) -> "GammaExpr":
        return cls(ONE_R, _canonical=True)

    def normalize(self) -> "GammaExpr":
        return normalize(self)

    # predicates -----------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.prefactor.is_zero

    @property
    def is_constant(self) -> bool:
        """No dependence on l."""
        e = normalize(self)
        return (e.prefactor.is_constant and e.two.is_constant
                and all(g.is_constant for g, _ in e.gammas))

    @property
    def is_rational(self) -> bool:
        """Pure rational function: no powers of 2 or pi, no Gamma factors."""
        e = normalize(self)
        return e.two == Affine() and e.pi_exp == 0 and not e.gammas

    def as_rational(self) -> LambdaRational:
        e = normalize(self)
        if not e.is_rational:
            raise UsageError(f"{e} is not a rational function")
        return e.prefactor

    # arithmetic -----------------------------------------------------------
    def _raw_mul(self, other: "GammaExpr") -> "GammaExpr":
        return GammaExpr(self.prefactor * other.prefactor, self.two + other.two,
                         self.pi_exp + other.pi_exp, self.gammas + other.gammas)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, LambdaRational)):
            other = GammaExpr(as_rational(other))
        if not isinstance(other, GammaExpr):
            return NotImplemented
        return normalize(self._raw_mul(other))

    __rmul__ = __mul__

    def inverse(self) -> "GammaExpr":
        e = normalize(self)
        if e.is_zero:
            raise ZeroDivisionError("inverse of zero GammaExpr")
        return normalize(GammaExpr(e.prefactor.inverse(), -e.two, -e.pi_exp,
                                   tuple((g, -m) for g, m in e.gammas)))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, LambdaRational)):
            other = GammaExpr(as_rational(other))
        if not isinstance(other, GammaExpr):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction, LambdaRational)):
            return GammaExpr(as_rational(other)) * self.inverse()
        return NotImplemented

    def __neg__(self):
        return self * -1

    def __add__(self, other):
        """Sum of expressions whose transcendental parts agree; anything
        else has no closed form in this class."""
        if isinstance(other, (int, Fraction, LambdaRational)):
            other = GammaExpr(as_rational(other))
        if not isinstance(other, GammaExpr):
            return NotImplemented
        a, b = normalize(self), normalize(other)
        if a.is_zero:
            return b
        if b.is_zero:
            return a
        if a.transcendental_key() != b.transcendental_key():
            raise UnsupportedError(f"cannot add {a} and {b}: different transcendental factors")
        return normalize(GammaExpr(a.prefactor + b.prefactor, a.two, a.pi_exp, a.gammas))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, LambdaRational, GammaExpr)):
            return self + (-1) * other
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        e = normalize(self)
        if k < 0:
            return e.inverse() ** (-k)
        return normalize(GammaExpr(e.prefactor ** k, e.two * k, e.pi_exp * k,
                                   tuple((g, m * k) for g, m in e.gammas)))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, LambdaRational)):
            other = GammaExpr(as_rational(other))
        if not isinstance(other, GammaExpr):
            return NotImplemented
        a, b = normalize(self), normalize(other)
        return (a.prefactor == b.prefactor and a.two == b.two and a.pi_exp == b.pi_exp
                and a.gammas == b.gammas)

    def __hash__(self):
        e = normalize(self)
        return hash((e.prefactor, e.two, e.pi_exp, e.gammas))

    def transcendental_key(self):
        """Everything but the rational prefactor; equal keys mean the two
        expressions differ by a rational function of l."""
        e = normalize(self)
        return (e.two, e.pi_exp, e.gammas)

    # substitution ---------------------------------------------------------
    def subs(self, aff: Affine) -> "GammaExpr":
        """Substitute l -> aff(l); a constant substitution takes the limit
        value, so removable Gamma singularities are resolved."""
        if aff.is_constant:
            return self.value_at(aff.b)
        return normalize(GammaExpr(self.prefactor.subs(aff), self.two.compose(aff), self.pi_exp,
                                   tuple((g.compose(aff), m) for g, m in self.gammas)))

    def _shifted_at(self, x0: Fraction) -> Tuple[LambdaRational, "GammaExpr"]:
        """Rewrite so that no Gamma argument sits at a pole at l = x0.

        Returns (q, rest) with self = q * rest, rest regular and nonzero at
        x0 apart from the rational prefactor already moved into q.
        """
        e = normalize(self)
        q = e.prefactor
        shifted = []
        for g, m in e.gammas:
            z0 = g(x0)
            if _is_nonpos_int(z0):
                if g.is_constant:
                    raise PoleError(f"constant Gamma({g}) at a pole")
                depth = int(-z0)
                # Gamma(z) = Gamma(z + depth + 1) / prod_{i=0}^{depth} (z + i)
                prod = ONE_R
                for i in range(depth + 1):
                    prod = prod * (g + i).as_rational()
                q = q * prod ** (-m)
                shifted.append((g + (depth + 1), m))
            else:
                shifted.append((g, m))
        return q, GammaExpr(ONE_R, e.two, e.pi_exp, shifted)

    def _constant_at(self, x0: Fraction) -> "GammaExpr":
        """Replace every l by x0 in a pole-free expression."""
        return normalize(GammaExpr(self.prefactor(x0), Affine.const(self.two(x0)), self.pi_exp,
                                   tuple((Affine.const(g(x0)), m) for g, m in self.gammas)))

    def pole_order(self, x0: Number) -> int:
        """Order of the pole at l = x0 (<= 0 where regular)."""
        x0 = Q(x0)
        q, _ = self._shifted_at(x0)
        if q.is_zero:
            return 0
        return -q.order_at(x0)

    def value_at(self, x0: Number) -> "GammaExpr":
        """Exact value at l = x0 as a constant GammaExpr."""
        x0 = Q(x0)
        q, rest = self._shifted_at(x0)
        if q.is_zero:
            return GammaExpr.zero()
        order = q.order_at(x0)
        if order > 0:
            return GammaExpr.zero()
        if order < 0:
            raise PoleError(f"pole of order {-order} at l = {x0}")
        return GammaExpr(q(x0)) * rest._constant_at(x0)

    def residue_at(self, x0: Number) -> "GammaExpr":
        """Residue at l = x0; zero where regular."""
        x0 = Q(x0)
        q, rest = self._shifted_at(x0)
        if q.is_zero:
            return GammaExpr.zero()
        order = q.order_at(x0)
        if order >= 0:
            return GammaExpr.zero()
        if order < -1:
            raise UnsupportedPoleError(f"pole of order {-order} at l = {x0}")
        return GammaExpr(q.residue_at(x0)) * rest._constant_at(x0)

    def evaluate(self, x0) -> float:
        """Floating value at l = x0 (relative error near machine precision)."""
        if isinstance(x0, float):
            if not math.isfinite(x0):
                raise UsageError(f"cannot evaluate at {x0}")
            x0 = Q(x0)
        x0 = Q(x0)
        e = normalize(self)
        if e.is_zero:
            return 0.0
        if any(_is_nonpos_int(g(x0)) for g, _ in e.gammas) or _peval(e.prefactor.den, x0) == 0:
            return self.value_at(x0)._float_const()
        return e._float_at(x0)

    def _float_const(self) -> float:
        return self._float_at(Q(0))

    def _float_at(self, x0: Fraction) -> float:
        q = self.prefactor(x0)
        if q == 0:
            return 0.0
        sign = 1.0 if q > 0 else -1.0
        log = math.log(abs(q))
        log += float(self.two(x0)) * math.log(2.0) + float(self.pi_exp) * math.log(math.pi)
        for g, m in self.gammas:
            z = float(g(x0))
            if z <= 0 and z == math.floor(z):
                raise PoleError(f"Gamma({g}) at a pole")
            log += m * math.lgamma(z)
            if z < 0 and math.floor(z) % 2 == 1 and m % 2:
                sign = -sign
        return sign * math.exp(log)

    def __float__(self):
        if not self.is_constant:
            raise UsageError(f"{self} depends on l; use evaluate()")
        return self._float_const()

    # presentation ---------------------------------------------------------
    def __str__(self):
        e = normalize(self)
        if e.is_zero:
            return "0"
        parts = []
        pre = str(e.prefactor)
        bare = True
        if e.prefactor != 1:
            if e.prefactor == -1:
                parts.append("-1")
            else:
                parts.append(pre if e.prefactor.is_polynomial and len(e.prefactor.num) <= 1
                             else f"({pre})")
            bare = False
        if e.two != Affine():
            parts.append(f"2^({e.two})")
        if e.pi_exp:
            parts.append(f"pi^({_fmt_q(e.pi_exp)})")
        num = [f"G({g})" if m == 1 else f"G({g})^{m}" for g, m in e.gammas if m > 0]
        den = [f"G({g})" if m == -1 else f"G({g})^{-m}" for g, m in e.gammas if m < 0]
        parts.extend(num)
        head = "*".join(parts) if parts else "1"
        if bare and not parts:
            head = "1"
        return head + "".join(f"/{d}" for d in den)

    def __repr__(self):
        return f"GammaExpr({self})"


def normalize(e: GammaExpr) -> GammaExpr:
    """Canonical form of ``e`` under Gamma(z+1) = z Gamma(z)."""
    if e.canonical:
        return e
    q = e.prefactor
    if q.is_zero:
        return GammaExpr.zero()
    b0, m = _frac_part(e.two.b)
    if m:
        q = q * (Q(2) ** m)
    two = Affine(e.two.a, b0)
    pi_exp = e.pi_exp
    powers: Dict[Affine, int] = {}
    for g, k in e.gammas:
        if k == 0:
            continue
        if g.is_constant:
            z = g.b
            if _is_nonpos_int(z):
                if k < 0:
                    return GammaExpr.zero()
                raise PoleError(f"Gamma({_fmt_q(z)}) is a pole")
            # z = z0 + s with z0 in (0, 1]
            s = math.ceil(z) - 1
            z0 = z - s
            factor = Q(1)
            if s >= 0:
                for i in range(s):
                    factor *= z0 + i
            else:
                for i in range(s, 0):
                    factor /= z0 + i
            q = q * factor ** k
            if z0 == 1:
                continue
            if z0 == Q(1, 2):
                pi_exp += Q(k, 2)
                continue
            base = Affine.const(z0)
        else:
            off, s = _frac_part(g.b)
            base = Affine(g.a, off)
            if s:
                lin = ONE_R
                if s > 0:
                    for i in range(s):
                        lin = lin * (base + i).as_rational()
                else:
                    for i in range(s, 0):
                        lin = lin / (base + i).as_rational()
                q = q * lin ** k
        powers[base] = powers.get(base, 0) + k
    gammas = tuple(sorted(((g, k) for g, k in powers.items() if k), key=lambda t: (t[0].a, t[0].b)))
    return GammaExpr(q, two, pi_exp, gammas, _canonical=True)


def residue_at(e: GammaExpr, x0: Number) -> GammaExpr:
    return e.residue_at(x0)


def evaluate(e: GammaExpr, x0) -> float:
    return e.evaluate(x0)


def parse_rational(text: str) -> Fraction:
    try:
        return Q(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def parse_poly(text: str) -> LambdaRational:
    """Comma-separated rational coefficients, constant term first:
    ``"1/2,0,1"`` is 1/2 + l^2."""
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise UsageError(f"empty coefficient list: {text!r}")
    return LambdaRational.poly(parse_rational(t) for t in items)
