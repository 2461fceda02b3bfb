"""Conformally covariant operators on p-forms of R^n.

Branson-Gover operators L_2N = alpha_N (delta d)^N + beta_N (d delta)^N with
alpha_N = n/2 - p + N and beta_N = n/2 - p - N, their recurrence and
intertwining properties, the Knapp-Stein intertwining relation on the
Fourier side, the complementary-series interval and the spectral values
Z(j, q, l) of the intertwining operator on the sphere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import UsageError
from .exterior import basis_indices, format_basis
from . import polyform
from .radial import RadialExpr, fourier_side_D2, monomial_forms, operators_agree
from .report import INAPPLICABLE, CheckResult, combine, outcome
from .riesz import DiffOpLP, Multiplier, alpha_coeff, beta_coeff
from .scalars import L, ONE_R, Affine, GammaExpr, LambdaRational, as_rational

Q = Fraction


def _check_np(n: int, p: int) -> None:
    if n < 1:
        raise UsageError(f"ambient dimension must be positive, got {n}")
    if not 0 <= p <= n:
        raise UsageError(f"degree {p} outside 0..{n}")


def _check_j(j: int, n: int) -> None:
    if not 1 <= j <= n:
        raise UsageError(f"direction {j} out of range 1..{n}")


@dataclass(frozen=True)
class BGSpec:
    """Parameters of the Branson-Gover operator of order 2N on p-forms."""

    n: int
    p: int
    N: int
    alpha_N: Fraction = field(init=False)
    beta_N: Fraction = field(init=False)

    def __post_init__(self):
        _check_np(self.n, self.p)
        if self.N < 0:
            raise UsageError(f"order parameter must be non-negative, got {self.N}")
        object.__setattr__(self, "alpha_N", Q(self.n, 2) - self.p + self.N)
        object.__setattr__(self, "beta_N", Q(self.n, 2) - self.p - self.N)

    def operator(self) -> DiffOpLP:
        return DiffOpLP(self.n, self.p, {self.N: (self.alpha_N, self.beta_N)})


def branson_gover(n: int, p: int, N: int) -> DiffOpLP:
    """L_2N on p-forms; L_0 = alpha_0 Id."""
    return BGSpec(n, p, N).operator()


def apply_diffop(op: DiffOpLP, omega: RadialExpr) -> RadialExpr:
    """Apply a weighted sum of powers of delta d and d delta to a form."""
    return op.apply(omega)


def verify_recurrence(n: int, p: int, N: int) -> CheckResult:
    """L_2N = (alpha_N/alpha_(N-1) delta d + beta_N/beta_(N-1) d delta) L_(2N-2).

    A ratio is only needed where its part acts: delta d vanishes on n-forms
    and d delta on 0-forms.  A zero denominator on an acting part makes the
    case inapplicable.
    """
    _check_np(n, p)
    params = {"n": n, "p": p, "N": N}
    if N < 1:
        raise UsageError(f"recurrence needs N >= 1, got {N}")
    prev, cur = BGSpec(n, p, N - 1), BGSpec(n, p, N)
    needs_a, needs_b = p < n, p > 0
    if (needs_a and prev.alpha_N == 0) or (needs_b and prev.beta_N == 0):
        zero = "alpha" if needs_a and prev.alpha_N == 0 else "beta"
        return CheckResult("recurrence", INAPPLICABLE, params,
                           f"{zero}_{N - 1} = 0: the ratio is undefined")
    ra = cur.alpha_N / prev.alpha_N if needs_a else Q(0)
    rb = cur.beta_N / prev.beta_N if needs_b else Q(0)
    step = DiffOpLP(n, p, {1: (ra, rb)})
    lhs = branson_gover(n, p, N)
    rhs = step.compose(branson_gover(n, p, N - 1))
    if lhs != rhs:
        return outcome("recurrence", False, params, f"operator mismatch: {lhs} vs {rhs}")
    prev_op = branson_gover(n, p, N - 1)
    return operators_agree(lhs.apply, lambda w: step.apply(prev_op.apply(w)),
                           polyform.monomials(n, p, 2 * N), "recurrence", params)


def verify_intertwining_bg(n: int, p: int, N: int, j: int) -> CheckResult:
    """dpi_(-n/2-N)(E_j^+) L_2N = L_2N dpi_(-n/2+N)(E_j^+) on all monomial
    forms of degree <= 2N+1 (the order of the difference)."""
    _check_np(n, p)
    _check_j(j, n)
    L2N = branson_gover(n, p, N)
    w_left = Q(-n, 2) - N
    w_right = Q(-n, 2) + N
    return operators_agree(lambda u: polyform.dpi_plus(j, w_left, L2N.apply(u)),
                           lambda u: L2N.apply(polyform.dpi_plus(j, w_right, u)),
                           polyform.monomials(n, p, 2 * N + 1), "intertwining (Branson-Gover)",
                           {"n": n, "p": p, "N": N, "j": j})


def knapp_stein_multiplier(n: int, p: int) -> Multiplier:
    """M(nu) = r^(-2 nu + n - 2)(alpha_((n-2nu)/2) i eps + beta_((n-2nu)/2) eps i)
    with nu the formal parameter l; the Fourier image of the Knapp-Stein
    kernel up to its Gamma constant."""
    half = Affine(-1, Q(n, 2))
    return Multiplier(n, p, Affine(-2, n - 2), alpha_coeff(n, p, half.as_rational()),
                      beta_coeff(n, p, half.as_rational()))


def verify_intertwining_knapp_stein(n: int, p: int, j: int) -> CheckResult:
    """D_2(nu-n, j)(M u) - M (D_2(-nu, j) u) = 0 identically in nu for every
    monomial form u of degree <= 2."""
    _check_np(n, p)
    _check_j(j, n)
    M = knapp_stein_multiplier(n, p)
    nu = L
    return operators_agree(lambda u: fourier_side_D2(j, nu - n, M.apply(u)),
                           lambda u: M.apply(fourier_side_D2(j, -nu, u)),
                           monomial_forms(n, p, 2), "intertwining (Knapp-Stein)", {"n": n, "p": p, "j": j})


# --------------------------------------------------------------------------
# complementary series

@dataclass(frozen=True)
class ComplementaryInterval:
    """Open interval |l| < n/2 - p (None when empty) and the grid scan.

    ``positive_points`` are the grid points where both multiplier
    eigenvalues n/2-p-l and n/2-p+l are strictly positive; ``agrees`` says
    they are exactly the grid points inside the analytic interval, and
    ``prefactor_positive`` that the Gamma prefactor of the invariant form is
    positive on the grid points of (0, n/2-p).
    """

    n: int
    p: int
    interval: Optional[Tuple[Fraction, Fraction]]
    step: Fraction
    first_positive: Optional[Fraction]
    last_positive: Optional[Fraction]
    agrees: bool
    prefactor_positive: bool

    @property
    def empty(self) -> bool:
        return self.interval is None


def pairing_prefactor(n: int) -> GammaExpr:
    """2^(2l) pi^(n/2) G(l) / G(n/2 + 1 - l)."""
    return GammaExpr.make(ONE_R, Affine(2, 0), Q(n, 2),
                          [(Affine(1, 0), 1), (Affine(-1, Q(n, 2) + 1), -1)])


def complementary_interval(n: int, p: int, step: Fraction = Q(1, 64)) -> ComplementaryInterval:
    _check_np(n, p)
    a = Q(n, 2) - p
    interval = (-a, a) if a > 0 else None
    span = Q(n, 2) + 1
    count = int(2 * span / step)
    grid = [-span + i * step for i in range(count + 1)]
    positive = [t for t in grid if a - t > 0 and a + t > 0]
    expected = [t for t in grid if interval and -a < t < a]
    pref = pairing_prefactor(n)
    inside = [t for t in grid if 0 < t < a]
    pref_ok = all(pref.evaluate(t) > 0 for t in inside)
    return ComplementaryInterval(
        n, p, interval, Q(step),
        positive[0] if positive else None, positive[-1] if positive else None,
        positive == expected, pref_ok)


def verify_complementary_interval(n: int, p: int) -> CheckResult:
    res = complementary_interval(n, p)
    a = Q(n, 2) - p
    expected = (-a, a) if a > 0 else None
    ok = res.interval == expected and res.agrees and res.prefactor_positive
    shown = "empty" if res.empty else f"({res.interval[0]}, {res.interval[1]})"
    return outcome("complementary interval", ok, {"n": n, "p": p},
                   f"{shown}; scan agrees={res.agrees}; prefactor positive={res.prefactor_positive}")


# --------------------------------------------------------------------------
# spectrum on the sphere

@dataclass(frozen=True)
class SpectralEigen:
    n: int
    p: int
    j: int
    q: int
    lam: object
    value: GammaExpr

    def __float__(self):
        return float(self.value)


def z_eigenvalue(n: int, p: int, j: int, q: int, lam=None) -> SpectralEigen:
    """Z(j,q,l) = G(n/2+j+l)/G(n/2+j-l) * G(n/2-p+q+l)/G(n/2-p+q-l).

    ``lam`` may be a rational number or None for the formal parameter l.
    """
    _check_np(n, p)
    if j < 1:
        raise UsageError(f"j must be positive, got {j}")
    if q not in (0, 1):
        raise UsageError(f"q must be 0 or 1, got {q}")
    h = Q(n, 2)
    e = GammaExpr.make(ONE_R, None, 0, [
        (Affine(1, h + j), 1), (Affine(-1, h + j), -1),
        (Affine(1, h - p + q), 1), (Affine(-1, h - p + q), -1)])
    if lam is not None:
        e = e.subs(Affine(0, Q(lam)))
    return SpectralEigen(n, p, j, q, lam, e)


def verify_z_ratio(n: int, p: int, j: int) -> CheckResult:
    """Z(j,0,l)/Z(j,1,l) = (n/2-p-l)/(n/2-p+l) exactly."""
    ratio = z_eigenvalue(n, p, j, 0).value / z_eigenvalue(n, p, j, 1).value
    a = Q(n, 2) - p
    expected = (a - L) / (a + L)
    ok = ratio == GammaExpr(expected)
    return outcome("z ratio", ok, {"n": n, "p": p, "j": j}, f"ratio {ratio}")


# --------------------------------------------------------------------------
# Beurling-Ahlfors operator

def beurling_ahlfors_check(n: int) -> CheckResult:
    """The middle-degree reflection multiplier squares to the identity; on
    1-forms it is Y -> Y - 2 <Y, xi> xi / |xi|^2."""
    if n < 2 or n % 2:
        raise UsageError(f"Beurling-Ahlfors check needs even n >= 2, got {n}")
    p = n // 2
    m = Multiplier.reflection(n, p)
    results = [outcome("involution", m.compose(m).is_identity, {"n": n},
                       f"m o m = {m.compose(m)}")]
    m1 = Multiplier.reflection(n, 1)
    for k in range(1, n + 1):
        e_k = RadialExpr.term(n, (k,))
        got = m1.apply(e_k)
        # Y - 2 x_k x / r^2 with x = sum_l x_l e_l
        refl = e_k
        for l in range(1, n + 1):
            refl = refl - RadialExpr.term(n, (l,), 2, -2).times_x(k).times_x(l)
        diff = got - refl
        results.append(outcome(f"reflection e{k}", diff.is_zero, {"n": n}, str(diff)))
    return combine("beurling-ahlfors", results, {"n": n})
