"""Floating-point cross-validation of the Riesz operators on sampled forms.

Two independent routes compute T f for a kernel R^l0_{A,B}:

* the multiplier route: FFT, pointwise multiplication by the exact Fourier
  image c(l0) r^s (C i_xi eps_xi + D eps_xi i_xi), inverse FFT;
* the quadrature route: the discrete convolution sum of the kernel matrix
  r^(l0-2)(A i_x eps_x + B eps_x i_x) against the samples.

Transform convention: F(f)(xi) = int f(x) e^{+i<x,xi>} dx, so the forward
transform of samples is h^n N^n ifftn and the frequencies are 2 pi fftfreq.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.fft
import scipy.integrate
import scipy.signal
from numpy.polynomial.hermite_e import hermeval

from .errors import NumericError, PoleError, UsageError
from .exterior import basis_indices, format_basis, ix_ex_table
from .polyform import PolyForm
from .riesz import Multiplier, RieszParams, fourier
from .scalars import GammaExpr

THREADS_ENV = "RIESZ_FORMS_THREADS"


def worker_count() -> int:
    """Thread cap from RIESZ_FORMS_THREADS (default 1)."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


# --------------------------------------------------------------------------
# grids and sampled forms

@dataclass(frozen=True)
class Grid:
    """Uniform grid x_i = (i - N/2) h, h = 2L/N, on [-L, L)^n."""

    n: int
    extent: float
    samples: int

    def __post_init__(self):
        if self.n not in (2, 3):
            raise UsageError(f"numeric grids support n in {{2, 3}}, got {self.n}")
        if not (self.extent > 0 and math.isfinite(self.extent)):
            raise UsageError(f"extent must be positive and finite, got {self.extent}")
        N = self.samples
        if N < 4 or N & (N - 1):
            raise UsageError(f"samples per axis must be a power of two >= 4, got {N}")

    @property
    def h(self) -> float:
        return 2 * self.extent / self.samples

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.samples,) * self.n

    def axis(self) -> np.ndarray:
        return (np.arange(self.samples) - self.samples // 2) * self.h

    def coordinates(self) -> List[np.ndarray]:
        return np.meshgrid(*([self.axis()] * self.n), indexing="ij")

    def frequencies(self) -> List[np.ndarray]:
        """Frequency mesh in FFT order (origin at index 0)."""
        k = 2 * np.pi * np.fft.fftfreq(self.samples, d=self.h)
        return np.meshgrid(*([k] * self.n), indexing="ij")

    def interior_mask(self, fraction: float = 0.5) -> np.ndarray:
        if not 0 < fraction <= 1:
            raise UsageError(f"interior fraction must lie in (0, 1], got {fraction}")
        ax = np.abs(self.axis()) <= fraction * self.extent + 1e-12 * self.h
        mask = ax
        for _ in range(self.n - 1):
            mask = np.multiply.outer(mask, ax)
        return mask


@dataclass(frozen=True, eq=False)
class SampledForm:
    """Values of a p-form on a grid; ``data[c]`` is the component along the
    c-th basis p-form in lexicographic order."""

    grid: Grid
    p: int
    data: np.ndarray
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        n = self.grid.n
        if not 0 <= self.p <= n:
            raise UsageError(f"degree {self.p} outside 0..{n}")
        data = np.asarray(self.data, dtype=complex)
        want = (math.comb(n, self.p),) + self.grid.shape
        if data.shape != want:
            raise UsageError(f"data shape {data.shape} does not match {want}")
        if not np.all(np.isfinite(data)):
            raise NumericError("sampled form contains non-finite values")
        object.__setattr__(self, "data", data)

    @property
    def components(self) -> int:
        return self.data.shape[0]

    def basis(self) -> List[Tuple[int, ...]]:
        return basis_indices(self.grid.n, self.p)

    def norm(self) -> float:
        """Discrete L^2 norm sqrt(h^n sum |f|^2)."""
        return float(np.sqrt(self.grid.h ** self.grid.n * np.sum(np.abs(self.data) ** 2)))

    def with_data(self, data: np.ndarray, **meta) -> "SampledForm":
        return SampledForm(self.grid, self.p, data, {**self.meta, **meta})


@dataclass(frozen=True)
class TestFormSpec:
    """Polynomial form times the Gaussian exp(-|x|^2 / (2 sigma^2))."""

    poly: PolyForm
    sigma: float = 1.0

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise UsageError(f"Gaussian width must be positive, got {self.sigma}")

    @property
    def n(self) -> int:
        return self.poly.n

    @property
    def p(self) -> int:
        return self.poly.p

    def fourier_transform(self, xi: Sequence[np.ndarray]) -> np.ndarray:
        """Closed-form F of the form at the frequency arrays ``xi``.

        Per axis F(x^m e^{-x^2/2s^2})(t) = (i s)^m He_m(s t) sqrt(2 pi) s e^{-s^2 t^2/2}.
        """
        s = self.sigma
        basis = basis_indices(self.n, self.p)
        pos = {b: i for i, b in enumerate(basis)}
        out = np.zeros((len(basis),) + np.shape(xi[0]), dtype=complex)
        gauss = (2 * np.pi) ** (self.n / 2) * s ** self.n
        gauss = gauss * np.exp(-0.5 * s * s * sum(np.asarray(t) ** 2 for t in xi))
        for (alpha, idx), c in self.poly.terms.items():
            term = complex(c) * gauss
            for k, m in enumerate(alpha):
                if m:
                    coeffs = [0] * m + [1]
                    term = term * (1j * s) ** m * hermeval(s * np.asarray(xi[k]), coeffs)
            out[pos[idx]] += term
        return out


def default_test_form(n: int, p: int, sigma: float = 1.0) -> TestFormSpec:
    """A mean-zero, dipole-free test form.

    (|x|^2 - n sigma^2) g on the first basis p-form and, when there is a
    second one, x_1 x_2 g on it.
    """
    if not 0 <= p <= n:
        raise UsageError(f"degree {p} outside 0..{n}")
    basis = basis_indices(n, p)
    zero = (0,) * n
    terms = {(zero, basis[0]): Fraction(-n) * Fraction(sigma) ** 2}
    for k in range(n):
        a = list(zero)
        a[k] = 2
        terms[(tuple(a), basis[0])] = Fraction(1)
    if len(basis) > 1:
        a = list(zero)
        a[0] = a[1] = 1
        terms[(tuple(a), basis[1])] = Fraction(1)
    return TestFormSpec(PolyForm(n, p, terms), sigma)


def sample(spec: TestFormSpec, grid: Grid) -> SampledForm:
    """Evaluate a test form at the grid points."""
    if spec.n != grid.n:
        raise UsageError(f"test form lives on R^{spec.n}, grid on R^{grid.n}")
    xs = grid.coordinates()
    g = np.exp(-sum(x * x for x in xs) / (2 * spec.sigma ** 2))
    basis = basis_indices(grid.n, spec.p)
    pos = {b: i for i, b in enumerate(basis)}
    data = np.zeros((len(basis),) + grid.shape, dtype=complex)
    for (alpha, idx), c in spec.poly.terms.items():
        mono = np.full(grid.shape, float(c))
        for k, m in enumerate(alpha):
            if m:
                mono = mono * xs[k] ** m
        data[pos[idx]] += mono * g
    return SampledForm(grid, spec.p, data, {"sigma": spec.sigma})


def gaussian(grid: Grid, sigma: float = 1.0) -> SampledForm:
    """The Gaussian 0-form exp(-|x|^2 / (2 sigma^2))."""
    return sample(TestFormSpec(PolyForm.monomial(grid.n, (0,) * grid.n), sigma), grid)


# --------------------------------------------------------------------------
# transforms

def forward(f: SampledForm) -> np.ndarray:
    """Samples of F(f) on the frequency mesh (FFT order)."""
    g = f.grid
    shifted = np.fft.ifftshift(f.data, axes=tuple(range(1, g.n + 1)))
    scale = (g.h * g.samples) ** g.n
    return scale * scipy.fft.ifftn(shifted, axes=tuple(range(1, g.n + 1)), workers=worker_count())


def inverse(f_hat: np.ndarray, grid: Grid) -> np.ndarray:
    axes = tuple(range(1, grid.n + 1))
    scale = (grid.h * grid.samples) ** grid.n
    data = scipy.fft.fftn(f_hat, axes=axes, workers=worker_count()) / scale
    return np.fft.fftshift(data, axes=axes)


def _ix_ex_field(n: int, p: int, xs: Sequence[np.ndarray]) -> np.ndarray:
    """i_x eps_x as an array of shape (C, C, *grid)."""
    basis = basis_indices(n, p)
    pos = {b: i for i, b in enumerate(basis)}
    out = np.zeros((len(basis), len(basis)) + np.shape(xs[0]))
    for (k, l), entries in ix_ex_table(n, p).items():
        if not entries:
            continue
        w = xs[k - 1] * xs[l - 1]
        for (I, J), c in entries.items():
            out[pos[I], pos[J]] += c * w
    return out


def _apply_field(mat: np.ndarray, data: np.ndarray) -> np.ndarray:
    return np.einsum("ij...,j...->i...", mat, data)


def _at(value, lam0: Fraction) -> float:
    try:
        return float(value(lam0))
    except PoleError as exc:
        raise PoleError(f"multiplier is singular at l = {lam0}: {exc}") from None


@dataclass(frozen=True)
class FrozenSymbol:
    """A multiplier with its parameter fixed: r^s (P i eps + Q eps i)."""

    n: int
    p: int
    s: float
    P: float
    Q: float

    @classmethod
    def of(cls, m: Multiplier, lam0) -> "FrozenSymbol":
        lam0 = Fraction(lam0)
        return cls(m.n, m.p, float(m.rpow(lam0)), _at(m.P, lam0), _at(m.Q, lam0))

    @property
    def scalar(self) -> bool:
        """True when the algebraic part is a multiple of the identity."""
        return self.p in (0, self.n) or self.P == self.Q

    def matrix_field(self, xs: Sequence[np.ndarray], zero_value: Optional[float]) -> np.ndarray:
        """Matrix of the symbol at the points xs.  At the origin the matrix
        is replaced by zero_value * Id (0 when None)."""
        r2 = sum(x * x for x in xs)
        M1 = _ix_ex_field(self.n, self.p, xs)
        C = M1.shape[0]
        eye = np.eye(C).reshape((C, C) + (1,) * len(xs))
        alg = self.P * M1 + self.Q * (r2 * eye - M1)
        origin = r2 == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            radial = np.where(origin, 0.0, np.power(np.where(origin, 1.0, r2), self.s / 2))
        mat = alg * radial
        mat[(slice(None), slice(None)) + np.nonzero(origin)] = 0.0
        if zero_value:
            for i in range(C):
                mat[(i, i) + np.nonzero(origin)] = zero_value
        return mat

    def origin_value(self) -> Tuple[Optional[float], str]:
        """Continuous value at the origin when there is one."""
        deg = self.s + 2
        if deg > 0:
            return 0.0, "continuous"
        if deg == 0 and self.scalar:
            return (self.P if self.p < self.n else self.Q), "continuous"
        return None, "zeroed"


def apply_multiplier_fft(m: Multiplier, lam0, f: SampledForm,
                         constant: Optional[GammaExpr] = None) -> SampledForm:
    """Apply constant(l0) * m(l0) through the FFT.

    Symbols without a continuous value at the origin have the zero-frequency
    bin set to 0 (a mean-zero projection, recorded in ``meta``).
    """
    if (m.n, m.p) != (f.grid.n, f.p):
        raise UsageError("multiplier and form live on different spaces")
    sym = FrozenSymbol.of(m, lam0)
    scale = 1.0 if constant is None else constant.evaluate(Fraction(lam0))
    zero, mode = sym.origin_value()
    mat = sym.matrix_field(f.grid.frequencies(), zero)
    with np.errstate(all="ignore"):
        out_hat = scale * _apply_field(mat, forward(f))
    bad = ~np.isfinite(out_hat)
    if bad.any():
        loc = tuple(int(i) for i in np.argwhere(bad)[0])
        raise NumericError(f"non-finite value at component {loc[0]}, frequency index {loc[1:]}")
    data = inverse(out_hat, f.grid)
    return f.with_data(data, route="fft", zero_bin=mode, lam0=str(Fraction(lam0)))


def riesz_fft(params: RieszParams, lam0, f: SampledForm) -> SampledForm:
    """Convolution with R^l0_{A,B} through its exact Fourier image."""
    c, m = fourier(params)
    return apply_multiplier_fft(m, lam0, f, constant=c)


def kernel_field(params: RieszParams, lam0, grid: Grid, singular_cell: str = "zeta") -> np.ndarray:
    """r^(l0-2)(A i_x eps_x + B eps_x i_x) on the difference grid
    (offsets -(N-1)..N-1 per axis), shape (C, C, 2N-1, ...).

    The value at x = 0 follows ``singular_cell``: ``"zero"`` drops the cell,
    ``"average"`` uses the cell mean of the kernel and ``"zeta"`` the
    corrected trapezoidal weight -Z(l0) h^l0 from the lattice sum
    Z(s) = sum_{m != 0} |m|^s.  By the cubic symmetry of Z^n the algebraic
    part averages to ((n-p) A + p B) / n times the identity in both cases.
    """
    lam0 = Fraction(lam0)
    n = grid.n
    if lam0 <= -n:
        raise UsageError(f"quadrature needs l0 > -n = {-n}, got {lam0}")
    if params.n != n:
        raise UsageError("parameters and grid have different dimensions")
    A, B = _at(params.A, lam0), _at(params.B, lam0)
    N = grid.samples
    ax = np.arange(-(N - 1), N) * grid.h
    xs = np.meshgrid(*([ax] * n), indexing="ij")
    sym = FrozenSymbol(n, params.p, float(lam0) - 2, A, B)
    mat = sym.matrix_field(xs, None)
    if singular_cell == "zero":
        return mat
    s = float(lam0)
    if singular_cell == "average":
        radial = _cell_mean_rpow(n, s, grid.h)
    elif singular_cell == "zeta":
        radial = -lattice_zeta(n, s) * grid.h ** s
    else:
        raise UsageError(f"unknown singular cell rule {singular_cell!r}")
    p = params.p
    value = radial * (A * (n - p) + B * p) / n
    centre = (N - 1,) * n
    for i in range(mat.shape[0]):
        mat[(i, i) + centre] = value
    return mat


def _cell_mean_rpow(n: int, s: float, h: float) -> float:
    """(1/h^n) int over [-h/2, h/2]^n of r^s."""
    # fold onto the region where x_1 is the largest coordinate and scale out x_1
    def inner(*t):
        return (1.0 + sum(v * v for v in t)) ** (s / 2)

    val, _ = scipy.integrate.nquad(inner, [(0.0, 1.0)] * (n - 1))
    unit = 2 ** n * n * 0.5 ** (s + n) / (s + n) * val
    return unit * h ** s


def lattice_zeta(n: int, s: float) -> float:
    """Analytic continuation of sum over nonzero m in Z^n of |m|^s.

    With z = -s/2 and theta(t) = sum_m exp(-pi t |m|^2) = theta_3(e^{-pi t})^n,
    pi^-z G(z) Z = int_1^inf (theta - 1)(t^(z-1) + t^(n/2-z-1)) dt
    + 1/(z - n/2) - 1/z.
    """
    z = -s / 2
    if z == 0 or z == n / 2:
        raise UsageError(f"lattice sum has a pole or removable point at s = {s}")

    def theta_minus_one(t):
        q = math.exp(-math.pi * t)
        th, k = 1.0, 1
        while True:
            term = 2 * q ** (k * k)
            th += term
            if term < 1e-18 * th:
                break
            k += 1
        return th ** n - 1.0

    def integrand(t):
        return theta_minus_one(t) * (t ** (z - 1) + t ** (n / 2 - z - 1))

    val, _ = scipy.integrate.quad(integrand, 1.0, math.inf, epsabs=1e-15, epsrel=1e-13, limit=200)
    lam = val + 1 / (z - n / 2) - 1 / z
    return lam * math.pi ** z / math.gamma(z)


def direct_convolution(params: RieszParams, lam0, f: SampledForm,
                       singular_cell: str = "zeta") -> SampledForm:
    """h^n sum_y K(x - y) f(y) with the kernel matrix sampled pointwise.

    ``singular_cell`` selects the weight of the cell at x = y; see
    :func:`kernel_field`.
    """
    if params.p != f.p:
        raise UsageError("parameters and form have different degrees")
    K = kernel_field(params, lam0, f.grid, singular_cell)
    C = f.components
    out = np.zeros_like(f.data)
    for i in range(C):
        for j in range(C):
            if not np.any(K[i, j]):
                continue
            out[i] += scipy.signal.fftconvolve(f.data[j], K[i, j], mode="same")
    out *= f.grid.h ** f.grid.n
    return f.with_data(out, route="quadrature", singular_cell=singular_cell,
                       lam0=str(Fraction(lam0)))


# --------------------------------------------------------------------------
# comparison

@dataclass(frozen=True)
class CompareReport:
    relative_l2: float
    component_max: Tuple[float, ...]
    interior_fraction: float
    tolerance: Optional[float]

    @property
    def passed(self) -> bool:
        return self.tolerance is None or self.relative_l2 <= self.tolerance


def compare_report(a: SampledForm, b: SampledForm, interior_fraction: float = 0.5,
                   tolerance: Optional[float] = None) -> CompareReport:
    """Relative L^2 difference ||a - b|| / ||b|| on the central sub-cube."""
    if a.grid != b.grid or a.p != b.p:
        raise UsageError("forms live on different grids or degrees")
    mask = a.grid.interior_mask(interior_fraction)
    diff = (a.data - b.data)[:, mask]
    ref = b.data[:, mask]
    den = np.sqrt(np.sum(np.abs(ref) ** 2))
    num = np.sqrt(np.sum(np.abs(diff) ** 2))
    rel = float(num / den) if den else (0.0 if num == 0 else math.inf)
    cmax = tuple(float(np.max(np.abs(d))) if d.size else 0.0 for d in diff)
    return CompareReport(rel, cmax, interior_fraction, tolerance)


@dataclass(frozen=True)
class CrossCheck:
    params: RieszParams
    lam0: Fraction
    samples: int
    report: CompareReport
    zero_bin: str


def cross_check(params: RieszParams, lam0, samples: int, extent: Optional[float] = None,
                sigma: float = 1.0, tolerance: Optional[float] = None,
                singular_cell: str = "zeta", interior_fraction: float = 0.5) -> CrossCheck:
    """Both routes on the default test form; extent defaults to 8 sigma."""
    grid = Grid(params.n, 8 * sigma if extent is None else extent, samples)
    f = sample(default_test_form(params.n, params.p, sigma), grid)
    a = riesz_fft(params, lam0, f)
    b = direct_convolution(params, lam0, f, singular_cell)
    rep = compare_report(a, b, interior_fraction, tolerance)
    return CrossCheck(params, Fraction(lam0), samples, rep, str(a.meta["zero_bin"]))


def refinement_study(params: RieszParams, lam0, sizes: Iterable[int] = (64, 128, 256),
                     **kwargs) -> List[CrossCheck]:
    return [cross_check(params, lam0, N, **kwargs) for N in sizes]


def is_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def involution_error(n: int = 2, samples: int = 128, sigma: float = 1.0) -> float:
    """Relative L^2 error of applying the middle-degree reflection twice."""
    if n % 2:
        raise UsageError(f"reflection needs even n, got {n}")
    grid = Grid(n, 8 * sigma, samples)
    f = sample(default_test_form(n, n // 2, sigma), grid)
    m = Multiplier.reflection(n, n // 2)
    twice = apply_multiplier_fft(m, 0, apply_multiplier_fft(m, 0, f))
    return compare_report(twice, f, interior_fraction=1.0).relative_l2


# --------------------------------------------------------------------------
# output

def to_csv(f: SampledForm, out=None, slice_index: Optional[int] = None) -> str:
    """CSV of the samples; for n = 3 only the slice x_3 = x[slice_index]
    (default: the plane x_3 = 0).  Complex data gets re/im column pairs."""
    g = f.grid
    data = f.data
    xs = g.coordinates()
    if g.n == 3:
        k = g.samples // 2 if slice_index is None else slice_index
        data = data[..., k]
        xs = [x[..., k] for x in xs]
    names = [format_basis(b, g.n) for b in f.basis()]
    scale = float(np.max(np.abs(data))) if data.size else 0.0
    real = float(np.max(np.abs(data.imag))) <= 1e-12 * scale
    header = [f"x{i + 1}" for i in range(g.n)]
    for nm in names:
        header += [nm] if real else [f"{nm}.re", f"{nm}.im"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    fmt = "{:.17g}".format
    flat = [x.ravel() for x in xs]
    comps = [c.ravel() for c in data]
    for r in range(flat[0].size):
        row = [fmt(x[r]) for x in flat]
        for c in comps:
            row += [fmt(c[r].real)] if real else [fmt(c[r].real), fmt(c[r].imag)]
        w.writerow(row)
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text
