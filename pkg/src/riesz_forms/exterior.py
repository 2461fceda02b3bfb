"""Exterior algebra on the standard basis of Λ^p(R^n).

Basis p-forms are strictly increasing index tuples over the axes 1..n.  All
signs come from sorting permutations, so the conventions here are the single
source of truth for every sign downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Any, Dict, Iterator, Mapping, NamedTuple, Optional, Tuple

from .errors import UsageError

Index = Tuple[int, ...]


@dataclass(frozen=True, order=True)
class BasisForm:
    """The basis element e_I = e_{i1} ∧ ... ∧ e_{ip} of Λ^p(R^n)."""

    n: int
    indices: Index = ()

    def __post_init__(self):
        if self.n < 1:
            raise UsageError(f"ambient dimension must be positive, got {self.n}")
        idx = tuple(self.indices)
        object.__setattr__(self, "indices", idx)
        if any(not 1 <= i <= self.n for i in idx):
            raise UsageError(f"indices {idx} out of range 1..{self.n}")
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise UsageError(f"indices {idx} are not strictly increasing")

    @property
    def degree(self) -> int:
        return len(self.indices)

    def __str__(self):
        if not self.indices:
            return "1"
        return format_basis(self.indices, self.n)


def format_basis(idx: Index, n: int) -> str:
    if not idx:
        return "1"
    if n < 10:
        return "e" + "".join(str(i) for i in idx)
    return "e_" + "_".join(str(i) for i in idx)


class SignedBasis(NamedTuple):
    """Result of a single-axis action: ``sign * form``; sign 0 means zero."""

    sign: int
    form: Optional[BasisForm]

    @property
    def is_zero(self) -> bool:
        return self.sign == 0


ZERO = SignedBasis(0, None)


def basis_forms(n: int, p: int) -> list[BasisForm]:
    """All basis p-forms of R^n in lexicographic order."""
    if not 0 <= p <= n:
        raise UsageError(f"degree {p} outside 0..{n}")
    return [BasisForm(n, c) for c in combinations(range(1, n + 1), p)]


def basis_indices(n: int, p: int) -> list[Index]:
    return list(combinations(range(1, n + 1), p))


@lru_cache(maxsize=None)
def wedge_index(k: int, idx: Index) -> Tuple[int, Index]:
    """e_k ∧ e_idx on raw index tuples: (sign, sorted indices)."""
    if k in idx:
        return 0, ()
    pos = 0
    while pos < len(idx) and idx[pos] < k:
        pos += 1
    sign = -1 if pos % 2 else 1
    return sign, idx[:pos] + (k,) + idx[pos:]


@lru_cache(maxsize=None)
def contract_index(k: int, idx: Index) -> Tuple[int, Index]:
    """i_{e_k} e_idx on raw index tuples: (sign, remaining indices)."""
    try:
        pos = idx.index(k)
    except ValueError:
        return 0, ()
    sign = -1 if pos % 2 else 1
    return sign, idx[:pos] + idx[pos + 1:]


def _check_axis(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise UsageError(f"axis {k} out of range 1..{n}")


def wedge_axis(k: int, form: BasisForm) -> SignedBasis:
    """e_k ∧ e_I with the sign of sorting k into I."""
    _check_axis(k, form.n)
    sign, idx = wedge_index(k, form.indices)
    if sign == 0:
        return ZERO
    return SignedBasis(sign, BasisForm(form.n, idx))


def contract_axis(k: int, form: BasisForm) -> SignedBasis:
    """Interior product i_{e_k} e_I as an antiderivation."""
    _check_axis(k, form.n)
    sign, idx = contract_index(k, form.indices)
    if sign == 0:
        return ZERO
    return SignedBasis(sign, BasisForm(form.n, idx))


@dataclass(frozen=True)
class FormVector:
    """Constant-coefficient p-form with coefficients in any commutative ring.

    Zero coefficients are pruned on construction so that structural equality
    is mathematical equality.
    """

    n: int
    p: int
    coefficients: Mapping[Index, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.p <= self.n:
            raise UsageError(f"degree {self.p} outside 0..{self.n}")
        clean: Dict[Index, Any] = {}
        for key, c in self.coefficients.items():
            idx = key.indices if isinstance(key, BasisForm) else tuple(key)
            BasisForm(self.n, idx)
            if len(idx) != self.p:
                raise UsageError(f"basis {idx} has degree {len(idx)}, expected {self.p}")
            total = clean.get(idx, 0) + c
            if total == 0:
                clean.pop(idx, None)
            else:
                clean[idx] = total
        object.__setattr__(self, "coefficients", dict(sorted(clean.items())))

    @classmethod
    def basis(cls, n: int, indices, coeff: Any = 1) -> "FormVector":
        idx = tuple(indices)
        return cls(n, len(idx), {idx: coeff})

    def __iter__(self) -> Iterator[Tuple[Index, Any]]:
        return iter(self.coefficients.items())

    def __add__(self, other: "FormVector") -> "FormVector":
        _check_same(self, other)
        merged = dict(self.coefficients)
        for k, c in other.coefficients.items():
            merged[k] = merged.get(k, 0) + c
        return FormVector(self.n, self.p, merged)

    def __neg__(self) -> "FormVector":
        return FormVector(self.n, self.p, {k: -c for k, c in self.coefficients.items()})

    def __sub__(self, other: "FormVector") -> "FormVector":
        return self + (-other)

    def scale(self, s: Any) -> "FormVector":
        return FormVector(self.n, self.p, {k: s * c for k, c in self.coefficients.items()})

    def __eq__(self, other):
        if not isinstance(other, FormVector):
            return NotImplemented
        return (self.n, self.p) == (other.n, other.p) and self.coefficients == other.coefficients

    def __hash__(self):
        return hash((self.n, self.p, tuple(self.coefficients.items())))

    @property
    def is_zero(self) -> bool:
        return not self.coefficients


def _check_same(a: FormVector, b: FormVector) -> None:
    if (a.n, a.p) != (b.n, b.p):
        raise UsageError(f"mismatched forms: (n,p)=({a.n},{a.p}) vs ({b.n},{b.p})")


def inner_product(omega: FormVector, eta: FormVector) -> Any:
    """Pairing for which the basis e_I is orthonormal."""
    _check_same(omega, eta)
    total = 0
    for idx, c in omega.coefficients.items():
        d = eta.coefficients.get(idx)
        if d is not None:
            total = total + c * d
    return total


def wedge(k: int, omega: FormVector) -> FormVector:
    """e_k ∧ ω extended linearly."""
    _check_axis(k, omega.n)
    if omega.p == omega.n:
        return FormVector(omega.n, omega.n)
    out: Dict[Index, Any] = {}
    for idx, c in omega.coefficients.items():
        s, j = wedge_index(k, idx)
        if s:
            out[j] = out.get(j, 0) + s * c
    return FormVector(omega.n, omega.p + 1, out)


def contract(k: int, omega: FormVector) -> FormVector:
    """i_{e_k} ω extended linearly."""
    _check_axis(k, omega.n)
    if omega.p == 0:
        return FormVector(omega.n, 0)
    out: Dict[Index, Any] = {}
    for idx, c in omega.coefficients.items():
        s, j = contract_index(k, idx)
        if s:
            out[j] = out.get(j, 0) + s * c
    return FormVector(omega.n, omega.p - 1, out)


@lru_cache(maxsize=None)
def ix_ex_table(n: int, p: int) -> Dict[Tuple[int, int], Dict[Tuple[Index, Index], int]]:
    """Matrix entries of i_{e_k}(e_l ∧ ·) on Λ^p for every axis pair (k, l).

    Entry ``table[k, l][I, J]`` is the coefficient of e_I in i_{e_k}(e_l ∧ e_J),
    so that i_xε_x = Σ_{k,l} x_k x_l table[k, l].
    """
    table = {}
    for k in range(1, n + 1):
        for l in range(1, n + 1):
            entries = {}
            for J in basis_indices(n, p):
                s1, w = wedge_index(l, J)
                if not s1:
                    continue
                s2, out = contract_index(k, w)
                if s2:
                    entries[(out, J)] = entries.get((out, J), 0) + s1 * s2
            table[k, l] = entries
    return table


def ix_ex_at(x, p: int) -> list[list[Any]]:
    """Dense matrix of i_xε_x on Λ^p in the lexicographic basis, exact if
    ``x`` holds exact numbers."""
    n = len(x)
    basis = basis_indices(n, p)
    pos = {b: i for i, b in enumerate(basis)}
    m = [[0] * len(basis) for _ in basis]
    for (k, l), entries in ix_ex_table(n, p).items():
        w = x[k - 1] * x[l - 1]
        if w == 0:
            continue
        for (I, J), c in entries.items():
            m[pos[I]][pos[J]] += c * w
    return m
