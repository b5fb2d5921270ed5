"""Monomial bases and arithmetic for symmetric powers of a Lie algebra.

The basis of Sym^k is the set of size-k index multisets, stored as sorted
tuples and ordered lexicographically (the order produced by
``itertools.combinations_with_replacement``).  Monomials carry coefficient 1;
no multinomial normalisation factors are introduced, which keeps operator
matrices rational with small denominators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb


DEFAULT_BASIS_CAP = 10_000_000


class ResourceCapExceeded(RuntimeError):
    """A symmetric-power basis would exceed the configured size cap."""

    def __init__(self, n: int, k: int, size: int, cap: int):
        super().__init__(
            f"Sym^{k} basis over a dimension-{n} algebra has {size} monomials, "
            f"exceeding the cap of {cap}"
        )
        self.n, self.k, self.size, self.cap = n, k, size, cap


def sym_dim(n: int, k: int) -> int:
    """dim Sym^k of an n-dimensional space: C(n + k - 1, k)."""
    if n < 1 or k < 0:
        raise ValueError(f"sym_dim needs n >= 1 and k >= 0, got n={n}, k={k}")
    return comb(n + k - 1, k)


def guard_sym_dim(n: int, k: int, cap: int = DEFAULT_BASIS_CAP) -> int:
    size = sym_dim(n, k)
    if size > cap:
        raise ResourceCapExceeded(n, k, size, cap)
    return size


def enumerate_basis(n: int, k: int, cap: int = DEFAULT_BASIS_CAP) -> list[tuple[int, ...]]:
    """All degree-k monomials over indices [0, n) in lexicographic order."""
    guard_sym_dim(n, k, cap)
    return list(combinations_with_replacement(range(n), k))


def monomial_rank(n: int, mono: tuple[int, ...]) -> int:
    """Position of a sorted monomial in the enumerate_basis order."""
    k = len(mono)
    rank = 0
    prev = 0
    for pos, c in enumerate(mono):
        tail = k - pos - 1
        for v in range(prev, c):
            rank += comb((n - v) + tail - 1, tail)
        prev = c
    return rank


@dataclass
class SymElement:
    """Sparse exact-rational element of Sym^k, keyed by sorted index tuples."""

    degree: int
    dim: int
    terms: dict[tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        for mono, coeff in list(self.terms.items()):
            if len(mono) != self.degree:
                raise ValueError(f"monomial {mono} has size {len(mono)}, expected {self.degree}")
            if coeff == 0:
                del self.terms[mono]

    @classmethod
    def zero(cls, degree: int, dim: int) -> "SymElement":
        return cls(degree, dim, {})

    @classmethod
    def basis_vector(cls, dim: int, index: int) -> "SymElement":
        return cls(1, dim, {(index,): Fraction(1)})

    @classmethod
    def monomial(cls, dim: int, mono: tuple[int, ...], coeff=1) -> "SymElement":
        return cls(len(mono), dim, {tuple(sorted(mono)): Fraction(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def copy(self) -> "SymElement":
        return SymElement(self.degree, self.dim, dict(self.terms))

    def scale(self, c) -> "SymElement":
        c = Fraction(c)
        if c == 0:
            return SymElement.zero(self.degree, self.dim)
        return SymElement(self.degree, self.dim, {m: v * c for m, v in self.terms.items()})

    def add(self, other: "SymElement") -> "SymElement":
        self._check_compatible(other)
        out = dict(self.terms)
        for m, v in other.terms.items():
            new = out.get(m, Fraction(0)) + v
            if new:
                out[m] = new
            else:
                out.pop(m, None)
        return SymElement(self.degree, self.dim, out)

    def sub(self, other: "SymElement") -> "SymElement":
        return self.add(other.scale(-1))

    def add_term(self, mono: tuple[int, ...], coeff: Fraction) -> None:
        new = self.terms.get(mono, Fraction(0)) + coeff
        if new:
            self.terms[mono] = new
        else:
            self.terms.pop(mono, None)

    def _check_compatible(self, other: "SymElement") -> None:
        if self.dim != other.dim:
            raise ValueError(f"elements over different algebras (dim {self.dim} vs {other.dim})")
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")

    def to_dense(self, basis_index: dict[tuple[int, ...], int], size: int) -> list[Fraction]:
        vec = [Fraction(0)] * size
        for m, v in self.terms.items():
            vec[basis_index[m]] = v
        return vec

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SymElement)
            and self.degree == other.degree
            and self.dim == other.dim
            and self.terms == other.terms
        )

    def serialize(self) -> list:
        """(index-list, numerator, denominator) records in basis order."""
        return [
            [list(m), v.numerator, v.denominator] for m, v in sorted(self.terms.items())
        ]


def sym_product(a: SymElement, b: SymElement) -> SymElement:
    """Symmetric product; degrees add, monomials merge as sorted multisets."""
    if a.dim != b.dim:
        raise ValueError(f"elements over different algebras (dim {a.dim} vs {b.dim})")
    out = SymElement.zero(a.degree + b.degree, a.dim)
    for m1, v1 in a.terms.items():
        for m2, v2 in b.terms.items():
            out.add_term(tuple(sorted(m1 + m2)), v1 * v2)
    return out


def mul_monomial(a: SymElement, mono: tuple[int, ...], coeff: Fraction) -> SymElement:
    """a times a single monomial, cheaper than a full sym_product."""
    out = SymElement.zero(a.degree + len(mono), a.dim)
    for m1, v1 in a.terms.items():
        out.add_term(tuple(sorted(m1 + mono)), v1 * coeff)
    return out
