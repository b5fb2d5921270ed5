"""Cartan data and root system enumeration for the semisimple families.

Conventions used throughout the package:

* Cartan matrix entries are ``A[i][j] = <alpha_j, alpha_i^vee>``, i.e. row i
  pairs the other simple roots against the i-th coroot.
* Roots are stored as integer coordinate tuples in the simple-root basis.
* The invariant form is normalised so that short roots have squared length 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class CartanError(ValueError):
    """Raised for invalid Cartan data (bad family, rank, or matrix entry)."""


FAMILIES = ("A", "B", "C", "D", "E", "F", "G")

# Minimal admissible rank per family; avoids the low-rank coincidences
# (B1 = A1, C2 = B2, D3 = A3).
_MIN_RANK = {"A": 1, "B": 2, "C": 3, "D": 4, "E": 6, "F": 4, "G": 2}
_MAX_RANK = {"E": 8, "F": 4, "G": 2}


def standard_cartan_matrix(family: str, rank: int) -> list[list[int]]:
    """Return the standard Cartan matrix for the given family and rank."""
    if family not in FAMILIES:
        raise CartanError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if rank < _MIN_RANK[family]:
        raise CartanError(f"{family}{rank}: rank must be >= {_MIN_RANK[family]}")
    if family in _MAX_RANK and rank > _MAX_RANK[family]:
        raise CartanError(f"{family}{rank}: rank must be <= {_MAX_RANK[family]}")

    a = [[2 * (i == j) for j in range(rank)] for i in range(rank)]

    def chain(i: int, j: int) -> None:
        a[i][j] = -1
        a[j][i] = -1

    if family in ("A", "B", "C"):
        for i in range(rank - 1):
            chain(i, i + 1)
        if family == "B" and rank >= 2:
            # alpha_rank is short: its coroot row carries the -2.
            a[rank - 1][rank - 2] = -2
        if family == "C":
            # alpha_rank is long.
            a[rank - 2][rank - 1] = -2
    elif family == "D":
        for i in range(rank - 3):
            chain(i, i + 1)
        chain(rank - 3, rank - 2)
        chain(rank - 3, rank - 1)
    elif family == "E":
        # Node 2 hangs off node 4 of the chain 1-3-4-5-...-rank (1-based).
        edges = [(0, 2), (1, 3), (2, 3)] + [(i, i + 1) for i in range(3, rank - 1)]
        for i, j in edges:
            chain(i, j)
    elif family == "F":
        chain(0, 1)
        chain(2, 3)
        a[1][2] = -1
        a[2][1] = -2  # alpha_3, alpha_4 short
    elif family == "G":
        a[0][1] = -3  # alpha_1 short, alpha_2 long
        a[1][0] = -1
    return a


@dataclass(frozen=True)
class CartanDatum:
    family: str
    rank: int
    cartan_matrix: tuple[tuple[int, ...], ...]

    @classmethod
    def from_label(cls, label: str) -> "CartanDatum":
        """Parse labels like ``A1``, ``E7``, ``G2``."""
        label = label.strip()
        if len(label) < 2 or label[0].upper() not in FAMILIES:
            raise CartanError(f"cannot parse algebra label {label!r}")
        family = label[0].upper()
        try:
            rank = int(label[1:])
        except ValueError as exc:
            raise CartanError(f"cannot parse rank in label {label!r}") from exc
        matrix = standard_cartan_matrix(family, rank)
        return cls(family, rank, tuple(tuple(row) for row in matrix))

    @property
    def label(self) -> str:
        return f"{self.family}{self.rank}"

    def validate(self) -> None:
        """Check diagonal, sign, and agreement with the standard table."""
        n = self.rank
        if len(self.cartan_matrix) != n or any(len(r) != n for r in self.cartan_matrix):
            raise CartanError(f"{self.label}: Cartan matrix is not {n}x{n}")
        for i in range(n):
            for j in range(n):
                v = self.cartan_matrix[i][j]
                if i == j and v != 2:
                    raise CartanError(f"{self.label}: diagonal entry ({i},{i}) is {v}, expected 2")
                if i != j and v > 0:
                    raise CartanError(f"{self.label}: off-diagonal entry ({i},{j}) is {v}, expected <= 0")
        std = standard_cartan_matrix(self.family, self.rank)
        for i in range(n):
            for j in range(n):
                if self.cartan_matrix[i][j] != std[i][j]:
                    raise CartanError(
                        f"{self.label}: entry ({i},{j}) is {self.cartan_matrix[i][j]}, "
                        f"standard table has {std[i][j]}"
                    )


def symmetrizer(cartan_matrix: Sequence[Sequence[int]]) -> list[Fraction]:
    """Rationals d_i with d_i A[i][j] = d_j A[j][i], short roots at d = 1.

    d_i is half the squared length of alpha_i.
    """
    n = len(cartan_matrix)
    d: list[Fraction | None] = [None] * n
    d[0] = Fraction(1)
    # Propagate over the Dynkin graph; connected components each get a seed.
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if d[i] is None:
                continue
            for j in range(n):
                if i != j and cartan_matrix[i][j] != 0 and d[j] is None:
                    d[j] = d[i] * cartan_matrix[i][j] / cartan_matrix[j][i]
                    changed = True
        if all(x is not None for x in d):
            break
        if not changed:
            for i in range(n):
                if d[i] is None:
                    d[i] = Fraction(1)
                    changed = True
                    break
    dmin = min(x for x in d if x is not None)
    return [x / dmin for x in d]  # type: ignore[operator]


@dataclass(frozen=True)
class RootSystem:
    datum: CartanDatum
    simple_roots: tuple[tuple[int, ...], ...]
    positive_roots: tuple[tuple[int, ...], ...]  # ordered by (height, lex)
    root_count: int

    @property
    def rank(self) -> int:
        return self.datum.rank

    @property
    def dim(self) -> int:
        return self.rank + self.root_count


def _pairing(cartan_matrix, beta: tuple[int, ...], i: int) -> int:
    """<beta, alpha_i^vee> for beta in simple-root coordinates."""
    row = cartan_matrix[i]
    return sum(c * row[j] for j, c in enumerate(beta))


def build_root_system(datum: CartanDatum) -> RootSystem:
    """Enumerate all positive roots by closure under simple-root addition.

    A candidate beta + alpha_i is accepted when the alpha_i-string through
    beta ascends, i.e. q - <beta, alpha_i^vee> > 0 with q the largest k such
    that beta - k*alpha_i is already a root.
    """
    datum.validate()
    n = datum.rank
    a = datum.cartan_matrix
    simple = tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(n))
    known: set[tuple[int, ...]] = set(simple)
    level = list(simple)
    ordered: list[tuple[int, ...]] = []
    while level:
        ordered.extend(sorted(level))
        nxt: set[tuple[int, ...]] = set()
        for beta in level:
            for i in range(n):
                if beta == simple[i]:
                    continue  # 2*alpha_i is never a root
                q = 0
                down = tuple(beta[j] - simple[i][j] for j in range(n))
                while down in known:
                    q += 1
                    down = tuple(down[j] - simple[i][j] for j in range(n))
                if q - _pairing(a, beta, i) > 0:
                    cand = tuple(beta[j] + simple[i][j] for j in range(n))
                    if cand not in known:
                        nxt.add(cand)
        known.update(nxt)
        level = list(nxt)
    return RootSystem(
        datum=datum,
        simple_roots=simple,
        positive_roots=tuple(ordered),
        root_count=2 * len(ordered),
    )


def root_height(beta: tuple[int, ...]) -> int:
    return sum(beta)


def root_norm2(datum: CartanDatum, beta: tuple[int, ...]) -> Fraction:
    """(beta, beta) in the normalisation with short roots of squared length 2."""
    d = symmetrizer(datum.cartan_matrix)
    a = datum.cartan_matrix
    n = datum.rank
    total = Fraction(0)
    for i in range(n):
        for j in range(n):
            total += beta[i] * beta[j] * d[i] * a[i][j]
    return total
