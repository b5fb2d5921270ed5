"""Discrete Spencer complex over a cubical flat torus.

The base complex is T^d with N subdivisions per axis; k-cells are pairs
(position, sorted axis subset).  Cochains valued in Sym^q(g) carry a
bidegree (p, q); the coupled differential is exposed as its two components
(d alpha (x) s, +/- alpha (x) delta(s)) of bidegrees (p+1, q) and (p, q+1).
On cochains whose algebra part lies in the degenerate kernel the second
component vanishes identically and the complex collapses to forms tensored
with the kernel, whose cohomology is computed honestly (Kronecker matrices,
exact ranks) and compared against the product prediction b_k * dim(kernel).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from .chevalley import LieAlgebraTable
from .kernels import KernelBasis, kernel_of_constrained
from .linalg import SpanSolver, dense_rank, nullspace_dense
from .operators import DualVector, apply_delta, generator_images
from .sym import DEFAULT_BASIS_CAP, SymElement


Cell = tuple[tuple[int, ...], tuple[int, ...]]  # (position, axes)


@dataclass
class CellComplex:
    dimension: int
    subdivisions: int
    cells: dict[int, list[Cell]] = field(repr=False)
    index: dict[int, dict[Cell, int]] = field(repr=False)

    @classmethod
    def torus(cls, d: int, n: int) -> "CellComplex":
        if d < 1 or n < 1:
            raise ValueError("torus needs dimension >= 1 and subdivisions >= 1")
        cells: dict[int, list[Cell]] = {}
        index: dict[int, dict[Cell, int]] = {}
        positions = sorted(product(range(n), repeat=d))
        for k in range(d + 1):
            lst: list[Cell] = []
            for pos in positions:
                for axes in combinations(range(d), k):
                    lst.append((pos, axes))
            cells[k] = lst
            index[k] = {c: i for i, c in enumerate(lst)}
        return cls(d, n, cells, index)

    def n_cells(self, k: int) -> int:
        return len(self.cells.get(k, []))

    def shift(self, pos: tuple[int, ...], axis: int) -> tuple[int, ...]:
        out = list(pos)
        out[axis] = (out[axis] + 1) % self.subdivisions
        return tuple(out)

    def coboundary_entries(self, k: int):
        """Yield (row, col, sign) for the coboundary d_k: C^k -> C^{k+1}."""
        if k + 1 > self.dimension:
            return
        idx_k = self.index[k]
        for row, (pos, axes) in enumerate(self.cells[k + 1]):
            for j, axis in enumerate(axes):
                rest = axes[:j] + axes[j + 1 :]
                sign = -1 if j % 2 else 1
                yield row, idx_k[(self.shift(pos, axis), rest)], sign
                yield row, idx_k[(pos, rest)], -sign

    def coboundary_matrix(self, k: int) -> list[list[Fraction]]:
        rows = [
            [Fraction(0)] * self.n_cells(k) for _ in range(self.n_cells(k + 1))
        ]
        for r, c, s in self.coboundary_entries(k):
            rows[r][c] += s
        return rows

    def betti_numbers(self) -> list[int]:
        """de Rham Betti numbers over the rationals, by exact ranks."""
        d = self.dimension
        ranks = []
        for k in range(d):
            ranks.append(dense_rank(self.coboundary_matrix(k)))
        betti = []
        for k in range(d + 1):
            z = self.n_cells(k) - (ranks[k] if k < d else 0)
            b = ranks[k - 1] if k >= 1 else 0
            betti.append(z - b)
        return betti


@dataclass
class SpencerCochain:
    """(p, q) cochain: p-cells carrying degree-q algebra elements."""

    p: int
    q: int
    dim: int  # algebra dimension
    values: dict[int, SymElement] = field(default_factory=dict)

    def __post_init__(self):
        for cell, el in list(self.values.items()):
            if el.degree != self.q or el.dim != self.dim:
                raise ValueError(f"cell {cell} carries an element of wrong type")
            if el.is_zero():
                del self.values[cell]

    def is_zero(self) -> bool:
        return not self.values


def coboundary(complex_: CellComplex, c: SpencerCochain) -> SpencerCochain:
    """Cubical coboundary applied cell-wise; the algebra part is untouched."""
    if c.p >= complex_.dimension:
        return SpencerCochain(c.p + 1, c.q, c.dim, {})
    out: dict[int, SymElement] = {}
    for row, col, sign in complex_.coboundary_entries(c.p):
        el = c.values.get(col)
        if el is None:
            continue
        acc = out.get(row)
        contrib = el.scale(sign)
        out[row] = contrib if acc is None else acc.add(contrib)
    return SpencerCochain(c.p + 1, c.q, c.dim, {k: v for k, v in out.items() if not v.is_zero()})


def spencer_differential(
    complex_: CellComplex,
    alg: LieAlgebraTable,
    lam: DualVector,
    c: SpencerCochain,
    images: list[SymElement] | None = None,
) -> tuple[SpencerCochain, SpencerCochain]:
    """Both components of the coupled differential on a (p, q) cochain.

    Returns (d alpha (x) s, (-1)^p alpha (x) delta(s)) with bidegrees
    (p+1, q) and (p, q+1).
    """
    first = coboundary(complex_, c)
    if images is None:
        images = generator_images(alg, lam)
    sign = -1 if c.p % 2 else 1
    second_vals: dict[int, SymElement] = {}
    for cell, el in c.values.items():
        img = apply_delta(alg, lam, el, images).scale(sign)
        if not img.is_zero():
            second_vals[cell] = img
    second = SpencerCochain(c.p, c.q + 1, c.dim, second_vals)
    return first, second


def _kronecker_rows(
    form_rows: list[list[Fraction]], kernel_dim: int
) -> list[list[Fraction]]:
    """Rows of (d tensor identity) on kernel-valued cochains."""
    if kernel_dim == 0:
        return []
    out = []
    for row in form_rows:
        for s in range(kernel_dim):
            big = [Fraction(0)] * (len(row) * kernel_dim)
            for j, v in enumerate(row):
                if v:
                    big[j * kernel_dim + s] = v
            out.append(big)
    return out


@dataclass
class CohomologyReport:
    dimension: int
    subdivisions: int
    algebra_label: str
    degree: int
    kernel_dim: int
    betti: list[int]
    degenerate_dims: list[int]
    euler_characteristic: int
    product_identity_holds: bool

    def as_dict(self) -> dict:
        return {
            "torus_dimension": self.dimension,
            "subdivisions": self.subdivisions,
            "algebra": self.algebra_label,
            "degree": self.degree,
            "kernel_dim": self.kernel_dim,
            "betti": self.betti,
            "degenerate_dims": self.degenerate_dims,
            "euler_characteristic": self.euler_characteristic,
            "product_identity_holds": self.product_identity_holds,
        }


def degenerate_cohomology(
    alg: LieAlgebraTable,
    lam: DualVector,
    k: int,
    complex_: CellComplex,
    kb: KernelBasis | None = None,
    cap: int = DEFAULT_BASIS_CAP,
) -> CohomologyReport:
    """Cohomology of forms valued in the degenerate kernel, checked exactly.

    The per-degree dimensions are computed from the actual Kronecker
    matrices and then asserted equal to b_p * dim(kernel); a mismatch is a
    hard failure since the identity is forced for a product complex.
    """
    if kb is None:
        kb, _ = kernel_of_constrained(alg, lam, k, cap)
    kappa = kb.dim
    d = complex_.dimension
    betti = complex_.betti_numbers()
    dims: list[int] = []
    ranks: list[int] = []
    for p in range(d):
        rows = _kronecker_rows(complex_.coboundary_matrix(p), kappa)
        ranks.append(dense_rank(rows) if rows else 0)
    for p in range(d + 1):
        z = complex_.n_cells(p) * kappa - (ranks[p] if p < d else 0)
        b = ranks[p - 1] if p >= 1 else 0
        dims.append(z - b)
    euler = sum((-1) ** p * dims[p] for p in range(d + 1))
    holds = all(dims[p] == betti[p] * kappa for p in range(d + 1))
    if not holds:
        raise RuntimeError(
            f"degenerate cohomology dims {dims} differ from product prediction "
            f"{[b * kappa for b in betti]}"
        )
    return CohomologyReport(
        dimension=d,
        subdivisions=complex_.subdivisions,
        algebra_label=alg.label,
        degree=k,
        kernel_dim=kappa,
        betti=betti,
        degenerate_dims=dims,
        euler_characteristic=euler,
        product_identity_holds=holds,
    )


class DeRhamClasses:
    """Exact cohomology classes of the form complex at a fixed degree."""

    def __init__(self, complex_: CellComplex, p: int):
        self.complex = complex_
        self.p = p
        n_p = complex_.n_cells(p)
        if p < complex_.dimension:
            d_p = complex_.coboundary_matrix(p)
            self.cocycles = nullspace_dense(d_p, n_p)
        else:
            self.cocycles = [
                [Fraction(int(i == j)) for i in range(n_p)] for j in range(n_p)
            ]
        self.solver = SpanSolver()
        if p >= 1:
            d_prev = complex_.coboundary_matrix(p - 1)
            ncols_prev = complex_.n_cells(p - 1)
            for j in range(ncols_prev):
                vec = {r: d_prev[r][j] for r in range(n_p) if d_prev[r][j]}
                if vec:
                    self.solver.insert(vec, ("boundary", j))
        # Representatives of a basis of H^p: cocycles independent mod boundaries.
        self.class_reps: list[dict[int, Fraction]] = []
        for vec in self.cocycles:
            s = {i: v for i, v in enumerate(vec) if v}
            if s and self.solver.insert(s, ("class", len(self.class_reps))):
                self.class_reps.append(s)

    @property
    def betti(self) -> int:
        return len(self.class_reps)

    def is_cocycle(self, vec: dict[int, Fraction]) -> bool:
        if self.p >= self.complex.dimension:
            return True
        d_p = self.complex.coboundary_matrix(self.p)
        for r in range(self.complex.n_cells(self.p + 1)):
            total = Fraction(0)
            for c, v in vec.items():
                if d_p[r][c]:
                    total += d_p[r][c] * v
            if total:
                return False
        return True

    def class_coordinates(self, vec: dict[int, Fraction]) -> list[Fraction]:
        """Coordinates of [vec] in the chosen H^p basis; vec must be closed."""
        if not self.is_cocycle(vec):
            raise ValueError("representative is not closed")
        combo = self.solver.solve(dict(vec))
        if combo is None:
            raise RuntimeError("closed form failed to reduce to the class basis")
        coords = [Fraction(0)] * len(self.class_reps)
        for (kind, idx), value in combo.items():
            if kind == "class":
                coords[idx] = value
        return coords


def phi_deg(
    complex_: CellComplex,
    kb: KernelBasis,
    c: SpencerCochain,
) -> tuple[dict[int, Fraction], list[Fraction]]:
    """Project a closed kernel-valued cochain to its de Rham class.

    The value on a pure tensor alpha (x) s is [alpha]; linear combinations
    are contracted by summing the kernel-basis coordinate forms.  Returns
    (representative cochain, class coordinates).  Non-closed input and
    values outside the kernel span are rejected.
    """
    kernel_reps = [dict(el.terms) for el in kb.basis]
    form: dict[int, Fraction] = {}
    for cell, el in c.values.items():
        coeffs = _coords_in_basis(kernel_reps, dict(el.terms))
        if coeffs is None:
            raise ValueError(f"cell {cell} carries a value outside the kernel span")
        total = sum(coeffs, Fraction(0))
        if total:
            form[cell] = total
    classes = DeRhamClasses(complex_, c.p)
    if not classes.is_cocycle(form):
        raise ValueError("cochain is not closed in the degenerate complex")
    return form, classes.class_coordinates(form)


def _coords_in_basis(
    basis: list[dict[tuple, Fraction]], target: dict[tuple, Fraction]
) -> list[Fraction] | None:
    """Solve target = sum c_i basis_i exactly; None when outside the span."""
    solver = SpanSolver()
    for i, vec in enumerate(basis):
        solver.insert(dict(vec), i)
    combo = solver.solve(dict(target))
    if combo is None:
        return None
    out = [Fraction(0)] * len(basis)
    for i, v in combo.items():
        out[i] = v
    return out


def euler_characteristic(dims: list[int]) -> int:
    """Alternating sum of per-degree dimensions."""
    return sum((-1) ** k * d for k, d in enumerate(dims))
