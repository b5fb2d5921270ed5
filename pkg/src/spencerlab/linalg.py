"""Exact rational and modular linear algebra for sparse operator matrices.

The kernel pipeline follows a two-tier strategy:

* small matrices go through dense exact elimination directly;
* large ones get a rank estimate from sparse elimination modulo at least
  three word-size primes (retried with fresh primes on disagreement),
  followed by an exact sparse elimination pass that both produces the
  kernel basis and confirms the modular rank.

Either way every returned kernel vector is re-multiplied through the matrix
and checked against zero before the result is handed back.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


# Fixed pool of 30-bit primes; three are consumed per attempt, in order, so
# that reruns of the same computation use the same primes.
PRIME_POOL = (
    1073741789, 1073741783, 1073741741, 1073741723, 1073741719,
    1073741717, 1073741689, 1073741671, 1073741663, 1073741651,
    1073741621, 1073741567, 1073741561, 1073741527, 1073741477,
)

DENSE_ENTRY_LIMIT = 20_000


class RankDisagreement(RuntimeError):
    """Modular ranks kept disagreeing after retries with fresh primes."""


@dataclass
class RankCertificate:
    primes_used: list[int]
    modular_ranks: list[int]
    exact_confirmed: bool
    method: str
    rank: int

    def as_dict(self) -> dict:
        return {
            "primes_used": self.primes_used,
            "modular_ranks": self.modular_ranks,
            "exact_confirmed": self.exact_confirmed,
            "method": self.method,
            "rank": self.rank,
        }


SparseCol = list[tuple[int, Fraction]]


def rref_dense(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    mat = [row[:] for row in rows]
    nrows = len(mat)
    ncols = len(mat[0]) if mat else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        scale = mat[r][c]
        mat[r] = [x / scale for x in mat[r]]
        for i in range(nrows):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return mat, pivots


def nullspace_dense(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Kernel basis of the matrix given as dense rows, in RREF free-variable form."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    rref, pivots = rref_dense(rows)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -rref[r][fc]
        basis.append(vec)
    return basis


def dense_rank(rows: list[list[Fraction]]) -> int:
    return len(rref_dense(rows)[1]) if rows else 0


def _columns_mod_p(cols: Sequence[SparseCol], p: int) -> list[dict[int, int]]:
    out = []
    for col in cols:
        d: dict[int, int] = {}
        for r, v in col:
            val = (v.numerator * pow(v.denominator, -1, p)) % p
            if val:
                d[r] = val
        out.append(d)
    return out


DENSE_MODP_LIMIT = 4_000_000


def dense_rank_modp(cols: Sequence[SparseCol], nrows: int, ncols: int, p: int) -> int:
    """Vectorised row-echelon rank mod p on the transpose (columns as rows)."""
    import numpy as np

    a = np.zeros((ncols, nrows), dtype=np.int64)
    for j, col in enumerate(cols):
        for r, v in col:
            a[j, r] = (v.numerator * pow(v.denominator, -1, p)) % p
    rank = 0
    for c in range(nrows):
        if rank == ncols:
            break
        nz = np.nonzero(a[rank:, c])[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, c]), -1, p)
        a[rank] = (a[rank] * inv) % p
        rest = np.nonzero(a[rank + 1 :, c])[0]
        if rest.size:
            rows = rank + 1 + rest
            a[rows] = (a[rows] - np.outer(a[rows, c], a[rank])) % p
        rank += 1
    return rank


def sparse_rank_modp(cols: Sequence[SparseCol], p: int) -> int:
    """Rank modulo p via sparse elimination over the column vectors.

    Pivot rows are stored normalised with the lead entry stripped; the
    reduction mutates the working vector in place and only ever introduces
    coordinates above the current lead.
    """
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for col in _columns_mod_p(cols, p):
        cur = col
        while cur:
            lead = min(cur)
            piv = pivots.get(lead)
            factor = cur.pop(lead)
            if piv is None:
                inv = pow(factor, -1, p)
                pivots[lead] = {r: (v * inv) % p for r, v in cur.items()}
                rank += 1
                break
            for r, v in piv.items():
                newv = (cur.get(r, 0) - factor * v) % p
                if newv:
                    cur[r] = newv
                else:
                    cur.pop(r, None)
    return rank


def sparse_kernel_exact(
    cols: Sequence[SparseCol], ncols: int
) -> tuple[list[dict[int, Fraction]], int]:
    """Exact kernel via elimination with combination history.

    Each column is reduced against the pivot rows found so far while the
    combination used is tracked; columns that reduce to zero contribute a
    kernel vector supported on the current column plus earlier pivots, which
    is the standard reduced (free-variable) form.  Deterministic.
    """
    pivots: dict[int, tuple[dict[int, Fraction], dict[int, Fraction]]] = {}
    kernel: list[dict[int, Fraction]] = []
    rank = 0
    for j in range(ncols):
        cur = {r: v for r, v in cols[j]}
        hist: dict[int, Fraction] = {j: Fraction(1)}
        while cur:
            lead = min(cur)
            piv = pivots.get(lead)
            factor = cur.pop(lead)
            if piv is None:
                vec = {r: v / factor for r, v in cur.items()}
                comb = {c: v / factor for c, v in hist.items()}
                pivots[lead] = (vec, comb)
                rank += 1
                break
            pvec, pcomb = piv
            for r, v in pvec.items():
                newv = cur.get(r, Fraction(0)) - factor * v
                if newv:
                    cur[r] = newv
                else:
                    cur.pop(r, None)
            for c, v in pcomb.items():
                newv = hist.get(c, Fraction(0)) - factor * v
                if newv:
                    hist[c] = newv
                else:
                    hist.pop(c, None)
        else:
            kernel.append(hist)
    return kernel, rank


def verify_kernel_vectors(
    cols: Sequence[SparseCol], vectors: Iterable[dict[int, Fraction]]
) -> bool:
    """Exact check that each combination of columns is the zero vector."""
    for vec in vectors:
        acc: dict[int, Fraction] = {}
        for j, coeff in vec.items():
            for r, v in cols[j]:
                newv = acc.get(r, Fraction(0)) + coeff * v
                if newv:
                    acc[r] = newv
                else:
                    acc.pop(r, None)
        if acc:
            return False
    return True


def kernel_with_certificate(
    cols: Sequence[SparseCol], nrows: int, ncols: int
) -> tuple[list[dict[int, Fraction]], RankCertificate]:
    """Kernel basis plus the rank certificate described in the module docs."""
    if nrows * ncols <= DENSE_ENTRY_LIMIT:
        dense_rows = [[Fraction(0)] * ncols for _ in range(nrows)]
        for j, col in enumerate(cols):
            for r, v in col:
                dense_rows[r][j] = v
        basis_rows = nullspace_dense(dense_rows, ncols)
        vectors = [
            {i: v for i, v in enumerate(vec) if v} for vec in basis_rows
        ]
        rank = ncols - len(vectors)
        if not verify_kernel_vectors(cols, vectors):
            raise RuntimeError("dense kernel failed the exact membership check")
        cert = RankCertificate([], [], True, "dense-exact", rank)
        return vectors, cert

    attempts = 0
    primes: list[int] = []
    ranks: list[int] = []
    use_dense_modp = nrows * ncols <= DENSE_MODP_LIMIT
    while attempts < 4:
        offset = attempts * 3
        primes = list(PRIME_POOL[offset : offset + 3])
        if len(primes) < 3:
            raise RankDisagreement("prime pool exhausted")
        if use_dense_modp:
            ranks = [dense_rank_modp(cols, nrows, ncols, p) for p in primes]
        else:
            ranks = [sparse_rank_modp(cols, p) for p in primes]
        if len(set(ranks)) == 1:
            break
        attempts += 1
    else:
        raise RankDisagreement(f"modular ranks disagree persistently: {ranks}")

    if ranks[0] == ncols:
        # Full column rank is already exact: the rank over the rationals is
        # bounded below by any modular rank and above by the column count.
        cert = RankCertificate(primes, ranks, True, "multi-modular+full-column-rank", ncols)
        return [], cert

    vectors, exact_rank = sparse_kernel_exact(cols, ncols)
    if not verify_kernel_vectors(cols, vectors):
        raise RuntimeError("exact kernel failed the membership check")
    confirmed = exact_rank == ranks[0] and len(vectors) == ncols - exact_rank
    cert = RankCertificate(primes, ranks, confirmed, "multi-modular+exact", exact_rank)
    if not confirmed:
        raise RankDisagreement(
            f"exact rank {exact_rank} does not confirm modular ranks {ranks}"
        )
    return vectors, cert


def sparse_rank_exact(cols: Sequence[SparseCol], ncols: int) -> int:
    return sparse_kernel_exact(cols, ncols)[1]


def span_rank(vectors: Sequence[dict[int, Fraction]]) -> int:
    """Rank of a list of sparse coordinate vectors."""
    cols = [sorted((r, v) for r, v in vec.items()) for vec in vectors]
    return sparse_rank_exact(cols, len(cols))


def same_subspace(
    basis_a: Sequence[dict[int, Fraction]], basis_b: Sequence[dict[int, Fraction]]
) -> bool:
    """Exact subspace equality via ranks of the stacked bases."""
    ra = span_rank(basis_a)
    rb = span_rank(basis_b)
    if ra != rb:
        return False
    return span_rank(list(basis_a) + list(basis_b)) == ra


class ReducedSpan:
    """Incrementally reduced span supporting exact membership queries."""

    def __init__(self, vectors: Iterable[dict[int, Fraction]] = ()):
        self.pivots: dict[int, dict[int, Fraction]] = {}
        for v in vectors:
            self.insert(v)

    def reduce(self, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        cur = dict(vec)
        while cur:
            lead = min(cur)
            piv = self.pivots.get(lead)
            if piv is None:
                return cur
            factor = cur[lead]
            for r, v in piv.items():
                newv = cur.get(r, Fraction(0)) - factor * v
                if newv:
                    cur[r] = newv
                else:
                    cur.pop(r, None)
        return cur

    def insert(self, vec: dict[int, Fraction]) -> bool:
        """Insert if independent; returns True when the span grew."""
        red = self.reduce(vec)
        if not red:
            return False
        lead = min(red)
        scale = red[lead]
        self.pivots[lead] = {r: v / scale for r, v in red.items()}
        return True

    def contains(self, vec: dict[int, Fraction]) -> bool:
        return not self.reduce(vec)

    @property
    def rank(self) -> int:
        return len(self.pivots)


class SpanSolver:
    """Span with coefficient tracking: solves target = sum c_i * vec_i exactly.

    Rows are stored keyed by their lead coordinate; solving is a sparse
    triangular pass that either settles every coordinate or reports the
    target as outside the span.  Keys may be any totally ordered hashables.
    """

    def __init__(self):
        self.rows: dict = {}

    def insert(self, vec: dict, tag) -> bool:
        """Insert a vector under a caller tag; returns False if dependent."""
        cur = dict(vec)
        hist = {tag: Fraction(1)}
        while cur:
            lead = min(cur)
            row = self.rows.get(lead)
            if row is None:
                self.rows[lead] = (cur, hist)
                return True
            rvec, rhist = row
            factor = cur[lead] / rvec[lead]
            for r, v in rvec.items():
                newv = cur.get(r, Fraction(0)) - factor * v
                if newv:
                    cur[r] = newv
                else:
                    cur.pop(r, None)
            for t, v in rhist.items():
                newv = hist.get(t, Fraction(0)) - factor * v
                if newv:
                    hist[t] = newv
                else:
                    hist.pop(t, None)
        return False

    def solve(self, target: dict) -> dict | None:
        """Coefficients by tag expressing target over the span, or None."""
        cur = dict(target)
        out: dict = {}
        while cur:
            lead = min(cur)
            row = self.rows.get(lead)
            if row is None:
                return None
            rvec, rhist = row
            factor = cur[lead] / rvec[lead]
            for r, v in rvec.items():
                newv = cur.get(r, Fraction(0)) - factor * v
                if newv:
                    cur[r] = newv
                else:
                    cur.pop(r, None)
            for t, v in rhist.items():
                newv = out.get(t, Fraction(0)) + factor * v
                if newv:
                    out[t] = newv
                else:
                    out.pop(t, None)
        return out
