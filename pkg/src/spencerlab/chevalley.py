"""Chevalley basis construction with integer structure constants.

Basis order (contractual; all sparse matrices depend on it):
h_1..h_rank, then e_beta for positive roots beta in (height, lex) order,
then f_beta mirrored in the same root order.

Sign convention: for each positive root gamma of height >= 2 the
extraspecial pair (alpha, beta) is the special pair (alpha < beta,
alpha + beta = gamma) with minimal alpha in (height, lex) order; its
structure constant is fixed to +(p + 1) where p is the length of the
descending alpha-string through beta.  Every other constant follows from
antisymmetry, the opposite-root relation N(-x,-y) = -N(x,y), the
invariant-form cycling rule for triples summing to zero, and the Jacobi
identity on root-vector triples.  The Jacobi identity is re-verified
exhaustively on all basis triples before a table is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .cartan import CartanDatum, RootSystem, build_root_system, symmetrizer


class ChevalleyError(RuntimeError):
    """Internal sign-consistency or Jacobi failure during construction."""


Root = tuple[int, ...]
# A bracket value is a tuple of (basis index, integer coefficient) pairs.
BracketValue = tuple[tuple[int, int], ...]


def _root_key(beta: Root) -> tuple[int, Root]:
    return (sum(beta), beta)


class _ConstantTable:
    """N(x, y) for all root pairs, built by height induction."""

    def __init__(self, rs: RootSystem):
        self.rs = rs
        datum = rs.datum
        self.cartan = datum.cartan_matrix
        self.d = symmetrizer(self.cartan)
        self.pos = list(rs.positive_roots)
        self.pos_index = {b: i for i, b in enumerate(self.pos)}
        self.phi: set[Root] = set(self.pos) | {self._neg(b) for b in self.pos}
        self.norm2 = {b: self._norm2(b) for b in self.phi}
        self.special: dict[tuple[Root, Root], int] = {}
        self._build()

    @staticmethod
    def _neg(b: Root) -> Root:
        return tuple(-x for x in b)

    @staticmethod
    def _add(x: Root, y: Root) -> Root:
        return tuple(a + b for a, b in zip(x, y))

    @staticmethod
    def _sub(x: Root, y: Root) -> Root:
        return tuple(a - b for a, b in zip(x, y))

    def _norm2(self, b: Root) -> Fraction:
        n = len(b)
        total = Fraction(0)
        for i in range(n):
            if b[i] == 0:
                continue
            for j in range(n):
                if b[j]:
                    total += b[i] * b[j] * self.d[i] * self.cartan[i][j]
        return total

    @staticmethod
    def _is_positive(b: Root) -> bool:
        for x in b:
            if x:
                return x > 0
        return False

    def string_down(self, alpha: Root, beta: Root) -> int:
        """Largest k >= 0 with beta - k*alpha a root."""
        k = 0
        cur = self._sub(beta, alpha)
        while cur in self.phi:
            k += 1
            cur = self._sub(cur, alpha)
        return k

    def n(self, x: Root, y: Root) -> int:
        """Structure constant N(x, y); zero when x + y is not a root."""
        s = self._add(x, y)
        if s not in self.phi:
            return 0
        xpos = self._is_positive(x)
        ypos = self._is_positive(y)
        if xpos and ypos:
            if _root_key(x) < _root_key(y):
                return self.special[(x, y)]
            return -self.special[(y, x)]
        if not xpos and not ypos:
            return -self.n(self._neg(x), self._neg(y))
        if not xpos:
            return -self.n(y, x)
        # x positive, y negative; the sum s plays the role of x - (-y).
        z = self._neg(y)
        if self._is_positive(s):
            val = Fraction(-self.norm2[s], self.norm2[x]) * self.n(z, s)
        else:
            v = self._neg(s)
            val = Fraction(-self.norm2[v], self.norm2[z]) * self.n(x, v)
        if val.denominator != 1:
            raise ChevalleyError(f"non-integer constant for pair {x}, {y}: {val}")
        return int(val)

    def _build(self) -> None:
        ordered = sorted(self.pos, key=_root_key)
        for gamma in ordered:
            if sum(gamma) < 2:
                continue
            pairs = []
            for delta in ordered:
                if _root_key(delta) >= _root_key(gamma):
                    break
                eta = self._sub(gamma, delta)
                if eta in self.pos_index and _root_key(delta) < _root_key(eta):
                    pairs.append((delta, eta))
            if not pairs:
                raise ChevalleyError(f"no special pair found for root {gamma}")
            pairs.sort(key=lambda p: _root_key(p[0]))
            alpha, beta = pairs[0]
            self.special[(alpha, beta)] = self.string_down(alpha, beta) + 1
            for delta, eta in pairs[1:]:
                # Jacobi on (e_delta, e_eta, e_{-alpha}), read off on the
                # gamma - alpha root space.
                term = 0
                if self._sub(eta, alpha) in self.phi:
                    term += self.n(eta, self._neg(alpha)) * self.n(delta, self._sub(eta, alpha))
                if self._sub(delta, alpha) in self.phi:
                    term += self.n(self._neg(alpha), delta) * self.n(eta, self._sub(delta, alpha))
                denom = self.n(self._neg(alpha), gamma)
                if denom == 0:
                    raise ChevalleyError(f"vanishing extraspecial constant at {gamma}")
                val = Fraction(-term, denom)
                if val.denominator != 1 or val == 0:
                    raise ChevalleyError(
                        f"sign-consistency failure at triple {delta}, {eta}, {gamma}: {val}"
                    )
                self.special[(delta, eta)] = int(val)


@dataclass
class LieAlgebraTable:
    """Bracket and Killing tables for a semisimple algebra in a Chevalley basis."""

    datum: CartanDatum
    root_system: RootSystem
    dim: int
    basis_labels: tuple[str, ...]
    # bracket[a][b] lists (c, coeff) with [x_a, x_b] = sum coeff * x_c.
    bracket_rows: tuple[dict[int, BracketValue], ...]
    killing: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    killing_inverse: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    weights: tuple[tuple[int, ...], ...] = field(repr=False)
    jacobi_checked: bool = False

    @property
    def rank(self) -> int:
        return self.datum.rank

    @property
    def label(self) -> str:
        return self.datum.label

    @property
    def n_positive(self) -> int:
        return len(self.root_system.positive_roots)

    def bracket_basis(self, a: int, b: int) -> BracketValue:
        return self.bracket_rows[a].get(b, ())

    def e_index(self, r: int) -> int:
        return self.rank + r

    def f_index(self, r: int) -> int:
        return self.rank + self.n_positive + r

    def killing_entry(self, a: int, b: int) -> Fraction:
        return self.killing[a][b]


def _killing_from_table(dim: int, rows) -> list[list[Fraction]]:
    """K(a, b) = trace(ad_a ad_b), computed from the sparse bracket table."""
    k = [[Fraction(0)] * dim for _ in range(dim)]
    flat = []
    for a in range(dim):
        entries = []
        for c, val in rows[a].items():
            for dd, coeff in val:
                entries.append((c, dd, coeff))
        flat.append(entries)
    for a in range(dim):
        for b in range(a, dim):
            total = 0
            row_b = rows[b]
            for c, dd, coeff in flat[a]:
                back = row_b.get(dd)
                if back:
                    for c2, coeff2 in back:
                        if c2 == c:
                            total += coeff * coeff2
            if total:
                k[a][b] = Fraction(total)
                k[b][a] = Fraction(total)
    return k


def _invert_killing(table_k: list[list[Fraction]], rank: int, n_pos: int) -> list[list[Fraction]]:
    """Invert K using its block shape: Cartan block plus (e, f) pairings."""
    dim = len(table_k)
    for a in range(dim):
        for b in range(dim):
            v = table_k[a][b]
            if v == 0:
                continue
            cartan_pair = a < rank and b < rank
            ef_pair = (
                rank <= a < rank + n_pos and b == a + n_pos
            ) or (
                rank <= b < rank + n_pos and a == b + n_pos
            )
            if not (cartan_pair or ef_pair):
                raise ChevalleyError(f"unexpected Killing entry at ({a}, {b})")
    inv = [[Fraction(0)] * dim for _ in range(dim)]
    block = [[table_k[i][j] for j in range(rank)] for i in range(rank)]
    aug = [row[:] + [Fraction(int(i == j)) for j in range(rank)] for i, row in enumerate(block)]
    for col in range(rank):
        piv = next((r for r in range(col, rank) if aug[r][col] != 0), None)
        if piv is None:
            raise ChevalleyError("singular Killing form on the Cartan block")
        aug[col], aug[piv] = aug[piv], aug[col]
        scale = aug[col][col]
        aug[col] = [x / scale for x in aug[col]]
        for r in range(rank):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    for i in range(rank):
        for j in range(rank):
            inv[i][j] = aug[i][rank + j]
    for r in range(n_pos):
        ei = rank + r
        fi = rank + n_pos + r
        pairing = table_k[ei][fi]
        if pairing == 0:
            raise ChevalleyError(f"degenerate (e, f) Killing pairing at root index {r}")
        inv[ei][fi] = 1 / pairing
        inv[fi][ei] = 1 / pairing
    return inv


def jacobi_residual(table: LieAlgebraTable, a: int, b: int, c: int) -> dict[int, int]:
    """[x_a,[x_b,x_c]] + [x_b,[x_c,x_a]] + [x_c,[x_a,x_b]] as a sparse vector."""
    acc: dict[int, int] = {}

    def add_double(x: int, inner: BracketValue, sign: int) -> None:
        row = table.bracket_rows[x]
        for m, coeff in inner:
            out = row.get(m)
            if out:
                for n_idx, coeff2 in out:
                    acc[n_idx] = acc.get(n_idx, 0) + sign * coeff * coeff2

    add_double(a, table.bracket_basis(b, c), 1)
    add_double(b, table.bracket_basis(c, a), 1)
    add_double(c, table.bracket_basis(a, b), 1)
    return {k: v for k, v in acc.items() if v}


def check_jacobi(table: LieAlgebraTable) -> int:
    """Verify the Jacobi identity on every basis triple; returns triple count."""
    dim = table.dim
    count = 0
    for a in range(dim):
        for b in range(a + 1, dim):
            for c in range(b + 1, dim):
                count += 1
                bad = jacobi_residual(table, a, b, c)
                if bad:
                    raise ChevalleyError(
                        f"Jacobi identity fails on basis triple ({a}, {b}, {c}): {bad}"
                    )
    return count


def build_chevalley_basis(rs: RootSystem, verify: bool = True) -> LieAlgebraTable:
    """Build the full bracket table for the root system's algebra."""
    datum = rs.datum
    rank = datum.rank
    pos = sorted(rs.positive_roots, key=_root_key)
    n_pos = len(pos)
    dim = rank + 2 * n_pos
    consts = _ConstantTable(rs)
    d = consts.d
    cartan = datum.cartan_matrix

    def pairing(beta: Root, i: int) -> int:
        return sum(c * cartan[i][j] for j, c in enumerate(beta))

    def coroot_coeffs(beta: Root) -> list[int]:
        dbeta = consts.norm2[beta] / 2
        out = []
        for i in range(rank):
            v = Fraction(beta[i]) * d[i] / dbeta
            if v.denominator != 1:
                raise ChevalleyError(f"non-integral coroot for {beta}")
            out.append(int(v))
        return out

    pos_index = {b: r for r, b in enumerate(pos)}
    e_of = lambda r: rank + r
    f_of = lambda r: rank + n_pos + r

    rows: list[dict[int, BracketValue]] = [dict() for _ in range(dim)]

    def put(a: int, b: int, entries: list[tuple[int, int]]) -> None:
        entries = [(c, v) for c, v in entries if v]
        if not entries:
            return
        entries.sort()
        rows[a][b] = tuple(entries)
        rows[b][a] = tuple((c, -v) for c, v in entries)

    for i in range(rank):
        for r, beta in enumerate(pos):
            p = pairing(beta, i)
            if p:
                put(i, e_of(r), [(e_of(r), p)])
                put(i, f_of(r), [(f_of(r), -p)])
    for r, beta in enumerate(pos):
        put(e_of(r), f_of(r), [(i, c) for i, c in enumerate(coroot_coeffs(beta))])
    neg = consts._neg
    add = consts._add
    for r, br in enumerate(pos):
        for s in range(r + 1, n_pos):
            bs = pos[s]
            tot = add(br, bs)
            if tot in pos_index:
                nval = consts.n(br, bs)
                put(e_of(r), e_of(s), [(e_of(pos_index[tot]), nval)])
                put(f_of(r), f_of(s), [(f_of(pos_index[tot]), -nval)])
        for s in range(n_pos):
            if s == r:
                continue
            bs = pos[s]
            diff = consts._sub(br, bs)
            if diff in consts.phi:
                nval = consts.n(br, neg(bs))
                if consts._is_positive(diff):
                    put(e_of(r), f_of(s), [(e_of(pos_index[diff]), nval)])
                else:
                    put(e_of(r), f_of(s), [(f_of(pos_index[neg(diff)]), nval)])

    labels = (
        tuple(f"h{i + 1}" for i in range(rank))
        + tuple(f"e[{','.join(map(str, b))}]" for b in pos)
        + tuple(f"f[{','.join(map(str, b))}]" for b in pos)
    )
    weights = (
        tuple(tuple(0 for _ in range(rank)) for _ in range(rank))
        + tuple(tuple(pairing(b, i) for i in range(rank)) for b in pos)
        + tuple(tuple(-pairing(b, i) for i in range(rank)) for b in pos)
    )

    killing = _killing_from_table(dim, rows)
    killing_inv = _invert_killing(killing, rank, n_pos)

    table = LieAlgebraTable(
        datum=datum,
        root_system=RootSystem(datum, rs.simple_roots, tuple(pos), rs.root_count),
        dim=dim,
        basis_labels=labels,
        bracket_rows=tuple(rows),
        killing=tuple(tuple(row) for row in killing),
        killing_inverse=tuple(tuple(row) for row in killing_inv),
        weights=weights,
    )
    if verify:
        check_jacobi(table)
        table.jacobi_checked = True
    return table


@lru_cache(maxsize=16)
def algebra(label: str, verify: bool = True) -> LieAlgebraTable:
    """Build (and cache) the algebra for a label like ``A1`` or ``E7``."""
    datum = CartanDatum.from_label(label)
    return build_chevalley_basis(build_root_system(datum), verify=verify)


def killing_determinant_sign(table: LieAlgebraTable) -> int:
    """Sign of det K, using the Cartan-block / (e,f)-pair shape."""
    rank = table.rank
    block = [[table.killing[i][j] for j in range(rank)] for i in range(rank)]
    det = Fraction(1)
    mat = [row[:] for row in block]
    sign = 1
    for col in range(rank):
        piv = next((r for r in range(col, rank) if mat[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            sign = -sign
        det *= mat[col][col]
        for r in range(col + 1, rank):
            f = mat[r][col] / mat[col][col]
            mat[r] = [x - f * y for x, y in zip(mat[r], mat[col])]
    det *= sign
    for r in range(table.n_positive):
        pairing = table.killing[table.e_index(r)][table.f_index(r)]
        det *= -(pairing * pairing)
    return (det > 0) - (det < 0)


def bracket(table: LieAlgebraTable, x, y):
    """Bilinear bracket of two degree-1 elements over the same algebra."""
    from .sym import SymElement

    if not isinstance(x, SymElement) or not isinstance(y, SymElement):
        raise TypeError("bracket expects SymElement arguments")
    if x.dim != table.dim or y.dim != table.dim:
        raise ValueError(
            f"element dims ({x.dim}, {y.dim}) do not match algebra dim {table.dim}"
        )
    if x.degree != 1 or y.degree != 1:
        raise ValueError("bracket is defined on degree-1 elements")
    out = SymElement.zero(1, table.dim)
    for (a,), va in x.terms.items():
        row = table.bracket_rows[a]
        for (b,), vb in y.terms.items():
            ent = row.get(b)
            if ent:
                w = va * vb
                for c, coeff in ent:
                    out.add_term((c,), w * coeff)
    return out


def coadjoint(table: LieAlgebraTable, x, lam: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """(ad*_x lam)(y) = -lam([x, y]) for a degree-1 element x, evaluated exactly."""
    from .sym import SymElement

    if not isinstance(x, SymElement) or x.dim != table.dim or x.degree != 1:
        raise ValueError("coadjoint expects a degree-1 element over the same algebra")
    if len(lam) != table.dim:
        raise ValueError(f"dual vector length {len(lam)} does not match dim {table.dim}")
    out = [Fraction(0)] * table.dim
    for (a,), va in x.terms.items():
        for b, entries in table.bracket_rows[a].items():
            total = Fraction(0)
            for c, coeff in entries:
                if lam[c]:
                    total += coeff * lam[c]
            if total:
                out[b] -= va * total
    return tuple(out)


def serialize_table(table: LieAlgebraTable) -> dict:
    """Versioned JSON document for the algebra table."""
    triples = []
    for a in range(table.dim):
        for b, entries in sorted(table.bracket_rows[a].items()):
            if b <= a:
                continue
            for c, v in entries:
                triples.append([a, b, c, int(v), 1])
    killing = []
    for a in range(table.dim):
        for b in range(a, table.dim):
            v = table.killing[a][b]
            if v:
                killing.append([a, b, v.numerator, v.denominator])
    return {
        "format": "lie-table",
        "format_version": 1,
        "algebra": table.label,
        "dim": table.dim,
        "basis_labels": list(table.basis_labels),
        "bracket_triples": triples,
        "killing": killing,
    }


def deserialize_table(doc: dict) -> LieAlgebraTable:
    """Rebuild an algebra table from its versioned JSON document.

    The bracket and Killing data are taken from the document and
    cross-checked against a fresh construction for the same label; any
    disagreement means the document does not describe the documented
    convention and is rejected.
    """
    if doc.get("format") != "lie-table" or doc.get("format_version") != 1:
        raise ValueError("unsupported lie-table document")
    fresh = algebra(doc["algebra"])
    if fresh.dim != doc["dim"] or list(fresh.basis_labels) != doc["basis_labels"]:
        raise ValueError("document basis does not match the construction convention")
    rows: list[dict[int, dict[int, int]]] = [dict() for _ in range(fresh.dim)]
    for a, b, c, num, den in doc["bracket_triples"]:
        if den != 1:
            raise ValueError(f"non-integer structure constant at ({a}, {b}, {c})")
        rows[a].setdefault(b, {})[c] = num
        rows[b].setdefault(a, {})[c] = -num
    for a in range(fresh.dim):
        got = {b: dict(entries) for b, entries in rows[a].items()}
        expect = {
            b: {c: v for c, v in entries}
            for b, entries in fresh.bracket_rows[a].items()
        }
        if got != expect:
            raise ValueError(f"bracket row {a} disagrees with the construction")
    killing = {(a, b): Fraction(num, den) for a, b, num, den in doc["killing"]}
    for (a, b), v in killing.items():
        if fresh.killing[a][b] != v:
            raise ValueError(f"Killing entry ({a}, {b}) disagrees with the construction")
    return fresh
