from __future__ import annotations

import random
from fractions import Fraction as Q

import pytest

from spencerlab.cartan import CartanDatum, build_root_system
from spencerlab.chevalley import (
    algebra,
    bracket,
    build_chevalley_basis,
    check_jacobi,
    coadjoint,
    jacobi_residual,
    killing_determinant_sign,
    serialize_table,
)
from spencerlab.sym import SymElement


def test_sl2_relations(a1):
    h, e, f = 0, 1, 2
    assert dict(a1.bracket_basis(h, e)) == {e: 2}
    assert dict(a1.bracket_basis(h, f)) == {f: -2}
    assert dict(a1.bracket_basis(e, f)) == {h: 1}


def test_antisymmetry_all_pairs(a2):
    for a in range(a2.dim):
        for b in range(a2.dim):
            left = dict(a2.bracket_basis(a, b))
            right = {c: -v for c, v in a2.bracket_basis(b, a)}
            assert left == right


def test_repeated_element_jacobi_trivial(g2):
    rng = random.Random(5)
    for _ in range(30):
        a = rng.randrange(g2.dim)
        b = rng.randrange(g2.dim)
        assert jacobi_residual(g2, a, a, b) == {}


@pytest.mark.parametrize("label", ["A1", "A2", "B2", "C3", "D4", "G2", "F4"])
def test_jacobi_exhaustive_small(label):
    alg = algebra(label)
    assert alg.jacobi_checked
    # re-run the check independently of construction
    n_triples = check_jacobi(alg)
    d = alg.dim
    assert n_triples == d * (d - 1) * (d - 2) // 6


def test_integer_structure_constants(g2):
    values = set()
    for a in range(g2.dim):
        for _b, entries in g2.bracket_rows[a].items():
            for _c, v in entries:
                assert isinstance(v, int)
                values.add(abs(v))
    # G2 root strings reach length 4, so constants up to 3 appear.
    assert 3 in values


def test_killing_root_theoretic_oracle():
    # K(h_i, h_j) must match the sum over roots of the weight products,
    # and K(e, f) must match K(h_i, h_beta)/beta(h_i).
    for label in ("A2", "G2", "F4"):
        alg = algebra(label)
        rank = alg.rank
        for i in range(rank):
            for j in range(rank):
                s = sum(alg.weights[a][i] * alg.weights[a][j] for a in range(alg.dim))
                assert alg.killing[i][j] == s
        for r in range(alg.n_positive):
            ei, fi = alg.e_index(r), alg.f_index(r)
            w = alg.weights[ei]
            i = next(k for k in range(rank) if w[k])
            h_beta = dict(alg.bracket_basis(ei, fi))
            k_h_hbeta = sum(Q(c) * alg.killing[i][jj] for jj, c in h_beta.items())
            assert alg.killing[ei][fi] == k_h_hbeta / w[i]


def test_killing_symmetric_nondegenerate(a2):
    for a in range(a2.dim):
        for b in range(a2.dim):
            assert a2.killing[a][b] == a2.killing[b][a]
    assert killing_determinant_sign(a2) != 0


def test_killing_inverse(g2):
    for a in range(g2.dim):
        for b in range(g2.dim):
            v = sum(g2.killing[a][c] * g2.killing_inverse[c][b] for c in range(g2.dim))
            assert v == Q(int(a == b))


def test_bracket_elements_sl2(a1):
    e = SymElement.basis_vector(3, 1)
    f = SymElement.basis_vector(3, 2)
    assert bracket(a1, e, f).terms == {(0,): Q(1)}
    x = SymElement(1, 3, {(0,): Q(2), (1,): Q(-1)})
    assert bracket(a1, x, x).is_zero()


def test_bracket_rejects_mismatched_algebra(a1, a2):
    x = SymElement.basis_vector(a1.dim, 0)
    y = SymElement.basis_vector(a2.dim, 0)
    with pytest.raises(ValueError, match="dim"):
        bracket(a1, x, y)


def test_coadjoint_examples(a1):
    h = SymElement.basis_vector(3, 0)
    lam_e = (Q(0), Q(1), Q(0))
    # -e*([h, .]) has value -2 on the e slot
    assert coadjoint(a1, h, lam_e) == (Q(0), Q(-2), Q(0))
    zero = (Q(0), Q(0), Q(0))
    x = SymElement(1, 3, {(0,): Q(3), (2,): Q(5)})
    assert coadjoint(a1, x, zero) == zero


def test_coadjoint_cartan_on_cartan_dual(a2):
    # x in the Cartan, lambda supported on Cartan dual slots -> 0
    lam = tuple(Q(1) if i < a2.rank else Q(0) for i in range(a2.dim))
    for i in range(a2.rank):
        x = SymElement.basis_vector(a2.dim, i)
        assert coadjoint(a2, x, lam) == tuple(Q(0) for _ in range(a2.dim))


def test_coadjoint_invariance_identity(a2):
    # <ad*_x lam, y> + <lam, [x, y]> = 0 exactly for random data
    rng = random.Random(11)
    for _ in range(25):
        xi = rng.randrange(a2.dim)
        yi = rng.randrange(a2.dim)
        lam = tuple(Q(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(a2.dim))
        x = SymElement.basis_vector(a2.dim, xi)
        out = coadjoint(a2, x, lam)
        lhs = out[yi]
        rhs = sum((Q(v) * lam[c] for c, v in a2.bracket_basis(xi, yi)), Q(0))
        assert lhs + rhs == 0


def test_dim_identity_all_families():
    for label in ("A1", "B2", "C3", "D4", "G2", "F4", "E6"):
        alg = algebra(label)
        assert alg.dim == alg.rank + 2 * alg.n_positive


def test_e8_constructs_with_jacobi():
    e8 = algebra("E8")
    assert e8.dim == 248
    assert e8.jacobi_checked


def test_e7_cartan_bracket_matches_pairing_oracle():
    # [h_i, e_alpha] = <alpha, alpha_i^vee> e_alpha, with the pairing read
    # independently from root coordinates against the Cartan matrix row
    e7 = algebra("E7")
    cartan = e7.datum.cartan_matrix
    for r, beta in enumerate(e7.root_system.positive_roots):
        for i in range(e7.rank):
            expect = sum(c * cartan[i][j] for j, c in enumerate(beta))
            ent = dict(e7.bracket_basis(i, e7.e_index(r)))
            assert ent == ({e7.e_index(r): expect} if expect else {})


def test_serialize_round_trip_shape(a1):
    doc = serialize_table(a1)
    assert doc["format"] == "lie-table"
    assert doc["dim"] == 3
    triples = {tuple(t[:3]): t[3] for t in doc["bracket_triples"]}
    assert triples[(0, 1, 1)] == 2
    assert triples[(1, 2, 0)] == 1


def test_serialize_deserialize_round_trip(a2, g2):
    import json

    from spencerlab.chevalley import deserialize_table

    for alg in (a2, g2):
        doc = json.loads(json.dumps(serialize_table(alg)))
        back = deserialize_table(doc)
        assert back.dim == alg.dim
        assert back.bracket_rows == alg.bracket_rows


def test_deserialize_rejects_tampering(a1):
    import json

    from spencerlab.chevalley import deserialize_table

    doc = json.loads(json.dumps(serialize_table(a1)))
    doc["bracket_triples"][0][3] += 1
    with pytest.raises(ValueError, match="disagrees"):
        deserialize_table(doc)
    doc2 = json.loads(json.dumps(serialize_table(a1)))
    doc2["format_version"] = 2
    with pytest.raises(ValueError, match="unsupported"):
        deserialize_table(doc2)


def test_construction_without_verify_flag():
    rs = build_root_system(CartanDatum.from_label("A2"))
    alg = build_chevalley_basis(rs, verify=False)
    assert not alg.jacobi_checked
    check_jacobi(alg)
