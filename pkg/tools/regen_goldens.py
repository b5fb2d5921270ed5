"""Regenerate the golden fixtures from the stated oracles.

Run from the repository root:  python tools/regen_goldens.py
Review every diff before committing; goldens are regression locks for
values that were computed once and must not drift.
"""

from __future__ import annotations

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))

import numpy as np

from spencerlab.chevalley import algebra
from spencerlab.kernels import kernel_of_constrained
from spencerlab.operators import delta_classical, delta_constrained, nilpotency_audit
from spencerlab.presets import cartan_dual, random_dual
from spencerlab.repdecomp import decompose_character, is_g_submodule, weight_decomposition
from spencerlab.varsolve import Weights, energy, random_bundle_and_config

GOLDEN = os.path.join(os.path.dirname(__file__), "..", "tests", "golden")


def triples(mat):
    out = []
    for j, col in enumerate(mat.cols):
        for r, v in col:
            out.append([r, j, v.numerator, v.denominator])
    return out


def dump(name, obj):
    path = os.path.join(GOLDEN, name)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print("wrote", path)


def main():
    a1 = algebra("A1")
    a2 = algebra("A2")

    dump("a1_classical_k1.json", {"shape": [6, 3], "triples": triples(delta_classical(a1, 1))})
    dump(
        "a1_cartan1_k2_matrix.json",
        {"shape": [10, 6], "triples": triples(delta_constrained(a1, cartan_dual(a1, 1), 2))},
    )
    dump("a1_nilpotency_k1.json", nilpotency_audit(a1, cartan_dual(a1, 1), 1))
    dump("a2_random_nilpotency_k1.json", nilpotency_audit(a2, random_dual(a2, seed=1234), 1))

    kb, _ = kernel_of_constrained(a2, random_dual(a2, seed=4321), 2)
    sub = is_g_submodule(a2, kb)
    wd = weight_decomposition(a2, kb)
    dump(
        "a2_random_k2_kernel.json",
        {
            "kernel_dim": kb.dim,
            "is_submodule": sub["is_submodule"],
            "violation_count": sub["violation_count"],
            "weights": wd["weights"],
            "graded": wd["graded"],
        },
    )

    # Flagship measurement: exceptional algebra, first Cartan dual direction.
    e7 = algebra("E7")
    lam = cartan_dual(e7, 1)
    kb7, cert7 = kernel_of_constrained(e7, lam, 2)
    sub7 = is_g_submodule(e7, kb7)
    dump(
        "e7_sym2_kernel.json",
        {
            "algebra": "E7",
            "k": 2,
            "lambda": "preset:cartan1",
            "kernel_dim_measured": kb7.dim,
            "rank": cert7.rank,
            "predicted_forced_dim": 56,
            "is_submodule": sub7["is_submodule"],
            "notes": "measured and predicted values recorded side by side; "
            "agreement is reported, not asserted",
        },
    )

    # Character peeling of the full quadratic power of sl2.
    from spencerlab.presets import zero_dual

    kb_full, _ = kernel_of_constrained(a1, zero_dual(a1), 2)
    wd_full = weight_decomposition(a1, kb_full)
    summands = decompose_character(a1, [tuple(w) for w in wd_full["multiset"]])
    dump(
        "sym2_a1_decomposition.json",
        {
            "summands": [s.as_dict() for s in summands],
            "adjoint_multiplicity": sum(
                s.multiplicity for s in summands if s.highest_weight == (2,)
            ),
        },
    )

    # Variational energy on a seeded 4x4 instance.
    bundle, config = random_bundle_and_config(a1, 2, 4, seed=2024)
    w = Weights(alpha1=0.5, alpha3=1.0, bound_c=10.0)
    eb = energy(bundle, config, w)
    dump(
        "varsolve_energy_4x4.json",
        {"seed": 2024, "weights": {"alpha1": 0.5, "alpha3": 1.0, "C": 10.0},
         "breakdown": {k: repr(v) for k, v in eb.as_dict().items()}},
    )


if __name__ == "__main__":
    main()
