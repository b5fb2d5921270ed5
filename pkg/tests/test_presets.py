from __future__ import annotations

import json
from fractions import Fraction as Q

import pytest

from spencerlab.presets import (
    cartan_dual,
    describe_lambda,
    parse_lambda_spec,
    random_dual,
    zero_dual,
)


def test_zero_and_cartan(a2):
    assert parse_lambda_spec(a2, "preset:zero") == zero_dual(a2)
    lam = parse_lambda_spec(a2, "preset:cartan2")
    assert lam == cartan_dual(a2, 2)
    assert lam[1] == 1 and sum(abs(x) for x in lam) == 1


def test_cartan_out_of_range(a1):
    with pytest.raises(ValueError, match="range"):
        parse_lambda_spec(a1, "preset:cartan2")


def test_random_deterministic(a2):
    lam1 = parse_lambda_spec(a2, "preset:random:99")
    lam2 = parse_lambda_spec(a2, "preset:random:99")
    lam3 = parse_lambda_spec(a2, "preset:random:100")
    assert lam1 == lam2 == random_dual(a2, seed=99)
    assert lam1 != lam3
    assert any(x for x in lam1)


def test_file_spec_round_trip(a1, tmp_path):
    lam = random_dual(a1, seed=5)
    path = tmp_path / "lam.json"
    path.write_text(json.dumps(describe_lambda(lam)))
    assert parse_lambda_spec(a1, f"file:{path}") == lam


def test_file_spec_wrong_length(a1, tmp_path):
    path = tmp_path / "lam.json"
    path.write_text(json.dumps([[1, 1]]))
    with pytest.raises(ValueError, match="entries"):
        parse_lambda_spec(a1, f"file:{path}")


def test_unknown_specs_rejected(a1):
    for bad in ("preset:nope", "preset:cartanX", "preset:random:x", "bogus"):
        with pytest.raises(ValueError):
            parse_lambda_spec(a1, bad)
