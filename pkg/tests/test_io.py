import json

import numpy as np
import pytest

from stanewton.errors import AsymmetricInput, DimensionMismatch
from stanewton.io import (
    InputError,
    decomposition_from_json,
    decomposition_to_json,
    load_poly,
    poly_from_json,
    poly_to_json,
    read_json,
)
from stanewton.poly import COMPLEX, REAL, apolar_norm, monomials, random_gaussian_poly

from conftest import random_point


def test_poly_roundtrip(rng):
    for field in (REAL, COMPLEX):
        P = random_gaussian_poly(3, 4, field, seed=rng)
        obj = json.loads(json.dumps(poly_to_json(P)))
        Q = poly_from_json(obj)
        assert Q.field == field
        np.testing.assert_array_equal(P.coef, Q.coef)


def test_graded_lex_order(rng):
    P = random_gaussian_poly(3, 3, REAL, seed=rng)
    alphas = [tuple(c["alpha"]) for c in poly_to_json(P)["coeffs"]]
    assert alphas == [tuple(a) for a in monomials(3, 3)]


def test_entries_format():
    obj = {"n": 2, "d": 2, "entries": [
        {"index": [1, 1], "re": 2.0}, {"index": [1, 2], "re": 0.5}, {"index": [2, 1], "re": 0.5},
        {"index": [2, 2], "re": 0.0, "im": 1.0}]}
    P = poly_from_json(obj)
    assert P.field == COMPLEX
    assert P[(1, 1)] == 0.5 and P[(0, 2)] == 1j


def test_entries_asymmetric():
    obj = {"n": 2, "d": 2, "entries": [{"index": [1, 2], "re": 1}, {"index": [2, 1], "re": 2}]}
    with pytest.raises(AsymmetricInput):
        poly_from_json(obj)


def test_bad_exponent():
    with pytest.raises(DimensionMismatch):
        poly_from_json({"n": 2, "d": 3, "coeffs": [{"alpha": [1, 1], "re": 1}]})


def test_duplicate_and_missing_fields():
    with pytest.raises(InputError):
        poly_from_json({"n": 2, "d": 2, "coeffs": [{"alpha": [2, 0], "re": 1}, {"alpha": [2, 0], "re": 1}]})
    with pytest.raises(InputError):
        poly_from_json({"d": 2, "coeffs": []})
    with pytest.raises(InputError):
        poly_from_json([1, 2])


def test_decomposition_roundtrip(rng):
    for field in (REAL, COMPLEX):
        p = random_point(3, 3, 2, field, rng)
        q = decomposition_from_json(json.loads(json.dumps(decomposition_to_json(p))))
        assert q.field == field
        np.testing.assert_array_equal(p.W, q.W)
        np.testing.assert_array_equal(p.V, q.V)


def test_line_numbered_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "n": 2,\n  "d": 3\n  "coeffs": []\n}\n')
    with pytest.raises(InputError, match=r":4:"):
        read_json(path)


def test_load(tmp_path, rng):
    P = random_gaussian_poly(2, 3, REAL, seed=rng)
    path = tmp_path / "p.json"
    path.write_text(json.dumps(poly_to_json(P)))
    assert apolar_norm(load_poly(path) - P) == 0
