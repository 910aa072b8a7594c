import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_form, random_hermitian
from posforms import exact as ex
from posforms import serialization as ser
from posforms.exterior import Form
from posforms.verdicts import PositivityVerdict, Status

rationals = st.builds(Fraction, st.integers(-60, 60), st.integers(1, 12))


@given(rationals, rationals)
@settings(max_examples=50, deadline=None)
def test_exact_scalar_roundtrip(re, im):
    g = ex.GaussianRational(re, im)
    js = json.loads(json.dumps(ser.scalar_to_json(g)))
    assert ser.scalar_from_json(js, exact=True) == g


def test_rational_literals():
    assert ser.scalar_to_json(ex.GaussianRational(Fraction(3, 4), 2)) == {"re": "3/4", "im": 2}
    assert ser.scalar_from_json({"re": "1/3"}, exact=True) == ex.GaussianRational(Fraction(1, 3))
    assert ser.scalar_from_json({"re": "1/4", "im": 1}) == 0.25 + 1j
    # decimals stay exact when parsed in exact mode
    obj = ser.loads('{"re": 0.1, "im": 0}', exact=True)
    assert ser.scalar_from_json(obj, exact=True).re == Fraction(1, 10)


@pytest.mark.parametrize("exact", [False, True])
def test_form_roundtrip(exact):
    rng = np.random.default_rng(1)
    for n, p, q in [(4, 2, 2), (3, 1, 2), (5, 0, 3)]:
        f = random_form(rng, n, p, q, exact=exact)
        g = ser.form_from_json(json.loads(ser.dumps(f)), exact=exact)
        assert (g == f) if exact else g.allclose(f, 0)


def test_matrix_roundtrip():
    A = random_hermitian(np.random.default_rng(2))
    js = json.loads(ser.dumps(ser.matrix_to_json(A)))
    assert js["basis"] == "phi-c4"
    assert np.array_equal(ser.matrix_from_json(js), A)
    kind, B = ser.load_input(js)
    assert kind == "matrix" and np.array_equal(A, B)


def test_repeated_terms_accumulate():
    obj = {"n": 2, "p": 1, "q": 1, "terms": [{"I": [1], "J": [1], "re": 1},
                                             {"I": [1], "J": [1], "re": "1/2"}]}
    f = ser.form_from_json(obj, exact=True)
    assert f.coeff((1,), (1,)) == ex.gaussian(Fraction(3, 2))
    assert ser.form_from_json({"n": 2, "p": 1, "q": 1, "terms": []}).is_zero()


@pytest.mark.parametrize("obj", [
    [],
    {"n": 4, "p": 2, "q": 2},
    {"n": 4, "p": 2, "q": 2, "terms": {}},
    {"n": 4, "p": 2, "q": 2, "terms": [{"I": [2, 1], "J": [1, 2], "re": 1}]},
    {"n": 4, "p": 2, "q": 2, "terms": [{"I": [1, 5], "J": [1, 2], "re": 1}]},
    {"n": 4, "p": 2, "q": 2, "terms": [{"I": [1], "J": [1, 2], "re": 1}]},
    {"n": 4, "p": 2, "q": 2, "terms": [{"I": [1, 2], "J": [1, 2], "re": "x"}]},
    {"n": 4, "p": 2, "q": 2, "terms": [{"I": [1, 2], "J": [1, 2], "re": True}]},
    {"n": "4", "p": 2, "q": 2, "terms": []},
    {"n": 4, "p": 5, "q": 2, "terms": []},
])
def test_form_schema_errors(obj):
    with pytest.raises(ser.SchemaError):
        ser.form_from_json(obj)


@pytest.mark.parametrize("obj", [
    {"matrix": [[0] * 6] * 5},
    {"basis": "standard", "matrix": [[{"re": 0}] * 6] * 6},
    {"nomatrix": 1},
])
def test_matrix_schema_errors(obj):
    with pytest.raises(ser.SchemaError):
        ser.matrix_from_json(obj)


def test_malformed_json():
    with pytest.raises(ser.SchemaError):
        ser.loads("{not json")


def test_to_plain():
    v = PositivityVerdict("weak", False, Status.CERTIFIED, "test", 1.5,
                          details={"x": np.array([1.0, 2.0]), "f": Fraction(1, 2)})
    plain = ser.to_plain(v)
    assert plain["status"] == "certified" and plain["details"] == {"x": [1.0, 2.0], "f": "1/2"}
    assert ser.to_plain(np.int64(3)) == 3 and ser.to_plain(1 + 2j) == {"re": 1.0, "im": 2.0}
    assert ser.to_plain(Form.zero(2, 1, 1))["terms"] == []
    json.dumps(plain)
