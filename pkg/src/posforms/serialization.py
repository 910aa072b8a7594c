"""JSON literals for forms, phi-basis matrices and plain values.

Form literal::

    {"n": 4, "p": 2, "q": 2,
     "terms": [{"I": [1, 2], "J": [1, 2], "re": 1.0, "im": 0.0}, ...]}

Matrix literal::

    {"basis": "phi-c4", "matrix": [[{"re": 1.0, "im": 0.0}, ...], ...]}

Exact values are written as integers when integral and as ``"p/q"``
strings otherwise, so an exact object survives a round trip unchanged.
Reading with ``exact=True`` turns every number (floats included, via their
decimal text) into a rational.
"""

from __future__ import annotations

import dataclasses
import enum
import json
from fractions import Fraction

import numpy as np

from . import exact as ex
from .exterior import Form, multi_indices

MATRIX_BASIS = "phi-c4"


class SchemaError(ValueError):
    """Raised for JSON that does not follow the form or matrix schema."""


# scalars -----------------------------------------------------------------


def _dump_rational(x: Fraction):
    if x.denominator == 1:
        return int(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def scalar_to_json(c) -> dict:
    if isinstance(c, ex.GaussianRational):
        return {"re": _dump_rational(c.re), "im": _dump_rational(c.im)}
    c = complex(c)
    return {"re": float(c.real), "im": float(c.imag)}


def _load_number(x, exact: bool):
    if isinstance(x, bool) or not isinstance(x, (int, float, str, Fraction)):
        raise SchemaError(f"expected a number, got {x!r}")
    if isinstance(x, str):
        try:
            x = Fraction(x)
        except ValueError as err:
            raise SchemaError(f"bad rational literal {x!r}") from err
        return x if exact else float(x)
    if exact:
        return x if isinstance(x, (int, Fraction)) else Fraction(repr(x))
    return float(x)


def scalar_from_json(obj, exact: bool = False):
    if not isinstance(obj, dict):
        raise SchemaError(f"expected {{'re': .., 'im': ..}}, got {obj!r}")
    re = _load_number(obj.get("re", 0), exact)
    im = _load_number(obj.get("im", 0), exact)
    return ex.GaussianRational(re, im) if exact else complex(re, im)


# forms -------------------------------------------------------------------


def form_to_json(form: Form) -> dict:
    terms = []
    for I, J, c in form.terms():
        terms.append({"I": list(I), "J": list(J), **scalar_to_json(c)})
    return {"n": form.n, "p": form.p, "q": form.q, "terms": terms}


def _index_list(x, n: int, k: int, key: str) -> tuple[int, ...]:
    if not isinstance(x, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in x):
        raise SchemaError(f"{key} must be a list of integers, got {x!r}")
    t = tuple(x)
    if len(t) != k:
        raise SchemaError(f"{key}={list(t)} has length {len(t)}, expected {k}")
    if any(b <= a for a, b in zip(t, t[1:])):
        raise SchemaError(f"{key}={list(t)} is not strictly increasing")
    if t and (t[0] < 1 or t[-1] > n):
        raise SchemaError(f"{key}={list(t)} has entries outside 1..{n}")
    return t


def form_from_json(obj, exact: bool = False) -> Form:
    if not isinstance(obj, dict) or not {"n", "p", "q", "terms"} <= obj.keys():
        raise SchemaError("form literal needs keys n, p, q, terms")
    n, p, q = obj["n"], obj["p"], obj["q"]
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (n, p, q)):
        raise SchemaError("n, p, q must be integers")
    if not isinstance(obj["terms"], list):
        raise SchemaError("terms must be a list")
    try:
        c = ex.zeros((len(multi_indices(n, p)), len(multi_indices(n, q))), exact)
        out = Form(n, p, q, c)
    except ValueError as err:
        raise SchemaError(str(err)) from err
    terms = {}
    for t in obj["terms"]:
        if not isinstance(t, dict):
            raise SchemaError(f"term must be an object, got {t!r}")
        I = _index_list(t.get("I"), n, p, "I")
        J = _index_list(t.get("J"), n, q, "J")
        value = scalar_from_json(t, exact)
        terms[(I, J)] = terms.get((I, J), 0) + value
    return Form.from_terms(n, p, q, terms, exact=exact) if terms else out


# matrices ----------------------------------------------------------------


def matrix_to_json(A) -> dict:
    A = np.asarray(A)
    return {"basis": MATRIX_BASIS, "matrix": [[scalar_to_json(x) for x in row] for row in A]}


def matrix_from_json(obj, exact: bool = False) -> np.ndarray:
    if not isinstance(obj, dict) or "matrix" not in obj:
        raise SchemaError("matrix literal needs a 'matrix' key")
    if obj.get("basis", MATRIX_BASIS) != MATRIX_BASIS:
        raise SchemaError(f"unsupported basis {obj.get('basis')!r}; only {MATRIX_BASIS!r}")
    rows = obj["matrix"]
    if not isinstance(rows, list) or len(rows) != 6 or any(
            not isinstance(r, list) or len(r) != 6 for r in rows):
        raise SchemaError("matrix must be 6 x 6")
    A = ex.zeros((6, 6), exact)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            A[i, j] = scalar_from_json(x, exact)
    return A


def load_input(obj, exact: bool = False):
    """Parse a form or matrix literal; returns ("form", Form) or ("matrix", array)."""
    if isinstance(obj, dict) and "matrix" in obj:
        return "matrix", matrix_from_json(obj, exact)
    return "form", form_from_json(obj, exact)


def loads(text: str, exact: bool = False):
    """``json.loads`` that keeps decimal literals exact in exact mode."""
    try:
        return json.loads(text, parse_float=Fraction if exact else float)
    except json.JSONDecodeError as err:
        raise SchemaError(f"malformed JSON: {err}") from err


def to_plain(x):
    """Recursively convert numpy/exact values into JSON-ready Python objects."""
    if isinstance(x, dict):
        return {str(k): to_plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_plain(x.tolist())
    if isinstance(x, Form):
        return form_to_json(x)
    if isinstance(x, ex.GaussianRational):
        return scalar_to_json(x)
    if isinstance(x, Fraction):
        return _dump_rational(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return scalar_to_json(x)
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, enum.Enum):
        return to_plain(x.value)
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        out = {f.name: to_plain(getattr(x, f.name)) for f in dataclasses.fields(x)}
        for name in ("passed",):
            if hasattr(type(x), name):
                out[name] = to_plain(getattr(x, name))
        return out
    return x


def dumps(obj, indent: int | None = 2) -> str:
    return json.dumps(to_plain(obj), indent=indent, sort_keys=False, ensure_ascii=False)
