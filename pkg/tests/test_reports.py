import json
import math

import numpy as np
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from famedkit.reports import RunReport, fmt_float, render_csv, render_json, to_plain

finite = st.floats(allow_nan=False, allow_infinity=False)
leaf = finite | st.integers(-10 ** 6, 10 ** 6) | st.booleans() | st.text(max_size=8) | st.none()
tree = st.recursive(leaf, lambda kids: st.lists(kids, max_size=4) | st.dictionaries(st.text(max_size=5), kids, max_size=4),
                    max_leaves=20)


@given(finite)
def test_float_round_trip(x):
    s = fmt_float(x)
    assert float(s) == x
    assert isinstance(json.loads(s), float)


@given(tree)
def test_json_byte_identical_round_trip(obj):
    text = render_json(obj)
    assert render_json(json.loads(text)) == text


@given(st.dictionaries(st.text(max_size=5), tree, max_size=4))
def test_report_round_trip(outputs):
    rep = RunReport("demo", {"b": 0.8}, outputs, {"total_s": 0.25})
    back = RunReport.from_json(rep.to_json())
    assert back.to_json() == rep.to_json()
    assert back.versions == rep.versions


def test_to_plain_types():
    out = to_plain({"m": sp.Matrix([[1, sp.Rational(1, 2)]]), "a": np.arange(2), "z": 1 + 2j,
                    "f": np.float64(0.5), "t": np.bool_(True), 3: sp.Integer(4)})
    assert out == {"m": [["1", "1/2"]], "a": [0, 1], "z": {"re": 1.0, "im": 2.0}, "f": 0.5, "t": True, "3": "4"}


def test_non_finite_is_null():
    assert fmt_float(math.inf) == "null"
    assert render_json([math.nan]) == "[null]\n"


def test_seventeen_digits():
    assert fmt_float(0.1) == "0.10000000000000001"
    assert fmt_float(2.0) == "2.0"
    assert fmt_float(1e300) == "1.0000000000000001e+300"


def test_csv():
    text = render_csv(["b", "name"], [(0.5, "x"), (1.0, "y")])
    assert text == "b,name\n0.5,x\n1.0,y\n"
