import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbit_moduli import orbit as ob
from orbit_moduli.ineq import make_report
from orbit_moduli.sampling import sample_tuple
from orbit_moduli.serialize import (certificate_from_dict, certificate_to_dict, decode_float, dumps,
                                    encode_float, loads, matrix_from_dict, matrix_to_dict)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_floats_round_trip_exactly(x):
    d = {"m": matrix_to_dict(np.array([[x + 1j * x]]))}
    back = matrix_from_dict(loads(dumps(d))["m"])
    assert back[0, 0].real == x and back[0, 0].imag == x


def test_nonfinite_tokens():
    assert encode_float(math.inf) == "inf" and encode_float(-math.inf) == "-inf"
    assert encode_float(math.nan) == "nan"
    assert math.isnan(decode_float("nan")) and decode_float("-inf") == -math.inf
    with pytest.raises(ValueError):
        decode_float("infinity")
    with pytest.raises(ValueError):
        decode_float(True)
    assert json.loads(dumps({"x": math.inf})) == {"x": "inf"}


def test_matrix_validation():
    good = matrix_to_dict(np.eye(2))
    assert np.array_equal(matrix_from_dict(good), np.eye(2))
    with pytest.raises(ValueError):
        matrix_from_dict({**good, "re": good["re"][:3]})
    with pytest.raises(ValueError):
        matrix_from_dict({"rows": 1, "cols": 1, "re": [0.0]})
    with pytest.raises(ValueError):
        matrix_from_dict({"rows": 1, "cols": 1, "re": ["nan"], "im": [0.0]})
    with pytest.raises(ValueError):
        matrix_from_dict([1, 2])


def test_certificate_round_trip():
    A, B, C = sample_tuple(3, 2, 3).matrices
    cert = ob.euler_fourier4_orbit(A, B, C)
    back = certificate_from_dict(loads(dumps(certificate_to_dict(cert))))
    assert back.relation is cert.relation and back.label == cert.label
    assert np.array_equal(back.target, cert.target)
    for s, t in zip(back.terms, cert.terms):
        assert np.array_equal(s.witness, t.witness) and np.array_equal(s.operand, t.operand)
        assert s.weight == t.weight
    assert ob.verify_certificate(back).passed


def test_dumps_is_canonical():
    r = make_report("x", 2.0, 1.0, 1.0, 1.0, "inst")
    assert dumps(r) == dumps(r)
    assert dumps({"b": 1, "a": 2}) == '{"a":2,"b":1}'
    assert dumps(1 + 2j) == '{"im":2.0,"re":1.0}'
