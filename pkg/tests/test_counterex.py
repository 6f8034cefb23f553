import math

import numpy as np
import pytest

from orbit_moduli import counterex as cx
from orbit_moduli import matcore as mc
from orbit_moduli.errors import ParameterError


@pytest.mark.parametrize("x", [-1.0, 2.0, 1.0001, -0.999, 5.0, -1e6, 1e8])
def test_parallelogram_confirmed(x):
    r = cx.parallelogram_counterexample(x)
    assert r.confirmed, r.details
    q = r.quantities
    assert q["lhs_rank"] == 2 and q["rhs_rank"] == 1
    # B = (x-1)/x carries a relative error of order eps * |x|
    rel = 1e-14 * max(1.0, abs(x))
    assert math.isclose(q["B_nabla_A"], (2 * x - 1) / x, rel_tol=rel)
    assert math.isclose(q["A_minus_B"], 1 / x, rel_tol=rel * max(1.0, abs(x)))


def test_parallelogram_inside_unit_interval_rejected():
    for x in (0.0, 0.5, 1.0):
        with pytest.raises(ParameterError):
            cx.parallelogram_counterexample(x)


def test_parallelogram_too_close_to_one_fails_honestly():
    # the weight -x(1-x) ~ 1e-9 is not distinguishable from zero at the default slack
    r = cx.parallelogram_counterexample(1 + 1e-9)
    assert not r.confirmed


def test_trace_identity_is_polynomial():
    A, B = np.array([[1.0, 2j], [0, 1]]), np.array([[0, 1], [1, 0]])
    for x in np.linspace(-3, 4, 15):
        assert cx.parallelogram_trace_residual(A, B, x) < 1e-14


@pytest.mark.parametrize("p", [2.5, 3.0, 4.0, 10.0])
@pytest.mark.parametrize("theta", [0.01, 0.3, 1.0, 2.0, 3.0])
def test_closed_traces_match_numeric(p, theta):
    Z = cx.z_theta(theta)
    assert abs(cx.qsym_trace_closed(theta, p) - cx.qsym_trace_numeric(Z, p)) < 1e-10
    assert abs(cx.cartesian_trace_closed(theta) - cx.cartesian_trace_numeric(Z)) < 1e-10


def test_phi_sign_pattern():
    # for p > 2 the power mean trace beats 1 + sin(theta) at small angles
    assert cx.phi(0.01, 3.0) > 0
    assert cx.phi(0.01, 2.0) <= 1e-15
    assert cx.phi(1.0, 3.0) < 0


def test_qsym_counterexample_p3():
    r = cx.qsym_exponent_counterexample(3.0)
    assert r.confirmed
    assert r.quantities["theta_star"] <= 0.1 and r.quantities["phi"] > 0
    assert r.quantities["lhs_discrepancy"] < 1e-10


def test_qsym_counterexample_near_two():
    r = cx.qsym_exponent_counterexample(2.1)
    assert r.confirmed and r.quantities["theta_star"] < 1e-5


def test_qsym_counterexample_p_at_most_two():
    with pytest.raises(ParameterError):
        cx.qsym_exponent_counterexample(2.0)


@pytest.mark.parametrize("p", [2.1, 3.0, 10.0])
def test_shift(p):
    r = cx.shift_counterexample(p)
    assert r.confirmed
    assert abs(r.quantities["mu3_lhs"] - 2 ** (-1 / p)) <= 1e-12
    assert r.quantities["mu3_lhs"] > 2**-0.5


def test_shift_weyl_pairs_hold_at_two():
    for j in range(3):
        for k in range(3 - j):
            lhs, rhs = cx.weyl_pair_values(cx.SHIFT3, 2.0, j, k)
            assert lhs <= rhs + 1e-12


def test_sym_thompson_values():
    r = cx.sym_thompson_counterexample()
    q = r.quantities
    assert r.confirmed
    assert abs(q["norm_sum"] - 3 / math.sqrt(2)) < 1e-10
    assert abs(q["norm_X"] - 7 / (2 * math.sqrt(5))) < 1e-10
    assert abs(q["norm_Y"] - 0.5) < 1e-10
    assert math.isclose(q["gap"], 0.0561, abs_tol=5e-5)
    assert q["qsym_certificate_passed"]


def test_sym_thompson_closed_forms_from_scratch():
    # |X|_sym for X = [[-1,-1],[0,-1]]: its top eigenvalue is 7/(2 sqrt 5)
    w = np.linalg.eigvalsh(mc.sym_modulus(cx.SYM_X))
    assert math.isclose(w[-1], 7 / (2 * math.sqrt(5)), rel_tol=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_four_isometry(n):
    r = cx.four_isometry_obstruction(n)
    assert r.confirmed
    assert r.quantities["psd_leq_holds"] is False
    assert abs(r.quantities["margin"] + 5) <= 1e-12


def test_registry_and_serialization():
    assert set(cx.COUNTEREXAMPLES) == {"parallelogram", "qsym", "shift", "sym-thompson", "four-isometry"}
    d = cx.sym_thompson_counterexample().to_dict()
    assert d["verdict"] == "ConfirmedCounterexample" and "strict_margins" in d
