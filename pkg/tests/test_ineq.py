import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbit_moduli import ineq as iq
from orbit_moduli import matcore as mc
from orbit_moduli.counterex import SHIFT3
from orbit_moduli.errors import DimensionError, ParameterError, PreconditionError
from orbit_moduli.sampling import Ensemble, sample_tuple

P_GRID = [0.5, 1.2, 1.5, 2.0, 3.0, 4.0]


def triple(n=3, seed=0, trial=0):
    return sample_tuple(3, n, seed, trial).matrices


def sp(X, p):
    return mc.schatten_power_sum(X, p)


# --- verdict convention


def test_classify_convention():
    assert iq.classify(1.0, 2.0)[2] is iq.Verdict.HOLDS
    assert iq.classify(2.0, 1.0)[2] is iq.Verdict.VIOLATED
    assert iq.classify(1.0, 1.0 + 5e-10)[2] is iq.Verdict.EQUALITY
    assert iq.classify(0.0, 0.0) == (0.0, 0.0, iq.Verdict.EQUALITY)
    ratio, _, verdict = iq.classify(1.0, 0.0)
    assert verdict is iq.Verdict.VIOLATED and ratio == math.inf
    # the equality band is relative to max(1, |rhs|)
    assert iq.classify(1e6, 1e6 + 1e-4)[2] is iq.Verdict.EQUALITY
    assert iq.classify(1e6, 1e6 + 1e-2)[2] is iq.Verdict.HOLDS


def test_report_dict():
    r = iq.make_report("x", 3, 1.0, 2.0, 1.5, "inst", extra={"m": 1})
    d = r.to_dict()
    assert d["p"] == 3.0 and d["instance"] == "inst" and d["verdict"] == "Holds"
    assert iq.make_report("y", None, 1, 1, 1).p is None


def test_parameter_checks():
    A, B, C = triple()
    with pytest.raises(ParameterError):
        iq.cm_euler_pp(A, B, C, 0.0)
    with pytest.raises(ParameterError):
        iq.cm_euler_qp(A, B, C, 1.0)
    with pytest.raises(ParameterError):
        iq.cm_euler_pp(A, B, C, math.inf)
    with pytest.raises(DimensionError):
        iq.cm_euler_pp(A, B, np.eye(2), 3.0)
    assert iq.conjugate_exponent(3.0) == 1.5


# --- Euler identity and the p = 2 pivot


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32))
def test_euler_identity(n, seed):
    A, B, C = triple(n, seed)
    assert iq.euler_identity_residual(A, B, C, relative=True) <= 1e-12


@pytest.mark.parametrize("p", P_GRID)
def test_cm_pp_against_direct_norms(p):
    A, B, C = triple(3, 1)
    euler = sp(A + B + C, p) + sp(A, p) + sp(B, p) + sp(C, p)
    pair = sp(A + B, p) + sp(B + C, p) + sp(C + A, p)
    r = iq.cm_euler_pp(A, B, C, p)
    const = 2 ** (p - 2)
    if p >= 2:
        assert math.isclose(r.lhs, pair, rel_tol=1e-12) and math.isclose(r.rhs, const * euler, rel_tol=1e-12)
    else:
        assert math.isclose(r.lhs, const * euler, rel_tol=1e-12) and math.isclose(r.rhs, pair, rel_tol=1e-12)
    assert r.verdict in (iq.Verdict.HOLDS, iq.Verdict.EQUALITY)


def test_p2_pivot_is_equality():
    A, B, C = triple(4, 2)
    reports = [iq.cm_euler_pp(A, B, C, 2.0), iq.weak_euler_bound(A, B, C, 2.0), *iq.cm_euler_qp(A, B, C, 2.0)]
    reports += list(iq.akc_check([A, B, C], 2.0))
    assert all(r.verdict is iq.Verdict.EQUALITY for r in reports)


@pytest.mark.parametrize("p", P_GRID)
def test_sharp_case_a_eq_b_eq_minus_c(p):
    A = triple(3, 3)[0]
    assert iq.cm_euler_pp(A, A, -A, p).verdict is iq.Verdict.EQUALITY
    if p > 1:
        assert all(r.verdict is iq.Verdict.EQUALITY for r in iq.cm_euler_qp(A, A, -A, p))


@pytest.mark.parametrize("p", [1.2, 1.5, 3.0, 4.0])
@pytest.mark.parametrize("k", [2, 3, 4])
def test_akc_equal_tuples(p, k):
    A = triple(2, 4)[0]
    assert all(r.verdict is iq.Verdict.EQUALITY for r in iq.akc_check([A] * k, p))


def test_weak_constant_and_scalar_check():
    assert iq.weak_euler_bound(*triple(), 4.0).constant == 3.0
    # scalars a = b = c = 1 at p = 4: Euler side 81 + 3, pairwise side 3 * 16
    r = iq.weak_euler_bound([[1]], [[1]], [[1]], 4.0)
    assert r.lhs == 84.0 and r.rhs == 3.0 * 48.0


# --- mixed norms


def test_akc_isometry():
    for n in (2, 3, 5):
        U = iq.akc_isometry(n)
        assert U.shape == (1 + n * (n - 1) // 2, n)
        assert mc.isometry_defect(U) < 1e-14


def test_euler_coefficients():
    U = iq.EULER_COEFFS
    assert mc.isometry_defect(U.conj().T) < 1e-15
    assert math.isclose(mc.opnorm(U), 1.0)
    A, B, C = triple(2, 5)
    ys, xs = iq.euler_pieces(A, B, C)
    assert all(np.allclose(X, Y) for X, Y in zip(iq.apply_tu(U, ys), xs))


@pytest.mark.parametrize("p", [1.2, 1.5, 2.0, 3.0, 4.0])
def test_mixed_ratio_matches_akc(p):
    # for the AKC isometry the mixed estimate is the AKC inequality rescaled
    A, B, C, D = sample_tuple(4, 2, 6).matrices
    U = iq.akc_isometry(4)
    mixed = iq.mixed_norm_check(U, [A, B, C, D], p, "forward")
    akc = iq.akc_check([A, B, C, D], p)[0]
    q = iq.conjugate_exponent(p)
    assert math.isclose(mixed.ratio ** q, akc.ratio, rel_tol=1e-10)


def test_mixed_preconditions():
    Z = list(triple(2, 7))
    with pytest.raises(PreconditionError):
        iq.mixed_norm_check(iq.EULER_COEFFS.T * 2, Z + [Z[0]], 1.5, "forward")
    with pytest.raises(PreconditionError):
        iq.mixed_norm_check(iq.EULER_COEFFS, Z + [Z[0]], 1.5, "backward")
    with pytest.raises(PreconditionError):
        iq.mixed_norm_check(iq.EULER_COEFFS, Z + [Z[0]], 3.0, "forward")
    with pytest.raises(ParameterError):
        iq.mixed_norm_check(iq.akc_isometry(3), Z, 1.0)
    r = iq.mixed_norm_check(iq.EULER_COEFFS, Z + [Z[0]], 1.5, "forward")
    assert r.verdict is iq.Verdict.HOLDS


def test_mixed_isometry_p2_equality():
    Z = list(sample_tuple(3, 3, 8).matrices)
    for d in iq.Direction:
        r = iq.mixed_norm_check(iq.EULER_COEFFS.conj().T, Z, 2.0, d)
        assert r.verdict is iq.Verdict.EQUALITY


# --- singular value inequalities


def test_weyl_on_shift():
    at3 = {(r.extra["j"], r.extra["k"]): r for r in iq.weyl_singular_sweep(SHIFT3, 3.0)}
    assert at3[(2, 0)].verdict is iq.Verdict.VIOLATED and not at3[(2, 0)].guaranteed
    assert at3[(0, 2)].verdict is iq.Verdict.VIOLATED
    assert not at3[(2, 0)].unexpected_violation
    assert math.isclose(at3[(2, 0)].lhs, 2 ** (-1 / 3), rel_tol=1e-12)
    at2 = iq.weyl_singular_sweep(SHIFT3, 2.0)
    assert all(r.verdict is not iq.Verdict.VIOLATED and r.guaranteed for r in at2)
    single = iq.weyl_singular_checks(SHIFT3, 3.0, 2, 0)
    assert single.lhs == at3[(2, 0)].lhs and single.rhs == at3[(2, 0)].rhs
    with pytest.raises(ParameterError):
        iq.weyl_singular_checks(SHIFT3, 3.0, 2, 1)


@pytest.mark.parametrize("seed", range(5))
def test_euler_weyl_and_norms_hold(seed):
    A, B, C = triple(4, seed)
    reports = iq.euler_weyl_sweep(A, B, C) + iq.euler_norm_checks(A, B, C)
    assert len([r for r in reports if r.name == "euler_weyl"]) == 20
    assert all(r.verdict is not iq.Verdict.VIOLATED for r in reports)


def test_euler_modulus_svals():
    A, B, C = triple(3, 9)
    s = iq.euler_modulus_svals(A, B, C)
    w = np.sqrt(np.clip(np.linalg.eigvalsh(iq_euler_sum(A, B, C))[::-1], 0, None))
    assert np.allclose(s, w, atol=1e-10)


def iq_euler_sum(A, B, C):
    return sum(Y.conj().T @ Y for Y in iq.euler_pieces(A, B, C)[0])


def test_kyfan():
    A, B, C = triple(3, 10)
    reports = iq.kyfan_checks(A, B, C, [0.5, 2.0, 3.0])
    assert all(r.verdict is not iq.Verdict.VIOLATED for r in reports)
    full = [r for r in reports if r.name.startswith("kyfan_") and r.extra["m"] == 3]
    assert len(full) == 2 and all(r.verdict is iq.Verdict.EQUALITY for r in full)
    at2 = [r for r in reports if r.name == "clarkson_kyfan" and r.p == 2.0]
    assert all(r.verdict is iq.Verdict.EQUALITY for r in at2)
    single = [r for r in iq.kyfan_checks(A, B, C, 3.0) if r.name == "clarkson_kyfan"]
    multi = [r for r in reports if r.name == "clarkson_kyfan" and r.p == 3.0]
    assert all(math.isclose(a.lhs, b.lhs, rel_tol=1e-12) for a, b in zip(single, multi))


def test_clarkson_kyfan_against_abs_power():
    A, B, C = triple(3, 11)
    p = 3.0
    ys, xs = iq.euler_pieces(A, B, C)
    pair = sum(mc.abs_power(X, p) for X in xs)
    top = np.linalg.eigvalsh(pair)[::-1]
    reps = [r for r in iq.kyfan_checks(A, B, C, p) if r.name == "clarkson_kyfan"]
    for m, r in enumerate(reps, 1):
        assert math.isclose(r.lhs, top[:m].sum(), rel_tol=1e-12)


# --- conjecture explorer


def test_conjectured_constant():
    assert iq.conjectured_constant(3.0) == 1.25
    assert iq.conjectured_constant(2.0) == 1.0
    assert math.isclose(iq.conjectured_constant(4.0), 28 / 16)


@pytest.mark.parametrize("p", [1.5, 2.5, 3.0, 4.0])
def test_equal_case_attains_constant(p):
    A = triple(2, 12)[0]
    assert abs(iq.euler_ratio(A, A, A, p) - iq.conjectured_constant(p)) <= 1e-12


def test_euler_ratio_zero_denominator():
    Z = np.zeros((2, 2))
    assert math.isnan(iq.euler_ratio(Z, Z, Z, 3.0))


def test_hill_climb_does_not_get_worse():
    t = triple(2, 13)
    start = iq.euler_ratio(*t, 3.0)
    best, mats = iq.hill_climb(t, 3.0, "max", steps=5)
    assert best >= start
    assert math.isclose(best, iq.euler_ratio(*mats, 3.0), rel_tol=1e-14)


def test_explore_small():
    s = iq.conjecture_explore(3.0, 200, seed=1)
    assert not s.violation_found
    assert s.best <= s.constant + 1e-9
    assert s.climbed_best >= s.sampled_best
    assert "evidence-grade" in s.to_dict()["grade"]
    s2 = iq.conjecture_explore(2.0, 50, seed=1, hill_steps=0)
    assert abs(s2.best - 1.0) < 1e-12


def test_reversed_direction_fails_below_one_with_scalars():
    # C = 0 makes the ratio exactly 1, while the constant exceeds 1 for p < 1
    one, zero = np.ones((1, 1)), np.zeros((1, 1))
    assert iq.euler_ratio(one, one, zero, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert iq.conjectured_constant(0.5) > 1.1
    assert iq.conjecture_explore(0.5, 2000, seed=7, hill_steps=0).violation_found


def test_explore_flags_matrix_violation_at_p_1_5():
    p = 1.5
    s = iq.conjecture_explore(p, 2000, seed=7, hill_steps=0)
    assert s.objective == "min" and s.violation_found
    A, B, C = sample_tuple(3, 2, 7, s.sampled_best_trial).matrices

    def pp(X):
        return float(np.sum(np.linalg.svd(X, compute_uv=False) ** p))

    oracle = (pp(A + B + C) + pp(A) + pp(B) + pp(C)) / (pp(A + B) + pp(B + C) + pp(C + A))
    assert oracle == pytest.approx(s.sampled_best, rel=1e-12)
    assert oracle < iq.conjectured_constant(p) - 1e-3


def test_explore_ensembles():
    for ens in Ensemble:
        s = iq.conjecture_explore(3.0, 50, ens, seed=2, hill_steps=2)
        assert not s.violation_found
