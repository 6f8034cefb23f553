import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from orbit_moduli import matcore as mc
from orbit_moduli.errors import DimensionError, NotPSDError, ParameterError, SymmetryError
from orbit_moduli.sampling import ginibre, trial_rng

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def cmats(draw, max_n=5, square=True):
    n = draw(st.integers(1, max_n))
    m = n if square else draw(st.integers(1, max_n))
    re = draw(arrays(float, (m, n), elements=finite))
    im = draw(arrays(float, (m, n), elements=finite))
    return re + 1j * im


def rand(n, m=None, seed=0):
    return ginibre(trial_rng(seed, 0), n, m)


def herm(n, seed=0):
    G = rand(n, seed=seed)
    return (G + G.conj().T) / 2


# --- eigensolvers: LAPACK against the cyclic Jacobi oracle


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_jacobi_matches_lapack(n):
    H = herm(n, seed=n)
    a = mc.herm_eig(H)
    b = mc.herm_eig(H, method="jacobi")
    assert np.allclose(a.values, b.values, atol=1e-12 * max(1, abs(a.values).max()))
    for sd in (a, b):
        V = sd.left
        assert np.allclose(V @ np.diag(sd.values) @ V.conj().T, H, atol=1e-12)
        assert mc.isometry_defect(V) < 1e-12
        assert np.all(np.diff(sd.values) <= 0)


def test_eig_known_spectrum():
    # Hermitian part of the 3x3 shift has eigenvalues 0, +-1/sqrt(2)
    S = np.diag([1.0, 1.0], -1)
    w = mc.herm_eig(mc.hermitian_part(S)).values
    assert np.allclose(w, [2**-0.5, 0, -(2**-0.5)], atol=1e-15)


def test_phase_normalization():
    V = mc.herm_eig(herm(4, seed=2)).left
    for k in range(4):
        idx = int(np.argmax(np.abs(V[:, k])))
        assert abs(V[idx, k].imag) < 1e-15 and V[idx, k].real > 0
    W, phases = mc.normalize_phases(V * np.exp(0.7j))
    assert np.allclose(W, V)
    assert np.allclose(np.abs(phases), 1)


def test_nonhermitian_rejected():
    with pytest.raises(SymmetryError):
        mc.herm_eig(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ParameterError):
        mc.herm_eig(np.eye(2), method="qr")


# --- SVD: LAPACK against the Gram route


@pytest.mark.parametrize("shape", [(1, 1), (3, 3), (5, 2), (2, 5), (4, 4)])
def test_svd_matches_gram_route(shape):
    X = rand(*shape, seed=sum(shape))
    a = mc.svd(X)
    b = mc.svd(X, method="jacobi")
    assert np.allclose(a.values, b.values, atol=1e-10)
    for sd in (a, b):
        k = min(shape)
        assert sd.left.shape == (shape[0], k) and sd.right.shape == (shape[1], k)
        assert np.allclose((sd.left * sd.values) @ sd.right.conj().T, X, atol=1e-10)
        assert mc.isometry_defect(sd.left) < 1e-10
        assert mc.isometry_defect(sd.right) < 1e-10


def test_svd_rank_deficient_gram_route_completes_basis():
    u = rand(4, 1, seed=3)
    v = rand(3, 1, seed=4)
    X = u @ v.conj().T
    sd = mc.svd(X, method="jacobi")
    # the Gram route only resolves zero singular values to about sqrt(eps)
    assert sd.values[1] < 1e-7
    assert mc.numerical_rank(mc.svd(X).values, X.shape) == 1
    assert mc.isometry_defect(sd.left) < 1e-12
    assert np.allclose((sd.left * sd.values) @ sd.right.conj().T, X, atol=1e-10)


def test_numerical_rank():
    assert mc.numerical_rank(np.array([1.0, 1e-20]), (2, 2)) == 1
    assert mc.numerical_rank(np.array([0.0, 0.0]), (2, 2)) == 0
    assert mc.numerical_rank(np.array([3.0, 2.0, 1.0]), (3, 3)) == 3


# --- functional calculus


def test_psd_power_scalar_and_diagonal():
    assert np.allclose(mc.psd_power(np.array([[4.0]]), 0.5), [[2.0]])
    D = np.diag([9.0, 4.0, 0.0])
    assert np.allclose(mc.psd_power(D, 0.5), np.diag([3.0, 2.0, 0.0]))
    assert np.allclose(mc.psd_power(D, 1.5), np.diag([27.0, 8.0, 0.0]))


def test_psd_power_rejects_indefinite():
    with pytest.raises(NotPSDError):
        mc.psd_power(np.diag([1.0, -1.0]), 0.5)


@pytest.mark.parametrize("r", [0.25, 0.5, 1.0, 2.0, 3.3])
def test_psd_power_against_jacobi(r):
    G = rand(4, seed=7)
    H = G.conj().T @ G
    a = mc.psd_power(H, r)
    b = mc.psd_power(H, r, method="jacobi")
    assert np.allclose(a, b, atol=1e-10 * max(1.0, np.linalg.norm(a)))


def test_power_semigroup():
    G = rand(3, seed=8)
    H = G.conj().T @ G
    half = mc.psd_power(H, 0.5)
    assert np.allclose(half @ half, H, atol=1e-12 * np.linalg.norm(H))


def test_abs_modulus_and_power():
    X = rand(5, 3, seed=9)
    A = mc.abs_modulus(X)
    assert np.allclose(A @ A, X.conj().T @ X, atol=1e-12)
    assert np.allclose(mc.abs_power(X, 2.0), X.conj().T @ X, atol=1e-12)
    assert np.allclose(mc.abs_power(X, 1.0), A, atol=1e-12)


def test_moduli_on_shift():
    S = np.diag([1.0, 1.0], -1)
    assert np.allclose(mc.abs_modulus(S), np.diag([1, 1, 0]))
    assert np.allclose(mc.abs_modulus(S.T), np.diag([0, 1, 1]))
    assert np.allclose(mc.sym_modulus(S), np.diag([0.5, 1, 0.5]))
    assert np.allclose(mc.qsym_modulus(S), np.diag([2**-0.5, 1, 2**-0.5]))
    for p in (1.5, 3.0, 10.0):
        assert np.allclose(mc.qsym_power(S, p), np.diag([2 ** (-1 / p), 1, 2 ** (-1 / p)]), atol=1e-13)


def test_qsym_modulus_matches_definition():
    Z = rand(4, seed=10)
    direct = mc.psd_power((Z.conj().T @ Z + Z @ Z.conj().T) / 2, 0.5)
    assert np.allclose(mc.qsym_modulus(Z), direct, atol=1e-12)
    assert np.allclose(mc.qsym_power(Z, 2.0), direct, atol=1e-12)


# --- norms


@settings(max_examples=60, deadline=None)
@given(cmats(square=False), st.sampled_from([0.5, 1.0, 1.5, 2.0, 3.0]))
def test_schatten_norm_against_dilation(X, p):
    # the Hermitian dilation [[0, X], [X^*, 0]] has eigenvalues +-mu_k(X); Jacobi resolves
    # them to eps * ||X||, unlike the Gram route, which squares them first
    m, n = X.shape
    D = np.block([[np.zeros((m, m)), X], [X.conj().T, np.zeros((n, n))]])
    w = mc.jacobi_eigh(D)[0]
    s = np.sort(w)[::-1][:min(m, n)]
    s = s[s > 1e-12 * max(m, n) * max(s[0], 0.0)]
    expected = float(np.sum(s**p))
    assert math.isclose(mc.schatten_power_sum(X, p), expected, rel_tol=1e-9, abs_tol=1e-9)
    assert math.isclose(mc.schatten_norm(X, p) ** p, expected, rel_tol=1e-9, abs_tol=1e-9)


def test_schatten_special_cases():
    X = rand(3, 4, seed=11)
    assert math.isclose(mc.schatten_norm(X, 2), np.linalg.norm(X), rel_tol=1e-13)
    assert math.isclose(mc.schatten_norm(X, math.inf), mc.opnorm(X), rel_tol=1e-13)
    assert math.isclose(mc.kyfan_norm(X, 1), mc.opnorm(X), rel_tol=1e-13)
    assert math.isclose(mc.kyfan_norm(X, 3), mc.schatten_norm(X, 1), rel_tol=1e-13)
    assert mc.kyfan_norm(X, 9) == mc.kyfan_norm(X, 3)
    with pytest.raises(ParameterError):
        mc.schatten_norm(X, 0)


def test_lp_norm_scaling_avoids_overflow():
    v = np.array([1e200, 1e200])
    assert math.isclose(mc.lp_norm(v, 2), math.sqrt(2) * 1e200, rel_tol=1e-14)
    assert mc.lp_norm(np.zeros(3), 0.5) == 0.0


@settings(max_examples=40, deadline=None)
@given(cmats(), cmats())
def test_triangle_inequality_for_norms(X, Y):
    if X.shape != Y.shape:
        return
    for p in (1.0, 2.0, 4.0):
        assert mc.schatten_norm(X + Y, p) <= mc.schatten_norm(X, p) + mc.schatten_norm(Y, p) + 1e-9


# --- psd order and block plumbing


def test_psd_leq():
    assert mc.psd_leq(np.eye(2), 2 * np.eye(2)) == (True, 1.0)
    c = mc.psd_leq(9 * np.diag([1.0, 0, 0]), 4 * np.eye(3))
    assert not c.holds and math.isclose(c.margin, -5.0)
    with pytest.raises(DimensionError):
        mc.psd_leq(np.eye(2), np.eye(3))


def test_blocks():
    A, B = rand(2, seed=1), rand(2, seed=2)
    M = mc.block_compose([[A, B], [B, A]])
    assert np.array_equal(mc.block_extract(M, 0, 1, 2), B)
    D = mc.direct_sum([A, B])
    assert np.array_equal(mc.block_extract(D, 1, 1, 2), B)
    assert not mc.block_extract(D, 0, 1, 2).any()
    with pytest.raises(DimensionError):
        mc.block_compose([[A, B], [A]])
    with pytest.raises(DimensionError):
        mc.block_extract(M, 2, 0, 2)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 6])
def test_fourier_is_unitary(m):
    F = mc.fourier_matrix(m)
    assert mc.isometry_defect(F) < 1e-14
    assert np.allclose(np.abs(F), 1 / math.sqrt(m))


def test_orthonormal_complement():
    Q = np.linalg.qr(rand(5, 2, seed=3))[0]
    C = mc.orthonormal_complement(Q, 5, 3)
    full = np.hstack([Q, C])
    assert mc.isometry_defect(full) < 1e-12


def test_input_validation():
    with pytest.raises(ParameterError):
        mc.as_cmat([[np.nan]])
    with pytest.raises(DimensionError):
        mc.as_cmat(np.zeros((2, 2, 2)))
    with pytest.raises(ParameterError):
        mc.Tolerances(psd_slack=-1)
    assert mc.as_cmat(3.0).shape == (1, 1)
