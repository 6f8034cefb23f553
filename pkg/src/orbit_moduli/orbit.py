"""Explicit isometry and unitary witnesses for orbit identities and dominations.

Every constructor returns an :class:`OrbitCertificate`: a target psd matrix
together with terms ``(W_i, X_i, w_i)`` such that either

* ``target == sum_i w_i W_i X_i W_i^*`` (``Relation.EQUALITY``), or
* ``target <= sum_i w_i W_i X_i W_i^*`` in the psd order (``Relation.DOMINATION``).

Certificates carry the residual measured at construction time, but
:func:`verify_certificate` never trusts it and recomputes everything.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import matcore as mc
from .errors import DimensionError, NotPSDError, PreconditionError
from .matcore import DEFAULT_TOL, Tolerances, adjoint, as_cmat


class Relation(str, enum.Enum):
    EQUALITY = "equality"
    DOMINATION = "domination"


def _frozen(X) -> np.ndarray:
    arr = np.array(X, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OrbitTerm:
    witness: np.ndarray
    operand: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "witness", _frozen(self.witness))
        object.__setattr__(self, "operand", _frozen(self.operand))
        object.__setattr__(self, "weight", float(self.weight))
        if self.witness.shape[1] != self.operand.shape[0]:
            raise DimensionError("operand size must equal the witness column count")
        if not self.weight > 0:
            raise PreconditionError("term weights must be positive")

    def conjugated(self) -> np.ndarray:
        W = self.witness
        return self.weight * (W @ self.operand @ adjoint(W))


@dataclass(frozen=True)
class OrbitCertificate:
    target: np.ndarray
    terms: tuple[OrbitTerm, ...]
    relation: Relation
    residual: float = field(default=math.nan)
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "target", _frozen(self.target))
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "relation", Relation(self.relation))
        if math.isnan(self.residual):
            object.__setattr__(self, "residual", certificate_residual(self))

    def orbit_sum(self) -> np.ndarray:
        total = np.zeros_like(self.target)
        for term in self.terms:
            total = total + term.conjugated()
        return total

    def scale(self) -> float:
        return max(1.0, mc.herm_opnorm(np.asarray(self.target)))


def certificate_residual(cert: OrbitCertificate) -> float:
    diff = cert.orbit_sum() - cert.target
    if cert.relation is Relation.EQUALITY:
        return mc.herm_opnorm(diff)
    return max(0.0, -mc.lambda_min(diff))


def _domination_scale(cert: OrbitCertificate) -> float:
    return max(cert.scale(), mc.herm_opnorm(cert.orbit_sum()))


@dataclass
class CertificateReport:
    label: str
    relation: Relation
    residual: float
    scale: float
    max_isometry_defect: float
    passed: bool
    failures: list[str]


def verify_certificate(cert: OrbitCertificate, tol: Tolerances = DEFAULT_TOL) -> CertificateReport:
    """Recompute witness defects, operand positivity and the residual."""
    failures: list[str] = []
    target = np.asarray(cert.target)
    for k, term in enumerate(cert.terms):
        if term.witness.shape[0] != target.shape[0]:
            failures.append(f"term {k}: witness has {term.witness.shape[0]} rows, "
                            f"target is {target.shape[0]}")
    if failures:
        return CertificateReport(cert.label, cert.relation, math.inf, cert.scale(), math.inf, False, failures)
    max_defect = 0.0
    for k, term in enumerate(cert.terms):
        W = np.asarray(term.witness)
        defect = mc.isometry_defect(W)
        max_defect = max(max_defect, defect)
        if defect > tol.isometry_defect:
            failures.append(f"term {k}: isometry defect {defect:.3e}")
        X = np.asarray(term.operand)
        herm_defect = float(np.linalg.norm(X - adjoint(X)))
        xscale = max(1.0, float(np.linalg.norm(X)))
        if herm_defect > tol.recon * xscale:
            failures.append(f"term {k}: operand is not Hermitian")
        elif mc.lambda_min(X) < -tol.psd_slack * xscale:
            failures.append(f"term {k}: operand is not psd")
    residual = certificate_residual(cert)
    if cert.relation is Relation.EQUALITY:
        scale = cert.scale()
        if residual > tol.recon * scale:
            failures.append(f"equality residual {residual:.3e} exceeds {tol.recon * scale:.3e}")
    else:
        scale = _domination_scale(cert)
        if residual > tol.psd_slack * scale:
            failures.append(f"domination defect {residual:.3e} exceeds {tol.psd_slack * scale:.3e}")
    return CertificateReport(cert.label, cert.relation, residual, scale, max_defect, not failures, failures)


# ---------------------------------------------------------------------------
# polar decomposition with a clean support cut


def polar_support(X, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Partial isometry ``W`` and ``|X|`` with ``X = W|X|``.

    ``W^*W`` is exactly the support projection of ``|X|``: singular values at
    or below the rank cutoff are treated as zero.
    """
    X = as_cmat(X, "X")
    sd = mc.svd(X, tol)
    r = mc.numerical_rank(sd.values, X.shape, tol)
    U = sd.left[:, :r]
    R = sd.right[:, :r]
    W = U @ adjoint(R)
    full_R = sd.right
    absX = (full_R * sd.values) @ adjoint(full_R)
    absX = (absX + adjoint(absX)) / 2
    if r == 0:
        W = np.zeros_like(X)
    return W, absX


def support_projection(H, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    sd = mc.herm_eig(H, tol)
    w = np.clip(sd.values, 0.0, None)
    r = mc.numerical_rank(w, sd.left.shape, tol)
    L = sd.left[:, :r]
    return L @ adjoint(L)


def _check_projection(P: np.ndarray, tol: Tolerances):
    scale = max(1.0, float(np.linalg.norm(P)))
    if np.linalg.norm(P @ P - P) > 1e3 * tol.isometry_defect * scale:
        raise PreconditionError("U^*U is not a projection; U is not a partial isometry")


def extend_partial_isometry(U, rows: int | None = None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Extend a partial isometry to an isometry agreeing with it on its initial space.

    An orthonormal basis of ``ker(U^*U)`` is sent to orthonormal vectors
    orthogonal to ``ran(U)``; those come from pivoted Gram-Schmidt.
    """
    U = as_cmat(U, "U")
    m, n = U.shape
    if rows is not None and rows != m:
        raise DimensionError(f"U has {m} rows, expected {rows}")
    if m < n:
        raise DimensionError(f"cannot extend a {m}x{n} partial isometry to an isometry")
    P = adjoint(U) @ U
    P = (P + adjoint(P)) / 2
    _check_projection(P, tol)
    sd = mc.herm_eig(P, tol)
    d = int(np.count_nonzero(sd.values > 0.5))
    if d == n:
        return U.copy()
    init = sd.left[:, :d]        # basis of the initial space
    kernel = sd.left[:, d:]      # basis of ker(U^*U)
    range_basis = U @ init         # orthonormal basis of ran(U)
    fresh = mc.orthonormal_complement(range_basis, m, n - d)
    return U + fresh @ adjoint(kernel)


# ---------------------------------------------------------------------------
# isometry decompositions of psd block matrices


def isometry_decompose_psd(H, n: int, tol: Tolerances = DEFAULT_TOL) -> OrbitCertificate:
    """``H = sum_k V_k H_kk V_k^*`` with isometries ``V_k`` (size mn x n).

    Built from the block columns ``R_k`` of ``R = H^{1/2}``: the polar factor
    of ``R_k`` is a partial isometry, extended to an isometry ``V_k`` with
    ``V_k H_kk^{1/2} = R_k``.
    """
    H = as_cmat(H, "H")
    mc._require_hermitian(H, tol, "H")
    size = H.shape[0]
    if n <= 0 or size % n:
        raise DimensionError(f"size {size} is not divisible by block size {n}")
    m = size // n
    R = mc.psd_power(H, 0.5, tol)
    terms = []
    for k in range(m):
        Rk = R[:, k * n:(k + 1) * n]
        Uk, _ = polar_support(Rk, tol)
        Vk = extend_partial_isometry(Uk, tol=tol)
        Hkk = mc.block_extract(H, k, k, n)
        terms.append(OrbitTerm(Vk, (Hkk + adjoint(Hkk)) / 2, 1.0))
    return OrbitCertificate(H, terms, Relation.EQUALITY, label="isometry_decompose_psd")


def partitioned_pythagoras(T, n: int, tol: Tolerances = DEFAULT_TOL) -> OrbitCertificate:
    """``|T|^2 = sum_{i,j} W_ij |T_ij|^2 W_ij^*`` for an m x m block matrix.

    ``|T|^2`` is the sum over block rows of ``R_i^* R_i``, whose diagonal
    blocks are ``|T_ij|^2``; each summand is split by
    :func:`isometry_decompose_psd`. Terms are ordered row-major in (i, j).
    """
    T = as_cmat(T, "T")
    mc._require_square(T, "T")
    size = T.shape[0]
    if n <= 0 or size % n:
        raise DimensionError(f"size {size} is not divisible by block size {n}")
    m = size // n
    terms = []
    for i in range(m):
        Ri = T[i * n:(i + 1) * n, :]
        G = adjoint(Ri) @ Ri
        part = isometry_decompose_psd((G + adjoint(G)) / 2, n, tol)
        terms.extend(part.terms)
    target = adjoint(T) @ T
    return OrbitCertificate((target + adjoint(target)) / 2, terms, Relation.EQUALITY,
                            label="partitioned_pythagoras")


def _euler_pieces(A, B, C):
    A = as_cmat(A, "A")
    B = as_cmat(B, "B")
    C = as_cmat(C, "C")
    for M, name in ((A, "A"), (B, "B"), (C, "C")):
        mc._require_square(M, name)
    if not (A.shape == B.shape == C.shape):
        raise DimensionError("A, B, C must have the same size")
    return A, B, C


def _sq(X: np.ndarray) -> np.ndarray:
    G = adjoint(X) @ X
    return (G + adjoint(G)) / 2


# Hadamard matrix used for the 16-term Euler orbit: it maps the pairwise sums
# (A+B, B+C, C+A, 0) to (A+B+C, A, B, C).
HADAMARD4 = 0.5 * np.array(
    [[1, 1, 1, 1],
     [1, -1, 1, -1],
     [1, 1, -1, -1],
     [-1, 1, 1, -1]], dtype=float)

# coefficients of (A, B, C) in each pairwise sum A+B, B+C, C+A
_PAIR_COEFFS = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]], dtype=float)
_CLASS_VECTORS = {
    "A+B+C": np.array([1.0, 1.0, 1.0]),
    "A": np.array([1.0, 0.0, 0.0]),
    "B": np.array([0.0, 1.0, 0.0]),
    "C": np.array([0.0, 0.0, 1.0]),
}
EULER_CLASSES = ("A+B+C", "A", "B", "C")


def hadamard_block_classes() -> list[list[str]]:
    """Operand class of each block of ``(H x I) diag(A+B, B+C, C+A, 0) (H x I)^*``.

    Block (i, j) equals ``sum_k H_ik H_jk Delta_k``; its coefficient vector on
    (A, B, C) is classified up to sign. Done symbolically so coincidences
    among the numeric matrices cannot confuse the grouping.
    """
    classes = []
    for i in range(4):
        row = []
        for j in range(4):
            coeff = (HADAMARD4[i, :3] * HADAMARD4[j, :3]) @ _PAIR_COEFFS
            match = None
            for name, vec in _CLASS_VECTORS.items():
                if np.allclose(coeff, 0.5 * vec) or np.allclose(coeff, -0.5 * vec):
                    match = name
            if match is None:
                raise AssertionError(f"unexpected block coefficient {coeff}")
            row.append(match)
        classes.append(row)
    return classes


def euler_hadamard_orbit(A, B, C, tol: Tolerances = DEFAULT_TOL) -> OrbitCertificate:
    """Sixteen-term isometry orbit identity for the Euler configuration.

    Target ``|A+B|^2 + |B+C|^2 + |C+A|^2 + 0`` as a 4n direct sum; terms carry
    the operands ``|A+B+C|^2, |A|^2, |B|^2, |C|^2`` (four each) with weight 1/4,
    grouped in that order.
    """
    A, B, C = _euler_pieces(A, B, C)
    n = A.shape[0]
    Z = np.zeros_like(A)
    delta = mc.direct_sum([A + B, B + C, C + A, Z])
    Ucal = mc.kron(HADAMARD4, np.eye(n))
    T = Ucal @ delta @ adjoint(Ucal)
    pyth = partitioned_pythagoras(T, n, tol)
    classes = hadamard_block_classes()
    operands = {"A+B+C": _sq(A + B + C), "A": _sq(A), "B": _sq(B), "C": _sq(C)}
    grouped: dict[str, list[OrbitTerm]] = {name: [] for name in EULER_CLASSES}
    for idx, term in enumerate(pyth.terms):
        i, j = divmod(idx, 4)
        name = classes[i][j]
        grouped[name].append(OrbitTerm(adjoint(Ucal) @ term.witness, operands[name], 0.25))
    terms = [t for name in EULER_CLASSES for t in grouped[name]]
    target = mc.direct_sum([_sq(A + B), _sq(B + C), _sq(C + A), np.zeros((n, n))])
    return OrbitCertificate(target, terms, Relation.EQUALITY, label="euler_hadamard_orbit")


def euler_sum(A, B, C) -> np.ndarray:
    """``|A+B+C|^2 + |A|^2 + |B|^2 + |C|^2``."""
    A, B, C = _euler_pieces(A, B, C)
    return _sq(A + B + C) + _sq(A) + _sq(B) + _sq(C)


def pairwise_sum(A, B, C) -> np.ndarray:
    """``|A+B|^2 + |B+C|^2 + |C+A|^2``."""
    A, B, C = _euler_pieces(A, B, C)
    return _sq(A + B) + _sq(B + C) + _sq(C + A)


def _fourier_orbit(blocks: list[np.ndarray], operand: np.ndarray, label: str,
                   tol: Tolerances) -> OrbitCertificate:
    m = len(blocks)
    n = blocks[0].shape[0]
    D = mc.direct_sum(blocks)
    F = mc.kron(mc.fourier_matrix(m), np.eye(n))
    H = F @ D @ adjoint(F)
    H = (H + adjoint(H)) / 2
    dec = isometry_decompose_psd(H, n, tol)
    terms = [OrbitTerm(adjoint(F) @ t.witness, operand, 1.0 / m) for t in dec.terms]
    return OrbitCertificate(D, terms, Relation.EQUALITY, label=label)


def euler_fourier3_orbit(A, B, C, tol: Tolerances = DEFAULT_TOL) -> OrbitCertificate:
    """``|A+B|^2 + |B+C|^2 + |A+C|^2`` (direct sum) as three orbits of the Euler sum / 3."""
    A, B, C = _euler_pieces(A, B, C)
    return _fourier_orbit([_sq(A + B), _sq(B + C), _sq(A + C)], euler_sum(A, B, C),
                          "euler_fourier3_orbit", tol)


def euler_fourier4_orbit(A, B, C, tol: Tolerances = DEFAULT_TOL) -> OrbitCertificate:
    """``|A+B+C|^2 + |A|^2 + |B|^2 + |C|^2`` (direct sum) as four orbits of the pairwise sum / 4."""
    A, B, C = _euler_pieces(A, B, C)
    return _fourier_orbit([_sq(A + B + C), _sq(A), _sq(B), _sq(C)], pairwise_sum(A, B, C),
                          "euler_fourier4_orbit", tol)


# ---------------------------------------------------------------------------
# unitary-orbit dominations


def fan_hoffman_orbit(X, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Unitary ``U`` with ``Re X <= U |X| U^*``.

    Aligns the eigenbasis of ``Re X`` (values nonincreasing) with the right
    singular basis of ``X``; the claim is the eigenvalue bound
    ``lambda_k(Re X) <= s_k(X)``.
    """
    X = as_cmat(X, "X")
    mc._require_square(X, "X")
    S = mc.herm_eig(mc.re_part(X), tol).left
    T = mc.svd(X, tol).right
    return S @ adjoint(T)


def _thompson(A: np.ndarray, B: np.ndarray, tol: Tolerances, label: str) -> OrbitCertificate:
    W, absAB = polar_support(A + B, tol)
    WA = adjoint(W) @ A
    WB = adjoint(W) @ B
    U = fan_hoffman_orbit(WA, tol)
    V = fan_hoffman_orbit(WB, tol)
    terms = [OrbitTerm(U, mc.abs_modulus(A, tol)), OrbitTerm(V, mc.abs_modulus(B, tol))]
    return OrbitCertificate(absAB, terms, Relation.DOMINATION, label=label)


def thompson_rect(A, B, tol: Tolerances = DEFAULT_TOL) -> OrbitCertificate:
    """``|A+B| <= U|A|U^* + V|B|V^*`` for equal-shape rectangular ``A, B``."""
    A = as_cmat(A, "A")
    B = as_cmat(B, "B")
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch {A.shape} vs {B.shape}")
    return _thompson(A, B, tol, "thompson_rect")


def thompson_square(A, B, tol: Tolerances = DEFAULT_TOL) -> OrbitCertificate:
    A = as_cmat(A, "A")
    B = as_cmat(B, "B")
    mc._require_square(A, "A")
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch {A.shape} vs {B.shape}")
    return _thompson(A, B, tol, "thompson_square")


def stack_adjoint(Z) -> np.ndarray:
    """The column stack ``(Z; Z^*)``, whose modulus is ``sqrt(2) |Z|_qsym``."""
    Z = as_cmat(Z, "Z")
    mc._require_square(Z, "Z")
    return np.vstack([Z, adjoint(Z)])


def qsym_thompson(X, Y, tol: Tolerances = DEFAULT_TOL) -> OrbitCertificate:
    """``|X+Y|_qsym <= U|X|_qsym U^* + V|Y|_qsym V^*``."""
    X = as_cmat(X, "X")
    Y = as_cmat(Y, "Y")
    mc._require_square(X, "X")
    if X.shape != Y.shape:
        raise DimensionError(f"shape mismatch {X.shape} vs {Y.shape}")
    rect = thompson_rect(stack_adjoint(X), stack_adjoint(Y), tol)
    U, V = rect.terms[0].witness, rect.terms[1].witness
    terms = [OrbitTerm(U, mc.qsym_modulus(X, tol)), OrbitTerm(V, mc.qsym_modulus(Y, tol))]
    return OrbitCertificate(mc.qsym_modulus(X + Y, tol), terms, Relation.DOMINATION,
                            label="qsym_thompson")


def _require_psd(H: np.ndarray, tol: Tolerances, name: str):
    mc._require_hermitian(H, tol, name)
    scale = max(1.0, mc.herm_opnorm(H))
    if mc.lambda_min(H) < -tol.psd_slack * scale:
        raise NotPSDError(f"{name} is not psd")


def sqrt_two_orbit(H, K, tol: Tolerances = DEFAULT_TOL) -> OrbitCertificate:
    """``sqrt(H+K) <= U sqrt(H) U^* + V sqrt(K) V^*`` for psd ``H, K``.

    Rectangular Thompson applied to the stacks ``(H^{1/2}; 0)`` and
    ``(0; K^{1/2})``, whose sum has modulus ``sqrt(H+K)``. The target is taken
    as that modulus so that no second square root of ``H+K`` is needed.
    """
    H = as_cmat(H, "H")
    K = as_cmat(K, "K")
    if H.shape != K.shape:
        raise DimensionError(f"shape mismatch {H.shape} vs {K.shape}")
    _require_psd(H, tol, "H")
    _require_psd(K, tol, "K")
    rH = mc.psd_power(H, 0.5, tol)
    rK = mc.psd_power(K, 0.5, tol)
    Z = np.zeros_like(rH)
    rect = thompson_rect(np.vstack([rH, Z]), np.vstack([Z, rK]), tol)
    U, V = rect.terms[0].witness, rect.terms[1].witness
    return OrbitCertificate(rect.target, [OrbitTerm(U, rH), OrbitTerm(V, rK)], Relation.DOMINATION,
                            label="sqrt_two_orbit")


def euler_modulus_orbit(A, B, C, tol: Tolerances = DEFAULT_TOL) -> OrbitCertificate:
    """``sqrt(Euler sum) <= U|A+B|U^* + V|B+C|V^* + W|C+A|W^*``.

    Two rounds of the square-root splitting: first ``|A+B|^2`` against
    ``K = |B+C|^2 + |C+A|^2``, then ``K`` itself; the second pair of unitaries
    is absorbed into the first round's ``V``. Every square root is realized as
    the modulus of a column stack (for instance ``sqrt(K) = |(B+C; C+A)|``),
    which keeps rank-deficient inputs accurate.
    """
    A, B, C = _euler_pieces(A, B, C)
    n = A.shape[0]
    Z = np.zeros((n, n), dtype=np.complex128)
    outer = thompson_rect(np.vstack([A + B, Z, Z]), np.vstack([Z, B + C, C + A]), tol)
    inner = thompson_rect(np.vstack([B + C, Z]), np.vstack([Z, C + A]), tol)
    U1 = outer.terms[0].witness
    V1 = outer.terms[1].witness
    U2 = V1 @ inner.terms[0].witness
    U3 = V1 @ inner.terms[1].witness
    terms = [OrbitTerm(U1, mc.abs_modulus(A + B, tol)),
             OrbitTerm(U2, mc.abs_modulus(B + C, tol)),
             OrbitTerm(U3, mc.abs_modulus(C + A, tol))]
    target = mc.abs_modulus(np.vstack([A + B + C, A, B, C]), tol)
    return OrbitCertificate(target, terms, Relation.DOMINATION, label="euler_modulus_orbit")
