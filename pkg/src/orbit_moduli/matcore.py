"""Dense complex linear algebra at desk sizes.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` with two axes.
Every public routine validates its input through :func:`as_cmat`, so callers
may pass nested lists, real arrays or anything ``numpy.asarray`` accepts.

Two eigensolver back ends are available. ``method="lapack"`` (the default)
delegates to ``numpy.linalg``; ``method="jacobi"`` runs the cyclic complex
Jacobi iteration implemented here and is the independent cross-check used by
the test suite. Both return bases in the same phase convention: every column
is scaled so that its first entry of largest modulus is real and positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, NotPSDError, ParameterError, SymmetryError


@dataclass(frozen=True)
class Tolerances:
    """Global numeric policy.

    psd_slack
        Relative slack allowed on the negative side of a psd test.
    isometry_defect
        Largest accepted ``||W^*W - I||`` for a witness.
    recon
        Relative reconstruction / Hermiticity tolerance.
    rank_rel
        Singular value ``s_k`` counts as nonzero iff
        ``s_k > rank_rel * s_1 * max(rows, cols)``.
    """

    psd_slack: float = 1e-9
    isometry_defect: float = 1e-10
    recon: float = 1e-9
    rank_rel: float = 1e-12

    def __post_init__(self):
        for name in ("psd_slack", "isometry_defect", "recon", "rank_rel"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ParameterError(f"tolerance {name} must be finite and >= 0, got {value!r}")


DEFAULT_TOL = Tolerances()
_GRAM_RANK_REL = 1e-7


@dataclass(frozen=True)
class SpectralData:
    """Nonincreasing spectrum with its diagonalizing factors.

    For a Hermitian input ``right`` is ``None`` and
    ``H = left @ diag(values) @ left^*``; for an SVD
    ``X = left @ diag(values) @ right^*``.
    """

    values: np.ndarray
    left: np.ndarray
    right: np.ndarray | None = None


class Comparison(NamedTuple):
    holds: bool
    margin: float


# ---------------------------------------------------------------------------
# construction and small helpers


def as_cmat(X, name: str = "matrix") -> np.ndarray:
    """Return ``X`` as a fresh 2-D complex128 array, rejecting NaN/Inf."""
    arr = np.array(X, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError(f"{name} must have positive row and column counts")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} has non-finite entries")
    return arr


def adjoint(X: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(X, -1, -2))


def hermitian_part(X) -> np.ndarray:
    X = as_cmat(X)
    return (X + adjoint(X)) / 2


re_part = hermitian_part


def im_part(X) -> np.ndarray:
    X = as_cmat(X)
    return (X - adjoint(X)) / 2j


def opnorm(X) -> float:
    """Operator norm (largest singular value)."""
    return float(np.linalg.norm(as_cmat(X), 2))


def herm_opnorm(H: np.ndarray) -> float:
    """Operator norm of a matrix already known to be Hermitian."""
    w = np.linalg.eigvalsh((H + adjoint(H)) / 2)
    return float(max(abs(w[0]), abs(w[-1])))


def lambda_min(H) -> float:
    H = as_cmat(H)
    return float(np.linalg.eigvalsh((H + adjoint(H)) / 2)[0])


def _require_square(X: np.ndarray, name: str = "matrix"):
    if X.shape[0] != X.shape[1]:
        raise DimensionError(f"{name} must be square, got {X.shape}")


def _require_hermitian(H: np.ndarray, tol: Tolerances, name: str = "matrix"):
    _require_square(H, name)
    defect = np.linalg.norm(H - adjoint(H))
    scale = max(1.0, float(np.linalg.norm(H)))
    if defect > tol.recon * scale:
        raise SymmetryError(f"{name} is not Hermitian (defect {defect:.3e})")


def normalize_phases(basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale each column so its first entry of largest modulus is real positive.

    Returns the normalized basis and the unit phases ``w`` that were divided
    out, i.e. ``basis_out = basis_in / w``.
    """
    basis = np.array(basis, dtype=np.complex128)
    phases = np.ones(basis.shape[1], dtype=np.complex128)
    for k in range(basis.shape[1]):
        col = basis[:, k]
        idx = int(np.argmax(np.abs(col)))
        mag = abs(col[idx])
        if mag > 0:
            phases[k] = col[idx] / mag
    return basis / phases, phases


def orthonormal_complement(Q: np.ndarray | None, rows: int, count: int) -> np.ndarray:
    """``count`` orthonormal columns orthogonal to the columns of ``Q``.

    Modified Gram-Schmidt over the standard basis with column pivoting: at
    each step the candidate with the largest residual is taken, and a second
    projection pass is applied when the residual fell below one half.
    """
    out = np.zeros((rows, count), dtype=np.complex128)
    if count == 0:
        return out
    basis = np.zeros((rows, 0), dtype=np.complex128) if Q is None else np.array(Q, dtype=np.complex128)
    if basis.shape[1] + count > rows:
        raise DimensionError(
            f"cannot find {count} orthonormal columns orthogonal to {basis.shape[1]} in C^{rows}"
        )
    candidates = np.eye(rows, dtype=np.complex128)
    for k in range(count):
        resid = candidates - basis @ (adjoint(basis) @ candidates)
        norms = np.linalg.norm(resid, axis=0)
        j = int(np.argmax(norms))
        v = resid[:, j]
        if norms[j] < 0.5:
            v = v - basis @ (adjoint(basis) @ v)
        v = v / np.linalg.norm(v)
        out[:, k] = v
        basis = np.column_stack([basis, v])
    return out


# ---------------------------------------------------------------------------
# eigensolvers


def jacobi_eigh(H: np.ndarray, rel_tol: float = 1e-14, max_sweeps: int = 100):
    """Cyclic complex Jacobi iteration on a Hermitian matrix.

    Returns ``(values, vectors)`` unsorted, with ``H = V diag(values) V^*``.
    Converges when the off-diagonal Frobenius mass drops below
    ``rel_tol * ||H||_F``.
    """
    A = np.array(H, dtype=np.complex128)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    total = float(np.linalg.norm(A))
    if total == 0.0 or n == 1:
        return np.real(np.diag(A)).copy(), V
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off < rel_tol * total:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = A[p, q]
                mag = abs(g)
                # negligible entries are skipped; this also keeps subnormals out of g / mag
                if mag <= 1e-30 * total:
                    continue
                phase = g / mag
                app = A[p, p].real
                aqq = A[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                G = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ G
                A[idx, :] = adjoint(G) @ A[idx, :]
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                V[:, idx] = V[:, idx] @ G
    return np.real(np.diag(A)).copy(), V


def herm_eig(H, tol: Tolerances = DEFAULT_TOL, method: str = "lapack") -> SpectralData:
    """Eigendecomposition of a Hermitian matrix, values nonincreasing."""
    H = as_cmat(H, "H")
    _require_hermitian(H, tol, "H")
    Hs = (H + adjoint(H)) / 2
    if method == "lapack":
        w, V = np.linalg.eigh(Hs)
    elif method == "jacobi":
        w, V = jacobi_eigh(Hs)
    else:
        raise ParameterError(f"unknown eigensolver {method!r}")
    order = np.argsort(-w, kind="stable")
    w = np.asarray(w[order], dtype=float)
    V, _ = normalize_phases(V[:, order])
    return SpectralData(values=w, left=V)


def svd(X, tol: Tolerances = DEFAULT_TOL, method: str = "lapack") -> SpectralData:
    """Thin SVD of width ``min(rows, cols)``.

    ``method="jacobi"`` follows the Gram route: Jacobi on ``X^*X`` for the
    right factor, ``X R diag(1/s)`` for the left factor on the numerical
    support, and an orthonormal completion for the remaining columns. It
    loses about half the digits on small singular values, which is why the
    LAPACK route is the default.
    """
    X = as_cmat(X, "X")
    m, n = X.shape
    k = min(m, n)
    if method == "lapack":
        U, s, Vh = np.linalg.svd(X, full_matrices=False)
        R, phases = normalize_phases(adjoint(Vh))
        U = U / phases
        return SpectralData(values=np.asarray(s, dtype=float), left=U, right=R)
    if method != "jacobi":
        raise ParameterError(f"unknown SVD method {method!r}")
    gram = herm_eig(adjoint(X) @ X, tol, method="jacobi")
    s = np.sqrt(np.clip(gram.values[:k], 0.0, None))
    R = gram.left[:, :k]
    # squaring costs half the digits: a zero singular value comes back as ~sqrt(eps) * s_1
    r = numerical_rank(s, X.shape, Tolerances(rank_rel=max(tol.rank_rel, _GRAM_RANK_REL)))
    U = np.zeros((m, k), dtype=np.complex128)
    if r:
        U[:, :r] = (X @ R[:, :r]) / s[:r]
    if r < k:
        U[:, r:] = orthonormal_complement(U[:, :r], m, k - r)
        s = s.copy()
        s[r:] = 0.0
    return SpectralData(values=s, left=U, right=R)


def singular_values(X) -> np.ndarray:
    """Nonincreasing singular values (length ``min(rows, cols)``)."""
    return np.linalg.svd(as_cmat(X), compute_uv=False)


def numerical_rank(values: np.ndarray, shape: tuple[int, int], tol: Tolerances = DEFAULT_TOL) -> int:
    values = np.asarray(values, dtype=float)
    if values.size == 0 or values[0] <= 0:
        return 0
    cutoff = tol.rank_rel * values[0] * max(shape)
    return int(np.count_nonzero(values > cutoff))


# ---------------------------------------------------------------------------
# functional calculus and norms


def psd_power(H, r: float, tol: Tolerances = DEFAULT_TOL, method: str = "lapack") -> np.ndarray:
    """``H^r`` for psd ``H`` via the spectral theorem.

    Eigenvalues in ``[-psd_slack * scale, 0)`` are clamped to zero, anything
    more negative raises :class:`NotPSDError`.
    """
    if not (r > 0 and math.isfinite(r)):
        raise ParameterError(f"power must be positive and finite, got {r!r}")
    sd = herm_eig(H, tol, method=method)
    w = sd.values
    scale = max(1.0, abs(w[0]), abs(w[-1]))
    if w[-1] < -tol.psd_slack * scale:
        raise NotPSDError(f"matrix is not psd (lambda_min = {w[-1]:.3e})")
    w = np.clip(w, 0.0, None)
    L = sd.left
    out = (L * w**r) @ adjoint(L)
    return (out + adjoint(out)) / 2


def abs_modulus(X, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``|X| = (X^*X)^{1/2}``, a cols x cols psd matrix."""
    sd = svd(X, tol)
    R = sd.right
    out = (R * sd.values) @ adjoint(R)
    return (out + adjoint(out)) / 2


def abs_power(X, p: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``|X|^p`` straight from the SVD, avoiding a second eigensolve."""
    if not (p > 0 and math.isfinite(p)):
        raise ParameterError(f"power must be positive and finite, got {p!r}")
    sd = svd(X, tol)
    R = sd.right
    s = sd.values
    powered = np.where(s > 0, s, 0.0) ** p
    out = (R * powered) @ adjoint(R)
    return (out + adjoint(out)) / 2


def sym_modulus(Z, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Arithmetic symmetric modulus ``(|Z| + |Z^*|) / 2``."""
    Z = as_cmat(Z)
    return (abs_modulus(Z, tol) + abs_modulus(adjoint(Z), tol)) / 2


def qsym_modulus(Z, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Quadratic symmetric modulus ``((|Z|^2 + |Z^*|^2) / 2)^{1/2}``.

    Evaluated as ``|(Z; Z^*)| / sqrt(2)``; the modulus of the stack avoids
    taking a square root of a possibly singular psd matrix.
    """
    Z = as_cmat(Z)
    _require_square(Z, "Z")
    return abs_modulus(np.vstack([Z, adjoint(Z)]), tol) / math.sqrt(2)


def qsym_power(Z, p: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """The power mean ``((|Z|^p + |Z^*|^p) / 2)^{1/p}``."""
    Z = as_cmat(Z)
    _require_square(Z, "Z")
    if not (p > 0 and math.isfinite(p)):
        raise ParameterError(f"exponent must be positive and finite, got {p!r}")
    mean = (psd_power(abs_modulus(Z, tol), p, tol) + psd_power(abs_modulus(adjoint(Z), tol), p, tol)) / 2
    return psd_power(mean, 1.0 / p, tol)


def lp_norm(values: np.ndarray, p: float) -> float:
    """Scaled l_p (quasi-)norm of a nonnegative vector; ``p=inf`` is the max."""
    values = np.abs(np.asarray(values, dtype=float))
    if values.size == 0:
        return 0.0
    top = float(values.max())
    if top == 0.0:
        return 0.0
    if math.isinf(p):
        return top
    return top * float(np.sum((values / top) ** p)) ** (1.0 / p)


def support_values(values: np.ndarray, shape: tuple[int, int], tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Singular values with those at or below the rank cutoff set to zero.

    Roundoff singular values of size ``eps * s_1`` would otherwise contribute
    ``(eps * s_1)^p`` to a quasi-norm, about ``1e-8`` relative at ``p = 1/2``.
    """
    values = np.array(values, dtype=float)
    r = numerical_rank(values, shape, tol)
    values[r:] = 0.0
    return values


def schatten_norm(X, p: float) -> float:
    """Schatten p-(quasi)norm; ``p = inf`` gives the operator norm."""
    if not p > 0:
        raise ParameterError(f"Schatten exponent must be positive, got {p!r}")
    X = as_cmat(X)
    return lp_norm(support_values(singular_values(X), X.shape), p)


def schatten_power_sum(X, p: float) -> float:
    """``||X||_p^p = sum_k mu_k(X)^p`` without the final root."""
    if not (p > 0 and math.isfinite(p)):
        raise ParameterError(f"Schatten exponent must be positive and finite, got {p!r}")
    X = as_cmat(X)
    s = support_values(singular_values(X), X.shape)
    return float(np.sum(s[s > 0] ** p))


def kyfan_norm(X, k: int) -> float:
    """Sum of the ``k`` largest singular values (zero padded)."""
    s = singular_values(X)
    return float(np.sum(s[:k]))


# ---------------------------------------------------------------------------
# psd order


def psd_leq(A, B, tol: Tolerances = DEFAULT_TOL) -> Comparison:
    """Test ``A <= B`` in the psd order; ``margin = lambda_min(B - A)``."""
    A = as_cmat(A, "A")
    B = as_cmat(B, "B")
    if A.shape != B.shape:
        raise DimensionError(f"size mismatch {A.shape} vs {B.shape}")
    _require_hermitian(A, tol, "A")
    _require_hermitian(B, tol, "B")
    margin = lambda_min(B - A)
    scale = max(1.0, herm_opnorm(A), herm_opnorm(B))
    return Comparison(bool(margin >= -tol.psd_slack * scale), margin)


# ---------------------------------------------------------------------------
# block plumbing


def block_compose(blocks: Sequence[Sequence]) -> np.ndarray:
    grid = [[as_cmat(b, "block") for b in row] for row in blocks]
    if not grid or not grid[0]:
        raise DimensionError("empty block grid")
    width = len(grid[0])
    if any(len(row) != width for row in grid):
        raise DimensionError("ragged block grid")
    for row in grid:
        if len({b.shape[0] for b in row}) != 1:
            raise DimensionError("blocks in a block row must share their row count")
    for j in range(width):
        if len({row[j].shape[1] for row in grid}) != 1:
            raise DimensionError("blocks in a block column must share their column count")
    return np.block(grid)


def block_extract(X, i: int, j: int, n: int) -> np.ndarray:
    X = as_cmat(X)
    if X.shape[0] % n or X.shape[1] % n:
        raise DimensionError(f"shape {X.shape} is not divisible by block size {n}")
    if not (0 <= i < X.shape[0] // n and 0 <= j < X.shape[1] // n):
        raise DimensionError(f"block index ({i}, {j}) out of range")
    return X[i * n:(i + 1) * n, j * n:(j + 1) * n].copy()


def direct_sum(mats: Sequence) -> np.ndarray:
    mats = [as_cmat(M) for M in mats]
    rows = sum(M.shape[0] for M in mats)
    cols = sum(M.shape[1] for M in mats)
    out = np.zeros((rows, cols), dtype=np.complex128)
    r = c = 0
    for M in mats:
        out[r:r + M.shape[0], c:c + M.shape[1]] = M
        r += M.shape[0]
        c += M.shape[1]
    return out


def kron(A, B) -> np.ndarray:
    return np.kron(as_cmat(A), as_cmat(B))


def fourier_matrix(m: int) -> np.ndarray:
    """Normalized m-point Fourier matrix with entries ``w^{jk}/sqrt(m)``, ``w = e^{2 pi i/m}``."""
    j = np.arange(m)
    # exact integer exponents keep the entries reproducible
    return np.exp(2j * np.pi * ((np.outer(j, j) % m) / m)) / math.sqrt(m)


def isometry_defect(W) -> float:
    W = as_cmat(W)
    return opnorm(adjoint(W) @ W - np.eye(W.shape[1]))
