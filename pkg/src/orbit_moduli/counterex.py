"""Counterexamples and impossibility arguments.

Each builder returns a :class:`CounterReport`. A report is confirmed only
when every strict inequality the argument relies on holds with a margin
larger than ``10 * psd_slack``; closed forms are evaluated directly and the
matcore spectral routines serve as the independent numeric cross-check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import matcore as mc
from . import orbit as ob
from .errors import ParameterError
from .matcore import DEFAULT_TOL, Tolerances
from .sampling import ginibre, trial_rng


class CounterVerdict(str, enum.Enum):
    CONFIRMED = "ConfirmedCounterexample"
    FAILED = "Failed"


@dataclass
class CounterReport:
    name: str
    claim: str
    quantities: dict = field(default_factory=dict)
    strict: dict = field(default_factory=dict)
    verdict: CounterVerdict = CounterVerdict.FAILED
    details: list = field(default_factory=list)

    @property
    def confirmed(self) -> bool:
        return self.verdict is CounterVerdict.CONFIRMED

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "claim": self.claim,
            "quantities": dict(self.quantities),
            "strict_margins": dict(self.strict),
            "verdict": self.verdict.value,
            "details": list(self.details),
        }


def _finalize(report: CounterReport, tol: Tolerances, extra_ok: bool = True) -> CounterReport:
    threshold = 10 * tol.psd_slack
    ok = extra_ok and bool(report.strict)
    for label, margin in report.strict.items():
        if not margin > threshold:
            ok = False
            report.details.append(f"strict inequality {label!r} has margin {margin:.3e} <= {threshold:.1e}")
    report.verdict = CounterVerdict.CONFIRMED if ok else CounterVerdict.FAILED
    return report


def _real(value, name: str) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(x):
        raise ParameterError(f"{name} must be finite, got {value!r}")
    return x


# ---------------------------------------------------------------------------
# weighted parallelogram law outside [0, 1]


def nabla(A, B, x: float):
    """Weighted mean ``(1-x) A + x B``."""
    return (1 - x) * A + x * B


def parallelogram_trace_residual(A, B, x: float) -> float:
    """Relative defect of the trace form of the weighted parallelogram law.

    The identity is polynomial in ``x`` and holds for every real ``x``; the
    defect is scaled by the largest term to absorb cancellation at large ``|x|``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.complex128))
    B = np.atleast_2d(np.asarray(B, dtype=np.complex128))
    fro2 = lambda M: float(np.sum(np.abs(M) ** 2))
    terms = [fro2(nabla(A, B, x)), fro2(nabla(B, A, x)), 2 * x * (1 - x) * fro2(A - B)]
    lhs = fro2(A) + fro2(B)
    scale = max(1.0, lhs, *(abs(t) for t in terms))
    return abs(lhs - sum(terms)) / scale


def parallelogram_counterexample(x: float, tol: Tolerances = DEFAULT_TOL) -> CounterReport:
    x = _real(x, "x")
    if 0.0 <= x <= 1.0:
        raise ParameterError(f"x = {x} lies in [0, 1], where the isometric identity holds")
    A = 1.0
    B = (x - 1) / x
    mean_ab = nabla(A, B, x)
    mean_ba = nabla(B, A, x)
    diff = A - B
    weight = -x * (1 - x)
    report = CounterReport(
        "parallelogram",
        f"no isometries U,V,S,T in M_(2,1) realize the weighted parallelogram identity at x = {x!r}",
    )
    q = report.quantities
    q.update(x=x, A=A, B=B, A_nabla_B=mean_ab, B_nabla_A=mean_ba, A_minus_B=diff,
             closed_B_nabla_A=(2 * x - 1) / x, closed_A_minus_B=1 / x, neg_weight=weight)

    # B is formed with relative error ~eps*|x|, hence the |x|-scaled trace tolerance below.
    # A nabla_x B vanishes, so the identity would read
    # |A+B|^2 + (-x(1-x)) {S|A-B|^2S^* + T|A-B|^2T^*} = V |B nabla_x A|^2 V^*.
    absAB2 = np.diag([abs(A) ** 2, abs(B) ** 2]).astype(np.complex128)
    e1 = np.array([[1.0], [0.0]], dtype=np.complex128)
    e2 = np.array([[0.0], [1.0]], dtype=np.complex128)
    lhs = absAB2 + weight * abs(diff) ** 2 * (e1 @ e1.T + e2 @ e2.T)
    rhs = abs(mean_ba) ** 2 * (e1 @ e1.T)
    lhs_rank = mc.numerical_rank(np.abs(mc.herm_eig(lhs, tol).values), lhs.shape, tol)
    base_rank = mc.numerical_rank(np.abs(mc.herm_eig(absAB2, tol).values), absAB2.shape, tol)
    rhs_rank = mc.numerical_rank(np.abs(mc.herm_eig(rhs, tol).values), rhs.shape, tol)
    q.update(lhs_rank=lhs_rank, lhs_lower_bound_rank=base_rank, rhs_rank=rhs_rank)

    scalar_res = parallelogram_trace_residual(A, B, x)
    rng = trial_rng(0, 0)
    matrix_res = parallelogram_trace_residual(ginibre(rng, 3), ginibre(rng, 3), x)
    q.update(trace_identity_residual=scalar_res, trace_identity_residual_3x3=matrix_res)

    report.strict.update({
        "|B| > 0": abs(B),
        "|B nabla_x A| > 0": abs(mean_ba),
        "|A - B| > 0": abs(diff),
        "-x(1-x) > 0": weight,
    })
    report.details += [
        f"A = 1, B = (x-1)/x = {B!r}, A nabla_x B = {mean_ab!r}",
        "with A nabla_x B = 0 the identity reduces to a positive definite (rank 2) left side",
        "against V |B nabla_x A|^2 V^* of rank 1 for every isometry V in M_(2,1)",
        f"trace identity holds at this x: relative residual {scalar_res:.2e} (scalars), {matrix_res:.2e} (3x3)",
    ]
    ok = (abs(mean_ab) <= 1e-12 * max(1.0, abs(x)) and base_rank == 2 and lhs_rank == 2
          and rhs_rank == 1 and scalar_res <= 1e-12 * max(1.0, abs(x)) and matrix_res <= 1e-12)
    return _finalize(report, tol, ok)


# ---------------------------------------------------------------------------
# exponent obstruction for the quadratic symmetric modulus


def z_theta(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, 0.0], [-s, 0.0]], dtype=np.complex128)


def qsym_trace_closed(theta: float, p: float) -> float:
    """Closed form of ``Tr((|Z|^p + |Z^*|^p)/2)^{1/p}`` for ``Z = z_theta(theta)``.

    ``(1 +- cos t)/2`` are evaluated as ``cos^2(t/2)`` and ``sin^2(t/2)`` to
    keep full relative accuracy at small angles.
    """
    return math.cos(theta / 2) ** (2 / p) + math.sin(theta / 2) ** (2 / p)


def cartesian_trace_closed(theta: float) -> float:
    """Closed form of ``Tr|Re Z| + Tr|Im Z|``."""
    return 1.0 + math.sin(theta)


def phi(theta: float, p: float) -> float:
    return qsym_trace_closed(theta, p) - cartesian_trace_closed(theta)


def qsym_trace_numeric(Z, p: float, tol: Tolerances = DEFAULT_TOL) -> float:
    return float(np.trace(mc.qsym_power(Z, p, tol)).real)


def cartesian_trace_numeric(Z, tol: Tolerances = DEFAULT_TOL) -> float:
    re = np.abs(mc.herm_eig(mc.hermitian_part(Z), tol).values).sum()
    im = np.abs(mc.herm_eig(mc.im_part(Z), tol).values).sum()
    return float(re + im)


def theta_scan(p: float, start: float = 0.1, floor: float = 1e-8,
               threshold: float = 0.0) -> tuple[float, float, list[tuple[float, float]]]:
    """Halve ``theta`` from ``start`` until ``phi(theta, p) > threshold``.

    Returns ``(theta, phi, trail)``; ``theta`` is ``nan`` if the floor is
    reached without success.
    """
    trail = []
    theta = start
    while theta >= floor:
        value = phi(theta, p)
        trail.append((theta, value))
        if value > threshold:
            return theta, value, trail
        theta /= 2
    return math.nan, math.nan, trail


def qsym_exponent_counterexample(p: float, tol: Tolerances = DEFAULT_TOL,
                                 theta_start: float = 0.1, theta_floor: float = 1e-8) -> CounterReport:
    p = _real(p, "p")
    if not p > 2:
        raise ParameterError(f"p = {p} <= 2: the unitary-orbit bound holds there")
    threshold = 10 * tol.psd_slack
    theta, value, trail = theta_scan(p, theta_start, theta_floor, threshold)
    report = CounterReport(
        "qsym_exponent",
        f"for p = {p!r} the power-mean modulus of Z_theta is not dominated by unitary orbits of |Re Z|, |Im Z|",
    )
    report.details.append(f"theta scan (halving from {theta_start}): "
                          + ", ".join(f"{t:.3e}->{v:+.3e}" for t, v in trail))
    if math.isnan(theta):
        report.details.append("scan reached the floor without a positive Phi")
        return _finalize(report, tol, False)
    Z = z_theta(theta)
    lhs_closed = qsym_trace_closed(theta, p)
    rhs_closed = cartesian_trace_closed(theta)
    lhs_num = qsym_trace_numeric(Z, p, tol)
    rhs_num = cartesian_trace_numeric(Z, tol)
    report.quantities.update(
        p=p, theta_star=theta, phi=value, scan_steps=len(trail),
        lhs_closed=lhs_closed, rhs_closed=rhs_closed, lhs_numeric=lhs_num, rhs_numeric=rhs_num,
        lhs_discrepancy=abs(lhs_closed - lhs_num), rhs_discrepancy=abs(rhs_closed - rhs_num),
    )
    report.strict["Phi(theta*) > 0"] = value
    report.details.append(
        "taking traces, any unitaries U, V would force Phi(theta) <= 0; Phi(theta*) > 0 rules them out"
    )
    return _finalize(report, tol)


# ---------------------------------------------------------------------------
# truncated shift


SHIFT3 = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=np.complex128)
SHIFT_SIMILARITY = np.diag([1, -1j, -1])


def weyl_pair_values(Z, p: float, j: int, k: int, tol: Tolerances = DEFAULT_TOL) -> tuple[float, float]:
    """``mu_{1+j+k}`` of the power-mean modulus and ``mu_{1+j}(Re Z) + mu_{1+k}(Im Z)``."""
    n = Z.shape[0]
    pad = lambda v, i: float(v[i]) if i < len(v) else 0.0
    left = mc.singular_values(mc.qsym_power(Z, p, tol))
    sre = np.sort(np.abs(mc.herm_eig(mc.hermitian_part(Z), tol).values))[::-1]
    sim = np.sort(np.abs(mc.herm_eig(mc.im_part(Z), tol).values))[::-1]
    if min(j, k) < 0 or j + k >= n:
        raise ParameterError(f"indices (j, k) = ({j}, {k}) out of range for n = {n}")
    return pad(left, j + k), pad(sre, j) + pad(sim, k)


def shift_counterexample(p: float, tol: Tolerances = DEFAULT_TOL) -> CounterReport:
    p = _real(p, "p")
    if not p > 2:
        raise ParameterError(f"p = {p} <= 2: then 2^(-1/p) <= 2^(-1/2) and no violation occurs")
    Z = SHIFT3
    lhs, rhs = weyl_pair_values(Z, p, 2, 0, tol)
    re_eigs = mc.herm_eig(mc.hermitian_part(Z), tol).values
    im_part = mc.im_part(Z)
    D = SHIFT_SIMILARITY
    similarity_res = mc.opnorm(im_part - D @ mc.hermitian_part(Z) @ D.conj().T)
    report = CounterReport(
        "shift",
        f"for p = {p!r} the corrected singular-value bound fails at (j, k) = (2, 0) for the truncated shift",
    )
    report.quantities.update(
        p=p, mu3_lhs=lhs, closed_mu3=2 ** (-1 / p), rhs=rhs, closed_rhs=2 ** -0.5,
        re_eigenvalues=[float(v) for v in re_eigs], similarity_residual=similarity_res,
    )
    report.strict["mu_3 > mu_3(Re Z) + mu_1(Im Z)"] = lhs - rhs
    report.details += [
        "Z e1 = e2, Z e2 = e3, Z e3 = 0; |Z| = diag(1,1,0), |Z^*| = diag(0,1,1)",
        "Re Z has eigenvalues 0, +-2^(-1/2); Im Z = D (Re Z) D^* with D = diag(1, -i, -1)",
    ]
    ok = (abs(lhs - 2 ** (-1 / p)) <= 1e-12 and abs(rhs - 2 ** -0.5) <= 1e-12
          and similarity_res <= 1e-12)
    return _finalize(report, tol, ok)


# ---------------------------------------------------------------------------
# arithmetic symmetric modulus: no Thompson inequality


SYM_X = np.array([[-1, -1], [0, -1]], dtype=np.complex128)
SYM_Y = np.array([[0, -1], [0, 0]], dtype=np.complex128)


def sym_thompson_counterexample(tol: Tolerances = DEFAULT_TOL) -> CounterReport:
    X, Y = SYM_X, SYM_Y
    n_sum = mc.herm_opnorm(mc.sym_modulus(X + Y, tol))
    n_x = mc.herm_opnorm(mc.sym_modulus(X, tol))
    n_y = mc.herm_opnorm(mc.sym_modulus(Y, tol))
    closed = {"sum": 3 / math.sqrt(2), "X": 7 / (2 * math.sqrt(5)), "Y": 0.5}
    qcert = ob.qsym_thompson(X, Y, tol)
    qrep = ob.verify_certificate(qcert, tol)
    report = CounterReport(
        "sym_thompson",
        "no unitaries U, V give |X+Y|_sym <= U|X|_sym U^* + V|Y|_sym V^* for the fixed 2x2 pair",
    )
    report.quantities.update(
        norm_sum=n_sum, norm_X=n_x, norm_Y=n_y,
        closed_norm_sum=closed["sum"], closed_norm_X=closed["X"], closed_norm_Y=closed["Y"],
        gap=n_sum - (n_x + n_y), qsym_certificate_passed=qrep.passed, qsym_defect=qrep.residual,
    )
    report.strict["||X+Y|_sym|| > ||X|_sym|| + ||Y|_sym||"] = n_sum - (n_x + n_y)
    report.details += [
        "operator norms of both sides of any such domination would violate the triangle inequality",
        f"the quadratic symmetric version on the same pair holds (certificate passed: {qrep.passed})",
    ]
    ok = (abs(n_sum - closed["sum"]) <= 1e-10 and abs(n_x - closed["X"]) <= 1e-10
          and abs(n_y - closed["Y"]) <= 1e-10)
    return _finalize(report, tol, ok)


# ---------------------------------------------------------------------------
# four isometries cannot realize the Euler identity


def four_isometry_obstruction(n: int, tol: Tolerances = DEFAULT_TOL) -> CounterReport:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    I = np.eye(n, dtype=np.complex128)
    target = mc.direct_sum([mc.adjoint(I + I) @ (I + I)] * 3)
    U1 = np.eye(3 * n, n, dtype=np.complex128)
    P = U1 @ mc.adjoint(U1)
    cmp = mc.psd_leq(9 * P, target, tol)
    rotated = mc.fourier_matrix(3 * n)[:, :n]
    cmp_rot = mc.psd_leq(9 * rotated @ mc.adjoint(rotated), target, tol)
    sanity = ob.verify_certificate(ob.euler_fourier3_orbit(I, I, I, tol), tol)
    report = CounterReport(
        "four_isometry",
        f"no four isometries in M_(3n,n) realize the Euler orbit identity with A = B = C = I_{n}",
    )
    report.quantities.update(
        n=n, target_norm=mc.herm_opnorm(target), projection_weight=9.0,
        psd_leq_holds=cmp.holds, margin=cmp.margin, margin_other_projection=cmp_rot.margin,
        three_isometry_certificate_passed=sanity.passed,
    )
    report.strict["9 U1U1^* <= 4 I fails"] = -cmp.margin
    report.details += [
        "the identity would give 4 I_(3n) = 9 U1U1^* + U2U2^* + U3U3^* + U4U4^*, hence 4 I >= 9 U1U1^*",
        "U1U1^* is a rank-n projection, so lambda_min(4I - 9P) = -5 for every choice of U1",
    ]
    ok = (not cmp.holds and not cmp_rot.holds and abs(cmp.margin + 5) <= 1e-12
          and abs(cmp_rot.margin + 5) <= 1e-10)
    return _finalize(report, tol, ok)


COUNTEREXAMPLES = {
    "parallelogram": parallelogram_counterexample,
    "qsym": qsym_exponent_counterexample,
    "shift": shift_counterexample,
    "sym-thompson": sym_thompson_counterexample,
    "four-isometry": four_isometry_obstruction,
}
