"""Evaluation of Schatten-norm, Ky Fan and singular-value inequalities.

Every check returns an :class:`IneqReport` whose ``lhs`` is the side claimed
to be smaller, so ``margin = rhs - lhs`` is nonnegative whenever the
inequality holds. Families whose direction flips at ``p = 2`` orient
themselves from ``p``. Constants are already folded into the side they
multiply and are also stored separately for reference.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import matcore as mc
from .errors import DimensionError, ParameterError, PreconditionError
from .matcore import DEFAULT_TOL, Tolerances, adjoint
from .sampling import Ensemble, sample_tuple

EQUALITY_REL = 1e-9
CONTRACTION_SLACK = 1e-12
ISOMETRY_SLACK = 1e-10


class Verdict(str, enum.Enum):
    HOLDS = "Holds"
    VIOLATED = "Violated"
    EQUALITY = "Equality"


class Direction(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass
class IneqReport:
    name: str
    p: float | None
    lhs: float
    rhs: float
    constant: float
    ratio: float
    margin: float
    verdict: Verdict
    digest: str = ""
    guaranteed: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def unexpected_violation(self) -> bool:
        return self.guaranteed and self.verdict is Verdict.VIOLATED

    def to_dict(self) -> dict:
        return {
            "name": self.name, "p": self.p, "lhs": self.lhs, "rhs": self.rhs,
            "constant": self.constant, "ratio": self.ratio, "margin": self.margin,
            "verdict": self.verdict.value, "instance": self.digest,
            "guaranteed": self.guaranteed, "extra": dict(self.extra),
        }


def classify(lhs: float, rhs: float) -> tuple[float, float, Verdict]:
    """``(ratio, margin, verdict)`` under the shared tolerance convention."""
    margin = rhs - lhs
    band = EQUALITY_REL * max(1.0, abs(rhs))
    if abs(margin) <= band:
        verdict = Verdict.EQUALITY
    elif margin < 0:
        verdict = Verdict.VIOLATED
    else:
        verdict = Verdict.HOLDS
    if rhs == 0:
        ratio = 0.0 if lhs == 0 else math.inf
    else:
        ratio = lhs / rhs
    return ratio, margin, verdict


def make_report(name: str, p: float | None, lhs: float, rhs: float, constant: float, digest: str = "",
                guaranteed: bool = True, extra: dict | None = None) -> IneqReport:
    ratio, margin, verdict = classify(lhs, rhs)
    p = None if p is None else float(p)
    return IneqReport(name, p, float(lhs), float(rhs), float(constant), ratio, margin,
                      verdict, digest, guaranteed, dict(extra or {}))


# ---------------------------------------------------------------------------
# helpers


def _check_p(p: float, lower: float = 0.0) -> float:
    try:
        p = float(p)
    except (TypeError, ValueError):
        raise ParameterError(f"p must be a real number, got {p!r}") from None
    if not (math.isfinite(p) and p > lower):
        raise ParameterError(f"p must be finite and > {lower:g}, got {p!r}")
    return p


def conjugate_exponent(p: float) -> float:
    p = _check_p(p, 1.0)
    return p / (p - 1)


def _same_square(mats: Sequence) -> list[np.ndarray]:
    out = [mc.as_cmat(M) for M in mats]
    shape = out[0].shape
    if shape[0] != shape[1]:
        raise DimensionError(f"expected square matrices, got {shape}")
    for M in out[1:]:
        if M.shape != shape:
            raise DimensionError(f"size mismatch {M.shape} vs {shape}")
    return out


def _pp(values: np.ndarray, p: float) -> float:
    """``||X||_p^p`` from the singular values of a square ``X``, below-cutoff values dropped."""
    s = mc.support_values(values, (len(values), len(values)))
    s = s[s > 0]
    return float(np.sum(s**p))


def _pq(values: np.ndarray, p: float, q: float) -> float:
    """``||X||_p^q``."""
    return _pp(values, p) ** (q / p)


def euler_pieces(A, B, C) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """``([A+B+C, A, B, C], [A+B, B+C, C+A])``."""
    A, B, C = _same_square([A, B, C])
    return [A + B + C, A, B, C], [A + B, B + C, C + A]


def _svals(mats: Sequence[np.ndarray]) -> list[np.ndarray]:
    stack = np.stack(mats)
    return list(np.linalg.svd(stack, compute_uv=False))


# ---------------------------------------------------------------------------
# Euler identity and Clarkson-McCarthy type inequalities


def euler_identity_residual(A, B, C, relative: bool = False) -> float:
    """Operator norm of ``sum |Y|^2 - sum |X|^2``; optionally over ``max(1, ||sum|Y|^2||)``."""
    ys, xs = euler_pieces(A, B, C)
    left = sum(adjoint(Y) @ Y for Y in ys)
    right = sum(adjoint(X) @ X for X in xs)
    res = mc.opnorm(left - right)
    if relative:
        res /= max(1.0, mc.opnorm(left))
    return res


def cm_euler_pp(A, B, C, p: float, digest: str = "") -> IneqReport:
    """Pairwise sums ``<= 2^{p-2}`` times the Euler sums in ``||.||_p^p`` (reversed for ``p < 2``)."""
    p = _check_p(p)
    ys, xs = euler_pieces(A, B, C)
    sv = _svals(ys + xs)
    euler = sum(_pp(s, p) for s in sv[:4])
    pair = sum(_pp(s, p) for s in sv[4:])
    const = 2.0 ** (p - 2)
    if p >= 2:
        return make_report("cm_euler_pp", p, pair, const * euler, const, digest)
    return make_report("cm_euler_pp", p, const * euler, pair, const, digest)


def cm_euler_qp(A, B, C, p: float, digest: str = "") -> tuple[IneqReport, IneqReport]:
    """Both mixed ``l_q``-``l_p`` forms with constant ``2^{1-q/p}``; reversed for ``p >= 2``."""
    p = _check_p(p, 1.0)
    q = conjugate_exponent(p)
    ys, xs = euler_pieces(A, B, C)
    sv = _svals(ys + xs)
    sy, sx = sv[:4], sv[4:]
    const = 2.0 ** (1 - q / p)
    first_small = sum(_pq(s, p, q) for s in sy)
    first_big = const * sum(_pp(s, p) for s in sx) ** (q / p)
    second_small = sum(_pq(s, p, q) for s in sx)
    second_big = const * sum(_pp(s, p) for s in sy) ** (q / p)
    extra = {"q": q}
    if p <= 2:
        return (make_report("cm_euler_qp_euler", p, first_small, first_big, const, digest, extra=extra),
                make_report("cm_euler_qp_pairwise", p, second_small, second_big, const, digest, extra=extra))
    return (make_report("cm_euler_qp_euler", p, first_big, first_small, const, digest, extra=extra),
            make_report("cm_euler_qp_pairwise", p, second_big, second_small, const, digest, extra=extra))


def weak_euler_bound(A, B, C, p: float, digest: str = "") -> IneqReport:
    """Euler sums ``<= 3^{p/2-1}`` times pairwise sums (reversed for ``p < 2``)."""
    p = _check_p(p)
    ys, xs = euler_pieces(A, B, C)
    sv = _svals(ys + xs)
    euler = sum(_pp(s, p) for s in sv[:4])
    pair = sum(_pp(s, p) for s in sv[4:])
    const = 3.0 ** (p / 2 - 1)
    extra = {"conjectured_constant": conjectured_constant(p)}
    if p >= 2:
        return make_report("weak_euler", p, euler, const * pair, const, digest, extra=extra)
    return make_report("weak_euler", p, const * pair, euler, const, digest, extra=extra)


# ---------------------------------------------------------------------------
# mixed-norm estimates for T_U


def akc_isometry(n: int) -> np.ndarray:
    """The ``(1 + n(n-1)/2) x n`` isometry whose rows give ``sum A_i`` and ``A_i - A_j``."""
    if n < 2:
        raise ParameterError(f"need n >= 2, got {n}")
    rows = [np.ones(n)]
    for i, j in itertools.combinations(range(n), 2):
        r = np.zeros(n)
        r[i], r[j] = 1.0, -1.0
        rows.append(r)
    return np.array(rows, dtype=np.complex128) / math.sqrt(n)


EULER_COEFFS = 0.5 * np.array([[1, 1, 1, -1],
                               [1, -1, 1, 1],
                               [1, 1, -1, 1]], dtype=np.complex128)


def apply_tu(U, Z: Sequence) -> list[np.ndarray]:
    """``T_U(Z)_i = sum_j u_ij Z_j``."""
    U = mc.as_cmat(U, "U")
    Z = _same_square(Z)
    if U.shape[1] != len(Z):
        raise DimensionError(f"U has {U.shape[1]} columns but the tuple has {len(Z)} entries")
    stack = np.stack(Z)
    return list(np.tensordot(U, stack, axes=(1, 0)))


def mixed_norm_check(U, Z: Sequence, p: float, direction: Direction | str = Direction.FORWARD,
                     digest: str = "") -> IneqReport:
    """Mixed ``l_q(S_p)``-``l_p(S_p)`` estimate for ``T_U`` with constant ``mu^{2/p-1}``.

    Forward needs ``U`` contractive for ``1 < p <= 2`` and isometric for
    ``p > 2``; backward needs ``U`` isometric throughout.
    """
    p = _check_p(p, 1.0)
    q = conjugate_exponent(p)
    direction = Direction(direction)
    U = mc.as_cmat(U, "U")
    s, t = U.shape
    norm = mc.opnorm(U)
    iso_defect = mc.isometry_defect(U)
    needs_isometry = direction is Direction.BACKWARD or p > 2
    if needs_isometry and iso_defect > ISOMETRY_SLACK:
        raise PreconditionError(f"U^*U - I has norm {iso_defect:.3e}: {direction.value} at p = {p} "
                                "requires an isometry")
    if norm > 1 + CONTRACTION_SLACK:
        raise PreconditionError(f"||U|| = {norm:.6g} > 1: U must be a contraction")
    mu = float(np.max(np.abs(U)))
    const = mu ** (2 / p - 1)
    image = apply_tu(U, Z)
    sz = _svals(list(Z))
    simg = _svals(image)
    if direction is Direction.FORWARD:
        small = sum(_pq(v, p, q) for v in simg) ** (1 / q)
        big = const * sum(_pp(v, p) for v in sz) ** (1 / p)
    else:
        small = sum(_pq(v, p, q) for v in sz) ** (1 / q)
        big = const * sum(_pp(v, p) for v in simg) ** (1 / p)
    name = f"mixed_norm_{direction.value}"
    extra = {"q": q, "mu": mu, "shape": [s, t]}
    if p <= 2:
        return make_report(name, p, small, big, const, digest, extra=extra)
    return make_report(name, p, big, small, const, digest, extra=extra)


def akc_check(As: Sequence, p: float, digest: str = "") -> tuple[IneqReport, IneqReport]:
    """The Audenaert-Kittaneh inequality (constant ``n``) and its complement (``n^{-q/p}``)."""
    p = _check_p(p, 1.0)
    q = conjugate_exponent(p)
    As = _same_square(As)
    n = len(As)
    if n < 2:
        raise ParameterError(f"need at least two matrices, got {n}")
    combos = [sum(As)] + [As[i] - As[j] for i, j in itertools.combinations(range(n), 2)]
    sc = _svals(combos)
    sa = _svals(As)
    c1 = float(n)
    akc_small = sum(_pq(v, p, q) for v in sc)
    akc_big = c1 * sum(_pp(v, p) for v in sa) ** (q / p)
    c2 = n ** (-q / p)
    comp_small = sum(_pq(v, p, q) for v in sa)
    comp_big = c2 * sum(_pp(v, p) for v in sc) ** (q / p)
    extra = {"q": q, "n_tuple": n}
    if p <= 2:
        return (make_report("akc", p, akc_small, akc_big, c1, digest, extra=extra),
                make_report("akc_complement", p, comp_small, comp_big, c2, digest, extra=extra))
    return (make_report("akc", p, akc_big, akc_small, c1, digest, extra=extra),
            make_report("akc_complement", p, comp_big, comp_small, c2, digest, extra=extra))


# ---------------------------------------------------------------------------
# singular values and Ky Fan sums


def _mu(values: np.ndarray, index: int) -> float:
    """``mu_{1+index}`` with zero padding."""
    return float(values[index]) if index < len(values) else 0.0


def weyl_singular_checks(Z, p: float, j: int, k: int, tol: Tolerances = DEFAULT_TOL,
                         digest: str = "") -> IneqReport:
    """``mu_{1+j+k}`` of the power-mean modulus against ``mu_{1+j}(Re Z) + mu_{1+k}(Im Z)``.

    Proven for ``p <= 2``; for ``p > 2`` the report is marked as not
    guaranteed and may legitimately come out Violated.
    """
    p = _check_p(p)
    Z = mc.as_cmat(Z, "Z")
    mc._require_square(Z, "Z")
    n = Z.shape[0]
    if min(j, k) < 0 or 1 + j + k > n:
        raise ParameterError(f"indices (j, k) = ({j}, {k}) out of range for n = {n}")
    left = mc.singular_values(mc.qsym_power(Z, p, tol))
    sre = np.sort(np.abs(np.linalg.eigvalsh(mc.hermitian_part(Z))))[::-1]
    sim = np.sort(np.abs(np.linalg.eigvalsh(mc.im_part(Z))))[::-1]
    return make_report("weyl_qsym", p, _mu(left, j + k), _mu(sre, j) + _mu(sim, k), 1.0, digest,
                       guaranteed=p <= 2, extra={"j": j, "k": k})


def weyl_singular_sweep(Z, p: float, tol: Tolerances = DEFAULT_TOL, digest: str = "") -> list[IneqReport]:
    """:func:`weyl_singular_checks` for every ``(j, k)`` with ``1 + j + k <= n``, one factorization."""
    p = _check_p(p)
    Z = mc.as_cmat(Z, "Z")
    mc._require_square(Z, "Z")
    n = Z.shape[0]
    left = mc.singular_values(mc.qsym_power(Z, p, tol))
    sre = np.sort(np.abs(np.linalg.eigvalsh(mc.hermitian_part(Z))))[::-1]
    sim = np.sort(np.abs(np.linalg.eigvalsh(mc.im_part(Z))))[::-1]
    return [make_report("weyl_qsym", p, _mu(left, j + k), _mu(sre, j) + _mu(sim, k), 1.0, digest,
                        guaranteed=p <= 2, extra={"j": j, "k": k})
            for j in range(n) for k in range(n - j)]


def euler_modulus_svals(A, B, C) -> np.ndarray:
    """Singular values of ``sqrt(Euler sum)``, read off the stack ``(A+B+C; A; B; C)``."""
    ys, _ = euler_pieces(A, B, C)
    return mc.singular_values(np.vstack(ys))


def euler_weyl_checks(A, B, C, j: int, k: int, l: int, digest: str = "") -> IneqReport:
    ys, xs = euler_pieces(A, B, C)
    n = ys[0].shape[0]
    if min(j, k, l) < 0 or 1 + j + k + l > n:
        raise ParameterError(f"indices ({j}, {k}, {l}) out of range for n = {n}")
    left = mc.singular_values(np.vstack(ys))
    sx = _svals(xs)
    rhs = _mu(sx[0], j) + _mu(sx[1], k) + _mu(sx[2], l)
    return make_report("euler_weyl", None, _mu(left, j + k + l), rhs, 1.0, digest,
                       extra={"j": j, "k": k, "l": l})


def euler_weyl_sweep(A, B, C, digest: str = "") -> list[IneqReport]:
    """All index triples with ``1 + j + k + l <= n``."""
    n = mc.as_cmat(A).shape[0]
    return [euler_weyl_checks(A, B, C, j, k, l, digest)
            for j in range(n) for k in range(n - j) for l in range(n - j - k)]


def euler_norm_checks(A, B, C, ps: Sequence[float] = (1.0, 2.0, 4.0), digest: str = "") -> list[IneqReport]:
    """``||sqrt(Euler sum)|| <= ||A+B|| + ||B+C|| + ||C+A||`` for Ky Fan and Schatten norms."""
    ys, xs = euler_pieces(A, B, C)
    n = ys[0].shape[0]
    left = mc.singular_values(np.vstack(ys))
    sx = _svals(xs)
    out = []
    for m in range(1, n + 1):
        out.append(make_report("euler_norm_kyfan", None, float(left[:m].sum()),
                               sum(float(v[:m].sum()) for v in sx), 1.0, digest, extra={"m": m}))
    for r in ps:
        r = _check_p(r, 1.0 - 1e-15)
        out.append(make_report("euler_norm_schatten", None, mc.lp_norm(left, r),
                               sum(mc.lp_norm(v, r) for v in sx), 1.0, digest, extra={"norm_p": r}))
    return out


def kyfan_checks(A, B, C, p: float | Sequence[float] | None = None, tol: Tolerances = DEFAULT_TOL,
                 digest: str = "") -> list[IneqReport]:
    """Ky Fan sums and anti-sums of the Euler square sums, plus the Ky Fan Clarkson form.

    ``p`` may be a single exponent or a sequence; the factorizations are shared.
    """
    ys, xs = euler_pieces(A, B, C)
    n = ys[0].shape[0]
    total = sum(adjoint(Y) @ Y for Y in ys)
    ev_total = np.linalg.eigvalsh((total + adjoint(total)) / 2)[::-1]
    sx2 = [v**2 for v in _svals(xs)]
    out = []
    for m in range(1, n + 1):
        top = float(ev_total[:m].sum())
        bottom = float(ev_total[n - m:].sum())
        out.append(make_report("kyfan_top", None, top, sum(float(v[:m].sum()) for v in sx2), 1.0,
                               digest, extra={"m": m}))
        out.append(make_report("kyfan_bottom", None, sum(float(v[n - m:].sum()) for v in sx2), bottom,
                               1.0, digest, extra={"m": m}))
    ps = [] if p is None else [p] if np.isscalar(p) else list(p)
    if not ps:
        return out
    _, sv, Rh = np.linalg.svd(np.stack(xs + ys))
    R = np.conj(np.swapaxes(Rh, 1, 2))
    for p in ps:
        p = _check_p(p)
        const = 2.0 ** (p - 2)
        # |X|^p = R diag(s^p) R^*
        powers = (R * (sv**p)[:, None, :]) @ Rh
        pair = powers[:3].sum(axis=0)
        euler = powers[3:].sum(axis=0)
        ep = np.linalg.eigvalsh((pair + adjoint(pair)) / 2)[::-1]
        ee = np.linalg.eigvalsh((euler + adjoint(euler)) / 2)[::-1]
        for m in range(1, n + 1):
            a, b = float(ep[:m].sum()), const * float(ee[:m].sum())
            lhs, rhs = (a, b) if p >= 2 else (b, a)
            out.append(make_report("clarkson_kyfan", p, lhs, rhs, const, digest, extra={"m": m}))
    return out


# ---------------------------------------------------------------------------
# conjecture explorer


def conjectured_constant(p: float) -> float:
    p = _check_p(p)
    return (3.0 ** (p - 1) + 1) / 2.0**p


def euler_ratio(A, B, C, p: float) -> float:
    """``(||A+B+C||_p^p + ||A||_p^p + ||B||_p^p + ||C||_p^p) / (sum of pairwise ||.||_p^p)``."""
    ys, xs = euler_pieces(A, B, C)
    sv = _svals(ys + xs)
    euler = sum(_pp(s, p) for s in sv[:4])
    pair = sum(_pp(s, p) for s in sv[4:])
    if pair == 0:
        return math.nan
    return euler / pair


EVIDENCE_NOTE = ("evidence-grade: random sampling plus local search; "
                 "no violation found is not a proof of the conjecture")


@dataclass
class ConjectureSummary:
    p: float
    n: int
    trials: int
    ensemble: str
    seed: int
    constant: float
    objective: str
    sampled_best: float
    sampled_best_trial: int
    climbed_best: float
    equal_case_ratio: float
    violations: list
    hill_steps: int
    grade: str = EVIDENCE_NOTE

    @property
    def best(self) -> float:
        if self.objective == "max":
            return max(self.sampled_best, self.climbed_best)
        return min(self.sampled_best, self.climbed_best)

    @property
    def violation_found(self) -> bool:
        return bool(self.violations)

    def to_dict(self) -> dict:
        return {
            "p": self.p, "n": self.n, "trials": self.trials, "ensemble": self.ensemble,
            "seed": self.seed, "constant": self.constant, "objective": self.objective,
            "sampled_best": self.sampled_best, "sampled_best_trial": self.sampled_best_trial,
            "climbed_best": self.climbed_best, "best": self.best,
            "equal_case_ratio": self.equal_case_ratio, "violations": list(self.violations),
            "hill_steps": self.hill_steps,
            "verdict": "violation found" if self.violation_found else "supporting evidence",
            "grade": self.grade,
        }


def _beyond(value: float, const: float, objective: str) -> bool:
    if math.isnan(value):
        return False
    if objective == "max":
        return value > const + EQUALITY_REL
    return value < const - EQUALITY_REL


def hill_climb(triple: Sequence[np.ndarray], p: float, objective: str, steps: int = 50,
               step: float = 0.1, decay: float = 0.9) -> tuple[float, list[np.ndarray]]:
    """Coordinate-wise +-step search on real and imaginary parts of all entries.

    The triple is first scaled to unit maximal Frobenius norm (the ratio is
    scale invariant). Sweep ``k`` uses step ``step * decay**k``; a move is
    kept only when it strictly improves the objective.
    """
    sign = 1.0 if objective == "max" else -1.0
    mats = [np.array(M, dtype=np.complex128) for M in triple]
    scale = max(float(np.linalg.norm(M)) for M in mats) or 1.0
    flat = np.concatenate([np.concatenate([M.real.ravel(), M.imag.ravel()]) for M in mats]) / scale
    n = mats[0].shape[0]
    size = n * n

    def unpack(v):
        out = []
        for i in range(3):
            block = v[2 * size * i: 2 * size * (i + 1)]
            out.append((block[:size] + 1j * block[size:]).reshape(n, n))
        return out

    def score(v):
        r = euler_ratio(*unpack(v), p)
        return -math.inf if math.isnan(r) else sign * r

    best = score(flat)
    h = step
    for _ in range(steps):
        for idx in range(flat.size):
            for delta in (h, -h):
                trial = flat.copy()
                trial[idx] += delta
                s = score(trial)
                if s > best:
                    best, flat = s, trial
                    break
        h *= decay
    return sign * best, unpack(flat)


def conjecture_explore(p: float, trials: int, ensemble: Ensemble | str = Ensemble.GINIBRE,
                       seed: int = 0, n: int = 2, hill_steps: int = 50, step: float = 0.1,
                       trial_offset: int = 0) -> ConjectureSummary:
    """Search for triples that push the Euler ratio past the conjectured constant.

    Tracks the maximum ratio for ``p >= 2`` and the minimum for ``p < 2``;
    any ratio beyond the constant by more than ``1e-9`` is recorded as a
    violation together with its trial index. Nothing here asserts the
    conjecture.
    """
    p = _check_p(p)
    if trials < 1:
        raise ParameterError(f"trials must be positive, got {trials}")
    ensemble = Ensemble(ensemble)
    const = conjectured_constant(p)
    objective = "max" if p >= 2 else "min"
    better = (lambda a, b: a > b) if objective == "max" else (lambda a, b: a < b)
    best = math.nan
    best_trial = -1
    best_triple = None
    violations = []
    for t in range(trial_offset, trial_offset + trials):
        sample = sample_tuple(3, n, seed, t, ensemble)
        r = euler_ratio(*sample.matrices, p)
        if math.isnan(r):
            continue
        if _beyond(r, const, objective):
            violations.append({"trial": t, "ratio": r})
        if best_triple is None or better(r, best):
            best, best_trial, best_triple = r, t, sample.matrices
    climbed = best
    if best_triple is not None and hill_steps > 0:
        climbed, triple = hill_climb(best_triple, p, objective, hill_steps, step)
        if _beyond(climbed, const, objective):
            violations.append({"trial": best_trial, "ratio": climbed, "after_hill_climb": True})
    equal = sample_tuple(1, n, seed, 0, ensemble).matrices[0]
    equal_ratio = euler_ratio(equal, equal, equal, p)
    return ConjectureSummary(p, n, trials, ensemble.value, int(seed), const, objective, best,
                             best_trial, climbed, equal_ratio, violations, hill_steps)
