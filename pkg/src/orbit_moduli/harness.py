"""Seeded sweeps shared by the command line and the acceptance tests.

A sweep runs ``trials`` independent trials; trial ``t`` uses dimension
``sizes[t % len(sizes)]`` and draws its matrices from the stream
``(seed, t)``. Per-trial results are folded into aggregates keyed by
``(name, p, n)``. Folding only takes minima, maxima and counts, so the merged
result is independent of how the trials are split across worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import ineq as iq
from . import matcore as mc
from . import orbit as ob
from .matcore import DEFAULT_TOL, Tolerances
from .counterex import SHIFT3
from .sampling import Ensemble, ginibre, sample_tuple, trial_rng

DEFAULT_P_GRID = (0.5, 1.2, 1.5, 2.0, 3.0, 4.0)
DEFAULT_SIZES = (1, 2, 3, 5)
VERDICTS = ("Holds", "Equality", "Violated")


# ---------------------------------------------------------------------------
# aggregation


@dataclass
class Aggregate:
    name: str
    p: float | None
    n: int
    trials: int = 0
    min_margin: float = math.inf
    min_rel_margin: float = math.inf
    max_ratio: float = -math.inf
    verdicts: dict = field(default_factory=lambda: {v: 0 for v in VERDICTS})
    expected_violations: int = 0

    @property
    def key(self) -> tuple:
        return (self.name, -1.0 if self.p is None else self.p, self.n)

    @property
    def unexpected_violations(self) -> int:
        return self.verdicts["Violated"] - self.expected_violations

    def add(self, report: iq.IneqReport):
        self.trials += 1
        self.min_margin = min(self.min_margin, report.margin)
        self.min_rel_margin = min(self.min_rel_margin, report.margin / max(1.0, abs(report.rhs)))
        self.max_ratio = max(self.max_ratio, report.ratio)
        self.verdicts[report.verdict.value] += 1
        if report.verdict is iq.Verdict.VIOLATED and not report.guaranteed:
            self.expected_violations += 1

    def merge(self, other: "Aggregate"):
        self.trials += other.trials
        self.min_margin = min(self.min_margin, other.min_margin)
        self.min_rel_margin = min(self.min_rel_margin, other.min_rel_margin)
        self.max_ratio = max(self.max_ratio, other.max_ratio)
        for v in VERDICTS:
            self.verdicts[v] += other.verdicts[v]
        self.expected_violations += other.expected_violations

    def to_dict(self) -> dict:
        return {
            "name": self.name, "p": self.p, "n": self.n, "trials": self.trials,
            "min_margin": self.min_margin, "min_rel_margin": self.min_rel_margin,
            "max_ratio": self.max_ratio, "verdict_counts": dict(self.verdicts),
            "expected_violations": self.expected_violations,
        }


def fold(reports: Iterable[iq.IneqReport], n: int, table: dict | None = None) -> dict:
    table = {} if table is None else table
    for r in reports:
        key = (r.name, r.p, n)
        if key not in table:
            table[key] = Aggregate(r.name, r.p, n)
        table[key].add(r)
    return table


def merge_tables(tables: Iterable[dict]) -> list[Aggregate]:
    merged: dict = {}
    for table in tables:
        for key, agg in table.items():
            if key in merged:
                merged[key].merge(agg)
            else:
                copy = Aggregate(agg.name, agg.p, agg.n)
                copy.merge(agg)
                merged[key] = copy
    return sorted(merged.values(), key=lambda a: a.key)


# ---------------------------------------------------------------------------
# inequality families: each maps (trial sample, p grid) to reports


def _grid(ps: Sequence[float], lower: float) -> list[float]:
    return [p for p in ps if p > lower]


def _fam_cm_pp(mats, ps, digest):
    return [iq.cm_euler_pp(*mats[:3], p, digest) for p in ps]


def _fam_cm_qp(mats, ps, digest):
    return [r for p in _grid(ps, 1) for r in iq.cm_euler_qp(*mats[:3], p, digest)]


def _fam_weak(mats, ps, digest):
    return [iq.weak_euler_bound(*mats[:3], p, digest) for p in ps]


def _akc_tuple(mats):
    k = 2 + mats[0].shape[0] % 3
    return list(mats[:k])


def _fam_akc(mats, ps, digest):
    return [r for p in _grid(ps, 1) for r in iq.akc_check(_akc_tuple(mats), p, digest)]


def _fam_mixed_akc(mats, ps, digest):
    tup = _akc_tuple(mats)
    U = iq.akc_isometry(len(tup))
    out = []
    for p in _grid(ps, 1):
        for d in iq.Direction:
            r = iq.mixed_norm_check(U, tup, p, d, digest)
            r.name += "_akc"
            out.append(r)
    return out


def _fam_mixed_euler(mats, ps, digest):
    ys, xs = iq.euler_pieces(*mats[:3])
    Ustar = iq.EULER_COEFFS.conj().T
    out = []
    for p in _grid(ps, 1):
        for d in iq.Direction:
            r = iq.mixed_norm_check(Ustar, xs, p, d, digest)
            r.name += "_euler_adjoint"
            out.append(r)
        if p <= 2:
            r = iq.mixed_norm_check(iq.EULER_COEFFS, ys, p, iq.Direction.FORWARD, digest)
            r.name += "_euler"
            out.append(r)
    return out


def _fam_euler_norm(mats, ps, digest):
    return iq.euler_norm_checks(*mats[:3], digest=digest)


def _fam_euler_weyl(mats, ps, digest):
    return iq.euler_weyl_sweep(*mats[:3], digest=digest)


def _fam_kyfan(mats, ps, digest):
    return iq.kyfan_checks(*mats[:3], list(ps), digest=digest)


def _fam_weyl_qsym(mats, ps, digest):
    return [r for p in ps for r in iq.weyl_singular_sweep(mats[0], p, digest=digest)]


FAMILIES: dict[str, tuple[int, Callable]] = {
    "cm_pp": (3, _fam_cm_pp),
    "cm_qp": (3, _fam_cm_qp),
    "mixed_akc": (4, _fam_mixed_akc),
    "mixed_euler": (3, _fam_mixed_euler),
    "akc": (4, _fam_akc),
    "weak": (3, _fam_weak),
    "euler_norm": (3, _fam_euler_norm),
    "euler_weyl": (3, _fam_euler_weyl),
    "kyfan": (3, _fam_kyfan),
    "weyl_qsym": (1, _fam_weyl_qsym),
}

PROVEN_FAMILIES = tuple(k for k in FAMILIES if k != "weyl_qsym")


def _family_chunk(args) -> dict:
    family, seed, start, stop, ps, sizes, ensemble, keep = args
    count, fn = FAMILIES[family]
    table: dict = {}
    kept = []
    for t in range(start, stop):
        n = sizes[t % len(sizes)]
        sample = sample_tuple(count, n, seed, t, ensemble)
        reports = fn(sample.matrices, ps, sample.digest())
        fold(reports, n, table)
        if keep:
            kept.extend((r.name, t, k, r) for k, r in enumerate(reports))
    return {"table": table, "reports": kept}


def _chunks(trials: int, jobs: int) -> list[tuple[int, int]]:
    jobs = max(1, min(jobs, trials))
    step = math.ceil(trials / jobs)
    return [(a, min(a + step, trials)) for a in range(0, trials, step)]


def run_family(family: str, trials: int, seed: int, ps: Sequence[float] = DEFAULT_P_GRID,
               sizes: Sequence[int] = DEFAULT_SIZES, ensemble: Ensemble | str = Ensemble.GINIBRE,
               jobs: int = 1, keep_reports: bool = False) -> tuple[list[Aggregate], list[tuple]]:
    """Sweep one family; returns sorted aggregates and (optionally) every report.

    Kept reports come as ``(name, trial_index, report)`` rows ordered by
    ``(name, trial_index)`` and then by position within the trial.
    """
    if family not in FAMILIES:
        raise KeyError(f"unknown inequality family {family!r}")
    ensemble = Ensemble(ensemble)
    args = [(family, seed, a, b, tuple(ps), tuple(sizes), ensemble, keep_reports)
            for a, b in _chunks(trials, jobs)]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_family_chunk, args))
    else:
        parts = [_family_chunk(a) for a in args]
    aggs = merge_tables(part["table"] for part in parts)
    reports = []
    if keep_reports:
        rows = sorted((row for part in parts for row in part["reports"]), key=lambda r: r[:3])
        reports = [(name, t, r) for name, t, _, r in rows]
    return aggs, reports


# ---------------------------------------------------------------------------
# sharpness cases: every report here should come out as Equality


def sharpness_reports(seed: int, sizes: Sequence[int] = DEFAULT_SIZES,
                      ps: Sequence[float] = DEFAULT_P_GRID) -> list[iq.IneqReport]:
    out = []
    for t, n in enumerate(sizes):
        A, B, C, D = sample_tuple(4, n, seed, t).matrices
        digest = f"seed={seed} trial={t} n={n}"
        for p in ps:
            out.append(iq.cm_euler_pp(A, A, -A, p, digest + " A=B=-C"))
            out += [r for r in iq.kyfan_checks(A, A, -A, p, digest=digest + " A=B=-C")
                    if r.name == "clarkson_kyfan"]
            if p > 1:
                out += list(iq.cm_euler_qp(A, A, -A, p, digest + " A=B=-C"))
                for k in (2, 3, 4):
                    out += list(iq.akc_check([A] * k, p, digest + f" equal {k}-tuple"))
        out.append(iq.cm_euler_pp(A, B, C, 2.0, digest + " p=2"))
        out += list(iq.cm_euler_qp(A, B, C, 2.0, digest + " p=2"))
        out.append(iq.weak_euler_bound(A, B, C, 2.0, digest + " p=2"))
        out += list(iq.akc_check([A, B, C, D], 2.0, digest + " p=2"))
        for d in iq.Direction:
            out.append(iq.mixed_norm_check(iq.akc_isometry(4), [A, B, C, D], 2.0, d, digest + " p=2"))
            out.append(iq.mixed_norm_check(iq.EULER_COEFFS.conj().T, iq.euler_pieces(A, B, C)[1],
                                           2.0, d, digest + " p=2"))
        out += [r for r in iq.kyfan_checks(A, B, C, None, digest=digest + " m=n")
                if r.extra.get("m") == n]
    return out


# ---------------------------------------------------------------------------
# orbit certificate sweeps


@dataclass
class CertAggregate:
    op: str
    n: int
    relation: str
    count: int = 0
    passed: int = 0
    max_rel_residual: float = 0.0
    max_isometry_defect: float = 0.0
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "op": self.op, "n": self.n, "relation": self.relation, "count": self.count,
            "passed": self.passed, "max_rel_residual": self.max_rel_residual,
            "max_isometry_defect": self.max_isometry_defect, "failures": list(self.failures),
        }


@dataclass
class PolarCheck:
    label: str
    relation: str
    residual: float
    scale: float
    max_isometry_defect: float
    passed: bool
    failures: list


def polar_check(X, tol: Tolerances = DEFAULT_TOL) -> PolarCheck:
    """Postconditions of the support polar decomposition.

    ``X = W|X|``; ``W^*W`` is the support projection of ``|X|``; ``W^*W |X| = |X|``;
    ``WW^*`` is a projection. The reported defect is the projection defect of ``W^*W``.
    """
    W, absX = ob.polar_support(X, tol)
    scale = max(1.0, mc.opnorm(X))
    recon = mc.opnorm(X - W @ absX)
    P = mc.adjoint(W) @ W
    Q = W @ mc.adjoint(W)
    support = ob.support_projection(absX, tol)
    proj_defect = max(mc.opnorm(P @ P - P), mc.opnorm(Q @ Q - Q), mc.opnorm(P - support))
    supp_res = mc.opnorm(P @ absX - absX)
    failures = []
    if recon > tol.recon * scale:
        failures.append(f"X - W|X| = {recon:.3e}")
    if supp_res > tol.recon * scale:
        failures.append(f"W^*W|X| - |X| = {supp_res:.3e}")
    if proj_defect > tol.isometry_defect:
        failures.append(f"projection defect {proj_defect:.3e}")
    return PolarCheck("polar_support", "equality", max(recon, supp_res), scale, proj_defect,
                      not failures, failures)


def _cert_inputs(op: str, n: int, seed: int, trial: int):
    rng = trial_rng(seed, trial)
    g = lambda r, c=None: ginibre(rng, r, c)
    if op == "polar_support":
        return (g(n + 1, n),)
    if op == "isometry_decompose_psd":
        X = g(3 * n)
        return (mc.adjoint(X) @ X, n)
    if op == "partitioned_pythagoras":
        return (g(3 * n), n)
    if op in ("euler_hadamard_orbit", "euler_fourier3_orbit", "euler_fourier4_orbit", "euler_modulus_orbit"):
        return (g(n), g(n), g(n))
    if op == "thompson_square" or op == "qsym_thompson":
        return (g(n), g(n))
    if op == "thompson_rect":
        return (g(2 * n + 1, n), g(2 * n + 1, n))
    if op == "sqrt_two_orbit":
        X, Y = g(n), g(n)
        return (mc.adjoint(X) @ X, mc.adjoint(Y) @ Y)
    raise KeyError(op)


CERT_OPS = (
    "polar_support", "isometry_decompose_psd", "partitioned_pythagoras",
    "euler_hadamard_orbit", "euler_fourier3_orbit", "euler_fourier4_orbit",
    "thompson_square", "thompson_rect", "qsym_thompson", "sqrt_two_orbit", "euler_modulus_orbit",
)


def check_op(op: str, inputs, tol: Tolerances = DEFAULT_TOL):
    if op == "polar_support":
        return polar_check(inputs[0], tol)
    cert = getattr(ob, op)(*inputs, tol=tol)
    return ob.verify_certificate(cert, tol)


def _cert_chunk(args) -> list:
    ops, seed, sizes, start, stop, tol = args
    out = []
    for op in ops:
        # each op gets its own block of trial streams, independent of which ops are selected
        base = 1000003 * CERT_OPS.index(op)
        for t in range(start, stop):
            n = sizes[t % len(sizes)]
            rep = check_op(op, _cert_inputs(op, n, seed, base + t), tol)
            out.append((op, n, t, rep))
    return out


def run_certificates(trials_per_size: int, seed: int, ops: Sequence[str] = CERT_OPS,
                     sizes: Sequence[int] = DEFAULT_SIZES, tol: Tolerances = DEFAULT_TOL,
                     jobs: int = 1) -> list[CertAggregate]:
    """``trials_per_size`` instances of each op at each size."""
    for op in ops:
        if op not in CERT_OPS:
            raise KeyError(f"unknown orbit operation {op!r}")
    total = trials_per_size * len(sizes)
    args = [(tuple(ops), seed, tuple(sizes), a, b, tol) for a, b in _chunks(total, jobs)]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = [row for part in pool.map(_cert_chunk, args) for row in part]
    else:
        rows = [row for a in args for row in _cert_chunk(a)]
    table: dict = {}
    for op, n, t, rep in sorted(rows, key=lambda r: (CERT_OPS.index(r[0]), r[1], r[2])):
        key = (op, n)
        if key not in table:
            table[key] = CertAggregate(op, n, getattr(rep.relation, "value", rep.relation))
        agg = table[key]
        agg.count += 1
        agg.passed += int(rep.passed)
        agg.max_rel_residual = max(agg.max_rel_residual, rep.residual / rep.scale)
        agg.max_isometry_defect = max(agg.max_isometry_defect, rep.max_isometry_defect)
        if not rep.passed:
            agg.failures.append({"trial": t, "failures": list(rep.failures)})
    return [table[k] for k in sorted(table, key=lambda k: (CERT_OPS.index(k[0]), k[1]))]


# ---------------------------------------------------------------------------
# Euler identity sweep


def euler_identity_sweep(trials: int, seed: int, sizes: Sequence[int] = (1, 2, 3, 4, 5, 6)) -> dict:
    worst = 0.0
    for t in range(trials):
        n = sizes[t % len(sizes)]
        A, B, C = sample_tuple(3, n, seed, t).matrices
        worst = max(worst, iq.euler_identity_residual(A, B, C, relative=True))
    return {"trials": trials, "sizes": list(sizes), "max_rel_residual": worst}


def shift_core_reports(ps: Sequence[float]) -> list[iq.IneqReport]:
    """The power-mean Weyl bound on the 3x3 truncated shift, all ``(j, k)``."""
    out = [r for p in ps for r in iq.weyl_singular_sweep(SHIFT3, p, digest=f"truncated shift p={p}")]
    for r in out:
        r.name = "weyl_qsym_shift"
    return out


# ---------------------------------------------------------------------------
# conjecture explorer, chunked


def _explore_chunk(args) -> iq.ConjectureSummary:
    p, count, ensemble, seed, n, offset = args
    return iq.conjecture_explore(p, count, ensemble, seed, n, hill_steps=0, trial_offset=offset)


def run_explore(p: float, trials: int, seed: int, ensemble: Ensemble | str = Ensemble.GINIBRE,
                n: int = 2, hill_steps: int = 50, step: float = 0.1, jobs: int = 1) -> iq.ConjectureSummary:
    """Random phase split into chunks, then one hill-climb from the overall best trial.

    The chunking never changes the result: the best trial is the first one
    attaining the extreme ratio, and the climb restarts from that trial's sample.
    """
    ensemble = Ensemble(ensemble)
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    args = [(p, b - a, ensemble, seed, n, a) for a, b in _chunks(trials, jobs)]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_explore_chunk, args))
    else:
        parts = [_explore_chunk(a) for a in args]
    head = parts[0]
    better = (lambda a, b: a > b) if head.objective == "max" else (lambda a, b: a < b)
    best, best_trial = math.nan, -1
    violations = []
    for part in parts:
        violations += part.violations
        if part.sampled_best_trial >= 0 and (best_trial < 0 or better(part.sampled_best, best)):
            best, best_trial = part.sampled_best, part.sampled_best_trial
    climbed = best
    if best_trial >= 0 and hill_steps > 0:
        triple = sample_tuple(3, n, seed, best_trial, ensemble).matrices
        climbed, _ = iq.hill_climb(triple, p, head.objective, hill_steps, step)
        if iq._beyond(climbed, head.constant, head.objective):
            violations.append({"trial": best_trial, "ratio": climbed, "after_hill_climb": True})
    return iq.ConjectureSummary(head.p, n, trials, ensemble.value, int(seed), head.constant, head.objective,
                                best, best_trial, climbed, head.equal_case_ratio, violations, hill_steps)
