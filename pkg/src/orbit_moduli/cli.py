"""Command line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 conjecture violation found.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Sequence

from . import counterex as cx
from . import harness as hn
from . import orbit as ob
from .errors import OrbitModuliError
from .matcore import DEFAULT_TOL, Tolerances
from .sampling import SEED_LIMIT, Ensemble
from .serialize import certificate_from_dict, certificate_to_dict, dumps, matrix_from_dict

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2, 3
SEED_ENV = "ORBIT_MODULI_SEED"
DEFAULT_SEED = 20240229

SUITES = {
    "orbit": (hn.CERT_OPS, ()),
    "euler": (("euler_hadamard_orbit", "euler_fourier3_orbit", "euler_fourier4_orbit", "euler_modulus_orbit"),
              ("cm_pp", "cm_qp", "weak", "mixed_euler", "euler_norm", "euler_weyl", "kyfan")),
    "thompson": (("thompson_square", "thompson_rect", "qsym_thompson", "sqrt_two_orbit"), ()),
    "clarkson": ((), ("cm_pp", "cm_qp", "akc", "mixed_akc", "mixed_euler", "kyfan")),
    "weyl": ((), ("weyl_qsym", "euler_weyl")),
    "all": (hn.CERT_OPS, tuple(hn.FAMILIES)),
}

DECOMPOSE_OPS = {
    "hadamard": (ob.euler_hadamard_orbit, 3, False),
    "fourier3": (ob.euler_fourier3_orbit, 3, False),
    "fourier4": (ob.euler_fourier4_orbit, 3, False),
    "thompson-rect": (ob.thompson_rect, 2, False),
    "thompson-square": (ob.thompson_square, 2, False),
    "qsym": (ob.qsym_thompson, 2, False),
    "sqrt-two": (ob.sqrt_two_orbit, 2, False),
    "euler-modulus": (ob.euler_modulus_orbit, 3, False),
    "pythagoras": (ob.partitioned_pythagoras, 1, True),
    "isometry-decompose": (ob.isometry_decompose_psd, 1, True),
}


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        seed = int(raw, 0)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None
    if not 0 <= seed < SEED_LIMIT:
        raise UsageError(f"{SEED_ENV} must be in [0, 2^64)")
    return seed


def _seed(text: str) -> int:
    try:
        seed = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= seed < SEED_LIMIT:
        raise argparse.ArgumentTypeError("seed must be in [0, 2^64)")
    return seed


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _exponent(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid exponent {text!r}") from None
    if not (0 < v < float("inf")):
        raise argparse.ArgumentTypeError(f"exponent must be positive and finite, got {text!r}")
    return v


def _nonneg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid tolerance {text!r}") from None
    if not (0 <= v < float("inf")):
        raise argparse.ArgumentTypeError(f"tolerance must be finite and >= 0, got {text!r}")
    return v


def _add_common(sp: argparse.ArgumentParser, formats: Sequence[str]):
    sp.add_argument("--seed", type=_seed, default=None,
                    help=f"base seed (default: ${SEED_ENV} or {DEFAULT_SEED})")
    sp.add_argument("--format", choices=formats, default=formats[0])
    sp.add_argument("--output", "-o", default=None, help="write here instead of stdout")
    sp.add_argument("--psd-slack", type=_nonneg, default=DEFAULT_TOL.psd_slack)
    sp.add_argument("--iso-defect", type=_nonneg, default=DEFAULT_TOL.isometry_defect)
    sp.add_argument("--recon", type=_nonneg, default=DEFAULT_TOL.recon)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orbit-moduli",
                                     description="Orbit certificates and Schatten-norm inequality checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="seeded sweeps of certificates and inequalities")
    v.add_argument("--suite", choices=sorted(SUITES), default="all")
    v.add_argument("--n", type=_positive_int, nargs="+", default=None,
                   help=f"matrix sizes, cycled over trials (default {list(hn.DEFAULT_SIZES)})")
    v.add_argument("--p", type=_exponent, nargs="+", default=None,
                   help=f"exponent grid (default {list(hn.DEFAULT_P_GRID)})")
    v.add_argument("--trials", type=_positive_int, default=100,
                   help="inequality trials per family; certificate instances per size")
    v.add_argument("--ensemble", choices=[e.value for e in Ensemble], default="ginibre")
    v.add_argument("--jobs", type=_positive_int, default=1)
    _add_common(v, ("json", "csv", "text", "jsonl"))

    c = sub.add_parser("counterexample", help="evaluate one of the fixed counterexamples")
    c.add_argument("name", choices=sorted(cx.COUNTEREXAMPLES) + ["all"])
    c.add_argument("--x", type=float, default=2.0, help="parallelogram parameter")
    c.add_argument("--p", type=_exponent, default=3.0, help="exponent for qsym and shift")
    c.add_argument("--n", type=_positive_int, default=1, help="block size for four-isometry")
    _add_common(c, ("json", "text"))

    d = sub.add_parser("decompose", help="build and re-verify an orbit certificate from JSON input")
    d.add_argument("op", choices=sorted(DECOMPOSE_OPS))
    d.add_argument("--input", "-i", required=True,
                   help='JSON file {"matrices": [...], "n": block size (pythagoras, isometry-decompose)}')
    _add_common(d, ("json",))

    k = sub.add_parser("check", help="re-verify a certificate JSON file")
    k.add_argument("certificate")
    _add_common(k, ("json", "text"))

    e = sub.add_parser("explore", help="search for violations of the conjectured Euler constant")
    e.add_argument("--p", type=_exponent, nargs="+", default=[3.0])
    e.add_argument("--trials", type=_positive_int, default=10000)
    e.add_argument("--n", type=_positive_int, default=2)
    e.add_argument("--ensemble", choices=[x.value for x in Ensemble], default="ginibre")
    e.add_argument("--hill-steps", type=int, default=50)
    e.add_argument("--jobs", type=_positive_int, default=1)
    _add_common(e, ("json", "text"))
    return parser


def _tol(args) -> Tolerances:
    return Tolerances(psd_slack=args.psd_slack, isometry_defect=args.iso_defect, recon=args.recon)


# ---------------------------------------------------------------------------
# commands; each returns (exit code, json-able document, text rendering)


def cmd_verify(args) -> tuple[int, dict, str]:
    seed = default_seed() if args.seed is None else args.seed
    sizes = tuple(args.n) if args.n else hn.DEFAULT_SIZES
    ps = tuple(args.p) if args.p else hn.DEFAULT_P_GRID
    ops, families = SUITES[args.suite]
    tol = _tol(args)
    certs = hn.run_certificates(args.trials, seed, ops, sizes, tol, args.jobs) if ops else []
    aggregates, reports = [], []
    for fam in families:
        aggs, reps = hn.run_family(fam, args.trials, seed, ps, sizes, args.ensemble, args.jobs,
                                   keep_reports=args.format == "jsonl")
        aggregates += aggs
        reports += reps
    shift = []
    if args.suite in ("weyl", "all"):
        shift = hn.shift_core_reports(ps)
        aggregates += hn.merge_tables([hn.fold(shift, 3)])
        reports += [(r.name, 0, r) for r in shift]
    identity = None
    if args.suite in ("euler", "all"):
        identity = hn.euler_identity_sweep(args.trials, seed)

    problems = []
    for c in certs:
        if c.passed != c.count:
            problems.append(f"{c.op} n={c.n}: {c.count - c.passed} of {c.count} certificates failed")
    for a in aggregates:
        if a.unexpected_violations:
            problems.append(f"{a.name} p={a.p} n={a.n}: {a.unexpected_violations} violations")
    if identity is not None and identity["max_rel_residual"] > 1e-12:
        problems.append(f"Euler identity residual {identity['max_rel_residual']:.3e}")
    expected = [r for r in shift if r.verdict.value == "Violated"]

    doc = {
        "command": "verify", "suite": args.suite, "seed": seed, "trials": args.trials,
        "sizes": list(sizes), "p_grid": list(ps), "ensemble": args.ensemble,
        "tolerances": {"psd_slack": tol.psd_slack, "iso_defect": tol.isometry_defect, "recon": tol.recon},
        "certificates": certs, "inequalities": aggregates,
        "expected_violations": [dict(r.to_dict(), status="EXPECTED") for r in expected],
        "euler_identity": identity, "failures": problems, "ok": not problems,
    }
    # stable sort: ties keep the within-trial order
    doc["_reports"] = [r for _, _, r in sorted(reports, key=lambda row: row[:2])]
    lines = [f"suite {args.suite}  seed {seed}  trials {args.trials}  sizes {list(sizes)}"]
    for c in certs:
        lines.append(f"  cert {c.op:24s} n={c.n}  {c.passed}/{c.count} passed  "
                     f"rel.residual {c.max_rel_residual:.2e}  iso.defect {c.max_isometry_defect:.2e}")
    for a in aggregates:
        counts = " ".join(f"{k}={v}" for k, v in a.verdicts.items())
        tag = f"  ({a.expected_violations} EXPECTED)" if a.expected_violations else ""
        lines.append(f"  {a.name:22s} p={'-' if a.p is None else a.p!s:5s} n={a.n}  {counts}  "
                     f"min margin {a.min_margin:.3e}  max ratio {a.max_ratio:.6f}{tag}")
    for r in expected:
        lines.append(f"  EXPECTED Violated: truncated shift p={r.p} (j,k)=({r.extra['j']},{r.extra['k']}) "
                     f"lhs {r.lhs:.12f} > rhs {r.rhs:.12f}")
    if identity is not None:
        lines.append(f"  Euler identity max relative residual {identity['max_rel_residual']:.3e}")
    lines += [f"  FAIL {msg}" for msg in problems]
    lines.append("OK" if not problems else "FAILED")
    return (EXIT_OK if not problems else EXIT_FAIL), doc, "\n".join(lines)


def cmd_counterexample(args) -> tuple[int, dict, str]:
    tol = _tol(args)
    names = sorted(cx.COUNTEREXAMPLES) if args.name == "all" else [args.name]
    reports = []
    for name in names:
        fn = cx.COUNTEREXAMPLES[name]
        if name == "parallelogram":
            reports.append(fn(args.x, tol))
        elif name in ("qsym", "shift"):
            reports.append(fn(args.p, tol))
        elif name == "four-isometry":
            reports.append(fn(args.n, tol))
        else:
            reports.append(fn(tol))
    ok = all(r.confirmed for r in reports)
    lines = []
    for r in reports:
        lines.append(f"{r.name}: {r.verdict.value}")
        lines.append(f"  claim: {r.claim}")
        for key, val in r.quantities.items():
            lines.append(f"  {key} = {val!r}")
        for key, val in r.strict.items():
            lines.append(f"  strict: {key}  margin {val:.6e}")
        lines += [f"  note: {d}" for d in r.details]
    return (EXIT_OK if ok else EXIT_FAIL), {"command": "counterexample", "reports": reports}, "\n".join(lines)


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def cmd_decompose(args) -> tuple[int, dict, str]:
    fn, count, needs_n = DECOMPOSE_OPS[args.op]
    data = _read_json(args.input)
    if not isinstance(data, dict) or not isinstance(data.get("matrices"), list):
        raise UsageError('input must be an object with a "matrices" list')
    try:
        mats = [matrix_from_dict(m) for m in data["matrices"]]
    except ValueError as exc:
        raise UsageError(f"bad matrix in input: {exc}") from None
    if len(mats) != count:
        raise UsageError(f"{args.op} takes {count} matrices, got {len(mats)}")
    extra = []
    if needs_n:
        n = data.get("n")
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise UsageError(f'{args.op} needs a positive integer "n" in the input')
        extra.append(n)
    tol = _tol(args)
    cert = fn(*mats, *extra, tol=tol)
    report = ob.verify_certificate(cert, tol)
    doc = {"certificate": certificate_to_dict(cert), "verification": report}
    if not report.passed:
        return EXIT_FAIL, None, "certificate failed re-verification: " + "; ".join(report.failures)
    return EXIT_OK, doc, ""


def cmd_check(args) -> tuple[int, dict, str]:
    data = _read_json(args.certificate)
    if isinstance(data, dict) and "certificate" in data:
        data = data["certificate"]
    try:
        cert = certificate_from_dict(data)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = ob.verify_certificate(cert, _tol(args))
    text = f"{cert.label}: {'passed' if report.passed else 'FAILED'}  residual {report.residual:.3e}"
    text += "".join(f"\n  {f}" for f in report.failures)
    return (EXIT_OK if report.passed else EXIT_FAIL), {"verification": report}, text


def cmd_explore(args) -> tuple[int, dict, str]:
    seed = default_seed() if args.seed is None else args.seed
    if args.hill_steps < 0:
        raise UsageError("--hill-steps must be >= 0")
    summaries = [hn.run_explore(p, args.trials, seed, args.ensemble, args.n, args.hill_steps, jobs=args.jobs)
                 for p in args.p]
    found = any(s.violation_found for s in summaries)
    lines = []
    for s in summaries:
        lines.append(f"p={s.p}: constant {s.constant:.12f} ({s.objective} ratio), best {s.best:.12f} "
                     f"(sampled {s.sampled_best:.12f} at trial {s.sampled_best_trial}, "
                     f"hill-climbed {s.climbed_best:.12f}); A=B=C ratio {s.equal_case_ratio:.12f}")
        for v in s.violations:
            lines.append(f"  VIOLATION trial {v['trial']}: ratio {v['ratio']!r}")
    lines.append(summaries[0].grade)
    doc = {"command": "explore", "summaries": summaries}
    return (EXIT_VIOLATION if found else EXIT_OK), doc, "\n".join(lines)


COMMANDS = {
    "verify": cmd_verify, "counterexample": cmd_counterexample, "decompose": cmd_decompose,
    "check": cmd_check, "explore": cmd_explore,
}

CSV_FIELDS = ("name", "p", "n", "trials", "min_margin", "max_ratio", "verdict_counts")


def render(doc: dict, text: str, fmt: str) -> str:
    reports = doc.pop("_reports", [])
    if fmt == "text":
        return text + "\n"
    if fmt == "jsonl":
        return "".join(dumps(r) + "\n" for r in reports)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for a in doc["inequalities"]:
            counts = ";".join(f"{k}={v}" for k, v in a.verdicts.items())
            w.writerow([a.name, "" if a.p is None else repr(a.p), a.n, a.trials,
                        repr(a.min_margin), repr(a.max_ratio), counts])
        return buf.getvalue()
    return dumps(doc) + "\n"


def _emit(payload: str, path: str | None):
    if path is None:
        sys.stdout.write(payload)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(payload)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, doc, text = COMMANDS[args.command](args)
    except (UsageError, OrbitModuliError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if doc is None:
        print(text, file=sys.stderr)
        return code
    try:
        _emit(render(doc, text, args.format), args.output)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    if code == EXIT_FAIL and args.format != "text" and text:
        print(text.splitlines()[-1], file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
