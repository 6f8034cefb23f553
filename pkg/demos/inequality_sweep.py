"""A small seeded sweep over the inequality families, plus the sharp cases."""

from collections import Counter

from orbit_moduli import harness as hn
from orbit_moduli import ineq as iq
from orbit_moduli.sampling import sample_tuple

for family in sorted(hn.FAMILIES):
    aggs, _ = hn.run_family(family, 200, seed=9)
    verdicts = Counter()
    for a in aggs:
        verdicts.update(a.verdicts)
    worst = max(a.max_ratio for a in aggs)
    print(f"{family:12s} reports={sum(a.trials for a in aggs):6d}  max ratio={worst:.6f}  {dict(verdicts)}")

# the expected violations live in weyl_qsym at p > 2; the shift shows them exactly
for r in hn.shift_core_reports([2.0, 3.0]):
    print(f"shift p={r.p} (j,k)=({r.extra['j']},{r.extra['k']}): {r.lhs:.6f} vs {r.rhs:.6f} -> {r.verdict.value}",
          "" if r.guaranteed else "(not guaranteed)")

# A = B = -C makes the Clarkson-McCarthy forms tight
A = sample_tuple(1, 3, seed=1).matrices[0]
for p in (1.5, 3.0):
    r = iq.cm_euler_pp(A, A, -A, p)
    print(f"A=B=-C, p={p}: ratio {r.ratio:.12f} -> {r.verdict.value}")

sharp = hn.sharpness_reports(seed=1, sizes=(2,))
print("sharpness cases:", Counter(r.verdict.value for r in sharp))
