"""Random search plus hill-climb against (3^(p-1) + 1) / 2^p."""

from orbit_moduli import harness as hn
from orbit_moduli import ineq as iq
from orbit_moduli.sampling import sample_tuple

for p in (1.5, 2.5, 3.0, 4.0):
    s = hn.run_explore(p, 2000, seed=7)
    print(f"p={p}: constant {s.constant:.8f}, {s.objective} ratio sampled {s.sampled_best:.8f}"
          f" (trial {s.sampled_best_trial}), after hill-climb {s.climbed_best:.8f},"
          f" A=B=C gives {s.equal_case_ratio:.8f}, violations {len(s.violations)}")
print(iq.EVIDENCE_NOTE)

# below p = 2 the reversed direction does not survive: 2x2 triples already
# undercut the constant (scalars do not, for p >= 1)
s = iq.conjecture_explore(1.5, 2000, seed=7, hill_steps=0)
print(f"p=1.5 trial {s.sampled_best_trial}: ratio {s.sampled_best:.6f} < {s.constant:.6f}")

# the climb from a random start drifts toward A = B = C
A, B, C = sample_tuple(3, 2, seed=3).matrices
best, (A1, B1, C1) = iq.hill_climb([A, B, C], 3.0, "max", steps=30)
print("climbed ratio", best, "spread", max(abs(A1 - B1).max(), abs(B1 - C1).max()))
