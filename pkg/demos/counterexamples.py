"""Walk through the fixed counterexamples and print the numbers that matter."""

import math

import numpy as np

from orbit_moduli import counterex as cx
from orbit_moduli import matcore as mc

# arithmetic symmetric modulus: the triangle inequality fails in operator norm
r = cx.sym_thompson_counterexample()
q = r.quantities
print("|| |X+Y|_sym || =", q["norm_sum"], " (3/sqrt 2 =", 3 / math.sqrt(2), ")")
print("|| |X|_sym ||   =", q["norm_X"], " (7/(2 sqrt 5) =", 7 / (2 * math.sqrt(5)), ")")
print("|| |Y|_sym ||   =", q["norm_Y"])
print("gap =", q["gap"], "->", r.verdict.value)

# the quadratic version is fine on the same pair
print("qsym certificate passes:", q["qsym_certificate_passed"])

# truncated shift: power means for p > 2 push mu_3 above the real/imaginary bound
for p in (2.0, 2.1, 3.0, 10.0):
    mu = mc.singular_values(mc.qsym_power(cx.SHIFT3, p))
    print(f"p={p:5}: mu = {np.round(mu, 6)}, 2^(-1/p) = {2 ** (-1 / p):.6f} vs 2^(-1/2) = {2 ** -0.5:.6f}")

# trace obstruction for Z_theta
for p in (2.1, 3.0, 4.0):
    r = cx.qsym_exponent_counterexample(p)
    print(f"p={p}: theta* = {r.quantities['theta_star']:.3e}, Phi = {r.quantities['phi']:.3e}")
theta = np.linspace(0.01, 3.1, 7)
print("Phi(theta, 3) along", np.round(theta, 2), ":", np.round([cx.phi(t, 3.0) for t in theta], 4))

# weighted parallelogram law outside [0, 1]
for x in (-1.0, 2.0, 1.0001):
    r = cx.parallelogram_counterexample(x)
    print(f"x={x}: ranks {r.quantities['lhs_rank']} vs {r.quantities['rhs_rank']},",
          f"trace residual {r.quantities['trace_identity_residual']:.1e} ->", r.verdict.value)

# four isometries cannot carry the Euler identity
for n in (1, 2, 3):
    print(f"n={n}: lambda_min(4I - 9P) =", cx.four_isometry_obstruction(n).quantities["margin"])
