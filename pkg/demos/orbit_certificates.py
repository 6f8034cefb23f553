"""Build a few orbit certificates by hand and check them."""

import numpy as np

from orbit_moduli import matcore as mc
from orbit_moduli import orbit as ob
from orbit_moduli.sampling import sample_tuple
from orbit_moduli.serialize import certificate_to_dict, dumps

A, B, C = sample_tuple(3, 2, seed=42).matrices

# |A+B+C|^2 + |A|^2 + |B|^2 + |C|^2 == |A+B|^2 + |B+C|^2 + |C+A|^2
print("Euler identity defect:", mc.opnorm(ob.euler_sum(A, B, C) - ob.pairwise_sum(A, B, C)))

cert = ob.euler_hadamard_orbit(A, B, C)
rep = ob.verify_certificate(cert)
print(cert.label, len(cert.terms), "terms, residual", rep.residual, "passed", rep.passed)
print("block classes of the Hadamard conjugation:")
for row in ob.hadamard_block_classes():
    print("   ", row)

for build in (ob.euler_fourier3_orbit, ob.euler_fourier4_orbit):
    rep = ob.verify_certificate(build(A, B, C))
    print(rep.label, "residual", f"{rep.residual:.2e}", "max isometry defect", f"{rep.max_isometry_defect:.2e}")

# dominations: the gap U|A|U* + V|B|V* - |A+B| is psd
cert = ob.thompson_square(A, B)
gap = cert.orbit_sum() - cert.target
print("Thompson gap eigenvalues:", np.round(np.linalg.eigvalsh(gap), 6))

cert = ob.euler_modulus_orbit(A, B, C)
gap = cert.orbit_sum() - cert.target
print("Euler modulus gap eigenvalues:", np.round(np.linalg.eigvalsh(gap), 6))

# certificates serialize losslessly
text = dumps(certificate_to_dict(ob.sqrt_two_orbit(A.conj().T @ A, B.conj().T @ B)))
print("sqrt-two certificate JSON:", len(text), "bytes")
