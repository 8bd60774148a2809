"""Compute the modulus of the radial curves crossing an annulus.

Run: python demos/ring_modulus.py
"""

from modlab import (admissibility_check, annulus_extremal_density, annulus_radial_family,
                    annulus_region, modulus, ring_modulus, upper_bound_via_density)

r, R = 0.1, 0.5
region = annulus_region(R, 256)
family = annulus_radial_family(r, R, 720)
print(f"exact modulus of the radial family of A({r}, {R}): {ring_modulus(r, R):.6f}")

for mode in ("euclidean", "hyperbolic"):
    res = modulus(family, region, mode)
    print(f"  {mode:10s} discrete modulus {res.value:.6f} after {res.iterations} iterations "
          f"(KKT residual {res.kkt_residual:.1e})")

# the optimizer's density is admissible by construction
res = modulus(family, region, "euclidean")
print("optimal density: smallest line integral",
      admissibility_check(family, res.density, "euclidean").min_integral)

# any admissible density gives an upper bound; the closed-form extremal one, rescaled so the
# discretized line integrals reach 1, is nearly tight
rho = annulus_extremal_density(region, r, R)
rho = rho.scaled(1 / admissibility_check(family, rho, "euclidean").min_integral)
print("upper bound from the extremal density:", upper_bound_via_density(family, rho, "euclidean"))
