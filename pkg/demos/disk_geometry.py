"""Walk through distances, lengths and Möbius maps in the Poincaré disk.

Run: python demos/disk_geometry.py
"""

import numpy as np

from modlab import (Curve, MobiusTransform, comparison_constant, derivative_check, hyp_distance,
                    hyp_length, length_function)

print("Distance from the origin to 0.5 is", hyp_distance(0, 0.5), "; log 3 is", np.log(3))

# distances blow up near the boundary circle while chords stay bounded
for r in (0.9, 0.99, 0.999999):
    print(f"  h(0, {r}) = {hyp_distance(0, r):.6f}")

# a disk automorphism moves points around but keeps every distance
g = MobiusTransform.translation(0.6 - 0.3j)
z1, z2 = 0.1 + 0.2j, -0.4 + 0.05j
print("h(z1, z2) =", hyp_distance(z1, z2), " h(g z1, g z2) =", hyp_distance(g(z1), g(z2)))

# on a compact ball the Euclidean and hyperbolic metrics are comparable
c1 = comparison_constant(0.4)
print(f"On B(0, 0.4): {c1:.4f} * h <= |z1 - z2| <= h")

# a straight diameter is a geodesic, so its length equals the distance of its endpoints
diameter = Curve.segment(-0.5, 0.5, n=5)
print("length of [-0.5, 0.5]:", hyp_length(diameter), " distance:", hyp_distance(-0.5, 0.5))

# arc length as a function of the parameter, and its derivative against 2|a'|/(1-|a|^2)
arc = Curve.from_function(lambda t: 0.3 * np.exp(1j * t), 0, np.pi / 2, 64)
lf = length_function(arc)
print("hyperbolic length of a quarter circle of radius 0.3:", lf.total)
rep = derivative_check(lambda t: 0.3 * np.exp(1j * t), 0, np.pi / 2,
                       dalpha=lambda t: 0.3j * np.exp(1j * t))
print("finite-difference derivative matches the closed form to", rep.max_abs_deviation)
