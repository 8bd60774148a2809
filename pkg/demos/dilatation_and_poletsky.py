"""Check the dilatation-weighted modulus inequality for a few planar maps.

Run: python demos/dilatation_and_poletsky.py
"""

import numpy as np

from modlab import MapSample, annulus_radial_family, annulus_region, dilatation, poletsky_verify
from modlab.mapping import affine_map, mobius_map, radial_stretch

region = annulus_region(0.5, 256)
family = annulus_radial_family(0.1, 0.5, 720, n_vertices=33)

maps = {"Möbius (conformal)": mobius_map(0.15 + 0.05j, 0.3),
        "affine z + 0.5 conj(z)": affine_map(0.5),
        "radial stretch, alpha = 2": radial_stretch(2.0)}

for name, funcs in maps.items():
    ms = MapSample.from_analytic(region, *funcs)
    K = dilatation(ms).K[region.mask]
    rep = poletsky_verify(ms, family, region, mode="euclidean")
    print(f"{name}")
    print(f"  dilatation between {np.min(K):.4f} and {np.max(K):.4f}")
    print(f"  modulus of the image family {rep.lhs:.4f} <= weighted energy {rep.rhs:.4f}: "
          f"{'holds' if rep.passed else 'fails'} (relative margin {rep.relative_margin:.2%})")
