"""Average oscillation of a field over shrinking hyperbolic balls.

Run: python demos/mean_oscillation.py
"""

import numpy as np

from modlab import GridRegion, MobiusTransform, ScalarField, fmo_statistic

region = GridRegion.square(0.7, 256)
p0 = 0.2 + 0.1j
radii = [0.4, 0.2, 0.1, 0.05]


def show(name, field):
    values = ", ".join(f"{osc:.4f}" for _, osc in fmo_statistic(field, p0, radii))
    print(f"{name:28s} {values}")


print("radii (hyperbolic):", radii)
show("constant", ScalarField(region, np.full(region.shape, 2.0)))

# 0/1 field split by a geodesic through p0: each ball is halved, so the oscillation is 1/2
w = MobiusTransform.translation(p0).inverse()(region.centers)
show("geodesic half-plane indicator", ScalarField(region, (w.imag > 0).astype(float)))

# unbounded near p0 yet its oscillation shrinks with the radius
ll = np.log(np.log(1 + 1 / np.maximum(np.abs(region.centers - p0), 1e-12)) + 1)
show("log log singularity", ScalarField(region, ll))
