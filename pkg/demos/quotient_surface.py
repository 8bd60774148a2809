"""Build a quotient of the disk by a cyclic group and measure distances on it.

Run: python demos/quotient_surface.py
"""

from modlab import (DirichletPolygon, GridRegion, GroupPresentation, MobiusTransform, enumerate_orbit,
                    hyp_area, hyp_distance, min_orbit_separation, normal_neighborhood_radius,
                    project, quotient_distance, quotient_distance_info)

# one hyperbolic generator sending 0 to 0.5; words of length up to 6
group = GroupPresentation((MobiusTransform.translation(0.5),), 6)
orbit = enumerate_orbit(group, 0)
print(f"{len(orbit.points)} orbit points of 0, the farthest at |z| = "
      f"{max(abs(p) for p in orbit.points):.6f}")

gap = min_orbit_separation(0, group)
print("closest distinct orbit points are", gap, "apart")

p, q = project(0, group), project(0.25, group)
print("surface distance between the classes of 0 and 0.25:", quotient_distance(p, q))
print("disk distance between the representatives:       ", hyp_distance(0, 0.25))

# far along the axis the class of 0.45 is closer to a translate of 0 than to 0 itself
info = quotient_distance_info(p, project(0.45, group))
print(f"0 to class of 0.45: {info.value:.6f} via a word of length {info.word_length}, "
      f"versus disk distance {hyp_distance(0, 0.45):.6f}")

poly = DirichletPolygon.from_group(group, 0)
print("Dirichlet domain contains 0.1:", poly.contains(0.1), " contains 0.3:", poly.contains(0.3))
region = GridRegion.square(0.9, 200)
inside = region.with_mask(poly.raster(region) & region.mask)
print("hyperbolic area of the domain within the square window:", hyp_area(inside))

r = normal_neighborhood_radius(p)
print(f"the chart around 0 is isometric up to radius {r:.6f} (half the gap is {gap / 2:.6f})")
