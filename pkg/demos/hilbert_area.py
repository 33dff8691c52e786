"""Hilbert geometry of a tiled pants domain.

Takes the depth-4 hull of a random pants with hyperbolic boundaries as a
convex body, measures distances between translates of one interior point
and estimates the Busemann area of the central hexagon. The finite hull
sits inside the true domain, so its distances overestimate the true ones
and far translates fall outside it. The hexagon reaches close to the
boundary, where the area density blows up, so the standard error is large.
"""

import numpy as np

from cpm import ConvexBody, Region, build_pants, busemann_area, expand_orbit, hilbert_distance, sample_chart

rng = np.random.default_rng(4)
real = build_pants(sample_chart(rng, (Region.R,) * 3))
approx = expand_orbit(real, 4)
body = ConvexBody(approx.boundary_coords(), approx.chart)

tri = real.hexagon.triangles()[0]
x = tri.sum(axis=0)
g1 = real.gammas[0]
for k in (1, 2):
    gx = np.linalg.matrix_power(g1, k) @ x
    print(f"d(x, g1^{k} x) = {hilbert_distance(body, x, gx):.6f}")

corners = np.array([p.vec for p in expand_orbit(real, 0).boundary])
hexagon = ConvexBody(approx.chart.coords(corners), approx.chart)
est = busemann_area(body, hexagon, 10_000, seed=1)
print(f"Busemann area of the central hexagon: {est.value:.5f} +- {est.std_error:.5f}")
