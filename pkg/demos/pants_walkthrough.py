"""From a pants chart to a picture of its developed domain.

Builds the cusped pants (every boundary parabolic, s = t = 1), prints the
hexagon invariants and the three generators, certifies the depth-3 orbit of
the fundamental triangles and writes an SVG next to this script (or to the
path given as the first argument).
"""

import sys
from pathlib import Path

import numpy as np

from cpm import (
    BoundaryInvariant, PantsChart, Region, build_pants, certify_convex, classify, expand_orbit, render_svg,
)

cusp = BoundaryInvariant(1.0, 2.0, Region.P)
real = build_pants(PantsChart((cusp, cusp, cusp), s=1.0, t=1.0))
sol = real.solution
print("rho    =", sol.rho)
print("sigma  =", (sol.sigma1, sol.sigma2))
for name, g in zip(("g1", "g2", "g3"), real.gammas):
    print(f"{name} ({classify(g).tag.value}):\n{np.round(g, 12)}")
print("relator |g3 g2 g1 - I| =", np.linalg.norm(real.gammas[2] @ real.gammas[1] @ real.gammas[0] - np.eye(3)))

approx = expand_orbit(real, 3)
cert = certify_convex(approx)
print(f"{len(approx.cells)} triangles, hull with {len(approx.boundary)} vertices")
print("certificate:", {k: v for k, v in cert.to_dict().items() if k in ("passed", "disjoint", "convexity_defect")})

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).with_suffix(".svg")
out.write_text(render_svg(approx, title="cusped pants, depth 3"), encoding="utf-8")
print("wrote", out)
