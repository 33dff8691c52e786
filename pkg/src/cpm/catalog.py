"""Ready-made pants decompositions for small signatures.

Handy for tests and demos; any spec with the same gluing pattern works the
same way. Handles are glued inside a single pants (ports 1 and 2), so each
handle generator pair is as short as in the one-holed torus and long words
stay well conditioned.

Default parameters sit at the conic-preserving point of every pants, and
random specs are drawn in a neighbourhood of it. Far from that point the
glued matrices grow quickly, and long relator products lose precision.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .classify import BoundaryInvariant, Region
from .pants import conic_parameters, conic_tau
from .surface import SurfaceSpec

# (pants count, curve ends, cusp ports) for each supported (g, p)
_PATTERNS = {
    (0, 3): (1, [], [(0, 1), (0, 2), (0, 3)]),
    (1, 1): (1, [((0, 1), (0, 2))], [(0, 3)]),
    (0, 4): (2, [((0, 1), (1, 1))], [(0, 2), (0, 3), (1, 2), (1, 3)]),
    (1, 2): (2, [((0, 1), (0, 2)), ((0, 3), (1, 1))], [(1, 2), (1, 3)]),
    (2, 0): (2, [((0, 1), (0, 2)), ((1, 1), (1, 2)), ((0, 3), (1, 3))], []),
}

SIGNATURES = tuple(_PATTERNS)


def default_curve(k: int = 0) -> tuple:
    """A fixed conic-type (lambda, tau) pair, varied slightly with k."""
    lam = 0.2 - 0.03 * (k % 3)
    return lam, conic_tau(lam)


def standard_spec(g: int, p: int, rng: Optional[np.random.Generator] = None,
                  twists=None, jitter: float = 0.1, lam_range=(0.1, 0.25)) -> SurfaceSpec:
    """Spec for signature (g, p) with b = 0.

    Without ``rng`` every pants is conic-preserving. With it, curve lambdas
    are uniform in ``lam_range``, each tau moves off the conic value by up
    to ``jitter`` of the distance to the nearer region edge, and s, t are
    multiplied by exp(N(0, jitter)). ``twists`` optionally gives (u, v)
    per curve.
    """
    try:
        n_pants, ends, cusps = _PATTERNS[(g, p)]
    except KeyError:
        raise ValueError(f"no stored decomposition for signature ({g}, {p})") from None
    curves, port_lam = [], {}
    for k, (a, b) in enumerate(ends):
        if rng is None:
            lam, tau = default_curve(k)
        else:
            lam = float(rng.uniform(*lam_range))
            tau0 = conic_tau(lam)
            room = min(tau0 - 2 / math.sqrt(lam), lam + lam**-2 - tau0)
            tau = tau0 + jitter * room * float(rng.uniform(-1, 1))
        inv = BoundaryInvariant(lam, tau, Region.R).inverse()
        port_lam[tuple(a)], port_lam[tuple(b)] = lam, inv.lam
        u, v = (twists[k] if twists is not None else (0.0, 0.0))
        curves.append({"id": k, "lambda": lam, "tau": tau, "u": u, "v": v, "ends": [list(a), list(b)]})
    pants = []
    for k in range(n_pants):
        s, t = conic_parameters([port_lam.get((k, i), 1.0) for i in (1, 2, 3)])
        if rng is not None:
            s, t = s * math.exp(jitter * rng.normal()), t * math.exp(jitter * rng.normal())
        pants.append({"id": k, "s": s, "t": t, "ports": [1, 2, 3]})
    return SurfaceSpec.from_dict({
        "g": g, "p": p, "b": 0, "pants": pants, "curves": curves, "cusps": [list(c) for c in cusps], "boundary": [],
    })
