"""Glue pants into a once-punctured torus and deform it along its curve.

The assembled holonomy is audited, then pushed along the twist-bulge flow
of the decomposition curve. The relator and cusp stay exact while traces
of other words move; flowing back restores them.
"""

import numpy as np

from cpm import TwistParams, assemble, hom_p_audit, standard_spec, twist_action
from cpm import words as W

rep = assemble(standard_spec(1, 1))
report = hom_p_audit(rep, (1, 1))
print("generators:", sorted(rep.generators))
print("audit:", report.summary)

word = W.parse("a1 b1^-1")
ev = lambda r: float(np.trace(W.Evaluator(r.generators)(word)))  # noqa: E731
print(f"{'u':>5} {'v':>5} {'tr(a1 b1^-1)':>14} {'relator':>10}")
for u, v in [(0, 0), (0.5, 0), (1, 0), (0, 0.5), (0, 1), (1, 1)]:
    moved = twist_action(rep, 0, TwistParams(u, v))
    print(f"{u:5.1f} {v:5.1f} {ev(moved):14.6f} {moved.relator_residual:10.1e}")

back = twist_action(twist_action(rep, 0, TwistParams(1, 1)), 0, TwistParams(-1, -1))
print("round trip trace drift:", abs(ev(back) - ev(rep)))
