"""Default numerical tolerances, kept in one place."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    det: float = 1e-9  # |det - 1| accepted as unimodular
    inc: float = 1e-9  # incidence / collinearity after normalization
    cluster: float = 1e-7  # relative gap below which eigenvalues merge
    rank: float = 1e-7  # singular values below rank * ||m|| count as zero
    region: float = 1e-7  # relative slack for the quasi-hyperbolic curves
    parabolic: float = 1e-6  # |lambda - 1|, |tau - 2| for the cusp point
    elliptic: float = 1e-7  # |modulus - 1| for a rotation pair
    nilpotent: float = 1e-10  # (m - I)^3 test in the parabolic variety check
    trace: float = 1e-8  # slack on the trace >= 3 bound

    def with_overrides(self, **kw):
        return replace(self, **{k: float(v) for k, v in kw.items()})


DEFAULT = Tolerances()
