"""Gluing pants realizations into a holonomy representation of a surface group.

Each pants j contributes primitive loops ``P{j}.g{i}`` (its boundary loop
at port i, conjugated into place); each non-separating gluing curve that
closes a cycle of the dual graph contributes a stable letter ``s{k}``.
The standard generators a_k, b_k, c_k, d_k are recorded as words in these
primitives, so twisting a curve only has to move primitives and re-evaluate.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import optimize

from . import words as W
from .classify import BoundaryInvariant, Region, Tag, classify, region_of
from .config import DEFAULT, Tolerances
from .errors import ConsistencyError, DomainError, RangeError, SpecError, UnsupportedClassError
from .pants import PantsChart, PantsRealization, build_pants
from .projective import ProjPoint, mat3

# swaps the first and third axis coordinates; det +1
J = np.array([[0.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0]])
MAX_TWIST = 50.0


@dataclass(frozen=True)
class TwistParams:
    u: float = 0.0
    v: float = 0.0


def twist_matrix(tw: TwistParams) -> np.ndarray:
    """T^u U^v = diag(e^(-u-v), e^(2v), e^(u-v))."""
    u, v = float(tw.u), float(tw.v)
    if not (math.isfinite(u) and math.isfinite(v)) or abs(u) > MAX_TWIST or abs(v) > MAX_TWIST:
        raise RangeError(f"twist ({u!r}, {v!r}) outside |u|, |v| <= {MAX_TWIST}")
    return np.diag([math.exp(-u - v), math.exp(2 * v), math.exp(u - v)])


def normalize_to_axis(m, tol: Tolerances = DEFAULT):
    """(g, d) with g m g^-1 = d = diag ascending, g unimodular.

    Columns of g^-1 are the eigenvectors in canonical point normalization,
    ordered by eigenvalue; an overall sign and scale fix det g = 1.
    """
    m = mat3(m)
    cls = classify(m, tol)
    if cls.tag != Tag.HYPERBOLIC:
        raise UnsupportedClassError(f"normalize_to_axis needs a hyperbolic element, got {cls.tag.value}")
    lp, l0, lm = cls.params
    cols = []
    for val in (lm, l0, lp):
        _, _, vt = np.linalg.svd(m - val * np.eye(3))
        cols.append(ProjPoint(vt[-1]).vec)
    v = np.column_stack(cols)
    det = np.linalg.det(v)
    v = np.sign(det) * v / np.cbrt(abs(det))
    g = np.linalg.inv(v)
    d = np.diag([lm, l0, lp])
    return g, d


def chart_dimension(g: int, p: int, b: int = 0) -> int:
    if min(g, p, b) < 0:
        raise DomainError("g, p, b must be non-negative")
    if 2 - 2 * g - p - b >= 0:
        raise DomainError(f"Euler characteristic {2 - 2 * g - p - b} is not negative")
    return 16 * g - 16 + 6 * p + 8 * b


# ---------------------------------------------------------------------------
# specification


@dataclass(frozen=True)
class PantsNode:
    id: object
    s: float = 1.0
    t: float = 1.0


@dataclass(frozen=True)
class Curve:
    id: object
    lam: float
    tau: float
    ends: tuple  # ((pants_id, port), (pants_id, port))
    u: float = 0.0
    v: float = 0.0


@dataclass(frozen=True)
class BoundaryPort:
    port: tuple
    lam: float
    tau: float


@dataclass(frozen=True)
class SurfaceSpec:
    g: int
    p: int
    b: int
    pants: tuple
    curves: tuple
    cusps: tuple = ()
    boundary: tuple = ()

    # -- JSON shape -----------------------------------------------------
    @classmethod
    def from_dict(cls, d: dict) -> "SurfaceSpec":
        try:
            pants = tuple(PantsNode(q["id"], float(q.get("s", 1.0)), float(q.get("t", 1.0))) for q in d["pants"])
            curves = tuple(
                Curve(c["id"], float(c["lambda"]), float(c["tau"]),
                      tuple((e[0], int(e[1])) for e in c["ends"]),
                      float(c.get("u", 0.0)), float(c.get("v", 0.0)))
                for c in d.get("curves", [])
            )
            cusps = tuple((c[0], int(c[1])) for c in d.get("cusps", []))
            boundary = tuple(
                BoundaryPort((q["port"][0], int(q["port"][1])), float(q["lambda"]), float(q["tau"]))
                for q in d.get("boundary", [])
            )
            spec = cls(int(d["g"]), int(d["p"]), int(d.get("b", 0)), pants, curves, cusps, boundary)
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise SpecError(f"malformed surface spec: {exc!r}") from None
        spec.validate()
        return spec

    def to_dict(self) -> dict:
        return {
            "g": self.g,
            "p": self.p,
            "b": self.b,
            "pants": [{"id": q.id, "s": q.s, "t": q.t, "ports": [1, 2, 3]} for q in self.pants],
            "curves": [
                {"id": c.id, "lambda": c.lam, "tau": c.tau, "u": c.u, "v": c.v, "ends": [list(e) for e in c.ends]}
                for c in self.curves
            ],
            "cusps": [list(c) for c in self.cusps],
            "boundary": [{"port": list(q.port), "lambda": q.lam, "tau": q.tau} for q in self.boundary],
        }

    def with_twist(self, curve_id, u, v) -> "SurfaceSpec":
        curves = tuple(replace(c, u=u, v=v) if c.id == curve_id else c for c in self.curves)
        return replace(self, curves=curves)

    def curve(self, curve_id) -> Curve:
        for c in self.curves:
            if c.id == curve_id:
                return c
        raise DomainError(f"no internal curve with id {curve_id!r}")

    def index(self, pants_id) -> int:
        for k, q in enumerate(self.pants):
            if q.id == pants_id:
                return k
        raise SpecError(f"unknown pants id {pants_id!r}")

    def validate(self, tol: Tolerances = DEFAULT) -> None:
        g, p, b = self.g, self.p, self.b
        if min(g, p, b) < 0 or 2 - 2 * g - p - b >= 0:
            raise SpecError(f"signature ({g}, {p}, {b}) needs negative Euler characteristic")
        if len(self.curves) != 3 * g - 3 + p + b:
            raise SpecError(f"expected {3 * g - 3 + p + b} curves, got {len(self.curves)}")
        if len(self.pants) != 2 * g - 2 + p + b:
            raise SpecError(f"expected {2 * g - 2 + p + b} pants, got {len(self.pants)}")
        if len(self.cusps) != p or len(self.boundary) != b:
            raise SpecError("cusp/boundary lists do not match the signature")
        ids = [q.id for q in self.pants]
        if len(set(map(repr, ids))) != len(ids):
            raise SpecError("duplicate pants ids")
        if len({repr(c.id) for c in self.curves}) != len(self.curves):
            raise SpecError("duplicate curve ids")
        used = []
        for c in self.curves:
            if len(c.ends) != 2:
                raise SpecError(f"curve {c.id!r} needs two ends")
            used.extend(c.ends)
            try:
                r = region_of(c.lam, c.tau, tol)
            except DomainError as exc:
                raise SpecError(f"curve {c.id!r}: {exc}") from None
            if r != Region.R:
                raise SpecError(f"curve {c.id!r} has region {r.value}, internal curves must be in R")
        used.extend(self.cusps)
        for q in self.boundary:
            used.append(q.port)
            try:
                r = region_of(q.lam, q.tau, tol)
            except DomainError as exc:
                raise SpecError(f"boundary {q.port!r}: {exc}") from None
            if r == Region.P:
                raise SpecError(f"boundary {q.port!r} is parabolic; list it as a cusp")
        for pid, port in used:
            self.index(pid)
            if port not in (1, 2, 3):
                raise SpecError(f"port {port!r} not in 1..3")
        keys = [(self.index(pid), port) for pid, port in used]
        if len(set(keys)) != len(keys) or len(keys) != 3 * len(self.pants):
            raise SpecError("every port must be used exactly once")
        _layout(self)  # connectivity


@dataclass(frozen=True)
class _Layout:
    order: tuple  # pants indices in BFS order
    parent: dict  # child index -> (curve index, parent index)
    tree: tuple  # curve indices that are tree edges
    hnn: tuple  # remaining curve indices
    children: dict


def _layout(spec: SurfaceSpec) -> _Layout:
    n = len(spec.pants)
    adj = {k: [] for k in range(n)}
    for ci, c in enumerate(spec.curves):
        a, b = (spec.index(e[0]) for e in c.ends)
        adj[a].append((ci, b))
        if b != a:
            adj[b].append((ci, a))
    seen = {0}
    order, parent, tree = [0], {}, []
    children = {k: [] for k in range(n)}
    queue = deque([0])
    while queue:
        k = queue.popleft()
        for ci, other in sorted(adj[k]):
            if other not in seen:
                seen.add(other)
                parent[other] = (ci, k)
                children[k].append(other)
                tree.append(ci)
                order.append(other)
                queue.append(other)
    if len(seen) != n:
        raise SpecError("the pants graph is disconnected")
    hnn = tuple(ci for ci in range(len(spec.curves)) if ci not in set(tree))
    return _Layout(tuple(order), parent, tuple(tree), hnn, children)


def _subtree(layout: _Layout, root: int) -> set:
    out, stack = set(), [root]
    while stack:
        k = stack.pop()
        out.add(k)
        stack.extend(layout.children[k])
    return out


# ---------------------------------------------------------------------------
# representation


def port_symbol(pants_index: int, port: int) -> str:
    return f"P{pants_index}.g{port}"


def stable_symbol(curve_index: int) -> str:
    return f"s{curve_index}"


@dataclass(frozen=True, eq=False)
class HolonomyRep:
    spec: SurfaceSpec
    primitives: dict  # symbol -> (3, 3)
    words: dict  # generator name -> Word, in presentation order
    generators: dict  # generator name -> (3, 3)
    cusps: dict  # c_k -> (pants id, port)
    boundaries: dict  # d_k -> (pants id, port)
    handles: dict  # k -> curve id
    relator_residual: float
    pants: tuple = field(default=(), repr=False)  # PantsRealization per pants

    @property
    def genus(self) -> int:
        return len(self.handles)

    def relator_word(self) -> W.Word:
        return relator_word(self.spec.g, len(self.cusps), len(self.boundaries))

    def port_image(self, pants_id, port) -> np.ndarray:
        return W.evaluate(W.gen(port_symbol(self.spec.index(pants_id), port)), self.primitives)

    def curve_images(self, curve_id):
        """Loop images at both ends of a curve, brought to a common basepoint.

        For a separating (tree) curve the product of the two is the identity;
        for a handle curve the second is conjugated by its stable letter.
        """
        ci = [c.id for c in self.spec.curves].index(curve_id)
        c = self.spec.curves[ci]
        y = self.port_image(*c.ends[0])
        z = self.port_image(*c.ends[1])
        sym = stable_symbol(ci)
        if sym in self.primitives:
            a = self.primitives[sym]
            z = a @ z @ W.inv3(a)
        return y, z


def relator_word(g: int, p: int, b: int = 0) -> W.Word:
    out = ()
    for k in range(1, g + 1):
        out = out + W.commutator(W.gen(f"a{k}"), W.gen(f"b{k}"))
    for k in range(1, p + 1):
        out = out + W.gen(f"c{k}")
    for k in range(1, b + 1):
        out = out + W.gen(f"d{k}")
    return out


def generator_names(g: int, p: int, b: int = 0) -> list:
    names = []
    for k in range(1, g + 1):
        names += [f"a{k}", f"b{k}"]
    return names + [f"c{k}" for k in range(1, p + 1)] + [f"d{k}" for k in range(1, b + 1)]


def relator_residual(generators: dict, g: int, p: int, b: int = 0) -> float:
    m = W.evaluate(relator_word(g, p, b), generators)
    return float(np.linalg.norm(m - np.eye(3)))


def _port_invariants(spec: SurfaceSpec, tol: Tolerances) -> dict:
    inv = {}
    for c in spec.curves:
        d = BoundaryInvariant(c.lam, c.tau, Region.R)
        inv[(spec.index(c.ends[0][0]), c.ends[0][1])] = d
        inv[(spec.index(c.ends[1][0]), c.ends[1][1])] = d.inverse()
    for pid, port in spec.cusps:
        inv[(spec.index(pid), port)] = BoundaryInvariant(1.0, 2.0, Region.P)
    for q in spec.boundary:
        inv[(spec.index(q.port[0]), q.port[1])] = BoundaryInvariant(q.lam, q.tau, region_of(q.lam, q.tau, tol))
    return inv


_INTERIOR = np.ones(3)  # centroid of the central triangle in pants coordinates


def _side_signs(g):
    w = g @ _INTERIOR
    return np.where(w < 0, -1.0, 1.0)


def _glue_conjugator(m_here, m_there, near, far, tol: Tolerances) -> np.ndarray:
    """H with H m_there H^-1 = m_here^-1, putting the far domain across the axis.

    Both loops are sent to the ascending diagonal frame; J swaps the ends
    of the axis so the far spectrum becomes the inverse of the near one,
    and a sign matrix (commuting with diagonals) picks the quadrant whose
    x/z signs match the near domain and whose y sign is opposite. The
    remaining diagonal freedom is the twist-bulge origin, fixed by
    :func:`_origin_diagonal`; ``near`` and ``far`` are the generators of
    the two pants in their own frames.
    """
    ga, _ = normalize_to_axis(m_here, tol)
    gb, _ = normalize_to_axis(m_there, tol)
    sa = _side_signs(ga)
    sb = _side_signs(gb)
    s = np.diag([sa[0] * sb[2], sa[1] * sb[1], sa[2] * sb[0]])
    if np.linalg.det(s) < 0:
        s = -s
    a = np.linalg.inv(ga)
    b = s @ J @ gb
    h = a @ _origin_diagonal(a, b, near, far) @ b
    return _refine_intertwiner(h, W.inv3(m_here), m_there)


def _refine_intertwiner(h, a, b) -> np.ndarray:
    """Nearest solution of h b = a h to h, rescaled to det 1.

    Eigenvector frames are only as accurate as their conditioning allows;
    projecting onto the solution space of the linear equation restores the
    relation to working precision.
    """
    eye = np.eye(3)
    op = np.kron(eye, b.T) - np.kron(a, eye)  # row-major vec of h b - a h
    _, _, vt = np.linalg.svd(op)
    basis = vt[-3:]
    x = basis.T @ (basis @ h.reshape(9))
    out = x.reshape(3, 3)
    return out / np.cbrt(np.linalg.det(out))


def _positive_pair(x):
    """exp(X/2), exp(-X/2) for the traceless symmetric X coded by x (5 numbers)."""
    X = np.array([[x[0], x[1], x[2]], [x[1], x[3], x[4]], [x[2], x[4], -x[0] - x[3]]])
    w, v = np.linalg.eigh(X / 2)
    return (v * np.exp(w)) @ v.T, (v * np.exp(-w)) @ v.T


def _origin_diagonal(a, b, near, far) -> np.ndarray:
    """Positive unimodular diagonal d fixing the zero of the twist coordinates.

    d is chosen, together with a global conjugation, to minimize the total
    squared norm of both pants' generators after gluing by h = a d b. When
    both pants preserve a conic this lands on the conic-matching gluing
    (zero bulge), and in general it keeps the glued group well scaled.
    """
    bi, ai = np.linalg.inv(b), np.linalg.inv(a)
    near = np.array([np.asarray(m, float) for m in near])
    far = np.array([a @ b @ m @ bi @ ai for m in far])
    # h m h^-1 = (a d a^-1)(a b m b^-1 a^-1)(a d^-1 a^-1); d enters linearly
    da = np.array([a @ np.diag(e) @ ai for e in np.eye(3)])

    def f(x):
        d = np.exp([x[0], x[1], -x[0] - x[1]])
        h = np.tensordot(d, da, 1)
        hi = np.tensordot(1.0 / d, da, 1)
        k, ki = _positive_pair(x[2:])
        tot = float(np.sum((k @ near @ ki) ** 2))
        tot += float(np.sum((k @ h @ far @ hi @ ki) ** 2))
        return math.log(tot)

    starts = [np.r_[u, -u, np.zeros(5)] for u in (0.0, 1.0, -1.0, 2.5, -2.5)]
    best = min((optimize.minimize(f, x0, method="BFGS", options={"gtol": 1e-9}) for x0 in starts),
               key=lambda r: r.fun)
    x = best.x
    return np.diag(np.exp([x[0], x[1], -x[0] - x[1]]))


def _item_word(item) -> W.Word:
    if item[0] == "port":
        return W.conj(item[2], W.gen(port_symbol(*item[1])))
    return W.commutator(item[1], item[2])


def _conj_item(c: W.Word, item):
    if item[0] == "port":
        return ("port", item[1], W.mul(c, item[2]), *item[3:])
    return ("handle", W.conj(c, item[1]), W.conj(c, item[2]), *item[3:])


def _presentation(spec: SurfaceSpec, layout: _Layout):
    """Rewrite the pants relations into [a1,b1]...[ag,bg] c... d... = 1.

    Items are ("port", (pants, port), conjugator) or ("handle", a, b, curve).
    """
    items = [("port", (0, i), ()) for i in (3, 2, 1)]
    curves = spec.curves
    for child in layout.order[1:]:
        ci, par = layout.parent[child]
        c = curves[ci]
        ends = [(spec.index(pid), port) for pid, port in c.ends]
        if ends[0][0] == par and ends[1][0] == child:
            here, there = ends[0], ends[1]
        else:
            here, there = ends[1], ends[0]
        k = next(i for i, it in enumerate(items) if it[0] == "port" and it[1] == here)
        cyc = [3, 2, 1]
        r = cyc.index(there[1])
        rot = cyc[r + 1:] + cyc[:r]  # the two other ports, cyclically after `there`
        new = [("port", (child, q), items[k][2]) for q in rot]
        items[k:k + 1] = new

    # the relator is a cyclic word, so rotating the item list costs nothing
    for ci in layout.hnn:
        c = curves[ci]
        ykey = (spec.index(c.ends[0][0]), c.ends[0][1])
        zkey = (spec.index(c.ends[1][0]), c.ends[1][1])
        iy = next(i for i, it in enumerate(items) if it[0] == "port" and it[1] == ykey)
        iz = next(i for i, it in enumerate(items) if it[0] == "port" and it[1] == zkey)
        cy, cz = items[iy][2], items[iz][2]
        alpha = W.mul(cy, W.gen(stable_symbol(ci)), W.inverse(cz))
        yw, zw = _item_word(items[iy]), _item_word(items[iz])
        items = items[iy:] + items[:iy]
        iz = (iz - iy) % len(items)
        arc_m, arc_n = items[1:iz], items[iz + 1:]
        cost_m = sum(len(_item_word(it)) for it in arc_m)
        cost_n = sum(len(_item_word(it)) for it in arc_n)
        if cost_m <= cost_n:
            # y M z N = [alpha, z^-1] (z^-1 M z) N
            mid = [_conj_item(W.inverse(zw), it) for it in arc_m]
            items = [("handle", alpha, W.inverse(zw), ci)] + mid + arc_n
        else:
            # z N y M = [alpha^-1, y^-1] (y^-1 N y) M
            mid = [_conj_item(W.inverse(yw), it) for it in arc_n]
            items = [("handle", W.inverse(alpha), W.inverse(yw), ci)] + mid + arc_m

    cusp_keys = {(spec.index(pid), port) for pid, port in spec.cusps}

    def bubble(seq, is_front):
        # Y X -> X (X^-1 Y X) until every front-class item precedes the rest
        seq = list(seq)
        changed = True
        while changed:
            changed = False
            for i in range(len(seq) - 1):
                if not is_front(seq[i]) and is_front(seq[i + 1]):
                    x = seq[i + 1]
                    seq[i], seq[i + 1] = x, _conj_item(W.inverse(_item_word(x)), seq[i])
                    changed = True
        return seq

    def normal_form(seq):
        seq = bubble(seq, lambda it: it[0] == "handle")
        return bubble(seq, lambda it: it[0] == "handle" or it[1] in cusp_keys)

    candidates = [normal_form(items[r:] + items[:r]) for r in range(len(items))]
    return min(candidates, key=lambda seq: sum(len(_item_word(it)) for it in seq))


def _evaluate_all(words: dict, primitives: dict) -> dict:
    ev = W.Evaluator(primitives)
    return {k: ev(w) for k, w in words.items()}


def _assemble_untwisted(spec: SurfaceSpec, tol: Tolerances):
    layout = _layout(spec)
    inv = _port_invariants(spec, tol)
    pants = []
    for k, q in enumerate(spec.pants):
        chart = PantsChart(tuple(inv[(k, i)] for i in (1, 2, 3)), q.s, q.t)
        pants.append(build_pants(chart))
    place = {0: np.eye(3)}
    for child in layout.order[1:]:
        ci, par = layout.parent[child]
        c = spec.curves[ci]
        ends = [(spec.index(pid), port) for pid, port in c.ends]
        here = ends[0] if (ends[0][0] == par and ends[1][0] == child) else ends[1]
        there = ends[1] if here is ends[0] else ends[0]
        h = _glue_conjugator(pants[par].gammas[here[1] - 1], pants[child].gammas[there[1] - 1],
                             pants[par].gammas, pants[child].gammas, tol)
        place[child] = place[par] @ h
    prim = {}
    for k, real in enumerate(pants):
        cinv = W.inv3(place[k])
        for i in (1, 2, 3):
            prim[port_symbol(k, i)] = place[k] @ real.gammas[i - 1] @ cinv
    for ci in layout.hnn:
        c = spec.curves[ci]
        (ka, pa), (kb, pb) = ((spec.index(pid), port) for pid, port in c.ends)
        h = _glue_conjugator(pants[ka].gammas[pa - 1], pants[kb].gammas[pb - 1],
                             pants[ka].gammas, pants[kb].gammas, tol)
        prim[stable_symbol(ci)] = place[ka] @ h @ W.inv3(place[kb])
    k, kinv = _global_balance(list(prim.values()))
    prim = {name: k @ m @ kinv for name, m in prim.items()}
    for ci in layout.hnn:
        # conjugating by the placements costs accuracy; restore the relation
        c = spec.curves[ci]
        y, z = (prim[port_symbol(spec.index(pid), port)] for pid, port in c.ends)
        sym = stable_symbol(ci)
        prim[sym] = _refine_intertwiner(prim[sym], W.inv3(y), z)
    return layout, pants, prim


def _global_balance(mats) -> tuple:
    """Symmetric positive K (det 1) and its inverse, minimizing sum ||K m K^-1||_F^2.

    A global conjugation changes nothing up to conjugacy; it just keeps
    long words well scaled. The objective is convex along geodesics of
    positive matrices, so BFGS from the identity finds the unique optimum.
    """
    if len(mats) < 2:
        return np.eye(3), np.eye(3)

    mats = np.asarray(mats, dtype=float)

    def f(x):
        k, ki = _positive_pair(x)
        return math.log(float(np.sum((k @ mats @ ki) ** 2)))

    x = optimize.minimize(f, np.zeros(5), method="BFGS", options={"gtol": 1e-9}).x
    return _positive_pair(x)


def _finish(spec: SurfaceSpec, layout: _Layout, pants, prim: dict) -> HolonomyRep:
    items = _presentation(spec, layout)
    words, cusps, bnds, handles = {}, {}, {}, {}
    cusp_keys = {(spec.index(pid), port) for pid, port in spec.cusps}
    for it in items:
        if it[0] == "handle":
            k = len(handles) + 1
            words[f"a{k}"], words[f"b{k}"] = it[1], it[2]
            handles[k] = spec.curves[it[3]].id
    for it in items:
        if it[0] == "port":
            pid = spec.pants[it[1][0]].id
            if it[1] in cusp_keys:
                name = f"c{len(cusps) + 1}"
                cusps[name] = (pid, it[1][1])
            else:
                name = f"d{len(bnds) + 1}"
                bnds[name] = (pid, it[1][1])
            words[name] = _item_word(it)
    gens = _evaluate_all(words, prim)
    res = relator_residual(gens, len(handles), len(cusps), len(bnds))
    if res > 1e-6:
        raise ConsistencyError(f"relator residual {res:.3g} after assembly")
    return HolonomyRep(spec, prim, words, gens, cusps, bnds, handles, res, tuple(pants))


def assemble(spec: SurfaceSpec, tol: Tolerances = DEFAULT) -> HolonomyRep:
    """Holonomy of the glued surface; curve twists applied in curve order."""
    spec.validate(tol)
    base = replace(spec, curves=tuple(replace(c, u=0.0, v=0.0) for c in spec.curves))
    layout, pants, prim = _assemble_untwisted(base, tol)
    rep = _finish(base, layout, pants, prim)
    for c in spec.curves:
        if c.u or c.v:
            rep = twist_action(rep, c.id, TwistParams(c.u, c.v), tol)
    return rep


def twist_action(rep: HolonomyRep, curve_id, tw: TwistParams, tol: Tolerances = DEFAULT) -> HolonomyRep:
    """Twist-bulge deformation along one internal curve.

    The deformation matrix is T^u U^v in the axis frame of the curve's
    loop at its first end. A separating curve conjugates the primitives on
    one side; a handle curve multiplies its stable letter.
    """
    spec = rep.spec
    c = spec.curve(curve_id)
    if tw.u == 0 and tw.v == 0:
        return rep
    t = twist_matrix(tw)
    ci = [x.id for x in spec.curves].index(curve_id)
    layout = _layout(spec)
    y = rep.port_image(*c.ends[0])
    g, _ = normalize_to_axis(y, tol)
    w = np.linalg.inv(g) @ t @ g
    winv = np.linalg.inv(g) @ np.diag(1.0 / np.diag(t)) @ g
    prim = dict(rep.primitives)
    if ci in layout.hnn:
        s = stable_symbol(ci)
        prim[s] = w @ prim[s]
    else:
        child = next(k for k, (e, _) in layout.parent.items() if e == ci)
        side = _subtree(layout, child)
        far = spec.index(c.ends[1][0])
        m, minv = (w, winv) if far == child else (winv, w)
        for k in side:
            for i in (1, 2, 3):
                sym = port_symbol(k, i)
                prim[sym] = m @ prim[sym] @ minv
        for cj in layout.hnn:
            cc = spec.curves[cj]
            a_in = spec.index(cc.ends[0][0]) in side
            b_in = spec.index(cc.ends[1][0]) in side
            s = stable_symbol(cj)
            if a_in and b_in:
                prim[s] = m @ prim[s] @ minv
            elif a_in:
                prim[s] = m @ prim[s]
            elif b_in:
                prim[s] = prim[s] @ minv
    gens = _evaluate_all(rep.words, prim)
    res = relator_residual(gens, len(rep.handles), len(rep.cusps), len(rep.boundaries))
    new_spec = spec.with_twist(curve_id, c.u + tw.u, c.v + tw.v)
    return replace(rep, spec=new_spec, primitives=prim, generators=gens, relator_residual=res)


def parameter_count(spec: SurfaceSpec) -> int:
    return 4 * len(spec.curves) + 2 * len(spec.pants) + 2 * spec.b
