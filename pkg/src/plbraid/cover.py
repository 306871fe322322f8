"""Branched-covering certification of all-positive links.

A positive link projects to the sphere of directions as a branched cover.
The sphere is never realized with irrational coordinates: membership of a
direction in a projected simplex's cone is an exact linear solve, so the
degree audit, local injectivity and branch multiplicities all stay rational.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .rational import Rat, ZERO, ONE, random_rat
from .linalg import det, det_sign, solve_square
from .geometry import (
    AxisFrame,
    SignClass,
    affine_coords,
    point_in_convex,
    simplex_sign,
    standard_form_vertices,
    vsub,
)
from .division import Division, delta_skeleton, euler_characteristic


class CertificationError(RuntimeError):
    pass


@dataclass
class PositivityReport:
    witnesses: list  # (simplex index, exact determinant value)
    counterexample: tuple = None  # (simplex index, SignClass)

    @property
    def ok(self):
        return self.counterexample is None


def _division_charts(d: Division, frame: AxisFrame):
    return [tuple(frame.pi(p) for p in d.simplex_points(s)) for s in range(len(d.simplices))]


def _map_charts(m):
    return [tuple(m.images[v] for v in simplex) for simplex in m.simplices]


def _chart_det(chart):
    return det([[p[i] for p in chart] for i in range(len(chart))])


def _verify_charts(charts):
    rep = PositivityReport(witnesses=[])
    for s, chart in enumerate(charts):
        value = _chart_det(chart)
        rep.witnesses.append((s, value))
        if value <= 0:
            cls = SignClass.DEGENERATE if value == 0 else SignClass.NEGATIVE
            rep.counterexample = (s, cls)
            return rep
    return rep


def verify_positive(d: Division, frame: AxisFrame) -> PositivityReport:
    """Exact determinant witness per simplex, or the first counterexample."""
    return _verify_charts(_division_charts(d, frame))


def verify_positive_map(m) -> PositivityReport:
    return _verify_charts(_map_charts(m))


@dataclass
class SphereMapDescription:
    """Pseudo-radial PL structure: per simplex, the spherical cell spanned by
    the rays through its projected vertices."""

    charts: list  # per simplex: tuple of direction points in R^(k+1)

    def __len__(self):
        return len(self.charts)


def pseudo_radial_map(d: Division, frame: AxisFrame) -> SphereMapDescription:
    rep = verify_positive(d, frame)
    if not rep.ok:
        raise CertificationError("pseudo-radial map needs an all-positive division")
    return SphereMapDescription(charts=_division_charts(d, frame))


def _fiber_count(charts, y):
    """Number of charts whose open positive cone contains direction y, or
    None when y touches a cone face (sample must be rejected)."""
    count = 0
    for chart in charts:
        mat = [[p[i] for p in chart] for i in range(len(chart))]
        sol = solve_square(mat, list(y))
        if sol is None:
            return None
        if any(c == 0 for c in sol):
            return None
        if all(c > 0 for c in sol):
            count += 1
    return count


def _sample_direction(rng, dim):
    while True:
        y = tuple(random_rat(rng, -1, 1, denom_bound=97) for _ in range(dim))
        if any(c != 0 for c in y):
            return y


def covering_degree(obj, frame: AxisFrame = None, samples: int = 20, seed: int = 0):
    """Constant fiber cardinality over sampled generic directions.

    Returns (n, audit) where audit lists each accepted direction with its
    count.  Non-constant counts raise CertificationError with the two
    offending directions.
    """
    if isinstance(obj, Division):
        rep = verify_positive(obj, frame)
        if not rep.ok:
            raise CertificationError("degree is only defined for positive links")
        charts = _division_charts(obj, frame)
        dim = frame.k + 1
    else:
        rep = verify_positive_map(obj)
        if not rep.ok:
            raise CertificationError("degree is only defined for positive maps")
        charts = _map_charts(obj)
        dim = obj.k + 1
    rng = random.Random(seed)
    audit = []
    rejected = 0
    while len(audit) < samples:
        y = _sample_direction(rng, dim)
        count = _fiber_count(charts, y)
        if count is None:
            rejected += 1
            if rejected > 64 * samples:
                raise CertificationError("could not sample generic directions")
            continue
        audit.append((y, count))
    counts = {c for _, c in audit}
    if len(counts) != 1:
        lo = min(audit, key=lambda a: a[1])
        hi = max(audit, key=lambda a: a[1])
        raise CertificationError(
            "fiber count not constant: %d at %s vs %d at %s"
            % (lo[1], lo[0], hi[1], hi[0])
        )
    n = counts.pop()
    if n <= 0:
        raise CertificationError("fiber count is zero; not a covering")
    return n, audit


def local_injectivity(d: Division, frame: AxisFrame, s: int, t: int) -> bool:
    """No ray from the origin meets the projections of two adjacent positive
    simplices at points outside their shared cell."""
    cs = [frame.pi(p) for p in d.simplex_points(s)]
    ct = [frame.pi(p) for p in d.simplex_points(t)]
    shared = set(cs) & set(ct)
    m1, m2 = len(cs), len(ct)
    A = []
    b = []
    for i in range(frame.k + 1):
        A.append([p[i] for p in cs] + [-p[i] for p in ct])
        b.append(ZERO)
    A.append([ONE] * m1 + [ZERO] * m2)
    b.append(ONE)
    verts = standard_form_vertices(A, b)
    if verts is None or not verts:
        return True
    for w in verts:
        sup_s = {cs[i] for i in range(m1) if w[i] != 0}
        sup_t = {ct[j] for j in range(m2) if w[m1 + j] != 0}
        if not (sup_s <= shared and sup_t <= shared):
            return False
    return True


def _ray_equal(u, w):
    """u and w span the same ray from the origin (exact, no normalization)."""
    n = len(u)
    for i in range(n):
        for j in range(i + 1, n):
            if u[i] * w[j] != u[j] * w[i]:
                return False
    dot = sum((a * b for a, b in zip(u, w)), ZERO)
    return dot > 0


def _plane_basis(u):
    """Two coordinate directions completing u to a basis of R^3."""
    best = max(range(3), key=lambda i: abs(u[i]))
    others = [i for i in range(3) if i != best]
    return others


def _winding_in_plane(cycle2d):
    """Winding number of a closed polygon in the plane around the origin,
    by signed crossings of the positive x-axis."""
    total = 0
    m = len(cycle2d)
    for i in range(m):
        (x1, y1), (x2, y2) = cycle2d[i], cycle2d[(i + 1) % m]
        if y1 == 0 or y2 == 0:
            raise CertificationError("winding sample hit a vertex; re-deriving")
        if (y1 < 0) == (y2 < 0):
            continue
        # x-coordinate where the segment crosses y = 0
        tpar = y1 / (y1 - y2)
        xc = x1 + tpar * (x2 - x1)
        if xc <= 0:
            continue
        total += 1 if y2 > y1 else -1
    return total


def _cycle_winding_around(u, anchors):
    """Winding of a direction cycle around the ray through u, computed by
    projecting along u to a coordinate plane and counting axis crossings.
    Retries with rotated plane coordinates when a vertex lands on the axis."""
    i, j = _plane_basis(u)
    # project each anchor to the plane orthogonal-ish to u: subtract the
    # u-component measured against u's dominant coordinate
    best = [c for c in range(3) if c not in (i, j)][0]
    cycle = []
    for a in anchors:
        # a - (a_best / u_best) * u kills the dominant coordinate
        lam = a[best] / u[best]
        p = tuple(ac - lam * uc for ac, uc in zip(a, u))
        cycle.append((p[i], p[j]))
    for rot in range(8):
        c, s = _rotation(rot)
        try:
            return _winding_in_plane([(c * x - s * y, s * x + c * y) for x, y in cycle])
        except CertificationError:
            continue
    raise CertificationError("could not compute a link winding number")


def _rotation(step):
    """Rational points on the unit circle via the tangent half-angle map."""
    t = Rat(step, step + 7)
    den = 1 + t * t
    return (1 - t * t) / den, (2 * t) / den


def _link_anchor_paths_division(d, frame, w):
    paths = []
    for s in range(len(d.simplices)):
        sp = d.simplex_points(s)
        if w in sp:
            rest = [p for p in sp if p != w]
            paths.append([vsub(p, w) for p in rest])
            continue
        coords = affine_coords(w, sp)
        if coords is None or any(c < 0 for c in coords):
            continue
        zeros = [i for i, c in enumerate(coords) if c == 0]
        if len(zeros) != 1:
            continue  # w interior (cannot happen when embedded) or a corner
        # w lies inside an edge: link arc runs endpoint -> far corner -> endpoint
        far = sp[zeros[0]]
        ends = [p for i, p in enumerate(sp) if i != zeros[0]]
        paths.append([vsub(ends[0], w), vsub(far, w), vsub(ends[1], w)])
    return paths


def _link_anchor_paths_map(m, w):
    paths = []
    for simplex in m.simplices:
        if w not in simplex:
            continue
        rest = [v for v in simplex if v != w]
        paths.append([("v", v) for v in rest])
    return paths


def _glue_paths(paths, same_end):
    """Chain paths into cycles by matching endpoints; returns anchor cycles."""
    paths = [list(p) for p in paths]
    cycles = []
    while paths:
        chain = paths.pop()
        closed = False
        while not closed:
            if same_end(chain[0], chain[-1]) and len(chain) > 2:
                closed = True
                break
            extended = False
            for idx, cand in enumerate(paths):
                if same_end(chain[-1], cand[0]):
                    chain = chain + cand[1:]
                elif same_end(chain[-1], cand[-1]):
                    chain = chain + list(reversed(cand))[1:]
                else:
                    continue
                paths.pop(idx)
                extended = True
                break
            if not extended:
                raise CertificationError("vertex link does not close up")
        cycles.append(chain[:-1])
    return cycles


@dataclass
class BranchPoint:
    vertex: object  # geometric point (division) or vertex id (map)
    direction: tuple
    multiplicity: int


@dataclass
class BranchData:
    sigma: list  # projected images of the (k-2)-skeleton
    points: list  # BranchPoint records

    @property
    def total_defect(self):
        return sum(bp.multiplicity - 1 for bp in self.points)


def branch_locus(obj, frame: AxisFrame = None) -> BranchData:
    """Branch images and upstairs local multiplicities (k=2).

    The multiplicity at a vertex is the winding number of its link's
    projected image around the ray through the vertex's own image.  k=1
    gives empty branch data (an honest covering).
    """
    if isinstance(obj, Division):
        if obj.k == 1:
            return BranchData(sigma=[], points=[])
        if obj.k != 2:
            raise CertificationError("branch locus implemented for k <= 2")
        rep = verify_positive(obj, frame)
        if not rep.ok:
            raise CertificationError("branch locus needs an all-positive division")
        sigma = [tuple(frame.pi(obj.point(v)) for v in f) for f in delta_skeleton(obj)]
        used = sorted({p for s in range(len(obj.simplices)) for p in obj.simplex_points(s)})
        points = []
        for w in used:
            u = frame.pi(w)
            paths = _link_anchor_paths_division(obj, frame, w)
            cycles = _glue_paths(paths, _ray_free_match)
            mult = 0
            for cyc in cycles:
                proj = [tuple(a[: frame.k + 1]) for a in cyc]
                mult += abs(_cycle_winding_around(u, proj))
            points.append(BranchPoint(vertex=w, direction=u, multiplicity=mult))
        return BranchData(sigma=sigma, points=points)
    # simplexwise-linear map
    m = obj
    if m.k != 2:
        raise CertificationError("branch locus implemented for k <= 2")
    rep = verify_positive_map(m)
    if not rep.ok:
        raise CertificationError("branch locus needs an all-positive map")
    verts = sorted({v for simplex in m.simplices for v in simplex})
    sigma = [m.images[v] for v in verts]
    points = []
    for w in verts:
        u = m.images[w]
        paths = _link_anchor_paths_map(m, w)
        cycles = _glue_paths(paths, lambda a, b: a == b)
        mult = 0
        for cyc in cycles:
            anchors = [vsub(m.images[v], u) for _, v in cyc]
            mult += abs(_cycle_winding_around(u, anchors))
        points.append(BranchPoint(vertex=w, direction=u, multiplicity=mult))
    return BranchData(sigma=sigma, points=points)


def _ray_free_match(a, b):
    return _ray_equal(a, b)


def riemann_hurwitz_check(chi: int, degree: int, branch: BranchData) -> bool:
    """chi(M) = 2n - sum over branch points of (multiplicity - 1)."""
    return chi == 2 * degree - branch.total_defect


@dataclass
class CoverCertificate:
    degree: int
    audit: list
    witnesses: list
    branch: BranchData
    chi: int = None
    rh_ok: bool = None


def certify(obj, frame: AxisFrame = None, samples: int = 20, seed: int = 0) -> CoverCertificate:
    """Full certification: positivity witnesses, degree audit, branch data,
    and (k=2) the Riemann-Hurwitz consistency identity."""
    if isinstance(obj, Division):
        rep = verify_positive(obj, frame)
        k = obj.k
    else:
        rep = verify_positive_map(obj)
        k = obj.k
    if not rep.ok:
        raise CertificationError(
            "certification refused: simplex %d is %s" % (rep.counterexample[0], rep.counterexample[1].value)
        )
    n, audit = covering_degree(obj, frame, samples=samples, seed=seed)
    if k == 2:
        branch = branch_locus(obj, frame)
        if isinstance(obj, Division):
            chi = euler_characteristic(obj)
        else:
            chi = _map_euler(obj)
        rh = riemann_hurwitz_check(chi, n, branch)
        if not rh:
            raise CertificationError(
                "Riemann-Hurwitz mismatch: chi=%d, degree=%d, defect=%d"
                % (chi, n, branch.total_defect)
            )
        return CoverCertificate(n, audit, rep.witnesses, branch, chi, rh)
    branch = BranchData(sigma=[], points=[])
    return CoverCertificate(n, audit, rep.witnesses, branch)


def _map_euler(m) -> int:
    verts = {v for s in m.simplices for v in s}
    edges = {frozenset(e) for s in m.simplices for e in zip(s, s[1:] + s[:1])}
    return len(verts) - len(edges) + len(m.simplices)


def winding_number(d: Division, frame: AxisFrame, seed: int = 0) -> int:
    """Signed generic-ray crossing count of a k=1 diagram around the origin;
    the independent oracle for the covering degree of curves."""
    if d.k != 1:
        raise CertificationError("winding number is a curve invariant")
    rng = random.Random(seed)
    edges = [tuple(frame.pi(p) for p in d.simplex_points(s)) for s in range(len(d.simplices))]
    for _ in range(256):
        r = _sample_direction(rng, 2)
        total = 0
        ok = True
        for (a, b) in edges:
            # segment a-b versus ray {t r : t > 0}
            den = r[0] * (b[1] - a[1]) - r[1] * (b[0] - a[0])
            if den == 0:
                da = a[0] * r[1] - a[1] * r[0]
                if da == 0:
                    ok = False
                    break
                continue
            s_par = (a[0] * (b[1] - a[1]) - a[1] * (b[0] - a[0])) / den
            u_par = (a[0] * r[1] - a[1] * r[0]) / den
            if s_par <= 0 or u_par <= 0 or u_par >= 1:
                if u_par == 0 or u_par == 1:
                    if s_par > 0:
                        ok = False
                        break
                continue
            total += 1 if den > 0 else -1
        if ok:
            return total
    raise CertificationError("no generic ray found for winding count")


def connected_components(d: Division):
    """Partition simplex indices by shared geometric vertices."""
    parent = list(range(len(d.simplices)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    point_owner = {}
    for s in range(len(d.simplices)):
        for p in d.simplex_points(s):
            if p in point_owner:
                ra, rb = find(point_owner[p]), find(s)
                parent[ra] = rb
            else:
                point_owner[p] = s
    comps = {}
    for s in range(len(d.simplices)):
        comps.setdefault(find(s), []).append(s)
    return list(comps.values())


def linking_number(d: Division, frame: AxisFrame):
    """Half the signed inter-component crossing count of a two-component
    k=1 diagram."""
    from .crossings import crossing_complex

    if d.k != 1:
        raise CertificationError("linking number is a curve invariant")
    comps = connected_components(d)
    if len(comps) != 2:
        raise CertificationError("linking number needs exactly two components")
    comp_of = {}
    for ci, comp in enumerate(comps):
        for s in comp:
            comp_of[s] = ci
    cc = crossing_complex(d, frame)
    total = 0
    for st in cc.doubles:
        i, j = st.pair
        if comp_of[i] == comp_of[j]:
            continue
        x, y = st.verts[0]
        over_idx, under_idx = (i, j) if x[-1] > y[-1] else (j, i)
        d_over = _edge_dir(d, frame, over_idx)
        d_under = _edge_dir(d, frame, under_idx)
        total += det_sign([[d_over[0], d_under[0]], [d_over[1], d_under[1]]])
    if total % 2 != 0:
        raise CertificationError("odd inter-component crossing sum")
    return total // 2


def _edge_dir(d, frame, s):
    a, b = (frame.pi(p) for p in d.simplex_points(s))
    return vsub(b, a)
