"""Cellular moves: replace a simplex of the manifold by the rest of the
boundary of a cone over it, verified exactly before application.

The central fact (cone replacement signs): writing the projection of the
apex q in the linear basis formed by the projected vertices of a simplex,
the replacement simplex obtained by substituting q for vertex i flips
orientation exactly when coefficient i is negative.  Choosing the apex so
that the origin lies inside the projected cone makes every coefficient
negative, turning a negative simplex into positive ones.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .rational import Rat, ZERO, ONE, random_rat
from .geometry import (
    AxisFrame,
    DegeneracyError,
    SignClass,
    affine_coords,
    barycenter,
    in_affine_hull,
    intersect_simplices,
    point_in_convex,
    simplex_sign,
    vscale,
)
from .linalg import solve_square
from .division import Division, splice_cell, validate_division


class MoveRejected(RuntimeError):
    pass


class MixedCrossingsError(ValueError):
    pass


class ApexSearchError(RuntimeError):
    pass


def cone_coefficients(simplex_pts, q, frame: AxisFrame):
    """Coefficients of pi(q) in the linear basis pi(p_0), ..., pi(p_k)."""
    cols = [frame.pi(p) for p in simplex_pts]
    mat = [[cols[j][i] for j in range(len(cols))] for i in range(len(cols[0]))]
    rhs = list(frame.pi(q))
    sol = solve_square(mat, rhs)
    if sol is None:
        raise DegeneracyError("projected simplex is degenerate")
    return sol


def cone_move_signs(simplex_pts, q, frame: AxisFrame):
    """Orientation classes of the k+1 replacement simplices of a cone move,
    read off the coefficient signs without building the replacements."""
    base = simplex_sign(simplex_pts, frame)
    if base is SignClass.DEGENERATE:
        raise DegeneracyError("cannot cone a degenerate simplex")
    out = []
    for c in cone_coefficients(simplex_pts, q, frame):
        if c == 0:
            out.append(SignClass.DEGENERATE)
        elif c < 0:
            out.append(base.flipped())
        else:
            out.append(base)
    return out


def replacement_tuples(simplex_pts, q):
    """Point tuples of the cone replacements, orientation absorbed.

    Replacement i substitutes q for vertex i; the (-1)^i chain sign is
    realised by a transposition of the first two entries when negative.
    """
    k = len(simplex_pts) - 1
    out = []
    for i in range(k + 1):
        facet = tuple(p for j, p in enumerate(simplex_pts) if j != i)
        rep = (q,) + facet
        if i % 2 == 1:
            rep = (rep[1], rep[0]) + rep[2:]
        out.append(rep)
    return out


@dataclass(frozen=True)
class CellularMove:
    target: int  # simplex index in the division being modified
    apex: tuple


@dataclass
class MoveReport:
    ok: bool
    reason: str = ""


def verify_cone_move(d: Division, frame: AxisFrame, move: CellularMove) -> MoveReport:
    """Exact admissibility: the cone is a nondegenerate disk meeting the
    manifold only in the target simplex, the origin projects into its
    interior, and every replacement keeps the opposite orientation class
    of the target (positive, for a negative target)."""
    sp = d.simplex_points(move.target)
    q = move.apex
    disk = (q,) + sp
    if affine_coords(q, sp) is not None or _affinely_dependent(disk):
        return MoveReport(False, "cone disk is degenerate")
    origin = tuple(ZERO for _ in range(frame.k + 1))
    cone_chart = [frame.pi(p) for p in disk]
    coords = affine_coords(origin, cone_chart)
    if coords is None or any(c <= 0 for c in coords):
        return MoveReport(False, "origin does not project inside the cone disk")
    for sgn in cone_move_signs(sp, q, frame):
        if sgn is not simplex_sign(sp, frame).flipped():
            return MoveReport(False, "a replacement simplex would not flip sign")
    disk_box = _box(disk)
    for t in range(len(d.simplices)):
        if t == move.target:
            continue
        tp = d.simplex_points(t)
        if _box_disjoint(disk_box, _box(tp)):
            continue
        inter = intersect_simplices(list(disk), list(tp))
        for w in inter:
            wc = affine_coords(w, disk)
            if wc is None or wc[0] != 0:
                return MoveReport(
                    False,
                    "cone disk meets simplex %d away from the base" % t,
                )
    return MoveReport(True)


def _box(pts):
    return (
        tuple(min(p[i] for p in pts) for i in range(len(pts[0]))),
        tuple(max(p[i] for p in pts) for i in range(len(pts[0]))),
    )


def _box_disjoint(b1, b2):
    (lo1, hi1), (lo2, hi2) = b1, b2
    return any(h1 < l2 or h2 < l1 for l1, h1, l2, h2 in zip(lo1, hi1, lo2, hi2))


def _affinely_dependent(pts):
    from .geometry import affine_rank

    return affine_rank(pts) < len(pts) - 1


def apply_cone_move(
    d: Division, frame: AxisFrame, move: CellularMove, validate: bool = False
) -> Division:
    rep = verify_cone_move(d, frame, move)
    if not rep.ok:
        raise MoveRejected(rep.reason)
    sp = d.simplex_points(move.target)
    new = splice_cell(d, [move.target], replacement_tuples(sp, move.apex))
    if validate:
        vrep = validate_division(new)
        if not vrep.ok:
            raise MoveRejected("division invalid after move: %s" % vrep.violations[:3])
    return new


@dataclass
class ApexSearch:
    apex: tuple = None
    attempts: int = 0
    reason: str = ""

    @property
    def found(self):
        return self.apex is not None


def find_apex(
    d: Division,
    frame: AxisFrame,
    s: int,
    rng: random.Random,
    labels=None,
    base_point=None,
    direction=None,
    avoid_flats=(),
    t_tries: int = 10,
    v_doublings: int = 48,
) -> ApexSearch:
    """Search for a cone apex over simplex s.

    The projected apex sits at -t times an interior point of the projected
    simplex, so the origin lies inside the projected cone.  The vertical
    coordinate is pushed past every sheet of the manifold by doubling: above
    when the simplex only crosses over, below when only under.  Every
    candidate is checked exactly by verify_cone_move.
    """
    from .crossings import CrossingLabel, crossing_label

    sp = d.simplex_points(s)
    if labels is None:
        labels = set()
        for _, pt in _label_probe_points(d, frame, s):
            labels |= crossing_label(d, frame, pt, s)
    if CrossingLabel.OVER in labels and CrossingLabel.UNDER in labels:
        raise MixedCrossingsError("simplex %d has crossings of both types" % s)
    if direction is None:
        direction = -1 if CrossingLabel.UNDER in labels else 1
    vmax = max(abs(p[-1]) for sp_ in map(d.simplex_points, range(len(d.simplices))) for p in sp_)
    search = ApexSearch()
    for _ in range(t_tries):
        interior = _jittered_interior(sp, rng) if base_point is None else base_point
        t = ONE + random_rat(rng, Rat(1, 8), Rat(7, 8), denom_bound=64)
        head = vscale(-t, frame.pi_v(interior))
        pi_head = tuple(head[: frame.k + 1])
        if any(in_affine_hull(pi_head, flat_pts) for flat_pts in avoid_flats):
            continue
        if _pi_hits_manifold(d, frame, pi_head):
            continue
        v = (vmax + ONE) * direction
        for _ in range(v_doublings):
            q = tuple(head) + (v,)
            search.attempts += 1
            move = CellularMove(target=s, apex=q)
            rep = verify_cone_move(d, frame, move)
            if rep.ok:
                search.apex = q
                return search
            search.reason = rep.reason
            v = v * 2
    return search


def _jittered_interior(sp, rng):
    k1 = len(sp)
    weights = [ONE + random_rat(rng, ZERO, ONE, denom_bound=32) for _ in range(k1)]
    total = sum(weights, ZERO)
    dim = len(sp[0])
    return tuple(
        sum((w * p[i] for w, p in zip(weights, sp)), ZERO) / total for i in range(dim)
    )


def _label_probe_points(d, frame, s):
    """Extreme points of every double stratum touching simplex s."""
    from .crossings import pair_stratum

    sp = d.simplex_points(s)
    out = []
    for t in range(len(d.simplices)):
        if t == s:
            continue
        st = pair_stratum(d, frame, s, t)
        if st is None or st.contact_only:
            continue
        for x, _ in st.verts:
            out.append((t, x))
    return out


def _pi_hits_manifold(d, frame, pi_point):
    for t in range(len(d.simplices)):
        charts = [frame.pi(p) for p in d.simplex_points(t)]
        if any(
            pi_point[i] < min(c[i] for c in charts)
            or pi_point[i] > max(c[i] for c in charts)
            for i in range(len(pi_point))
        ):
            continue
        if point_in_convex(pi_point, charts):
            return True
    return False


def small_cell_around(
    d: Division,
    frame: AxisFrame,
    s: int,
    p,
    rng: random.Random,
    cell_pts=None,
    shrink_budget: int = 24,
    v_doublings: int = 48,
):
    """A scaled copy of a cell of simplex s around interior point p, with an
    apex whose projection is -t times the projection of p, such that the
    cone over the copy meets the manifold nowhere else.  Used to excise an
    isolated mixed-type point before the remaining cells are coned."""
    host = d.simplex_points(s) if cell_pts is None else tuple(cell_pts)
    coords = affine_coords(p, host)
    if coords is None or any(c <= 0 for c in coords):
        raise ApexSearchError("excision point must be interior to its cell")
    vmax = max(
        abs(pt[-1]) for sp_ in map(d.simplex_points, range(len(d.simplices))) for pt in sp_
    )
    t = ONE + random_rat(rng, Rat(1, 8), Rat(7, 8), denom_bound=64)
    head = vscale(-t, frame.pi_v(p))
    scale = Rat(1, 2)
    for _ in range(shrink_budget):
        cell = tuple(
            tuple(pc + scale * (vc - pc) for pc, vc in zip(p, vtx)) for vtx in host
        )
        v = vmax + ONE
        for _ in range(v_doublings):
            q = tuple(head) + (v,)
            if _excision_ok(d, frame, s, cell, q):
                return cell, q
            v = v * 2
        scale = scale / 2
    raise ApexSearchError("excision search budget exhausted at point %s" % (p,))


def _excision_ok(d, frame, s, cell, q):
    disk = (q,) + cell
    if _affinely_dependent(disk):
        return False
    origin = tuple(ZERO for _ in range(frame.k + 1))
    coords = affine_coords(origin, [frame.pi(pt) for pt in disk])
    if coords is None or any(c <= 0 for c in coords):
        return False
    disk_box = _box(disk)
    for t in range(len(d.simplices)):
        if t == s:
            continue
        tp = d.simplex_points(t)
        if _box_disjoint(disk_box, _box(tp)):
            continue
        if intersect_simplices(list(disk), list(tp)):
            return False
    # Against its own simplex the cone must cut out exactly the cell, which
    # holds as soon as the apex is off the simplex's affine hull.
    return affine_coords(q, d.simplex_points(s)) is None


def isolate_point_cells(d: Division, frame: AxisFrame, s: int, points, rng):
    """Small cells around isolated special points of simplex s, with verified
    apices and a triangulated remainder.

    Returns (small_cells, apices, remainder_cells); splicing small_cells +
    remainder_cells in place of simplex s yields a division where each point
    sits in the interior of its own cell, ready for its paired cone move.
    The cones over the small cells are pairwise disjoint.
    """
    from .division import triangulate_piece_like

    sp = d.simplex_points(s)
    points = [tuple(p) for p in points]
    if len(set(points)) != len(points):
        raise ApexSearchError("special points must be pairwise distinct")
    for p in points:
        coords = affine_coords(p, sp)
        if coords is None or any(c <= 0 for c in coords):
            raise ApexSearchError("special point not interior to the simplex")
    if not points:
        return [], [], [sp]
    plan = _separate_points(sp, points, rng)
    small_cells, apices, remainder = [], [], []
    for cell, owned in plan:
        if owned is None:
            remainder.append(cell)
            continue
        small, apex = small_cell_around(d, frame, s, owned, rng, cell_pts=cell)
        small_cells.append(small)
        apices.append(apex)
        remainder.extend(_band_cells(cell, small, sp, triangulate_piece_like))
    _check_disjoint_cones(small_cells, apices)
    return small_cells, apices, remainder


def _separate_points(sp, points, rng, budget=64):
    """Star-subdivide the simplex until each special point is interior to a
    unique cell.  Returns (cell, owned point or None) pairs."""
    queue = [(tuple(sp), list(points))]
    done = []
    attempts = 0
    while queue:
        cell, owned = queue.pop()
        if len(owned) == 0:
            done.append((cell, None))
            continue
        if len(owned) == 1 and _strictly_interior(owned[0], cell):
            done.append((cell, owned[0]))
            continue
        attempts += 1
        if attempts > budget:
            raise ApexSearchError("could not separate special points")
        z = _split_point(cell, owned, rng)
        children = replacement_tuples(cell, z)
        assignment = [[] for _ in children]
        ok = True
        for p in owned:
            hits = [i for i, ch in enumerate(children) if _strictly_interior(p, ch)]
            if len(hits) != 1:
                ok = False
                break
            assignment[hits[0]].append(p)
        if not ok:
            queue.append((cell, owned))  # retry with a fresh split point
            continue
        for ch, pts in zip(children, assignment):
            queue.append((ch, pts))
    return done


def _strictly_interior(p, cell):
    coords = affine_coords(p, cell)
    return coords is not None and all(c > 0 for c in coords)


def _split_point(cell, owned, rng):
    if len(owned) >= 2:
        a, b = owned[0], owned[1]
        mid = tuple((x + y) / 2 for x, y in zip(a, b))
    else:
        mid = barycenter(cell)
    center = barycenter(cell)
    jig = random_rat(rng, Rat(1, 16), Rat(3, 16), denom_bound=64)
    return tuple(m + jig * (c - m) for m, c in zip(mid, center))


def _band_cells(cell, small, parent, triangulate_piece_like):
    """Triangles covering cell minus the scaled copy, oriented like parent."""
    k1 = len(cell)
    out = []
    for i in range(k1):
        j = (i + 1) % k1
        quad = [cell[i], cell[j], small[j], small[i]]
        out.extend(triangulate_piece_like(quad, parent))
    return out


def _check_disjoint_cones(cells, apices):
    import itertools

    for (c1, q1), (c2, q2) in itertools.combinations(list(zip(cells, apices)), 2):
        if intersect_simplices([q1] + list(c1), [q2] + list(c2)):
            raise ApexSearchError("excision cones intersect; reseed required")
