"""Braiding drivers: eliminate negative simplices by cellular moves until
every simplex is positive, i.e. the link is a closed braid.

The induction measure is the number of negative simplices.  One outer
iteration fully processes one negative simplex: optionally cut it into
single-crossing-type cells (excising isolated mixed-type points first),
then cone every resulting cell past the manifold.  Each move is verified
exactly before being applied, and general position is re-checked on the
affected simplices afterwards.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .rational import Rat, ZERO, ONE, random_rat
from .linalg import det_sign
from .geometry import AxisFrame, SignClass, affine_coords, barycenter
from .division import Division, splice_cell, validate_division, _segment_param
from .crossings import (
    CrossingLabel,
    crossing_label,
    general_position_check,
    perturb_to_general_position,
)
from .moves import (
    ApexSearchError,
    CellularMove,
    MoveRejected,
    apply_cone_move,
    find_apex,
    isolate_point_cells,
    replacement_tuples,
)


class UnsupportedScopeError(ValueError):
    """The (k, l) pair is outside the implemented scope."""


class BudgetExhausted(RuntimeError):
    def __init__(self, message, division=None):
        super().__init__(message)
        self.division = division


@dataclass
class Budgets:
    max_outer: int = 400
    max_cell_moves: int = 4000
    apex_retries: int = 6
    refine_rounds: int = 10
    perturb_eps: object = Rat(1, 8)
    gp_focus_only: bool = True

    def as_record(self):
        return (
            ("max_outer", self.max_outer),
            ("max_cell_moves", self.max_cell_moves),
            ("apex_retries", self.apex_retries),
            ("refine_rounds", self.refine_rounds),
            ("perturb_eps", self.perturb_eps),
        )


@dataclass
class BraidRun:
    initial: Division
    final: Division
    moves: list
    trace: list
    seed: int
    budgets: Budgets
    k: int = 0
    l: int = 0

    def assert_monotone(self):
        for a, b in zip(self.trace, self.trace[1:]):
            if b >= a:
                raise AssertionError("negative count did not strictly decrease")


def replay(initial: Division, moves) -> Division:
    """Re-apply a move log; used to audit certificates."""
    d = initial
    for rec in moves:
        kind = rec[0]
        if kind == "perturb":
            _, vid, _old, new = rec
            verts = list(d.vertices)
            verts[vid] = new
            d = Division(d.k, d.l, tuple(verts), d.simplices)
        elif kind == "subdivide":
            _, cell_pts, new_cells = rec
            s = _cell_index(d, cell_pts)
            d = splice_cell(d, [s], new_cells)
        elif kind == "cone":
            _, cell_pts, apex = rec
            s = _cell_index(d, cell_pts)
            d = splice_cell(d, [s], replacement_tuples(d.simplex_points(s), apex))
        else:
            raise ValueError("unknown move kind %r" % (kind,))
    return d


def _cell_index(d: Division, cell_pts) -> int:
    want = frozenset(cell_pts)
    for s in range(len(d.simplices)):
        if frozenset(d.simplex_points(s)) == want:
            return s
    raise KeyError("cell not present in division")


def braid(d: Division, frame: AxisFrame, seed: int, budgets: Budgets = None) -> BraidRun:
    """Dispatch to the (k, l)-appropriate strategy."""
    k, l = frame.k, frame.l
    if d.k != k or d.l != l:
        raise ValueError("division and frame disagree on (k, l)")
    rep = validate_division(d)
    if not rep.ok:
        raise ValueError("input is not a valid division: %s" % rep.violations[:3])
    budgets = budgets or Budgets()
    if k == 1 and l == 2:
        return braid_curve(d, frame, seed, budgets)
    if k == 2 and l == 2:
        return braid_surface(d, frame, seed, budgets)
    if l >= 3 and 2 * l >= k + 2:
        return braid_stable(d, frame, seed, budgets)
    raise UnsupportedScopeError(
        "braiding for (k=%d, l=%d) is out of scope; supported: "
        "(1,2), (2,2), and l>=3 with 2l>=k+2" % (k, l)
    )


def _establish_gp(d, frame, rng, budgets, moves):
    rep = general_position_check(d, frame)
    if rep.ok:
        return d
    d, log = perturb_to_general_position(d, frame, budgets.perturb_eps, rng.randrange(1 << 30))
    moves.extend(log)
    return d


def _labels_of(d, frame, s):
    from .moves import _label_probe_points

    labels = set()
    for _, x in _label_probe_points(d, frame, s):
        labels |= crossing_label(d, frame, x, s)
    return labels


def _cone_cell(d, frame, cell_pts, rng, budgets, moves, avoid_flats=()):
    """Find an apex for the division simplex with these points, verify, apply,
    and re-check general position near the new simplices."""
    last_reason = ""
    for _ in range(budgets.apex_retries):
        s = _cell_index(d, cell_pts)
        res = find_apex(d, frame, s, rng, avoid_flats=avoid_flats)
        if not res.found:
            last_reason = res.reason or "apex search exhausted"
            continue
        cand = apply_cone_move(d, frame, CellularMove(s, res.apex), validate=False)
        new_idx = set(range(len(cand.simplices) - frame.k - 1, len(cand.simplices)))
        rep = general_position_check(cand, frame, focus=new_idx, clauses="strata")
        if not rep.ok:
            last_reason = "general position lost: %s" % rep.violations[0][0]
            continue
        moves.append(("cone", tuple(cell_pts), res.apex))
        return cand
    raise BudgetExhausted(
        "could not cone cell after %d retries (%s)" % (budgets.apex_retries, last_reason),
        division=d,
    )


def braid_curve(d: Division, frame: AxisFrame, seed: int, budgets: Budgets = None) -> BraidRun:
    """k=1 in the plane times the axis line: cut each negative edge between
    crossings of different types, then cone each piece."""
    budgets = budgets or Budgets()
    rng = random.Random(seed)
    moves = []
    trace = []
    initial = d
    d = _establish_gp(d, frame, rng, budgets, moves)
    outer = 0
    while d.negative_indices(frame):
        outer += 1
        if outer > budgets.max_outer:
            raise BudgetExhausted("outer iteration budget exhausted", division=d)
        trace.append(len(d.negative_indices(frame)))
        s = d.negative_indices(frame)[0]
        pieces = _cut_edge_by_type(d, frame, s)
        if pieces is not None:
            cell_pts = d.simplex_points(s)
            d = splice_cell(d, [s], pieces)
            moves.append(("subdivide", tuple(cell_pts), tuple(pieces)))
        else:
            pieces = [d.simplex_points(s)]
        for piece in pieces:
            d = _cone_cell(d, frame, piece, rng, budgets, moves)
        if len(d.negative_indices(frame)) >= trace[-1]:
            raise BudgetExhausted("negative count failed to decrease", division=d)
    run = BraidRun(initial, d, moves, trace, seed, budgets, frame.k, frame.l)
    run.assert_monotone()
    return run


def _cut_edge_by_type(d, frame, s):
    """Sub-edges of a negative edge separated at midpoints between consecutive
    crossings of different types; None when no cut is needed."""
    from .moves import _label_probe_points

    a, b = d.simplex_points(s)
    located = []
    for _, x in _label_probe_points(d, frame, s):
        lab = crossing_label(d, frame, x, s)
        t = _segment_param(x, a, b)
        located.append((t, frozenset(lab)))
    located.sort(key=lambda item: item[0])
    cuts = []
    for (t1, l1), (t2, l2) in zip(located, located[1:]):
        if l1 != l2 and t1 != t2:
            cuts.append((t1 + t2) / 2)
    if not cuts:
        return None
    params = [ZERO] + cuts + [ONE]
    pieces = []
    for t1, t2 in zip(params, params[1:]):
        p1 = tuple(x + t1 * (y - x) for x, y in zip(a, b))
        p2 = tuple(x + t2 * (y - x) for x, y in zip(a, b))
        pieces.append((p1, p2))
    return pieces


def _triple_points_on(d, frame, s):
    """Isolated triple points lying on simplex s, with their label sets."""
    from .crossings import crossing_complex

    cc = crossing_complex(d, frame, focus={s})
    out = []
    for tr in cc.triples:
        if s not in tr.triple:
            continue
        if tr.dim != 0:
            raise BudgetExhausted("non-isolated triple stratum on a negative simplex", d)
        point = tr.verts[0][tr.triple.index(s)]
        labels = crossing_label(d, frame, point, s)
        out.append((point, labels))
    return out


def _midpoint_split(cell):
    """Four-way split of a triangle at edge midpoints, orientation kept."""
    a, b, c = cell
    mab = tuple((x + y) / 2 for x, y in zip(a, b))
    mbc = tuple((x + y) / 2 for x, y in zip(b, c))
    mca = tuple((x + y) / 2 for x, y in zip(c, a))
    return [(a, mab, mca), (mab, b, mbc), (mca, mbc, c), (mab, mbc, mca)]


def _surface_like_pass(d, frame, s, rng, budgets, moves):
    """Process one negative triangle: excise mixed triple points, refine the
    rest into single-type cells, cone everything."""
    labels = _labels_of(d, frame, s)
    sp = d.simplex_points(s)
    avoid = (tuple(frame.pi(p) for p in sp),)
    if len(labels) <= 1:
        return _cone_cell(d, frame, sp, rng, budgets, moves)
    mixed_points = [
        p for p, lab in _triple_points_on(d, frame, s)
        if CrossingLabel.OVER in lab and CrossingLabel.UNDER in lab
    ]
    small_cells, apices, remainder = isolate_point_cells(d, frame, s, mixed_points, rng)
    all_cells = list(small_cells) + list(remainder)
    d = splice_cell(d, [s], all_cells)
    moves.append(("subdivide", tuple(sp), tuple(all_cells)))
    for cell, apex in zip(small_cells, apices):
        idx = _cell_index(d, cell)
        cand = apply_cone_move(d, frame, CellularMove(idx, apex), validate=False)
        moves.append(("cone", tuple(cell), apex))
        d = cand
    work = list(remainder)
    cell_moves = 0
    while work:
        cell_moves += 1
        if cell_moves > budgets.max_cell_moves:
            raise BudgetExhausted("cell move budget exhausted", division=d)
        cell = work.pop(0)
        idx = _cell_index(d, cell)
        cell_labels = _labels_of(d, frame, idx)
        if len(cell_labels) <= 1:
            d = _cone_cell(d, frame, cell, rng, budgets, moves, avoid_flats=avoid)
            continue
        children = _midpoint_split(cell)
        d = splice_cell(d, [idx], children)
        moves.append(("subdivide", tuple(cell), tuple(children)))
        work.extend(children)
    return d


def braid_surface(d: Division, frame: AxisFrame, seed: int, budgets: Budgets = None) -> BraidRun:
    """k=2 surfaces: per negative triangle, excise isolated mixed-type triple
    points into small coned cells, split the remainder until each piece has a
    single crossing type, and cone each piece."""
    budgets = budgets or Budgets()
    rng = random.Random(seed)
    moves = []
    trace = []
    initial = d
    d = _establish_gp(d, frame, rng, budgets, moves)
    outer = 0
    while d.negative_indices(frame):
        outer += 1
        if outer > budgets.max_outer:
            raise BudgetExhausted("outer iteration budget exhausted", division=d)
        trace.append(len(d.negative_indices(frame)))
        s = d.negative_indices(frame)[0]
        d = _surface_like_pass(d, frame, s, rng, budgets, moves)
        if len(d.negative_indices(frame)) >= trace[-1]:
            raise BudgetExhausted("negative count failed to decrease", division=d)
    run = BraidRun(initial, d, moves, trace, seed, budgets, frame.k, frame.l)
    run.assert_monotone()
    return run


def braid_stable(d: Division, frame: AxisFrame, seed: int, budgets: Budgets = None) -> BraidRun:
    """Stable range l >= 3, 2l >= k+2: triple strata are isolated points, so
    the surface strategy applies; for l > k+1 the projection has no crossings
    at all and the loop degenerates to pure cone moves."""
    budgets = budgets or Budgets()
    if frame.l < 3 or 2 * frame.l < frame.k + 2:
        raise UnsupportedScopeError("stable strategy needs l>=3 and 2l>=k+2")
    rng = random.Random(seed)
    moves = []
    trace = []
    initial = d
    d = _establish_gp(d, frame, rng, budgets, moves)
    if frame.l > frame.k + 1:
        from .crossings import crossing_complex

        cc = crossing_complex(d, frame)
        if cc.doubles:
            raise ValueError(
                "projection of an l > k+1 embedding must have no crossings"
            )
    outer = 0
    while d.negative_indices(frame):
        outer += 1
        if outer > budgets.max_outer:
            raise BudgetExhausted("outer iteration budget exhausted", division=d)
        trace.append(len(d.negative_indices(frame)))
        s = d.negative_indices(frame)[0]
        labels = _labels_of(d, frame, s)
        if len(labels) <= 1:
            d = _cone_cell(d, frame, d.simplex_points(s), rng, budgets, moves)
        elif frame.k == 2:
            d = _surface_like_pass(d, frame, s, rng, budgets, moves)
        else:
            raise BudgetExhausted(
                "mixed-type negative simplex with k=%d is beyond the cell "
                "cutting implemented here" % frame.k,
                division=d,
            )
        if len(d.negative_indices(frame)) >= trace[-1]:
            raise BudgetExhausted("negative count failed to decrease", division=d)
    run = BraidRun(initial, d, moves, trace, seed, budgets, frame.k, frame.l)
    run.assert_monotone()
    return run


@dataclass
class SimplicialMap:
    """A closed oriented abstract k-manifold with a simplexwise-linear map to
    R^(k+1): simplices are ordered vertex-id tuples, images give each vertex's
    target point.  No embedding is assumed."""

    k: int
    simplices: tuple
    images: list

    def sign_of(self, s: int) -> SignClass:
        mat = [
            [self.images[v][i] for v in self.simplices[s]]
            for i in range(self.k + 1)
        ]
        sgn = det_sign(mat)
        if sgn > 0:
            return SignClass.POSITIVE
        if sgn < 0:
            return SignClass.NEGATIVE
        return SignClass.DEGENERATE

    def negative_indices(self):
        return [s for s in range(len(self.simplices)) if self.sign_of(s) is SignClass.NEGATIVE]


@dataclass
class MapRun:
    initial: SimplicialMap
    final: SimplicialMap
    rewrites: list
    trace: list
    seed: int


def positivize_map(m: SimplicialMap, seed: int, max_rounds: int = 64) -> MapRun:
    """Rewrite a simplexwise-linear map until every simplex is positive.

    Each negative simplex is star-subdivided at a fresh vertex mapped to
    -t times an interior point of the image simplex, which puts the origin
    inside the image cone and makes every child positive.  This is a map
    rewrite, not an isotopy: no disjointness checks are needed.
    """
    rng = random.Random(seed)
    simplices = list(m.simplices)
    images = list(m.images)
    rewrites = []
    trace = []
    current = SimplicialMap(m.k, tuple(simplices), list(images))
    for s in range(len(simplices)):
        tries = 0
        while current.sign_of(s) is SignClass.DEGENERATE:
            tries += 1
            if tries > 64:
                raise BudgetExhausted("could not perturb a degenerate image")
            for v in simplices[s]:
                old = images[v]
                images[v] = tuple(
                    c + random_rat(rng, Rat(-1, 64), Rat(1, 64), denom_bound=64)
                    for c in old
                )
                rewrites.append(("perturb-image", v, old, images[v]))
            current = SimplicialMap(m.k, tuple(simplices), list(images))
    rounds = 0
    while current.negative_indices():
        rounds += 1
        if rounds > max_rounds:
            raise BudgetExhausted("positivization budget exhausted")
        trace.append(len(current.negative_indices()))
        s = current.negative_indices()[0]
        ids = simplices[s]
        pts = [images[v] for v in ids]
        b = barycenter(pts)
        t = ONE + random_rat(rng, Rat(1, 8), Rat(7, 8), denom_bound=64)
        q = tuple(-t * c for c in b)
        w = len(images)
        images.append(q)
        children = []
        for i in range(len(ids)):
            child = tuple(w if j == i else ids[j] for j in range(len(ids)))
            if i % 2 == 1:
                child = (child[1], child[0]) + child[2:]
            children.append(child)
        simplices = simplices[:s] + simplices[s + 1 :] + children
        rewrites.append(("cone-rewrite", ids, q))
        current = SimplicialMap(m.k, tuple(simplices), list(images))
        for c in range(len(simplices) - len(ids), len(simplices)):
            if current.sign_of(c) is not SignClass.POSITIVE:
                raise AssertionError("cone rewrite produced a non-positive child")
    run = MapRun(m, current, rewrites, trace, seed)
    for a, b2 in zip(trace, trace[1:]):
        if b2 >= a:
            raise AssertionError("negative count did not strictly decrease")
    return run
