"""Projection crossings: double/triple/quadruple strata of pi_v, over/under
labels, general-position verification and seeded perturbation.

A double stratum for a simplex pair is the convex polytope of point pairs
(x, y), x on one simplex and y on the other, with equal pi_v-image.  It is
carried by its extreme points; by Lemma-B-style reasoning every decision the
braiding algorithms take only ever consults those finitely many points.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field

from .rational import Rat, ZERO, ONE, random_rat
from .geometry import (
    AxisFrame,
    SignClass,
    affine_coords,
    affine_rank,
    point_in_convex,
    simplex_sign,
    standard_form_vertices,
)
from .division import Division, validate_division


class CrossingLabel(enum.Enum):
    OVER = "over"
    UNDER = "under"


class PreconditionError(ValueError):
    pass


class CapabilityError(ValueError):
    pass


class PerturbationError(RuntimeError):
    pass


@dataclass(frozen=True)
class DoubleStratum:
    """Extreme-point data of one simplex pair's pi_v coincidence polytope."""

    pair: tuple
    verts: tuple  # ((x, y), ...) extreme points, x on pair[0], y on pair[1]

    @property
    def contact_only(self) -> bool:
        return all(x == y for x, y in self.verts)

    @property
    def x_points(self):
        return tuple(x for x, _ in self.verts)

    @property
    def dim(self) -> int:
        return affine_rank(self.x_points)

    def labels_for(self, which: int):
        """Crossing labels carried by the stratum on side `which` (0 or 1)."""
        labels = set()
        for x, y in self.verts:
            diff = x[-1] - y[-1] if which == 0 else y[-1] - x[-1]
            if diff > 0:
                labels.add(CrossingLabel.OVER)
            elif diff < 0:
                labels.add(CrossingLabel.UNDER)
        return labels


@dataclass(frozen=True)
class TripleStratum:
    triple: tuple
    verts: tuple  # ((x, y, z), ...) with common pi_v-image

    @property
    def x_points(self):
        return tuple(v[0] for v in self.verts)

    @property
    def dim(self) -> int:
        return affine_rank(self.x_points)


@dataclass
class CrossingComplex:
    division: Division
    frame: AxisFrame
    doubles: list = field(default_factory=list)
    triples: list = field(default_factory=list)
    quadruples: list = field(default_factory=list)  # witness point tuples

    def doubles_on(self, s: int):
        return [
            (st, st.pair.index(s))
            for st in self.doubles
            if s in st.pair and not st.contact_only
        ]

    def triples_on(self, s: int):
        return [t for t in self.triples if t.triple[0] == s]

    def labels_on(self, s: int):
        labels = set()
        for st, side in self.doubles_on(s):
            labels |= st.labels_for(side)
        return labels


def _proj_box(points, upto):
    return (
        tuple(min(p[i] for p in points) for i in range(upto)),
        tuple(max(p[i] for p in points) for i in range(upto)),
    )


def _boxes_disjoint(b1, b2):
    (lo1, hi1), (lo2, hi2) = b1, b2
    return any(h1 < l2 or h2 < l1 for l2, h1, l1, h2 in zip(lo2, hi1, lo1, hi2))


def _coincidence_system(frame, *simplex_pts):
    """Standard-form equalities: all simplices' pi_v-images agree, plus each
    barycentric block sums to one."""
    nv = frame.n - 1
    blocks = [len(pts) for pts in simplex_pts]
    total = sum(blocks)
    A, b = [], []
    first = simplex_pts[0]
    for other_idx in range(1, len(simplex_pts)):
        other = simplex_pts[other_idx]
        for c in range(nv):
            row = [ZERO] * total
            off = 0
            for j, p in enumerate(first):
                row[j] = p[c]
            off = sum(blocks[:other_idx])
            for j, p in enumerate(other):
                row[off + j] = -p[c]
            A.append(row)
            b.append(ZERO)
    off = 0
    for blk in blocks:
        row = [ZERO] * total
        for j in range(blk):
            row[off + j] = ONE
        A.append(row)
        b.append(ONE)
        off += blk
    return A, b


def _combine(coords, pts):
    dim = len(pts[0])
    return tuple(sum((c * p[i] for c, p in zip(coords, pts)), ZERO) for i in range(dim))


def pair_stratum(d: Division, frame: AxisFrame, i: int, j: int):
    """The double stratum of simplices i and j, or None when the projections
    are disjoint."""
    pi_, pj = d.simplex_points(i), d.simplex_points(j)
    A, b = _coincidence_system(frame, pi_, pj)
    verts = standard_form_vertices(A, b)
    if not verts:
        return None
    ki = len(pi_)
    out = []
    seen = set()
    for w in verts:
        x = _combine(w[:ki], pi_)
        y = _combine(w[ki:], pj)
        if (x, y) not in seen:
            seen.add((x, y))
            out.append((x, y))
    return DoubleStratum(pair=(i, j), verts=tuple(out))


def crossing_complex(d: Division, frame: AxisFrame, focus=None) -> CrossingComplex:
    """Exact double/triple/quadruple strata of the pi_v projection.

    With `focus` given (a set of simplex indices), only strata meeting the
    focus set are computed; GP maintenance inside the braiding loop uses
    this to stay O(m) per move.
    """
    m = len(d.simplices)
    for s in range(m):
        if simplex_sign(d.simplex_points(s), frame) is SignClass.DEGENERATE:
            raise PreconditionError("degenerate simplex %d in crossing_complex" % s)
    nv = frame.n - 1
    boxes = [_proj_box(d.simplex_points(s), nv) for s in range(m)]
    cc = CrossingComplex(division=d, frame=frame)
    pairs = itertools.combinations(range(m), 2)
    for i, j in pairs:
        if focus is not None and i not in focus and j not in focus:
            continue
        if _boxes_disjoint(boxes[i], boxes[j]):
            continue
        st = pair_stratum(d, frame, i, j)
        if st is not None and not st.contact_only:
            cc.doubles.append(st)
    _find_triples(d, frame, cc, focus)
    return cc


def _find_triples(d, frame, cc, focus=None):
    by_simplex = {}
    for st in cc.doubles:
        for s in st.pair:
            by_simplex.setdefault(s, set()).add(st.pair)
    done = set()
    for s, pairs in by_simplex.items():
        partners = sorted({t for pr in pairs for t in pr if t != s})
        for a, b in itertools.combinations(partners, 2):
            key = tuple(sorted((s, a, b)))
            if key in done:
                continue
            done.add(key)
            if focus is not None and not {s, a, b} & set(focus):
                continue
            ps, pa, pb = (
                d.simplex_points(s),
                d.simplex_points(a),
                d.simplex_points(b),
            )
            A, eq = _coincidence_system(frame, ps, pa, pb)
            verts = standard_form_vertices(A, eq)
            if not verts:
                continue
            ks, ka = len(ps), len(pa)
            triples = []
            seen = set()
            for w in verts:
                x = _combine(w[:ks], ps)
                y = _combine(w[ks : ks + ka], pa)
                z = _combine(w[ks + ka :], pb)
                if (x, y, z) not in seen:
                    seen.add((x, y, z))
                    triples.append((x, y, z))
            # A genuine triple needs three distinct preimages somewhere.
            if _all_coincide(triples):
                continue
            cc.triples.append(TripleStratum(triple=(s, a, b), verts=tuple(triples)))
    _find_quadruples(d, frame, cc)


def _all_coincide(triples):
    # The triple SET is empty iff some pairwise coincidence covers the whole
    # polytope (then at most two distinct preimages anywhere).
    for a, b in ((0, 1), (0, 2), (1, 2)):
        if all(v[a] == v[b] for v in triples):
            return True
    return False


def _find_quadruples(d, frame, cc):
    seen_sets = set()
    for tr in cc.triples:
        for c in range(len(d.simplices)):
            if c in tr.triple:
                continue
            key = tuple(sorted(set(tr.triple) | {c}))
            if key in seen_sets:
                continue
            pts = [d.simplex_points(s) for s in key]
            A, eq = _coincidence_system(frame, *pts)
            verts = standard_form_vertices(A, eq, limit=4)
            if not verts:
                continue
            blocks = [len(p) for p in pts]
            for w in verts:
                images = []
                off = 0
                for blk, sp in zip(blocks, pts):
                    images.append(_combine(w[off : off + blk], sp))
                    off += blk
                if len(set(images)) >= 4:
                    seen_sets.add(key)
                    cc.quadruples.append((key, tuple(images)))
                    break


def crossing_label(d: Division, frame: AxisFrame, p, s: int):
    """Labels of a point p on simplex s against every other pi_v sheet."""
    sp = d.simplex_points(s)
    if not point_in_convex(p, list(sp)):
        raise PreconditionError("query point is not on the stated simplex")
    labels = set()
    target = frame.pi_v(p)
    for t in range(len(d.simplices)):
        if t == s:
            continue
        tp = d.simplex_points(t)
        m = len(tp)
        A = []
        b = []
        for c in range(frame.n - 1):
            A.append([q[c] for q in tp])
            b.append(target[c])
        A.append([ONE] * m)
        b.append(ONE)
        verts = standard_form_vertices(A, b)
        if not verts:
            continue
        for w in verts:
            y = _combine(w, tp)
            if y == p:
                continue
            diff = p[-1] - y[-1]
            if diff > 0:
                labels.add(CrossingLabel.OVER)
            elif diff < 0:
                labels.add(CrossingLabel.UNDER)
    return labels


@dataclass
class GeneralPositionReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, clause, detail):
        self.violations.append((clause, detail))

    def __str__(self):
        if self.ok:
            return "general position holds"
        return "\n".join("%s: %s" % v for v in self.violations)


def _interior_coords(p, simplex_pts):
    coords = affine_coords(p, simplex_pts)
    return coords is not None and all(c > 0 for c in coords)


def general_position_check(
    d: Division,
    frame: AxisFrame,
    cc: CrossingComplex = None,
    focus=None,
    clauses: str = "all",
) -> GeneralPositionReport:
    """Per-clause verdicts appropriate to (k, l).

    k=1, l=2: isolated double points with interior preimages, no triples.
    k=2, l=2: vertex/hyperplane clause, double strata of dimension <= 1,
              isolated triple points interior to their simplices, no
              quadruples.
    2l >= k+2, l >= 3: double strata of dimension <= k-l+1, isolated
              interior triples, no quadruples.
    """
    k, l = frame.k, frame.l
    rep = GeneralPositionReport()
    for s in range(len(d.simplices)):
        if simplex_sign(d.simplex_points(s), frame) is SignClass.DEGENERATE:
            rep.add("degenerate", "simplex %d projects degenerately" % s)
    if not rep.ok:
        return rep
    if k == 1 and l == 2:
        pass
    elif k == 2 and l == 2:
        # The vertex/hyperplane clause only makes sense for triangulations:
        # a division with subdivision vertices necessarily has collinear
        # projected points, so the clause is restricted to full checks on
        # fresh input ("strata" mode skips it inside the braiding loop).
        if clauses == "all":
            _vertex_hyperplane_clause(d, frame, rep, focus)
    elif l >= 3 and 2 * l >= k + 2:
        pass
    else:
        raise CapabilityError(
            "general position checks for (k=%d, l=%d) are out of scope" % (k, l)
        )
    if cc is None:
        cc = crossing_complex(d, frame, focus=focus)
    max_double_dim = 0 if (k == 1 and l == 2) else (1 if (k == 2 and l == 2) else k - l + 1)
    for st in cc.doubles:
        if st.dim > max_double_dim:
            rep.add(
                "double-dimension",
                "double stratum of pair %s has dimension %d" % (st.pair, st.dim),
            )
    if k == 1 and l == 2:
        if cc.triples:
            rep.add("no-triples", "triple point among %s" % (cc.triples[0].triple,))
        _isolated_double_images(d, frame, cc, rep)
    else:
        for tr in cc.triples:
            if tr.dim > 0:
                rep.add(
                    "triple-isolated",
                    "triple stratum %s has dimension %d" % (tr.triple, tr.dim),
                )
                continue
            (x, y, z) = tr.verts[0]
            for point, s in zip((x, y, z), tr.triple):
                if not _interior_coords(point, d.simplex_points(s)):
                    rep.add(
                        "triple-interior",
                        "triple point of %s lies on the boundary of simplex %d"
                        % (tr.triple, s),
                    )
    if cc.quadruples:
        rep.add("no-quadruples", "quadruple point among %s" % (cc.quadruples[0][0],))
    return rep


def _isolated_double_images(d, frame, cc, rep):
    # Two isolated doubles sharing a projected image is a coincidence the
    # k=1 algorithms cannot tolerate (four preimages over one point).
    images = {}
    for st in cc.doubles:
        if st.dim != 0:
            rep.add(
                "isolated-doubles",
                "double stratum of pair %s is not a point" % (st.pair,),
            )
            continue
        x, y = st.verts[0]
        img = frame.pi_v(x)
        if img in images and images[img] != {st.pair}:
            rep.add(
                "quadruple-image",
                "crossings of %s and %s share a projected point"
                % (st.pair, images[img]),
            )
        images.setdefault(img, set()).add(st.pair)
        for point, s in zip((x, y), st.pair):
            if not _interior_coords(point, d.simplex_points(s)):
                rep.add(
                    "double-interior",
                    "crossing of pair %s touches the boundary of simplex %d"
                    % (st.pair, s),
                )


def _vertex_hyperplane_clause(d, frame, rep, focus=None):
    from .linalg import det_sign
    from .geometry import vsub

    used = sorted({v for s in d.simplices for v in s})
    for vid in used:
        p = d.point(vid)
        for s in range(len(d.simplices)):
            if focus is not None and s not in focus:
                continue
            sp = d.simplex_points(s)
            if p in sp or point_in_convex(p, list(sp)):
                continue
            cols = [frame.pi(q) for q in sp]
            px = frame.pi(p)
            mat = [list(vsub(c, px)) for c in cols]
            if det_sign(mat) == 0:
                rep.add(
                    "vertex-hyperplane",
                    "projection of vertex %d lies on the plane of simplex %d"
                    % (vid, s),
                )


def movable_vertices(d: Division):
    """Vertices that are corners of every simplex containing them (the only
    ones a cellular vertex move may touch)."""
    out = []
    used = sorted({v for s in d.simplices for v in s})
    for vid in used:
        p = d.point(vid)
        ok = True
        for s in range(len(d.simplices)):
            sp = d.simplex_points(s)
            if p in sp:
                continue
            if point_in_convex(p, list(sp)):
                ok = False
                break
        if ok:
            out.append(vid)
    return out


def perturb_to_general_position(
    d: Division,
    frame: AxisFrame,
    eps,
    seed: int,
    max_rounds: int = 12,
    inner_tries: int = 24,
):
    """Seeded rejection-sampled vertex nudges until general position holds.

    Every accepted nudge is a legal cellular move: the division re-validates
    and no previously non-degenerate simplex changes sign.  Returns the new
    division and the move log (empty when the input was already generic).
    """
    rng = random.Random(seed)
    eps = Rat(eps)
    log = []
    current = d
    for round_ in range(max_rounds):
        rep = general_position_check(current, frame)
        if rep.ok:
            return current, log
        bad = _violating_vertices(current, frame, rep)
        movable = set(movable_vertices(current))
        targets = [v for v in bad if v in movable]
        if not targets:
            targets = sorted(movable)
        step = eps / (2 ** round_)
        moved = False
        for vid in targets:
            nxt = _try_nudge(current, frame, vid, step, rng, inner_tries)
            if nxt is not None:
                log.append(("perturb", vid, current.point(vid), nxt.point(vid)))
                current = nxt
                moved = True
        if not moved:
            continue
    rep = general_position_check(current, frame)
    if rep.ok:
        return current, log
    raise PerturbationError(
        "perturbation budget exhausted; remaining violations:\n%s" % rep
    )


def _violating_vertices(d, frame, rep):
    simplices = set()
    for clause, detail in rep.violations:
        for tok in detail.replace("(", " ").replace(")", " ").replace(",", " ").split():
            if tok.isdigit():
                simplices.add(int(tok))
    out = set()
    for s in simplices:
        if s < len(d.simplices):
            out.update(d.simplices[s])
    return sorted(out)


def _try_nudge(d, frame, vid, step, rng, tries):
    old_signs = {}
    for s in range(len(d.simplices)):
        old_signs[s] = simplex_sign(d.simplex_points(s), frame)
    p = d.point(vid)
    for _ in range(tries):
        offset = tuple(random_rat(rng, -step, step, denom_bound=32) for _ in range(d.n))
        newp = tuple(a + b for a, b in zip(p, offset))
        verts = list(d.vertices)
        verts[vid] = newp
        cand = Division(d.k, d.l, tuple(verts), d.simplices)
        ok = True
        for s, sgn in old_signs.items():
            if sgn is SignClass.DEGENERATE:
                continue
            if simplex_sign(cand.simplex_points(s), frame) is not sgn:
                ok = False
                break
        if not ok:
            continue
        if not validate_division(cand).ok:
            continue
        return cand
    return None
