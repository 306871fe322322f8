"""Divisions of closed oriented PL manifolds.

A division (after Kamada) relaxes a triangulation: two k-simplices may meet
in a face of only one of them, so hanging vertices are legal.  The validator
checks the pairwise intersection condition exactly, plus closedness and
orientation coherence as a geometric chain condition (facet measures must
cancel in pairs within every supporting flat).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

from .rational import Rat, ZERO
from .linalg import det_sign
from . import geometry as geom
from .geometry import (
    AxisFrame,
    Flat,
    Polytope,
    SignClass,
    affine_coords,
    affine_rank,
    convex_hull_extremes,
    intersect_simplices,
    simplex_sign,
    volume_in_flat,
    vsub,
)


class LocalityClass(enum.Enum):
    INNER = "inner"
    OUTER = "outer"
    BOTH = "both"
    NEITHER = "neither"


@dataclass(frozen=True)
class Division:
    """A collection of oriented k-simplices over a shared vertex table."""

    k: int
    l: int
    vertices: tuple
    simplices: tuple

    @property
    def n(self) -> int:
        return self.k + self.l

    @property
    def frame(self) -> AxisFrame:
        return AxisFrame(self.k, self.l)

    def point(self, vid: int):
        return self.vertices[vid]

    def simplex_points(self, s: int):
        return tuple(self.vertices[v] for v in self.simplices[s])

    def sign_of(self, s: int, frame: AxisFrame = None) -> SignClass:
        return simplex_sign(self.simplex_points(s), frame or self.frame)

    def signs(self, frame: AxisFrame = None):
        return [self.sign_of(s, frame) for s in range(len(self.simplices))]

    def negative_indices(self, frame: AxisFrame = None):
        f = frame or self.frame
        return [
            s
            for s in range(len(self.simplices))
            if self.sign_of(s, f) is SignClass.NEGATIVE
        ]

    def bbox(self, s: int):
        pts = self.simplex_points(s)
        return (
            tuple(min(p[i] for p in pts) for i in range(self.n)),
            tuple(max(p[i] for p in pts) for i in range(self.n)),
        )

    def replace_simplices(self, remove, new_simplices, new_points=()):
        """New division with `remove` indices dropped, points appended and
        simplices (id tuples over the extended table) appended."""
        removed = set(remove)
        vertices = self.vertices + tuple(new_points)
        simplices = tuple(
            s for i, s in enumerate(self.simplices) if i not in removed
        ) + tuple(tuple(s) for s in new_simplices)
        return Division(self.k, self.l, vertices, simplices)

    def canonical(self) -> "Division":
        """Canonical relabeling: vertices sorted by coordinates, simplices
        given their lexicographically least even-permutation representative
        and sorted."""
        used = sorted(set(itertools.chain.from_iterable(self.simplices)))
        order = sorted(used, key=lambda v: self.vertices[v])
        remap = {old: new for new, old in enumerate(order)}
        verts = tuple(self.vertices[v] for v in order)
        simplices = sorted(
            _orientation_representative(tuple(remap[v] for v in s))
            for s in self.simplices
        )
        return Division(self.k, self.l, verts, tuple(simplices))


def _orientation_representative(simplex):
    best = None
    for perm in itertools.permutations(range(len(simplex))):
        if _perm_parity(perm) != 1:
            continue
        cand = tuple(simplex[i] for i in perm)
        if best is None or cand < best:
            best = cand
    return best


def _perm_parity(perm):
    parity = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, clen = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            parity = -parity
    return parity


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, clause: str, detail: str):
        self.violations.append((clause, detail))

    def __str__(self):
        if self.ok:
            return "valid division"
        return "\n".join("%s: %s" % v for v in self.violations)


def _boxes_disjoint(b1, b2):
    (lo1, hi1), (lo2, hi2) = b1, b2
    return any(h1 < l2 or h2 < l1 for l2, h1, l1, h2 in zip(lo2, hi1, lo1, hi2))


def pair_intersection(d: Division, i: int, j: int):
    """Extreme points of simplex i meet simplex j (possibly empty)."""
    return intersect_simplices(d.simplex_points(i), d.simplex_points(j))


def carrier_face(simplex_points, ipoints):
    """Vertex positions of the minimal face containing the given points, or
    None if some point has no barycentric coordinates (degenerate simplex)."""
    support = set()
    for p in ipoints:
        coords = affine_coords(p, simplex_points)
        if coords is None:
            return None
        support.update(i for i, c in enumerate(coords) if c != 0)
    return tuple(sorted(support))


def _face_equals(ipoints, face_points) -> bool:
    return set(ipoints) == set(face_points)


def validate_division(d: Division) -> ValidationReport:
    """Exact check of the division conditions.

    D1: pairwise intersections are contained in faces of both simplices and
        are a face of at least one of the pair (single-cell reading).
    D2: the boundary chain of the simplex collection vanishes geometrically,
        with two-sheet coverage (closed oriented manifold).
    D3: embeddedness is D1 applied with exact polytope intersections.
    """
    report = ValidationReport()
    m = len(d.simplices)
    for s in range(m):
        ids = d.simplices[s]
        if len(ids) != d.k + 1 or len(set(ids)) != len(ids):
            report.add("D1", "simplex %d has a malformed vertex tuple" % s)
            continue
        if affine_rank(d.simplex_points(s)) != d.k:
            report.add("D1", "simplex %d is geometrically degenerate" % s)
    if not report.ok:
        return report

    boxes = [d.bbox(s) for s in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if _boxes_disjoint(boxes[i], boxes[j]):
                continue
            ipts = pair_intersection(d, i, j)
            if not ipts:
                continue
            spi, spj = d.simplex_points(i), d.simplex_points(j)
            ci = carrier_face(spi, ipts)
            cj = carrier_face(spj, ipts)
            if len(ci) == d.k + 1 or len(cj) == d.k + 1:
                report.add(
                    "D1",
                    "simplices %d and %d overlap through an interior" % (i, j),
                )
                continue
            face_i = [spi[t] for t in ci]
            face_j = [spj[t] for t in cj]
            if not (_face_equals(ipts, face_i) or _face_equals(ipts, face_j)):
                report.add(
                    "D1",
                    "intersection of simplices %d and %d is a face of neither"
                    % (i, j),
                )
    _check_boundary_chain(d, report)
    return report


def oriented_facets(simplex):
    """Boundary facets of an oriented simplex with induced signs."""
    out = []
    for i in range(len(simplex)):
        facet = simplex[:i] + simplex[i + 1 :]
        out.append((facet, (-1) ** i))
    return out


def _check_boundary_chain(d: Division, report: ValidationReport):
    facets = []
    for s, simplex in enumerate(d.simplices):
        for facet, sgn in oriented_facets(simplex):
            facets.append((facet, sgn, s))

    # Fast path: combinatorial matching by vertex-id set.
    groups = {}
    for facet, sgn, s in facets:
        key = tuple(sorted(facet))
        groups.setdefault(key, []).append((facet, sgn, s))
    leftovers = []
    for key, members in groups.items():
        if len(members) == 2:
            (f1, s1, _), (f2, s2, _) = members
            par = _relative_parity(f1, f2)
            if par is not None and s1 * s2 * par == -1:
                continue
        leftovers.extend(members)
    if not leftovers:
        return

    # Geometric chain cancellation per supporting flat.
    flats = {}
    for facet, sgn, s in leftovers:
        pts = tuple(d.point(v) for v in facet)
        if affine_rank(pts) != d.k - 1:
            report.add("D2", "degenerate boundary facet of simplex %d" % s)
            continue
        flat = Flat(list(pts))
        flats.setdefault(flat.key(), (flat, []))[1].append((pts, sgn, s))
    for flat, members in flats.values():
        _check_flat_cancellation(d, flat, members, report)


def _relative_parity(f1, f2):
    """Parity of the permutation taking tuple f1 to f2; None if not equal as
    sets or with repeats."""
    if sorted(f1) != sorted(f2):
        return None
    perm = [f1.index(v) for v in f2]
    return _perm_parity(tuple(perm))


def _chart_weight(flat: Flat, pts, sgn):
    """Orientation weight of a facet in the flat's chart: +-1, or 0 when the
    facet has no (k-1)-content."""
    params = [flat.to_param(p) for p in pts]
    if any(p is None for p in params):
        return None
    if flat.dim == 0:
        return sgn
    mat = [list(vsub(p, params[0])) for p in params[1:]]
    return sgn * det_sign(mat)


def _check_flat_cancellation(d, flat, members, report):
    weighted = []
    for pts, sgn, s in members:
        w = _chart_weight(flat, pts, sgn)
        if w is None:
            report.add("D2", "facet of simplex %d escapes its flat" % s)
            return
        if w != 0:
            weighted.append((pts, w, s))
    if flat.dim == 0:
        total = sum(w for _, w, _ in weighted)
        if total != 0 or len(weighted) != 2:
            report.add(
                "D2",
                "vertex %s covered %d times with net orientation %d"
                % (str(weighted[0][0][0]) if weighted else "?", len(weighted), total),
            )
        return
    pos = [(pts, s) for pts, w, s in weighted if w > 0]
    neg = [(pts, s) for pts, w, s in weighted if w < 0]
    for side, name in ((pos, "positive"), (neg, "negative")):
        for (p1, s1), (p2, s2) in itertools.combinations(side, 2):
            inter = intersect_simplices(p1, p2)
            if inter and volume_in_flat(flat, inter) != 0:
                report.add(
                    "D2",
                    "same-side facet overlap between simplices %d and %d" % (s1, s2),
                )
                return
    for side, other in ((pos, neg), (neg, pos)):
        for pts, s in side:
            own = volume_in_flat(flat, list(pts))
            covered = ZERO
            for opts, _ in other:
                inter = intersect_simplices(pts, opts)
                if inter:
                    covered += volume_in_flat(flat, inter)
            if covered != own:
                report.add(
                    "D2",
                    "boundary facet of simplex %d is not doubly covered" % s,
                )
                return


def classify_locality(d: Division, s: int) -> LocalityClass:
    """Inner: every intersection with another simplex is a face of s.
    Outer: always a face of the other simplex."""
    if not 0 <= s < len(d.simplices):
        raise IndexError("simplex index out of range")
    inner = True
    outer = True
    sp = d.simplex_points(s)
    for t in range(len(d.simplices)):
        if t == s:
            continue
        ipts = pair_intersection(d, s, t)
        if not ipts:
            continue
        tp = d.simplex_points(t)
        ci = carrier_face(sp, ipts)
        ct = carrier_face(tp, ipts)
        if not _face_equals(ipts, [sp[x] for x in ci]):
            inner = False
        if not _face_equals(ipts, [tp[x] for x in ct]):
            outer = False
    if inner and outer:
        return LocalityClass.BOTH
    if inner:
        return LocalityClass.INNER
    if outer:
        return LocalityClass.OUTER
    return LocalityClass.NEITHER


def is_good_division(d: Division, frame: AxisFrame = None) -> bool:
    """True iff every negative simplex is outer (or both)."""
    frame = frame or d.frame
    for s in range(len(d.simplices)):
        if d.sign_of(s, frame) is SignClass.NEGATIVE:
            loc = classify_locality(d, s)
            if loc not in (LocalityClass.OUTER, LocalityClass.BOTH):
                return False
    return True


def delta_skeleton(d: Division):
    """The union of all (k-2)-faces, as deduplicated vertex-id tuples.

    Empty for k = 1 (the branch locus of a braided curve is empty).
    """
    if d.k < 2:
        return []
    faces = set()
    for simplex in d.simplices:
        for face in itertools.combinations(sorted(simplex), d.k - 1):
            faces.add(face)
    return sorted(faces)


def region_select(d: Division, s: int, which: str):
    """X: simplices disjoint from s.  Y: all simplices other than s (the
    closure of the complement).  Z: simplices meeting s in dimension <= k-2."""
    if not 0 <= s < len(d.simplices):
        raise IndexError("simplex index out of range")
    which = which.upper()
    if which not in ("X", "Y", "Z"):
        raise ValueError("region must be X, Y or Z")
    if which == "Y":
        return [t for t in range(len(d.simplices)) if t != s]
    out = []
    for t in range(len(d.simplices)):
        if t == s:
            continue
        ipts = pair_intersection(d, s, t)
        if which == "X":
            if not ipts:
                out.append(t)
        else:
            if not ipts or affine_rank(ipts) <= d.k - 2:
                out.append(t)
    return out


class LocalityError(ValueError):
    pass


class GeometryError(ValueError):
    pass


def subdivide_cell(d: Division, s: int, cuts) -> Division:
    """Replace an inner simplex by a cut-respecting triangulation.

    `cuts` is a list of (k-1)-dimensional chord polytopes (vertex tuples)
    inside the simplex; each chord must cross every piece it meets fully, so
    the pieces stay convex.  An empty cut list is the identity.
    """
    if not cuts:
        return d
    loc = classify_locality(d, s)
    if loc not in (LocalityClass.INNER, LocalityClass.BOTH):
        raise LocalityError("only inner simplices can be subdivided")
    sp = d.simplex_points(s)
    for chord in cuts:
        for p in chord:
            if not geom.point_in_convex(p, list(sp)):
                raise GeometryError("cut complex leaves the simplex")
    pieces = split_convex_by_chords(list(sp), cuts)
    tris = []
    for piece in pieces:
        tris.extend(triangulate_piece_like(piece, sp))
    return splice_cell(d, [s], tris)


def split_convex_by_chords(poly_points, chords):
    """Split a convex polytope by chord hyperplanes; returns convex pieces."""
    pieces = [list(poly_points)]
    for chord in chords:
        if affine_rank(chord) != affine_rank(poly_points) - 1:
            raise GeometryError("cut polytope has the wrong dimension")
        normal_fn = _chord_side_functional(list(chord), poly_points)
        new_pieces = []
        for piece in pieces:
            touched = intersect_simplices(piece, list(chord))
            vals = [normal_fn(p) for p in piece]
            if not touched or all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
                new_pieces.append(piece)
                continue
            lo = [p for p, v in zip(piece, vals) if v <= 0]
            hi = [p for p, v in zip(piece, vals) if v >= 0]
            boundary = _piece_hyperplane_section(piece, vals)
            lo_piece = convex_hull_extremes(lo + boundary)
            hi_piece = convex_hull_extremes(hi + boundary)
            new_pieces.extend([lo_piece, hi_piece])
        pieces = new_pieces
    return pieces


def _chord_side_functional(chord, context_points):
    """Affine functional vanishing on the chord's hyperplane, within the flat
    of the context polytope."""
    flat = Flat(list(context_points))
    base = flat.to_param(chord[0])
    rows = []
    for p in chord[1:]:
        c = flat.to_param(p)
        if c is None:
            raise GeometryError("cut polytope leaves the cell's flat")
        rows.append(list(vsub(c, base)))
    normal = geom._hyperplane_normal(
        [base] + [tuple(vadd_list(base, r)) for r in rows], flat.dim
    )
    if normal is None:
        raise GeometryError("cut polytope does not span a hyperplane")

    def fn(p):
        c = flat.to_param(p)
        if c is None:
            raise GeometryError("point off the cell's flat")
        return geom.vdot(normal, vsub(c, base))

    return fn


def vadd_list(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _piece_hyperplane_section(piece, vals):
    """Points where the piece's edges cross the functional's zero set."""
    out = [p for p, v in zip(piece, vals) if v == 0]
    for (p1, v1), (p2, v2) in itertools.combinations(list(zip(piece, vals)), 2):
        if (v1 > 0 and v2 < 0) or (v1 < 0 and v2 > 0):
            t = v1 / (v1 - v2)
            out.append(tuple(a + t * (b - a) for a, b in zip(p1, p2)))
    return out


def triangulate_piece_like(piece_points, oriented_parent):
    """Triangulate a convex piece, ordering each simplex to match the
    parent simplex's orientation (both live in the parent's flat)."""
    flat = Flat(list(oriented_parent))
    parent_params = [flat.to_param(p) for p in oriented_parent]
    ref_sign = det_sign(
        [list(vsub(p, parent_params[0])) for p in parent_params[1:]]
    )
    piece = convex_hull_extremes(list(piece_points))
    tris = geom.triangulate_convex(piece)
    out = []
    for tri in tris:
        pts = [piece[i] for i in tri]
        params = [flat.to_param(p) for p in pts]
        sgn = det_sign([list(vsub(p, params[0])) for p in params[1:]])
        if sgn == 0:
            continue
        if sgn != ref_sign:
            pts[0], pts[1] = pts[1], pts[0]
        out.append(tuple(pts))
    return out


def splice_cell(d: Division, remove_indices, new_simplex_points) -> Division:
    """Replace simplices by new ones given as point tuples; the vertex table
    is extended with any new points (existing points are reused)."""
    index = {p: i for i, p in enumerate(d.vertices)}
    new_points = []
    new_ids = []
    for simplex in new_simplex_points:
        ids = []
        for p in simplex:
            if p not in index:
                index[p] = len(d.vertices) + len(new_points)
                new_points.append(p)
            ids.append(index[p])
        new_ids.append(tuple(ids))
    return d.replace_simplices(remove_indices, new_ids, new_points)


def euler_characteristic(d: Division) -> int:
    """Euler characteristic from the division's refined cell structure.

    k=1: vertices minus edges.  k=2: triangle edges are split at every
    division vertex lying on them (hanging vertices), giving an honest CW
    structure.  For k >= 3 the division must match combinatorially.
    """
    if d.k == 1:
        vset = {d.point(v) for s in d.simplices for v in s}
        return len(vset) - len(d.simplices)
    if d.k == 2:
        vpoints = sorted({d.point(v) for s in d.simplices for v in s})
        edges = set()
        for s in range(len(d.simplices)):
            pts = d.simplex_points(s)
            for a, b in itertools.combinations(range(3), 2):
                pa, pb = pts[a], pts[b]
                onseg = [pa, pb]
                for q in vpoints:
                    if q != pa and q != pb and _on_segment(q, pa, pb):
                        onseg.append(q)
                onseg.sort(key=lambda q: _segment_param(q, pa, pb))
                for u, w in zip(onseg, onseg[1:]):
                    edges.add(frozenset((u, w)))
        return len(vpoints) - len(edges) + len(d.simplices)
    # k >= 3: combinatorial counting over geometric vertex identity.
    faces = {}
    for s in d.simplices:
        pts = tuple(sorted(d.point(v) for v in s))
        for r in range(1, d.k + 2):
            for face in itertools.combinations(pts, r):
                faces.setdefault(r - 1, set()).add(face)
    chi = 0
    for dim_, fs in faces.items():
        chi += (-1) ** dim_ * len(fs)
    return chi


def _on_segment(q, a, b) -> bool:
    if affine_rank([a, b, q]) > 1:
        return False
    t = _segment_param(q, a, b)
    return t is not None and 0 < t < 1


def _segment_param(q, a, b):
    for i in range(len(a)):
        if a[i] != b[i]:
            return (q[i] - a[i]) / (b[i] - a[i])
    return None
