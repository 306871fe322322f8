"""Exact geometric kernel: points, the braid-axis frame, sign predicates,
joins, and convex polytope intersections.

Points are tuples of Rat.  A convex polytope is carried by its extreme-point
list ("V-representation"); intersections are computed by enumerating basic
feasible solutions of the standard-form system that pairs up barycentric
coordinates on both sides, which is exact and plenty fast at ambient
dimension <= 8.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import combinations

from .rational import Rat, ZERO, ONE
from .linalg import ShapeError, det, det_sign, rref, solve_square


def pt(*coords):
    return tuple(Rat(c) for c in coords)


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vscale(c, a):
    c = Rat(c)
    return tuple(c * x for x in a)


def vdot(a, b):
    return sum((x * y for x, y in zip(a, b)), ZERO)


def barycenter(points):
    n = len(points)
    acc = points[0]
    for p in points[1:]:
        acc = vadd(acc, p)
    return vscale(Rat(1, n), acc)


class DegeneracyError(ValueError):
    pass


class SignClass(enum.Enum):
    POSITIVE = 1
    NEGATIVE = -1
    DEGENERATE = 0

    def flipped(self):
        if self is SignClass.POSITIVE:
            return SignClass.NEGATIVE
        if self is SignClass.NEGATIVE:
            return SignClass.POSITIVE
        return self


@dataclass(frozen=True)
class AxisFrame:
    """The fixed braiding frame.

    The axis is the span of the last l-1 coordinate directions, v is the
    last coordinate direction, pi drops the last l-1 coordinates (landing in
    R^(k+1)) and pi_v drops the last coordinate.  For l = 2 the two
    projections coincide.
    """

    k: int
    l: int

    def __post_init__(self):
        if self.k < 1 or self.l < 2:
            raise ValueError("need k >= 1 and l >= 2")

    @property
    def n(self) -> int:
        return self.k + self.l

    def check_point(self, p):
        if len(p) != self.n:
            raise ShapeError(
                "point of dimension %d in a frame of ambient dimension %d"
                % (len(p), self.n)
            )

    def pi(self, p):
        self.check_point(p)
        return p[: self.k + 1]

    def pi_v(self, p):
        self.check_point(p)
        return p[: self.n - 1]

    def v(self, p):
        self.check_point(p)
        return p[-1]

    def lift(self, pi_image, rest):
        """Inverse convention of pi: append the l-1 axis coordinates."""
        assert len(pi_image) + len(rest) == self.n
        return tuple(pi_image) + tuple(rest)


def simplex_sign(points, frame: AxisFrame) -> SignClass:
    """Sign of det[pi(p_0)|...|pi(p_k)]; DEGENERATE when it vanishes."""
    if len(points) != frame.k + 1:
        raise ShapeError("simplex needs exactly k+1 vertices")
    cols = [frame.pi(p) for p in points]
    s = det_sign([[cols[j][i] for j in range(len(cols))] for i in range(frame.k + 1)])
    return SignClass(s)


def affine_rank(points) -> int:
    """Dimension of the affine hull (number of independent differences)."""
    if len(points) <= 1:
        return 0
    base = points[0]
    rows = [list(vsub(p, base)) for p in points[1:]]
    _, pivots = rref(rows)
    return len(pivots)


def in_affine_hull(p, points) -> bool:
    return affine_rank(list(points) + [p]) == affine_rank(points)


def affine_coords(p, points):
    """Barycentric coordinates of p w.r.t. affinely independent points.

    Returns None when p is outside the affine hull.
    """
    m = len(points)
    dim = len(p)
    rows = [[points[j][i] for j in range(m)] for i in range(dim)]
    rows.append([ONE] * m)
    rhs = list(p) + [ONE]
    sol = _solve_exact(rows, rhs)
    return sol


def _solve_exact(rows, rhs):
    ncols = len(rows[0])
    aug = [list(map(Rat, r)) + [Rat(b)] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    if len(pivots) < ncols:
        return None  # underdetermined; callers want independent systems
    x = [ZERO] * ncols
    for i, c in enumerate(pivots):
        x[c] = red[i][ncols]
    return x


def join_cone(apex, cell):
    """Cone simplices [apex, sigma] over each simplex of a triangulated cell.

    Raises DegeneracyError when the apex lies in the affine hull of any cell
    simplex (the cone would collapse).
    """
    out = []
    for simplex in cell:
        if in_affine_hull(apex, simplex):
            raise DegeneracyError("cone apex lies in the affine hull of a cell simplex")
        out.append((apex,) + tuple(simplex))
    return out


# ---------------------------------------------------------------------------
# Basic-feasible-solution vertex enumeration


def standard_form_vertices(A, b, limit=None):
    """All vertices of {x >= 0 : A x = b}.

    Exact enumeration of basic feasible solutions; returns None when the
    equality system is inconsistent.  When `limit` is given, stops after that
    many distinct vertices (used for pure feasibility queries).
    """
    if not A:
        return []
    ncols = len(A[0])
    aug = [list(map(Rat, row)) + [Rat(bb)] for row, bb in zip(A, b)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    rows = red[: len(pivots)]
    r = len(pivots)
    if r == 0:
        return [[ZERO] * ncols]
    verts = []
    seen = set()
    for S in combinations(range(ncols), r):
        sub = [[rows[i][j] for j in S] for i in range(r)]
        rhs = [rows[i][ncols] for i in range(r)]
        sol = solve_square(sub, rhs)
        if sol is None or any(x < 0 for x in sol):
            continue
        x = [ZERO] * ncols
        for j, v in zip(S, sol):
            x[j] = v
        key = tuple(x)
        if key not in seen:
            seen.add(key)
            verts.append(x)
            if limit is not None and len(verts) >= limit:
                break
    return verts


def _pair_system(va, vb):
    """Equalities for conv(va) meet conv(vb) in barycentric variables."""
    dim = len(va[0])
    na, nb = len(va), len(vb)
    A = []
    b = []
    for i in range(dim):
        A.append([va[j][i] for j in range(na)] + [-vb[j][i] for j in range(nb)])
        b.append(ZERO)
    A.append([ONE] * na + [ZERO] * nb)
    b.append(ONE)
    A.append([ZERO] * na + [ONE] * nb)
    b.append(ONE)
    return A, b


def convex_intersection(va, vb):
    """Extreme-point candidates of conv(va) meet conv(vb).

    The result is the exact intersection's vertex candidate list (all BFS
    images); it is the true extreme-point set whenever both inputs are
    simplices.  Empty list means disjoint.
    """
    if len(va[0]) != len(vb[0]):
        raise ShapeError("polytope intersection across ambient dimensions")
    A, b = _pair_system(va, vb)
    verts = standard_form_vertices(A, b)
    if verts is None:
        return []
    na = len(va)
    out = []
    seen = set()
    for x in verts:
        p = tuple(
            sum((x[j] * va[j][i] for j in range(na)), ZERO) for i in range(len(va[0]))
        )
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def convex_hull_extremes(points):
    """Minimal extreme-point list of conv(points)."""
    pts = []
    seen = set()
    for p in points:
        if p not in seen:
            seen.add(p)
            pts.append(p)
    out = []
    for i, p in enumerate(pts):
        others = pts[:i] + pts[i + 1 :]
        if not others or not point_in_convex(p, others):
            out.append(p)
    return out


def point_in_convex(p, points) -> bool:
    """Exact membership of p in conv(points)."""
    dim = len(p)
    m = len(points)
    A = [[points[j][i] for j in range(m)] for i in range(dim)]
    b = list(p)
    A.append([ONE] * m)
    b.append(ONE)
    verts = standard_form_vertices(A, b, limit=1)
    return bool(verts)


@dataclass(frozen=True)
class Polytope:
    """A convex polytope carried by its (canonically sorted) extreme points."""

    vertices: tuple
    ambient_dim: int

    @staticmethod
    def from_points(points, ambient_dim=None):
        if not points:
            return Polytope(vertices=(), ambient_dim=ambient_dim or 0)
        dim = ambient_dim if ambient_dim is not None else len(points[0])
        ext = convex_hull_extremes(list(points))
        return Polytope(vertices=tuple(sorted(ext)), ambient_dim=dim)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def dim(self) -> int:
        if self.is_empty:
            return -1
        return affine_rank(list(self.vertices))

    def contains(self, p) -> bool:
        if self.is_empty:
            return False
        return point_in_convex(p, list(self.vertices))


def polytope_intersection(a: Polytope, b: Polytope) -> Polytope:
    """Exact intersection of two V-polytopes (possibly empty)."""
    if a.ambient_dim != b.ambient_dim:
        raise ShapeError("polytope intersection across ambient dimensions")
    if a.is_empty or b.is_empty:
        return Polytope(vertices=(), ambient_dim=a.ambient_dim)
    pts = convex_intersection(list(a.vertices), list(b.vertices))
    return Polytope.from_points(pts, a.ambient_dim)


def intersect_simplices(sa, sb):
    """Extreme points of the intersection of two simplices (vertex tuples).

    Both inputs must be affinely independent vertex lists; then the BFS map
    is injective and the candidates are already extreme.
    """
    return convex_intersection(list(sa), list(sb))


# ---------------------------------------------------------------------------
# Flats, hull facets, triangulation and exact volumes


class Flat:
    """Affine parameterization of the flat spanned by a point set.

    Maps ambient points exactly into R^dim coordinates; volumes measured in
    parameter space differ from Euclidean volume by one fixed (irrational)
    factor per flat, so comparisons within a flat are exact.
    """

    def __init__(self, points):
        self.origin = points[0]
        base = points[0]
        rows = [list(vsub(p, base)) for p in points[1:]]
        red, pivots = rref(rows)
        self.dim = len(pivots)
        # Use pivot coordinates directly as parameters: basis vectors are the
        # reduced rows; coordinates of p are read off the pivot columns after
        # expressing p - origin in the reduced basis.
        self._basis = red[: self.dim]
        self._pivots = pivots

    def key(self):
        """Canonical identifier of the flat (for grouping)."""
        return (self.dim, tuple(tuple(row) for row in self._basis), _flat_anchor(self))

    def to_param(self, p):
        """Exact coordinates of p in the flat; None when p is off the flat."""
        d = list(vsub(p, self.origin))
        coeffs = []
        for row, piv in zip(self._basis, self._pivots):
            c = d[piv]
            coeffs.append(c)
            for i in range(len(d)):
                d[i] -= c * row[i]
        if any(x != 0 for x in d):
            return None
        return tuple(coeffs)


def _flat_anchor(flat: Flat):
    # Project the ambient origin's offset out of the basis to anchor the flat.
    d = list(flat.origin)
    for row, piv in zip(flat._basis, flat._pivots):
        c = d[piv]
        for i in range(len(d)):
            d[i] -= c * row[i]
    return tuple(d)


def hull_facets(points, dim):
    """Facet vertex-index sets of a full-dimensional hull in R^dim.

    Brute force over supporting hyperplanes; fine at desk scale.
    """
    m = len(points)
    if dim == 0:
        return []
    facets = {}
    for S in combinations(range(m), dim):
        sub = [points[i] for i in S]
        if affine_rank(sub) != dim - 1:
            continue
        normal = _hyperplane_normal(sub, dim)
        if normal is None:
            continue
        offs = [vdot(normal, vsub(points[i], sub[0])) for i in range(m)]
        pos = any(o > 0 for o in offs)
        neg = any(o < 0 for o in offs)
        if pos and neg:
            continue
        members = tuple(sorted(i for i, o in enumerate(offs) if o == 0))
        facets[members] = True
    # Drop facets strictly contained in another facet's vertex set.
    keys = sorted(facets, key=len, reverse=True)
    out = []
    for kset in keys:
        if not any(set(kset) < set(other) for other in out):
            out.append(kset)
    return out


def _hyperplane_normal(points, dim):
    """A rational normal to the hyperplane through dim affinely independent
    points in R^dim, via cofactor expansion."""
    base = points[0]
    rows = [list(vsub(p, base)) for p in points[1:]]
    normal = []
    for i in range(dim):
        minor = [[row[j] for j in range(dim) if j != i] for row in rows]
        normal.append((-1) ** i * det(minor))
    if all(x == 0 for x in normal):
        return None
    return tuple(normal)


def triangulate_convex(points):
    """Triangulation (as index tuples) of conv(points) within its own flat."""
    flat = Flat(points)
    d = flat.dim
    if d == 0:
        return [(0,)]
    params = [flat.to_param(p) for p in points]
    return _triangulate_param(params, d)


def _triangulate_param(params, d):
    if d == 1:
        order = sorted(range(len(params)), key=lambda i: params[i])
        return [(order[0], order[-1])]
    facets = hull_facets(params, d)
    ext = convex_hull_extremes(params)
    apex = params.index(ext[0])
    simplices = []
    for fac in facets:
        if apex in fac:
            continue
        fpts = [params[i] for i in fac]
        fflat = Flat(fpts)
        fparams = [fflat.to_param(p) for p in fpts]
        for tri in _triangulate_param(fparams, d - 1):
            simplex = tuple(fac[i] for i in tri) + (apex,)
            mat = [list(vsub(params[i], params[apex])) for i in simplex[:-1]]
            if det_sign(mat) != 0:
                simplices.append(simplex)
    return simplices


def convex_volume_param(points):
    """Volume of conv(points) measured in its flat's parameter chart."""
    if len(points) < 2:
        return ZERO
    flat = Flat(points)
    d = flat.dim
    if d == 0:
        return ZERO
    params = [flat.to_param(p) for p in points]
    return _volume_in_chart(params, d)


def _volume_in_chart(params, d):
    total = ZERO
    fact = Rat(math.factorial(d))
    for simplex in _triangulate_param(params, d):
        mat = [list(vsub(params[i], params[simplex[-1]])) for i in simplex[:-1]]
        total += abs(det(mat)) / fact
    return total


def volume_in_flat(flat: Flat, points):
    """Volume of conv(points) in the chart of a *given* flat (for comparing
    regions that share the flat)."""
    params = []
    for p in points:
        c = flat.to_param(p)
        if c is None:
            raise DegeneracyError("point off the reference flat")
        params.append(c)
    if affine_rank(params) < flat.dim:
        return ZERO
    return _volume_in_chart(params, flat.dim)
