"""Reference inputs used by tests and documentation examples.

All coordinates are frozen rationals (strings parsed exactly), so fixture
identity is platform-independent and diffs stay readable.
"""

from __future__ import annotations

from .rational import Rat, parse_rat
from .geometry import AxisFrame
from .division import Division
from .braiding import SimplicialMap


def _pts(rows):
    return tuple(tuple(parse_rat(tok) for tok in row) for row in rows)


def _cycle_edges(n):
    return tuple((j, (j + 1) % n) for j in range(n))


def round_triangle() -> Division:
    """Positively oriented triangle around the axis: the simplest braid."""
    rows = [("2", "0", "0"), ("-1", "2", "0"), ("-1", "-2", "0")]
    return Division(1, 2, _pts(rows), _cycle_edges(3))


def nested_triangles() -> Division:
    """Two concentric positive triangles; a degree-2 disconnected cover."""
    rows = [
        ("2", "0", "0"), ("-1", "2", "0"), ("-1", "-2", "0"),
        ("4", "0", "1"), ("-2", "4", "1"), ("-2", "-4", "1"),
    ]
    simplices = ((0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3))
    return Division(1, 2, _pts(rows), simplices)


def kinked_square() -> Division:
    """A planar square positioned so exactly one edge is negative and the
    projection has no crossings: braids in a single cone move."""
    rows = [("4", "1", "0"), ("2", "1", "0"), ("2", "-1", "0"), ("4", "-1", "0")]
    return Division(1, 2, _pts(rows), _cycle_edges(4))


def one_crossing_quad() -> Division:
    """Closed quadrilateral whose diagram has one crossing; two negative
    edges of opposite crossing types."""
    rows = [("1", "2", "0"), ("3", "4", "0"), ("1", "4", "1"), ("3", "2", "1")]
    return Division(1, 2, _pts(rows), _cycle_edges(4))


def trefoil() -> Division:
    """Polygonal trefoil (16 edges): a 14-point sample along the standard
    (2,3) torus curve plus a two-vertex kink making two edges negative.
    The diagram has 4 isolated crossings and passes general position."""
    rows = [
        ("3", "0", "0"),
        ("187/53", "-5/7", "1/20"),
        ("208/55", "-95/52", "1/10"),
        ("79/57", "106/61", "39/40"),
        ("-11/45", "15/14", "23/53"),
        ("-31/25", "37/62", "-43/55"),
        ("-26/11", "-33/29", "-43/55"),
        ("-31/48", "-181/64", "23/53"),
        ("41/37", "-82/59", "39/40"),
        ("1", "0", "0"),
        ("41/37", "82/59", "-39/40"),
        ("-31/48", "181/64", "-23/53"),
        ("-26/11", "33/29", "43/55"),
        ("-31/25", "-37/62", "43/55"),
        ("-11/45", "-15/14", "-23/53"),
        ("79/57", "-106/61", "-39/40"),
    ]
    return Division(1, 2, _pts(rows), _cycle_edges(16))


def hopf_link() -> Division:
    """Two linked squares; linking number of magnitude one.  The second
    component carries three negative edges, so braiding does real work."""
    rows = [
        ("2", "0", "0"), ("0", "2", "0"), ("-2", "0", "0"), ("0", "-2", "0"),
        ("1/2", "1/8", "1"), ("5/2", "1/4", "1"),
        ("5/2", "-1/4", "-1"), ("1/2", "-1/8", "-1"),
    ]
    simplices = ((0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4))
    return Division(1, 2, _pts(rows), simplices)


def tetra_sphere() -> Division:
    """Boundary of a tetrahedron in R^4, oriented so all faces are positive:
    a 1-fold branched cover of the sphere of directions."""
    rows = [
        ("3", "0", "0", "0"), ("0", "3", "0", "1"),
        ("0", "0", "3", "0"), ("-2", "-2", "-2", "2"),
    ]
    simplices = ((2, 1, 3), (3, 0, 2), (1, 0, 3), (0, 1, 2))
    return Division(2, 2, _pts(rows), simplices)


def split_face_sphere() -> Division:
    """Tetrahedron boundary with one face cut in two along an edge midpoint:
    a division that is not a triangulation (the uncut neighbor is outer-only,
    the two half faces are inner)."""
    rows = [
        ("3", "0", "0", "0"), ("0", "3", "0", "1"),
        ("0", "0", "3", "0"), ("-2", "-2", "-2", "2"),
        ("0", "3/2", "3/2", "1/2"),  # midpoint of the edge 1-2
    ]
    simplices = ((2, 1, 3), (3, 0, 2), (1, 0, 3), (0, 1, 4), (0, 4, 2))
    return Division(2, 2, _pts(rows), simplices)


# Frozen 4x4 product-torus grid in R^4 (radii 3 and 6/5, asymmetric angles,
# small vertex jitter so the projection is in general position).
_TORUS_ROWS = None  # populated below


def flat_torus() -> Division:
    """Triangulated flat torus in R^4: 16 vertices, 32 triangles, half of
    them negative.  Its projection has only double lines (no triple points):
    the double-line crossing pattern."""
    rows = _TORUS_ROWS
    pts = _pts(rows)

    def vid(i, j):
        return (i % 4) * 4 + (j % 4)

    simplices = []
    for i in range(4):
        for j in range(4):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            simplices.append((a, b, c))
            simplices.append((a, c, d))
    return Division(2, 2, pts, tuple(simplices))


def octahedral_sphere() -> Division:
    """Octahedron boundary pushed off-center into R^5 (k=2, l=3): some faces
    negative, and the projection dropping the last coordinate is injective,
    so braiding is pure cone moves in the stable range."""
    rows = [
        ("5", "1", "1", "1/3", "1/7"),
        ("1", "5", "1", "-1/4", "1/5"),
        ("1", "1", "5", "1/5", "-1/6"),
        ("-3", "1", "1", "1/6", "1/3"),
        ("1", "-3", "1", "-1/7", "-1/4"),
        ("1", "1", "-3", "1/8", "1/9"),
    ]
    simplices = (
        (0, 1, 2), (1, 3, 2), (3, 4, 2), (4, 0, 2),
        (1, 0, 5), (3, 1, 5), (4, 3, 5), (0, 4, 5),
    )
    return Division(2, 3, _pts(rows), simplices)


def simplex_sphere_s4() -> Division:
    """Boundary of a 5-simplex in R^7 (k=4, l=3).  The first six coordinates
    of the vertices are affinely independent, so the crossing projection is
    injective on the whole sphere and braiding is pure cone moves."""
    rows = [
        ("4", "0", "0", "0", "0", "1", "1/3"),
        ("0", "4", "0", "0", "0", "1", "-1/4"),
        ("0", "0", "4", "0", "0", "1", "1/5"),
        ("0", "0", "0", "4", "0", "1", "-1/6"),
        ("1", "1", "1", "1", "3", "1", "1/7"),
        ("1", "1", "1", "1", "-2", "-2", "-1/8"),
    ]
    base = (0, 1, 2, 3, 4, 5)
    simplices = []
    for i in range(6):
        facet = tuple(v for v in base if v != i)
        if i % 2 == 1:
            facet = (facet[1], facet[0]) + facet[2:]
        simplices.append(facet)
    return Division(4, 3, _pts(rows), tuple(simplices))


def winding_hexagon_map() -> SimplicialMap:
    """Abstract circle with six edges mapped around the origin twice; all
    edges positive, covering degree two."""
    images = [
        (Rat(2), Rat(0)), (Rat(-1), Rat(2)), (Rat(-1), Rat(-2)),
        (Rat(2), Rat(1)), (Rat(-2), Rat(1)), (Rat(0), Rat(-2)),
    ]
    simplices = tuple((j, (j + 1) % 6) for j in range(6))
    return SimplicialMap(1, simplices, images)


def _cube_surface(cubes):
    """Closed oriented boundary surface of a union of unit cubes, as
    outward-oriented triangles over integer grid vertices."""
    # outward-oriented quads of the unit cube at the origin, per axis side
    faces = {
        (0, 0): ((0, 0, 0), (0, 0, 1), (0, 1, 1), (0, 1, 0)),
        (0, 1): ((1, 0, 0), (1, 1, 0), (1, 1, 1), (1, 0, 1)),
        (1, 0): ((0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 0, 1)),
        (1, 1): ((0, 1, 0), (0, 1, 1), (1, 1, 1), (1, 1, 0)),
        (2, 0): ((0, 0, 0), (0, 1, 0), (1, 1, 0), (1, 0, 0)),
        (2, 1): ((0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)),
    }
    cubeset = set(cubes)
    quads = []
    for cube in cubes:
        cx, cy, cz = cube
        for (axis, side), quad in faces.items():
            step = [0, 0, 0]
            step[axis] = 1 if side else -1
            neighbor = (cx + step[0], cy + step[1], cz + step[2])
            if neighbor in cubeset:
                continue
            quads.append(tuple((cx + q[0], cy + q[1], cz + q[2]) for q in quad))
    return quads


def genus2_map() -> SimplicialMap:
    """Genus-2 surface: the boundary of two solid square rings sharing a bar
    of cubes, mapped into R^3 by its (shifted) embedding coordinates."""
    cubes = []
    holes = {(1, 1), (3, 1)}
    for x in range(5):
        for y in range(3):
            if (x, y) in holes:
                continue
            cubes.append((x, y, 0))
    quads = _cube_surface(cubes)
    ids = {}
    images = []
    shift = (Rat(-7, 3), Rat(-6, 5), Rat(3, 7))
    simplices = []
    for quad in quads:
        qids = []
        for v in quad:
            if v not in ids:
                ids[v] = len(images)
                images.append(tuple(Rat(c) + s for c, s in zip(v, shift)))
            qids.append(ids[v])
        a, b, c, d = qids
        simplices.append((a, b, c))
        simplices.append((a, c, d))
    return SimplicialMap(2, tuple(simplices), images)


_TORUS_ROWS = [
    ("3", "1/4", "9/8", "15/46"),
    ("3", "13/41", "-15/43", "35/32"),
    ("131/44", "1/4", "-53/48", "-17/32"),
    ("47/16", "7/26", "15/32", "-52/47"),
    ("-17/41", "143/48", "53/45", "11/36"),
    ("-16/45", "3", "-19/47", "11/10"),
    ("-15/44", "71/24", "-48/43", "-4/7"),
    ("-13/37", "143/48", "15/31", "-37/34"),
    ("-71/24", "-20/47", "42/37", "9/25"),
    ("-126/43", "-6/13", "-13/37", "8/7"),
    ("-50/17", "-14/27", "-32/29", "-16/29"),
    ("-3", "-1/2", "12/29", "-17/15"),
    ("27/47", "-77/26", "17/15", "14/43"),
    ("22/41", "-90/31", "-16/43", "47/41"),
    ("10/19", "-117/40", "-51/46", "-19/35"),
    ("14/23", "-44/15", "17/37", "-47/43"),
]
