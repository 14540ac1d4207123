"""Bipartite minimal-graph patches, their train tracks and discrete Abel maps.

An edge is stored with its two crossing train tracks.  Conventions, fixed once
and used by every consumer:

  * edges are oriented white -> black; the left face (looking along the edge)
    is ``left_face``, the other ``right_face``;
  * ``plus_track`` crosses the quad-graph edges (left_face, black) and
    (white, right_face); its angle is the one added at the black end;
  * ``minus_track`` crosses (white, left_face) and (black, right_face); its
    angle is subtracted at the white end;
  * both tracks run with the black vertex on their right, whites on the left.

Faces are never input data.  They are reconstructed from the track labels by
corner tracing: at a black vertex the corner successor of edge e is the edge
whose minus-track equals e's plus-track, at a white vertex the edge whose
minus-track equals e's plus-track as well, with the corner color alternating.
Closed corner orbits are interior faces, open chains are boundary sectors.
"""

import math
from dataclasses import dataclass, field

from .errors import GraphError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Track:
    """One oriented train track: its boundary-circle angle and optional geometry."""

    angle: float
    lift: float
    direction: float = None  # travel direction in the plane, radians
    offset: float = None  # signed perpendicular position, positive to the left

    def sort_key(self):
        if self.direction is None:
            raise GraphError("track has no geometry")
        return (self.direction % TWO_PI, self.offset)


@dataclass
class Edge:
    index: int
    white: object
    black: object
    plus_track: object
    minus_track: object
    left_face: int = None
    right_face: int = None


@dataclass
class Face:
    index: int
    corners: tuple  # ((edge_index, side), ...) in trace order; side in {"B","W"}
    interior: bool

    @property
    def degree(self):
        return len(self.corners)


@dataclass
class AngleReport:
    ok: bool
    violations: list = field(default_factory=list)
    indeterminate: int = 0
    pairs_checked: int = 0
    triples_checked: int = 0
    note: str = ""


class MinimalGraph:
    """Finite patch of a bipartite minimal graph.

    Parameters
    ----------
    whites, blacks : iterables of hashable vertex ids (disjoint).
    edges : iterable of (white, black, plus_track, minus_track) tuples.
    tracks : dict track id -> Track.
    positions : optional dict vertex id -> complex, for geometry consumers.
    """

    def __init__(self, whites, blacks, edges, tracks, positions=None):
        self.whites = list(whites)
        self.blacks = list(blacks)
        white_set = set(self.whites)
        black_set = set(self.blacks)
        if len(white_set) != len(self.whites) or len(black_set) != len(self.blacks):
            raise GraphError("duplicate vertex ids")
        if white_set & black_set:
            raise GraphError("white and black vertex ids overlap")
        self.tracks = dict(tracks)
        self.positions = dict(positions) if positions else None

        self.edges = []
        crossings = {}
        for w, b, plus, minus in edges:
            if w not in white_set:
                raise GraphError("edge references unknown white vertex %r" % (w,))
            if b not in black_set:
                raise GraphError("edge references unknown black vertex %r" % (b,))
            for t in (plus, minus):
                if t not in self.tracks:
                    raise GraphError("edge references unknown track %r" % (t,))
            if plus == minus:
                raise GraphError("track %r crosses itself on edge %r-%r" % (plus, w, b))
            pair = frozenset((plus, minus))
            if pair in crossings:
                raise GraphError(
                    "tracks %r and %r cross twice" % (plus, minus)
                )
            crossings[pair] = True
            self.edges.append(Edge(len(self.edges), w, b, plus, minus))
        if not self.edges:
            raise GraphError("patch has no edges")

        self._at_white = {w: [] for w in self.whites}
        self._at_black = {b: [] for b in self.blacks}
        for e in self.edges:
            self._at_white[e.white].append(e.index)
            self._at_black[e.black].append(e.index)

        self._closed_rotation = {}
        for v, incident in list(self._at_white.items()) + list(self._at_black.items()):
            self._validate_rotation(v, incident)

        self.faces = []
        self._trace_faces()

    # -- rotations -------------------------------------------------------------

    def _validate_rotation(self, v, incident):
        if not incident:
            raise GraphError("isolated vertex %r" % (v,))
        plus = [self.edges[k].plus_track for k in incident]
        minus = [self.edges[k].minus_track for k in incident]
        if len(set(plus)) != len(plus) or len(set(minus)) != len(minus):
            raise GraphError("repeated track at vertex %r" % (v,))
        by_plus = {self.edges[k].plus_track: k for k in incident}
        # successor in counterclockwise rotation: plus of next equals minus of this
        succ = {k: by_plus.get(self.edges[k].minus_track) for k in incident}
        defined = [k for k, s in succ.items() if s is not None]
        if len(defined) == len(incident):
            # must be one full cycle
            seen = set()
            k = incident[0]
            while k not in seen:
                seen.add(k)
                k = succ[k]
            if len(seen) != len(incident):
                raise GraphError("rotation at vertex %r splits into cycles" % (v,))
            self._closed_rotation[v] = True
        else:
            # open chain: exactly one edge without successor, one without predecessor
            preds = set(s for s in succ.values() if s is not None)
            starts = [k for k in incident if k not in preds]
            if len(defined) != len(incident) - 1 or len(starts) != 1:
                raise GraphError("rotation at vertex %r is not a single fan" % (v,))
            seen = set()
            k = starts[0]
            while k is not None:
                if k in seen:
                    raise GraphError("rotation at vertex %r loops back" % (v,))
                seen.add(k)
                k = succ[k]
            if len(seen) != len(incident):
                raise GraphError("rotation at vertex %r is not a single fan" % (v,))
            self._closed_rotation[v] = False

    def rotation_closed(self, v):
        return self._closed_rotation[v]

    def interior_whites(self):
        return [w for w in self.whites if self._closed_rotation[w]]

    def interior_blacks(self):
        return [b for b in self.blacks if self._closed_rotation[b]]

    # -- face tracing ------------------------------------------------------------

    def _corner_next(self, corner):
        k, side = corner
        e = self.edges[k]
        incident = self._at_black[e.black] if side == "B" else self._at_white[e.white]
        for k2 in incident:
            if k2 != k and self.edges[k2].minus_track == e.plus_track:
                return (k2, "W" if side == "B" else "B")
        return None

    def _corner_prev(self, corner):
        # inverse of _corner_next: the predecessor of a black-side corner sits
        # at the white end of the edge (and vice versa), on the edge whose
        # plus-track is our minus-track
        k, side = corner
        e = self.edges[k]
        incident = self._at_white[e.white] if side == "B" else self._at_black[e.black]
        for k2 in incident:
            if k2 != k and self.edges[k2].plus_track == e.minus_track:
                return (k2, "W" if side == "B" else "B")
        return None

    def _trace_faces(self):
        assigned = {}
        order = [(k, "B") for k in range(len(self.edges))] + [
            (k, "W") for k in range(len(self.edges))
        ]
        for start in order:
            if start in assigned:
                continue
            # rewind to the chain start if the orbit is open
            head = start
            steps = 0
            while True:
                prev = self._corner_prev(head)
                if prev is None or prev == start:
                    break
                head = prev
                steps += 1
                if steps > 2 * len(order):
                    raise GraphError("corner tracing does not terminate")
            interior = prev == start and self._corner_next(start) is not None
            corners = []
            cur = head
            while cur is not None and cur not in assigned:
                assigned[cur] = len(self.faces)
                corners.append(cur)
                cur = self._corner_next(cur)
            self.faces.append(Face(len(self.faces), tuple(corners), interior))
        for e in self.edges:
            e.left_face = assigned[(e.index, "B")]
            e.right_face = assigned[(e.index, "W")]

    def interior_faces(self):
        return [f for f in self.faces if f.interior]

    def boundary_faces(self):
        return [f for f in self.faces if not f.interior]

    def face_edges(self, face_index):
        """Boundary corners of one face as (edge, side) pairs in trace order."""
        return [(self.edges[k], side) for k, side in self.faces[face_index].corners]

    def edges_at_white(self, w):
        return [self.edges[k] for k in self._at_white[w]]

    def edges_at_black(self, b):
        return [self.edges[k] for k in self._at_black[b]]

    def white_fan(self, w):
        """Incident edges of a white vertex in rotation (counterclockwise) order."""
        incident = self._at_white[w]
        by_plus = {self.edges[k].plus_track: k for k in incident}
        succ = {k: by_plus.get(self.edges[k].minus_track) for k in incident}
        if self._closed_rotation[w]:
            k = incident[0]
        else:
            preds = set(s for s in succ.values() if s is not None)
            k = next(i for i in incident if i not in preds)
        out = []
        while k is not None and k not in out:
            out.append(k)
            k = succ[k]
        return [self.edges[k] for k in out]


# -- discrete Abel map ------------------------------------------------------------


class DiscreteAbel:
    """Track-multiplicity ledger for faces and vertices, based at one face.

    Values are plain {track id: signed multiplicity} dicts with zeros
    stripped; projecting through the track table turns them into divisors
    supported on the angle points.  Degrees follow the color rule: +1 at
    black vertices, -1 at white, 0 on faces.  Every edge contributes four
    redundant relations, so the breadth-first sweep cross-checks path
    independence around each quadrilateral of the quad-graph.
    """

    def __init__(self, graph, base_face=None):
        self.graph = graph
        if base_face is None:
            interior = graph.interior_faces()
            base_face = interior[0].index if interior else 0
        self.base_face = base_face
        self.face_values = {}
        self.black_values = {}
        self.white_values = {}
        self._propagate()

    def _relations(self, e):
        return [
            (("F", e.left_face), ("B", e.black), {e.plus_track: 1}),
            (("F", e.left_face), ("W", e.white), {e.minus_track: -1}),
            (("F", e.right_face), ("B", e.black), {e.minus_track: 1}),
            (("F", e.right_face), ("W", e.white), {e.plus_track: -1}),
        ]

    def _store(self, kind):
        return {"F": self.face_values, "B": self.black_values, "W": self.white_values}[
            kind
        ]

    def _propagate(self):
        graph = self.graph
        touching = {}
        for e in graph.edges:
            for a, b, delta in self._relations(e):
                flipped = {k: -v for k, v in delta.items()}
                touching.setdefault(a, []).append((b, delta))
                touching.setdefault(b, []).append((a, flipped))
        start = ("F", self.base_face)
        self.face_values[self.base_face] = {}
        queue = [start]
        while queue:
            node = queue.pop(0)
            kind, key = node
            value = self._store(kind)[key]
            for (nkind, nkey), delta in touching.get(node, ()):
                candidate = _shift(value, delta)
                store = self._store(nkind)
                if nkey in store:
                    if store[nkey] != candidate:
                        raise GraphError(
                            "discrete Abel map inconsistent at %s %r" % (nkind, nkey)
                        )
                else:
                    store[nkey] = candidate
                    queue.append((nkind, nkey))
        missing = (
            (len(self.face_values) != len(graph.faces))
            or (len(self.black_values) != len(graph.blacks))
            or (len(self.white_values) != len(graph.whites))
        )
        if missing:
            raise GraphError("patch is not connected through its quad-graph")

    def face_counter(self, face_index):
        return self.face_values[face_index]

    def black_counter(self, b):
        return self.black_values[b]

    def white_counter(self, w):
        return self.white_values[w]

    def divisor(self, counter):
        """{track: multiplicity} -> divisor [(angle point, multiplicity)]."""
        return [
            (self.graph.tracks[t].angle, m)
            for t, m in sorted(counter.items(), key=str)
            if m != 0
        ]

    def rebased(self, face_index):
        """Same map with a different base face (shifts everything by a constant)."""
        return DiscreteAbel(self.graph, base_face=face_index)


def _shift(value, delta):
    out = dict(value)
    for k, v in delta.items():
        total = out.get(k, 0) + v
        if total:
            out[k] = total
        else:
            out.pop(k, None)
    return out


def discrete_abel(graph, base_face=None):
    return DiscreteAbel(graph, base_face)


# -- standard patches --------------------------------------------------------------


def square_track_angles(width, height):
    """Admissible angle values for the square patch, in boundary-circle order.

    Tracks leave the patch in four direction classes: up-running verticals
    (even columns), west horizontals (even rows), down verticals, east
    horizontals.  Values 0,1,2,... assigned along the circle counterclockwise
    give exactly one cyclic descent, which is what the order check requires.
    Returns (vertical list by column, horizontal list by row).
    """
    vertical = [None] * width
    horizontal = [None] * height
    value = 0
    for p in range(2 * ((width - 1) // 2), -1, -2):  # up tracks, offset order
        vertical[p] = float(value)
        value += 1
    for q in range(2 * ((height - 1) // 2), -1, -2):  # west tracks
        horizontal[q] = float(value)
        value += 1
    for p in range(1, width, 2):  # down tracks
        vertical[p] = float(value)
        value += 1
    for q in range(1, height, 2):  # east tracks
        horizontal[q] = float(value)
        value += 1
    return vertical, horizontal


def build_square_patch(width, height, vertical_angles=None, horizontal_angles=None):
    """Square-lattice patch of width x height quadrilaterals.

    Vertices sit on integer points (x, y) with x+y even (white iff x even),
    faces on x+y odd.  Column p carries vertical track v<p> through x = p+1/2,
    running up for even p and down for odd p; row q carries horizontal track
    h<q> through y = q+1/2, west for even q, east for odd q.  Track count is
    width + height.
    """
    if width < 1 or height < 1:
        raise GraphError("patch needs positive dimensions")
    if vertical_angles is None and horizontal_angles is None:
        vertical_angles, horizontal_angles = square_track_angles(width, height)
    if vertical_angles is None or horizontal_angles is None:
        raise GraphError("give both angle families or neither")
    if len(vertical_angles) != width or len(horizontal_angles) != height:
        raise GraphError("angle list lengths must match the track counts")

    tracks = {}
    for p in range(width):
        up = p % 2 == 0
        tracks["v%d" % p] = Track(
            angle=float(vertical_angles[p]),
            lift=float(vertical_angles[p]),
            direction=math.pi / 2 if up else 3 * math.pi / 2,
            offset=-(p + 0.5) if up else (p + 0.5),
        )
    for q in range(height):
        west = q % 2 == 0
        tracks["h%d" % q] = Track(
            angle=float(horizontal_angles[q]),
            lift=float(horizontal_angles[q]),
            direction=math.pi if west else 0.0,
            offset=-(q + 0.5) if west else (q + 0.5),
        )

    whites, blacks, positions = [], [], {}
    for x in range(width + 1):
        for y in range(height + 1):
            if (x + y) % 2:
                continue
            name = ("w%d_%d" if x % 2 == 0 else "b%d_%d") % (x, y)
            (whites if x % 2 == 0 else blacks).append(name)
            positions[name] = complex(x, y)

    edges = []
    for p in range(width):
        for q in range(height):
            v, h = "v%d" % p, "h%d" % q
            pe, qe = p % 2 == 0, q % 2 == 0
            if pe and qe:
                w, b, plus, minus = (p, q), (p + 1, q + 1), v, h
            elif not pe and not qe:
                w, b, plus, minus = (p + 1, q + 1), (p, q), v, h
            elif pe:  # q odd
                w, b, plus, minus = (p, q + 1), (p + 1, q), h, v
            else:  # p odd, q even
                w, b, plus, minus = (p + 1, q), (p, q + 1), h, v
            edges.append(
                ("w%d_%d" % w, "b%d_%d" % b, plus, minus)
            )
    return MinimalGraph(whites, blacks, edges, tracks, positions)


def honeycomb_track_angles(na, nb):
    """Admissible angles for the honeycomb patch, one cyclic descent.

    Circle order of outgoing tracks is the B family (direction 0, index
    ascending), then C (direction 120 degrees, combined index descending),
    then A (direction 240, index ascending).  Returns (a_list, b_list, c_list).
    """
    nc = na + nb - 1
    b_list = [float(v) for v in range(nb)]
    c_list = [float(nb + k) for k in range(nc)][::-1]
    a_list = [float(nb + nc + k) for k in range(na)]
    return a_list, b_list, c_list


def build_honeycomb_patch(na, nb, a_angles=None, b_angles=None, c_angles=None):
    """Honeycomb patch around an na x nb rhombus of black vertices.

    Black (i, j) has neighbors w(i, j), w(i, j-1), w(i-1, j); track families:
    A<i> through column i (direction 240 degrees), B<j> through row j
    (direction 0), C<i+j> through the antidiagonal (direction 120).
    """
    if na < 1 or nb < 1:
        raise GraphError("patch needs positive dimensions")
    nc = na + nb - 1
    if a_angles is None and b_angles is None and c_angles is None:
        a_angles, b_angles, c_angles = honeycomb_track_angles(na, nb)
    if a_angles is None or b_angles is None or c_angles is None:
        raise GraphError("give all three angle families or none")
    if len(a_angles) != na or len(b_angles) != nb or len(c_angles) != nc:
        raise GraphError("angle list lengths must match the track counts")

    u = 1.0 + 0.0j
    v = complex(0.5, math.sqrt(3.0) / 2.0)
    root3 = math.sqrt(3.0)

    tracks = {}
    for i in range(na):
        tracks["A%d" % i] = Track(
            angle=float(a_angles[i]),
            lift=float(a_angles[i]),
            direction=4 * math.pi / 3,
            offset=root3 / 4 + i * root3 / 2,
        )
    for j in range(nb):
        tracks["B%d" % j] = Track(
            angle=float(b_angles[j]),
            lift=float(b_angles[j]),
            direction=0.0,
            offset=root3 / 4 + j * root3 / 2,
        )
    for c in range(nc):
        tracks["C%d" % c] = Track(
            angle=float(c_angles[c]),
            lift=float(c_angles[c]),
            direction=2 * math.pi / 3,
            offset=-root3 / 4 - c * root3 / 2,
        )

    whites, blacks, positions, edges = [], [], {}, []
    seen_white = set()

    def white(i, j):
        name = "w%d_%d" % (i, j)
        if name not in seen_white:
            seen_white.add(name)
            whites.append(name)
            positions[name] = i * u + j * v + 2.0 * (u + v) / 3.0
        return name

    for i in range(na):
        for j in range(nb):
            b = "b%d_%d" % (i, j)
            blacks.append(b)
            positions[b] = i * u + j * v + (u + v) / 3.0
            a, bt, c = "A%d" % i, "B%d" % j, "C%d" % (i + j)
            edges.append((white(i, j), b, a, bt))
            edges.append((white(i, j - 1), b, c, a))
            edges.append((white(i - 1, j), b, bt, c))
    return MinimalGraph(whites, blacks, edges, tracks, positions)


# -- angle-map admissibility ---------------------------------------------------------


def _cyclic_orientation(a, b, c):
    """+1 if the triple runs counterclockwise on its circle, -1 otherwise."""
    descents = int(b < a) + int(c < b) + int(a < c)
    return +1 if descents == 1 else -1


def check_angle_map(graph):
    """Verify the track -> angle map preserves the boundary cyclic order.

    Report-valued: lists offending pairs (equal angles on non-parallel
    tracks) and triples (orientation mismatch).  Tracks without geometry make
    triples indeterminate rather than failing.
    """
    ids = sorted(graph.tracks)
    have_geometry = all(graph.tracks[t].direction is not None for t in ids)
    report = AngleReport(ok=True)
    if not have_geometry:
        report.note = "tracks carry no geometry; cyclic order not checkable"

    crossing = set()
    for e in graph.edges:
        crossing.add((e.plus_track, e.minus_track))
        crossing.add((e.minus_track, e.plus_track))

    def parallel(s, t):
        if not have_geometry:
            # without geometry only crossing pairs are known non-parallel
            return (s, t) not in crossing
        ds = graph.tracks[s].direction % TWO_PI
        dt = graph.tracks[t].direction % TWO_PI
        return abs(ds - dt) < 1e-12 or abs(abs(ds - dt) - TWO_PI) < 1e-12

    for x in range(len(ids)):
        for y in range(x + 1, len(ids)):
            s, t = ids[x], ids[y]
            report.pairs_checked += 1
            if graph.tracks[s].angle == graph.tracks[t].angle and not parallel(s, t):
                report.ok = False
                report.violations.append(("equal-angles", s, t))

    for x in range(len(ids)):
        for y in range(x + 1, len(ids)):
            for z in range(y + 1, len(ids)):
                triple = (ids[x], ids[y], ids[z])
                if any(
                    parallel(s, t)
                    for s, t in ((triple[0], triple[1]), (triple[0], triple[2]), (triple[1], triple[2]))
                ):
                    continue
                if not have_geometry:
                    report.indeterminate += 1
                    continue
                report.triples_checked += 1
                keys = [graph.tracks[t].sort_key() for t in triple]
                angles = [graph.tracks[t].angle for t in triple]
                if _cyclic_orientation(*keys) != _cyclic_orientation(*angles):
                    report.ok = False
                    report.violations.append(("order", *triple))
    return report


# -- text round trip -------------------------------------------------------------------

HEADER = "genus-agnostic minimal-graph v1"


def save_graph(graph, path):
    """Write the patch in the line-oriented exchange format (no geometry)."""
    lines = [HEADER]
    for t in sorted(graph.tracks, key=str):
        tr = graph.tracks[t]
        lines.append("T %s %r %r" % (t, tr.angle, tr.lift))
    for w in graph.whites:
        lines.append("W %s" % (w,))
    for b in graph.blacks:
        lines.append("B %s" % (b,))
    for e in graph.edges:
        lines.append("E %s %s %s %s" % (e.white, e.black, e.plus_track, e.minus_track))
    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")


def load_graph(path):
    whites, blacks, edges, tracks = [], [], [], {}
    with open(path) as handle:
        lines = handle.read().splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise GraphError("missing header %r" % HEADER, line=1)
    for number, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "W" and len(parts) == 2:
                whites.append(parts[1])
            elif kind == "B" and len(parts) == 2:
                blacks.append(parts[1])
            elif kind == "T" and len(parts) == 4:
                tracks[parts[1]] = Track(
                    angle=float(parts[2]), lift=float(parts[3])
                )
            elif kind == "E" and len(parts) == 5:
                edges.append((parts[1], parts[2], parts[3], parts[4]))
            else:
                raise GraphError("unrecognized line %r" % line, line=number)
        except ValueError:
            raise GraphError("bad numeric field in %r" % line, line=number)
    return MinimalGraph(whites, blacks, edges, tracks)
