"""Fock weights, kernel functions and the inverse kernel on a patch.

Edge weight: prime_form(minus angle, plus angle) divided by the theta values
of the two incident faces, each evaluated at t plus the face's Abel vector.
The transported kernel function g propagates along quad-graph paths (nodes
are faces, whites and blacks); each step crosses exactly one train track and
contributes a theta-over-prime-form factor or its reciprocal.  Path
independence around quadrilaterals makes values of g depend only on the
endpoints, which the tests exercise directly.

The inverse entry integrates g from conj(u0) to u0 across the real axis at a
crossing point u_c.  The default u_c for an entry (b, w) sits in the gap of
angle values matching the plane direction from w to b; picking the gap per
entry is what makes the row sums collapse to the identity.
"""

import cmath
import csv
import math

import numpy as np

from .errors import AdmissibilityError, PoleCollisionError
from .minimal_graph import discrete_abel
from .quadrature import polyline_integral
from .schottky import is_infinite

TWO_PI = 2.0 * math.pi
POLE_TOL = 1e-6


def _disc_gap(path, discs):
    """Smallest clearance between a polyline and a set of (center, radius) discs."""
    worst = math.inf
    for a, b in zip(path, path[1:]):
        ab = b - a
        denom = (ab * ab.conjugate()).real
        for center, radius in discs:
            if denom == 0.0:
                t = 0.0
            else:
                t = ((center - a) * ab.conjugate()).real / denom
                t = min(1.0, max(0.0, t))
            worst = min(worst, abs(a + ab * t - center) - radius)
    return worst


class FockWeights:
    """Weights and kernel machinery for one curve on one patch."""

    def __init__(self, curve, graph, t=None, base_face=None):
        self.curve = curve
        self.graph = graph
        self.ledger = discrete_abel(graph, base_face)
        if t is None:
            t = np.zeros(curve.genus)
        self.t = np.asarray(t, dtype=float)
        if self.t.shape != (curve.genus,):
            raise ValueError("t must have one entry per handle")

        self._vectors = {}
        for f in graph.faces:
            div = self.ledger.divisor(self.ledger.face_counter(f.index))
            self._vectors[("F", f.index)] = curve.abel_real(div)
        for b in graph.blacks:
            div = self.ledger.divisor(self.ledger.black_counter(b))
            self._vectors[("B", b)] = curve.abel_real(div)
        for w in graph.whites:
            div = self.ledger.divisor(self.ledger.white_counter(w))
            self._vectors[("W", w)] = curve.abel_real(div)

        self._face_theta = {}
        for f in graph.faces:
            val = complex(curve.theta(self.t + self._vectors[("F", f.index)]))
            if abs(val) < 1e-12:
                raise AdmissibilityError(
                    "theta vanishes at face %d; shift t" % f.index
                )
            self._face_theta[f.index] = val

        self.weights = {e.index: self._weight(e) for e in graph.edges}

        self._adjacency = self._build_adjacency()
        self._paths = {}

    # -- weights ----------------------------------------------------------------

    def angle(self, track_id):
        return self.graph.tracks[track_id].angle

    def _weight(self, e):
        num = self.curve.prime_form(self.angle(e.minus_track), self.angle(e.plus_track))
        return num / (self._face_theta[e.left_face] * self._face_theta[e.right_face])

    def weight(self, edge):
        return self.weights[edge.index]

    def node_vector(self, kind, key):
        return self._vectors[(kind, key)]

    # -- transported kernel function g ----------------------------------------------

    def _build_adjacency(self):
        adj = {}
        for e in self.graph.edges:
            quad = [
                (("F", e.left_face), ("W", e.white), e.minus_track),
                (("F", e.left_face), ("B", e.black), e.plus_track),
                (("F", e.right_face), ("W", e.white), e.plus_track),
                (("F", e.right_face), ("B", e.black), e.minus_track),
            ]
            for a, b, track in quad:
                adj.setdefault(a, []).append((b, track))
                adj.setdefault(b, []).append((a, track))
        return adj

    def _path(self, src, dst):
        key = (src, dst)
        if key in self._paths:
            return self._paths[key]
        prev = {src: None}
        queue = [src]
        while queue:
            node = queue.pop(0)
            if node == dst:
                break
            for nxt, track in self._adjacency[node]:
                if nxt not in prev:
                    prev[nxt] = (node, track)
                    queue.append(nxt)
        if dst not in prev:
            raise ValueError("no quad-graph path between %r and %r" % (src, dst))
        steps = []
        node = dst
        while prev[node] is not None:
            before, track = prev[node]
            steps.append((before, node, track))
            node = before
        steps.reverse()
        self._paths[key] = steps
        return steps

    def _step_value(self, src, dst, track, u, u_vec):
        a = self.angle(track)
        if is_infinite(a):
            raise ValueError("cannot transport across a track at angle infinity")
        if abs(u - a) < POLE_TOL:
            raise PoleCollisionError(
                "evaluation point %r within %g of pole at angle %r (track %r)"
                % (u, POLE_TOL, a, track)
            )
        form = self.curve.prime_form(u, a)
        kinds = (src[0], dst[0])
        if kinds == ("F", "W"):
            arg = self.t + u_vec + self._vectors[dst]
            return complex(self.curve.theta(arg)) / form
        if kinds == ("W", "F"):
            arg = self.t + u_vec + self._vectors[src]
            return form / complex(self.curve.theta(arg))
        if kinds == ("B", "F"):
            arg = -self.t + u_vec - self._vectors[src]
            return complex(self.curve.theta(arg)) / form
        if kinds == ("F", "B"):
            arg = -self.t + u_vec - self._vectors[dst]
            return form / complex(self.curve.theta(arg))
        raise ValueError("quad-graph steps join a face to a vertex")

    def transport(self, src, dst, u):
        """Kernel function g from node src to node dst at the point u."""
        if src == dst:
            return 1.0 + 0.0j
        steps = self._path(src, dst)
        u_vec = self.curve.abel([(u, 1)])
        value = 1.0 + 0.0j
        for a, b, track in steps:
            value *= self._step_value(a, b, track, u, u_vec)
        return value

    def kernel_form(self, black, white, u):
        return self.transport(("B", black), ("W", white), u)

    # -- pointwise identities ------------------------------------------------------

    def identity_sides(self, edge, u):
        """Left and right side of the local kernel identity on one edge."""
        lhs = self.weights[edge.index] * self.kernel_form(edge.black, edge.white, u)
        beta = self.angle(edge.minus_track)
        alpha = self.angle(edge.plus_track)
        rhs = self.curve.omega_third(beta, alpha, u)
        if self.curve.genus:
            left = self.t + self._vectors[("F", edge.left_face)]
            right = self.t + self._vectors[("F", edge.right_face)]
            coeff = self.curve.dlog_theta(left) - self.curve.dlog_theta(right)
            for j in range(self.curve.genus):
                rhs += coeff[j] * self.curve.omega_first(j + 1, u)
        return lhs, rhs

    def identity_residual(self, edge, u):
        lhs, rhs = self.identity_sides(edge, u)
        scale = max(abs(lhs), abs(rhs), 1e-300)
        return abs(lhs - rhs) / scale

    def kernel_residuals(self, u, reference=None):
        """Row residuals of K g = 0 against the column anchored at reference.

        Right rows run over interior whites, left rows over interior blacks;
        each residual is the row sum over the row maximum term.
        """
        if reference is None:
            reference = ("F", self.ledger.base_face)
        g_black = {b: self.transport(("B", b), reference, u) for b in self.graph.blacks}
        g_white = {w: self.transport(reference, ("W", w), u) for w in self.graph.whites}
        right = {}
        for w in self.graph.interior_whites():
            terms = [
                self.weights[e.index] * g_black[e.black]
                for e in self.graph.edges_at_white(w)
            ]
            right[w] = abs(sum(terms)) / max(abs(t) for t in terms)
        left = {}
        for b in self.graph.interior_blacks():
            terms = [
                g_white[e.white] * self.weights[e.index]
                for e in self.graph.edges_at_black(b)
            ]
            left[b] = abs(sum(terms)) / max(abs(t) for t in terms)
        return right, left

    # -- inverse kernel -------------------------------------------------------------

    def finite_angles(self):
        return sorted(
            {t.angle for t in self.graph.tracks.values() if not is_infinite(t.angle)}
        )

    def default_height(self):
        angles = self.finite_angles()
        top = max([1.0] + [abs(a) for a in angles])
        return 2.0 * top

    def default_crossing(self, black, white):
        """Crossing point u_c for the entry (black, white).

        The admissible angle map sends the counterclockwise order of track
        directions to the cyclic order of angle values; the direction of
        b - w falls in a gap between consecutive tracks, and u_c is a point
        of the matching gap of angle values.
        """
        if self.graph.positions is None:
            raise ValueError("graph carries no embedding; pass u_c explicitly")
        keyed = []
        for tid, track in self.graph.tracks.items():
            if track.direction is None:
                raise ValueError("track %r has no geometry; pass u_c explicitly" % tid)
            keyed.append((track.sort_key(), track.angle, tid))
        keyed.sort()
        vec = complex(self.graph.positions[black]) - complex(
            self.graph.positions[white]
        )
        phi = cmath.phase(vec) % TWO_PI
        for key, _, tid in keyed:
            gap = abs(key[0] - phi)
            if min(gap, TWO_PI - gap) < 1e-9:
                raise ValueError(
                    "direction of %r - %r aligns with track %r; pass u_c"
                    % (black, white, tid)
                )
        after = 0
        while after < len(keyed) and keyed[after][0][0] < phi:
            after += 1
        prev_angle = keyed[after - 1][1]
        next_angle = keyed[after % len(keyed)][1]
        if prev_angle == next_angle:
            raise ValueError("angle map degenerate around direction %.6f" % phi)
        if prev_angle < next_angle:
            return 0.5 * (prev_angle + next_angle)
        return max(self.finite_angles()) + 1.0

    def _default_path(self, u_c, discs):
        """Default contour through u_c with endpoints independent of u_c.

        The finite-height polyline leaks an O(1/height) tail into every
        entry; the leak is a product of one-sided kernel vectors, so the
        row sums of K A cancel it exactly, but only when all entries share
        the same endpoints.  The route therefore anchors at a fixed x to
        the right of every disc, runs toward u_c inside the strip the discs
        leave free around the real axis, and crosses only at u_c.
        """
        height = self.default_height()
        if not discs:
            return [-1j * height, u_c, 1j * height]
        anchor = max(c.real + r for c, r in discs) + 1.0
        clear = min(abs(c.imag) - r for c, r in discs)
        if clear <= 0.0:
            raise PoleCollisionError(
                "isometric discs touch the real axis; no default contour"
            )
        d = min(1.0, 0.5 * clear)
        return [
            complex(anchor, -height),
            complex(anchor, -d),
            complex(u_c, -d),
            complex(u_c, d),
            complex(anchor, d),
            complex(anchor, height),
        ]

    def inverse_entry(self, black, white, u0=None, u_c=None, tol=1e-9):
        """Entry A(b, w) of the inverse kernel, a contour integral of g."""
        if u_c is None:
            u_c = self.default_crossing(black, white)
        u_c = float(u_c)
        for a in self.finite_angles():
            if abs(u_c - a) < POLE_TOL:
                raise PoleCollisionError(
                    "crossing point %r within %g of pole at angle %r"
                    % (u_c, POLE_TOL, a)
                )
        group = self.curve.group
        discs = list(group.isometric_discs().values()) if group is not None else []
        if u0 is None:
            path = self._default_path(u_c, discs)
        else:
            u0 = complex(u0)
            if u0.imag <= 0:
                raise ValueError("u0 must lie in the upper half plane")
            path = [u0.conjugate(), u_c, u0]
        if discs:
            # truncated transport is only valid outside the isometric discs;
            # a polyline clipping one integrates past orbit-image poles
            gap = _disc_gap(path, discs)
            if gap <= 0.0:
                raise PoleCollisionError(
                    "integration contour through u_c=%g enters an isometric"
                    " disc (gap %.3e); move u0 sideways or pass u_c explicitly"
                    % (u_c, gap)
                )
        f = lambda u: self.kernel_form(black, white, u)
        value = polyline_integral(f, path, tol=tol)
        return value / (2j * math.pi)

    def inverse_rows(self, rows=None, cols=None, u0=None, tol=1e-9):
        """Entries of K A restricted to chosen rows and columns.

        Returns ({(row, col): value}, {(black, col): entry}); rows and cols
        default to the interior whites.
        """
        if rows is None:
            rows = self.graph.interior_whites()
        if cols is None:
            cols = list(rows)
        entries = {}
        for w in cols:
            for row in rows:
                for e in self.graph.edges_at_white(row):
                    key = (e.black, w)
                    if key not in entries:
                        entries[key] = self.inverse_entry(
                            e.black, w, u0=u0, tol=tol
                        )
        product = {}
        for row in rows:
            for w in cols:
                total = sum(
                    self.weights[e.index] * entries[(e.black, w)]
                    for e in self.graph.edges_at_white(row)
                )
                product[(row, w)] = total
        return product, entries

    def inverse_residual(self, rows=None, cols=None, u0=None, tol=1e-9):
        product, _ = self.inverse_rows(rows=rows, cols=cols, u0=u0, tol=tol)
        worst = 0.0
        for (row, col), value in product.items():
            target = 1.0 if row == col else 0.0
            worst = max(worst, abs(value - target))
        return worst, product

    # -- Kasteleyn phases ---------------------------------------------------------

    def face_alternating_product(self, face_index):
        value = 1.0 + 0.0j
        for e, side in self.graph.face_edges(face_index):
            k = self.weights[e.index]
            value = value * k if side == "B" else value / k
        return value

    def kasteleyn_report(self, reference=None, tol=1e-8):
        """Compare face-product phases against the genus-0 weights.

        The reference carries the same combinatorics with weights
        minus-angle - plus-angle; matching phases on every interior face is
        the Kasteleyn flatness this construction is supposed to deliver.
        """
        if reference is None:
            from .curve import Curve

            reference = FockWeights(Curve(None), self.graph)
        report = {"ok": True, "max_phase_mismatch": 0.0, "faces": {}}
        for f in self.graph.interior_faces():
            ours = self.face_alternating_product(f.index)
            theirs = reference.face_alternating_product(f.index)
            diff = cmath.phase(ours / theirs)
            diff = min(abs(diff), abs(abs(diff) - TWO_PI))
            report["faces"][f.index] = diff
            report["max_phase_mismatch"] = max(report["max_phase_mismatch"], diff)
            if diff > tol:
                report["ok"] = False
        return report


def fock_weight(curve, graph, edge_index, t=None, base_face=None):
    """Weight of a single edge (builds the full table; fine for small patches)."""
    return FockWeights(curve, graph, t=t, base_face=base_face).weights[edge_index]


def write_weights_csv(weights, path):
    """Dump the weight table; columns fixed by the report format."""
    graph = weights.graph
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["w_id", "b_id", "re", "im", "alpha", "beta", "face", "face_prime"]
        )
        for e in graph.edges:
            k = weights.weights[e.index]
            writer.writerow(
                [
                    e.white,
                    e.black,
                    repr(k.real),
                    repr(k.imag),
                    repr(weights.angle(e.plus_track)),
                    repr(weights.angle(e.minus_track)),
                    e.left_face,
                    e.right_face,
                ]
            )
