"""Tree geometry for the dual space of the multiflow problem.

A :class:`MetricTree` is a finite tree whose edges all have length one,
optionally extended by infinite rays glued at designated vertices.  All
coordinates are kept in integer *quarter units* (one unit = one quarter of a
tree edge), so every computation below is exact integer arithmetic:

* original tree vertices sit at offsets that are multiples of 4,
* half-grid vertices (edge subdivision points) at multiples of 2,
* quarter-grid points at every integer offset.

Points are plain tuples:

* ``("v", vid)``       -- a skeleton vertex;
* ``("e", eidx, q)``   -- interior point of skeleton edge ``eidx`` at
  ``q`` quarter units from the smaller endpoint, ``1 <= q <= 3``;
* ``("r", rid, t)``    -- point on ray ``rid`` at ``t >= 1`` quarter units
  from its glue vertex.

The canonical form is unique: offsets 0 and 4 on an edge and distance 0 on a
ray are normalised to the vertex form.

A *lattice point* is a pair ``(point, r4)`` of a half-grid point and a radius
in quarter units, subject to the parity coupling: the point is a tree vertex
exactly when ``r4`` is a multiple of 4.  Lattice points carry a black/white
coloring (relative to a base vertex), an acyclic orientation and the induced
partial order; those drive the steepest-descent neighbourhoods.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

TreePoint = tuple
LatticePoint = tuple  # (TreePoint, r4)

BLACK = "black"
WHITE = "white"

EDGE_LEN4 = 4  # one tree edge in quarter units


class MetricTree:
    """Finite tree skeleton with unit edge lengths plus optional infinite rays.

    Rays are addressed lazily by distance; nothing is materialised.
    """

    def __init__(self, num_vertices: int, edges: Sequence[tuple[int, int]],
                 rays: Sequence[int] = ()):
        self.n = num_vertices
        self.edges: list[tuple[int, int]] = []
        self.edge_index: dict[tuple[int, int], int] = {}
        self.adj: list[list[int]] = [[] for _ in range(num_vertices)]
        for u, v in edges:
            if u == v or not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise ValueError(f"bad edge ({u},{v})")
            lo, hi = (u, v) if u < v else (v, u)
            if (lo, hi) in self.edge_index:
                raise ValueError(f"duplicate edge ({lo},{hi})")
            self.edge_index[(lo, hi)] = len(self.edges)
            self.edges.append((lo, hi))
            self.adj[u].append(v)
            self.adj[v].append(u)
        for lst in self.adj:
            lst.sort()
        self.rays: list[int] = list(rays)  # rid -> glue vertex
        self.rays_at: list[list[int]] = [[] for _ in range(num_vertices)]
        for rid, glue in enumerate(self.rays):
            self.rays_at[glue].append(rid)
        if len(self.edges) != num_vertices - 1:
            raise ValueError("skeleton is not a tree")
        self._bfs_tables()

    def _bfs_tables(self) -> None:
        n = self.n
        self.dist_v = [[-1] * n for _ in range(n)]
        self.next_hop = [[-1] * n for _ in range(n)]
        for src in range(n):
            dist = self.dist_v[src]
            dist[src] = 0
            first = self.next_hop[src]
            queue = deque([src])
            while queue:
                u = queue.popleft()
                for w in self.adj[u]:
                    if dist[w] < 0:
                        dist[w] = dist[u] + 1
                        first[w] = w if u == src else first[u]
                        queue.append(w)
            if any(d < 0 for d in dist):
                raise ValueError("skeleton is not connected")

    # -- canonical points -------------------------------------------------

    def vertex(self, vid: int) -> TreePoint:
        return ("v", vid)

    def edge_point(self, u: int, v: int, q: int) -> TreePoint:
        """Point at ``q`` quarter units from ``u`` along edge ``uv``."""
        lo, hi = (u, v) if u < v else (v, u)
        if u != lo:
            q = EDGE_LEN4 - q
        if q == 0:
            return ("v", lo)
        if q == EDGE_LEN4:
            return ("v", hi)
        return ("e", self.edge_index[(lo, hi)], q)

    def ray_point(self, rid: int, t: int) -> TreePoint:
        if t < 0:
            raise ValueError("negative ray distance")
        if t == 0:
            return ("v", self.rays[rid])
        return ("r", rid, t)

    def gamma_offset(self, p: TreePoint) -> int:
        """Offset of ``p`` modulo 4 along its carrier (0 for tree vertices)."""
        if p[0] == "v":
            return 0
        return p[2] % EDGE_LEN4

    def is_vertex_point(self, p: TreePoint) -> bool:
        """True when ``p`` is a vertex of the original (unsubdivided) tree."""
        return self.gamma_offset(p) == 0

    def on_half_grid(self, p: TreePoint) -> bool:
        return self.gamma_offset(p) % 2 == 0

    def gamma_degree(self, p: TreePoint) -> int:
        """Degree of an original-tree vertex point (ray counts as one edge)."""
        if not self.is_vertex_point(p):
            raise ValueError("not an original-tree vertex")
        if p[0] == "v":
            vid = p[1]
            return len(self.adj[vid]) + len(self.rays_at[vid])
        return 2  # interior ray vertex

    # -- distances ---------------------------------------------------------

    def _exits(self, p: TreePoint) -> list[tuple[int, int]]:
        """(skeleton vertex, cost) pairs through which geodesics leave ``p``."""
        if p[0] == "v":
            return [(p[1], 0)]
        if p[0] == "e":
            lo, hi = self.edges[p[1]]
            return [(lo, p[2]), (hi, EDGE_LEN4 - p[2])]
        return [(self.rays[p[1]], p[2])]

    def dist4(self, a: TreePoint, b: TreePoint) -> int:
        """Tree metric between two points, in quarter units."""
        if a == b:
            return 0
        if a[0] == "e" and b[0] == "e" and a[1] == b[1]:
            return abs(a[2] - b[2])
        if a[0] == "r" and b[0] == "r" and a[1] == b[1]:
            return abs(a[2] - b[2])
        best = None
        for ea, ca in self._exits(a):
            for eb, cb in self._exits(b):
                d = ca + EDGE_LEN4 * self.dist_v[ea][eb] + cb
                if best is None or d < best:
                    best = d
        return best

    def point_at4(self, a: TreePoint, b: TreePoint, t: int) -> TreePoint:
        """The point at distance ``t`` from ``a`` on the geodesic to ``b``."""
        d = self.dist4(a, b)
        if not 0 <= t <= d:
            raise ValueError(f"walk distance {t} outside [0,{d}]")
        if t == 0:
            return a
        if t == d:
            return b
        # same-carrier segments
        if a[0] == "e" and b[0] == "e" and a[1] == b[1]:
            q = a[2] + t if b[2] > a[2] else a[2] - t
            lo, hi = self.edges[a[1]]
            return self.edge_point(lo, hi, q)
        if a[0] == "r" and b[0] == "r" and a[1] == b[1]:
            s = a[2] + t if b[2] > a[2] else a[2] - t
            return self.ray_point(a[1], s)
        # leave a's carrier through the exit on the geodesic
        exit_v, exit_cost = min(
            self._exits(a),
            key=lambda ec: ec[1] + self.dist4(("v", ec[0]), b))
        if t < exit_cost:
            if a[0] == "e":
                lo, hi = self.edges[a[1]]
                q = a[2] - t if exit_v == lo else a[2] + t
                return self.edge_point(lo, hi, q)
            return self.ray_point(a[1], a[2] - t)
        return self._from_vertex(exit_v, b, t - exit_cost)

    def _from_vertex(self, v: int, b: TreePoint, t: int) -> TreePoint:
        """Walk ``t`` quarter units from skeleton vertex ``v`` toward ``b``."""
        if t == 0:
            return ("v", v)
        if b[0] == "r":
            glue = self.rays[b[1]]
            skel = EDGE_LEN4 * self.dist_v[v][glue]
            if t > skel:
                return self.ray_point(b[1], t - skel)
            target = glue
        elif b[0] == "e":
            lo, hi = self.edges[b[1]]
            via_lo = EDGE_LEN4 * self.dist_v[v][lo] + b[2]
            via_hi = EDGE_LEN4 * self.dist_v[v][hi] + (EDGE_LEN4 - b[2])
            end = lo if via_lo <= via_hi else hi
            skel = EDGE_LEN4 * self.dist_v[v][end]
            if t > skel:
                q = t - skel
                return self.edge_point(end, hi if end == lo else lo, q)
            target = end
        else:
            target = b[1]
        # walk vertex-to-vertex on the skeleton
        u = v
        while t >= EDGE_LEN4:
            u2 = self.next_hop[u][target]
            t -= EDGE_LEN4
            if t == 0:
                return ("v", u2)
            u = u2
        u2 = self.next_hop[u][target]
        return self.edge_point(u, u2, t)

    # -- grid neighbours ---------------------------------------------------

    def half_grid_neighbors(self, p: TreePoint) -> list[TreePoint]:
        """Neighbours of a half-grid point on the half grid, 2 units away.

        The order is canonical (skeleton edges by far endpoint, then rays by
        id; inward before outward on a ray) and defines the branch numbering
        used everywhere else.
        """
        if not self.on_half_grid(p):
            raise ValueError("not a half-grid point")
        if p[0] == "v":
            vid = p[1]
            out = [self.edge_point(vid, u, 2) for u in self.adj[vid]]
            out.extend(self.ray_point(rid, 2) for rid in self.rays_at[vid])
            return out
        if p[0] == "e":
            lo, hi = self.edges[p[1]]
            return [("v", lo), ("v", hi)]
        rid, t = p[1], p[2]
        return [self.ray_point(rid, t - 2), self.ray_point(rid, t + 2)]

    def vertex_neighbors(self, p: TreePoint) -> list[TreePoint]:
        """Adjacent original-tree vertices of a vertex point, 4 units away."""
        if not self.is_vertex_point(p):
            raise ValueError("not an original-tree vertex")
        if p[0] == "v":
            vid = p[1]
            out = [("v", u) for u in self.adj[vid]]
            out.extend(self.ray_point(rid, 4) for rid in self.rays_at[vid])
            return out
        rid, t = p[1], p[2]
        return [self.ray_point(rid, t - 4), self.ray_point(rid, t + 4)]

    def branch_index(self, p: TreePoint, toward: TreePoint) -> int:
        """Index (0-based) of the branch at ``p`` containing ``toward``."""
        d = self.dist4(p, toward)
        if d < 2:
            raise ValueError("target too close to define a branch")
        for k, nb in enumerate(self.half_grid_neighbors(p)):
            if self.dist4(nb, toward) == d - 2:
                return k
        raise AssertionError("no branch found; broken geometry")


# -- lattice ---------------------------------------------------------------

def on_half_lattice(tree: MetricTree, x: LatticePoint) -> bool:
    """Membership in the parity-coupled half lattice (potentials live here)."""
    p, r4 = x
    if not tree.on_half_grid(p) or r4 % 2 != 0:
        return False
    return tree.is_vertex_point(p) == (r4 % 4 == 0)


def on_quarter_lattice(tree: MetricTree, z: LatticePoint) -> bool:
    """Membership in the quarter lattice (midpoints live here)."""
    p, t4 = z
    return tree.on_half_grid(p) == (t4 % 2 == 0)


def color(tree: MetricTree, x: LatticePoint, base: TreePoint) -> str | None:
    """Black/white coloring of a lattice point, or None off the integer grid.

    Black points are the sinks of the lattice orientation, white points the
    sources; points with a non-vertex position are uncolored.
    """
    p, r4 = x
    if not tree.is_vertex_point(p) or r4 % 4 != 0:
        return None
    return BLACK if ((tree.dist4(p, base) + r4) // 4) % 2 == 0 else WHITE


def lattice_adjacent(tree: MetricTree, x: LatticePoint, y: LatticePoint) -> bool:
    return tree.dist4(x[0], y[0]) == 2 and abs(x[1] - y[1]) == 2


def leq(tree: MetricTree, x: LatticePoint, y: LatticePoint,
        base: TreePoint) -> bool:
    """Covering relation of the lattice order: edges are oriented into black
    sinks and out of white sources; ``leq(x, y)`` holds when the edge between
    adjacent ``x`` and ``y`` points from ``x`` to ``y`` (black on top)."""
    if x == y:
        return True
    if not lattice_adjacent(tree, x, y):
        return False
    return color(tree, y, base) == BLACK or color(tree, x, base) == WHITE


def midpoint(tree: MetricTree, x: LatticePoint, y: LatticePoint) -> LatticePoint:
    """The unique quarter-lattice midpoint of two half-lattice points."""
    d = tree.dist4(x[0], y[0])
    q = tree.point_at4(x[0], y[0], d // 2)
    return (q, (x[1] + y[1]) // 2)


def round_pair(tree: MetricTree, z: LatticePoint,
               base: TreePoint) -> tuple[LatticePoint, LatticePoint]:
    """The unique ordered half-lattice pair averaging to quarter point ``z``.

    Returns ``(lo, hi)`` with ``lo`` below ``hi`` in the lattice order and
    ``midpoint(lo, hi) == z``; a half-lattice ``z`` yields ``(z, z)``.
    """
    p, t4 = z
    if not on_quarter_lattice(tree, z):
        raise ValueError("not a quarter-lattice point")
    if on_half_lattice(tree, z):
        return (z, z)

    def order(a: LatticePoint, b: LatticePoint):
        ca = color(tree, a, base)
        cb = color(tree, b, base)
        if ca == WHITE or cb == BLACK:
            return (a, b)
        if cb == WHITE or ca == BLACK:
            return (b, a)
        raise AssertionError("incomparable rounding pair")

    if not tree.on_half_grid(p):
        # centre of a lattice edge: snap position one unit each way
        if p[0] == "e":
            lo, hi = tree.edges[p[1]]
            ends = [tree.edge_point(lo, hi, p[2] - 1),
                    tree.edge_point(lo, hi, p[2] + 1)]
        else:
            ends = [tree.ray_point(p[1], p[2] - 1),
                    tree.ray_point(p[1], p[2] + 1)]
        cands = []
        for u in ends:
            want = 0 if tree.is_vertex_point(u) else 2
            r4 = t4 - 1 if (t4 - 1) % 4 == want else t4 + 1
            cands.append((u, r4))
        return order(*cands)
    # centre of a 4-cycle: the comparable diagonal is the colored one
    if tree.is_vertex_point(p):
        return order((p, t4 - 2), (p, t4 + 2))
    u1, u2 = tree.half_grid_neighbors(p)
    return order((u1, t4), (u2, t4))


def d_inf4(tree: MetricTree, xs: Iterable[LatticePoint],
           ys: Iterable[LatticePoint]) -> int:
    """Componentwise l-infinity lattice distance, in quarter units."""
    best = 0
    for x, y in zip(xs, ys, strict=True):
        best = max(best, tree.dist4(x[0], y[0]) + abs(x[1] - y[1]))
    return best


def local_neighborhood(tree: MetricTree, x: LatticePoint, base: TreePoint,
                       ) -> tuple[list[LatticePoint], list[LatticePoint]]:
    """The two one-step descent neighbourhoods of a half-lattice point.

    Returns ``(up, down)`` where ``up`` collects every point weakly above
    ``x`` and ``down`` every point weakly below it with nonnegative radius.
    Black points see the full six-pattern family above them and only
    themselves below; white points are the mirror image; uncolored points get
    exactly one colored neighbour on each side.
    """
    p, r4 = x
    if not on_half_lattice(tree, x) or r4 < 0:
        raise ValueError("not a nonnegative half-lattice point")
    col = color(tree, x, base)
    if col is None:
        cands = []
        for u in tree.half_grid_neighbors(p):
            for s4 in (r4 - 2, r4 + 2):
                if s4 >= 0 and on_half_lattice(tree, (u, s4)):
                    cands.append((u, s4))
        up = [x] + [c for c in cands if color(tree, c, base) == WHITE]
        down = [x] + [c for c in cands if color(tree, c, base) == BLACK]
    else:
        big = [x]
        for u in tree.half_grid_neighbors(p):
            for s4 in (r4 - 2, r4 + 2):
                if s4 >= 0:
                    big.append((u, s4))
        for s4 in (r4 - 4, r4 + 4):
            if s4 >= 0:
                big.append((p, s4))
        big.extend((v, r4) for v in tree.vertex_neighbors(p))
        if col == BLACK:
            up, down = big, [x]
        else:
            up, down = [x], big
    return (sorted(up), sorted(down))
