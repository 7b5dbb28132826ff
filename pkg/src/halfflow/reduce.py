"""Perturbation to a nondegenerate geometry and recovery of the star dual.

The original problem lives on a star, whose centre usually has degree above
three and whose costs are zero; neither is allowed by the descent engine.  The
cure: give every edge cost two, and embed against a small trivalent *hub
tree* with one infinite ray per terminal, each anchor pushed far out on its
ray.  The stretch factor is chosen so that the ray splits into ``2m + 1``
disjoint *bands* of hub-diameter length; since a tight edge can straddle at
most two bands, some band is straddled by no edge at all, and cutting each
ray at that band's outermost edge classifies every dual ball into one of the
star positions.  That classification is exactly the optimal star dual.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .instance import MultiflowInstance, TreeEmbedding, star_embedding
from .tree_space import EDGE_LEN4, MetricTree, TreePoint


def build_hub_tree(k: int) -> tuple[MetricTree, list[int]]:
    """A trivalent tree with ``k`` leaves and logarithmic diameter.

    Built as a balanced full binary tree with the degree-2 root suppressed;
    returns the tree and its leaf ids in construction order.
    """
    if k < 2:
        raise ValidationError("need at least two terminals")
    edges: list[tuple[int, int]] = []
    leaves: list[int] = []
    counter = 0

    def grow(count: int) -> int:
        nonlocal counter
        root = counter
        counter += 1
        if count == 1:
            leaves.append(root)
            return root
        left = grow((count + 1) // 2)
        right = grow(count // 2)
        edges.append((root, left))
        edges.append((root, right))
        return root

    if k == 2:
        tree = MetricTree(2, [(0, 1)])
        return tree, [0, 1]
    grow(k)
    # suppress the degree-2 root (vertex 0): join its two children directly
    kids = sorted(v for u, v in edges if u == 0)
    edges = [(u, v) for u, v in edges if u != 0] + [tuple(kids)]
    remap = {old: new for new, old in enumerate(range(1, counter))}
    edges = [(remap[u], remap[v]) for u, v in edges]
    tree = MetricTree(counter - 1, edges)
    return tree, [remap[v] for v in leaves]


@dataclass(frozen=True)
class PerturbedProblem:
    """Cost-two copy of an instance with its nondegenerate embedding."""
    instance: MultiflowInstance
    embedding: TreeEmbedding
    hub_diameter: int         # diameter of the hub tree, in edges
    band_count: int           # 2m + 1
    anchor_t4: int            # ray distance of each anchor, quarter units
    ray_of: dict[str, int]    # terminal -> ray id


def perturb(inst: MultiflowInstance) -> PerturbedProblem:
    """Nondegenerate copy: cost two everywhere, anchors far out on rays."""
    terms = sorted(inst.terminals)
    hub, hub_leaves = build_hub_tree(len(terms))
    diameter = max(hub.dist_v[a][b] for a in hub_leaves for b in hub_leaves)
    tree = MetricTree(hub.n, hub.edges, rays=hub_leaves)
    band_count = 2 * inst.num_edges + 1
    anchor_t4 = EDGE_LEN4 * band_count * diameter
    ray_of = {s: rid for rid, s in enumerate(terms)}
    anchors = {s: tree.ray_point(ray_of[s], anchor_t4) for s in terms}
    emb = TreeEmbedding(tree=tree, anchors=anchors)
    return PerturbedProblem(
        instance=inst.with_cost(2), embedding=emb, hub_diameter=diameter,
        band_count=band_count, anchor_t4=anchor_t4, ray_of=ray_of)


def band_edges(prob: PerturbedProblem, band: int) -> list[tuple[TreePoint, TreePoint]]:
    """The ray edges of one band, as (inner endpoint, outer endpoint) pairs."""
    tree = prob.embedding.tree
    d4 = EDGE_LEN4 * prob.hub_diameter
    out = []
    for rid in range(len(tree.rays)):
        for j in range(prob.hub_diameter):
            lo = band * d4 + EDGE_LEN4 * j
            out.append((tree.ray_point(rid, lo),
                        tree.ray_point(rid, lo + EDGE_LEN4)))
    return out


def gate_edge(prob: PerturbedProblem, terminal: str,
              band: int) -> tuple[TreePoint, TreePoint]:
    """Outermost edge of a band on one terminal's ray."""
    tree = prob.embedding.tree
    hi = EDGE_LEN4 * (band + 1) * prob.hub_diameter
    rid = prob.ray_of[terminal]
    return (tree.ray_point(rid, hi - EDGE_LEN4), tree.ray_point(rid, hi))


def hit_test(tree: MetricTree, ball_i: tuple[TreePoint, int],
             ball_j: tuple[TreePoint, int],
             edge: tuple[TreePoint, TreePoint]) -> bool:
    """Does the gap between two disjoint balls cover a whole tree edge?

    The balls are (centre, radius4) pairs; overlapping balls never hit.
    """
    (pi, ri), (pj, rj) = ball_i, ball_j
    d = tree.dist4(pi, pj)
    if d - ri - rj <= 0:
        return False
    u, v = edge
    if tree.dist4(pi, u) > tree.dist4(pi, v):
        u, v = v, u
    du, dv = tree.dist4(pi, u), tree.dist4(pi, v)
    on_geodesic = (dv - du == EDGE_LEN4
                   and du + EDGE_LEN4 + tree.dist4(v, pj) == d)
    return on_geodesic and du >= ri and tree.dist4(v, pj) >= rj


def find_clean_band(prob: PerturbedProblem, pot: dict) -> int:
    """First band whose edges sit in no tight gap of the given potential.

    The bands are edge-disjoint and each instance edge can cover edges of at
    most two of them, so with ``2m + 1`` bands one is always clean.
    """
    inst, tree = prob.instance, prob.embedding.tree
    balls = {i: pot[i] for i in inst.nodes}
    for band in range(prob.band_count):
        edges = band_edges(prob, band)
        if not any(hit_test(tree, balls[u], balls[v], e)
                   for u, v in inst.edges for e in edges):
            return band
    raise AssertionError("no clean band; pigeonhole violated")


def _ball_contains_edge(tree: MetricTree, ball: tuple[TreePoint, int],
                        edge: tuple[TreePoint, TreePoint]) -> bool:
    (p, r4), (u, v) = ball, edge
    return tree.dist4(p, u) <= r4 and tree.dist4(p, v) <= r4


def recover(inst: MultiflowInstance, prob: PerturbedProblem,
            pot_tilde: dict) -> tuple[dict, int]:
    """Optimal star potential from an optimal perturbed potential.

    Picks a clean band, takes each ray's outermost band edge as a gate, and
    maps every dual ball to a star position: centre with radius one when it
    swallows two gates, a leaf-edge midpoint with radius one half when it
    swallows exactly one, and the vertex of its home region with radius zero
    otherwise.  The caller certifies the result against the multiflow.
    """
    tree = prob.embedding.tree
    emb_star = star_embedding(inst)
    star = emb_star.tree
    terms = sorted(inst.terminals)
    band = find_clean_band(prob, pot_tilde)
    gates = {s: gate_edge(prob, s, band) for s in terms}
    gate_hi4 = EDGE_LEN4 * (band + 1) * prob.hub_diameter

    pot: dict = {}
    for node in inst.nodes:
        if inst.is_terminal(node):
            pot[node] = (emb_star.anchor(node), 0)
            continue
        ball = pot_tilde[node]
        swallowed = [s for s in terms
                     if _ball_contains_edge(tree, ball, gates[s])]
        if len(swallowed) >= 2:
            pot[node] = (("v", 0), 4)
        elif len(swallowed) == 1:
            leaf = emb_star.leaf_of[swallowed[0]]
            pot[node] = (star.edge_point(0, leaf, 2), 2)
        else:
            point = ball[0]
            if not tree.is_vertex_point(point):
                # both carrier endpoints are in the ball and in one region
                point = tree.half_grid_neighbors(point)[0]
                if not tree.is_vertex_point(point):
                    point = tree.half_grid_neighbors(point)[0]
            if point[0] == "r" and point[2] >= gate_hi4:
                rid = point[1]
                leaf = emb_star.leaf_of[terms[rid]]
                pot[node] = (("v", leaf), 0)
            else:
                pot[node] = (("v", 0), 0)
    return pot, band
