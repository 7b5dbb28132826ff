"""Brute-force verifiers: exhaustive duals, exhaustive flows, convexity probes.

Everything here is exponential by design and guarded by explicit size checks;
these routines exist to check the production solver, never to replace it.
Sampling is deterministic, seeded via ``HALFFLOW_SEED`` when set.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass
from itertools import product

from . import bisubmodular as bis
from .descent import g_value
from .errors import TooLarge
from .instance import MultiflowInstance, TreeEmbedding, star_embedding
from .subflow import INF, SubflowNetwork
from .tree_space import (MetricTree, TreePoint, midpoint, on_half_lattice,
                         round_pair)

BASE_VERTEX = ("v", 0)


def default_seed() -> int:
    return int(os.environ.get("HALFFLOW_SEED", "0"))


def half_grid_points(tree: MetricTree, ray_reach4: int = 0) -> list[TreePoint]:
    """All half-grid positions of a tree, rays truncated at ``ray_reach4``."""
    points: list[TreePoint] = [("v", v) for v in range(tree.n)]
    for lo, hi in tree.edges:
        points.append(tree.edge_point(lo, hi, 2))
    for rid in range(len(tree.rays)):
        points.extend(tree.ray_point(rid, t) for t in range(2, ray_reach4 + 1, 2))
    return sorted(points)


def _radii_for(tree: MetricTree, point: TreePoint, r4_max: int) -> list[int]:
    start = 0 if tree.is_vertex_point(point) else 2
    return list(range(start, r4_max + 1, 4))


def _lattice_states(tree: MetricTree, points: list[TreePoint],
                    r4_max: int) -> list[tuple[TreePoint, int]]:
    return [(p, r4) for p in points for r4 in _radii_for(tree, p, r4_max)]


def dual_enum(inst: MultiflowInstance, radius: int = 2,
              guard: int = 10 ** 7) -> int:
    """Exact dual optimum on the star embedding by exhaustive search.

    Positions range over the whole star half grid and radii up to ``radius``
    (the anchor-subtree diameter, which always contains an optimum), so the
    returned value is exactly twice the maximum flow value.
    """
    emb = star_embedding(inst)
    tree = emb.tree
    k = len(inst.terminals)
    free = [v for v in inst.nodes if not inst.is_terminal(v)]
    if ((2 * k + 1) * (2 * radius + 1)) ** len(free) > guard:
        raise TooLarge("dual enumeration above the size guard")
    states = _lattice_states(tree, half_grid_points(tree), 4 * radius)
    pot = {s: (emb.anchor(s), 0) for s in inst.terminals}
    adj: dict[str, list[str]] = {v: [] for v in free}
    for u, v in inst.edges:
        if u in adj and v in pot:
            adj[u].append(v)
        if v in adj and u in pot:
            adj[v].append(u)
    inner = [(u, v) for u, v in inst.edges
             if not inst.is_terminal(u) and not inst.is_terminal(v)]

    best = math.inf

    def ok_edge(a: TreePoint, ra: int, b: TreePoint, rb: int) -> bool:
        return tree.dist4(a, b) - ra - rb <= 0

    def rec(idx: int, partial2: int) -> None:
        nonlocal best
        if partial2 // 2 >= best:
            return
        if idx == len(free):
            for u, v in inner:
                (pu, ru), (pv, rv) = pot[u], pot[v]
                if not ok_edge(pu, ru, pv, rv):
                    return
            best = min(best, partial2 // 2)
            return
        node = free[idx]
        cap = inst.capacity[node]
        for point, r4 in states:
            good = all(ok_edge(point, r4, *pot[t]) for t in adj[node])
            if good:
                pot[node] = (point, r4)
                rec(idx + 1, partial2 + cap * r4)
                del pot[node]

    rec(0, 0)
    # radius = star diameter for every free node is feasible and in the box
    assert best is not math.inf
    return int(best)


def flow_enum(net: SubflowNetwork, guard: int = 4 * 10 ** 6) -> int:
    """Exhaustive maximum flow value over all integral flows of a tiny net."""
    caps = []
    for _, _, cap in net.edges:
        if cap == INF:
            raise TooLarge("infinite capacity in exhaustive enumeration")
        caps.append(cap)
    total = 1
    for cap in caps:
        total *= cap + 1
        if total > guard:
            raise TooLarge("flow enumeration above the size guard")
    plain = [v for v in range(net.num_nodes)
             if v not in (net.source, net.sink) and v not in net.node_block]
    best = 0
    for assignment in product(*(range(cap + 1) for cap in caps)):
        boundary = [0] * net.num_nodes
        for (u, v, _), f in zip(net.edges, assignment):
            boundary[u] -= f
            boundary[v] += f
        if any(boundary[v] != 0 for v in plain):
            continue
        ok = all(
            bis.in_base(b, [boundary[v] for v in members])
            for members, b in net.blocks)
        if ok:
            best = max(best, boundary[net.sink])
    return best


@dataclass
class ProbeReport:
    trials: int
    checked: int    # pairs with both sides feasible
    vacuous: int    # pairs where one side was infeasible


def convexity_probe(inst: MultiflowInstance, emb: TreeEmbedding, trials: int,
                    seed: int | None = None, r4_max: int | None = None,
                    ray_reach4: int = 0) -> ProbeReport:
    """Sample lattice pairs and assert discrete midpoint convexity of the dual.

    For each sampled pair (x, y): g(x) + g(y) >= g(lo) + g(hi) where (lo, hi)
    round the componentwise midpoint.  A finite left side forces both rounded
    points feasible; any violation raises immediately.
    """
    rng = random.Random(default_seed() if seed is None else seed)
    tree = emb.tree
    if r4_max is None:
        r4_max = 4 * max(2, len(inst.nodes))
    states = _lattice_states(tree, half_grid_points(tree, ray_reach4), r4_max)
    free = [v for v in inst.nodes if not inst.is_terminal(v)]
    pinned = {s: (emb.anchor(s), 0) for s in inst.terminals}

    def sample() -> dict:
        pot = dict(pinned)
        for node in free:
            pot[node] = rng.choice(states)
        return pot

    checked = vacuous = 0
    for _ in range(trials):
        x, y = sample(), sample()
        gx, gy = g_value(inst, emb, x), g_value(inst, emb, y)
        if gx is math.inf or gy is math.inf:
            vacuous += 1
            continue
        lo, hi = {}, {}
        for node in inst.nodes:
            mid = midpoint(tree, x[node], y[node])
            lo[node], hi[node] = round_pair(tree, mid, BASE_VERTEX)
        glo, ghi = g_value(inst, emb, lo), g_value(inst, emb, hi)
        assert glo is not math.inf and ghi is not math.inf, \
            "rounded midpoints of feasible pair are infeasible"
        assert gx + gy >= glo + ghi, \
            f"midpoint convexity violated: {gx}+{gy} < {glo}+{ghi}"
        checked += 1
    return ProbeReport(trials=trials, checked=checked, vacuous=vacuous)


@dataclass
class OptEnumResult:
    minimum: int
    optima: int
    linf4_from_start: int | None


def opt_enum(inst: MultiflowInstance, emb: TreeEmbedding, r4_max: int,
             ray_reach4: int, start: dict | None = None,
             guard: int = 10 ** 6) -> OptEnumResult:
    """Exhaustively minimize the dual objective over a bounded lattice box.

    The box (positions within the truncated geometry, radii up to ``r4_max``)
    always contains a global optimum; the result reports the minimum, the
    number of optima in the box, and the least lattice distance from
    ``start`` to any of them.
    """
    tree = emb.tree
    free = [v for v in inst.nodes if not inst.is_terminal(v)]
    states = _lattice_states(tree, half_grid_points(tree, ray_reach4), r4_max)
    work = len(states) ** len(free)
    if work > guard:
        raise TooLarge(f"{work} states above the size guard")
    pinned = {s: (emb.anchor(s), 0) for s in inst.terminals}

    best = math.inf
    count = 0
    best_d4: int | None = None
    for combo in product(states, repeat=len(free)):
        pot = dict(pinned)
        pot.update(zip(free, combo))
        g = g_value(inst, emb, pot)
        if g is math.inf:
            continue
        if g < best:
            best, count, best_d4 = g, 0, None
        if g == best:
            count += 1
            if start is not None:
                d4 = max((tree.dist4(start[v][0], pot[v][0])
                          + abs(start[v][1] - pot[v][1]) for v in free),
                         default=0)
                best_d4 = d4 if best_d4 is None else min(best_d4, d4)
    assert best is not math.inf, "no feasible potential in the box"
    return OptEnumResult(minimum=int(best), optima=count,
                         linf4_from_start=best_d4)


def neighborhood_minimum(inst: MultiflowInstance, emb: TreeEmbedding,
                         pot: dict, sides: str = "both",
                         guard: int = 10 ** 6) -> int | float:
    """Exact minimum of the dual objective over the one-step neighbourhood.

    ``sides`` selects the up-set product, the down-set product, or their
    union; used to audit that the descent direction is steepest.
    """
    from .tree_space import local_neighborhood

    free = [v for v in inst.nodes if not inst.is_terminal(v)]
    ups, downs = {}, {}
    for node in free:
        ups[node], downs[node] = local_neighborhood(
            emb.tree, pot[node], BASE_VERTEX)
    pools = []
    if sides in ("up", "both"):
        pools.append(ups)
    if sides in ("down", "both"):
        pools.append(downs)
    best = math.inf
    pinned = {s: (emb.anchor(s), 0) for s in inst.terminals}
    for pool in pools:
        work = 1
        for node in free:
            work *= len(pool[node])
        if work > guard:
            raise TooLarge("neighbourhood product above the size guard")
        for combo in product(*(pool[node] for node in free)):
            cand = dict(pinned)
            cand.update(zip(free, combo))
            best = min(best, g_value(inst, emb, cand))
    return best
