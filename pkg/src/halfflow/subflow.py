"""Integral maximum flow with per-block boundary constraints.

The network is an ordinary directed capacitated graph plus a collection of
pairwise disjoint six-node *blocks*; the flow boundary (excess) restricted to
each block must stay in the base polyhedron of the block bound from
:mod:`halfflow.bisubmodular`, and every other non-terminal node must conserve
flow exactly.  This shape of problem is what the double covering network of
the multiflow solver produces, and the disjointness makes every exchange
capacity a constant-time 16-subset scan.

The solver is a shortest-augmenting-path scheme over the residual network:
slack arcs, reverse arcs of positive flow, and block arcs between members of
one block with positive exchange capacity.  Along a shortest path the joint
step inside each block is computed exactly (a 64-subset scan of the block's
slack against the path direction), so feasibility is maintained without any
appeal to single-arc capacities.  The set of nodes reachable from the source
in the final residual network is the unique minimal minimum cut.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import bisubmodular as bis
from .errors import CutShapeError, Unbounded

INF = math.inf


@dataclass
class SubflowNetwork:
    num_nodes: int
    source: int
    sink: int
    edges: list[tuple[int, int, int | float]] = field(default_factory=list)
    blocks: list[tuple[tuple[int, ...], int]] = field(default_factory=list)
    bar: dict[int, int] | None = None  # skew-symmetry involution, if any

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for members, b in self.blocks:
            if len(members) != 6:
                raise ValueError("blocks carry exactly six nodes")
            if b < 0:
                raise ValueError("negative block capacity")
            for v in members:
                if v in seen or v in (self.source, self.sink):
                    raise ValueError("blocks must be disjoint and non-terminal")
                seen.add(v)
        self.node_block: dict[int, tuple[int, int]] = {
            v: (bi, ei)
            for bi, (members, _) in enumerate(self.blocks)
            for ei, v in enumerate(members)}
        for u, v, cap in self.edges:
            if cap != INF and (not isinstance(cap, int) or cap < 0):
                raise ValueError(f"bad capacity on edge ({u},{v})")

    def add_edge(self, u: int, v: int, cap: int | float) -> int:
        self.edges.append((u, v, cap))
        return len(self.edges) - 1


@dataclass
class SubFlow:
    """An integral feasible flow together with its node boundary."""
    flow: list[int]
    boundary: list[int]
    value: int
    augmentations: int = 0


class _Solver:
    def __init__(self, net: SubflowNetwork):
        self.net = net
        self.flow = [0] * len(net.edges)
        self.boundary = [0] * net.num_nodes
        self.out_edges: list[list[tuple[int, int]]] = [[] for _ in range(net.num_nodes)]
        self.in_edges: list[list[tuple[int, int]]] = [[] for _ in range(net.num_nodes)]
        for idx, (u, v, _) in enumerate(net.edges):
            self.out_edges[u].append((v, idx))
            self.in_edges[v].append((u, idx))
        for lst in self.out_edges:
            lst.sort()
        for lst in self.in_edges:
            lst.sort()
        self.block_x = [[0] * 6 for _ in net.blocks]
        self.block_slack = [
            [b * mult for mult in bis.TYPE_MULTIPLIER] for _, b in net.blocks]

    # -- residual exploration ----------------------------------------------

    def _block_arcs_from(self, u: int):
        hit = self.net.node_block.get(u)
        if hit is None:
            return
        bi, eu = hit
        members, _ = self.net.blocks[bi]
        slack = self.block_slack[bi]
        for ev, v in enumerate(members):
            if ev == eu:
                continue
            if min(slack[m] for m in bis.MASKS_UV[eu][ev]) > 0:
                yield v, bi

    def _find_path(self):
        """Shortest residual path source -> sink; None when none exists."""
        net = self.net
        parent: dict[int, tuple] = {net.source: ()}
        queue = [net.source]
        while queue:
            nxt: list[int] = []
            for u in queue:
                steps: list[tuple[int, tuple]] = []
                for v, idx in self.out_edges[u]:
                    _, _, cap = net.edges[idx]
                    if self.flow[idx] < cap:
                        steps.append((v, ("fwd", idx, u, v)))
                for v, idx in self.in_edges[u]:
                    if self.flow[idx] > 0:
                        steps.append((v, ("rev", idx, u, v)))
                for v, bi in self._block_arcs_from(u):
                    steps.append((v, ("blk", bi, u, v)))
                for v, label in sorted(steps):
                    if v not in parent:
                        parent[v] = label
                        if v == net.sink:
                            return self._trace(parent)
                        nxt.append(v)
            queue = nxt
        self._reachable = frozenset(parent)
        return None

    def _trace(self, parent):
        path = []
        v = self.net.sink
        while v != self.net.source:
            label = parent[v]
            path.append(label)
            v = label[2]
        path.reverse()
        return path

    # -- augmentation --------------------------------------------------------

    def _augment(self, path) -> int:
        net = self.net
        delta = INF
        directions: dict[int, list[int]] = {}
        for label in path:
            kind, idx, u, v = label
            if kind == "fwd":
                delta = min(delta, net.edges[idx][2] - self.flow[idx])
            elif kind == "rev":
                delta = min(delta, self.flow[idx])
            else:
                w = directions.setdefault(idx, [0] * 6)
                w[net.node_block[u][1]] += 1
                w[net.node_block[v][1]] -= 1
        for bi, w in directions.items():
            slack = self.block_slack[bi]
            for mask in range(1, 64):
                wm = bis.mask_sum(w, mask)
                if wm >= 1:
                    delta = min(delta, slack[mask] // wm)
        if delta is INF:
            raise Unbounded("augmenting path of unlimited capacity")
        # A shortest path admits no residual shortcuts, which forces a
        # strictly positive joint step; anything else is a solver bug.
        assert delta >= 1, "joint block step collapsed to zero"
        for label in path:
            kind, idx, u, v = label
            if kind == "fwd":
                self.flow[idx] += delta
                self.boundary[u] -= delta
                self.boundary[v] += delta
            elif kind == "rev":
                self.flow[idx] -= delta
                self.boundary[v] -= delta
                self.boundary[u] += delta
        for bi in directions:
            members, b = net.blocks[bi]
            x = [self.boundary[v] for v in members]
            self.block_x[bi] = x
            table = bis.signed_bound_table(b)
            self.block_slack[bi] = [
                table[m] - bis.mask_sum(x, m) for m in range(64)]
            assert min(self.block_slack[bi]) >= 0 and sum(x) == 0
        return delta

    def run(self) -> tuple[SubFlow, frozenset]:
        augmentations = 0
        while True:
            path = self._find_path()
            if path is None:
                break
            self._augment(path)
            augmentations += 1
        sub = SubFlow(flow=list(self.flow), boundary=list(self.boundary),
                      value=self.boundary[self.net.sink],
                      augmentations=augmentations)
        return sub, self._reachable


def max_subflow(net: SubflowNetwork) -> tuple[SubFlow, frozenset]:
    """Integral maximum flow and the minimal minimum source-side cut."""
    return _Solver(net).run()


def cut_capacity(net: SubflowNetwork, cut) -> int | float:
    """Capacity of a source-side cut: leaving edges plus block bounds."""
    cut = set(cut)
    if net.source not in cut or net.sink in cut:
        raise CutShapeError("cut must contain the source and avoid the sink")
    total: int | float = 0
    for u, v, cap in net.edges:
        if u in cut and v not in cut:
            total += cap
    for members, b in net.blocks:
        mask = 0
        for ei, v in enumerate(members):
            if v in cut:
                mask |= 1 << ei
        total += bis.signed_bound(b, mask)
    return total


def residual_reachable(net: SubflowNetwork, sub: SubFlow) -> frozenset:
    """Source-reachable set in the residual network of ``sub``.

    Rebuilt from scratch; used by tests as an independent check of the
    minimal minimum cut returned by the solver.
    """
    solver = _Solver(net)
    solver.flow = list(sub.flow)
    solver.boundary = list(sub.boundary)
    for bi, (members, b) in enumerate(net.blocks):
        x = [sub.boundary[v] for v in members]
        solver.block_x[bi] = x
        table = bis.signed_bound_table(b)
        solver.block_slack[bi] = [table[m] - bis.mask_sum(x, m) for m in range(64)]
    if solver._find_path() is not None:
        raise ValueError("flow is not maximum")
    return solver._reachable


def verify_min_cut_transversal(net: SubflowNetwork, cut) -> bool:
    """On a skew-symmetric network, a minimal minimum cut never contains a
    node together with its mirror (source aside)."""
    if net.bar is None:
        raise ValueError("network carries no skew-symmetry involution")
    inner = set(cut) - {net.source}
    return all(net.bar[v] not in inner for v in inner)
