"""Turning an admissible support into paths, and certifying optimality.

The support decomposer walks from a terminal with positive support, always
leaving a node through a different branch (around its dual position) than it
entered, peeling off the bottleneck weight as one path.  Strict geodesic
progress of the dual positions makes every walk simple and short; the whole
support empties after at most one path per edge plus one per node.

The certifier is deliberately independent of the solver: it recomputes tree
distances, per-edge tightness, node saturation and the exact integer duality
gap from scratch, in eighth units so that nothing is ever rounded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import SupportInconsistent
from .instance import MultiflowInstance, TreeEmbedding
from .tree_space import on_half_lattice

Potential = dict


@dataclass(frozen=True)
class HalfIntegralMultiflow:
    """Weighted terminal-to-terminal paths; weights are doubled integers."""
    paths: tuple[tuple[tuple[str, ...], int], ...]

    @property
    def total2(self) -> int:
        """Doubled total flow value."""
        return sum(w2 for _, w2 in self.paths)

    def node_flow2(self, node: str) -> int:
        return sum(w2 for nodes, w2 in self.paths if node in nodes)

    def edge_flow2(self, u: str, v: str) -> int:
        total = 0
        for nodes, w2 in self.paths:
            for a, b in zip(nodes, nodes[1:]):
                if (a, b) == (u, v) or (a, b) == (v, u):
                    total += w2
        return total

    def as_json(self) -> dict:
        return {
            "paths": [{"nodes": list(nodes), "lambda2": w2}
                      for nodes, w2 in self.paths],
            "value2": self.total2,
        }

    def to_text(self) -> str:
        return json.dumps(self.as_json(), sort_keys=True)


def decompose_support(inst: MultiflowInstance, emb: TreeEmbedding,
                      pot: Potential,
                      support2: dict[tuple[str, str], int]) -> HalfIntegralMultiflow:
    """Extract a half-integral multiflow that consumes the support exactly.

    Choices (starting terminal, next edge) always take the lowest index, so
    the output is deterministic.  Identical paths are merged and the result
    sorted; a support that cannot be consumed marks an upstream bug.
    """
    tree = emb.tree
    remaining = {e: w2 for e, w2 in support2.items() if w2 > 0}
    if any(w2 < 0 for w2 in support2.values()):
        raise SupportInconsistent("negative support weight")
    edge_order = {e: i for i, e in enumerate(inst.edges)}
    incident: dict[str, list[tuple[str, str]]] = {v: [] for v in inst.nodes}
    for e in inst.edges:
        incident[e[0]].append(e)
        incident[e[1]].append(e)

    def branch_lists(node: str) -> list[list[tuple[str, str]]]:
        point = pot[node][0]
        lists: list[list[tuple[str, str]]] = [
            [] for _ in tree.half_grid_neighbors(point)]
        for e in incident[node]:
            if remaining.get(e, 0) > 0:
                other = e[1] if e[0] == node else e[0]
                lists[tree.branch_index(point, pot[other][0])].append(e)
        return lists

    paths: dict[tuple[str, ...], int] = {}
    guard = 4 * (inst.num_edges + inst.num_nodes + 1)
    for _round in range(guard):
        start = None
        for s in sorted(inst.terminals):
            live = [e for e in incident[s] if remaining.get(e, 0) > 0]
            if live:
                start = (s, min(live, key=edge_order.get))
                break
        if start is None:
            break
        s, e0 = start
        walk = [s]
        walk_edges = [e0]
        mu2 = remaining[e0]
        cur, prev = (e0[1] if e0[0] == s else e0[0]), s
        for _step in range(inst.num_nodes + 1):
            if inst.is_terminal(cur):
                break
            lists = branch_lists(cur)
            walk.append(cur)
            k_in = tree.branch_index(pot[cur][0], pot[prev][0])
            sums = [sum(remaining[e] for e in lst) for lst in lists]
            chosen = None
            for k_out in range(len(lists)):
                if k_out == k_in or not lists[k_out]:
                    continue
                if len(lists) == 3:
                    k_other = 3 - k_in - k_out
                    spare2 = sums[k_in] + sums[k_out] - sums[k_other]
                    if spare2 <= 0:
                        continue
                    cap2 = spare2 // 2
                else:
                    cap2 = mu2
                chosen = (min(lists[k_out], key=edge_order.get), cap2)
                break
            if chosen is None:
                raise SupportInconsistent(f"stuck at node {cur}")
            nxt_edge, cap2 = chosen
            mu2 = min(mu2, remaining[nxt_edge], cap2)
            walk_edges.append(nxt_edge)
            prev, cur = cur, (nxt_edge[1] if nxt_edge[0] == cur else nxt_edge[0])
        else:
            raise SupportInconsistent("walk failed to reach a terminal")
        walk.append(cur)
        assert mu2 >= 1
        for e in walk_edges:
            remaining[e] -= mu2
            assert remaining[e] >= 0
            if remaining[e] == 0:
                del remaining[e]
        key = tuple(walk)
        if key[::-1] < key:
            key = key[::-1]
        paths[key] = paths.get(key, 0) + mu2
    if remaining:
        raise SupportInconsistent(f"support left over: {remaining}")
    return HalfIntegralMultiflow(paths=tuple(sorted(paths.items())))


@dataclass
class CertificateReport:
    """Exact optimality audit of a (multiflow, potential) pair.

    All quantities are integers in eighth units (doubled flow values times
    quarter distances); ``gap8 == 0`` together with the structural checks is
    a proof of joint optimality.
    """
    feasible_primal: bool
    feasible_dual: bool
    geodesic_paths_ok: bool      # every positive path telescopes exactly
    tight_edges_ok: bool         # every used edge has a tight dual constraint
    saturation_ok: bool          # every positive-radius node runs at capacity
    primal8: int
    dual8: int
    gap8: int
    violations: list[str] = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return (self.feasible_primal and self.feasible_dual
                and self.geodesic_paths_ok and self.tight_edges_ok
                and self.saturation_ok and self.gap8 == 0)


def certify(inst: MultiflowInstance, emb: TreeEmbedding, pot: Potential,
            flow: HalfIntegralMultiflow) -> CertificateReport:
    tree = emb.tree
    violations: list[str] = []

    feasible_primal = True
    edge_set = {frozenset(e) for e in inst.edges}
    for nodes, w2 in flow.paths:
        if w2 <= 0:
            feasible_primal = False
            violations.append(f"nonpositive weight on {nodes}")
        if (len(nodes) < 2 or not inst.is_terminal(nodes[0])
                or not inst.is_terminal(nodes[-1]) or nodes[0] == nodes[-1]
                or any(inst.is_terminal(v) for v in nodes[1:-1])
                or len(set(nodes)) != len(nodes)):
            feasible_primal = False
            violations.append(f"not a terminal-to-terminal path: {nodes}")
        for a, b in zip(nodes, nodes[1:]):
            if frozenset((a, b)) not in edge_set:
                feasible_primal = False
                violations.append(f"missing edge ({a},{b}) on {nodes}")
    for node in inst.nodes:
        if not inst.is_terminal(node):
            if flow.node_flow2(node) > 2 * inst.capacity[node]:
                feasible_primal = False
                violations.append(f"capacity exceeded at {node}")

    feasible_dual = True
    for s in inst.terminals:
        if pot[s] != (emb.anchor(s), 0):
            feasible_dual = False
            violations.append(f"terminal {s} not pinned")
    for node in inst.nodes:
        point, r4 = pot[node]
        if r4 < 0 or not on_half_lattice(tree, (point, r4)):
            feasible_dual = False
            violations.append(f"dual parity broken at {node}")
    slack8 = {}
    for u, v in inst.edges:
        (pu, ru), (pv, rv) = pot[u], pot[v]
        s4 = 4 * inst.edge_cost((u, v)) + ru + rv - tree.dist4(pu, pv)
        slack8[(u, v)] = s4
        if s4 < 0:
            feasible_dual = False
            violations.append(f"dual constraint violated on ({u},{v})")

    geodesic_paths_ok = True
    detour8 = 0
    for nodes, w2 in flow.paths:
        anchor_gap4 = tree.dist4(emb.anchor(nodes[0]), emb.anchor(nodes[-1]))
        hops4 = sum(tree.dist4(pot[a][0], pot[b][0])
                    for a, b in zip(nodes, nodes[1:]))
        if hops4 != anchor_gap4:
            geodesic_paths_ok = False
            violations.append(f"path {nodes} detours by {hops4 - anchor_gap4}/4")
        detour8 += w2 * (hops4 - anchor_gap4)

    tight_edges_ok = True
    slack_term8 = 0
    for e in inst.edges:
        f2 = flow.edge_flow2(*e)
        slack_term8 += f2 * slack8[e]
        if f2 > 0 and slack8[e] != 0:
            tight_edges_ok = False
            violations.append(f"slack edge ({e[0]},{e[1]}) carries flow")

    saturation_ok = True
    unused_term8 = 0
    for node in inst.nodes:
        if inst.is_terminal(node):
            continue
        point, r4 = pot[node]
        spare2 = 2 * inst.capacity[node] - flow.node_flow2(node)
        unused_term8 += 2 * spare2 * r4
        if r4 > 0 and spare2 != 0:
            saturation_ok = False
            violations.append(f"positive-radius node {node} not saturated")

    primal8 = sum(
        w2 * tree.dist4(emb.anchor(nodes[0]), emb.anchor(nodes[-1]))
        for nodes, w2 in flow.paths)
    primal8 -= sum(flow.edge_flow2(*e) * 4 * inst.edge_cost(e)
                   for e in inst.edges)
    dual8 = sum(4 * inst.capacity[node] * pot[node][1]
                for node in inst.nodes if not inst.is_terminal(node))
    gap8 = dual8 - primal8
    # double-entry bookkeeping: the gap decomposes into its three sources
    assert gap8 == unused_term8 + slack_term8 + detour8

    return CertificateReport(
        feasible_primal=feasible_primal, feasible_dual=feasible_dual,
        geodesic_paths_ok=geodesic_paths_ok, tight_edges_ok=tight_edges_ok,
        saturation_ok=saturation_ok, primal8=primal8, dual8=dual8, gap8=gap8,
        violations=violations)
