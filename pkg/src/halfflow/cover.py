"""The doubled network that prices a dual potential.

Given a potential, the edges where the dual constraint is tight form the only
possible support of an optimal flow.  Each network node is blown up into a
small group of signed copies (two per terminal, four per flat node, eight per
positive branch node, six per zero branch node), tight edges become a
skew-symmetric pair of arcs between the groups, and the node-capacity and
conservation constraints turn into edge bounds plus, at zero branch nodes, a
six-element block constraint.  Lower-bounded edges are rerouted through a
super source/sink pair, so checking whether the potential is optimal is one
maximum block-constrained flow:

* if the minimal minimum cut is the bare source, any maximum flow folds back
  into a circulation whose halved tight-arc weights form an admissible
  support (an optimal multiflow in disguise);
* otherwise the normalized cut, split by the black/white coloring of the
  lattice, yields the two candidate steepest-descent updates of the potential.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import bisubmodular as bis
from . import tree_space as ts
from .errors import (DegenerateInstance, InfeasiblePotential, InfiniteCut,
                     NormalizationFailed, NotOptimalYet, PatternError)
from .instance import MultiflowInstance, TreeEmbedding
from .subflow import INF, SubFlow, SubflowNetwork, cut_capacity, max_subflow

Potential = dict  # node id -> (TreePoint, r4)

BASE_VERTEX = ("v", 0)  # coloring base: canonical first tree vertex


def feasibility_slack4(tree, pot: Potential, u: str, v: str, cost: int) -> int:
    """Slack of the dual edge constraint, in quarter units (tight = 0)."""
    (pu, ru), (pv, rv) = pot[u], pot[v]
    return 4 * cost + ru + rv - tree.dist4(pu, pv)


def tight_edges(inst: MultiflowInstance, emb: TreeEmbedding,
                pot: Potential) -> list[tuple[str, str]]:
    """Edges whose dual constraint holds with equality."""
    out = []
    for u, v in inst.edges:
        slack = feasibility_slack4(emb.tree, pot, u, v, inst.edge_cost((u, v)))
        if slack < 0:
            raise InfeasiblePotential(f"edge ({u},{v}) violated by {-slack}/4")
        if slack == 0:
            out.append((u, v))
    return out


@dataclass
class NodeGroup:
    node: str
    kind: str                     # "terminal" | "flat" | "branch"
    positive: bool
    plus: tuple[int, ...]         # copies indexed by branch (terminals: one)
    minus: tuple[int, ...]
    hub_plus: int | None = None   # centre copies of a positive branch node
    hub_minus: int | None = None

    @property
    def members(self) -> tuple[int, ...]:
        extra = ()
        if self.hub_plus is not None:
            extra = (self.hub_plus, self.hub_minus)
        return self.plus + self.minus + extra

    @property
    def plus_side(self) -> tuple[int, ...]:
        return self.plus + ((self.hub_plus,) if self.hub_plus is not None else ())

    @property
    def minus_side(self) -> tuple[int, ...]:
        return self.minus + ((self.hub_minus,) if self.hub_minus is not None else ())


@dataclass
class DoubleCoverNetwork:
    inst: MultiflowInstance
    emb: TreeEmbedding
    pot: Potential
    net: SubflowNetwork
    groups: dict[str, NodeGroup]
    # D-edge key -> index in net.edges, for edges kept verbatim
    kept: dict[tuple, int]
    # D-edge key -> (bound, source-stub index, sink-stub index) for rerouted
    # lower-bounded edges
    rerouted: dict[tuple, tuple[int, int, int]]
    tight: list[tuple[str, str]]
    # instance edge -> indices of its two tight arcs in net.edges
    tight_arcs: dict[tuple[str, str], tuple[int, int]]
    branch_nbrs: dict[str, list] = field(default_factory=dict)

    @property
    def source(self) -> int:
        return self.net.source

    @property
    def sink(self) -> int:
        return self.net.sink


def _classify(inst, emb, pot, node):
    point, r4 = pot[node]
    tree = emb.tree
    if not ts.on_half_lattice(tree, (point, r4)) or r4 < 0:
        raise InfeasiblePotential(f"node {node} is off the lattice")
    if tree.is_vertex_point(point) and tree.gamma_degree(point) > 3:
        raise DegenerateInstance(f"position of {node} has tree degree > 3")
    branch = tree.is_vertex_point(point) and tree.gamma_degree(point) == 3
    return ("branch" if branch else "flat"), r4 > 0


def build_cover(inst: MultiflowInstance, emb: TreeEmbedding,
                pot: Potential) -> DoubleCoverNetwork:
    """Construct the doubled network of a potential, in source/sink form."""
    tree = emb.tree
    for e in inst.edges:
        a = inst.edge_cost(e)
        if a <= 0 or a % 2 != 0:
            raise DegenerateInstance(f"edge {e} must have positive even cost")
    for s in inst.terminals:
        if pot[s] != (emb.anchor(s), 0):
            raise InfeasiblePotential(f"terminal {s} is not pinned")

    tight = tight_edges(inst, emb, pot)
    groups: dict[str, NodeGroup] = {}
    bar: dict[int, int] = {0: 1, 1: 0}
    counter = 2

    def fresh(n: int) -> list[int]:
        nonlocal counter
        ids = list(range(counter, counter + n))
        counter += n
        return ids

    blocks: list[tuple[tuple[int, ...], int]] = []
    branch_nbrs: dict[str, list] = {}
    for node in inst.nodes:
        if inst.is_terminal(node):
            sp, sm = fresh(2)
            groups[node] = NodeGroup(node, "terminal", False, (sp,), (sm,))
            bar[sp], bar[sm] = sm, sp
            continue
        kind, positive = _classify(inst, emb, pot, node)
        point, _ = pot[node]
        nbrs = tree.half_grid_neighbors(point)
        branch_nbrs[node] = nbrs
        deg = len(nbrs)
        if kind == "flat":
            if deg != 2:
                raise DegenerateInstance(f"flat node {node} with degree {deg}")
            p1, p2, m1, m2 = fresh(4)
            groups[node] = NodeGroup(node, "flat", positive, (p1, p2), (m1, m2))
            bar[p1], bar[m1] = m1, p1
            bar[p2], bar[m2] = m2, p2
        else:
            if positive:
                hp, p1, p2, p3, hm, m1, m2, m3 = fresh(8)
                groups[node] = NodeGroup(node, "branch", True, (p1, p2, p3),
                                         (m1, m2, m3), hp, hm)
            else:
                p1, p2, p3, m1, m2, m3 = fresh(6)
                groups[node] = NodeGroup(node, "branch", False, (p1, p2, p3),
                                         (m1, m2, m3))
                blocks.append(((p1, p2, p3, m1, m2, m3), inst.capacity[node]))
            for a, b in zip(groups[node].plus_side, groups[node].minus_side):
                bar[a], bar[b] = b, a

    net = SubflowNetwork(counter, 0, 1, blocks=blocks)
    kept: dict[tuple, int] = {}
    rerouted: dict[tuple, tuple[int, int, int]] = {}

    def add_lower_fixed(key, vplus, uminus, bound):
        src_stub = net.add_edge(0, uminus, bound)
        snk_stub = net.add_edge(vplus, 1, bound)
        rerouted[key] = (bound, src_stub, snk_stub)

    for node in inst.nodes:
        grp = groups[node]
        if grp.kind == "terminal":
            kept[("loop", node)] = net.add_edge(grp.plus[0], grp.minus[0], INF)
            continue
        cap = inst.capacity[node]
        if grp.kind == "flat":
            if grp.positive:
                add_lower_fixed(("flat", node, 0), grp.plus[0], grp.minus[1], cap)
                add_lower_fixed(("flat", node, 1), grp.plus[1], grp.minus[0], cap)
            else:
                kept[("flat", node, 0)] = net.add_edge(grp.plus[0], grp.minus[1], cap)
                kept[("flat", node, 1)] = net.add_edge(grp.plus[1], grp.minus[0], cap)
        elif grp.positive:
            add_lower_fixed(("hub", node), grp.hub_plus, grp.hub_minus, 2 * cap)
            for k in range(3):
                kept[("spoke+", node, k)] = net.add_edge(grp.plus[k], grp.hub_plus, cap)
                kept[("spoke-", node, k)] = net.add_edge(grp.hub_minus, grp.minus[k], cap)

    tight_arcs: dict[tuple[str, str], tuple[int, int]] = {}
    tree = emb.tree
    for e in tight:
        u, v = e

        def port(x: str, other: str, side: str) -> int:
            grp = groups[x]
            if grp.kind == "terminal":
                return grp.plus[0] if side == "plus" else grp.minus[0]
            k = tree.branch_index(pot[x][0], pot[other][0])
            return grp.plus[k] if side == "plus" else grp.minus[k]

        fwd = net.add_edge(port(u, v, "minus"), port(v, u, "plus"), INF)
        rev = net.add_edge(port(v, u, "minus"), port(u, v, "plus"), INF)
        kept[("tight", e, 0)] = fwd
        kept[("tight", e, 1)] = rev
        tight_arcs[e] = (fwd, rev)

    net.bar = bar
    return DoubleCoverNetwork(inst=inst, emb=emb, pot=pot, net=net,
                              groups=groups, kept=kept, rerouted=rerouted,
                              tight=tight, tight_arcs=tight_arcs,
                              branch_nbrs=branch_nbrs)


# -- circulation + support ---------------------------------------------------


def circulation_from_maxflow(cover: DoubleCoverNetwork, sub: SubFlow,
                             min_cut: frozenset) -> dict[tuple, int]:
    """Fold a maximum flow back into a circulation of the unsplit network.

    Only valid when the minimal minimum cut is the bare source, i.e. every
    rerouted lower bound is saturated.
    """
    if set(min_cut) != {cover.source}:
        raise NotOptimalYet("source-side cut is not minimal yet")
    circ: dict[tuple, int] = {}
    for key, idx in cover.kept.items():
        circ[key] = sub.flow[idx]
    for key, (bound, src_stub, snk_stub) in cover.rerouted.items():
        assert sub.flow[src_stub] == bound == sub.flow[snk_stub]
        circ[key] = bound
    _assert_circulation(cover, circ)
    return circ


def _cover_boundary(cover: DoubleCoverNetwork, circ: dict[tuple, int]) -> dict[int, int]:
    bound: dict[int, int] = {}

    def arc(key, u, v):
        f = circ[key]
        bound[u] = bound.get(u, 0) - f
        bound[v] = bound.get(v, 0) + f

    for node in cover.inst.nodes:
        grp = cover.groups[node]
        if grp.kind == "terminal":
            arc(("loop", node), grp.plus[0], grp.minus[0])
        elif grp.kind == "flat":
            arc(("flat", node, 0), grp.plus[0], grp.minus[1])
            arc(("flat", node, 1), grp.plus[1], grp.minus[0])
        elif grp.positive:
            arc(("hub", node), grp.hub_plus, grp.hub_minus)
            for k in range(3):
                arc(("spoke+", node, k), grp.plus[k], grp.hub_plus)
                arc(("spoke-", node, k), grp.hub_minus, grp.minus[k])
    for e, (fwd, rev) in cover.tight_arcs.items():
        u, v = e
        fu, fv, _ = cover.net.edges[fwd]
        ru, rv, _ = cover.net.edges[rev]
        arc(("tight", e, 0), fu, fv)
        arc(("tight", e, 1), ru, rv)
    return bound


def _assert_circulation(cover: DoubleCoverNetwork, circ: dict[tuple, int]) -> None:
    for key, val in circ.items():
        if key in cover.rerouted:
            bound = cover.rerouted[key][0]
            assert val == bound, f"lower bound unmet on {key}"
        else:
            cap = cover.net.edges[cover.kept[key]][2]
            assert 0 <= val <= cap, f"capacity violated on {key}"
    boundary = _cover_boundary(cover, circ)
    block_nodes = set()
    for members, b in cover.net.blocks:
        x = [boundary.get(v, 0) for v in members]
        assert bis.in_base(b, x), f"block boundary {x} outside base (b={b})"
        block_nodes.update(members)
    for v in range(2, cover.net.num_nodes):
        if v not in block_nodes:
            assert boundary.get(v, 0) == 0, f"node copy {v} unbalanced"


def support_from_circulation(cover: DoubleCoverNetwork,
                             circ: dict[tuple, int]) -> dict[tuple[str, str], int]:
    """Doubled admissible support: per tight edge, the sum of its two arcs."""
    support2 = {e: circ[("tight", e, 0)] + circ[("tight", e, 1)]
                for e in cover.tight}
    check_support(cover.inst, cover.emb, cover.pot, support2)
    return support2


def branch_sums2(inst: MultiflowInstance, emb: TreeEmbedding, pot: Potential,
                 support2: dict[tuple[str, str], int], node: str) -> list[int]:
    """Doubled support weight per branch around a nonterminal node."""
    point = pot[node][0]
    sums = [0] * len(emb.tree.half_grid_neighbors(point))
    for (u, v), w2 in support2.items():
        other = v if u == node else (u if v == node else None)
        if other is None or w2 == 0:
            continue
        sums[emb.tree.branch_index(point, pot[other][0])] += w2
    return sums


def check_support(inst: MultiflowInstance, emb: TreeEmbedding, pot: Potential,
                  support2: dict[tuple[str, str], int]) -> None:
    """Assert the admissibility conditions of a doubled support.

    Branch balance below capacity at flat nodes, the degree-3 simplex at
    branch nodes, saturation at positive nodes, and integrality of node
    degrees.  Recomputed from scratch; failures indicate a solver bug.
    """
    tightset = set(tight_edges(inst, emb, pot))
    for e, w2 in support2.items():
        assert w2 >= 0 and isinstance(w2, int)
        assert w2 == 0 or e in tightset, f"support off the tight set on {e}"
    for node in inst.nodes:
        if inst.is_terminal(node):
            continue
        cap = inst.capacity[node]
        sums = branch_sums2(inst, emb, pot, support2, node)
        total2 = sum(sums)
        assert total2 % 2 == 0, f"node degree at {node} is not integral"
        if len(sums) == 2:
            assert sums[0] == sums[1], f"branch imbalance at flat node {node}"
            assert sums[0] <= 2 * cap, f"capacity exceeded at {node}"
        else:
            assert bis.in_degree_polytope(cap, tuple(sums)), \
                f"branch sums {sums} infeasible at {node}"
        if pot[node][1] > 0:
            assert total2 == 4 * cap, f"positive node {node} not saturated"


# -- cut normalization and the potential update ------------------------------


def normalize_min_cut(cover: DoubleCoverNetwork, min_cut: frozenset) -> frozenset:
    """Fill every branch-node plus side met twice by the minimal cut.

    Preserves the cut capacity and enforces the per-group patterns needed by
    the potential update; any violation is reported as a bug.
    """
    before = cut_capacity(cover.net, min_cut)
    cut = set(min_cut)
    for node in cover.inst.nodes:
        grp = cover.groups[node]
        if grp.kind == "branch" and len(cut & set(grp.plus_side)) >= 2:
            cut.update(grp.plus_side)
    after = cut_capacity(cover.net, cut)
    if before != after:
        raise NormalizationFailed(f"capacity changed {before} -> {after}")
    _check_normal(cover, cut)
    return frozenset(cut)


def _check_normal(cover: DoubleCoverNetwork, cut: set) -> None:
    for node in cover.inst.nodes:
        grp = cover.groups[node]
        inn = cut & set(grp.members)
        if grp.kind == "terminal":
            if inn:
                raise NormalizationFailed(f"cut meets terminal pair of {node}")
            continue
        for a, b in zip(grp.plus_side, grp.minus_side):
            if a in cut and b in cut:
                raise NormalizationFailed(f"cut not transversal at {node}")
        plus_in = cut & set(grp.plus_side)
        minus_in = cut & set(grp.minus_side)
        if grp.positive:
            ok_plus = (plus_in == set(grp.plus_side) or not plus_in
                       or (len(plus_in) == 1 and grp.hub_plus not in plus_in))
            full_minus = set(grp.minus_side)
            ok_minus = (not minus_in or minus_in == full_minus
                        or (len(minus_in) == len(full_minus) - 1
                            and (grp.hub_minus is None
                                 or grp.hub_minus in minus_in)))
            if not (ok_plus and ok_minus):
                raise NormalizationFailed(f"positive-node pattern at {node}: "
                                          f"{plus_in} / {minus_in}")
        else:
            full_plus, full_minus = set(grp.plus), set(grp.minus)
            ok = (inn == set() or inn == full_plus
                  or (len(inn) == 1 and inn <= full_plus))
            if not ok and len(plus_in) == 1:
                k = grp.plus.index(next(iter(plus_in)))
                ok = minus_in == full_minus - {grp.minus[k]}
            if not ok:
                raise NormalizationFailed(f"zero-node pattern at {node}: {inn}")


def side_of_copies(cover: DoubleCoverNetwork, node: str) -> list[str]:
    """Lattice color driving each branch copy of a nonterminal node.

    Colored positions color the whole group; mid-edge positions color branch
    ``k`` by the colored point one half step down that branch.
    """
    tree = cover.emb.tree
    point, r4 = cover.pot[node]
    col = ts.color(tree, (point, r4), BASE_VERTEX)
    nbrs = cover.branch_nbrs[node]
    if col is not None:
        return [col] * len(nbrs)
    return [ts.color(tree, (nb, r4 - 2), BASE_VERTEX) for nb in nbrs]


def split_sides(cover: DoubleCoverNetwork,
                cut: frozenset) -> tuple[frozenset, frozenset]:
    """Split a normal cut into its black-side and white-side halves."""
    black: set[int] = set()
    white: set[int] = set()
    for node in cover.inst.nodes:
        grp = cover.groups[node]
        if grp.kind == "terminal":
            continue
        sides = side_of_copies(cover, node)
        for k, side in enumerate(sides):
            pool = black if side == ts.BLACK else white
            pool.add(grp.plus[k])
            pool.add(grp.minus[k])
        if grp.hub_plus is not None:
            pool = black if sides[0] == ts.BLACK else white
            pool.add(grp.hub_plus)
            pool.add(grp.hub_minus)
    inner = set(cut) - {cover.source}
    assert inner <= black | white, "cut contains unclassified copies"
    return frozenset(inner & black), frozenset(inner & white)


def apply_cut(cover: DoubleCoverNetwork, part: frozenset) -> Potential:
    """New potential encoded by one side of a normal cut.

    Implements the six per-group patterns; terminals stay pinned.  The parity
    coupling of the result is asserted rather than assumed.
    """
    inst, emb, pot = cover.inst, cover.emb, cover.pot
    tree = emb.tree
    new_pot: Potential = {}
    for node in inst.nodes:
        if inst.is_terminal(node):
            new_pot[node] = pot[node]
            continue
        grp = cover.groups[node]
        point, r4 = pot[node]
        inn = part & set(grp.members)
        nbrs = cover.branch_nbrs[node]
        patterns: list[tuple[set, tuple]] = [
            (set(), (point, r4)),
            (set(grp.plus_side), (point, r4 + 4)),
            (set(grp.minus_side), (point, r4 - 4)),
        ]
        for k in range(len(grp.plus)):
            patterns.append(({grp.plus[k]}, (nbrs[k], r4 + 2)))
            patterns.append((set(grp.minus_side) - {grp.minus[k]},
                             (nbrs[k], r4 - 2)))
            if tree.is_vertex_point(point):
                patterns.append((
                    {grp.plus[k]} | (set(grp.minus_side) - {grp.minus[k]}),
                    (tree.vertex_neighbors(point)[k], r4)))
        for trace, target in patterns:
            if inn == trace:
                new_pot[node] = target
                break
        else:
            raise PatternError(f"unmatched pattern at {node}: {sorted(inn)}")
        if new_pot[node][1] < 0:
            raise PatternError(f"radius underflow at {node}")
        if not ts.on_half_lattice(tree, new_pot[node]):
            raise PatternError(f"parity broken at {node}")
    return new_pot


def g_delta(cover: DoubleCoverNetwork, part: frozenset) -> int:
    """Exact objective change encoded by one side of a normal cut."""
    cap_part = cut_capacity(cover.net, set(part) | {cover.source})
    cap_src = cut_capacity(cover.net, {cover.source})
    if cap_part == INF:
        raise InfiniteCut("cut side has infinite capacity")
    return cap_part - cap_src
