"""Dual descent: drive a potential to optimality, then extract everything.

Each iteration prices the current potential with one block-constrained
maximum flow on its doubled network.  A bare-source minimum cut certifies
optimality and already carries the circulation that unfolds into an optimal
multiflow; otherwise the normalized cut's black and white halves encode the
two steepest one-step updates of the potential, and the better one is taken.
The objective is a nonnegative integer that strictly drops every iteration,
so termination needs no further argument.

``solve`` wraps the loop for an original (star, zero-cost) instance: perturb,
descend, decompose the support into paths, pull the dual back onto the star,
and certify both pairs exactly before returning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from . import cover as cov
from . import reduce as red
from .errors import InfeasiblePotential
from .extract import HalfIntegralMultiflow, certify, decompose_support
from .instance import MultiflowInstance, TreeEmbedding, star_embedding
from .subflow import max_subflow
from .tree_space import TreePoint, d_inf4, on_half_lattice

Potential = dict


def anchor_diameter4(emb: TreeEmbedding) -> int:
    """Diameter of the minimal subtree spanning the anchors, quarter units."""
    anchors = sorted(emb.anchors.values())
    return max((emb.tree.dist4(a, b) for a in anchors for b in anchors),
               default=0)


def center_vertex(emb: TreeEmbedding) -> TreePoint:
    """Tree vertex of the anchor subtree minimizing max anchor distance."""
    tree = emb.tree
    candidates: list[TreePoint] = [("v", v) for v in range(tree.n)]
    for rid in range(len(tree.rays)):
        reach = max((a[2] for a in emb.anchors.values()
                     if a[0] == "r" and a[1] == rid), default=0)
        candidates.extend(tree.ray_point(rid, t) for t in range(4, reach + 1, 4))
    anchors = sorted(emb.anchors.values())
    return min(candidates,
               key=lambda c: (max(tree.dist4(c, a) for a in anchors), c))


def initial_potential(inst: MultiflowInstance, emb: TreeEmbedding) -> Potential:
    """Every nonterminal at one central vertex, radius the anchor diameter."""
    v = center_vertex(emb)
    r4 = anchor_diameter4(emb)
    pot: Potential = {}
    for node in inst.nodes:
        if inst.is_terminal(node):
            pot[node] = (emb.anchor(node), 0)
        else:
            pot[node] = (v, r4)
    return pot


def g_value(inst: MultiflowInstance, emb: TreeEmbedding,
            pot: Potential) -> int | float:
    """Dual objective; infinite unless the potential is feasible."""
    tree = emb.tree
    for s in inst.terminals:
        if pot[s] != (emb.anchor(s), 0):
            return math.inf
    total2 = 0
    for node in inst.nodes:
        point, r4 = pot[node]
        if r4 < 0 or not on_half_lattice(tree, (point, r4)):
            return math.inf
        if not inst.is_terminal(node):
            total2 += inst.capacity[node] * r4
    for u, v in inst.edges:
        if cov.feasibility_slack4(tree, pot, u, v, inst.edge_cost((u, v))) < 0:
            return math.inf
    assert total2 % 2 == 0
    return total2 // 2


@dataclass
class StepInfo:
    """One descent iteration, exposed to instrumentation hooks."""
    iteration: int
    pot: Potential
    g: int
    cover: cov.DoubleCoverNetwork
    subflow: object
    min_cut: frozenset
    normal_cut: frozenset
    black_part: frozenset
    white_part: frozenset
    g_black: int | float
    g_white: int | float
    chosen: str  # "black" | "white" | "stop"


@dataclass
class PerturbedSolution:
    pot: Potential
    support2: dict
    cover: cov.DoubleCoverNetwork
    iterations: int
    augmentations: int
    g_trace: list[int] = field(default_factory=list)


def solve_perturbed(inst: MultiflowInstance, emb: TreeEmbedding,
                    pot: Potential | None = None,
                    on_step: Callable[[StepInfo], None] | None = None,
                    ) -> PerturbedSolution:
    """Run the descent on a nondegenerate instance until optimal."""
    if pot is None:
        pot = initial_potential(inst, emb)
    g = g_value(inst, emb, pot)
    if g is math.inf:
        raise InfeasiblePotential("initial potential infeasible")
    trace = [g]
    iterations = 0
    augmentations = 0
    while True:
        cover = cov.build_cover(inst, emb, pot)
        sub, min_cut = max_subflow(cover.net)
        augmentations += sub.augmentations
        normal = cov.normalize_min_cut(cover, min_cut)
        if normal == frozenset({cover.source}):
            circ = cov.circulation_from_maxflow(cover, sub, min_cut)
            support2 = cov.support_from_circulation(cover, circ)
            if on_step is not None:
                on_step(StepInfo(iterations, pot, g, cover, sub, min_cut,
                                 normal, frozenset(), frozenset(), g, g,
                                 "stop"))
            return PerturbedSolution(pot=pot, support2=support2, cover=cover,
                                     iterations=iterations,
                                     augmentations=augmentations,
                                     g_trace=trace)
        black, white = cov.split_sides(cover, normal)
        cand = {}
        for name, part in (("black", black), ("white", white)):
            new_pot = cov.apply_cut(cover, part)
            new_g = g_value(inst, emb, new_pot)
            if new_g is not math.inf:
                # exact bookkeeping: the cut prices its own update
                assert new_g - g == cov.g_delta(cover, part)
            cand[name] = (new_g, new_pot)
        chosen = "black" if cand["black"][0] <= cand["white"][0] else "white"
        new_g, new_pot = cand[chosen]
        assert new_g < g, "descent stalled on a non-minimal cut"
        if on_step is not None:
            on_step(StepInfo(iterations, pot, g, cover, sub, min_cut, normal,
                             black, white, cand["black"][0], cand["white"][0],
                             chosen))
        pot, g = new_pot, new_g
        trace.append(g)
        iterations += 1


@dataclass
class SolveStats:
    iterations: int
    augmentations: int
    g_trace: list[int]
    core_diameter: int        # anchor-subtree diameter of the solved geometry
    band_index: int
    initial_linf4: int        # lattice distance from start to final potential


@dataclass
class SolveResult:
    value2: int
    multiflow: HalfIntegralMultiflow
    dual: Potential           # on the star embedding of the original
    perturbed: PerturbedSolution
    problem: red.PerturbedProblem
    stats: SolveStats

    @property
    def dual_value2(self) -> int:
        return sum(2 * v for v in self.dual_r2().values())

    def dual_r2(self) -> dict[str, int]:
        """Doubled dual radii weighted by capacity are the dual objective."""
        inst_caps = self.problem.instance.capacity
        return {node: inst_caps[node] * r4 // 2
                for node, (_, r4) in self.dual.items() if node in inst_caps}


def solve(inst: MultiflowInstance,
          on_step: Callable[[StepInfo], None] | None = None) -> SolveResult:
    """Half-integral maximum multiflow, optimal star dual, and certificates.

    Both the perturbed pair and the recovered star pair are certified with a
    zero integer duality gap before anything is returned.
    """
    prob = red.perturb(inst)
    start = initial_potential(prob.instance, prob.embedding)
    psol = solve_perturbed(prob.instance, prob.embedding, pot=dict(start),
                           on_step=on_step)
    flow = decompose_support(prob.instance, prob.embedding, psol.pot,
                             psol.support2)
    report_pert = certify(prob.instance, prob.embedding, psol.pot, flow)
    assert report_pert.optimal, report_pert.violations

    emb_star = star_embedding(inst)
    dual, band = red.recover(inst, prob, psol.pot)
    report = certify(inst, emb_star, dual, flow)
    assert report.optimal, report.violations

    nodes = list(inst.nodes)
    stats = SolveStats(
        iterations=psol.iterations,
        augmentations=psol.augmentations,
        g_trace=list(psol.g_trace),
        core_diameter=anchor_diameter4(prob.embedding) // 4,
        band_index=band,
        initial_linf4=d_inf4(prob.embedding.tree,
                             [start[v] for v in nodes],
                             [psol.pot[v] for v in nodes]))
    return SolveResult(value2=flow.total2, multiflow=flow, dual=dual,
                       perturbed=psol, problem=prob, stats=stats)
