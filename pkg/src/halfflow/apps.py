"""Rounding the half-integral dual into a 2-approximate node multiway cut."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import InfeasibleDual
from .instance import MultiflowInstance


@dataclass(frozen=True)
class MultiwayCut:
    nodes: tuple[str, ...]
    capacity: int


def verify_cut(inst: MultiflowInstance, cut_nodes) -> bool:
    """True when deleting the nodes separates every pair of terminals."""
    removed = set(cut_nodes)
    adj: dict[str, list[str]] = {v: [] for v in inst.nodes}
    for u, v in inst.edges:
        adj[u].append(v)
        adj[v].append(u)
    for s in inst.terminals:
        if s in removed:
            return False
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w in removed or w in seen:
                    continue
                if inst.is_terminal(w):
                    return False
                seen.add(w)
                queue.append(w)
    return True


def round_cut(inst: MultiflowInstance, dual: dict) -> MultiwayCut:
    """Threshold the dual radii at one half.

    Every terminal-to-terminal path accumulates dual radius at least one, so
    by half-integrality it meets a node of radius at least one half; the
    rounded set is therefore a cut, of capacity at most twice the flow value.
    """
    picked = tuple(sorted(
        node for node in inst.nodes
        if not inst.is_terminal(node) and dual[node][1] >= 2))
    if not verify_cut(inst, picked):
        raise InfeasibleDual("rounded dual does not separate the terminals")
    capacity = sum(inst.capacity[v] for v in picked)
    return MultiwayCut(nodes=picked, capacity=capacity)
