"""Problem instances: parsing, validation, serialization, star embedding.

An instance is an undirected network with terminals, integer capacities on
non-terminal nodes, and an even edge cost (zero as parsed; the solver
internally works with a perturbed copy of cost two).  Node ids are opaque
strings; internally everything runs on dense indices in input order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InstanceSyntaxError, UnboundedInstance, ValidationError
from .tree_space import MetricTree, TreePoint


@dataclass(frozen=True)
class MultiflowInstance:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    terminals: tuple[str, ...]
    capacity: dict[str, int]
    cost: dict[tuple[str, str], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        _validate(self)
        object.__setattr__(self, "index", {v: i for i, v in enumerate(self.nodes)})
        object.__setattr__(self, "terminal_set", frozenset(self.terminals))

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def is_terminal(self, node: str) -> bool:
        return node in self.terminal_set

    def edge_cost(self, edge: tuple[str, str]) -> int:
        return self.cost.get(edge, 0)

    def neighbors(self, node: str) -> list[str]:
        out = [v for u, v in self.edges if u == node]
        out += [u for u, v in self.edges if v == node]
        return sorted(out)

    def with_cost(self, cost_value: int) -> "MultiflowInstance":
        """Copy of the instance with a uniform even edge cost."""
        return MultiflowInstance(
            nodes=self.nodes, edges=self.edges, terminals=self.terminals,
            capacity=dict(self.capacity),
            cost={e: cost_value for e in self.edges})


def _validate(inst: MultiflowInstance) -> None:
    if len(set(inst.nodes)) != len(inst.nodes):
        raise ValidationError("duplicate node id")
    known = set(inst.nodes)
    seen_pairs: set[frozenset] = set()
    for u, v in inst.edges:
        if u not in known or v not in known:
            raise ValidationError(f"edge ({u},{v}) uses an unknown node id")
        if u == v:
            raise ValidationError(f"loop at node {u}")
        pair = frozenset((u, v))
        if pair in seen_pairs:
            raise ValidationError(f"duplicate edge ({u},{v})")
        seen_pairs.add(pair)
    if len(set(inst.terminals)) != len(inst.terminals):
        raise ValidationError("terminals are not pairwise distinct")
    if len(inst.terminals) < 2:
        raise ValidationError("at least two terminals required")
    for s in inst.terminals:
        if s not in known:
            raise ValidationError(f"unknown terminal {s}")
    terminal_set = set(inst.terminals)
    for u, v in inst.edges:
        if u in terminal_set and v in terminal_set:
            raise UnboundedInstance(
                f"edge ({u},{v}) joins two terminals; no capacity bounds it")
    nonterminals = [v for v in inst.nodes if v not in terminal_set]
    missing = [v for v in nonterminals if v not in inst.capacity]
    extra = [v for v in inst.capacity if v in terminal_set or v not in known]
    if missing:
        raise ValidationError(f"capacity missing for {missing}")
    if extra:
        raise ValidationError(f"capacity given for non-eligible nodes {extra}")
    for v, c in inst.capacity.items():
        if not isinstance(c, int) or isinstance(c, bool) or c < 0:
            raise ValidationError(f"capacity of {v} must be a nonnegative integer")
    for e, a in inst.cost.items():
        if not isinstance(a, int) or a < 0 or a % 2 != 0:
            raise ValidationError(f"cost of edge {e} must be even and nonnegative")


def parse_instance(text: str | bytes) -> MultiflowInstance:
    """Parse and validate the JSON instance format.

    Schema: ``{"nodes": [str], "edges": [[str, str]], "terminals": [str],
    "capacity": {str: int}}``.  Cost is implicitly zero.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceSyntaxError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise InstanceSyntaxError("top level must be a JSON object")
    for key in ("nodes", "edges", "terminals", "capacity"):
        if key not in raw:
            raise InstanceSyntaxError(f"missing key {key!r}")
    nodes, edges, terminals, capacity = (
        raw["nodes"], raw["edges"], raw["terminals"], raw["capacity"])
    if (not isinstance(nodes, list) or not all(isinstance(v, str) for v in nodes)):
        raise InstanceSyntaxError("nodes must be a list of strings")
    if (not isinstance(edges, list)
            or not all(isinstance(e, list) and len(e) == 2
                       and all(isinstance(x, str) for x in e) for e in edges)):
        raise InstanceSyntaxError("edges must be a list of string pairs")
    if (not isinstance(terminals, list)
            or not all(isinstance(v, str) for v in terminals)):
        raise InstanceSyntaxError("terminals must be a list of strings")
    if (not isinstance(capacity, dict)
            or not all(isinstance(k, str) for k in capacity)):
        raise InstanceSyntaxError("capacity must be an object keyed by node id")
    return MultiflowInstance(
        nodes=tuple(nodes),
        edges=tuple((u, v) for u, v in edges),
        terminals=tuple(terminals),
        capacity=dict(capacity))


def serialize_instance(inst: MultiflowInstance) -> str:
    payload = {
        "nodes": list(inst.nodes),
        "edges": [list(e) for e in inst.edges],
        "terminals": list(inst.terminals),
        "capacity": {k: inst.capacity[k] for k in sorted(inst.capacity)},
    }
    return json.dumps(payload, indent=2, sort_keys=True)


@dataclass(frozen=True)
class TreeEmbedding:
    """A tree with one anchor vertex per terminal.

    ``leaf_of``/``terminal_of`` record the terminal-to-vertex bijection when
    the tree is the canonical star (vertex 0 is the centre, leaves follow in
    sorted terminal order).
    """
    tree: MetricTree
    anchors: dict[str, TreePoint]
    leaf_of: dict[str, int] = field(default_factory=dict)

    def anchor(self, terminal: str) -> TreePoint:
        return self.anchors[terminal]


def star_embedding(inst: MultiflowInstance) -> TreeEmbedding:
    """Star with one leaf per terminal; every anchor sits on its leaf.

    With zero edge costs this embedding makes the tree value of a multiflow
    exactly twice its total flow value.
    """
    terms = sorted(inst.terminals)
    k = len(terms)
    tree = MetricTree(k + 1, [(0, i + 1) for i in range(k)])
    leaf_of = {s: i + 1 for i, s in enumerate(terms)}
    anchors = {s: ("v", leaf_of[s]) for s in terms}
    return TreeEmbedding(tree=tree, anchors=anchors, leaf_of=leaf_of)
