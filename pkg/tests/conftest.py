import json
import random
from collections import deque

import pytest

from halfflow.instance import MultiflowInstance, parse_instance


def make_instance(payload: dict) -> MultiflowInstance:
    return parse_instance(json.dumps(payload))


@pytest.fixture
def k13():
    return make_instance({
        "nodes": ["x", "s1", "s2", "s3"],
        "edges": [["s1", "x"], ["s2", "x"], ["s3", "x"]],
        "terminals": ["s1", "s2", "s3"],
        "capacity": {"x": 1}})


@pytest.fixture
def triangle():
    return make_instance({
        "nodes": ["sa", "sb", "sc", "mab", "mbc", "mca"],
        "edges": [["sa", "mab"], ["mab", "sb"], ["sb", "mbc"],
                  ["mbc", "sc"], ["sc", "mca"], ["mca", "sa"]],
        "terminals": ["sa", "sb", "sc"],
        "capacity": {"mab": 1, "mbc": 1, "mca": 1}})


@pytest.fixture
def path4():
    return make_instance({
        "nodes": ["s", "a", "b", "t"],
        "edges": [["s", "a"], ["a", "b"], ["b", "t"]],
        "terminals": ["s", "t"],
        "capacity": {"a": 1, "b": 1}})


def random_instance(rng: random.Random, n_max=12, m_max=20, k_lo=2, k_hi=5,
                    cap_max=4) -> MultiflowInstance:
    k = rng.randint(k_lo, k_hi)
    n = rng.randint(k + 1, n_max)
    terms = [f"t{i}" for i in range(k)]
    others = [f"v{i}" for i in range(n - k)]
    nodes = terms + others
    pool = [(a, b) for i, a in enumerate(nodes) for b in nodes[i + 1:]
            if not (a in terms and b in terms)]
    m = rng.randint(0, min(m_max, len(pool)))
    edges = rng.sample(pool, m)
    caps = {v: rng.randint(0, cap_max) for v in others}
    return MultiflowInstance(nodes=tuple(nodes), edges=tuple(edges),
                             terminals=tuple(terms), capacity=caps)


class QuarterGraph:
    """Explicit quarter-resolution copy of a truncated tree.

    Independent oracle for distances, walks and lattice neighbourhoods: plain
    breadth-first search over explicitly materialised points.
    """

    def __init__(self, tree, ray_reach4: int = 0):
        self.tree = tree
        self.adj: dict = {}

        def link(a, b):
            self.adj.setdefault(a, []).append(b)
            self.adj.setdefault(b, []).append(a)

        for eidx, (lo, hi) in enumerate(tree.edges):
            chain = [("v", lo)] + [("e", eidx, q) for q in (1, 2, 3)] + [("v", hi)]
            for a, b in zip(chain, chain[1:]):
                link(a, b)
        for rid, glue in enumerate(tree.rays):
            chain = [("v", glue)] + [("r", rid, t)
                                     for t in range(1, ray_reach4 + 1)]
            for a, b in zip(chain, chain[1:]):
                link(a, b)
        for v in range(tree.n):
            self.adj.setdefault(("v", v), [])

    def dist(self, a, b) -> int:
        seen = {a: 0}
        queue = deque([a])
        while queue:
            u = queue.popleft()
            if u == b:
                return seen[u]
            for w in self.adj[u]:
                if w not in seen:
                    seen[w] = seen[u] + 1
                    queue.append(w)
        raise AssertionError("disconnected quarter graph")

    def path(self, a, b) -> list:
        parent = {a: None}
        queue = deque([a])
        while queue:
            u = queue.popleft()
            if u == b:
                out = []
                while u is not None:
                    out.append(u)
                    u = parent[u]
                return out[::-1]
            for w in self.adj[u]:
                if w not in parent:
                    parent[w] = u
                    queue.append(w)
        raise AssertionError("disconnected quarter graph")


def random_tree(rng: random.Random, n: int, max_rays: int = 2):
    from halfflow.tree_space import MetricTree
    edges = [(rng.randrange(i), i) for i in range(1, n)]
    rays = [rng.randrange(n) for _ in range(rng.randint(0, max_rays))]
    return MetricTree(n, edges, rays=rays)


def random_point(rng: random.Random, tree, ray_reach4: int = 8):
    kind = rng.random()
    if kind < 0.4 or (not tree.edges and not tree.rays):
        return ("v", rng.randrange(tree.n))
    if kind < 0.7 and tree.edges:
        lo, hi = tree.edges[rng.randrange(len(tree.edges))]
        return tree.edge_point(lo, hi, rng.randint(1, 3))
    if tree.rays:
        return tree.ray_point(rng.randrange(len(tree.rays)),
                              rng.randint(1, ray_reach4))
    return ("v", rng.randrange(tree.n))
