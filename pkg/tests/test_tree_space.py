import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halfflow import tree_space as ts
from halfflow.tree_space import (BLACK, WHITE, MetricTree, color, d_inf4,
                                 lattice_adjacent, leq, local_neighborhood,
                                 midpoint, on_half_lattice,
                                 on_quarter_lattice, round_pair)

from conftest import QuarterGraph, random_point, random_tree

REACH4 = 12
BASE = ("v", 0)


def _tree_and_points(seed, count=3):
    rng = random.Random(seed)
    tree = random_tree(rng, rng.randint(2, 7))
    pts = [random_point(rng, tree, REACH4 - 4) for _ in range(count)]
    return tree, pts


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_dist_matches_quarter_graph_bfs(seed):
    tree, (a, b, _) = _tree_and_points(seed)
    qg = QuarterGraph(tree, REACH4)
    assert tree.dist4(a, b) == qg.dist(a, b)
    assert tree.dist4(a, b) == tree.dist4(b, a)
    assert tree.dist4(a, a) == 0


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_walk_matches_quarter_graph_path(seed):
    tree, (a, b, _) = _tree_and_points(seed)
    qg = QuarterGraph(tree, REACH4)
    path = qg.path(a, b)
    for t, expected in enumerate(path):
        assert tree.point_at4(a, b, t) == expected


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_four_point_condition(seed):
    tree, pts = _tree_and_points(seed, count=4)
    a, b, c, d = pts
    s1 = tree.dist4(a, b) + tree.dist4(c, d)
    s2 = tree.dist4(a, c) + tree.dist4(b, d)
    s3 = tree.dist4(a, d) + tree.dist4(b, c)
    assert max(s1, s2, s3) == sorted((s1, s2, s3))[1]
    # triangle inequality
    assert tree.dist4(a, b) <= tree.dist4(a, c) + tree.dist4(c, b)


def _lattice_points(tree, qg, r4_max):
    pts = []
    for p in qg.adj:
        if not tree.on_half_grid(p):
            continue
        start = 0 if tree.is_vertex_point(p) else 2
        pts.extend((p, r4) for r4 in range(start, r4_max + 1, 4))
    return pts


def test_color_examples():
    tree = MetricTree(4, [(0, 1), (0, 2), (0, 3)])
    assert color(tree, (("v", 0), 0), BASE) == BLACK
    assert color(tree, (("v", 1), 0), BASE) == WHITE
    assert color(tree, (("v", 0), 4), BASE) == WHITE
    assert color(tree, (tree.edge_point(0, 1, 2), 2), BASE) is None


def test_leq_examples():
    tree = MetricTree(4, [(0, 1), (0, 2), (0, 3)])
    mid = (tree.edge_point(0, 1, 2), 2)
    assert leq(tree, mid, mid, BASE)
    black_end = (("v", 0), 0)
    assert leq(tree, mid, black_end, BASE)         # sink side on top
    assert not leq(tree, black_end, mid, BASE)
    far = (("v", 2), 0)
    assert not leq(tree, mid, far, BASE) and not leq(tree, far, mid, BASE)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_midpoint_round_identities(seed):
    rng = random.Random(seed)
    tree = random_tree(rng, rng.randint(2, 6))
    qg = QuarterGraph(tree, REACH4)
    pts = _lattice_points(tree, qg, 12)
    x = rng.choice(pts)
    y = rng.choice(pts)
    z = midpoint(tree, x, y)
    assert on_quarter_lattice(tree, z)
    assert tree.dist4(x[0], z[0]) == tree.dist4(z[0], y[0]) \
        == tree.dist4(x[0], y[0]) // 2
    lo, hi = round_pair(tree, z, BASE)
    assert on_half_lattice(tree, lo) and on_half_lattice(tree, hi)
    assert midpoint(tree, lo, hi) == z
    if on_half_lattice(tree, z):
        assert lo == hi == z
    else:
        assert _order_ok(tree, lo, hi)


def _order_ok(tree, lo, hi):
    """lo is below hi: either a covering edge or the colored diagonal."""
    if lattice_adjacent(tree, lo, hi):
        return leq(tree, lo, hi, BASE)
    return (color(tree, lo, BASE) == WHITE and color(tree, hi, BASE) == BLACK)


def test_round_pair_of_adjacent_midpoint_restores_pair():
    tree = MetricTree(2, [(0, 1)])
    x = (tree.edge_point(0, 1, 2), 2)     # half point
    y = (("v", 1), 0)                     # adjacent vertex point
    lo, hi = (x, y) if leq(tree, x, y, BASE) else (y, x)
    assert round_pair(tree, midpoint(tree, lo, hi), BASE) == (lo, hi)


def test_four_cycle_steps_have_unit_gap():
    tree = MetricTree(3, [(0, 1), (1, 2)])
    qg = QuarterGraph(tree, 0)
    pts = _lattice_points(tree, qg, 8)
    for x, y in combinations(pts, 2):
        if lattice_adjacent(tree, x, y):
            assert tree.dist4(x[0], y[0]) + abs(x[1] - y[1]) == 4


def test_d_inf_examples():
    tree = MetricTree(2, [(0, 1)])
    x = [(("v", 0), 0)]
    y = [(("v", 1), 4)]
    assert d_inf4(tree, x, x) == 0
    assert d_inf4(tree, x, y) == 8
    xs = [(("v", 0), 0), (("v", 0), 0)]
    ys = [(("v", 1), 0), (("v", 0), 8)]
    assert d_inf4(tree, xs, ys) == 8


def _brute_neighborhood(tree, qg, x, r4_max):
    """Order-theoretic neighbourhoods from explicit reachability."""
    pts = _lattice_points(tree, qg, r4_max)
    down_arcs = {}   # u -> covers below it
    for u in pts:
        for w in pts:
            if u != w and lattice_adjacent(tree, u, w) and leq(tree, w, u, BASE):
                down_arcs.setdefault(u, []).append(w)

    def closure(root, arcs):
        seen = {root}
        todo = [root]
        while todo:
            u = todo.pop()
            for w in arcs.get(u, []):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen

    up_arcs = {}
    for u, lows in down_arcs.items():
        for w in lows:
            up_arcs.setdefault(w, []).append(u)
    up = {y for y in closure(x, down_arcs) if y[1] >= 0}
    down = {y for y in closure(x, up_arcs) if y[1] >= 0}
    return sorted(up), sorted(down)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_local_neighborhood_matches_reachability(seed):
    rng = random.Random(seed)
    tree = random_tree(rng, rng.randint(2, 5), max_rays=1)
    qg = QuarterGraph(tree, 16)
    # stay away from the truncation frontier so the oracle sees everything
    pts = [(p, r4) for (p, r4) in _lattice_points(tree, qg, 12)
           if 4 <= r4 <= 8 and not (p[0] == "r" and p[2] > 8)]
    x = rng.choice(pts)
    up, down = local_neighborhood(tree, x, BASE)
    b_up, b_down = _brute_neighborhood(tree, qg, x, 16)
    assert up == [y for y in b_up if _near(tree, x, y)]
    assert down == [y for y in b_down if _near(tree, x, y)]


def _near(tree, x, y):
    return tree.dist4(x[0], y[0]) + abs(x[1] - y[1]) <= 4


def test_neighborhood_shapes(k13=None):
    tree = MetricTree(4, [(0, 1), (0, 2), (0, 3)])
    black = (("v", 0), 8)
    up, down = local_neighborhood(tree, black, BASE)
    assert down == [black]
    assert set(up) >= {(("v", 0), 4), (("v", 0), 12), (("v", 1), 8),
                       (tree.edge_point(0, 1, 2), 6),
                       (tree.edge_point(0, 1, 2), 10)}
    white = (("v", 1), 0)
    assert color(tree, white, BASE) == WHITE
    upw, downw = local_neighborhood(tree, white, BASE)
    assert upw == [white] and len(downw) > 1
    assert all(r4 >= 0 for _, r4 in downw)
    zero = (("v", 0), 0)
    up0, _ = local_neighborhood(tree, zero, BASE)
    assert all(r4 >= 0 for _, r4 in up0)


def _h8(tree, x, y, a4):
    return tree.dist4(x[0], y[0]) - x[1] - y[1] - a4


def test_distance_convexity_and_rounding_on_path_tree():
    """Tight-constraint convexity: exhaustive over a short path tree."""
    tree = MetricTree(4, [(0, 1), (1, 2), (2, 3)])
    qg = QuarterGraph(tree, 0)
    pts = _lattice_points(tree, qg, 8)
    a4 = 8  # cost two
    import itertools
    sample = pts[::3]
    for x, y in itertools.product(sample, repeat=2):
        for xp, yp in zip(sample[1::2], sample[::2]):
            mx = midpoint(tree, x, xp)
            my = midpoint(tree, y, yp)
            # distance convexity of the tree metric
            assert (tree.dist4(x[0], y[0]) + tree.dist4(xp[0], yp[0])
                    >= 2 * tree.dist4(mx[0], my[0]))
            if _h8(tree, x, y, a4) <= 0 and _h8(tree, xp, yp, a4) <= 0:
                lox, hix = round_pair(tree, mx, BASE)
                loy, hiy = round_pair(tree, my, BASE)
                assert _h8(tree, hix, hiy, a4) <= 0
                assert _h8(tree, lox, loy, a4) <= 0


def test_canonical_forms():
    tree = MetricTree(3, [(0, 1), (1, 2)], rays=[2])
    assert tree.edge_point(0, 1, 0) == ("v", 0)
    assert tree.edge_point(0, 1, 4) == ("v", 1)
    assert tree.edge_point(1, 0, 1) == ("e", 0, 3)
    assert tree.ray_point(0, 0) == ("v", 2)
    with pytest.raises(ValueError):
        tree.ray_point(0, -1)


def test_branch_index_partitions_directions():
    tree = MetricTree(4, [(0, 1), (0, 2), (0, 3)])
    center = ("v", 0)
    for leaf in (1, 2, 3):
        k = tree.branch_index(center, ("v", leaf))
        assert tree.half_grid_neighbors(center)[k] == tree.edge_point(0, leaf, 2)
    ks = {tree.branch_index(center, ("v", leaf)) for leaf in (1, 2, 3)}
    assert ks == {0, 1, 2}
