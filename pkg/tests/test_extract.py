import random

import pytest

from halfflow import reduce as red
from halfflow.descent import solve, solve_perturbed
from halfflow.errors import SupportInconsistent
from halfflow.extract import (HalfIntegralMultiflow, certify,
                              decompose_support)
from halfflow.instance import star_embedding

from conftest import random_instance


def test_empty_support_gives_empty_multiflow(path4):
    prob = red.perturb(path4)
    inst, emb = prob.instance, prob.embedding
    pot = {s: (emb.anchor(s), 0) for s in inst.terminals}
    pot["a"] = (("v", 0), 40)
    pot["b"] = (("v", 1), 40)
    flow = decompose_support(inst, emb, pot, {})
    assert flow.paths == () and flow.total2 == 0


def test_forced_walk_single_path(path4):
    prob = red.perturb(path4)
    psol = solve_perturbed(prob.instance, prob.embedding)
    flow = decompose_support(prob.instance, prob.embedding, psol.pot,
                             psol.support2)
    assert flow.paths == ((("s", "a", "b", "t"), 2),)
    # conservation: the walk consumed the support exactly
    for e, w2 in psol.support2.items():
        assert flow.edge_flow2(*e) == w2


def test_support_conservation_random():
    rng = random.Random(11)
    for _ in range(15):
        inst = random_instance(rng, n_max=9)
        prob = red.perturb(inst)
        psol = solve_perturbed(prob.instance, prob.embedding)
        flow = decompose_support(prob.instance, prob.embedding, psol.pot,
                                 psol.support2)
        for e, w2 in psol.support2.items():
            assert flow.edge_flow2(*e) == w2
        for nodes, w2 in flow.paths:
            assert w2 >= 1
            assert len(set(nodes)) == len(nodes)


def test_geodesic_positions_along_paths():
    rng = random.Random(12)
    for _ in range(10):
        inst = random_instance(rng, n_max=9)
        prob = red.perturb(inst)
        psol = solve_perturbed(prob.instance, prob.embedding)
        flow = decompose_support(prob.instance, prob.embedding, psol.pot,
                                 psol.support2)
        tree = prob.embedding.tree
        pot = psol.pot
        for nodes, _ in flow.paths:
            for a, b, c in zip(nodes, nodes[1:], nodes[2:]):
                ab = tree.dist4(pot[a][0], pot[b][0])
                bc = tree.dist4(pot[b][0], pot[c][0])
                ac = tree.dist4(pot[a][0], pot[c][0])
                assert ab + bc == ac


def test_inconsistent_support_detected(path4):
    prob = red.perturb(path4)
    psol = solve_perturbed(prob.instance, prob.embedding)
    broken = dict(psol.support2)
    key = next(iter(broken))
    broken[key] += 2   # admissibility is violated; the walk cannot finish
    with pytest.raises((SupportInconsistent, AssertionError)):
        decompose_support(prob.instance, prob.embedding, psol.pot, broken)


def test_certify_zero_gap_on_fixture(k13):
    res = solve(k13)
    rep = certify(k13, star_embedding(k13), res.dual, res.multiflow)
    assert rep.optimal and rep.gap8 == 0
    assert rep.primal8 == rep.dual8 == 8 * res.value2 // 2 * 1  # 8*(value2/2)*2/2


def test_certify_detects_perturbed_weights(k13):
    res = solve(k13)
    nodes, w2 = res.multiflow.paths[0]
    smaller = HalfIntegralMultiflow(paths=((nodes, w2 - 1),))
    rep = certify(k13, star_embedding(k13), res.dual, smaller)
    assert rep.gap8 > 0 and not rep.optimal
    assert not rep.saturation_ok   # the positive-radius centre went slack


def test_certify_flags_structural_problems(k13):
    res = solve(k13)
    bad = HalfIntegralMultiflow(paths=((("s1", "s2"), 2),))
    rep = certify(k13, star_embedding(k13), res.dual, bad)
    assert not rep.feasible_primal


def test_certify_empty_flow_zero_dual():
    import json
    from halfflow.instance import parse_instance
    inst = parse_instance(json.dumps({
        "nodes": ["s", "t", "a"], "edges": [],
        "terminals": ["s", "t"], "capacity": {"a": 1}}))
    emb = star_embedding(inst)
    pot = {s: (emb.anchor(s), 0) for s in inst.terminals}
    pot["a"] = (("v", 0), 0)
    rep = certify(inst, emb, pot, HalfIntegralMultiflow(paths=()))
    assert rep.optimal and rep.gap8 == 0 and rep.primal8 == rep.dual8 == 0


def test_half_integrality_everywhere():
    rng = random.Random(13)
    for _ in range(10):
        inst = random_instance(rng, n_max=9)
        res = solve(inst)
        for _, w2 in res.multiflow.paths:
            assert isinstance(w2, int) and w2 >= 1
        for node, (_, r4) in res.dual.items():
            assert r4 % 2 == 0
