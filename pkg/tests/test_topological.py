import pytest

from anyonkit.double import build_tensors
from anyonkit.groups import builtin_group
from anyonkit.lattice.topological import TopologicalPairs, topological_branch_distribution
from anyonkit.vm import branch_distribution, parse_program

from conftest import load_scenarios


@pytest.fixture(scope="module")
def s3():
    G = builtin_group("S3")
    return G, build_tensors(G)


def total_variation(a, b):
    return 0.5 * sum(abs(a.get(k, 0) - b.get(k, 0)) for k in set(a) | set(b))


@pytest.mark.parametrize("name", list(load_scenarios()))
def test_vm_agrees_with_topological_operators(s3, s3_scenarios, name):
    G, T = s3
    program = parse_program(s3_scenarios[name], G)
    vm = branch_distribution(program, G)
    oracle = topological_branch_distribution(program, G, T)
    assert sum(oracle.values()) == pytest.approx(1, abs=1e-12)
    assert total_variation(vm, oracle) < 1e-10


def test_labels_stay_in_the_class_of_the_local_flux(s3):
    G, T = s3
    pairs = TopologicalPairs(G, T)
    N = G.order
    for k, v in enumerate(pairs.label):
        assert v in G.class_containing(k // N).members


def test_exchanges_are_inverse(s3):
    G, T = s3
    state = TopologicalPairs(G, T)
    state.create_pair(G.parse("(1 2)"))
    state.create_reference_pair(G.parse("(1 2 3)"))
    before = dict(state.amps)
    for pos in (0, 1, 2):
        state.exchange(pos, True)
        state.exchange(pos, False)
    assert set(state.amps) == set(before)
    assert all(abs(state.amps[k] - a) < 1e-12 for k, a in before.items())


def test_exchanges_preserve_norm(s3):
    G, T = s3
    state = TopologicalPairs(G, T)
    state.create_pair(G.parse("(1 2)"))
    state.create_pair(G.parse("(1 2 3)"))
    for pos, ccw in [(1, True), (0, False), (2, True), (1, True)]:
        state.exchange(pos, ccw)
        assert state.norm() == pytest.approx(1, abs=1e-12)


def test_pair_values_are_inverse(s3):
    G, T = s3
    state = TopologicalPairs(G, T)
    state.create_pair(G.parse("(1 2 3)"))
    for key in state.amps:
        assert G.mul(state.label[key[0]], state.label[key[1]]) == 0
