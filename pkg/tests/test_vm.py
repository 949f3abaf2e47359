import numpy as np
import pytest
from scipy.stats import chisquare

from anyonkit.groups import builtin_group
from anyonkit.vm import (
    ProgramError, VmState, branch_distribution, outcome_key, parse_program, run_program,
    run_shots, sample_shots,
)


@pytest.fixture(scope="module")
def S5():
    return builtin_group("S5")


def transpositions(G):
    return next(c for c in G.classes if len(c) == 10)


def random_single_pair(G, cls, rng):
    state = VmState(G)
    state.create_pair(cls)
    amps = rng.normal(size=len(cls)) + 1j * rng.normal(size=len(cls))
    amps /= np.linalg.norm(amps)
    state.amps = {(v,): a for v, a in zip(cls.members, amps)}
    return state, dict(zip(cls.members, amps))


def closed_form_charge(G, psi: dict, row: int) -> float:
    """p(χ) = (dim χ / |G|) Σ_g χ(g)* Σ_v ψ(g v g⁻¹)* ψ(v)."""
    table = G.character_table
    chi = table.irreps[row][G.class_of]
    total = 0
    for g in G.elements:
        overlap = sum(np.conj(psi[G.conj(g, v)]) * a for v, a in psi.items())
        total += np.conj(chi[g]) * overlap
    return float((table.dims[row] / G.order * total).real)


def test_create_pair_is_uniform_over_the_class(S5):
    state = VmState(S5)
    state.create_pair(transpositions(S5))
    assert len(state.amps) == 10
    assert all(abs(a - 10 ** -0.5) < 1e-12 for a in state.amps.values())


def test_trivial_class_pair(S5):
    state = VmState(S5)
    state.create_pair(S5.classes[0])
    assert state.amps == {(0,): 1}
    assert state.charge_distribution(1) == {0: pytest.approx(1)}


def test_fresh_pair_has_no_charge(S5):
    for cls in S5.classes:
        state = VmState(S5)
        state.create_pair(cls)
        dist = state.charge_distribution(1)
        assert list(dist) == [0] and dist[0] == pytest.approx(1, abs=1e-12)


def test_reference_transposition_trivial_charge_is_one_tenth(S5):
    prog = parse_program("CREATEREF (1 2)\nFUSECHARGE 1", S5)
    dist = branch_distribution(prog, S5)
    assert dist[("FUSECHARGE 1 chi0:dim1",)] == pytest.approx(0.1, abs=1e-12)
    assert sum(dist.values()) == pytest.approx(1, abs=1e-12)


def test_charge_distribution_matches_closed_form(S5):
    rng = np.random.default_rng(2024)
    for n in range(50):
        cls = S5.classes[1 + n % (len(S5.classes) - 1)]
        state, psi = random_single_pair(S5, cls, rng)
        dist = state.charge_distribution(1)
        rows = range(len(S5.character_table.dims))
        tv = 0.5 * sum(abs(dist.get(r, 0) - closed_form_charge(S5, psi, r)) for r in rows)
        assert tv < 1e-9


def test_sampled_charges_pass_chi_square(S5):
    rng = np.random.default_rng(77)
    state, _ = random_single_pair(S5, transpositions(S5), rng)
    dist = state.charge_distribution(1)
    rows = sorted(dist)
    counts = dict.fromkeys(rows, 0)
    draw = np.random.default_rng(5)
    for _ in range(10_000):
        counts[state.copy().fuse_measure_charge(1, draw)] += 1
    expected = np.array([dist[r] for r in rows]) * 10_000
    assert chisquare([counts[r] for r in rows], expected).pvalue > 1e-3


def test_pull_example(S5):
    prog = parse_program("CREATEREF (1 2)\nCREATEREF (2 3)\nPULL 1 2\nMEASV 1", S5)
    assert [str(e) for e in run_program(prog, S5, 0)] == ["4 MEASV 1 -> (1 3)"]


def test_pull_through_identity_pair_does_nothing(S5):
    prog = parse_program("CREATE (1 2)\nCREATEREF ()\nPULL 1 2", S5)
    state = VmState(S5)
    state.create_pair(transpositions(S5))
    before = dict(state.amps)
    state.create_reference_pair(0)
    state.pull_through(1, 2)
    assert {k[:1]: a for k, a in state.amps.items()} == before
    assert run_program(prog, S5, 0) == []


def test_pull_twice_through_an_involution_is_identity(S5):
    rng = np.random.default_rng(8)
    for _ in range(20):
        state = VmState(S5)
        state.create_pair(S5.classes[int(rng.integers(1, len(S5.classes)))])
        state.create_reference_pair(S5.parse("(2 5)"))
        before = dict(state.amps)
        state.pull_through(1, 2)
        state.pull_through(1, 2)
        assert state.amps == before


def test_pull_permutes_value_distribution(S5):
    state = VmState(S5)
    state.create_pair(transpositions(S5))
    state.create_reference_pair(S5.parse("(1 2 3)"))
    prior = state.value_distribution(1)
    state.pull_through(1, 2)
    w = S5.parse("(1 2 3)")
    assert state.value_distribution(1) == {S5.conj(w, v): p for v, p in prior.items()}


def test_commutator_program(S5):
    # u' = v u v⁻¹, then pulling through w gives w v u v⁻¹ w⁻¹
    prog = parse_program("CREATEREF (1 2)\nCREATEREF (2 3)\nCREATEREF (3 4 5)\n"
                         "PULL 1 2\nPULL 1 3\nMEASV 1", S5)
    u, v, w = (S5.parse(t) for t in ("(1 2)", "(2 3)", "(3 4 5)"))
    want = S5.format(S5.conj(w, S5.conj(v, u)))
    assert run_program(prog, S5, 0)[0].result == want


def test_swap_matches_direct_formula_on_random_states(S5):
    rng = np.random.default_rng(99)
    for _ in range(100):
        state = VmState(S5)
        for _ in range(3):
            state.create_pair(S5.classes[int(rng.integers(0, len(S5.classes)))])
        amps = rng.normal(size=len(state.amps)) + 1j * rng.normal(size=len(state.amps))
        amps /= np.linalg.norm(amps)
        state.amps = dict(zip(state.amps, amps))
        pair = int(rng.integers(1, 4))
        pos = pair - 1
        want = {}
        for k, a in state.amps.items():
            v = k[pos]
            # (v₁, v₂) ↦ (v₁ v₂ v₁⁻¹, v₁) with v₂ = v₁⁻¹
            new = S5.conj(v, S5.inv(v))
            want[k[:pos] + (new,) + k[pos + 1:]] = a
        ccw = state.copy()
        ccw.interchange_members(pair, "CCW")
        assert ccw.amps == want
        ccw.interchange_members(pair, "CW")
        assert ccw.amps == state.amps


def test_swap_keeps_class_tags_consistent(S5):
    state = VmState(S5)
    state.create_reference_pair(S5.parse("(1 2 3 4 5)"))
    state.interchange_members(1)
    (v,), = state.amps
    assert S5.format(v) == "(1 5 4 3 2)"
    assert v in state.classes[0]


def test_fresh_value_measurement_is_uniform(S5):
    prog = parse_program("CREATE (1 2)\nMEASV 1", S5)
    counts = run_shots(prog, S5, seed=3, shots=10_000)
    assert len(counts) == 10
    assert chisquare(list(counts.values())).pvalue > 1e-3
    exact = branch_distribution(prog, S5)
    assert all(p == pytest.approx(0.1) for p in exact.values())


def test_definite_value_measurement(S5):
    prog = parse_program("CREATEREF (1 4)(2 5)\nMEASV 1\nMEASV 1", S5)
    log = run_program(prog, S5, 123)
    assert [e.result for e in log] == ["(1 4)(2 5)"] * 2


def test_fusion_removes_the_pair(S5):
    prog = parse_program("CREATE (1 2)\nFUSECHARGE 1\nMEASV 1", S5)
    with pytest.raises(ProgramError, match="line 3"):
        run_program(prog, S5, 0)


def test_pair_ids_stay_stable_after_fusion(S5):
    prog = parse_program("CREATEREF (1 2)\nCREATEREF (3 4)\nFUSECHARGE 1\nMEASV 2", S5)
    log = run_program(prog, S5, 0)
    assert log[-1].pair == 2 and log[-1].result == "(3 4)"


def test_empty_program(S5):
    assert run_program([], S5, 1) == []


def test_program_parsing(S5):
    text = "# comment\ncreate (1 2)  # trailing\nSWAP 1 cw\nPULL 1 1\n"
    prog = parse_program(text, S5)
    assert [i.op for i in prog] == ["CREATE", "SWAP", "PULL"]
    assert prog[1].args == (1, "CW")
    with pytest.raises(ProgramError, match="itself"):
        run_program(prog, S5, 0)
    for bad in ["JUMP 1", "CREATE 12", "SWAP 1 UP", "PULL 1", "CREATE (1 6)"]:
        with pytest.raises(ProgramError):
            parse_program(bad, S5)


def test_norm_is_checked(S5):
    state = VmState(S5)
    state.create_reference_pair(1)
    state.amps = {k: 2 * a for k, a in state.amps.items()}
    with pytest.raises(RuntimeError, match="norm"):
        state._check_norm()


def test_shots_are_seeded_and_worker_independent(S5):
    prog = parse_program("CREATE (1 2)\nCREATEREF (1 3)\nPULL 2 1\nFUSECHARGE 2\nMEASV 1", S5)
    a = sample_shots(prog, S5, 7, 600)
    b = sample_shots(prog, S5, 7, 600, workers=3)
    assert a == b
    assert [outcome_key(x) for x in a] != [outcome_key(x) for x in sample_shots(prog, S5, 8, 600)]


def test_charge_probabilities_sum_to_one_on_entangled_states(S5):
    prog = parse_program("CREATE (1 2 3)\nCREATEREF (1 2)\nPULL 2 1\nSWAP 1\nFUSECHARGE 1\n"
                         "FUSECHARGE 2", S5)
    dist = branch_distribution(prog, S5)
    assert sum(dist.values()) == pytest.approx(1, abs=1e-12)
    assert len(dist) > 1
