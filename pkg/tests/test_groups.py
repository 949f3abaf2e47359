import itertools

import numpy as np
import pytest

from anyonkit.groups import (
    GroupSizeError, builtin_group, centralizer, format_cycles, group_from_generators,
    load_group_file, parse_cycles, resolve_group,
)

# |G|, number of classes, sorted class sizes
KNOWN = {
    "Z2": (2, 2, [1, 1]),
    "Z3": (3, 3, [1, 1, 1]),
    "Z4": (4, 4, [1, 1, 1, 1]),
    "S3": (6, 3, [1, 2, 3]),
    "D4": (8, 5, [1, 1, 2, 2, 2]),
    "S4": (24, 5, [1, 3, 6, 6, 8]),
    "S5": (120, 7, [1, 10, 15, 20, 20, 24, 30]),
}


@pytest.mark.parametrize("name", KNOWN)
def test_builtin_orders_and_classes(name):
    G = builtin_group(name)
    order, nclasses, sizes = KNOWN[name]
    assert G.order == order
    assert len(G.classes) == nclasses
    assert sorted(len(c) for c in G.classes) == sizes


@pytest.mark.parametrize("name", KNOWN)
def test_group_axioms(name):
    G = builtin_group(name)
    m = G.mul_table
    e = 0
    assert all(G.mul(e, g) == g == G.mul(g, e) for g in G.elements)
    assert all(G.mul(g, G.inv(g)) == e for g in G.elements)
    rng = np.random.default_rng(1)
    for a, b, c in rng.integers(0, G.order, size=(200, 3)):
        assert m[m[a, b], c] == m[a, m[b, c]]


def test_multiplication_applies_right_factor_first():
    G = builtin_group("S3")
    a, b = G.parse("(1 2)"), G.parse("(2 3)")
    # (1 2)∘(2 3): 1 -> 1 -> 2, 2 -> 3 -> 3, 3 -> 2 -> 1
    assert G.format(G.mul(a, b)) == "(1 2 3)"
    assert G.format(G.conj(b, a)) == "(1 3)"


@pytest.mark.parametrize("name", KNOWN)
def test_character_table_orthogonality(name):
    G = builtin_group(name)
    table = G.character_table
    assert table.orthogonality_residual(G.order) < 1e-9
    assert sum(d * d for d in table.dims) == G.order
    assert table.dims[0] == 1
    assert np.allclose(table.irreps[0], 1)


def test_s5_character_degrees():
    G = builtin_group("S5")
    assert sorted(G.character_table.dims) == [1, 1, 4, 4, 5, 5, 6]


def test_centralizer_orders_match_class_sizes():
    G = builtin_group("S5")
    for c in G.classes:
        assert centralizer(G, c.representative).order * len(c) == G.order


@pytest.mark.parametrize("text", ["(1 2)(3 4 5)", "(1 5 2)", "()", "(2 4)"])
def test_cycle_notation_round_trip(text):
    perm = parse_cycles(text, 5)
    assert format_cycles(perm) == text


@pytest.mark.parametrize("bad", ["(1 2", "(1 1)", "(0 1)", "(1 6)", "1 2"])
def test_malformed_cycles(bad):
    with pytest.raises(ValueError):
        parse_cycles(bad, 5)


def test_group_file(tmp_path):
    path = tmp_path / "klein.txt"
    path.write_text("points 4\n# the Klein four-group\n(1 2)(3 4)\n(1 3)(2 4)\n")
    G = load_group_file(path)
    assert G.order == 4 and G.is_abelian()
    assert resolve_group(str(path)).order == 4


def test_group_file_needs_header(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("(1 2)\n")
    with pytest.raises(ValueError):
        load_group_file(path)


def test_size_limit():
    with pytest.raises(GroupSizeError):
        group_from_generators(6, ["(1 2)", "(1 2 3 4 5 6)"], size_limit=100)


def test_unknown_group_name():
    with pytest.raises(ValueError, match="neither a built-in"):
        resolve_group("Q8")


def test_closure_matches_brute_force():
    G = builtin_group("S4")
    assert set(G.perms) == set(itertools.permutations(range(4)))
