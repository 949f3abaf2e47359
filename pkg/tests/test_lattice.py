import numpy as np
import pytest
import scipy.sparse as sp

from anyonkit.double import build_tensors
from anyonkit.groups import builtin_group
from anyonkit.lattice import (
    GenericLattice, LatticeSpace, MalformedRibbon, Ribbon, enumerate_ribbons, parse_lattice,
    reverse_edge, ribbon_closed_form, ribbon_operators, tetrahedron, torus_lattice,
)
from anyonkit.lattice.checks import expected_ground_dimension, run_suite


def hamiltonian_nullity(space: LatticeSpace) -> int:
    H = space.hamiltonian().toarray()
    assert np.allclose(H, H.conj().T)
    return int((np.abs(np.linalg.eigvalsh(H)) < 1e-9).sum())


@pytest.mark.parametrize("group,lattice,dim", [
    ("Z2", "torus:2x2", 4), ("Z2", "tetrahedron", 1), ("S3", "torus:2x1", 8),
    ("Z3", "torus:1x1", 9), ("S3", "torus:1x1", 8),
])
def test_ground_space_dimension_by_diagonalization(group, lattice, dim):
    space = LatticeSpace(builtin_group(group), parse_lattice(lattice))
    assert hamiltonian_nullity(space) == dim
    assert space.ground_space().shape[1] == dim


def test_torus_ground_dimension_counts_commuting_pairs():
    assert expected_ground_dimension(builtin_group("S3"), "torus") == 8
    assert expected_ground_dimension(builtin_group("D4"), "torus") == 22
    assert expected_ground_dimension(builtin_group("S3"), "sphere") == 1


@pytest.mark.parametrize("spec,counts", [
    ("tetrahedron", (4, 6, 4)), ("torus:2x2", (4, 8, 4)), ("torus:2x1", (2, 4, 2)),
])
def test_lattice_shapes(spec, counts):
    lat = parse_lattice(spec)
    assert (lat.n_vertices, lat.n_edges, len(lat.faces)) == counts


def test_malformed_lattices_are_rejected():
    lat = tetrahedron()
    with pytest.raises(ValueError):
        GenericLattice(lat.n_vertices, lat.edges, lat.faces[:-1], "sphere")
    with pytest.raises(ValueError):
        GenericLattice(lat.n_vertices, lat.edges, lat.faces, "torus")
    with pytest.raises(ValueError):
        parse_lattice("cube")


def test_reverse_edge_keeps_the_lattice_valid():
    lat = torus_lattice(2, 2)
    flipped = reverse_edge(lat, 3)
    assert flipped.edges[3] == lat.edges[3][::-1]
    assert flipped.left_face(3) == lat.right_face(3)


def test_ribbons_must_not_reuse_edges():
    lat = tetrahedron()
    rib = enumerate_ribbons(lat, (0, 0), 3)
    assert all(len(r.edges) == len(r.moves) for r in rib)
    with pytest.raises(MalformedRibbon):
        Ribbon(lat, (0, 0), "")
    with pytest.raises(MalformedRibbon):
        Ribbon(lat, (0, 0), "X")


def test_closed_form_matches_triangle_composition_on_s3():
    G = builtin_group("S3")
    T = build_tensors(G)
    lat = torus_lattice(2, 1)
    space = LatticeSpace(G, lat)
    for rib in enumerate_ribbons(lat, (0, 0), 3):
        ops = ribbon_operators(space, rib, T)
        for k, F in enumerate(ops):
            want = ribbon_closed_form(space, rib, k // G.order, k % G.order).to_sparse()
            assert abs(F - want).max() < 1e-12


def test_ribbon_operators_contract_with_the_counit_to_identity():
    G = builtin_group("S3")
    space = LatticeSpace(G, torus_lattice(2, 1))
    rib = Ribbon(space.lattice, (0, 0), "LT")
    total = sum(ribbon_closed_form(space, rib, 0, g).to_sparse() for g in G.elements)
    assert abs(total - sp.identity(space.dim)).max() < 1e-12


@pytest.mark.parametrize("group,lattice", [
    ("Z2", "tetrahedron"), ("Z2", "torus:2x2"), ("Z3", "tetrahedron"), ("S3", "torus:2x1"),
])
def test_full_suite_passes(group, lattice):
    results = run_suite(builtin_group(group), parse_lattice(lattice))
    failed = [(r.name, r.residual, r.detail) for r in results if not r.passed]
    assert not failed
    ran = {r.name for r in results if r.status == "pass"}
    assert {"ground-dimension", "closed-form-composition", "gram-matrix"} <= ran


def test_sphere_only_checks_run_on_the_tetrahedron():
    results = {r.name: r for r in run_suite(builtin_group("Z2"), tetrahedron(), "identities")}
    for name in ("two-particle-space", "homotopy-invariance", "tree-basis"):
        assert results[name].status == "pass"


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite(builtin_group("Z2"), tetrahedron(), "everything")
