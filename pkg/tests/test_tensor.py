import numpy as np
import pytest

from anyonkit.tensor import SparseTensor, compare, contract


def random_sparse(rng, arity, size, density=0.3):
    dense = rng.normal(size=(size,) * arity) + 1j * rng.normal(size=(size,) * arity)
    dense[rng.random(dense.shape) > density] = 0
    coords = np.argwhere(dense)
    return SparseTensor.from_arrays(coords, dense[tuple(coords.T)], size), dense


def to_dense(t: SparseTensor):
    out = np.zeros((t.size,) * t.arity, complex)
    if t.arity == 0:
        return t.scalar()
    out[tuple(t.coords.T)] = t.values
    return out


@pytest.mark.parametrize("expr", [
    "ij,jk->ik", "ijk,kl->ijl", "ij,ji->", "ii->i", "ijk,jl,lk->i", "ij,kl->ijkl", "iij,j->i",
])
def test_contract_matches_einsum(expr):
    rng = np.random.default_rng(3)
    specs = expr.split("->")[0].split(",")
    pairs = [random_sparse(rng, len(s), 4) for s in specs]
    got = contract(expr, *(p[0] for p in pairs))
    want = np.einsum(expr, *(p[1] for p in pairs))
    assert np.allclose(to_dense(got), want)


def test_restriction_limits_free_letters():
    rng = np.random.default_rng(5)
    (A, a), (B, b) = random_sparse(rng, 2, 5), random_sparse(rng, 2, 5)
    keep = np.array([1, 3])
    got = to_dense(contract("ij,jk->ik", A, B, restrict={"i": keep}))
    want = a @ b
    assert np.allclose(got[keep], want[keep])
    assert np.allclose(np.delete(got, keep, axis=0), 0)


def test_duplicates_merge_and_zeros_drop():
    t = SparseTensor.from_arrays([[0, 1], [0, 1], [2, 2]], [1.0, -1.0, 2.0], 3)
    assert t.entries() == {(2, 2): 2 + 0j}


def test_compare_reports_first_difference():
    a = SparseTensor.from_arrays([[0, 1], [1, 1]], [1.0, 2.0], 2)
    b = SparseTensor.from_arrays([[0, 1], [1, 1]], [1.0, 2.5], 2)
    residual, where = compare(a, b)
    assert residual == pytest.approx(0.5) and where == (1, 1)
    assert compare(a, a) == (0.0, None)


def test_arity_errors():
    a = SparseTensor.from_arrays([[0, 1]], [1.0], 2)
    with pytest.raises(ValueError):
        contract("ijk->i", a)
    with pytest.raises(ValueError):
        contract("ij->k", a)
