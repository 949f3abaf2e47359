"""Sparse COO tensors and einsum-style contraction by sorted joins."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SparseTensor:
    """Nonzero entries of a tensor whose every slot ranges over 0..size-1."""

    coords: np.ndarray  # (nnz, arity) int64
    values: np.ndarray  # (nnz,) complex128
    size: int

    def __post_init__(self):
        self.coords.setflags(write=False)
        self.values.setflags(write=False)

    @classmethod
    def from_arrays(cls, coords, values, size: int) -> "SparseTensor":
        coords = np.asarray(coords, dtype=np.int64)
        if coords.ndim == 1:
            coords = coords[:, None]
        values = np.broadcast_to(np.asarray(values, dtype=complex), (len(coords),))
        return _canonical(coords, values, size)

    @property
    def arity(self) -> int:
        return self.coords.shape[1]

    @property
    def nnz(self) -> int:
        return len(self.values)

    def entries(self) -> dict[tuple[int, ...], complex]:
        return {tuple(int(i) for i in c): complex(v) for c, v in zip(self.coords, self.values)}

    def get(self, *index: int) -> complex:
        hit = np.flatnonzero((self.coords == np.asarray(index)).all(axis=1))
        return complex(self.values[hit[0]]) if len(hit) else 0j

    def slice(self, slot: int, value: int) -> "SparseTensor":
        keep = self.coords[:, slot] == value
        return SparseTensor(np.delete(self.coords[keep], slot, axis=1), self.values[keep],
                            self.size)

    def scalar(self) -> complex:
        if self.arity != 0:
            raise ValueError("not a scalar")
        return complex(self.values.sum()) if self.nnz else 0j


def _canonical(coords, values, size) -> SparseTensor:
    """Merge duplicate coordinates, drop zeros and sort lexicographically."""
    if coords.shape[1] == 0:
        total = values.sum() if len(values) else 0
        if total == 0:
            return SparseTensor(np.zeros((0, 0), np.int64), np.zeros(0, complex), size)
        return SparseTensor(np.zeros((1, 0), np.int64), np.array([total], complex), size)
    if len(coords) == 0:
        return SparseTensor(coords.reshape(0, coords.shape[1]), np.zeros(0, complex), size)
    if coords.min() < 0 or coords.max() >= size:
        raise ValueError("index out of range")
    uniq, inverse = np.unique(coords, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    merged = (np.bincount(inverse, weights=values.real, minlength=len(uniq))
              + 1j * np.bincount(inverse, weights=values.imag, minlength=len(uniq)))
    keep = merged != 0
    return SparseTensor(uniq[keep], merged[keep], size)


def _row_ids(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Integer ids for the rows of two arrays, equal iff the rows are equal."""
    if a.shape[1] == 0:
        return np.zeros(len(a), np.int64), np.zeros(len(b), np.int64)
    both = np.concatenate([a, b])
    _, inv = np.unique(both, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    return inv[: len(a)], inv[len(a):]


def _join(ka: np.ndarray, kb: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All index pairs (i, j) with ka[i] == kb[j]."""
    order = np.argsort(kb, kind="stable")
    sorted_b = kb[order]
    lo = np.searchsorted(sorted_b, ka, side="left")
    hi = np.searchsorted(sorted_b, ka, side="right")
    counts = hi - lo
    ia = np.repeat(np.arange(len(ka)), counts)
    starts = np.repeat(lo - np.cumsum(counts) + counts, counts)
    jb = order[starts + np.arange(counts.sum())]
    return ia, jb


class _Term:
    def __init__(self, letters: str, coords: np.ndarray, values: np.ndarray):
        self.letters = letters
        self.coords = coords
        self.values = values

    def take_diagonals(self):
        letters, coords = self.letters, self.coords
        out, cols = "", []
        keep = np.ones(len(coords), bool)
        for pos, ch in enumerate(letters):
            first = letters.index(ch)
            if first != pos:
                keep &= coords[:, first] == coords[:, pos]
            else:
                out += ch
                cols.append(pos)
        return _Term(out, coords[keep][:, cols], self.values[keep])

    def restrict(self, allowed: dict[str, np.ndarray]):
        keep = np.ones(len(self.coords), bool)
        for pos, ch in enumerate(self.letters):
            if ch in allowed:
                keep &= np.isin(self.coords[:, pos], allowed[ch])
        return _Term(self.letters, self.coords[keep], self.values[keep])

    def sum_out(self, keep_letters: set[str]):
        cols = [i for i, ch in enumerate(self.letters) if ch in keep_letters]
        if len(cols) == len(self.letters):
            return self
        letters = "".join(self.letters[i] for i in cols)
        coords = self.coords[:, cols]
        if len(cols) == 0:
            total = self.values.sum() if len(self.values) else 0j
            return _Term("", np.zeros((1, 0), np.int64), np.array([total], complex))
        if len(coords) == 0:
            return _Term(letters, coords, self.values)
        uniq, inv = np.unique(coords, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        vals = (np.bincount(inv, weights=self.values.real, minlength=len(uniq))
                + 1j * np.bincount(inv, weights=self.values.imag, minlength=len(uniq)))
        nz = vals != 0
        return _Term(letters, uniq[nz], vals[nz])

    def join(self, other: "_Term") -> "_Term":
        shared = [ch for ch in self.letters if ch in other.letters]
        ka, kb = _row_ids(self.coords[:, [self.letters.index(c) for c in shared]],
                          other.coords[:, [other.letters.index(c) for c in shared]])
        ia, jb = _join(ka, kb)
        extra = [i for i, ch in enumerate(other.letters) if ch not in shared]
        coords = np.concatenate([self.coords[ia], other.coords[jb][:, extra]], axis=1)
        letters = self.letters + "".join(other.letters[i] for i in extra)
        return _Term(letters, coords, self.values[ia] * other.values[jb])


def contract(expr: str, *tensors: SparseTensor, restrict: dict[str, np.ndarray] | None = None
             ) -> SparseTensor:
    """Sparse einsum: ``contract("lmi,ink->lmnk", A, B)``.

    Repeated letters are summed; `restrict` limits letters to given value sets.
    Operands are joined greedily, preferring the one sharing most letters so far.
    """
    lhs, out = expr.replace(" ", "").split("->")
    specs = lhs.split(",")
    if len(specs) != len(tensors):
        raise ValueError("operand count does not match the expression")
    size = tensors[0].size
    terms = []
    for spec, t in zip(specs, tensors):
        if len(spec) != t.arity:
            raise ValueError(f"operand {spec!r} has arity {t.arity}")
        term = _Term(spec, t.coords, t.values).take_diagonals()
        if restrict:
            term = term.restrict(restrict)
        terms.append(term)

    def needed(remaining):
        keep = set(out)
        for t in remaining:
            keep |= set(t.letters)
        return keep

    current = terms.pop(0)
    current = current.sum_out(needed(terms))
    while terms:
        best = max(range(len(terms)),
                   key=lambda i: (len(set(terms[i].letters) & set(current.letters)),
                                  -len(terms[i].values)))
        nxt = terms.pop(best)
        current = current.join(nxt).sum_out(needed(terms))
    missing = set(out) - set(current.letters)
    if missing:
        raise ValueError(f"output letters {missing} do not appear in any operand")
    perm = [current.letters.index(ch) for ch in out]
    return _canonical(current.coords[:, perm], current.values, size)


def compare(lhs: SparseTensor, rhs: SparseTensor) -> tuple[float, tuple[int, ...] | None]:
    """Worst absolute difference and the lexicographically first differing index."""
    if lhs.arity != rhs.arity:
        raise ValueError("arity mismatch")
    coords = np.concatenate([lhs.coords, rhs.coords])
    values = np.concatenate([lhs.values, -rhs.values])
    diff = _canonical(coords, values, lhs.size)
    if diff.nnz == 0:
        return 0.0, None
    return float(np.abs(diff.values).max()), tuple(int(i) for i in diff.coords[0])
