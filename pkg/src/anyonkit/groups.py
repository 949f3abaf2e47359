"""Finite permutation groups: closure, conjugacy classes, centralizers, characters."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

DEFAULT_SIZE_LIMIT = 10_000

BUILTIN_GENERATORS = {
    "Z2": (2, ["(1 2)"]),
    "Z3": (3, ["(1 2 3)"]),
    "Z4": (4, ["(1 2 3 4)"]),
    "S3": (3, ["(1 2)", "(1 2 3)"]),
    "D4": (4, ["(1 2 3 4)", "(1 3)"]),
    "S4": (4, ["(1 2)", "(1 2 3 4)"]),
    "S5": (5, ["(1 2)", "(1 2 3 4 5)"]),
}


class GroupSizeError(ValueError):
    pass


class CharacterTableError(RuntimeError):
    pass


@dataclass(frozen=True)
class ConjugacyClass:
    representative: int
    members: tuple[int, ...]

    def __len__(self):
        return len(self.members)

    def __contains__(self, g):
        return g in self.members


@dataclass(frozen=True)
class Centralizer:
    base_element: int
    members: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class CharacterTable:
    classes: tuple[ConjugacyClass, ...]
    irreps: np.ndarray  # rows = irreps, columns = classes
    dims: tuple[int, ...]

    def character(self, row: int, class_of: np.ndarray) -> np.ndarray:
        """Character of irrep `row` as a per-element array."""
        return self.irreps[row][class_of]

    def orthogonality_residual(self, order: int) -> float:
        sizes = np.array([len(c) for c in self.classes])
        gram = (self.irreps * sizes) @ self.irreps.conj().T / order
        rows = np.abs(gram - np.eye(len(self.dims))).max()
        col = self.irreps.conj().T @ self.irreps
        cols = np.abs(col - np.diag(order / sizes)).max()
        return float(max(rows, cols))


# --- permutation text -------------------------------------------------------

def parse_cycles(text: str, degree: int) -> tuple[int, ...]:
    """Parse cycle notation like ``(1 2)(3 4 5)`` into a 0-based image tuple."""
    text = text.strip()
    images = list(range(degree))
    if text in ("", "()", "e", "id"):
        return tuple(images)
    if not re.fullmatch(r"(\(\s*[\d\s,]*\))+", text):
        raise ValueError(f"malformed cycle notation: {text!r}")
    seen = set()
    for body in re.findall(r"\(([^)]*)\)", text):
        points = [int(p) for p in re.split(r"[\s,]+", body.strip()) if p]
        for p in points:
            if not 1 <= p <= degree:
                raise ValueError(f"point {p} outside 1..{degree}")
            if p in seen:
                raise ValueError(f"point {p} repeated in {text!r}")
            seen.add(p)
        for a, b in zip(points, points[1:] + points[:1]):
            images[a - 1] = b - 1
    return tuple(images)


def format_cycles(perm) -> str:
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start] or perm[start] == start:
            continue
        cycle = []
        p = start
        while not seen[p]:
            seen[p] = True
            cycle.append(str(p + 1))
            p = perm[p]
        cycles.append("(" + " ".join(cycle) + ")")
    return "".join(cycles) or "()"


# --- the group ----------------------------------------------------------------

class FiniteGroup:
    """A permutation group with elements indexed 0..N-1 (0 is the identity).

    Elements are ordered lexicographically by their image tuples; `mul_table[a, b]`
    is the index of the composition a∘b (apply b first, then a).
    """

    def __init__(self, name: str, degree: int, perms, mul_table, inv_table):
        self.name = name
        self.degree = degree
        self.perms = tuple(perms)
        self.mul_table = mul_table
        self.inv_table = inv_table
        self.mul_table.setflags(write=False)
        self.inv_table.setflags(write=False)
        self._index = {p: i for i, p in enumerate(self.perms)}

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"

    @property
    def order(self) -> int:
        return len(self.perms)

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inv_table[a])

    def conj(self, g: int, v: int) -> int:
        """g v g⁻¹."""
        return int(self.mul_table[self.mul_table[g, v], self.inv_table[g]])

    def product(self, *elems: int) -> int:
        out = 0
        for e in elems:
            out = int(self.mul_table[out, e])
        return out

    def index_of(self, perm) -> int:
        return self._index[tuple(perm)]

    def parse(self, text: str) -> int:
        perm = parse_cycles(text, self.degree)
        if perm not in self._index:
            raise ValueError(f"{text!r} is not an element of {self.name}")
        return self._index[perm]

    def format(self, g: int) -> str:
        return format_cycles(self.perms[g])

    @cached_property
    def conj_table(self) -> np.ndarray:
        """conj_table[g, v] = g v g⁻¹."""
        m = self.mul_table
        return m[m, self.inv_table[:, None]]

    @cached_property
    def classes(self) -> tuple[ConjugacyClass, ...]:
        found = []
        assigned = np.full(self.order, -1)
        for v in range(self.order):
            if assigned[v] >= 0:
                continue
            orbit = np.unique(self.conj_table[:, v])
            assigned[orbit] = len(found)
            found.append(ConjugacyClass(v, tuple(int(x) for x in orbit)))
        found.sort(key=lambda c: (len(c.members), c.representative))
        return tuple(found)

    @cached_property
    def class_of(self) -> np.ndarray:
        out = np.empty(self.order, dtype=np.int64)
        for i, c in enumerate(self.classes):
            out[list(c.members)] = i
        out.setflags(write=False)
        return out

    def class_containing(self, g: int) -> ConjugacyClass:
        return self.classes[self.class_of[g]]

    def subgroup(self, members, name: str | None = None) -> "FiniteGroup":
        members = sorted(int(m) for m in members)
        pos = {g: i for i, g in enumerate(members)}
        try:
            mul = np.array([[pos[int(self.mul_table[a, b])] for b in members] for a in members],
                           dtype=np.int64)
        except KeyError:
            raise ValueError("members are not closed under multiplication") from None
        inv = np.array([pos[int(self.inv_table[a])] for a in members], dtype=np.int64)
        return FiniteGroup(name or f"{self.name}-sub{len(members)}", self.degree,
                           [self.perms[m] for m in members], mul, inv)

    @cached_property
    def character_table(self) -> CharacterTable:
        return _burnside_table(self)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul_table, self.mul_table.T))


def group_from_generators(degree: int, generators, name: str = "G",
                          size_limit: int = DEFAULT_SIZE_LIMIT) -> FiniteGroup:
    """Close a set of permutations (image tuples or cycle strings) under composition."""
    gens = []
    for g in generators:
        perm = parse_cycles(g, degree) if isinstance(g, str) else tuple(int(x) for x in g)
        if sorted(perm) != list(range(degree)):
            raise ValueError(f"generator {g!r} is not a bijection on {degree} points")
        gens.append(perm)
    identity = tuple(range(degree))
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for p in frontier:
            for s in gens:
                q = tuple(s[i] for i in p)
                if q not in seen:
                    seen.add(q)
                    if len(seen) > size_limit:
                        raise GroupSizeError(f"closure exceeds {size_limit} elements")
                    nxt.append(q)
        frontier = nxt
    perms = sorted(seen)
    arr = np.array(perms, dtype=np.int64).reshape(len(perms), degree)
    weights = degree ** np.arange(degree - 1, -1, -1, dtype=np.int64)
    keys = arr @ weights  # sorted, because the order is lexicographic
    n = len(perms)
    mul = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        composed = arr[a][arr]  # row b holds a∘b
        mul[a] = np.searchsorted(keys, composed @ weights)
    inv = np.argmin(mul, axis=1)  # index 0 is the identity
    return FiniteGroup(name, degree, perms, mul, inv)


def builtin_group(name: str) -> FiniteGroup:
    degree, gens = BUILTIN_GENERATORS[name]
    return group_from_generators(degree, gens, name=name)


def load_group_file(path, size_limit: int = DEFAULT_SIZE_LIMIT) -> FiniteGroup:
    lines = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines or not re.fullmatch(r"points\s+\d+", lines[0]):
        raise ValueError(f"{path}: first line must be 'points <d>'")
    degree = int(lines[0].split()[1])
    return group_from_generators(degree, lines[1:], name=Path(path).stem, size_limit=size_limit)


def resolve_group(spec: str) -> FiniteGroup:
    """A built-in name or a path to a group definition file."""
    if spec in BUILTIN_GENERATORS:
        return builtin_group(spec)
    if not Path(spec).is_file():
        names = " ".join(BUILTIN_GENERATORS)
        raise ValueError(f"{spec!r} is neither a built-in group ({names}) nor a group file")
    return load_group_file(spec)


def conjugacy_classes(G: FiniteGroup) -> list[ConjugacyClass]:
    return list(G.classes)


def centralizer(G: FiniteGroup, u: int) -> Centralizer:
    members = np.flatnonzero(G.conj_table[:, u] == u)
    return Centralizer(u, tuple(int(m) for m in members))


def character_table(G: FiniteGroup) -> CharacterTable:
    return G.character_table


# --- Burnside's algorithm --------------------------------------------------

def class_coefficients(G: FiniteGroup) -> np.ndarray:
    """a[j, l, k] = #{x in C_j : x⁻¹ z_k in C_l} for a fixed z_k in C_k."""
    r = len(G.classes)
    a = np.zeros((r, r, r))
    cls = G.class_of
    for j, cj in enumerate(G.classes):
        xs_inv = G.inv_table[list(cj.members)]
        for k, ck in enumerate(G.classes):
            ls = cls[G.mul_table[xs_inv, ck.representative]]
            a[j, :, k] = np.bincount(ls, minlength=r)
    return a


def _snap(values: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    re_, im = values.real.copy(), values.imag.copy()
    for part in (re_, im):
        near = np.abs(part - np.round(part)) < tol
        part[near] = np.round(part[near])
    return re_ + 1j * im


def _burnside_table(G: FiniteGroup, attempts: int = 50) -> CharacterTable:
    classes = G.classes
    r = len(classes)
    n = G.order
    sizes = np.array([len(c) for c in classes], dtype=float)
    a = class_coefficients(G)
    rng = np.random.default_rng(12345)
    for _ in range(attempts):
        weights = rng.normal(size=r)
        # class vectors ω are common right eigenvectors of every A_j[l, k] = a[j, l, k]
        M = np.einsum("j,jlk->lk", weights, a)
        vals, vecs = np.linalg.eig(M)
        gaps = np.abs(vals[:, None] - vals[None, :]) + np.eye(r)
        if gaps.min() < 1e-6 * max(1.0, np.abs(vals).max()):
            continue
        omegas = (vecs / vecs[0]).T  # ω at the identity class equals 1
        rows, dims = [], []
        for w in omegas:
            norm = np.sum(np.abs(w) ** 2 / sizes)
            dim = np.sqrt(n / norm.real)
            d = int(round(dim))
            if abs(dim - d) > 1e-6:
                break
            rows.append(_snap(w * d / sizes))
            dims.append(d)
        else:
            table = np.array(rows)
            order = sorted(range(r), key=lambda i: (dims[i], [(-v.real, -v.imag) for v in
                                                               np.round(table[i], 6)]))
            ct = CharacterTable(classes, table[order], tuple(dims[i] for i in order))
            if ct.orthogonality_residual(n) < 1e-9 and sum(d * d for d in ct.dims) == n:
                return ct
    raise CharacterTableError(
        f"class-matrix eigenproblem for {G.name} did not separate {r} characters "
        f"after {attempts} random combinations")
