"""The toric code TOR(k): lattice, stabilizers, syndromes, homology and distance.

Edges: h(r, c) = r*k + c runs from vertex (r, c) to (r, c+1); v(r, c) = k² + r*k + c
runs from (r, c) to (r+1, c). Face (r, c) is bounded by h(r, c), v(r, c+1),
h(r+1, c) and v(r, c). Vertices and faces are numbered r*k + c.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .pauli import PauliOperator, bits_of, group_commutator, mask_of, popcount

MAX_K = 31


@dataclass(frozen=True)
class Syndrome:
    violated_vertices: frozenset[int] = frozenset()
    violated_faces: frozenset[int] = frozenset()

    def is_empty(self) -> bool:
        return not self.violated_vertices and not self.violated_faces


@dataclass(frozen=True)
class HomologyClass:
    z_class: tuple[int, int]
    x_class: tuple[int, int]

    def is_trivial(self) -> bool:
        return self.z_class == (0, 0) and self.x_class == (0, 0)


class TorusCode:
    def __init__(self, k: int):
        if k < 2:
            raise ValueError("TOR(k) needs k >= 2")
        if k > MAX_K:
            raise ValueError(f"k is capped at {MAX_K}")
        self.k = k
        self.n = 2 * k * k

    def __repr__(self):
        return f"TorusCode(k={self.k})"

    # --- geometry
    def h(self, r: int, c: int) -> int:
        k = self.k
        return (r % k) * k + (c % k)

    def v(self, r: int, c: int) -> int:
        k = self.k
        return k * k + (r % k) * k + (c % k)

    def site(self, r: int, c: int) -> int:
        return (r % self.k) * self.k + (c % self.k)

    def edge_endpoints(self, e: int) -> tuple[int, int]:
        k = self.k
        r, c = divmod(e % (k * k), k)
        if e < k * k:
            return self.site(r, c), self.site(r, c + 1)
        return self.site(r, c), self.site(r + 1, c)

    def edge_faces(self, e: int) -> tuple[int, int]:
        """The two faces sharing edge e (as the face above/right, then below/left)."""
        k = self.k
        r, c = divmod(e % (k * k), k)
        if e < k * k:
            return self.site(r, c), self.site(r - 1, c)
        return self.site(r, c), self.site(r, c - 1)

    def star(self, s: int) -> tuple[int, ...]:
        r, c = divmod(s, self.k)
        return (self.h(r, c), self.h(r, c - 1), self.v(r, c), self.v(r - 1, c))

    def boundary(self, p: int) -> tuple[int, ...]:
        r, c = divmod(p, self.k)
        return (self.h(r, c), self.v(r, c + 1), self.h(r + 1, c), self.v(r, c))

    @cached_property
    def star_masks(self) -> tuple[int, ...]:
        return tuple(mask_of(self.star(s)) for s in range(self.k ** 2))

    @cached_property
    def face_masks(self) -> tuple[int, ...]:
        return tuple(mask_of(self.boundary(p)) for p in range(self.k ** 2))

    def vertex_stabilizers(self) -> list[PauliOperator]:
        return [PauliOperator(self.n, x=m) for m in self.star_masks]

    def face_stabilizers(self) -> list[PauliOperator]:
        return [PauliOperator(self.n, z=m) for m in self.face_masks]

    def stabilizers(self) -> list[PauliOperator]:
        return self.vertex_stabilizers() + self.face_stabilizers()

    # --- reference loops and cuts
    @cached_property
    def loop_z1(self) -> int:
        return mask_of(self.h(0, c) for c in range(self.k))

    @cached_property
    def loop_z2(self) -> int:
        return mask_of(self.v(r, 0) for r in range(self.k))

    @cached_property
    def cut_x1(self) -> int:
        return mask_of(self.h(r, 0) for r in range(self.k))

    @cached_property
    def cut_x2(self) -> int:
        return mask_of(self.v(0, c) for c in range(self.k))

    def logicals(self) -> dict[str, PauliOperator]:
        return {"Z1": PauliOperator(self.n, z=self.loop_z1),
                "Z2": PauliOperator(self.n, z=self.loop_z2),
                "X1": PauliOperator(self.n, x=self.cut_x1),
                "X2": PauliOperator(self.n, x=self.cut_x2)}

    # --- dense incidence, used by the fast Monte Carlo path
    @cached_property
    def vertex_incidence(self) -> np.ndarray:
        M = np.zeros((self.k ** 2, self.n), dtype=np.uint8)
        for s in range(self.k ** 2):
            M[s, list(self.star(s))] = 1
        return M

    @cached_property
    def face_incidence(self) -> np.ndarray:
        M = np.zeros((self.k ** 2, self.n), dtype=np.uint8)
        for p in range(self.k ** 2):
            M[p, list(self.boundary(p))] = 1
        return M


def build_code(k: int) -> TorusCode:
    return TorusCode(k)


def _check_size(code: TorusCode, E: PauliOperator):
    if E.n != code.n:
        raise ValueError(f"operator acts on {E.n} qubits, code has {code.n}")


def syndrome(code: TorusCode, E: PauliOperator) -> Syndrome:
    _check_size(code, E)
    vertices = frozenset(s for s, m in enumerate(code.star_masks) if popcount(E.z & m) & 1)
    faces = frozenset(p for p, m in enumerate(code.face_masks) if popcount(E.x & m) & 1)
    return Syndrome(vertices, faces)


def homology(code: TorusCode, E: PauliOperator) -> HomologyClass:
    """Crossing parities with the reference cut/loop duals; needs an empty syndrome."""
    if not syndrome(code, E).is_empty():
        raise ValueError("homology class is defined only for syndrome-free operators")
    return _homology_bits(code, E.x, E.z)


def _homology_bits(code: TorusCode, x: int, z: int) -> HomologyClass:
    return HomologyClass((popcount(z & code.cut_x1) & 1, popcount(z & code.cut_x2) & 1),
                         (popcount(x & code.loop_z1) & 1, popcount(x & code.loop_z2) & 1))


def classify_error(code: TorusCode, E: PauliOperator) -> str:
    if not syndrome(code, E).is_empty():
        return "detectable"
    return "stabilizer" if homology(code, E).is_trivial() else "logical"


def gf2_rank(rows) -> int:
    rank = 0
    pivots: dict[int, int] = {}
    for row in rows:
        while row:
            top = row.bit_length() - 1
            if top not in pivots:
                pivots[top] = row
                rank += 1
                break
            row ^= pivots[top]
    return rank


def code_parameters(code: TorusCode) -> tuple[int, int, int]:
    """(n, number of independent checks m, dimension of the protected subspace)."""
    rows = [(S.x << code.n) | S.z for S in code.stabilizers()]
    m = gf2_rank(rows)
    return code.n, m, 2 ** (code.n - m)


def _walk_is_connected(edges, endpoints) -> bool:
    current = set(endpoints(edges[0]))
    for e in edges[1:]:
        a, b = endpoints(e)
        nxt = set()
        if a in current:
            nxt.add(b)
        if b in current:
            nxt.add(a)
        if not nxt:
            return False
        current = nxt
    return True


def string_operator(code: TorusCode, path, kind: str) -> PauliOperator:
    """σ^z along a lattice edge path (kind 'z') or σ^x along a dual path (kind 'x')."""
    path = [int(e) for e in path]
    if not path:
        return PauliOperator.identity(code.n)
    if any(not 0 <= e < code.n for e in path):
        raise ValueError("edge index out of range")
    if kind == "z":
        ends = code.edge_endpoints
    elif kind == "x":
        ends = code.edge_faces
    else:
        raise ValueError("kind must be 'z' or 'x'")
    if not _walk_is_connected(path, ends):
        raise ValueError("path is not connected")
    mask = mask_of(path)
    return PauliOperator(code.n, z=mask) if kind == "z" else PauliOperator(code.n, x=mask)


def einarsson_check(code: TorusCode) -> int:
    """Sign of X1⁻¹ Z1⁻¹ X1 Z1."""
    L = code.logicals()
    W = group_commutator(L["X1"], L["Z1"])
    return int(W.scalar().real)


# --- distance ---------------------------------------------------------------------

@dataclass(frozen=True)
class DistanceResult:
    distance: int | None
    witness: PauliOperator | None
    searched_up_to: int
    mode: str


def _qubit_effects(code: TorusCode):
    """Per qubit and letter: (syndrome bits, homology bits) with faces above vertices."""
    k2 = code.k ** 2
    effects = []
    for q in range(code.n):
        bit = 1 << q
        vert = mask_of(s for s, m in enumerate(code.star_masks) if m & bit)
        face = mask_of(p for p, m in enumerate(code.face_masks) if m & bit)
        hz = _homology_bits(code, 0, bit)
        hx = _homology_bits(code, bit, 0)
        zh = hz.z_class[0] | hz.z_class[1] << 1
        xh = (hx.x_class[0] | hx.x_class[1] << 1) << 2
        effects.append({"X": (face << k2, xh), "Z": (vert, zh), "Y": ((face << k2) | vert, xh | zh)})
    return effects


def minimum_distance(code: TorusCode, max_weight: int | None = None, mode: str = "full"
                     ) -> DistanceResult:
    """Smallest weight of a syndrome-free, homologically nontrivial Pauli operator.

    mode 'full' tries every X/Y/Z assignment on each support; mode 'split' searches
    pure-X and pure-Z operators separately (enough for a CSS code).
    """
    if max_weight is None:
        max_weight = code.k
    letters = {"full": ("X", "Y", "Z"), "split": None}[mode]
    effects = _qubit_effects(code)
    for w in range(1, max_weight + 1):
        for support in itertools.combinations(range(code.n), w):
            choices = [("X",) * w, ("Z",) * w] if letters is None else \
                itertools.product(letters, repeat=w)
            for assign in choices:
                syn = hom = 0
                for q, letter in zip(support, assign):
                    s, hm = effects[q][letter]
                    syn ^= s
                    hom ^= hm
                if syn == 0 and hom:
                    label = ["I"] * code.n
                    for q, letter in zip(support, assign):
                        label[q] = letter
                    return DistanceResult(w, PauliOperator.from_label("".join(label)), w, mode)
    return DistanceResult(None, None, max_weight, mode)


def flat_z_configuration_state(code: TorusCode, v1: int, v2: int) -> np.ndarray:
    """Uniform superposition of face-flat Z-basis labels with given loop sums (dense)."""
    if code.n > 20:
        raise ValueError("dense construction limited to n <= 20")
    dim = 2 ** code.n
    idx = np.arange(dim)
    ok = np.ones(dim, bool)
    for m in code.face_masks:
        ok &= _parity(idx, m) == 0
    ok &= _parity(idx, code.loop_z1) == v1
    ok &= _parity(idx, code.loop_z2) == v2
    vec = ok.astype(complex)
    return vec / np.linalg.norm(vec)


def _parity(idx: np.ndarray, mask: int) -> np.ndarray:
    out = np.zeros_like(idx)
    for b in bits_of(mask):
        out ^= (idx >> b) & 1
    return out
