"""Dense state space C[G]^⊗edges and the local operators acting on it.

Basis index z encodes edge labels little-endian: the label of active edge j is
(z // N**j) % N. Every elementary operator is a monomial: basis state z goes to
coef[z] * basis state target[z].
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from ..groups import FiniteGroup
from .geometry import GenericLattice, Site

MAX_AMPLITUDES = 1_000_000


class Monomial:
    def __init__(self, target: np.ndarray, coef: np.ndarray):
        self.target = target
        self.coef = coef

    @property
    def dim(self) -> int:
        return len(self.target)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        w = self.coef * vec
        return (np.bincount(self.target, weights=w.real, minlength=self.dim)
                + 1j * np.bincount(self.target, weights=w.imag, minlength=self.dim))

    def __matmul__(self, other: "Monomial") -> "Monomial":
        """self ∘ other (other acts first)."""
        return Monomial(self.target[other.target], other.coef * self.coef[other.target])

    def to_sparse(self) -> sp.csr_matrix:
        n = self.dim
        keep = self.coef != 0
        return sp.csr_matrix((self.coef[keep], (self.target[keep], np.arange(n)[keep])),
                             shape=(n, n))


class LatticeSpace:
    """Group-valued spins on (a subset of) the lattice edges."""

    def __init__(self, group: FiniteGroup, lattice: GenericLattice, edges=None,
                 max_amplitudes: int = MAX_AMPLITUDES):
        self.group = group
        self.lattice = lattice
        self.edges = list(range(lattice.n_edges)) if edges is None else sorted(set(edges))
        self.pos = {e: i for i, e in enumerate(self.edges)}
        N = group.order
        dim = N ** len(self.edges)
        if dim > max_amplitudes:
            raise ValueError(f"{dim} amplitudes exceed the cap of {max_amplitudes}")
        self.dim = dim
        self.strides = N ** np.arange(len(self.edges), dtype=np.int64)

    @property
    def N(self) -> int:
        return self.group.order

    @cached_property
    def digits(self) -> np.ndarray:
        z = np.arange(self.dim, dtype=np.int64)
        return (z[:, None] // self.strides[None, :]) % self.N

    def basis_index(self, labels) -> int:
        return int(np.dot(np.asarray(labels, dtype=np.int64), self.strides))

    def label(self, z: np.ndarray, edge: int) -> np.ndarray:
        return self.digits[z, self.pos[edge]]

    def _target(self, new_digits: np.ndarray) -> np.ndarray:
        return new_digits @ self.strides

    def identity(self) -> Monomial:
        return Monomial(np.arange(self.dim), np.ones(self.dim, complex))

    # --- single-edge operators
    def _edge_map(self, digits: np.ndarray, edge: int, which: str, g: int) -> None:
        mul, inv = self.group.mul_table, self.group.inv_table
        j = self.pos[edge]
        if which == "L+":
            digits[:, j] = mul[g, digits[:, j]]
        elif which == "L-":
            digits[:, j] = mul[digits[:, j], inv[g]]
        else:
            raise ValueError(which)

    def L(self, edge: int, which: str, g: int) -> Monomial:
        d = self.digits.copy()
        self._edge_map(d, edge, which, g)
        return Monomial(self._target(d), np.ones(self.dim, complex))

    def T(self, edge: int, which: str, h: int) -> Monomial:
        z = self.digits[:, self.pos[edge]]
        want = h if which == "T+" else self.group.inv(h)
        if which not in ("T+", "T-"):
            raise ValueError(which)
        return Monomial(np.arange(self.dim), (z == want).astype(complex))

    def apply_LT(self, state: np.ndarray, edge: int, which: str, element: int) -> np.ndarray:
        op = self.T(edge, which, element) if which.startswith("T") else self.L(edge, which, element)
        return op.apply(state)

    # --- gauge and flux operators
    def A_g(self, s: int, g: int) -> Monomial:
        d = self.digits.copy()
        for e, end in self.lattice.star(s):
            self._edge_map(d, e, "L-" if end == "origin" else "L+", g)
        return Monomial(self._target(d), np.ones(self.dim, complex))

    def flux(self, site: Site, digits: np.ndarray | None = None) -> np.ndarray:
        """Ordered product around the face from the site's vertex, per basis state."""
        d = self.digits if digits is None else digits
        mul, inv = self.group.mul_table, self.group.inv_table
        out = np.zeros(len(d), dtype=np.int64)
        for e, forward in self.lattice.boundary_steps(site):
            z = d[:, self.pos[e]]
            out = mul[out, inv[z] if forward else z]
        return out

    def B_h(self, site: Site, h: int) -> Monomial:
        return Monomial(np.arange(self.dim), (self.flux(site) == h).astype(complex))

    def D(self, site: Site, h: int, g: int) -> Monomial:
        """D_(h,g) = B_h A_g at the site."""
        A = self.A_g(self.lattice.site_vertex(site), g)
        return self.B_h(site, h) @ A

    def A_projector(self, s: int) -> sp.csr_matrix:
        return sum(self.A_g(s, g).to_sparse() for g in self.group.elements) / self.N

    def B_projector(self, site: Site) -> sp.csr_matrix:
        return self.B_h(site, 0).to_sparse()

    def apply_A_projector(self, vec: np.ndarray, s: int) -> np.ndarray:
        return sum(self.A_g(s, g).apply(vec) for g in self.group.elements) / self.N

    def face_site(self, p: int) -> Site:
        return (p, 0)

    def flat_mask(self, skip_faces=()) -> np.ndarray:
        ok = np.ones(self.dim, bool)
        for p in range(len(self.lattice.faces)):
            if p not in skip_faces:
                ok &= self.flux(self.face_site(p)) == 0
        return ok

    def project_constraints(self, vec: np.ndarray, skip_vertices=(), skip_faces=()) -> np.ndarray:
        """Apply every A(s) and B(p) except the listed ones."""
        out = vec * self.flat_mask(skip_faces)
        for s in range(self.lattice.n_vertices):
            if s not in skip_vertices:
                out = self.apply_A_projector(out, s)
        return out

    def hamiltonian(self) -> sp.csr_matrix:
        eye = sp.identity(self.dim, format="csr")
        H = sp.csr_matrix((self.dim, self.dim))
        for s in range(self.lattice.n_vertices):
            H = H + eye - self.A_projector(s)
        for p in range(len(self.lattice.faces)):
            H = H + eye - self.B_projector(self.face_site(p))
        return H

    def ground_space(self, tol: float = 1e-9) -> np.ndarray:
        """Orthonormal columns spanning the joint +1 space of all A(s), B(p)."""
        return self.constrained_space(tol=tol)

    def gauge_orbits(self, skip_vertices=(), skip_faces=()) -> tuple[np.ndarray, int]:
        """Label each flat basis state by its orbit under the unskipped gauge moves.

        The product of the A(s) projectors averages over a permutation group and the
        flatness mask is invariant under it, so the constrained space is spanned by
        the normalized orbit indicators. Returns (labels, count), label -1 off the mask.
        """
        rows, cols = [], []
        for s in range(self.lattice.n_vertices):
            if s in skip_vertices:
                continue
            for g in self.group.elements[1:]:
                rows.append(np.arange(self.dim))
                cols.append(self.A_g(s, g).target)
        graph = sp.csr_matrix((np.ones(sum(len(r) for r in rows)),
                               (np.concatenate(rows or [np.zeros(0, int)]),
                                np.concatenate(cols or [np.zeros(0, int)]))),
                              shape=(self.dim, self.dim))
        _, comp = connected_components(graph, directed=True, connection="weak")
        mask = self.flat_mask(skip_faces)
        kept, labels = np.unique(comp[mask], return_inverse=True)
        out = np.full(self.dim, -1, dtype=np.int64)
        out[mask] = labels
        return out, len(kept)

    def constrained_space(self, skip_vertices=(), skip_faces=(), tol: float = 1e-9) -> np.ndarray:
        labels, count = self.gauge_orbits(skip_vertices, skip_faces)
        basis = np.zeros((self.dim, count), complex)
        inside = labels >= 0
        basis[np.flatnonzero(inside), labels[inside]] = 1.0
        return basis / np.sqrt(basis.real.sum(axis=0))

    def orbit_coordinates(self, vecs: np.ndarray, labels: np.ndarray, count: int
                          ) -> tuple[np.ndarray, float]:
        """Coordinates of column vectors in the orbit basis and the largest leftover norm."""
        inside = labels >= 0
        lab = labels[inside]
        sizes = np.bincount(lab, minlength=count)
        coords = np.zeros((count, vecs.shape[1]), complex)
        leftover = 0.0
        for j in range(vecs.shape[1]):
            v = vecs[:, j]
            w = v[inside]
            coords[:, j] = (np.bincount(lab, w.real, count)
                            + 1j * np.bincount(lab, w.imag, count)) / np.sqrt(sizes)
            back = np.zeros_like(v)
            back[inside] = coords[lab, j] / np.sqrt(sizes[lab])
            leftover = max(leftover, float(np.abs(v - back).max()))
        return coords, leftover


def orthonormal_columns(M: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    if M.shape[1] == 0:
        return M
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    return U[:, s > tol * max(1.0, s[0])]


def numerical_rank(M: np.ndarray, tol: float = 1e-9) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int((s > tol * max(1.0, s[0])).sum())


def operator_distance(A, B) -> float:
    """Largest absolute entry of A − B (sparse or dense)."""
    D = A - B
    if sp.issparse(D):
        D = D.tocoo()
        return float(np.abs(D.data).max()) if D.nnz else 0.0
    return float(np.abs(D).max()) if D.size else 0.0
