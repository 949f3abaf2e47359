"""Ribbons as move strings, and their operators built from triangles.

From the site (f, c) both moves use the edge e of step c-1 of face f, the step
that arrives at the site's vertex:

- 'L' (direct triangle: edge e with that vertex) crosses e into the neighbouring
  face, keeping the vertex. Operator δ_{g,1} L^h(e, vertex).
- 'T' (dual triangle: edge e with face f) walks back along e to corner c-1,
  keeping the face. Operator T^{g⁻¹}(e, f).

So "LTLT..." is a straight ribbon. Its operators compose by
F^k(τ t') = Ω^k_{mn} F^m(τ) F^n(t').
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from ..double import DoubleTensors
from .geometry import GenericLattice, Site
from .operators import LatticeSpace, Monomial


class MalformedRibbon(ValueError):
    pass


@dataclass(frozen=True)
class Triangle:
    kind: str  # 'direct' carries L at an edge end, 'dual' carries T on a face side
    edge: int
    end: str | None  # 'origin' or 'terminus' for direct triangles
    side: str | None  # 'left' or 'right' for dual triangles
    start: Site
    stop: Site


def step_triangle(lat: GenericLattice, site: Site, move: str) -> Triangle:
    f, c = site
    steps = lat.faces[f]
    i = (c - 1) % len(steps)
    e, forward = steps[i]
    if move == "L":
        f1, d = lat.twins[(f, i)]
        return Triangle("direct", e, "terminus" if forward else "origin", None, site, (f1, d))
    if move == "T":
        return Triangle("dual", e, None, "left" if forward else "right", site, (f, i))
    raise MalformedRibbon(f"unknown move {move!r}")


@dataclass(frozen=True)
class Ribbon:
    lattice: GenericLattice
    start: Site
    moves: str

    def __post_init__(self):
        if not self.moves:
            raise MalformedRibbon("a ribbon needs at least one triangle")
        edges = [t.edge for t in self.triangles]
        if len(set(edges)) != len(edges):
            raise MalformedRibbon(f"ribbon {self.moves} from {self.start} reuses an edge")

    @cached_property
    def triangles(self) -> tuple[Triangle, ...]:
        out, site = [], self.start
        for m in self.moves:
            tri = step_triangle(self.lattice, site, m)
            out.append(tri)
            site = tri.stop
        return tuple(out)

    @property
    def end(self) -> Site:
        return self.triangles[-1].stop

    @property
    def edges(self) -> frozenset[int]:
        return frozenset(t.edge for t in self.triangles)

    def split(self, i: int) -> tuple["Ribbon", "Ribbon"]:
        return Ribbon(self.lattice, self.start, self.moves[:i]), \
            Ribbon(self.lattice, self.triangles[i].start, self.moves[i:])

    def __add__(self, other: "Ribbon") -> "Ribbon":
        if other.start != self.end:
            raise MalformedRibbon("ribbons do not meet")
        return Ribbon(self.lattice, self.start, self.moves + other.moves)


def enumerate_ribbons(lat: GenericLattice, start: Site, max_len: int) -> list[Ribbon]:
    """Every edge-disjoint move string from a site, shortest first."""
    out = []
    frontier = [("", start, frozenset())]
    for _ in range(max_len):
        nxt = []
        for moves, site, used in frontier:
            for m in "LT":
                tri = step_triangle(lat, site, m)
                if tri.edge in used:
                    continue
                item = (moves + m, tri.stop, used | {tri.edge})
                nxt.append(item)
                out.append(Ribbon(lat, start, item[0]))
        frontier = nxt
    return out


# --- operators -----------------------------------------------------------------------

def triangle_operators(space: LatticeSpace, tri: Triangle) -> list[Monomial | None]:
    """F^k for one triangle, indexed by flat k = h*N + g; None marks the zero operator."""
    G = space.group
    N = G.order
    ops: list[Monomial | None] = [None] * (N * N)
    for h in G.elements:
        for g in G.elements:
            if tri.kind == "direct":
                if g == 0:
                    ops[h * N] = space.L(tri.edge, "L+" if tri.end == "terminus" else "L-", h)
            else:
                which = "T-" if tri.side == "left" else "T+"
                ops[h * N + g] = space.T(tri.edge, which, G.inv(g))
    return ops


def ribbon_operators(space: LatticeSpace, ribbon: Ribbon, T: DoubleTensors) -> list[sp.csr_matrix]:
    """All N² ribbon operators, composed triangle by triangle through Ω."""
    dim = space.dim
    zero = sp.csr_matrix((dim, dim), dtype=complex)

    def as_sparse(ops):
        return [zero if op is None else op.to_sparse() for op in ops]

    current = as_sparse(triangle_operators(space, ribbon.triangles[-1]))
    for tri in reversed(ribbon.triangles[:-1]):
        first = as_sparse(triangle_operators(space, tri))
        combined = [zero] * T.size
        for (k, m, n), val in zip(T.omega.coords, T.omega.values):
            if first[m].nnz and current[n].nnz:
                combined[k] = combined[k] + val * (first[m] @ current[n])
        current = [c.tocsr() for c in combined]
    return current


def ribbon_closed_form(space: LatticeSpace, ribbon: Ribbon, h: int, g: int) -> Monomial:
    """δ_{g, x1 x2 ⋯} with each L edge moved by (x1⋯x_i)⁻¹ h (x1⋯x_i).

    x_i is the dual-triangle value: the label if the face is on the edge's left,
    its inverse otherwise; the prefix runs over dual triangles met so far.
    """
    G = space.group
    mul, inv = G.mul_table, G.inv_table
    d = space.digits.copy()
    orig = space.digits
    prefix = np.zeros(space.dim, dtype=np.int64)
    for tri in ribbon.triangles:
        j = space.pos[tri.edge]
        if tri.kind == "dual":
            z = orig[:, j]
            prefix = mul[prefix, z if tri.side == "left" else inv[z]]
        else:
            hh = mul[mul[inv[prefix], h], prefix]
            if tri.end == "terminus":
                d[:, j] = mul[hh, d[:, j]]
            else:
                d[:, j] = mul[d[:, j], inv[hh]]
    coef = (prefix == g).astype(complex)
    return Monomial(d @ space.strides, coef)


def ribbon_space(group, ribbon: Ribbon, extra_edges=()) -> LatticeSpace:
    """The spins touched by a ribbon, enough to compare ribbon operators."""
    return LatticeSpace(group, ribbon.lattice, sorted(ribbon.edges | set(extra_edges)))
