"""Oriented lattices on the sphere or torus, with faces as counterclockwise step lists.

A face boundary is a cyclic list of steps (edge, forward); step i runs from its
start vertex to the start vertex of step i+1. A site is (face, corner): the
corner-th step's start vertex together with the face.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

Site = tuple[int, int]


@dataclass(frozen=True)
class GenericLattice:
    n_vertices: int
    edges: tuple[tuple[int, int], ...]  # (origin, terminus)
    faces: tuple[tuple[tuple[int, bool], ...], ...]
    surface: str
    name: str = "lattice"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        fwd = {}
        bwd = {}
        for f, steps in enumerate(self.faces):
            for i, (e, forward) in enumerate(steps):
                o, t = self.edges[e]
                end = t if forward else o
                nxt_e, nxt_fwd = steps[(i + 1) % len(steps)]
                no, nt = self.edges[nxt_e]
                if (no if nxt_fwd else nt) != end:
                    raise ValueError(f"face {f} boundary is not a closed walk at step {i}")
                table = fwd if forward else bwd
                if e in table:
                    raise ValueError(f"edge {e} traversed twice in the same direction")
                table[e] = (f, i)
        for e in range(len(self.edges)):
            if e not in fwd or e not in bwd:
                raise ValueError(f"edge {e} must border faces on both sides")
        chi = self.n_vertices - len(self.edges) + len(self.faces)
        expected = {"sphere": 2, "torus": 0}.get(self.surface)
        if expected is None:
            raise ValueError(f"unsupported surface {self.surface!r}")
        if chi != expected:
            raise ValueError(f"Euler characteristic {chi} does not match a {self.surface}")

    def step_start(self, f: int, i: int) -> int:
        e, forward = self.faces[f][i % len(self.faces[f])]
        o, t = self.edges[e]
        return o if forward else t

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def twins(self) -> dict[tuple[int, int], tuple[int, int]]:
        """Step (face, index) -> the step traversing the same edge the other way."""
        where: dict[tuple[int, bool], tuple[int, int]] = {}
        for f, steps in enumerate(self.faces):
            for i, (e, forward) in enumerate(steps):
                where[(e, forward)] = (f, i)
        return {where[(e, fw)]: where[(e, not fw)] for (e, fw) in where}

    def left_face(self, e: int) -> int:
        """The face to the left of the arrow: it walks the edge forward counterclockwise."""
        for f, steps in enumerate(self.faces):
            if (e, True) in steps:
                return f
        raise KeyError(e)

    def right_face(self, e: int) -> int:
        for f, steps in enumerate(self.faces):
            if (e, False) in steps:
                return f
        raise KeyError(e)

    def star(self, s: int) -> list[tuple[int, str]]:
        """Half-edges at vertex s as (edge, 'origin' | 'terminus'); self-loops appear twice."""
        out = []
        for e, (o, t) in enumerate(self.edges):
            if o == s:
                out.append((e, "origin"))
            if t == s:
                out.append((e, "terminus"))
        return out

    def site_vertex(self, site: Site) -> int:
        f, c = site
        return self.step_start(f, c)

    def sites(self) -> list[Site]:
        return [(f, c) for f, steps in enumerate(self.faces) for c in range(len(steps))]

    def boundary_steps(self, site: Site) -> list[tuple[int, bool]]:
        """Counterclockwise boundary steps of the face starting at the site's vertex."""
        f, c = site
        steps = self.faces[f]
        return [steps[(c + i) % len(steps)] for i in range(len(steps))]


def torus_lattice(m: int, n: int) -> GenericLattice:
    """m rows by n columns; h(r,c) = r*n + c points along +c, v(r,c) = m*n + r*n + c along +r."""
    if m < 1 or n < 1:
        raise ValueError("torus needs m, n >= 1")

    def vid(r, c):
        return (r % m) * n + (c % n)

    def h(r, c):
        return (r % m) * n + (c % n)

    def v(r, c):
        return m * n + (r % m) * n + (c % n)

    edges = [None] * (2 * m * n)
    for r in range(m):
        for c in range(n):
            edges[h(r, c)] = (vid(r, c), vid(r, c + 1))
            edges[v(r, c)] = (vid(r, c), vid(r + 1, c))
    faces = []
    for r in range(m):
        for c in range(n):
            faces.append(((h(r, c), True), (v(r, c + 1), True),
                          (h(r + 1, c), False), (v(r, c), False)))
    return GenericLattice(m * n, tuple(edges), tuple(faces), "torus", f"torus:{m}x{n}")


def tetrahedron() -> GenericLattice:
    """Sphere with 4 vertices, 6 edges and 4 triangular faces."""
    edges = ((0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3))
    faces = (((0, True), (4, True), (3, False)),
             ((1, True), (5, True), (4, False)),
             ((2, True), (3, True), (5, False)),
             ((2, False), (1, False), (0, False)))
    return GenericLattice(4, edges, faces, "sphere", "tetrahedron")


def parse_lattice(spec: str) -> GenericLattice:
    if spec == "tetrahedron":
        return tetrahedron()
    if spec.startswith("torus:"):
        m, n = spec.split(":", 1)[1].lower().split("x")
        return torus_lattice(int(m), int(n))
    raise ValueError(f"unknown lattice {spec!r}; use torus:MxN or tetrahedron")


def reverse_edge(lat: GenericLattice, e: int) -> GenericLattice:
    """Same surface with the arrow of edge e flipped."""
    edges = list(lat.edges)
    o, t = edges[e]
    edges[e] = (t, o)
    faces = tuple(tuple((j, (not fw) if j == e else fw) for j, fw in steps) for steps in lat.faces)
    return GenericLattice(lat.n_vertices, tuple(edges), faces, lat.surface, lat.name)
