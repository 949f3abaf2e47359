"""Verification suites for the lattice model against the quantum-double tensors.

Operator identities are compared exactly as sparse matrices when the space is
small, and on seeded random probe vectors otherwise. A nonzero difference of two
operators survives a random complex probe with probability one.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from ..double import DoubleTensors, build_tensors
from ..groups import FiniteGroup
from ..tensor import compare, contract
from .geometry import GenericLattice, Site, reverse_edge
from .operators import LatticeSpace, Monomial, numerical_rank, operator_distance
from .ribbons import (Ribbon, enumerate_ribbons, ribbon_closed_form, ribbon_operators,
                      ribbon_space, triangle_operators)

TOL = 1e-10
MATRIX_LIMIT = 4096
SUITES = ("ground", "ribbon", "identities")

Operator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # 'pass', 'fail' or 'skip'
    residual: float = 0.0
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status != "fail"


def _result(name: str, residual: float, detail: str = "", tol: float = TOL) -> CheckResult:
    return CheckResult(name, "pass" if residual <= tol else "fail", float(residual), detail)


def _skip(name: str, why: str) -> CheckResult:
    return CheckResult(name, "skip", 0.0, why)


class Probe:
    """Seeded random vectors for comparing operators given only their action."""

    def __init__(self, dim: int, seed: int, count: int = 2):
        rng = np.random.default_rng(seed)
        self.vectors = [rng.normal(size=dim) + 1j * rng.normal(size=dim) for _ in range(count)]

    def distance(self, lhs: Operator, rhs: Operator) -> float:
        return max(float(np.abs(lhs(v) - rhs(v)).max()) for v in self.vectors)


def combination(terms) -> Operator:
    """Σ coef · (op_1 op_2 ⋯ v), each term given as (coef, [op_1, op_2, ...])."""
    def act(v):
        out = np.zeros_like(v)
        for coef, ops in terms:
            w = v
            for op in reversed(ops):
                w = op(w)
            out += coef * w
        return out
    return act


# --- lattice bookkeeping ----------------------------------------------------------

def site_cells(lat: GenericLattice, site: Site) -> tuple[int, int]:
    return lat.site_vertex(site), site[0]


def separated(lat: GenericLattice, a: Site, b: Site) -> bool:
    va, fa = site_cells(lat, a)
    vb, fb = site_cells(lat, b)
    return va != vb and fa != fb


def pair_ribbon(lat: GenericLattice, max_len: int = 4) -> Ribbon:
    """The first shortest ribbon whose end sites share neither vertex nor face."""
    for length in range(1, max_len + 1):
        for site in lat.sites():
            for r in enumerate_ribbons(lat, site, length):
                if len(r.moves) == length and separated(lat, r.start, r.end):
                    return r
    raise ValueError(f"{lat.name} has no ribbon joining separated sites")


def _bounding_sets(chain: set[int], cell_edges: list[set[int]]) -> list[set[int]]:
    out = []
    for bits in itertools.product((0, 1), repeat=len(cell_edges)):
        acc: set[int] = set()
        for b, edges in zip(bits, cell_edges):
            if b:
                acc ^= edges
        if acc == chain:
            out.append({c for c, b in enumerate(bits) if b})
    return out


def ribbons_equivalent(t: Ribbon, q: Ribbon) -> bool:
    """Whether q is a deformation of t that sweeps across no endpoint cell.

    The dual-triangle edges of t and q form a closed lattice cycle (mod 2) and the
    direct-triangle edges a closed dual cycle. The ribbons are deformations of each
    other when the first bounds a set of faces and the second a set of vertices,
    neither containing a face or vertex of the end sites.
    """
    lat = t.lattice
    if (t.start, t.end) != (q.start, q.end):
        return False
    cycle: set[int] = set()
    dual_cycle: set[int] = set()
    for r in (t, q):
        for tri in r.triangles:
            (cycle if tri.kind == "dual" else dual_cycle).symmetric_difference_update({tri.edge})
    face_edges = [{e for e, _ in steps} for steps in lat.faces]
    vertex_edges = [{e for e, _ in lat.star(v)} for v in range(lat.n_vertices)]
    (va, fa), (vb, fb) = site_cells(lat, t.start), site_cells(lat, t.end)
    faces_ok = any(fa not in R and fb not in R for R in _bounding_sets(cycle, face_edges))
    verts_ok = any(va not in R and vb not in R for R in _bounding_sets(dual_cycle, vertex_edges))
    return faces_ok and verts_ok


def deformed_partner(t: Ribbon, max_len: int = 6) -> Ribbon | None:
    lat = t.lattice
    for q in enumerate_ribbons(lat, t.start, max_len):
        if q.end == t.end and q.edges != t.edges and ribbons_equivalent(t, q):
            return q
    return None


def inequivalent_partner(t: Ribbon, max_len: int = 6) -> Ribbon | None:
    for q in enumerate_ribbons(t.lattice, t.start, max_len):
        if q.end == t.end and q.edges != t.edges and not ribbons_equivalent(t, q):
            return q
    return None


def expected_ground_dimension(G: FiniteGroup, surface: str) -> int:
    """1 on the sphere; commuting pairs up to simultaneous conjugation on the torus."""
    if surface == "sphere":
        return 1
    if surface != "torus":
        raise ValueError(surface)
    mul, conj = G.mul_table, G.conj_table
    pairs = {(a, b) for a in G.elements for b in G.elements if mul[a, b] == mul[b, a]}
    orbits = 0
    while pairs:
        a, b = pairs.pop()
        orbits += 1
        for g in G.elements:
            pairs.discard((conj[g, a], conj[g, b]))
    return orbits


# --- two-particle space ---------------------------------------------------------

@dataclass
class TwoParticleSpace:
    space: LatticeSpace
    tensors: DoubleTensors
    ribbon: Ribbon
    xi: np.ndarray
    ops: list[Monomial]  # F^k(t) in closed form
    psi: np.ndarray  # columns ψ^k = F^k(t) ξ

    @property
    def gram(self) -> np.ndarray:
        return self.psi.conj().T @ self.psi


def two_particle_space(space: LatticeSpace, ribbon: Ribbon, T: DoubleTensors | None = None,
                       xi: np.ndarray | None = None) -> TwoParticleSpace:
    lat = space.lattice
    if not separated(lat, ribbon.start, ribbon.end):
        raise ValueError("the two sites overlap")
    T = T or build_tensors(space.group)
    if xi is None:
        xi = space.ground_space()[:, 0]
    N = space.N
    ops = [ribbon_closed_form(space, ribbon, k // N, k % N) for k in range(N * N)]
    psi = np.array([op.apply(xi) for op in ops]).T
    return TwoParticleSpace(space, T, ribbon, xi, ops, psi)


# --- suites ------------------------------------------------------------------------

def _exact_or_probe(A, B, probe: Probe, dim: int) -> float:
    if dim <= MATRIX_LIMIT or (isinstance(A, Monomial) and isinstance(B, Monomial)):
        a = A.to_sparse() if isinstance(A, Monomial) else A
        b = B.to_sparse() if isinstance(B, Monomial) else B
        return operator_distance(a, b)
    return probe.distance(A.apply, B.apply)


def ground_suite(space: LatticeSpace, seed: int = 0) -> list[CheckResult]:
    G, lat = space.group, space.lattice
    out = []
    ground = space.ground_space()
    want = expected_ground_dimension(G, lat.surface)
    rank = numerical_rank(ground, 1e-9)
    out.append(CheckResult("ground-dimension", "pass" if rank == want else "fail",
                           float(abs(rank - want)), f"rank {rank}, expected {want}"))
    res = 0.0
    for v in ground.T:
        res = max(res, float(np.abs(space.project_constraints(v) - v).max()))
        for p in range(len(lat.faces)):
            res = max(res, float(np.abs(space.B_h(space.face_site(p), 0).apply(v) - v).max()))
    out.append(_result("ground-invariance", res, "every A(s) and B(p) fixes the ground basis"))

    v0 = 0
    res = 0.0
    for f in G.elements:
        for g in G.elements:
            res = max(res, operator_distance((space.A_g(v0, f) @ space.A_g(v0, g)).to_sparse(),
                                             space.A_g(v0, G.mul(f, g)).to_sparse()))
    out.append(_result("gauge-multiplication", res, f"vertex {v0}"))

    site = (0, 0)
    s = lat.site_vertex(site)
    res = 0.0
    for g in G.elements:
        for h in G.elements:
            lhs = space.A_g(s, g) @ space.B_h(site, h)
            rhs = space.B_h(site, G.conj(g, h)) @ space.A_g(s, g)
            res = max(res, operator_distance(lhs.to_sparse(), rhs.to_sparse()))
    out.append(_result("gauge-flux-commutation", res, f"site {site}"))

    total = sum(space.B_h(site, h).coef for h in G.elements)
    out.append(_result("flux-resolution", float(np.abs(total - 1).max())))

    A = [space.A_projector(v) for v in range(lat.n_vertices)]
    B = [space.B_projector(space.face_site(p)) for p in range(len(lat.faces))]
    res = max(operator_distance(P @ P, P) for P in A + B)
    out.append(_result("projector-idempotence", res))
    res = max(operator_distance(P @ Q, Q @ P) for P in A for Q in B + A)
    out.append(_result("projector-commutation", res))

    if space.dim <= MATRIX_LIMIT:
        H = space.hamiltonian().toarray()
        ev = np.linalg.eigvalsh(H)
        res = float(np.abs(ev - np.round(ev)).max())
        nonneg = ev.min() > -1e-9
        out.append(CheckResult("hamiltonian-spectrum", "pass" if res < 1e-9 and nonneg else "fail",
                               res, f"levels {sorted(set(int(x) for x in np.round(ev)))}"))
    else:
        out.append(_skip("hamiltonian-spectrum", f"{space.dim} amplitudes exceed {MATRIX_LIMIT}"))

    out.append(edge_reversal_check(space))
    return out


def reversal_map(space: LatticeSpace, edge: int) -> Monomial:
    """|z⟩ ↦ |z'⟩ with the label of one edge inverted."""
    d = space.digits.copy()
    j = space.pos[edge]
    d[:, j] = space.group.inv_table[d[:, j]]
    return Monomial(d @ space.strides, np.ones(space.dim, complex))


def edge_reversal_check(space: LatticeSpace, edge: int = 0) -> CheckResult:
    """Flipping an arrow and inverting its label leaves every A_g and B_h unchanged."""
    G, lat = space.group, space.lattice
    flipped = LatticeSpace(G, reverse_edge(lat, edge), space.edges)
    U = reversal_map(space, edge)
    res = 0.0
    for s in range(lat.n_vertices):
        for g in G.elements:
            res = max(res, operator_distance((U @ space.A_g(s, g) @ U).to_sparse(),
                                             flipped.A_g(s, g).to_sparse()))
    for site in lat.sites():
        for h in G.elements:
            res = max(res, operator_distance((U @ space.B_h(site, h) @ U).to_sparse(),
                                             flipped.B_h(site, h).to_sparse()))
    return _result("edge-reversal", res, f"edge {edge}")


def straight_ribbon(lat: GenericLattice, longest: int = 6) -> Ribbon | None:
    """The longest alternating L,T,L,... ribbon (at least 3 triangles) on the lattice."""
    for length in range(longest, 2, -1):
        moves = ("LT" * length)[:length]
        for site in lat.sites():
            try:
                return Ribbon(lat, site, moves)
            except ValueError:
                continue
    return None


def _orient_straight(r: Ribbon) -> Ribbon:
    """Reverse arrows so dual triangles see their face on the left and L acts at terminals."""
    lat = r.lattice
    for tri in r.triangles:
        if (tri.kind == "dual" and tri.side == "right") or \
                (tri.kind == "direct" and tri.end == "origin"):
            lat = reverse_edge(lat, tri.edge)
    return Ribbon(lat, r.start, r.moves)


def straight_formula(space: LatticeSpace, r: Ribbon, h: int, g: int) -> Monomial:
    """δ_{g, x1 x2 ⋯} with y_i ↦ (x1⋯x_{i-1})⁻¹ h (x1⋯x_{i-1}) y_i, written out literally."""
    G = space.group
    ys = [space.pos[t.edge] for t in r.triangles if t.kind == "direct"]
    xs = [space.pos[t.edge] for t in r.triangles if t.kind == "dual"]
    targets = np.empty(space.dim, dtype=np.int64)
    coef = np.zeros(space.dim, complex)
    for z in range(space.dim):
        labels = [int(x) for x in space.digits[z]]
        prod = G.product(*(labels[j] for j in xs))
        coef[z] = 1.0 if prod == g else 0.0
        prefix = 0
        for i, j in enumerate(ys):
            labels[j] = G.mul(G.mul(G.mul(G.inv(prefix), h), prefix), labels[j])
            if i < len(xs):
                prefix = G.mul(prefix, labels[xs[i]])
        targets[z] = space.basis_index(labels)
    return Monomial(targets, coef)


def ribbon_suite(space: LatticeSpace, T: DoubleTensors | None = None, seed: int = 0,
                 max_len: int = 3) -> list[CheckResult]:
    G, lat = space.group, space.lattice
    T = T or build_tensors(G)
    N = G.order
    out = []

    res = 0.0
    count = 0
    for site in lat.sites()[:2]:
        for r in enumerate_ribbons(lat, site, max_len):
            sub = ribbon_space(G, r)
            composed = ribbon_operators(sub, r, T)
            for k in range(N * N):
                closed = ribbon_closed_form(sub, r, k // N, k % N).to_sparse()
                res = max(res, operator_distance(composed[k], closed))
            count += 1
    out.append(_result("closed-form-composition", res, f"{count} ribbons"))

    r = straight_ribbon(lat)
    if r is None:
        out.append(_skip("straight-ribbon-formula", "no alternating ribbon of length 3"))
    else:
        r = _orient_straight(r)
        sub = ribbon_space(G, r)
        composed = ribbon_operators(sub, r, T)
        res = max(operator_distance(composed[k], straight_formula(sub, r, k // N, k % N).to_sparse())
                  for k in range(N * N))
        out.append(_result("straight-ribbon-formula", res, f"{r.moves} from {r.start}"))

    tri_ops = triangle_operators(space, Ribbon(lat, (0, 0), "L").triangles[0])
    nonzero = [k for k in range(N * N) if k % N != 0 and tri_ops[k] is not None]
    out.append(CheckResult("direct-triangle-vanishes", "fail" if nonzero else "pass",
                           float(len(nonzero))))

    res = 0.0
    for r in enumerate_ribbons(lat, (0, 0), max_len):
        if len(r.moves) < 2:
            continue
        sub = ribbon_space(G, r)
        for i in range(1, len(r.moves)):
            head, tail = r.split(i)
            whole = [ribbon_closed_form(sub, r, k // N, k % N).to_sparse() for k in range(N * N)]
            a = [ribbon_closed_form(sub, head, k // N, k % N).to_sparse() for k in range(N * N)]
            b = [ribbon_closed_form(sub, tail, k // N, k % N).to_sparse() for k in range(N * N)]
            acc = [sp.csr_matrix((sub.dim, sub.dim), dtype=complex) for _ in range(N * N)]
            for (k, m, n), v in zip(T.omega.coords, T.omega.values):
                acc[k] = acc[k] + v * (a[m] @ b[n])
            res = max(res, max(operator_distance(x, y) for x, y in zip(whole, acc)))
    out.append(_result("concatenation", res))

    t = pair_ribbon(lat)
    probe = Probe(space.dim, seed)
    ends_v = {lat.site_vertex(t.start), lat.site_vertex(t.end)}
    ends_f = {t.start[0], t.end[0]}
    res = 0.0
    for k in range(N * N):
        F = ribbon_closed_form(space, t, k // N, k % N)
        for v in range(lat.n_vertices):
            if v not in ends_v:
                res = max(res, probe.distance(lambda x: F.apply(space.apply_A_projector(x, v)),
                                              lambda x: space.apply_A_projector(F.apply(x), v)))
        for p in range(len(lat.faces)):
            if p not in ends_f:
                B = space.B_h(space.face_site(p), 0)
                res = max(res, _exact_or_probe(F @ B, B @ F, probe, space.dim))
    out.append(_result("ribbon-locality", res, f"{t.moves} from {t.start}"))

    res = 0.0
    sub = ribbon_space(G, t)
    s = lat.site_vertex(t.start)
    local = LatticeSpace(G, lat, {e for e, _ in lat.star(s)} | {e for e, _ in lat.faces[t.start[0]]})
    for h in G.elements:
        for g in G.elements:
            F = ribbon_closed_form(sub, t, h, g).to_sparse()
            Fd = ribbon_closed_form(sub, t, G.inv(h), g).to_sparse()
            res = max(res, operator_distance(F.conj().T, Fd))
            D = local.D(t.start, h, g).to_sparse()
            Dd = local.D(t.start, G.conj(G.inv(g), h), G.inv(g)).to_sparse()
            res = max(res, operator_distance(D.conj().T, Dd))
    out.append(_result("hermitian-structure", res))
    return out


def commutation_tensors(T: DoubleTensors) -> dict[str, object]:
    return {
        "start": contract("ik,nij,mkl->mnjl", T.R, T.omega, T.omega),
        "end": contract("nij,mkl,jl->mnik", T.omega, T.omega, T.R_bar),
        "start-reversed": contract("ik,jin,lkm->jlmn", T.R_bar, T.omega, T.omega),
        "local-start": contract("jki,mkl->mijl", T.lam, T.omega),
        "local-end": contract("mlk,kji->milj", T.omega, T.lam),
    }


def _grouped(W) -> dict[tuple[int, int], list[tuple[int, int, complex]]]:
    out = defaultdict(list)
    for (m, n, x, y), v in zip(W.coords, W.values):
        out[(int(m), int(n))].append((int(x), int(y), complex(v)))
    return out


def crossing_pairs(lat: GenericLattice, max_len: int = 2):
    """Ribbon pairs meeting at one site on exactly one shared edge.

    'start': t begins with a dual triangle and q with a direct triangle on the
    same edge. 'end': t ends with a dual triangle and q with a direct triangle.
    """
    ribs = [r for site in lat.sites() for r in enumerate_ribbons(lat, site, max_len)]
    found = {}
    for t in ribs:
        for q in ribs:
            shared = t.edges & q.edges
            if len(shared) != 1:
                continue
            if "start" not in found and t.start == q.start and t.end != q.end \
                    and t.moves[0] == "T" and q.moves[0] == "L" \
                    and shared == {t.triangles[0].edge}:
                found["start"] = (t, q)
            if "end" not in found and t.end == q.end and t.start != q.start \
                    and t.moves[-1] == "T" and q.moves[-1] == "L" \
                    and shared == {t.triangles[-1].edge}:
                found["end"] = (t, q)
        if len(found) == 2:
            break
    return found


def _pair_commutation(G, T, t: Ribbon, q: Ribbon, W, reversed_order: bool) -> float:
    N = G.order
    sub = LatticeSpace(G, t.lattice, sorted(t.edges | q.edges))
    Ft = [ribbon_closed_form(sub, t, k // N, k % N) for k in range(N * N)]
    Fq = [ribbon_closed_form(sub, q, k // N, k % N) for k in range(N * N)]
    terms = _grouped(W)
    probe = Probe(sub.dim, 0, count=1)
    res = 0.0
    for m in range(N * N):
        for n in range(N * N):
            if reversed_order:
                lhs = Fq[m] @ Ft[n]
                rhs = combination([(c, [Ft[x].apply, Fq[y].apply]) for x, y, c in terms[(m, n)]])
            else:
                lhs = Ft[m] @ Fq[n]
                rhs = combination([(c, [Fq[x].apply, Ft[y].apply]) for x, y, c in terms[(m, n)]])
            res = max(res, probe.distance(lhs.apply, rhs))
    return res


def identities_suite(space: LatticeSpace, T: DoubleTensors | None = None, seed: int = 0
                     ) -> list[CheckResult]:
    G, lat = space.group, space.lattice
    T = T or build_tensors(G)
    N = G.order
    n2 = N * N
    out = []
    W = commutation_tensors(T)

    pairs = crossing_pairs(lat)
    for key, label, tensor, rev in (("start", "ribbon-commutation-start", W["start"], False),
                                    ("end", "ribbon-commutation-end", W["end"], False),
                                    ("start", "ribbon-commutation-inverse", W["start-reversed"], True)):
        if key not in pairs:
            out.append(_skip(label, "no ribbon pair in this configuration"))
            continue
        t, q = pairs[key]
        res = _pair_commutation(G, T, t, q, tensor, rev)
        out.append(_result(label, res, f"t={t.moves}@{t.start} q={q.moves}@{q.start}"))
    composed = contract("mnjl,jlab->mnab", W["start"], W["start-reversed"])
    ident = contract("ma,nb->mnab", T.delta, T.delta)
    out.append(_result("braiding-inverse", compare(composed, ident)[0]))

    t = pair_ribbon(lat)
    a, b = t.start, t.end
    probe = Probe(space.dim, seed)
    Fl = [ribbon_closed_form(space, t, k // N, k % N) for k in range(n2)]
    Da = [space.D(a, k // N, k % N) for k in range(n2)]
    Db = [space.D(b, k // N, k % N) for k in range(n2)]
    res = 0.0
    for (m, i), terms in _grouped(W["local-start"]).items():
        rhs = combination([(c, [Da[j].apply, Fl[l].apply]) for j, l, c in terms])
        res = max(res, probe.distance((Fl[m] @ Da[i]).apply, rhs))
    out.append(_result("local-ribbon-start", res, f"site {a}"))
    res = 0.0
    for (m, i), terms in _grouped(W["local-end"]).items():
        rhs = combination([(c, [Fl[l].apply, Db[j].apply]) for l, j, c in terms])
        res = max(res, probe.distance((Db[i] @ Fl[m]).apply, rhs))
    out.append(_result("local-ribbon-end", res, f"site {b}"))

    C_a = lambda v: space.apply_A_projector(space.B_h(a, 0).apply(v), lat.site_vertex(a))
    C_b = lambda v: space.apply_A_projector(space.B_h(b, 0).apply(v), lat.site_vertex(b))
    Wa = contract("s,smp,pq->mq", T.tau, T.omega, T.S)
    Wb = contract("s,spm,pq->mq", T.tau, T.omega, T.S)
    for name, Wt, C, first_is_m in (("charge-projection-start", Wa, C_a, True),
                                     ("charge-projection-end", Wb, C_b, False)):
        if first_is_m:
            terms = [(v, [Fl[m].apply, C, Fl[q].apply]) for (m, q), v in zip(Wt.coords, Wt.values)]
        else:
            terms = [(v, [Fl[q].apply, C, Fl[m].apply]) for (m, q), v in zip(Wt.coords, Wt.values)]
        res = probe.distance(combination(terms), lambda v: v / N ** 2)
        out.append(_result(name, res))

    tp = two_particle_space(space, t, T)
    res = float(np.abs(tp.gram - np.eye(n2) / N).max())
    out.append(_result("gram-matrix", res, f"ribbon {t.moves} from {a} to {b}"))
    rank = numerical_rank(tp.psi)
    out.append(CheckResult("two-particle-rank", "pass" if rank == n2 else "fail",
                           float(abs(rank - n2)), f"rank {rank} of {n2}"))
    out.extend(_representation_checks(tp, Da, Db))
    if lat.surface == "sphere":
        va, fa = site_cells(lat, a)
        vb, fb = site_cells(lat, b)
        labels, count = space.gauge_orbits(skip_vertices=(va, vb), skip_faces=(fa, fb))
        _, inside = space.orbit_coordinates(tp.psi, labels, count)
        ok = count == n2 and inside <= 1e-9
        out.append(CheckResult("two-particle-space", "pass" if ok else "fail", inside,
                               f"dim {count}, expected {n2}"))
        out.append(homotopy_check(space, tp.xi, T))
        out.append(tree_basis_check(space, tp.xi))
    else:
        out.append(_skip("two-particle-space", "dimension count needs a sphere"))
        out.append(_skip("homotopy-invariance", "deformations checked on a sphere"))
        out.append(_skip("tree-basis", "dimension count needs a sphere"))
    return out


def _representation_checks(tp: TwoParticleSpace, Da, Db) -> list[CheckResult]:
    T = tp.tensors
    n2 = T.size
    psi = tp.psi
    res_d = res_f = res_e = 0.0
    omega_by_k = defaultdict(list)
    for (k, m, n), v in zip(T.omega.coords, T.omega.values):
        omega_by_k[int(k)].append((int(m), int(n), complex(v)))
    lam_by_jk = defaultdict(list)
    for (j, k, m), v in zip(T.lam.coords, T.lam.values):
        lam_by_jk[(int(j), int(k))].append((int(m), complex(v)))
    st = {int(n): (int(j), complex(v)) for (n, j), v in zip(T.S_tilde.coords, T.S_tilde.values)}
    for k in range(n2):
        for j in range(n2):
            want = np.zeros(len(psi), complex)
            for n, m, v in omega_by_k[k]:
                jj, s = st[n]
                if jj == j:
                    want += s * v * psi[:, m]
            res_d = max(res_d, float(np.abs(Da[j].apply(psi[:, k]) - want).max()))
            want = np.zeros(len(psi), complex)
            for m, v in lam_by_jk[(j, k)]:
                want += v * psi[:, m]
            res_f = max(res_f, float(np.abs(tp.ops[j].apply(psi[:, k]) - want).max()))
            want = np.zeros(len(psi), complex)
            for m, jj, v in omega_by_k[k]:
                if jj == j:
                    want += v * psi[:, m]
            res_e = max(res_e, float(np.abs(Db[j].apply(psi[:, k]) - want).max()))
    return [_result("local-action-start", res_d), _result("ribbon-action", res_f),
            _result("local-action-end", res_e)]


def homotopy_check(space: LatticeSpace, xi: np.ndarray, T: DoubleTensors) -> CheckResult:
    """A ribbon and a deformation of it act alike on L(a, b) but differ as matrices."""
    lat = space.lattice
    found = None
    for site in lat.sites():
        for t in enumerate_ribbons(lat, site, 3):
            if separated(lat, t.start, t.end):
                q = deformed_partner(t)
                if q is not None:
                    found = (t, q)
                    break
        if found:
            break
    if found is None:
        return _skip("homotopy-invariance", "no deformed ribbon with the same ends")
    t, q = found
    tp = two_particle_space(space, t, T, xi)
    N = space.N
    Fq = [ribbon_closed_form(space, q, k // N, k % N) for k in range(N * N)]
    on_L = max(float(np.abs(Fq[k].apply(tp.psi[:, m]) - tp.ops[k].apply(tp.psi[:, m])).max())
               for k in range(N * N) for m in range(N * N))
    raw = max(operator_distance(Fq[k].to_sparse(), tp.ops[k].to_sparse()) for k in range(N * N))
    ok = on_L <= TOL and raw > 0.5
    return CheckResult("homotopy-invariance", "pass" if ok else "fail", on_L,
                       f"{t.moves} vs {q.moves} from {t.start}: raw difference {raw:.3g}")


def tree_basis_check(space: LatticeSpace, xi: np.ndarray) -> CheckResult:
    """Three particles joined by two ribbons span N⁴ states inside L(x1, x2, x3)."""
    lat = space.lattice
    N = space.N
    found = None
    for t1 in (r for s in lat.sites() for r in enumerate_ribbons(lat, s, 3)):
        if not separated(lat, t1.start, t1.end):
            continue
        for t2 in enumerate_ribbons(lat, t1.end, 3):
            sites = (t1.start, t1.end, t2.end)
            cells_v = {lat.site_vertex(x) for x in sites}
            cells_f = {x[0] for x in sites}
            if len(cells_v) == 3 and len(cells_f) == 3 and not (t1.edges & t2.edges):
                found = (t1, t2)
                break
        if found:
            break
    if found is None:
        return _skip("tree-basis", "no pair of disjoint ribbons through three separated sites")
    t1, t2 = found
    F1 = [ribbon_closed_form(space, t1, k // N, k % N) for k in range(N * N)]
    F2 = [ribbon_closed_form(space, t2, k // N, k % N) for k in range(N * N)]
    sites = (t1.start, t1.end, t2.end)
    labels, count = space.gauge_orbits(skip_vertices=tuple(lat.site_vertex(x) for x in sites),
                                       skip_faces=tuple(x[0] for x in sites))
    want = N ** 4
    coords = np.zeros((count, want), complex)
    leftover = 0.0
    for i in range(N * N):
        block = np.array([F1[i].apply(F2[j].apply(xi)) for j in range(N * N)]).T
        c, left = space.orbit_coordinates(block, labels, count)
        coords[:, i * N * N:(i + 1) * N * N] = c
        leftover = max(leftover, left)
    rank = numerical_rank(coords)
    ok = rank == want and count == want and leftover <= 1e-9
    return CheckResult("tree-basis", "pass" if ok else "fail", leftover,
                       f"span {rank}, constrained dim {count}, expected {want}")


def run_suite(group: FiniteGroup, lattice: GenericLattice, suite: str = "all", seed: int = 0
              ) -> list[CheckResult]:
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    space = LatticeSpace(group, lattice)
    T = build_tensors(group)
    out = []
    if suite in ("all", "ground"):
        out += ground_suite(space, seed)
    if suite in ("all", "ribbon"):
        out += ribbon_suite(space, T, seed)
    if suite in ("all", "identities"):
        out += identities_suite(space, T, seed)
    return out
