"""Structure tensors of the quantum double D(G), axiom verification and irreps.

A DoubleIndex (h, g) is flattened to the integer h*N + g. Tensors follow the
index placement of the defining formulas: for Ω^k_{mn} the coordinates are
(k, m, n), for Λ^{mn}_k they are (m, n, k), S^m_k is (m, k), R^{ik} is (i, k).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .groups import ConjugacyClass, FiniteGroup, centralizer
from .tensor import SparseTensor, compare, contract

EXHAUSTIVE_ORDER_LIMIT = 8
SAMPLE_TARGET = 1_000_000


@dataclass(frozen=True)
class DoubleIndex:
    h: int
    g: int

    def flat(self, N: int) -> int:
        return self.h * N + self.g

    @classmethod
    def unflat(cls, k: int, N: int) -> "DoubleIndex":
        return cls(*divmod(int(k), N))


@dataclass(frozen=True)
class DoubleTensors:
    group: FiniteGroup
    omega: SparseTensor  # Ω^k_{mn}: product in D
    lam: SparseTensor  # Λ^{mn}_k: product in F, coproduct in D
    eps: SparseTensor  # ε_k
    unit: SparseTensor  # e^k
    S: SparseTensor  # S^m_k
    S_tilde: SparseTensor
    R: SparseTensor  # R^{ik}
    R_bar: SparseTensor
    c: SparseTensor  # c^k
    tau: SparseTensor  # τ_k
    delta: SparseTensor

    @property
    def N(self) -> int:
        return self.group.order

    @property
    def size(self) -> int:
        return self.N ** 2

    def idx(self, h: int, g: int) -> int:
        return h * self.N + g

    def pair(self, k: int) -> tuple[int, int]:
        return divmod(int(k), self.N)


def build_tensors(G: FiniteGroup) -> DoubleTensors:
    N = G.order
    size = N * N
    mul, inv = G.mul_table, G.inv_table
    e = np.arange(N)

    def T(coords, values=1.0):
        return SparseTensor.from_arrays(np.stack(coords, axis=1), values, size)

    # Ω^{(h,g)}_{(h1,g1)(h2,g2)} = δ_{h1, g1 h2 g1⁻¹} δ_{h,h1} δ_{g, g1 g2}
    h2, g1, g2 = (a.ravel() for a in np.meshgrid(e, e, e, indexing="ij"))
    h1 = mul[mul[g1, h2], inv[g1]]
    omega = T([h1 * N + mul[g1, g2], h1 * N + g1, h2 * N + g2])

    # Λ^{(h1,g1)(h2,g2)}_{(h,g)} = δ_{h1 h2, h} δ_{g1,g} δ_{g2,g}
    a1, a2, g = (a.ravel() for a in np.meshgrid(e, e, e, indexing="ij"))
    lam = T([a1 * N + g, a2 * N + g, mul[a1, a2] * N + g])

    eps = T([e])  # ε_{(h,g)} = δ_{h,1}, i.e. flat indices 0*N + g
    unit = T([e * N])  # e^{(h,g)} = δ_{g,1}

    # S^{(h1,g1)}_{(h2,g2)} = δ_{g1⁻¹ h1 g1, h2⁻¹} δ_{g1, g2⁻¹}
    hh, gg = (a.ravel() for a in np.meshgrid(e, e, indexing="ij"))
    gi = inv[gg]
    S = T([mul[mul[gi, inv[hh]], gg] * N + gi, hh * N + gg])
    S_tilde = inverse_matrix_tensor(S)

    # R^{(h,g)(v,u)} = δ_{h,u} δ_{g,1};  R̄ has δ_{h⁻¹,u}
    R = T([hh * N, gg * N + hh])
    R_bar = T([hh * N, gg * N + inv[hh]])

    c = SparseTensor.from_arrays(e[:, None], 1.0 / N, size)
    tau = SparseTensor.from_arrays((e * N)[:, None], 1.0 / N, size)
    idx = np.arange(size)
    delta = T([idx, idx])
    return DoubleTensors(G, omega, lam, eps, unit, S, S_tilde, R, R_bar, c, tau, delta)


def inverse_matrix_tensor(M: SparseTensor) -> SparseTensor:
    """Inverse of a 2-slot tensor that is a monomial (generalized permutation) matrix."""
    rows, cols = M.coords[:, 0], M.coords[:, 1]
    if len(np.unique(rows)) != M.size or len(np.unique(cols)) != M.size or M.nnz != M.size:
        raise ValueError("tensor is not an invertible monomial matrix")
    return SparseTensor.from_arrays(np.stack([cols, rows], axis=1), 1.0 / M.values, M.size)


# --- axioms ---------------------------------------------------------------------

@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    passed: bool
    residual: float
    counterexample: tuple | None = None
    exhaustive: bool = True
    tuples_checked: int = 0
    description: str = ""


@dataclass(frozen=True)
class Identity:
    axiom: str
    description: str
    lhs: str
    lhs_ops: tuple[str, ...]
    rhs: str
    rhs_ops: tuple[str, ...]

    @property
    def free(self) -> str:
        return self.lhs.split("->")[1]


IDENTITIES = (
    Identity("assoc", "Λ^{lm}_i Λ^{in}_k = Λ^{lj}_k Λ^{mn}_j",
             "lmi,ink->lmnk", ("lam", "lam"), "ljk,mnj->lmnk", ("lam", "lam")),
    Identity("unit-left", "ε_i Λ^{im}_k = δ^m_k", "i,imk->mk", ("eps", "lam"),
             "mk->mk", ("delta",)),
    Identity("unit-right", "Λ^{mj}_k ε_j = δ^m_k", "mjk,j->mk", ("lam", "eps"),
             "mk->mk", ("delta",)),
    Identity("coassoc", "Ω^i_{lm} Ω^k_{in} = Ω^k_{lj} Ω^j_{mn}",
             "ilm,kin->klmn", ("omega", "omega"), "klj,jmn->klmn", ("omega", "omega")),
    Identity("counit-left", "e^i Ω^k_{im} = δ^k_m", "i,kim->km", ("unit", "omega"),
             "km->km", ("delta",)),
    Identity("counit-right", "Ω^k_{mj} e^j = δ^k_m", "kmj,j->km", ("omega", "unit"),
             "km->km", ("delta",)),
    Identity("bialgebra", "Λ^{lm}_q Ω^q_{kn} = Ω^l_{ij} Ω^m_{rs} Λ^{ir}_k Λ^{js}_n",
             "lmq,qkn->lmkn", ("lam", "omega"),
             "lij,irk,mrs,jsn->lmkn", ("omega", "lam", "omega", "lam")),
    Identity("bialgebra-counit", "ε_q Ω^q_{kn} = ε_k ε_n", "q,qkn->kn", ("eps", "omega"),
             "k,n->kn", ("eps", "eps")),
    Identity("bialgebra-unit", "Λ^{lm}_q e^q = e^l e^m", "lmq,q->lm", ("lam", "unit"),
             "l,m->lm", ("unit", "unit")),
    Identity("antipode-left", "S^k_l Λ^{lm}_p Ω^q_{km} = ε_p e^q",
             "kl,lmp,qkm->pq", ("S", "lam", "omega"), "p,q->pq", ("eps", "unit")),
    Identity("antipode-right", "Λ^{lm}_p Ω^q_{ln} S^n_m = ε_p e^q",
             "lmp,qln,nm->pq", ("lam", "omega", "S"), "p,q->pq", ("eps", "unit")),
    Identity("antipode-antimult", "S^i_l S^j_m Λ^{lm}_p = Λ^{ji}_q S^q_p",
             "il,jm,lmp->ijp", ("S", "S", "lam"), "jiq,qp->ijp", ("lam", "S")),
    Identity("antipode-anticomult", "S^p_q Ω^q_{ij} = Ω^p_{ml} S^m_j S^l_i",
             "pq,qij->pij", ("S", "omega"), "pml,mj,li->pij", ("omega", "S", "S")),
    Identity("antipode-counit", "ε_m S^m_k = ε_k", "m,mk->k", ("eps", "S"),
             "k->k", ("eps",)),
    Identity("antipode-unit", "S^m_k e^k = e^m", "mk,k->m", ("S", "unit"),
             "m->m", ("unit",)),
    Identity("skew-inverse-left", "S̃^m_i S^i_n = δ^m_n", "mi,in->mn", ("S_tilde", "S"),
             "mn->mn", ("delta",)),
    Identity("skew-inverse-right", "S^m_j S̃^j_n = δ^m_n", "mj,jn->mn", ("S", "S_tilde"),
             "mn->mn", ("delta",)),
    Identity("skew-left", "S̃^n_l Λ^{lm}_p Ω^q_{mn} = ε_p e^q",
             "nl,lmp,qmn->pq", ("S_tilde", "lam", "omega"), "p,q->pq", ("eps", "unit")),
    Identity("skew-right", "Λ^{lm}_p Ω^q_{kl} S̃^k_m = ε_p e^q",
             "lmp,qkl,km->pq", ("lam", "omega", "S_tilde"), "p,q->pq", ("eps", "unit")),
    Identity("skew-antimult", "S̃^i_l S̃^j_m Λ^{lm}_p = Λ^{ji}_q S̃^q_p",
             "il,jm,lmp->ijp", ("S_tilde", "S_tilde", "lam"), "jiq,qp->ijp", ("lam", "S_tilde")),
    Identity("skew-anticomult", "S̃^p_q Ω^q_{ij} = Ω^p_{ml} S̃^m_j S̃^l_i",
             "pq,qij->pij", ("S_tilde", "omega"),
             "pml,mj,li->pij", ("omega", "S_tilde", "S_tilde")),
    Identity("skew-equals-antipode", "S̃^m_k = S^m_k", "mk->mk", ("S_tilde",),
             "mk->mk", ("S",)),
    Identity("R-coproduct-left", "Λ^{ij}_k R^{km} = R^{il} R^{jn} Ω^m_{ln}",
             "ijk,km->ijm", ("lam", "R"), "il,jn,mln->ijm", ("R", "R", "omega")),
    Identity("R-coproduct-right", "R^{mk} Λ^{ji}_k = Ω^m_{ln} R^{li} R^{nj}",
             "mk,jik->mji", ("R", "lam"), "mln,li,nj->mji", ("omega", "R", "R")),
    Identity("R-braiding", "Λ^{ji}_k = Ω^i_{lmr} Ω^j_{pns} R^{lp} Λ^{mn}_k R̄^{rs}",
             "jik->ijk", ("lam",),
             "ilu,umr,lp,jpv,vns,mnk,rs->ijk",
             ("omega", "omega", "R", "omega", "omega", "lam", "R_bar")),
    Identity("R-inverse-left", "R̄^{ik} Ω^n_{ij} Ω^m_{kl} R^{jl} = e^n e^m",
             "ik,nij,mkl,jl->nm", ("R_bar", "omega", "omega", "R"), "n,m->nm", ("unit", "unit")),
    Identity("R-inverse-right", "R^{ik} Ω^n_{ij} Ω^m_{kl} R̄^{jl} = e^n e^m",
             "ik,nij,mkl,jl->nm", ("R", "omega", "omega", "R_bar"), "n,m->nm", ("unit", "unit")),
    Identity("duality", "Λ^{mn}_k read as coproduct of D equals the product of F",
             "mnk->mnk", ("lam",), "mnk->mnk", ("coproduct",)),
)


def coproduct_tensor(T: DoubleTensors) -> SparseTensor:
    """Δ(D_k) = Σ coeff D_m ⊗ D_n written as a tensor (m, n, k), built term by term."""
    coords, values = [], []
    for k in range(T.size):
        for (m, n), coeff in comultiply_double(T, k):
            coords.append((m, n, k))
            values.append(coeff)
    return SparseTensor.from_arrays(np.array(coords), np.array(values), T.size)


def _sample_restriction(free: str, size: int, rng: np.random.Generator,
                        target: int = SAMPLE_TARGET) -> dict[str, np.ndarray]:
    sizes = {ch: size for ch in free}
    if size ** len(free) <= target:
        return {}
    for ch in free:
        others = math.prod(sizes.values()) // sizes[ch]
        sizes[ch] = min(size, max(1, math.ceil(target / others)))
    return {ch: np.sort(rng.choice(size, sizes[ch], replace=False))
            for ch in free if sizes[ch] < size}


def _check(identity: Identity, operands: dict, size: int, restrict: dict) -> AxiomReport:
    lhs = contract(identity.lhs, *(operands[o] for o in identity.lhs_ops), restrict=restrict)
    rhs = contract(identity.rhs, *(operands[o] for o in identity.rhs_ops), restrict=restrict)
    residual, where = compare(lhs, rhs)
    covered = math.prod(len(restrict[ch]) if ch in restrict else size for ch in identity.free)
    return AxiomReport(identity.axiom, residual == 0.0, residual, where,
                       exhaustive=not restrict, tuples_checked=covered,
                       description=identity.description)


def verify_axioms(T: DoubleTensors, seed: int | None = 0, exhaustive: bool | None = None,
                  only: list[str] | None = None, workers: int = 1) -> list[AxiomReport]:
    """Check every Hopf, antipode, skew-antipode and R-matrix identity.

    Exhaustive for |G| <= 8 unless told otherwise; larger groups restrict the
    free indices to seeded random subsets covering at least 10⁶ tuples, one
    stream per identity so the result does not depend on `workers`.
    Counterexamples are reported as tuples of (h, g) pairs.
    """
    if exhaustive is None:
        exhaustive = T.N <= EXHAUSTIVE_ORDER_LIMIT
    if not exhaustive and seed is None:
        raise ValueError("sampled verification needs a seed")
    operands = {name: getattr(T, name) for name in
                ("omega", "lam", "eps", "unit", "S", "S_tilde", "R", "R_bar", "delta")}
    operands["coproduct"] = coproduct_tensor(T)
    chosen = [(n, idn) for n, idn in enumerate(IDENTITIES) if not only or idn.axiom in only]

    def one(job):
        n, identity = job
        restrict = {}
        if not exhaustive:
            rng = np.random.default_rng(np.random.SeedSequence([seed, n]))
            restrict = _sample_restriction(identity.free, T.size, rng)
        rep = _check(identity, operands, T.size, restrict)
        if rep.counterexample is not None:
            rep = replace(rep, counterexample=tuple(T.pair(k) for k in rep.counterexample))
        return rep

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, chosen))
    return [one(job) for job in chosen]


# --- special elements -------------------------------------------------------------

@dataclass(frozen=True)
class SpecialElementReport:
    checks: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v < 1e-12 for v in self.checks.values())


def special_elements(T: DoubleTensors):
    """Return (c, τ) with residuals of their defining properties."""
    checks = {}

    def diff(a, b):
        return compare(a, b)[0]

    checks["omega-c-left"] = diff(contract("kmn,m->kn", T.omega, T.c),
                                  contract("n,k->kn", T.eps, T.c))
    checks["omega-c-right"] = diff(contract("kmn,n->km", T.omega, T.c),
                                   contract("m,k->km", T.eps, T.c))
    checks["eps-c"] = abs(contract("k,k->", T.eps, T.c).scalar() - 1)
    checks["lam-tau-left"] = diff(contract("mnk,m->nk", T.lam, T.tau),
                                  contract("n,k->nk", T.unit, T.tau))
    checks["lam-tau-right"] = diff(contract("mnk,n->mk", T.lam, T.tau),
                                   contract("m,k->mk", T.unit, T.tau))
    checks["unit-tau"] = abs(contract("k,k->", T.unit, T.tau).scalar() - 1)
    checks["tau-c"] = abs(contract("k,k->", T.tau, T.c).scalar() - 1 / T.N ** 2)
    return T.c, T.tau, SpecialElementReport(checks)


# --- representations ---------------------------------------------------------------

@dataclass(frozen=True)
class DoubleIrrepLabel:
    magnetic_class: ConjugacyClass
    electric_row: int
    dim: int
    centralizer_order: int


def double_irreps(G: FiniteGroup) -> list[DoubleIrrepLabel]:
    labels = []
    for cls in G.classes:
        E = centralizer(G, cls.representative)
        table = G.subgroup(E.members).character_table
        for row, d in enumerate(table.dims):
            labels.append(DoubleIrrepLabel(cls, row, len(cls) * d, E.order))
    labels.sort(key=lambda lab: (len(lab.magnetic_class), lab.dim))
    return labels


def vortex_action(T: DoubleTensors, h: int, g: int, v: int) -> tuple[int, int | None]:
    """D_{(h,g)}|v⟩ = δ_{h, g v g⁻¹} |g v g⁻¹⟩."""
    w = T.group.conj(g, v)
    return (1, w) if w == h else (0, None)


def vortex_matrix(T: DoubleTensors, cls: ConjugacyClass, k: int) -> np.ndarray:
    pos = {v: i for i, v in enumerate(cls.members)}
    M = np.zeros((len(cls), len(cls)))
    h, g = T.pair(k)
    for v in cls.members:
        coeff, w = vortex_action(T, h, g, v)
        if coeff:
            M[pos[w], pos[v]] = 1
    return M


def vortex_commutant_dimension(T: DoubleTensors, cls: ConjugacyClass) -> int:
    """Dimension of the commutant of the vortex action on a class; 1 means irreducible."""
    n = len(cls)
    eye = np.eye(n)
    blocks = []
    G = T.group
    gens = [T.idx(h, 0) for h in cls.members]
    gens += [T.idx(G.conj(g, cls.representative), g) for g in G.elements]
    for k in gens:
        D = vortex_matrix(T, cls, k)
        blocks.append(np.kron(eye, D) - np.kron(D.T, eye))
    return n * n - np.linalg.matrix_rank(np.vstack(blocks))


def comultiply_double(T: DoubleTensors, k: int) -> list[tuple[tuple[int, int], complex]]:
    """Δ(D_{(h,g)}) = Σ_{h1 h2 = h} D_{(h1,g)} ⊗ D_{(h2,g)}, from the group directly."""
    G = T.group
    h, g = T.pair(k)
    terms = []
    for h1 in G.elements:
        h2 = G.mul(G.inv(h1), h)
        terms.append(((T.idx(h1, g), T.idx(h2, g)), 1 + 0j))
    return terms


def central_idempotent_trivial_flux(T: DoubleTensors, row: int) -> dict[int, complex]:
    """P = (dim χ / N) Σ_g χ(g)* D_{(1,g)}: projector onto charge χ with no flux."""
    G = T.group
    table = G.character_table
    chi = table.irreps[row][G.class_of]
    d = table.dims[row]
    return {T.idx(0, g): d / G.order * np.conj(chi[g]) for g in G.elements}


def omega_matrices(T: DoubleTensors) -> dict[int, list[tuple[int, int, complex]]]:
    """For each right factor j: the entries (k, m, value) of Ω^k_{mj}."""
    out: dict[int, list] = {}
    for (k, m, j), v in zip(T.omega.coords, T.omega.values):
        out.setdefault(int(j), []).append((int(k), int(m), complex(v)))
    return out


def dense_matrix(M: SparseTensor) -> np.ndarray:
    A = np.zeros((M.size, M.size), complex)
    A[M.coords[:, 0], M.coords[:, 1]] = M.values
    return A
