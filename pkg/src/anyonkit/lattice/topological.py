"""Vortex pairs realized by topological operators on the ribbon basis.

Particles x₁, …, xₙ hang on ribbons from a common base site; a state is a sparse
map from index tuples (k₁, …, kₙ), kᵣ = (u, x) flattened, to amplitudes. The
only group data used are the double tensors:

- D'_j on ribbon r sends ψ^{…k…} to Ω^k_{mj} ψ^{…m…};
- the counterclockwise exchange of neighbours s, s+1 is σ R^{ij} (D'_i ⊗ D'_j),
  the clockwise one R̄^{ij} (D'_i ⊗ D'_j) σ;
- a fused pair carries charge projector P = p^r Λ^{uv}_r D'_u ⊗ D'_v.

A vortex with local label u and topological label v is Σ ψ^{(u,x)} over the x
with B'_v ψ^{(u,x)} = ψ^{(u,x)}.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from ..double import DoubleTensors, build_tensors, central_idempotent_trivial_flux
from ..groups import FiniteGroup
from ..vm import Instruction, LogEntry, ProgramError, charge_label, element_label, outcome_key

CUT = 1e-14


class TopologicalPairs:
    def __init__(self, group: FiniteGroup, tensors: DoubleTensors | None = None):
        self.group = group
        self.T = tensors or build_tensors(group)
        N = group.order
        self.action: dict[tuple[int, int], list[tuple[int, complex]]] = defaultdict(list)
        for (k, m, j), val in zip(self.T.omega.coords, self.T.omega.values):
            self.action[(int(k), int(j))].append((int(m), complex(val)))
        # topological label: the h whose flux projector D'_(h,e) fixes ψ^k
        self.label = np.full(N * N, -1)
        for k in range(N * N):
            for h in group.elements:
                if any(m == k for m, _ in self.action.get((k, h * N), [])):
                    self.label[k] = h
        self.R = [(int(i), int(j), complex(v)) for (i, j), v in zip(self.T.R.coords, self.T.R.values)]
        self.R_bar = [(int(i), int(j), complex(v))
                      for (i, j), v in zip(self.T.R_bar.coords, self.T.R_bar.values)]
        self.amps: dict[tuple[int, ...], complex] = {(): 1.0 + 0j}
        self.ids: list[int] = []
        self.log: list[LogEntry] = []
        self._next_id = 1
        self._step = 0

    def copy(self) -> "TopologicalPairs":
        other = object.__new__(TopologicalPairs)
        other.__dict__.update(self.__dict__)
        other.amps = dict(self.amps)
        other.ids = list(self.ids)
        other.log = list(self.log)
        return other

    # --- linear algebra on the sparse ribbon basis
    def _d_prime(self, amps, pos: int, j: int):
        out: dict = defaultdict(complex)
        for key, a in amps.items():
            for m, v in self.action.get((key[pos], j), []):
                out[key[:pos] + (m,) + key[pos + 1:]] += v * a
        return out

    def _pair_op(self, amps, pos: int, terms):
        """Σ coef · D'_i(pos) D'_j(pos+1) over (i, j, coef)."""
        out: dict = defaultdict(complex)
        for i, j, c in terms:
            for key, a in self._d_prime(self._d_prime(amps, pos + 1, j), pos, i).items():
                out[key] += c * a
        return {k: a for k, a in out.items() if abs(a) > CUT}

    @staticmethod
    def _swap(amps, pos: int):
        return {k[:pos] + (k[pos + 1], k[pos]) + k[pos + 2:]: a for k, a in amps.items()}

    def exchange(self, pos: int, ccw: bool):
        if ccw:
            self.amps = self._swap(self._pair_op(self.amps, pos, self.R), pos)
        else:
            self.amps = self._pair_op(self._swap(self.amps, pos), pos, self.R_bar)

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self.amps.values())))

    def _normalize(self):
        n = self.norm()
        self.amps = {k: a / n for k, a in self.amps.items()}

    # --- vortex states
    def vortex(self, u: int, v: int) -> list[int]:
        N = self.group.order
        return [u * N + x for x in self.group.elements if self.label[u * N + x] == v]

    def _append(self, first: list[int], second: list[int]) -> int:
        self.amps = {k + (a, b): amp for k, amp in self.amps.items() for a in first for b in second}
        pid = self._next_id
        self._next_id += 1
        self.ids.append(pid)
        self._step += 1
        return pid

    def create_pair(self, representative: int) -> int:
        G = self.group
        c = representative
        members = G.class_containing(c).members
        out: dict = defaultdict(complex)
        for v in members:
            for a in self.vortex(c, v):
                for b in self.vortex(G.inv(c), G.inv(v)):
                    for k, amp in self.amps.items():
                        out[k + (a, b)] += amp
        self.amps = dict(out)
        self._normalize()
        pid = self._next_id
        self._next_id += 1
        self.ids.append(pid)
        self._step += 1
        return pid

    def create_reference_pair(self, v: int) -> int:
        G = self.group
        c = G.class_containing(v).representative
        pid = self._append(self.vortex(c, v), self.vortex(G.inv(c), G.inv(v)))
        self._normalize()
        return pid

    def position(self, pair: int) -> int:
        try:
            return 2 * self.ids.index(pair)
        except ValueError:
            raise ProgramError(f"pair {pair} is not live") from None

    # --- braiding
    def interchange_members(self, pair: int, direction: str = "CCW"):
        self.exchange(self.position(pair), direction == "CCW")
        self._step += 1

    def pull_through(self, i: int, j: int):
        """Carry pair i once around one member of pair j and back along the same path."""
        if i == j:
            raise ProgramError("a pair cannot be pulled through itself")
        p, q = self.position(i), self.position(j)
        moves: list[tuple[int, bool]] = []

        def run(pos, ccw):
            self.exchange(pos, ccw)
            moves.append((pos, ccw))

        if p < q:
            # block goes right past intermediates, then counterclockwise round j's first member
            while p + 2 < q:
                run(p + 1, True)
                run(p, True)
                p += 1
            transport = list(moves)
            run(p + 1, True)
            run(p, True)
            run(p, True)
            run(p + 1, True)
        else:
            # block goes left past intermediates, then clockwise round j's second member
            q += 1
            while p - 1 > q:
                run(p - 1, False)
                run(p, False)
                p -= 1
            transport = list(moves)
            run(p - 1, False)
            run(p, False)
            run(p, False)
            run(p - 1, False)
        for pos, ccw in reversed(transport):
            self.exchange(pos, not ccw)
        self._step += 1

    # --- measurements
    def value_distribution(self, pair: int) -> dict[int, float]:
        pos = self.position(pair)
        out: dict[int, float] = defaultdict(float)
        for k, a in self.amps.items():
            out[int(self.label[k[pos]])] += abs(a) ** 2
        return {v: p for v, p in sorted(out.items()) if p > 1e-15}

    def collapse_value(self, pair: int, v: int):
        pos = self.position(pair)
        self.amps = {k: a for k, a in self.amps.items() if self.label[k[pos]] == v}
        self._normalize()
        self._step += 1
        self.log.append(LogEntry(self._step, "MEASV", pair, element_label(self.group, v)))

    def _charge_terms(self, row: int):
        coef = central_idempotent_trivial_flux(self.T, row)
        terms = []
        for (u, v, r), val in zip(self.T.lam.coords, self.T.lam.values):
            if int(r) in coef:
                terms.append((int(u), int(v), coef[int(r)] * complex(val)))
        return terms

    def charge_distribution(self, pair: int) -> dict[int, float]:
        pos = self.position(pair)
        out = {}
        for row in range(len(self.group.character_table.dims)):
            projected = self._pair_op(self.amps, pos, self._charge_terms(row))
            p = sum(abs(a) ** 2 for a in projected.values())
            if p > 1e-15:
                out[row] = p
        return out

    def project_charge(self, pair: int, row: int) -> dict[tuple[int, int], float]:
        pos = self.position(pair)
        self.amps = self._pair_op(self.amps, pos, self._charge_terms(row))
        self._normalize()
        self._step += 1
        self.log.append(LogEntry(self._step, "FUSECHARGE", pair, charge_label(self.group, row)))
        out: dict[tuple[int, int], float] = defaultdict(float)
        for k, a in self.amps.items():
            out[(k[pos], k[pos + 1])] += abs(a) ** 2
        return dict(out)

    def discard_pair(self, pair: int, ends: tuple[int, int]):
        pos = self.position(pair)
        self.amps = {k[:pos] + k[pos + 2:]: a for k, a in self.amps.items()
                     if (k[pos], k[pos + 1]) == ends}
        self._normalize()
        self.ids.remove(pair)


def topological_branch_distribution(program: list[Instruction], group: FiniteGroup,
                                    tensors: DoubleTensors | None = None
                                    ) -> dict[tuple[str, ...], float]:
    """Exact distribution of measurement records, as in the pair-level simulator."""
    out: dict[tuple[str, ...], float] = defaultdict(float)
    root = TopologicalPairs(group, tensors)

    def step(state: TopologicalPairs, ins: Instruction):
        if ins.op == "CREATE":
            state.create_pair(group.class_containing(ins.args[0]).representative)
        elif ins.op == "CREATEREF":
            state.create_reference_pair(ins.args[0])
        elif ins.op == "PULL":
            state.pull_through(*ins.args)
        elif ins.op == "SWAP":
            state.interchange_members(*ins.args)
        else:
            raise ProgramError(f"unknown instruction {ins.op!r}")

    def walk(state: TopologicalPairs, pc: int, prob: float):
        if prob < 1e-15:
            return
        while pc < len(program) and program[pc].op not in ("MEASV", "FUSECHARGE"):
            step(state, program[pc])
            pc += 1
        if pc == len(program):
            out[outcome_key(state.log)] += float(prob)
            return
        ins = program[pc]
        pair = ins.args[0]
        if ins.op == "MEASV":
            for v, p in state.value_distribution(pair).items():
                branch = state.copy()
                branch.collapse_value(pair, v)
                walk(branch, pc + 1, prob * p)
        else:
            for row, p in state.charge_distribution(pair).items():
                branch = state.copy()
                ends = branch.project_charge(pair, row)
                for e, q in ends.items():
                    sub = branch.copy()
                    sub.discard_pair(pair, e)
                    walk(sub, pc + 1, prob * p * q)

    walk(root, 0, 1.0)
    return dict(out)
