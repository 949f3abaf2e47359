"""A pair-level simulator for magnetic vortex pairs |v, v⁻¹⟩ in a finite group.

The state is a sparse map from label tuples (v₁, …, vₙ), one first-member label
per live pair, to amplitudes. Braiding primitives permute basis tuples; value
measurement collapses one label; charge measurement projects a pair onto an
isotypic component of the conjugation action and then discards the pair.
"""

from __future__ import annotations

import re
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .groups import ConjugacyClass, FiniteGroup

NORM_TOL = 1e-9
OPS = ("CREATE", "CREATEREF", "PULL", "SWAP", "MEASV", "FUSECHARGE")


class ProgramError(ValueError):
    pass


@dataclass(frozen=True)
class Instruction:
    op: str
    args: tuple
    line: int = 0

    def __str__(self):
        return " ".join([self.op, *(str(a) for a in self.args)])


@dataclass(frozen=True)
class LogEntry:
    step: int
    op: str
    pair: int
    result: str

    def __str__(self):
        return f"{self.step} {self.op} {self.pair} -> {self.result}"


def charge_label(G: FiniteGroup, row: int) -> str:
    return f"chi{row}:dim{G.character_table.dims[row]}"


def element_label(G: FiniteGroup, v: int) -> str:
    return G.format(v) or "()"


@lru_cache(maxsize=64)
def charge_projectors(G: FiniteGroup, cls: ConjugacyClass) -> tuple[np.ndarray, ...]:
    """P_χ = (dim χ / |G|) Σ_g χ(g)* π(g) for the conjugation action of G on a class."""
    table = G.character_table
    where = {v: n for n, v in enumerate(cls.members)}
    src = np.array(cls.members)
    perms = np.zeros((G.order, len(cls), len(cls)))
    for g in G.elements:
        perms[g, [where[int(w)] for w in G.conj_table[g, src]], np.arange(len(cls))] = 1
    out = []
    for row, d in enumerate(table.dims):
        chi = table.irreps[row][G.class_of]
        out.append(d / G.order * np.tensordot(np.conj(chi), perms, axes=1))
    return tuple(out)


class VmState:
    def __init__(self, group: FiniteGroup):
        self.group = group
        self.ids: list[int] = []  # live pair ids in position order
        self.classes: list[ConjugacyClass] = []
        self.amps: dict[tuple[int, ...], complex] = {(): 1.0 + 0j}
        self.log: list[LogEntry] = []
        self._next_id = 1
        self._step = 0

    def copy(self) -> "VmState":
        other = VmState(self.group)
        other.ids = list(self.ids)
        other.classes = list(self.classes)
        other.amps = dict(self.amps)
        other.log = list(self.log)
        other._next_id = self._next_id
        other._step = self._step
        return other

    # --- bookkeeping
    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self.amps.values())))

    def _check_norm(self):
        n = self.norm()
        if abs(n - 1) > NORM_TOL:
            raise RuntimeError(f"state norm drifted to {n!r}")

    def position(self, pair: int) -> int:
        try:
            return self.ids.index(pair)
        except ValueError:
            raise ProgramError(f"pair {pair} is not live") from None

    def _permute(self, pos: int, table: np.ndarray):
        self.amps = {k[:pos] + (int(table[k[pos]]),) + k[pos + 1:]: a for k, a in self.amps.items()}

    def _record(self, op: str, pair: int, result: str):
        self._step += 1
        self.log.append(LogEntry(self._step, op, pair, result))

    def _tick(self):
        self._step += 1
        self._check_norm()

    # --- primitives
    def create_pair(self, cls: ConjugacyClass) -> int:
        if cls not in self.group.classes:
            raise ProgramError("not a conjugacy class of the group")
        amp = 1 / np.sqrt(len(cls))
        self.amps = {k + (v,): a * amp for k, a in self.amps.items() for v in cls.members}
        return self._append(cls)

    def create_reference_pair(self, v: int) -> int:
        self.amps = {k + (v,): a for k, a in self.amps.items()}
        return self._append(self.group.class_containing(v))

    def _append(self, cls: ConjugacyClass) -> int:
        pid = self._next_id
        self._next_id += 1
        self.ids.append(pid)
        self.classes.append(cls)
        self._tick()
        return pid

    def pull_through(self, i: int, j: int):
        """Label of pair i becomes v_j v_i v_j⁻¹ (pair j moves nothing)."""
        if i == j:
            raise ProgramError("a pair cannot be pulled through itself")
        pi, pj = self.position(i), self.position(j)
        conj = self.group.conj_table
        self.amps = {k[:pi] + (int(conj[k[pj], k[pi]]),) + k[pi + 1:]: a
                     for k, a in self.amps.items()}
        self._tick()

    def interchange_members(self, i: int, direction: str = "CCW"):
        """Exchange the two members of pair i; either direction maps v to v⁻¹."""
        if direction not in ("CCW", "CW"):
            raise ProgramError(f"direction must be CCW or CW, not {direction!r}")
        pos = self.position(i)
        G = self.group
        if direction == "CCW":
            # (v₁, v₂) ↦ (v₁ v₂ v₁⁻¹, v₁) with v₂ = v₁⁻¹
            table = np.array([G.conj(v, G.inv(v)) for v in G.elements])
        else:
            # (v₁, v₂) ↦ (v₂, v₂⁻¹ v₁ v₂)
            table = G.inv_table
        self._permute(pos, table)
        self.classes[pos] = G.class_containing(G.inv(self.classes[pos].representative))
        self._tick()

    # --- measurements
    def value_distribution(self, i: int) -> dict[int, float]:
        pos = self.position(i)
        out: dict[int, float] = defaultdict(float)
        for k, a in self.amps.items():
            out[k[pos]] += abs(a) ** 2
        return {v: p for v, p in sorted(out.items()) if p > 0}

    def collapse_value(self, i: int, v: int) -> float:
        pos = self.position(i)
        kept = {k: a for k, a in self.amps.items() if k[pos] == v}
        p = sum(abs(a) ** 2 for a in kept.values())
        if p <= 0:
            raise ValueError("outcome has zero probability")
        self.amps = {k: a / np.sqrt(p) for k, a in kept.items()}
        self._record("MEASV", i, element_label(self.group, v))
        self._check_norm()
        return p

    def measure_v(self, i: int, rng: np.random.Generator) -> int:
        dist = self.value_distribution(i)
        v = _sample(dist, rng)
        self.collapse_value(i, v)
        return v

    def _blocks(self, pos: int, cls: ConjugacyClass):
        where = {v: n for n, v in enumerate(cls.members)}
        blocks: dict[tuple, np.ndarray] = {}
        for k, a in self.amps.items():
            rest = k[:pos] + k[pos + 1:]
            vec = blocks.setdefault(rest, np.zeros(len(cls), complex))
            vec[where[k[pos]]] += a
        return blocks

    def charge_distribution(self, i: int) -> dict[int, float]:
        """Probability of each irrep of G when pair i is fused and its charge read."""
        pos = self.position(i)
        cls = self.classes[pos]
        blocks = self._blocks(pos, cls)
        out = {}
        for row, P in enumerate(charge_projectors(self.group, cls)):
            p = sum(float(np.vdot(P @ v, P @ v).real) for v in blocks.values())
            if p > 1e-15:
                out[row] = p
        return out

    def project_charge(self, i: int, row: int) -> dict[int, float]:
        """Project pair i onto charge `row`, log it, and return the value
        distribution of the discarded pair, which the caller collapses with
        `discard_pair`."""
        pos = self.position(i)
        cls = self.classes[pos]
        P = charge_projectors(self.group, cls)[row]
        blocks = self._blocks(pos, cls)
        amps = {}
        for rest, vec in blocks.items():
            w = P @ vec
            for n, v in enumerate(cls.members):
                if abs(w[n]) > 1e-15:
                    amps[rest[:pos] + (v,) + rest[pos:]] = w[n]
        p = sum(abs(a) ** 2 for a in amps.values())
        if p <= 0:
            raise ValueError("charge outcome has zero probability")
        self.amps = {k: a / np.sqrt(p) for k, a in amps.items()}
        self._record("FUSECHARGE", i, charge_label(self.group, row))
        return self.value_distribution(i)

    def discard_pair(self, i: int, v: int):
        """Remove pair i after finding its (unlogged) label v."""
        pos = self.position(i)
        kept = {k[:pos] + k[pos + 1:]: a for k, a in self.amps.items() if k[pos] == v}
        p = sum(abs(a) ** 2 for a in kept.values())
        self.amps = {k: a / np.sqrt(p) for k, a in kept.items()}
        del self.ids[pos]
        del self.classes[pos]
        self._check_norm()

    def fuse_measure_charge(self, i: int, rng: np.random.Generator) -> int:
        row = _sample(self.charge_distribution(i), rng)
        leftover = self.project_charge(i, row)
        self.discard_pair(i, _sample(leftover, rng))
        return row


def _sample(dist: dict, rng: np.random.Generator):
    keys = list(dist)
    p = np.array([dist[k] for k in keys], float)
    return keys[int(rng.choice(len(keys), p=p / p.sum()))]


# --- programs ------------------------------------------------------------------------

_ELEMENT = r"(\(\s*\)|(?:\([\d\s,]+\))+|e|id)"


def parse_program(text: str, group: FiniteGroup) -> list[Instruction]:
    """One instruction per line; `#` starts a comment; elements in cycle notation."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        op, _, rest = line.partition(" ")
        op = op.upper()
        rest = rest.strip()
        try:
            if op in ("CREATE", "CREATEREF"):
                if not re.fullmatch(_ELEMENT, rest):
                    raise ProgramError(f"expected an element in cycle notation, got {rest!r}")
                out.append(Instruction(op, (group.parse(rest),), lineno))
            elif op == "PULL":
                i, j = (int(x) for x in rest.split())
                out.append(Instruction(op, (i, j), lineno))
            elif op == "SWAP":
                parts = rest.split()
                if not 1 <= len(parts) <= 2:
                    raise ProgramError("SWAP takes a pair and an optional CCW/CW")
                direction = parts[1].upper() if len(parts) == 2 else "CCW"
                if direction not in ("CCW", "CW"):
                    raise ProgramError(f"unknown direction {parts[1]!r}")
                out.append(Instruction(op, (int(parts[0]), direction), lineno))
            elif op in ("MEASV", "FUSECHARGE"):
                out.append(Instruction(op, (int(rest),), lineno))
            else:
                raise ProgramError(f"unknown instruction {op!r}")
        except ProgramError as exc:
            raise ProgramError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise ProgramError(f"line {lineno}: {exc}") from None
    return out


def execute(state: VmState, ins: Instruction, rng: np.random.Generator):
    G = state.group
    try:
        if ins.op == "CREATE":
            state.create_pair(G.class_containing(ins.args[0]))
        elif ins.op == "CREATEREF":
            state.create_reference_pair(ins.args[0])
        elif ins.op == "PULL":
            state.pull_through(*ins.args)
        elif ins.op == "SWAP":
            state.interchange_members(*ins.args)
        elif ins.op == "MEASV":
            state.measure_v(ins.args[0], rng)
        elif ins.op == "FUSECHARGE":
            state.fuse_measure_charge(ins.args[0], rng)
        else:
            raise ProgramError(f"unknown instruction {ins.op!r}")
    except ProgramError as exc:
        raise ProgramError(f"line {ins.line}: {exc}") from None


def run_program(program: list[Instruction], group: FiniteGroup, seed) -> list[LogEntry]:
    rng = np.random.Generator(np.random.PCG64(seed))
    state = VmState(group)
    for ins in program:
        execute(state, ins, rng)
    state._check_norm()
    return state.log


def shot_seed(seed: int, shot: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, shot])


def outcome_key(log: list[LogEntry]) -> tuple[str, ...]:
    return tuple(f"{e.op} {e.pair} {e.result}" for e in log)


def _shot_block(args) -> list[list[LogEntry]]:
    program, group, seed, start, stop = args
    return [run_program(program, group, shot_seed(seed, s)) for s in range(start, stop)]


def sample_shots(program: list[Instruction], group: FiniteGroup, seed: int, shots: int,
                 workers: int = 1, block: int = 250) -> list[list[LogEntry]]:
    """Logs of shots 0..shots-1 in shot order; each shot has its own seed stream."""
    jobs = [(program, group, seed, s, min(shots, s + block)) for s in range(0, shots, block)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_shot_block, jobs))
    else:
        parts = [_shot_block(j) for j in jobs]
    return [log for part in parts for log in part]


def run_shots(program: list[Instruction], group: FiniteGroup, seed: int, shots: int,
              workers: int = 1) -> dict[tuple[str, ...], int]:
    counts: dict[tuple[str, ...], int] = defaultdict(int)
    for log in sample_shots(program, group, seed, shots, workers):
        counts[outcome_key(log)] += 1
    return dict(counts)


def branch_distribution(program: list[Instruction], group: FiniteGroup
                        ) -> dict[tuple[str, ...], float]:
    """Exact probability of every measurement record, by following all branches."""
    out: dict[tuple[str, ...], float] = defaultdict(float)

    def walk(state: VmState, pc: int, prob: float):
        if prob < 1e-15:
            return
        while pc < len(program) and program[pc].op not in ("MEASV", "FUSECHARGE"):
            execute(state, program[pc], np.random.default_rng(0))
            pc += 1
        if pc == len(program):
            out[outcome_key(state.log)] += float(prob)
            return
        ins = program[pc]
        i = ins.args[0]
        try:
            if ins.op == "MEASV":
                for v, p in state.value_distribution(i).items():
                    branch = state.copy()
                    branch.collapse_value(i, v)
                    walk(branch, pc + 1, prob * p)
            else:
                for row, p in state.charge_distribution(i).items():
                    branch = state.copy()
                    leftover = branch.project_charge(i, row)
                    # the discarded label is not recorded; keep each conditional remainder
                    for v, q in leftover.items():
                        sub = branch.copy()
                        sub.discard_pair(i, v)
                        walk(sub, pc + 1, prob * p * q)
        except ProgramError as exc:
            raise ProgramError(f"line {ins.line}: {exc}") from None

    walk(VmState(group), 0, 1.0)
    return dict(out)
