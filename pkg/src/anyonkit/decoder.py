"""Noise sampling, matching decoder and the seeded Monte Carlo harness for TOR(k)."""

from __future__ import annotations

import csv
import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import networkx as nx
import numpy as np
import pymatching

from .pauli import PauliOperator, bits_of, mask_of
from .toric import HomologyClass, Syndrome, TorusCode, homology, syndrome

MODELS = ("xz", "depolarizing")
METHODS = ("mwpm", "networkx", "greedy")
CSV_COLUMNS = ("k", "p", "model", "trials", "fail_x", "fail_z", "fail_any", "stderr_any", "seed")


@dataclass(frozen=True)
class NoiseModel:
    model: str = "xz"
    p: float = 0.0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown noise model {self.model!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")


def _sample_arrays(n: int, noise: NoiseModel, rng: np.random.Generator):
    if noise.model == "xz":
        u = rng.random((2, n))
        return u[0] < noise.p, u[1] < noise.p
    u = rng.random(n)
    hit = u < noise.p
    which = np.zeros(n, dtype=np.int64)
    if noise.p > 0:
        which = np.minimum((3 * u / noise.p).astype(np.int64), 2)  # 0:X 1:Y 2:Z
    return hit & (which <= 1), hit & (which >= 1)


def sample_error(code: TorusCode, noise: NoiseModel, rng: np.random.Generator) -> PauliOperator:
    x, z = _sample_arrays(code.n, noise, rng)
    return _pauli_from_arrays(code.n, x, z)


def _pauli_from_arrays(n, x, z) -> PauliOperator:
    return PauliOperator(n, mask_of(np.flatnonzero(x)), mask_of(np.flatnonzero(z)))


# --- routing ------------------------------------------------------------------------

def torus_distance(k: int, a: int, b: int) -> int:
    (ra, ca), (rb, cb) = divmod(a, k), divmod(b, k)
    dr, dc = (rb - ra) % k, (cb - ca) % k
    return min(dr, k - dr) + min(dc, k - dc)


def _steps(delta: int, k: int) -> tuple[int, int]:
    """(direction, count) of the short way round; ties go the positive way."""
    delta %= k
    return (1, delta) if delta <= k - delta else (-1, k - delta)


def route(code: TorusCode, a: int, b: int, dual: bool) -> list[int]:
    """Edges of the row-first shortest path from site a to site b.

    On the primal lattice sites are vertices; on the dual they are faces.
    """
    k = code.k
    r, c = divmod(a, k)
    rb, cb = divmod(b, k)
    edges = []
    sign, count = _steps(cb - c, k)
    for _ in range(count):
        if dual:
            edges.append(code.v(r, c + 1) if sign > 0 else code.v(r, c))
        else:
            edges.append(code.h(r, c) if sign > 0 else code.h(r, c - 1))
        c += sign
    sign, count = _steps(rb - r, k)
    for _ in range(count):
        if dual:
            edges.append(code.h(r + 1, c) if sign > 0 else code.h(r, c))
        else:
            edges.append(code.v(r, c) if sign > 0 else code.v(r - 1, c))
        r += sign
    return edges


# --- matching -------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _torus_matching_graph(k: int) -> pymatching.Matching:
    m = pymatching.Matching()
    for s in range(k * k):
        r, c = divmod(s, k)
        m.add_edge(s, r * k + (c + 1) % k, weight=1.0, merge_strategy="smallest-weight")
        m.add_edge(s, ((r + 1) % k) * k + c, weight=1.0, merge_strategy="smallest-weight")
    return m


def match_defects(k: int, defects, method: str = "mwpm") -> list[tuple[int, int]]:
    """Pair up defect sites minimising total periodic Manhattan distance."""
    defects = sorted(int(d) for d in defects)
    if len(defects) % 2:
        raise ValueError("odd number of defects cannot be matched")
    if not defects:
        return []
    if method == "mwpm":
        det = np.zeros(k * k, dtype=np.uint8)
        det[defects] = 1
        pairs = _torus_matching_graph(k).decode_to_matched_dets_array(det)
        out = [tuple(sorted((int(a), int(b)))) for a, b in pairs]
    elif method == "networkx":
        g = nx.Graph()
        for i, a in enumerate(defects):
            for b in defects[i + 1:]:
                g.add_edge(a, b, weight=-torus_distance(k, a, b))
        out = [tuple(sorted(e)) for e in nx.max_weight_matching(g, maxcardinality=True)]
    elif method == "greedy":
        cand = sorted((torus_distance(k, a, b), a, b)
                      for i, a in enumerate(defects) for b in defects[i + 1:])
        used, out = set(), []
        for _, a, b in cand:
            if a not in used and b not in used:
                used.update((a, b))
                out.append((a, b))
    else:
        raise ValueError(f"unknown matching method {method!r}")
    return sorted(out)


def decode_sector(code: TorusCode, defects, dual: bool, method: str = "mwpm") -> np.ndarray:
    flips = np.zeros(code.n, dtype=bool)
    for a, b in match_defects(code.k, defects, method):
        for e in route(code, a, b, dual):
            flips[e] ^= True
    return flips


def decode(code: TorusCode, s: Syndrome, method: str = "mwpm") -> PauliOperator:
    """Correction with syndrome exactly s: Z strings pair up vertices, X strings faces."""
    for sites in (s.violated_vertices, s.violated_faces):
        if len(sites) % 2:
            raise ValueError("syndrome has odd parity")
    z = decode_sector(code, s.violated_vertices, dual=False, method=method)
    x = decode_sector(code, s.violated_faces, dual=True, method=method)
    return _pauli_from_arrays(code.n, x, z)


def trial_fails(code: TorusCode, E: PauliOperator, correction: PauliOperator
                ) -> tuple[bool, HomologyClass]:
    if syndrome(code, E) != syndrome(code, correction):
        raise ValueError("correction does not reproduce the error syndrome")
    cls = homology(code, E * correction)
    return not cls.is_trivial(), cls


# --- Monte Carlo ----------------------------------------------------------------------

@dataclass(frozen=True)
class TrialRecord:
    k: int
    p: float
    model: str
    trials: int
    failures_any: int
    failures_x: int
    failures_z: int
    failures_per_logical: tuple[int, int, int, int]  # Z1, Z2 windings of the Z residual; X1, X2
    seed: int

    @property
    def rate_any(self) -> float:
        return self.failures_any / self.trials

    @property
    def stderr_any(self) -> float:
        return wilson_stderr(self.failures_any, self.trials)

    def sector_rate(self) -> float:
        """Per-sector failure rate pooled over the X and Z sectors."""
        return (self.failures_x + self.failures_z) / (2 * self.trials)

    def sector_stderr(self) -> float:
        return wilson_stderr(self.failures_x + self.failures_z, 2 * self.trials)


def wilson_stderr(failures: int, trials: int) -> float:
    """Half-width of the one-sigma Wilson score interval."""
    if trials == 0:
        return float("nan")
    ph = failures / trials
    return math.sqrt(ph * (1 - ph) / trials + 1 / (4 * trials * trials)) / (1 + 1 / trials)


def _p_key(p: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(p)))[0]


def trial_rng(master_seed: int, k: int, p: float, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence([int(master_seed), int(k), _p_key(p), int(trial)])
    return np.random.Generator(np.random.PCG64(ss))


class _FastCode:
    """Array views of one code for the inner Monte Carlo loop."""

    def __init__(self, code: TorusCode):
        self.code = code
        self.V = code.vertex_incidence.astype(np.int64)
        self.F = code.face_incidence.astype(np.int64)
        self.cuts = np.zeros((4, code.n), dtype=np.int64)
        for row, mask in enumerate((code.cut_x1, code.cut_x2, code.loop_z1, code.loop_z2)):
            self.cuts[row, bits_of(mask)] = 1

    def classify(self, x: np.ndarray, z: np.ndarray, method: str) -> np.ndarray:
        code = self.code
        verts = np.flatnonzero((self.V @ z) & 1)
        faces = np.flatnonzero((self.F @ x) & 1)
        rz = z ^ decode_sector(code, verts, dual=False, method=method)
        rx = x ^ decode_sector(code, faces, dual=True, method=method)
        return np.concatenate([(self.cuts[:2] @ rz) & 1, (self.cuts[2:] @ rx) & 1])


def _run_chunk(args) -> np.ndarray:
    k, p, model, method, master_seed, start, stop = args
    fast = _FastCode(TorusCode(k))
    noise = NoiseModel(model, p)
    counts = np.zeros(7, dtype=np.int64)  # any, x, z, per-logical(4)
    for t in range(start, stop):
        x, z = _sample_arrays(fast.code.n, noise, trial_rng(master_seed, k, p, t))
        bits = fast.classify(x.astype(np.int64), z.astype(np.int64), method)
        zfail, xfail = bits[:2].any(), bits[2:].any()
        counts[0] += zfail or xfail
        counts[1] += xfail
        counts[2] += zfail
        counts[3:] += bits
    return counts


def run_monte_carlo(ks, ps, trials: int, master_seed: int, model: str = "xz",
                    method: str = "mwpm", workers: int = 1, chunk: int = 2000
                    ) -> list[TrialRecord]:
    """One record per (k, p); each trial draws from its own seeded stream."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    NoiseModel(model, 0.0)
    for k in ks:
        TorusCode(k)
    jobs = []
    for k in ks:
        for p in ps:
            NoiseModel(model, p)
            for start in range(0, trials, chunk):
                jobs.append((k, p, model, method, master_seed, start, min(trials, start + chunk)))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, jobs))
    else:
        results = [_run_chunk(j) for j in jobs]
    totals: dict[tuple, np.ndarray] = {}
    for job, counts in zip(jobs, results):
        key = (job[0], job[1])
        totals[key] = totals.get(key, 0) + counts
    records = []
    for k in ks:
        for p in ps:
            c = totals[(k, p)]
            records.append(TrialRecord(k, float(p), model, trials, int(c[0]), int(c[1]), int(c[2]),
                                       tuple(int(v) for v in c[3:]), int(master_seed)))
    return records


def exact_sector_failure(k: int, p: float, method: str = "mwpm") -> float:
    """Per-sector failure probability by enumerating every error pattern (small k)."""
    fast = _FastCode(TorusCode(k))
    n = fast.code.n
    if n > 20:
        raise ValueError("enumeration is limited to n <= 20")
    total = 0.0
    for bits in range(2 ** n):
        e = np.array([(bits >> q) & 1 for q in range(n)], dtype=np.int64)
        w = int(e.sum())
        weight = p ** w * (1 - p) ** (n - w)
        zero = np.zeros(n, dtype=np.int64)
        z_fail = fast.classify(zero, e, method)[:2].any()
        x_fail = fast.classify(e, zero, method)[2:].any()
        fails = int(z_fail) + int(x_fail)
        total += weight * fails
    return total / 2


def fit_log_slope(records: list[TrialRecord]) -> float:
    """Least-squares slope of log(per-sector failure rate) against k."""
    pts = [(r.k, math.log(r.sector_rate())) for r in records if r.sector_rate() > 0]
    if len(pts) < 2:
        raise ValueError("need at least two nonzero failure rates")
    ks, logs = np.array(pts).T
    return float(np.polyfit(ks, logs, 1)[0])


# --- CSV ------------------------------------------------------------------------------

def record_row(r: TrialRecord) -> dict:
    return {"k": r.k, "p": repr(r.p), "model": r.model, "trials": r.trials,
            "fail_x": r.failures_x, "fail_z": r.failures_z, "fail_any": r.failures_any,
            "stderr_any": repr(r.stderr_any), "seed": r.seed}


def write_csv(records, path) -> None:
    """Write to a path, or to an already open text stream."""
    if hasattr(path, "write"):
        _write_rows(records, path)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_rows(records, fh)


def _write_rows(records, fh):
    w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(record_row(r))


def read_csv(path) -> list[dict]:
    """Rows with numeric columns converted; per-logical counters are not serialized."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append({"k": int(row["k"]), "p": float(row["p"]), "model": row["model"],
                        "trials": int(row["trials"]), "fail_x": int(row["fail_x"]),
                        "fail_z": int(row["fail_z"]), "fail_any": int(row["fail_any"]),
                        "stderr_any": float(row["stderr_any"]), "seed": int(row["seed"])})
    return out


