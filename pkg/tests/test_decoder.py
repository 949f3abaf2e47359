import numpy as np
import pytest

from anyonkit.decoder import (
    CSV_COLUMNS, NoiseModel, decode, exact_sector_failure, fit_log_slope, match_defects, read_csv,
    run_monte_carlo, sample_error, torus_distance, trial_fails, trial_rng, wilson_stderr,
    write_csv,
)
from anyonkit.pauli import PauliOperator
from anyonkit.toric import TorusCode, syndrome


def test_single_errors_are_always_corrected():
    code = TorusCode(5)
    for q in range(code.n):
        for letter in "XYZ":
            E = PauliOperator.single(code.n, q, letter)
            failed, _ = trial_fails(code, E, decode(code, syndrome(code, E)))
            assert not failed


@pytest.mark.parametrize("k", [3, 4])
def test_matching_methods_agree_on_weight(k):
    rng = np.random.default_rng(k)
    for _ in range(20):
        defects = sorted(rng.choice(k * k, size=4, replace=False).tolist())
        cost = {m: sum(torus_distance(k, a, b) for a, b in match_defects(k, defects, m))
                for m in ("mwpm", "networkx")}
        assert cost["mwpm"] == cost["networkx"]


def test_correction_reproduces_syndrome():
    code = TorusCode(6)
    noise = NoiseModel("depolarizing", 0.1)
    for t in range(30):
        E = sample_error(code, noise, trial_rng(1, 6, 0.1, t))
        C = decode(code, syndrome(code, E))
        assert syndrome(code, C) == syndrome(code, E)


def test_exact_rate_at_half_is_three_quarters():
    assert exact_sector_failure(2, 0.5) == pytest.approx(0.75, abs=1e-15)


def test_exact_rate_is_small_at_low_noise():
    assert exact_sector_failure(2, 0.001) < 0.01


def test_monte_carlo_matches_enumeration_at_k2():
    rec, = run_monte_carlo([2], [0.1], 20000, master_seed=3)
    exact = exact_sector_failure(2, 0.1)
    assert abs(rec.sector_rate() - exact) < 4 * rec.sector_stderr()


def test_seeded_and_worker_independent():
    a = run_monte_carlo([3, 4], [0.05, 0.08], 3000, master_seed=9, chunk=500)
    b = run_monte_carlo([3, 4], [0.05, 0.08], 3000, master_seed=9, chunk=500, workers=3)
    assert a == b
    c = run_monte_carlo([3], [0.05], 3000, master_seed=10, chunk=500)
    assert c[0] != a[0]


def test_csv_round_trip(tmp_path):
    recs = run_monte_carlo([3], [0.05, 0.1], 200, master_seed=1)
    path = tmp_path / "r.csv"
    write_csv(recs, path)
    text = path.read_text(encoding="utf-8")
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert text.endswith("\n")
    rows = read_csv(path)
    for r, row in zip(recs, rows):
        assert row == {"k": r.k, "p": r.p, "model": r.model, "trials": r.trials,
                       "fail_x": r.failures_x, "fail_z": r.failures_z,
                       "fail_any": r.failures_any, "stderr_any": r.stderr_any, "seed": r.seed}


def test_empty_csv_is_header_only(tmp_path):
    path = tmp_path / "e.csv"
    write_csv([], path)
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"


def test_wilson_stderr():
    assert wilson_stderr(0, 100) > 0
    assert wilson_stderr(50, 100) == pytest.approx(0.0497, abs=1e-3)


def test_log_slope_is_negative_below_threshold():
    recs = run_monte_carlo([3, 5], [0.03], 4000, master_seed=2)
    assert fit_log_slope(recs) < 0


def test_bad_inputs():
    with pytest.raises(ValueError):
        run_monte_carlo([3], [0.1], 0, 1)
    with pytest.raises(ValueError):
        run_monte_carlo([3], [1.5], 10, 1)
    with pytest.raises(ValueError):
        run_monte_carlo([3], [0.1], 10, 1, model="bitflip")
