import subprocess
import sys

import pytest

from anyonkit.cli import main
from anyonkit.decoder import CSV_COLUMNS


def run(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def program(tmp_path):
    path = tmp_path / "pull.txt"
    path.write_text("CREATEREF (1 2)\nCREATEREF (2 3)\nPULL 1 2\nMEASV 1\n")
    return str(path)


def test_code_params(capsys):
    code, out, _ = run(["code-params", "--k", "3"], capsys)
    assert code == 0
    assert out.strip() == "k=3 n=18 m=16 logical_dim=4"


def test_code_params_distance_is_capped(capsys):
    code, out, _ = run(["code-params", "--k", "2", "--distance"], capsys)
    assert code == 0 and "distance=2" in out
    code, _, err = run(["code-params", "--k", "5", "--distance"], capsys)
    assert code == 2 and "k <= 4" in err


def test_no_arguments_prints_usage(capsys):
    code, out, err = run([], capsys)
    assert code == 2 and "usage:" in err and out == ""


@pytest.mark.parametrize("argv", [
    ["frobnicate"], ["code-params"], ["code-params", "--k", "x"], ["threshold", "--k", "3"],
    ["verify-hopf", "--group", "S3", "--bogus"], ["statevector-check", "--group", "S3",
                                                  "--suite", "some"],
])
def test_malformed_invocations_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err


def test_randomized_commands_need_a_seed(capsys, program):
    code, _, err = run(["threshold", "--k", "3", "--p", "0.05", "--trials", "10"], capsys)
    assert code == 2 and "--seed" in err
    code, _, err = run(["vm-run", "--program", program], capsys)
    assert code == 2 and "--seed" in err


def test_seed_auto_is_reported(capsys):
    code, out, err = run(["threshold", "--k", "3", "--p", "0.05", "--trials", "20",
                          "--seed", "auto"], capsys)
    assert code == 0
    seed = int(err.split("seed=")[1].split()[0])
    assert out.splitlines()[1].endswith(f",{seed}")


def test_verify_hopf_passes(capsys):
    code, out, _ = run(["verify-hopf", "--group", "S3"], capsys)
    assert code == 0
    assert "FAIL" not in out and "R-braiding" in out


def test_sampled_verify_hopf_needs_seed(capsys):
    code, _, err = run(["verify-hopf", "--group", "S4"], capsys)
    assert code == 2 and "--seed" in err


def test_double_irreps(capsys):
    code, out, _ = run(["double-irreps", "--group", "S3"], capsys)
    assert code == 0
    rows = [line.split() for line in out.splitlines()[1:-1]]
    assert sorted(int(r[-1]) for r in rows) == [1, 1, 2, 2, 2, 2, 3, 3]
    assert "sum of dim^2 = 36" in out


def test_statevector_check(capsys):
    code, out, _ = run(["statevector-check", "--group", "Z2", "--lattice", "torus:2x2",
                        "--suite", "ground"], capsys)
    assert code == 0 and "ground-dimension" in out and "fail" not in out


def test_bad_group_is_an_input_error(capsys):
    code, _, err = run(["double-irreps", "--group", "Q8"], capsys)
    assert code == 2 and "Q8" in err


def test_threshold_csv(tmp_path, capsys):
    out_path = tmp_path / "r.csv"
    argv = ["threshold", "--k", "3,5", "--p", "0.04:0.06:0.01", "--trials", "300", "--seed", "42",
            "--out", str(out_path)]
    code, _, _ = run(argv, capsys)
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) == "k,p,model,trials,fail_x,fail_z,fail_any,stderr_any,seed"
    assert [line.split(",")[:2] for line in lines[1:]] == [
        ["3", "0.04"], ["3", "0.05"], ["3", "0.06"], ["5", "0.04"], ["5", "0.05"], ["5", "0.06"]]


def test_threads_do_not_change_output(tmp_path, capsys, program):
    outs = []
    for threads in ("1", "3"):
        path = tmp_path / f"t{threads}.csv"
        run(["threshold", "--k", "3", "--p", "0.05", "--trials", "5000", "--seed", "1",
             "--threads", threads, "--out", str(path)], capsys)
        _, vm_out, _ = run(["vm-run", "--program", program, "--seed", "3", "--shots", "600",
                            "--threads", threads], capsys)
        outs.append((path.read_bytes(), vm_out))
    assert outs[0] == outs[1]


def test_vm_run_log_and_histogram(capsys, program):
    code, out, _ = run(["vm-run", "--group", "S5", "--program", program, "--seed", "7",
                        "--shots", "50", "--exact"], capsys)
    assert code == 0
    assert "4 MEASV 1 -> (1 3)" in out
    assert "      50 1.0000  MEASV 1 (1 3)" in out
    assert "1.000000  MEASV 1 (1 3)" in out


def test_vm_run_reports_program_errors(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("CREATE (1 2)\nMEASV 3\n")
    code, _, err = run(["vm-run", "--program", str(path), "--seed", "1"], capsys)
    assert code == 2 and "line 2" in err


def test_config_file_with_flags_winning(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nk=3\np=0.05\ntrials=100\nseed=5\nmodel=xz\n")
    code, out, _ = run(["threshold", "--config", str(cfg)], capsys)
    assert code == 0 and out.splitlines()[1].startswith("3,0.05,xz,100,")
    code, out, _ = run(["--config", str(cfg), "threshold", "--trials", "50"], capsys)
    assert code == 0 and out.splitlines()[1].startswith("3,0.05,xz,50,")


def test_config_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("shots=3\n")
    code, _, err = run(["code-params", "--k", "3", "--config", str(cfg)], capsys)
    assert code == 2 and "shots" in err
    code, _, err = run(["code-params", "--k", "3", "--config", str(tmp_path / "none")], capsys)
    assert code == 2


def test_verification_failure_exits_1(capsys, monkeypatch):
    from anyonkit.lattice import checks

    def broken(*args, **kwargs):
        return [checks.CheckResult("ground-dimension", "fail", 1.0, "rank 3, expected 4")]

    monkeypatch.setattr(checks, "run_suite", broken)
    code, out, _ = run(["statevector-check", "--group", "Z2", "--lattice", "torus:2x2"], capsys)
    assert code == 1 and "fail" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "anyonkit", "code-params", "--k", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("k=2 n=8 m=6 logical_dim=4")
