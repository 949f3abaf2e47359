from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


def load_scenarios(path=DATA / "s3_scenarios.txt") -> dict[str, str]:
    """`## name` headers followed by program text."""
    out, name = {}, None
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.startswith("## "):
            name = line[3:].strip()
            out[name] = ""
        elif name is not None:
            out[name] += line + "\n"
    return out


@pytest.fixture(scope="session")
def s3_scenarios():
    return load_scenarios()


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
