import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def run(name, *args):
    return subprocess.run(
        [sys.executable, str(SCRIPTS / name), *args], capture_output=True, text=True, timeout=300
    )


def test_instability_demo():
    r = run("instability_demo.py")
    assert r.returncode == 0, r.stderr
    assert "i->0             tt           ff" in r.stdout
    assert "commutes with substitution: False" in r.stdout


@pytest.mark.parametrize("coherent", ["--coherent", "--no-coherent"])
def test_stability_survey(tmp_path, coherent):
    out = tmp_path / "s.json"
    r = run("stability_survey.py", "--n-terms", "50", coherent, "--json", str(out))
    assert r.returncode == 0, r.stderr
    assert "violations: 0" in r.stdout and out.exists()


def test_canonicity_corpus(tmp_path):
    out = tmp_path / "c.jsonl"
    r = run("canonicity_corpus.py", "--n-members", "20", "--jsonl", str(out))
    assert r.returncode == 0, r.stderr
    assert "non-canonical: 0" in r.stdout
    assert len(out.read_text().splitlines()) == 21
