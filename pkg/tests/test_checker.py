import pytest

from cartprl.checker import Error, Ok, OpenGoals, check_signature
from cartprl.parser import parse
from cartprl.semantics import MemJ, check_closed
from conftest import CORPUS

FILES = sorted(CORPUS.glob("*.prl"))


@pytest.mark.parametrize("path", FILES, ids=lambda p: p.stem)
def test_corpus_checks(path):
    report = check_signature(parse(path.read_text()))
    assert report.ok, report.render()


def test_corpus_size_and_coverage():
    thms = [t for p in FILES for t in parse(p.read_text()).theorems]
    assert len(thms) >= 15
    text = " ".join(str(t.statement) for t in thms)
    for head in ("bool", "->", "*", "path", "S1", "Eq"):
        assert head in text


def test_corpus_extracts_are_members():
    for p in FILES:
        sig = parse(p.read_text())
        report = check_signature(sig)
        for thm in sig.theorems:
            v = check_closed(MemJ(thm.statement, report[thm.name].extract))
            assert not v.fails, (thm.name, v.reason)


def test_missing_auxiliary_goal_is_reported_open():
    sig = parse("thm p : bool * bool by { sigma/intro; [bool/intro/true, bool/intro/false, id] }")
    out = check_signature(sig)["p"]
    assert isinstance(out, OpenGoals)
    ((gid, seq),) = out.goals
    assert seq == "x : bool >> bool type [kan]"


def test_failing_script_is_an_error_with_span():
    sig = parse("def t : bool = tt\n\nthm p : bool by { sigma/intro }")
    report = check_signature(sig)
    assert isinstance(report["t"], Ok)
    err = report["p"]
    assert isinstance(err, Error) and err.span == (3, 1)
    assert "RuleMismatch" in err.message
    assert not report.ok


def test_defs():
    report = check_signature(
        parse(
            """
            def a : bool = if tt then ff else tt
            def b : bool = bool
            def c : bool -> bool = \\x => if x then x else tt
            """
        )
    )
    assert isinstance(report["a"], Ok)
    assert isinstance(report["b"], Error)
    assert isinstance(report["c"], Ok)


def test_checking_is_deterministic():
    text = (CORPUS / "functions.prl").read_text()
    a = check_signature(parse(text)).to_json()
    b = check_signature(parse(text)).to_json()
    assert a == b


def test_report_rendering():
    report = check_signature(parse("thm p : bool by { auto }\nthm q : bool * bool by { sigma/intro }"))
    js = report.to_json()
    assert js["ok"] is False
    assert [d["status"] for d in js["declarations"]] == ["ok", "open"]
    assert "p: ok  ~>  tt" in report.render()
