import io
import json
import subprocess
import sys

from cartprl.cli import main
from cartprl.repl import Repl
from conftest import CORPUS


def test_check_ok(capsys):
    assert main(["check", str(CORPUS / "golden.prl")]) == 0
    assert "pair_of_vars: ok  ~>  \\x y => (x, y)" in capsys.readouterr().out


def test_check_json_and_trace(capsys):
    assert main(["check", "--json", str(CORPUS / "shannon.prl")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] and len(report["declarations"]) == 3
    assert main(["check", "--trace", str(CORPUS / "golden.prl")]) == 0
    assert "sigma/intro" in capsys.readouterr().out


def test_check_failures(tmp_path, capsys):
    bad = tmp_path / "bad.prl"
    bad.write_text("thm t : bool * bool by { sigma/intro }")
    assert main(["check", str(bad)]) == 1
    assert "3 open goal(s)" in capsys.readouterr().out
    bad.write_text("thm t : bool by {")
    assert main(["check", str(bad)]) == 2
    assert "1:18" in capsys.readouterr().err


def test_eval(capsys):
    assert main(["eval", "S1-rec(_. bool; loop i; tt; _. ff)"]) == 0
    assert capsys.readouterr().out.strip() == "ff"
    assert main(["eval", "--trace", "loop 0"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1].endswith("base (stable)") and out[-1] == "base"
    assert main(["eval", "fst tt"]) == 1
    assert main(["eval", "(("]) == 2


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "cartprl.cli", "eval", "loop 1"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "base"


def run_repl(lines):
    out = io.StringIO()
    r = Repl(stdin=io.StringIO("\n".join(lines) + "\n"), stdout=out)
    r.use_rawinput = False
    r.cmdloop()
    return out.getvalue()


def test_repl_session():
    out = run_repl(
        [
            f"load {CORPUS / 'golden.prl'}",
            "open pair_of_vars",
            "rules",
            "apply pi/intro",
            "undo",
            "tac lam x y => {use x, use y}",
            "extract",
            "eval --trace (\\x => x) tt",
            "quit",
        ]
    )
    assert "pair_of_vars: ok" in out
    assert "* root: >> bool -> bool -> bool * bool true" in out
    assert "pi/intro" in out
    assert "no open goals" in out
    assert "\\x y => (x, y)" in out
    assert "(stable)" in out


def test_repl_errors_do_not_end_the_loop():
    out = run_repl(["show", "goal >> bool", "apply sigma/intro", "frobnicate", "tac auto", "extract"])
    assert "error: RuleError" in out
    assert "error: RuleMismatch" in out
    assert "unknown command 'frobnicate'" in out
    assert "cartprl> tt\n" in out


def test_repl_focus():
    out = run_repl(["goal x : bool >> bool * bool", "apply sigma/intro", "focus g2", "tac auto", "show"])
    after_focus, after_auto = out.split("cartprl> ")[3:5]
    assert "* g2" in after_focus
    # g2 is closed, so the focus falls back to the first open goal
    assert "g2" not in after_auto and "* g1" in after_auto
