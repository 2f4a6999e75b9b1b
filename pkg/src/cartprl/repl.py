"""Interactive read-eval-print loop over proof states."""

from __future__ import annotations

import cmd
from pathlib import Path

from cartprl.checker import check_signature
from cartprl.dynamics import DEFAULT_FUEL, EvalError, evaluate, trace
from cartprl.parser import (
    ParseError,
    Signature,
    Thm,
    environment,
    parse,
    parse_goal,
    parse_tactic,
    parse_term,
)
from cartprl.refiner import (
    IncompleteError,
    ProofState,
    RuleError,
    apply_rule,
    applicable_rules,
    extract,
    goal_sequent,
    undo,
)
from cartprl.tactics import Rule, TacticFailure, run_tactic

HELP = """\
load FILE          load and check a signature file
open THM           start proving a theorem from the loaded file
goal SEQUENT       start proving an ad hoc goal, e.g.  goal x : bool >> bool
show [GOAL]        print the open goals, or one goal in full
focus GOAL         make GOAL the target of apply/tac
apply RULE ARGS    refine the focused goal by one rule
tac TACTIC         run a tactic script on the focused goal
undo               revert the last apply/tac
extract            print the (possibly partial) extract
eval [--trace] M   evaluate a closed term
rules              list rules applicable to the focused goal
quit               leave"""


class Repl(cmd.Cmd):
    prompt = "cartprl> "
    intro = "cartprl interactive refiner; type 'help' for commands."

    def __init__(self, fuel: int = DEFAULT_FUEL, **kw):
        super().__init__(**kw)
        self.fuel = fuel
        self.sig = Signature()
        self.state: ProofState | None = None
        self.focus: str | None = None

    def say(self, msg: str) -> None:
        self.stdout.write(msg + "\n")

    def onecmd(self, line: str) -> bool:
        try:
            return super().onecmd(line)
        except (ParseError, RuleError, TacticFailure, EvalError, IncompleteError, OSError) as e:
            self.say(f"error: {type(e).__name__}: {e}")
            return False

    def emptyline(self) -> bool:
        return False

    def default(self, line: str) -> bool:
        self.say(f"unknown command {line.split()[0]!r}; try 'help'")
        return False

    def do_help(self, arg: str) -> None:
        self.say(HELP)

    def do_quit(self, arg: str) -> bool:
        return True

    do_EOF = do_quit

    # -- sessions

    def do_load(self, arg: str) -> None:
        self.sig = parse(Path(arg.strip()).read_text())
        self.say(check_signature(self.sig, self.fuel).render())

    def do_open(self, arg: str) -> None:
        d = self.sig[arg.strip()]
        if not isinstance(d, Thm):
            self.say(f"{d.name} is not a theorem")
            return
        self._start(ProofState.initial(goal_sequent(d.statement)))

    def do_goal(self, arg: str) -> None:
        defs, _ = environment(self.sig)
        self._start(ProofState.initial(parse_goal(arg, defs)))

    def _start(self, st: ProofState) -> None:
        self.state = st
        self.focus = None
        self.do_show("")

    def _need_state(self) -> ProofState:
        if self.state is None:
            raise RuleError("no proof in progress; use 'open' or 'goal'")
        return self.state

    def _target(self) -> str:
        st = self._need_state()
        if self.focus in st.goals:
            return self.focus
        if not st.goals:
            raise RuleError("no open goals")
        return st.goals[0]

    def do_show(self, arg: str) -> None:
        st = self._need_state()
        if arg.strip():
            self.say(str(st.sequent(arg.strip())))
            return
        if not st.goals:
            self.say("no open goals")
        for g in st.goals:
            mark = "*" if g == self._target() else " "
            self.say(f"{mark} {g}: {st.sequent(g)}")

    def do_focus(self, arg: str) -> None:
        st = self._need_state()
        if arg.strip() not in st.goals:
            self.say(f"{arg.strip()} is not an open goal")
            return
        self.focus = arg.strip()
        self.do_show("")

    # -- refinement

    def do_apply(self, arg: str) -> None:
        defs, _ = environment(self.sig)
        t = parse_tactic(arg, {}, defs)
        if not isinstance(t, Rule):
            self.say("apply takes a single rule; use 'tac' for scripts")
            return
        self._update(apply_rule(self._need_state(), self._target(), t.app))

    def do_tac(self, arg: str) -> None:
        defs, aliases = environment(self.sig)
        t = parse_tactic(arg, aliases, defs)
        self._update(run_tactic(self._need_state(), self._target(), t))

    def _update(self, st: ProofState) -> None:
        self.state = st
        self.do_show("")

    def do_undo(self, arg: str) -> None:
        self._update(undo(self._need_state()))

    def do_extract(self, arg: str) -> None:
        st = self._need_state()
        if st.goals:
            self.say(f"incomplete: {st.extract_term}")
        else:
            self.say(str(extract(st)))

    def do_rules(self, arg: str) -> None:
        st = self._need_state()
        for r in applicable_rules(st.sequent(self._target())):
            self.say(r)

    def do_eval(self, arg: str) -> None:
        text = arg.strip()
        show_trace = text.startswith("--trace")
        if show_trace:
            text = text[len("--trace") :]
        defs, _ = environment(self.sig)
        t = parse_term(text, defs)
        if show_trace:
            for n, e in enumerate(trace(t, self.fuel)):
                tag = "" if e.stable is None else (" (stable)" if e.stable else " (unstable)")
                self.say(f"{n:>4}  {e.term}{tag}")
        self.say(str(evaluate(t, self.fuel)))


def run_repl(path: str | None = None, fuel: int = DEFAULT_FUEL) -> None:
    r = Repl(fuel)
    if path:
        r.onecmd(f"load {path}")
    r.cmdloop()

