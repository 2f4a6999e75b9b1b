"""Batch checking of signature files."""

from __future__ import annotations

from dataclasses import dataclass

from cartprl.dynamics import DEFAULT_FUEL
from cartprl.parser import Def, Signature, TacticDef, Thm
from cartprl.refiner import MemGoal, ProofState, goal_sequent
from cartprl.semantics import MemJ, check_closed
from cartprl.syntax import Term, free_vars
from cartprl.tactics import (
    Auto,
    OrElse,
    Seq,
    TacticFailure,
    rule,
    run_tactic,
)

DEF_AUTO_DEPTH = 10


@dataclass(frozen=True)
class Ok:
    extract: Term


@dataclass(frozen=True)
class OpenGoals:
    goals: tuple[tuple[str, str], ...]  # (goal id, rendered sequent)


@dataclass(frozen=True)
class Error:
    message: str
    span: tuple[int, int]


Outcome = Ok | OpenGoals | Error


@dataclass(frozen=True)
class CheckReport:
    entries: tuple[tuple[str, Outcome], ...]

    @property
    def ok(self) -> bool:
        return all(isinstance(o, Ok) for _, o in self.entries)

    def __getitem__(self, name: str) -> Outcome:
        return dict(self.entries)[name]

    def to_json(self) -> dict:
        out = []
        for name, o in self.entries:
            if isinstance(o, Ok):
                out.append({"name": name, "status": "ok", "extract": str(o.extract)})
            elif isinstance(o, OpenGoals):
                goals = [{"id": g, "sequent": s} for g, s in o.goals]
                out.append({"name": name, "status": "open", "goals": goals})
            else:
                line, col = o.span
                out.append(
                    {"name": name, "status": "error", "message": o.message, "line": line, "col": col}
                )
        return {"ok": self.ok, "declarations": out}

    def render(self) -> str:
        lines = []
        for name, o in self.entries:
            if isinstance(o, Ok):
                lines.append(f"{name}: ok  ~>  {o.extract}")
            elif isinstance(o, OpenGoals):
                lines.append(f"{name}: {len(o.goals)} open goal(s)")
                lines.extend(f"  {g}: {s}" for g, s in o.goals)
            else:
                lines.append(f"{name}: error at {o.span[0]}:{o.span[1]}: {o.message}")
        return "\n".join(lines)


def _open(state: ProofState) -> OpenGoals:
    return OpenGoals(tuple((g, str(state.sequent(g))) for g in state.goals))


def check_theorem(thm: Thm, fuel: int = DEFAULT_FUEL) -> tuple[Outcome, ProofState | None]:
    state = ProofState.initial(goal_sequent(thm.statement))
    try:
        state = run_tactic(state, "root", thm.script)
    except TacticFailure as e:
        return Error(str(e), thm.span), None
    if state.goals:
        return _open(state), state
    return Ok(state.extract_term), state


def check_def(d: Def, fuel: int = DEFAULT_FUEL) -> Outcome:
    """Verify ``body`` is a member of ``type``, by refinement and then by the oracle."""
    if free_vars(d.type) | free_vars(d.body):
        names = ", ".join(sorted(free_vars(d.type) | free_vars(d.body)))
        return Error(f"unbound names: {names}", d.span)
    state = ProofState.initial(goal_sequent(MemGoal(d.type, d.body)))
    pipeline = OrElse(Seq(rule("eq/eval"), Auto(DEF_AUTO_DEPTH)), Auto(DEF_AUTO_DEPTH))
    state = run_tactic(state, "root", pipeline)
    if not state.goals:
        return Ok(d.body)
    verdict = check_closed(MemJ(d.type, d.body), fuel)
    if verdict.holds:
        return Ok(d.body)
    if verdict.fails:
        return Error(f"not a member: {verdict.reason}", d.span)
    return _open(state)


def check_signature(sig: Signature, fuel: int = DEFAULT_FUEL) -> CheckReport:
    entries: list[tuple[str, Outcome]] = []
    for d in sig.decls:
        try:
            if isinstance(d, Thm):
                outcome, _ = check_theorem(d, fuel)
            elif isinstance(d, Def):
                outcome = check_def(d, fuel)
            elif isinstance(d, TacticDef):
                continue
            entries.append((d.name, outcome))
        except Exception as e:  # contain per declaration
            entries.append((d.name, Error(f"{type(e).__name__}: {e}", d.span)))
    return CheckReport(tuple(entries))
