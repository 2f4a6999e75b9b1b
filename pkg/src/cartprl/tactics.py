"""Tactic combinators, bounded automation, and surface-notation elaboration."""

from __future__ import annotations

from dataclasses import dataclass, replace

from cartprl.dynamics import FuelExhausted, normalize
from cartprl.refiner import (
    FORMATION_RULES,
    INTRO_RULES,
    App,
    EqMemGoal,
    EqTypeGoal,
    MemGoal,
    ProofState,
    RuleApplication,
    RuleError,
    Sequent,
    TrueGoal,
    TypeGoal,
    apply_rule,
    concl_terms,
)
from cartprl.syntax import (
    Bool,
    Circle,
    DimName,
    ExactEq,
    FunType,
    PairType,
    PathType,
    Term,
    Var,
    free_vars,
)

DEFAULT_AUTO_DEPTH = 6


class Tactic:
    def __str__(self) -> str:
        return show_tactic(self)


@dataclass(frozen=True, eq=True)
class Rule(Tactic):
    app: RuleApplication


@dataclass(frozen=True)
class Seq(Tactic):
    first: Tactic
    then: Tactic


@dataclass(frozen=True)
class SeqList(Tactic):
    first: Tactic
    branches: tuple[Tactic, ...]


@dataclass(frozen=True)
class OrElse(Tactic):
    first: Tactic
    second: Tactic


@dataclass(frozen=True)
class Auto(Tactic):
    depth: int = DEFAULT_AUTO_DEPTH


@dataclass(frozen=True)
class Id(Tactic):
    pass


@dataclass(frozen=True)
class Fail(Tactic):
    msg: str = "fail"


@dataclass(frozen=True)
class With(Tactic):
    """Run ``body``, naming the next hypothesis (or dimension) it introduces."""

    name: str
    body: Tactic


@dataclass(frozen=True)
class Dispatch(Tactic):
    """Choose a tactic by the head of the goal's type at run time."""

    cases: tuple[tuple[str, Tactic], ...]


@dataclass(frozen=True)
class SurfaceLam(Tactic):
    names: tuple[str, ...]
    body: Tactic


@dataclass(frozen=True)
class SurfaceUse(Tactic):
    name: str


@dataclass(frozen=True)
class SurfaceTuple(Tactic):
    items: tuple[Tactic, ...]


def rule(name: str, **kw) -> Rule:
    return Rule(RuleApplication(name, **kw))


class TacticFailure(Exception):
    def __init__(self, path: tuple[str, ...], reason: str):
        super().__init__(f"{' > '.join(path) or '<root>'}: {reason}")
        self.path = path
        self.reason = reason


class ArityMismatch(TacticFailure):
    def __init__(self, path: tuple[str, ...], expected: int, got: int):
        super().__init__(path, f"{expected} branches for {got} subgoals")
        self.expected = expected
        self.got = got


# ---------------------------------------------------------------------------
# Elaboration


def elaborate_surface(t: Tactic) -> Tactic:
    """Expand ``lam``, ``use`` and ``{...}`` into rule-level tactics.

    ``lam x y => t`` becomes nested intro layers, each choosing ``pi/intro`` or
    ``path/intro`` by the goal head, naming the new hypothesis and finishing
    the auxiliary subgoals with ``auto``.  ``{t1, t2}`` is ``sigma/intro``
    with ``t1``, ``t2`` on the components and ``auto`` on the family.
    """
    if isinstance(t, SurfaceLam):
        if not t.names:
            return elaborate_surface(t.body)
        x, rest = t.names[0], t.names[1:]
        inner = elaborate_surface(SurfaceLam(rest, t.body))
        return Dispatch(
            (
                ("pi", SeqList(With(x, rule("pi/intro")), (inner, Auto()))),
                ("path", SeqList(With(x, rule("path/intro")), (inner, Auto(), Auto()))),
            )
        )
    if isinstance(t, SurfaceUse):
        return rule("hypothesis", hyp=t.name)
    if isinstance(t, SurfaceTuple):
        if not t.items:
            return Id()
        if len(t.items) == 1:
            return elaborate_surface(t.items[0])
        rest = SurfaceTuple(t.items[1:])
        return SeqList(rule("sigma/intro"), (elaborate_surface(t.items[0]), elaborate_surface(rest), Auto()))
    if isinstance(t, Seq):
        return Seq(elaborate_surface(t.first), elaborate_surface(t.then))
    if isinstance(t, SeqList):
        return SeqList(elaborate_surface(t.first), tuple(elaborate_surface(b) for b in t.branches))
    if isinstance(t, OrElse):
        return OrElse(elaborate_surface(t.first), elaborate_surface(t.second))
    if isinstance(t, With):
        return With(t.name, elaborate_surface(t.body))
    if isinstance(t, Dispatch):
        return Dispatch(tuple((k, elaborate_surface(v)) for k, v in t.cases))
    return t


# ---------------------------------------------------------------------------
# Running tactics


def _head(seq: Sequent) -> str:
    c = seq.concl
    ty = c.ty if isinstance(c, (TrueGoal, MemGoal, EqMemGoal, TypeGoal)) else c.left
    try:
        ty = normalize(ty)
    except FuelExhausted:
        return "?"
    return {
        FunType: "pi",
        PairType: "sigma",
        PathType: "path",
        Bool: "bool",
        Circle: "circle",
        ExactEq: "eq",
    }.get(type(ty), "?")


def run_tactic(state: ProofState, goal: str, t: Tactic) -> ProofState:
    """Run ``t`` on ``goal``.  The result can be undone as a single step.

    The journal of the result lists every rule application the tactic made.
    """
    t = elaborate_surface(t)
    new, _ = _run(state, goal, t, (), None)
    return replace(new, previous=state)


def _run(state: ProofState, goal: str, t: Tactic, path: tuple[str, ...], name: str | None):
    if isinstance(t, Rule):
        app = t.app
        if name is not None and app.binder is None:
            app = replace(app, binder=name)
        try:
            new = apply_rule(state, goal, app)
        except RuleError as e:
            raise TacticFailure(path + (str(t.app),), f"{type(e).__name__}: {e}") from None
        return new, list(new.nodes[goal].children)
    if isinstance(t, Id):
        return state, [goal]
    if isinstance(t, Fail):
        raise TacticFailure(path + ("fail",), t.msg)
    if isinstance(t, Seq):
        state, produced = _run(state, goal, t.first, path + ("seq.1",), name)
        out = []
        for g in produced:
            state, more = _run(state, g, t.then, path + ("seq.2",), None)
            out.extend(more)
        return state, out
    if isinstance(t, SeqList):
        state, produced = _run(state, goal, t.first, path + ("seq.1",), name)
        if len(produced) != len(t.branches):
            raise ArityMismatch(path + ("seq",), len(t.branches), len(produced))
        out = []
        for i, (g, branch) in enumerate(zip(produced, t.branches)):
            state, more = _run(state, g, branch, path + (f"branch.{i}",), None)
            out.extend(more)
        return state, out
    if isinstance(t, OrElse):
        try:
            return _run(state, goal, t.first, path + ("or.1",), name)
        except TacticFailure:
            return _run(state, goal, t.second, path + ("or.2",), name)
    if isinstance(t, Auto):
        new = auto(state, goal, t.depth)
        return new, [goal] if goal in new.goals else []
    if isinstance(t, With):
        return _run(state, goal, t.body, path + (f"with {t.name}",), t.name)
    if isinstance(t, Dispatch):
        head = _head(state.sequent(goal))
        for key, branch in t.cases:
            if key == head:
                return _run(state, goal, branch, path + (f"case {key}",), name)
        raise TacticFailure(path + ("dispatch",), f"no case for a goal of shape {head}")
    if isinstance(t, (SurfaceLam, SurfaceUse, SurfaceTuple)):
        return _run(state, goal, elaborate_surface(t), path, name)
    raise TypeError(f"not a tactic: {t!r}")


# ---------------------------------------------------------------------------
# Automation


def _nf(t: Term) -> Term:
    try:
        return normalize(t)
    except FuelExhausted:
        return t


def candidates(seq: Sequent) -> list[RuleApplication]:
    """Rules ``auto`` tries, in its fixed order.

    Equality by stable computation, then type formation, then hypotheses
    (most recent first), then introduction rules, then simplification, then
    case splits on boolean hypotheses the goal depends on.
    """
    out = [RuleApplication("eq/refl")]
    c = seq.concl
    if isinstance(c, (TypeGoal, EqTypeGoal)):
        out += [RuleApplication(r) for r in FORMATION_RULES]
    out += [RuleApplication("hypothesis", hyp=h.name) for h in reversed(seq.hyps)]
    out += [RuleApplication(r) for r in INTRO_RULES]
    if isinstance(c, (MemGoal, EqMemGoal)):
        out += [RuleApplication("circle/intro/loop", dim=DimName(i)) for i in seq.dims]
    out.append(RuleApplication("eq/eval"))
    terms = [_nf(t) for t in concl_terms(c)]
    for t in terms[1:] if isinstance(c, (MemGoal, EqMemGoal)) else []:
        if isinstance(t, App) and isinstance(t.fun, Var) and seq.lookup(t.fun.name):
            out.append(RuleApplication("pi/elim", hyp=t.fun.name, term=t.arg))
            break
    mentioned = set().union(*(free_vars(t) for t in terms))
    for h in reversed(seq.hyps):
        if h.name in mentioned and isinstance(_nf(h.ty), Bool):
            out.append(RuleApplication("bool/elim", hyp=h.name))
    return out


def auto(state: ProofState, goal: str, depth: int = DEFAULT_AUTO_DEPTH) -> ProofState:
    """Bounded search that either closes ``goal`` completely or leaves it untouched."""
    if depth <= 0 or goal not in state.goals:
        return state
    seq = state.sequent(goal)
    for app in candidates(seq):
        try:
            s = apply_rule(state, goal, app)
        except RuleError:
            continue
        children = s.nodes[goal].children
        for g in children:
            s = auto(s, g, depth - 1)
            if g in s.goals:
                break
        if not any(g in s.goals for g in children):
            return s
    return state


# ---------------------------------------------------------------------------
# Printing


def show_tactic(t: Tactic) -> str:
    if isinstance(t, Rule):
        return str(t.app)
    if isinstance(t, Id):
        return "id"
    if isinstance(t, Fail):
        return "fail" if t.msg == "fail" else f"fail {t.msg!r}"
    if isinstance(t, Auto):
        return "auto" if t.depth == DEFAULT_AUTO_DEPTH else f"auto {t.depth}"
    if isinstance(t, Seq):
        return f"{_paren(t.first, Seq)}; {_paren(t.then, OrElse)}"
    if isinstance(t, SeqList):
        inner = ", ".join(show_tactic(b) for b in t.branches)
        return f"{_paren(t.first, Seq)}; [{inner}]"
    if isinstance(t, OrElse):
        return f"{_paren(t.first, Rule)} | {_paren(t.second, OrElse)}"
    if isinstance(t, With):
        return f"with {t.name} => {show_tactic(t.body)}"
    if isinstance(t, Dispatch):
        return "dispatch {" + "; ".join(f"{k}: {show_tactic(v)}" for k, v in t.cases) + "}"
    if isinstance(t, SurfaceLam):
        return f"lam {' '.join(t.names)} => {show_tactic(t.body)}"
    if isinstance(t, SurfaceUse):
        return f"use {t.name}"
    if isinstance(t, SurfaceTuple):
        return "{" + ", ".join(show_tactic(i) for i in t.items) + "}"
    raise TypeError(f"not a tactic: {t!r}")


_LEVEL = {Seq: 0, SeqList: 0, OrElse: 1}


def _paren(t: Tactic, ctx: type) -> str:
    s = show_tactic(t)
    mine = _LEVEL.get(type(t), 3 if not isinstance(t, (With, SurfaceLam)) else -1)
    need = _LEVEL.get(ctx, 2)
    return f"({s})" if mine < need else s
