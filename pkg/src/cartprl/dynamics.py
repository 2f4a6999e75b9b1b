"""Small-step dynamics, evaluation with fuel, and stability classification."""

from __future__ import annotations

from dataclasses import dataclass

from cartprl.syntax import (
    BASE,
    App,
    Base,
    CircleRec,
    DimAbs,
    DimApp,
    DimName,
    Ff,
    Fst,
    Hole,
    If,
    Lam,
    Loop,
    Pair,
    Snd,
    Term,
    Tt,
    Var,
    dim_subst,
    is_constant,
    map_children,
    subst_term,
)

DEFAULT_FUEL = 10_000


@dataclass(frozen=True)
class Stepped:
    next: Term
    stable: bool


@dataclass(frozen=True)
class IsValue:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str
    term: Term


StepResult = Stepped | IsValue | Stuck


class EvalError(Exception):
    pass


class FuelExhausted(EvalError):
    def __init__(self, fuel: int):
        super().__init__(f"fuel exhausted after {fuel} steps")
        self.fuel = fuel


class StuckAt(EvalError):
    def __init__(self, term: Term, reason: str):
        super().__init__(f"stuck at {term}: {reason}")
        self.term = term
        self.reason = reason


class ContractError(Exception):
    """A precondition of an operation was violated by its caller."""


_VALUE_TYPES = (
    "FunType",
    "Lam",
    "PairType",
    "Pair",
    "Bool",
    "Tt",
    "Ff",
    "Circle",
    "Base",
    "PathType",
    "DimAbs",
    "ExactEq",
    "Ax",
)


def is_value(t: Term) -> bool:
    if type(t).__name__ in _VALUE_TYPES:
        return True
    return isinstance(t, Loop) and isinstance(t.r, DimName)


def step(t: Term) -> StepResult:
    """One step of the deterministic small-step relation.

    Congruence rules reduce the principal argument first; the stability flag
    of a congruence step is that of the inner redex.
    """
    if is_value(t):
        return IsValue()
    if isinstance(t, Loop):
        return Stepped(BASE, True)
    if isinstance(t, App):
        if isinstance(t.fun, Lam):
            return Stepped(subst_term(t.fun.body, t.arg, t.fun.var), True)
        return _congruence(t.fun, lambda m: App(m, t.arg), t)
    if isinstance(t, (Fst, Snd)):
        if isinstance(t.arg, Pair):
            return Stepped(t.arg.fst if isinstance(t, Fst) else t.arg.snd, True)
        return _congruence(t.arg, type(t), t)
    if isinstance(t, If):
        if isinstance(t.cond, Tt):
            return Stepped(t.then, True)
        if isinstance(t.cond, Ff):
            return Stepped(t.else_, True)
        return _congruence(t.cond, lambda m: If(m, t.then, t.else_), t)
    if isinstance(t, CircleRec):
        if isinstance(t.target, Base):
            return Stepped(t.base_case, True)
        if isinstance(t.target, Loop) and isinstance(t.target.r, DimName):
            # target dimension is free here, so the loop rule is never stable
            return Stepped(dim_subst(t.loop_case, {t.dvar: t.target.r}), False)
        return _congruence(
            t.target,
            lambda m: CircleRec(t.var, t.motive, m, t.base_case, t.dvar, t.loop_case),
            t,
        )
    if isinstance(t, DimApp):
        if isinstance(t.fun, DimAbs):
            return Stepped(dim_subst(t.fun.body, {t.fun.dvar: t.r}), is_constant(t.r))
        return _congruence(t.fun, lambda m: DimApp(m, t.r), t)
    if isinstance(t, Var):
        return Stuck("free variable", t)
    if isinstance(t, Hole):
        return Stuck("unsolved metavariable", t)
    return Stuck("no rule applies", t)


def _congruence(sub: Term, rebuild, whole: Term) -> StepResult:
    r = step(sub)
    if isinstance(r, Stepped):
        return Stepped(rebuild(r.next), r.stable)
    if isinstance(r, Stuck):
        return r
    return Stuck(f"{type(sub).__name__} value in eliminated position", whole)


def evaluate(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Step ``t`` until it is a value.

    Raises ``FuelExhausted`` if more than ``fuel`` steps are needed and
    ``StuckAt`` for a non-value with no applicable rule.
    """
    for _ in range(fuel + 1):
        r = step(t)
        if isinstance(r, IsValue):
            return t
        if isinstance(r, Stuck):
            raise StuckAt(r.term, r.reason)
        t = r.next
    raise FuelExhausted(fuel)


@dataclass(frozen=True)
class TraceEntry:
    term: Term
    stable: bool | None  # None for the initial term


def trace(t: Term, fuel: int = DEFAULT_FUEL) -> list[TraceEntry]:
    """The evaluation sequence of ``t``, starting with ``t`` itself.

    Stops at a value, at a stuck term, or when fuel runs out; the caller can
    tell which by stepping the last entry.
    """
    out = [TraceEntry(t, None)]
    for _ in range(fuel):
        r = step(t)
        if not isinstance(r, Stepped):
            break
        t = r.next
        out.append(TraceEntry(t, r.stable))
    return out


# ---------------------------------------------------------------------------
# Stability


def _find_redex(t: Term, bound: frozenset[str]) -> tuple[Term, frozenset[str]] | None:
    """Locate the redex that evaluation of ``t`` contracts next.

    A path abstraction is entered, recording its name as bound, so that an
    inner redex can be analysed under its binder.
    """
    if isinstance(t, DimAbs):
        return _find_redex(t.body, bound | {t.dvar})
    if is_value(t):
        return None
    if isinstance(t, Loop):
        return t, bound
    if isinstance(t, App):
        return (t, bound) if isinstance(t.fun, Lam) else _find_redex_strict(t.fun, bound)
    if isinstance(t, (Fst, Snd)):
        return (t, bound) if isinstance(t.arg, Pair) else _find_redex_strict(t.arg, bound)
    if isinstance(t, If):
        if isinstance(t.cond, (Tt, Ff)):
            return t, bound
        return _find_redex_strict(t.cond, bound)
    if isinstance(t, CircleRec):
        if isinstance(t.target, Base) or (
            isinstance(t.target, Loop) and isinstance(t.target.r, DimName)
        ):
            return t, bound
        return _find_redex_strict(t.target, bound)
    if isinstance(t, DimApp):
        return (t, bound) if isinstance(t.fun, DimAbs) else _find_redex_strict(t.fun, bound)
    return None


def _find_redex_strict(t: Term, bound: frozenset[str]):
    # evaluation contexts never pass under binders
    if is_value(t):
        return None
    return _find_redex(t, bound)


def _rule_stable(redex: Term, bound: frozenset[str]) -> bool:
    if isinstance(redex, (App, Fst, Snd, If)):
        return True
    if isinstance(redex, Loop):
        return True
    if isinstance(redex, CircleRec):
        if isinstance(redex.target, Base):
            return True
        return redex.target.r.name in bound
    if isinstance(redex, DimApp):
        return is_constant(redex.r) or redex.r.name in bound
    return False


def redex(t: Term) -> Term | None:
    """The subterm that the next step of ``t`` contracts, or ``None`` for values and stuck terms."""
    found = _find_redex(t, frozenset())
    return None if found is None else found[0]


def classify_stability(t: Term) -> bool:
    """Whether the next computation step of ``t`` commutes with dimension substitution.

    Beta, projection and conditional rules, ``loop 0/1 -> base`` and
    ``S1-rec`` on ``base`` are always stable.  A rule that consumes a
    dimension argument is stable when that argument is a constant or a name
    bound above the redex.  Sound but deliberately incomplete.
    """
    found = _find_redex(t, frozenset())
    if found is None:
        raise ContractError(f"no redex in {t}")
    return _rule_stable(*found)


def normalize(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Normalize ``t`` everywhere, including under binders, using only stable steps.

    Under a binder the bound name is treated as free, so a step is taken only
    if it commutes with every substitution, including later instantiation of
    that binder.  Raises ``FuelExhausted`` when the step budget runs out.
    """
    budget = [fuel]

    def go(t: Term) -> Term:
        while True:
            r = step(t)
            while isinstance(r, Stepped) and r.stable:
                budget[0] -= 1
                if budget[0] < 0:
                    raise FuelExhausted(fuel)
                t = r.next
                r = step(t)
            t2 = map_children(t, go)
            if t2 == t:
                return t
            t = t2
            r = step(t)
            if not (isinstance(r, Stepped) and r.stable):
                return t

    return go(t)
