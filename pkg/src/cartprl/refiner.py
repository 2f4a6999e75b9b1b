"""Proof refinement: sequents, the rule catalog, proof states and extraction.

A rule decomposes one sequent into an ordered telescope of subgoals and
returns an extract built from metavariables (``Hole``) standing for the
subgoals' realizers.  Later subgoals may mention earlier holes, so their
statements are read back through the current solutions before use.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Callable, Mapping, Sequence

from cartprl.dynamics import DEFAULT_FUEL, FuelExhausted, normalize
from cartprl.semantics import Kind
from cartprl.syntax import (
    AX,
    BASE,
    FF,
    ONE,
    TT,
    ZERO,
    App,
    Ax,
    Bool,
    Circle,
    CircleRec,
    DimAbs,
    DimApp,
    DimExpr,
    DimName,
    ExactEq,
    Fst,
    FunType,
    Hole,
    If,
    Lam,
    Loop,
    Pair,
    PairType,
    PathType,
    Snd,
    Term,
    Var,
    alpha_eq,
    dim_subst,
    fill_holes,
    fresh,
    subst_term,
)

# ---------------------------------------------------------------------------
# Sequents


@dataclass(frozen=True)
class TrueGoal:
    ty: Term

    def __str__(self) -> str:
        return f"{self.ty} true"


@dataclass(frozen=True)
class TypeGoal:
    ty: Term
    kind: Kind = Kind.KAN

    def __str__(self) -> str:
        return f"{self.ty} type [{self.kind}]"


@dataclass(frozen=True)
class EqTypeGoal:
    left: Term
    right: Term
    kind: Kind = Kind.KAN

    def __str__(self) -> str:
        return f"{self.left} = {self.right} type [{self.kind}]"


@dataclass(frozen=True)
class MemGoal:
    ty: Term
    term: Term

    def __str__(self) -> str:
        return f"{self.term} in {self.ty}"


@dataclass(frozen=True)
class EqMemGoal:
    ty: Term
    left: Term
    right: Term

    def __str__(self) -> str:
        return f"{self.left} = {self.right} in {self.ty}"


Conclusion = TrueGoal | TypeGoal | EqTypeGoal | MemGoal | EqMemGoal


def concl_map(c: Conclusion, f: Callable[[Term], Term]) -> Conclusion:
    if isinstance(c, TrueGoal):
        return TrueGoal(f(c.ty))
    if isinstance(c, TypeGoal):
        return TypeGoal(f(c.ty), c.kind)
    if isinstance(c, EqTypeGoal):
        return EqTypeGoal(f(c.left), f(c.right), c.kind)
    if isinstance(c, MemGoal):
        return MemGoal(f(c.ty), f(c.term))
    return EqMemGoal(f(c.ty), f(c.left), f(c.right))


def concl_terms(c: Conclusion) -> list[Term]:
    out: list[Term] = []
    concl_map(c, lambda t: out.append(t) or t)
    return out


def eq_mem(ty: Term, m: Term, n: Term) -> Conclusion:
    """``m = n in ty``, collapsing to a membership goal when both sides coincide."""
    return MemGoal(ty, m) if alpha_eq(m, n) else EqMemGoal(ty, m, n)


def eq_type(a: Term, b: Term, kind: Kind) -> Conclusion:
    return TypeGoal(a, kind) if alpha_eq(a, b) else EqTypeGoal(a, b, kind)


@dataclass(frozen=True)
class Hyp:
    name: str
    ty: Term
    kind: Kind = Kind.KAN

    def __str__(self) -> str:
        return f"{self.name} : {self.ty}"


@dataclass(frozen=True)
class Sequent:
    dims: tuple[str, ...]
    hyps: tuple[Hyp, ...]
    concl: Conclusion

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(h.name for h in self.hyps)

    def lookup(self, name: str) -> Hyp | None:
        for h in reversed(self.hyps):
            if h.name == name:
                return h
        return None

    def extend(self, name: str, ty: Term, concl: Conclusion, kind: Kind = Kind.KAN) -> "Sequent":
        return Sequent(self.dims, self.hyps + (Hyp(name, ty, kind),), concl)

    def goal(self, concl: Conclusion) -> "Sequent":
        return Sequent(self.dims, self.hyps, concl)

    def with_dim(self, i: str, concl: Conclusion) -> "Sequent":
        return Sequent(self.dims + (i,), self.hyps, concl)

    def map_terms(self, f: Callable[[Term], Term]) -> "Sequent":
        hyps = tuple(Hyp(h.name, f(h.ty), h.kind) for h in self.hyps)
        return Sequent(self.dims, hyps, concl_map(self.concl, f))

    def __str__(self) -> str:
        parts = []
        if self.dims:
            parts.append("[" + ", ".join(self.dims) + "] ")
        parts.append(", ".join(str(h) for h in self.hyps))
        if self.hyps:
            parts.append(" ")
        parts.append(f">> {self.concl}")
        return "".join(parts)


def goal_sequent(concl: Conclusion | Term, hyps: Sequence[tuple[str, Term]] = (), dims: Sequence[str] = ()) -> Sequent:
    """Convenience constructor; a bare term means ``term true``."""
    if isinstance(concl, Term):
        concl = TrueGoal(concl)
    return Sequent(tuple(dims), tuple(Hyp(x, a) for x, a in hyps), concl)


# ---------------------------------------------------------------------------
# Errors


class RuleError(Exception):
    pass


class RuleMismatch(RuleError):
    pass


class SideConditionFailed(RuleError):
    pass


class BadArgument(RuleError):
    pass


class IncompleteError(Exception):
    def __init__(self, open_goals: Sequence[str]):
        super().__init__(f"open goals: {', '.join(open_goals)}")
        self.open_goals = list(open_goals)


# ---------------------------------------------------------------------------
# Algorithmic equality


def algorithmic_eq(dims, hyps, a: Term, b: Term, fuel: int = DEFAULT_FUEL) -> bool:
    """Conservative equality: normalize both sides by stable steps, compare up to alpha.

    ``dims`` and ``hyps`` describe the context; they do not influence the
    comparison since only untyped, stable computation is used.
    """
    try:
        return alpha_eq(normalize(a, fuel), normalize(b, fuel))
    except FuelExhausted:
        return False


def _nf(t: Term) -> Term:
    try:
        return normalize(t)
    except FuelExhausted:
        return t


# ---------------------------------------------------------------------------
# Rule applications and the catalog


@dataclass(frozen=True)
class RuleApplication:
    name: str
    hyp: str | None = None
    term: Term | None = None
    dim: DimExpr | None = None
    binder: str | None = None  # name for the hypothesis or dimension the rule introduces

    def __str__(self) -> str:
        parts = [self.name]
        if self.hyp is not None:
            parts.append(self.hyp)
        if self.dim is not None:
            parts.append(str(self.dim))
        if self.term is not None:
            parts.append(f"({self.term})")
        return " ".join(parts)


class _Alloc:
    """Allocates metavariables while a rule runs."""

    def __init__(self, counter: int):
        self.counter = counter
        self.subgoals: list[tuple[Hole, Sequent]] = []

    def goal(self, seq: Sequent) -> Hole:
        self.counter += 1
        h = Hole(f"g{self.counter}", seq.names, seq.dims)
        self.subgoals.append((h, seq))
        return h


RuleFn = Callable[[Sequent, RuleApplication, _Alloc], Term]


@dataclass(frozen=True)
class RuleSpec:
    name: str
    args: tuple[str, ...]  # "hyp", "dim", "term"
    description: str
    fn: RuleFn


CATALOG: dict[str, RuleSpec] = {}


def _rule(name: str, description: str, args: tuple[str, ...] = ()):
    def deco(fn: RuleFn) -> RuleFn:
        CATALOG[name] = RuleSpec(name, args, description, fn)
        return fn

    return deco


def _mem_parts(c: Conclusion):
    if isinstance(c, MemGoal):
        return c.ty, c.term, c.term
    if isinstance(c, EqMemGoal):
        return c.ty, c.left, c.right
    return None


def _type_parts(c: Conclusion):
    if isinstance(c, TypeGoal):
        return c.ty, c.ty, c.kind
    if isinstance(c, EqTypeGoal):
        return c.left, c.right, c.kind
    return None


def _fresh_var(seq: Sequent, app: RuleApplication, default: str) -> str:
    base = app.binder or (default if default != "_" else "x")
    return fresh(base, set(seq.names))


def _fresh_dim(seq: Sequent, app: RuleApplication, default: str, avoid=()) -> str:
    base = app.binder or (default if default != "_" else "i")
    return fresh(base, set(seq.dims) | set(avoid))


def _hyp(seq: Sequent, app: RuleApplication) -> Hyp:
    if app.hyp is None:
        raise BadArgument(f"{app.name} needs a hypothesis name")
    h = seq.lookup(app.hyp)
    if h is None:
        raise BadArgument(f"unknown hypothesis {app.hyp}")
    return h


def _dim_arg(seq: Sequent, app: RuleApplication) -> DimExpr:
    r = app.dim
    if r is None:
        raise BadArgument(f"{app.name} needs a dimension argument")
    if isinstance(r, DimName) and r.name not in seq.dims:
        raise BadArgument(f"dimension {r} is not in scope")
    return r


def _expect(cond: bool, msg: str, exc=RuleMismatch) -> None:
    if not cond:
        raise exc(msg)


# -- booleans ---------------------------------------------------------------


def _bool_intro(value: Term):
    def fn(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
        c = seq.concl
        if isinstance(c, TrueGoal):
            _expect(isinstance(_nf(c.ty), Bool), f"goal is not bool: {c}")
            return value
        parts = _mem_parts(c)
        _expect(parts is not None, f"{app.name} does not apply to {c}")
        ty, m, n = parts
        _expect(isinstance(_nf(ty), Bool), f"type is not bool: {ty}")
        _expect(alpha_eq(_nf(m), value) and alpha_eq(_nf(n), value), f"members are not {value}")
        return AX

    return fn


_rule("bool/intro/true", "A true (A = bool), or tt in bool")(_bool_intro(TT))
_rule("bool/intro/false", "A true (A = bool), or ff in bool")(_bool_intro(FF))


@_rule("bool/elim", "case on a boolean hypothesis x", ("hyp",))
def _bool_elim(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    h = _hyp(seq, app)
    _expect(isinstance(_nf(h.ty), Bool), f"hypothesis {h.name} is not boolean")
    cases = []
    for v in (TT, FF):
        cases.append(alloc.goal(_instantiate(seq, h.name, v)))
    motive = _motive(seq.concl)
    if motive is not None:
        alloc.goal(seq.goal(TypeGoal(motive, Kind.KAN)))
    if isinstance(seq.concl, TrueGoal):
        return If(Var(h.name), cases[0], cases[1])
    return AX


def _instantiate(seq: Sequent, x: str, v: Term) -> Sequent:
    """Replace ``x`` by ``v`` in the conclusion and in hypotheses after ``x``."""
    hyps = []
    seen = False
    for h in seq.hyps:
        if seen:
            h = Hyp(h.name, subst_term(h.ty, v, x), h.kind)
        if h.name == x:
            seen = True
        hyps.append(h)
    return Sequent(seq.dims, tuple(hyps), concl_map(seq.concl, lambda t: subst_term(t, v, x)))


def _motive(c: Conclusion) -> Term | None:
    if isinstance(c, TrueGoal):
        return c.ty
    parts = _mem_parts(c)
    return parts[0] if parts else None


# -- dependent functions ----------------------------------------------------


@_rule("pi/intro", "(x : A) -> B true, or M = N in (x : A) -> B")
def _pi_intro(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    c = seq.concl
    ty = c.ty if isinstance(c, TrueGoal) else (_mem_parts(c) or (None,))[0]
    _expect(ty is not None, f"pi/intro does not apply to {c}")
    ty = _nf(ty)
    _expect(isinstance(ty, FunType), f"not a function type: {ty}")
    x = _fresh_var(seq, app, ty.var)
    cod = subst_term(ty.cod, Var(x), ty.var)
    if isinstance(c, TrueGoal):
        body = alloc.goal(seq.extend(x, ty.dom, TrueGoal(cod)))
        alloc.goal(seq.goal(TypeGoal(ty.dom, Kind.KAN)))
        return Lam(x, body)
    _, m, n = _mem_parts(c)
    alloc.goal(seq.extend(x, ty.dom, eq_mem(cod, App(m, Var(x)), App(n, Var(x)))))
    alloc.goal(seq.goal(TypeGoal(ty.dom, Kind.KAN)))
    return AX


@_rule("pi/elim", "apply function hypothesis f to a witness M", ("hyp", "term"))
def _pi_elim(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    h = _hyp(seq, app)
    fty = _nf(h.ty)
    _expect(isinstance(fty, FunType), f"hypothesis {h.name} is not a function")
    if app.term is None:
        raise BadArgument("pi/elim needs a witness term")
    result = subst_term(fty.cod, app.term, fty.var)
    c = seq.concl
    if isinstance(c, TrueGoal):
        _expect(algorithmic_eq(seq.dims, seq.hyps, c.ty, result), f"{c.ty} does not match {result}", SideConditionFailed)
        alloc.goal(seq.goal(MemGoal(fty.dom, app.term)))
        return App(Var(h.name), app.term)
    parts = _mem_parts(c)
    _expect(parts is not None, f"pi/elim does not apply to {c}")
    ty, m, n = parts
    m, n = _nf(m), _nf(n)
    _expect(
        isinstance(m, App) and isinstance(n, App) and m.fun == Var(h.name) and n.fun == Var(h.name),
        f"members are not applications of {h.name}",
    )
    result = subst_term(fty.cod, m.arg, fty.var)
    _expect(algorithmic_eq(seq.dims, seq.hyps, ty, result), f"{ty} does not match {result}", SideConditionFailed)
    alloc.goal(seq.goal(eq_mem(fty.dom, m.arg, n.arg)))
    return AX


# -- dependent pairs --------------------------------------------------------


@_rule("sigma/intro", "(x : A) * B true, or M = N in (x : A) * B")
def _sigma_intro(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    c = seq.concl
    ty = c.ty if isinstance(c, TrueGoal) else (_mem_parts(c) or (None,))[0]
    _expect(ty is not None, f"sigma/intro does not apply to {c}")
    ty = _nf(ty)
    _expect(isinstance(ty, PairType), f"not a pair type: {ty}")
    x = _fresh_var(seq, app, ty.var)
    family = subst_term(ty.snd, Var(x), ty.var)
    if isinstance(c, TrueGoal):
        first = alloc.goal(seq.goal(TrueGoal(ty.fst)))
        second = alloc.goal(seq.goal(TrueGoal(subst_term(ty.snd, first, ty.var))))
        alloc.goal(seq.extend(x, ty.fst, TypeGoal(family, Kind.KAN)))
        return Pair(first, second)
    _, m, n = _mem_parts(c)
    alloc.goal(seq.goal(eq_mem(ty.fst, Fst(m), Fst(n))))
    alloc.goal(seq.goal(eq_mem(subst_term(ty.snd, Fst(m), ty.var), Snd(m), Snd(n))))
    alloc.goal(seq.extend(x, ty.fst, TypeGoal(family, Kind.KAN)))
    return AX


@_rule("sigma/elim", "split a pair hypothesis p into its components", ("hyp",))
def _sigma_elim(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    h = _hyp(seq, app)
    pty = _nf(h.ty)
    _expect(isinstance(pty, PairType), f"hypothesis {h.name} is not a pair")
    a = fresh(f"{h.name}1", set(seq.names))
    b = fresh(f"{h.name}2", set(seq.names) | {a})
    pair = Pair(Var(a), Var(b))
    concl = concl_map(seq.concl, lambda t: subst_term(t, pair, h.name))
    inner = Sequent(
        seq.dims,
        seq.hyps + (Hyp(a, pty.fst), Hyp(b, subst_term(pty.snd, Var(a), pty.var))),
        concl,
    )
    hole = alloc.goal(inner)
    if isinstance(seq.concl, TrueGoal):
        p = Var(h.name)
        return App(App(Lam(a, Lam(b, hole)), Fst(p)), Snd(p))
    return AX


# -- paths ------------------------------------------------------------------


@_rule("path/intro", "path [i] A P0 P1 true, or M = N in path [i] A P0 P1")
def _path_intro(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    c = seq.concl
    ty = c.ty if isinstance(c, TrueGoal) else (_mem_parts(c) or (None,))[0]
    _expect(ty is not None, f"path/intro does not apply to {c}")
    ty = _nf(ty)
    _expect(isinstance(ty, PathType), f"not a path type: {ty}")
    k = _fresh_dim(seq, app, ty.dvar)
    line = dim_subst(ty.ty, {ty.dvar: DimName(k)})
    faces = [(ZERO, ty.left), (ONE, ty.right)]
    if isinstance(c, TrueGoal):
        body = alloc.goal(seq.with_dim(k, TrueGoal(line)))
        abs_ = DimAbs(k, body)
        for end, target in faces:
            alloc.goal(seq.goal(eq_mem(dim_subst(ty.ty, {ty.dvar: end}), DimApp(abs_, end), target)))
        return abs_
    _, m, n = _mem_parts(c)
    alloc.goal(seq.with_dim(k, eq_mem(line, DimApp(m, DimName(k)), DimApp(n, DimName(k)))))
    for end, target in faces:
        alloc.goal(seq.goal(eq_mem(dim_subst(ty.ty, {ty.dvar: end}), DimApp(m, end), target)))
    return AX


@_rule("path/app", "apply path hypothesis p at dimension r", ("hyp", "dim"))
def _path_app(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    h = _hyp(seq, app)
    pty = _nf(h.ty)
    _expect(isinstance(pty, PathType), f"hypothesis {h.name} is not a path")
    r = _dim_arg(seq, app)
    c = seq.concl
    _expect(isinstance(c, TrueGoal), "path/app proves a 'true' goal")
    want = dim_subst(pty.ty, {pty.dvar: r})
    _expect(algorithmic_eq(seq.dims, seq.hyps, c.ty, want), f"{c.ty} does not match {want}", SideConditionFailed)
    return DimApp(Var(h.name), r)


# -- circle -----------------------------------------------------------------


def _circle_member(seq: Sequent, app: RuleApplication, expected: Term) -> Term:
    c = seq.concl
    if isinstance(c, TrueGoal):
        _expect(isinstance(_nf(c.ty), Circle), f"goal is not S1: {c}")
        return expected
    parts = _mem_parts(c)
    _expect(parts is not None, f"{app.name} does not apply to {c}")
    ty, m, n = parts
    _expect(isinstance(_nf(ty), Circle), f"type is not S1: {ty}")
    _expect(alpha_eq(_nf(m), expected) and alpha_eq(_nf(n), expected), f"members are not {expected}")
    return AX


@_rule("circle/intro/base", "S1 true, or base in S1")
def _circle_base(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    return _circle_member(seq, app, BASE)


@_rule("circle/intro/loop", "S1 true via loop r, or loop r in S1", ("dim",))
def _circle_loop(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    r = _dim_arg(seq, app)
    return _circle_member(seq, app, Loop(r) if isinstance(r, DimName) else BASE)


@_rule("circle/elim", "case on a circle hypothesis x", ("hyp",))
def _circle_elim(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    h = _hyp(seq, app)
    _expect(isinstance(_nf(h.ty), Circle), f"hypothesis {h.name} is not S1")
    k = _fresh_dim(seq, app, "i")
    base_case = alloc.goal(_instantiate(seq, h.name, BASE))
    loop_seq = _instantiate(seq, h.name, Loop(DimName(k)))
    loop_case = alloc.goal(Sequent(seq.dims + (k,), loop_seq.hyps, loop_seq.concl))
    motive = _motive(seq.concl)
    if isinstance(seq.concl, TrueGoal):
        at_base = subst_term(motive, BASE, h.name)
        for end in (ZERO, ONE):
            alloc.goal(seq.goal(eq_mem(at_base, DimApp(DimAbs(k, loop_case), end), base_case)))
    if motive is not None:
        alloc.goal(seq.goal(TypeGoal(motive, Kind.KAN)))
    if isinstance(seq.concl, TrueGoal):
        return CircleRec(h.name, motive, Var(h.name), base_case, k, loop_case)
    return AX


# -- exact equality ---------------------------------------------------------


@_rule("eq/intro", "Eq A M N true, or ax in Eq A M N")
def _eq_intro(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    c = seq.concl
    if isinstance(c, TrueGoal):
        ty = _nf(c.ty)
        _expect(isinstance(ty, ExactEq), f"not an equality type: {ty}")
        alloc.goal(seq.goal(eq_mem(ty.ty, ty.left, ty.right)))
        return AX
    parts = _mem_parts(c)
    _expect(parts is not None, f"eq/intro does not apply to {c}")
    ty, m, n = parts
    ty = _nf(ty)
    _expect(isinstance(ty, ExactEq), f"not an equality type: {ty}")
    _expect(isinstance(_nf(m), Ax) and isinstance(_nf(n), Ax), "members do not compute to ax", SideConditionFailed)
    alloc.goal(seq.goal(eq_mem(ty.ty, ty.left, ty.right)))
    return AX


# -- structural -------------------------------------------------------------


@_rule("hypothesis", "A true from a hypothesis x : A", ("hyp",))
def _hypothesis(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    h = _hyp(seq, app)
    c = seq.concl
    if isinstance(c, TrueGoal):
        _expect(algorithmic_eq(seq.dims, seq.hyps, c.ty, h.ty), f"{h.name} : {h.ty} does not match {c.ty}", SideConditionFailed)
        return Var(h.name)
    parts = _mem_parts(c)
    _expect(parts is not None, f"hypothesis does not apply to {c}")
    ty, m, n = parts
    _expect(alpha_eq(_nf(m), Var(h.name)) and alpha_eq(_nf(n), Var(h.name)), f"members are not {h.name}")
    _expect(algorithmic_eq(seq.dims, seq.hyps, ty, h.ty), f"{h.name} : {h.ty} does not match {ty}", SideConditionFailed)
    return AX


@_rule("eq/refl", "M = N in A when M and N agree by stable computation")
def _eq_refl(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    c = seq.concl
    if isinstance(c, EqMemGoal):
        _expect(algorithmic_eq(seq.dims, seq.hyps, c.left, c.right), f"{c.left} and {c.right} differ", SideConditionFailed)
        alloc.goal(seq.goal(MemGoal(c.ty, _nf(c.left))))
        return AX
    if isinstance(c, EqTypeGoal):
        _expect(algorithmic_eq(seq.dims, seq.hyps, c.left, c.right), f"{c.left} and {c.right} differ", SideConditionFailed)
        alloc.goal(seq.goal(TypeGoal(_nf(c.left), c.kind)))
        return AX
    raise RuleMismatch(f"eq/refl applies to equations, not {c}")


@_rule("eq/symm", "swap the sides of an equation")
def _eq_symm(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    c = seq.concl
    if isinstance(c, EqMemGoal):
        alloc.goal(seq.goal(EqMemGoal(c.ty, c.right, c.left)))
    elif isinstance(c, EqTypeGoal):
        alloc.goal(seq.goal(EqTypeGoal(c.right, c.left, c.kind)))
    else:
        raise RuleMismatch(f"eq/symm applies to equations, not {c}")
    return AX


@_rule("eq/trans", "M = N via M = O and O = N", ("term",))
def _eq_trans(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    if app.term is None:
        raise BadArgument("eq/trans needs a middle term")
    c = seq.concl
    o = app.term
    if isinstance(c, (EqMemGoal, MemGoal)):
        ty, m, n = _mem_parts(c)
        alloc.goal(seq.goal(eq_mem(ty, m, o)))
        alloc.goal(seq.goal(eq_mem(ty, o, n)))
    elif isinstance(c, (EqTypeGoal, TypeGoal)):
        a, b, kind = _type_parts(c)
        alloc.goal(seq.goal(eq_type(a, o, kind)))
        alloc.goal(seq.goal(eq_type(o, b, kind)))
    else:
        raise RuleMismatch(f"eq/trans applies to equations, not {c}")
    return AX


@_rule("eq/eval", "simplify the conclusion by stable computation")
def _eq_eval(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
    c = seq.concl
    c2 = concl_map(c, _nf)
    if isinstance(c2, EqMemGoal) and alpha_eq(c2.left, c2.right):
        c2 = MemGoal(c2.ty, c2.left)
    if isinstance(c2, EqTypeGoal) and alpha_eq(c2.left, c2.right):
        c2 = TypeGoal(c2.left, c2.kind)
    _expect(c2 != c, "conclusion is already in stable normal form")
    hole = alloc.goal(seq.goal(c2))
    return hole if isinstance(c, TrueGoal) else AX


# -- type formation ---------------------------------------------------------


def _formation(head: type):
    def deco(fn):
        def rule(seq: Sequent, app: RuleApplication, alloc: _Alloc) -> Term:
            parts = _type_parts(seq.concl)
            _expect(parts is not None, f"{app.name} applies to type goals, not {seq.concl}")
            a, b, kind = parts
            a, b = _nf(a), _nf(b)
            _expect(isinstance(a, head) and isinstance(b, head), f"{app.name} does not match {a} / {b}")
            fn(seq, a, b, kind, alloc)
            return AX

        return rule

    return deco


@_rule("bool/form", "bool type")
@_formation(Bool)
def _bool_form(seq, a, b, kind, alloc):
    pass


@_rule("circle/form", "S1 type (not discrete)")
@_formation(Circle)
def _circle_form(seq, a, b, kind, alloc):
    _expect(kind is not Kind.DISCRETE, "S1 has non-trivial paths", SideConditionFailed)


def _binder_form(seq, a, b, kind, alloc, dom, cod):
    alloc.goal(seq.goal(eq_type(dom(a), dom(b), kind)))
    x = fresh(a.var if a.var != "_" else "x", set(seq.names))
    ca = subst_term(cod(a), Var(x), a.var)
    cb = subst_term(cod(b), Var(x), b.var)
    alloc.goal(seq.extend(x, dom(a), eq_type(ca, cb, kind)))


@_rule("pi/form", "(x : A) -> B type")
@_formation(FunType)
def _pi_form(seq, a, b, kind, alloc):
    _binder_form(seq, a, b, kind, alloc, lambda t: t.dom, lambda t: t.cod)


@_rule("sigma/form", "(x : A) * B type")
@_formation(PairType)
def _sigma_form(seq, a, b, kind, alloc):
    _binder_form(seq, a, b, kind, alloc, lambda t: t.fst, lambda t: t.snd)


@_rule("path/form", "path [i] A P0 P1 type")
@_formation(PathType)
def _path_form(seq, a, b, kind, alloc):
    k = fresh(a.dvar, set(seq.dims))
    la = dim_subst(a.ty, {a.dvar: DimName(k)})
    lb = dim_subst(b.ty, {b.dvar: DimName(k)})
    alloc.goal(seq.with_dim(k, eq_type(la, lb, kind)))
    alloc.goal(seq.goal(eq_mem(dim_subst(a.ty, {a.dvar: ZERO}), a.left, b.left)))
    alloc.goal(seq.goal(eq_mem(dim_subst(a.ty, {a.dvar: ONE}), a.right, b.right)))


@_rule("eq/form", "Eq A M N type; Kan kinds need a discrete A")
@_formation(ExactEq)
def _eq_form(seq, a, b, kind, alloc):
    base_kind = Kind.PRE if kind is Kind.PRE else Kind.DISCRETE
    alloc.goal(seq.goal(eq_type(a.ty, b.ty, base_kind)))
    alloc.goal(seq.goal(eq_mem(a.ty, a.left, b.left)))
    alloc.goal(seq.goal(eq_mem(a.ty, a.right, b.right)))


FORMATION_RULES = ("bool/form", "circle/form", "pi/form", "sigma/form", "path/form", "eq/form")
INTRO_RULES = (
    "bool/intro/true",
    "bool/intro/false",
    "circle/intro/base",
    "pi/intro",
    "sigma/intro",
    "path/intro",
    "eq/intro",
)


# ---------------------------------------------------------------------------
# Proof states


@dataclass(frozen=True)
class Node:
    id: str
    sequent: Sequent
    parent: str | None = None
    rule: str | None = None
    children: tuple[str, ...] = ()


@dataclass(frozen=True)
class ProofState:
    goals: tuple[str, ...]
    nodes: Mapping[str, Node]
    solutions: Mapping[str, Term]
    root: str = "root"
    counter: int = 0
    journal: tuple[str, ...] = ()
    previous: "ProofState | None" = field(default=None, repr=False, compare=False)

    @classmethod
    def initial(cls, seq: Sequent) -> "ProofState":
        return cls(("root",), MappingProxyType({"root": Node("root", seq)}), MappingProxyType({}))

    def sequent(self, goal: str) -> Sequent:
        """The goal's sequent with solved metavariables filled in."""
        seq = self.nodes[goal].sequent
        if not self.solutions:
            return seq
        return seq.map_terms(lambda t: fill_holes(t, self.solutions))

    @property
    def extract_term(self) -> Term:
        return fill_holes(Hole(self.root), self.solutions)

    @property
    def complete(self) -> bool:
        return not self.goals


def apply_rule(state: ProofState, goal: str, r: RuleApplication) -> ProofState:
    """Refine ``goal`` by ``r``; returns a new state, leaving ``state`` untouched."""
    if goal not in state.goals:
        raise BadArgument(f"{goal} is not an open goal")
    spec = CATALOG.get(r.name)
    if spec is None:
        raise BadArgument(f"unknown rule {r.name}")
    seq = state.sequent(goal)
    alloc = _Alloc(state.counter)
    extract = spec.fn(seq, r, alloc)
    new_ids = tuple(h.id for h, _ in alloc.subgoals)
    idx = state.goals.index(goal)
    goals = state.goals[:idx] + new_ids + state.goals[idx + 1 :]
    nodes = dict(state.nodes)
    nodes[goal] = replace(nodes[goal], rule=str(r), children=new_ids)
    for h, s in alloc.subgoals:
        nodes[h.id] = Node(h.id, s, parent=goal)
    solutions = dict(state.solutions)
    solutions[goal] = extract
    return ProofState(
        goals,
        MappingProxyType(nodes),
        MappingProxyType(solutions),
        state.root,
        alloc.counter,
        state.journal + (f"{goal}: {r}",),
        state,
    )


def undo(state: ProofState) -> ProofState:
    if state.previous is None:
        raise BadArgument("nothing to undo")
    return state.previous


def extract(state: ProofState) -> Term:
    if state.goals:
        raise IncompleteError(state.goals)
    return state.extract_term


def observable(state: ProofState) -> tuple[tuple[str, ...], str]:
    """Open goal statements and extract with metavariables numbered by goal order.

    Two states with equal ``observable`` views are indistinguishable to a user
    even if their internal goal identifiers differ.
    """
    rename = {g: f"?{n}" for n, g in enumerate(state.goals)}

    def canon(t: Term) -> Term:
        t = fill_holes(t, state.solutions)
        return fill_holes(t, {g: Var(rename[g]) for g in rename})

    goals = tuple(str(state.sequent(g).map_terms(canon)) for g in state.goals)
    return goals, str(canon(Hole(state.root)))


def applicable_rules(seq: Sequent) -> list[str]:
    """Rule invocations (with arguments filled in where finite) that apply to ``seq``."""
    out = []
    for spec in CATALOG.values():
        candidates: list[RuleApplication] = []
        if not spec.args:
            candidates = [RuleApplication(spec.name)]
        elif spec.args == ("hyp",):
            candidates = [RuleApplication(spec.name, hyp=h.name) for h in reversed(seq.hyps)]
        elif spec.args == ("dim",):
            candidates = [RuleApplication(spec.name, dim=DimName(i)) for i in seq.dims]
        elif spec.args == ("hyp", "dim"):
            candidates = [
                RuleApplication(spec.name, hyp=h.name, dim=r)
                for h in reversed(seq.hyps)
                for r in [ZERO, ONE] + [DimName(i) for i in seq.dims]
            ]
        elif spec.name == "eq/trans" and isinstance(seq.concl, (EqMemGoal, EqTypeGoal)):
            out.append("eq/trans (M)")
        elif spec.name == "pi/elim":
            out.extend(f"pi/elim {h.name} (M)" for h in reversed(seq.hyps) if isinstance(_nf(h.ty), FunType))
        for app in candidates:
            try:
                spec.fn(seq, app, _Alloc(0))
            except RuleError:
                continue
            out.append(str(app))
    return out
