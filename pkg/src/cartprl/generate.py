"""Seeded random generators: types, well-behaved terms, and refiner-built members.

Every generator takes a ``random.Random`` so runs are reproducible from a seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from cartprl.dynamics import FuelExhausted, normalize
from cartprl.refiner import (
    INTRO_RULES,
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
    goal_sequent,
)
from cartprl.syntax import (
    BASE,
    BOOL,
    CIRCLE,
    FF,
    ONE,
    TT,
    ZERO,
    App,
    Bool,
    Circle,
    CircleRec,
    DimAbs,
    DimApp,
    DimExpr,
    DimName,
    Fst,
    FunType,
    If,
    Lam,
    Loop,
    Pair,
    PairType,
    PathType,
    Snd,
    Term,
    Var,
    arrow,
    fresh,
    times,
)
from cartprl.tactics import Auto, Fail, Id, OrElse, Seq, SeqList, Tactic, auto, rule

# ---------------------------------------------------------------------------
# Types


def gen_type(rng: random.Random, depth: int = 2, circle: bool = True) -> Term:
    """A closed non-dependent type built from bool, S1, ->, * and loops of S1."""
    leaves = [BOOL, CIRCLE] if circle else [BOOL]
    if depth <= 0 or rng.random() < 0.35:
        return rng.choice(leaves)
    k = rng.randrange(4 if circle else 2)
    if k == 0:
        return arrow(gen_type(rng, depth - 1, circle), gen_type(rng, depth - 1, circle))
    if k == 1:
        return times(gen_type(rng, depth - 1, circle), gen_type(rng, depth - 1, circle))
    if k == 2:
        return PathType("_", CIRCLE, BASE, BASE)
    return CIRCLE


# ---------------------------------------------------------------------------
# Terms


@dataclass
class TermGen:
    """Type-directed generator of closed terms whose evaluation never gets stuck.

    ``dims`` are dimension names that may occur free.  With ``coherent=False``
    circle eliminations may pick loop cases that disagree with the base case
    at the endpoints, which is ill-typed but still evaluates; such terms are
    what exposes unstable steps.
    """

    rng: random.Random
    dims: tuple[str, ...] = ("i", "j")
    coherent: bool = False
    max_depth: int = 4

    def dim(self, dims: tuple[str, ...]) -> DimExpr:
        opts: list[DimExpr] = [ZERO, ONE] + [DimName(d) for d in dims]
        return self.rng.choice(opts)

    def term(self, ty: Term, depth: int | None = None) -> Term:
        return self._gen(ty, self.max_depth if depth is None else depth, {}, self.dims)

    def _gen(self, ty: Term, depth: int, env: dict[str, Term], dims: tuple[str, ...]) -> Term:
        rng = self.rng
        if depth > 0 and rng.random() < 0.6:
            t = self._elim(ty, depth - 1, env, dims)
            if t is not None:
                return t
        return self._intro(ty, depth - 1, env, dims)

    def _intro(self, ty: Term, depth: int, env, dims) -> Term:
        rng = self.rng
        vars_ = [x for x, a in env.items() if a == ty]
        if vars_ and rng.random() < 0.4:
            return Var(rng.choice(vars_))
        if isinstance(ty, Bool):
            return rng.choice([TT, FF])
        if isinstance(ty, Circle):
            return BASE if rng.random() < 0.3 else Loop(self.dim(dims))
        if isinstance(ty, FunType):
            x = fresh("x", set(env))
            return Lam(x, self._gen(ty.cod, depth, {**env, x: ty.dom}, dims))
        if isinstance(ty, PairType):
            return Pair(self._gen(ty.fst, depth, env, dims), self._gen(ty.snd, depth, env, dims))
        if isinstance(ty, PathType):
            k = fresh("k", set(dims) | set(self.dims))
            body = self._gen(ty.ty, depth, env, dims + (k,))
            return DimAbs(k, body)
        raise TypeError(f"no generator for {ty}")

    def _elim(self, ty: Term, depth: int, env, dims) -> Term | None:
        rng = self.rng
        k = rng.randrange(6)
        if k == 0:
            return If(self._gen(BOOL, depth, env, dims), self._gen(ty, depth, env, dims), self._gen(ty, depth, env, dims))
        if k == 1:
            a = gen_type(rng, 1)
            return App(self._gen(arrow(a, ty), depth, env, dims), self._gen(a, depth, env, dims))
        if k == 2:
            other = gen_type(rng, 1)
            if rng.random() < 0.5:
                return Fst(self._gen(times(ty, other), depth, env, dims))
            return Snd(self._gen(times(other, ty), depth, env, dims))
        if k == 3:
            target = self._gen(CIRCLE, depth, env, dims)
            b = self._gen(ty, depth, env, dims)
            d = fresh("l", set(dims) | set(self.dims))
            if self.coherent:
                loop = b if not (isinstance(ty, Circle) and rng.random() < 0.5) else Loop(DimName(d))
                if isinstance(loop, Loop) and b != BASE:
                    loop = b
            else:
                loop = self._gen(ty, depth, env, dims + (d,))
            return CircleRec("_", ty, target, b, d, loop)
        if k == 4 and isinstance(ty, Circle):
            path = self._gen(PathType("_", CIRCLE, BASE, BASE), depth, env, dims)
            return DimApp(path, self.dim(dims))
        if k == 5 and isinstance(ty, Circle):
            d = fresh("m", set(dims) | set(self.dims))
            return DimApp(DimAbs(d, self._gen(CIRCLE, depth, env, dims + (d,))), self.dim(dims))
        return None


# ---------------------------------------------------------------------------
# Refinement-driven members


def _hyp_candidates(rng: random.Random, seq: Sequent) -> list[RuleApplication]:
    out = []
    for h in seq.hyps:
        try:
            ty = normalize(h.ty)
        except FuelExhausted:
            continue
        out.append(RuleApplication("hypothesis", hyp=h.name))
        if isinstance(ty, Bool):
            out.append(RuleApplication("bool/elim", hyp=h.name))
        elif isinstance(ty, PairType):
            out.append(RuleApplication("sigma/elim", hyp=h.name))
        elif isinstance(ty, Circle):
            out.append(RuleApplication("circle/elim", hyp=h.name))
        elif isinstance(ty, PathType):
            for r in [ZERO, ONE] + [DimName(d) for d in seq.dims]:
                out.append(RuleApplication("path/app", hyp=h.name, dim=r))
        elif isinstance(ty, FunType):
            args = [Var(g.name) for g in seq.hyps if g.ty == ty.dom]
            if isinstance(ty.dom, Bool):
                args += [TT, FF]
            if isinstance(ty.dom, Circle):
                args.append(BASE)
            for a in args:
                out.append(RuleApplication("pi/elim", hyp=h.name, term=a))
    return out


def random_refinement(
    rng: random.Random, seq: Sequent, steps: int = 12, finish_depth: int = 6
) -> ProofState | None:
    """Refine ``seq`` by randomly chosen applicable rules, then finish with ``auto``.

    Returns a complete state, or ``None`` if the random choices left a goal
    that ``auto`` cannot close.
    """
    state = ProofState.initial(seq)
    for _ in range(steps):
        main = [g for g in state.goals if isinstance(state.sequent(g).concl, TrueGoal)]
        if not main:
            break
        g = rng.choice(main)
        s = state.sequent(g)
        apps = _hyp_candidates(rng, s) + [RuleApplication(r) for r in INTRO_RULES]
        apps += [RuleApplication("circle/intro/loop", dim=DimName(d)) for d in s.dims]
        rng.shuffle(apps)
        for app in apps:
            try:
                state = apply_rule(state, g, app)
                break
            except RuleError:
                continue
    for g in list(state.goals):
        if g in state.goals:
            state = auto(state, g, finish_depth)
    for g in list(state.goals):
        c = state.sequent(g).concl
        if isinstance(c, (TypeGoal, EqTypeGoal, MemGoal, EqMemGoal)):
            return None
    if state.goals:
        return None
    return state


_HYP_TYPES = (
    BOOL,
    times(BOOL, BOOL),
    arrow(BOOL, BOOL),
    CIRCLE,
    PathType("_", CIRCLE, BASE, BASE),
    times(arrow(BOOL, BOOL), BOOL),
)


def random_member(rng: random.Random, ty: Term, steps: int = 8, tries: int = 20) -> Term | None:
    """An extract of ``>> ty true`` built by random refinement, or ``None``."""
    for _ in range(tries):
        st = random_refinement(rng, goal_sequent(ty), steps)
        if st is not None:
            return st.extract_term
    return None


def random_bool_member(rng: random.Random, max_hyps: int = 3, steps: int = 12) -> Term:
    """A closed member of bool assembled entirely from refiner extracts.

    A random function type ``A1 -> .. -> An -> bool`` is proved by random
    refinement, and the extract is applied to refiner-built members of each
    ``Ai``.
    """
    while True:
        n = rng.randrange(max_hyps + 1)
        doms = [rng.choice(_HYP_TYPES) for _ in range(n)]
        stmt: Term = BOOL
        for k, a in reversed(list(enumerate(doms))):
            stmt = FunType(f"x{k}", a, stmt)
        st = random_refinement(rng, goal_sequent(stmt), steps + 2 * n)
        if st is None:
            continue
        m = st.extract_term
        ok = True
        for a in doms:
            arg = random_member(rng, a)
            if arg is None:
                ok = False
                break
            m = App(m, arg)
        if ok:
            return m


# ---------------------------------------------------------------------------
# Shannon families


def shannon_families() -> list[Term]:
    """Ten bool-valued families over ``x : bool``."""
    x = Var("x")
    y = Var("y")
    neg = Lam("y", If(y, FF, TT))
    return [
        x,
        TT,
        If(x, FF, TT),
        If(x, x, FF),
        App(neg, x),
        Fst(Pair(x, TT)),
        Snd(Pair(TT, If(x, TT, x))),
        App(Lam("y", If(y, y, x)), If(x, FF, TT)),
        CircleRec("_", BOOL, Loop(ZERO), x, "k", x),
        If(If(x, FF, TT), TT, App(neg, App(neg, x))),
    ]


# ---------------------------------------------------------------------------
# Tactics and goals for combinator laws

_GOAL_HYPS = (("x", BOOL), ("p", times(BOOL, BOOL)), ("f", arrow(BOOL, BOOL)))


def random_goal(rng: random.Random) -> Sequent:
    """A ``true`` goal over a random type, under a random prefix of fixed hypotheses."""
    hyps = _GOAL_HYPS[: rng.randrange(len(_GOAL_HYPS) + 1)]
    return goal_sequent(gen_type(rng, 2), hyps)


_ATOMS = (
    lambda rng: rule("pi/intro"),
    lambda rng: rule("sigma/intro"),
    lambda rng: rule("path/intro"),
    lambda rng: rule("bool/intro/true"),
    lambda rng: rule("bool/intro/false"),
    lambda rng: rule("circle/intro/base"),
    lambda rng: rule("bool/form"),
    lambda rng: rule("eq/refl"),
    lambda rng: rule("hypothesis", hyp=rng.choice("xpfy")),
    lambda rng: rule("bool/elim", hyp="x"),
    lambda rng: rule("sigma/elim", hyp="p"),
    lambda rng: Id(),
    lambda rng: Fail(),
    lambda rng: Auto(rng.randrange(1, 4)),
)


def random_tactic(rng: random.Random, depth: int = 3) -> Tactic:
    """A random rule-level tactic; ``SeqList`` arities are random, so some mismatch."""
    if depth <= 0 or rng.random() < 0.3:
        return rng.choice(_ATOMS)(rng)
    k = rng.randrange(3)
    if k == 0:
        return Seq(random_tactic(rng, depth - 1), random_tactic(rng, depth - 1))
    if k == 1:
        return OrElse(random_tactic(rng, depth - 1), random_tactic(rng, depth - 1))
    n = rng.randrange(4)
    return SeqList(random_tactic(rng, depth - 1), tuple(random_tactic(rng, depth - 2) for _ in range(n)))
