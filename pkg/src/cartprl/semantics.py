"""Evaluation-based judgment oracle.

Closed judgments are decided by evaluating types and members to canonical
forms and comparing them by the defining clause of each type.  Free dimension
names are handled by enumerating substitutions into ``{0, 1, fresh}`` (plus
the identity) and requiring that evaluation commutes with each of them.
Function types are decided only over enumerable domains; anything that would
need quantification over infinitely many closed programs is ``Unknown``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from cartprl.dynamics import DEFAULT_FUEL, ContractError, EvalError, FuelExhausted, StuckAt, evaluate
from cartprl.syntax import (
    AX,
    FF,
    ONE,
    TT,
    ZERO,
    Ax,
    Base,
    Bool,
    Circle,
    DimAbs,
    DimName,
    ExactEq,
    Ff,
    FunType,
    If,
    Lam,
    Loop,
    Pair,
    PairType,
    PathType,
    Term,
    Tt,
    Var,
    all_dims,
    alpha_eq,
    dim_subst,
    free_dims,
    free_vars,
    fresh,
    subst_term,
)


class Kind(enum.Enum):
    DISCRETE = "discrete"
    KAN = "kan"
    COE = "coe"
    HCOM = "hcom"
    PRE = "pre"

    def __le__(self, other: "Kind") -> bool:
        return other in _UP[self]

    def __lt__(self, other: "Kind") -> bool:
        return self is not other and self <= other

    def __str__(self) -> str:
        return self.value


_UP = {
    Kind.DISCRETE: {Kind.DISCRETE, Kind.KAN, Kind.COE, Kind.HCOM, Kind.PRE},
    Kind.KAN: {Kind.KAN, Kind.COE, Kind.HCOM, Kind.PRE},
    Kind.COE: {Kind.COE, Kind.PRE},
    Kind.HCOM: {Kind.HCOM, Kind.PRE},
    Kind.PRE: {Kind.PRE},
}


# ---------------------------------------------------------------------------
# Judgments and verdicts


@dataclass(frozen=True)
class MemJ:
    ty: Term
    term: Term


@dataclass(frozen=True)
class EqMemJ:
    ty: Term
    left: Term
    right: Term


@dataclass(frozen=True)
class TypeJ:
    ty: Term
    kind: Kind = Kind.PRE


@dataclass(frozen=True)
class EqTypeJ:
    left: Term
    right: Term
    kind: Kind = Kind.PRE


ClosedJudgment = MemJ | EqMemJ | TypeJ | EqTypeJ


@dataclass(frozen=True)
class Verdict:
    status: str  # "holds" | "fails" | "unknown"
    reason: str = ""

    @property
    def holds(self) -> bool:
        return self.status == "holds"

    @property
    def fails(self) -> bool:
        return self.status == "fails"

    @property
    def unknown(self) -> bool:
        return self.status == "unknown"

    def __str__(self) -> str:
        return self.status if not self.reason else f"{self.status} ({self.reason})"


HOLDS = Verdict("holds")


def Holds() -> Verdict:
    return HOLDS


def Fails(reason: str) -> Verdict:
    return Verdict("fails", reason)


def Unknown(reason: str) -> Verdict:
    return Verdict("unknown", reason)


def all_of(verdicts: Iterable[Verdict]) -> Verdict:
    """Conjunction: the first failure wins, otherwise any unknown, otherwise holds."""
    unknown = None
    for v in verdicts:
        if v.fails:
            return v
        if v.unknown and unknown is None:
            unknown = v
    return unknown or HOLDS


# ---------------------------------------------------------------------------
# Enumeration helpers


def dim_instances(names: Sequence[str], fresh_name: str) -> list[dict]:
    """All maps from ``names`` into ``{0, 1, fresh_name}``."""
    targets = (ZERO, ONE, DimName(fresh_name))
    return [dict(zip(names, combo)) for combo in itertools.product(targets, repeat=len(names))]


_MAX_MEMBERS = 256


class _Oracle:
    def __init__(self, fuel: int):
        self.fuel = fuel

    def eval(self, t: Term) -> Term:
        return evaluate(t, self.fuel)

    # -- members ----------------------------------------------------------

    def eq_mem(self, ty: Term, m: Term, n: Term, settled: frozenset = frozenset()) -> Verdict:
        names = sorted((free_dims(ty) | free_dims(m) | free_dims(n)) - settled)
        try:
            m0, n0 = self.eval(m), self.eval(n)
            if not names:
                return self.canon_eq(self.eval(ty), m0, n0, settled)
            k = fresh("k", settled | all_dims(ty) | all_dims(m) | all_dims(n))
            instances = [dict()] + dim_instances(names, k)
            out = []
            for s in instances:
                done = settled | (set(names) if not s else {k})
                ty_s = self.eval(dim_subst(ty, s))
                ms, ns = self.eval(dim_subst(m, s)), self.eval(dim_subst(n, s))
                out.append(lambda ty_s=ty_s, ms=ms, ns=ns, done=done: self.canon_eq(ty_s, ms, ns, done))
                if s:
                    m0s = self.eval(dim_subst(m0, s))
                    n0s = self.eval(dim_subst(n0, s))
                    out.append(lambda ty_s=ty_s, ms=ms, m0s=m0s, done=done: self.canon_eq(ty_s, ms, m0s, done))
                    out.append(lambda ty_s=ty_s, ns=ns, n0s=n0s, done=done: self.canon_eq(ty_s, ns, n0s, done))
            return all_of(f() for f in out)
        except FuelExhausted:
            return Unknown("fuel")
        except StuckAt as e:
            return Fails(f"evaluation stuck at {e.term}")

    def canon_eq(self, ty: Term, m: Term, n: Term, settled: frozenset) -> Verdict:
        if isinstance(ty, Bool):
            for v in (m, n):
                if not isinstance(v, (Tt, Ff)):
                    return Fails(f"{v} is not a boolean")
            return HOLDS if type(m) is type(n) else Fails(f"{m} and {n} are distinct booleans")
        if isinstance(ty, Circle):
            for v in (m, n):
                if not isinstance(v, (Base, Loop)):
                    return Fails(f"{v} is not an element of S1")
            if isinstance(m, Base) and isinstance(n, Base):
                return HOLDS
            if isinstance(m, Loop) and isinstance(n, Loop) and m.r == n.r:
                return HOLDS
            return Unknown(f"path-level equality {m} = {n} in S1")
        if isinstance(ty, PairType):
            if not (isinstance(m, Pair) and isinstance(n, Pair)):
                return Fails("expected pairs")
            return all_of(
                f()
                for f in (
                    lambda: self.eq_mem(ty.fst, m.fst, n.fst, settled),
                    lambda: self.eq_mem(subst_term(ty.snd, m.fst, ty.var), m.snd, n.snd, settled),
                )
            )
        if isinstance(ty, FunType):
            if not (isinstance(m, Lam) and isinstance(n, Lam)):
                return Fails("expected lambdas")
            if (
                ty.var not in free_vars(ty.cod)
                and m.var not in free_vars(m.body)
                and n.var not in free_vars(n.body)
            ):
                return self.eq_mem(ty.cod, m.body, n.body, settled)
            pairs = self.equal_pairs(ty.dom, settled)
            if isinstance(pairs, Verdict):
                return pairs
            return all_of(
                self.eq_mem(
                    subst_term(ty.cod, o, ty.var),
                    subst_term(m.body, o, m.var),
                    subst_term(n.body, p, n.var),
                    settled,
                )
                for o, p in pairs
            )
        if isinstance(ty, PathType):
            if not (isinstance(m, DimAbs) and isinstance(n, DimAbs)):
                return Fails("expected path abstractions")
            k = fresh("k", settled | all_dims(ty) | all_dims(m) | all_dims(n))
            line = dim_subst(ty.ty, {ty.dvar: DimName(k)})
            bm = dim_subst(m.body, {m.dvar: DimName(k)})
            bn = dim_subst(n.body, {n.dvar: DimName(k)})
            checks = [lambda: self.eq_mem(line, bm, bn, settled)]
            for end, target in ((ZERO, ty.left), (ONE, ty.right)):
                face = dim_subst(ty.ty, {ty.dvar: end})
                for v in (m, n):
                    body = dim_subst(v.body, {v.dvar: end})
                    checks.append(lambda face=face, body=body, target=target: self.eq_mem(face, body, target, settled))
            return all_of(f() for f in checks)
        if isinstance(ty, ExactEq):
            if not (isinstance(m, Ax) and isinstance(n, Ax)):
                return Fails("expected ax")
            return self.eq_mem(ty.ty, ty.left, ty.right, settled)
        return Fails(f"{ty} is not a type")

    def equal_pairs(self, ty: Term, settled: frozenset):
        members = self.members(ty)
        if isinstance(members, Verdict):
            return members
        pairs = []
        for o in members:
            for p in members:
                v = self.eq_mem(ty, o, p, settled)
                if v.unknown:
                    return v
                if v.holds:
                    pairs.append((o, p))
        return pairs

    def members(self, ty: Term):
        """Canonical representatives of a closed enumerable type, or an Unknown verdict."""
        try:
            ty0 = self.eval(ty)
        except FuelExhausted:
            return Unknown("fuel")
        except StuckAt as e:
            return Unknown(f"type does not evaluate: {e.term}")
        if free_dims(ty0):
            return Unknown(f"{ty0} varies in a dimension")
        if isinstance(ty0, Bool):
            return [TT, FF]
        if isinstance(ty0, ExactEq):
            v = self.eq_mem(ty0.ty, ty0.left, ty0.right)
            if v.unknown:
                return v
            return [AX] if v.holds else []
        if isinstance(ty0, PairType):
            firsts = self.members(ty0.fst)
            if isinstance(firsts, Verdict):
                return firsts
            out = []
            for o in firsts:
                seconds = self.members(subst_term(ty0.snd, o, ty0.var))
                if isinstance(seconds, Verdict):
                    return seconds
                out.extend(Pair(o, p) for p in seconds)
                if len(out) > _MAX_MEMBERS:
                    return Unknown("too many members")
            return out
        if isinstance(ty0, FunType):
            dom = self.eval(ty0.dom)
            if not isinstance(dom, Bool):
                return Unknown(f"cannot enumerate functions out of {dom}")
            x = fresh("b", free_vars(ty0.cod))
            on_tt = self.members(subst_term(ty0.cod, TT, ty0.var))
            on_ff = self.members(subst_term(ty0.cod, FF, ty0.var))
            for side in (on_tt, on_ff):
                if isinstance(side, Verdict):
                    return side
            if len(on_tt) * len(on_ff) > _MAX_MEMBERS:
                return Unknown("too many members")
            return [Lam(x, If(Var(x), a, b)) for a in on_tt for b in on_ff]
        return Unknown(f"{ty0} is not enumerable")

    # -- types ------------------------------------------------------------

    def eq_type(self, a: Term, b: Term, kind: Kind, settled: frozenset = frozenset()) -> Verdict:
        names = sorted((free_dims(a) | free_dims(b)) - settled)
        try:
            a0, b0 = self.eval(a), self.eval(b)
            if not names:
                return self.canon_eq_type(a0, b0, kind, settled)
            k = fresh("k", settled | all_dims(a) | all_dims(b))
            out = []
            for s in [dict()] + dim_instances(names, k):
                done = settled | (set(names) if not s else {k})
                as_, bs = self.eval(dim_subst(a, s)), self.eval(dim_subst(b, s))
                out.append(lambda as_=as_, bs=bs, done=done: self.canon_eq_type(as_, bs, kind, done))
                if s:
                    a0s, b0s = self.eval(dim_subst(a0, s)), self.eval(dim_subst(b0, s))
                    out.append(lambda as_=as_, a0s=a0s, done=done: self.canon_eq_type(as_, a0s, kind, done))
                    out.append(lambda bs=bs, b0s=b0s, done=done: self.canon_eq_type(bs, b0s, kind, done))
            return all_of(f() for f in out)
        except FuelExhausted:
            return Unknown("fuel")
        except StuckAt as e:
            return Fails(f"evaluation stuck at {e.term}")

    def canon_eq_type(self, a: Term, b: Term, kind: Kind, settled: frozenset) -> Verdict:
        if type(a) is not type(b):
            return Fails(f"{a} and {b} are not equal types")
        if isinstance(a, Bool):
            return HOLDS
        if isinstance(a, Circle):
            if kind is Kind.DISCRETE:
                return Fails("S1 has non-trivial paths")
            return HOLDS
        if isinstance(a, (FunType, PairType)):
            dom_a, dom_b = (a.dom, b.dom) if isinstance(a, FunType) else (a.fst, b.fst)
            cod_a, cod_b = (a.cod, b.cod) if isinstance(a, FunType) else (a.snd, b.snd)
            checks = [lambda: self.eq_type(dom_a, dom_b, kind, settled)]
            if a.var not in free_vars(cod_a) and b.var not in free_vars(cod_b):
                checks.append(lambda: self.eq_type(cod_a, cod_b, kind, settled))
            else:
                def family():
                    pairs = self.equal_pairs(dom_a, settled)
                    if isinstance(pairs, Verdict):
                        return pairs
                    return all_of(
                        self.eq_type(subst_term(cod_a, o, a.var), subst_term(cod_b, p, b.var), kind, settled)
                        for o, p in pairs
                    )

                checks.append(family)
            return all_of(f() for f in checks)
        if isinstance(a, PathType):
            k = fresh("k", settled | all_dims(a) | all_dims(b))
            la = dim_subst(a.ty, {a.dvar: DimName(k)})
            lb = dim_subst(b.ty, {b.dvar: DimName(k)})
            return all_of(
                f()
                for f in (
                    lambda: self.eq_type(la, lb, kind, settled),
                    lambda: self.eq_mem(dim_subst(a.ty, {a.dvar: ZERO}), a.left, b.left, settled),
                    lambda: self.eq_mem(dim_subst(a.ty, {a.dvar: ONE}), a.right, b.right, settled),
                )
            )
        if isinstance(a, ExactEq):
            # exact equality is Kan only over a type without non-trivial paths
            base_kind = Kind.PRE if kind is Kind.PRE else Kind.DISCRETE
            return all_of(
                f()
                for f in (
                    lambda: self.eq_type(a.ty, b.ty, base_kind, settled),
                    lambda: self.eq_mem(a.ty, a.left, b.left, settled),
                    lambda: self.eq_mem(a.ty, a.right, b.right, settled),
                )
            )
        return Fails(f"{a} is not a type")


# ---------------------------------------------------------------------------
# Public operations


def _require_closed(*terms: Term) -> None:
    for t in terms:
        if free_vars(t):
            raise ContractError(f"term has free variables {sorted(free_vars(t))}: {t}")


def check_closed(j: ClosedJudgment, fuel: int = DEFAULT_FUEL) -> Verdict:
    """Decide a closed judgment by evaluation, where finitely checkable."""
    o = _Oracle(fuel)
    if isinstance(j, MemJ):
        j = EqMemJ(j.ty, j.term, j.term)
    if isinstance(j, EqMemJ):
        _require_closed(j.ty, j.left, j.right)
        return all_of(
            f()
            for f in (
                lambda: o.eq_type(j.ty, j.ty, Kind.PRE),
                lambda: o.eq_mem(j.ty, j.left, j.right),
            )
        )
    if isinstance(j, TypeJ):
        j = EqTypeJ(j.ty, j.ty, j.kind)
    if isinstance(j, EqTypeJ):
        _require_closed(j.left, j.right)
        return o.eq_type(j.left, j.right, j.kind)
    raise TypeError(f"not a judgment: {j!r}")


def enumerate_members(ty: Term, fuel: int = DEFAULT_FUEL) -> list[Term] | None:
    """Canonical representatives of an enumerable closed type, else ``None``."""
    r = _Oracle(fuel).members(ty)
    return None if isinstance(r, Verdict) else r


def _close(j: ClosedJudgment, left: dict, right: dict) -> ClosedJudgment:
    def sl(t: Term) -> Term:
        for x, v in left.items():
            t = subst_term(t, v, x)
        return t

    def sr(t: Term) -> Term:
        for x, v in right.items():
            t = subst_term(t, v, x)
        return t

    if isinstance(j, MemJ):
        return EqMemJ(sl(j.ty), sl(j.term), sr(j.term))
    if isinstance(j, EqMemJ):
        return EqMemJ(sl(j.ty), sl(j.left), sr(j.right))
    if isinstance(j, TypeJ):
        return EqTypeJ(sl(j.ty), sr(j.ty), j.kind)
    return EqTypeJ(sl(j.left), sr(j.right), j.kind)


def closing_pairs(hyps: Sequence[tuple[str, Term]], fuel: int = DEFAULT_FUEL) -> Iterator[tuple[dict, dict]] | Verdict:
    """Pairs of equal closing substitutions for an enumerable telescope.

    Returns an ``Unknown`` verdict when some hypothesis type is not enumerable.
    """
    o = _Oracle(fuel)
    envs: list[tuple[dict, dict]] = [({}, {})]
    for x, ty in hyps:
        nxt = []
        for left, right in envs:
            ty_l = ty
            for y, v in left.items():
                ty_l = subst_term(ty_l, v, y)
            pairs = o.equal_pairs(ty_l, frozenset())
            if isinstance(pairs, Verdict):
                return Unknown(f"hypothesis {x} : {ty} is not enumerable ({pairs.reason})")
            for a, b in pairs:
                nxt.append(({**left, x: a}, {**right, x: b}))
        envs = nxt
    return iter(envs)


def check_open(
    hyps: Sequence[tuple[str, Term]],
    dims: Iterable[str],
    j: ClosedJudgment,
    fuel: int = DEFAULT_FUEL,
) -> Verdict:
    """Check an open judgment over every pair of equal closing substitutions.

    Dimension names in ``dims`` are left free; ``check_closed`` quantifies
    over their instances itself.
    """
    envs = closing_pairs(hyps, fuel)
    if isinstance(envs, Verdict):
        return envs

    def each():
        for left, right in envs:
            v = check_closed(_close(j, left, right), fuel)
            if v.fails:
                inst = ", ".join(f"{x} := {t}" for x, t in left.items())
                yield Fails(f"fails at {inst}: {v.reason}")
            else:
                yield v

    return all_of(each())


def commutes_with_subst(m: Term, fuel: int = DEFAULT_FUEL) -> bool:
    """Brute-force check that evaluating ``m`` commutes with dimension substitution.

    For each ``s`` sending the free dimensions of ``m`` into ``{0, 1, fresh}``,
    ``eval(m s)`` must alpha-equal ``eval((eval m) s)``.
    """
    _require_closed(m)
    try:
        v = evaluate(m, fuel)
        names = sorted(free_dims(m))
        k = fresh("k", all_dims(m) | all_dims(v))
        for s in dim_instances(names, k):
            if not alpha_eq(evaluate(dim_subst(m, s), fuel), evaluate(dim_subst(v, s), fuel)):
                return False
    except EvalError:
        return False
    return True


def step_commutes(m: Term, m2: Term, fuel: int = DEFAULT_FUEL) -> bool:
    """Whether ``m`` and its successor ``m2`` evaluate alike under every substitution instance."""
    try:
        names = sorted(free_dims(m) | free_dims(m2))
        k = fresh("k", all_dims(m) | all_dims(m2))
        for s in dim_instances(names, k):
            if not alpha_eq(evaluate(dim_subst(m, s), fuel), evaluate(dim_subst(m2, s), fuel)):
                return False
    except EvalError:
        return False
    return True
