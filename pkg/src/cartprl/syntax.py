"""Terms, dimension expressions, and the substitution machinery.

Terms use named binders.  Every constructor declares the shape of its fields
in ``_shape`` so that free variables, capture-avoiding substitution and
alpha-equivalence are written once, generically, rather than per node.

Shape entries are ``(field, kind)`` where ``kind`` is one of

* ``"var"``   a binding occurrence of a term variable
* ``"dvar"``  a binding occurrence of a dimension name
* ``"term"``  a subterm, not under any binder of this node
* ``"term:F"``  a subterm under the term binder stored in field ``F``
* ``"dterm:F"`` a subterm under the dimension binder stored in field ``F``
* ``"dim"``   a dimension expression

Term variables and dimension names live in separate namespaces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import ClassVar, Iterable, Mapping, Union


# ---------------------------------------------------------------------------
# Dimension expressions


@dataclass(frozen=True)
class Zero:
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class One:
    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class DimName:
    name: str

    def __str__(self) -> str:
        return self.name


DimExpr = Union[Zero, One, DimName]
ZERO = Zero()
ONE = One()


def dim(r: DimExpr | str | int) -> DimExpr:
    """Coerce ``0``, ``1``, ``"0"``, ``"1"`` or a name into a dimension expression."""
    if isinstance(r, (Zero, One, DimName)):
        return r
    if r in (0, "0"):
        return ZERO
    if r in (1, "1"):
        return ONE
    if isinstance(r, str):
        return DimName(r)
    raise TypeError(f"not a dimension expression: {r!r}")


def is_constant(r: DimExpr) -> bool:
    return isinstance(r, (Zero, One))


# ---------------------------------------------------------------------------
# Terms


class Term:
    _shape: ClassVar[tuple[tuple[str, str], ...]] = ()

    def __str__(self) -> str:
        from cartprl.printer import show

        return show(self)


@dataclass(frozen=True, repr=False)
class Var(Term):
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


@dataclass(frozen=True)
class Hole(Term):
    """A metavariable standing for the realizer of an open goal.

    ``ctx`` and ``dctx`` record the variables and dimensions in scope at the
    goal, so capture-avoidance treats them as possibly free in the solution.
    """

    id: str
    ctx: tuple[str, ...] = ()
    dctx: tuple[str, ...] = ()


@dataclass(frozen=True)
class FunType(Term):
    var: str
    dom: Term
    cod: Term
    _shape = (("var", "var"), ("dom", "term"), ("cod", "term:var"))


@dataclass(frozen=True)
class Lam(Term):
    var: str
    body: Term
    _shape = (("var", "var"), ("body", "term:var"))


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term
    _shape = (("fun", "term"), ("arg", "term"))


@dataclass(frozen=True)
class PairType(Term):
    var: str
    fst: Term
    snd: Term
    _shape = (("var", "var"), ("fst", "term"), ("snd", "term:var"))


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term
    _shape = (("fst", "term"), ("snd", "term"))


@dataclass(frozen=True)
class Fst(Term):
    arg: Term
    _shape = (("arg", "term"),)


@dataclass(frozen=True)
class Snd(Term):
    arg: Term
    _shape = (("arg", "term"),)


@dataclass(frozen=True)
class Bool(Term):
    pass


@dataclass(frozen=True)
class Tt(Term):
    pass


@dataclass(frozen=True)
class Ff(Term):
    pass


@dataclass(frozen=True)
class If(Term):
    cond: Term
    then: Term
    else_: Term
    _shape = (("cond", "term"), ("then", "term"), ("else_", "term"))


@dataclass(frozen=True)
class Circle(Term):
    pass


@dataclass(frozen=True)
class Base(Term):
    pass


@dataclass(frozen=True)
class Loop(Term):
    r: DimExpr
    _shape = (("r", "dim"),)


@dataclass(frozen=True)
class CircleRec(Term):
    """``S1-rec(x.motive; target; base_case; i.loop_case)``."""

    var: str
    motive: Term
    target: Term
    base_case: Term
    dvar: str
    loop_case: Term
    _shape = (
        ("var", "var"),
        ("motive", "term:var"),
        ("target", "term"),
        ("base_case", "term"),
        ("dvar", "dvar"),
        ("loop_case", "dterm:dvar"),
    )


@dataclass(frozen=True)
class PathType(Term):
    dvar: str
    ty: Term
    left: Term
    right: Term
    _shape = (("dvar", "dvar"), ("ty", "dterm:dvar"), ("left", "term"), ("right", "term"))


@dataclass(frozen=True)
class DimAbs(Term):
    dvar: str
    body: Term
    _shape = (("dvar", "dvar"), ("body", "dterm:dvar"))


@dataclass(frozen=True)
class DimApp(Term):
    fun: Term
    r: DimExpr
    _shape = (("fun", "term"), ("r", "dim"))


@dataclass(frozen=True)
class ExactEq(Term):
    ty: Term
    left: Term
    right: Term
    _shape = (("ty", "term"), ("left", "term"), ("right", "term"))


@dataclass(frozen=True)
class Ax(Term):
    pass


BOOL = Bool()
TT = Tt()
FF = Ff()
CIRCLE = Circle()
BASE = Base()
AX = Ax()

DimSubst = Mapping[str, DimExpr]


# ---------------------------------------------------------------------------
# Fresh names

_SUFFIX = re.compile(r"^(.*?)(\d*)$")


def fresh(base: str, avoid: Iterable[str]) -> str:
    """Return ``base`` or a numbered variant of it not in ``avoid``."""
    avoid = set(avoid)
    if base == "_":
        base = "x"
    if base not in avoid:
        return base
    stem = _SUFFIX.match(base).group(1) or base
    n = 1
    while f"{stem}{n}" in avoid:
        n += 1
    return f"{stem}{n}"


# ---------------------------------------------------------------------------
# Free occurrences


def _binder_of(kind: str) -> str | None:
    return kind.split(":", 1)[1] if ":" in kind else None


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Hole):
        return frozenset(t.ctx)
    out: set[str] = set()
    for f, kind in t._shape:
        if kind == "term" or kind.startswith("dterm:"):
            out |= free_vars(getattr(t, f))
        elif kind.startswith("term:"):
            out |= free_vars(getattr(t, f)) - {getattr(t, _binder_of(kind))}
    return frozenset(out)


def free_dims(t: Term) -> frozenset[str]:
    """Dimension names with a free occurrence in ``t``."""
    if isinstance(t, Var):
        return frozenset()
    if isinstance(t, Hole):
        return frozenset(t.dctx)
    out: set[str] = set()
    for f, kind in t._shape:
        v = getattr(t, f)
        if kind == "dim":
            if isinstance(v, DimName):
                out.add(v.name)
        elif kind == "term" or kind.startswith("term:"):
            out |= free_dims(v)
        elif kind.startswith("dterm:"):
            out |= free_dims(v) - {getattr(t, _binder_of(kind))}
    return frozenset(out)


def all_dims(t: Term) -> frozenset[str]:
    """Every dimension name occurring in ``t``, bound or free."""
    if isinstance(t, Var):
        return frozenset()
    if isinstance(t, Hole):
        return frozenset(t.dctx)
    out: set[str] = set()
    for f, kind in t._shape:
        v = getattr(t, f)
        if kind == "dim" and isinstance(v, DimName):
            out.add(v.name)
        elif kind == "dvar":
            out.add(v)
        elif kind.startswith(("term", "dterm")):
            out |= all_dims(v)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Substitution


def _apply_dim(r: DimExpr, s: DimSubst) -> DimExpr:
    if isinstance(r, DimName):
        return s.get(r.name, r)
    return r


def subst_many(t: Term, sigma: Mapping[str, Term]) -> Term:
    """Simultaneous capture-avoiding substitution of terms for variables."""
    if not sigma:
        return t
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if isinstance(t, Hole) or not t._shape:
        return t
    fvs = free_vars(t)
    sigma = {x: n for x, n in sigma.items() if x in fvs}
    if not sigma:
        return t
    range_fvs = set().union(*(free_vars(n) for n in sigma.values()))

    new: dict[str, object] = {}
    inner: dict[str, dict[str, Term]] = {}
    for f, kind in t._shape:
        if kind == "var":
            old = getattr(t, f)
            local = {x: n for x, n in sigma.items() if x != old}
            name = old
            if old in range_fvs:
                body_fvs: set[str] = set()
                for g, k in t._shape:
                    if k == f"term:{f}":
                        body_fvs |= free_vars(getattr(t, g))
                name = fresh(old, range_fvs | body_fvs | set(sigma))
                local[old] = Var(name)
            new[f] = name
            inner[f] = local
    for f, kind in t._shape:
        v = getattr(t, f)
        if kind == "term" or kind.startswith("dterm:"):
            new[f] = subst_many(v, sigma)
        elif kind.startswith("term:"):
            new[f] = subst_many(v, inner[_binder_of(kind)])
    return replace(t, **new)


def subst_term(t: Term, n: Term, x: str) -> Term:
    """``t[n/x]``."""
    return subst_many(t, {x: n})


def dim_subst(t: Term, s: DimSubst) -> Term:
    """Apply a dimension substitution to every free dimension name of ``t``.

    Names outside ``s`` are fixed.  Bound names are renamed when they would
    capture a name in the range of ``s``.
    """
    s = {i: dim(r) for i, r in s.items()}
    s = {i: r for i, r in s.items() if r != DimName(i)}
    if not s:
        return t
    return _dim_subst(t, s)


def _dim_subst(t: Term, s: dict[str, DimExpr]) -> Term:
    if isinstance(t, Var) or not t._shape:
        return t
    if isinstance(t, Hole):
        return t
    fds = free_dims(t)
    s = {i: r for i, r in s.items() if i in fds}
    if not s:
        return t
    range_names = {r.name for r in s.values() if isinstance(r, DimName)}

    new: dict[str, object] = {}
    inner: dict[str, dict[str, DimExpr]] = {}
    for f, kind in t._shape:
        if kind == "dvar":
            old = getattr(t, f)
            local = {i: r for i, r in s.items() if i != old}
            name = old
            if old in range_names:
                body_dims: set[str] = set()
                for g, k in t._shape:
                    if k == f"dterm:{f}":
                        body_dims |= free_dims(getattr(t, g))
                name = fresh(old, range_names | body_dims | set(s))
                local[old] = DimName(name)
            new[f] = name
            inner[f] = local
    for f, kind in t._shape:
        v = getattr(t, f)
        if kind == "dim":
            new[f] = _apply_dim(v, s)
        elif kind == "term" or kind.startswith("term:"):
            new[f] = _dim_subst(v, s)
        elif kind.startswith("dterm:"):
            new[f] = _dim_subst(v, inner[_binder_of(kind)])
    return replace(t, **new)


def compose(s2: DimSubst, s1: DimSubst) -> dict[str, DimExpr]:
    """The substitution ``s2 . s1``: apply ``s1`` first, then ``s2``."""
    out = {i: _apply_dim(dim(r), s2) for i, r in s1.items()}
    for i, r in s2.items():
        out.setdefault(i, dim(r))
    return out


# ---------------------------------------------------------------------------
# Alpha-equivalence


def alpha_eq(a: Term, b: Term) -> bool:
    """Structural equality up to renaming of bound variables and dimensions."""
    return _alpha(a, b, {}, {}, {}, {}, 0)


def _alpha(a, b, va, vb, da, db, depth) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        la, lb = va.get(a.name), vb.get(b.name)
        if la is None and lb is None:
            return a.name == b.name
        return la == lb
    if isinstance(a, Hole):
        return a.id == b.id
    va2, vb2, da2, db2 = dict(va), dict(vb), dict(da), dict(db)
    for f, kind in a._shape:
        if kind == "var":
            va2[getattr(a, f)] = depth
            vb2[getattr(b, f)] = depth
            depth += 1
        elif kind == "dvar":
            da2[getattr(a, f)] = depth
            db2[getattr(b, f)] = depth
            depth += 1
    for f, kind in a._shape:
        x, y = getattr(a, f), getattr(b, f)
        if kind == "dim":
            if isinstance(x, DimName) and isinstance(y, DimName):
                lx, ly = da.get(x.name), db.get(y.name)
                if lx is None and ly is None:
                    if x.name != y.name:
                        return False
                elif lx != ly:
                    return False
            elif x != y:
                return False
        elif kind == "term":
            if not _alpha(x, y, va, vb, da, db, depth):
                return False
        elif kind.startswith("term:"):
            bx = getattr(a, _binder_of(kind))
            by = getattr(b, _binder_of(kind))
            if not _alpha(x, y, {**va, bx: va2[bx]}, {**vb, by: vb2[by]}, da, db, depth):
                return False
        elif kind.startswith("dterm:"):
            bx = getattr(a, _binder_of(kind))
            by = getattr(b, _binder_of(kind))
            if not _alpha(x, y, va, vb, {**da, bx: da2[bx]}, {**db, by: db2[by]}, depth):
                return False
    return True


# ---------------------------------------------------------------------------
# Traversal helpers


def children(t: Term) -> list[Term]:
    """Immediate subterms, in field order."""
    return [getattr(t, f) for f, kind in t._shape if kind.startswith(("term", "dterm"))]


def map_children(t: Term, fn) -> Term:
    """Rebuild ``t`` with ``fn`` applied to each immediate subterm.

    Returns ``t`` itself when no subterm changes identity.
    """
    if not t._shape:
        return t
    args = []
    changed = False
    for f, kind in t._shape:
        v = getattr(t, f)
        if kind.startswith(("term", "dterm")):
            nv = fn(v)
            changed = changed or nv is not v
            v = nv
        args.append(v)
    return type(t)(*args) if changed else t


def size(t: Term) -> int:
    return 1 + sum(size(c) for c in children(t))


def holes(t: Term) -> set[str]:
    if isinstance(t, Hole):
        return {t.id}
    out: set[str] = set()
    for c in children(t):
        out |= holes(c)
    return out


def fill_holes(t: Term, solutions: Mapping[str, Term]) -> Term:
    """Replace solved metavariables by their (recursively filled) solutions."""
    if isinstance(t, Hole):
        if t.id in solutions:
            return fill_holes(solutions[t.id], solutions)
        return t
    if not t._shape:
        return t
    return map_children(t, lambda c: fill_holes(c, solutions))


def arrow(a: Term, b: Term) -> FunType:
    """Non-dependent function type ``a -> b``."""
    return FunType("_", a, b)


def times(a: Term, b: Term) -> PairType:
    return PairType("_", a, b)
