"""Pretty printer producing the concrete syntax accepted by ``cartprl.parser``."""

from __future__ import annotations

from cartprl.syntax import (
    App,
    Ax,
    Base,
    Bool,
    Circle,
    CircleRec,
    DimAbs,
    DimApp,
    ExactEq,
    Ff,
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
    Tt,
    Var,
    free_vars,
)

# precedence levels
EXPR, ARROW, PROD, DAPP, APP, ATOM = range(6)

_CONSTANTS = {Bool: "bool", Tt: "tt", Ff: "ff", Circle: "S1", Base: "base", Ax: "ax"}


def show(t: Term, prec: int = EXPR) -> str:
    s, level = _show(t)
    return f"({s})" if level < prec else s


def _show(t: Term) -> tuple[str, int]:
    if type(t) in _CONSTANTS:
        return _CONSTANTS[type(t)], ATOM
    if isinstance(t, Var):
        return t.name, ATOM
    if isinstance(t, Hole):
        return f"?{t.id}", ATOM
    if isinstance(t, Lam):
        names = [t.var]
        body = t.body
        while isinstance(body, Lam):
            names.append(body.var)
            body = body.body
        return f"\\{' '.join(names)} => {show(body)}", EXPR
    if isinstance(t, If):
        return f"if {show(t.cond)} then {show(t.then)} else {show(t.else_)}", EXPR
    if isinstance(t, DimAbs):
        return f"<{t.dvar}> {show(t.body)}", EXPR
    if isinstance(t, FunType):
        if t.var in free_vars(t.cod):
            return f"({t.var} : {show(t.dom)}) -> {show(t.cod)}", ARROW
        return f"{show(t.dom, PROD)} -> {show(t.cod)}", ARROW
    if isinstance(t, PairType):
        if t.var in free_vars(t.snd):
            return f"({t.var} : {show(t.fst)}) * {show(t.snd, PROD)}", PROD
        return f"{show(t.fst, DAPP)} * {show(t.snd, PROD)}", PROD
    if isinstance(t, DimApp):
        return f"{show(t.fun, DAPP)} @ {t.r}", DAPP
    if isinstance(t, App):
        return f"{show(t.fun, APP)} {show(t.arg, ATOM)}", APP
    if isinstance(t, Fst):
        return f"fst {show(t.arg, ATOM)}", APP
    if isinstance(t, Snd):
        return f"snd {show(t.arg, ATOM)}", APP
    if isinstance(t, Loop):
        return f"loop {t.r}", APP
    if isinstance(t, Pair):
        return f"({show(t.fst)}, {show(t.snd)})", ATOM
    if isinstance(t, PathType):
        return (
            f"path [{t.dvar}] {show(t.ty, ATOM)} {show(t.left, ATOM)} {show(t.right, ATOM)}",
            APP,
        )
    if isinstance(t, ExactEq):
        return f"Eq {show(t.ty, ATOM)} {show(t.left, ATOM)} {show(t.right, ATOM)}", APP
    if isinstance(t, CircleRec):
        return (
            f"S1-rec({t.var}. {show(t.motive)}; {show(t.target)}; "
            f"{show(t.base_case)}; {t.dvar}. {show(t.loop_case)})",
            ATOM,
        )
    raise TypeError(f"cannot print {t!r}")
