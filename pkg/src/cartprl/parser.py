"""Lexer and recursive-descent parser for terms, tactics, goals and signature files.

Grammar sketch (loosest first)::

    expr   ::= \\ x.. => expr | if expr then expr else expr | <i> expr | arrow
    arrow  ::= (x : expr) -> expr | prod [-> expr]
    prod   ::= (x : expr) * prod | dapp [* prod]
    dapp   ::= app (@ dim)*
    app    ::= fst atom | snd atom | loop dim | path [i] atom atom atom
             | Eq atom atom atom | atom atom*
    atom   ::= x | tt | ff | bool | S1 | base | ax | (expr) | (expr, expr)
             | S1-rec(x. expr; expr; expr; i. expr)

    tactic ::= alt (; alt | ; [tactic, ..])*
    alt    ::= prim (| prim)*
    prim   ::= id | fail | auto [n] | use x | lam x.. => tactic
             | with x => tactic | {tactic, ..} | {} | (tactic) | rule args | alias

The bodies of ``lam`` and ``with`` extend as far right as possible.

    decl   ::= def x : expr = expr | thm x : expr by { tactic } | tactic x = tactic
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from cartprl.refiner import CATALOG, RuleApplication, Sequent, TrueGoal, goal_sequent
from cartprl.syntax import (
    AX,
    BASE,
    BOOL,
    CIRCLE,
    FF,
    ONE,
    TT,
    ZERO,
    App,
    CircleRec,
    DimAbs,
    DimApp,
    DimExpr,
    DimName,
    ExactEq,
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
    subst_many,
)
from cartprl.tactics import (
    Auto,
    Fail,
    Id,
    OrElse,
    Rule,
    Seq,
    SeqList,
    SurfaceLam,
    SurfaceTuple,
    SurfaceUse,
    Tactic,
    With,
)

TERM_KEYWORDS = frozenset(
    "if then else fst snd loop path Eq tt ff bool S1 base ax S1-rec".split()
)
DECL_KEYWORDS = frozenset("def thm tactic by".split())
_CONSTS = {"tt": TT, "ff": FF, "bool": BOOL, "S1": CIRCLE, "base": BASE, "ax": AX}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<ident>S1-rec|[A-Za-z_][A-Za-z0-9_']*(?:/[A-Za-z_][A-Za-z0-9_']*)*)
  | (?P<num>[0-9]+)
  | (?P<sym>->|=>|>>|[\\()\[\]{}<>@*,:;.|=?])
    """,
    re.VERBOSE,
)


class ParseError(Exception):
    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        msg = f"{line}:{col}: expected {expected}"
        if found:
            msg += f", found {found}"
        super().__init__(msg)
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found


@dataclass(frozen=True)
class Token:
    kind: str  # ident | num | sym | eof
    text: str
    line: int
    col: int

    def __str__(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(line, pos - line_start + 1, "a token", repr(text[pos]))
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), line, pos - line_start + 1))
        for k, ch in enumerate(m.group()):
            if ch == "\n":
                line, line_start = line + 1, pos + k + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


# ---------------------------------------------------------------------------
# Signatures


@dataclass(frozen=True)
class Def:
    name: str
    type: Term
    body: Term
    span: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class Thm:
    name: str
    statement: Term
    script: Tactic
    span: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class TacticDef:
    name: str
    tactic: Tactic
    span: tuple[int, int] = (0, 0)


Decl = Def | Thm | TacticDef


@dataclass(frozen=True)
class Signature:
    decls: tuple[Decl, ...] = ()

    def __getitem__(self, name: str) -> Decl:
        for d in self.decls:
            if d.name == name:
                return d
        raise KeyError(name)

    @property
    def theorems(self) -> list[Thm]:
        return [d for d in self.decls if isinstance(d, Thm)]


# ---------------------------------------------------------------------------
# Parser


@dataclass
class Parser:
    tokens: list[Token]
    pos: int = 0
    defs: dict[str, Term] = field(default_factory=dict)
    aliases: dict[str, Tactic] = field(default_factory=dict)

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "ident") and self.tok.text == text

    def fail(self, expected: str):
        raise ParseError(self.tok.line, self.tok.col, expected, str(self.tok))

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def name(self, what: str = "a name") -> str:
        t = self.tok
        if t.kind != "ident" or t.text in TERM_KEYWORDS or "/" in t.text:
            self.fail(what)
        return self.advance().text

    def end(self) -> None:
        if self.tok.kind != "eof":
            self.fail("end of input")

    # -- terms

    def expr(self) -> Term:
        if self.accept("\\"):
            names = [self.name()]
            while not self.at("=>"):
                names.append(self.name("a name or '=>'"))
            self.advance()
            body = self.expr()
            for x in reversed(names):
                body = Lam(x, body)
            return body
        if self.accept("if"):
            c = self.expr()
            self.expect("then")
            a = self.expr()
            self.expect("else")
            return If(c, a, self.expr())
        if self.at("<"):
            self.advance()
            i = self.name("a dimension name")
            self.expect(">")
            return DimAbs(i, self.expr())
        return self.arrow()

    def _binder_ahead(self) -> bool:
        return (
            self.at("(")
            and self.peek().kind == "ident"
            and self.peek().text not in TERM_KEYWORDS
            and self.peek(2).kind == "sym"
            and self.peek(2).text == ":"
        )

    def _binder(self) -> tuple[str, Term]:
        self.expect("(")
        x = self.name()
        self.expect(":")
        a = self.expr()
        self.expect(")")
        return x, a

    def arrow(self) -> Term:
        if self._binder_ahead():
            x, a = self._binder()
            if self.accept("->"):
                return FunType(x, a, self.expr())
            self.expect("*")
            lhs = PairType(x, a, self.prod())
        else:
            lhs = self.prod()
        if self.accept("->"):
            return FunType("_", lhs, self.expr())
        return lhs

    def prod(self) -> Term:
        if self._binder_ahead():
            x, a = self._binder()
            self.expect("*")
            return PairType(x, a, self.prod())
        lhs = self.dapp()
        if self.accept("*"):
            return PairType("_", lhs, self.prod())
        return lhs

    def dapp(self) -> Term:
        t = self.app()
        while self.accept("@"):
            t = DimApp(t, self.dim())
        return t

    def dim(self) -> DimExpr:
        t = self.tok
        if t.kind == "num" and t.text in ("0", "1"):
            self.advance()
            return ZERO if t.text == "0" else ONE
        return DimName(self.name("a dimension (0, 1 or a name)"))

    def app(self) -> Term:
        if self.accept("fst"):
            head = Fst(self.atom())
        elif self.accept("snd"):
            head = Snd(self.atom())
        elif self.accept("loop"):
            head = Loop(self.dim())
        elif self.accept("path"):
            self.expect("[")
            i = self.name("a dimension name")
            self.expect("]")
            head = PathType(i, self.atom(), self.atom(), self.atom())
        elif self.accept("Eq"):
            head = ExactEq(self.atom(), self.atom(), self.atom())
        else:
            head = self.atom()
        while self._atom_start():
            head = App(head, self.atom())
        return head

    def _atom_start(self) -> bool:
        t = self.tok
        if t.kind == "ident":
            return t.text in _CONSTS or t.text == "S1-rec" or (
                t.text not in TERM_KEYWORDS and "/" not in t.text and t.text not in DECL_KEYWORDS
            )
        return t.kind == "sym" and t.text == "("

    def atom(self) -> Term:
        t = self.tok
        if t.kind == "ident" and t.text in _CONSTS:
            self.advance()
            return _CONSTS[t.text]
        if self.accept("S1-rec"):
            self.expect("(")
            x = self.name()
            self.expect(".")
            motive = self.expr()
            self.expect(";")
            target = self.expr()
            self.expect(";")
            b = self.expr()
            self.expect(";")
            i = self.name("a dimension name")
            self.expect(".")
            lp = self.expr()
            self.expect(")")
            return CircleRec(x, motive, target, b, i, lp)
        if self.accept("("):
            a = self.expr()
            if self.accept(","):
                b = self.expr()
                self.expect(")")
                return Pair(a, b)
            self.expect(")")
            return a
        if t.kind == "ident" and t.text not in TERM_KEYWORDS and "/" not in t.text:
            self.advance()
            return Var(t.text)
        self.fail("a term")

    def term(self) -> Term:
        """A term with earlier definitions unfolded."""
        t = self.expr()
        return subst_many(t, self.defs) if self.defs else t

    # -- tactics

    def tactic(self) -> Tactic:
        t = self.alt()
        while self.accept(";"):
            if self.accept("["):
                branches = [] if self.at("]") else [self.tactic()]
                while self.accept(","):
                    branches.append(self.tactic())
                self.expect("]")
                t = SeqList(t, tuple(branches))
            else:
                t = Seq(t, self.alt())
        return t

    def alt(self) -> Tactic:
        t = self.prim()
        if self.accept("|"):
            return OrElse(t, self.alt())
        return t

    def prim(self) -> Tactic:
        t = self.tok
        if self.accept("("):
            inner = self.tactic()
            self.expect(")")
            return inner
        if self.accept("{"):
            items = []
            if not self.accept("}"):
                items.append(self.tactic())
                while self.accept(","):
                    items.append(self.tactic())
                self.expect("}")
            return SurfaceTuple(tuple(items))
        if t.kind != "ident":
            self.fail("a tactic")
        word = self.advance().text
        if word == "id":
            return Id()
        if word == "fail":
            return Fail()
        if word == "auto":
            if self.tok.kind == "num":
                return Auto(int(self.advance().text))
            return Auto()
        if word == "use":
            return SurfaceUse(self.name("a hypothesis name"))
        if word == "lam":
            names = [self.name()]
            while not self.at("=>"):
                names.append(self.name("a name or '=>'"))
            self.advance()
            return SurfaceLam(tuple(names), self.tactic())
        if word == "with":
            x = self.name()
            self.expect("=>")
            return With(x, self.tactic())
        if word in CATALOG:
            return Rule(self.rule_args(word))
        if word in self.aliases:
            return self.aliases[word]
        raise ParseError(t.line, t.col, "a tactic", repr(word))

    def rule_args(self, name: str) -> RuleApplication:
        kw = {}
        for kind in CATALOG[name].args:
            if kind == "hyp":
                kw["hyp"] = self.name("a hypothesis name")
            elif kind == "dim":
                kw["dim"] = self.dim()
            else:
                self.expect("(")
                kw["term"] = self.term()
                self.expect(")")
        return RuleApplication(name, **kw)

    # -- goals

    def goal(self) -> Sequent:
        dims: list[str] = []
        if self.accept("["):
            while not self.at("]"):
                dims.append(self.name("a dimension name"))
                self.accept(",")
            self.advance()
        hyps: list[tuple[str, Term]] = []
        if not self.at(">>"):
            while True:
                x = self.name()
                self.expect(":")
                hyps.append((x, self.term()))
                if not self.accept(","):
                    break
        self.expect(">>")
        return goal_sequent(TrueGoal(self.term()), hyps, dims)

    # -- declarations

    def signature(self) -> Signature:
        decls: list[Decl] = []
        seen: set[str] = set()
        while self.tok.kind != "eof":
            start = self.tok
            kw = self.tok.text if self.tok.kind == "ident" else ""
            if kw not in DECL_KEYWORDS - {"by"}:
                self.fail("'def', 'thm' or 'tactic'")
            self.advance()
            name_tok = self.tok
            name = self.name()
            if name in seen:
                raise ParseError(name_tok.line, name_tok.col, "a fresh declaration name", repr(name))
            seen.add(name)
            span = (start.line, start.col)
            if kw == "def":
                self.expect(":")
                ty = self.term()
                self.expect("=")
                body = self.term()
                decls.append(Def(name, ty, body, span))
                self.defs[name] = body
            elif kw == "thm":
                self.expect(":")
                stmt = self.term()
                self.expect("by")
                self.expect("{")
                script = self.tactic()
                self.expect("}")
                decls.append(Thm(name, stmt, script, span))
            else:
                self.expect("=")
                t = self.tactic()
                decls.append(TacticDef(name, t, span))
                self.aliases[name] = t
        return Signature(tuple(decls))


def parse(text: str) -> Signature:
    """Parse a signature file."""
    return Parser(tokenize(text)).signature()


def parse_term(text: str, defs: dict[str, Term] | None = None) -> Term:
    p = Parser(tokenize(text), defs=dict(defs or {}))
    t = p.term()
    p.end()
    return t


def parse_tactic(
    text: str, aliases: dict[str, Tactic] | None = None, defs: dict[str, Term] | None = None
) -> Tactic:
    p = Parser(tokenize(text), defs=dict(defs or {}), aliases=dict(aliases or {}))
    t = p.tactic()
    p.end()
    return t


def parse_goal(text: str, defs: dict[str, Term] | None = None) -> Sequent:
    """Parse ``[i, j] x : A, y : B >> C`` into a sequent with conclusion ``C true``."""
    p = Parser(tokenize(text), defs=dict(defs or {}))
    s = p.goal()
    p.end()
    return s


def environment(sig: Signature) -> tuple[dict[str, Term], dict[str, Tactic]]:
    """Definitions and tactic aliases of ``sig``, for parsing further input against it."""
    defs = {d.name: d.body for d in sig.decls if isinstance(d, Def)}
    aliases = {d.name: d.tactic for d in sig.decls if isinstance(d, TacticDef)}
    return defs, aliases
