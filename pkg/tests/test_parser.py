import random
import string

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cartprl.generate import random_tactic
from cartprl.parser import Def, ParseError, TacticDef, Thm, environment, parse, parse_goal, parse_tactic, parse_term
from cartprl.printer import show
from cartprl.refiner import RuleApplication
from cartprl.syntax import (
    BASE,
    BOOL,
    CIRCLE,
    FF,
    ONE,
    TT,
    ZERO,
    CircleRec,
    DimAbs,
    DimApp,
    DimName,
    ExactEq,
    FunType,
    If,
    Lam,
    Loop,
    Pair,
    PairType,
    PathType,
    Var,
    alpha_eq,
)
from cartprl.tactics import Auto, Fail, Id, OrElse, Rule, Seq, SeqList, SurfaceLam, SurfaceTuple, SurfaceUse, With
from strategies import seeds, terms

x, y = Var("x"), Var("y")


@pytest.mark.parametrize(
    "text, term",
    [
        ("tt", TT),
        ("\\x => x", Lam("x", x)),
        ("\\x y => (x, y)", Lam("x", Lam("y", Pair(x, y)))),
        ("bool -> bool", FunType("_", BOOL, BOOL)),
        ("(x : bool) -> if x then bool else S1", FunType("x", BOOL, If(x, BOOL, CIRCLE))),
        ("(x : bool) * bool", PairType("x", BOOL, BOOL)),
        ("bool * bool -> bool", FunType("_", PairType("_", BOOL, BOOL), BOOL)),
        ("loop 0", Loop(ZERO)),
        ("loop i", Loop(DimName("i"))),
        ("<i> loop i", DimAbs("i", Loop(DimName("i")))),
        ("(<i> loop i) @ 1", DimApp(DimAbs("i", Loop(DimName("i"))), ONE)),
        ("path [i] S1 base base", PathType("i", CIRCLE, BASE, BASE)),
        ("Eq bool tt ff", ExactEq(BOOL, TT, FF)),
        ("S1-rec(_. bool; loop i; tt; _. ff)", CircleRec("_", BOOL, Loop(DimName("i")), TT, "_", FF)),
    ],
)
def test_parse_examples(text, term):
    assert alpha_eq(parse_term(text), term)


@given(terms)
def test_term_round_trip(t):
    assert alpha_eq(parse_term(show(t)), t)


def test_tactic_examples():
    assert parse_tactic("pi/intro; auto") == Seq(Rule(RuleApplication("pi/intro")), Auto())
    assert parse_tactic("sigma/intro; [id, fail, auto 2]") == SeqList(
        Rule(RuleApplication("sigma/intro")), (Id(), Fail(), Auto(2))
    )
    assert parse_tactic("bool/elim x | id") == OrElse(Rule(RuleApplication("bool/elim", hyp="x")), Id())
    assert parse_tactic("lam x y => {use x, use y}") == SurfaceLam(
        ("x", "y"), SurfaceTuple((SurfaceUse("x"), SurfaceUse("y")))
    )
    assert parse_tactic("with l => circle/elim x") == With("l", Rule(RuleApplication("circle/elim", hyp="x")))
    assert parse_tactic("circle/intro/loop i") == Rule(RuleApplication("circle/intro/loop", dim=DimName("i")))
    assert parse_tactic("eq/trans (tt)") == Rule(RuleApplication("eq/trans", term=TT))


def test_precedence_of_alternation_and_sequencing():
    # | binds tighter than ;
    t = parse_tactic("a/b | id; auto".replace("a/b", "pi/intro"))
    assert isinstance(t, Seq) and isinstance(t.first, OrElse)
    # lam bodies extend right
    lam = parse_tactic("lam x => pi/intro; auto")
    assert isinstance(lam, SurfaceLam) and isinstance(lam.body, Seq)


def _surface(rng, depth=2):
    k = rng.randrange(4)
    if depth <= 0 or k == 0:
        return random_tactic(rng, 2)
    if k == 1:
        return SurfaceLam(tuple(rng.sample("abc", rng.randrange(1, 3))), _surface(rng, depth - 1))
    if k == 2:
        return SurfaceTuple(tuple(_surface(rng, depth - 1) for _ in range(rng.randrange(4))))
    return With(rng.choice("abc"), _surface(rng, depth - 1))


@given(seeds)
def test_tactic_round_trip(seed):
    rng = random.Random(seed)
    t = _surface(rng)
    assert parse_tactic(str(t)) == t


def test_goal_syntax():
    s = parse_goal("[i, j] x : bool, p : bool * bool >> S1")
    assert s.dims == ("i", "j")
    assert [h.name for h in s.hyps] == ["x", "p"]
    assert str(s) == "[i, j] x : bool, p : bool * bool >> S1 true"


def test_signature():
    sig = parse(
        """
        -- a comment
        def not : bool -> bool = \\b => if b then ff else tt
        tactic split = bool/elim x; auto
        thm t : (x : bool) -> bool by { lam x => split }
        thm id : bool -> bool by { lam x => use x }
        """
    )
    kinds = [type(d) for d in sig.decls]
    assert kinds == [Def, TacticDef, Thm, Thm]
    assert [t.name for t in sig.theorems] == ["t", "id"]
    assert sig["id"].span == (6, 9)
    defs, aliases = environment(sig)
    assert set(defs) == {"not"} and set(aliases) == {"split"}
    # aliases are expanded where they are used
    assert sig["t"].script == SurfaceLam(("x",), parse_tactic("bool/elim x; auto"))
    # definitions are unfolded by substitution
    assert alpha_eq(parse_term("not tt", defs), parse_term("(\\b => if b then ff else tt) tt"))


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("thm t : bool by { auto ", 1, 24),
        ("def x : bool = \n  (tt", 2, 6),
        ("thm t : bool by { lam => auto }", 1, 23),
        ("def x : bool = tt\ndef x : bool = ff", 2, 5),
        ("thm t : bool by { nope/rule }", 1, 19),
        ("thm t : bool by { tt }", 1, 19),
        ("axiom t : bool", 1, 1),
        ("def x : bool = $", 1, 16),
    ],
)
def test_parse_error_positions(text, line, col):
    with pytest.raises(ParseError) as e:
        parse(text)
    assert (e.value.line, e.value.col) == (line, col), str(e.value)
    assert e.value.expected


_ALPHABET = string.ascii_letters[:8] + "01 \n\\=>-;:,.()[]{}<>@*|/"


@given(st.text(alphabet=_ALPHABET, max_size=60))
def test_parser_is_total(text):
    for fn in (parse, parse_term, parse_tactic, parse_goal):
        try:
            fn(text)
        except ParseError:
            pass
