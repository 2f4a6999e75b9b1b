from hypothesis import given
from hypothesis import strategies as st

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
    DimName,
    FunType,
    Hole,
    Lam,
    Loop,
    Pair,
    PathType,
    Var,
    alpha_eq,
    compose,
    dim,
    dim_subst,
    fill_holes,
    free_dims,
    free_vars,
    fresh,
    holes,
    subst_term,
)
from strategies import dim_names, dims, names, terms

i, j = DimName("i"), DimName("j")
x, y = Var("x"), Var("y")
COUNTER = CircleRec("_", BOOL, Loop(i), TT, "_", FF)


def test_alpha_eq_examples():
    assert alpha_eq(Lam("x", x), Lam("y", y))
    assert not alpha_eq(Lam("x", Lam("y", x)), Lam("x", Lam("y", y)))
    assert not alpha_eq(Loop(i), Loop(j))
    assert alpha_eq(DimAbs("i", Loop(i)), DimAbs("j", Loop(j)))


def test_alpha_eq_separates_free_from_bound():
    assert not alpha_eq(Lam("x", y), Lam("y", y))
    assert not alpha_eq(DimAbs("i", Loop(j)), DimAbs("j", Loop(j)))


def test_subst_term_examples():
    assert subst_term(x, TT, "x") == TT
    assert alpha_eq(subst_term(Lam("x", x), TT, "x"), Lam("x", x))
    assert subst_term(Pair(x, y), FF, "y") == Pair(x, FF)


def test_subst_term_avoids_capture():
    # (\y => x)[y/x] must not become \y => y
    out = subst_term(Lam("y", x), y, "x")
    assert isinstance(out, Lam) and out.var != "y"
    assert alpha_eq(out, Lam("z", y))


def test_dim_subst_examples():
    assert dim_subst(Loop(i), {"i": ZERO}) == Loop(ZERO)
    assert alpha_eq(dim_subst(DimAbs("i", Loop(i)), {"i": ZERO}), DimAbs("i", Loop(i)))
    assert alpha_eq(dim_subst(COUNTER, {"i": j}), CircleRec("_", BOOL, Loop(j), TT, "_", FF))


def test_dim_subst_avoids_capture():
    out = dim_subst(DimAbs("j", Pair(Loop(i), Loop(j))), {"i": j})
    assert alpha_eq(out, DimAbs("k", Pair(Loop(j), Loop(DimName("k")))))


def test_free_dims_examples():
    assert free_dims(Loop(i)) == {"i"}
    assert free_dims(DimAbs("i", Loop(i))) == set()
    assert free_dims(PathType("i", CIRCLE, Loop(j), BASE)) == {"j"}


def test_dim_coercion():
    assert dim(0) is ZERO and dim(1) is ONE and dim("i") == i


def test_fresh_avoids():
    assert fresh("x", {"x", "x1"}) == "x2"
    assert fresh("x", set()) == "x"


def test_fill_holes():
    t = Pair(Hole("a"), Hole("b"))
    assert holes(t) == {"a", "b"}
    assert fill_holes(t, {"a": TT, "b": Hole("a")}) == Pair(TT, TT)


@given(terms)
def test_alpha_eq_reflexive(t):
    assert alpha_eq(t, t)


@given(terms, terms)
def test_alpha_eq_symmetric(a, b):
    assert alpha_eq(a, b) == alpha_eq(b, a)


@given(terms, names)
def test_renaming_bound_variable_is_invisible(body, v):
    assert alpha_eq(Lam(v, body), Lam("w", subst_term(body, Var("w"), v))) or "w" in free_vars(body)


@given(terms)
def test_empty_dim_subst_is_identity(t):
    assert alpha_eq(dim_subst(t, {}), t)


@given(terms, dim_names, dims)
def test_dim_subst_of_absent_name(t, n, r):
    if n not in free_dims(t):
        assert alpha_eq(dim_subst(t, {n: r}), t)


@given(terms, dim_names, dims)
def test_dim_subst_removes_name(t, n, r):
    out = free_dims(dim_subst(t, {n: r}))
    assert n not in out or r == DimName(n)


@given(terms, st.dictionaries(dim_names, dims), st.dictionaries(dim_names, dims))
def test_dim_subst_composition(t, s1, s2):
    assert alpha_eq(dim_subst(dim_subst(t, s1), s2), dim_subst(t, compose(s2, s1)))


@given(terms, st.dictionaries(dim_names, dims))
def test_disjoint_substitutions_commute(t, s):
    # split s into two name-disjoint halves with constant targets
    s1 = {k: v for k, v in s.items() if k == "i" and v in (ZERO, ONE)}
    s2 = {k: v for k, v in s.items() if k != "i" and v in (ZERO, ONE)}
    assert alpha_eq(dim_subst(dim_subst(t, s1), s2), dim_subst(dim_subst(t, s2), s1))


@given(terms, names, terms)
def test_subst_of_absent_variable(t, v, n):
    if v not in free_vars(t):
        assert alpha_eq(subst_term(t, n, v), t)


@given(terms)
def test_printing_is_total(t):
    assert isinstance(str(t), str)


def test_free_vars_under_binders():
    assert free_vars(FunType("x", x, y)) == {"x", "y"}
    assert free_vars(FunType("x", BOOL, x)) == set()
