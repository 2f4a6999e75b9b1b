"""Hypothesis strategies for terms, types and tactics."""

import random

from hypothesis import strategies as st

from cartprl.generate import TermGen, gen_type
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
    Var,
)

names = st.sampled_from(["x", "y", "z"])
binders = st.sampled_from(["x", "y", "z", "_"])
dim_names = st.sampled_from(["i", "j", "k"])
dims = st.one_of(st.just(ZERO), st.just(ONE), dim_names.map(DimName))

leaves = st.one_of(
    names.map(Var),
    st.sampled_from([TT, FF, BOOL, CIRCLE, BASE, AX]),
    dims.map(Loop),
)


def _extend(t):
    return st.one_of(
        st.builds(Lam, names, t),
        st.builds(App, t, t),
        st.builds(FunType, binders, t, t),
        st.builds(PairType, binders, t, t),
        st.builds(Pair, t, t),
        st.builds(Fst, t),
        st.builds(Snd, t),
        st.builds(If, t, t, t),
        st.builds(CircleRec, binders, t, t, t, dim_names, t),
        st.builds(PathType, dim_names, t, t, t),
        st.builds(DimAbs, dim_names, t),
        st.builds(DimApp, t, dims),
        st.builds(ExactEq, t, t, t),
    )


# arbitrary, possibly open and ill-typed terms
terms = st.recursive(leaves, _extend, max_leaves=12)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def closed_terms(draw, coherent=False, max_depth=4):
    """Closed terms whose evaluation never gets stuck; dimension names may be free."""
    rng = random.Random(draw(seeds))
    ty = gen_type(rng, 2)
    return TermGen(rng, coherent=coherent, max_depth=max_depth).term(ty)


@st.composite
def typed_closed_terms(draw, max_depth=3):
    rng = random.Random(draw(seeds))
    ty = gen_type(rng, 2)
    return ty, TermGen(rng, coherent=True, max_depth=max_depth).term(ty)
