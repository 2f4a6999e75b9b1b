import random

import pytest
from hypothesis import given

from cartprl.generate import random_goal, random_tactic
from cartprl.refiner import (
    BadArgument,
    ExactEq,
    ProofState,
    TrueGoal,
    TypeGoal,
    apply_rule,
    extract,
    goal_sequent,
    observable,
)
from cartprl.semantics import Kind
from cartprl.syntax import BOOL, FF, TT, Lam, Pair, PathType, BASE, CIRCLE, DimAbs, FunType, Var, alpha_eq, arrow, times
from cartprl.tactics import (
    ArityMismatch,
    Auto,
    Dispatch,
    Fail,
    Id,
    OrElse,
    Rule,
    Seq,
    SeqList,
    SurfaceLam,
    SurfaceTuple,
    SurfaceUse,
    TacticFailure,
    With,
    auto,
    elaborate_surface,
    rule,
    run_tactic,
)
from strategies import seeds


def start(concl, hyps=()):
    return ProofState.initial(goal_sequent(concl, hyps))


def attempt(state, t):
    try:
        return run_tactic(state, "root", t)
    except TacticFailure:
        return None


def view(state):
    return observable(state), len(state.journal)


def test_seq_then_auto_closes_identity_goal():
    st = run_tactic(start(arrow(BOOL, BOOL)), "root", Seq(rule("pi/intro"), Auto(3)))
    assert st.complete
    assert alpha_eq(extract(st), Lam("x", Var("x")))


def test_orelse_falls_back_transactionally():
    st0 = start(arrow(BOOL, BOOL))
    a = run_tactic(st0, "root", OrElse(rule("sigma/intro"), rule("pi/intro")))
    b = apply_rule(st0, "root", rule("pi/intro").app)
    assert view(a) == view(b)


def test_seqlist_arity_mismatch():
    with pytest.raises(ArityMismatch) as e:
        run_tactic(start(times(BOOL, BOOL)), "root", SeqList(rule("sigma/intro"), (Id(), Id())))
    assert (e.value.expected, e.value.got) == (2, 3)


def test_failure_carries_path():
    t = SeqList(rule("sigma/intro"), (rule("bool/intro/true"), rule("pi/intro"), Auto()))
    with pytest.raises(TacticFailure) as e:
        run_tactic(start(times(BOOL, BOOL)), "root", t)
    assert e.value.path[-2:] == ("branch.1", "pi/intro")
    assert "RuleMismatch" in e.value.reason


def test_fail_and_id():
    st = start(BOOL)
    with pytest.raises(TacticFailure):
        run_tactic(st, "root", Fail("nope"))
    assert view(run_tactic(st, "root", Id())) == view(st)


def test_run_tactic_undoes_as_one_step():
    st0 = start(times(BOOL, BOOL))
    st = run_tactic(st0, "root", SeqList(rule("sigma/intro"), (rule("bool/intro/true"), Auto(), Auto())))
    assert st.complete and st.previous is st0
    assert len(st.journal) >= 3


# -- auto


def test_auto_closes_auxiliary_type_goal():
    st = auto(ProofState.initial(goal_sequent(TypeGoal(BOOL, Kind.KAN), [("x", BOOL)])), "root")
    assert st.complete


def test_auto_at_depth_one_picks_tt():
    st = auto(start(BOOL), "root", 1)
    assert extract(st) == TT


def test_auto_leaves_unprovable_goal_untouched():
    st0 = start(ExactEq(BOOL, TT, FF))
    st = auto(st0, "root")
    assert view(st) == view(st0)


def test_auto_depth_zero_is_identity():
    st0 = start(times(BOOL, BOOL))
    assert auto(st0, "root", 0) is st0


@given(seeds)
def test_auto_is_monotone(seed):
    rng = random.Random(seed)
    st = start(random_goal(rng).concl.ty, [(h.name, h.ty) for h in random_goal(rng).hyps])
    t = random_tactic(rng, 2)
    st = attempt(st, t) or st
    for g in list(st.goals):
        before = dict(st.solutions)
        n = len(st.goals)
        st = auto(st, g, 3)
        assert len(st.goals) <= n
        assert all(st.solutions[k] == v for k, v in before.items())


# -- surface elaboration


def test_golden_script():
    x, y = Var("x"), Var("y")
    stmt = FunType("x", BOOL, FunType("y", BOOL, times(BOOL, BOOL)))
    t = SurfaceLam(("x", "y"), SurfaceTuple((SurfaceUse("x"), SurfaceUse("y"))))
    st = run_tactic(start(stmt), "root", t)
    assert st.complete
    assert alpha_eq(extract(st), Lam("x", Lam("y", Pair(x, y))))
    sigma = [n for n in st.nodes.values() if n.rule == "sigma/intro"]
    assert len(sigma) == 1 and len(sigma[0].children) == 3


def test_lam_dispatches_to_path_intro():
    ty = PathType("i", CIRCLE, BASE, BASE)
    st = run_tactic(start(ty), "root", SurfaceLam(("k",), Auto()))
    assert st.complete
    assert alpha_eq(extract(st), DimAbs("k", BASE))


def test_elaboration_shapes():
    assert elaborate_surface(SurfaceLam((), Id())) == Id()
    assert elaborate_surface(SurfaceUse("z")) == rule("hypothesis", hyp="z")
    lam = elaborate_surface(SurfaceLam(("x",), Id()))
    assert isinstance(lam, Dispatch)
    pi = dict(lam.cases)["pi"]
    assert pi == SeqList(With("x", rule("pi/intro")), (Id(), Auto()))
    tup = elaborate_surface(SurfaceTuple((Id(), Id())))
    assert tup == SeqList(rule("sigma/intro"), (Id(), Id(), Auto()))


def test_use_of_unknown_name_fails_at_run_time():
    t = elaborate_surface(SurfaceUse("z"))
    with pytest.raises(TacticFailure) as e:
        run_tactic(start(BOOL, [("x", BOOL)]), "root", t)
    assert BadArgument.__name__ in e.value.reason


@given(seeds)
def test_elaboration_is_idempotent_and_fixes_rule_level(seed):
    rng = random.Random(seed)
    t = random_tactic(rng)
    assert elaborate_surface(t) == t
    s = SurfaceLam(("a", "b"), SurfaceTuple((SurfaceUse("a"), t)))
    once = elaborate_surface(s)
    assert elaborate_surface(once) == once


def test_with_names_the_hypothesis():
    st = run_tactic(start(arrow(BOOL, BOOL)), "root", With("b", rule("pi/intro")))
    body = st.goals[0]
    assert st.sequent(body).hyps[-1].name == "b"
    assert isinstance(st.sequent(body).concl, TrueGoal)


# -- combinator laws over random tactic/goal pairs


def _draw_success(rng, n, tries=200):
    """A goal and ``n`` tactics that succeed when sequenced left to right."""
    for _ in range(tries):
        st = ProofState.initial(random_goal(rng))
        ts = [random_tactic(rng, 2) for _ in range(n)]
        t = ts[0]
        for u in ts[1:]:
            t = Seq(t, u)
        if attempt(st, t) is not None:
            return st, ts
    return None


@given(seeds)
def test_seq_is_associative(seed):
    rng = random.Random(seed)
    drawn = _draw_success(rng, 3)
    if drawn is None:
        return
    st, (a, b, c) = drawn
    left = attempt(st, Seq(Seq(a, b), c))
    right = attempt(st, Seq(a, Seq(b, c)))
    assert left is not None and right is not None
    assert view(left) == view(right)


@given(seeds)
def test_seq_associativity_agrees_on_failure(seed):
    rng = random.Random(seed)
    st = ProofState.initial(random_goal(rng))
    a, b, c = (random_tactic(rng, 2) for _ in range(3))
    left = attempt(st, Seq(Seq(a, b), c))
    right = attempt(st, Seq(a, Seq(b, c)))
    assert (left is None) == (right is None)
    if left is not None:
        assert view(left) == view(right)


@given(seeds)
def test_id_is_a_unit(seed):
    rng = random.Random(seed)
    st = ProofState.initial(random_goal(rng))
    t = random_tactic(rng)
    plain = attempt(st, t)
    for variant in (Seq(Id(), t), Seq(t, Id())):
        got = attempt(st, variant)
        assert (got is None) == (plain is None)
        if got is not None:
            assert view(got) == view(plain)


@given(seeds)
def test_orelse_is_transactional(seed):
    rng = random.Random(seed)
    st = ProofState.initial(random_goal(rng))
    a, b = random_tactic(rng), random_tactic(rng)
    first = attempt(st, a)
    got = attempt(st, OrElse(a, b))
    expected = first if first is not None else attempt(st, b)
    assert (got is None) == (expected is None)
    if got is not None:
        assert view(got) == view(expected)


@given(seeds)
def test_failing_tactic_leaves_state_unchanged(seed):
    rng = random.Random(seed)
    st = ProofState.initial(random_goal(rng))
    before = view(st)
    try:
        run_tactic(st, "root", random_tactic(rng))
    except TacticFailure:
        pass
    assert view(st) == before


@given(seeds)
def test_seqlist_arity_is_checked_at_run_time(seed):
    rng = random.Random(seed)
    st = ProofState.initial(random_goal(rng))
    head = random_tactic(rng, 1)
    produced = attempt(st, head)
    if produced is None:
        return
    n = len(produced.goals) - len(st.goals) + 1
    wrong = n + rng.choice([-1, 1, 2]) if n > 0 else n + 1
    with pytest.raises(ArityMismatch) as e:
        run_tactic(st, "root", SeqList(head, tuple(Id() for _ in range(wrong))))
    assert (e.value.expected, e.value.got) == (wrong, n)
    ok = attempt(st, SeqList(head, tuple(Id() for _ in range(n))))
    assert ok is not None and view(ok)[0] == view(produced)[0]


def test_rule_tactic_is_a_dataclass_value():
    assert Rule(rule("pi/intro").app) == rule("pi/intro")
