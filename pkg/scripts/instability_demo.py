"""Show that circle recursion on ``loop i`` does not commute with ``{i -> 0}``.

Evaluates the term, then each of its substitution instances, both before and
after the first step, and prints a table.  The stable endpoint step of
``loop 0`` is shown for contrast.
"""

from dataclasses import dataclass

from _config import parse_config

from cartprl.dynamics import classify_stability, evaluate, trace
from cartprl.parser import parse_term
from cartprl.semantics import commutes_with_subst, dim_instances
from cartprl.syntax import all_dims, dim_subst, free_dims, fresh


@dataclass
class Config:
    """Instability demonstration."""

    term: str = "S1-rec(_. bool; loop i; tt; _. ff)"
    contrast: str = "loop 0"
    fuel: int = 10_000


def show_trace(t, fuel):
    for n, e in enumerate(trace(t, fuel)):
        flag = "" if e.stable is None else ("stable" if e.stable else "UNSTABLE")
        print(f"  {n:>3}  {e.term}  {flag}")


def table(t, fuel):
    v = evaluate(t, fuel)
    names = sorted(free_dims(t))
    k = fresh("k", all_dims(t))
    print(f"  {'substitution':<16} {'eval(M s)':<12} {'eval((eval M) s)':<18}")
    for s in dim_instances(names, k):
        lhs = evaluate(dim_subst(t, s), fuel)
        rhs = evaluate(dim_subst(v, s), fuel)
        mark = "" if lhs == rhs else "  <- differs"
        sub = ", ".join(f"{a}->{b}" for a, b in s.items()) or "(none)"
        print(f"  {sub:<16} {str(lhs):<12} {str(rhs):<18}{mark}")


def main(cfg: Config) -> int:
    for text in (cfg.term, cfg.contrast):
        t = parse_term(text)
        print(f"M = {t}")
        print(f"first step stable: {classify_stability(t)}")
        show_trace(t, cfg.fuel)
        table(t, cfg.fuel)
        print(f"commutes with substitution: {commutes_with_subst(t, cfg.fuel)}\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main(parse_config(Config)))
