"""Build closed bool members by random refinement and check canonicity and Shannon.

Each member is the extract of a random proof of ``A1 -> .. -> An -> bool``
applied to extracts of random proofs of each ``Ai``.  Every member must
evaluate to ``tt`` or ``ff``, and every family over ``x : bool`` must satisfy
``N[M/x] = if M then N[tt/x] else N[ff/x]``.
"""

import json
import random
import time
from collections import Counter
from dataclasses import asdict, dataclass

from _config import parse_config

from cartprl.dynamics import EvalError, evaluate, trace
from cartprl.generate import random_bool_member, shannon_families
from cartprl.semantics import EqMemJ, check_closed
from cartprl.syntax import BOOL, FF, TT, If, size, subst_term


@dataclass
class Config:
    """Canonicity and Shannon expansion over refiner-built members."""

    n_members: int = 200
    seed: int = 20240601
    max_hyps: int = 3
    steps: int = 12
    fuel: int = 10_000
    shannon: bool = True
    jsonl: str = ""


def main(cfg: Config) -> int:
    rng = random.Random(cfg.seed)
    t0 = time.perf_counter()
    members = [random_bool_member(rng, cfg.max_hyps, cfg.steps) for _ in range(cfg.n_members)]
    built = time.perf_counter() - t0
    values = Counter()
    rows = []
    for m in members:
        try:
            v = str(evaluate(m, cfg.fuel))
        except EvalError as e:
            v = f"error: {e}"
        values[v] += 1
        rows.append({"member": str(m), "size": size(m), "value": v, "steps": len(trace(m, cfg.fuel)) - 1})
    bad = sum(n for v, n in values.items() if v not in ("tt", "ff"))
    sizes = sorted(r["size"] for r in rows)
    print(f"{len(members)} members built in {built:.1f}s; sizes median {sizes[len(sizes) // 2]}, max {sizes[-1]}")
    print(f"values: {dict(values)}; non-canonical: {bad}")

    shannon_fail = 0
    if cfg.shannon:
        for m in members:
            for n in shannon_families():
                lhs = subst_term(n, m, "x")
                rhs = If(m, subst_term(n, TT, "x"), subst_term(n, FF, "x"))
                shannon_fail += not check_closed(EqMemJ(BOOL, lhs, rhs), cfg.fuel).holds
        print(f"Shannon: {len(members) * len(shannon_families())} instances, {shannon_fail} failures")

    if cfg.jsonl:
        with open(cfg.jsonl, "w") as f:
            f.write(json.dumps({"config": asdict(cfg)}) + "\n")
            for r in rows:
                f.write(json.dumps(r) + "\n")
    return 1 if bad or shannon_fail else 0


if __name__ == "__main__":
    raise SystemExit(main(parse_config(Config)))
