"""Survey the stability classifier on random terms.

For each generated term every evaluation step is classified, and checked
against brute-force evaluation under all ``{0, 1, fresh}`` instances.  The
survey reports, per redex form, how many steps were flagged stable, how many
of those failed to commute (must be zero), and how many unstable-flagged
steps commuted anyway (the classifier's conservatism).
"""

import json
import random
from collections import Counter
from dataclasses import asdict, dataclass

from _config import parse_config

from cartprl.dynamics import redex, trace
from cartprl.generate import TermGen, gen_type
from cartprl.semantics import step_commutes


@dataclass
class Config:
    """Stability survey over random terms."""

    n_terms: int = 1000
    seed: int = 7
    max_depth: int = 4
    coherent: bool = False
    fuel: int = 10_000
    json: str = ""


def survey(cfg: Config) -> dict:
    rng = random.Random(cfg.seed)
    flagged, violations, unstable, commuting = Counter(), Counter(), Counter(), Counter()
    lengths = []
    for _ in range(cfg.n_terms):
        t = TermGen(rng, coherent=cfg.coherent, max_depth=cfg.max_depth).term(gen_type(rng, 2))
        tr = trace(t, cfg.fuel)
        lengths.append(len(tr) - 1)
        for before, after in zip(tr, tr[1:]):
            form = type(redex(before.term)).__name__
            ok = step_commutes(before.term, after.term, cfg.fuel)
            if after.stable:
                flagged[form] += 1
                violations[form] += not ok
            else:
                unstable[form] += 1
                commuting[form] += ok
    forms = sorted(set(flagged) | set(unstable))
    return {
        "config": asdict(cfg),
        "steps": sum(lengths),
        "mean_trace_length": sum(lengths) / len(lengths),
        "by_form": {
            f: {
                "stable": flagged[f],
                "stable_violations": violations[f],
                "unstable": unstable[f],
                "unstable_but_commuting": commuting[f],
            }
            for f in forms
        },
        "violations": sum(violations.values()),
    }


def main(cfg: Config) -> int:
    out = survey(cfg)
    print(f"{cfg.n_terms} terms, {out['steps']} steps, mean trace length {out['mean_trace_length']:.2f}")
    print(f"{'redex':<12}{'stable':>8}{'viol.':>8}{'unstable':>10}{'commuting':>11}")
    for form, row in out["by_form"].items():
        print(
            f"{form:<12}{row['stable']:>8}{row['stable_violations']:>8}"
            f"{row['unstable']:>10}{row['unstable_but_commuting']:>11}"
        )
    print(f"violations: {out['violations']}")
    if cfg.json:
        with open(cfg.json, "w") as f:
            json.dump(out, f, indent=2)
    return 1 if out["violations"] else 0


if __name__ == "__main__":
    raise SystemExit(main(parse_config(Config)))
