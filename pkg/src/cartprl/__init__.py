"""A refiner and evaluator for a small Cartesian cubical computational type theory."""

from cartprl.dynamics import DEFAULT_FUEL, classify_stability, evaluate, normalize, step, trace
from cartprl.parser import ParseError, parse, parse_tactic, parse_term
from cartprl.refiner import ProofState, RuleApplication, apply_rule, extract, goal_sequent, undo
from cartprl.semantics import check_closed, check_open, commutes_with_subst
from cartprl.syntax import alpha_eq, dim_subst, free_dims, subst_term
from cartprl.tactics import auto, elaborate_surface, run_tactic

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_FUEL",
    "ParseError",
    "ProofState",
    "RuleApplication",
    "alpha_eq",
    "apply_rule",
    "auto",
    "check_closed",
    "check_open",
    "classify_stability",
    "commutes_with_subst",
    "dim_subst",
    "elaborate_surface",
    "evaluate",
    "extract",
    "free_dims",
    "goal_sequent",
    "normalize",
    "parse",
    "parse_tactic",
    "parse_term",
    "run_tactic",
    "step",
    "subst_term",
    "trace",
    "undo",
]
