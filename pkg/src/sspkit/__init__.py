"""Stochastic shortest path planning toolkit.

Builds reduced models (augmented with an exception count) from factored
probabilistic planning problems in a PPDDL subset, solves them with
heuristic search backed by a classical planner for bound-level states,
executes policies with replanning, and learns the best single-outcome
determinization of a domain by exhaustive search with Monte-Carlo scoring.
"""

from .detplan import (DetAction, DeterministicProblem, PlanResult,
                      relaxed_plan_heuristic, solve_deterministic)
from .errors import (CapExceededError, EnumerationBlowupError,
                     EnvMismatchError, GroundingBlowupError,
                     IncompleteDeterminizationError, IterationLimitError,
                     NotApplicableError, ParseError, SspkitError,
                     TypeMismatchError, UnsupportedFeatureError)
from .executor import (EvalStats, ReplanSession, RoundReport,
                       SimulatedEnvironment, monte_carlo_evaluate,
                       replan_execute, serve_rounds)
from .grounding import GroundAction, GroundedProblem, ground
from .learner import (DetCandidate, enumerate_determinizations, learning_det)
from .model import (State, applicable_actions, is_goal, successors)
from .oracle import (ExplicitModel, enumerate_model, optimal_plan,
                     proper_policy_exists, value_iteration)
from .ppddl import (ActionSchema, Atom, DomainSchema, Literal, Outcome,
                    Predicate, ProbabilisticClause, ProblemDef,
                    domain_to_text, parse_domain, parse_problem,
                    problem_to_text)
from .reduction import (AugmentedState, Determinization, ReducedModel,
                        make_reduction, mlo_determinization)
from .solver import (NOP, SolveReport, SolverConfig, SolverTables,
                     ff_bellman_update, ff_expand, ff_lao_star,
                     ff_test_convergence, q_value)

__version__ = "0.1.0"
