"""Exhaustive determinization learning.

Every determinization of a domain is scored by Monte-Carlo evaluation of
the replanning executor on a small training problem; the winner is the
cheapest among those with the highest success probability. Candidates are
independent (fresh solver tables, identical seeds), so they can optionally
be evaluated in parallel worker processes.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from math import prod

from .errors import EnumerationBlowupError
from .executor import EvalStats, monte_carlo_evaluate
from .grounding import GroundedProblem, ground
from .ppddl import DomainSchema, ProblemDef
from .reduction import Determinization
from .solver import SolverConfig

DEFAULT_ENUMERATION_CAP = 4096


@dataclass
class DetCandidate:
    index: int
    delta: Determinization
    stats: EvalStats
    solve_time: float = 0.0

    def sort_key(self) -> tuple:
        return (-self.stats.success_probability,
                self.stats.expected_cost,
                self.index)


def enumerate_determinizations(schema: DomainSchema, *,
                               cap: int = DEFAULT_ENUMERATION_CAP
                               ) -> list[Determinization]:
    """All primary-outcome assignments, in clause declaration order.

    The residual no-op outcome of a clause is a candidate primary like any
    other. Raises EnumerationBlowupError (with per-clause branching) when
    the product exceeds ``cap``.
    """
    keys: list[tuple[str, int]] = []
    counts: list[int] = []
    for action in schema.action_schemas:
        for c, clause in enumerate(action.clauses):
            keys.append((action.name, c))
            counts.append(clause.effective_count())
    total = prod(counts) if counts else 1
    if total > cap:
        raise EnumerationBlowupError(total, cap, dict(zip(keys, counts)))
    out = []
    for combo in product(*(range(n) for n in counts)):
        out.append(Determinization(dict(zip(keys, combo))))
    return out


def _evaluate_candidate(problem: GroundedProblem, delta: Determinization,
                        index: int, k: int, epsilon: float, rounds: int,
                        seed: int, max_actions: int,
                        time_budget: float | None,
                        cfg: SolverConfig | None) -> DetCandidate:
    start = time.monotonic()
    stats, _ = monte_carlo_evaluate(problem, delta, k, epsilon, rounds, seed,
                                    max_actions=max_actions,
                                    time_budget=time_budget, cfg=cfg)
    return DetCandidate(index, delta, stats, time.monotonic() - start)


def learning_det(schema: DomainSchema, training_problem: ProblemDef, *,
                 k: int = 0, rounds: int = 50, seed: int = 0,
                 epsilon: float = 1e-3, max_actions: int = 2500,
                 time_budget: float | None = None,
                 enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
                 cfg: SolverConfig | None = None,
                 workers: int = 1) -> tuple[Determinization, list[DetCandidate]]:
    """Pick the best determinization for a domain on a training problem.

    Every candidate is scored with the same seed and round count; the
    winner maximizes success probability, then minimizes expected cost,
    with remaining ties broken by enumeration order. Returns the winner
    plus the full candidate table ranked best-first. An all-failing table
    is not an error: the same rule applies among zero-probability
    candidates. A total ``time_budget`` is split evenly across candidates
    so one pathological choice cannot starve the rest.
    """
    problem = ground(schema, training_problem)
    deltas = enumerate_determinizations(schema, cap=enumeration_cap)
    per_budget = time_budget / len(deltas) if time_budget is not None else None

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_evaluate_candidate, problem, delta, i, k,
                                   epsilon, rounds, seed, max_actions,
                                   per_budget, cfg)
                       for i, delta in enumerate(deltas)]
            candidates = [f.result() for f in futures]  # enumeration order
    else:
        candidates = [_evaluate_candidate(problem, delta, i, k, epsilon,
                                          rounds, seed, max_actions,
                                          per_budget, cfg)
                      for i, delta in enumerate(deltas)]

    best = min(candidates, key=DetCandidate.sort_key)
    ranked = sorted(candidates, key=DetCandidate.sort_key)
    return best.delta, ranked
