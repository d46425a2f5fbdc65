"""Policy execution with replanning, Monte-Carlo evaluation, and a
newline-delimited JSON state/action protocol for external planners.

A round executes the solver's policy in an environment that samples the
original problem's true transitions; whenever the observed state has no
zero-exception policy entry yet, the solver is re-invoked from that state,
warm-starting the shared tables. A round ends on goal entry, on the action
cap, on a dead-end policy entry, on an invalid action, or on the wall-time
budget.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass

from .errors import EnvMismatchError, NotApplicableError
from .grounding import GroundedProblem
from .model import State, is_goal, successors
from .reduction import AugmentedState, Determinization, make_reduction
from .solver import NOP, SolveReport, SolverConfig, SolverTables, ff_lao_star

OUTCOME_GOAL = "goal"
OUTCOME_ACTION_CAP = "action_cap"
OUTCOME_DEAD_END = "dead_end"
OUTCOME_INVALID = "invalid_action"
OUTCOME_TIMEOUT = "timeout"

DEFAULT_ACTION_CAP = 2500
DEFAULT_TIME_BUDGET = 1200.0  # seconds per evaluation (50 rounds)

COST_POLICY = "mean-over-all-rounds; failed rounds add the cost cap as penalty"


@dataclass
class RoundReport:
    outcome: str
    actions_taken: int
    accumulated_cost: float
    replans: int
    seed: str
    wall_time: float = 0.0

    def as_dict(self, *, timings: bool = False) -> dict:
        d = {"outcome": self.outcome,
             "actions_taken": self.actions_taken,
             "accumulated_cost": self.accumulated_cost,
             "replans": self.replans,
             "seed": self.seed}
        if timings:
            d["wall_time"] = self.wall_time
        return d


@dataclass
class EvalStats:
    rounds: int
    successes: int
    success_probability: float
    expected_cost: float
    cost_policy: str = COST_POLICY

    def as_dict(self) -> dict:
        return {"rounds": self.rounds,
                "successes": self.successes,
                "success_probability": self.success_probability,
                "expected_cost": self.expected_cost,
                "cost_policy": self.cost_policy}


class SimulatedEnvironment:
    """Samples successor states according to the problem's true transitions."""

    def __init__(self, problem: GroundedProblem):
        self.problem = problem

    def reset(self) -> State:
        return self.problem.initial_state

    def step(self, s: State, action_id: int, rng: random.Random) -> State:
        try:
            dist = successors(s, action_id, self.problem)
        except NotApplicableError as exc:
            raise EnvMismatchError(str(exc)) from exc
        r = rng.random()
        acc = 0.0
        for nxt, p in dist:
            acc += p
            if r < acc:
                return nxt
        return dist[-1][0]


class ReplanSession:
    """Reduction + solver tables shared across rounds for one determinization."""

    def __init__(self, problem: GroundedProblem, delta: Determinization,
                 k: int, epsilon: float = 1e-3,
                 cfg: SolverConfig | None = None):
        self.problem = problem
        self.model = make_reduction(problem, delta, k)
        self.cfg = cfg if cfg is not None else SolverConfig(epsilon=epsilon)
        self.tables = SolverTables()
        self.solve_reports: list[SolveReport] = []

    def run_round(self, rng: random.Random, seed_label: str, *,
                  env: SimulatedEnvironment | None = None,
                  max_actions: int = DEFAULT_ACTION_CAP,
                  time_budget: float | None = None) -> RoundReport:
        env = env if env is not None else SimulatedEnvironment(self.problem)
        deadline = (time.monotonic() + time_budget
                    if time_budget is not None else None)
        start = time.monotonic()
        s = env.reset()
        cost = 0.0
        taken = 0
        replans = 0
        while True:
            if is_goal(s, self.problem):
                outcome = OUTCOME_GOAL
                break
            if taken >= max_actions:
                outcome = OUTCOME_ACTION_CAP
                break
            if deadline is not None and time.monotonic() > deadline:
                outcome = OUTCOME_TIMEOUT
                break
            aug = AugmentedState(s, 0)
            if aug not in self.tables.pi:
                _, report = ff_lao_star(self.model, self.cfg, self.tables,
                                        root=aug)
                self.solve_reports.append(report)
                replans += 1
            action_id = self.tables.pi[aug]
            if action_id == NOP:
                outcome = OUTCOME_DEAD_END
                break
            try:
                s = env.step(s, action_id, rng)
            except EnvMismatchError:
                outcome = OUTCOME_INVALID
                break
            cost += self.problem.actions[action_id].cost_f
            taken += 1
        return RoundReport(outcome, taken, cost, replans, seed_label,
                           time.monotonic() - start)


def round_rng(seed: int, round_index: int) -> tuple[random.Random, str]:
    """Per-round RNG derived from the master seed; the label alone replays
    the round."""
    label = f"{seed}:{round_index}"
    return random.Random(label), label


def replan_execute(problem: GroundedProblem, delta: Determinization, k: int,
                   epsilon: float, *, seed: int = 0, round_index: int = 0,
                   max_actions: int = DEFAULT_ACTION_CAP,
                   time_budget: float | None = None,
                   env: SimulatedEnvironment | None = None,
                   session: ReplanSession | None = None,
                   cfg: SolverConfig | None = None) -> RoundReport:
    """Execute one seeded round with replanning; pass a session to share
    solver tables across rounds."""
    if session is None:
        session = ReplanSession(problem, delta, k, epsilon, cfg)
    rng, label = round_rng(seed, round_index)
    return session.run_round(rng, label, env=env, max_actions=max_actions,
                             time_budget=time_budget)


def aggregate(reports: list[RoundReport], m_cap: float) -> EvalStats:
    successes = sum(1 for r in reports if r.outcome == OUTCOME_GOAL)
    if reports:
        costs = [r.accumulated_cost + (0.0 if r.outcome == OUTCOME_GOAL else m_cap)
                 for r in reports]
        mean_cost = sum(costs) / len(costs)
        p = successes / len(reports)
    else:
        mean_cost = 0.0
        p = 0.0
    return EvalStats(len(reports), successes, p, mean_cost)


def monte_carlo_evaluate(problem: GroundedProblem, delta: Determinization,
                         k: int, epsilon: float, rounds: int, seed: int, *,
                         max_actions: int = DEFAULT_ACTION_CAP,
                         time_budget: float | None = None,
                         cfg: SolverConfig | None = None,
                         session: ReplanSession | None = None,
                         ) -> tuple[EvalStats, list[RoundReport]]:
    """Run seeded rounds sharing solver tables and aggregate the results.

    ``time_budget`` bounds the whole evaluation; rounds that do not finish
    in time are recorded as timeouts and count as failures.
    """
    if session is None:
        session = ReplanSession(problem, delta, k, epsilon, cfg)
    deadline = time.monotonic() + time_budget if time_budget is not None else None
    reports: list[RoundReport] = []
    for r in range(rounds):
        rng, label = round_rng(seed, r)
        remaining = None
        if deadline is not None:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                reports.append(RoundReport(OUTCOME_TIMEOUT, 0, 0.0, 0, label))
                continue
        reports.append(session.run_round(
            rng, label, max_actions=max_actions, time_budget=remaining))
    return aggregate(reports, session.cfg.m_cap), reports


# ── stdio state/action protocol ──────────────────────────────────────────────
#
# One JSON object per line. The server (this side) simulates the problem;
# the client chooses actions:
#   -> {"schema_version": 1, "type": "hello", ...}
#   -> {"type": "state", "round": r, "step": t, "atoms": [...], "goal": bool}
#   <- {"action": "(name args)"}        null action forfeits the round
#   -> {"type": "round-end", "round": r, "outcome": ..., "actions": n, "cost": c}
#   -> {"type": "eval", ...}

PROTOCOL_VERSION = 1


def serve_rounds(problem: GroundedProblem, reader, writer, *, rounds: int,
                 seed: int, max_actions: int = DEFAULT_ACTION_CAP,
                 m_cap: float = 500.0) -> EvalStats:
    """Drive the stdio protocol: the remote side supplies the actions."""

    def send(obj: dict) -> None:
        writer.write(json.dumps(obj) + "\n")
        writer.flush()

    actions_by_name = {a.name: a for a in problem.actions}
    send({"schema_version": PROTOCOL_VERSION, "type": "hello",
          "domain": problem.domain_name, "problem": problem.problem_name,
          "rounds": rounds, "max_actions": max_actions})
    reports: list[RoundReport] = []
    hung_up = False
    for r in range(rounds):
        rng, label = round_rng(seed, r)
        s = problem.initial_state
        cost = 0.0
        taken = 0
        outcome = None
        while outcome is None:
            if is_goal(s, problem):
                outcome = OUTCOME_GOAL
                break
            if taken >= max_actions:
                outcome = OUTCOME_ACTION_CAP
                break
            send({"type": "state", "round": r, "step": taken,
                  "atoms": problem.atom_names(s), "goal": False})
            line = reader.readline()
            if not line:
                outcome = OUTCOME_DEAD_END
                hung_up = True
                break
            msg = json.loads(line)
            name = msg.get("action")
            if name is None:
                outcome = OUTCOME_DEAD_END
                break
            action = actions_by_name.get(name)
            if action is None:
                outcome = OUTCOME_INVALID
                break
            try:
                dist = successors(s, action.id, problem)
            except NotApplicableError:
                outcome = OUTCOME_INVALID
                break
            roll = rng.random()
            acc = 0.0
            nxt = dist[-1][0]
            for candidate, p in dist:
                acc += p
                if roll < acc:
                    nxt = candidate
                    break
            s = nxt
            cost += action.cost_f
            taken += 1
        reports.append(RoundReport(outcome, taken, cost, 0, label))
        send({"type": "round-end", "round": r, "outcome": outcome,
              "actions": taken, "cost": cost})
        if hung_up:
            break
    stats = aggregate(reports, m_cap)
    send({"type": "eval", **stats.as_dict()})
    return stats
