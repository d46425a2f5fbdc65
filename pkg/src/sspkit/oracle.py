"""Ground-truth solvers on explicitly enumerated state spaces.

These exist for desk-scale verification: exact value iteration with the
cost cap, optimal deterministic search, reachability enumeration, and an
almost-sure goal-reachability check (existence of a proper policy).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .errors import CapExceededError
from .grounding import GroundedProblem
from .model import applicable_actions, is_goal, successors
from .reduction import ReducedModel

DEFAULT_STATE_CAP = 100_000


@dataclass
class ExplicitModel:
    """Dense enumeration of the states reachable from the initial state.

    ``actions[i]`` lists (action id, [(successor index, probability)], cost)
    for state index ``i``; goal states keep their action lists but are
    treated as absorbing by the solvers.
    """

    labels: list
    initial: int
    goal: list[bool]
    actions: list[list[tuple[int, list[tuple[int, float]], float]]]

    @property
    def n_states(self) -> int:
        return len(self.labels)

    def is_deterministic(self) -> bool:
        return all(len(succs) == 1 for rows in self.actions
                   for _, succs, _ in rows)


def enumerate_model(source: GroundedProblem | ReducedModel, *,
                    cap: int = DEFAULT_STATE_CAP) -> ExplicitModel:
    """Breadth-first enumeration of a base problem or a reduced model."""
    if isinstance(source, ReducedModel):
        initial = source.initial
        goal_test = source.is_goal
        act = source.applicable
        succ = source.reduced_successors
        cost = source.cost
    else:
        initial = source.initial_state
        goal_test = lambda s: is_goal(s, source)
        act = lambda s: applicable_actions(s, source)
        succ = lambda s, a: successors(s, a, source)
        cost = lambda a: source.actions[a].cost_f

    labels = [initial]
    index = {initial: 0}
    goal = [goal_test(initial)]
    rows: list[list[tuple[int, list[tuple[int, float]], float]]] = []
    frontier = 0
    while frontier < len(labels):
        state = labels[frontier]
        frontier += 1
        state_rows = []
        for action_id in act(state):
            entries = []
            for nxt, p in succ(state, action_id):
                idx = index.get(nxt)
                if idx is None:
                    if len(labels) >= cap:
                        raise CapExceededError(
                            f"reachable state count exceeds cap {cap}")
                    idx = len(labels)
                    index[nxt] = idx
                    labels.append(nxt)
                    goal.append(goal_test(nxt))
                entries.append((idx, p))
            state_rows.append((action_id, entries, cost(action_id)))
        rows.append(state_rows)
    return ExplicitModel(labels, 0, goal, rows)


def value_iteration(m: ExplicitModel, *, epsilon: float = 1e-9,
                    m_cap: float = 500.0,
                    max_sweeps: int = 1_000_000) -> tuple[list[float], list[int]]:
    """Capped value iteration to a fixed point; greedy policy uses the same
    lowest-action-id tie-break as the search solver. Goal values are 0;
    states with no path to the goal converge to exactly the cap."""
    n = m.n_states
    values = [0.0] * n
    policy = [-1] * n
    for _ in range(max_sweeps):
        residual = 0.0
        for i in range(n):
            if m.goal[i]:
                continue
            best = float("inf")
            best_a = -1
            for action_id, succs, cost in m.actions[i]:
                q = cost + sum(p * values[s2] for s2, p in succs)
                if q < best:
                    best = q
                    best_a = action_id
            new_v = m_cap if best_a == -1 else min(m_cap, best)
            residual = max(residual, abs(new_v - values[i]))
            values[i] = new_v
            policy[i] = best_a
        if residual < epsilon:
            break
    return values, policy


def optimal_plan(m: ExplicitModel, start: int | None = None):
    """Minimal-cost plan in a deterministic explicit model.

    Returns (cost, [(state index, action id), ...]) or None when the goal
    is unreachable.
    """
    if not m.is_deterministic():
        raise ValueError("optimal_plan requires a deterministic model")
    start = m.initial if start is None else start
    dist = {start: 0.0}
    parent: dict[int, tuple[int, int]] = {}
    heap = [(0.0, start)]
    done: set[int] = set()
    while heap:
        d, i = heapq.heappop(heap)
        if i in done:
            continue
        done.add(i)
        if m.goal[i]:
            steps = []
            at = i
            while at != start:
                prev, action_id = parent[at]
                steps.append((prev, action_id))
                at = prev
            steps.reverse()
            return d, steps
        for action_id, succs, cost in m.actions[i]:
            (s2, _), = succs
            nd = d + cost
            if s2 not in dist or nd < dist[s2]:
                dist[s2] = nd
                parent[s2] = (i, action_id)
                heapq.heappush(heap, (nd, s2))
    return None


def almost_sure_winning(m: ExplicitModel) -> set[int]:
    """States from which some policy reaches the goal with probability 1.

    Iterates: restrict to actions whose successors stay inside the current
    candidate set, keep the states that can still reach the goal, repeat to
    a fixed point. The initial state being in this set is exactly the
    existence of a proper policy rooted there.
    """
    universe = set(range(m.n_states))
    while True:
        reach = {i for i in universe if m.goal[i]}
        changed = True
        while changed:
            changed = False
            for i in universe:
                if i in reach:
                    continue
                for _, succs, _ in m.actions[i]:
                    targets = [s2 for s2, _ in succs]
                    if all(t in universe for t in targets) and any(
                            t in reach for t in targets):
                        reach.add(i)
                        changed = True
                        break
        if reach == universe:
            return universe
        universe = reach


def proper_policy_exists(m: ExplicitModel) -> bool:
    return m.initial in almost_sure_winning(m)
