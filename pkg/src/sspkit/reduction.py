"""Reduced models over augmented states (base state, exception count).

A determinization designates one primary outcome per action clause at the
schema level, so it transfers across problem instances of the same domain.
The reduced transition keeps primary probabilities below the exception
bound, routes exceptions to an incremented count, and at the bound drops
exceptions and renormalizes primary probabilities proportionally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import IncompleteDeterminizationError, NotApplicableError
from .grounding import GroundedProblem
from .model import State, applicable_actions, is_applicable, is_goal
from .ppddl import DomainSchema


@dataclass(frozen=True)
class Determinization:
    """Primary outcome index per (schema name, clause index).

    Indices address each clause's effective outcome list, so a clause's
    residual no-op outcome is a valid choice.
    """

    choices: dict[tuple[str, int], int]

    def primary_tuple(self, schema_name: str, clause_count: int) -> tuple[int, ...]:
        return tuple(self.choices[(schema_name, c)] for c in range(clause_count))

    def to_text(self) -> str:
        lines = [f"{name}/{clause} -> {idx}"
                 for (name, clause), idx in sorted(self.choices.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Determinization":
        choices: dict[tuple[str, int], int] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                key, value = line.split("->")
                name, clause = key.strip().rsplit("/", 1)
                choices[(name, int(clause))] = int(value.strip())
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad determinization entry "
                                 f"{raw!r}") from exc
        return cls(choices)

    def validate(self, schema: DomainSchema) -> None:
        """Check coverage of every clause with an in-range outcome index."""
        for action in schema.action_schemas:
            for c, clause in enumerate(action.clauses):
                idx = self.choices.get((action.name, c))
                if idx is None:
                    raise IncompleteDeterminizationError(
                        f"no primary outcome for {action.name}/{c}")
                if not 0 <= idx < clause.effective_count():
                    raise IncompleteDeterminizationError(
                        f"outcome index {idx} out of range for {action.name}/{c} "
                        f"({clause.effective_count()} outcomes)")


def mlo_determinization(schema: DomainSchema) -> Determinization:
    """Most-likely-outcome determinization (ties break to the lowest index)."""
    choices: dict[tuple[str, int], int] = {}
    for action in schema.action_schemas:
        for c, clause in enumerate(action.clauses):
            outcomes = clause.effective_outcomes()
            best = max(range(len(outcomes)),
                       key=lambda i: (outcomes[i].probability, -i))
            choices[(action.name, c)] = best
    return Determinization(choices)


class AugmentedState(NamedTuple):
    state: State
    j: int


class ReducedModel:
    """Lazy reduced model: successors are computed on demand, never stored.

    ``primary_sets`` gives, per ground action, the indices of its primary
    outcomes. Determinization-derived models always have singletons; the
    general constructor accepts larger sets (renormalized proportionally at
    the bound) for verification purposes.
    """

    def __init__(self, problem: GroundedProblem, k: int,
                 primary_sets: list[tuple[int, ...]],
                 delta: Determinization | None = None):
        if k < 0:
            raise ValueError("exception bound k must be >= 0")
        if len(primary_sets) != len(problem.actions):
            raise ValueError("one primary outcome set per ground action required")
        self.problem = problem
        self.k = k
        self.primary_sets = primary_sets
        self.delta = delta
        self.initial = AugmentedState(problem.initial_state, 0)
        self._det_problem = None

    def is_single_primary(self) -> bool:
        return all(len(s) == 1 for s in self.primary_sets)

    def is_goal(self, aug: AugmentedState) -> bool:
        return is_goal(aug.state, self.problem)

    def cost(self, action_id: int) -> float:
        return self.problem.actions[action_id].cost_f

    def applicable(self, aug: AugmentedState) -> list[int]:
        """Applicable actions at an augmented state.

        At the exception bound, actions whose primary set is empty have no
        well-formed successor distribution and are filtered out.
        """
        ids = applicable_actions(aug.state, self.problem)
        if aug.j >= self.k:
            ids = [a for a in ids if self.primary_sets[a]]
        return ids

    def reduced_successors(self, aug: AugmentedState,
                           action_id: int) -> list[tuple[AugmentedState, float]]:
        """Successor distribution over augmented states for one action."""
        s, j = aug
        if not is_applicable(s, action_id, self.problem):
            raise NotApplicableError(
                f"action {self.problem.actions[action_id].name} not applicable")
        action = self.problem.actions[action_id]
        primary = self.primary_sets[action_id]
        merged: dict[tuple[int, int], float] = {}
        if j < self.k:
            for idx, o in enumerate(action.outcomes):
                succ_bits = (s.bits & ~o.del_mask) | o.add_mask
                j2 = j if idx in primary else j + 1
                key = (succ_bits, j2)
                merged[key] = merged.get(key, 0.0) + o.probability_f
        else:
            if not primary:
                raise NotApplicableError(
                    f"action {action.name} has no primary outcome at the "
                    "exception bound")
            total = sum(action.outcomes[i].probability_f for i in primary)
            for idx in primary:
                o = action.outcomes[idx]
                succ_bits = (s.bits & ~o.del_mask) | o.add_mask
                key = (succ_bits, self.k)
                merged[key] = merged.get(key, 0.0) + o.probability_f / total
        return [(AugmentedState(State(bits), j2), p)
                for (bits, j2), p in merged.items()]

    def det_problem(self):
        """The deterministic problem induced at the exception bound.

        Only defined for single-primary models. Actions whose primary
        outcome is a universal no-op (strict self-loops) are excluded:
        they can never appear in a finite-cost plan.
        """
        if self._det_problem is None:
            if not self.is_single_primary():
                raise ValueError("deterministic projection requires a "
                                 "single primary outcome per action")
            from .detplan import DetAction, DeterministicProblem
            det_actions = []
            for a in self.problem.actions:
                (idx,) = self.primary_sets[a.id]
                o = a.outcomes[idx]
                if not o.add_mask and not o.del_mask:
                    continue
                det_actions.append(DetAction(
                    id=a.id, name=a.name,
                    pre_pos_mask=a.pre_pos_mask, pre_neg_mask=a.pre_neg_mask,
                    add_mask=o.add_mask, del_mask=o.del_mask, cost=a.cost_f))
            self._det_problem = DeterministicProblem(
                atom_names=self.problem.atoms,
                actions=det_actions,
                goal_mask=self.problem.goal_mask)
        return self._det_problem


def make_reduction(problem: GroundedProblem, delta: Determinization,
                   k: int) -> ReducedModel:
    """Build the reduced model for a schema-level determinization.

    The per-ground-action primary outcome is the unique joint outcome whose
    per-clause choices all match the determinization.
    """
    delta.validate(problem.schema)
    primary_sets: list[tuple[int, ...]] = []
    targets: dict[str, tuple[int, ...]] = {}
    for a in problem.actions:
        target = targets.get(a.schema_name)
        if target is None:
            schema = problem.schema.schema(a.schema_name)
            target = delta.primary_tuple(a.schema_name, len(schema.clauses))
            targets[a.schema_name] = target
        matches = tuple(i for i, o in enumerate(a.outcomes) if o.choice == target)
        if len(matches) != 1:
            raise IncompleteDeterminizationError(
                f"determinization selects {len(matches)} primary outcomes "
                f"for {a.name}")
        primary_sets.append(matches)
    return ReducedModel(problem, k, primary_sets, delta)
