"""Grounding: instantiate action schemas over typed objects.

Bindings are enumerated exhaustively per schema, filtered by equality
constraints, and pruned with a delete-relaxation reachability check.
Outcome distributions are exact rationals and sum to 1 per ground action
(residual probability mass becomes an explicit no-op outcome).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import GroundingBlowupError
from .model import State
from .ppddl import ROOT_TYPE, ActionSchema, Atom, DomainSchema, ProblemDef

DEFAULT_ACTION_CAP = 10 ** 6


@dataclass(frozen=True)
class GroundOutcome:
    """One joint outcome of a ground action.

    ``choice`` holds the per-clause outcome indices this outcome was built
    from (indices into each clause's effective outcome list, so the residual
    no-op outcome of a clause is addressable).
    """

    probability: Fraction
    probability_f: float
    add_mask: int
    del_mask: int
    choice: tuple[int, ...]


@dataclass
class GroundAction:
    id: int
    name: str
    schema_name: str
    binding: tuple[str, ...]
    pre_pos_mask: int
    pre_neg_mask: int
    cost: Fraction
    cost_f: float
    outcomes: list[GroundOutcome]


@dataclass
class GroundedProblem:
    """A factored stochastic shortest path problem over ground atoms."""

    domain_name: str
    problem_name: str
    schema: DomainSchema
    atoms: tuple[str, ...]
    atom_index: dict[str, int]
    actions: list[GroundAction]
    initial_state: State
    goal_mask: int
    goal_atoms: tuple[str, ...]

    @property
    def atom_count(self) -> int:
        return len(self.atoms)

    @property
    def action_count(self) -> int:
        return len(self.actions)

    def state_from_atoms(self, names) -> State:
        bits = 0
        for name in names:
            bits |= 1 << self.atom_index[name]
        return State(bits)

    def atom_names(self, s: State) -> list[str]:
        """True atoms of a state, in universe (sorted-name) order."""
        return [name for i, name in enumerate(self.atoms) if s.bits >> i & 1]

    def action_by_name(self, name: str) -> GroundAction | None:
        for a in self.actions:
            if a.name == name:
                return a
        return None


def _atom_key(atom: Atom) -> str:
    return str(atom)


def _bind(atom: Atom, env: dict[str, str]) -> str:
    args = tuple(env.get(a, a) for a in atom.args)
    return _atom_key(Atom(atom.pred, args))


def _objects_by_type(schema: DomainSchema, problem: ProblemDef) -> dict[str, list[str]]:
    table: dict[str, list[str]] = {ROOT_TYPE: []}
    for tname in schema.types:
        table.setdefault(tname, [])
    for obj, tname in sorted(problem.objects):
        t = tname
        seen = set()
        while True:
            table.setdefault(t, []).append(obj)
            if t == ROOT_TYPE or t in seen:
                break
            seen.add(t)
            t = schema.types.get(t, ROOT_TYPE)
    return table


@dataclass
class _Candidate:
    schema: ActionSchema
    binding: tuple[str, ...]
    name: str
    pre_pos: frozenset[str]
    pre_neg: frozenset[str]
    # per clause: list of (choice index, probability, add keys, del keys)
    clause_outcomes: list[list[tuple[int, Fraction, tuple[str, ...], tuple[str, ...]]]]


def _instantiate(schema: ActionSchema, binding: tuple[str, ...]) -> _Candidate | None:
    env = {var: obj for (var, _), obj in zip(schema.parameters, binding)}
    for a, b, must_equal in schema.equalities:
        va, vb = env.get(a, a), env.get(b, b)
        if (va == vb) != must_equal:
            return None
    pre_pos = frozenset(_bind(l.atom, env) for l in schema.precondition if not l.negated)
    pre_neg = frozenset(_bind(l.atom, env) for l in schema.precondition if l.negated)
    clause_outcomes = []
    for clause in schema.clauses:
        rows = []
        for idx, outcome in enumerate(clause.effective_outcomes()):
            add = tuple(_bind(a, env) for a in outcome.add)
            dele = tuple(_bind(a, env) for a in outcome.delete)
            rows.append((idx, outcome.probability, add, dele))
        clause_outcomes.append(rows)
    args = " ".join(binding)
    name = f"({schema.name} {args})" if args else f"({schema.name})"
    return _Candidate(schema, binding, name, pre_pos, pre_neg, clause_outcomes)


def _relaxed_reachable(candidates: list[_Candidate], init: set[str]) -> set[str]:
    """Delete-relaxation fixpoint over all outcomes of all candidates.

    Negative preconditions are treated as free, which keeps the resulting
    pruning sound (an over-approximation of reachability).
    """
    reached = set(init)
    pending = list(candidates)
    changed = True
    while changed:
        changed = False
        remaining = []
        for cand in pending:
            if cand.pre_pos <= reached:
                for rows in cand.clause_outcomes:
                    for _, _, add, _ in rows:
                        for key in add:
                            if key not in reached:
                                reached.add(key)
                                changed = True
            else:
                remaining.append(cand)
        pending = remaining
    return reached


def ground(schema: DomainSchema, problem: ProblemDef, *,
           max_actions: int = DEFAULT_ACTION_CAP) -> GroundedProblem:
    """Ground a domain/problem pair into a GroundedProblem.

    Action order is deterministic: lexicographic by schema name, then by
    binding. Raises GroundingBlowupError when the candidate ground action
    count exceeds ``max_actions``.
    """
    by_type = _objects_by_type(schema, problem)

    total = 0
    for action in schema.action_schemas:
        count = 1
        for _, tname in action.parameters:
            count *= len(by_type.get(tname, []))
        total += count
    if total > max_actions:
        raise GroundingBlowupError(
            f"{total} candidate ground actions exceed cap {max_actions}")

    candidates: list[_Candidate] = []
    for action in sorted(schema.action_schemas, key=lambda a: a.name):
        domains = [by_type.get(tname, []) for _, tname in action.parameters]
        for binding in product(*domains):
            cand = _instantiate(action, binding)
            if cand is not None:
                candidates.append(cand)

    init_keys = {_atom_key(a) for a in problem.init}
    reached = _relaxed_reachable(candidates, init_keys)
    candidates = [c for c in candidates if c.pre_pos <= reached]

    universe: set[str] = set(init_keys)
    universe.update(_atom_key(a) for a in problem.goal)
    for cand in candidates:
        universe.update(cand.pre_pos)
        universe.update(cand.pre_neg)
        for rows in cand.clause_outcomes:
            for _, _, add, dele in rows:
                universe.update(add)
                universe.update(dele)

    atoms = tuple(sorted(universe))
    index = {name: i for i, name in enumerate(atoms)}

    def mask(keys) -> int:
        bits = 0
        for key in keys:
            bits |= 1 << index[key]
        return bits

    actions: list[GroundAction] = []
    for cand in candidates:
        if cand.schema.cost <= 0:
            raise ValueError(
                f"action schema {cand.schema.name!r} has non-positive cost")
        outcomes: list[GroundOutcome] = []
        for combo in product(*cand.clause_outcomes):
            p = Fraction(1)
            add_mask = 0
            del_mask = 0
            choice = []
            for idx, prob, add, dele in combo:
                p *= prob
                add_mask |= mask(add)
                del_mask |= mask(dele)
                choice.append(idx)
            del_mask &= ~add_mask  # add wins when clauses conflict
            outcomes.append(GroundOutcome(p, float(p), add_mask, del_mask,
                                          tuple(choice)))
        assert sum(o.probability for o in outcomes) == 1
        actions.append(GroundAction(
            id=len(actions),
            name=cand.name,
            schema_name=cand.schema.name,
            binding=cand.binding,
            pre_pos_mask=mask(cand.pre_pos),
            pre_neg_mask=mask(cand.pre_neg),
            cost=cand.schema.cost,
            cost_f=float(cand.schema.cost),
            outcomes=outcomes,
        ))

    goal_keys = tuple(sorted(_atom_key(a) for a in problem.goal))
    return GroundedProblem(
        domain_name=schema.name,
        problem_name=problem.name,
        schema=schema,
        atoms=atoms,
        atom_index=index,
        actions=actions,
        initial_state=State(mask(init_keys)),
        goal_mask=mask(goal_keys),
        goal_atoms=goal_keys,
    )
