"""Deterministic planner tests: plan validity, heuristic values, budgets,
the completeness fallback, and the external planner hook."""

import math
import os
import random
import stat
import sys

import pytest

from sspkit import State, ground, make_reduction
from sspkit.detplan import (DetAction, DeterministicProblem,
                            det_to_pddl, relaxed_plan_heuristic,
                            sanitize_action_name, solve_deterministic,
                            solve_with_external, validate_plan)
from sspkit.errors import ExternalPlannerError
from sspkit.oracle import enumerate_model, optimal_plan
from sspkit.ppddl import parse_domain
from sspkit.randmodels import random_domain
from sspkit.reduction import Determinization


def det_problem(atoms, actions, goal):
    index = {a: i for i, a in enumerate(atoms)}

    def mask(keys):
        bits = 0
        for key in keys:
            bits |= 1 << index[key]
        return bits

    det_actions = [
        DetAction(i, name, mask(pre), mask(npre), mask(add), mask(dele), cost)
        for i, (name, pre, npre, add, dele, cost) in enumerate(actions)]
    return DeterministicProblem(tuple(atoms), det_actions, mask(goal)), mask


CHAIN = ( ["s", "m", "g"],
          [("step1", ["s"], [], ["m"], ["s"], 1.0),
           ("step2", ["m"], [], ["g"], ["m"], 1.0)],
          ["g"] )


def test_goal_already_satisfied():
    d, mask = det_problem(*CHAIN)
    result = solve_deterministic(d, State(mask(["g"])))
    assert result.found and len(result) == 0 and result.cost == 0.0


def test_chain_plan_and_suffix_costs():
    d, mask = det_problem(*CHAIN)
    start = State(mask(["s"]))
    result = solve_deterministic(d, start)
    assert result.found
    assert [aid for _, aid in result.steps] == [0, 1]
    assert result.suffix_costs == [2.0, 1.0]
    assert validate_plan(d, start, result)
    # greedy plans cost at least the uniform-cost optimum
    optimal = solve_deterministic(d, start, mode="optimal")
    assert optimal.cost == 2.0
    assert result.cost >= optimal.cost


def test_unreachable_goal_is_provable_failure():
    atoms = ["s", "g"]
    actions = [("noop", ["s"], [], ["s"], [], 1.0)]
    d, mask = det_problem(atoms, actions, ["g"])
    result = solve_deterministic(d, State(mask(["s"])))
    assert result.status == "failure"


def test_budget_exceeded_is_timeout():
    # 12-bit binary counter: huge space, tiny budget
    n = 12
    atoms = [f"b{i}" for i in range(n)] + ["g"]
    actions = []
    for i in range(n):
        pre = [f"b{j}" for j in range(i)]
        actions.append((f"inc{i}", pre, [f"b{i}"], [f"b{i}"],
                        [f"b{j}" for j in range(i)], 1.0))
    d, mask = det_problem(atoms, actions, [f"b{i}" for i in range(n)])
    result = solve_deterministic(d, State(0), budget=50, mode="optimal")
    assert result.status == "timeout"
    assert result.expansions >= 50


def test_heuristic_values():
    d, mask = det_problem(*CHAIN)
    assert relaxed_plan_heuristic(d, State(mask(["g"]))) == 0.0
    assert relaxed_plan_heuristic(d, State(mask(["s"]))) == 2.0
    assert relaxed_plan_heuristic(d, State(0)) == math.inf


def test_heuristic_infinite_implies_solver_failure():
    d, mask = det_problem(*CHAIN)
    empty = State(0)
    assert relaxed_plan_heuristic(d, empty) == math.inf
    assert solve_deterministic(d, empty).status == "failure"


def test_all_outcomes_heuristic_on_probabilistic_problem(triangle1):
    _, _, grounded = triangle1
    h = relaxed_plan_heuristic(grounded, grounded.initial_state)
    # direct route is two moves under the delete relaxation
    assert h == 2.0


def test_greedy_fallback_to_uniform_cost():
    # helpful actions lead into a dead branch; the fallback still solves it
    atoms = ["s", "m", "y", "m2", "g"]
    actions = [
        ("trap", ["s"], [], ["m"], ["s", "y"], 1.0),
        ("use-m", ["m", "y"], [], ["g"], [], 1.0),
        ("side", ["s"], [], ["m2"], ["s"], 5.0),
        ("use-m2", ["m2"], [], ["g"], [], 1.0),
    ]
    d, mask = det_problem(atoms, actions, ["g"])
    start = State(mask(["s", "y"]))
    result = solve_deterministic(d, start)
    assert result.found
    assert validate_plan(d, start, result)
    assert [aid for _, aid in result.steps] == [2, 3]


def test_plans_valid_and_no_cheaper_than_oracle():
    rng = random.Random(97)
    solved = failed = 0
    for _ in range(60):
        schema, prob = random_domain(rng, n_atoms=6, deterministic=True)
        grounded = ground(schema, prob)
        delta = Determinization({(a.name, 0): 0
                                 for a in schema.action_schemas})
        det = make_reduction(grounded, delta, 0).det_problem()
        result = solve_deterministic(det, grounded.initial_state)
        explicit = enumerate_model(grounded, cap=5000)
        best = optimal_plan(explicit)
        if result.found:
            solved += 1
            assert best is not None
            assert validate_plan(det, grounded.initial_state, result)
            assert result.cost >= best[0] - 1e-9
        else:
            failed += 1
            assert best is None
    assert solved > 5 and failed > 5  # the generator covers both cases


def test_optimal_mode_matches_oracle():
    rng = random.Random(3)
    for _ in range(40):
        schema, prob = random_domain(rng, n_atoms=6, deterministic=True)
        grounded = ground(schema, prob)
        delta = Determinization({(a.name, 0): 0
                                 for a in schema.action_schemas})
        det = make_reduction(grounded, delta, 0).det_problem()
        result = solve_deterministic(det, grounded.initial_state,
                                     mode="optimal")
        best = optimal_plan(enumerate_model(grounded, cap=5000))
        if best is None:
            assert result.status == "failure"
        else:
            assert result.found
            assert result.cost == pytest.approx(best[0], abs=1e-9)


def test_det_to_pddl_reparses(chain2):
    _, _, grounded = chain2
    delta = Determinization({("step", 0): 0})
    det = make_reduction(grounded, delta, 0).det_problem()
    domain_text, problem_text = det_to_pddl(det, grounded.initial_state.bits)
    schema = parse_domain(domain_text)
    assert len(schema.action_schemas) == len(det.actions)


def _write_script(tmp_path, body: str) -> str:
    path = tmp_path / "fake-planner.py"
    path.write_text(f"#!{sys.executable}\n{body}")
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return str(path)


def test_external_planner_hook(tmp_path, chain2):
    _, _, grounded = chain2
    delta = Determinization({("step", 0): 0})
    det = make_reduction(grounded, delta, 0).det_problem()
    plan = "\\n".join(sanitize_action_name(a.name)
                      for a in sorted(det.actions, key=lambda a: a.name))
    script = _write_script(tmp_path, f"""
import sys
print("; external plan")
for name in "{plan}".split("\\\\n"):
    print("(" + name + ")")
""")
    result = solve_with_external(det, grounded.initial_state,
                                 [sys.executable, script])
    assert result.found
    assert validate_plan(det, grounded.initial_state, result)


def test_external_planner_failure_and_garbage(tmp_path, chain2):
    _, _, grounded = chain2
    delta = Determinization({("step", 0): 0})
    det = make_reduction(grounded, delta, 0).det_problem()
    unsolvable = _write_script(tmp_path, "import sys; sys.exit(10)")
    result = solve_with_external(det, grounded.initial_state,
                                 [sys.executable, unsolvable])
    assert result.status == "failure"
    garbage = _write_script(tmp_path, 'print("(no-such-action)")')
    with pytest.raises(ExternalPlannerError):
        solve_with_external(det, grounded.initial_state,
                            [sys.executable, garbage])
