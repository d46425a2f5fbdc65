"""Command-line interface.

Subcommands: plan, simulate, learn-det, bench, detplan, oracle, gen.
All randomness flows from --seed (default from SSPKIT_SEED); runs with
identical flags and seed produce byte-identical CSV/JSON outputs. Timing
figures are only emitted under --timings since they would break that
reproducibility guarantee.

Exit codes: 0 success, 2 parse/config failure, 3 grounding failure,
4 solve failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import shlex
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .detplan import solve_deterministic, solve_with_external
from .domains import GENERATORS
from .errors import (CapExceededError, GroundingBlowupError,
                     IterationLimitError, ParseError, SspkitError,
                     TypeMismatchError)
from .executor import (DEFAULT_ACTION_CAP, DEFAULT_TIME_BUDGET,
                       monte_carlo_evaluate, serve_rounds)
from .grounding import GroundedProblem, ground
from .learner import enumerate_determinizations, learning_det
from .oracle import enumerate_model, value_iteration
from .ppddl import DomainSchema, parse_domain, parse_problem
from .reduction import Determinization, make_reduction, mlo_determinization
from .solver import SolverConfig, ff_lao_star

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_GROUND = 3
EXIT_SOLVE = 4


@dataclass
class RunConfig:
    """Validated run parameters shared by the planning subcommands.

    Determinization sources are mutually exclusive (enforced by the
    argument parser); numeric ranges are enforced by the argument types.
    """

    domain: str
    det_source: str  # file | mlo | index | learn
    det_value: str | int | None
    k: int
    epsilon: float
    m_cap: float
    seed: int
    timings: bool
    problem: str | None = None
    rounds: int | None = None
    max_actions: int | None = None
    time_budget: float | None = None

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        if getattr(args, "det_file", None):
            source, value = "file", args.det_file
        elif getattr(args, "det_mlo", False):
            source, value = "mlo", None
        elif getattr(args, "det_index", None) is not None:
            source, value = "index", args.det_index
        else:
            source, value = "learn", getattr(args, "det_learn", None)
        return cls(domain=args.domain, det_source=source, det_value=value,
                   k=args.k, epsilon=args.epsilon, m_cap=args.m_cap,
                   seed=args.seed, timings=args.timings,
                   problem=getattr(args, "problem", None),
                   rounds=getattr(args, "rounds", None),
                   max_actions=getattr(args, "max_actions", None),
                   time_budget=getattr(args, "time_budget", None))

    def echo(self) -> dict:
        out = {"det_source": self.det_source, "k": self.k,
               "epsilon": self.epsilon, "m_cap": self.m_cap,
               "seed": self.seed}
        if self.det_value is not None:
            out["det_value"] = self.det_value
        if self.rounds is not None:
            out["rounds"] = self.rounds
        if self.max_actions is not None:
            out["max_actions"] = self.max_actions
        return out


def _env_seed() -> int:
    try:
        return int(os.environ.get("SSPKIT_SEED", "0"))
    except ValueError:
        return 0


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{value} must be >= 0")
    return value


def _pos_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{value} must be > 0")
    return value


def _pos_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{value} must be > 0")
    return value


def _add_common(parser: argparse.ArgumentParser, *, problem: bool = True) -> None:
    parser.add_argument("--domain", required=True, help="domain file")
    if problem:
        parser.add_argument("--problem", required=True, help="problem file")
    parser.add_argument("--k", type=_nonneg_int, default=0,
                        help="exception bound (default 0)")
    parser.add_argument("--epsilon", type=_pos_float, default=1e-3,
                        help="convergence tolerance (default 1e-3)")
    parser.add_argument("--m-cap", type=_pos_float, default=500.0,
                        help="dead-end cost cap (default 500)")
    parser.add_argument("--seed", type=int, default=_env_seed(),
                        help="master seed (default: SSPKIT_SEED or 0)")
    parser.add_argument("--timings", action="store_true",
                        help="include wall-clock fields in outputs")


def _add_det_source(parser: argparse.ArgumentParser, *,
                    required: bool = True) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--det-file", metavar="FILE",
                       help="determinization file (schema/clause -> outcome)")
    group.add_argument("--det-mlo", action="store_true",
                       help="most-likely-outcome determinization")
    group.add_argument("--det-index", type=_nonneg_int, metavar="N",
                       help="the N-th enumerated determinization")
    group.add_argument("--det-learn", metavar="PROBLEM",
                       help="learn the determinization on this training problem")


def _read(path: str) -> str:
    return Path(path).read_text()


def _load_domain(path: str) -> DomainSchema:
    return parse_domain(_read(path), filename=path)


def _load_grounded(args) -> GroundedProblem:
    schema = _load_domain(args.domain)
    problem = parse_problem(_read(args.problem), schema, filename=args.problem)
    return ground(schema, problem)


def _resolve_delta(args, schema: DomainSchema) -> Determinization:
    if args.det_file:
        delta = Determinization.from_text(_read(args.det_file))
        delta.validate(schema)
        return delta
    if args.det_mlo:
        return mlo_determinization(schema)
    if args.det_index is not None:
        deltas = enumerate_determinizations(schema)
        if args.det_index >= len(deltas):
            raise ValueError(
                f"--det-index {args.det_index} out of range "
                f"({len(deltas)} determinizations)")
        return deltas[args.det_index]
    training = parse_problem(_read(args.det_learn), schema,
                             filename=args.det_learn)
    delta, _ = learning_det(schema, training, k=args.k, rounds=args.rounds
                            if hasattr(args, "rounds") else 50,
                            seed=args.seed, epsilon=args.epsilon)
    return delta


def _delta_text(delta: Determinization) -> str:
    return ";".join(f"{name}/{c}={idx}"
                    for (name, c), idx in sorted(delta.choices.items()))


def _write_output(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _json_dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _finite(x: float) -> float | None:
    return None if math.isinf(x) or math.isnan(x) else x


# ── plan ─────────────────────────────────────────────────────────────────────

def cmd_plan(args) -> int:
    grounded = _load_grounded(args)
    delta = _resolve_delta(args, grounded.schema)
    model = make_reduction(grounded, delta, args.k)
    cfg = SolverConfig(epsilon=args.epsilon, m_cap=args.m_cap,
                       subplanner_budget=args.subplanner_budget)
    try:
        tables, report = ff_lao_star(model, cfg)
    except IterationLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVE
    payload = {
        "schema_version": SCHEMA_VERSION,
        "domain": grounded.domain_name,
        "problem": grounded.problem_name,
        "determinization": _delta_text(delta),
        "config": RunConfig.from_args(args).echo(),
        "v_initial": report.v_root,
        "converged": report.converged,
        "expansions": report.expansions,
        "sweeps": report.sweeps,
        "subplanner_calls": report.subplanner_calls,
        "subplanner_failures": report.subplanner_failures,
        "subplanner_timeouts": report.subplanner_timeouts,
        "residual_trace": [_finite(r) for r in report.residual_trace],
        "policy_size": report.policy_size,
    }
    if args.timings:
        payload["wall_time"] = report.wall_time
    _write_output(_json_dump(payload), args.out)
    return EXIT_OK if report.converged else EXIT_SOLVE


# ── simulate ────────────────────────────────────────────────────────────────

def _round_rows(reports, timings: bool) -> list[dict]:
    return [r.as_dict(timings=timings) for r in reports]


def _rounds_csv(reports, timings: bool) -> str:
    lines = [f"# schema_version: {SCHEMA_VERSION}"]
    header = "round,outcome,actions_taken,accumulated_cost,replans,seed"
    if timings:
        header += ",wall_time"
    lines.append(header)
    for i, r in enumerate(reports):
        row = f"{i},{r.outcome},{r.actions_taken},{r.accumulated_cost!r},{r.replans},{r.seed}"
        if timings:
            row += f",{r.wall_time!r}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> int:
    grounded = _load_grounded(args)
    if args.serve_stdio:
        serve_rounds(grounded, sys.stdin, sys.stdout, rounds=args.rounds,
                     seed=args.seed, max_actions=args.max_actions,
                     m_cap=args.m_cap)
        return EXIT_OK
    if not (args.det_file or args.det_mlo or args.det_index is not None
            or args.det_learn):
        raise ValueError("a determinization source is required "
                         "(--det-file, --det-mlo, --det-index or --det-learn)")
    delta = _resolve_delta(args, grounded.schema)
    cfg = SolverConfig(epsilon=args.epsilon, m_cap=args.m_cap,
                       subplanner_budget=args.subplanner_budget)
    try:
        stats, reports = monte_carlo_evaluate(
            grounded, delta, args.k, args.epsilon, args.rounds, args.seed,
            max_actions=args.max_actions, time_budget=args.time_budget,
            cfg=cfg)
    except IterationLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVE
    payload = {
        "schema_version": SCHEMA_VERSION,
        "domain": grounded.domain_name,
        "problem": grounded.problem_name,
        "determinization": _delta_text(delta),
        "config": RunConfig.from_args(args).echo(),
        "rounds": _round_rows(reports, args.timings),
        "stats": stats.as_dict(),
    }
    _write_output(_json_dump(payload), args.out)
    if args.csv:
        Path(args.csv).write_text(_rounds_csv(reports, args.timings))
    return EXIT_OK


# ── learn-det ───────────────────────────────────────────────────────────────

def cmd_learn_det(args) -> int:
    schema = _load_domain(args.domain)
    training = parse_problem(_read(args.training_problem), schema,
                             filename=args.training_problem)
    delta, ranked = learning_det(
        schema, training, k=args.k, rounds=args.rounds, seed=args.seed,
        epsilon=args.epsilon, max_actions=args.max_actions,
        time_budget=args.time_budget, workers=args.workers)
    if args.out:
        Path(args.out).write_text(delta.to_text())
    lines = [f"# schema_version: {SCHEMA_VERSION}",
             "rank,index,determinization,success_probability,expected_cost,solve_time"]
    for rank, cand in enumerate(ranked):
        t = repr(cand.solve_time) if args.timings else ""
        lines.append(f"{rank},{cand.index},{_delta_text(cand.delta)},"
                     f"{cand.stats.success_probability!r},"
                     f"{cand.stats.expected_cost!r},{t}")
    _write_output("\n".join(lines) + "\n", args.report_csv)
    return EXIT_OK


# ── bench ───────────────────────────────────────────────────────────────────

def cmd_bench(args) -> int:
    schema = _load_domain(args.domain)
    delta = _resolve_delta(args, schema) if args.problems else None
    rows = []
    for path in args.problems:
        problem = parse_problem(_read(path), schema, filename=path)
        grounded = ground(schema, problem)
        cfg = SolverConfig(epsilon=args.epsilon, m_cap=args.m_cap,
                           subplanner_budget=args.subplanner_budget)
        row = {"problem": problem.name, "path": path,
               "determinization": _delta_text(delta), "k": args.k}
        try:
            stats, reports = monte_carlo_evaluate(
                grounded, delta, args.k, args.epsilon, args.rounds, args.seed,
                max_actions=args.max_actions, time_budget=args.time_budget,
                cfg=cfg)
            row.update({
                "rounds_solved": stats.successes,
                "rounds_total": stats.rounds,
                "success_probability": stats.success_probability,
                "expected_cost": stats.expected_cost,
            })
            if args.timings:
                row["wall_time"] = sum(r.wall_time for r in reports)
        except IterationLimitError as exc:
            row.update({"error": str(exc), "rounds_solved": 0,
                        "rounds_total": args.rounds,
                        "success_probability": 0.0,
                        "expected_cost": args.m_cap})
        rows.append(row)
    payload = {"schema_version": SCHEMA_VERSION, "domain": schema.name,
               "config": RunConfig.from_args(args).echo(), "results": rows}
    if args.json:
        Path(args.json).write_text(_json_dump(payload))
    lines = [f"# schema_version: {SCHEMA_VERSION}",
             "problem,rounds_solved,rounds_total,success_probability,expected_cost"
             + (",wall_time" if args.timings else "")]
    for row in rows:
        line = (f"{row['problem']},{row.get('rounds_solved', 0)},"
                f"{row.get('rounds_total', args.rounds)},"
                f"{row.get('success_probability', 0.0)!r},"
                f"{row.get('expected_cost', args.m_cap)!r}")
        if args.timings:
            line += f",{row.get('wall_time', 0.0)!r}"
        lines.append(line)
    _write_output("\n".join(lines) + "\n", args.csv)
    return EXIT_OK


# ── detplan ─────────────────────────────────────────────────────────────────

def cmd_detplan_solve(args) -> int:
    grounded = _load_grounded(args)
    delta = _resolve_delta(args, grounded.schema)
    model = make_reduction(grounded, delta, args.k)
    det = model.det_problem()
    if args.external:
        result = solve_with_external(det, grounded.initial_state,
                                     shlex.split(args.external))
    else:
        result = solve_deterministic(det, grounded.initial_state,
                                     budget=args.subplanner_budget,
                                     mode="optimal" if args.optimal else "greedy")
    if not result.found:
        print(f"no plan: {result.status}", file=sys.stderr)
        return EXIT_SOLVE
    lines = ["; status = plan", f"; cost = {result.cost!r}"]
    for _, action_id in result.steps:
        lines.append(grounded.actions[action_id].name)
    _write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# ── oracle ──────────────────────────────────────────────────────────────────

def _oracle_model(args):
    grounded = _load_grounded(args)
    if args.reduced:
        if not (args.det_file or args.det_mlo or args.det_index is not None):
            raise ValueError("--reduced requires a determinization "
                             "(--det-file, --det-mlo or --det-index)")
        delta = _resolve_delta(args, grounded.schema)
        source = make_reduction(grounded, delta, args.k)
    else:
        source = grounded
    return grounded, enumerate_model(source, cap=args.cap_states)


def cmd_oracle_vi(args) -> int:
    grounded, explicit = _oracle_model(args)
    values, policy = value_iteration(explicit, epsilon=args.epsilon,
                                     m_cap=args.m_cap)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "problem": grounded.problem_name,
        "states": explicit.n_states,
        "epsilon": args.epsilon,
        "m_cap": args.m_cap,
        "v_initial": values[explicit.initial],
    }
    if args.full:
        payload["values"] = values
        payload["policy"] = policy
    _write_output(_json_dump(payload), args.out)
    return EXIT_OK


def cmd_oracle_enumerate(args) -> int:
    grounded, explicit = _oracle_model(args)
    states = []
    for i, label in enumerate(explicit.labels):
        if args.reduced:
            entry = {"index": i, "atoms": grounded.atom_names(label.state),
                     "j": label.j, "goal": explicit.goal[i]}
        else:
            entry = {"index": i, "atoms": grounded.atom_names(label),
                     "goal": explicit.goal[i]}
        states.append(entry)
    transitions = []
    for i, rows in enumerate(explicit.actions):
        for action_id, succs, cost in rows:
            transitions.append({
                "state": i,
                "action": grounded.actions[action_id].name,
                "successors": [[s2, p] for s2, p in succs],
                "cost": cost,
            })
    payload = {"schema_version": SCHEMA_VERSION,
               "problem": grounded.problem_name,
               "states": states, "transitions": transitions}
    _write_output(_json_dump(payload), args.out)
    return EXIT_OK


# ── gen ─────────────────────────────────────────────────────────────────────

def cmd_gen(args) -> int:
    generator = GENERATORS[args.kind]
    if args.kind == "triangle":
        domain_text, problem_text = generator(args.n)
        tag = f"{args.kind}-{args.n}"
    elif args.kind == "chain":
        domain_text, problem_text = generator(args.length)
        tag = f"{args.kind}-{args.length}"
    elif args.kind == "trap":
        domain_text, problem_text = generator(args.walk_length)
        tag = f"{args.kind}-{args.walk_length}"
    else:
        domain_text, problem_text = generator()
        tag = args.kind
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    domain_path = out_dir / f"{tag}-domain.ppddl"
    problem_path = out_dir / f"{tag}-problem.ppddl"
    domain_path.write_text(domain_text)
    problem_path.write_text(problem_text)
    print(domain_path)
    print(problem_path)
    return EXIT_OK


# ── parser assembly ─────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sspkit",
        description="Stochastic shortest path planning with reduced models")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="solve a reduced model")
    _add_common(p)
    _add_det_source(p)
    p.add_argument("--subplanner-budget", type=_pos_int, default=100_000)
    p.add_argument("--out", help="report JSON path (default stdout)")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", help="execute a policy with replanning")
    _add_common(p)
    _add_det_source(p, required=False)
    p.add_argument("--rounds", type=_pos_int, default=50)
    p.add_argument("--max-actions", type=_pos_int, default=DEFAULT_ACTION_CAP)
    p.add_argument("--time-budget", type=_pos_float, default=DEFAULT_TIME_BUDGET,
                   help="wall-clock budget for all rounds (seconds)")
    p.add_argument("--subplanner-budget", type=_pos_int, default=100_000)
    p.add_argument("--out", help="report JSON path (default stdout)")
    p.add_argument("--csv", help="per-round CSV path")
    p.add_argument("--serve-stdio", action="store_true",
                   help="serve the stdio state/action protocol instead of "
                        "planning (the client chooses actions)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("learn-det", help="learn the best determinization")
    p.add_argument("--domain", required=True)
    p.add_argument("--training-problem", required=True)
    p.add_argument("--k", type=_nonneg_int, default=0)
    p.add_argument("--epsilon", type=_pos_float, default=1e-3)
    p.add_argument("--rounds", type=_pos_int, default=50)
    p.add_argument("--max-actions", type=_pos_int, default=DEFAULT_ACTION_CAP)
    p.add_argument("--time-budget", type=_pos_float, default=None)
    p.add_argument("--seed", type=int, default=_env_seed())
    p.add_argument("--workers", type=_pos_int, default=1)
    p.add_argument("--timings", action="store_true")
    p.add_argument("--out", help="winning determinization file")
    p.add_argument("--report-csv", help="ranked CSV path (default stdout)")
    p.set_defaults(func=cmd_learn_det)

    p = sub.add_parser("bench", help="run an ordered list of problems")
    _add_common(p, problem=False)
    _add_det_source(p)
    p.add_argument("--problems", nargs="*", default=[],
                   help="problem files, ordered by size")
    p.add_argument("--rounds", type=_pos_int, default=50)
    p.add_argument("--max-actions", type=_pos_int, default=DEFAULT_ACTION_CAP)
    p.add_argument("--time-budget", type=_pos_float, default=DEFAULT_TIME_BUDGET,
                   help="wall-clock budget per problem (seconds)")
    p.add_argument("--subplanner-budget", type=_pos_int, default=100_000)
    p.add_argument("--csv", help="results CSV path (default stdout)")
    p.add_argument("--json", help="results JSON path")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("detplan", help="deterministic sub-planner tools")
    det_sub = p.add_subparsers(dest="detplan_command", required=True)
    ps = det_sub.add_parser("solve", help="solve the induced deterministic problem")
    _add_common(ps)
    _add_det_source(ps)
    ps.add_argument("--optimal", action="store_true",
                    help="uniform-cost search (minimal-cost plans)")
    ps.add_argument("--subplanner-budget", type=_pos_int, default=100_000)
    ps.add_argument("--external", metavar="CMD",
                    help="shell out to an external planner command")
    ps.add_argument("--out", help="plan text path (default stdout)")
    ps.set_defaults(func=cmd_detplan_solve)

    p = sub.add_parser("oracle", help="exact reference solvers")
    oracle_sub = p.add_subparsers(dest="oracle_command", required=True)
    for name, func in (("vi", cmd_oracle_vi), ("enumerate", cmd_oracle_enumerate)):
        po = oracle_sub.add_parser(name)
        _add_common(po)
        po.add_argument("--reduced", action="store_true",
                        help="enumerate the reduced model instead of the base SSP")
        group = po.add_mutually_exclusive_group()
        group.add_argument("--det-file", metavar="FILE")
        group.add_argument("--det-mlo", action="store_true")
        group.add_argument("--det-index", type=_nonneg_int, metavar="N")
        po.add_argument("--cap-states", type=_pos_int, default=100_000)
        po.add_argument("--out", help="JSON path (default stdout)")
        if name == "vi":
            po.add_argument("--full", action="store_true",
                            help="include the full value/policy tables")
        po.set_defaults(func=func, det_learn=None)

    p = sub.add_parser("gen", help="generate bundled domains")
    p.add_argument("kind", choices=sorted(GENERATORS))
    p.add_argument("--n", type=_pos_int, default=1, help="triangle size")
    p.add_argument("--length", type=_pos_int, default=2, help="chain length")
    p.add_argument("--walk-length", type=_pos_int, default=10,
                   help="trap walkway length")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, TypeMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (GroundingBlowupError, CapExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GROUND
    except IterationLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVE
    except (ValueError, SspkitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
