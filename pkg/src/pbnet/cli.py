"""Command-line driver: one subcommand per pipeline stage.

Files are the protocol between stages: nets and DAGs travel as JSON in
the interchange format, joint tables as {"variables", "probs"} JSON,
samples as CSV with a header of variable names and integer symbol rows.
All structured stdout is byte-stable for fixed inputs and flags; runs
that draw randomness take it from --seed only.

Exit codes: 0 success, 1 domain errors (infeasible budget, capacity,
bad inputs), 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .checker import check_markov
from .dist import (
    ExactOracle,
    JointTable,
    from_bayes_net,
    load_table,
    marginalize,
    table_from_dict,
    tv_distance,
)
from .enumeration import (
    dag_count_upper_bound,
    feasible_sequences,
    realize_dags,
    total_dag_bound,
)
from .epsnet import build_grid, grid_size_bound
from .errors import InputError, PBNetError
from .hardness import LearnInstance, exhaustive_learner, random_learner, reduction_decide, replay_learner
from .learner import LearnRequest, learn
from .model import (
    BayesNet,
    Variable,
    d_separated,
    dag_from_dict,
    dag_to_dict,
    load_dag,
    load_net,
    net_from_dict,
    net_to_dict,
    parameter_count,
    sample,
    save_net,
)
from .tournament import (
    SampleSet,
    TournamentConfig,
    read_samples_csv,
    required_samples,
    run_scheffe,
    write_samples_csv,
)

DEFAULT_TABLE_CAP = 2 ** 24


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _emit(args, payload: dict, text_lines) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _split_given(values) -> list[str]:
    out = []
    for chunk in values or ():
        out.extend(part.strip() for part in chunk.split(",") if part.strip())
    return out


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def cmd_params(args) -> int:
    dag = dag_from_dict(_load_json(args.net))
    count = parameter_count(dag)
    _emit(args, {"parameters": count}, [str(count)])
    return 0


def cmd_dsep(args) -> int:
    dag = dag_from_dict(_load_json(args.net))
    given = _split_given(args.given)
    answer = d_separated(dag, args.u, args.v, given)
    _emit(args, {"d_separated": answer}, ["true" if answer else "false"])
    return 0


def cmd_sample(args) -> int:
    net = net_from_dict(_load_json(args.net))
    rows = sample(net, args.count, seed=args.seed)
    names = net.dag.names
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_samples_csv(fh, names, rows)
    else:
        write_samples_csv(sys.stdout, names, rows)
    return 0


def cmd_tv(args) -> int:
    a = table_from_dict(_load_json(args.a))
    b = table_from_dict(_load_json(args.b))
    value = tv_distance(a, b)
    _emit(args, {"tv": value}, [repr(value)])
    return 0


def _table_for_check(args) -> JointTable:
    if (args.table is None) == (args.net is None):
        raise InputError("check needs exactly one of --table or --net")
    if args.table is not None:
        return table_from_dict(_load_json(args.table))
    return from_bayes_net(net_from_dict(_load_json(args.net)), cap=args.table_cap)


def cmd_check(args) -> int:
    dag = dag_from_dict(_load_json(args.dag))
    table = _table_for_check(args)
    oracle = ExactOracle(table)
    verdict = check_markov(oracle, dag)
    names = dag.names
    witness = None
    lines = ["YES" if verdict.is_markov else "NO"]
    if not verdict.is_markov:
        a, b = verdict.witness
        witness = {
            "edge": [names[a], names[b]],
            "given": [names[x] for x in verdict.witness_given],
        }
        given = ", ".join(witness["given"]) or "{}"
        lines.append(f"witness: {names[a]} -> {names[b]} given {given}")
    payload = {
        "markov": verdict.is_markov,
        "witness": witness,
        "oracle_calls": verdict.oracle_calls,
    }
    _emit(args, payload, lines)
    return 0


def cmd_enum_dags(args) -> int:
    if args.count_only:
        rows = []
        total = 0
        bound_total = 0
        for seq in feasible_sequences(args.n, args.alphabet, args.p):
            realized = sum(1 for _ in realize_dags(seq, alphabet=args.alphabet))
            bound = dag_count_upper_bound(seq)
            rows.append({"degrees": list(seq), "dags": realized, "bound": bound})
            total += realized
            bound_total += bound
        closed_form = total_dag_bound(args.n, args.alphabet, args.p)
        payload = {
            "sequences": rows,
            "total": total,
            "sum_of_bounds": bound_total,
            "closed_form_bound": closed_form,
        }
        lines = [f"{'degrees':<16} {'dags':>8} {'bound':>8}"]
        for row in rows:
            lines.append(f"{str(tuple(row['degrees'])):<16} {row['dags']:>8} {row['bound']:>8}")
        lines.append(f"total dags: {total}")
        lines.append(f"sum of per-sequence bounds: {bound_total}")
        lines.append(f"closed-form bound: {closed_form}")
        _emit(args, payload, lines)
    else:
        for seq in feasible_sequences(args.n, args.alphabet, args.p):
            for dag in realize_dags(seq, alphabet=args.alphabet):
                print(json.dumps(dag_to_dict(dag), sort_keys=True))
    return 0


def cmd_net_size(args) -> int:
    grid = build_grid(args.alphabet, args.n, args.eps)
    m1 = grid_size_bound(args.alphabet, args.n, args.eps, args.p)
    m2 = total_dag_bound(args.n, args.alphabet, args.p)
    m = m1 * m2
    payload = {
        "grid_resolution": grid.resolution,
        "grid_points": grid.size,
        "m1": m1,
        "m2": m2,
        "m": m,
    }
    lines = [
        f"grid resolution: {grid.resolution}",
        f"grid points per row: {grid.size}",
        f"m1 (candidates per DAG): {m1}",
        f"m2 (DAG count bound): {m2}",
        f"m = m1 * m2: {m}",
    ]
    if args.delta is not None:
        config = TournamentConfig(eps=args.eps, delta=args.delta, rng_seed=args.seed)
        budget = required_samples(m, config)
        payload["required_samples"] = budget
        lines.append(f"required samples: {budget}")
    _emit(args, payload, lines)
    return 0


def _load_candidates(path) -> list[BayesNet]:
    nets = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    nets.append(net_from_dict(json.loads(line)))
                except json.JSONDecodeError as exc:
                    raise InputError(f"{path}:{lineno}: not valid JSON: {exc}") from None
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    return nets


def cmd_select(args) -> int:
    nets = _load_candidates(args.candidates)
    if not nets:
        raise InputError("candidate file is empty")
    names, rows = read_samples_csv(args.samples)
    if names != nets[0].dag.names:
        raise InputError("sample header does not match the candidate variables")
    samples = SampleSet(nets[0].variables, rows)
    config = TournamentConfig(eps=args.eps, delta=args.delta, rng_seed=args.seed)
    report = run_scheffe(samples, nets, config)
    payload = {
        "winner_index": report.winner_index,
        "samples_consumed": report.samples_consumed,
        "comparisons": report.comparisons,
        "m": len(nets),
    }
    lines = [
        f"winner index: {report.winner_index}",
        f"samples consumed: {report.samples_consumed}",
        f"comparisons: {report.comparisons}",
    ]
    if args.out:
        save_net(report.winner, args.out)
    else:
        payload["net"] = net_to_dict(report.winner)
    _emit(args, payload, lines)
    return 0


def cmd_learn(args) -> int:
    if (args.samples is None) == (args.generator is None):
        raise InputError("learn needs exactly one of --samples or --generator")
    samples = None
    generator = None
    if args.samples is not None:
        if args.alphabet is None:
            raise InputError("--samples needs --alphabet to fix the variable alphabets")
        names, rows = read_samples_csv(args.samples)
        variables = tuple(Variable(name, args.alphabet) for name in names)
        samples = SampleSet(variables, rows)
    else:
        generator = net_from_dict(_load_json(args.generator))
    request = LearnRequest(
        p=args.p,
        eps=args.eps,
        delta=args.delta,
        samples=samples,
        generator=generator,
        sample_count=args.count,
        alphabet=args.alphabet,
        seed=args.seed,
        top_k=args.top_k,
    )
    result = learn(request)
    payload = {
        "parameters": parameter_count(result.net.dag),
        "candidate_count": result.candidate_count,
        "samples_used": result.samples_used,
        "wall_stats": result.wall_stats,
    }
    lines = [
        f"parameters: {payload['parameters']}",
        f"candidates: {result.candidate_count}",
        f"samples used: {result.samples_used}",
    ]
    if args.out:
        save_net(result.net, args.out)
    else:
        payload["net"] = net_to_dict(result.net)
    _emit(args, payload, lines)
    return 0


def cmd_reduce(args) -> int:
    obj = _load_json(args.instance)
    if "p" not in obj:
        raise InputError("instance file needs a 'p' field")
    table = table_from_dict(obj)
    instance = LearnInstance(table, int(obj["p"]))
    if args.learner == "exhaustive":
        blackbox = exhaustive_learner
    elif args.learner == "random":
        blackbox = random_learner(args.seed)
    else:
        if not args.replay:
            raise InputError("file-replay needs --replay with a net file")
        blackbox = replay_learner(net_from_dict(_load_json(args.replay)))
    result = reduction_decide(instance, blackbox)
    payload = {
        "decision": result.decision,
        "oracle_calls": result.oracle_calls,
        "parameters": result.parameters,
        "budget": instance.p,
    }
    lines = [
        result.decision,
        f"parameters: {result.parameters} (budget {instance.p})",
        f"oracle calls: {result.oracle_calls}",
    ]
    _emit(args, payload, lines)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pbnet",
        description="Exact discrete Bayes nets and parameter-bounded structure search.",
    )
    parser.add_argument("--version", action="version", version=f"pbnet {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="seed for all randomized steps")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument(
        "--table-cap",
        type=int,
        default=int(os.environ.get("BN_TABLE_CAP", DEFAULT_TABLE_CAP)),
        help="largest joint table, in cells, that will be materialized",
    )
    parser.add_argument("--workers", type=int, default=1, help="reserved; the driver is sequential")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="parameter count of a net or DAG file")
    p.add_argument("net")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("dsep", help="d-separation query on a DAG file")
    p.add_argument("net")
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--given", action="append", help="conditioning variable (repeatable, comma ok)")
    p.set_defaults(func=cmd_dsep)

    p = sub.add_parser("sample", help="ancestral samples from a net, as CSV")
    p.add_argument("net")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("tv", help="total variation distance between two table files")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_tv)

    p = sub.add_parser("check", help="is the distribution Markov for the DAG?")
    p.add_argument("dag")
    p.add_argument("--table", help="joint table JSON")
    p.add_argument("--net", help="net JSON to materialize instead of --table")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("enum-dags", help="stream every DAG within a parameter budget")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alphabet", type=int, default=2)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=cmd_enum_dags)

    p = sub.add_parser("net-size", help="candidate-count bounds for a budgeted search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alphabet", type=int, default=2)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--delta", type=float, help="also print the sample budget for m candidates")
    p.set_defaults(func=cmd_net_size)

    p = sub.add_parser("select", help="Scheffe selection among candidate nets")
    p.add_argument("--samples", required=True, help="CSV of samples")
    p.add_argument("--candidates", required=True, help="JSONL of nets")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--out", help="write the winner net here instead of stdout")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("learn", help="end-to-end parameter-bounded learning")
    p.add_argument("--samples", help="CSV of samples (needs --alphabet)")
    p.add_argument("--generator", help="net JSON to sample from internally")
    p.add_argument("--count", type=int, help="samples to draw from the generator")
    p.add_argument("--alphabet", type=int)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--top-k", type=int, default=4096)
    p.add_argument("--out", help="write the learned net here instead of stdout")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("reduce", help="audit a blackbox solver into a YES/NO decision")
    p.add_argument("--instance", required=True, help="JSON with variables, probs, p")
    p.add_argument("--learner", choices=("exhaustive", "random", "file-replay"), required=True)
    p.add_argument("--replay", help="net JSON replayed by the file-replay learner")
    p.set_defaults(func=cmd_reduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PBNetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main())
