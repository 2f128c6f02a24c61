"""Command-line front end.

Exit codes: 0 on success, 2 for invalid input or oversized requests, 3 when
an internal invariant breaks (a bug in the solvers, not in the input).
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
from dataclasses import asdict

from .bench import BenchConfig, export_dot, format_table, generate, report_json, run_bench
from .decomposition import decompose
from .errors import (
    DecompositionError,
    GenerationError,
    InstanceError,
    InternalError,
    LpError,
    OracleLimitError,
    ToolkitError,
)
from .exact import exact_opt, reconstruct_walks
from .instances import (
    Instance,
    OrderedInstance,
    Solution,
    load_instance,
    load_solution,
    save_instance,
    save_solution,
)
from .lp import build_static, solve_lp
from .multipath import solve_derandomized, solve_randomized
from .ordered import prepare_ordered, run_ordered_trial
from .parity import min_tjoin
from .vrp import VrpInstance, solve_combiner, solve_vrp_forest


def _read_instance(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return load_instance(fh.read())


def _require_plain(inst, command: str) -> Instance:
    if isinstance(inst, OrderedInstance):
        raise InstanceError("schema", f"{command} expects a commodity instance, not an ordered one")
    return inst


def _require_ordered(inst, command: str) -> OrderedInstance:
    if not isinstance(inst, OrderedInstance):
        raise InstanceError("schema", f"{command} expects an ordered instance")
    return inst


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_solve_multipath(args) -> None:
    inst = _require_plain(_read_instance(args.input), "solve-multipath")
    if args.derandomize:
        sol, report = solve_derandomized(inst)
    else:
        sol, report = solve_randomized(inst, args.seed)
    _emit(save_solution(sol) + "\n", args.output)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(asdict(report), fh, sort_keys=True, indent=2)
            fh.write("\n")


def _cmd_solve_ordered(args) -> None:
    inst = _require_ordered(_read_instance(args.input), "solve-ordered")
    plan = prepare_ordered(inst)
    if args.trials and args.trials > 1:
        costs, ratios = [], []
        for trial in range(args.trials):
            _, report, _ = run_ordered_trial(plan, args.seed + trial)
            costs.append(report.total)
            ratios.append(report.ratio)
        out = {
            "trials": args.trials,
            "mean_cost": statistics.fmean(costs),
            "std_cost": statistics.pstdev(costs),
            "mean_ratio": statistics.fmean(ratios),
            "lp_objective": plan.lp.objective,
        }
        _emit(json.dumps(out, sort_keys=True, indent=2) + "\n", args.output)
        return
    sol, report, _ = run_ordered_trial(plan, args.seed)
    payload = json.loads(save_solution(Solution(sol.walks, sol.cost)))
    payload["report"] = asdict(report)
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.output)


def _cmd_solve_vrp(args) -> None:
    inst = _require_plain(_read_instance(args.input), "solve-vrp")
    sol = solve_vrp_forest(VrpInstance.from_instance(inst))
    _emit(save_solution(sol) + "\n", args.output)


def _cmd_solve_combined(args) -> None:
    inst = _require_plain(_read_instance(args.input), "solve-combined")
    sol, report = solve_combiner(inst)
    payload = json.loads(save_solution(sol))
    payload["combiner"] = asdict(report)
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.output)


def _cmd_exact(args) -> None:
    inst = _require_plain(_read_instance(args.input), "exact")
    result = exact_opt(inst)
    sol = reconstruct_walks(inst, result)
    payload = {"cost": result.cost, "walks": [list(w) for w in sol.walks]}
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.output)


def _cmd_lp(args) -> None:
    inst = _read_instance(args.input)
    base = inst.to_instance() if isinstance(inst, OrderedInstance) else inst
    sol = solve_lp(base)
    if args.dump_lp:
        model = build_static(base)
        for cut in sol.cuts:
            model.add_cut(cut)
        with open(args.dump_lp, "w", encoding="utf-8") as fh:
            fh.write(model.dump_text())
    _emit(json.dumps({"objective": sol.objective, "cuts": len(sol.cuts)}, sort_keys=True) + "\n", args.output)


def _cmd_decompose(args) -> None:
    inst = _read_instance(args.input)
    base = inst.to_instance() if isinstance(inst, OrderedInstance) else inst
    sol = solve_lp(base)
    dec = decompose(base, sol)
    payload = {
        "commodities": [
            {
                "paths": [{"vertices": list(p.vertices), "weight": p.weight} for p in dec.paths[i]],
                "cycles": [{"vertices": list(c.vertices), "weight": c.weight} for c in dec.cycles[i]],
            }
            for i in range(base.k)
        ]
    }
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.output)


def _cmd_tjoin(args) -> None:
    inst = _read_instance(args.input)
    odd = tuple(int(x) for x in args.odd.split(",")) if args.odd else ()
    for v in odd:
        if not 0 <= v < inst.graph.n:
            raise InstanceError("index-out-of-range", f"odd vertex {v} outside vertex range")
    if len(odd) % 2 == 1:
        raise InstanceError("schema", "the odd vertex set must have even size")
    join = min_tjoin(inst.graph, odd)
    payload = {
        "cost": join.cost,
        "edges": sorted(list(inst.graph.edges[e]) for e in join.edges),
    }
    _emit(json.dumps(payload, sort_keys=True) + "\n", args.output)


def _cmd_gen(args) -> None:
    cfg = BenchConfig(
        mode=args.mode,
        n_min=args.n_min,
        n_max=args.n_max,
        k_min=args.k_min,
        k_max=args.k_max,
        extra_edges=args.extra_edges,
        edge_prob=args.edge_prob,
        depot_fraction=args.depot_fraction,
        seed=args.seed,
    )
    inst = generate(cfg, args.seed)
    _emit(save_instance(inst) + "\n", args.output)


def _cmd_bench(args) -> None:
    cfg = BenchConfig(
        mode=args.mode,
        count=args.count,
        n_min=args.n_min,
        n_max=args.n_max,
        k_min=args.k_min,
        k_max=args.k_max,
        extra_edges=args.extra_edges,
        edge_prob=args.edge_prob,
        depot_fraction=args.depot_fraction,
        seed=args.seed,
        trials=args.trials,
        workers=args.workers,
        inputs=tuple(args.input or ()),
    )
    report = run_bench(cfg)
    sys.stdout.write(format_table(report))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(report_json(report))


def _cmd_export_dot(args) -> None:
    inst = _read_instance(args.input)
    with open(args.solution, "r", encoding="utf-8") as fh:
        sol = load_solution(fh.read())
    _emit(export_dot(inst, sol), args.output)


def _add_io(sub, output=True):
    sub.add_argument("--input", required=True, help="instance JSON file")
    if output:
        sub.add_argument("--output", default=None, help="write result here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multipath-tsp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-multipath", help="randomized or derandomized multi-path solver")
    _add_io(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--derandomize", action="store_true")
    p.add_argument("--report", default=None, help="write the cost report JSON here")
    p.set_defaults(func=_cmd_solve_multipath)

    p = sub.add_parser("solve-ordered", help="ordered-tour solver with parity correction")
    _add_io(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=0, help="emit mean/stddev over this many seeds")
    p.set_defaults(func=_cmd_solve_ordered)

    p = sub.add_parser("solve-vrp", help="doubled spanning-forest depot solver (all s_i == t_i)")
    _add_io(p)
    p.set_defaults(func=_cmd_solve_vrp)

    p = sub.add_parser("solve-combined", help="best of the path solver and the depot reduction")
    _add_io(p)
    p.set_defaults(func=_cmd_solve_combined)

    p = sub.add_parser("exact", help="exact optimum for small instances")
    _add_io(p)
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("lp", help="solve the flow relaxation")
    _add_io(p)
    p.add_argument("--dump-lp", default=None, help="write the final model rows here")
    p.set_defaults(func=_cmd_lp)

    p = sub.add_parser("decompose", help="print the weighted path/cycle decomposition")
    _add_io(p)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("tjoin", help="minimum join for a given even vertex set")
    _add_io(p)
    p.add_argument("--odd", default="", help="comma-separated vertices, e.g. 0,3")
    p.set_defaults(func=_cmd_tjoin)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--mode", choices=("multipath", "ordered", "vrp"), default="multipath")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--k-min", type=int, default=1)
    p.add_argument("--k-max", type=int, default=3)
    p.add_argument("--extra-edges", type=int, default=4)
    p.add_argument("--edge-prob", type=float, default=None)
    p.add_argument("--depot-fraction", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="run the experiment harness")
    p.add_argument("--mode", choices=("multipath", "ordered", "vrp"), default="multipath")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--k-min", type=int, default=1)
    p.add_argument("--k-max", type=int, default=3)
    p.add_argument("--extra-edges", type=int, default=4)
    p.add_argument("--edge-prob", type=float, default=None)
    p.add_argument("--depot-fraction", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--input", action="append", help="bench these instance files instead of generating")
    p.add_argument("--output", default=None, help="write the JSON report here")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("export-dot", help="render an instance and solution as DOT")
    _add_io(p)
    p.add_argument("--solution", required=True, help="solution JSON file")
    p.set_defaults(func=_cmd_export_dot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (InstanceError, GenerationError, OracleLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 2
    except (InternalError, LpError, DecompositionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except ToolkitError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
