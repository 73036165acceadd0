"""Command-line front end: instance generation, ingestion, exact and
heuristic solving, group-count sweeps with elbow reporting, polytope
verification, and report validation.

File formats
------------
instance JSON   {"n": int, "c_upper": [floats]} with the row-major upper
                triangle; a full matrix {"n": int, "c": [[...]]} is also
                accepted (diagonal entries ignored, rows must satisfy
                c[r][s] + c[s][r] = 1 within 1e-6).
rankings text   one complete ranking per line, whitespace-separated 1-based
                item indices, most preferred first; '#' starts a comment.
report JSON     emitted by `solve`; `validate` re-checks it independently.
sweep CSV       columns: g,objective,fit,relative_drop,cumulative_drop,time_s
                (fractions, not percentages; relative_drop empty at g=1).

Exit codes: 0 success, 2 parse/validation error, 3 size guard, 4 infeasible
generation.  Every randomized command takes --seed and defaults to a fixed
constant; nothing is ever wall-clock seeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .core import (
    DimensionMismatch,
    InvalidInput,
    LinearOrder,
    MixtureSolution,
    PreferenceMatrix,
    canonicalize,
    fit_from_objective,
    l1_objective,
    num_pairs,
)
from .exact import ExactConfig, SizeGuardExceeded, solve_exact
from .geometry import (
    MEMBERSHIP_GUARD_N,
    SATURATION_GUARD_N,
    caratheodory_saturation,
    cycle_residuals,
    l1_projection_full,
    polytope_membership,
)
from .heuristic import HeuristicConfig, solve_heuristic
from .instances import (
    GeneratorSpec,
    RankingFormatError,
    SeparationInfeasible,
    allocate_counts,
    count_matrix,
    generate_instance,
    ingest_rankings,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_GUARD = 3
EXIT_INFEASIBLE = 4

DEFAULT_SEED = 0

_DROP_EPS = 1e-15


@dataclass
class SolveReport:
    """One solver run in machine-readable form; orders are 1-based."""

    instance: str
    method: str
    n: int
    g: int
    objective: float
    max_form_value: float
    fit: float
    weights: list[float]
    orders: list[list[int]]
    proven: bool
    time_s: float
    trace: dict | None = None


@dataclass
class SweepRow:
    g: int
    objective: float
    fit: float
    relative_drop: float | None
    cumulative_drop: float
    time_s: float


def relative_drop(prev_obj: float, obj: float) -> float:
    """Fractional drop (obj_{g-1} - obj_g) / obj_{g-1}; zero on a flat start."""
    if prev_obj <= _DROP_EPS:
        return 0.0
    return (prev_obj - obj) / prev_obj


def cumulative_drop(first_obj: float, obj: float) -> float:
    if first_obj <= _DROP_EPS:
        return 0.0
    return (first_obj - obj) / first_obj


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _instance_id(path: str) -> str:
    stem = Path(path).stem
    if stem.endswith(".instance"):
        stem = stem[: -len(".instance")]
    return stem


def load_instance(path: str) -> PreferenceMatrix:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InvalidInput(f"{path}: not valid JSON ({e})") from None
    if not isinstance(data, dict) or "n" not in data:
        raise InvalidInput(f"{path}: instance JSON must carry an 'n' field")
    n = int(data["n"])
    if "c_upper" in data:
        return PreferenceMatrix(n, np.asarray(data["c_upper"], dtype=np.float64))
    if "c" in data:
        full = [
            [0.0 if (v is None and r == s) else v for s, v in enumerate(row)]
            for r, row in enumerate(data["c"])
        ]
        matrix = np.asarray(full, dtype=np.float64)
        if matrix.shape != (n, n):
            raise InvalidInput(f"{path}: full matrix shape {matrix.shape} != ({n}, {n})")
        return PreferenceMatrix.from_full(matrix)
    raise InvalidInput(f"{path}: instance JSON needs either 'c_upper' or 'c'")


def _orders_1based(sol: MixtureSolution) -> list[list[int]]:
    return [[p + 1 for p in o.perm] for o in sol.orders]


def parse_weights(arg: str, g: int) -> tuple[float, ...]:
    """Weights as explicit floats '0.667,0.333' or a ratio '2:1'.

    Ratio weights are normalized and rounded onto the 0.001 grid by largest
    remainder so they sum to exactly 1 (e.g. 2:1 -> 0.667, 0.333 and
    1:1:1 -> 0.334, 0.333, 0.333), so ratio mixes read back as clean 3-decimal weights.
    """
    if ":" in arg:
        parts = [float(t) for t in arg.split(":")]
        if len(parts) != g or min(parts) <= 0:
            raise InvalidInput(f"ratio weights need {g} positive parts, got {arg!r}")
        total = sum(parts)
        milli = allocate_counts([p / total for p in parts], 1000)
        return tuple(v / 1000.0 for v in milli)
    parts = [float(t) for t in arg.split(",")]
    if len(parts) != g:
        raise InvalidInput(f"need {g} weights, got {len(parts)} in {arg!r}")
    return tuple(parts)


def _default_ratio_weights(g: int) -> str:
    return ":".join(["1"] * g)


def cmd_gen(args) -> int:
    g = args.g_true
    weights = parse_weights(args.weights or _default_ratio_weights(g), g)
    spec = GeneratorSpec(
        n=args.n,
        g_true=g,
        weights=weights,
        p=args.p,
        D=args.D,
        num_rankings=args.num_rankings,
        min_separation=args.min_separation,
        seed=args.seed,
    )
    sample, C = generate_instance(spec)

    out = args.out
    instance_path = f"{out}.instance.json"
    meta_path = f"{out}.meta.json"
    rankings_path = f"{out}.rankings.txt"

    _write_text(
        instance_path,
        _dump_json({"n": spec.n, "c_upper": [float(v) for v in C.upper]}),
    )
    _write_text(
        meta_path,
        _dump_json(
            {
                "n": spec.n,
                "g_true": spec.g_true,
                "weights": list(spec.weights),
                "p": spec.p,
                "D": spec.resolved_D,
                "num_rankings": spec.num_rankings,
                "min_separation": spec.resolved_min_separation,
                "seed": spec.seed,
                "centers": [[p + 1 for p in o.perm] for o in sample.centers],
            }
        ),
    )
    lines = [" ".join(str(p + 1) for p in o.perm) for o in sample.rankings]
    _write_text(rankings_path, "\n".join(lines) + "\n")
    print(
        f"wrote {instance_path}, {meta_path}, {rankings_path} "
        f"(n={spec.n}, g_true={spec.g_true}, D={spec.resolved_D})"
    )
    return EXIT_OK


def _run_solver(C: PreferenceMatrix, method: str, g: int, args):
    """Returns (solution, objective, proven, trace-dict-or-None)."""
    if method == "exact":
        cfg = ExactConfig(g=g, max_n=args.max_n, max_g=args.max_g)
        sol, obj, proven = solve_exact(C, cfg)
        return sol, obj, proven, None
    cfg = HeuristicConfig(
        n_starts=args.n_starts,
        it_max=args.it_max,
        epsilon=args.epsilon,
        step1_budget=args.step1_budget,
        base_seed=args.seed,
    )
    sol, obj, trace = solve_heuristic(C, g, cfg)
    summary = {
        "n_starts": cfg.n_starts,
        "total_iterations": trace.total_iterations,
        "start_final_objectives": [rows[-1][2] for rows in trace.starts],
    }
    return sol, obj, False, summary


def _build_report(instance_id, method, C, g, sol, obj, proven, trace, elapsed):
    return SolveReport(
        instance=instance_id,
        method=method,
        n=C.n,
        g=g,
        objective=float(obj),
        max_form_value=float(num_pairs(C.n) - obj),
        fit=float(fit_from_objective(obj, C.n)),
        weights=[float(w) for w in sol.weights],
        orders=_orders_1based(sol),
        proven=bool(proven),
        time_s=float(elapsed),
        trace=trace,
    )


def cmd_solve(args) -> int:
    C = load_instance(args.instance)
    t0 = time.perf_counter()
    sol, obj, proven, trace = _run_solver(C, args.method, args.g, args)
    elapsed = time.perf_counter() - t0
    report = _build_report(
        _instance_id(args.instance), args.method, C, args.g, sol, obj, proven, trace, elapsed
    )
    _write_text(args.out, _dump_json(asdict(report)))
    return EXIT_OK


def _pad_with_idle_group(sol: MixtureSolution) -> MixtureSolution:
    idle = LinearOrder(tuple(range(sol.n)))
    return canonicalize(
        MixtureSolution(sol.orders + (idle,), sol.weights + (0.0,))
    )


def cmd_sweep(args) -> int:
    C = load_instance(args.instance)
    rows: list[SweepRow] = []
    prev_sol: MixtureSolution | None = None
    prev_obj = None
    first_obj = None
    for g in range(1, args.g_max + 1):
        t0 = time.perf_counter()
        sol, obj, proven, _ = _run_solver(C, args.method, g, args)
        elapsed = time.perf_counter() - t0
        if args.method == "heuristic" and prev_sol is not None and obj > prev_obj:
            # a zero-weight idle group turns the g-1 solution into a valid
            # g-group solution, so the sweep never reports a regression
            sol, obj = _pad_with_idle_group(prev_sol), prev_obj
        if first_obj is None:
            first_obj = obj
        rows.append(
            SweepRow(
                g=g,
                objective=float(obj),
                fit=float(fit_from_objective(obj, C.n)),
                relative_drop=None if g == 1 else float(relative_drop(prev_obj, obj)),
                cumulative_drop=float(cumulative_drop(first_obj, obj)),
                time_s=float(elapsed),
            )
        )
        prev_sol, prev_obj = sol, obj

    payload = {
        "instance": _instance_id(args.instance),
        "method": args.method,
        "rows": [asdict(r) for r in rows],
    }
    csv_text = _sweep_csv(rows)
    if args.out:
        _write_text(f"{args.out}.sweep.csv", csv_text)
        _write_text(f"{args.out}.sweep.json", _dump_json(payload))
    if args.format == "json":
        sys.stdout.write(_dump_json(payload))
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def _sweep_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["g", "objective", "fit", "relative_drop", "cumulative_drop", "time_s"])
    for r in rows:
        writer.writerow(
            [
                r.g,
                repr(r.objective),
                repr(r.fit),
                "" if r.relative_drop is None else repr(r.relative_drop),
                repr(r.cumulative_drop),
                repr(r.time_s),
            ]
        )
    return buf.getvalue()


def _parse_point(arg: str) -> np.ndarray:
    return np.asarray([float(t) for t in arg.replace(",", " ").split()], dtype=np.float64)


def cmd_verify(args) -> int:
    if args.point is not None:
        point = _parse_point(args.point)
        m = point.shape[0]
        n = int((1 + (1 + 8 * m) ** 0.5) // 2)
        if num_pairs(n) != m:
            raise InvalidInput(f"point length {m} is not C(n,2) for any n")
        label = "point"
    else:
        if args.instance is None:
            raise InvalidInput("verify needs an instance file or --point")
        C = load_instance(args.instance)
        point, n, label = C.upper, C.n, _instance_id(args.instance)

    residuals = cycle_residuals(point, n)
    violations = [
        {"triple": [r + 1, s + 1, t + 1], "residual": res}
        for (r, s, t), res in residuals
        if res < -1e-12 or res > 1.0 + 1e-12
    ]
    inside = None
    distance = None
    if n <= MEMBERSHIP_GUARD_N:
        _, distance = l1_projection_full(point, n)
        inside = bool(distance <= 1e-9)
    g_star = None
    in_unit_box = bool(point.min() >= 0.0 and point.max() <= 1.0)
    if n <= SATURATION_GUARD_N and not args.no_saturation and in_unit_box:
        g_star = caratheodory_saturation(point, n)

    report = {
        "instance": label,
        "n": n,
        "point": [float(v) for v in point],
        "residuals": [
            {"triple": [r + 1, s + 1, t + 1], "residual": res}
            for (r, s, t), res in residuals
        ],
        "violations": violations,
        "inside": inside,
        "projection_distance": None if distance is None else float(distance),
        "g_star": g_star,
    }
    _write_text(args.out, _dump_json(report))
    return EXIT_OK


def cmd_ingest(args) -> int:
    C, A = ingest_rankings(args.rankings)
    out = args.out
    _write_text(
        f"{out}.instance.json",
        _dump_json({"n": C.n, "c_upper": [float(v) for v in C.upper]}),
    )
    _write_text(
        f"{out}.counts.json",
        _dump_json(
            {
                "n": C.n,
                "num_rankings": int(A[0, 1] + A[1, 0]),
                "a": [[int(v) for v in row] for row in A],
            }
        ),
    )
    print(f"wrote {out}.instance.json, {out}.counts.json (n={C.n})")
    return EXIT_OK


def cmd_validate(args) -> int:
    report = json.loads(Path(args.report).read_text(encoding="utf-8"))
    C = load_instance(args.instance)
    problems: list[str] = []

    n, g = int(report["n"]), int(report["g"])
    if n != C.n:
        problems.append(f"report n={n} does not match instance n={C.n}")
    orders = []
    for idx, perm in enumerate(report["orders"]):
        if sorted(perm) != list(range(1, C.n + 1)):
            problems.append(f"order {idx} is not a permutation of 1..{C.n}")
        else:
            orders.append(LinearOrder(tuple(v - 1 for v in perm)))
    weights = [float(w) for w in report["weights"]]
    if len(weights) != g or len(report["orders"]) != g:
        problems.append("group count disagrees with g")
    if weights and (min(weights) < -1e-12 or abs(sum(weights) - 1.0) > 1e-9):
        problems.append("weights are not a probability vector")
    if any(weights[i] < weights[i + 1] - 1e-9 for i in range(len(weights) - 1)):
        problems.append("weights are not in canonical (descending) order")

    if not problems and len(orders) == g:
        sol = MixtureSolution(tuple(orders), tuple(weights))
        obj = l1_objective(sol, C)
        if abs(obj - float(report["objective"])) > 1e-9:
            problems.append(
                f"stated objective {report['objective']} != recomputed {obj!r}"
            )
        if abs(float(report["fit"]) - fit_from_objective(float(report["objective"]), C.n)) > 1e-12:
            problems.append("fit identity violated")
        if abs(float(report["max_form_value"]) - (num_pairs(C.n) - float(report["objective"]))) > 1e-12:
            problems.append("max-form identity violated")

    verdict = {"valid": not problems, "problems": problems}
    sys.stdout.write(_dump_json(verdict))
    return EXIT_OK if not problems else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlop",
        description="Mixture Linear Ordering Problem toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_args(p, include_exact=True, include_heuristic=True):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help="base RNG seed (fixed default; never wall-clock)")
        if include_exact:
            p.add_argument("--max-n", type=int, default=6,
                           help="exact-method enumeration guard on n")
            p.add_argument("--max-g", type=int, default=3,
                           help="exact-method enumeration guard on g")
        if include_heuristic:
            p.add_argument("--n-starts", type=int, default=10)
            p.add_argument("--it-max", type=int, default=12)
            p.add_argument("--epsilon", type=float, default=1e-5)
            p.add_argument("--step1-budget", type=int, default=None,
                           help="branch-and-bound node cap per inner LOP solve "
                                "(default: unlimited for n <= 14)")

    p_gen = sub.add_parser("gen", help="generate a synthetic instance")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--g-true", type=int, required=True)
    p_gen.add_argument("--weights", type=str, default=None,
                       help="'0.667,0.333' or ratio '2:1' (default: equal ratio)")
    p_gen.add_argument("-p", type=float, default=None,
                       help="dispersion as a percentage of the max Kendall distance")
    p_gen.add_argument("--D", type=int, default=None,
                       help="explicit Kendall radius (authoritative over -p)")
    p_gen.add_argument("--num-rankings", type=int, default=1000)
    p_gen.add_argument("--min-separation", type=int, default=None)
    p_gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_gen.add_argument("--out", type=str, required=True, help="output path prefix")
    p_gen.set_defaults(handler=cmd_gen)

    p_solve = sub.add_parser("solve", help="solve an instance for a fixed g")
    p_solve.add_argument("instance")
    p_solve.add_argument("--method", choices=["exact", "heuristic"], required=True)
    p_solve.add_argument("--g", type=int, required=True)
    p_solve.add_argument("--out", type=str, default=None,
                         help="report path (default: stdout)")
    add_solver_args(p_solve)
    p_solve.set_defaults(handler=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="solve for g = 1..g_max and report drops")
    p_sweep.add_argument("instance")
    p_sweep.add_argument("--method", choices=["exact", "heuristic"], required=True)
    p_sweep.add_argument("--g-max", type=int, required=True)
    p_sweep.add_argument("--out", type=str, default=None,
                         help="path prefix for .sweep.csv and .sweep.json")
    p_sweep.add_argument("--format", choices=["csv", "json"], default="csv")
    add_solver_args(p_sweep)
    p_sweep.set_defaults(handler=cmd_sweep)

    p_verify = sub.add_parser("verify", help="polytope geometry checks")
    p_verify.add_argument("instance", nargs="?", default=None)
    p_verify.add_argument("--point", type=str, default=None,
                          help="comma/space separated upper-triangle values")
    p_verify.add_argument("--no-saturation", action="store_true",
                          help="skip the g* search (it enumerates exhaustively)")
    p_verify.add_argument("--out", type=str, default=None)
    p_verify.set_defaults(handler=cmd_verify)

    p_ingest = sub.add_parser("ingest", help="aggregate a ranking file")
    p_ingest.add_argument("rankings")
    p_ingest.add_argument("--out", type=str, required=True, help="output path prefix")
    p_ingest.set_defaults(handler=cmd_ingest)

    p_val = sub.add_parser("validate", help="re-check a solve report")
    p_val.add_argument("report")
    p_val.add_argument("--instance", type=str, required=True)
    p_val.set_defaults(handler=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except SizeGuardExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GUARD
    except SeparationInfeasible as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InvalidInput, DimensionMismatch, RankingFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (KeyError, TypeError, ValueError) as e:
        print(f"error: malformed input ({e})", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
