from __future__ import annotations
from typing import (
    Any,
    Optional,
    Sequence,
    Tuple,
    List,
    Dict,
)
from fractions import Fraction
from itertools import product
import argparse
import csv
import json
import logging
import os
import sys
import time
from typeguard import typechecked
from .acceptance import scales, verify
from .bounds import lower_bound_horizons, phase_thresholds, predict_bounds
from .coupling import (
    coupled_run_alternative,
    coupled_run_subset,
    write_coupled_runs,
)
from .exceptions import DeserializeException, IllegalValueException
from .forcing import ForcingRule
from .graph import Graph, GraphSpec, check_expansion, families
from .markov import expected_propagation_time, min_expected_propagation_time
from .montecarlo import (
    ExperimentConfig,
    StartPolicy,
    SweepTable,
    fit_growth,
    growth_models,
    run_experiment,
    sweep,
    write_command_manifest,
    write_manifest,
)
from .oracle import verify_edge_count_domination, verify_lemma_edge_probability
from .utils import expect, derive_seed

__all__ = ["execute", "main", "emit_plot_data"]

logger = logging.getLogger(__name__)

exit_ok = 0
exit_invalid = 1
exit_failed = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Reports bad usage as an exception instead of exiting with 2, which is
    reserved for failed acceptance checks."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@typechecked
def emit_plot_data(
    table: SweepTable, x_axis: str, y_axis: str, out_dir: str, stem: str = "plot"
) -> Tuple[str, str]:
    """Projects a sweep table onto two columns for plotting.

    Rows missing either value are dropped. Writes ``<stem>.csv`` with an
    ``x,y`` header and ``<stem>.gp``, a gnuplot script that plots it.

    :param table: sweep output
    :type table: SweepTable
    :param x_axis: column for x
    :type x_axis: str
    :param y_axis: column for y
    :type y_axis: str
    :param out_dir: output directory
    :type out_dir: str
    :param stem: file name stem
    :type stem: str
    :raises IllegalValueException: unknown axis, or no row left to plot
    :return: the csv and script paths
    :rtype: Tuple[str, str]
    """
    for name, axis in (("x_axis", x_axis), ("y_axis", y_axis)):
        expect(name, axis, f"be one of {SweepTable.columns}", lambda a: a in SweepTable.columns)
    points = []
    for row in table.rows:
        x, y = row.value(x_axis), row.value(y_axis)
        if x is not None and y is not None and row.error is None:
            points.append((x, y))
    expect("table", len(points), f"have a row with both {x_axis} and {y_axis}", lambda c: c > 0)
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    script_path = os.path.join(out_dir, f"{stem}.gp")
    with open(csv_path, "w", newline="") as file:
        writer = csv.writer(file)
        writer.writerow([x_axis, y_axis])
        writer.writerows(points)
    with open(script_path, "w") as file:
        file.write('set datafile separator ","\n')
        file.write(f'set xlabel "{x_axis}"\n')
        file.write(f'set ylabel "{y_axis}"\n')
        file.write(
            f'plot "{stem}.csv" using 1:2 skip 1 with linespoints title "{y_axis}"\n'
        )
    logger.info("wrote %d points to %s", len(points), csv_path)
    return csv_path, script_path


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational, got {text!r}")


def _vertices(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated vertices, got {text!r}")


def _add_graph_flags(parser: argparse.ArgumentParser, seed_default: Optional[int] = 0) -> None:
    parser.add_argument("--family", choices=families, default=None)
    parser.add_argument("--n", type=int, default=None)
    parser.add_argument("--p", type=float, default=None)
    parser.add_argument("--graph", default=None, help="edge-list file instead of a family")
    parser.add_argument("--seed", type=int, default=seed_default)


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--log-level", default="WARNING")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = _Parser(
        prog="pzf", description="Probabilistic zero forcing experiments"
    )
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)
    commands.required = True

    sample = commands.add_parser("sample", parents=[common], help="sample or build a graph")
    _add_graph_flags(sample)
    sample.add_argument("--out", default=None)

    exact = commands.add_parser("exact", parents=[common], help="exact expected propagation time")
    _add_graph_flags(exact)
    exact.add_argument("--start", type=_vertices, default=None)
    exact.add_argument("--size-cap", type=int, default=None)

    run = commands.add_parser("run", parents=[common], help="run seeded trials")
    _add_graph_flags(run, seed_default=None)
    run.add_argument("--config", default=None)
    run.add_argument("--trials", type=int, default=None)
    run.add_argument("--max-rounds", type=int, default=None)
    run.add_argument("--start", default=None, help="v, v1,v2,..., min or random:<k>[@v]")
    run.add_argument("--dlower", type=float, default=None)
    run.add_argument("--active-rounds", type=_vertices, default=None)
    run.add_argument("--omega", type=float, default=None)
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--record-edges", action="store_true", default=None)
    run.add_argument("--record-degrees", action="store_true", default=None)
    run.add_argument("--resample", action="store_true", default=None)
    run.add_argument("--out", default=None)

    sweep_parser = commands.add_parser("sweep", parents=[common], help="sweep G(n, p) cells")
    sweep_parser.add_argument("--n", type=int, nargs="+", required=True)
    sweep_parser.add_argument("--p", type=float, nargs="+", required=True)
    sweep_parser.add_argument("--seed", type=int, default=0)
    sweep_parser.add_argument("--trials", type=int, default=100)
    sweep_parser.add_argument("--max-rounds", type=int, default=None)
    sweep_parser.add_argument("--start", default="0")
    sweep_parser.add_argument("--workers", type=int, default=1)
    sweep_parser.add_argument("--fit", choices=tuple(growth_models), default=None)
    sweep_parser.add_argument("--out", default=None)

    couple = commands.add_parser("couple", parents=[common], help="coupled process pairs")
    couple.add_argument("kind", choices=("subset", "alternative"))
    _add_graph_flags(couple)
    couple.add_argument("--trials", type=int, default=100)
    couple.add_argument("--max-rounds", type=int, default=256)
    couple.add_argument("--start", type=_vertices, default=[0])
    couple.add_argument("--superset", type=_vertices, default=None)
    couple.add_argument("--dlower", type=float, default=None)
    couple.add_argument("--omega", type=float, default=None)
    couple.add_argument("--out", default=None)

    expansion = commands.add_parser("expansion", parents=[common], help="degree and expansion audit")
    _add_graph_flags(expansion)
    expansion.add_argument("--omega", type=float, default=20.0)
    expansion.add_argument("--sets", type=int, default=100)
    expansion.add_argument("--d", type=float, default=None)
    expansion.add_argument("--out", default=None)

    bounds = commands.add_parser("bounds", parents=[common], help="predicted round bounds")
    bounds.add_argument("--n", type=int, nargs="+", required=True)
    bounds.add_argument("--p", type=float, nargs="+", required=True)
    bounds.add_argument("--omega", type=float, default=None)
    bounds.add_argument("--c1", type=float, default=None)
    bounds.add_argument("--c2", type=float, default=None)
    bounds.add_argument("--out", default=None)

    oracle = commands.add_parser("oracle", parents=[common], help="exhaustive rational oracles")
    oracle.add_argument("kind", choices=("edge-probability", "domination"))
    oracle.add_argument("--n", type=int, required=True)
    oracle.add_argument("--p", type=_fraction, required=True)
    oracle.add_argument("--y0", type=_vertices, default=[0])
    oracle.add_argument("--dlower", type=_fraction, required=True)
    oracle.add_argument("--out", default=None)

    verify_parser = commands.add_parser("verify", parents=[common], help="acceptance checks")
    verify_parser.add_argument("--seed", type=int, required=True)
    verify_parser.add_argument("--scale", choices=tuple(scales), default="quick")
    verify_parser.add_argument("--only", type=int, nargs="+", default=None)
    verify_parser.add_argument("--out", default=None)

    plot = commands.add_parser("plotdata", parents=[common], help="project a sweep table")
    plot.add_argument("table", help="summary.csv written by sweep")
    plot.add_argument("--x", default="loglog_n")
    plot.add_argument("--y", default="median")
    plot.add_argument("--stem", default="plot")
    plot.add_argument("--out", default=".")
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = getattr(logging, str(args.log_level).upper(), None)
    if not isinstance(level, int):
        raise UsageError(f"unknown log level {args.log_level!r}")
    level = max(logging.DEBUG, level - 10 * args.verbose)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _load_graph(args: argparse.Namespace) -> Tuple[Graph, Optional[GraphSpec]]:
    if args.graph is not None:
        try:
            return Graph.read(args.graph), None
        except OSError as error:
            raise DeserializeException(str(error), args.graph)
    expect("n", args.n, "be given with --n or --graph", lambda n: n is not None)
    spec = GraphSpec(args.family or "gnp", args.n, args.p)
    return spec.build(args.seed), spec


def _print_json(value: Any) -> None:
    print(json.dumps(value, indent=2, sort_keys=True))


def _plain(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value


def _write_command_manifest(
    args: argparse.Namespace,
    began: float,
    spec: Optional[GraphSpec] = None,
    g: Optional[Graph] = None,
) -> None:
    """Writes ``manifest.json`` into ``--out``, when given."""
    if args.out is None:
        return
    arguments = {
        key: _plain(value)
        for key, value in vars(args).items()
        if key not in ("log_level", "verbose")
    }
    graph = None
    if getattr(args, "graph", None) is not None:
        graph = {"graph_file": args.graph}
    elif spec is not None:
        graph = spec.to_json()
    os.makedirs(args.out, exist_ok=True)
    write_command_manifest(
        os.path.join(args.out, "manifest.json"),
        args.command,
        arguments,
        getattr(args, "seed", None),
        graph,
        None if g is None else g.sampler_mode,
        time.perf_counter() - began,
    )


def _sample(args: argparse.Namespace) -> int:
    began = time.perf_counter()
    g, spec = _load_graph(args)
    print(f"n={g.n} m={g.m} mode={g.sampler_mode}")
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        g.write(os.path.join(args.out, "graph.txt"))
        _write_command_manifest(args, began, spec, g)
    return exit_ok


def _exact(args: argparse.Namespace) -> int:
    g, _ = _load_graph(args)
    if args.start is not None:
        print(expected_propagation_time(g, args.start, args.size_cap))
        return exit_ok
    vertex, value = min_expected_propagation_time(g, args.size_cap)
    print(value)
    print(f"vertex {vertex}")
    return exit_ok


def _experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    """Defaults, then the config file, then explicit flags."""
    config_json: Dict[str, Any] = {}
    if args.config is not None:
        config_json = ExperimentConfig.read(args.config).to_json()
    if args.graph is not None:
        config_json["graph_file"] = args.graph
        config_json["graph"] = None
    elif any(value is not None for value in (args.family, args.n, args.p)):
        graph_json = dict(config_json.get("graph") or {})
        for key in ("family", "n", "p"):
            if getattr(args, key) is not None:
                graph_json[key] = getattr(args, key)
        graph_json.setdefault("family", "gnp")
        config_json["graph"] = graph_json
        config_json["graph_file"] = None
    flags = {
        "trials": args.trials,
        "max_rounds": args.max_rounds,
        "master_seed": args.seed,
        "workers": args.workers,
        "out_dir": args.out,
        "thresholds_omega": args.omega,
        "record_blue_edges": args.record_edges,
        "record_white_degree": args.record_degrees,
        "resample_graph": args.resample,
    }
    config_json.update({key: value for key, value in flags.items() if value is not None})
    if args.start is not None:
        config_json["start"] = StartPolicy.parse(args.start).to_json()
    if args.dlower is not None:
        config_json["rule"] = ForcingRule.alternative(args.dlower, args.active_rounds).to_json()
    return ExperimentConfig.from_json(config_json)


def _run(args: argparse.Namespace) -> int:
    config = _experiment_config(args)
    records, stats = run_experiment(config)
    _print_json(stats.to_json())
    return exit_ok


def _sweep(args: argparse.Namespace) -> int:
    grid = list(product(args.n, args.p))
    template = ExperimentConfig(
        graph=GraphSpec("gnp", args.n[0], args.p[0]),
        start=StartPolicy.parse(args.start),
        trials=args.trials,
        max_rounds=args.max_rounds,
        master_seed=args.seed,
        workers=args.workers,
    )
    began = time.perf_counter()
    table = sweep(grid, template)
    for row in table.rows:
        print(json.dumps(row.to_row(), sort_keys=True))
    fit = None
    if args.fit is not None:
        fit = fit_growth(table, args.fit)
        _print_json(fit.to_json())
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        table.write_csv(os.path.join(args.out, "summary.csv"))
        write_manifest(
            os.path.join(args.out, "manifest.json"),
            template,
            "per-cell",
            time.perf_counter() - began,
            grid,
        )
    return exit_ok


def _couple(args: argparse.Namespace) -> int:
    began = time.perf_counter()
    g, spec = _load_graph(args)
    if args.kind == "alternative":
        if args.dlower is not None:
            rule = ForcingRule.alternative(args.dlower)
        else:
            expect("omega", args.omega, "be given when --dlower is not", lambda w: w is not None)
            p = spec.p if spec is not None and spec.p is not None else 2.0 * g.m / (g.n * (g.n - 1))
            rule = ForcingRule.from_omega(g.n, p, args.omega)
    runs = []
    for k in range(args.trials):
        seed = derive_seed(args.seed, k)
        if args.kind == "subset":
            superset = args.superset if args.superset is not None else sorted(
                set(args.start) | {0, 1}
            )
            runs.append(coupled_run_subset(g, args.start, superset, args.max_rounds, seed))
        else:
            runs.append(coupled_run_alternative(g, args.start, rule, args.max_rounds, seed))
    contained = sum(run.contained for run in runs)
    print(f"containment: {contained}/{len(runs)}")
    if args.kind == "alternative":
        print(f"validity violations: {sum(run.validity_violation for run in runs)}")
    if args.out is not None:
        write_coupled_runs(runs, args.out, f"couple_{args.kind}")
        _write_command_manifest(args, began, spec, g)
    return exit_ok


def _expansion(args: argparse.Namespace) -> int:
    began = time.perf_counter()
    g, spec = _load_graph(args)
    report = check_expansion(g, args.omega, args.sets, args.seed, d=args.d, graph_spec=spec)
    _print_json(report.to_json())
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "expansion.json"), "w") as file:
            json.dump(report.to_json(), file, indent=2, sort_keys=True)
        _write_command_manifest(args, began, spec, g)
    return exit_ok


def _bounds(args: argparse.Namespace) -> int:
    began = time.perf_counter()
    rows = []
    for n, p in product(args.n, args.p):
        row = predict_bounds(n, p).to_json()
        if args.omega is not None:
            thresholds = phase_thresholds(n, p, args.omega)
            row["phase_upper_estimate"] = thresholds.upper_estimate
        if args.omega is not None and args.c1 is not None and args.c2 is not None and p < 1:
            horizons = lower_bound_horizons(n, p, args.omega, args.c1, args.c2)
            row.update(horizons.to_json())
        rows.append(row)
    fields = list(rows[0])
    for row in rows[1:]:
        fields.extend(key for key in row if key not in fields)
    writer = csv.DictWriter(sys.stdout, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "bounds.csv"), "w", newline="") as file:
            writer = csv.DictWriter(file, fieldnames=fields)
            writer.writeheader()
            writer.writerows(rows)
        _write_command_manifest(args, began)
    return exit_ok


def _oracle(args: argparse.Namespace) -> int:
    began = time.perf_counter()
    oracle = (
        verify_lemma_edge_probability
        if args.kind == "edge-probability"
        else verify_edge_count_domination
    )
    report = oracle(args.n, args.p, args.y0, args.dlower)
    _print_json(report.to_json())
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "oracle.json"), "w") as file:
            json.dump(report.to_json(), file, indent=2, sort_keys=True)
        _write_command_manifest(args, began)
    return exit_ok if report.passed else exit_failed


def _verify(args: argparse.Namespace) -> int:
    began = time.perf_counter()
    report = verify(args.seed, args.scale, args.only, args.out)
    _write_command_manifest(args, began)
    for result in report.results:
        verdict = "pass" if result.passed else "FAIL"
        print(f"{result.number:>2} {verdict} {result.name} ({result.elapsed:.1f}s)")
    return exit_ok if report.passed else exit_failed


def _plotdata(args: argparse.Namespace) -> int:
    began = time.perf_counter()
    table = SweepTable.read_csv(args.table)
    csv_path, script_path = emit_plot_data(table, args.x, args.y, args.out, args.stem)
    _write_command_manifest(args, began)
    print(csv_path)
    print(script_path)
    return exit_ok


handlers = {
    "sample": _sample,
    "exact": _exact,
    "run": _run,
    "sweep": _sweep,
    "couple": _couple,
    "expansion": _expansion,
    "bounds": _bounds,
    "oracle": _oracle,
    "verify": _verify,
    "plotdata": _plotdata,
}


def execute(argv: Optional[Sequence[str]] = None) -> int:
    """Runs one subcommand.

    :param argv: arguments without the program name, sys.argv by default
    :type argv: Optional[Sequence[str]]
    :return: 0 on success, 1 on invalid input, 2 on a failed check
    :rtype: int
    """
    try:
        args = _build_parser().parse_args(argv)
        _configure_logging(args)
        return handlers[args.command](args)
    except UsageError as error:
        print(f"pzf: error: {error}", file=sys.stderr)
        return exit_invalid
    except (IllegalValueException, DeserializeException, OSError) as error:
        logger.error("%s", error)
        print(f"pzf: error: {error}", file=sys.stderr)
        return exit_invalid


def main() -> None:
    sys.exit(execute())
