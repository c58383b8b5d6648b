"""Command-line interface: ``oilfed {run,sweep,validate,dump-workload}``."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path
from typing import Sequence

from oilfed.config import SimulationConfig, parse_and_validate
from oilfed.engine import Simulation, assign_deadlines, stream_rng, STREAM_WORKLOAD, write_trace
from oilfed.errors import ConfigError
from oilfed.experiment import DEFAULT_APPS, SweepCellError, run_sweep
from oilfed.heuristics import HEURISTICS
from oilfed.metrics import aggregate_sweep, runs_csv, sweep_csv
from oilfed.plotting import plot_miss_rate
from oilfed.taskmodel import Task
from oilfed.workload import generate

log = logging.getLogger("oilfed")

DEFAULT_CONFIG = "paper_default"


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("list must be non-empty")
    return values


def _name_list(text: str) -> list[str]:
    names = [x.strip() for x in text.split(",") if x.strip()]
    bad = [n for n in names if n not in HEURISTICS]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown heuristic {bad[0] if bad else text!r}; valid names: {', '.join(HEURISTICS)}")
    return names


def load_config(args: argparse.Namespace) -> SimulationConfig:
    """Config file values, then CLI overrides on top."""
    cfg = parse_and_validate(args.config)
    if getattr(args, "seed", None) is not None:
        cfg = cfg.replace(seed=args.seed)
    if getattr(args, "heuristic", None) is not None:
        cfg = cfg.replace(heuristic=args.heuristic)
    apps = getattr(args, "apps", None)
    if isinstance(apps, int):
        cfg = cfg.with_apps(apps)
    return cfg


def workload_tasks(cfg: SimulationConfig) -> list[Task]:
    tasks = generate(cfg.workload, cfg.task_types, len(cfg.nodes), cfg.horizon, stream_rng(cfg.seed, STREAM_WORKLOAD))
    assign_deadlines(cfg, tasks)
    return tasks


def workload_csv(cfg: SimulationConfig, tasks: Sequence[Task]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["task_id", "type_id", "type_name", "urgency", "origin", "arrival_s", "length_mi", "deadline_s"])
    for t in tasks:
        tt = cfg.task_types[t.type_id]
        w.writerow([t.id, t.type_id, tt.name, tt.urgency.value, t.origin, f"{t.arrival:.6f}", f"{t.length:.6f}", f"{t.deadline:.6f}"])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    print(
        f"ok: {len(cfg.nodes)} edge nodes, MIPS {min(n.mips for n in cfg.nodes):g}-{max(n.mips for n in cfg.nodes):g}; "
        f"cloud {cfg.cloud.mips:g} MIPS; wlan {cfg.network.wlan_bandwidth / 1e6:g} Mbps; "
        f"satellite propagation {cfg.network.sat_propagation:g} s; heuristic {cfg.heuristic}"
    )
    return 0


def cmd_dump_workload(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    _emit(workload_csv(cfg, workload_tasks(cfg)), args.out)
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    tasks = workload_tasks(cfg)
    if args.dump_workload:
        _emit(workload_csv(cfg, tasks), args.dump_workload)
    result = Simulation(cfg, tasks, trace=args.trace is not None).run()
    _emit(runs_csv([result.report]), args.out)
    if args.trace is not None:
        with open(args.trace, "w") as fh:
            write_trace(result.trace or [], fh)
    if args.matrices:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["matrix", "row", "col", "mean_s", "stddev_s", "count"])
        for name, r, c, mean, sd, n in result.estimator.dump():
            w.writerow([name, r, c, f"{mean:.6f}", f"{sd:.6f}", n])
        _emit(buf.getvalue(), args.matrices)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    apps = args.apps or list(DEFAULT_APPS)
    reports = run_sweep(cfg, apps, args.heuristics, args.reps, args.parallel)
    rows = aggregate_sweep(reports)
    _emit(sweep_csv(rows), args.out)
    if args.out and args.out != "-":
        out = Path(args.out)
        _emit(runs_csv(reports), str(out.with_name(out.stem + "_runs.csv")))
        if not args.no_plot:
            plot_miss_rate(rows, out.with_suffix(".png"), title=f"{len(reports)} runs, {args.reps} replications per point")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oilfed", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default=DEFAULT_CONFIG, help="config file, or a config name looked up in $OILFED_CONFIG_DIR (default: %(default)s)")
        p.add_argument("--seed", type=int, help="override the config seed")

    p = sub.add_parser("validate", help="parse and validate a config")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dump-workload", help="write the generated task stream as CSV")
    common(p)
    p.add_argument("--apps", type=int, help="override workload.num_applications")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_dump_workload)

    p = sub.add_parser("run", help="simulate one run and write its report CSV")
    common(p)
    p.add_argument("--heuristic", choices=HEURISTICS)
    p.add_argument("--apps", type=int, help="override workload.num_applications")
    p.add_argument("--out", help="report CSV path (default: stdout)")
    p.add_argument("--trace", help="write the event trace (JSON lines) here")
    p.add_argument("--dump-workload", metavar="PATH", help="also write the generated task stream here")
    p.add_argument("--matrices", metavar="PATH", help="write the final ETC/ETT matrices as CSV")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run the heuristics x applications x replications grid")
    common(p)
    p.add_argument("--apps", type=_int_list, help="comma-separated application counts (default: 50,100,150,200,250)")
    p.add_argument("--heuristics", type=_name_list, default=list(HEURISTICS), help="comma-separated heuristics (default: hps,mect,scc)")
    p.add_argument("--reps", type=int, default=10, help="replications per point (default: %(default)s)")
    p.add_argument("--parallel", type=int, default=1, help="worker processes (default: %(default)s)")
    p.add_argument("--out", help="sweep CSV path; per-run CSV and PNG figure are written next to it")
    p.add_argument("--no-plot", action="store_true", help="skip the figure")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SweepCellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
