"""Oversubscription sweeps: every (heuristic, applications, replication) cell is an isolated run."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from oilfed.config import SimulationConfig
from oilfed.engine import run
from oilfed.heuristics import HEURISTICS
from oilfed.metrics import RunReport, SweepRow, aggregate_sweep

log = logging.getLogger(__name__)

DEFAULT_APPS = (50, 100, 150, 200, 250)


def cell_seed(master_seed: int, num_apps: int, replication: int) -> int:
    """Seed for one sweep cell.

    Mixed from the master seed, the application count and the replication
    index only, so every heuristic sees the same workload for a given
    (apps, replication) and adding a heuristic or a load point leaves the
    other cells untouched.
    """
    state = np.random.SeedSequence([master_seed, num_apps, replication]).generate_state(1, dtype=np.uint32)
    return int(state[0])


@dataclass(frozen=True)
class Cell:
    heuristic: str
    num_apps: int
    replication: int
    seed: int


class SweepCellError(RuntimeError):
    pass


def plan(cfg: SimulationConfig, apps: Sequence[int], heuristics: Sequence[str], replications: int) -> list[Cell]:
    if not apps:
        raise ValueError("apps list must be non-empty")
    if replications < 1:
        raise ValueError("replications must be >= 1")
    for h in heuristics:
        if h not in HEURISTICS:
            raise ValueError(f"unknown heuristic {h!r}; expected one of {', '.join(HEURISTICS)}")
    return [
        Cell(h, a, r, cell_seed(cfg.seed, a, r))
        for h in heuristics
        for a in apps
        for r in range(replications)
    ]


def run_cell(cfg: SimulationConfig, cell: Cell) -> RunReport:
    try:
        c = cfg.replace(heuristic=cell.heuristic, seed=cell.seed).with_apps(cell.num_apps)
        return run(c)
    except Exception as exc:
        raise SweepCellError(f"sweep cell failed: heuristic={cell.heuristic} apps={cell.num_apps} replication={cell.replication} seed={cell.seed}: {exc}") from exc


def _run_cell_args(args: tuple[SimulationConfig, Cell]) -> RunReport:
    return run_cell(*args)


def run_sweep(
    cfg: SimulationConfig,
    apps: Sequence[int] = DEFAULT_APPS,
    heuristics: Sequence[str] = HEURISTICS,
    replications: int = 10,
    parallelism: int = 1,
) -> list[RunReport]:
    """Run every cell; reports come back in plan order regardless of parallelism."""
    cells = plan(cfg, apps, heuristics, replications)
    log.info("sweep: %d cells, parallelism %d", len(cells), parallelism)
    if parallelism <= 1:
        return [run_cell(cfg, c) for c in cells]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(_run_cell_args, [(cfg, c) for c in cells]))


def sweep_table(reports: Iterable[RunReport]) -> list[SweepRow]:
    return aggregate_sweep(reports)
