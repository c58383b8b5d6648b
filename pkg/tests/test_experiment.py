import pytest

from oilfed.experiment import DEFAULT_APPS, cell_seed, plan, run_sweep
from oilfed.metrics import aggregate_sweep, sweep_csv


def test_paper_grid_size(paper_cfg):
    cells = plan(paper_cfg, DEFAULT_APPS, ("hps", "mect", "scc"), 10)
    assert len(cells) == 150
    assert len({(c.heuristic, c.num_apps, c.replication) for c in cells}) == 150


def test_seeds_shared_across_heuristics(paper_cfg):
    cells = plan(paper_cfg, (50, 100), ("hps", "mect"), 3)
    by_key = {}
    for c in cells:
        by_key.setdefault((c.num_apps, c.replication), set()).add(c.seed)
    assert all(len(s) == 1 for s in by_key.values())
    assert len({next(iter(s)) for s in by_key.values()}) == 6


def test_adding_cells_does_not_move_seeds(paper_cfg):
    small = {(c.heuristic, c.num_apps, c.replication): c.seed for c in plan(paper_cfg, (100,), ("mect",), 2)}
    big = {(c.heuristic, c.num_apps, c.replication): c.seed for c in plan(paper_cfg, (50, 100, 150), ("hps", "mect", "scc"), 4)}
    assert all(big[k] == v for k, v in small.items())
    assert cell_seed(1, 50, 0) != cell_seed(2, 50, 0)


def test_plan_errors(paper_cfg):
    with pytest.raises(ValueError):
        plan(paper_cfg, [], ("hps",), 1)
    with pytest.raises(ValueError):
        plan(paper_cfg, [50], ("foo",), 1)
    with pytest.raises(ValueError):
        plan(paper_cfg, [50], ("hps",), 0)


def test_parallel_matches_serial(paper_cfg):
    serial = run_sweep(paper_cfg, (10, 20), ("hps", "scc"), 2, parallelism=1)
    parallel = run_sweep(paper_cfg, (10, 20), ("hps", "scc"), 2, parallelism=3)
    assert serial == parallel
    assert sweep_csv(aggregate_sweep(serial)) == sweep_csv(aggregate_sweep(parallel))


def test_reaggregation_reproduces_table(paper_cfg):
    reports = run_sweep(paper_cfg, (10,), ("hps", "mect"), 3)
    assert aggregate_sweep(reports) == aggregate_sweep(list(reversed(reports)))
