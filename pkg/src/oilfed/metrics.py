"""Per-run outcome accounting, sweep aggregation, and the CSV report formats."""

from __future__ import annotations

import csv
import io
import math
import statistics
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from oilfed.errors import SimulationError
from oilfed.taskmodel import Task, TaskType

RUN_COLUMNS = (
    "heuristic",
    "num_apps",
    "seed",
    "tasks_total",
    "misses",
    "dropped",
    "miss_rate",
    "miss_rate_urgent",
    "miss_rate_tolerant",
    "mean_completion_urgent_s",
    "mean_completion_tolerant_s",
)
SWEEP_COLUMNS = ("heuristic", "num_apps", "replications", "miss_rate_mean", "miss_rate_stddev")


@dataclass(frozen=True)
class TypeStats:
    count: int
    misses: int

    @property
    def miss_rate(self) -> float:
        return self.misses / self.count if self.count else 0.0


@dataclass(frozen=True)
class NodeStats:
    executed: int
    misses: int


@dataclass(frozen=True)
class RunReport:
    heuristic: str
    num_applications: int
    seed: int
    tasks_total: int
    tasks_completed: int
    tasks_dropped: int
    misses_total: int
    miss_rate: float
    miss_rate_urgent: float
    miss_rate_tolerant: float
    per_type: dict[int, TypeStats]
    per_node: dict[int, NodeStats]
    mean_completion_urgent: float
    mean_completion_tolerant: float

    def csv_row(self) -> list[str]:
        return [
            self.heuristic,
            str(self.num_applications),
            str(self.seed),
            str(self.tasks_total),
            str(self.misses_total),
            str(self.tasks_dropped),
            _num(self.miss_rate),
            _num(self.miss_rate_urgent),
            _num(self.miss_rate_tolerant),
            _num(self.mean_completion_urgent),
            _num(self.mean_completion_tolerant),
        ]


@dataclass(frozen=True)
class SweepRow:
    heuristic: str
    num_apps: int
    replications: int
    miss_rate_mean: float
    miss_rate_stddev: float

    def csv_row(self) -> list[str]:
        return [self.heuristic, str(self.num_apps), str(self.replications), _num(self.miss_rate_mean), _num(self.miss_rate_stddev)]


def _num(x: float) -> str:
    return f"{x:.6f}"


@dataclass
class RunMetrics:
    """Accumulates task outcomes for one run; ``finalize`` checks the report invariants."""

    task_types: Sequence[TaskType]
    heuristic: str
    num_applications: int
    seed: int
    _seen: set[int] = field(default_factory=set)
    _type_count: dict[int, int] = field(default_factory=lambda: defaultdict(int))
    _type_miss: dict[int, int] = field(default_factory=lambda: defaultdict(int))
    _node_exec: dict[int, int] = field(default_factory=lambda: defaultdict(int))
    _node_miss: dict[int, int] = field(default_factory=lambda: defaultdict(int))
    _completed: int = 0
    _dropped: int = 0
    _response_sum: dict[bool, float] = field(default_factory=lambda: {True: 0.0, False: 0.0})
    _response_n: dict[bool, int] = field(default_factory=lambda: {True: 0, False: 0})

    def record_outcome(self, task: Task, completion: float | None, dropped: bool = False) -> bool:
        """Record a terminal task; returns True when the task missed its deadline."""
        if task.id in self._seen:
            raise SimulationError(f"task {task.id} recorded twice")
        self._seen.add(task.id)
        self._type_count[task.type_id] += 1
        if dropped:
            self._dropped += 1
            self._type_miss[task.type_id] += 1
            return True
        if completion is None:
            raise SimulationError(f"task {task.id} completed without a completion time")
        self._completed += 1
        missed = completion > task.deadline
        if task.target is not None:
            self._node_exec[task.target] += 1
            if missed:
                self._node_miss[task.target] += 1
        urgent = self.task_types[task.type_id].urgent
        self._response_sum[urgent] += completion - task.arrival
        self._response_n[urgent] += 1
        if missed:
            self._type_miss[task.type_id] += 1
        return missed

    def finalize(self, generated: int | None = None) -> RunReport:
        total = len(self._seen)
        if generated is not None and generated != total:
            raise SimulationError(f"{generated} tasks generated but {total} reached a terminal state")
        if self._completed + self._dropped != total:
            raise SimulationError("completed + dropped != tasks_total")
        per_type = {t.id: TypeStats(self._type_count.get(t.id, 0), self._type_miss.get(t.id, 0)) for t in self.task_types}
        if sum(s.count for s in per_type.values()) != total:
            raise SimulationError("per-type counts do not sum to tasks_total")
        misses = sum(s.misses for s in per_type.values())

        def rate(urgent: bool) -> float:
            n = sum(per_type[t.id].count for t in self.task_types if t.urgent == urgent)
            m = sum(per_type[t.id].misses for t in self.task_types if t.urgent == urgent)
            return m / n if n else 0.0

        def mean_response(urgent: bool) -> float:
            n = self._response_n[urgent]
            return self._response_sum[urgent] / n if n else 0.0

        report = RunReport(
            heuristic=self.heuristic,
            num_applications=self.num_applications,
            seed=self.seed,
            tasks_total=total,
            tasks_completed=self._completed,
            tasks_dropped=self._dropped,
            misses_total=misses,
            miss_rate=misses / total if total else 0.0,
            miss_rate_urgent=rate(True),
            miss_rate_tolerant=rate(False),
            per_type=per_type,
            per_node={j: NodeStats(self._node_exec[j], self._node_miss.get(j, 0)) for j in sorted(self._node_exec)},
            mean_completion_urgent=mean_response(True),
            mean_completion_tolerant=mean_response(False),
        )
        if not 0.0 <= report.miss_rate <= 1.0 or report.misses_total < report.tasks_dropped:
            raise SimulationError("miss-rate invariants violated")
        return report


def aggregate_sweep(reports: Iterable[RunReport]) -> list[SweepRow]:
    groups: dict[tuple[str, int], list[tuple[int, float]]] = defaultdict(list)
    for r in reports:
        groups[(r.heuristic, r.num_applications)].append((r.seed, r.miss_rate))
    rows = []
    for (heuristic, apps), cell in sorted(groups.items()):
        # order by seed so the float sums do not depend on input order
        rates = [m for _, m in sorted(cell)]
        sd = statistics.stdev(rates) if len(rates) > 1 else 0.0
        rows.append(SweepRow(heuristic, apps, len(rates), math.fsum(rates) / len(rates), sd))
    return rows


def _render(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def runs_csv(reports: Iterable[RunReport]) -> str:
    return _render(RUN_COLUMNS, (r.csv_row() for r in reports))


def sweep_csv(rows: Iterable[SweepRow]) -> str:
    return _render(SWEEP_COLUMNS, (r.csv_row() for r in rows))


def read_sweep_csv(text: str) -> list[SweepRow]:
    reader = csv.DictReader(io.StringIO(text))
    return [
        SweepRow(r["heuristic"], int(r["num_apps"]), int(r["replications"]), float(r["miss_rate_mean"]), float(r["miss_rate_stddev"]))
        for r in reader
    ]
