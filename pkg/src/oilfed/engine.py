"""Discrete-event simulation of the edge federation plus a cloud tier.

Events are ordered by (time, insertion sequence), which makes every run a
deterministic function of (config, seed). Each node is an FCFS queue in front
of ``cores`` identical cores; a task holds exactly one core for length/mips
seconds.
"""

from __future__ import annotations

import enum
import heapq
import json
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from oilfed.config import SimulationConfig, validate
from oilfed.estimator import Estimator
from oilfed.heuristics import Route, get_selector, route_by_urgency
from oilfed.metrics import RunMetrics, RunReport
from oilfed.stats import NormalDist
from oilfed.taskmodel import Task, TaskState, TaskType, assign_deadline, avg_completion_over_edges
from oilfed.workload import generate

_HALF_NORMAL_MEAN = math.sqrt(2.0 / math.pi)
_KB_BITS = 8000.0


class EventKind(enum.IntEnum):
    TASK_ARRIVAL = 0
    TRANSFER_COMPLETE = 1
    EXEC_COMPLETE = 2
    MATRIX_REFRESH = 3
    END_OF_RUN = 4


# RNG stream ids; each concern gets its own generator so they never perturb each other.
STREAM_WORKLOAD = 0
STREAM_TRANSFER = 1


def stream_rng(seed: int, stream: int) -> random.Random:
    state = np.random.SeedSequence([seed, stream]).generate_state(2, dtype=np.uint64)
    return random.Random(int(state[0]) << 64 | int(state[1]))


# -- ground-truth link model --------------------------------------------------


def edge_transfer_mean(cfg: SimulationConfig, size_kb: float) -> float:
    net = cfg.network
    return size_kb * _KB_BITS / net.wlan_bandwidth + net.wlan_jitter_stddev * _HALF_NORMAL_MEAN


def cloud_transfer_mean(cfg: SimulationConfig, size_kb: float) -> float:
    net = cfg.network
    return net.sat_propagation + size_kb * _KB_BITS / net.sat_bandwidth + net.sat_jitter_stddev * _HALF_NORMAL_MEAN


def sample_transfer(cfg: SimulationConfig, size_kb: float, to_cloud: bool, rng: random.Random) -> float:
    net = cfg.network
    if to_cloud:
        t = net.sat_propagation + size_kb * _KB_BITS / net.sat_bandwidth + abs(rng.gauss(0.0, net.sat_jitter_stddev))
    else:
        t = size_kb * _KB_BITS / net.wlan_bandwidth + abs(rng.gauss(0.0, net.wlan_jitter_stddev))
    return max(t, net.min_transfer)


def deadline_terms(cfg: SimulationConfig) -> list[tuple[float, float]]:
    """Per task type, the (avg_completion, d_comm) pair fed to ``assign_deadline``.

    d_comm is the mean ground-truth transfer time to the other nodes of the
    tier the task is served in: the other edges for urgent types, the cloud
    for tolerant ones. Every edge has the same link model, so it does not
    depend on the origin.
    """
    mips = [n.mips for n in cfg.nodes]
    out = []
    for tt in cfg.task_types:
        avg = avg_completion_over_edges(tt, mips)
        if not tt.urgent:
            d_comm = cloud_transfer_mean(cfg, tt.input_size_kb)
        elif len(cfg.nodes) > 1:
            d_comm = edge_transfer_mean(cfg, tt.input_size_kb)
        else:
            d_comm = 0.0
        out.append((avg, d_comm))
    return out


def assign_deadlines(cfg: SimulationConfig, tasks: Sequence[Task]) -> None:
    terms = deadline_terms(cfg)
    for t in tasks:
        avg, d_comm = terms[t.type_id]
        t.deadline = assign_deadline(t.arrival, cfg.task_types[t.type_id], avg, d_comm)


def build_priors(cfg: SimulationConfig) -> tuple[list[list[NormalDist]], list[list[NormalDist]]]:
    """Warm-start ETC and ETT matrices from the ground-truth hardware and link model."""
    q = cfg.estimator.etc_prior_queue_factor
    speeds = [n.mips for n in cfg.nodes] + [cfg.cloud.mips]
    etc = [[NormalDist(q * tt.length_dist.mean / m, tt.length_dist.mean / m) for m in speeds] for tt in cfg.task_types]

    def mean_size(urgent: bool) -> float:
        sizes = [t.input_size_kb for t in cfg.task_types if t.urgent == urgent]
        return sum(sizes) / len(sizes) if sizes else 0.0

    net, cv = cfg.network, cfg.estimator.ett_prior_cv
    edge_mu = mean_size(True) * _KB_BITS / net.wlan_bandwidth
    cloud_mu = net.sat_propagation + mean_size(False) * _KB_BITS / net.sat_bandwidth
    n = len(speeds)
    ett = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(NormalDist(0.0, 0.0))
            else:
                mu = cloud_mu if cfg.cloud_index in (i, j) else edge_mu
                row.append(NormalDist(mu, cv * mu))
        ett.append(row)
    return etc, ett


# -- simulation ---------------------------------------------------------------


@dataclass
class _Node:
    id: int
    mips: float
    free_cores: int
    queue: deque = field(default_factory=deque)


@dataclass
class RunResult:
    report: RunReport
    tasks: list[Task]
    estimator: Estimator
    trace: list[str] | None = None


class Simulation:
    def __init__(
        self,
        cfg: SimulationConfig,
        tasks: Sequence[Task] | None = None,
        trace: bool = False,
        priors: tuple[list[list[NormalDist]], list[list[NormalDist]]] | None = None,
    ) -> None:
        validate(cfg)
        self.cfg = cfg
        if tasks is None:
            tasks = generate(cfg.workload, cfg.task_types, len(cfg.nodes), cfg.horizon, stream_rng(cfg.seed, STREAM_WORKLOAD))
            assign_deadlines(cfg, tasks)
        self.tasks = sorted(tasks, key=lambda t: t.id)
        if [t.id for t in self.tasks] != list(range(len(self.tasks))):
            raise ValueError("task ids must be 0..n-1")
        self.types: Sequence[TaskType] = cfg.task_types
        self.nodes = [_Node(n.id, n.mips, n.cores) for n in cfg.nodes]
        self.nodes.append(_Node(cfg.cloud_index, cfg.cloud.mips, cfg.cloud.cores))
        self.edge_ids = list(cfg.edge_ids)
        self.cloud = cfg.cloud_index
        etc, ett = priors if priors is not None else build_priors(cfg)
        self.estimator = Estimator(etc, ett, cfg.estimator.window)
        self.select = get_selector(cfg.heuristic)
        self.metrics = RunMetrics(cfg.task_types, cfg.heuristic, cfg.workload.num_applications, cfg.seed)
        self.transfer_rng = stream_rng(cfg.seed, STREAM_TRANSFER)
        self.now = 0.0
        self._heap: list[tuple[float, int, int, int]] = []
        self._seq = 0
        self._pending_tasks = len(self.tasks)
        self.trace: list[str] | None = [] if trace else None

    # event queue

    def schedule(self, time: float, kind: EventKind, payload: int = -1) -> None:
        if time < self.now:
            raise RuntimeError(f"causality violation: event at {time} scheduled at {self.now}")
        heapq.heappush(self._heap, (time, self._seq, kind, payload))
        self._seq += 1

    def _log(self, kind: EventKind, task: int, node: int) -> None:
        if self.trace is not None:
            self.trace.append(json.dumps({"time": self.now, "kind": kind.name.lower(), "task": task, "node": node}))

    def run(self) -> RunResult:
        for t in self.tasks:
            if t.state is not TaskState.CREATED:
                raise ValueError(f"task {t.id} is not fresh")
            self.schedule(t.arrival, EventKind.TASK_ARRIVAL, t.id)
        if self.tasks:
            self.schedule(self.cfg.estimator.update_period, EventKind.MATRIX_REFRESH)
        handlers = {
            EventKind.TASK_ARRIVAL: self.handle_arrival,
            EventKind.TRANSFER_COMPLETE: self.handle_transfer_complete,
            EventKind.EXEC_COMPLETE: self.handle_exec_complete,
            EventKind.MATRIX_REFRESH: self.handle_matrix_refresh,
        }
        while self._heap:
            time, _seq, kind, payload = heapq.heappop(self._heap)
            self.now = time
            handlers[kind](payload)
        self._log(EventKind.END_OF_RUN, -1, -1)
        report = self.metrics.finalize(len(self.tasks))
        return RunResult(report, self.tasks, self.estimator, self.trace)

    # handlers

    def handle_arrival(self, task_id: int) -> None:
        task = self.tasks[task_id]
        tt = self.types[task.type_id]
        self._log(EventKind.TASK_ARRIVAL, task.id, task.origin)
        if route_by_urgency(tt) is Route.CLOUD:
            task.target = self.cloud
        else:
            decision = self.select(task, self.edge_ids, task.origin, self.estimator, self.now)
            if decision.dropped:
                task.state = TaskState.DROPPED
                self._pending_tasks -= 1
                self.metrics.record_outcome(task, None, dropped=True)
                return
            task.target = decision.target
        if task.target == task.origin:
            self._enqueue(task)
        else:
            task.state = TaskState.TRANSFERRING
            delay = sample_transfer(self.cfg, tt.input_size_kb, task.target == self.cloud, self.transfer_rng)
            self.schedule(self.now + delay, EventKind.TRANSFER_COMPLETE, task.id)

    def handle_transfer_complete(self, task_id: int) -> None:
        task = self.tasks[task_id]
        self._log(EventKind.TRANSFER_COMPLETE, task.id, task.target)
        self.estimator.record_transfer(task.origin, task.target, self.now - task.arrival)
        self._enqueue(task)

    def handle_exec_complete(self, task_id: int) -> None:
        task = self.tasks[task_id]
        node = self.nodes[task.target]
        self._log(EventKind.EXEC_COMPLETE, task.id, node.id)
        task.state = TaskState.COMPLETED
        task.completion = self.now
        self._pending_tasks -= 1
        self.estimator.record_completion(task.type_id, node.id, self.now - task.node_arrival)
        self.metrics.record_outcome(task, self.now)
        if node.queue:
            self._start(node, node.queue.popleft())
        else:
            node.free_cores += 1

    def handle_matrix_refresh(self, _payload: int) -> None:
        self._log(EventKind.MATRIX_REFRESH, -1, -1)
        self.estimator.refresh(self.now)
        if self._pending_tasks > 0:
            self.schedule(self.now + self.cfg.estimator.update_period, EventKind.MATRIX_REFRESH)

    # node mechanics

    def _enqueue(self, task: Task) -> None:
        node = self.nodes[task.target]
        task.node_arrival = self.now
        if node.free_cores > 0:
            node.free_cores -= 1
            self._start(node, task)
        else:
            task.state = TaskState.QUEUED
            node.queue.append(task)

    def _start(self, node: _Node, task: Task) -> None:
        task.state = TaskState.EXECUTING
        self.schedule(self.now + task.length / node.mips, EventKind.EXEC_COMPLETE, task.id)


def run(cfg: SimulationConfig, seed: int | None = None, trace: bool = False) -> RunReport:
    """Simulate one run; ``seed`` overrides ``cfg.seed``."""
    return simulate(cfg, seed, trace).report


def simulate(cfg: SimulationConfig, seed: int | None = None, trace: bool = False) -> RunResult:
    if seed is not None and seed != cfg.seed:
        cfg = cfg.replace(seed=seed)
    return Simulation(cfg, trace=trace).run()


def write_trace(lines: Sequence[str], fh: IO[str]) -> None:
    for line in lines:
        fh.write(line)
        fh.write("\n")
