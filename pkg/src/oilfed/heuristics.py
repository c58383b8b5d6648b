"""Immediate-mode allocation policies run by each node's service balancer.

Urgent tasks are placed on a node of the edge federation by one of three
selectors; latency-tolerant tasks always go to the cloud.

* ``hps``  - highest probability of finishing before the deadline, using the
  transfer distribution convolved with the completion distribution for
  remote nodes.
* ``mect`` - smallest expected completion (computation) time.
* ``scc``  - largest expected slack; tasks with no positive slack anywhere
  are dropped instead of dispatched.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from oilfed.estimator import Estimator
from oilfed.stats import convolve_normals, prob_before
from oilfed.taskmodel import Task, TaskType

HEURISTICS = ("hps", "mect", "scc")


class Route(str, enum.Enum):
    FEDERATION = "federation"
    CLOUD = "cloud"


@dataclass(frozen=True)
class AllocationDecision:
    task_id: int
    target: int | None
    score: float
    dropped: bool = False

    def __post_init__(self) -> None:
        if self.dropped and self.target is not None:
            raise ValueError("a dropped decision cannot carry a target")


def route_by_urgency(task_type: TaskType) -> Route:
    return Route.FEDERATION if task_type.urgent else Route.CLOUD


def _pick(nodes: Sequence[int], receiving: int, scores: Sequence[float], maximize: bool) -> int:
    # exact ties: receiving node first, then lowest id
    sign = -1.0 if maximize else 1.0
    return min(range(len(nodes)), key=lambda k: (sign * scores[k], nodes[k] != receiving, nodes[k]))


def success_probability(task: Task, candidate: int, receiving: int, est: Estimator, now: float) -> float:
    dist = est.etc_dist(task.type_id, candidate)
    if candidate != receiving:
        dist = convolve_normals(est.ett_dist(receiving, candidate), dist)
    return prob_before(dist, task.deadline - now)


def _success_rank(task: Task, candidate: int, receiving: int, est: Estimator, now: float) -> float:
    """A strictly increasing function of the success probability (the z-score).

    Ranking on z instead of on the probability keeps distinct candidates
    distinct where the CDF rounds to exactly 0.0 or 1.0 in floating point.
    """
    dist = est.etc_dist(task.type_id, candidate)
    if candidate != receiving:
        dist = convolve_normals(est.ett_dist(receiving, candidate), dist)
    budget = task.deadline - now
    if dist.stddev == 0.0:
        return math.inf if budget >= dist.mean else -math.inf
    return (budget - dist.mean) / dist.stddev


def hps_select(task: Task, nodes: Sequence[int], receiving: int, est: Estimator, now: float) -> AllocationDecision:
    ranks = [_success_rank(task, j, receiving, est, now) for j in nodes]
    k = _pick(nodes, receiving, ranks, maximize=True)
    target = nodes[k]
    return AllocationDecision(task.id, target, success_probability(task, target, receiving, est, now))


def mect_select(task: Task, nodes: Sequence[int], receiving: int, est: Estimator, now: float) -> AllocationDecision:
    means = [est.etc_dist(task.type_id, j).mean for j in nodes]
    k = _pick(nodes, receiving, means, maximize=False)
    return AllocationDecision(task.id, nodes[k], means[k])


def scc_select(task: Task, nodes: Sequence[int], receiving: int, est: Estimator, now: float) -> AllocationDecision:
    budget = task.deadline - now
    slack = [budget - est.etc_dist(task.type_id, j).mean for j in nodes]
    k = _pick(nodes, receiving, slack, maximize=True)
    if slack[k] <= 0:
        return AllocationDecision(task.id, None, slack[k], dropped=True)
    return AllocationDecision(task.id, nodes[k], slack[k])


Selector = Callable[[Task, Sequence[int], int, Estimator, float], AllocationDecision]

SELECTORS: dict[str, Selector] = {"hps": hps_select, "mect": mect_select, "scc": scc_select}


def get_selector(name: str) -> Selector:
    try:
        return SELECTORS[name]
    except KeyError:
        raise ValueError(f"unknown heuristic {name!r}; expected one of {', '.join(HEURISTICS)}") from None
