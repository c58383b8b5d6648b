"""Task types, tasks, and deadline assignment."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from oilfed.errors import ConfigError
from oilfed.stats import NormalDist


class Urgency(str, enum.Enum):
    URGENT = "urgent"
    TOLERANT = "tolerant"


class TaskState(str, enum.Enum):
    CREATED = "created"
    TRANSFERRING = "transferring"
    QUEUED = "queued"
    EXECUTING = "executing"
    COMPLETED = "completed"
    DROPPED = "dropped"


# (beta, alpha, epsilon) used when a task type does not set its own.
DEFAULT_DEADLINE_CONSTANTS = {
    Urgency.URGENT: (1.5, 1.0, 0.25),
    Urgency.TOLERANT: (3.0, 1.0, 1.0),
}


@dataclass(frozen=True)
class TaskType:
    id: int
    name: str
    urgency: Urgency
    length_dist: NormalDist  # million instructions
    input_size_kb: float
    output_size_kb: float = 0.0
    beta: float = 1.5
    alpha: float = 1.0
    epsilon: float = 0.25

    def __post_init__(self) -> None:
        where = f"task_types[{self.id}] ({self.name})"
        if self.length_dist.mean <= 0:
            raise ConfigError(f"{where}: length mean must be > 0, got {self.length_dist.mean}")
        if self.input_size_kb < 0 or self.output_size_kb < 0:
            raise ConfigError(f"{where}: input/output sizes must be >= 0")
        if self.beta <= 0:
            raise ConfigError(f"{where}: beta must be > 0, got {self.beta}")
        if self.alpha < 0:
            raise ConfigError(f"{where}: alpha must be >= 0, got {self.alpha}")
        if self.epsilon < 0:
            raise ConfigError(f"{where}: epsilon must be >= 0, got {self.epsilon}")

    @property
    def urgent(self) -> bool:
        return self.urgency is Urgency.URGENT


@dataclass(slots=True)
class Task:
    id: int
    type_id: int
    origin: int
    arrival: float
    length: float
    deadline: float = float("inf")
    state: TaskState = TaskState.CREATED
    target: int | None = None
    node_arrival: float | None = None
    completion: float | None = None

    @property
    def terminal(self) -> bool:
        return self.state in (TaskState.COMPLETED, TaskState.DROPPED)


def assign_deadline(arrival: float, task_type: TaskType, avg_completion: float, d_comm: float) -> float:
    """Absolute deadline: arrival + beta*avg_completion + alpha*d_comm + epsilon."""
    if avg_completion <= 0:
        raise ConfigError(f"avg_completion must be > 0, got {avg_completion}")
    if d_comm < 0:
        raise ConfigError(f"d_comm must be >= 0, got {d_comm}")
    return arrival + task_type.beta * avg_completion + task_type.alpha * d_comm + task_type.epsilon


def avg_completion_over_edges(task_type: TaskType, mips: Iterable[float]) -> float:
    """Mean execution time of the type's mean length across the given edge node speeds."""
    speeds: Sequence[float] = list(mips)
    if not speeds:
        raise ConfigError("avg_completion_over_edges needs at least one edge node")
    if any(m <= 0 for m in speeds):
        raise ConfigError("edge node MIPS must be > 0")
    return sum(task_type.length_dist.mean / m for m in speeds) / len(speeds)
