"""Application and task stream generation."""

from __future__ import annotations

import random
from typing import Sequence

from oilfed.config import Burst, WorkloadSpec, default_task_types
from oilfed.errors import ConfigError
from oilfed.stats import sample_truncated_normal
from oilfed.taskmodel import Task, TaskType

__all__ = ["app_start_times", "default_task_types", "generate"]


def _segments(horizon: float, burst: Burst | None) -> list[tuple[float, float, float]]:
    """Piecewise-constant arrival intensity over [0, horizon] as (start, end, weight)."""
    if burst is None or burst.start >= horizon:
        return [(0.0, horizon, 1.0)]
    b0, b1 = burst.start, min(burst.start + burst.duration, horizon)
    segs = [(0.0, b0, 1.0), (b0, b1, burst.multiplier), (b1, horizon, 1.0)]
    return [s for s in segs if s[1] > s[0]]


def app_start_times(n: int, horizon: float, burst: Burst | None, rng: random.Random) -> list[float]:
    """``n`` application start times of a (possibly bursty) Poisson process on [0, horizon].

    Conditioned on the count, the points of a Poisson process are i.i.d. with
    density proportional to the intensity, which is how they are drawn here.
    """
    segs = _segments(horizon, burst)
    masses = [(b - a) * w for a, b, w in segs]
    starts = []
    for _ in range(n):
        a, b, _w = rng.choices(segs, weights=masses)[0]
        starts.append(rng.uniform(a, b))
    starts.sort()
    return starts


def generate(
    spec: WorkloadSpec,
    task_types: Sequence[TaskType],
    num_edges: int,
    horizon: float,
    rng: random.Random,
) -> list[Task]:
    """Time-ordered task stream. Deadlines are left unset; the engine assigns them."""
    if spec.num_applications < 0:
        raise ConfigError("workload.num_applications: must be >= 0")
    if num_edges < 1:
        raise ConfigError("workload needs at least one edge node for task origins")
    if len(spec.type_mix) != len(task_types):
        raise ConfigError("workload.type_mix: one weight per task type required")
    lo, hi = spec.tasks_per_app
    type_ids = list(range(len(task_types)))

    raw: list[tuple[float, int, int, float]] = []
    for start in app_start_times(spec.num_applications, horizon, spec.burst, rng):
        origin = rng.randrange(num_edges)
        t = start
        for k in range(rng.randint(lo, hi)):
            if k:
                t += rng.expovariate(spec.task_rate)
            type_id = rng.choices(type_ids, weights=spec.type_mix)[0]
            length = sample_truncated_normal(task_types[type_id].length_dist, spec.length_floor, rng)
            raw.append((t, type_id, origin, length))

    raw.sort(key=lambda r: r[0])
    return [Task(id=i, type_id=ty, origin=o, arrival=t, length=ln) for i, (t, ty, o, ln) in enumerate(raw)]
