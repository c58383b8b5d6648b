"""Run configuration: schema, YAML loading, and validation.

Every constraint is checked before a simulation starts; a violation raises
:class:`ConfigError` whose message starts with the dotted path of the
offending key.
"""

from __future__ import annotations

import dataclasses
import math
import os
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import yaml

from oilfed.errors import ConfigError
from oilfed.heuristics import HEURISTICS
from oilfed.stats import NormalDist
from oilfed.taskmodel import DEFAULT_DEADLINE_CONSTANTS, TaskType, Urgency

SCHEMA_VERSION = 1
CONFIG_DIR_ENV = "OILFED_CONFIG_DIR"
PACKAGED_CONFIG_DIR = Path(__file__).parent / "configs"


@dataclass(frozen=True)
class NodeSpec:
    id: int
    mips: float
    cores: int = 8


@dataclass(frozen=True)
class CloudSpec:
    mips: float = 40000.0
    cores: int = 16


@dataclass(frozen=True)
class NetworkModel:
    wlan_bandwidth: float = 200e6  # bits/s
    wlan_jitter_stddev: float = 0.6  # s
    sat_bandwidth: float = 10e6  # bits/s
    sat_propagation: float = 0.57  # s
    sat_jitter_stddev: float = 0.05  # s
    min_transfer: float = 0.001  # s


@dataclass(frozen=True)
class Burst:
    start: float
    duration: float
    multiplier: float


@dataclass(frozen=True)
class WorkloadSpec:
    num_applications: int = 50
    tasks_per_app: tuple[int, int] = (10, 40)
    type_mix: tuple[float, ...] = (0.25, 0.25, 0.25, 0.25)
    task_rate: float = 1.0  # tasks/s within one application
    burst: Burst | None = None
    length_floor: float = 1.0  # MI; sampled lengths never fall below this

    @property
    def mean_tasks_per_app(self) -> float:
        lo, hi = self.tasks_per_app
        return (lo + hi) / 2.0


@dataclass(frozen=True)
class EstimatorConfig:
    window: int = 50
    update_period: float = 10.0
    etc_prior_queue_factor: float = 2.0
    ett_prior_cv: float = 0.1


@dataclass(frozen=True)
class SimulationConfig:
    nodes: tuple[NodeSpec, ...]
    task_types: tuple[TaskType, ...]
    cloud: CloudSpec = CloudSpec()
    network: NetworkModel = NetworkModel()
    workload: WorkloadSpec = WorkloadSpec()
    estimator: EstimatorConfig = EstimatorConfig()
    heuristic: str = "hps"
    horizon: float = 600.0
    seed: int = 0
    schema_version: int = SCHEMA_VERSION

    @property
    def cloud_index(self) -> int:
        return len(self.nodes)

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes)

    def replace(self, **changes: Any) -> "SimulationConfig":
        cfg = dataclasses.replace(self, **changes)
        validate(cfg)
        return cfg

    def with_apps(self, num_applications: int) -> "SimulationConfig":
        return self.replace(workload=dataclasses.replace(self.workload, num_applications=num_applications))


def default_task_types() -> tuple[TaskType, ...]:
    """Two urgent and two tolerant types. Values are calibration defaults."""
    specs = [
        ("urgent-a", Urgency.URGENT, 1500.0, 300.0, 200.0),
        ("urgent-b", Urgency.URGENT, 3000.0, 600.0, 500.0),
        ("tolerant-a", Urgency.TOLERANT, 6000.0, 1200.0, 1000.0),
        ("tolerant-b", Urgency.TOLERANT, 12000.0, 2400.0, 2000.0),
    ]
    out = []
    for i, (name, urgency, mean, sd, size) in enumerate(specs):
        beta, alpha, eps = DEFAULT_DEADLINE_CONSTANTS[urgency]
        out.append(TaskType(i, name, urgency, NormalDist(mean, sd), size, 0.0, beta, alpha, eps))
    return tuple(out)


def generate_nodes(count: int, seed: int, mips_range: tuple[float, float] = (1500.0, 2500.0), cores: int = 8) -> tuple[NodeSpec, ...]:
    """Draw heterogeneous edge node speeds once, to be frozen into a config file."""
    rng = random.Random(seed)
    lo, hi = mips_range
    return tuple(NodeSpec(i, round(rng.uniform(lo, hi), 1), cores) for i in range(count))


# -- validation ---------------------------------------------------------------


def _require(ok: bool, path: str, message: str) -> None:
    if not ok:
        raise ConfigError(f"{path}: {message}")


def _finite_positive(value: float, path: str) -> None:
    _require(isinstance(value, (int, float)) and math.isfinite(value) and value > 0, path, f"must be a finite number > 0, got {value!r}")


def _finite_nonneg(value: float, path: str) -> None:
    _require(isinstance(value, (int, float)) and math.isfinite(value) and value >= 0, path, f"must be a finite number >= 0, got {value!r}")


def validate(cfg: SimulationConfig) -> SimulationConfig:
    _require(cfg.schema_version == SCHEMA_VERSION, "schema_version", f"unsupported version {cfg.schema_version!r}, expected {SCHEMA_VERSION}")
    _require(len(cfg.nodes) >= 1, "nodes", "at least one edge node is required")
    for k, node in enumerate(cfg.nodes):
        _require(node.id == k, f"nodes[{k}].id", f"node ids must be 0..{len(cfg.nodes) - 1} in order, got {node.id!r}")
        _finite_positive(node.mips, f"nodes[{k}].mips")
        _require(isinstance(node.cores, int) and node.cores >= 1, f"nodes[{k}].cores", f"must be an integer >= 1, got {node.cores!r}")
    _finite_positive(cfg.cloud.mips, "cloud.mips")
    _require(isinstance(cfg.cloud.cores, int) and cfg.cloud.cores >= 1, "cloud.cores", f"must be an integer >= 1, got {cfg.cloud.cores!r}")

    net = cfg.network
    _finite_positive(net.wlan_bandwidth, "network.wlan_bandwidth")
    _finite_positive(net.sat_bandwidth, "network.sat_bandwidth")
    _finite_nonneg(net.sat_propagation, "network.sat_propagation")
    _finite_nonneg(net.wlan_jitter_stddev, "network.wlan_jitter_stddev")
    _finite_nonneg(net.sat_jitter_stddev, "network.sat_jitter_stddev")
    _finite_positive(net.min_transfer, "network.min_transfer")

    _require(len(cfg.task_types) >= 1, "task_types", "at least one task type is required")
    for k, tt in enumerate(cfg.task_types):
        _require(tt.id == k, f"task_types[{k}].id", f"task type ids must be 0..{len(cfg.task_types) - 1} in order")
        _require(tt.length_dist.stddev < tt.length_dist.mean / 2, f"task_types[{k}].length_stddev", "must be < length_mean / 2")

    wl = cfg.workload
    _require(isinstance(wl.num_applications, int) and wl.num_applications >= 0, "workload.num_applications", f"must be an integer >= 0, got {wl.num_applications!r}")
    lo, hi = wl.tasks_per_app
    _require(isinstance(lo, int) and isinstance(hi, int) and 1 <= lo <= hi, "workload.tasks_per_app", f"must be [lo, hi] integers with 1 <= lo <= hi, got {list(wl.tasks_per_app)!r}")
    _require(len(wl.type_mix) == len(cfg.task_types), "workload.type_mix", f"needs one weight per task type ({len(cfg.task_types)}), got {len(wl.type_mix)}")
    _require(all(w >= 0 for w in wl.type_mix), "workload.type_mix", "weights must be >= 0")
    _require(abs(sum(wl.type_mix) - 1.0) <= 1e-9, "workload.type_mix", f"weights must sum to 1, got {sum(wl.type_mix)!r}")
    _finite_positive(wl.task_rate, "workload.task_rate")
    _finite_positive(wl.length_floor, "workload.length_floor")
    for k, tt in enumerate(cfg.task_types):
        d = tt.length_dist
        _require(wl.length_floor < d.mean + 10 * d.stddev, "workload.length_floor", f"unreachable for task_types[{k}]")
    if wl.burst is not None:
        _finite_nonneg(wl.burst.start, "workload.burst.start")
        _finite_positive(wl.burst.duration, "workload.burst.duration")
        _finite_positive(wl.burst.multiplier, "workload.burst.multiplier")

    est = cfg.estimator
    _require(isinstance(est.window, int) and est.window >= 1, "estimator.window", f"must be an integer >= 1, got {est.window!r}")
    _finite_positive(est.update_period, "estimator.update_period")
    _finite_positive(est.etc_prior_queue_factor, "estimator.etc_prior_queue_factor")
    _finite_nonneg(est.ett_prior_cv, "estimator.ett_prior_cv")

    _require(cfg.heuristic in HEURISTICS, "heuristic", f"unknown heuristic {cfg.heuristic!r}; valid names: {', '.join(HEURISTICS)}")
    _finite_positive(cfg.horizon, "horizon")
    _require(isinstance(cfg.seed, int) and cfg.seed >= 0, "seed", f"must be a non-negative integer, got {cfg.seed!r}")
    return cfg


# -- YAML <-> config ----------------------------------------------------------


def _section(raw: Mapping[str, Any], key: str) -> Mapping[str, Any]:
    value = raw.get(key, {})
    _require(isinstance(value, Mapping), key, f"must be a mapping, got {type(value).__name__}")
    return value


def _build(cls: type, raw: Mapping[str, Any], path: str, **converted: Any) -> Any:
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(raw) - names)
    _require(not unknown, f"{path}.{unknown[0]}" if unknown else path, "unknown key")
    kwargs = {k: v for k, v in raw.items() if k not in converted}
    kwargs.update(converted)
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _task_type(raw: Mapping[str, Any], k: int) -> TaskType:
    path = f"task_types[{k}]"
    _require(isinstance(raw, Mapping), path, "must be a mapping")
    allowed = {"id", "name", "urgency", "length_mean", "length_stddev", "input_size_kb", "output_size_kb", "beta", "alpha", "epsilon"}
    unknown = sorted(set(raw) - allowed)
    _require(not unknown, f"{path}.{unknown[0]}" if unknown else path, "unknown key")
    for key in ("name", "urgency", "length_mean", "input_size_kb"):
        _require(key in raw, f"{path}.{key}", "missing required key")
    try:
        urgency = Urgency(raw["urgency"])
    except ValueError:
        raise ConfigError(f"{path}.urgency: must be one of urgent, tolerant; got {raw['urgency']!r}") from None
    beta, alpha, eps = DEFAULT_DEADLINE_CONSTANTS[urgency]
    mean, sd = raw["length_mean"], raw.get("length_stddev", 0.0)
    _finite_positive(mean, f"{path}.length_mean")
    _finite_nonneg(sd, f"{path}.length_stddev")
    return TaskType(
        id=raw.get("id", k),
        name=str(raw["name"]),
        urgency=urgency,
        length_dist=NormalDist(float(mean), float(sd)),
        input_size_kb=raw["input_size_kb"],
        output_size_kb=raw.get("output_size_kb", 0.0),
        beta=raw.get("beta", beta),
        alpha=raw.get("alpha", alpha),
        epsilon=raw.get("epsilon", eps),
    )


def from_dict(raw: Mapping[str, Any]) -> SimulationConfig:
    _require(isinstance(raw, Mapping), "<root>", "config must be a mapping")
    top = {"schema_version", "seed", "heuristic", "horizon", "nodes", "cloud", "network", "task_types", "workload", "estimator"}
    unknown = sorted(set(raw) - top)
    _require(not unknown, unknown[0] if unknown else "<root>", "unknown key")
    _require("nodes" in raw, "nodes", "missing required key")

    nodes_raw = raw["nodes"]
    _require(isinstance(nodes_raw, list), "nodes", "must be a list")
    nodes = []
    for k, n in enumerate(nodes_raw):
        _require(isinstance(n, Mapping), f"nodes[{k}]", "must be a mapping")
        nodes.append(_build(NodeSpec, {"id": k, **n}, f"nodes[{k}]"))

    if "task_types" in raw:
        _require(isinstance(raw["task_types"], list), "task_types", "must be a list")
        task_types = tuple(_task_type(t, k) for k, t in enumerate(raw["task_types"]))
    else:
        task_types = default_task_types()

    wl_raw = dict(_section(raw, "workload"))
    burst = wl_raw.pop("burst", None)
    converted: dict[str, Any] = {}
    if burst is not None:
        _require(isinstance(burst, Mapping), "workload.burst", "must be a mapping or null")
        converted["burst"] = _build(Burst, burst, "workload.burst")
    if "tasks_per_app" in wl_raw:
        tpa = wl_raw["tasks_per_app"]
        _require(isinstance(tpa, (list, tuple)) and len(tpa) == 2, "workload.tasks_per_app", "must be a [lo, hi] pair")
        converted["tasks_per_app"] = tuple(tpa)
    if "type_mix" in wl_raw:
        _require(isinstance(wl_raw["type_mix"], (list, tuple)), "workload.type_mix", "must be a list of weights")
        converted["type_mix"] = tuple(wl_raw["type_mix"])
    elif task_types:
        converted["type_mix"] = tuple(1.0 / len(task_types) for _ in task_types)
    workload = _build(WorkloadSpec, wl_raw, "workload", **converted)

    cfg = SimulationConfig(
        nodes=tuple(nodes),
        task_types=task_types,
        cloud=_build(CloudSpec, _section(raw, "cloud"), "cloud"),
        network=_build(NetworkModel, _section(raw, "network"), "network"),
        workload=workload,
        estimator=_build(EstimatorConfig, _section(raw, "estimator"), "estimator"),
        heuristic=raw.get("heuristic", "hps"),
        horizon=raw.get("horizon", 600.0),
        seed=raw.get("seed", 0),
        schema_version=raw.get("schema_version", SCHEMA_VERSION),
    )
    return validate(cfg)


def to_dict(cfg: SimulationConfig) -> dict[str, Any]:
    wl = cfg.workload
    return {
        "schema_version": cfg.schema_version,
        "seed": cfg.seed,
        "heuristic": cfg.heuristic,
        "horizon": cfg.horizon,
        "nodes": [dataclasses.asdict(n) for n in cfg.nodes],
        "cloud": dataclasses.asdict(cfg.cloud),
        "network": dataclasses.asdict(cfg.network),
        "task_types": [
            {
                "id": t.id,
                "name": t.name,
                "urgency": t.urgency.value,
                "length_mean": t.length_dist.mean,
                "length_stddev": t.length_dist.stddev,
                "input_size_kb": t.input_size_kb,
                "output_size_kb": t.output_size_kb,
                "beta": t.beta,
                "alpha": t.alpha,
                "epsilon": t.epsilon,
            }
            for t in cfg.task_types
        ],
        "workload": {
            "num_applications": wl.num_applications,
            "tasks_per_app": list(wl.tasks_per_app),
            "type_mix": list(wl.type_mix),
            "task_rate": wl.task_rate,
            "burst": dataclasses.asdict(wl.burst) if wl.burst else None,
            "length_floor": wl.length_floor,
        },
        "estimator": dataclasses.asdict(cfg.estimator),
    }


def resolve_config_path(name_or_path: str | os.PathLike[str]) -> Path:
    """Accept a file path, or a bare config name looked up in $OILFED_CONFIG_DIR then the packaged configs."""
    p = Path(name_or_path)
    if p.exists():
        return p
    if p.suffix == "" and len(p.parts) == 1:
        dirs = [Path(d) for d in [os.environ.get(CONFIG_DIR_ENV)] if d] + [PACKAGED_CONFIG_DIR]
        for d in dirs:
            for suffix in (".yaml", ".yml"):
                candidate = d / f"{p.name}{suffix}"
                if candidate.exists():
                    return candidate
    raise FileNotFoundError(f"config not found: {name_or_path}")


def parse_and_validate(path: str | os.PathLike[str]) -> SimulationConfig:
    resolved = resolve_config_path(path)
    try:
        raw = yaml.safe_load(resolved.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{resolved}: parse error: {exc}") from None
    return from_dict(raw if raw is not None else {})


def load_default() -> SimulationConfig:
    return parse_and_validate("paper_default")


__all__ = [
    "Burst",
    "CloudSpec",
    "EstimatorConfig",
    "NetworkModel",
    "NodeSpec",
    "SimulationConfig",
    "WorkloadSpec",
    "default_task_types",
    "from_dict",
    "generate_nodes",
    "load_default",
    "parse_and_validate",
    "resolve_config_path",
    "to_dict",
    "validate",
]
