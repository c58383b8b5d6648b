"""ETC / ETT matrices: per-cell normal distributions re-estimated from a sliding window.

Observations go into per-cell windows immediately, but the distributions the
heuristics read only change when :meth:`Estimator.refresh` publishes them.
"""

from __future__ import annotations

from collections import deque
from typing import Iterator, Sequence

from oilfed.errors import SimulationError
from oilfed.stats import NormalDist, OnlineStat, welford_update

_ZERO = NormalDist(0.0, 0.0)


class _CellGrid:
    def __init__(self, priors: Sequence[Sequence[NormalDist]], window: int) -> None:
        self.rows = len(priors)
        self.cols = len(priors[0]) if priors else 0
        if any(len(row) != self.cols for row in priors):
            raise ValueError("prior grid must be rectangular")
        self.priors = [list(row) for row in priors]
        self.published = [list(row) for row in priors]
        self.windows = [[deque(maxlen=window) for _ in range(self.cols)] for _ in range(self.rows)]
        self._dirty: set[tuple[int, int]] = set()

    def check(self, r: int, c: int) -> None:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise SimulationError(f"cell ({r}, {c}) outside {self.rows}x{self.cols} matrix")

    def add(self, r: int, c: int, x: float) -> None:
        self.check(r, c)
        self.windows[r][c].append(x)
        self._dirty.add((r, c))

    def accumulator(self, r: int, c: int) -> OnlineStat:
        acc = OnlineStat()
        for x in self.windows[r][c]:
            acc = welford_update(acc, x)
        return acc

    def publish(self) -> None:
        for r, c in sorted(self._dirty):
            acc = self.accumulator(r, c)
            if acc.count >= 2:
                self.published[r][c] = acc.to_dist()
            elif acc.count == 1:
                self.published[r][c] = NormalDist(acc.mean, self.priors[r][c].stddev)
        self._dirty.clear()


class Estimator:
    """Shared ETC (task type x node) and ETT (node x node) matrices for one run."""

    def __init__(
        self,
        etc_priors: Sequence[Sequence[NormalDist]],
        ett_priors: Sequence[Sequence[NormalDist]],
        window: int = 50,
    ) -> None:
        if window < 1:
            raise ValueError("window must be >= 1")
        n = len(ett_priors)
        ett = [[_ZERO if i == j else ett_priors[i][j] for j in range(n)] for i in range(n)]
        self.window = window
        self._etc = _CellGrid(etc_priors, window)
        self._ett = _CellGrid(ett, window)
        self.last_refresh: float | None = None

    @property
    def num_types(self) -> int:
        return self._etc.rows

    @property
    def num_nodes(self) -> int:
        return self._etc.cols

    def record_completion(self, type_id: int, node: int, sojourn: float) -> None:
        if not sojourn > 0:
            raise SimulationError(f"non-positive sojourn {sojourn} for type {type_id} on node {node}")
        self._etc.add(type_id, node, sojourn)

    def record_transfer(self, src: int, dst: int, elapsed: float) -> None:
        if src == dst:
            raise SimulationError(f"transfer from node {src} to itself")
        if elapsed < 0:
            raise SimulationError(f"negative transfer time {elapsed}")
        self._ett.add(src, dst, elapsed)

    def refresh(self, now: float) -> None:
        self._etc.publish()
        self._ett.publish()
        self.last_refresh = now

    def etc_dist(self, type_id: int, node: int) -> NormalDist:
        self._etc.check(type_id, node)
        return self._etc.published[type_id][node]

    def ett_dist(self, src: int, dst: int) -> NormalDist:
        self._ett.check(src, dst)
        return self._ett.published[src][dst]

    def etc_row(self, type_id: int) -> list[NormalDist]:
        return self._etc.published[type_id]

    def ett_row(self, src: int) -> list[NormalDist]:
        return self._ett.published[src]

    def dump(self) -> Iterator[tuple[str, int, int, float, float, int]]:
        """Yield (matrix, row, col, mean, stddev, window_count) for every cell."""
        for name, grid in (("etc", self._etc), ("ett", self._ett)):
            for r in range(grid.rows):
                for c in range(grid.cols):
                    d = grid.published[r][c]
                    yield name, r, c, d.mean, d.stddev, len(grid.windows[r][c])
