"""Incremental nearest-center partitions of an observation space.

A partition is a growing list of centers; a point belongs to the nearest
center (ties to the lowest index). Adding a center never re-assigns
previously stored samples — old tree statistics stay attached to the cell
that absorbed them. A progressive-widening budget decides when a search may
add a center instead of recursing into an existing cell.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np


class NoCellsError(ValueError):
    """assign() called on a partition with no centers yet."""


def pw_allows(m: int, n_ha: int, k_z: float, alpha_z: float) -> bool:
    """True when a partition with ``m`` cells may grow at visit count
    ``n_ha``: the budget is ``m <= k_z * n_ha ** alpha_z``."""
    if m < 0 or n_ha < 0:
        raise ValueError(f"counts must be nonnegative, got m={m}, n_ha={n_ha}")
    if k_z <= 0.0 or not 0.0 < alpha_z <= 1.0:
        raise ValueError(f"need k_z > 0 and alpha_z in (0, 1], got k_z={k_z}, alpha_z={alpha_z}")
    return m <= k_z * n_ha**alpha_z


class VoronoiPartition:
    """Nearest-center cells over R^dim (Euclidean by default).

    A custom ``metric(a, b) -> float`` switches both assignment and the
    covering radius to a generic slow path. 1-D Euclidean partitions get an
    exact covering radius; everything else is estimated on a ~10^4-point grid.
    """

    __slots__ = ("dim", "metric", "duplicate_adds", "_buf", "_m")

    def __init__(
        self,
        dim: int = 1,
        metric: Callable[[np.ndarray, np.ndarray], float] | None = None,
        centers: Sequence | None = None,
    ):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.dim = dim
        self.metric = metric
        self.duplicate_adds = 0  # telemetry: bit-identical re-adds, which are no-ops
        cap = 64
        self._buf = np.empty(cap) if dim == 1 else np.empty((cap, dim))
        self._m = 0
        if centers is not None:
            for c in centers:
                self.add_center(c)

    @property
    def m(self) -> int:
        return self._m

    @property
    def centers(self) -> list:
        if self.dim == 1:
            return [float(c) for c in self._buf[: self._m]]
        return [self._buf[i].copy() for i in range(self._m)]

    def _as_point(self, z):
        if self.dim == 1:
            return float(z)
        p = np.asarray(z, dtype=float)
        if p.shape != (self.dim,):
            raise ValueError(f"point shape {p.shape} does not match dim {self.dim}")
        return p

    def assign(self, z) -> int:
        """Index of the nearest center; ties go to the lowest index."""
        m = self._m
        if m == 0:
            raise NoCellsError("partition has no centers")
        z = self._as_point(z)
        if self.metric is not None:
            dists = [self.metric(self._buf[i], z) for i in range(m)]
            return int(np.argmin(dists))
        if self.dim == 1:
            return int(np.abs(self._buf[:m] - z).argmin())
        d = self._buf[:m] - z
        return int(np.einsum("ij,ij->i", d, d).argmin())

    def add_center(self, z) -> int:
        """Append ``z`` as a new center and return its cell index.

        A bit-identical duplicate is a no-op: the existing index is returned
        and ``duplicate_adds`` is incremented. Existing samples are never
        re-assigned.
        """
        z = self._as_point(z)
        m = self._m
        if m:
            if self.dim == 1:
                hits = np.flatnonzero(self._buf[:m] == z)
            else:
                hits = np.flatnonzero((self._buf[:m] == z).all(axis=1))
            if hits.size:
                self.duplicate_adds += 1
                return int(hits[0])
        if m == len(self._buf):
            grown = np.empty(2 * m) if self.dim == 1 else np.empty((2 * m, self.dim))
            grown[:m] = self._buf
            self._buf = grown
        self._buf[m] = z
        self._m = m + 1
        return m

    def covering_radius(self, box) -> float:
        """Largest distance from a point of ``box`` to its nearest center.

        ``box`` is ``(lo, hi)`` with scalars (1-D) or coordinate arrays.
        Exact for 1-D Euclidean partitions; otherwise a grid estimate.
        """
        if self._m == 0:
            raise NoCellsError("partition has no centers")
        lo, hi = box
        if self.dim == 1 and self.metric is None:
            lo, hi = float(lo), float(hi)
            if hi < lo:
                raise ValueError(f"empty box ({lo}, {hi})")
            c = np.sort(self._buf[: self._m])
            radius = max(c[0] - lo, hi - c[-1])
            if self._m > 1:
                radius = max(radius, float(np.diff(c).max()) / 2.0)
            return max(radius, 0.0)
        return self._grid_radius(np.atleast_1d(np.asarray(lo, float)), np.atleast_1d(np.asarray(hi, float)))

    def _grid_radius(self, lo: np.ndarray, hi: np.ndarray, n_points: int = 10_000) -> float:
        per_axis = max(2, round(n_points ** (1.0 / self.dim)))
        axes = [np.linspace(lo[i], hi[i], per_axis) for i in range(self.dim)]
        if self.dim == 1:
            grid = axes[0][:, None]
        else:
            grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)
        m = self._m
        if self.metric is not None:
            worst = 0.0
            for p in grid:
                point = float(p[0]) if self.dim == 1 else p
                nearest = min(self.metric(self._buf[i], point) for i in range(m))
                worst = max(worst, nearest)
            return worst
        centers = self._buf[:m].reshape(m, self.dim)
        worst2 = 0.0
        for start in range(0, len(grid), 1024):
            diff = grid[start : start + 1024, None, :] - centers[None, :, :]
            d2 = np.einsum("gmd,gmd->gm", diff, diff)
            worst2 = max(worst2, float(d2.min(axis=1).max()))
        return math.sqrt(worst2)
