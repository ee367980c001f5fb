"""Scalar cadlag trajectories sampled on a finite time grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ScalarTrajectory"]


@dataclass(frozen=True)
class ScalarTrajectory:
    """A real-valued process known at finitely many times.

    Values are exact at the stored times; between them the trajectory is
    read with the cadlag step convention (last stored value carries over).
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape:
            raise ValueError("times and values must have equal length")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def values_at(self, t, left: bool = False) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        side = "left" if left else "right"
        idx = np.searchsorted(self.times, t, side=side) - 1
        return self.values[np.clip(idx, 0, len(self.times) - 1)]

    def value(self, t: float) -> float:
        return float(self.values_at(np.array([t]))[0])

    def left_value(self, t: float) -> float:
        return float(self.values_at(np.array([t]), left=True)[0])

    def stop(self, tau: float) -> "ScalarTrajectory":
        """Freeze the trajectory after tau (t -> value at t wedge tau)."""
        frozen = self.value(tau)
        return ScalarTrajectory(
            self.times, np.where(self.times <= tau, self.values, frozen)
        )

    def __add__(self, other: "ScalarTrajectory") -> "ScalarTrajectory":
        self._check_grid(other)
        return ScalarTrajectory(self.times, self.values + other.values)

    def __sub__(self, other: "ScalarTrajectory") -> "ScalarTrajectory":
        self._check_grid(other)
        return ScalarTrajectory(self.times, self.values - other.values)

    def __mul__(self, a: float) -> "ScalarTrajectory":
        return ScalarTrajectory(self.times, self.values * float(a))

    __rmul__ = __mul__

    def _check_grid(self, other: "ScalarTrajectory") -> None:
        if len(self.times) != len(other.times) or not np.array_equal(
            self.times, other.times
        ):
            raise ValueError("trajectories live on different grids")

    def sup_abs(self, upto: float | None = None) -> float:
        if upto is None:
            return float(np.max(np.abs(self.values)))
        mask = self.times <= upto
        return float(np.max(np.abs(self.values[mask])))
