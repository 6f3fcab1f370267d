"""State containers: field + time-derivative samples at one instant.

States are immutable snapshots (arrays are copied and frozen) and can be
shared freely across threads.  Trajectories bundle a grid with a list of
snapshots and know how to dump themselves as CSV.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .grid import RadialGrid

__all__ = ["PhysicalState", "SimilarityState", "PhysicalTrajectory", "SimilarityTrajectory"]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PhysicalState:
    """(u, du/dt) samples at physical time t on a radial grid over [0, R_dom]."""

    t: float
    u: np.ndarray
    ut: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", _frozen(self.u))
        object.__setattr__(self, "ut", _frozen(self.ut))
        if self.u.shape != self.ut.shape:
            raise ValueError("u and ut must have the same shape")

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.ut)))

    @property
    def amplitude(self) -> float:
        return float(np.max(np.abs(self.u)))


@dataclass(frozen=True, eq=False)
class SimilarityState:
    """(w, dw/ds) samples at similarity time s on the unit-ball grid."""

    s: float
    w: np.ndarray
    ws: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", _frozen(self.w))
        object.__setattr__(self, "ws", _frozen(self.ws))
        if self.w.shape != self.ws.shape:
            raise ValueError("w and ws must have the same shape")

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.w)) and np.all(np.isfinite(self.ws)))

    @property
    def amplitude(self) -> float:
        return float(np.max(np.abs(self.w)))


@dataclass
class PhysicalTrajectory:
    grid: RadialGrid
    states: List[PhysicalState] = field(default_factory=list)
    blowup_signalled: bool = False

    @property
    def times(self) -> np.ndarray:
        return np.array([st.t for st in self.states])

    def write_csv(self, path, stride: int = 1) -> None:
        from .io import write_csv

        rows = []
        for st in self.states[::stride]:
            for j, r in enumerate(self.grid.r):
                rows.append((st.t, r, st.u[j], st.ut[j]))
        write_csv(path, ("t", "r", "u", "ut"), rows)


@dataclass
class SimilarityTrajectory:
    grid: RadialGrid
    states: List[SimilarityState] = field(default_factory=list)
    blowup_signalled: bool = False

    @property
    def times(self) -> np.ndarray:
        return np.array([st.s for st in self.states])

    def write_csv(self, path, stride: int = 1) -> None:
        from .io import write_csv

        rows = []
        for st in self.states[::stride]:
            for j, r in enumerate(self.grid.r):
                rows.append((st.s, r, st.w[j], st.ws[j]))
        write_csv(path, ("s", "r", "w", "ws"), rows)
