"""Run records: the per-step interface/height series and profile snapshots."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

SERIES_HEADER = "t,x_L,x_R,h_max"
SNAPSHOT_HEADER = "xi,h,x_phys"
CSV_FORMAT = "%.17g"


@dataclass
class Snapshot:
    step: int
    t: float
    xi: np.ndarray
    h: np.ndarray
    x_L: float
    x_R: float

    @property
    def x_f(self) -> float:
        return 0.5 * (self.x_R - self.x_L)

    @property
    def x_0(self) -> float:
        return 0.5 * (self.x_R + self.x_L)

    def x_phys(self) -> np.ndarray:
        return self.x_0 + self.xi * self.x_f


@dataclass
class TimeSeries:
    t: np.ndarray
    x_L: np.ndarray
    x_R: np.ndarray
    h_max: np.ndarray
    snapshots: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    stop_reason: str = ""
    final: Snapshot | None = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.x_L = np.asarray(self.x_L, dtype=float)
        self.x_R = np.asarray(self.x_R, dtype=float)
        self.h_max = np.asarray(self.h_max, dtype=float)
        n = self.t.size
        if not (self.x_L.size == self.x_R.size == self.h_max.size == n):
            raise ValueError("series columns must have equal length")
        if n > 1 and np.any(np.diff(self.t) <= 0):
            raise ValueError("series times must be strictly increasing")
        if np.any(self.x_R - self.x_L <= 0):
            raise ValueError("every record needs x_R > x_L")

    def __len__(self) -> int:
        return self.t.size

    @property
    def x_f(self) -> np.ndarray:
        return 0.5 * (self.x_R - self.x_L)

    @property
    def x_0(self) -> np.ndarray:
        return 0.5 * (self.x_R + self.x_L)

    def subset(self, mask) -> "TimeSeries":
        return TimeSeries(self.t[mask], self.x_L[mask], self.x_R[mask], self.h_max[mask], metadata=dict(self.metadata))

    @classmethod
    def from_arrays(cls, t, x_f, h_max, x_0=0.0, **kw) -> "TimeSeries":
        """Build a symmetric series from half-widths, e.g. for synthetic data."""
        x_f = np.asarray(x_f, dtype=float)
        x_0 = np.broadcast_to(np.asarray(x_0, dtype=float), x_f.shape)
        return cls(t, x_0 - x_f, x_0 + x_f, h_max, **kw)


def write_series(series: TimeSeries, path) -> None:
    data = np.column_stack([series.t, series.x_L, series.x_R, series.h_max])
    np.savetxt(path, data, fmt=CSV_FORMAT, delimiter=",", header=SERIES_HEADER, comments="")


def read_series(path) -> TimeSeries:
    with open(path) as fh:
        header = fh.readline().strip()
    if header != SERIES_HEADER:
        raise ValueError(f"{path}: expected header {SERIES_HEADER!r}, found {header!r}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 4:
        raise ValueError(f"{path}: expected 4 columns, found {data.shape[1]}")
    return TimeSeries(data[:, 0], data[:, 1], data[:, 2], data[:, 3])


def write_snapshot(snap: Snapshot, path) -> None:
    data = np.column_stack([snap.xi, snap.h, snap.x_phys()])
    np.savetxt(path, data, fmt=CSV_FORMAT, delimiter=",", header=SNAPSHOT_HEADER, comments="")


def write_run(series: TimeSeries, out_dir, run_id: str) -> list:
    """Write ``<run_id>_series.csv`` and one ``<run_id>_snap_<step>.csv`` per snapshot."""
    os.makedirs(out_dir, exist_ok=True)
    paths = [os.path.join(out_dir, f"{run_id}_series.csv")]
    write_series(series, paths[0])
    for snap in series.snapshots:
        p = os.path.join(out_dir, f"{run_id}_snap_{snap.step}.csv")
        write_snapshot(snap, p)
        paths.append(p)
    return paths
