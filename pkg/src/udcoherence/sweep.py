"""Parameter-space sweeps over (e_bar, t_bar), motion-minus-rest maps,
swelling regions and fixed-energy decoherence curves.

Cells are independent; rows are split into contiguous blocks, one block
per worker.  Every cell runs the same pure evaluator whatever the
partition, so the output does not depend on the worker count.
"""
from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from scipy import ndimage

from .qfield import (
    CoherenceError,
    Rest,
    Trajectory,
    coherence,
)

__all__ = [
    "Spacing", "GridSpec", "SweepGrid", "DiffGrid", "SwellingComponent",
    "SwellingReport", "DecoherenceCurve", "SweepError",
    "sweep_grid", "diff_grid", "swelling_regions", "decoherence_curve",
    "MAX_FLAGGED_FRACTION",
]

#: a sweep with more failed cells than this fraction is rejected
MAX_FLAGGED_FRACTION = 0.01


class SweepError(RuntimeError):
    """Too many cells failed; the partial grid is kept on ``grid``."""

    def __init__(self, message, grid=None):
        super().__init__(message)
        self.grid = grid


class Spacing(str, enum.Enum):
    LINEAR = "linear"
    LOG = "log"


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid; axis 0 is e_bar, axis 1 is t_bar."""

    e_bar_min: float = 0.1
    e_bar_max: float = 5.0
    t_bar_min: float = 0.1
    t_bar_max: float = 5.0
    n_e: int = 80
    n_t: int = 80
    spacing: Spacing = Spacing.LINEAR

    def __post_init__(self):
        object.__setattr__(self, "spacing", Spacing(self.spacing))
        for lo, hi, name in ((self.e_bar_min, self.e_bar_max, "e_bar"),
                             (self.t_bar_min, self.t_bar_max, "t_bar")):
            if not (0 < lo < hi and math.isfinite(hi)):
                raise ValueError(f"{name} bounds must satisfy 0 < min < max, got [{lo}, {hi}]")
        if int(self.n_e) < 2 or int(self.n_t) < 2:
            raise ValueError("grids need at least two points per axis")

    def _axis(self, lo, hi, n):
        if self.spacing is Spacing.LOG:
            return np.geomspace(lo, hi, n)
        return np.linspace(lo, hi, n)

    @property
    def e_axis(self) -> np.ndarray:
        return self._axis(self.e_bar_min, self.e_bar_max, self.n_e)

    @property
    def t_axis(self) -> np.ndarray:
        return self._axis(self.t_bar_min, self.t_bar_max, self.n_t)

    @property
    def shape(self):
        return (self.n_e, self.n_t)

    def to_dict(self):
        return {"e_bar_min": self.e_bar_min, "e_bar_max": self.e_bar_max,
                "t_bar_min": self.t_bar_min, "t_bar_max": self.t_bar_max,
                "n_e": self.n_e, "n_t": self.n_t, "spacing": self.spacing.value}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["e_bar_min"]), float(d["e_bar_max"]), float(d["t_bar_min"]),
                   float(d["t_bar_max"]), int(d["n_e"]), int(d["n_t"]), Spacing(d["spacing"]))


@dataclass
class SweepGrid:
    spec: GridSpec
    trajectory: Trajectory
    values: np.ndarray
    errors: np.ndarray
    flagged: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.flagged is None:
            self.flagged = np.zeros(self.spec.shape, dtype=bool)
        if self.values.shape != self.spec.shape or self.errors.shape != self.spec.shape:
            raise ValueError("grid arrays do not match the GridSpec shape")


@dataclass
class DiffGrid:
    """``minuend - subtrahend``, cell by cell, with summed error bounds."""

    spec: GridSpec
    minuend: str
    subtrahend: str
    values: np.ndarray
    errors: np.ndarray


@dataclass(frozen=True)
class SwellingComponent:
    cells: tuple            # ((i, j), ...) in row-major order
    i_range: tuple          # inclusive bounding box on the e_bar index
    j_range: tuple          # inclusive bounding box on the t_bar index
    e_bar_range: tuple
    t_bar_range: tuple
    peak: tuple             # (i, j, e_bar, t_bar, diff) of the largest difference

    def intersects(self, spec: GridSpec, e_bar_min=-math.inf, e_bar_max=math.inf,
                   t_bar_min=-math.inf, t_bar_max=math.inf) -> bool:
        """Whether any member cell lies in the open (e_bar, t_bar) box."""
        e_axis, t_axis = spec.e_axis, spec.t_axis
        for i, j in self.cells:
            e, t = e_axis[i], t_axis[j]
            if e_bar_min < e < e_bar_max and t_bar_min < t < t_bar_max:
                return True
        return False


@dataclass
class SwellingReport:
    spec: GridSpec
    threshold: float
    cells: list             # (i, j, e_bar, t_bar, diff)
    components: list        # SwellingComponent, in discovery order


@dataclass
class DecoherenceCurve:
    e_bar: float
    trajectories: list
    t_bar: np.ndarray
    values: np.ndarray       # shape (n, len(trajectories))
    errors: np.ndarray
    flagged: np.ndarray

    @property
    def tags(self):
        return [t.tag for t in self.trajectories]


# ---------------------------------------------------------------------------

def _evaluate_cells(traj, points, rel_tol):
    out = np.empty((len(points), 3))
    for k, (e, t) in enumerate(points):
        try:
            res = coherence(traj, e, t, rel_tol)
            out[k] = (res.c_over_g, res.err_estimate, 0.0)
        except CoherenceError as exc:
            out[k] = (exc.result.c_over_g, exc.result.err_estimate, 1.0)
    return out


def _run_blocks(traj, points, rel_tol, workers):
    n = len(points)
    workers = max(1, min(int(workers), n))
    bounds = np.linspace(0, n, workers + 1).astype(int)
    blocks = [points[lo:hi] for lo, hi in zip(bounds[:-1], bounds[1:])]
    if workers == 1:
        parts = [_evaluate_cells(traj, blocks[0], rel_tol)]
    else:
        parts = Parallel(n_jobs=workers)(
            delayed(_evaluate_cells)(traj, b, rel_tol) for b in blocks)
    return np.concatenate(parts)


def sweep_grid(traj: Trajectory, spec: GridSpec, rel_tol: float = 1e-5,
               workers: int = 1) -> SweepGrid:
    """Coherence on every cell of ``spec`` for a fixed trajectory."""
    e_axis, t_axis = spec.e_axis, spec.t_axis
    # row-major cell order; contiguous blocks are whole or partial rows
    points = [(float(e), float(t)) for e in e_axis for t in t_axis]
    start = time.perf_counter()
    out = _run_blocks(traj, points, rel_tol, workers)
    elapsed = time.perf_counter() - start
    values = out[:, 0].reshape(spec.shape)
    errors = out[:, 1].reshape(spec.shape)
    flagged = out[:, 2].reshape(spec.shape).astype(bool)
    grid = SweepGrid(spec, traj, values, errors, flagged,
                     meta={"rel_tol": rel_tol, "flagged": int(flagged.sum()),
                           "seconds": elapsed, "workers": workers})
    if flagged.mean() > MAX_FLAGGED_FRACTION:
        bad = [(float(e_axis[i]), float(t_axis[j])) for i, j in zip(*np.nonzero(flagged))]
        raise SweepError(
            f"{flagged.sum()} of {flagged.size} cells failed for {traj!r} "
            f"(first: {bad[:5]})", grid)
    return grid


def diff_grid(a: SweepGrid, b: SweepGrid) -> DiffGrid:
    if a.spec != b.spec:
        raise ValueError(f"grid specs differ: {a.spec} vs {b.spec}")
    return DiffGrid(a.spec, a.trajectory.tag, b.trajectory.tag,
                    a.values - b.values, a.errors + b.errors)


def swelling_regions(d: DiffGrid, threshold: float = 0.0) -> SwellingReport:
    """Cells where the difference exceeds ``threshold`` plus its own error
    bound, grouped into 4-connected components."""
    if not threshold >= 0:
        raise ValueError(f"threshold must be >= 0, got {threshold!r}")
    mask = d.values > threshold + d.errors
    labels, n = ndimage.label(mask)   # default structure is 4-connectivity
    e_axis, t_axis = d.spec.e_axis, d.spec.t_axis
    cells = [(int(i), int(j), float(e_axis[i]), float(t_axis[j]), float(d.values[i, j]))
             for i, j in zip(*np.nonzero(mask))]
    components = []
    for lab in range(1, n + 1):
        ii, jj = np.nonzero(labels == lab)
        vals = d.values[ii, jj]
        k = int(np.argmax(vals))
        pi, pj = int(ii[k]), int(jj[k])
        components.append(SwellingComponent(
            cells=tuple((int(i), int(j)) for i, j in zip(ii, jj)),
            i_range=(int(ii.min()), int(ii.max())),
            j_range=(int(jj.min()), int(jj.max())),
            e_bar_range=(float(e_axis[ii.min()]), float(e_axis[ii.max()])),
            t_bar_range=(float(t_axis[jj.min()]), float(t_axis[jj.max()])),
            peak=(pi, pj, float(e_axis[pi]), float(t_axis[pj]), float(d.values[pi, pj])),
        ))
    return SwellingReport(d.spec, float(threshold), cells, components)


def decoherence_curve(trajs, e_bar: float, t_bar_range=(0.05, 5.0), n: int = 100,
                      rel_tol: float = 1e-6, workers: int = 1) -> DecoherenceCurve:
    """C/g against t_bar at fixed e_bar, one column per trajectory."""
    if n < 2:
        raise ValueError("n must be >= 2")
    trajs = list(trajs) or [Rest()]
    t_axis = np.linspace(float(t_bar_range[0]), float(t_bar_range[1]), n)
    cols = []
    for traj in trajs:
        cols.append(_run_blocks(traj, [(float(e_bar), float(t)) for t in t_axis],
                                rel_tol, workers))
    stacked = np.stack(cols, axis=1)   # (n, ntraj, 3)
    return DecoherenceCurve(float(e_bar), trajs, t_axis, stacked[..., 0].copy(),
                            stacked[..., 1].copy(), stacked[..., 2].astype(bool))
