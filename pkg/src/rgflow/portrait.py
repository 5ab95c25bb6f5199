"""Flow portraits: one trajectory per point of a two-axis grid of initial couplings."""
from __future__ import annotations

import enum
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .errors import InvalidGrid, RGFlowError
from .integrate import StepControl, Termination, Trajectory, integrate
from .systems import (DEFAULT_CONFIG, EngineConfig, neq_denominator_fn, neq_field,
                      pt_field, pt_reduced_field)


class System(enum.Enum):
    NEQ = "neq"
    PT = "pt"
    PT_REDUCED = "pt-reduced"

    @property
    def variables(self):
        return ("j_par", "j_perp", "nu_f") if self is System.NEQ else ("k", "g_r", "g_i")


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid over two named axes; every other coordinate is frozen.

    Axis ``i`` takes ``counts[i]`` evenly spaced values on ``ranges[i]``
    (just the lower end when the count is 1). Cells are ordered row-major:
    the row index runs along ``axes[0]``.
    """

    axes: tuple
    ranges: tuple
    counts: tuple
    frozen: tuple = ()

    def __post_init__(self):
        frozen = self.frozen.items() if isinstance(self.frozen, Mapping) else self.frozen
        object.__setattr__(self, "axes", tuple(str(a) for a in self.axes))
        object.__setattr__(self, "ranges", tuple((float(lo), float(hi)) for lo, hi in self.ranges))
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        object.__setattr__(self, "frozen", tuple((str(k), float(v)) for k, v in frozen))
        if len(self.axes) != 2 or len(self.ranges) != 2 or len(self.counts) != 2:
            raise InvalidGrid("a grid needs exactly two axes")
        if self.axes[0] == self.axes[1]:
            raise InvalidGrid(f"duplicate axis {self.axes[0]!r}")
        for (lo, hi), n in zip(self.ranges, self.counts):
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise InvalidGrid(f"need lo < hi, got [{lo}, {hi}]")
            if n < 1:
                raise InvalidGrid(f"need at least one sample per axis, got {n}")
        clash = set(self.axes) & set(self.frozen_dict)
        if clash:
            raise InvalidGrid(f"axes also frozen: {sorted(clash)}")

    @property
    def frozen_dict(self) -> dict:
        return dict(self.frozen)

    @property
    def size(self) -> int:
        return self.counts[0] * self.counts[1]

    def axis_values(self, i: int) -> np.ndarray:
        (lo, hi), n = self.ranges[i], self.counts[i]
        return np.array([lo]) if n == 1 else np.linspace(lo, hi, n)

    def cells(self):
        """Yield ``(row, col, coords)`` in row-major order."""
        v0, v1 = self.axis_values(0), self.axis_values(1)
        base = self.frozen_dict
        for r, x in enumerate(v0):
            for c, y in enumerate(v1):
                coords = dict(base)
                coords[self.axes[0]] = float(x)
                coords[self.axes[1]] = float(y)
                yield r, c, coords

    def require(self, variables):
        """Check that axes plus frozen values cover exactly ``variables``."""
        given = set(self.axes) | set(self.frozen_dict)
        missing = [v for v in variables if v not in given]
        unknown = sorted(given - set(variables))
        if missing or unknown:
            raise InvalidGrid(f"grid must cover {variables}: missing {missing}, unknown {unknown}")

    @classmethod
    def parse(cls, grid: str, freeze: str = "") -> "GridSpec":
        """Build a grid from ``"k=0:4:21,g_r=0:0.5:21"`` and ``"g_i=0"`` strings."""
        axes, ranges, counts = [], [], []
        for item in filter(None, (s.strip() for s in grid.split(","))):
            try:
                name, spec = item.split("=")
                lo, hi, n = spec.split(":")
                axes.append(name.strip())
                ranges.append((float(lo), float(hi)))
                counts.append(int(n))
            except ValueError as exc:
                raise InvalidGrid(f"bad grid axis {item!r}; expected name=lo:hi:count") from exc
        frozen = []
        for item in filter(None, (s.strip() for s in freeze.split(","))):
            try:
                name, value = item.split("=")
                frozen.append((name.strip(), float(value)))
            except ValueError as exc:
                raise InvalidGrid(f"bad frozen value {item!r}; expected name=value") from exc
        return cls(tuple(axes), tuple(ranges), tuple(counts), tuple(frozen))

    def to_dict(self) -> dict:
        return {"axes": list(self.axes), "ranges": [list(r) for r in self.ranges],
                "counts": list(self.counts), "frozen": [[k, v] for k, v in self.frozen]}

    @classmethod
    def from_dict(cls, d) -> "GridSpec":
        return cls(tuple(d["axes"]), tuple(tuple(r) for r in d["ranges"]),
                   tuple(d["counts"]), tuple(tuple(p) for p in d["frozen"]))


@dataclass(frozen=True, eq=False)
class FlowPortrait:
    system: System
    grid: GridSpec
    trajectories: tuple
    ctrl: StepControl = StepControl()
    cfg: EngineConfig = DEFAULT_CONFIG

    def __post_init__(self):
        if len(self.trajectories) != self.grid.size:
            raise InvalidGrid(f"{len(self.trajectories)} trajectories for {self.grid.size} cells")

    def cell(self, row: int, col: int) -> Trajectory:
        return self.trajectories[row * self.grid.counts[1] + col]

    def terminations(self) -> np.ndarray:
        """Termination codes as an object array of shape ``grid.counts``."""
        out = np.empty(self.grid.counts, dtype=object)
        for i, t in enumerate(self.trajectories):
            out[divmod(i, self.grid.counts[1])] = t.termination
        return out


def run_cell(system: System, state, ctrl: StepControl = StepControl(),
             cfg: EngineConfig = DEFAULT_CONFIG) -> Trajectory:
    """Integrate one initial condition; states always have three columns."""
    system = System(system)
    state = np.asarray(state, dtype=float)
    try:
        if system is System.NEQ:
            return integrate(neq_field(cfg), state, ctrl, blowup_cap=cfg.blowup_cap,
                             guard=neq_denominator_fn(cfg))
        if system is System.PT:
            traj = integrate(pt_field(), state, ctrl, blowup_cap=cfg.blowup_cap)
            if state[1] == 0.0 and state[2] != 0.0:
                traj = _with(traj, note="invariant-untracked")
            return traj
        k, g_r, g_i = state
        tracked = g_r != 0.0
        inv = g_i / g_r if tracked else 0.0
        traj = integrate(pt_reduced_field(inv), [k, g_r], ctrl, blowup_cap=cfg.blowup_cap)
        third = inv * traj.states[:, 1] if tracked else np.full(len(traj), g_i)
        states = np.column_stack([traj.states, third])
        note = "" if tracked or g_i == 0.0 else "invariant-untracked"
        return _with(traj, states=states, note=note)
    except RGFlowError:
        # a cell that cannot even start is reported, never raised
        return Trajectory(np.array([0.0]), state.reshape(1, -1),
                          Termination.SINGULAR_DENOMINATOR, note="invalid-initial-state")


def _with(traj: Trajectory, **changes) -> Trajectory:
    fields = dict(l=traj.l, states=traj.states, termination=traj.termination,
                  event_l=traj.event_l, event_bracket=traj.event_bracket,
                  event_index=traj.event_index, note=traj.note)
    fields.update(changes)
    return Trajectory(**fields)


def resolve_workers(workers: Optional[int] = None) -> int:
    """Worker count: explicit value, else ``RGFLOW_THREADS``, else all cores."""
    if workers is None:
        env = os.environ.get("RGFLOW_THREADS", "").strip()
        workers = int(env) if env else (os.cpu_count() or 1)
    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")
    return workers


def _run_packed(args):
    return run_cell(*args)


def flow_portrait(system, grid: GridSpec, ctrl: StepControl = StepControl(),
                  cfg: EngineConfig = DEFAULT_CONFIG,
                  workers: Optional[int] = None) -> FlowPortrait:
    """Integrate every grid cell of ``system``.

    Cells are independent, so they may run in worker processes; results
    are always collected in row-major grid order, so the output does not
    depend on ``workers``.
    """
    system = System(system)
    grid.require(system.variables)
    jobs = [(system, tuple(coords[v] for v in system.variables), ctrl, cfg)
            for _, _, coords in grid.cells()]
    n = min(resolve_workers(workers), len(jobs))
    if n <= 1:
        trajectories = [_run_packed(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            trajectories = list(pool.map(_run_packed, jobs, chunksize=max(1, len(jobs) // (4 * n))))
    return FlowPortrait(system, grid, tuple(trajectories), ctrl, cfg)
