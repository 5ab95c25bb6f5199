"""CSV, JSON and SVG serialization of flow portraits and spectrum scans.

CSV and JSON are the contractual formats: comma separated, ``.`` decimal,
LF line endings, a header row, floats written with 17 significant digits
(JSON uses the shortest exact repr). Byte output depends only on the data.
SVG is a preview and may carry a timestamp comment.
"""
from __future__ import annotations

import datetime as _dt
import io
import json
import os
import tempfile

import numpy as np

from .integrate import StepControl, Termination, Trajectory
from .portrait import FlowPortrait, GridSpec, System
from .systems import EngineConfig

PORTRAIT_HEADER = ("cell_row", "cell_col", "l", "var1", "var2", "var3", "termination")
LOCUS_HEADER = ("axis1", "axis2", "gap")
ROOTS_HEADER = ("g_root", "g_r", "g_i")
FORMAT_TAG = "rgflow-portrait"


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write(path, data) -> None:
    """Write ``data`` (str or bytes) to ``path`` through a temp file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".rgflow-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data.encode("utf-8") if isinstance(data, str) else data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header, rows) -> str:
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# portraits

def portrait_csv(portrait: FlowPortrait) -> str:
    ncol = portrait.grid.counts[1]

    def rows():
        for i, traj in enumerate(portrait.trajectories):
            r, c = divmod(i, ncol)
            code = traj.termination.value
            for l, state in zip(traj.l, traj.states):
                yield (str(r), str(c), fmt(l), fmt(state[0]), fmt(state[1]), fmt(state[2]), code)

    return _csv(PORTRAIT_HEADER, rows())


def portrait_to_dict(portrait: FlowPortrait) -> dict:
    ncol = portrait.grid.counts[1]
    trajectories = []
    for i, traj in enumerate(portrait.trajectories):
        r, c = divmod(i, ncol)
        trajectories.append({
            "row": r, "col": c,
            "termination": traj.termination.value,
            "event_l": traj.event_l,
            "event_bracket": list(traj.event_bracket) if traj.event_bracket else None,
            "note": traj.note,
            "l": [float(v) for v in traj.l],
            "states": [[float(v) for v in s] for s in traj.states],
        })
    return {
        "format": FORMAT_TAG,
        "version": 1,
        "system": portrait.system.value,
        "variables": list(portrait.system.variables),
        "grid": portrait.grid.to_dict(),
        "ctrl": vars(portrait.ctrl).copy(),
        "config": vars(portrait.cfg).copy(),
        "trajectories": trajectories,
    }


def portrait_json(portrait: FlowPortrait) -> str:
    return json.dumps(portrait_to_dict(portrait), indent=1, sort_keys=True) + "\n"


def portrait_from_dict(d: dict) -> FlowPortrait:
    if d.get("format") != FORMAT_TAG:
        raise ValueError("not an rgflow portrait document")
    trajectories = []
    for t in d["trajectories"]:
        states = np.array(t["states"], dtype=float).reshape(len(t["l"]), -1)
        trajectories.append(Trajectory(
            np.array(t["l"], dtype=float), states, Termination(t["termination"]),
            event_l=t.get("event_l"),
            event_bracket=tuple(t["event_bracket"]) if t.get("event_bracket") else None,
            note=t.get("note", "")))
    return FlowPortrait(System(d["system"]), GridSpec.from_dict(d["grid"]), tuple(trajectories),
                        StepControl(**d["ctrl"]), EngineConfig(**d["config"]))


def read_portrait_json(path) -> FlowPortrait:
    with open(path, encoding="utf-8") as fh:
        return portrait_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# spectrum outputs

def locus_csv(points) -> str:
    return _csv(LOCUS_HEADER, ((fmt(p.axis1), fmt(p.axis2), fmt(p.gap)) for p in points))


def roots_csv(roots) -> str:
    rows = []
    for root in roots:
        for g_r, g_i in root.points:
            rows.append((fmt(root.g), fmt(g_r), fmt(g_i)))
    return _csv(ROOTS_HEADER, rows)


# ---------------------------------------------------------------------------
# SVG preview

_COLORS = {
    Termination.REACHED_L_MAX: "#1f77b4",
    Termination.BLOWUP: "#d62728",
    Termination.SINGULAR_DENOMINATOR: "#9467bd",
    Termination.STEP_UNDERFLOW: "#7f7f7f",
    Termination.EVENT_HIT: "#2ca02c",
}


def overlay_lines(portrait: FlowPortrait, c: float = 0.0):
    """Separatrix segments ``[(x0, y0), (x1, y1)]`` in grid-axis coordinates."""
    axes = portrait.grid.axes
    (x_lo, x_hi), (y_lo, y_hi) = portrait.grid.ranges
    lines = []
    if set(axes) == {"j_par", "j_perp"}:
        # j_par = -j_perp + c
        if axes[0] == "j_par":
            lines.append([(-y_lo + c, y_lo), (-y_hi + c, y_hi)])
        else:
            lines.append([(x_lo, -x_lo + c), (x_hi, -x_hi + c)])
    elif set(axes) == {"k", "g_r"}:
        # linearized KT separatrix K - 2 = 2 g_r through (2, 0)
        g = np.linspace(0.0, max(abs(y_lo), abs(y_hi)) if axes[0] == "k" else max(abs(x_lo), abs(x_hi)), 2)
        pts = [(2.0 + 2.0 * v, v) if axes[0] == "k" else (v, 2.0 + 2.0 * v) for v in g]
        lines.append(pts)
    return lines


def portrait_svg(portrait: FlowPortrait, overlay: bool = False, meta: bool = True,
                 size: int = 600, c: float = 0.0) -> str:
    grid = portrait.grid
    var_index = {v: i for i, v in enumerate(portrait.system.variables)}
    ix, iy = var_index[grid.axes[0]], var_index[grid.axes[1]]
    (x_lo, x_hi), (y_lo, y_hi) = grid.ranges
    pad = 40

    def px(x, y):
        u = pad + (x - x_lo) / (x_hi - x_lo) * (size - 2 * pad)
        v = size - pad - (y - y_lo) / (y_hi - y_lo) * (size - 2 * pad)
        return min(max(u, 0.0), size), min(max(v, 0.0), size)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">']
    if meta:
        stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        out.append(f"<!-- rgflow {portrait.system.value} portrait, generated {stamp} -->")
    out.append(f'<rect x="{pad}" y="{pad}" width="{size - 2 * pad}" height="{size - 2 * pad}" '
               'fill="none" stroke="black"/>')
    out.append(f'<text x="{size / 2:.0f}" y="{size - 8}" text-anchor="middle" '
               f'font-size="14">{grid.axes[0]}</text>')
    out.append(f'<text x="12" y="{size / 2:.0f}" font-size="14" '
               f'transform="rotate(-90 12 {size / 2:.0f})">{grid.axes[1]}</text>')
    for traj in portrait.trajectories:
        pts = " ".join("%.2f,%.2f" % px(s[ix], s[iy]) for s in traj.states)
        color = _COLORS[traj.termination]
        if len(traj) == 1:
            x, y = px(traj.states[0][ix], traj.states[0][iy])
            out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="1.5" fill="{color}"/>')
        else:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="0.8" points="{pts}"/>')
    if overlay:
        for line in overlay_lines(portrait, c):
            pts = " ".join("%.2f,%.2f" % px(x, y) for x, y in line)
            out.append(f'<polyline class="separatrix" fill="none" stroke="black" '
                       f'stroke-width="2" points="{pts}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
