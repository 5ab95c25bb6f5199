"""``rgflow`` command line: ``flow``, ``verify``, ``spectrum`` and ``ei``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 I/O error.

Any long option can also come from a ``--config`` file of ``key = value``
lines (``#`` starts a comment, dashes and underscores are interchangeable);
options given on the command line win.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Optional

from .errors import RGFlowError
from .integrate import StepControl
from .portrait import GridSpec, System, flow_portrait, resolve_workers
from .portrait_io import (atomic_write, locus_csv, portrait_csv, portrait_json, portrait_svg,
                          read_portrait_json, roots_csv)
from .special import ei
from .spectra import PTSelfEnergyParams, degeneracy_locus, pt_separatrix, sigma_pt
from .systems import EngineConfig
from .verification import GROUPS, run_checks

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
FORMATS = ("csv", "json", "svg")


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def read_config_file(path) -> dict:
    """Parse a flat ``key = value`` file."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _merge_config(args, parser) -> argparse.Namespace:
    """Fill options the user left unset from the config file, then from defaults."""
    file_values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for key, raw in file_values.items():
        if not hasattr(args, key):
            raise ConfigError(f"unknown config key {key!r}")
        if getattr(args, key) is not None:
            continue
        action = next((a for a in parser._actions if a.dest == key), None)
        if action is not None and action.nargs == 0:
            value = raw.lower() in ("1", "true", "yes", "on")
        elif action is not None and action.type is not None:
            try:
                value = action.type(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
        else:
            value = raw
        if action is not None and action.choices is not None and value not in action.choices:
            raise ConfigError(f"bad value for {key}: {raw!r}")
        setattr(args, key, value)
    for key, default in getattr(parser, "late_defaults", {}).items():
        if getattr(args, key) is None:
            setattr(args, key, default)
    return args


@dataclass
class RunConfig:
    system: System
    grid: GridSpec
    ctrl: StepControl
    engine: EngineConfig
    out: str
    formats: tuple
    overlay: bool = False
    overlay_c: float = 0.0
    meta: bool = True
    workers: Optional[int] = None
    from_json: Optional[str] = None


def _ctrl(args) -> StepControl:
    return StepControl(rel_tol=args.rel_tol, abs_tol=args.abs_tol, h_init=args.h_init,
                       h_min=args.h_min, l_max=args.l_max)


def _formats(spec: str) -> tuple:
    formats = tuple(f.strip() for f in spec.split(",") if f.strip())
    if not formats or any(f not in FORMATS for f in formats):
        raise ConfigError(f"formats must be a non-empty subset of {FORMATS}, got {spec!r}")
    return formats


def _add_ctrl_options(p):
    p.add_argument("--rel-tol", type=float)
    p.add_argument("--abs-tol", type=float)
    p.add_argument("--h-init", type=float)
    p.add_argument("--h-min", type=float)
    p.add_argument("--l-max", type=float)
    p.late_defaults.update(rel_tol=1e-10, abs_tol=1e-12, h_init=1e-3, h_min=1e-12, l_max=10.0)


def build_parser():
    parser = _Parser(prog="rgflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("flow", help="integrate a flow portrait")
    p.late_defaults = {}
    p.add_argument("--config")
    p.add_argument("--system", choices=[s.value for s in System])
    p.add_argument("--grid", help="two axes, e.g. k=0:4:21,g_r=0:0.5:21")
    p.add_argument("--freeze", help="remaining coordinates, e.g. g_i=0")
    _add_ctrl_options(p)
    p.add_argument("--hbar", type=float)
    p.add_argument("--eps-sing", type=float)
    p.add_argument("--blowup-cap", type=float)
    p.add_argument("--out", help="output path prefix")
    p.add_argument("--format", dest="format", help="comma list of csv,json,svg")
    p.add_argument("--overlay", choices=["separatrix"])
    p.add_argument("--overlay-c", type=float)
    p.add_argument("--no-meta", action="store_const", const=True, default=None)
    p.add_argument("--from-json", help="re-serialize a saved JSON portrait instead of integrating")
    p.late_defaults.update(freeze="", hbar=1.0, eps_sing=1e-8, blowup_cap=1e6, out="portrait",
                           format="csv,json", overlay_c=0.0, no_meta=False)

    p = sub.add_parser("verify", help="run the invariant/residual/Ei/degeneracy checks")
    p.late_defaults = {}
    p.add_argument("--config")
    p.add_argument("--only", help=f"comma list from {','.join(GROUPS)}")
    _add_ctrl_options(p)

    p = sub.add_parser("spectrum", help="degeneracy locus scan or PT separatrix roots")
    p.late_defaults = {}
    p.add_argument("--config")
    p.add_argument("--pt", action="store_const", const=True, default=None)
    p.add_argument("--inv", type=float)
    p.add_argument("--c1", type=float)
    p.add_argument("--f-qw", type=float)
    p.add_argument("--bracket", action="append", help="g_lo:g_hi, may repeat")
    p.add_argument("--scan", help="two axes over jt_par, jt_perp, j_par, nu_f, weight")
    p.add_argument("--freeze")
    p.add_argument("--tol", type=float)
    p.add_argument("--out")
    p.late_defaults.update(pt=False, f_qw=1.0, freeze="", tol=1e-6)

    p = sub.add_parser("ei", help="print Ei(x) with 17 significant digits")
    p.late_defaults = {}
    p.add_argument("x", type=float)
    return parser


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


# ---------------------------------------------------------------------------
# commands

def flow_config(args) -> RunConfig:
    if args.from_json:
        return RunConfig(System.PT, None, None, None, args.out, _formats(args.format),
                         overlay=args.overlay == "separatrix", overlay_c=args.overlay_c,
                         meta=not args.no_meta, from_json=args.from_json)
    if not args.system:
        raise ConfigError("--system is required")
    if not args.grid:
        raise ConfigError("--grid is required and must name two axes")
    return RunConfig(System(args.system), GridSpec.parse(args.grid, args.freeze), _ctrl(args),
                     EngineConfig(args.hbar, args.eps_sing, args.blowup_cap), args.out,
                     _formats(args.format), overlay=args.overlay == "separatrix",
                     overlay_c=args.overlay_c, meta=not args.no_meta)


def cmd_flow(cfg: RunConfig) -> int:
    if cfg.from_json:
        portrait = read_portrait_json(cfg.from_json)
    else:
        portrait = flow_portrait(cfg.system, cfg.grid, cfg.ctrl, cfg.engine, cfg.workers)
    writers = {
        "csv": lambda: portrait_csv(portrait),
        "json": lambda: portrait_json(portrait),
        "svg": lambda: portrait_svg(portrait, overlay=cfg.overlay, meta=cfg.meta, c=cfg.overlay_c),
    }
    for fmt in cfg.formats:
        atomic_write(f"{cfg.out}.{fmt}", writers[fmt]())
    counts = {}
    for t in portrait.trajectories:
        counts[t.termination.value] = counts.get(t.termination.value, 0) + 1
    summary = ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    print(f"{len(portrait.trajectories)} trajectories ({summary})")
    return EXIT_OK


def cmd_verify(args) -> int:
    only = [s.strip() for s in args.only.split(",")] if args.only else None
    try:
        results = run_checks(only, _ctrl(args))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.group:<10} {r.name:<{width}}  {r.detail}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def _parse_bracket(text: str):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"bad bracket {text!r}; expected g_lo:g_hi") from exc
    return lo, hi


def cmd_spectrum(args) -> int:
    if args.pt:
        if args.inv is None or args.c1 is None or not args.bracket:
            raise ConfigError("--pt needs --inv, --c1 and at least one --bracket")
        roots = []
        for text in args.bracket:
            lo, hi = _parse_bracket(text)
            root = pt_separatrix(args.inv, args.c1, (lo, hi))
            if root is None:
                print(f"bracket {text}: no root")
                continue
            roots.append(root)
            sides = []
            for g in (root.g * (1 - 1e-6), root.g * (1 + 1e-6)):
                sides.append(sigma_pt(PTSelfEnergyParams(g, args.inv, args.c1, args.f_qw)).phase.value)
            print(f"bracket {text}: g_root={root.g:.17g} phase below={sides[0]} above={sides[1]}")
        if args.out:
            atomic_write(args.out, roots_csv(roots))
        return EXIT_OK
    if not args.scan:
        raise ConfigError("spectrum needs either --pt or --scan")
    grid = GridSpec.parse(args.scan, args.freeze)
    points = degeneracy_locus(grid, args.tol)
    print(f"{len(points)} locus points with gap <= {args.tol:g}")
    if args.out:
        atomic_write(args.out, locus_csv(points))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        sub = _subparser(parser, args.command)
        args = _merge_config(args, sub)
        if args.command == "ei":
            print(format(ei(args.x), ".17g"))
            return EXIT_OK
        if args.command == "flow":
            cfg = flow_config(args)
            cfg.workers = resolve_workers()
            return cmd_flow(cfg)
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_spectrum(args)
    except (ConfigError, RGFlowError, ValueError) as exc:
        print(f"rgflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"rgflow: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
