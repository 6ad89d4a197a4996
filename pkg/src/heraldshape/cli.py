"""Command-line interface.

Times on the command line are in units of ``t_c`` unless ``--unit`` is
given; ``--unit ns --tc 7`` means every time flag is in ns, ``t_c`` is 7 ns,
rates are per ns and output time columns are written in ns.

Exit codes: 0 success, 2 configuration error, 3 resolution or containment
error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path
from typing import Sequence

from .errors import (ConfigError, InvalidArgument, NoHeraldError, ResolutionError,
                     ShapingError)
from .figures import FIGURES, reproduce_figure
from .heralding import RegimeParams, validate_regime
from .io import Units
from .scenario import (AtomSpec, FilterSpec, GridSpec, Imperfections, OutputSpec,
                       PairModelSpec, ScenarioConfig, UnitsSpec, format_report,
                       load_config, run_scenario)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOLUTION = 3


class _Scale:
    """Converts flag values from the chosen unit to units of ``t_c``."""

    def __init__(self, args: argparse.Namespace):
        self.label = args.unit or "t_c"
        self.tc = args.tc
        if not self.tc > 0:
            raise ConfigError(f"--tc must be positive, got {self.tc}")

    def time(self, v):
        return None if v is None else v / self.tc

    def rate(self, v):
        return None if v is None else v * self.tc

    def units(self) -> UnitsSpec:
        return UnitsSpec(self.label, self.tc)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--unit", default=None, help="physical time unit label, e.g. ns")
    p.add_argument("--tc", type=float, default=1.0,
                   help="correlation time t_c in --unit (default 1)")


def _model_flags(p: argparse.ArgumentParser, herald: bool = True) -> None:
    p.add_argument("--model", choices=["window", "cw", "ideal"], default="window")
    p.add_argument("--tu", type=float, default=None, help="window length t_u")
    p.add_argument("--tm", type=float, default=None, help="filter response time t_m")
    p.add_argument("--pair-rate", type=float, default=None, help="pair rate n (cw model)")
    p.add_argument("--tcoh", type=float, default=None, help="pump coherence time")
    p.add_argument("--filter-table", default=None, help="tabulated filter file")
    p.add_argument("--filter-drift", type=float, default=0.0, help="filter centre offset")
    p.add_argument("--step", type=float, default=None, help="grid step override")
    p.add_argument("--td", type=float, default=0.0, help="detector jitter width")
    p.add_argument("--drift", type=float, default=0.0, help="extra filter drift")
    if herald:
        p.add_argument("--herald", type=float, action="append", default=None,
                       help="herald instant (repeatable)")


def _output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heraldshape",
        description="Heralded single-photon shaping by nonlocal spectral filtering.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shape", help="heralded signal shapes for a pair model and filter")
    _common(p)
    _model_flags(p)
    _output_flags(p)

    p = sub.add_parser("herald-prob", help="heralding probability, exact and estimated")
    _common(p)
    _model_flags(p, herald=False)

    p = sub.add_parser("g2", help="signal / filtered-idler cross-correlation (cw model)")
    _common(p)
    p.add_argument("--tm", type=float, required=True)
    p.add_argument("--pair-rate", type=float, required=True)
    _output_flags(p)

    p = sub.add_parser("atom", help="two-level atom excitation by a heralded shape")
    _common(p)
    _model_flags(p)
    p.add_argument("--lifetime", type=float, default=None,
                   help="atomic intensity lifetime (default: matched to t_m)")
    _output_flags(p)

    p = sub.add_parser("validate", help="regime-condition report")
    _common(p)
    p.add_argument("--tm", type=float, required=True)
    p.add_argument("--tu", type=float, default=None)
    p.add_argument("--td", type=float, default=None)
    p.add_argument("--drift", type=float, default=None)
    p.add_argument("--pair-rate", type=float, default=None)
    p.add_argument("--tcoh", type=float, default=None)
    p.add_argument("--json", action="store_true", help="print JSON instead of a table")

    p = sub.add_parser("figure", help="write a figure dataset")
    _common(p)
    p.add_argument("id", choices=list(FIGURES) + ["all"])
    _output_flags(p)

    p = sub.add_parser("run", help="run a JSON scenario file")
    p.add_argument("config", help="scenario file")
    p.add_argument("--out", default=None, help="override output.directory")
    return parser


def _config_from_args(args: argparse.Namespace, with_atom: bool = False) -> ScenarioConfig:
    sc = _Scale(args)
    if args.tm is None and args.filter_table is None:
        raise ConfigError("give --tm (Lorentzian filter) or --filter-table")
    pair = PairModelSpec(type=args.model, t_c=1.0, t_u=sc.time(args.tu),
                         pair_rate=sc.rate(args.pair_rate), t_coh=sc.time(args.tcoh))
    if args.model == "window" and pair.t_u is None:
        raise ConfigError("--model window needs --tu")
    if args.model == "cw" and pair.pair_rate is None:
        pair.pair_rate = 0.0
    filt = FilterSpec(type="tabulated" if args.filter_table else "lorentzian",
                      t_m=sc.time(args.tm), drift=sc.rate(args.filter_drift),
                      path=args.filter_table)
    atom = None
    if with_atom:
        atom = AtomSpec(sc.time(args.lifetime))
    heralds = getattr(args, "herald", None)
    return ScenarioConfig(
        pair_model=pair, filter=filt,
        herald_instants=None if heralds is None else [sc.time(h) for h in heralds],
        atom=atom, grid=GridSpec(step=sc.time(args.step)),
        imperfections=Imperfections(sc.time(args.td), sc.rate(args.drift)),
        output=OutputSpec(getattr(args, "out", "out"), getattr(args, "format", "csv")),
        units=sc.units())


def _cmd_scenario(args, with_atom: bool) -> int:
    cfg = _config_from_args(args, with_atom=with_atom)
    report = run_scenario(cfg)
    print(format_report(report))
    print(f"wrote {', '.join(report['files'])} to {cfg.output.directory}")
    return EXIT_OK


def _cmd_herald_prob(args) -> int:
    from .heralding import (cw_heralding_asymptotic, cw_heralding_probability,
                            heralding_probability, heralding_probability_estimate)
    from .scenario import build_filter
    from .sources import FiniteWindowExponential, default_window_grid, joint_amplitude

    cfg = _config_from_args(args)
    pm, t_m = cfg.pair_model, cfg.filter.t_m
    out: dict = {}
    if pm.type == "cw":
        if t_m is None:
            raise ConfigError("the cw closed form needs --tm")
        out["exact"] = cw_heralding_probability(pm.t_c, t_m)
        out["asymptotic"] = cw_heralding_asymptotic(pm.t_c, t_m)
    elif pm.type == "window":
        model = FiniteWindowExponential(pm.t_c, pm.t_u)
        step = cfg.grid.step or (min(pm.t_c / 8, t_m / 16) if t_m else None)
        joint = joint_amplitude(model, default_window_grid(model, step))
        out["exact"] = heralding_probability(joint, build_filter(cfg.filter, cfg.imperfections.drift))
    else:
        raise ConfigError("herald-prob supports the window and cw models")
    if t_m is not None:
        out["estimate"] = heralding_probability_estimate(1.0 / t_m, 1.0 / pm.t_c)
    for k, v in out.items():
        print(f"{k}: {v:.6g}")
    return EXIT_OK


def _cmd_g2(args) -> int:
    import numpy as np

    from .heralding import g2_cross
    from .io import write_table
    sc = _Scale(args)
    t_m, n = sc.time(args.tm), sc.rate(args.pair_rate)
    dt = np.linspace(-20 * t_m, 20 * t_m, 4001)
    g2 = g2_cross(dt, 0.0, n, 1.0, t_m)
    path = write_table(Path(args.out) / "g2", ["dt", "g2"],
                       [Units(sc.label, sc.tc).time(dt), g2], args.format)
    k = int(np.argmax(g2))
    print(f"g2 at zero delay: {float(g2_cross(0.0, 0.0, n, 1.0, t_m)):.6g}")
    print(f"g2 maximum: {g2[k]:.6g} at dt={dt[k] * sc.tc:g}")
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    sc = _Scale(args)
    params = RegimeParams(t_m=sc.time(args.tm), t_c=1.0, t_u=sc.time(args.tu),
                          t_d=sc.time(args.td), drift=sc.rate(args.drift),
                          pair_rate=sc.rate(args.pair_rate), t_coh=sc.time(args.tcoh))
    checks = validate_regime(params)
    if args.json:
        print(json.dumps([{"condition": c.condition, "margin": c.margin,
                           "satisfied": c.satisfied, "level": c.level} for c in checks], indent=2))
    else:
        for c in checks:
            if not c.satisfied:
                print(f"WARNING: regime violation: {c.condition} (ratio {c.margin:.3g} > 0.2)")
        for c in checks:
            print(f"{c.condition:<16} ratio {c.margin:<10.4g} {c.level}")
    return EXIT_OK


def _cmd_figure(args) -> int:
    units = Units(args.unit or "t_c", args.tc)
    ids = FIGURES if args.id == "all" else (args.id,)
    for fig in ids:
        print(f"wrote {reproduce_figure(fig, args.out, args.format, units)}")
    return EXIT_OK


def _cmd_run(args) -> int:
    path = Path(args.config)
    cfg = load_config(path)
    if args.out is not None:
        cfg.output.directory = args.out
    report = run_scenario(cfg, base_dir=path.resolve().parent)
    print(format_report(report))
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "shape": lambda a: _cmd_scenario(a, with_atom=False),
        "atom": lambda a: _cmd_scenario(a, with_atom=True),
        "herald-prob": _cmd_herald_prob,
        "g2": _cmd_g2,
        "validate": _cmd_validate,
        "figure": _cmd_figure,
        "run": _cmd_run,
    }
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return handlers[args.command](args)
    except (ConfigError, InvalidArgument, NoHeraldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResolutionError as exc:
        print(f"resolution error: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except ShapingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
