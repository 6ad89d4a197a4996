"""Scenario configuration and the end-to-end scenario runner.

A scenario is a JSON document::

    {
      "pair_model": {"type": "window", "t_c": 1, "t_u": 150},
      "filter": {"type": "lorentzian", "t_m": 10},
      "herald_instants": [75, 100],
      "atom": {"lifetime": 10},
      "grid": {"step": 0.125},
      "imperfections": {"t_d": 0.0, "drift": 0.0},
      "output": {"directory": "out", "format": "csv"},
      "units": {"label": "ns", "scale": 7}
    }

Times are in units of ``t_c`` unless ``units`` attaches a physical scale to
the outputs.  See README.md for every key.
"""

from __future__ import annotations

import json
import math
import re
import warnings
from dataclasses import MISSING, dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import atom as atom_mod
from .errors import ConfigError, InvalidArgument
from .filters import Lorentzian, SpectralFilter, drifted, load_tabulated, lorentzian
from .heralding import (RegimeParams, apply_detector_jitter, apply_filter,
                        conditional_shape, cw_conditional_shape, cw_heralding_asymptotic,
                        cw_heralding_probability, g2_cross, heralding_probability,
                        heralding_probability_estimate, validate_regime)
from .io import FORMATS, Units, write_atomic, write_json, write_table
from .numerics import ComplexEnvelope, Grid, grid_with_step
from .sources import (FiniteWindowExponential, StationaryCW, default_window_grid,
                      ideal_joint_amplitude, joint_amplitude)


@dataclass
class PairModelSpec:
    type: str
    t_c: float = 1.0
    t_u: Optional[float] = None
    pair_rate: Optional[float] = None
    t_coh: Optional[float] = None


@dataclass
class FilterSpec:
    type: str = "lorentzian"
    t_m: Optional[float] = None
    drift: float = 0.0
    path: Optional[str] = None


@dataclass
class AtomSpec:
    lifetime: Optional[float] = None


@dataclass
class GridSpec:
    step: Optional[float] = None
    half_span: Optional[float] = None


@dataclass
class Imperfections:
    t_d: float = 0.0
    drift: float = 0.0


@dataclass
class OutputSpec:
    directory: str = "out"
    format: str = "csv"


@dataclass
class UnitsSpec:
    label: str = "t_c"
    scale: float = 1.0


@dataclass
class ScenarioConfig:
    pair_model: PairModelSpec
    filter: FilterSpec = field(default_factory=FilterSpec)
    herald_instants: Optional[list] = None
    atom: Optional[AtomSpec] = None
    grid: GridSpec = field(default_factory=GridSpec)
    imperfections: Imperfections = field(default_factory=Imperfections)
    output: OutputSpec = field(default_factory=OutputSpec)
    units: UnitsSpec = field(default_factory=UnitsSpec)


_NESTED = {"pair_model": PairModelSpec, "filter": FilterSpec, "atom": AtomSpec,
           "grid": GridSpec, "imperfections": Imperfections, "output": OutputSpec,
           "units": UnitsSpec}


def _line_of(text: str, key: str) -> Optional[int]:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return None if m is None else text.count("\n", 0, m.start()) + 1


def _where(text: str, key: str) -> str:
    line = _line_of(text, key)
    return f"line {line}, key '{key}'" if line else f"key '{key}'"


def _build(cls, data: Any, text: str, prefix: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{_where(text, prefix)}: expected an object")
    names = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(names))
    if unknown:
        raise ConfigError(f"{_where(text, unknown[0])}: unknown key in '{prefix}' "
                          f"(allowed: {', '.join(sorted(names))})")
    kwargs = {}
    for name, f in names.items():
        if name not in data:
            if f.default is MISSING and f.default_factory is MISSING:
                raise ConfigError(f"'{prefix}': missing required key '{name}'")
            continue
        value = data[name]
        if name in _NESTED and cls is ScenarioConfig:
            value = None if value is None else _build(_NESTED[name], value, text, name)
        elif name == "herald_instants":
            if not (isinstance(value, list) and all(_is_number(v) for v in value)):
                raise ConfigError(f"{_where(text, name)}: expected a list of numbers")
            value = [float(v) for v in value]
        elif name in ("type", "path", "directory", "format", "label"):
            if not isinstance(value, str):
                raise ConfigError(f"{_where(text, name)}: expected a string")
        elif value is not None:
            if not _is_number(value):
                raise ConfigError(f"{_where(text, name)}: expected a number, got {value!r}")
            value = float(value)
        kwargs[name] = value
    return cls(**kwargs)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a JSON scenario document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError("top level of a scenario must be an object")
    cfg = _build(ScenarioConfig, data, text, "scenario")
    if cfg.pair_model.type not in ("window", "cw", "ideal"):
        raise ConfigError(f"{_where(text, 'type')}: pair_model.type must be window, cw or ideal")
    if cfg.filter.type not in ("lorentzian", "tabulated"):
        raise ConfigError(f"{_where(text, 'type')}: filter.type must be lorentzian or tabulated")
    if cfg.filter.type == "lorentzian" and cfg.filter.t_m is None:
        raise ConfigError("'filter': a lorentzian filter needs 't_m'")
    if cfg.filter.type == "tabulated" and cfg.filter.path is None:
        raise ConfigError("'filter': a tabulated filter needs 'path'")
    if cfg.pair_model.type == "window" and cfg.pair_model.t_u is None:
        raise ConfigError("'pair_model': a window model needs 't_u'")
    if cfg.pair_model.type == "cw" and cfg.pair_model.pair_rate is None:
        raise ConfigError("'pair_model': a cw model needs 'pair_rate'")
    if not cfg.units.scale > 0:
        raise ConfigError(f"{_where(text, 'scale')}: units.scale must be positive")
    if cfg.output.format not in FORMATS:
        raise ConfigError(f"{_where(text, 'format')}: output.format must be csv or json")
    return cfg


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_config(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------

def build_filter(spec: FilterSpec, extra_drift: float = 0.0,
                 base_dir: Path | None = None) -> SpectralFilter:
    if spec.type == "lorentzian":
        filt: SpectralFilter = lorentzian(spec.t_m, spec.drift)
    else:
        path = Path(spec.path)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        filt = drifted(load_tabulated(path), spec.drift)
    return drifted(filt, extra_drift) if extra_drift else filt


def regime_params(cfg: ScenarioConfig) -> Optional[RegimeParams]:
    t_m = cfg.filter.t_m
    if t_m is None:
        return None
    pm = cfg.pair_model
    return RegimeParams(
        t_m=t_m,
        t_c=pm.t_c if pm.type != "ideal" else None,
        t_u=pm.t_u if pm.type == "window" else None,
        pair_rate=pm.pair_rate if pm.type == "cw" and pm.pair_rate else None,
        t_coh=pm.t_coh,
        t_d=cfg.imperfections.t_d,
        drift=abs(cfg.filter.drift + cfg.imperfections.drift),
    )


def cw_grid(t_herald: float, t_c: float, t_m: float, step: float | None = None,
            half_span: float | None = None) -> Grid:
    """Grid centred on the herald, ``+-16 (t_m + t_c)`` wide by default."""
    if step is None:
        step = min(t_c / 8, t_m / 16)
    if half_span is None:
        half_span = 16.0 * (t_m + t_c)
    n = int(math.ceil(half_span / step))
    return Grid(t_herald - n * step, step, 2 * n + 1)


def _pad_right(env: ComplexEnvelope, duration: float) -> ComplexEnvelope:
    g = env.grid
    extra = int(math.ceil(duration / g.step))
    samples = np.concatenate([env.samples, np.zeros(extra, dtype=complex)])
    return ComplexEnvelope(Grid(g.origin, g.step, g.count + extra, g.unit_label), samples, env.notes)


def run_scenario(cfg: ScenarioConfig, base_dir: Path | None = None) -> dict:
    """Run a scenario, write its datasets and return the report dictionary.

    `base_dir` resolves a relative tabulated-filter path (the directory of
    the config file); the output directory is taken as given.

    The report lists every regime condition; violations are also collected
    in ``report["warnings"]``, which `format_report` prints first.
    """
    units = Units(cfg.units.label, cfg.units.scale)
    out = Path(cfg.output.directory)
    fmt = cfg.output.format
    try:
        filt = build_filter(cfg.filter, cfg.imperfections.drift, base_dir)
        params = regime_params(cfg)
    except InvalidArgument as exc:
        raise ConfigError(str(exc)) from exc

    report: dict = {"units": {"label": units.label, "scale": units.scale},
                    "warnings": [], "regime": [], "files": []}
    if params is not None:
        for check in validate_regime(params):
            report["regime"].append({"condition": check.condition, "margin": check.margin,
                                     "satisfied": check.satisfied, "level": check.level})
            if not check.satisfied:
                report["warnings"].append(
                    f"regime violation: {check.condition} (ratio {check.margin:.3g} > 0.2)")
    else:
        report["warnings"].append("regime checks skipped: filter has no nominal t_m")

    pm = cfg.pair_model
    try:
        if pm.type == "cw":
            StationaryCW(pm.t_c, pm.pair_rate)
            shapes = _run_cw(cfg, filt, report)
        else:
            shapes = _run_grid(cfg, filt, report)
    except InvalidArgument as exc:
        raise ConfigError(str(exc)) from exc

    for i, (t_h, env) in enumerate(shapes):
        cols = ["t", "re", "im", "intensity"]
        amp = units.amplitude(env.samples)
        data = [units.time(env.axis), amp.real, amp.imag, units.density(env.intensity)]
        if cfg.imperfections.t_d > 0:
            cols.append("intensity_jittered")
            data.append(units.density(apply_detector_jitter(env.intensity, env.grid.step,
                                                            cfg.imperfections.t_d)))
        path = write_table(out / f"shape_{i}", cols, data, fmt)
        report["shapes"][i]["file"] = path.name
        report["files"].append(path.name)

    if pm.type == "cw" and pm.pair_rate > 0 and cfg.filter.t_m is not None:
        t_m = cfg.filter.t_m
        dt = np.linspace(-20 * t_m, 20 * t_m, 4001)
        g2 = g2_cross(dt, 0.0, pm.pair_rate, pm.t_c, t_m)
        path = write_table(out / "g2", ["dt", "g2"], [units.time(dt), g2], fmt)
        # the amplitude peaks a few t_c before the herald, so g2 does too
        report["g2"] = {"at_zero_delay": float(g2_cross(0.0, 0.0, pm.pair_rate, pm.t_c, t_m)),
                        "max": float(g2.max()),
                        "max_delay": float(units.time(dt[int(np.argmax(g2))])),
                        "file": path.name}
        report["files"].append(path.name)

    if cfg.atom is not None and shapes:
        lifetime = cfg.atom.lifetime if cfg.atom.lifetime is not None else cfg.filter.t_m
        if lifetime is None:
            raise ConfigError("'atom': lifetime required when the filter has no t_m")
        atom = atom_mod.AtomModel(lifetime)
        t_h, env = shapes[0]
        env = _pad_right(env, 16 * lifetime)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            curve = atom_mod.excitation_curve(env, atom)
        path = write_table(out / "excitation", ["t", "p"], [units.time(curve.grid.times), curve.p], fmt)
        report["atom"] = {"lifetime": float(units.time(lifetime)),
                          "herald_instant": float(units.time(t_h)), "p_max": curve.p_max,
                          "t_peak": float(units.time(curve.t_peak)), "file": path.name}
        if pm.type == "cw" and cfg.filter.t_m is not None:
            report["atom"]["p_max_closed_form"] = atom_mod.p_max_closed_form(cfg.filter.t_m / pm.t_c)
        report["files"].append(path.name)

    report["files"] += ["report.txt", "report.json"]
    write_atomic(out / "report.txt", format_report(report) + "\n")
    write_json(out / "report.json", report)
    return report


def _run_cw(cfg: ScenarioConfig, filt: SpectralFilter, report: dict):
    pm = cfg.pair_model
    units = Units(cfg.units.label, cfg.units.scale)
    if not isinstance(filt, Lorentzian) or filt.drift != 0:
        raise ConfigError("the cw model has closed forms for an undrifted lorentzian filter only")
    t_m = filt.t_m
    report["heralding_probability"] = {
        "exact": cw_heralding_probability(pm.t_c, t_m),
        "asymptotic": cw_heralding_asymptotic(pm.t_c, t_m),
        "estimate": heralding_probability_estimate(1.0 / t_m, 1.0 / pm.t_c),
    }
    heralds = cfg.herald_instants or [0.0]
    shapes = []
    report["shapes"] = []
    for t_h in heralds:
        g = cw_grid(t_h, pm.t_c, t_m, cfg.grid.step, cfg.grid.half_span)
        env = ComplexEnvelope(g, cw_conditional_shape(g.times, t_h, pm.t_c, t_m)).normalized()
        shapes.append((t_h, env))
        report["shapes"].append({"herald_instant": float(units.time(t_h))})
    return shapes


def _run_grid(cfg: ScenarioConfig, filt: SpectralFilter, report: dict):
    pm = cfg.pair_model
    units = Units(cfg.units.label, cfg.units.scale)
    if pm.type == "window":
        model = FiniteWindowExponential(pm.t_c, pm.t_u)
        step = cfg.grid.step
        if step is None and isinstance(filt, Lorentzian):
            step = min(model.t_c / 8, filt.t_m / 16)
        joint = joint_amplitude(model, default_window_grid(model, step))
        heralds = cfg.herald_instants or [0.5 * pm.t_u]
        estimate = (heralding_probability_estimate(1.0 / cfg.filter.t_m, 1.0 / pm.t_c)
                    if cfg.filter.t_m is not None else None)
    else:
        t_m = cfg.filter.t_m if cfg.filter.t_m is not None else 1.0
        step = cfg.grid.step or t_m / 16
        half = cfg.grid.half_span or 20 * t_m
        joint = ideal_joint_amplitude(grid_with_step(0.0, 2 * half, step))
        heralds = cfg.herald_instants or [1.5 * half]
        estimate = None
    filtered = apply_filter(joint, filt)
    report["heralding_probability"] = {
        "exact": heralding_probability(joint, filt),
        "time_domain_norm2": filtered.norm2,
        "estimate": estimate,
    }
    shapes = []
    report["shapes"] = []
    for t_h in heralds:
        res = conditional_shape(filtered, t_h)
        shapes.append((res.herald_instant, res.shape))
        report["shapes"].append({"herald_instant": float(units.time(res.herald_instant)),
                                 "herald_density": float(units.density(res.herald_density))})
    return shapes


def format_report(report: dict) -> str:
    """Plain-text report; regime violations come first."""
    lines = [f"WARNING: {w}" for w in report["warnings"]]
    lines.append(f"time unit: {report['units']['label']} (scale {report['units']['scale']:g})")
    if report["regime"]:
        lines.append("regime conditions (ratio <= 0.2 required, <= 0.05 clean):")
        for r in report["regime"]:
            lines.append(f"  {r['condition']:<16} ratio {r['margin']:<10.4g} {r['level']}")
    hp = report.get("heralding_probability", {})
    for key in ("exact", "time_domain_norm2", "asymptotic", "estimate"):
        if hp.get(key) is not None:
            lines.append(f"heralding probability R ({key}): {hp[key]:.4f}")
    for s in report.get("shapes", []):
        lines.append(f"heralded shape at t'={s['herald_instant']:g}: {s.get('file', '')}")
    if "g2" in report:
        g = report["g2"]
        lines.append(f"g2 at zero delay: {g['at_zero_delay']:.4f}; "
                     f"maximum {g['max']:.4f} at dt={g['max_delay']:g}")
    if "atom" in report:
        a = report["atom"]
        extra = (f" (closed form {a['p_max_closed_form']:.4f})"
                 if "p_max_closed_form" in a else "")
        lines.append(f"atom p_max: {a['p_max']:.4f} at t={a['t_peak']:g}{extra}")
    return "\n".join(lines)
