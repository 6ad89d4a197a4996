"""Figure datasets at fixed parameters.

Windowed figures use ``t_u : t_m : t_c = 150 : 10 : 1`` on a ``t_c/8`` grid;
fig4 uses the stationary source at ``eps = t_m/t_c = 10`` with a matched
atom; fig5 sweeps ``eps`` over ``[0.5, 100]``.  Every curve is scaled to a
unit maximum.
"""

from __future__ import annotations

import warnings
from pathlib import Path

import numpy as np

from .atom import AtomModel, excitation_curve, p_max_closed_form
from .heralding import apply_filter, conditional_shape, cw_conditional_shape, cw_heralding_probability
from .filters import lorentzian
from .io import Units, write_table
from .numerics import ComplexEnvelope
from .scenario import cw_grid
from .sources import FiniteWindowExponential, default_window_grid, joint_amplitude

FIGURES = ("fig3a", "fig3b", "fig4", "fig5")

WINDOW = FiniteWindowExponential(t_c=1.0, t_u=150.0)
T_M = 10.0
STEP = 0.125
FIG3B_HERALDS = (5.0, 75.0, 140.0)
FIG4_EPS = 10.0


def _unit_max(x: np.ndarray) -> np.ndarray:
    peak = np.max(np.abs(x))
    return x / peak if peak > 0 else x


def _window_pair():
    joint = joint_amplitude(WINDOW, default_window_grid(WINDOW, STEP))
    return joint, apply_filter(joint, lorentzian(T_M))


def fig5_epsilons() -> np.ndarray:
    grid = np.geomspace(0.5, 100.0, 61)
    return np.unique(np.round(np.concatenate([grid, [1, 2, 5, 10, 20, 50]]), 12))


def reproduce_figure(fig_id: str, out_dir: str | Path, fmt: str = "csv",
                     units: Units = Units()) -> Path:
    """Write the dataset for `fig_id` into `out_dir` and return its path."""
    if fig_id not in FIGURES:
        raise ValueError(f"unknown figure {fig_id!r}; choose from {', '.join(FIGURES)}")
    out = Path(out_dir) / fig_id
    if fig_id == "fig3a":
        joint, filtered = _window_pair()
        gi, go = joint.grid_i, filtered.grid_i
        before = np.zeros(go.count)
        k0 = int(round((gi.origin - go.origin) / go.step))
        before[k0:k0 + gi.count] = joint.idler_marginal()
        t = go.times
        keep = t <= WINDOW.t_u + 6 * T_M
        return write_table(out, ["t", "before", "after"],
                           [units.time(t[keep]), _unit_max(before)[keep],
                            _unit_max(filtered.idler_marginal())[keep]], fmt)
    if fig_id == "fig3b":
        joint, filtered = _window_pair()
        cols = [[] for _ in range(6)]
        for t_h in FIG3B_HERALDS:
            res = conditional_shape(filtered, t_h)
            ref = conditional_shape(joint, t_h)
            amp = res.shape.samples / np.max(np.abs(res.shape.samples))
            n = res.shape.grid.count
            for col, vals in zip(cols, [np.full(n, res.herald_instant), res.shape.axis,
                                        amp.real, amp.imag, np.abs(amp) ** 2,
                                        _unit_max(ref.shape.intensity)]):
                col.append(vals)
        data = [np.concatenate(c) for c in cols]
        data[0], data[1] = units.time(data[0]), units.time(data[1])
        return write_table(out, ["herald", "t", "re", "im", "intensity", "unfiltered_intensity"],
                           data, fmt)
    if fig_id == "fig4":
        t_c, t_m = 1.0, FIG4_EPS
        g = cw_grid(0.0, t_c, t_m, step=t_c / 8)
        shape = ComplexEnvelope(g, cw_conditional_shape(g.times, 0.0, t_c, t_m)).normalized()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            curve = excitation_curve(shape, AtomModel(t_m))
        keep = (g.times >= -8 * t_m) & (g.times <= 4 * t_m)
        return write_table(out, ["t", "p", "intensity"],
                           [units.time(g.times[keep]), curve.p[keep],
                            _unit_max(shape.intensity)[keep]], fmt)
    eps = fig5_epsilons()
    r = np.array([cw_heralding_probability(1.0, e) for e in eps])
    p = np.array([p_max_closed_form(e) for e in eps])
    return write_table(out, ["epsilon", "R", "p_max"], [eps, r, p], fmt)
