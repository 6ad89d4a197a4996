"""Complex spectral filters and their impulse responses.

A filter acts on the idler photon through its transmission ``F(w)``; in the
time domain it acts through the impulse response

    f(tau) = int F(w) exp(-i w tau) dw / 2pi .

Two kinds are supported: the analytic Lorentzian (an optical cavity with
intensity response time ``t_m``) and filters tabulated on a uniform
frequency grid.

Tabulated text format
---------------------
One header line starting with ``#``, then one row per frequency::

    # omega re_F im_F
    -3.0 0.0270 -0.0811
    ...

Angular frequencies must be strictly increasing.  Non-uniform tables are
resampled onto a uniform grid with the smallest spacing of the table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import InvalidArgument, ResolutionError
from .numerics import (ComplexEnvelope, FrequencyGrid, Grid, evaluate_inverse_transform,
                       to_time_domain)

PASSIVITY_TOL = 1e-12

#: kernels are truncated where |f| falls below this fraction of its peak
KERNEL_TAIL = 1e-8

TABLE_HEADER = "omega re_F im_F"


@dataclass(frozen=True)
class Lorentzian:
    """``F(w) = 1 / (1 - 2i (w - drift) t_m)``.

    The power transmission has half width ``1/(2 t_m)``; the nominal
    passband used in order-of-magnitude estimates is ``1/t_m``.
    """

    t_m: float
    drift: float = 0.0

    def __post_init__(self):
        if not self.t_m > 0:
            raise InvalidArgument(f"response time t_m must be positive, got {self.t_m}")

    @property
    def passband(self) -> float:
        return 1.0 / self.t_m

    def transmission(self, omega):
        return 1.0 / (1.0 - 2j * (np.asarray(omega) - self.drift) * self.t_m)

    def response(self, tau):
        """Analytic impulse response; the step takes the value 1/2 at ``tau = 0``."""
        tau = np.asarray(tau, dtype=float)
        step = np.where(tau > 0, 1.0, np.where(tau == 0, 0.5, 0.0))
        decay = np.exp(-np.maximum(tau, 0.0) / (2.0 * self.t_m))
        return step * decay * np.exp(-1j * self.drift * tau) / (2.0 * self.t_m)

    @property
    def support(self) -> tuple[float, float]:
        return 0.0, 2.0 * self.t_m * math.log(1.0 / KERNEL_TAIL)


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Transmission sampled on a uniform `FrequencyGrid`, zero outside the band."""

    table: ComplexEnvelope

    def __post_init__(self):
        if not isinstance(self.table.grid, FrequencyGrid):
            raise InvalidArgument("a tabulated filter needs a frequency-domain table")
        peak = float(np.max(np.abs(self.table.samples)))
        if peak > 1.0 + PASSIVITY_TOL:
            raise InvalidArgument(f"|F| reaches {peak:.6g} > 1; a passive filter cannot amplify")

    def transmission(self, omega):
        w = self.table.axis
        f = self.table.samples
        omega = np.asarray(omega, dtype=float)
        re = np.interp(omega, w, f.real, left=0.0, right=0.0)
        im = np.interp(omega, w, f.imag, left=0.0, right=0.0)
        return re + 1j * im

    @property
    def period(self) -> float:
        """Time period of the trigonometric sum defined by the table."""
        return 2.0 * math.pi / self.table.grid.step


SpectralFilter = Union[Lorentzian, Tabulated]


def lorentzian(t_m: float, drift: float = 0.0) -> Lorentzian:
    return Lorentzian(t_m=t_m, drift=drift)


def tabulated(omega, values) -> Tabulated:
    """Build a tabulated filter from frequencies and complex transmissions."""
    omega = np.asarray(omega, dtype=float)
    values = np.asarray(values, dtype=complex)
    if omega.ndim != 1 or omega.shape != values.shape or omega.size < 2:
        raise InvalidArgument("omega and values must be matching 1-D arrays of length >= 2")
    d = np.diff(omega)
    if np.any(d <= 0):
        raise InvalidArgument("table frequencies must be strictly increasing")
    step = float(d.min())
    if np.ptp(d) > 1e-9 * step:
        count = int(round((omega[-1] - omega[0]) / step)) + 1
        grid = FrequencyGrid(float(omega[0]), (omega[-1] - omega[0]) / (count - 1), count)
        w = grid.frequencies
        values = np.interp(w, omega, values.real) + 1j * np.interp(w, omega, values.imag)
    else:
        grid = FrequencyGrid(float(omega[0]), (omega[-1] - omega[0]) / (omega.size - 1), omega.size)
    return Tabulated(ComplexEnvelope(grid, values))


def drifted(filt: SpectralFilter, omega_d: float) -> SpectralFilter:
    """Rigid shift of the transmission, ``F(w) -> F(w - omega_d)``."""
    if isinstance(filt, Lorentzian):
        return Lorentzian(filt.t_m, filt.drift + omega_d)
    g = filt.table.grid
    shifted = FrequencyGrid(g.origin + omega_d, g.step, g.count)
    return Tabulated(ComplexEnvelope(shifted, filt.table.samples))


def sample_filter(filt: SpectralFilter, fgrid: FrequencyGrid) -> Tabulated:
    """Tabulate the transmission of any filter on `fgrid`."""
    return Tabulated(ComplexEnvelope(fgrid, filt.transmission(fgrid.frequencies)))


def load_tabulated(path: str | Path) -> Tabulated:
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise InvalidArgument(f"{path}: first line must be a '# {TABLE_HEADER}' header")
        try:
            data = np.loadtxt(fh, comments="#", ndmin=2)
        except ValueError as exc:
            raise InvalidArgument(f"{path}: {exc}") from exc
    if data.shape[1] != 3:
        raise InvalidArgument(f"{path}: expected 3 columns (omega, re F, im F), got {data.shape[1]}")
    return tabulated(data[:, 0], data[:, 1] + 1j * data[:, 2])


def save_tabulated(filt: Tabulated, path: str | Path) -> None:
    w = filt.table.axis
    f = filt.table.samples
    np.savetxt(path, np.column_stack([w, f.real, f.imag]), fmt="%.17g", header=TABLE_HEADER)


def impulse_response(filt: SpectralFilter, grid: Grid) -> ComplexEnvelope:
    """Impulse response of `filt` sampled on `grid`.

    Lorentzian filters are evaluated in closed form and require
    ``step <= t_m/16`` and a span of at least ``12 t_m``.  Tabulated filters
    are transformed numerically.
    """
    if isinstance(filt, Lorentzian):
        if grid.step > filt.t_m / 16:
            raise ResolutionError(
                f"step {grid.step:g} does not resolve t_m={filt.t_m:g}; use step <= {filt.t_m / 16:g}")
        if grid.span < 12 * filt.t_m:
            raise ResolutionError(f"grid span {grid.span:g} is shorter than 12 t_m = {12 * filt.t_m:g}")
        return ComplexEnvelope(grid, filt.response(grid.times))
    if isinstance(filt, Tabulated):
        if grid.span >= filt.period:
            raise ResolutionError(
                f"grid span {grid.span:g} exceeds the period {filt.period:g} of the table")
        return evaluate_inverse_transform(filt.table, grid)
    raise InvalidArgument(f"unknown filter type {type(filt).__name__}")


def filter_kernel(filt: SpectralFilter, step: float) -> ComplexEnvelope:
    """Impulse response on its own support, sampled with `step`.

    The support covers every lag where ``|f|`` exceeds ``KERNEL_TAIL`` of its
    peak, so convolving with the kernel loses no measurable energy.
    """
    if isinstance(filt, Lorentzian):
        lo, hi = filt.support
        count = int(math.ceil((hi - lo) / step)) + 1
        return impulse_response(filt, Grid(lo, step, count))
    half = int(0.5 * filt.period / step) - 1
    env = impulse_response(filt, Grid(-half * step, step, 2 * half + 1))
    mag = np.abs(env.samples)
    keep = np.nonzero(mag >= KERNEL_TAIL * mag.max())[0]
    i0, i1 = int(keep[0]), int(keep[-1]) + 1
    grid = Grid(env.grid.origin + i0 * step, step, max(i1 - i0, 2))
    return ComplexEnvelope(grid, env.samples[i0:i0 + grid.count])


@dataclass(frozen=True)
class CausalityReport:
    causal: bool
    pre_herald_mass: float


def check_causality(filt: SpectralFilter, tol: float = 1e-6,
                    grid: Grid | None = None) -> CausalityReport:
    """Fraction of impulse-response energy at negative lags.

    Evaluated on a grid symmetric about ``tau = 0``; the sample at zero lag
    counts towards the total only.
    """
    if grid is None:
        if isinstance(filt, Lorentzian):
            half = 2 * int(math.ceil(filt.support[1] / (filt.t_m / 32)))
            grid = Grid(-half * filt.t_m / 32, filt.t_m / 32, 2 * half + 1)
            env = impulse_response(filt, grid)
        else:
            env = to_time_domain(filt.table)
    else:
        env = impulse_response(filt, grid)
    tau = env.axis
    energy = np.abs(env.samples) ** 2
    total = float(energy.sum())
    if total == 0.0:
        raise InvalidArgument("filter has no transmission on this grid")
    before = float(energy[tau < -1e-9 * env.grid.step].sum())
    mass = before / total
    return CausalityReport(causal=mass < tol, pre_herald_mass=mass)
