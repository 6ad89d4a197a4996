"""Uniform grids, Fourier transforms, convolution and quadrature.

Fourier sign convention
-----------------------
A time-domain envelope ``f(t)`` and its spectrum ``F(w)`` are related by

    F(w) = int f(t) exp(+i w t) dt
    f(t) = int F(w) exp(-i w t) dw / 2pi

so that a filter with transmission ``F(w)`` has impulse response
``f(tau)``.  With this choice the Lorentzian ``1/(1 - 2i w t_m)`` maps
onto the causal ``exp(-tau/2t_m) / 2t_m`` for ``tau >= 0``.

All integrals are rectangle sums over uniform grids.  For envelopes that
vanish at the grid edges this coincides with the trapezoidal rule.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import signal

from .errors import AliasingWarning, InvalidArgument

#: relative tolerance used when comparing grid steps and origins
STEP_RTOL = 1e-9

#: spectra must decay below this fraction of their peak at the band edges
EDGE_DECAY = 1e-4


@dataclass(frozen=True)
class Grid:
    """Uniform time axis ``origin + step * arange(count)``."""

    origin: float
    step: float
    count: int
    unit_label: Optional[str] = None

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise InvalidArgument(f"grid step must be positive, got {self.step}")
        if self.count < 2:
            raise InvalidArgument(f"grid needs at least two samples, got {self.count}")

    @property
    def times(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.count)

    @property
    def span(self) -> float:
        return self.step * (self.count - 1)

    @property
    def end(self) -> float:
        return self.origin + self.span

    def index_of(self, t: float) -> int:
        """Index of the sample nearest to `t`, clipped to the grid."""
        i = int(round((t - self.origin) / self.step))
        return min(max(i, 0), self.count - 1)

    def contains(self, t: float) -> bool:
        half = 0.5 * self.step
        return self.origin - half <= t <= self.end + half

    def dual(self) -> "FrequencyGrid":
        """Frequency grid of the discrete Fourier transform, centred on zero."""
        dw = 2.0 * math.pi / (self.step * self.count)
        return FrequencyGrid(origin=-(self.count // 2) * dw, step=dw, count=self.count)

    def shifted(self, offset: float) -> "Grid":
        return Grid(self.origin + offset, self.step, self.count, self.unit_label)

    def extended(self, count: int, origin: Optional[float] = None) -> "Grid":
        return Grid(self.origin if origin is None else origin, self.step, count, self.unit_label)


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform angular-frequency axis; frequencies are offsets from a carrier."""

    origin: float
    step: float
    count: int

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise InvalidArgument(f"frequency step must be positive, got {self.step}")
        if self.count < 2:
            raise InvalidArgument(f"frequency grid needs at least two samples, got {self.count}")

    @property
    def frequencies(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.count)

    @property
    def span(self) -> float:
        return self.step * (self.count - 1)

    def dual(self, t_origin: Optional[float] = None) -> Grid:
        """Time grid whose discrete Fourier transform lands on this grid."""
        dt = 2.0 * math.pi / (self.step * self.count)
        if t_origin is None:
            t_origin = -(self.count // 2) * dt
        return Grid(origin=t_origin, step=dt, count=self.count)


@dataclass(frozen=True, eq=False)
class ComplexEnvelope:
    """Complex samples over a `Grid` or `FrequencyGrid`.

    ``notes`` collects diagnostics (aliasing, snapping) produced while the
    envelope was computed.
    """

    grid: Grid | FrequencyGrid
    samples: np.ndarray
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.shape != (self.grid.count,):
            raise InvalidArgument(
                f"expected {self.grid.count} samples, got array of shape {samples.shape}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def axis(self) -> np.ndarray:
        g = self.grid
        return g.times if isinstance(g, Grid) else g.frequencies

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    @property
    def norm(self) -> float:
        return l2_norm(self)

    def normalized(self) -> "ComplexEnvelope":
        n = self.norm
        if n == 0.0:
            raise InvalidArgument("cannot normalize an envelope with zero norm")
        return ComplexEnvelope(self.grid, self.samples / n, self.notes)

    def with_note(self, note: str) -> "ComplexEnvelope":
        return ComplexEnvelope(self.grid, self.samples, self.notes + (note,))


def make_grid(t_min: float, t_max: float, count: int, unit_label: Optional[str] = None) -> Grid:
    """Uniform grid with `count` samples from `t_min` to `t_max` inclusive."""
    if not t_max > t_min:
        raise InvalidArgument(f"empty span [{t_min}, {t_max}]")
    if count < 2:
        raise InvalidArgument(f"count must be at least 2, got {count}")
    return Grid(origin=float(t_min), step=(t_max - t_min) / (count - 1), count=int(count),
                unit_label=unit_label)


def grid_with_step(t_min: float, t_max: float, step: float) -> Grid:
    """Grid starting at `t_min` with exactly `step`, reaching at least `t_max`."""
    if not t_max > t_min:
        raise InvalidArgument(f"empty span [{t_min}, {t_max}]")
    if not step > 0:
        raise InvalidArgument(f"step must be positive, got {step}")
    count = int(math.ceil((t_max - t_min) / step - 1e-9)) + 1
    return Grid(origin=float(t_min), step=float(step), count=max(count, 2))


def same_step(a: float, b: float) -> bool:
    return abs(a - b) <= STEP_RTOL * max(abs(a), abs(b))


def same_grid(a: Grid | FrequencyGrid, b: Grid | FrequencyGrid) -> bool:
    return (type(a) is type(b) and a.count == b.count and same_step(a.step, b.step)
            and abs(a.origin - b.origin) <= STEP_RTOL * a.step * max(1, a.count))


def to_frequency_domain(envelope: ComplexEnvelope) -> ComplexEnvelope:
    """Spectrum ``F(w) = int f(t) exp(i w t) dt`` on the dual frequency grid."""
    grid = envelope.grid
    if not isinstance(grid, Grid):
        raise InvalidArgument("to_frequency_domain expects a time-domain envelope")
    fgrid = grid.dual()
    n = np.arange(grid.count)
    w = fgrid.frequencies
    # exp(i w_k t_n) = exp(i w_k t_0) exp(i w_0 n h) exp(2 pi i k n / N)
    x = envelope.samples * np.exp(1j * fgrid.origin * grid.step * n)
    spectrum = grid.step * grid.count * np.fft.ifft(x) * np.exp(1j * w * grid.origin)
    return ComplexEnvelope(fgrid, spectrum, envelope.notes)


def to_time_domain(spectrum: ComplexEnvelope, t_origin: Optional[float] = None) -> ComplexEnvelope:
    """Envelope ``f(t) = int F(w) exp(-i w t) dw/2pi`` on the dual time grid.

    The time grid is centred on zero unless `t_origin` is given.  When the
    spectrum has not decayed below ``EDGE_DECAY`` of its peak at the band
    edges the result carries an ``"aliasing"`` note and an
    `AliasingWarning` is issued.
    """
    fgrid = spectrum.grid
    if not isinstance(fgrid, FrequencyGrid):
        raise InvalidArgument("to_time_domain expects a frequency-domain envelope")
    grid = fgrid.dual(t_origin)
    k = np.arange(fgrid.count)
    t = grid.times
    x = spectrum.samples * np.exp(-1j * grid.origin * fgrid.step * k)
    samples = fgrid.step / (2.0 * math.pi) * np.fft.fft(x) * np.exp(-1j * fgrid.origin * t)

    notes = spectrum.notes
    mag = np.abs(spectrum.samples)
    peak = mag.max()
    if peak > 0 and max(mag[0], mag[-1]) > EDGE_DECAY * peak:
        warnings.warn("spectrum has not decayed at the band edges; the time-domain "
                      "result is aliased", AliasingWarning, stacklevel=2)
        notes = notes + ("aliasing",)
    return ComplexEnvelope(grid, samples, notes)


def evaluate_inverse_transform(spectrum: ComplexEnvelope, grid: Grid) -> ComplexEnvelope:
    """``int F(w) exp(-i w t) dw/2pi`` evaluated on an arbitrary uniform time grid.

    Uses the chirp-z transform so the time grid need not be the FFT dual of
    the frequency grid.
    """
    fgrid = spectrum.grid
    if not isinstance(fgrid, FrequencyGrid):
        raise InvalidArgument("expected a frequency-domain envelope")
    k = np.arange(fgrid.count)
    x = spectrum.samples * np.exp(-1j * fgrid.step * k * grid.origin)
    w = np.exp(-1j * fgrid.step * grid.step)
    y = signal.czt(x, m=grid.count, w=w, a=1.0)
    samples = fgrid.step / (2.0 * math.pi) * y * np.exp(-1j * fgrid.origin * grid.times)
    return ComplexEnvelope(grid, samples, spectrum.notes)


def convolve(a: ComplexEnvelope, b: ComplexEnvelope) -> ComplexEnvelope:
    """Linear convolution ``int a(s) b(t - s) ds`` on the combined time axis.

    The result starts at ``a.origin + b.origin`` and has
    ``a.count + b.count - 1`` samples.
    """
    ga, gb = a.grid, b.grid
    if not (isinstance(ga, Grid) and isinstance(gb, Grid)):
        raise InvalidArgument("convolve expects time-domain envelopes")
    if not same_step(ga.step, gb.step):
        raise InvalidArgument(f"mismatched grid steps {ga.step} and {gb.step}")
    samples = ga.step * signal.convolve(a.samples, b.samples, method="auto")
    grid = Grid(ga.origin + gb.origin, ga.step, ga.count + gb.count - 1, ga.unit_label)
    return ComplexEnvelope(grid, samples, a.notes + b.notes)


def overlap(a: ComplexEnvelope, b: ComplexEnvelope) -> complex:
    """Inner product ``<a|b> = sum conj(a) b step`` on identical grids."""
    if not same_grid(a.grid, b.grid):
        raise InvalidArgument("overlap requires identical grids")
    return complex(np.vdot(a.samples, b.samples) * a.grid.step)


def l2_norm(envelope: ComplexEnvelope) -> float:
    return math.sqrt(float(np.sum(np.abs(envelope.samples) ** 2)) * envelope.grid.step)


def trapezoid(values: np.ndarray, step: float) -> float | complex:
    return np.trapezoid(values, dx=step)


def cumulative_trapezoid(values: np.ndarray, step: float) -> np.ndarray:
    """Running trapezoidal integral starting from zero at the first sample."""
    out = np.zeros_like(values)
    out[1:] = np.cumsum(0.5 * step * (values[1:] + values[:-1]))
    return out


def aligned_shift(source: Grid, target: Grid) -> float:
    """Offset in samples between two grids sharing a step; must be integral."""
    if not same_step(source.step, target.step):
        raise InvalidArgument("grids do not share a step")
    return (target.origin - source.origin) / source.step
