"""Time-energy entangled photon-pair resources.

Three pair models are provided:

* `IdealCorrelated` -- perfectly time-correlated pairs, represented on a
  grid as a one-sample-wide diagonal ridge;
* `FiniteWindowExponential` -- the double-exponential amplitude
  ``exp(-|t - t'| / 2 t_c)`` restricted to the square window ``[0, t_u]^2``;
* `StationaryCW` -- a stationary stream characterised by its first-order
  auto- and cross-correlation functions.

Times are dimensionless (units of ``t_c``) unless the caller attaches a unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidArgument, ResolutionError
from .numerics import ComplexEnvelope, FrequencyGrid, Grid, grid_with_step, same_step

#: joint amplitudes must resolve the correlation time at least this finely
MAX_STEP_PER_TC = 0.25

#: default sampling density for windowed models
DEFAULT_STEP_PER_TC = 0.125


@dataclass(frozen=True)
class IdealCorrelated:
    """Perfect time correlation, ``Psi(t, t') ~ delta(t - t')``."""


@dataclass(frozen=True)
class FiniteWindowExponential:
    t_c: float
    t_u: float

    def __post_init__(self):
        if not self.t_c > 0:
            raise InvalidArgument(f"t_c must be positive, got {self.t_c}")
        if not self.t_u > self.t_c:
            raise InvalidArgument(f"window t_u={self.t_u} must exceed t_c={self.t_c}")


@dataclass(frozen=True)
class StationaryCW:
    t_c: float
    pair_rate: float

    def __post_init__(self):
        if not self.t_c > 0:
            raise InvalidArgument(f"t_c must be positive, got {self.t_c}")
        if not self.pair_rate >= 0:
            raise InvalidArgument(f"pair rate must be non-negative, got {self.pair_rate}")
        if not self.pair_rate * self.t_c < 1:
            raise InvalidArgument(
                f"pair_rate * t_c = {self.pair_rate * self.t_c:g}; the low-pump correlators "
                "need fewer than one pair per correlation time")


PairModel = Union[IdealCorrelated, FiniteWindowExponential, StationaryCW]


@dataclass(frozen=True)
class SpectralWidths:
    """Nominal unconditional and conditional bandwidths, ``1/t_c`` and ``1/t_u``."""

    omega_u: float
    omega_c: float


def spectral_widths(model: PairModel) -> SpectralWidths:
    if isinstance(model, FiniteWindowExponential):
        return SpectralWidths(omega_u=1.0 / model.t_c, omega_c=1.0 / model.t_u)
    if isinstance(model, StationaryCW):
        # a CW stream has t_u ~ 1 / pair_rate
        return SpectralWidths(omega_u=1.0 / model.t_c, omega_c=model.pair_rate)
    raise InvalidArgument("ideal pairs have unbounded unconditional bandwidth")


@dataclass(frozen=True, eq=False)
class JointAmplitude:
    """Two-photon amplitude ``Psi(t, t')`` on a signal x idler time grid.

    ``samples[j, k]`` is the amplitude for a signal detection at
    ``grid_s.times[j]`` and an idler detection at ``grid_i.times[k]``.
    """

    grid_s: Grid
    grid_i: Grid
    samples: np.ndarray
    filtered: bool = False

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.shape != (self.grid_s.count, self.grid_i.count):
            raise InvalidArgument(
                f"samples shape {samples.shape} does not match grids "
                f"({self.grid_s.count}, {self.grid_i.count})")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def norm2(self) -> float:
        """``iint |Psi|^2 dt dt'``; the heralding probability once filtered."""
        return float(np.sum(np.abs(self.samples) ** 2)) * self.grid_s.step * self.grid_i.step

    def idler_marginal(self) -> np.ndarray:
        """Idler detection density ``int |Psi(t, t')|^2 dt`` on ``grid_i``."""
        return np.sum(np.abs(self.samples) ** 2, axis=0) * self.grid_s.step

    def signal_marginal(self) -> np.ndarray:
        return np.sum(np.abs(self.samples) ** 2, axis=1) * self.grid_i.step


def default_window_grid(model: FiniteWindowExponential,
                        step: float | None = None) -> Grid:
    """Grid covering ``[0, t_u]`` with ``step = t_c/8`` by default.

    One zero sample is added beyond each window edge so that conditional
    shapes vanish at the grid edges.
    """
    if step is None:
        step = DEFAULT_STEP_PER_TC * model.t_c
    return grid_with_step(-step, model.t_u + step, step)


def joint_amplitude(model: FiniteWindowExponential, grid_s: Grid,
                    grid_i: Grid | None = None) -> JointAmplitude:
    """Unit-normalized double-exponential amplitude on the square window.

    Samples outside ``[0, t_u]`` on either axis are exactly zero.
    """
    if not isinstance(model, FiniteWindowExponential):
        raise InvalidArgument("joint_amplitude needs a FiniteWindowExponential model")
    grid_i = grid_s if grid_i is None else grid_i
    if not same_step(grid_s.step, grid_i.step):
        raise InvalidArgument("signal and idler grids must share a step")
    if grid_s.step > MAX_STEP_PER_TC * model.t_c:
        raise ResolutionError(
            f"grid step {grid_s.step:g} does not resolve t_c={model.t_c:g}; "
            f"use step <= {MAX_STEP_PER_TC * model.t_c:g}")
    for name, g in (("signal", grid_s), ("idler", grid_i)):
        if g.origin > 0.5 * g.step or g.end < model.t_u - 0.5 * g.step:
            raise ResolutionError(
                f"{name} grid [{g.origin:g}, {g.end:g}] does not contain the window "
                f"[0, {model.t_u:g}]")

    tol = 1e-9 * grid_s.step
    t = grid_s.times
    tp = grid_i.times
    in_s = (t >= -tol) & (t <= model.t_u + tol)
    in_i = (tp >= -tol) & (tp <= model.t_u + tol)
    psi = np.exp(-np.abs(t[:, None] - tp[None, :]) / (2.0 * model.t_c))
    psi *= in_s[:, None] & in_i[None, :]
    norm2 = np.sum(psi ** 2) * grid_s.step * grid_i.step
    return JointAmplitude(grid_s, grid_i, psi / math.sqrt(norm2))


def ideal_joint_amplitude(grid: Grid) -> JointAmplitude:
    """Diagonal ridge ``delta_{t,t'} / sqrt(step * count * step)``."""
    samples = np.eye(grid.count) / (grid.step * math.sqrt(grid.count))
    return JointAmplitude(grid, grid, samples)


def g1_auto(model: StationaryCW, dt):
    """``n exp(-|dt|/2t_c) (1 + |dt|/2t_c)`` for the signal or idler field."""
    x = np.abs(dt) / (2.0 * model.t_c)
    return model.pair_rate * np.exp(-x) * (1.0 + x)


def g1_cross(model: StationaryCW, dt):
    """``sqrt(n / 2t_c) exp(-|dt|/2t_c)`` between signal and idler."""
    return math.sqrt(model.pair_rate / (2.0 * model.t_c)) * np.exp(-np.abs(dt) / (2.0 * model.t_c))


def correlation_halfwidth(joint: JointAmplitude, t: float | None = None) -> float:
    """Half-width in ``|t - t'|`` where ``|Psi|`` falls to ``1/e`` of its peak.

    Measured on the idler cut through signal time `t` (default: the
    centre of the signal grid), on the side of later idler times.
    """
    if t is None:
        t = 0.5 * (joint.grid_s.origin + joint.grid_s.end)
    row = np.abs(joint.samples[joint.grid_s.index_of(t)])
    k0 = int(np.argmax(row))
    return e_fold_halfwidth(joint.grid_i.times[k0:] - joint.grid_i.times[k0], row[k0:])


def unconditional_spectrum(joint: JointAmplitude) -> ComplexEnvelope:
    """Idler spectral density ``int |Phi(w, w')|^2 dw / 2pi`` versus ``w'``.

    The signal-axis transform is unitary, so it is summed out in the time
    domain.
    """
    g = joint.grid_i
    fgrid = g.dual()
    n = np.arange(g.count)
    phase = np.exp(1j * fgrid.origin * g.step * n)
    spec = g.step * g.count * np.fft.ifft(joint.samples * phase[None, :], axis=1)
    density = np.sum(np.abs(spec) ** 2, axis=0) * joint.grid_s.step
    return ComplexEnvelope(fgrid, density)


def e_fold_halfwidth(axis: np.ndarray, profile: np.ndarray) -> float:
    """Distance from the peak of `profile` to its first ``1/e`` crossing.

    `axis` must be increasing; the crossing is located by linear
    interpolation between samples.
    """
    profile = np.asarray(profile, dtype=float)
    k0 = int(np.argmax(profile))
    level = profile[k0] / math.e
    below = np.nonzero(profile[k0:] < level)[0]
    if below.size == 0:
        raise ResolutionError("profile never falls to 1/e of its peak on this axis")
    k = k0 + int(below[0])
    x0, x1 = axis[k - 1], axis[k]
    y0, y1 = profile[k - 1], profile[k]
    return float(x0 + (level - y0) * (x1 - x0) / (y1 - y0) - axis[k0])


def spectral_halfwidth(spectrum: ComplexEnvelope) -> float:
    """``1/e`` half-width of a real spectral density on a `FrequencyGrid`."""
    if not isinstance(spectrum.grid, FrequencyGrid):
        raise InvalidArgument("expected a frequency-domain envelope")
    return e_fold_halfwidth(spectrum.axis, spectrum.samples.real)
