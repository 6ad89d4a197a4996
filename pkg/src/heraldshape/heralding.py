"""Heralded photon shaping by filtering the idler and detecting it in time.

The idler arm of a joint amplitude is convolved with the filter impulse
response; slicing the filtered amplitude at an idler detection time ``t'``
gives the conditional signal shape, and the filtered norm is the heralding
probability.  Closed forms for the stationary (CW) source, the second-order
cross-correlation, detector jitter and the regime checks live here too.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy import fft as sp_fft

from .errors import InvalidArgument, NoHeraldError, RegimeWarning, SnapWarning, StateError
from .filters import SpectralFilter, filter_kernel
from .numerics import ComplexEnvelope, Grid, to_frequency_domain
from .sources import JointAmplitude

#: slices with a smaller L2 norm are treated as "no herald"
NO_HERALD_NORM = 1e-12

#: "much smaller than" thresholds on a ratio
WARN_RATIO = 0.2
CLEAN_RATIO = 0.05

#: frequencies closer than this (relative) to t_c = t_m use the limit form
DEGENERATE_TOL = 1e-6

_CHUNK_BYTES = 64 * 2**20


# ---------------------------------------------------------------------------
# filtering and conditional shapes
# ---------------------------------------------------------------------------

def apply_filter(joint: JointAmplitude, filt: SpectralFilter,
                 method: str = "frequency") -> JointAmplitude:
    """Filter the idler photon: ``Psi(t, t') -> int f(tau) Psi(t, t' - tau) dtau``.

    The idler axis of the result is extended by the support of the impulse
    response so the full linear convolution is kept.  ``method="frequency"``
    multiplies row spectra by the filter transmission (fast);
    ``method="time"`` convolves each row directly.
    """
    if joint.filtered:
        raise StateError("joint amplitude has already been filtered")
    g = joint.grid_i
    kernel = filter_kernel(filt, g.step)
    n_out = g.count + kernel.grid.count - 1
    grid_out = Grid(g.origin + kernel.grid.origin, g.step, n_out, g.unit_label)

    if method == "time":
        out = np.empty((joint.grid_s.count, n_out), dtype=complex)
        for j, row in enumerate(joint.samples):
            out[j] = np.convolve(row, kernel.samples)
        out *= g.step
    elif method == "frequency":
        out = np.empty((joint.grid_s.count, n_out), dtype=complex)
        for rows, spec, h in _row_spectra(joint, kernel):
            out[rows] = sp_fft.ifft(spec * h, axis=1)[:, :n_out]
    else:
        raise InvalidArgument(f"unknown filtering method {method!r}")
    return JointAmplitude(joint.grid_s, grid_out, out, filtered=True)


def _row_spectra(joint: JointAmplitude, kernel: ComplexEnvelope):
    """Yield ``(row_slice, X, H)`` with zero-padded row and kernel transforms.

    Both transforms already carry one factor of the grid step, so ``X * H``
    is the transform of the sampled linear convolution integral.
    """
    step = joint.grid_i.step
    n_out = joint.grid_i.count + kernel.grid.count - 1
    n = sp_fft.next_fast_len(n_out)
    h = step * sp_fft.fft(kernel.samples, n)
    chunk = max(1, _CHUNK_BYTES // (16 * n))
    for j0 in range(0, joint.grid_s.count, chunk):
        rows = slice(j0, min(j0 + chunk, joint.grid_s.count))
        yield rows, sp_fft.fft(joint.samples[rows], n, axis=1), h[None, :]


def heralding_probability(joint: JointAmplitude, filt: SpectralFilter) -> float:
    """Fraction of idler photons transmitted, ``iint |F(w') Phi(w, w')|^2``.

    Evaluated in the frequency domain.  The transmission is the transform of
    the sampled impulse response so that this route and the filtered
    time-domain norm describe the same discrete filter.
    """
    if joint.filtered:
        raise StateError("heralding_probability expects an unfiltered joint amplitude")
    kernel = filter_kernel(filt, joint.grid_i.step)
    n = sp_fft.next_fast_len(joint.grid_i.count + kernel.grid.count - 1)
    dw = 2.0 * math.pi / (n * joint.grid_i.step)
    total = 0.0
    for _, spec, h in _row_spectra(joint, kernel):
        # spec * step = Phi(t, w'), h = F(w'); the signal axis is summed in time
        total += float(np.sum(np.abs(spec * h) ** 2)) * joint.grid_i.step ** 2
    return total * joint.grid_s.step * dw / (2.0 * math.pi)


@dataclass(frozen=True)
class HeraldResult:
    """Signal photon announced by an idler detection at ``herald_instant``."""

    herald_instant: float
    shape: ComplexEnvelope
    raw_norm: float
    notes: tuple[str, ...] = field(default=())

    @property
    def herald_density(self) -> float:
        """Probability density of an idler click at the herald instant."""
        return self.raw_norm ** 2


def conditional_shape(joint: JointAmplitude, t_prime: float) -> HeraldResult:
    """Normalized signal shape heralded by an idler click at `t_prime`.

    Off-grid instants snap to the nearest idler sample with a `SnapWarning`.
    """
    g = joint.grid_i
    if not g.contains(t_prime):
        raise InvalidArgument(f"herald instant {t_prime:g} lies outside the idler grid "
                              f"[{g.origin:g}, {g.end:g}]")
    k = g.index_of(t_prime)
    snapped = g.origin + k * g.step
    notes: tuple[str, ...] = ()
    if abs(snapped - t_prime) > 1e-9 * g.step:
        warnings.warn(f"herald instant {t_prime:g} snapped to grid sample {snapped:g}",
                      SnapWarning, stacklevel=2)
        notes = (f"snapped {t_prime:g} -> {snapped:g}",)
    column = joint.samples[:, k]
    raw_norm = math.sqrt(float(np.sum(np.abs(column) ** 2)) * joint.grid_s.step)
    if raw_norm < NO_HERALD_NORM:
        raise NoHeraldError(f"detection at t'={snapped:g} has negligible probability")
    shape = ComplexEnvelope(joint.grid_s, column / raw_norm, notes)
    return HeraldResult(snapped, shape, raw_norm, notes)


def translated_overlap(a: HeraldResult, b: HeraldResult) -> float:
    """``|<a|b>|`` after shifting `b` so both herald instants coincide.

    Both shapes must live on the same signal grid.
    """
    ga, gb = a.shape.grid, b.shape.grid
    if ga != gb:
        raise InvalidArgument("shapes must share a signal grid")
    shift = int(round((b.herald_instant - a.herald_instant) / ga.step))
    x, y = a.shape.samples, b.shape.samples
    n = ga.count
    if abs(shift) >= n:
        return 0.0
    # a(t) against b(t + shift)
    if shift >= 0:
        val = np.vdot(x[:n - shift], y[shift:])
    else:
        val = np.vdot(x[-shift:], y[:n + shift])
    return float(abs(val) * ga.step)


# ---------------------------------------------------------------------------
# heralding-probability estimates and stationary closed forms
# ---------------------------------------------------------------------------

def heralding_probability_estimate(omega_m: float, omega_u: float) -> float:
    """Order-of-magnitude estimate ``R ~ omega_m / omega_u``, clamped to [0, 1]."""
    if not (omega_m >= 0 and omega_u > 0):
        raise InvalidArgument("bandwidths must be positive")
    if omega_m > omega_u:
        warnings.warn(f"filter passband {omega_m:g} exceeds the unconditional bandwidth "
                      f"{omega_u:g}; the estimate saturates", RegimeWarning, stacklevel=2)
    return min(omega_m / omega_u, 1.0)


class ModulationEstimate(NamedTuple):
    rate: float
    enhancement: float


def temporal_modulation_rate_estimate(t_m: float, t_u: float, omega_f: float,
                                      t_c: float) -> ModulationEstimate:
    """Heralding rate ``(t_m/t_u) omega_f t_c`` of nonlocal temporal modulation.

    `omega_f` is the spectral acceptance of the frequency-resolving
    detector.  ``enhancement = 1/(omega_f t_m)`` is the advantage of
    spectral filtering over this scheme.
    """
    if not (t_m > 0 and t_u > 0 and t_c > 0 and omega_f >= 0):
        raise InvalidArgument("times must be positive and omega_f non-negative")
    rate = (t_m / t_u) * omega_f * t_c
    enhancement = math.inf if omega_f == 0 else 1.0 / (omega_f * t_m)
    return ModulationEstimate(rate, enhancement)


def cw_heralding_probability(t_c: float, t_m: float) -> float:
    """Transmitted fraction of a CW idler stream through the Lorentzian filter.

    ``(2/t_c + 1/t_m) / (t_m (1/t_c + 1/t_m)^2)``, i.e. ``(2e+1)/(e+1)^2``
    with ``e = t_m/t_c``.
    """
    if not (t_c > 0 and t_m > 0):
        raise InvalidArgument("t_c and t_m must be positive")
    return (2.0 / t_c + 1.0 / t_m) / (t_m * (1.0 / t_c + 1.0 / t_m) ** 2)


def cw_heralding_asymptotic(t_c: float, t_m: float) -> float:
    """``2 t_c / t_m``, valid for ``t_m >> t_c``."""
    return 2.0 * t_c / t_m


def cw_conditional_shape(t, t_prime, t_c: float, t_m: float):
    """Non-normalized heralded amplitude for a CW source and Lorentzian filter.

    Equal to 1 at ``t = t'``; decays as ``exp(-(t-t')/2t_c)`` after the
    herald and rises as ``exp(-(t'-t)/2t_m)`` (smoothed over ``t_c``)
    before it.  At ``t_c = t_m`` the removable singularity is replaced by
    ``(1 - s/t_c) exp(s/2t_c)`` with ``s = t - t'``.
    """
    s = np.asarray(t, dtype=float) - np.asarray(t_prime, dtype=float)
    kappa = t_c / t_m
    before = np.minimum(s, 0.0)
    fast = np.exp(before / (2.0 * t_c))
    if abs(1.0 - kappa) < DEGENERATE_TOL:
        rising = (1.0 - before / t_c) * fast
    else:
        rising = (2.0 * np.exp(before / (2.0 * t_m)) - (1.0 + kappa) * fast) / (1.0 - kappa)
    after = np.exp(-np.maximum(s, 0.0) / (2.0 * t_c))
    out = np.where(s > 0, after, rising)
    return out if out.ndim else float(out)


def g2_cross(t, t_prime, pair_rate: float, t_c: float, t_m: float):
    """Normalized signal / filtered-idler cross-correlation ``g2(t, t')``.

    ``1 + psi(t|t')^2 / (2 n t_c (1 + 2 t_m/t_c))``: the accidental floor 1
    plus the true-pair term, whose shape is the squared heralded amplitude.
    """
    if not (pair_rate > 0 and t_c > 0 and t_m > 0):
        raise InvalidArgument("pair_rate, t_c and t_m must be positive")
    amplitude = 1.0 / (2.0 * pair_rate * t_c) / (1.0 + 2.0 * t_m / t_c)
    return 1.0 + amplitude * np.square(cw_conditional_shape(t, t_prime, t_c, t_m))


# ---------------------------------------------------------------------------
# imperfections
# ---------------------------------------------------------------------------

def jitter_kernel(step: float, t_d: float) -> np.ndarray:
    """Unit-area box of width `t_d`, averaged over grid cells; odd length."""
    if t_d < 0:
        raise InvalidArgument(f"detector resolution must be non-negative, got {t_d}")
    if t_d == 0:
        return np.ones(1)
    half = 0.5 * t_d
    j_max = int(math.ceil(half / step - 0.5))
    j = np.arange(-j_max, j_max + 1)
    lo = np.maximum((j - 0.5) * step, -half)
    hi = np.minimum((j + 0.5) * step, half)
    w = np.clip(hi - lo, 0.0, None)
    return w / w.sum()


def apply_detector_jitter(intensity: np.ndarray, step: float, t_d: float) -> np.ndarray:
    """Blur an intensity profile by a uniform timing uncertainty of width `t_d`.

    The box is centred, so the profile is not shifted; total intensity is
    preserved as long as the profile vanishes at the grid edges.
    """
    kernel = jitter_kernel(step, t_d)
    return np.convolve(np.asarray(intensity, dtype=float), kernel, mode="same")


def intensity_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Mode overlap ``(sum sqrt(a b))^2 / (sum a sum b)`` of two intensity profiles."""
    a = np.clip(np.asarray(a, dtype=float), 0.0, None)
    b = np.clip(np.asarray(b, dtype=float), 0.0, None)
    return float(np.sum(np.sqrt(a * b)) ** 2 / (np.sum(a) * np.sum(b)))


def heralded_spectrum_shift(omega_d: float) -> float:
    """Spectral shift of the heralded photon for a filter drift `omega_d`.

    Signal and idler frequencies are anti-correlated, so the signal
    spectrum moves opposite to the filter.
    """
    return -omega_d


def spectral_centroid(shape: ComplexEnvelope) -> float:
    """Intensity-weighted mean angular frequency of a time-domain shape."""
    spec = to_frequency_domain(shape)
    power = np.abs(spec.samples) ** 2
    return float(np.sum(spec.axis * power) / np.sum(power))


# ---------------------------------------------------------------------------
# regime validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeParams:
    """Time scales of a shaping experiment in one consistent unit.

    ``pair_rate`` is a rate and ``drift`` an angular frequency in the
    inverse of that unit.  Unknown quantities are left as None.
    """

    t_m: float
    t_c: Optional[float] = None
    t_u: Optional[float] = None
    t_d: Optional[float] = None
    drift: Optional[float] = None
    pair_rate: Optional[float] = None
    t_coh: Optional[float] = None

    def __post_init__(self):
        for name in ("t_m", "t_c", "t_u", "pair_rate", "t_coh"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise InvalidArgument(f"{name} must be positive, got {v}")
        for name in ("t_d", "drift"):
            v = getattr(self, name)
            if v is not None and not v >= 0:
                raise InvalidArgument(f"{name} must be non-negative, got {v}")


@dataclass(frozen=True)
class RegimeCheck:
    condition: str
    satisfied: bool
    margin: float

    @property
    def level(self) -> str:
        if self.margin <= CLEAN_RATIO:
            return "pass"
        return "warn" if self.satisfied else "fail"


def validate_regime(params: RegimeParams) -> list[RegimeCheck]:
    """Evaluate every "much smaller than" condition for which data is given.

    Each condition is a ratio that must not exceed ``WARN_RATIO``; ratios at
    or below ``CLEAN_RATIO`` pass cleanly.
    """
    p = params
    ratios = []
    if p.t_c is not None:
        ratios.append(("t_c << t_m", p.t_c / p.t_m))
    if p.t_d is not None:
        ratios.append(("t_d << t_m", p.t_d / p.t_m))
    if p.t_u is not None:
        ratios.append(("t_m << t_u", p.t_m / p.t_u))
    if p.pair_rate is not None:
        ratios.append(("t_m << 1/n", p.pair_rate * p.t_m))
    if p.t_coh is not None:
        ratios.append(("t_m << t_coh", p.t_m / p.t_coh))
    if p.drift is not None:
        ratios.append(("drift << 1/t_m", p.drift * p.t_m))
    # tiny slack so that exact boundary cases such as 7/35 pass
    return [RegimeCheck(name, r <= WARN_RATIO * (1 + 1e-12), r) for name, r in ratios]
