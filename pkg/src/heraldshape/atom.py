"""Two-level atom excited by a shaped single photon in free space.

The atom is treated like a single-sided cavity being loaded by the pulse.
With radiative (intensity) lifetime ``T`` the atomic amplitude obeys

    c'(t) = -c(t) / 2T + psi(t) / sqrt(T)

and the scattered field is ``psi~ = c / sqrt(T) - psi``, i.e.

    psi~(t) = (1/T) int_{-inf}^t exp(-(t - t') / 2T) psi(t') dt' - psi(t).

The excitation probability ``p(t) = int_{-inf}^t (|psi|^2 - |psi~|^2)``
equals ``|c(t)|^2``.  A rising exponential ``exp(t/2T)`` ending at ``t=0``
is absorbed completely.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import ContainmentError, InvalidArgument, ResolutionError
from .numerics import ComplexEnvelope, Grid, cumulative_trapezoid

#: |psi|^2 at the grid edges must be below this fraction of its peak
EDGE_INTENSITY = 1e-6

#: p must have relaxed below this level by the end of the grid
RELAXED = 1e-3


@dataclass(frozen=True)
class AtomModel:
    lifetime: float

    def __post_init__(self):
        if not self.lifetime > 0:
            raise InvalidArgument(f"lifetime must be positive, got {self.lifetime}")


@dataclass(frozen=True, eq=False)
class ExcitationCurve:
    grid: Grid
    p: np.ndarray
    p_max: float
    t_peak: float


def _check_pulse(psi: ComplexEnvelope, atom: AtomModel) -> None:
    if not isinstance(psi.grid, Grid):
        raise InvalidArgument("expected a time-domain pulse")
    if psi.grid.step > atom.lifetime / 8:
        raise ResolutionError(
            f"step {psi.grid.step:g} does not resolve the atomic lifetime {atom.lifetime:g}")
    if abs(psi.norm - 1.0) > 1e-6:
        raise InvalidArgument(f"pulse must be unit-normalized (norm {psi.norm:.8g})")


def atomic_amplitude(psi: ComplexEnvelope, atom: AtomModel) -> np.ndarray:
    """Excited-state amplitude ``c(t)``, starting from the ground state.

    The pulse is taken piecewise linear between samples and the decay is
    integrated exactly over each step.
    """
    h = psi.grid.step
    lam = 0.5 / atom.lifetime
    x = lam * h
    decay = math.exp(-x)
    a = -math.expm1(-x) / lam                          # int_0^h e^{-lam v} dv
    b = (-math.expm1(-x) - x * decay) / lam ** 2       # int_0^h v e^{-lam v} dv
    w_prev, w_next = b / h, a - b / h
    coeffs = np.array([w_next, w_prev]) / math.sqrt(atom.lifetime)
    return signal.lfilter(coeffs, [1.0, -decay], psi.samples)


def scattered_shape(psi: ComplexEnvelope, atom: AtomModel) -> ComplexEnvelope:
    """Field scattered by the atom; carries the same energy as `psi`."""
    _check_pulse(psi, atom)
    c = atomic_amplitude(psi, atom)
    return ComplexEnvelope(psi.grid, c / math.sqrt(atom.lifetime) - psi.samples, psi.notes)


def excitation_curve(psi: ComplexEnvelope, atom: AtomModel) -> ExcitationCurve:
    """Excitation probability ``p(t)`` of an atom driven by `psi`.

    Raises `ContainmentError` if the pulse is truncated by the grid.
    """
    _check_pulse(psi, atom)
    intensity = psi.intensity
    peak = intensity.max()
    if max(intensity[0], intensity[-1]) > EDGE_INTENSITY * peak:
        raise ContainmentError(
            "pulse is truncated by the grid: edge intensity "
            f"{max(intensity[0], intensity[-1]) / peak:.2e} of peak exceeds {EDGE_INTENSITY:g}")
    c = atomic_amplitude(psi, atom)
    p = np.abs(c) ** 2
    if p[-1] > RELAXED:
        warnings.warn(f"atom still excited at the end of the grid (p={p[-1]:.2e}); "
                      "extend the grid to see full re-emission", stacklevel=2)
    k = int(np.argmax(p))
    return ExcitationCurve(psi.grid, p, float(p[k]), float(psi.grid.times[k]))


def running_excitation(psi: ComplexEnvelope, atom: AtomModel) -> np.ndarray:
    """``int_{-inf}^t (|psi|^2 - |psi~|^2) dt'`` by cumulative trapezoid.

    Independent of `excitation_curve`'s amplitude route; the two agree to
    quadrature accuracy.
    """
    scattered = scattered_shape(psi, atom)
    return cumulative_trapezoid(psi.intensity - scattered.intensity, psi.grid.step)


def p_max_closed_form(epsilon: float) -> float:
    """Peak excitation ``e / (e + 1/2)`` by the CW heralded shape, ``e = t_m / t_c``."""
    if not epsilon > 0:
        raise InvalidArgument(f"epsilon must be positive, got {epsilon}")
    return epsilon / (epsilon + 0.5)
