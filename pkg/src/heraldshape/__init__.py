"""Heralded single-photon shaping by nonlocal spectral filtering."""

from .atom import (AtomModel, ExcitationCurve, atomic_amplitude, excitation_curve,
                   p_max_closed_form, running_excitation, scattered_shape)
from .errors import (AliasingWarning, ConfigError, ContainmentError, InvalidArgument,
                     NoHeraldError, RegimeWarning, ResolutionError, ShapingError,
                     SnapWarning, StateError)
from .filters import (CausalityReport, Lorentzian, SpectralFilter, Tabulated,
                      check_causality, drifted, filter_kernel, impulse_response,
                      load_tabulated, lorentzian, sample_filter, save_tabulated, tabulated)
from .heralding import (HeraldResult, ModulationEstimate, RegimeCheck, RegimeParams,
                        apply_detector_jitter, apply_filter, conditional_shape,
                        cw_conditional_shape, cw_heralding_asymptotic,
                        cw_heralding_probability, g2_cross, heralded_spectrum_shift,
                        heralding_probability, heralding_probability_estimate,
                        intensity_fidelity, jitter_kernel, spectral_centroid,
                        temporal_modulation_rate_estimate, translated_overlap,
                        validate_regime)
from .numerics import (ComplexEnvelope, FrequencyGrid, Grid, convolve,
                       evaluate_inverse_transform, grid_with_step, l2_norm, make_grid,
                       overlap, to_frequency_domain, to_time_domain)
from .sources import (FiniteWindowExponential, IdealCorrelated, JointAmplitude,
                      SpectralWidths, StationaryCW, g1_auto, g1_cross,
                      ideal_joint_amplitude, joint_amplitude, spectral_widths)

__version__ = "0.1.0"
