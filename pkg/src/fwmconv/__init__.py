"""Fourier-optics model of Gaussian-to-annular mode conversion in four-wave mixing.

A Gaussian beam passes an annular aperture, propagates to the far field, is
shaped by the gain soft aperture of a four-wave-mixing cell and is Fourier
transformed by a lens. Slices of the resulting patterns are fitted with the
annular Airy law.
"""

from .apertures import (AnnulusSpec, GaussianSpec, Orientation, SlitSpec, annulus_mask,
                        annulus_transmission, apply_mask, circ, gaussian_field, slit_mask,
                        slit_transmission, waist_from_fwhm)
from .config import (PRESETS, STAGES, ConfigError, ScenarioConfig, dump_config, load_config,
                     parse_config, preset)
from .gain import (CELL_LENGTH_UM, TARGET_GAIN, DkModelKind, ExternalDk, GainParameters,
                   PhaseMismatchMap, RadialQuadratic, apply_soft_aperture, build_dk_map,
                   gain_conjugate, gain_probe, half_max_band, matched_eps_l, soft_aperture_mask)
from .grid import (ComplexField2D, GridSpec, OpticalConfig, Plane, crop_center, make_grid,
                   total_power, zero_pad)
from .io import export_image, read_pgm, read_profile_csv, write_profile_csv
from .pipeline import SimulationResult, StageError, run_scenario, write_outputs
from .profiles import (AiryFit, DegenerateProfileError, FitConvergenceError, ProfileComparison,
                       RadialProfile, annular_airy_intensity, compare_profiles, extract_slice,
                       first_zero, fit_airy, half_max_radius, heuristic_guess)
from .propagation import (PropagationResult, annular_ring_ft, centered_fft2, fraunhofer_numeric,
                          gaussian_annulus_farfield, gaussian_annulus_farfield_convolution,
                          gaussian_farfield, gaussian_ft, jinc_amplitude, lens_ft, output_pitch)

__version__ = "0.1.0"
