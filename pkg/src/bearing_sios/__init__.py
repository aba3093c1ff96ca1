"""Rolling-bearing fault diagnosis by searching spectra for harmonic series.

Peaks of a power spectrum are projected onto a fine frequency grid; each grid
component counts the harmonics it explains (N) and their total power (E).
The components that dominate both indexes are matched against the bearing's
characteristic frequencies.
"""

from .spectrum import PowerSpectrum, TimeSeries, averaged_spectrum, power_spectrum
from .simulate import SimulationParams, add_gaussian_noise, impulse_train, simulate_bearing_signal
from .peaksearch import (PeakSearchConfig, PeakSet, find_local_peaks, moving_average_threshold,
                         peak_fraction, tune_delta)
from .sios import (SIOS, FrequencyGrid, ResolutionError, check_resolution_condition,
                   accepts_harmonic, construct_sios, make_grid, project_peak,
                   sios_from_spectrum)
from .diagnose import (BearingSpec, DiagnosisResult, SignificanceConfig, classify, detect_bfp,
                       find_significant)
from .pipeline import PipelineConfig, PipelineError, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "TimeSeries", "PowerSpectrum", "power_spectrum", "averaged_spectrum",
    "SimulationParams", "impulse_train", "add_gaussian_noise", "simulate_bearing_signal",
    "PeakSearchConfig", "PeakSet", "moving_average_threshold", "find_local_peaks",
    "peak_fraction", "tune_delta",
    "FrequencyGrid", "make_grid", "check_resolution_condition", "project_peak", "accepts_harmonic", "SIOS",
    "construct_sios", "sios_from_spectrum", "ResolutionError",
    "BearingSpec", "SignificanceConfig", "find_significant", "detect_bfp", "classify",
    "DiagnosisResult",
    "PipelineConfig", "PipelineError", "run_pipeline",
]
