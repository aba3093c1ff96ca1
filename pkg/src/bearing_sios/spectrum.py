"""Time series container and single-sided power spectra."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Sampled vibration record.

    Parameters
    ----------
    samples : ndarray
        Amplitudes (acceleration, arbitrary units).
    fs : float
        Sampling rate in Hz.
    """

    samples: np.ndarray
    fs: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D array")
        if not self.fs > 0:
            raise ValueError(f"sampling rate must be positive, got {self.fs}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "fs", float(self.fs))

    def __len__(self):
        return self.samples.size

    @property
    def duration(self):
        return self.samples.size / self.fs


@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    """Single-sided power amplitudes ``P`` at bin frequencies ``F = k * delta_s``."""

    P: np.ndarray
    F: np.ndarray
    delta_s: float

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        F = np.asarray(self.F, dtype=float)
        if P.shape != F.shape or P.ndim != 1:
            raise ValueError("P and F must be 1-D arrays of equal length")
        if not self.delta_s > 0:
            raise ValueError("delta_s must be positive")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "delta_s", float(self.delta_s))

    def __len__(self):
        return self.P.size

    @classmethod
    def from_power(cls, P, delta_s):
        """Build a spectrum whose bin ``k`` sits at ``k * delta_s``."""
        P = np.asarray(P, dtype=float)
        return cls(P, np.arange(P.size) * float(delta_s), delta_s)


def power_spectrum(signal, window="boxcar"):
    """Single-sided power spectrum of a record.

    The mean is removed first. Interior bins carry twice the two-sided power,
    DC and (for even lengths) Nyquist bins are left as they are, so that the
    bins sum to the mean square of the de-meaned record.

    Parameters
    ----------
    signal : TimeSeries
    window : {'boxcar', 'hann'}
        ``'hann'`` is for exploratory plots; the projection tolerances assume
        the rectangular default.

    Returns
    -------
    PowerSpectrum
        ``L // 2 + 1`` bins with ``delta_s = fs / L``.
    """
    x = np.asarray(signal.samples, dtype=float)
    n = x.size
    if n == 0:
        raise ValueError("cannot compute the spectrum of an empty record")
    x = x - x.mean()
    if window == "boxcar":
        X = np.fft.rfft(x)
        scale = 1.0 / n**2
    elif window == "hann":
        w = np.hanning(n)
        X = np.fft.rfft(x * w)
        # keeps the mean-square normalisation for broadband signals
        scale = 1.0 / (n * np.sum(w**2))
    else:
        raise ValueError(f"unknown window {window!r}")
    P = (X.real**2 + X.imag**2) * scale
    if n % 2 == 0:
        P[1:-1] *= 2.0
    else:
        P[1:] *= 2.0
    delta_s = signal.fs / n
    return PowerSpectrum(P, np.arange(P.size) * delta_s, delta_s)


def average_spectra(spectra):
    """Bin-wise arithmetic mean of spectra sharing resolution and length."""
    spectra = list(spectra)
    if not spectra:
        raise ValueError("need at least one spectrum to average")
    first = spectra[0]
    for s in spectra[1:]:
        if len(s) != len(first):
            raise ValueError(f"spectrum lengths differ: {len(s)} != {len(first)}")
        if not np.isclose(s.delta_s, first.delta_s, rtol=1e-12, atol=0.0):
            raise ValueError(
                f"spectrum resolutions differ: {s.delta_s} != {first.delta_s}")
    P = np.mean([s.P for s in spectra], axis=0)
    return PowerSpectrum(P, first.F.copy(), first.delta_s)


def segment_spectra(signal, n_segments, window="boxcar"):
    """Spectra of ``n_segments`` equal, non-overlapping pieces of a record.

    Trailing samples that do not fill a segment are dropped.
    """
    if n_segments < 1:
        raise ValueError("n_segments must be >= 1")
    seg_len = len(signal) // n_segments
    if seg_len < 2:
        raise ValueError("record too short for the requested number of segments")
    x = signal.samples
    return [power_spectrum(TimeSeries(x[i * seg_len:(i + 1) * seg_len], signal.fs), window)
            for i in range(n_segments)]


def averaged_spectrum(signal, n_segments, window="boxcar"):
    """Welch-style average over non-overlapping segments."""
    return average_spectra(segment_spectra(signal, n_segments, window))
