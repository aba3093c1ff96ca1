"""Local peaks above a moving-average threshold.

A bin ``k`` is a local peak when its power exceeds both neighbours and the
threshold ``mean(P[k-l : k+l+1]) + delta``. All comparisons are strict.
Bins closer than ``l`` to either end of the spectrum are never peaks.

Indices here are 0-based, so candidate bins run from ``l`` to ``L_F - 1 - l``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: bandwidth spanned by the moving-average window in the reference setup
DEFAULT_WINDOW_HZ = 114.0
#: peak fraction band recommended for tuning ``delta``
TARGET_FRACTION = (0.005, 0.03)
#: fraction aimed for inside that band; fewer peaks keep noise projections down
DEFAULT_AIM = 0.006


@dataclass(frozen=True)
class PeakSearchConfig:
    """Half window ``l`` (bins) and threshold offset ``delta`` (power units)."""

    half_window: int
    delta: float = 0.0

    def __post_init__(self):
        if int(self.half_window) != self.half_window or self.half_window < 1:
            raise ValueError(f"half_window must be an integer >= 1, got {self.half_window}")
        if not self.delta >= 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        object.__setattr__(self, "half_window", int(self.half_window))
        object.__setattr__(self, "delta", float(self.delta))

    @classmethod
    def from_bandwidth(cls, delta_s, bandwidth_hz=DEFAULT_WINDOW_HZ, delta=0.0):
        """Choose ``l`` so the ``2l + 1`` window spans about ``bandwidth_hz``."""
        half = max(1, int(round(0.5 * bandwidth_hz / delta_s)))
        return cls(half, delta)


@dataclass(frozen=True, eq=False)
class PeakSet:
    """Indicator of accepted peaks over the bins of ``spectrum``."""

    indicator: np.ndarray
    spectrum: object

    @property
    def indices(self):
        return np.flatnonzero(self.indicator)

    @property
    def frequencies(self):
        return self.spectrum.F[self.indices]

    @property
    def powers(self):
        return self.spectrum.P[self.indices]

    def __len__(self):
        return int(np.count_nonzero(self.indicator))


def _check_length(n_bins, half_window):
    if n_bins < 2 * half_window + 3:
        raise ValueError(
            f"spectrum has {n_bins} bins, need at least {2 * half_window + 3} "
            f"for half window {half_window}")


def moving_average_threshold(spectrum, cfg, k):
    """Threshold at bin ``k``: window mean plus ``delta`` (correctly rounded sum)."""
    P = spectrum.P
    l = cfg.half_window
    if not l <= k <= P.size - 1 - l:
        raise IndexError(f"bin {k} outside [{l}, {P.size - 1 - l}]")
    return math.fsum(P[k - l:k + l + 1]) / (2 * l + 1) + cfg.delta


def _window_means(P, l):
    # means for k in [l, n-1-l] via a running sum
    c = np.concatenate(([0.0], np.cumsum(P)))
    w = 2 * l + 1
    return (c[w:] - c[:-w]) / w


def _threshold_margins(P, l):
    """Candidate bins (strict local maxima) and ``P[k] - window_mean[k]`` for each.

    The running-sum mean is only trusted away from ties; bins whose margin is
    within rounding distance of ``delta`` are settled exactly in
    ``find_local_peaks``.
    """
    n = P.size
    ks = np.arange(l, n - l)
    ks = ks[(P[ks] > P[ks - 1]) & (P[ks] > P[ks + 1])]
    means = _window_means(P, l)[ks - l]
    return ks, P[ks] - means


def find_local_peaks(spectrum, cfg):
    """Apply the neighbour and threshold tests to every eligible bin.

    Returns
    -------
    PeakSet
    """
    P = spectrum.P
    l = cfg.half_window
    _check_length(P.size, l)
    ks, margins = _threshold_margins(P, l)
    # running sums may be off by a few ulps of the cumulative total
    tol = 1e-9 * (float(np.sum(np.abs(P))) + cfg.delta) + 1e-300
    accept = margins > cfg.delta
    unsure = np.abs(margins - cfg.delta) <= tol
    for i in np.flatnonzero(unsure):
        k = int(ks[i])
        accept[i] = P[k] > moving_average_threshold(spectrum, cfg, k)
    indicator = np.zeros(P.size, dtype=bool)
    indicator[ks[accept]] = True
    return PeakSet(indicator, spectrum)


def peak_fraction(peaks):
    """Share of spectrum bins flagged as peaks."""
    n = peaks.indicator.size
    return len(peaks) / n if n else 0.0


def tune_delta(spectrum, half_window, target=TARGET_FRACTION, aim=DEFAULT_AIM, n_grid=400):
    """Pick ``delta`` on a log grid so the peak fraction lands in ``target``.

    The grid spans the positive threshold margins of the local maxima (plus
    ``delta = 0``). Among grid values whose peak fraction lies inside
    ``target`` the one closest to ``aim`` is returned; when none does, the
    value whose fraction is closest to the band.

    Returns
    -------
    delta : float
    fraction : float
        Peak fraction reached with that ``delta``.
    """
    lo_t, hi_t = target
    P = spectrum.P
    _check_length(P.size, half_window)
    _, margins = _threshold_margins(P, half_window)
    n = P.size
    positive = margins[margins > 0]
    if positive.size == 0:
        return 0.0, 0.0
    grid = np.concatenate(([0.0], np.geomspace(positive.min() * 0.5, positive.max(), n_grid)))
    sorted_m = np.sort(margins)
    # number of margins strictly above each delta
    counts = sorted_m.size - np.searchsorted(sorted_m, grid, side="right")
    fractions = counts / n
    inside = (fractions >= lo_t) & (fractions <= hi_t)
    if inside.any():
        dist = np.where(inside, np.abs(fractions - aim), np.inf)
    else:
        dist = np.where(fractions < lo_t, lo_t - fractions, fractions - hi_t)
    i = int(np.argmin(dist))
    delta = float(grid[i])
    frac = peak_fraction(find_local_peaks(spectrum, PeakSearchConfig(half_window, delta)))
    return delta, frac
