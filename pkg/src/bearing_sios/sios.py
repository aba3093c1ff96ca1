"""Frequency grid, resolution check and the structural information of a spectrum.

Every local peak is tried as a candidate fundamental. It is attached to the
grid component ``G[i]`` for which it is (nearly) an integer multiple, and
every other peak lying at an integer multiple of it is accepted onto the same
component when

    frac(F' / G[i]) < beta / alpha,        alpha = G[i] / delta_G,

where ``beta`` is the harmonic order of ``F'`` relative to the candidate.
``N[i]`` counts accepted peaks and ``E[i]`` sums their power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_EVEN_TOL = 1e-9
# ratios this close below an integer count as that integer; exact multiples
# such as k * delta_s / (f_low + i * delta_G) often land a few ulps short
_INT_TOL = 1e-9


def _floor(q):
    return np.floor(q + _INT_TOL)


class ResolutionError(ValueError):
    """The spectrum is too coarse for harmonics to project reliably."""


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Evenly spaced candidate fundamentals ``G = f_low + i * delta_G``."""

    f_low: float
    f_high: float
    theta: int
    delta_G: float
    G: np.ndarray
    closed: bool = False

    def __len__(self):
        return self.G.size

    def alpha(self, i):
        """Order of component ``i`` in units of the grid spacing."""
        return self.G[i] / self.delta_G

    def index_of(self, freq):
        """Index of the component closest to ``freq``."""
        return int(np.argmin(np.abs(self.G - freq)))


def make_grid(f_low, f_high, theta, delta_s, closed=False):
    """Grid over ``[f_low, f_high)`` (or ``[f_low, f_high]``) with spacing ``delta_s / theta``.

    When ``f_high - f_low`` is an integer multiple of the spacing the closed
    grid holds one component more than the half-open one; otherwise both stop
    at the last component below ``f_high``.
    """
    if int(theta) != theta or theta < 1:
        raise ValueError(f"theta must be a positive integer, got {theta}")
    if not delta_s > 0:
        raise ValueError(f"delta_s must be positive, got {delta_s}")
    if not f_high > f_low:
        raise ValueError(f"need f_low < f_high, got [{f_low}, {f_high}]")
    if not f_low > 0:
        raise ValueError(f"f_low must be positive, got {f_low}")
    delta_G = delta_s / theta
    q = (f_high - f_low) / delta_G
    r = round(q)
    if abs(q - r) <= _EVEN_TOL * max(1.0, q):
        count = r + 1 if closed else r
    else:
        count = math.floor(q) + 1
    G = f_low + np.arange(count) * delta_G
    return FrequencyGrid(float(f_low), float(f_high), int(theta), delta_G, G, closed)


@dataclass(frozen=True)
class ResolutionCheck:
    passed: bool
    bound: float      # largest admissible delta_s
    margin: float     # max over components and orders of beta * theta / alpha
    required_samples: int

    def __bool__(self):
        return self.passed


def check_resolution_condition(fs, f_low, delta_s):
    """Whether ``delta_s < 2 f_low**2 / fs``.

    ``margin`` is ``fs * delta_s / (2 f_low**2)`` and must stay below 1.
    ``required_samples`` is the shortest record length that passes at this
    sampling rate.
    """
    bound = 2.0 * f_low * f_low / fs
    margin = fs * delta_s / (2.0 * f_low * f_low)
    required = math.floor(fs / bound) + 1
    return ResolutionCheck(delta_s < bound, bound, margin, required)


def project_peak(freq, grid):
    """Grid component onto which a peak at ``freq`` projects.

    With ``m = floor(freq / G[k])`` (ratios within 1e-9 below an integer
    rounded up to it) the residual ``|freq - m G[k]|`` is
    minimised over all components; the lowest index wins ties. Returns
    ``(index, residual)``, or ``(None, residual)`` when the smallest residual
    is not below ``delta_G``.
    """
    if not freq > 0:
        raise ValueError(f"peak frequency must be positive, got {freq}")
    G = grid.G
    n = G.size
    m_lo = max(1, math.floor(freq / G[-1]))
    m_hi = math.floor(freq / G[0] + _INT_TOL)
    if m_hi - m_lo + 1 > n // 4:
        cand = np.arange(n)
    else:
        # for each multiple m the best component is the largest G <= freq / m
        ms = np.arange(m_lo, m_hi + 1, dtype=float)
        idx = np.searchsorted(G, freq / ms, side="right") - 1
        above = np.searchsorted(G, freq, side="right")
        cand = np.concatenate((idx - 1, idx, idx + 1, [above]))
        cand = np.unique(cand[(cand >= 0) & (cand < n)])
    g = G[cand]
    res = np.abs(freq - _floor(freq / g) * g)
    j = int(np.argmin(res))
    best = float(res[j])
    if best < grid.delta_G:
        return int(cand[j]), best
    return None, best


def accepts_harmonic(freq, grid, i, beta):
    """Whether a peak at ``freq`` of harmonic order ``beta`` projects onto component ``i``.

    The test is ``frac(freq / G[i]) < beta / alpha(i)``, with ratios just
    below an integer taken as that integer (fraction ~0); it holds for every
    harmonic of ``G[i] + b`` with ``0 <= b < delta_G`` as long as
    ``beta < alpha(i)``.
    """
    q = np.asarray(freq, dtype=float) / grid.G[i]
    return (q - _floor(q)) < np.asarray(beta, dtype=float) / grid.alpha(i)


@dataclass(frozen=True, eq=False)
class SIOS:
    """Harmonic count ``N`` and harmonic power ``E`` per grid component.

    ``pairs`` lists accepted ``(component, peak bin)`` pairs in accumulation
    order; it backs the evidence reported by the diagnosis.
    """

    grid: FrequencyGrid
    N: np.ndarray
    E: np.ndarray
    pairs: np.ndarray

    @property
    def G(self):
        return self.grid.G

    def nonzero(self):
        return np.flatnonzero(self.N)


def _harmonic_members(freqs, c, delta_s, beta_max):
    """Indices of peaks at integer multiples ``beta <= beta_max`` of ``c`` and their orders.

    A ratio counts as an integer when it is within half a bin (relative to
    ``c``) of one.
    """
    tol = 0.5 * delta_s / c
    betas = np.arange(1, beta_max + 1, dtype=float)
    pad = 0.5 * delta_s * (1.0 + 1e-6) + 1e-12 * betas * c
    lo = np.searchsorted(freqs, betas * c - pad, side="left")
    hi = np.searchsorted(freqs, betas * c + pad, side="right")
    has = hi > lo
    if not has.any():
        return np.empty(0, dtype=int), np.empty(0)
    lo, hi = lo[has], hi[has]
    counts = hi - lo
    starts = np.repeat(lo - np.cumsum(counts) + counts, counts)
    idx = starts + np.arange(counts.sum())
    idx = np.unique(idx)
    r = freqs[idx] / c
    order = np.round(r)
    ok = (np.abs(r - order) < tol) & (order >= 1) & (order <= beta_max)
    return idx[ok], order[ok]


def construct_sios(peaks, grid, fs, dedupe=True, check=True):
    """Project spectral peaks onto ``grid``.

    Parameters
    ----------
    peaks : PeakSet
    grid : FrequencyGrid
    fs : float
        Sampling rate of the record the spectrum came from.
    dedupe : bool
        Count each peak at most once per component. With ``False`` a peak is
        counted again for every candidate fundamental that accepts it.
    check : bool
        Refuse to run when the resolution condition fails.

    Returns
    -------
    SIOS
    """
    spec = peaks.spectrum
    delta_s = spec.delta_s
    if check:
        rc = check_resolution_condition(fs, grid.f_low, delta_s)
        if not rc.passed:
            raise ResolutionError(
                f"spectrum resolution {delta_s:.6g} Hz is not below "
                f"{rc.bound:.6g} Hz for f_low={grid.f_low:g} Hz at fs={fs:g} Hz; "
                f"use at least {rc.required_samples} samples")
    bins = peaks.indices
    freqs = spec.F[bins]
    n_comp = len(grid)
    N = np.zeros(n_comp, dtype=np.int64)
    E = np.zeros(n_comp)
    pairs = []
    seen = set()
    for c in freqs:
        if c <= 0:
            continue
        ig, _ = project_peak(c, grid)
        if ig is None:
            continue
        beta_max = math.floor(fs / (2.0 * c))
        if beta_max < 1:
            continue
        members, order = _harmonic_members(freqs, c, delta_s, beta_max)
        if members.size == 0:
            continue
        accepted = members[accepts_harmonic(freqs[members], grid, ig, order)]
        for p in accepted:
            key = (ig, int(p))
            if dedupe:
                if key in seen:
                    continue
                seen.add(key)
            pairs.append((ig, int(bins[p])))
            N[ig] += 1
    pairs = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    if pairs.size:
        # sum powers per component in (component, bin) order for determinism
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        for ig, b in pairs[order]:
            E[ig] += spec.P[b]
    return SIOS(grid, N, E, pairs)


def sios_from_spectrum(spectrum, fs, f_low, f_high, theta=10, peak_cfg=None, **kwargs):
    """Peak search followed by projection, with the default peak settings."""
    from .peaksearch import PeakSearchConfig, find_local_peaks

    if peak_cfg is None:
        peak_cfg = PeakSearchConfig.from_bandwidth(spectrum.delta_s)
    peaks = find_local_peaks(spectrum, peak_cfg)
    grid = make_grid(f_low, f_high, theta, spectrum.delta_s)
    return construct_sios(peaks, grid, fs, **kwargs)
