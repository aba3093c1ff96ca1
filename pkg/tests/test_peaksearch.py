import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from bearing_sios.peaksearch import (PeakSearchConfig, find_local_peaks, moving_average_threshold,
                                     peak_fraction, tune_delta)
from bearing_sios.spectrum import PowerSpectrum
from oracles import local_peaks

power = st.floats(0, 1e3, allow_nan=False, allow_infinity=False)


@st.composite
def spectra(draw, max_bins=200):
    l = draw(st.integers(1, 6))
    P = draw(arrays(float, st.integers(2 * l + 3, max_bins), elements=power))
    return PowerSpectrum.from_power(P, 0.5), l


def test_single_spike():
    P = np.zeros(21)
    P[10] = 1.0
    peaks = find_local_peaks(PowerSpectrum.from_power(P, 1.0), PeakSearchConfig(2, 0.0))
    assert peaks.indices.tolist() == [10]
    assert moving_average_threshold(peaks.spectrum, PeakSearchConfig(2, 0.1), 10) == pytest.approx(0.3)
    # 1.0 > 0.2 + delta fails once delta reaches 0.8
    assert len(find_local_peaks(peaks.spectrum, PeakSearchConfig(2, 0.8))) == 0
    assert len(find_local_peaks(peaks.spectrum, PeakSearchConfig(2, 0.79))) == 1


def test_plateau_and_edges():
    P = np.array([5.0, 0, 0, 3, 3, 0, 0, 4, 0, 0, 9])
    peaks = find_local_peaks(PowerSpectrum.from_power(P, 1.0), PeakSearchConfig(1, 0.0))
    # the plateau at 3-4 and both end bins never qualify
    assert peaks.indices.tolist() == [7]


def test_too_short():
    with pytest.raises(ValueError):
        find_local_peaks(PowerSpectrum.from_power(np.ones(6), 1.0), PeakSearchConfig(2, 0))
    with pytest.raises(IndexError):
        moving_average_threshold(PowerSpectrum.from_power(np.ones(10), 1.0), PeakSearchConfig(2), 1)


@pytest.mark.parametrize("kw", [dict(half_window=0), dict(half_window=2.5), dict(half_window=2, delta=-1)])
def test_bad_config(kw):
    with pytest.raises(ValueError):
        PeakSearchConfig(**kw)


def test_from_bandwidth():
    assert PeakSearchConfig.from_bandwidth(12000 / 2**15).half_window == 156
    assert PeakSearchConfig.from_bandwidth(100.0).half_window == 1


@settings(max_examples=200, deadline=None)
@given(spectra(), st.floats(0, 500))
def test_matches_oracle(sl, delta):
    spec, l = sl
    peaks = find_local_peaks(spec, PeakSearchConfig(l, delta))
    assert peaks.indices.tolist() == local_peaks(spec.P, l, delta)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.lists(st.integers(0, 5), min_size=12, max_size=80), st.integers(0, 3))
def test_matches_oracle_with_ties(l, ints, d):
    # small integers make exact ties between power and threshold common
    P = np.array(ints, dtype=float)
    assume(P.size >= 2 * l + 3)
    delta = d / (2 * l + 1)
    spec = PowerSpectrum.from_power(P, 1.0)
    assert find_local_peaks(spec, PeakSearchConfig(l, delta)).indices.tolist() == \
        local_peaks(P, l, delta)


@settings(max_examples=100, deadline=None)
@given(spectra(), st.floats(0, 100), st.floats(0, 100))
def test_delta_monotone(sl, d1, d2):
    spec, l = sl
    lo, hi = sorted((d1, d2))
    a = find_local_peaks(spec, PeakSearchConfig(l, lo)).indicator
    b = find_local_peaks(spec, PeakSearchConfig(l, hi)).indicator
    assert not np.any(b & ~a)


@settings(max_examples=100, deadline=None)
@given(spectra(), st.floats(0, 10))
def test_peak_invariants(sl, delta):
    spec, l = sl
    cfg = PeakSearchConfig(l, delta)
    peaks = find_local_peaks(spec, cfg)
    P = spec.P
    for k in peaks.indices:
        assert l <= k <= P.size - 1 - l
        assert P[k] > P[k - 1] and P[k] > P[k + 1]
        assert P[k] > moving_average_threshold(spec, cfg, k)
    # peaks are never adjacent, so at most every other bin
    assert np.all(np.diff(peaks.indices) >= 2)
    assert 0 <= peak_fraction(peaks) <= 0.5
    np.testing.assert_array_equal(peaks.frequencies, spec.F[peaks.indices])
    np.testing.assert_array_equal(peaks.powers, P[peaks.indices])


@settings(max_examples=50, deadline=None)
@given(spectra(), st.integers(0, 199), st.floats(0.1, 100))
def test_raising_a_far_bin_is_local(sl, j, bump):
    # a change outside every window touching k cannot change k's status
    spec, l = sl
    P = spec.P.copy()
    j = j % P.size
    before = find_local_peaks(spec, PeakSearchConfig(l)).indicator
    P[j] += bump
    after = find_local_peaks(PowerSpectrum.from_power(P, 0.5), PeakSearchConfig(l)).indicator
    far = np.abs(np.arange(P.size) - j) > l
    np.testing.assert_array_equal(before[far], after[far])


def test_tune_delta_hits_band():
    rng = np.random.default_rng(5)
    spec = PowerSpectrum.from_power(rng.exponential(size=20000), 0.1)
    delta, frac = tune_delta(spec, 50)
    assert 0.005 <= frac <= 0.03
    assert frac == pytest.approx(0.006, abs=0.002)
    assert peak_fraction(find_local_peaks(spec, PeakSearchConfig(50, delta))) == frac


def test_tune_delta_flat_spectrum():
    spec = PowerSpectrum.from_power(np.ones(100), 1.0)
    assert tune_delta(spec, 3) == (0.0, 0.0)
