import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bearing_sios.peaksearch import PeakSearchConfig, PeakSet, find_local_peaks
from bearing_sios.sios import (ResolutionError, accepts_harmonic, check_resolution_condition,
                               construct_sios, make_grid, project_peak, sios_from_spectrum)
from bearing_sios.spectrum import PowerSpectrum
import oracles


def comb_peaks(n_bins, delta_s, bins, power=1.0):
    P = np.zeros(n_bins)
    P[list(bins)] = power
    spec = PowerSpectrum.from_power(P, delta_s)
    ind = np.zeros(n_bins, dtype=bool)
    ind[list(bins)] = True
    return PeakSet(ind, spec)


@st.composite
def instances(draw, max_bins=4096, max_comp=512):
    """Random bin-quantised peak sets with planted harmonic combs."""
    n_bins = draw(st.integers(64, max_bins))
    delta_s = draw(st.sampled_from([0.05, 0.1, 0.25, 0.5, 1.0]))
    fs = 2 * (n_bins - 1) * delta_s
    theta = draw(st.integers(1, 12))
    lo_bin = draw(st.integers(1, max(1, n_bins // 8)))
    span_comp = draw(st.integers(2, max_comp))
    f_low = lo_bin * delta_s + draw(st.sampled_from([0.0, 0.3, 0.5])) * delta_s
    f_high = f_low + span_comp * delta_s / theta
    rng = np.random.default_rng(draw(st.integers(0, 2**31)))
    bins = set(rng.choice(np.arange(1, n_bins), size=draw(st.integers(1, 40)), replace=False).tolist())
    for _ in range(draw(st.integers(0, 3))):
        k0 = int(rng.integers(lo_bin, lo_bin + span_comp // theta + 2))
        bins.update(range(k0, n_bins, k0))
    P = rng.exponential(size=n_bins)
    ind = np.zeros(n_bins, dtype=bool)
    ind[sorted(bins)] = True
    peaks = PeakSet(ind, PowerSpectrum.from_power(P, delta_s))
    grid = make_grid(f_low, f_high, theta, delta_s)
    return peaks, grid, fs


def test_grid_formula():
    ds = 12000 / 2**15
    g = make_grid(100, 200, 10, ds)
    assert g.delta_G == pytest.approx(ds / 10)
    assert len(g) == math.floor(100 / (ds / 10)) + 1
    assert g.G[0] == 100 and g.G[-1] < 200
    # exact division: half-open drops the endpoint, closed keeps it
    assert len(make_grid(1, 2, 4, 1.0)) == 4
    assert len(make_grid(1, 2, 4, 1.0, closed=True)) == 5
    assert make_grid(1, 2, 4, 1.0, closed=True).G[-1] == 2.0
    assert make_grid(100, 200, 10, 1.0).alpha(0) == pytest.approx(1000)


@pytest.mark.parametrize("args", [(100, 200, 0, 1.0), (100, 200, 1.5, 1.0), (100, 200, 1, 0.0),
                                  (200, 100, 1, 1.0), (0, 100, 1, 1.0)])
def test_grid_rejects(args):
    with pytest.raises(ValueError):
        make_grid(*args)


def test_resolution_condition():
    rc = check_resolution_condition(12000, 100, 12000 / 2**15)
    assert rc and rc.passed
    assert float(f"{rc.bound:.4g}") == 1.667
    assert float(f"{rc.margin:.4g}") == 0.2197
    bad = check_resolution_condition(12000, 100, 2.0)
    assert not bad
    # required length just passes and one sample less does not
    assert check_resolution_condition(12000, 100, 12000 / bad.required_samples).passed
    assert not check_resolution_condition(12000, 100, 12000 / (bad.required_samples - 1)).passed


def test_margin_is_worst_case_order_over_alpha():
    fs, fl, fh, theta, ds = 12000.0, 100.0, 200.0, 10, 12000 / 2**15
    grid = make_grid(fl, fh, theta, ds)
    worst = max(math.floor(fs / (2 * g)) * theta / grid.alpha(i) for i, g in enumerate(grid.G))
    assert worst <= check_resolution_condition(fs, fl, ds).margin + 1e-12


def test_project_exact_multiple():
    grid = make_grid(100, 200, 10, 1.0)
    i, r = project_peak(330.0, grid)
    # 330 = 3 x 110 = 2 x 165; the lower component wins the tie
    assert grid.G[i] == pytest.approx(110.0) and r == pytest.approx(0.0, abs=1e-9)
    i, r = project_peak(150.05, grid)
    assert grid.G[i] == pytest.approx(150.0)
    assert project_peak(50.0, grid)[0] is None
    with pytest.raises(ValueError):
        project_peak(0.0, grid)


@settings(max_examples=200, deadline=None)
@given(st.floats(1, 5000), st.floats(5, 300), st.integers(1, 20), st.floats(0.01, 2))
def test_project_matches_full_scan(freq, f_low, theta, ds):
    grid = make_grid(f_low, f_low * 1.5, theta, ds)
    i, r = project_peak(freq, grid)
    j, s = oracles.project(freq, grid.G, grid.delta_G)
    assert i == j
    assert r == s


def test_comb_counts_each_harmonic_once():
    # fundamental at bin 110 of a 1 Hz spectrum, harmonics up to 1000 Hz
    peaks = comb_peaks(1001, 1.0, range(110, 1000, 110))
    grid = make_grid(100, 200, 10, 1.0)
    s = construct_sios(peaks, grid, fs=2000.0)
    i = grid.index_of(110.0)
    assert s.N[i] == 9 and s.E[i] == pytest.approx(9.0)
    assert s.N.sum() == 9
    assert set(np.flatnonzero(s.N)) == {i}
    # the literal loop recounts harmonics reached from every comb member
    lit = construct_sios(peaks, grid, fs=2000.0, dedupe=False)
    assert lit.N[i] == sum(math.floor(1000 / (110 * m)) for m in range(1, 10))


def test_resolution_error_names_length():
    peaks = comb_peaks(101, 5.0, [30, 60])
    grid = make_grid(100, 200, 1, 5.0)
    with pytest.raises(ResolutionError, match="samples"):
        construct_sios(peaks, grid, fs=12000.0)
    s = construct_sios(peaks, grid, fs=12000.0, check=False)
    assert s.N.sum() >= 1


@settings(max_examples=150, deadline=None)
@given(instances(), st.booleans())
def test_matches_enumeration_oracle(inst, dedupe):
    peaks, grid, fs = inst
    s = construct_sios(peaks, grid, fs, dedupe=dedupe, check=False)
    spec = peaks.spectrum
    N, E = oracles.sios(peaks.indices.tolist(), spec.F, spec.P, grid.G.tolist(), grid.delta_G,
                        spec.delta_s, fs, dedupe=dedupe)
    np.testing.assert_array_equal(s.N, N)
    np.testing.assert_allclose(s.E, E, rtol=1e-12, atol=0)


@settings(max_examples=100, deadline=None)
@given(instances(max_bins=1024))
def test_sios_invariants(inst):
    peaks, grid, fs = inst
    s = construct_sios(peaks, grid, fs, check=False)
    assert np.all(s.N >= 0) and np.all(s.E >= 0)
    np.testing.assert_array_equal(s.N == 0, s.E == 0)
    # E is the sum over recorded (component, bin) pairs
    E = np.zeros(len(grid))
    np.add.at(E, s.pairs[:, 0], peaks.spectrum.P[s.pairs[:, 1]])
    np.testing.assert_allclose(s.E, E, rtol=1e-12)
    assert len({tuple(p) for p in s.pairs}) == len(s.pairs)
    lit = construct_sios(peaks, grid, fs, dedupe=False, check=False)
    assert np.all(lit.N >= s.N)


@settings(max_examples=200, deadline=None)
@given(st.floats(20, 400), st.floats(1e-6, 1 - 1e-6), st.integers(1, 20), st.floats(0.01, 1.0),
       st.floats(0, 1))
def test_near_miss_harmonics_accepted(f_low, b_frac, theta, margin, where):
    fs = 12000.0
    ds = margin * 2 * f_low**2 / fs * (1 - 1e-9)
    assert check_resolution_condition(fs, f_low, ds).passed
    grid = make_grid(f_low, 2 * f_low, theta, ds)
    i = min(int(where * len(grid)), len(grid) - 1)
    fm = grid.G[i] + b_frac * grid.delta_G
    betas = np.arange(1, math.floor(fs / (2 * fm)) + 1)
    assert np.all(betas < grid.alpha(i))
    assert np.all(accepts_harmonic(betas * fm, grid, i, betas))


def test_sios_from_spectrum():
    peaks = comb_peaks(1001, 1.0, range(110, 1000, 110), power=5.0)
    s = sios_from_spectrum(peaks.spectrum, 2000.0, 100, 200, theta=10,
                           peak_cfg=PeakSearchConfig(3, 0.0))
    assert s.G[np.argmax(s.N)] == pytest.approx(110.0)
    assert find_local_peaks(peaks.spectrum, PeakSearchConfig(3)).indices.tolist() == \
        list(range(110, 1000, 110))


@settings(max_examples=100, deadline=None)
@given(st.integers(2**10, 2**16), st.sampled_from([8000.0, 12000.0, 20000.0, 25600.0]),
       st.floats(20, 300), st.integers(1, 12), st.floats(0, 1))
def test_exact_multiples_on_bin_aligned_grid(n, fs, f_low, theta, where):
    # bin frequencies and grid components are computed differently and may
    # disagree in the last bits; exact harmonics must still be accepted
    ds = fs / n
    kl = math.ceil(f_low / ds)
    grid = make_grid(kl * ds, 1.5 * kl * ds, theta, ds)
    F = np.arange(n // 2 + 1) * ds
    k0 = kl + int(where * kl * 0.49)
    i = grid.index_of(F[k0])
    ks = np.arange(k0, n // 2 + 1, k0)
    assert np.all(accepts_harmonic(F[ks], grid, i, ks // k0))
    assert project_peak(F[k0], grid)[0] == i
