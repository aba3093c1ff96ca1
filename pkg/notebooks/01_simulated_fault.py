# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
#       format_version: '1.3'
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Finding a 110 Hz fault in a noisy simulated record
#
# A train of decaying 3.9 kHz rings repeats at 110 Hz with a few samples of
# random slip, under white noise at -10 dB SNR. The fault frequency itself is
# nowhere near the strongest part of the spectrum; it shows up as the spacing
# of many weak lines. The SIOS counts those lines.

# %%
from pathlib import Path

import numpy as np

from bearing_sios import (PeakSearchConfig, SimulationParams, check_resolution_condition,
                          construct_sios, find_local_peaks, find_significant, make_grid,
                          peak_fraction, power_spectrum, simulate_bearing_signal, tune_delta)
from bearing_sios import ingest

out = Path("output")
out.mkdir(exist_ok=True)

# %%
params = SimulationParams(seed=0)
signal = simulate_bearing_signal(params)
spec = power_spectrum(signal)
print(len(signal), "samples,", f"delta_s = {spec.delta_s:.4f} Hz")
print("strongest bin:", spec.F[np.argmax(spec.P)], "Hz")

# %% [markdown]
# The spectrum is dominated by the resonance band around 3.9 kHz.

# %%
ingest.write_results(spec, out / "01_spectrum.svg")

# %% [markdown]
# ## Local peaks
#
# A 114 Hz moving-average window sets the local baseline. The offset
# `delta` is tuned so that roughly 0.6% of bins are kept.

# %%
half = PeakSearchConfig.from_bandwidth(spec.delta_s).half_window
delta, frac = tune_delta(spec, half)
peaks = find_local_peaks(spec, PeakSearchConfig(half, delta))
print(f"l = {half} bins, delta = {delta:.3g}, {len(peaks)} peaks ({100 * frac:.2f}%)")

# %% [markdown]
# ## Projection onto a grid over [100, 200) Hz

# %%
rc = check_resolution_condition(signal.fs, 100.0, spec.delta_s)
print(f"resolution bound {rc.bound:.3f} Hz, margin {rc.margin:.4f}")
grid = make_grid(100.0, 200.0, 10, spec.delta_s)
sios = construct_sios(peaks, grid, signal.fs)
sig = find_significant(sios)
for i in sig.dominant:
    print(f"{sios.G[i]:8.3f} Hz  N={sios.N[i]}  E={sios.E[i]:.3g}")

# %%
ingest.write_sios_plots(sios, out / "01_sios")

# %% [markdown]
# The top component sits at 110 Hz in both N and E. Repeating with other
# seeds gives the same answer; the noise components that tie on N carry
# far less power.

# %%
for seed in range(5):
    s = simulate_bearing_signal(SimulationParams(seed=seed))
    sp = power_spectrum(s)
    d, _ = tune_delta(sp, half)
    so = construct_sios(find_local_peaks(sp, PeakSearchConfig(half, d)), grid, s.fs)
    print(seed, round(float(so.G[find_significant(so).rank_N[0]]), 2))
