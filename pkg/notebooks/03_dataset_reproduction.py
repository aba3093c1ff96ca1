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
# # Converting CWRU and IMS records
#
# The datasets are not redistributable, so the package never reads their
# native files. Convert each record once to a raw float64 file named after
# its record id, with a `.meta` sidecar carrying the sampling rate, then
# point `BEARING_SIOS_DATA` at the directory:
#
#     BEARING_SIOS_DATA=/data/converted bearing-sios reproduce
#
# CWRU files are MATLAB containers holding `X<nnn>_DE_time`; reading them
# needs scipy, which is not a dependency of the package.

# %%
import os
from pathlib import Path

import numpy as np

from bearing_sios import TimeSeries, ingest

SRC = Path(os.environ.get("CWRU_MAT_DIR", "cwru_mat"))
DST = Path(os.environ.get(ingest.DATA_ROOT_ENV, "converted"))


def convert_cwru(mat_path, record_id, fs=12000.0):
    from scipy.io import loadmat
    m = loadmat(mat_path)
    key = next(k for k in m if k.endswith("_DE_time"))
    x = np.asarray(m[key], dtype=float).ravel()
    ingest.write_timeseries(TimeSeries(x, fs), DST / f"{record_id}.f64", record_id=record_id)


def convert_ims(txt_path, channel=0, record_id="ims-510", fs=20000.0):
    # IMS snapshots are tab-separated columns, one per channel
    x = np.loadtxt(txt_path, usecols=channel)
    ingest.write_timeseries(TimeSeries(x, fs), DST / f"{record_id}.f64", record_id=record_id)


# %%
if SRC.exists():
    DST.mkdir(parents=True, exist_ok=True)
    for row in ingest.load_manifest():
        p = SRC / f"{row.record_id}.mat"
        if row.dataset == "cwru" and p.exists():
            convert_cwru(p, row.record_id, row.fs)
else:
    print(f"{SRC} not found; nothing converted")

# %% [markdown]
# ## Running the comparison

# %%
from bearing_sios.reproduce import reproduce

rows = ingest.load_manifest()
report = reproduce(rows, DST if DST.exists() else None)
