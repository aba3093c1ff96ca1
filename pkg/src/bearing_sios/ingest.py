"""Reading records and writing results.

Formats
-------
Time series CSV
    One sample per line, optionally preceded by a single non-numeric header
    line. '.' is the decimal separator whatever the locale.
Raw
    Little-endian IEEE-754 float64 samples, no header (``.f64`` / ``.bin``).
Sidecar
    ``<record>.meta`` next to a record, ``key=value`` per line; holds at least
    ``fs``.
Spectrum CSV
    ``F_hz,P``.
Peaks CSV
    ``bin,F_hz,P``.
SIOS CSV
    ``G_hz,N,E``.
Diagnosis
    ``key=value`` text, starting with ``verdict=<Y|P|N>``.
"""

from __future__ import annotations

import csv
import os
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .diagnose import DiagnosisResult
from .peaksearch import PeakSet
from .sios import SIOS, FrequencyGrid
from .spectrum import PowerSpectrum, TimeSeries
from . import svgplot

#: environment variable naming the directory holding converted dataset records
DATA_ROOT_ENV = "BEARING_SIOS_DATA"

_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
RAW_SUFFIXES = (".f64", ".bin", ".raw")


@dataclass(frozen=True)
class RecordMeta:
    record_id: str
    fs: float
    shaft_rpm: float | None = None
    channel: str = ""
    source_path: str = ""

    def __post_init__(self):
        if not self.fs > 0:
            raise ValueError("fs must be positive")
        if self.shaft_rpm is not None and not self.shaft_rpm > 0:
            raise ValueError("shaft_rpm must be positive when given")


def _parse_number(text):
    text = text.strip()
    if not _NUMBER.match(text):
        raise ValueError(text)
    return float(text)


def read_csv(path, fs):
    """Read a one-column CSV record.

    Raises
    ------
    ValueError
        On an empty file or a non-numeric line (the line number is reported).
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    values = []
    for lineno, line in enumerate(lines, start=1):
        try:
            values.append(_parse_number(line))
        except ValueError:
            if lineno == 1:
                continue
            raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from None
    if not values:
        raise ValueError(f"{path}: no samples")
    return TimeSeries(np.array(values), fs)


def read_raw_f64le(path, fs):
    """Read little-endian float64 samples."""
    path = Path(path)
    data = path.read_bytes()
    if not data:
        raise ValueError(f"{path}: no samples")
    if len(data) % 8:
        start = len(data) - len(data) % 8
        raise ValueError(f"{path}: trailing partial sample at byte offset {start} "
                         f"({len(data) % 8} of 8 bytes)")
    return TimeSeries(np.frombuffer(data, dtype="<f8").astype(float), fs)


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.name + ".meta")


def write_sidecar(path, **meta):
    lines = [f"{k}={v}" for k, v in meta.items()]
    sidecar_path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_sidecar(path):
    """Key/value pairs from the sidecar of ``path`` (empty if there is none)."""
    meta_path = sidecar_path(path)
    if not meta_path.exists():
        return {}
    out = {}
    for line in meta_path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{meta_path}: expected key=value, got {line!r}")
        out[key.strip()] = value.strip()
    return out


def read_timeseries(path, fs=None):
    """Read a CSV or raw record; ``fs`` falls back to the sidecar."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {path}")
    if fs is None:
        meta = read_sidecar(path)
        if "fs" not in meta:
            raise ValueError(f"{path}: sampling rate unknown; pass fs or add {sidecar_path(path).name}")
        fs = float(meta["fs"])
    if path.suffix.lower() in RAW_SUFFIXES:
        return read_raw_f64le(path, fs)
    return read_csv(path, fs)


def write_timeseries(signal, path, fmt=None, **meta):
    """Write samples as CSV (``repr`` precision) or raw float64, plus a sidecar."""
    path = Path(path)
    fmt = fmt or ("raw" if path.suffix.lower() in RAW_SUFFIXES else "csv")
    try:
        if fmt == "raw":
            path.write_bytes(np.asarray(signal.samples, dtype="<f8").tobytes())
        elif fmt == "csv":
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("amplitude\n")
                fh.writelines(f"{v!r}\n" for v in signal.samples.tolist())
        else:
            raise ValueError(f"unknown time series format {fmt!r}")
        write_sidecar(path, fs=repr(signal.fs), n=len(signal), format=fmt, **meta)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _write_rows(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _float(v):
    return repr(float(v))


def diagnosis_lines(result):
    lines = [f"verdict={result.mark}", f"fault={result.fault}",
             f"bfp_found={'true' if result.bfp_found else 'false'}"]
    if result.top_component is not None:
        t = result.top_component
        lines.append(f"top_component={t.freq:.6f},{t.N},{t.E!r},{t.label}")
    for i, c in enumerate(result.dominant_components, start=1):
        lines.append(f"evidence.{i}={c.freq:.6f},{c.N},{c.E!r},{c.label},"
                     f"{'dominant' if c.dominant else 'significant'}")
    for i, note in enumerate(result.notes, start=1):
        lines.append(f"note.{i}={note}")
    return lines


def write_results(result, path, fmt=None):
    """Persist a spectrum, peak set, SIOS or diagnosis.

    ``fmt`` is ``'csv'``, ``'kv'`` or ``'svg'``; by default it follows the
    file suffix, with diagnoses written as key/value text.
    """
    path = Path(path)
    if fmt is None:
        suffix = path.suffix.lower()
        fmt = {".svg": "svg", ".csv": "csv"}.get(suffix, "kv")
        if isinstance(result, DiagnosisResult) and fmt == "csv":
            fmt = "kv"
    try:
        _write(result, path, fmt)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _write(result, path, fmt):
    if isinstance(result, DiagnosisResult):
        if fmt != "kv":
            raise ValueError("diagnoses are written as key/value text")
        path.write_text("\n".join(diagnosis_lines(result)) + "\n", encoding="utf-8")
    elif isinstance(result, SIOS):
        if fmt == "svg":
            raise ValueError("use write_sios_plots for SIOS plots (one file per index)")
        _write_rows(path, ["G_hz", "N", "E"],
                    ((_float(g), int(n), _float(e)) for g, n, e in zip(result.G, result.N, result.E)))
    elif isinstance(result, PeakSet):
        spec = result.spectrum
        if fmt == "svg":
            path.write_text(svgplot.line_plot(spec.F, spec.P, "Spectrum and local peaks",
                                              markers=(result.frequencies, result.powers)),
                            encoding="utf-8")
        else:
            _write_rows(path, ["bin", "F_hz", "P"],
                        ((int(k), _float(spec.F[k]), _float(spec.P[k])) for k in result.indices))
    elif isinstance(result, PowerSpectrum):
        if fmt == "svg":
            path.write_text(svgplot.line_plot(result.F, result.P, "Power spectrum"),
                            encoding="utf-8")
        else:
            _write_rows(path, ["F_hz", "P"], ((_float(f), _float(p)) for f, p in zip(result.F, result.P)))
    else:
        raise TypeError(f"cannot write {type(result).__name__}")


def write_sios_plots(sios, stem):
    """Write ``<stem>_N.svg`` and ``<stem>_E.svg`` stem plots; returns both paths."""
    stem = Path(stem)
    paths = []
    for name, values in (("N", sios.N), ("E", sios.E)):
        p = stem.with_name(f"{stem.name}_{name}.svg")
        p.write_text(svgplot.stem_plot(sios.G, values, f"SIOS {name}(i)", ylabel=name),
                     encoding="utf-8")
        paths.append(p)
    return paths


def read_sios_csv(path):
    """Rebuild a SIOS from a ``G_hz,N,E`` file.

    The grid is taken as evenly spaced and half-open; its ``theta`` is not
    stored in the file and is set to 1.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {path}")
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["G_hz", "N", "E"]:
        raise ValueError(f"{path}: expected header G_hz,N,E")
    G, N, E = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            g, n, e = row
            G.append(_parse_number(g))
            N.append(int(n))
            E.append(_parse_number(e))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: malformed row {row!r}") from None
    if len(G) < 2:
        raise ValueError(f"{path}: need at least two grid components")
    G = np.array(G)
    delta_G = (G[-1] - G[0]) / (G.size - 1)
    grid = FrequencyGrid(float(G[0]), float(G[-1] + delta_G), 1, float(delta_G), G)
    return SIOS(grid, np.array(N, dtype=np.int64), np.array(E), np.empty((0, 2), dtype=np.int64))


# --- reproduction manifest -------------------------------------------------

@dataclass(frozen=True)
class ManifestRow:
    record_id: str
    dataset: str
    fault: str
    expected: str          # Y, P, N or '-' when the source gives no verdict
    rpm: float
    fs: float
    f_low: float
    f_high: float
    delta: float | None    # None: tune automatically
    bearing: str
    expected_dominant_hz: float | None
    excluded_hz: float | None


def _opt_float(text):
    text = text.strip()
    return float(text) if text else None


def load_manifest(path=None):
    """Rows of the reproduction manifest (the bundled one by default)."""
    if path is None:
        text = resources.files("bearing_sios").joinpath("data/reproduction_manifest.csv").read_text(
            encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    rows = [r for r in csv.DictReader(line for line in text.splitlines()
                                      if line.strip() and not line.startswith("#"))]
    out = []
    for r in rows:
        out.append(ManifestRow(
            record_id=r["record_id"].strip(), dataset=r["dataset"].strip(),
            fault=r["fault"].strip(), expected=r["expected"].strip(),
            rpm=float(r["rpm"]), fs=float(r["fs"]),
            f_low=float(r["f_low"]), f_high=float(r["f_high"]),
            delta=_opt_float(r["delta"]), bearing=r["bearing"].strip(),
            expected_dominant_hz=_opt_float(r["expected_dominant_hz"]),
            excluded_hz=_opt_float(r["excluded_hz"])))
    return out


def find_record(root, record_id):
    """Path of a converted record under ``root`` (CSV or raw), or None."""
    root = Path(root)
    for suffix in (".csv",) + RAW_SUFFIXES:
        p = root / f"{record_id}{suffix}"
        if p.exists():
            return p
    return None


def data_root():
    value = os.environ.get(DATA_ROOT_ENV)
    return Path(value) if value else None
