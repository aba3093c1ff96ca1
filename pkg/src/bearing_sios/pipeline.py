"""End-to-end analysis: record -> spectrum -> peaks -> SIOS -> diagnosis.

Configuration files are INI-style, one section per stage::

    [input]
    path = record.csv
    fs = 12000

    [peaks]
    window_hz = 114
    delta = 0.0002

    [grid]
    f_low = 100
    f_high = 180
    theta = 10

    [bearing]
    preset = cwru-de
    rpm = 1797

Command-line flags override file values.
"""

from __future__ import annotations

import configparser
import dataclasses
import logging
from dataclasses import dataclass, field
from pathlib import Path

from . import ingest
from .diagnose import PRESETS, BearingSpec, SignificanceConfig, classify, find_significant
from .peaksearch import (DEFAULT_WINDOW_HZ, PeakSearchConfig, find_local_peaks, peak_fraction,
                         tune_delta)
from .simulate import SimulationParams, simulate_bearing_signal
from .sios import check_resolution_condition, construct_sios, make_grid
from .spectrum import averaged_spectrum, power_spectrum

log = logging.getLogger(__name__)


class PipelineError(Exception):
    """A stage failed; ``stage`` names it and ``__cause__`` holds the original error."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    input_path: str | None = None
    fs: float | None = None
    simulation: SimulationParams | None = None
    window: str = "boxcar"
    n_segments: int = 1
    half_window: int | None = None
    window_hz: float = DEFAULT_WINDOW_HZ
    delta: float | None = None          # None: tune to the recommended peak fraction
    f_low: float = 100.0
    f_high: float = 200.0
    theta: int = 10
    closed_grid: bool = False
    dedupe: bool = True
    check_resolution: bool = True
    bearing: BearingSpec | None = None
    significance: SignificanceConfig = field(default_factory=SignificanceConfig)
    output_dir: str | None = None
    emit_plots: bool = False


@dataclass
class PipelineResult:
    signal: object
    spectrum: object
    peak_config: PeakSearchConfig
    peaks: object
    resolution: object
    grid: object
    sios: object
    significance: object
    diagnosis: object = None
    artifacts: list = field(default_factory=list)

    @property
    def peak_fraction(self):
        return peak_fraction(self.peaks)


def _stage(name):
    def wrap(fn):
        def inner(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except PipelineError:
                raise
            except Exception as exc:
                raise PipelineError(name, exc) from exc
        inner.__name__ = fn.__name__
        inner.__doc__ = fn.__doc__
        return inner
    return wrap


@_stage("input")
def load_signal(cfg):
    if cfg.input_path is not None:
        return ingest.read_timeseries(cfg.input_path, cfg.fs)
    if cfg.simulation is not None:
        return simulate_bearing_signal(cfg.simulation)
    raise ValueError("no input file and no simulation parameters given")


@_stage("spectrum")
def spectrum_stage(signal, cfg):
    if cfg.n_segments > 1:
        return averaged_spectrum(signal, cfg.n_segments, cfg.window)
    return power_spectrum(signal, cfg.window)


@_stage("peaks")
def peaks_stage(spectrum, cfg):
    if cfg.half_window is not None:
        half = cfg.half_window
    else:
        half = PeakSearchConfig.from_bandwidth(spectrum.delta_s, cfg.window_hz).half_window
    delta = cfg.delta
    if delta is None:
        delta, frac = tune_delta(spectrum, half)
        log.info("tuned delta=%.6g (peak fraction %.4f)", delta, frac)
    pcfg = PeakSearchConfig(half, delta)
    return pcfg, find_local_peaks(spectrum, pcfg)


@_stage("sios")
def sios_stage(peaks, fs, cfg):
    spectrum = peaks.spectrum
    rc = check_resolution_condition(fs, cfg.f_low, spectrum.delta_s)
    grid = make_grid(cfg.f_low, cfg.f_high, cfg.theta, spectrum.delta_s, closed=cfg.closed_grid)
    sios = construct_sios(peaks, grid, fs, dedupe=cfg.dedupe, check=cfg.check_resolution)
    return rc, grid, sios


@_stage("diagnose")
def diagnose_stage(sios, cfg):
    return classify(sios, cfg.bearing, cfg.significance)


def run_pipeline(cfg):
    """Run every stage in order and optionally persist intermediate artifacts.

    Raises
    ------
    PipelineError
        Naming the failing stage.
    """
    signal = load_signal(cfg)
    spectrum = spectrum_stage(signal, cfg)
    pcfg, peaks = peaks_stage(spectrum, cfg)
    rc, grid, sios = sios_stage(peaks, signal.fs, cfg)
    sig = find_significant(sios, cfg.significance)
    diagnosis = diagnose_stage(sios, cfg) if cfg.bearing is not None else None
    result = PipelineResult(signal, spectrum, pcfg, peaks, rc, grid, sios, sig, diagnosis)
    if cfg.output_dir is not None:
        result.artifacts = _save_artifacts(result, cfg)
    return result


@_stage("output")
def _save_artifacts(result, cfg):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    def save(obj, name, fmt=None):
        p = out / name
        ingest.write_results(obj, p, fmt)
        paths.append(p)

    if cfg.input_path is None:
        p = out / "signal.csv"
        ingest.write_timeseries(result.signal, p, seed=cfg.simulation.seed)
        paths.append(p)
    save(result.spectrum, "spectrum.csv")
    save(result.peaks, "peaks.csv")
    save(result.sios, "sios.csv")
    if result.diagnosis is not None:
        save(result.diagnosis, "diagnosis.txt")
    if cfg.emit_plots:
        save(result.spectrum, "spectrum.svg")
        save(result.peaks, "peaks.svg")
        paths += ingest.write_sios_plots(result.sios, out / "sios")
    return paths


# --- configuration files ---------------------------------------------------

def _get(section, key, conv):
    if key in section:
        return conv(section[key])
    return None


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _snr(text):
    return float("inf") if text.strip().lower() == "none" else float(text)


def _slippage(text):
    parts = [float(v) for v in text.replace(",", " ").split()]
    if len(parts) == 1:
        return (-abs(parts[0]), abs(parts[0]))
    if len(parts) == 2:
        return tuple(parts)
    raise ValueError(f"slippage needs one or two numbers, got {text!r}")


def read_config_file(path):
    """Flat ``{option: value}`` overrides from an INI file.

    Keys are the :class:`PipelineConfig` field names plus ``sim_*`` for the
    simulation and ``bearing_*`` for the bearing.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    cp = configparser.ConfigParser()
    cp.read(path, encoding="utf-8")
    out = {}

    def take(sec, key, conv, dest=None):
        if cp.has_section(sec):
            v = _get(cp[sec], key, conv)
            if v is not None:
                out[dest or key] = v

    take("input", "path", str, "input_path")
    take("input", "fs", float)
    for key, conv in (("decay", float), ("fault_freq", float), ("resonant_freq", float),
                      ("fs", float), ("num_samples", int), ("slippage", _slippage),
                      ("snr_db", _snr), ("seed", int)):
        take("simulate", key, conv, f"sim_{key}")
    take("spectrum", "window", str)
    take("spectrum", "segments", int, "n_segments")
    take("peaks", "half_window", int)
    take("peaks", "window_hz", float)
    take("peaks", "delta", lambda t: None if t.strip().lower() == "auto" else float(t))
    take("grid", "f_low", float)
    take("grid", "f_high", float)
    take("grid", "theta", int)
    take("grid", "closed", _bool, "closed_grid")
    take("sios", "dedupe", _bool)
    take("sios", "check_resolution", _bool)
    for key, conv in (("preset", str), ("rpm", float), ("shaft_freq", float), ("bpfo", float),
                      ("bpfi", float), ("ftf", float), ("bsf", float)):
        take("bearing", key, conv, f"bearing_{key}")
    take("significance", "top_m", int)
    take("significance", "dominance_ratio", float)
    take("significance", "match_tol_rel", float)
    take("output", "dir", str, "output_dir")
    take("output", "plots", _bool, "emit_plots")
    return out


def build_config(options):
    """Assemble a :class:`PipelineConfig` from flat options (file values, then flags)."""
    opts = {k: v for k, v in options.items() if v is not None}
    plain = {f.name for f in dataclasses.fields(PipelineConfig)}
    cfg = PipelineConfig(**{k: v for k, v in opts.items()
                            if k in plain and k not in ("simulation", "bearing", "significance")})

    sim_keys = {k[4:]: v for k, v in opts.items() if k.startswith("sim_")}
    if sim_keys or opts.get("simulate"):
        cfg.simulation = SimulationParams(**sim_keys)

    sig_keys = {k: opts[k] for k in ("top_m", "dominance_ratio", "match_tol_rel") if k in opts}
    if sig_keys:
        cfg.significance = SignificanceConfig(**sig_keys)

    b = {k[8:]: v for k, v in opts.items() if k.startswith("bearing_")}
    rpm, fr = b.pop("rpm", None), b.pop("shaft_freq", None)
    preset = b.pop("preset", None)
    if rpm is not None or fr is not None:
        if rpm is not None and fr is not None:
            raise ValueError("give either rpm or shaft frequency, not both")
        fr = fr if fr is not None else rpm / 60.0
        preset = preset or "cwru-de"
        if preset not in PRESETS:
            raise ValueError(f"unknown bearing preset {preset!r}; known: {sorted(PRESETS)}")
        mult = dict(PRESETS[preset])
        mult.update(b)
        cfg.bearing = BearingSpec(shaft_freq=fr, **mult)
    elif b or preset:
        raise ValueError("bearing settings need a shaft speed (rpm or shaft_freq)")
    return cfg

