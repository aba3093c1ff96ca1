import struct
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from bearing_sios import ingest
from bearing_sios.diagnose import DiagnosisResult, NONE
from bearing_sios.peaksearch import PeakSearchConfig, find_local_peaks
from bearing_sios.simulate import SimulationParams, simulate_bearing_signal
from bearing_sios.sios import construct_sios, make_grid
from bearing_sios.spectrum import PowerSpectrum, TimeSeries, power_spectrum

SVG = "{http://www.w3.org/2000/svg}"


def test_read_csv_plain_and_header(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("0.0\n1.0\n0.0\n")
    s = ingest.read_csv(p, 10)
    assert s.samples.tolist() == [0.0, 1.0, 0.0] and s.fs == 10
    p.write_text("amplitude\n1e-3\n-2.5\n.5\n\n")
    assert ingest.read_csv(p, 1).samples.tolist() == [1e-3, -2.5, 0.5]


@pytest.mark.parametrize("text,line", [("1\n2\nx\n", 3), ("h\n1\nfoo\n", 3), ("1\n1,5\n", 2),
                                       ("1\nnan\n", 2)])
def test_read_csv_reports_line(tmp_path, text, line):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(ValueError, match=f":{line}:"):
        ingest.read_csv(p, 1)


def test_read_csv_empty(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("")
    with pytest.raises(ValueError, match="no samples"):
        ingest.read_csv(p, 1)
    p.write_text("amplitude\n")
    with pytest.raises(ValueError, match="no samples"):
        ingest.read_csv(p, 1)


def test_read_raw(tmp_path):
    p = tmp_path / "r.f64"
    p.write_bytes(struct.pack("<2d", 1.25, -3.5))
    assert ingest.read_raw_f64le(p, 2).samples.tolist() == [1.25, -3.5]
    p.write_bytes(struct.pack("<2d", 1.0, 2.0) + b"\x00\x01\x02")
    with pytest.raises(ValueError, match="byte offset 16"):
        ingest.read_raw_f64le(p, 1)
    p.write_bytes(b"")
    with pytest.raises(ValueError):
        ingest.read_raw_f64le(p, 1)


@pytest.mark.parametrize("suffix", [".csv", ".f64"])
def test_simulation_round_trip(tmp_path, suffix):
    sig = simulate_bearing_signal(SimulationParams(num_samples=5000, seed=2))
    p = tmp_path / f"sim{suffix}"
    ingest.write_timeseries(sig, p, seed=2)
    back = ingest.read_timeseries(p)
    np.testing.assert_array_equal(back.samples, sig.samples)
    assert back.fs == sig.fs
    assert ingest.read_sidecar(p)["seed"] == "2"


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(arrays(float, st.integers(1, 50), elements=st.floats(allow_nan=False, allow_infinity=False)))
def test_round_trip_any_finite(tmp_path, x):
    for name in ("x.csv", "x.bin"):
        p = tmp_path / name
        ingest.write_timeseries(TimeSeries(x, 3.0), p)
        back = ingest.read_timeseries(p)
        np.testing.assert_array_equal(back.samples, x)
        assert len(back) == x.size


def test_missing_file_and_fs(tmp_path):
    with pytest.raises(FileNotFoundError, match="nope.csv"):
        ingest.read_timeseries(tmp_path / "nope.csv", 1)
    p = tmp_path / "a.csv"
    p.write_text("1\n2\n")
    with pytest.raises(ValueError, match="sampling rate"):
        ingest.read_timeseries(p)
    assert ingest.read_timeseries(p, 5).fs == 5


def test_record_meta():
    m = ingest.RecordMeta("105", 12000, 1797)
    assert m.fs == 12000
    with pytest.raises(ValueError):
        ingest.RecordMeta("x", 0)
    with pytest.raises(ValueError):
        ingest.RecordMeta("x", 1, -5)


def _small_sios():
    P = np.zeros(401)
    P[[110, 220, 330]] = 1.0
    spec = PowerSpectrum.from_power(P, 1.0)
    peaks = find_local_peaks(spec, PeakSearchConfig(2))
    return spec, peaks, construct_sios(peaks, make_grid(100, 200, 2, 1.0), 800.0, check=False)


def test_write_sios_csv_and_read_back(tmp_path):
    _, _, s = _small_sios()
    p = tmp_path / "s.csv"
    ingest.write_results(s, p)
    assert p.read_text().splitlines()[0] == "G_hz,N,E"
    back = ingest.read_sios_csv(p)
    np.testing.assert_array_equal(back.N, s.N)
    np.testing.assert_array_equal(back.E, s.E)
    np.testing.assert_allclose(back.G, s.G)


def test_write_diagnosis(tmp_path):
    p = tmp_path / "d.txt"
    ingest.write_results(DiagnosisResult(NONE, "N", notes=["nothing"]), p)
    lines = p.read_text().splitlines()
    assert lines[0] == "verdict=N" and "note.1=nothing" in lines


def test_spectrum_svg_structure(tmp_path):
    spec = power_spectrum(TimeSeries(np.random.default_rng(0).standard_normal(256), 100.0))
    p = tmp_path / "s.svg"
    ingest.write_results(spec, p)
    root = ET.parse(p).getroot()
    lines = root.findall(f"{SVG}polyline")
    assert len(lines) == 1
    assert len(lines[0].get("points").split()) == len(spec)
    texts = [t.text for t in root.iter(f"{SVG}text")]
    assert "Frequency (Hz)" in texts


def test_sios_plots(tmp_path):
    _, peaks, s = _small_sios()
    paths = ingest.write_sios_plots(s, tmp_path / "x")
    assert [p.name for p in paths] == ["x_N.svg", "x_E.svg"]
    stems = ET.parse(paths[0]).getroot().findall(f"{SVG}line[@class='stem']")
    assert len(stems) == int((s.N > 0).sum())
    ingest.write_results(peaks, tmp_path / "p.svg")
    circles = ET.parse(tmp_path / "p.svg").getroot().findall(f"{SVG}circle")
    assert len(circles) == len(peaks)
    ingest.write_results(peaks, tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text().splitlines()[:2] == ["bin,F_hz,P", "110,110.0,1.0"]


def test_write_errors(tmp_path):
    _, _, s = _small_sios()
    with pytest.raises(OSError, match="missing"):
        ingest.write_results(s, tmp_path / "missing" / "s.csv")
    with pytest.raises(TypeError):
        ingest.write_results(object(), tmp_path / "o.csv")


def test_manifest():
    rows = ingest.load_manifest()
    cwru = [r for r in rows if r.dataset == "cwru"]
    assert len(cwru) == 40
    by_id = {r.record_id: r for r in rows}
    assert by_id["105"].expected == "Y" and by_id["105"].expected_dominant_hz == 161.68
    assert by_id["130"].expected_dominant_hz == 107.65
    assert by_id["121"].expected == "P" and by_id["3001"].expected == "N"
    assert by_id["198"].expected == "Y" and by_id["200"].expected == "Y"
    ims = by_id["ims-510"]
    assert ims.expected_dominant_hz == 230.4 and ims.excluded_hz == 246.0 and ims.delta is None


def test_find_record(tmp_path, monkeypatch):
    (tmp_path / "105.csv").write_text("1\n")
    assert ingest.find_record(tmp_path, "105").name == "105.csv"
    assert ingest.find_record(tmp_path, "106") is None
    monkeypatch.setenv(ingest.DATA_ROOT_ENV, str(tmp_path))
    assert ingest.data_root() == tmp_path
    monkeypatch.delenv(ingest.DATA_ROOT_ENV)
    assert ingest.data_root() is None
