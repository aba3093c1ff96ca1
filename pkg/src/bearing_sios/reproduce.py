"""Re-run the diagnosis on dataset records and compare with published verdicts.

Records are not bundled. Convert each one to ``<record_id>.csv`` (or a raw
``.f64``) under a data root directory; rows of the manifest whose record is
absent are skipped with a notice.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import ingest
from .pipeline import build_config, run_pipeline

#: relative tolerance on reported dominant frequencies
DOMINANT_TOL = 0.01


@dataclass
class Outcome:
    record_id: str
    expected: str
    got: str = ""
    dominant_hz: float | None = None
    status: str = "skipped"      # ok, mismatch, skipped, error
    detail: str = ""


@dataclass
class Report:
    outcomes: list = field(default_factory=list)

    @property
    def mismatches(self):
        return [o for o in self.outcomes if o.status in ("mismatch", "error")]

    @property
    def checked(self):
        return [o for o in self.outcomes if o.status != "skipped"]

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["record_id", "expected", "got", "dominant_hz", "status", "detail"])
            for o in self.outcomes:
                dom = "" if o.dominant_hz is None else f"{o.dominant_hz:.3f}"
                w.writerow([o.record_id, o.expected, o.got, dom, o.status, o.detail])


def row_config(row, path):
    """Pipeline configuration for one manifest row."""
    return build_config(dict(input_path=str(path), fs=row.fs, f_low=row.f_low,
                             f_high=row.f_high, delta=row.delta,
                             bearing_preset=row.bearing, bearing_rpm=row.rpm))


def check_row(row, path, significance=None):
    """Diagnose one record and compare it with its manifest row."""
    cfg = row_config(row, path)
    if significance is not None:
        cfg.significance = significance
    out = Outcome(row.record_id, row.expected)
    try:
        res = run_pipeline(cfg)
    except Exception as exc:
        out.status, out.detail = "error", str(exc)
        return out
    d = res.diagnosis
    out.got = d.mark
    out.dominant_hz = d.top_component.freq if d.top_component else None
    problems = []
    if row.expected != "-" and d.mark != row.expected:
        problems.append(f"verdict {d.mark}, expected {row.expected}")
    if row.expected_dominant_hz is not None:
        want = row.expected_dominant_hz
        if out.dominant_hz is None or abs(out.dominant_hz - want) > DOMINANT_TOL * want:
            problems.append(f"dominant {out.dominant_hz} Hz, expected {want} Hz")
    if row.excluded_hz is not None:
        G = res.sios.G
        bad = [float(G[i]) for i in res.significance.dominant
               if abs(G[i] - row.excluded_hz) <= DOMINANT_TOL * row.excluded_hz]
        if bad:
            problems.append(f"{row.excluded_hz} Hz should not be dominant (found {bad[0]:.2f} Hz)")
    out.status = "mismatch" if problems else "ok"
    out.detail = "; ".join(problems)
    return out


def reproduce(rows, root, out=None, significance=None):
    """Check every manifest row whose record exists under ``root``."""
    out = out or sys.stdout
    report = Report()
    if root is None:
        print(f"no data root given (set ${ingest.DATA_ROOT_ENV} or --data-root); "
              f"skipping all {len(rows)} records", file=out)
        report.outcomes = [Outcome(r.record_id, r.expected, detail="no data root") for r in rows]
        return report
    root = Path(root)
    for row in rows:
        path = ingest.find_record(root, row.record_id)
        if path is None:
            report.outcomes.append(Outcome(row.record_id, row.expected, detail="record absent"))
            continue
        o = check_row(row, path, significance)
        report.outcomes.append(o)
        dom = "-" if o.dominant_hz is None else f"{o.dominant_hz:.2f} Hz"
        print(f"{o.record_id:>10}  expected {o.expected}  got {o.got or '-'}  dominant {dom}  "
              f"{o.status}{'  ' + o.detail if o.detail else ''}", file=out)
    skipped = len(report.outcomes) - len(report.checked)
    if skipped:
        print(f"skipped {skipped} record(s) not found under {root}", file=out)
    print(f"{len(report.checked)} checked, {len(report.mismatches)} mismatched", file=out)
    return report
