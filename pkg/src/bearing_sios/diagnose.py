"""Fault classification from the dominant and significant SIOS components.

Rules, in the order they are checked:

* ball fault, Y: the ball fault pattern (BFP), 2 x BSF and at least one FTF
  harmonic are all significant, or 2 x BSF is the dominant component;
* inner-race fault, Y: the dominant component is BPFI;
* outer-race fault, Y: the dominant component is BPFO;
* P: a characteristic frequency is dominant without satisfying a full rule
  (it is significant in both indexes but not the strongest), or the BFP is
  complete while the rest of the ball rule is missing;
* N: none of the above.

A component is significant in an index when it ranks among the ``top_m``
largest values of that index, and dominant when significant in both.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

#: characteristic multiples of shaft speed, by bearing
PRESETS = {
    # CWRU drive end, SKF 6205-2RS JEM
    "cwru-de": dict(bpfo=3.585, bpfi=5.415, ftf=0.3983, bsf=2.357),
    # IMS run-to-failure rig, Rexnord ZA-2115 (236.4, 296.9, 14.8, 139.9 Hz at 2000 rpm)
    "ims-za2115": dict(bpfo=236.4 / (2000 / 60), bpfi=296.9 / (2000 / 60),
                       ftf=14.8 / (2000 / 60), bsf=139.9 / (2000 / 60)),
}

#: multiples of shaft speed forming the ball fault pattern
BFP_MULTIPLES = (3.6, 3.611, 5.4, 5.416)
#: spacing of the slip lock-in family
LOCKIN_MULTIPLE = 0.2

INNER, OUTER, BALL, NONE = "inner-race", "outer-race", "ball", "none"
_FAULT_OF = {"BPFI": INNER, "BPFO": OUTER, "2xBSF": BALL}


@dataclass(frozen=True)
class BearingSpec:
    """Characteristic multiples of the shaft frequency ``shaft_freq`` (Hz)."""

    bpfo: float
    bpfi: float
    ftf: float
    bsf: float
    shaft_freq: float

    def __post_init__(self):
        for name in ("bpfo", "bpfi", "ftf", "bsf", "shaft_freq"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not (self.ftf < 1 < self.bsf < self.bpfo < self.bpfi):
            warnings.warn("unusual bearing geometry: expected ftf < 1 < bsf < bpfo < bpfi",
                          stacklevel=3)

    @classmethod
    def preset(cls, name, shaft_freq=None, rpm=None):
        if (shaft_freq is None) == (rpm is None):
            raise ValueError("give exactly one of shaft_freq and rpm")
        try:
            mult = PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown bearing preset {name!r}; known: {sorted(PRESETS)}") from None
        fr = shaft_freq if shaft_freq is not None else rpm / 60.0
        return cls(shaft_freq=fr, **mult)


@dataclass(frozen=True)
class SignificanceConfig:
    top_m: int = 8
    dominance_ratio: float = 2.0
    match_tol_rel: float = 0.01

    def __post_init__(self):
        if int(self.top_m) != self.top_m or self.top_m < 1:
            raise ValueError("top_m must be a positive integer")
        if not self.dominance_ratio > 1:
            raise ValueError("dominance_ratio must exceed 1")
        if not 0 < self.match_tol_rel < 0.05:
            raise ValueError("match_tol_rel must lie in (0, 0.05)")


def characteristic_frequencies(spec):
    """Labelled characteristic frequencies in Hz."""
    fr = spec.shaft_freq
    out = {
        "BPFO": spec.bpfo * fr,
        "BPFI": spec.bpfi * fr,
        "FTF": spec.ftf * fr,
        "BSF": spec.bsf * fr,
        "2xBSF": 2 * spec.bsf * fr,
    }
    for m in BFP_MULTIPLES:
        out[f"BFP-{m:g}"] = m * fr
    return out


def harmonic_family(base, f_lo, f_hi):
    """``{'k': k * base}`` for the multiples of ``base`` inside ``[f_lo, f_hi]``."""
    k0 = max(1, int(np.ceil(f_lo / base)))
    k1 = int(np.floor(f_hi / base))
    return {k: k * base for k in range(k0, k1 + 1)}


def _matches(freq, target, tol):
    return abs(freq - target) <= tol * target


@dataclass(frozen=True, eq=False)
class Significance:
    """Rankings of the non-zero components and the derived sets.

    ``rank_N`` orders by N, then E, then frequency; ``rank_E`` by E, then N,
    then frequency. ``dominant`` is ordered like ``rank_E``.
    """

    rank_N: np.ndarray
    rank_E: np.ndarray
    significant_N: np.ndarray
    significant_E: np.ndarray
    dominant: np.ndarray
    annotations: dict

    @property
    def significant(self):
        return np.union1d(self.significant_N, self.significant_E)


def find_significant(sios, cfg=None):
    cfg = cfg or SignificanceConfig()
    G, N, E = sios.G, sios.N, sios.E
    nz = np.flatnonzero(N)
    rank_N = nz[np.lexsort((G[nz], -E[nz], -N[nz]))]
    rank_E = nz[np.lexsort((G[nz], -N[nz], -E[nz]))]
    sig_N = rank_N[:cfg.top_m]
    sig_E = rank_E[:cfg.top_m]
    in_N = np.isin(rank_E, sig_N)
    in_E = np.isin(rank_E, sig_E)
    dominant = rank_E[in_N & in_E]
    notes = {}
    for i in sig_E:
        if i not in sig_N:
            notes[int(i)] = "likely discrete component"
    for i in sig_N:
        if i not in sig_E:
            notes[int(i)] = "likely noise"
    return Significance(rank_N, rank_E, np.sort(sig_N), np.sort(sig_E), dominant, notes)


@dataclass(frozen=True)
class Component:
    freq: float
    N: int
    E: float
    label: str = ""
    dominant: bool = False


@dataclass
class DiagnosisResult:
    fault: str
    mark: str
    dominant_components: list = field(default_factory=list)
    bfp_found: bool = False
    top_component: Component = None
    notes: list = field(default_factory=list)

    @property
    def verdict(self):
        return self.mark if self.fault == NONE else f"{self.fault} {self.mark}"


def _bfp_assignment(sios, spec, cfg, candidates):
    """Injective assignment of BFP members to candidate components, or None.

    Among admissible assignments the one with the smallest total relative
    deviation is returned, so the result does not depend on candidate order.
    """
    G = sios.G
    fr = spec.shaft_freq
    options = []
    for m in BFP_MULTIPLES:
        target = m * fr
        opts = [int(i) for i in candidates if _matches(G[i], target, cfg.match_tol_rel)]
        if not opts:
            return None
        options.append(opts)
    best, best_cost = None, np.inf
    for combo in itertools.product(*options):
        if len(set(combo)) < len(combo):
            continue
        cost = sum(abs(G[i] - m * fr) / (m * fr) for i, m in zip(combo, BFP_MULTIPLES))
        if cost < best_cost:
            best, best_cost = combo, cost
    if best is None:
        return None
    return {f"BFP-{m:g}": i for m, i in zip(BFP_MULTIPLES, best)}


def detect_bfp(sios, spec, cfg=None, sig=None):
    """Whether all four BFP members are significant, each on its own component.

    Returns
    -------
    found : bool
    matched : dict
        Member label to component index (empty when not found).
    """
    cfg = cfg or SignificanceConfig()
    sig = sig or find_significant(sios, cfg)
    assignment = _bfp_assignment(sios, spec, cfg, sig.significant)
    return (assignment is not None), (assignment or {})


def _label(freq, chars, cfg):
    """Closest rule anchor within tolerance, or ''."""
    best, best_dev = "", np.inf
    for name in ("BPFI", "BPFO", "2xBSF"):
        target = chars[name]
        dev = abs(freq - target) / target
        if dev <= cfg.match_tol_rel and dev < best_dev:
            best, best_dev = name, dev
    return best


def _covers(sios, freqs):
    lo = sios.G[0]
    hi = sios.G[-1] + sios.grid.delta_G
    return any(lo <= f < hi for f in freqs)


def classify(sios, spec, cfg=None):
    """Apply the fault rules to a SIOS.

    Raises
    ------
    ValueError
        If the grid covers none of the characteristic frequencies.
    """
    cfg = cfg or SignificanceConfig()
    chars = characteristic_frequencies(spec)
    G, N, E = sios.G, sios.N, sios.E
    g_lo, g_hi = G[0], G[-1] + sios.grid.delta_G
    ftf_family = harmonic_family(chars["FTF"], g_lo, g_hi)
    if not _covers(sios, list(chars.values()) + list(ftf_family.values())):
        raise ValueError(
            f"grid [{g_lo:g}, {g_hi:g}) Hz covers no characteristic frequency "
            f"at shaft frequency {spec.shaft_freq:g} Hz")

    sig = find_significant(sios, cfg)
    tol = cfg.match_tol_rel

    def comp(i, label="", dominant=None):
        i = int(i)
        dom = bool(np.isin(i, sig.dominant)) if dominant is None else dominant
        return Component(float(G[i]), int(N[i]), float(E[i]), label, dom)

    notes = []
    if sig.dominant.size == 0:
        return DiagnosisResult(NONE, "N", notes=["no component is significant in both N and E; "
                                                 "no fault evidence"])
    primary = int(sig.dominant[0])
    primary_label = _label(G[primary], chars, cfg)
    top = comp(primary, primary_label, True)

    labelled = [(int(i), _label(G[i], chars, cfg)) for i in sig.dominant]
    evidence = [comp(i, lab, True) for i, lab in labelled if lab]

    bfp_found, bfp = detect_bfp(sios, spec, cfg, sig)
    bsf2_sig = [int(i) for i in sig.significant if _matches(G[i], chars["2xBSF"], tol)]
    ftf_sig = [int(i) for i in sig.significant
               if any(_matches(G[i], f, tol) for f in ftf_family.values())]
    if bfp_found:
        evidence += [comp(i, name) for name, i in bfp.items()]
        notes.append("ball fault pattern present")

    family = _lockin_family(sios, sig, spec, cfg)
    if family:
        notes.append(f"{len(family)} of {sig.significant.size} significant components are "
                     f"harmonics of {LOCKIN_MULTIPLE:g} x shaft speed")

    def result(fault, mark, extra=()):
        ev = _dedupe(evidence + list(extra))
        return DiagnosisResult(fault, mark, ev, bfp_found, top, notes)

    # full rules
    if primary_label == "2xBSF":
        return result(BALL, "Y")
    if bfp_found and bsf2_sig and ftf_sig:
        extra = [comp(i, "2xBSF") for i in bsf2_sig] + [comp(i, "FTF-harmonic") for i in ftf_sig]
        return result(BALL, "Y", extra)
    if primary_label in ("BPFI", "BPFO"):
        return result(_FAULT_OF[primary_label], "Y")

    # partial rules: a characteristic frequency close behind the strongest component
    for i, lab in labelled:
        if not lab or i == primary:
            continue
        if E[i] * cfg.dominance_ratio >= E[primary]:
            return result(_FAULT_OF[lab], "P")
        notes.append(f"{lab} at {G[i]:.2f} Hz is dominant but carries less than "
                     f"1/{cfg.dominance_ratio:g} of the strongest power")
    if bfp_found:
        return result(BALL, "P")

    notes.append(f"strongest dominant component {G[primary]:.2f} Hz matches no "
                 "characteristic frequency; no fault evidence")
    return DiagnosisResult(NONE, "N", [], bfp_found, top, notes)


def _lockin_family(sios, sig, spec, cfg):
    base = LOCKIN_MULTIPLE * spec.shaft_freq
    G = sios.G
    out = []
    for i in sig.significant:
        k = round(G[i] / base)
        if k >= 1 and abs(G[i] - k * base) <= cfg.match_tol_rel * base:
            out.append(int(i))
    return out


def _dedupe(components):
    seen = {}
    for c in components:
        key = c.freq
        if key not in seen or (not seen[key].label and c.label):
            seen[key] = c
    return sorted(seen.values(), key=lambda c: (-c.E, c.freq))
