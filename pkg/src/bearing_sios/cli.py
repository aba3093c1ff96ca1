"""Command-line interface: ``bearing-sios <subcommand>``.

Exit codes: 0, 10 and 20 report a Y, P or N verdict (``diagnose`` and
``run``, and 0 for any other successful command); 1 means ``reproduce``
found a mismatch; 64 bad usage, 65 bad data or configuration, 66 missing
input, 73 output could not be written, 70 anything else.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import ingest
from .diagnose import PRESETS, classify
from .peaksearch import peak_fraction
from .pipeline import PipelineError, build_config, read_config_file, run_pipeline
from .simulate import SimulationParams, simulate_bearing_signal

EXIT_VERDICT = {"Y": 0, "P": 10, "N": 20}
EX_MISMATCH = 1
EX_USAGE, EX_DATAERR, EX_NOINPUT, EX_SOFTWARE, EX_CANTCREAT = 64, 65, 66, 70, 73

log = logging.getLogger("bearing_sios")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _snr_arg(text):
    return float("inf") if text.lower() == "none" else float(text)


def _add_input(p):
    p.add_argument("input", help="record file (.csv, or .f64/.bin raw little-endian float64)")
    p.add_argument("--fs", type=float, help="sampling rate in Hz (default: from the .meta sidecar)")


def _add_spectrum(p):
    p.add_argument("--window", choices=("boxcar", "hann"), help="spectral window (default boxcar)")
    p.add_argument("--segments", type=int, dest="n_segments",
                   help="average this many non-overlapping segments (default 1)")


def _add_peaks(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--l-bins", type=int, dest="half_window", help="moving-average half window in bins")
    g.add_argument("--l-hz", type=float, dest="window_hz",
                   help="moving-average window width in Hz (default 114)")
    d = p.add_mutually_exclusive_group()
    d.add_argument("--delta", type=float, help="threshold offset in power units")
    d.add_argument("--auto-delta", action="store_true",
                   help="tune delta for a 0.5-3%% peak fraction (the default without --delta)")


def _add_grid(p):
    p.add_argument("--fl", type=float, dest="f_low", help="grid lower bound in Hz (default 100)")
    p.add_argument("--fh", type=float, dest="f_high", help="grid upper bound in Hz (default 200)")
    p.add_argument("--theta", type=int, help="grid refinement, delta_G = delta_s / theta (default 10)")
    p.add_argument("--closed-grid", action="store_true", default=None,
                   help="include f_high in the grid")
    p.add_argument("--literal-pseudocode", action="store_true",
                   help="count a peak once per accepting fundamental, not once per component")
    p.add_argument("--no-resolution-check", action="store_true",
                   help="build the SIOS even if the spectrum is too coarse")


def _add_bearing(p):
    s = p.add_mutually_exclusive_group()
    s.add_argument("--rpm", type=float, dest="bearing_rpm", help="shaft speed in rev/min")
    s.add_argument("--fr", type=float, dest="bearing_shaft_freq", help="shaft frequency in Hz")
    p.add_argument("--bearing-preset", dest="bearing_preset", choices=sorted(PRESETS),
                   help="characteristic multiples (default cwru-de)")
    for name in ("bpfo", "bpfi", "ftf", "bsf"):
        p.add_argument(f"--{name}", type=float, dest=f"bearing_{name}",
                       help=f"{name.upper()} as a multiple of shaft speed")
    p.add_argument("--tol", type=float, dest="match_tol_rel",
                   help="relative frequency match tolerance (default 0.01)")
    p.add_argument("--top-m", type=int, dest="top_m",
                   help="components per index counted as significant (default 8)")
    p.add_argument("--dominance-ratio", type=float, dest="dominance_ratio",
                   help="power ratio within which a dominant component still counts (default 2)")


def make_parser():
    parser = _Parser(prog="bearing-sios",
                     description="Bearing fault diagnosis by spectrum searching.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="write a simulated faulty-bearing record")
    d = SimulationParams()
    p.add_argument("-o", "--output", required=True, help=".csv or .f64 output path")
    p.add_argument("--format", choices=("csv", "raw"))
    p.add_argument("--decay", type=float, default=d.decay)
    p.add_argument("--fault-freq", type=float, default=d.fault_freq)
    p.add_argument("--resonant-freq", type=float, default=d.resonant_freq)
    p.add_argument("--fs", type=float, default=d.fs)
    p.add_argument("--samples", type=int, default=d.num_samples)
    p.add_argument("--slip", type=float, default=d.slippage[1],
                   help="onset jitter bound in samples, drawn from [-slip, slip]")
    p.add_argument("--snr", type=_snr_arg, default=d.snr_db, help="SNR in dB, or 'none'")
    p.add_argument("--seed", type=int, default=d.seed)

    p = sub.add_parser("spectrum", help="single-sided power spectrum as F_hz,P")
    _add_input(p)
    _add_spectrum(p)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--svg", help="also write a line plot")

    p = sub.add_parser("peaks", help="local peaks as bin,F_hz,P")
    _add_input(p)
    _add_spectrum(p)
    _add_peaks(p)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--svg", help="also write the spectrum with peaks marked")

    p = sub.add_parser("sios", help="harmonic count and power per grid component as G_hz,N,E")
    _add_input(p)
    _add_spectrum(p)
    _add_peaks(p)
    _add_grid(p)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--plots", metavar="STEM", help="write STEM_N.svg and STEM_E.svg")

    p = sub.add_parser("diagnose", help="classify a bearing fault")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--sios", dest="sios_csv", help="SIOS CSV written by the sios command")
    src.add_argument("--signal", dest="input", help="record file; runs the whole pipeline")
    p.add_argument("--fs", type=float)
    _add_spectrum(p)
    _add_peaks(p)
    _add_grid(p)
    _add_bearing(p)
    p.add_argument("-o", "--output", help="key/value result file")

    p = sub.add_parser("run", help="full pipeline from a record or a simulation")
    p.add_argument("input", nargs="?", help="record file (omit with --simulate)")
    p.add_argument("--fs", type=float)
    p.add_argument("--config", help="INI configuration file; flags take precedence")
    p.add_argument("--simulate", action="store_true", help="analyse a simulated record")
    p.add_argument("--seed", type=int, dest="sim_seed")
    p.add_argument("--samples", type=int, dest="sim_num_samples")
    _add_spectrum(p)
    _add_peaks(p)
    _add_grid(p)
    _add_bearing(p)
    p.add_argument("--out-dir", dest="output_dir", help="directory for intermediate artifacts")
    p.add_argument("--plots", action="store_true", default=None, dest="emit_plots",
                   help="also write SVG plots into --out-dir")

    p = sub.add_parser("reproduce", help="compare verdicts on dataset records with the reference manifest")
    p.add_argument("--data-root", help=f"directory of converted records (default ${ingest.DATA_ROOT_ENV})")
    p.add_argument("--manifest", help="manifest CSV (default: bundled)")
    p.add_argument("--only", nargs="*", help="restrict to these record ids")
    p.add_argument("--report", help="write the comparison table as CSV")
    return parser


def _options(args, config=None):
    opts = dict(config or {})
    for k, v in vars(args).items():
        if v is not None and k not in ("command", "verbose", "config", "output", "svg", "plots",
                                       "sios_csv", "format", "literal_pseudocode",
                                       "no_resolution_check", "auto_delta"):
            opts[k] = v
    if "input" in opts:
        opts["input_path"] = opts.pop("input")
    if getattr(args, "auto_delta", False):
        opts.pop("delta", None)
    if getattr(args, "literal_pseudocode", False):
        opts["dedupe"] = False
    if getattr(args, "no_resolution_check", False):
        opts["check_resolution"] = False
    if opts.get("window_hz") is not None and getattr(args, "half_window", None) is None:
        opts.pop("half_window", None)
    return opts


def _print_diagnosis(result, out=None):
    out = out or sys.stdout
    print(f"verdict: {result.mark}  fault: {result.fault}", file=out)
    if result.top_component is not None:
        t = result.top_component
        print(f"strongest dominant component: {t.freq:.2f} Hz  N={t.N}  E={t.E:.4g}"
              + (f"  ({t.label})" if t.label else ""), file=out)
    for c in result.dominant_components:
        kind = "dominant" if c.dominant else "significant"
        print(f"  {c.freq:9.2f} Hz  N={c.N:<4d} E={c.E:.4g}  {c.label or '-'}  [{kind}]", file=out)
    for note in result.notes:
        print(f"  note: {note}", file=out)


def _print_sios_summary(res, out=None):
    out = out or sys.stdout
    rc = res.resolution
    print(f"resolution: delta_s={res.spectrum.delta_s:.6g} Hz, bound={rc.bound:.6g} Hz, "
          f"margin={rc.margin:.4f} ({'pass' if rc.passed else 'FAIL'})", file=out)
    print(f"peaks: {len(res.peaks)} ({100 * peak_fraction(res.peaks):.2f}% of bins), "
          f"l={res.peak_config.half_window}, delta={res.peak_config.delta:.6g}", file=out)
    G, N, E = res.sios.G, res.sios.N, res.sios.E
    dom = res.significance.dominant
    if dom.size:
        print("dominant components (significant in N and E):", file=out)
        for i in dom:
            print(f"  {G[i]:9.3f} Hz  N={N[i]:<4d} E={E[i]:.4g}", file=out)
    else:
        print("no dominant component", file=out)


def cmd_simulate(args):
    params = SimulationParams(decay=args.decay, fault_freq=args.fault_freq,
                              resonant_freq=args.resonant_freq, fs=args.fs,
                              num_samples=args.samples, slippage=(-args.slip, args.slip),
                              snr_db=args.snr, seed=args.seed)
    signal = simulate_bearing_signal(params)
    ingest.write_timeseries(signal, args.output, args.format, seed=args.seed,
                            fault_freq=args.fault_freq, snr_db=args.snr)
    return 0


def _front(args):
    """Load, transform and search peaks for the spectrum/peaks/sios commands."""
    from .pipeline import load_signal, peaks_stage, spectrum_stage
    cfg = build_config(_options(args))
    signal = load_signal(cfg)
    spectrum = spectrum_stage(signal, cfg)
    return cfg, signal, spectrum, (lambda: peaks_stage(spectrum, cfg))


def cmd_spectrum(args):
    _, _, spectrum, _ = _front(args)
    ingest.write_results(spectrum, args.output, "csv")
    if args.svg:
        ingest.write_results(spectrum, args.svg, "svg")
    return 0


def cmd_peaks(args):
    _, _, _, peaks = _front(args)
    pcfg, peaks = peaks()
    ingest.write_results(peaks, args.output, "csv")
    if args.svg:
        ingest.write_results(peaks, args.svg, "svg")
    print(f"{len(peaks)} peaks ({100 * peak_fraction(peaks):.2f}% of bins), "
          f"l={pcfg.half_window}, delta={pcfg.delta:.6g}")
    return 0


def cmd_sios(args):
    from .pipeline import sios_stage
    cfg, signal, _, peaks = _front(args)
    _, peaks = peaks()
    rc, _, sios = sios_stage(peaks, signal.fs, cfg)
    ingest.write_results(sios, args.output, "csv")
    if args.plots:
        ingest.write_sios_plots(sios, args.plots)
    print(f"resolution margin {rc.margin:.4f}; {int((sios.N > 0).sum())} non-zero components")
    return 0


def _finish_diagnosis(result, output):
    _print_diagnosis(result)
    if output:
        ingest.write_results(result, output, "kv")
    return EXIT_VERDICT[result.mark]


def cmd_diagnose(args):
    opts = _options(args)
    cfg = build_config(opts)
    if cfg.bearing is None:
        raise ValueError("diagnose needs the shaft speed (--rpm or --fr)")
    if args.sios_csv:
        sios = ingest.read_sios_csv(args.sios_csv)
        result = classify(sios, cfg.bearing, cfg.significance)
    else:
        result = run_pipeline(cfg).diagnosis
    return _finish_diagnosis(result, args.output)


def cmd_run(args):
    config = read_config_file(args.config) if args.config else {}
    opts = _options(args, config)
    if args.input is None and not args.simulate and "input_path" not in opts \
            and not any(k.startswith("sim_") for k in opts):
        raise _UsageError("give an input file or --simulate")
    if args.simulate:
        opts.setdefault("sim_seed", 0)
    cfg = build_config(opts)
    res = run_pipeline(cfg)
    _print_sios_summary(res)
    for p in res.artifacts:
        log.info("wrote %s", p)
    if res.diagnosis is None:
        return 0
    return _finish_diagnosis(res.diagnosis, None)


def cmd_reproduce(args):
    from .reproduce import reproduce
    root = Path(args.data_root) if args.data_root else ingest.data_root()
    rows = ingest.load_manifest(args.manifest)
    if args.only:
        rows = [r for r in rows if r.record_id in set(args.only)]
    report = reproduce(rows, root)
    if args.report:
        report.write_csv(args.report)
    return EX_MISMATCH if report.mismatches else 0


class _UsageError(Exception):
    pass


COMMANDS = {"simulate": cmd_simulate, "spectrum": cmd_spectrum, "peaks": cmd_peaks,
            "sios": cmd_sios, "diagnose": cmd_diagnose, "run": cmd_run,
            "reproduce": cmd_reproduce}


def _exit_code(exc):
    cause = exc.cause if isinstance(exc, PipelineError) else exc
    if isinstance(cause, FileNotFoundError):
        return EX_NOINPUT
    if isinstance(cause, OSError):
        return EX_CANTCREAT
    if isinstance(cause, (ValueError, IndexError, KeyError)):
        return EX_DATAERR
    return EX_SOFTWARE


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"bearing-sios: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except Exception as exc:
        print(f"bearing-sios {args.command}: error: {exc}", file=sys.stderr)
        if args.verbose:
            raise
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
