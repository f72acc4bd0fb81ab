"""Command-line interface: ``hloc <subcommand> ...``.

Exit codes::

    0   success
    1   other package error
    2   usage error (bad flag or parameter value)
    3   unparsable input file (including empty input)
    4   invalid data (e.g. non-positive close)
    5   insufficient data (series shorter than the window, ...)
    6   insufficient history for signal evaluation
    7   degenerate window or regression
    8   trend never reaches the target level
    9   synthetic generation failure
    10  I/O error
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys

from . import __version__
from .dfa import Coverage, DfaConfig, default_tau_grid
from .errors import (
    DegenerateRegressionError,
    DegenerateWindowError,
    EmptyInputError,
    GenerationError,
    HlocError,
    InsufficientDataError,
    InsufficientHistoryError,
    InsufficientScalesError,
    InvalidDataError,
    InvalidParameterError,
    InvalidProfileError,
    InvalidScaleError,
    NoCrossingError,
    ParseError,
    ValidationError,
)
from .ingest import (
    read_series,
    read_track,
    write_crash_report,
    write_curves,
    write_series,
    write_signals,
    write_track,
)
from .signals import (
    SignalThresholds,
    Verdict,
    extrapolate_trend,
    fit_hloc_trend,
    measure_correction,
    signal_timeline,
    slope_correction_regression,
)
from .synth import RNG_ALGORITHM, FbmSpec, fbm_price_series, generate_crash_series
from .track import sliding_hurst

EXIT_OK = 0
EXIT_CODES: dict[type, int] = {
    HlocError: 1,
    InvalidParameterError: 2,
    InvalidScaleError: 2,
    InsufficientScalesError: 2,
    InvalidProfileError: 2,
    ParseError: 3,
    EmptyInputError: 3,
    ValidationError: 4,
    InvalidDataError: 4,
    InsufficientDataError: 5,
    InsufficientHistoryError: 6,
    DegenerateWindowError: 7,
    DegenerateRegressionError: 7,
    NoCrossingError: 8,
    GenerationError: 9,
    OSError: 10,
}


def exit_code(exc: BaseException) -> int:
    for cls in type(exc).__mro__:
        if cls in EXIT_CODES:
            return EXIT_CODES[cls]
    raise exc


@contextlib.contextmanager
def _output(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _fit_window(text: str) -> tuple[int, int]:
    try:
        start, end = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:END, got {text!r}") from None
    return start, end


def _dfa_config(args) -> DfaConfig:
    grid = default_tau_grid(args.window_len, tau_min=args.tau_min, tau_max=args.tau_max)
    lo = args.scale_lo if args.scale_lo is not None else grid[0]
    hi = args.scale_hi if args.scale_hi is not None else grid[-1]
    return DfaConfig(
        window_len=args.window_len,
        tau_grid=grid,
        scaling_range=(lo, hi),
        detrend_order=args.detrend_order,
        coverage=Coverage(args.coverage),
        integrate_profile=args.integrate,
    )


def _thresholds(args) -> SignalThresholds:
    return SignalThresholds(
        ma21_ceiling=args.ma21_ceiling,
        ma5_ceiling=args.ma5_ceiling,
        minima_ceiling=args.minima_ceiling,
        trend_lookback=args.trend_lookback,
        cross_lookback=args.cross_lookback,
        cross_fraction=args.cross_fraction,
        minima_count=args.minima_count,
    )


def cmd_track(args) -> int:
    series = read_series(args.input)
    track = sliding_hurst(series, _dfa_config(args), workers=args.workers,
                          keep_curves=args.curves is not None)
    with _output(args.output) as fh:
        write_track(track, fh)
    if args.curves:
        with _output(args.curves) as fh:
            write_curves(track, fh)
    return EXIT_OK


def cmd_signal(args) -> int:
    track = read_track(args.track)
    verdicts = signal_timeline(track, _thresholds(args))
    with _output(args.output) as fh:
        write_signals(verdicts, fh)
    onset = next((v.session for v in verdicts if v.verdict is Verdict.SELL), None)
    msg = f"first sell onset: session {onset}" if onset is not None else "no sell signal"
    print(msg, file=sys.stderr if args.output == "-" else sys.stdout)
    return EXIT_OK


def cmd_crash_report(args) -> int:
    series = read_series(args.series)
    windows = args.fit_window or []
    if args.track is None and windows:
        raise InvalidParameterError("--fit-window requires --track")
    if args.track is not None and len(windows) != len(args.rupture):
        raise InvalidParameterError("give one --fit-window per --rupture")
    # everything is computed before anything is written: no partial reports
    events = [measure_correction(series, r, args.horizon) for r in args.rupture]
    fits, model = None, None
    if args.track is not None:
        track = read_track(args.track)
        fits = [fit_hloc_trend(track, w) for w in windows]
        if len(events) >= 2:
            model = slope_correction_regression(
                (f.slope, e.total_drop) for f, e in zip(fits, events))
        else:
            print("warning: regression needs at least two events; skipped", file=sys.stderr)
    with _output(args.output) as fh:
        write_crash_report(events, fh, fits, model)
    return EXIT_OK


def cmd_synth(args, parser) -> int:
    if args.crash_drop is not None:
        if args.crash_duration is None:
            parser.error("--crash-drop requires --crash-duration")
        profile = []
        if args.initial_drop is not None:
            profile.append((3, args.initial_drop))
        profile.append((args.crash_duration, args.crash_drop))
        series = generate_crash_series(args.pre_len, profile, base=args.base,
                                       tail_len=args.tail_len)
        meta = {"generator": "crash-schedule", "rupture_session": args.pre_len - 1,
                "schedule": " ".join(f"{o}:{d!r}" for o, d in profile), "base": args.base}
    else:
        try:
            spec = FbmSpec(args.hurst, args.length, args.seed, args.scale)
        except InvalidParameterError as exc:
            parser.error(str(exc))
        series = fbm_price_series(spec, floor=args.floor)
        meta = {"generator": "fbm circulant-embedding", "rng": RNG_ALGORITHM,
                "seed": args.seed, "hurst": args.hurst, "length": args.length,
                "scale": args.scale, "floor": args.floor}
    with _output(args.output) as fh:
        write_series(series, fh, meta)
    return EXIT_OK


def cmd_fit_trend(args) -> int:
    fit = fit_hloc_trend(read_track(args.track), (args.start, args.end))
    print(f"slope: {fit.slope:.10g}")
    print(f"intercept: {fit.intercept:.10g}")
    print(f"r_squared: {fit.r_squared:.10g}")
    print(f"fit_window: {fit.fit_window[0]}:{fit.fit_window[1]}")
    return EXIT_OK


def cmd_extrapolate(args) -> int:
    fit = fit_hloc_trend(read_track(args.track), (args.start, args.end))
    crossing = extrapolate_trend(fit, args.target)
    first = math.ceil(crossing)
    # the division can land an ulp past an integer crossing
    if fit.value_at(first - 1) <= args.target:
        first -= 1
    print(f"slope: {fit.slope:.10g}")
    print(f"crossing_session: {crossing:.10g}")
    print(f"sessions_ahead: {crossing - fit.fit_window[1]:.10g}")
    print(f"first_session_at_or_below: {first}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hloc", description="Local Hurst exponent toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("track", help="sliding-window h_loc track")
    t.add_argument("--input", required=True, help="date,close CSV")
    t.add_argument("--output", default="-")
    t.add_argument("--window-len", type=int, default=215)
    t.add_argument("--tau-min", type=int, default=4)
    t.add_argument("--tau-max", type=int, default=None, help="default: window-len // 4")
    t.add_argument("--scale-lo", type=int, default=None)
    t.add_argument("--scale-hi", type=int, default=None)
    t.add_argument("--integrate", action="store_true",
                   help="use the cumulative sum of mean-subtracted values as profile")
    t.add_argument("--detrend-order", type=int, default=1)
    t.add_argument("--coverage", choices=[c.value for c in Coverage],
                   default=Coverage.WITH_OVERLAP_TAIL.value)
    t.add_argument("--curves", default=None, help="also write per-session ln tau, ln F2")
    t.add_argument("--workers", type=int, default=1)
    t.set_defaults(func=cmd_track)

    s = sub.add_parser("signal", help="sell/buy/neutral timeline from a track")
    s.add_argument("--track", required=True)
    s.add_argument("--output", default="-")
    defaults = SignalThresholds()
    s.add_argument("--ma21-ceiling", type=float, default=defaults.ma21_ceiling)
    s.add_argument("--ma5-ceiling", type=float, default=defaults.ma5_ceiling)
    s.add_argument("--minima-ceiling", type=float, default=defaults.minima_ceiling)
    s.add_argument("--trend-lookback", type=int, default=defaults.trend_lookback)
    s.add_argument("--cross-lookback", type=int, default=defaults.cross_lookback)
    s.add_argument("--cross-fraction", type=float, default=defaults.cross_fraction)
    s.add_argument("--minima-count", type=int, default=defaults.minima_count)
    s.set_defaults(func=cmd_signal)

    c = sub.add_parser("crash-report", help="crash corrections and slope regression")
    c.add_argument("--series", required=True)
    c.add_argument("--rupture", type=int, action="append", required=True)
    c.add_argument("--track", default=None)
    c.add_argument("--fit-window", type=_fit_window, action="append",
                   help="START:END sessions, one per --rupture")
    c.add_argument("--horizon", type=int, default=60)
    c.add_argument("--output", default="-")
    c.set_defaults(func=cmd_crash_report)

    y = sub.add_parser("synth", help="write a synthetic fixture series")
    y.add_argument("--output", default="-")
    y.add_argument("--hurst", type=float, default=0.5)
    y.add_argument("--length", type=int, default=1000)
    y.add_argument("--seed", type=int, default=0)
    y.add_argument("--scale", type=float, default=1.0)
    y.add_argument("--floor", type=float, default=100.0, help="minimum price of the fBm fixture")
    y.add_argument("--crash-drop", type=float, default=None,
                   help="total relative drop; switches to a crash fixture")
    y.add_argument("--crash-duration", type=int, default=None)
    y.add_argument("--initial-drop", type=float, default=None,
                   help="relative drop after the first 3 sessions")
    y.add_argument("--pre-len", type=int, default=250)
    y.add_argument("--base", type=float, default=100.0)
    y.add_argument("--tail-len", type=int, default=40)
    y.set_defaults(func=lambda a: cmd_synth(a, y))

    for name, func, helptext in (("fit-trend", cmd_fit_trend, "OLS line through h_loc"),
                                 ("extrapolate", cmd_extrapolate, "when the trend hits a level")):
        f = sub.add_parser(name, help=helptext)
        f.add_argument("--track", required=True)
        f.add_argument("--start", type=int, required=True)
        f.add_argument("--end", type=int, required=True)
        if name == "extrapolate":
            f.add_argument("--target", type=float, default=0.4)
        f.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (HlocError, OSError) as exc:
        print(f"hloc {args.command}: {exc}", file=sys.stderr)
        return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
