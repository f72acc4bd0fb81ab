"""CSV readers and writers.

Formats (UTF-8, comma separated, ``.`` decimals; lines starting with ``#``
are comments):

* price series: ``date,close`` -- date is ISO-8601 or empty, the session
  index is the row position (rows are never re-sorted);
* Hurst track: ``session,h_loc,d_loc,ma5,ma21,r_squared,status`` -- floats
  with 10 significant digits, undefined values as empty fields;
* signal timeline: ``session,cond1,cond2,cond3,cond4,verdict`` -- conditions
  as ``0``/``1``;
* fluctuation curves: ``session,tau,ln_tau,ln_f2``;
* crash report: one row per event plus ``#`` summary lines.
"""

from __future__ import annotations

import contextlib
import csv
import datetime as dt
import io
import math
import os
from typing import IO, Iterable, Iterator, Mapping

import numpy as np

from .errors import EmptyInputError, ParseError, ValidationError
from .signals import CorrectionModel, CrashEvent, SignalVerdict, TrendFit
from .track import HurstTrack, PriceSeries

SERIES_HEADER = ["date", "close"]
TRACK_HEADER = ["session", "h_loc", "d_loc", "ma5", "ma21", "r_squared", "status"]
SIGNAL_HEADER = ["session", "cond1", "cond2", "cond3", "cond4", "verdict"]
CURVE_HEADER = ["session", "tau", "ln_tau", "ln_f2"]
REPORT_HEADER = ["rupture_session", "rupture_date", "initial_3session_drop", "total_drop",
                 "duration", "is_crash", "trend_slope", "trend_r_squared"]


@contextlib.contextmanager
def _open(target, mode: str):
    if isinstance(target, (str, os.PathLike)):
        with open(target, mode, encoding="utf-8", newline="") as fh:
            yield fh
    else:
        yield target


def _fmt(x: float) -> str:
    return "" if x is None or math.isnan(x) else f"{x:.10g}"


def _rows(fh: IO[str]) -> Iterator[tuple[int, list[str]]]:
    for lineno, line in enumerate(fh, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        yield lineno, next(csv.reader([text]))


def _header(rows: Iterator[tuple[int, list[str]]], expected: list[str]) -> None:
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise EmptyInputError("empty input") from None
    if [h.strip() for h in header] != expected:
        raise ParseError(f"expected header {','.join(expected)}, got {','.join(header)}", lineno)


def _float(text: str, lineno: int, name: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"cannot parse {name} {text!r}", lineno) from None


def read_series(source) -> PriceSeries:
    """Read a ``date,close`` CSV from a path or text stream."""
    closes, dates = [], []
    with _open(source, "r") as fh:
        rows = _rows(fh)
        _header(rows, SERIES_HEADER)
        for lineno, row in rows:
            if len(row) != 2:
                raise ParseError(f"expected 2 fields, got {len(row)}", lineno)
            date_text, close_text = (f.strip() for f in row)
            close = _float(close_text, lineno, "close")
            if not math.isfinite(close) or close <= 0:
                raise ValidationError(f"close must be finite and positive, got {close_text}",
                                      lineno)
            try:
                date = dt.date.fromisoformat(date_text) if date_text else None
            except ValueError:
                raise ParseError(f"bad date {date_text!r}", lineno) from None
            closes.append(close)
            dates.append(date)
    if not closes:
        raise EmptyInputError("no data rows")
    return PriceSeries(np.array(closes), tuple(dates))


def write_series(series: PriceSeries, target, metadata: Mapping[str, object] | None = None
                 ) -> None:
    """Write a ``date,close`` CSV; closes use the shortest exact float repr."""
    dates = series.dates or (None,) * len(series)
    with _open(target, "w") as fh:
        for key, value in (metadata or {}).items():
            fh.write(f"# {key}: {value}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_HEADER)
        for d, c in zip(dates, series.closes):
            w.writerow([d.isoformat() if d else "", repr(float(c))])


def write_track(track: HurstTrack, target) -> None:
    with _open(target, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACK_HEADER)
        for i, s in enumerate(track.sessions):
            h = track.h_loc[i]
            w.writerow([int(s), _fmt(h), _fmt(2.0 - h), _fmt(track.ma5[i]), _fmt(track.ma21[i]),
                        _fmt(track.r_squared[i]), "gap" if math.isnan(h) else "ok"])


def read_track(source) -> HurstTrack:
    """Read a track CSV.  Moving averages are taken from the file, not recomputed."""
    cols: dict[str, list[float]] = {k: [] for k in ("session", "h_loc", "ma5", "ma21", "r2")}
    with _open(source, "r") as fh:
        rows = _rows(fh)
        _header(rows, TRACK_HEADER)
        for lineno, row in rows:
            if len(row) != len(TRACK_HEADER):
                raise ParseError(f"expected {len(TRACK_HEADER)} fields, got {len(row)}", lineno)
            s, h, _, m5, m21, r2, status = (f.strip() for f in row)
            if status not in ("ok", "gap"):
                raise ParseError(f"bad status {status!r}", lineno)
            if (status == "ok") != bool(h):
                raise ValidationError("h_loc must be present exactly for ok rows", lineno)
            try:
                session = int(s)
            except ValueError:
                raise ParseError(f"bad session {s!r}", lineno) from None
            if cols["session"] and session != cols["session"][-1] + 1:
                raise ValidationError("sessions must be contiguous and ascending", lineno)
            cols["session"].append(session)
            for key, text in (("h_loc", h), ("ma5", m5), ("ma21", m21), ("r2", r2)):
                cols[key].append(_float(text, lineno, key) if text else math.nan)
    if not cols["session"]:
        raise EmptyInputError("no data rows")
    return HurstTrack(
        sessions=np.array(cols["session"]),
        h_loc=np.array(cols["h_loc"]),
        r_squared=np.array(cols["r2"]),
        ma5=np.array(cols["ma5"]),
        ma21=np.array(cols["ma21"]),
    )


def write_curves(track: HurstTrack, target) -> None:
    """Per-session ``(ln tau, ln F2)`` pairs; needs a track built with ``keep_curves``."""
    if track.curves is None or track.config is None:
        raise ValueError("track carries no fluctuation curves")
    taus = np.array(track.config.tau_grid)
    with _open(target, "w") as fh, np.errstate(divide="ignore"):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for s, f2 in zip(track.sessions, track.curves):
            for tau, f in zip(taus, f2):
                w.writerow([int(s), int(tau), _fmt(math.log(tau)),
                            _fmt(math.log(f)) if f > 0 else ""])


def write_signals(verdicts: Iterable[SignalVerdict], target) -> None:
    with _open(target, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SIGNAL_HEADER)
        for v in verdicts:
            w.writerow([v.session, *(int(c) for c in v.conditions), v.verdict.value])


def read_signals(source) -> list[SignalVerdict]:
    out = []
    with _open(source, "r") as fh:
        rows = _rows(fh)
        _header(rows, SIGNAL_HEADER)
        for lineno, row in rows:
            try:
                session, *conds = (int(f) for f in row[:5])
            except ValueError:
                raise ParseError("bad integer field", lineno) from None
            v = SignalVerdict(session, *(bool(c) for c in conds))
            if v.verdict.value != row[5].strip():
                raise ValidationError(f"verdict {row[5]!r} contradicts conditions", lineno)
            out.append(v)
    return out


def write_crash_report(events: list[CrashEvent], target, fits: list[TrendFit] | None = None,
                       model: CorrectionModel | None = None) -> None:
    """Event rows (drops in exact float repr) followed by ``#`` regression summary lines."""
    with _open(target, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for i, e in enumerate(events):
            fit = fits[i] if fits else None
            w.writerow([
                e.rupture_session,
                e.rupture_date.isoformat() if e.rupture_date else "",
                repr(e.initial_3session_drop),
                repr(e.total_drop),
                e.duration,
                int(e.is_crash),
                _fmt(fit.slope) if fit else "",
                _fmt(fit.r_squared) if fit else "",
            ])
        if model is not None:
            fh.write(f"# regression: total_drop = {model.a:.10g} * |slope| + {model.b:.10g}\n")
            fh.write(f"# r_squared: {model.r_squared:.10g}\n")
            fh.write(f"# n_events: {model.n_events}\n")
            if model.low_confidence:
                fh.write("# low_confidence: true\n")


def read_crash_report(source) -> list[dict[str, str]]:
    with _open(source, "r") as fh:
        text = "".join(line for line in fh if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(text)))
