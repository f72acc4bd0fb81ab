"""Crash-warning rules, trend fits and crash-correction measurement on ``h_loc`` tracks.

A sell signal needs four conditions at once:

1. ``h_loc`` is falling (negative OLS slope over ``trend_lookback`` sessions)
   and the 5-session average sits below the 21-session one on at least
   ``cross_fraction`` of the last ``cross_lookback`` sessions;
2. 21-session average ``<= ma21_ceiling``;
3. 5-session average ``<= ma5_ceiling``;
4. at least ``minima_count`` local minima of ``h_loc`` within
   ``trend_lookback`` sessions at or below ``minima_ceiling``.

A buy signal is the case where none of them holds; anything else is neutral.
"""

from __future__ import annotations

import datetime as dt
import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    DegenerateRegressionError,
    InsufficientDataError,
    InsufficientHistoryError,
    InvalidParameterError,
    NoCrossingError,
)
from .track import LONG_MA, HurstTrack, PriceSeries


class Verdict(str, enum.Enum):
    SELL = "sell"
    BUY = "buy"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class SignalThresholds:
    ma21_ceiling: float = 0.5
    ma5_ceiling: float = 0.45
    minima_ceiling: float = 0.4
    trend_lookback: int = 21
    cross_lookback: int = 10
    cross_fraction: float = 0.8
    minima_count: int = 2

    def __post_init__(self):
        if not self.minima_ceiling < self.ma5_ceiling < self.ma21_ceiling:
            raise InvalidParameterError(
                "ceilings must satisfy minima_ceiling < ma5_ceiling < ma21_ceiling")
        if self.trend_lookback < 2 or self.cross_lookback < 2:
            raise InvalidParameterError("lookbacks must be >= 2")
        if not 0 < self.cross_fraction <= 1:
            raise InvalidParameterError("cross_fraction must lie in (0, 1]")
        if self.minima_count < 1:
            raise InvalidParameterError("minima_count must be >= 1")

    @property
    def history(self) -> int:
        """Number of trailing track entries a verdict depends on."""
        return max(self.trend_lookback, self.cross_lookback, LONG_MA)


@dataclass(frozen=True)
class SignalVerdict:
    session: int
    cond1: bool
    cond2: bool
    cond3: bool
    cond4: bool

    @property
    def conditions(self) -> tuple[bool, bool, bool, bool]:
        return (self.cond1, self.cond2, self.cond3, self.cond4)

    @property
    def verdict(self) -> Verdict:
        if all(self.conditions):
            return Verdict.SELL
        if not any(self.conditions):
            return Verdict.BUY
        return Verdict.NEUTRAL


@dataclass(frozen=True)
class CrashEvent:
    rupture_session: int
    initial_3session_drop: float
    total_drop: float
    duration: int
    rupture_date: dt.date | None = None
    is_crash: bool = True


@dataclass(frozen=True)
class TrendFit:
    slope: float  # per session
    intercept: float  # fitted h_loc at session 0
    fit_window: tuple[int, int]
    r_squared: float

    def value_at(self, session: float) -> float:
        return self.intercept + self.slope * session


@dataclass(frozen=True)
class CorrectionModel:
    """``total_drop = a * |slope| + b``."""

    a: float
    b: float
    r_squared: float
    n_events: int

    @property
    def low_confidence(self) -> bool:
        return self.n_events <= 3


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Slope, intercept and r-squared; r-squared is 1 when ``y`` is constant."""
    xm, ym = x.mean(), y.mean()
    xc, yc = x - xm, y - ym
    sxx = float(xc @ xc)
    if sxx == 0:
        raise DegenerateRegressionError("abscissae have no spread")
    slope = float(xc @ yc) / sxx
    resid = yc - slope * xc
    sst = float(yc @ yc)
    r2 = 1.0 - float(resid @ resid) / sst if sst > 0 else 1.0
    return slope, float(ym - slope * xm), r2


def local_minima(values: np.ndarray) -> np.ndarray:
    """Indices of strict local minima; a flat bottom counts once, at its first entry.

    End points never qualify since only one neighbour is known.

    >>> local_minima(np.array([3., 1., 2., 0., 0., 1., 0.]))
    array([1, 3])
    """
    values = np.asarray(values, dtype=float)
    if len(values) < 3:
        return np.array([], dtype=int)
    starts = np.flatnonzero(np.concatenate([[True], values[1:] != values[:-1]]))
    runs = values[starts]
    inner = np.arange(1, len(runs) - 1)
    is_min = (runs[inner] < runs[inner - 1]) & (runs[inner] < runs[inner + 1])
    return starts[inner[is_min]]


def evaluate_signal(track: HurstTrack, session: int,
                    thresholds: SignalThresholds | None = None) -> SignalVerdict:
    """Evaluate the four sell conditions at ``session``.

    Only the trailing ``thresholds.history`` entries up to ``session`` are
    read; moving averages are taken from the track as stored.
    """
    th = thresholds or SignalThresholds()
    pos = track.position(session)
    ma5, ma21 = track.ma5[pos], track.ma21[pos]
    if np.isnan(ma5) or np.isnan(ma21):
        raise InsufficientHistoryError(f"moving averages undefined at session {session}")
    if pos + 1 < max(th.trend_lookback, th.cross_lookback):
        raise InsufficientHistoryError(f"not enough entries before session {session}")

    lo = pos + 1 - th.trend_lookback
    sess = track.sessions[lo:pos + 1].astype(float)
    h = track.h_loc[lo:pos + 1]
    ok = ~np.isnan(h)
    if ok.sum() < 2:
        raise InsufficientHistoryError(f"fewer than two ok entries before session {session}")
    try:
        slope = _ols(sess[ok], h[ok])[0]
    except DegenerateRegressionError:
        slope = 0.0

    c_lo = pos + 1 - th.cross_lookback
    below = track.ma5[c_lo:pos + 1] < track.ma21[c_lo:pos + 1]  # nan compares False
    cond1 = slope < 0 and below.sum() >= th.cross_fraction * th.cross_lookback

    mins = h[ok][local_minima(h[ok])]
    cond4 = int((mins <= th.minima_ceiling).sum()) >= th.minima_count

    return SignalVerdict(
        session=int(session),
        cond1=bool(cond1),
        cond2=bool(ma21 <= th.ma21_ceiling),
        cond3=bool(ma5 <= th.ma5_ceiling),
        cond4=bool(cond4),
    )


def evaluable_sessions(track: HurstTrack, thresholds: SignalThresholds | None = None
                       ) -> np.ndarray:
    th = thresholds or SignalThresholds()
    pos = np.arange(len(track))
    ok = (~np.isnan(track.ma5) & ~np.isnan(track.ma21)
          & (pos + 1 >= max(th.trend_lookback, th.cross_lookback)))
    # need two ok h_loc values inside the trend window
    counts = np.convolve(track.ok.astype(int), np.ones(th.trend_lookback, dtype=int))[:len(track)]
    return track.sessions[ok & (counts >= 2)]


def signal_timeline(track: HurstTrack, thresholds: SignalThresholds | None = None
                    ) -> list[SignalVerdict]:
    """Verdicts for every evaluable session, in session order."""
    sessions = evaluable_sessions(track, thresholds)
    if len(sessions) == 0:
        raise InsufficientHistoryError("track has no evaluable session")
    return [evaluate_signal(track, s, thresholds) for s in sessions]


def fit_hloc_trend(track: HurstTrack, fit_window: tuple[int, int]) -> TrendFit:
    """OLS line of ``h_loc`` on session over the inclusive ``fit_window``; gaps skipped."""
    start, end = (int(v) for v in fit_window)
    keep = (track.sessions >= start) & (track.sessions <= end) & track.ok
    if keep.sum() < 5:
        raise InsufficientDataError(
            f"{int(keep.sum())} ok entries in [{start}, {end}], need 5")
    slope, intercept, r2 = _ols(track.sessions[keep].astype(float), track.h_loc[keep])
    return TrendFit(slope, intercept, (start, end), r2)


def measure_correction(series: PriceSeries, rupture_session: int, horizon: int = 60
                       ) -> CrashEvent:
    """Relative drop from the rupture close to the lowest close within ``horizon``.

    The search covers sessions ``(rupture, rupture + horizon]`` clipped to
    the series end.  Rises are clamped to a zero drop and flagged with
    ``is_crash=False``.
    """
    if horizon < 3:
        raise InvalidParameterError("horizon must be >= 3")
    r = int(rupture_session)
    closes = series.closes
    if r < 0 or r + 3 >= len(closes):
        raise InsufficientDataError(
            f"rupture {r} needs 3 following sessions in a series of {len(closes)}")
    ref = closes[r]
    after = closes[r + 1:r + 1 + horizon]
    k = int(np.argmin(after))
    total = (ref - after[k]) / ref
    initial = (ref - closes[r + 3]) / ref
    date = series.dates[r] if series.dates else None
    if total <= 0:
        return CrashEvent(r, max(float(initial), 0.0), 0.0, 0, date, is_crash=False)
    return CrashEvent(r, max(float(initial), 0.0), float(total), k + 1, date)


def slope_correction_regression(events: Iterable[tuple[float, float]]) -> CorrectionModel:
    """Regress correction size on the absolute ``h_loc`` trend slope."""
    pts = np.array(list(events), dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        raise InsufficientDataError("regression needs at least two events")
    a, b, r2 = _ols(np.abs(pts[:, 0]), pts[:, 1])
    return CorrectionModel(a, b, r2, len(pts))


def extrapolate_trend(fit: TrendFit, target_h: float) -> float:
    """Session at which the fitted falling line reaches ``target_h``."""
    if not fit.slope < 0:
        raise NoCrossingError(f"slope {fit.slope} is not negative")
    if not target_h < fit.value_at(fit.fit_window[1]):
        raise NoCrossingError(
            f"target {target_h} is not below the fitted value at the window end")
    return (target_h - fit.intercept) / fit.slope
