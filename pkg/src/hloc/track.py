"""Time-dependent local Hurst exponent.

The observation window of ``N`` sessions is moved one session at a time over
a price series; each position gets its own DFA estimate.  Windows are
estimated independently (no state is carried between neighbours), in
fixed-size batches that may be spread over threads without changing a single
bit of the result.
"""

from __future__ import annotations

import datetime as dt
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .dfa import DfaConfig, estimate_windows
from .errors import InsufficientDataError, InvalidDataError, InvalidParameterError

SHORT_MA = 5
LONG_MA = 21

_BATCH = 256


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Closing values indexed by session (0-based position); dates are metadata."""

    closes: np.ndarray
    dates: tuple[dt.date | None, ...] | None = None

    def __post_init__(self):
        closes = np.asarray(self.closes, dtype=float)
        if closes.ndim != 1:
            raise InvalidDataError("closes must be one-dimensional")
        if not np.all(np.isfinite(closes)):
            raise InvalidDataError("closes must be finite")
        if np.any(closes <= 0):
            bad = int(np.flatnonzero(closes <= 0)[0])
            raise InvalidDataError(f"non-positive close at session {bad}")
        object.__setattr__(self, "closes", closes)
        if self.dates is not None:
            dates = tuple(self.dates)
            if len(dates) != len(closes):
                raise InvalidDataError("dates and closes differ in length")
            object.__setattr__(self, "dates", dates)

    def __len__(self):
        return len(self.closes)

    def __eq__(self, other):
        if not isinstance(other, PriceSeries):
            return NotImplemented
        return np.array_equal(self.closes, other.closes) and self.dates == other.dates

    @property
    def session_ids(self) -> np.ndarray:
        return np.arange(len(self.closes))


class HurstPoint(NamedTuple):
    session: int
    h_loc: float
    r_squared: float
    status: str


@dataclass(frozen=True, eq=False)
class HurstTrack:
    """Per-session ``h_loc`` with its 5- and 21-session moving averages.

    Gaps (degenerate windows) are ``nan`` in ``h_loc`` and ``r_squared``;
    undefined moving averages are ``nan`` as well.
    """

    sessions: np.ndarray
    h_loc: np.ndarray
    r_squared: np.ndarray
    ma5: np.ndarray
    ma21: np.ndarray
    config: DfaConfig | None = None
    curves: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_values(cls, h_loc, start_session: int = 0, r_squared=None,
                    config: DfaConfig | None = None, curves=None) -> "HurstTrack":
        """Build a track from raw ``h_loc`` values (``nan`` marks gaps)."""
        h = np.asarray(h_loc, dtype=float)
        if r_squared is None:
            r_squared = np.where(np.isnan(h), np.nan, 1.0)
        return cls(
            sessions=np.arange(start_session, start_session + len(h)),
            h_loc=h,
            r_squared=np.asarray(r_squared, dtype=float),
            ma5=moving_average(h, SHORT_MA),
            ma21=moving_average(h, LONG_MA),
            config=config,
            curves=curves,
        )

    def __len__(self):
        return len(self.sessions)

    @property
    def ok(self) -> np.ndarray:
        return ~np.isnan(self.h_loc)

    @property
    def d_loc(self) -> np.ndarray:
        return 2.0 - self.h_loc

    @property
    def status(self) -> list[str]:
        return ["ok" if o else "gap" for o in self.ok]

    def entries(self) -> list[HurstPoint]:
        return [HurstPoint(int(s), float(h), float(r), st)
                for s, h, r, st in zip(self.sessions, self.h_loc, self.r_squared, self.status)]

    def position(self, session: int) -> int:
        pos = int(session) - int(self.sessions[0]) if len(self) else -1
        if not 0 <= pos < len(self):
            raise KeyError(f"session {session} not in track")
        return pos

    def slice(self, start: int, stop: int) -> "HurstTrack":
        """Entries at positions ``start:stop``; stored averages are kept as-is."""
        return HurstTrack(
            sessions=self.sessions[start:stop],
            h_loc=self.h_loc[start:stop],
            r_squared=self.r_squared[start:stop],
            ma5=self.ma5[start:stop],
            ma21=self.ma21[start:stop],
            config=self.config,
            curves=None if self.curves is None else self.curves[start:stop],
        )

    def tail(self, n: int) -> "HurstTrack":
        return self.slice(max(len(self) - n, 0), len(self))

    def equals(self, other: "HurstTrack") -> bool:
        """Exact equality of all per-session arrays (``nan`` equal to ``nan``)."""
        return (np.array_equal(self.sessions, other.sessions)
                and all(np.array_equal(getattr(self, a), getattr(other, a), equal_nan=True)
                        for a in ("h_loc", "r_squared", "ma5", "ma21")))


def moving_average(values, k: int) -> np.ndarray:
    """Mean of the ``k`` most recent non-gap values ending at each position.

    Gaps (``nan``) are skipped rather than propagated, and a position inside
    a gap still gets the average of the values before it.  Positions with
    fewer than ``k`` non-gap values up to and including them are ``nan``.

    >>> moving_average([1, 2, 3, 4, 5, 6], 5)
    array([nan, nan, nan, nan,  3.,  4.])
    """
    if k < 1:
        raise InvalidParameterError("moving-average window must be >= 1")
    values = np.asarray(values, dtype=float)
    ok = ~np.isnan(values)
    dense = values[ok]
    out = np.full(len(values), np.nan)
    if len(dense) < k:
        return out
    means = sliding_window_view(dense, k).mean(axis=1)
    count = np.cumsum(ok)
    have = count >= k
    out[have] = means[count[have] - k]
    return out


def _as_values(series) -> np.ndarray:
    if isinstance(series, PriceSeries):
        return series.closes
    values = np.asarray(series, dtype=float)
    if values.ndim != 1 or not np.all(np.isfinite(values)):
        raise InvalidDataError("series must be a one-dimensional finite sequence")
    return values


def sliding_hurst(series: PriceSeries | Sequence[float], config: DfaConfig | None = None,
                  workers: int = 1, keep_curves: bool = False) -> HurstTrack:
    """Estimate ``h_loc`` for every window ``[i - N + 1, i]`` with ``i >= N - 1``.

    ``workers > 1`` evaluates batches on a thread pool; the output is
    identical to the serial run.  ``keep_curves`` stores the full ``F2``
    matrix on the track (one row per entry, columns follow ``config.tau_grid``).
    """
    config = config or DfaConfig()
    values = _as_values(series)
    n = config.window_len
    if len(values) < n:
        raise InsufficientDataError(f"series has {len(values)} sessions, window needs {n}")
    windows = sliding_window_view(values, n)
    bounds = [(s, min(s + _BATCH, len(windows))) for s in range(0, len(windows), _BATCH)]

    def run(b):
        return estimate_windows(windows[b[0]:b[1]], config)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, bounds))
    else:
        parts = [run(b) for b in bounds]

    h = np.concatenate([p[0] for p in parts])
    r2 = np.concatenate([p[1] for p in parts])
    curves = np.concatenate([p[3] for p in parts]) if keep_curves else None
    return HurstTrack.from_values(h, start_session=n - 1, r_squared=r2,
                                  config=config, curves=curves)
