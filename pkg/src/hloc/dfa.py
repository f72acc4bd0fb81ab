"""Detrended fluctuation analysis on a single observation window.

The window of ``N`` sessions is covered with boxes of ``tau`` sessions laid
backwards from the most recent session.  When ``N`` is not a multiple of
``tau`` an extra box covering the oldest ``tau`` sessions is added, so the
whole window is used (it overlaps its neighbour).  A polynomial trend (linear
by default) is removed from each box and the mean squared residual is
averaged over boxes, giving ``F2(tau)``.  The local Hurst exponent is half
the slope of ``ln F2`` against ``ln tau``.

Prices are treated as the DFA profile directly unless ``integrate_profile``
is set, in which case the cumulative sum of mean-subtracted values is used
(the textbook form for increment data).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    DegenerateWindowError,
    InsufficientScalesError,
    InvalidDataError,
    InvalidParameterError,
    InvalidScaleError,
)

MIN_SCALES = 4

# residual variance below (_DEGENERACY_RTOL * spread)**2 is rounding noise
_DEGENERACY_RTOL = 1e-12


class Coverage(str, enum.Enum):
    WITH_OVERLAP_TAIL = "overlap-tail"
    TRUNCATE_TAIL = "truncate-tail"


def default_tau_grid(window_len: int, tau_min: int = 4, tau_max: int | None = None,
                     ratio: float = 2 ** 0.25) -> tuple[int, ...]:
    """Integer box sizes spaced by roughly ``ratio`` from ``tau_min`` to ``tau_max``.

    ``tau_max`` defaults to ``window_len // 4``.  Both endpoints are always
    included and duplicates from rounding are dropped.
    """
    if tau_max is None:
        tau_max = window_len // 4
    if tau_min < 2 or tau_max < tau_min:
        raise InvalidScaleError(f"bad tau bounds [{tau_min}, {tau_max}] for N={window_len}")
    n = int(np.floor(np.log(tau_max / tau_min) / np.log(ratio) + 1e-9)) + 1
    grid = np.rint(tau_min * ratio ** np.arange(n)).astype(int)
    grid = np.unique(np.concatenate([grid, [tau_min, tau_max]]))
    return tuple(int(t) for t in grid if tau_min <= t <= tau_max)


@dataclass(frozen=True)
class DfaConfig:
    """Settings for one DFA evaluation.

    ``tau_grid`` defaults to :func:`default_tau_grid` and ``scaling_range``
    (inclusive ``(lo, hi)`` bounds on tau) to the full grid.
    """

    window_len: int = 215
    tau_grid: tuple[int, ...] | None = None
    scaling_range: tuple[int, int] | None = None
    detrend_order: int = 1
    coverage: Coverage = Coverage.WITH_OVERLAP_TAIL
    integrate_profile: bool = False

    def __post_init__(self):
        if self.detrend_order < 1:
            raise InvalidParameterError("detrend_order must be >= 1")
        grid = self.tau_grid
        if grid is None:
            grid = default_tau_grid(self.window_len, tau_min=max(4, self.detrend_order + 2))
        grid = tuple(int(t) for t in grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidScaleError("tau_grid must be strictly ascending")
        if grid[0] < self.detrend_order + 2:
            raise InvalidScaleError(
                f"smallest box {grid[0]} leaves no residual for order {self.detrend_order}")
        if 4 * grid[-1] > self.window_len:
            raise InvalidScaleError(
                f"largest box {grid[-1]} exceeds N/4 for N={self.window_len}")
        object.__setattr__(self, "tau_grid", grid)
        object.__setattr__(self, "coverage", Coverage(self.coverage))

        lo, hi = self.scaling_range or (grid[0], grid[-1])
        if lo > hi:
            raise InvalidScaleError(f"empty scaling range [{lo}, {hi}]")
        object.__setattr__(self, "scaling_range", (int(lo), int(hi)))
        if len(self.fit_taus) < MIN_SCALES:
            raise InsufficientScalesError(
                f"scaling range [{lo}, {hi}] holds {len(self.fit_taus)} grid points, "
                f"need {MIN_SCALES}")

    @property
    def fit_taus(self) -> tuple[int, ...]:
        lo, hi = self.scaling_range
        return tuple(t for t in self.tau_grid if lo <= t <= hi)

    def with_window_len(self, window_len: int) -> "DfaConfig":
        """Same settings for a different N; an auto grid is rebuilt for the new N."""
        auto = self.tau_grid == default_tau_grid(
            self.window_len, tau_min=max(4, self.detrend_order + 2))
        return DfaConfig(
            window_len=window_len,
            tau_grid=None if auto else self.tau_grid,
            scaling_range=None if auto else self.scaling_range,
            detrend_order=self.detrend_order,
            coverage=self.coverage,
            integrate_profile=self.integrate_profile,
        )


@dataclass(frozen=True)
class ObservationWindow:
    values: np.ndarray
    end_session: int | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise InvalidDataError("window must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise InvalidDataError("window contains non-finite values")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class FluctuationCurve:
    taus: np.ndarray
    f2: np.ndarray

    def log_points(self) -> tuple[np.ndarray, np.ndarray]:
        with np.errstate(divide="ignore"):
            return np.log(self.taus), np.log(self.f2)

    def restrict(self, scaling_range: tuple[int, int] | None) -> "FluctuationCurve":
        if scaling_range is None:
            return self
        lo, hi = scaling_range
        keep = (self.taus >= lo) & (self.taus <= hi)
        return FluctuationCurve(self.taus[keep], self.f2[keep])


@dataclass(frozen=True)
class HurstEstimate:
    h_loc: float
    r_squared: float
    stderr_slope: float  # of the ln F2 vs ln tau slope, i.e. of 2*h_loc
    n_scales: int
    intercept: float
    curve: FluctuationCurve | None = field(default=None, repr=False, compare=False)

    @property
    def d_loc(self) -> float:
        return 2.0 - self.h_loc


def partition_boxes(n: int, tau: int, coverage: Coverage = Coverage.WITH_OVERLAP_TAIL
                    ) -> list[tuple[int, int]]:
    """Half-open ``(start, stop)`` offsets of the boxes covering a window of ``n``.

    >>> partition_boxes(10, 5)
    [(5, 10), (0, 5)]
    >>> partition_boxes(7, 3, Coverage.TRUNCATE_TAIL)
    [(4, 7), (1, 4)]
    """
    if tau < 2 or tau > n:
        raise InvalidScaleError(f"box size {tau} outside [2, {n}]")
    boxes = [(n - (k + 1) * tau, n - k * tau) for k in range(n // tau)]
    if n % tau and Coverage(coverage) is Coverage.WITH_OVERLAP_TAIL:
        boxes.append((0, tau))
    return boxes


@lru_cache(maxsize=512)
def _box_index(n: int, tau: int, coverage: Coverage) -> np.ndarray:
    starts = np.array([s for s, _ in partition_boxes(n, tau, coverage)])
    idx = starts[:, None] + np.arange(tau)
    idx.flags.writeable = False
    return idx


@lru_cache(maxsize=512)
def _detrend_basis(tau: int, order: int) -> np.ndarray:
    # Orthonormal polynomial basis on offsets 0..tau-1, constant term excluded
    # (boxes are mean-centred separately).
    x = np.arange(tau, dtype=float)
    x = (x - x.mean()) / max(x.std(), 1.0)
    q, _ = np.linalg.qr(np.vander(x, order + 1, increasing=True))
    basis = np.ascontiguousarray(q[:, 1:].T)
    basis.flags.writeable = False
    return basis


def _rowsum(x: np.ndarray) -> np.ndarray:
    """Sum over the last axis, strictly left to right.

    numpy's own reductions pick a summation order that depends on the array
    shape; this one does not, so a window's result is bitwise the same
    whatever batch it is computed in.
    """
    out = x[..., 0].copy()
    for j in range(1, x.shape[-1]):
        out += x[..., j]
    return out


def _rowmean(x: np.ndarray) -> np.ndarray:
    return _rowsum(x) / x.shape[-1]


def _box_variances(boxes: np.ndarray, order: int) -> np.ndarray:
    """Mean squared residual along the last axis after removing a degree-``order`` fit."""
    resid = boxes - _rowmean(boxes)[..., None]
    for q in _detrend_basis(boxes.shape[-1], order):
        resid -= _rowsum(resid * q)[..., None] * q
    return _rowmean(resid * resid)


def detrended_variance(segment, order: int = 1) -> float:
    """Mean squared residual of an OLS polynomial fit against offsets ``0..len-1``."""
    segment = np.asarray(segment, dtype=float)
    if not np.all(np.isfinite(segment)):
        raise InvalidDataError("segment contains non-finite values")
    if len(segment) < order + 2:
        raise InvalidScaleError(f"segment of {len(segment)} too short for order {order}")
    return float(_box_variances(segment[None, :], order)[0])


def _profiles(windows: np.ndarray, integrate: bool) -> np.ndarray:
    if integrate:
        return np.cumsum(windows - _rowmean(windows)[..., None], axis=-1)
    return windows


def _f2_matrix(windows: np.ndarray, taus, order: int, coverage: Coverage,
               integrate: bool) -> np.ndarray:
    """``F2`` for a stack of windows, shape ``(n_windows, n_taus)``.

    Values indistinguishable from rounding noise relative to the window's own
    spread are set to exactly zero.
    """
    n = windows.shape[-1]
    profiles = _profiles(windows, integrate)
    out = np.empty((profiles.shape[0], len(taus)))
    for j, tau in enumerate(taus):
        boxes = profiles[:, _box_index(n, int(tau), Coverage(coverage))]
        out[:, j] = _rowmean(_box_variances(boxes, order))
    spread = np.abs(profiles - _rowmean(profiles)[..., None]).max(axis=-1)
    out[out <= (_DEGENERACY_RTOL * spread[:, None]) ** 2] = 0.0
    return out


def fluctuations_at(values, taus, order: int = 1,
                    coverage: Coverage = Coverage.WITH_OVERLAP_TAIL,
                    integrate: bool = False) -> FluctuationCurve:
    """``F2`` at arbitrary box sizes, checking only that each box fits the window.

    Unlike :func:`fluctuation_function` this does not enforce the
    ``DfaConfig`` limits, so it also serves very short windows.
    """
    window = ObservationWindow(values)
    taus = np.asarray(taus, dtype=int)
    for tau in taus:
        partition_boxes(len(window), int(tau), coverage)
        if tau < order + 2:
            raise InvalidScaleError(f"box size {tau} too small for order {order}")
    f2 = _f2_matrix(window.values[None, :], taus, order, coverage, integrate)[0]
    return FluctuationCurve(taus, f2)


def fluctuation_function(window, config: DfaConfig) -> FluctuationCurve:
    """Average detrended variance ``F2(tau)`` for every tau in the config grid."""
    if not isinstance(window, ObservationWindow):
        window = ObservationWindow(window)
    values = window.values
    if len(values) != config.window_len:
        raise InvalidDataError(
            f"window has {len(values)} values, config expects {config.window_len}")
    if np.ptp(values) == 0:
        raise DegenerateWindowError("constant window")
    return fluctuations_at(values, config.tau_grid, config.detrend_order, config.coverage,
                           config.integrate_profile)


def _loglog_fit(taus: np.ndarray, f2: np.ndarray):
    """Row-wise OLS of ``ln f2`` on ``ln taus``; returns slope, intercept, r2, stderr."""
    x = np.log(taus.astype(float))
    xc = x - x.mean()
    sxx = (xc * xc).sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.log(f2)
        ym = _rowmean(y)[..., None]
        slope = _rowsum((y - ym) * xc) / sxx
        resid = y - ym - slope[..., None] * xc
        sse = _rowsum(resid * resid)
        sst = _rowsum((y - ym) ** 2)
        r2 = np.where(sst > 0, 1.0 - sse / sst, 1.0)
        stderr = np.sqrt(sse / (len(x) - 2) / sxx)
    intercept = ym[..., 0] - slope * x.mean()
    return slope, intercept, np.clip(r2, 0.0, 1.0), stderr


def estimate_hurst(curve: FluctuationCurve, scaling_range: tuple[int, int] | None = None
                   ) -> HurstEstimate:
    """Fit ``F2 ~ tau**(2H)`` over the scaling range."""
    fit = curve.restrict(scaling_range)
    if len(fit.taus) < MIN_SCALES:
        raise InsufficientScalesError(
            f"{len(fit.taus)} scales in range, need {MIN_SCALES}")
    if np.any(fit.f2 <= 0):
        raise DegenerateWindowError("zero fluctuation inside the scaling range")
    slope, intercept, r2, stderr = _loglog_fit(fit.taus, fit.f2)
    return HurstEstimate(
        h_loc=float(slope) / 2.0,
        r_squared=float(r2),
        stderr_slope=float(stderr),
        n_scales=len(fit.taus),
        intercept=float(intercept),
        curve=curve,
    )


def hurst_dfa(values, config: DfaConfig | None = None) -> HurstEstimate:
    """DFA estimate over the whole of ``values`` (the window is the series)."""
    values = np.asarray(values, dtype=float)
    if config is None:
        config = DfaConfig(window_len=len(values))
    curve = fluctuation_function(values, config)
    return estimate_hurst(curve, config.scaling_range)


def estimate_windows(windows: np.ndarray, config: DfaConfig):
    """Vectorised estimate for a 2-D stack of windows.

    Returns ``(h_loc, r_squared, stderr_slope, f2)``; degenerate windows get
    ``nan`` in the first three arrays.
    """
    windows = np.ascontiguousarray(windows, dtype=float)
    f2 = _f2_matrix(windows, config.tau_grid, config.detrend_order, config.coverage,
                    config.integrate_profile)
    fit = np.isin(np.array(config.tau_grid), config.fit_taus)
    f2_fit = f2[:, fit]
    ok = np.all(f2_fit > 0, axis=1) & (np.ptp(windows, axis=1) > 0)
    slope, _, r2, stderr = _loglog_fit(np.array(config.fit_taus), np.where(ok[:, None], f2_fit, 1.0))
    nan = np.full(len(windows), np.nan)
    return (np.where(ok, slope / 2.0, nan), np.where(ok, r2, nan),
            np.where(ok, stderr, nan), f2)
