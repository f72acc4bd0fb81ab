"""Synthetic series with known properties.

Fractional Gaussian noise is drawn with the exact autocovariance by circulant
embedding (Davies-Harte); when the embedding is not non-negative definite the
generator falls back to exact sequential conditioning (Durbin-Levinson).
Random numbers come from numpy's ``PCG64`` bit generator so a seed fully
determines the output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GenerationError, InvalidParameterError, InvalidProfileError
from .track import PriceSeries

RNG_ALGORITHM = "numpy.PCG64"

# relative size of negative circulant eigenvalues treated as rounding noise
_EIG_RTOL = 1e-10


@dataclass(frozen=True)
class FbmSpec:
    hurst: float
    length: int
    seed: int = 0
    scale: float = 1.0

    def __post_init__(self):
        if not 0 < self.hurst < 1:
            raise InvalidParameterError(f"hurst must lie in (0, 1), got {self.hurst}")
        if self.length < 16:
            raise InvalidParameterError(f"length must be >= 16, got {self.length}")
        if not self.scale > 0:
            raise InvalidParameterError("scale must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidParameterError("seed must be a 64-bit unsigned integer")


def fgn_autocovariance(lags, hurst: float, scale: float = 1.0) -> np.ndarray:
    """``(s**2 / 2) * (|k+1|**2H - 2|k|**2H + |k-1|**2H)``."""
    k = np.abs(np.asarray(lags, dtype=float))
    two_h = 2.0 * hurst
    return 0.5 * scale ** 2 * (np.abs(k + 1) ** two_h - 2 * k ** two_h + np.abs(k - 1) ** two_h)


def _circulant_fgn(n: int, hurst: float, scale: float, rng: np.random.Generator):
    m = 2 * n
    gamma = fgn_autocovariance(np.arange(n + 1), hurst, scale)
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    eig = np.fft.fft(row).real
    if eig.min() < -_EIG_RTOL * eig.max():
        return None
    eig = np.clip(eig, 0.0, None)
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    # real part of F diag(sqrt(eig/m)) z has covariance exactly the embedded circulant
    return np.fft.fft(np.sqrt(eig / m) * z)[:n].real


def _levinson_fgn(n: int, hurst: float, scale: float, rng: np.random.Generator):
    gamma = fgn_autocovariance(np.arange(n), hurst, scale)
    z = rng.standard_normal(n)
    x = np.empty(n)
    phi = np.zeros(n)
    var = gamma[0]
    x[0] = np.sqrt(var) * z[0]
    for t in range(1, n):
        prev = phi[:t - 1].copy()
        k = (gamma[t] - prev @ gamma[1:t][::-1]) / var
        phi[:t - 1] = prev - k * prev[::-1]
        phi[t - 1] = k
        var *= 1.0 - k * k
        if var <= 0:
            raise GenerationError(f"conditional variance collapsed at step {t}")
        x[t] = phi[:t] @ x[:t][::-1] + np.sqrt(var) * z[t]
    return x


def generate_fgn(spec: FbmSpec, method: str = "auto") -> np.ndarray:
    """Fractional Gaussian noise of ``spec.length`` samples.

    ``method`` is ``"auto"`` (circulant, falling back to Levinson),
    ``"circulant"`` or ``"levinson"``.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    n = spec.length
    if method in ("auto", "circulant"):
        x = _circulant_fgn(n, spec.hurst, spec.scale, rng)
        if x is not None:
            return x
        if method == "circulant":
            raise GenerationError("circulant embedding is not non-negative definite")
        rng = np.random.Generator(np.random.PCG64(spec.seed))
    elif method != "levinson":
        raise InvalidParameterError(f"unknown method {method!r}")
    x = _levinson_fgn(n, spec.hurst, spec.scale, rng)
    if not np.all(np.isfinite(x)):
        raise GenerationError("non-finite sample")
    return x


def generate_fbm(spec: FbmSpec, method: str = "auto") -> np.ndarray:
    """Fractional Brownian motion path: cumulative sum of :func:`generate_fgn`."""
    return np.cumsum(generate_fgn(spec, method))


def fbm_price_series(spec: FbmSpec, floor: float = 100.0) -> PriceSeries:
    """fBm path shifted so its minimum equals ``floor``.

    A constant shift leaves every DFA fluctuation unchanged.
    """
    path = generate_fbm(spec)
    return PriceSeries(path - path.min() + floor)


def _exact_level(base: float, drop: float) -> float:
    # search nearby floats for one where (base - level) / base == drop
    start = base - base * drop
    level = start
    for _ in range(8):
        got = (base - level) / base
        if got == drop:
            return float(level)
        level = np.nextafter(level, np.inf if got > drop else -np.inf)
    return start


def generate_crash_series(pre_len: int, post_profile: Sequence[tuple[int, float]],
                          base: float = 100.0, tail_len: int = 20,
                          tail_growth: float = 0.002) -> PriceSeries:
    """Flat run at ``base`` followed by a scheduled drop and a recovery tail.

    ``post_profile`` lists ``(offset, cumulative_drop)`` knots measured from
    the rupture, which is session ``pre_len - 1``.  Prices between knots
    follow a straight line in drop fraction.  Knot prices are nudged so that
    ``measure_correction`` recovers each drop bit for bit whenever some
    float price allows it (always for ``base=100`` and whole-percent drops;
    otherwise to within a few ulps).  After the last knot
    prices rise by ``tail_growth`` per session for ``tail_len`` sessions.

    >>> s = generate_crash_series(5, [(41, 0.65)])
    >>> float(s.closes[4 + 41])
    35.0
    """
    if pre_len < 1:
        raise InvalidParameterError("pre_len must be >= 1")
    knots = [(0, 0.0)] + [(int(o), float(d)) for o, d in post_profile]
    for (o0, _), (o1, d1) in zip(knots, knots[1:]):
        if o1 <= o0:
            raise InvalidProfileError("drop offsets must be strictly increasing and >= 1")
        if not 0 <= d1 < 1:
            raise InvalidProfileError(f"drop {d1} at offset {o1} gives a non-positive price")

    post = []
    for (o0, d0), (o1, d1) in zip(knots, knots[1:]):
        for j in range(o0 + 1, o1):
            d = d0 + (d1 - d0) * (j - o0) / (o1 - o0)
            post.append(base * (1.0 - d))
        post.append(_exact_level(base, d1))
    bottom = post[-1] if post else base
    tail = bottom * (1.0 + tail_growth * np.arange(1, tail_len + 1))
    return PriceSeries(np.concatenate([np.full(pre_len, base), post, tail]))
