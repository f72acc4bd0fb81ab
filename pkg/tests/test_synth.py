import numpy as np
import pytest

import oracles
from hloc import FbmSpec, generate_crash_series, generate_fbm, generate_fgn, hurst_dfa
from hloc.errors import InvalidParameterError, InvalidProfileError
from hloc.signals import measure_correction
from hloc.synth import fbm_price_series, fgn_autocovariance


class TestSpec:
    @pytest.mark.parametrize("kw", [dict(hurst=0.0), dict(hurst=1.0), dict(hurst=1.2),
                                    dict(length=15), dict(scale=0.0), dict(seed=-1)])
    def test_invalid(self, kw):
        args = dict(hurst=0.5, length=64, seed=1) | kw
        with pytest.raises(InvalidParameterError):
            FbmSpec(**args)


def test_autocovariance_at_half_is_white():
    np.testing.assert_allclose(fgn_autocovariance(np.arange(6), 0.5), [1, 0, 0, 0, 0, 0],
                               atol=1e-15)


def test_autocovariance_lag_one():
    # 0.5 * (2**1.4 - 2)
    assert fgn_autocovariance(1, 0.7) == pytest.approx(0.3195079107728942, rel=1e-14)


def test_half_is_uncorrelated():
    n = 4096
    x = generate_fgn(FbmSpec(0.5, n, seed=11))
    r1 = np.corrcoef(x[:-1], x[1:])[0, 1]
    assert abs(r1) <= 3 / np.sqrt(n)


def test_seeded_determinism():
    spec = FbmSpec(0.7, 1000, seed=42)
    assert generate_fbm(spec).tobytes() == generate_fbm(spec).tobytes()
    assert generate_fbm(spec).tobytes() != generate_fbm(FbmSpec(0.7, 1000, seed=43)).tobytes()


def test_global_dfa_h07():
    hs = [hurst_dfa(generate_fbm(FbmSpec(0.7, 4096, seed=s))).h_loc for s in range(20)]
    assert np.mean(hs) == pytest.approx(0.7, abs=0.05)


@pytest.mark.parametrize("hurst", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("method", ["circulant", "levinson"])
def test_autocovariance_converges(hurst, method):
    n = 2 ** 14 if method == "circulant" else 2 ** 12
    x = generate_fgn(FbmSpec(hurst, n, seed=3), method)
    gamma = fgn_autocovariance(np.arange(3000), hurst)
    for lag in range(1, 6):
        got = oracles.sample_autocovariance(x, lag)
        assert abs(got - gamma[lag]) <= 4 * oracles.bartlett_se(gamma, lag, n)


@pytest.mark.parametrize("hurst", [0.3, 0.5, 0.7])
def test_increment_variance_scaling(hurst):
    path = generate_fbm(FbmSpec(hurst, 2 ** 14, seed=9))
    ks = np.array([1, 2, 4, 8, 16])
    v = [np.var(path[k:] - path[:-k]) for k in ks]
    slope = np.polyfit(np.log(ks), np.log(v), 1)[0]
    assert slope == pytest.approx(2 * hurst, abs=0.1)


def test_scale_multiplies_std():
    a = generate_fgn(FbmSpec(0.6, 256, seed=1))
    b = generate_fgn(FbmSpec(0.6, 256, seed=1, scale=2.5))
    np.testing.assert_allclose(b, 2.5 * a, rtol=1e-12)


def test_unknown_method():
    with pytest.raises(InvalidParameterError):
        generate_fgn(FbmSpec(0.6, 64), "cholesky")


def test_price_series_floor():
    s = fbm_price_series(FbmSpec(0.5, 500, seed=4), floor=100.0)
    assert s.closes.min() == pytest.approx(100.0)


class TestCrashSeries:
    @pytest.mark.parametrize("drop,days", [(0.65, 41), (0.39, 30), (0.21, 24)])
    def test_round_trip(self, drop, days):
        s = generate_crash_series(60, [(days, drop)])
        e = measure_correction(s, 59)
        assert e.total_drop == drop and e.duration == days

    def test_initial_drop_knot(self):
        s = generate_crash_series(10, [(3, 0.11), (41, 0.65)])
        e = measure_correction(s, 9)
        assert (e.initial_3session_drop, e.total_drop, e.duration) == (0.11, 0.65, 41)

    def test_empty_schedule(self):
        s = generate_crash_series(30, [])
        e = measure_correction(s, 29)
        assert e.total_drop == 0 and not e.is_crash

    @pytest.mark.parametrize("base", [1.0, 3.7, 20760.0, 61234.56])
    def test_other_bases_within_rounding(self, base):
        s = generate_crash_series(5, [(3, 0.05), (24, 0.21)], base=base)
        e = measure_correction(s, 4)
        assert e.initial_3session_drop == pytest.approx(0.05, rel=1e-13)
        assert e.total_drop == pytest.approx(0.21, rel=1e-13)

    @pytest.mark.parametrize("pct", range(1, 100))
    def test_whole_percent_exact_at_base_100(self, pct):
        drop = pct / 100
        e = measure_correction(generate_crash_series(5, [(10, drop)]), 4)
        assert e.total_drop == drop

    @pytest.mark.parametrize("profile", [[(10, 1.0)], [(10, -0.1)], [(5, 0.1), (5, 0.2)]])
    def test_bad_profile(self, profile):
        with pytest.raises(InvalidProfileError):
            generate_crash_series(10, profile)
