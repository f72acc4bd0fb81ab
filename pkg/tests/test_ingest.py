import datetime as dt
import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hloc import HurstTrack, PriceSeries, generate_crash_series, sliding_hurst
from hloc.errors import EmptyInputError, ParseError, ValidationError
from hloc.ingest import (
    read_crash_report,
    read_series,
    read_signals,
    read_track,
    write_crash_report,
    write_curves,
    write_series,
    write_signals,
    write_track,
)
from hloc.signals import measure_correction, signal_timeline


class TestReadSeries:
    def test_minimal_file(self):
        s = read_series(io.StringIO("date,close\n1994-03-17,20760\n"))
        assert len(s) == 1
        assert s.closes[0] == 20760.0 and s.dates == (dt.date(1994, 3, 17),)

    def test_negative_close_names_line(self):
        with pytest.raises(ValidationError, match="line 3"):
            read_series(io.StringIO("date,close\n,10\n,-5\n"))

    def test_unparsable_close(self):
        with pytest.raises(ParseError, match="line 2"):
            read_series(io.StringIO("date,close\n,abc\n"))

    def test_empty_file(self):
        with pytest.raises(EmptyInputError):
            read_series(io.StringIO(""))

    def test_header_only(self):
        with pytest.raises(EmptyInputError):
            read_series(io.StringIO("date,close\n"))

    def test_wrong_header(self):
        with pytest.raises(ParseError):
            read_series(io.StringIO("day,price\n,1\n"))

    def test_blank_lines_and_comments(self):
        s = read_series(io.StringIO("# meta\n\ndate,close\n\n,1.5\n\n,2.5\n"))
        np.testing.assert_array_equal(s.closes, [1.5, 2.5])

    def test_rows_are_not_sorted(self):
        a = read_series(io.StringIO("date,close\n2020-01-02,2\n2020-01-01,1\n"))
        b = read_series(io.StringIO("date,close\n2020-01-01,1\n2020-01-02,2\n"))
        np.testing.assert_array_equal(a.closes, [2.0, 1.0])
        assert a != b

    def test_crash_fixture_round_trip(self, tmp_path):
        s = generate_crash_series(40, [(3, 0.04), (30, 0.39)])
        path = tmp_path / "crash.csv"
        write_series(s, path, {"generator": "crash-schedule"})
        back = read_series(path)
        np.testing.assert_array_equal(back.closes, s.closes)
        assert measure_correction(back, 39).total_drop == 0.39

    @given(st.lists(st.floats(1e-6, 1e9), min_size=1, max_size=30))
    def test_round_trip_exact(self, closes):
        s = PriceSeries(closes, tuple(dt.date(2000, 1, 1) + dt.timedelta(i)
                                      for i in range(len(closes))))
        buf = io.StringIO()
        write_series(s, buf)
        buf.seek(0)
        assert read_series(buf) == s


class TestTrackFiles:
    def test_single_entry(self, tmp_path):
        track = HurstTrack.from_values([0.51], start_session=214)
        path = tmp_path / "t.csv"
        write_track(track, path)
        lines = path.read_text().splitlines()
        assert lines == ["session,h_loc,d_loc,ma5,ma21,r_squared,status",
                         "214,0.51,1.49,,,1,ok"]

    def test_gap_row(self):
        buf = io.StringIO()
        write_track(HurstTrack.from_values([0.5, np.nan, 0.6]), buf)
        row = buf.getvalue().splitlines()[2]
        assert row == "1,,,,,,gap"

    def test_gap_row_keeps_averages(self):
        buf = io.StringIO()
        write_track(HurstTrack.from_values([0.5, 0.4, 0.3, 0.2, 0.1, np.nan]), buf)
        assert buf.getvalue().splitlines()[6] == "5,,,0.3,,,gap"
        buf.seek(0)
        assert read_track(buf).ma5[5] == 0.3

    def test_d_loc_column(self, brownian_1000):
        buf = io.StringIO()
        write_track(sliding_hurst(brownian_1000[:240]), buf)
        for line in buf.getvalue().splitlines()[1:]:
            f = line.split(",")
            assert float(f[2]) == pytest.approx(2 - float(f[1]), abs=2e-9)

    @given(st.lists(st.one_of(st.floats(0.01, 1.4), st.none()), min_size=1, max_size=50))
    def test_round_trip(self, raw):
        h = np.array([np.nan if v is None else v for v in raw])
        track = HurstTrack.from_values(h, start_session=7)
        buf = io.StringIO()
        write_track(track, buf)
        buf.seek(0)
        back = read_track(buf)
        np.testing.assert_array_equal(back.sessions, track.sessions)
        for attr in ("h_loc", "ma5", "ma21", "r_squared"):
            np.testing.assert_allclose(getattr(back, attr), getattr(track, attr),
                                       rtol=1e-9, equal_nan=True)
            np.testing.assert_array_equal(np.isnan(getattr(back, attr)),
                                          np.isnan(getattr(track, attr)))

    def test_non_contiguous_sessions(self):
        text = ("session,h_loc,d_loc,ma5,ma21,r_squared,status\n"
                "3,0.5,1.5,,,1,ok\n5,0.5,1.5,,,1,ok\n")
        with pytest.raises(ValidationError):
            read_track(io.StringIO(text))

    def test_curves(self, brownian_1000):
        track = sliding_hurst(brownian_1000[:217], keep_curves=True)
        buf = io.StringIO()
        write_curves(track, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "session,tau,ln_tau,ln_f2"
        assert len(lines) == 1 + 3 * len(track.config.tau_grid)


def test_signal_round_trip():
    from conftest import sell_onset_track
    verdicts = signal_timeline(sell_onset_track())
    buf = io.StringIO()
    write_signals(verdicts, buf)
    assert buf.getvalue().startswith("session,cond1,cond2,cond3,cond4,verdict\n")
    buf.seek(0)
    assert read_signals(buf) == verdicts


def test_crash_report_exact_drops():
    s = generate_crash_series(60, [(41, 0.65)])
    e = measure_correction(s, 59)
    buf = io.StringIO()
    write_crash_report([e], buf)
    buf.seek(0)
    row = read_crash_report(buf)[0]
    assert row["total_drop"] == "0.65" and row["duration"] == "41"
