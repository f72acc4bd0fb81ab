# Sell/buy/neutral signals on a hand-built track, then crash measurement
# and the slope-vs-correction regression on synthetic crashes.
#
#     python3 demos/03_signals_and_crashes.py [output_dir]

import sys
from pathlib import Path

import numpy as np

from hloc import (HurstTrack, PriceSeries, Verdict, fit_hloc_trend, generate_crash_series,
                  measure_correction, signal_timeline, slope_correction_regression)
from hloc.ingest import write_crash_report, write_signals

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

# Flat persistent regime, a slide into antipersistence, then two dips
h = np.concatenate([np.full(50, 0.6), np.linspace(0.55, 0.30, 30),
                    [0.33, 0.30, 0.32, 0.31, 0.33]])
track = HurstTrack.from_values(h)
verdicts = signal_timeline(track)
write_signals(verdicts, out / "signals.csv")
counts = {v: sum(x.verdict is v for x in verdicts) for v in Verdict}
print("verdicts:", {k.value: n for k, n in counts.items()})
for v in verdicts:
    if v.verdict is Verdict.SELL:
        print("first sell at session", v.session, "conditions", v.conditions)
        break

# Three crashes: (initial 3-session drop, total drop, duration)
schedule = [(0.11, 0.65, 41), (0.04, 0.39, 30), (0.05, 0.21, 24)]
closes, ruptures = [], []
for initial, total, days in schedule:
    seg = generate_crash_series(60, [(3, initial), (days, total)], tail_len=30)
    ruptures.append(len(closes) + 59)
    closes.extend(seg.closes)
series = PriceSeries(closes)
events = [measure_correction(series, r) for r in ruptures]
for e in events:
    print("rupture %d: first 3 sessions %.0f%%, total %.0f%% over %d sessions"
          % (e.rupture_session, 100 * e.initial_3session_drop, 100 * e.total_drop, e.duration))

# An h_loc track falling faster before the larger crashes
hl = np.full(len(series), 0.55)
fits = []
for r, slope in zip(ruptures, (-0.0060, -0.0036, -0.0019)):
    hl[r - 40:r + 1] = 0.62 + slope * np.arange(41) + 0.01 * np.sin(np.arange(41))
    fits.append(fit_hloc_trend(HurstTrack.from_values(hl), (r - 40, r)))
model = slope_correction_regression((f.slope, e.total_drop) for f, e in zip(fits, events))
print("total_drop = %.2f * |slope| + %.3f  (r^2 %.3f, n=%d, low confidence: %s)"
      % (model.a, model.b, model.r_squared, model.n_events, model.low_confidence))
write_crash_report(events, out / "crashes.csv", fits, model)
print("wrote", out / "signals.csv", "and", out / "crashes.csv")
