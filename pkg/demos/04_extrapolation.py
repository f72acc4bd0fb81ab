# When does a falling h_loc trend reach the antipersistent zone?
#
#     python3 demos/04_extrapolation.py

import numpy as np

from hloc import HurstTrack, extrapolate_trend, fit_hloc_trend
from hloc.errors import NoCrossingError

rng = np.random.default_rng(3)
h = 0.58 - 0.004 * np.arange(40) + rng.normal(0, 0.01, 40)
track = HurstTrack.from_values(h, start_session=1000)

fit = fit_hloc_trend(track, (1010, 1030))
print("slope %.5f per session, r^2 %.3f" % (fit.slope, fit.r_squared))
for target in (0.45, 0.40, 0.35):
    s = extrapolate_trend(fit, target)
    print("reaches %.2f at session %.1f (%.1f sessions after the fit window)"
          % (target, s, s - fit.fit_window[1]))

# A rising trend never gets there
rising = HurstTrack.from_values(0.40 + 0.003 * np.arange(30))
try:
    extrapolate_trend(fit_hloc_trend(rising, (0, 29)), 0.35)
except NoCrossingError as exc:
    print("no crossing:", exc)
