#!/usr/bin/env python3
"""Dynamic switching between wave and particle measurement, live.

The loop phase toggles between 0 (mirror: which-path measurement, flat
balanced rates) and pi/2 (balanced splitter: full-contrast fringes) every
18 s while the state phase sweeps a continuous triangle wave.  Pass --plot
to draw the recorded time series.
"""
import sys

import numpy as np

from dualitysim import DetectorConfig, SourceConfig, run_dynamic_switch

source, detector = SourceConfig(), DetectorConfig()
trace = run_dynamic_switch(
    duration_s=72.0, toggle_period_s=18.0, triangle_period_s=6.0,
    source=source, detector=detector, rng=2, coherence=1.0, bin_seconds=0.6,
)

segments = np.floor(trace.t / 18.0).astype(int)
print(f"{trace.t.size} bins of 0.6 s, {trace.pulses_per_bin} pulses each\n")
print(f"{'segment':>8} {'mode':>10} {'mean p1':>9} {'min p1':>8} {'max p1':>8}")
for seg in range(segments.max() + 1):
    m = segments == seg
    total = trace.n1[m] + trace.n2[m]
    phat = trace.n1[m][total > 0] / total[total > 0]
    mode = "particle" if trace.phi_s[m][0] == 0.0 else "wave"
    print(f"{seg:>8} {mode:>10} {phat.mean():9.3f} {phat.min():8.3f} {phat.max():8.3f}")

print("\nparticle segments sit at the balanced level; wave segments swing "
      "across the full fringe as the triangle wave sweeps the state phase")

if "--plot" in sys.argv:
    try:
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping the plot")
    else:
        fig, ax = plt.subplots(figsize=(10, 4))
        ax.plot(trace.t, trace.n1, label="D1")
        ax.plot(trace.t, trace.n2, label="D2")
        for edge in (18, 36, 54):
            ax.axvline(edge, color="k", ls=":", lw=1)
        ax.set_xlabel("time (s)")
        ax.set_ylabel("counts per bin")
        ax.legend()
        fig.tight_layout()
        plt.show()
