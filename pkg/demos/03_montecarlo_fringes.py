#!/usr/bin/env python3
"""Photon-counting fringe scans at realistic telecom-fiber statistics.

Simulates the full sweep at desk scale (0.2 photons per gate, 10% detection
efficiency, 12 dB system loss, 120k pulses per point) and extracts visibility
and distinguishability per loop setting.  Pass --plot to draw the fringe
families if matplotlib is available.
"""
import math
import sys

import numpy as np

from dualitysim import (
    DetectorConfig,
    RunPlan,
    SourceConfig,
    estimate_distinguishability,
    estimate_visibility,
    run_sweep,
)

phi_s_values = tuple(np.linspace(0.0, math.pi / 2, 5))
plan = RunPlan(phi_s_values=phi_s_values, pulses_per_point=120_000, coherence=0.967, seed=2)
source, detector = SourceConfig(), DetectorConfig()

print(f"mean photons per gate {source.mu}, efficiency {detector.efficiency}, "
      f"loss {detector.system_loss_db} dB, {plan.pulses_per_point} pulses per point")
scans = {(s.phi_s, s.block): s for s in run_sweep(plan, source, detector)}

print(f"\n{'phi_s':>8} {'V':>8} {'+-':>7} {'D':>8} {'+-':>7}   counts at fringe peak")
for phi_s in phi_s_values:
    open_scan = scans[(phi_s, "none")]
    v = estimate_visibility(open_scan)
    d = estimate_distinguishability(scans[(phi_s, "path0")], scans[(phi_s, "path1")])
    peak = int(open_scan.n1.max())
    print(f"{phi_s:8.4f} {v.value:8.4f} {v.sigma:7.4f} {d.value:8.4f} {d.sigma:7.4f}   {peak}")

print("\nthe mirror setting shows no fringe; the balanced setting reaches the "
      "device contrast ~0.967; distinguishability runs the other way")

if "--plot" in sys.argv:
    try:
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping the plot")
    else:
        fig, axes = plt.subplots(len(phi_s_values), 3, figsize=(11, 2.2 * len(phi_s_values)),
                                 sharex=True, sharey="row")
        for row, phi_s in enumerate(phi_s_values):
            for col, block in enumerate(("none", "path0", "path1")):
                s = scans[(phi_s, block)]
                axes[row][col].plot(s.phi_x, s.n1, "o-", ms=3, label="D1")
                axes[row][col].plot(s.phi_x, s.n2, "s--", ms=3, label="D2")
                if row == 0:
                    axes[row][col].set_title({"none": "both open", "path0": "path 0 blocked",
                                              "path1": "path 1 blocked"}[block])
            axes[row][0].set_ylabel(f"phi_s={phi_s:.2f}")
        axes[0][0].legend()
        for ax in axes[-1]:
            ax.set_xlabel("phi_x (rad)")
        fig.tight_layout()
        plt.show()
