"""
Writing, damaging and re-reading trace files
============================================

Trace files are plain CSV with one row per hour.  Gaps are filled by
linear interpolation, so a file with missing cells still loads.
"""

import io

import numpy as np

from dronegrid import SimulationConfig, synth_traces
from dronegrid.traces import parse_traces, write_traces

config = SimulationConfig(n=2, horizon_hours=48, rng_seed=3)
text = write_traces(synth_traces(config))
print(text.splitlines()[0])

# exact round trip
again = parse_traces(text, n=2, horizon_hours=48)
assert write_traces(again) == text

###############################################################################
# Blank out a few load cells and read it back.

rows = text.splitlines()
for r in (10, 11, 30):  # file rows, so hours 9, 10 and 29
    cells = rows[r].split(",")
    cells[3] = ""
    rows[r] = ",".join(cells)
patched = parse_traces(io.StringIO("\n".join(rows) + "\n").getvalue(), n=2, horizon_hours=48)
gap = np.abs(patched.load[0] - again.load[0])
print("hours changed:", np.flatnonzero(gap).tolist(), "largest change (Wh):", round(float(gap.max()), 3))

###############################################################################
# A shorter file is repeated to fill the horizon.

looped = parse_traces(text, n=2, horizon_hours=100)
print("hour 48 equals hour 0:", bool((looped.solar[:, 48] == looped.solar[:, 0]).all()))
