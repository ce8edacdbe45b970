"""Swept-oscillator emulation of the drift measurement.

Hardware measurements sweep the LO as a slow triangle (amplitude B/4,
slope = the drift rate) instead of ramping forever. Because the triangle
period dwarfs the frame length, almost every frame still sees a purely
linear drift, so the onset should sit right on the linear-drift onset.
"""

import pathlib

from css_linksim.simkit import (
    default_drift_spec,
    drift_onset,
    run_sweep,
    write_curve_csv,
)

OUT = pathlib.Path("out")
OUT.mkdir(exist_ok=True)
TRIALS = 200

for name in ("LS-5", "US-5"):
    lin_spec = default_drift_spec(name, trials=TRIALS, master_seed=15)
    tri_spec = default_drift_spec(name, trials=TRIALS, master_seed=16, triangle=True)
    lin = drift_onset(run_sweep(lin_spec, workers=4), 0.1)
    tri_curve = run_sweep(tri_spec, workers=4)
    write_curve_csv(OUT / ("fer-triangle-%s.csv" % name), tri_spec, tri_curve)
    tri = drift_onset(tri_curve, 0.1)
    print("%s: linear onset %6.2f Hz/s, triangle-emulation onset %6.2f Hz/s" % (name, lin, tri))
