"""Sensitivity curves: FER vs SNR with and without oscillator phase noise.

Desk-scale version of the sensitivity experiment (smaller trial counts
than the acceptance suite). Writes one CSV per curve into ./out; point
the figures package at them for the sensitivity-figure analogue.
"""

import pathlib

from css_linksim import channel as ch
from css_linksim.simkit import (
    default_snr_spec,
    run_sweep,
    snr_crossing,
    write_curve_csv,
)

OUT = pathlib.Path("out")
OUT.mkdir(exist_ok=True)
TRIALS = 300

for name in ("LS-4", "US-4"):
    for profile in (None, "pn1", "pn4", "pn7"):
        spec = default_snr_spec(
            name,
            trials=TRIALS,
            master_seed=8,
            phase_noise=ch.phase_noise_preset(profile) if profile else None,
        )
        curve = run_sweep(spec, workers=4)
        label = profile or "none"
        path = OUT / ("fer-snr-%s-%s.csv" % (name, label))
        write_curve_csv(path, spec, curve)
        crossing = snr_crossing(curve)
        print(
            "%s %-5s 0.5-FER crossing at %6.2f dB  -> %s"
            % (name, label, crossing, path)
        )
