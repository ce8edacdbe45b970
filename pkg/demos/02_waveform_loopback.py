"""Build one frame of each waveform, look at its structure, loop it back.

Both transmitters emit unit-amplitude chirps; the pause-coded frame is
mostly silence between short chirps, the MFSK frame is one continuous
chirp train.
"""

import numpy as np

from css_linksim import get_setting
from css_linksim.lora_phy import lora_decode, lora_demodulate, lora_encode, lora_modulate
from css_linksim.ucss_phy import (
    ucss_build_frame,
    ucss_demodulate,
    ucss_modulate,
    ucss_slot_schedule,
)

rng = np.random.default_rng(1)

lora = get_setting("LS-4")
payload = rng.integers(0, 256, lora.config.payload_bytes, dtype=np.uint8).tobytes()
stream = lora_encode(payload, lora.config)
signal = lora_modulate(stream, lora.config, include_preamble=True)
print("LS-4 frame: %d chirp-shift symbols, first block on the reduced grid:" % stream.symbols.size)
print("  symbols:", stream.symbols[:12], "...")
print("  %.0f samples = %.3f s on air" % (signal.samples.size, signal.duration_s))
decoded, ok = lora_decode(
    lora_demodulate(lora_modulate(stream, lora.config), lora.config),
    lora.config,
    expected=payload,
)
print("  loopback ok:", ok)

ucss = get_setting("US-4")
payload = rng.integers(0, 256, ucss.config.payload_bytes, dtype=np.uint8).tobytes()
schedule = ucss_slot_schedule(ucss.config, code_seed=1)
frame = ucss_build_frame(payload, ucss.config)
signal = ucss_modulate(frame, schedule, ucss.config)
active = np.count_nonzero(np.abs(signal.samples) > 0)
print("US-4 frame: %d data chirps + %d preamble chirps" % (frame.bits.size, 6))
print(
    "  %d samples = %.3f s on air, %.0f%% of them silent pause"
    % (signal.samples.size, signal.duration_s, 100 * (1 - active / signal.samples.size))
)
decoded, ok = ucss_demodulate(signal, schedule, ucss.config)
print("  loopback ok:", ok and decoded == payload)
