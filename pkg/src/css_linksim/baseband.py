"""Complex baseband container and the debug I/Q dump format."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass
class BasebandSignal:
    """Complex baseband samples at a fixed sample rate.

    Unit-average-power convention for the chirp-active part; silent gaps
    (UCSS pauses) are exact zeros.
    """

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ValueError("samples must be a non-empty 1-d array")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if not np.all(np.isfinite(self.samples.view(np.float64))):
            raise ValueError("samples must be finite")

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


def write_iq(signal: BasebandSignal, path: str | Path) -> None:
    """Dump samples as interleaved little-endian float32 I/Q."""
    interleaved = np.empty(2 * signal.samples.size, dtype="<f4")
    interleaved[0::2] = signal.samples.real
    interleaved[1::2] = signal.samples.imag
    interleaved.tofile(str(path))


def read_iq(path: str | Path, sample_rate_hz: float) -> BasebandSignal:
    """Load an interleaved float32 I/Q dump written by write_iq."""
    raw = np.fromfile(str(path), dtype="<f4")
    if raw.size % 2:
        raise ValueError("I/Q dump has an odd number of floats")
    return BasebandSignal(raw[0::2] + 1j * raw[1::2], sample_rate_hz)
