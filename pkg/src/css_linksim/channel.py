"""Channel impairments: AWGN, oscillator phase noise, CFO drift.

The receive model is r[n] = x[n] * exp(j*phi0) * exp(j*theta[n]) *
exp(j*psi[n]) + eta[n]: a random carrier phase, a phase-noise process
synthesized from a piecewise PSD profile, a drifting-CFO phase ramp and
complex white Gaussian noise. All phase impairments preserve sample
magnitudes exactly; noise power is referenced to the chirp-active samples
so gapped (UCSS) and continuous frames see the same per-symbol SNR.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baseband import BasebandSignal


@dataclass(frozen=True)
class PhaseNoiseProfile:
    """One-sided phase-noise PSD in dBc/Hz at increasing frequency offsets."""

    points: tuple[tuple[float, float], ...]
    name: str = ""

    def __post_init__(self):
        if not self.points:
            raise ValueError("profile needs at least one point")
        offsets = [f for f, _ in self.points]
        if any(f <= 0 for f in offsets):
            raise ValueError("offsets must be positive")
        if any(b <= a for a, b in zip(offsets, offsets[1:])):
            raise ValueError("offsets must be strictly increasing")

    @classmethod
    def from_file(cls, path: str | Path) -> "PhaseNoiseProfile":
        """Load 'offset_hz level_dbc_per_hz' lines; '#' starts a comment."""
        pts = []
        for line in Path(path).read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            offset, level = line.split()
            pts.append((float(offset), float(level)))
        return cls(tuple(pts), name=Path(path).stem)

    def level_db(self, freqs_hz: np.ndarray) -> np.ndarray:
        """PSD level at arbitrary offsets: linear in (log10 f, dB), flat
        below the first point, continuing the last segment's slope above
        the last point."""
        f = np.asarray(freqs_hz, dtype=float)
        offsets = np.array([p[0] for p in self.points])
        levels = np.array([p[1] for p in self.points])
        logf = np.log10(np.maximum(f, offsets[0] * 1e-30))
        out = np.interp(logf, np.log10(offsets), levels)
        out = np.where(f < offsets[0], levels[0], out)
        if len(offsets) > 1:
            slope = (levels[-1] - levels[-2]) / (
                np.log10(offsets[-1]) - np.log10(offsets[-2])
            )
            above = f > offsets[-1]
            out = np.where(
                above, levels[-1] + slope * (logf - np.log10(offsets[-1])), out
            )
        return out


# The seven simulation profiles: pn1 is a realistic oscillator; pn2..pn4
# raise only the slow components, pn5..pn7 raise only the fast ones.
_PRESET_LEVELS = {
    "pn1": (-30.0, -100.0, -120.0, -130.0),
    "pn2": (-20.0, -90.0, -120.0, -130.0),
    "pn3": (-15.0, -85.0, -120.0, -130.0),
    "pn4": (-10.0, -80.0, -120.0, -130.0),
    "pn5": (-70.0, -100.0, -100.0, -110.0),
    "pn6": (-70.0, -80.0, -80.0, -80.0),
    "pn7": (-60.0, -60.0, -60.0, -60.0),
}
_PRESET_OFFSETS = (10.0, 100.0, 1000.0, 10000.0)

PRESET_PROFILES: dict[str, PhaseNoiseProfile] = {
    name: PhaseNoiseProfile(tuple(zip(_PRESET_OFFSETS, levels)), name=name)
    for name, levels in _PRESET_LEVELS.items()
}


def phase_noise_preset(name: str) -> PhaseNoiseProfile:
    try:
        return PRESET_PROFILES[name]
    except KeyError:
        raise ValueError(
            "unknown profile %r (presets: %s)" % (name, ", ".join(PRESET_PROFILES))
        ) from None


class DriftKind(enum.Enum):
    NONE = "none"
    LINEAR = "linear"
    TRIANGLE = "triangle"


@dataclass(frozen=True)
class DriftSpec:
    """CFO drift description.

    Linear: the instantaneous CFO ramps from 0 at the first sample to
    rate*payload_duration_s at the last. Triangle: the CFO follows a
    [0, max_cfo_hz] triangle wave with slope magnitude rate and a random
    epoch, emulating a swept local oscillator.
    """

    kind: DriftKind = DriftKind.NONE
    rate_hz_per_s: float = 0.0
    payload_duration_s: float = 0.0
    max_cfo_hz: float = 0.0

    def __post_init__(self):
        if self.rate_hz_per_s < 0:
            raise ValueError("rate_hz_per_s must be >= 0")
        if self.kind is DriftKind.LINEAR and self.payload_duration_s <= 0:
            raise ValueError("linear drift needs payload_duration_s > 0")
        if self.kind is DriftKind.TRIANGLE and (
            self.max_cfo_hz <= 0 or self.rate_hz_per_s <= 0
        ):
            raise ValueError("triangle drift needs max_cfo_hz > 0 and rate > 0")


@dataclass(frozen=True)
class ChannelSpec:
    """Complete impairment recipe for one trial."""

    snr_db: float = math.inf
    phase_noise: PhaseNoiseProfile | None = None
    drift: DriftSpec = field(default_factory=DriftSpec)
    random_phase: bool = True


def apply_awgn(
    signal: BasebandSignal, snr_db: float, rng: np.random.Generator
) -> BasebandSignal:
    """Add circularly-symmetric white Gaussian noise at the target SNR.

    Signal power is measured over chirp-active samples only, so UCSS gap
    zeros do not dilute the reference power.
    """
    if snr_db is None or math.isinf(snr_db):
        return BasebandSignal(signal.samples.copy(), signal.sample_rate_hz)
    x = signal.samples
    power = np.abs(x) ** 2
    active = power > 1e-12
    sig_power = power[active].mean() if active.any() else 0.0
    noise_var = sig_power / 10 ** (snr_db / 10)
    noise = rng.standard_normal(2 * x.size).view(np.complex128) * math.sqrt(
        noise_var / 2
    )
    return BasebandSignal(x + noise, signal.sample_rate_hz)


def synth_phase_noise(
    profile: PhaseNoiseProfile, n: int, fs_hz: float, rng: np.random.Generator
) -> np.ndarray:
    """Synthesize n phase samples (radians) whose one-sided PSD follows the
    profile: Hermitian frequency-domain shaping of white Gaussian values by
    sqrt(S(f)), DC removed."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if fs_hz <= 0:
        raise ValueError("fs_hz must be positive")
    n_bins = n // 2 + 1
    freqs = np.fft.rfftfreq(n, d=1.0 / fs_hz)
    psd = 10 ** (profile.level_db(freqs[1:]) / 10)
    spectrum = np.zeros(n_bins, dtype=np.complex128)
    # bins 1..n/2: complex Gaussian with E|X|^2 = S*fs*n/2 so the one-sided
    # PSD of irfft(X) equals S; DC stays zero
    amp = np.sqrt(psd * fs_hz * n / 2)
    noise = rng.standard_normal(2 * (n_bins - 1)).view(np.complex128) / math.sqrt(2)
    spectrum[1:] = amp * noise
    if n % 2 == 0:
        # Nyquist bin must be real; doubling the real part restores the
        # variance S*fs*n that a real bin needs for the same density
        spectrum[-1] = 2 * spectrum[-1].real
    return np.fft.irfft(spectrum, n)


def apply_phase_noise(
    signal: BasebandSignal, profile: PhaseNoiseProfile, rng: np.random.Generator
) -> BasebandSignal:
    """Rotate samples by a synthesized phase-noise process."""
    theta = synth_phase_noise(profile, signal.samples.size, signal.sample_rate_hz, rng)
    return BasebandSignal(signal.samples * np.exp(1j * theta), signal.sample_rate_hz)


def estimate_phase_noise_psd(
    theta: np.ndarray, fs_hz: float, nperseg: int = 2 ** 15
) -> tuple[np.ndarray, np.ndarray]:
    """Welch estimate of a one-sided phase PSD (linear units, rad^2/Hz).

    Uses a Blackman-Harris window (the steep profile slopes exceed what a
    Hann window's leakage floor can resolve) and doubles the half-width
    Nyquist bin so the density stays unbiased up to fs/2.
    """
    from scipy.signal import welch

    freqs, psd = welch(
        theta, fs=fs_hz, window="blackmanharris", nperseg=nperseg, detrend=False
    )
    psd = psd.copy()
    if theta.size >= nperseg and nperseg % 2 == 0:
        psd[-1] *= 2
    return freqs, psd


def linear_drift_cfo(n: int, rate_hz_per_s: float, payload_duration_s: float) -> np.ndarray:
    """Instantaneous CFO trajectory of the linear model: 0 at the first
    sample, rate*payload_duration at the last, linear in between."""
    if n < 1:
        raise ValueError("n must be >= 1")
    end_cfo = rate_hz_per_s * payload_duration_s
    if n == 1:
        return np.zeros(1)
    return end_cfo * np.arange(n) / (n - 1)


def triangle_cfo(
    n: int, fs_hz: float, rate_hz_per_s: float, max_cfo_hz: float, epoch_s: float
) -> np.ndarray:
    """Triangle-wave CFO 2*Fmax*|t/T - floor(t/T + 1/2)| sampled from the
    given epoch; period T = 2*Fmax/rate so the slope magnitude is rate."""
    period = 2 * max_cfo_hz / rate_hz_per_s
    t = epoch_s + np.arange(n) / fs_hz
    x = t / period
    return 2 * max_cfo_hz * np.abs(x - np.floor(x + 0.5))


def apply_cfo_trajectory(
    signal: BasebandSignal, cfo_hz: np.ndarray, phi0: float = 0.0
) -> BasebandSignal:
    """Rotate by the cumulative integral of an instantaneous-CFO series."""
    dt = 1.0 / signal.sample_rate_hz
    phase = phi0 + 2 * np.pi * dt * (np.cumsum(cfo_hz) - cfo_hz)
    return BasebandSignal(signal.samples * np.exp(1j * phase), signal.sample_rate_hz)


def apply_linear_drift(
    signal: BasebandSignal,
    rate_hz_per_s: float,
    payload_duration_s: float,
    random_phase: bool = False,
    rng: np.random.Generator | None = None,
) -> BasebandSignal:
    """Apply the linear-drift model; the instantaneous CFO grows from 0 and
    reaches rate*payload_duration_s at the signal end regardless of N."""
    phi0 = float(rng.uniform(0, 2 * np.pi)) if (random_phase and rng is not None) else 0.0
    cfo = linear_drift_cfo(signal.samples.size, rate_hz_per_s, payload_duration_s)
    return apply_cfo_trajectory(signal, cfo, phi0)


def apply_triangle_drift(
    signal: BasebandSignal,
    rate_hz_per_s: float,
    max_cfo_hz: float,
    rng: np.random.Generator,
) -> BasebandSignal:
    """Apply the swept-oscillator triangle drift with a random epoch."""
    period = 2 * max_cfo_hz / rate_hz_per_s
    epoch = float(rng.uniform(0, period))
    cfo = triangle_cfo(
        signal.samples.size, signal.sample_rate_hz, rate_hz_per_s, max_cfo_hz, epoch
    )
    return apply_cfo_trajectory(signal, cfo)


def apply_channel(
    signal: BasebandSignal, spec: ChannelSpec, rng: np.random.Generator
) -> BasebandSignal:
    """Apply the full impairment stack in model order.

    Drift trajectories are referenced to the first emitted sample: the
    epoch offset of the triangle sweep is removed there, standing in for
    the acquisition-time CFO correction of a hardware receiver.
    """
    out = signal
    if spec.random_phase:
        phi0 = float(rng.uniform(0, 2 * np.pi))
        out = BasebandSignal(out.samples * np.exp(1j * phi0), out.sample_rate_hz)
    if spec.phase_noise is not None:
        out = apply_phase_noise(out, spec.phase_noise, rng)
    if spec.drift.kind is DriftKind.LINEAR and spec.drift.rate_hz_per_s > 0:
        out = apply_linear_drift(
            out, spec.drift.rate_hz_per_s, spec.drift.payload_duration_s
        )
    elif spec.drift.kind is DriftKind.TRIANGLE:
        period = 2 * spec.drift.max_cfo_hz / spec.drift.rate_hz_per_s
        epoch = float(rng.uniform(0, period))
        cfo = triangle_cfo(
            out.samples.size,
            out.sample_rate_hz,
            spec.drift.rate_hz_per_s,
            spec.drift.max_cfo_hz,
            epoch,
        )
        out = apply_cfo_trajectory(out, cfo - cfo[0])
    return apply_awgn(out, spec.snr_db, rng)
