"""Pause-coded DBPSK chirp (UCSS) transceiver chain.

A frame is 6 contiguous preamble chirps followed by N data chirps
separated by code-defined pause slots (total pause ceil(N/2)^2 samples).
Each chirp is a full-band linear upchirp whose sign carries one
differentially-encoded coded bit. The frame body is the payload plus a
3-bit CRC, convolutionally encoded at rate 1/2 (K=7, generators 133/171
octal) with the 12 tail output bits punctured so the frame is exactly
(8*PL+3)/CR chirps.

The receiver correlates each slot against the conjugate base chirp at the
known offset, estimates the CFO from the preamble phase slope, then runs a
first-order decision-directed frequency tracker across the data chirps
before differential detection. The tracker only derotates phases; a CFO
large enough to shift the chirp peak by about half a sample still starves
the correlator, which is what ultimately bounds the tolerable offset at
roughly 0.5*B/chirp_length.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .baseband import BasebandSignal
from .params import UcssConfig, ucss_symbol_count

CRC3_POLY = 0b1011  # x^3 + x + 1
_G0, _G1 = 0o133, 0o171
_K = 7
_N_STATES = 1 << (_K - 1)
_TRACKER_GAIN = 0.15


@dataclass
class UcssFrameBits:
    """Coded frame bits, one per data chirp."""

    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.uint8)
        if self.bits.ndim != 1 or not np.all((self.bits == 0) | (self.bits == 1)):
            raise ValueError("bits must be a 1-d 0/1 array")


@dataclass
class SlotSchedule:
    """Start offsets (samples) of every transmitted chirp, preamble first."""

    chirp_start_samples: np.ndarray
    chirp_length: int
    preamble_symbols: int

    def __post_init__(self):
        starts = np.asarray(self.chirp_start_samples, dtype=np.int64)
        if np.any(np.diff(starts) < self.chirp_length):
            raise ValueError("chirps overlap")
        self.chirp_start_samples = starts

    @property
    def total_samples(self) -> int:
        return int(self.chirp_start_samples[-1]) + self.chirp_length


def crc3(bits: np.ndarray, poly: int = CRC3_POLY) -> int:
    """3-bit CRC (MSB-first long division, zero initial value)."""
    reg = 0
    for b in np.asarray(bits, dtype=np.uint8):
        reg = (reg << 1) | int(b)
        if reg & 0b1000:
            reg ^= poly
    # flush the 3 zero bits
    for _ in range(3):
        reg <<= 1
        if reg & 0b1000:
            reg ^= poly
    return reg & 0b111


def _bytes_to_bits(payload: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(payload, dtype=np.uint8))


def _bits_to_bytes(bits: np.ndarray) -> bytes:
    return np.packbits(bits.astype(np.uint8)).tobytes()


@lru_cache(maxsize=1)
def _trellis() -> tuple[np.ndarray, ...]:
    """Per-next-state predecessor indices and output-bit signs."""
    ns = np.arange(_N_STATES)
    b = ns >> (_K - 2)  # input bit that leads into ns
    p0 = (ns << 1) & (_N_STATES - 1)
    p1 = p0 | 1
    def outputs(state, bit):
        full = (bit << (_K - 1)) | state
        o0 = np.bitwise_count(full & _G0) & 1
        o1 = np.bitwise_count(full & _G1) & 1
        return 1 - 2 * o0.astype(np.int8), 1 - 2 * o1.astype(np.int8)
    s00, s01 = outputs(p0, b)
    s10, s11 = outputs(p1, b)
    return p0, p1, b.astype(np.uint8), s00, s01, s10, s11


def conv_encode(bits: np.ndarray) -> np.ndarray:
    """Rate-1/2 K=7 encoder, terminated with six zero bits."""
    padded = np.concatenate([np.asarray(bits, np.uint8), np.zeros(_K - 1, np.uint8)])
    state = 0
    out = np.empty(2 * padded.size, dtype=np.uint8)
    for i, bit in enumerate(padded):
        full = (int(bit) << (_K - 1)) | state
        out[2 * i] = bin(full & _G0).count("1") & 1
        out[2 * i + 1] = bin(full & _G1).count("1") & 1
        state = full >> 1
    return out


def viterbi_decode(soft: np.ndarray, n_info: int) -> np.ndarray:
    """Soft-decision Viterbi for the terminated, tail-punctured code.

    `soft` holds one metric per transmitted coded bit (positive favours 0),
    covering the n_info information steps; the six tail steps carry no
    channel metrics and are traced with forced-zero inputs.
    """
    soft = np.asarray(soft, dtype=np.float64)
    if soft.size != 2 * n_info:
        raise ValueError("need %d soft values, got %d" % (2 * n_info, soft.size))
    p0, p1, b_in, s00, s01, s10, s11 = _trellis()
    pm = np.full(_N_STATES, -np.inf)
    pm[0] = 0.0
    n_steps = n_info + _K - 1
    back = np.zeros((n_steps, _N_STATES), dtype=np.uint8)
    for t in range(n_steps):
        if t < n_info:
            m0, m1 = soft[2 * t], soft[2 * t + 1]
        else:
            m0 = m1 = 0.0
        cand0 = pm[p0] + s00 * m0 + s01 * m1
        cand1 = pm[p1] + s10 * m0 + s11 * m1
        if t >= n_info:
            # tail: inputs forced to zero, only even-history branches valid
            valid = b_in == 0
            cand0 = np.where(valid, cand0, -np.inf)
            cand1 = np.where(valid, cand1, -np.inf)
        take1 = cand1 > cand0
        pm = np.where(take1, cand1, cand0)
        back[t] = take1
    state = 0
    bits = np.zeros(n_steps, dtype=np.uint8)
    for t in range(n_steps - 1, -1, -1):
        bits[t] = state >> (_K - 2)
        state = ((state << 1) | int(back[t, state])) & (_N_STATES - 1)
    return bits[:n_info]


def ucss_build_frame(payload: bytes, cfg: UcssConfig) -> UcssFrameBits:
    """payload -> payload bits + CRC-3 -> FEC -> frame bits (one per chirp)."""
    if len(payload) != cfg.payload_bytes:
        raise ValueError(
            "payload must be %d bytes, got %d" % (cfg.payload_bytes, len(payload))
        )
    info = _bytes_to_bits(payload)
    if cfg.crc_bits:
        if cfg.crc_bits != 3:
            raise ValueError("only the 3-bit CRC is supported")
        c = crc3(info)
        info = np.concatenate([info, [(c >> 2) & 1, (c >> 1) & 1, c & 1]])
    n_sym = ucss_symbol_count(cfg)
    if cfg.code_rate == 1:
        coded = info
    elif cfg.code_rate == Fraction(1, 2):
        coded = conv_encode(info)[:n_sym]  # tail outputs punctured to fit
    else:
        raise ValueError("unsupported code rate %s" % (cfg.code_rate,))
    assert coded.size == n_sym
    return UcssFrameBits(coded)


def ucss_decode_frame(soft: np.ndarray, cfg: UcssConfig) -> tuple[bytes, bool]:
    """Soft frame metrics -> (payload, crc_ok)."""
    n_info = cfg.payload_bytes * 8 + cfg.crc_bits
    if cfg.code_rate == 1:
        info = (np.asarray(soft) < 0).astype(np.uint8)
    else:
        info = viterbi_decode(soft, n_info)
    payload_bits = info[: cfg.payload_bytes * 8]
    ok = True
    if cfg.crc_bits:
        got = (int(info[-3]) << 2) | (int(info[-2]) << 1) | int(info[-1])
        ok = got == crc3(payload_bits)
    return _bits_to_bytes(payload_bits), ok


def ucss_slot_schedule(cfg: UcssConfig, code_seed: int) -> SlotSchedule:
    """Deterministic chirp placement for one user code.

    The preamble chirps are back to back; the pause budget ceil(N/2)^2
    samples is split across the N gaps that precede the data chirps by a
    seeded pseudo-random integer composition. Single-user error rates do
    not depend on the placement, only on the exact total.
    """
    n_sym = ucss_symbol_count(cfg)
    sf = cfg.chirp_length
    budget = int(np.ceil(n_sym / 2)) ** 2
    rng = np.random.default_rng(code_seed)
    gaps = rng.multinomial(budget, np.full(n_sym, 1.0 / n_sym))
    starts = np.empty(cfg.preamble_symbols + n_sym, dtype=np.int64)
    starts[: cfg.preamble_symbols] = np.arange(cfg.preamble_symbols) * sf
    cursor = cfg.preamble_symbols * sf
    for i, gap in enumerate(gaps):
        cursor += int(gap)
        starts[cfg.preamble_symbols + i] = cursor
        cursor += sf
    return SlotSchedule(starts, sf, cfg.preamble_symbols)


@lru_cache(maxsize=None)
def _base_chirp(length: int) -> np.ndarray:
    n = np.arange(length)
    # full-band linear upchirp, -B/2 .. B/2
    return np.exp(2j * np.pi * (n * n / (2 * length) - n / 2))


def _chirp_phases(bits: np.ndarray, preamble_symbols: int) -> np.ndarray:
    """Differentially encode: d_k = d_{k-1} * (1-2b_k), preamble all +1."""
    signs = np.concatenate(
        [np.ones(preamble_symbols), np.cumprod(1.0 - 2.0 * bits.astype(np.float64))]
    )
    return signs


def ucss_modulate(
    bits: UcssFrameBits, schedule: SlotSchedule, cfg: UcssConfig
) -> BasebandSignal:
    """Place sign-modulated chirps at the scheduled offsets, zeros between."""
    n_sym = ucss_symbol_count(cfg)
    if bits.bits.size != n_sym:
        raise ValueError("frame must hold %d bits, got %d" % (n_sym, bits.bits.size))
    if schedule.chirp_start_samples.size != cfg.preamble_symbols + n_sym:
        raise ValueError("schedule does not match the configuration")
    chirp = _base_chirp(cfg.chirp_length)
    signs = _chirp_phases(bits.bits, cfg.preamble_symbols)
    samples = np.zeros(schedule.total_samples, dtype=np.complex128)
    idx = schedule.chirp_start_samples[:, None] + np.arange(cfg.chirp_length)[None, :]
    samples[idx.ravel()] = (signs[:, None] * chirp[None, :]).ravel()
    return BasebandSignal(samples, cfg.bandwidth_hz)


def correlate_slots(
    signal: BasebandSignal, schedule: SlotSchedule, cfg: UcssConfig
) -> np.ndarray:
    """Complex correlation peak per slot at the known chirp offsets."""
    if signal.samples.size < schedule.total_samples:
        raise ValueError(
            "signal has %d samples, schedule needs %d"
            % (signal.samples.size, schedule.total_samples)
        )
    idx = schedule.chirp_start_samples[:, None] + np.arange(cfg.chirp_length)[None, :]
    return signal.samples[idx] @ np.conj(_base_chirp(cfg.chirp_length))


def correlation_peak_shift(
    signal: BasebandSignal,
    schedule: SlotSchedule,
    cfg: UcssConfig,
    slot: int,
    search: int,
) -> float:
    """Offset (samples) of the strongest correlation around one slot, with
    quadratic sub-sample interpolation; a CFO of f moves the peak by about
    -f*chirp_length/bandwidth."""
    start = int(schedule.chirp_start_samples[slot])
    chirp = np.conj(_base_chirp(cfg.chirp_length))
    offsets = np.arange(-search, search + 1)
    corr = np.array(
        [
            signal.samples[start + m : start + m + cfg.chirp_length] @ chirp
            for m in offsets
        ]
    )
    mags = np.abs(corr)
    i = int(np.argmax(mags))
    if 0 < i < corr.size - 1:
        # |corr| traces |sinc(m - m*)|, for which the fractional offset
        # toward the larger neighbour is exactly |c1|/(|c0| + |c1|)
        side = 1 if mags[i + 1] >= mags[i - 1] else -1
        b = mags[i + side]
        if mags[i] + b > 0:
            return float(offsets[i]) + side * float(b / (mags[i] + b))
    return float(offsets[i])


def _preamble_cfo(peaks: np.ndarray, n_pre: int, t_sym: float) -> float:
    """Two-lag phase-slope CFO estimate from the contiguous preamble.

    The lag-1 slope is unambiguous up to B/(2*chirp_length); the lag-2
    term (unwrapped against it) roughly halves the estimator noise.
    """
    r1 = np.sum(peaks[1:n_pre] * np.conj(peaks[: n_pre - 1]))
    phi1 = float(np.angle(r1))
    r2 = np.sum(peaks[2:n_pre] * np.conj(peaks[: n_pre - 2]))
    phi2 = float(np.angle(r2))
    phi2 += 2 * np.pi * np.round((2 * phi1 - phi2) / (2 * np.pi))
    # inverse-variance weights for the two lag estimates
    slope = (phi1 + 1.6 * phi2 / 2) / 2.6
    return slope / (2 * np.pi * t_sym)


def ucss_soft_demodulate(
    signal: BasebandSignal, schedule: SlotSchedule, cfg: UcssConfig
) -> np.ndarray:
    """Correlate each slot, remove the preamble-estimated CFO, track the
    residual carrier decision-directed, and return one differential soft
    metric Re(p_k * conj(p_{k-1})) per data chirp.

    The tracker only derotates peak phases, so it cannot undo the
    correlation loss of a time-shifted chirp; tolerable CFO stays bounded
    by the half-sample shift at 0.5*B/chirp_length.
    """
    peaks = correlate_slots(signal, schedule, cfg)
    n_pre = cfg.preamble_symbols
    fs = cfg.bandwidth_hz
    t = schedule.chirp_start_samples / fs
    f_hat = _preamble_cfo(peaks, n_pre, cfg.chirp_length / fs)
    z = peaks * np.exp(-2j * np.pi * f_hat * t)

    soft = np.empty(z.size - n_pre)
    f_res = 0.0
    for k in range(n_pre, z.size):
        dt = t[k] - t[k - 1]
        w = z[k] * np.conj(z[k - 1]) * np.exp(-2j * np.pi * f_res * dt)
        soft[k - n_pre] = w.real
        # decision-directed first-order frequency tracking
        err = float(np.angle(w if w.real >= 0 else -w))
        f_res += _TRACKER_GAIN * err / (2 * np.pi * dt)
    return soft


def ucss_demodulate(
    signal: BasebandSignal, schedule: SlotSchedule, cfg: UcssConfig
) -> tuple[bytes, bool]:
    """Full receive chain: soft metrics -> Viterbi -> CRC-3 check."""
    soft = ucss_soft_demodulate(signal, schedule, cfg)
    return ucss_decode_frame(soft, cfg)
