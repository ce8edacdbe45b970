"""Transceiver-chain tests for the pause-coded DBPSK chirp waveform."""

import numpy as np
import pytest

from css_linksim.baseband import BasebandSignal
from css_linksim.params import SettingId, UcssConfig, settings_registry, ucss_timing
from css_linksim.ucss_phy import (
    UcssFrameBits,
    conv_encode,
    correlation_peak_shift,
    crc3,
    ucss_build_frame,
    ucss_decode_frame,
    ucss_demodulate,
    ucss_modulate,
    ucss_slot_schedule,
    ucss_soft_demodulate,
    viterbi_decode,
)


def ucss_settings():
    return [
        (str(sid), entry.config)
        for sid, entry in settings_registry().items()
        if sid.family == "UCSS"
    ]


def us(idx):
    return settings_registry()[SettingId("UCSS", idx)].config


def apply_cfo(signal, f_hz):
    t = np.arange(signal.samples.size) / signal.sample_rate_hz
    return BasebandSignal(
        signal.samples * np.exp(2j * np.pi * f_hz * t), signal.sample_rate_hz
    )


def test_frame_bit_counts():
    assert ucss_build_frame(bytes(8), us(2)).bits.size == 134
    assert ucss_build_frame(bytes(4), us(6)).bits.size == 70
    uncoded = UcssConfig(20e3, 67, 1, 1, crc_bits=0)
    assert ucss_build_frame(bytes(1), uncoded).bits.size == 8


def test_build_frame_rejects_wrong_payload():
    with pytest.raises(ValueError):
        ucss_build_frame(bytes(5), us(2))


def test_bit_level_fec_loopback():
    rng = np.random.default_rng(0)
    cfg = us(4)
    for _ in range(200):
        payload = rng.integers(0, 256, 8, dtype=np.uint8).tobytes()
        frame = ucss_build_frame(payload, cfg)
        soft = 1.0 - 2.0 * frame.bits.astype(float)
        decoded, ok = ucss_decode_frame(soft, cfg)
        assert ok and decoded == payload


def test_viterbi_corrects_isolated_hard_errors():
    # five flips, each isolated by more than a constraint span and away
    # from the tail-punctured region: no minimum-weight detour (free
    # distance 10) can enclose enough of them to win
    rng = np.random.default_rng(1)
    for _ in range(50):
        info = rng.integers(0, 2, 67).astype(np.uint8)
        coded = conv_encode(info)[:134]
        soft = 1.0 - 2.0 * coded.astype(float)
        for pos in (5, 30, 55, 80, 105):
            soft[pos + int(rng.integers(0, 10))] *= -1
        assert np.array_equal(viterbi_decode(soft, 67), info)


def test_crc3_error_detection_structure():
    """All single-bit errors are caught; double-bit errors are caught
    except when the two flips sit a multiple of 7 positions apart (the
    generator is primitive of period 7, an inherent degree-3 limit)."""
    rng = np.random.default_rng(2)
    payload_bits = rng.integers(0, 2, 32).astype(np.uint8)
    c = crc3(payload_bits)
    word = np.concatenate([payload_bits, [(c >> 2) & 1, (c >> 1) & 1, c & 1]])

    def passes(w):
        got = (int(w[-3]) << 2) | (int(w[-2]) << 1) | int(w[-1])
        return got == crc3(w[:-3])

    assert passes(word)
    n = word.size  # 35 bits, the shortest registry frame body
    for i in range(n):
        w = word.copy()
        w[i] ^= 1
        assert not passes(w), i
    undetected = []
    for i in range(n):
        for j in range(i + 1, n):
            w = word.copy()
            w[i] ^= 1
            w[j] ^= 1
            if passes(w):
                undetected.append((i, j))
    assert undetected, "degree-3 codes cannot catch all double errors"
    assert all((j - i) % 7 == 0 for i, j in undetected)


def test_schedule_total_pause_and_determinism():
    sched2 = ucss_slot_schedule(us(2), code_seed=9)
    total = sched2.total_samples
    occupied = (6 + 134) * 67
    assert total - occupied == 67 ** 2 == 4489  # 224.45 ms at 20 kHz
    assert np.array_equal(
        sched2.chirp_start_samples,
        ucss_slot_schedule(us(2), code_seed=9).chirp_start_samples,
    )
    sched1 = ucss_slot_schedule(us(1), code_seed=9)
    assert sched1.total_samples - occupied == 4489  # 72.4 ms at 62 kHz


def test_schedule_preamble_contiguous_and_sorted():
    sched = ucss_slot_schedule(us(4), code_seed=3)
    starts = sched.chirp_start_samples
    assert np.array_equal(starts[:6], np.arange(6) * 211)
    assert np.all(np.diff(starts) >= 211)


def test_us6_pause_budget():
    sched = ucss_slot_schedule(us(6), code_seed=1)
    assert sched.total_samples - (6 + 70) * 373 == 35 ** 2 == 1225


def test_modulate_frame_sample_count_matches_packet_duration():
    cfg = us(4)
    sched = ucss_slot_schedule(cfg, code_seed=0)
    sig = ucss_modulate(ucss_build_frame(bytes(8), cfg), sched, cfg)
    assert sig.samples.size == 34029
    timing = ucss_timing(cfg)
    assert sig.samples.size == round(timing.packet_duration_s * cfg.bandwidth_hz)
    assert sig.duration_s == pytest.approx(1.701, abs=5e-4)


def test_all_zero_bits_give_identical_chirp_phases():
    cfg = us(6)
    sched = ucss_slot_schedule(cfg, code_seed=0)
    bits = UcssFrameBits(np.zeros(70, dtype=np.uint8))
    sig = ucss_modulate(bits, sched, cfg)
    starts = sched.chirp_start_samples
    first = sig.samples[starts[0] : starts[0] + cfg.chirp_length]
    for s in starts[1:]:
        assert np.allclose(sig.samples[s : s + cfg.chirp_length], first)


@pytest.mark.parametrize("name,cfg", ucss_settings())
def test_noiseless_loopback(name, cfg):
    rng = np.random.default_rng(abs(hash(name)) % 2 ** 32)
    sched = ucss_slot_schedule(cfg, code_seed=7)
    for _ in range(30):
        payload = rng.integers(0, 256, cfg.payload_bytes, dtype=np.uint8).tobytes()
        sig = ucss_modulate(ucss_build_frame(payload, cfg), sched, cfg)
        decoded, ok = ucss_demodulate(sig, sched, cfg)
        assert ok and decoded == payload


def test_detection_invariant_under_global_phase():
    cfg = us(2)
    sched = ucss_slot_schedule(cfg, code_seed=4)
    payload = bytes(range(8))
    sig = ucss_modulate(ucss_build_frame(payload, cfg), sched, cfg)
    for phi in (0.5, 2.0, 4.4):
        rotated = BasebandSignal(sig.samples * np.exp(1j * phi), sig.sample_rate_hz)
        decoded, ok = ucss_demodulate(rotated, sched, cfg)
        assert ok and decoded == payload


def test_constant_cfo_below_half_shift_decodes():
    cfg = us(4)
    sched = ucss_slot_schedule(cfg, code_seed=5)
    payload = bytes(range(8))
    sig = ucss_modulate(ucss_build_frame(payload, cfg), sched, cfg)
    for frac in (0.1, 0.3, 0.45):
        decoded, ok = ucss_demodulate(
            apply_cfo(sig, frac * cfg.bandwidth_hz / cfg.chirp_length), sched, cfg
        )
        assert ok and decoded == payload, frac


def test_constant_cfo_full_bin_kills_known_offset_correlation():
    # at B/chirp_length the peak is displaced a full sample and the
    # known-offset correlation nulls out
    cfg = us(4)
    sched = ucss_slot_schedule(cfg, code_seed=5)
    payload = bytes(range(8))
    sig = ucss_modulate(ucss_build_frame(payload, cfg), sched, cfg)
    shifted = apply_cfo(sig, cfg.bandwidth_hz / cfg.chirp_length)
    decoded, ok = ucss_demodulate(shifted, sched, cfg)
    assert not ok or decoded != payload
    shift = correlation_peak_shift(shifted, sched, cfg, slot=10, search=4)
    assert abs(shift) >= 0.9


def test_peak_shift_slope_matches_chirp_time_frequency_coupling():
    cfg = us(4)  # chirp length 211
    sched = ucss_slot_schedule(cfg, code_seed=5)
    sig = ucss_modulate(ucss_build_frame(bytes(8), cfg), sched, cfg)
    fracs = np.array([0.1, 0.2, 0.3, 0.4])
    freqs = fracs * cfg.bandwidth_hz / cfg.chirp_length
    shifts = [
        correlation_peak_shift(apply_cfo(sig, f), sched, cfg, slot=10, search=4)
        for f in freqs
    ]
    slope = np.polyfit(freqs, shifts, 1)[0]
    expected = cfg.chirp_length / cfg.bandwidth_hz
    assert abs(abs(slope) - expected) <= 0.2 * expected


def test_soft_demodulate_length():
    cfg = us(6)
    sched = ucss_slot_schedule(cfg, code_seed=0)
    sig = ucss_modulate(ucss_build_frame(bytes(4), cfg), sched, cfg)
    assert ucss_soft_demodulate(sig, sched, cfg).size == 70


def test_modulate_rejects_mismatched_inputs():
    cfg = us(2)
    sched = ucss_slot_schedule(cfg, code_seed=0)
    with pytest.raises(ValueError):
        ucss_modulate(UcssFrameBits(np.zeros(100, dtype=np.uint8)), sched, cfg)
    short = BasebandSignal(np.ones(100), cfg.bandwidth_hz)
    with pytest.raises(ValueError):
        ucss_demodulate(short, sched, cfg)
