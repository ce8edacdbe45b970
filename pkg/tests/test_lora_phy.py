"""Transceiver-chain tests for the MFSK chirp waveform."""

import numpy as np
import pytest

from css_linksim.baseband import BasebandSignal
from css_linksim.lora_phy import (
    LoRaSymbolStream,
    lora_decode,
    lora_demodulate,
    lora_encode,
    lora_modulate,
)
from css_linksim.params import LoRaConfig, SettingId, lora_symbol_count, settings_registry


def lora_settings():
    return [
        (str(sid), entry.config)
        for sid, entry in settings_registry().items()
        if sid.family == "LoRa"
    ]


@pytest.mark.parametrize("name,cfg", lora_settings())
def test_loopback_random_payloads(name, cfg):
    rng = np.random.default_rng(hash(name) % 2 ** 32)
    for _ in range(100):
        payload = rng.integers(0, 256, cfg.payload_bytes, dtype=np.uint8).tobytes()
        stream = lora_encode(payload, cfg)
        signal = lora_modulate(stream, cfg)
        decoded, ok = lora_decode(lora_demodulate(signal, cfg), cfg, expected=payload)
        assert ok and decoded == payload


def test_encode_length_and_ldro_grid():
    cfg = settings_registry()[SettingId("LoRa", 4)].config
    stream = lora_encode(bytes(range(8)), cfg)
    assert stream.symbols.size == 24 == lora_symbol_count(cfg)
    assert np.all(stream.symbols % 4 == 0)


def test_encode_rejects_wrong_payload_length():
    cfg = settings_registry()[SettingId("LoRa", 4)].config
    with pytest.raises(ValueError):
        lora_encode(bytes(7), cfg)


def test_all_zero_payload_gives_constant_zero_symbols():
    cfg = LoRaConfig(62e3, 9, 0, False, 4)
    stream = lora_encode(bytes(4), cfg)
    assert np.all(stream.symbols == 0)


@pytest.mark.parametrize("sf", [7, 8, 9])
def test_exhaustive_modulate_demodulate_identity(sf):
    cfg = LoRaConfig(62e3, sf, 4, False, 8)
    n = 2 ** sf
    stream = LoRaSymbolStream(np.arange(n), sf, False)
    signal = lora_modulate(stream, cfg)
    out = lora_demodulate(signal, cfg)
    assert np.array_equal(out.symbols, np.arange(n))


def test_modulated_signal_constant_envelope():
    cfg = settings_registry()[SettingId("LoRa", 4)].config
    sig = lora_modulate(lora_encode(bytes(8), cfg), cfg, include_preamble=True)
    assert np.max(np.abs(np.abs(sig.samples) - 1)) < 1e-9


def test_frame_duration_matches_packet_time():
    cfg = settings_registry()[SettingId("LoRa", 4)].config
    sig = lora_modulate(lora_encode(bytes(8), cfg), cfg, include_preamble=True)
    assert sig.samples.size == int(36.25 * 2048)  # 12.25 preamble + 24 payload
    assert sig.duration_s == pytest.approx(3.712, abs=cfg.symbol_duration_s)


def test_demodulator_invariant_under_phase_rotation():
    cfg = settings_registry()[SettingId("LoRa", 2)].config
    rng = np.random.default_rng(3)
    payload = rng.integers(0, 256, 8, dtype=np.uint8).tobytes()
    sig = lora_modulate(lora_encode(payload, cfg), cfg)
    for phi in (0.3, 1.7, np.pi, 5.1):
        rotated = BasebandSignal(sig.samples * np.exp(1j * phi), sig.sample_rate_hz)
        decoded, ok = lora_decode(lora_demodulate(rotated, cfg), cfg, expected=payload)
        assert ok


def apply_cfo(signal, f_hz):
    t = np.arange(signal.samples.size) / signal.sample_rate_hz
    return BasebandSignal(signal.samples * np.exp(2j * np.pi * f_hz * t), signal.sample_rate_hz)


@pytest.mark.parametrize("k", [1, 2, -1, 5])
def test_integer_bin_cfo_shifts_symbols(k):
    sf, bw = 9, 62e3
    cfg = LoRaConfig(bw, sf, 4, False, 8)
    rng = np.random.default_rng(11)
    symbols = rng.integers(0, 2 ** sf, 40)
    stream = LoRaSymbolStream(symbols, sf, False)
    shifted = apply_cfo(lora_modulate(stream, cfg), k * bw / 2 ** sf)
    out = lora_demodulate(shifted, cfg)
    assert np.array_equal(out.symbols, (symbols + k) % 2 ** sf)


def test_cfo_just_below_half_tone_spacing_is_harmless():
    sf, bw = 9, 62e3
    cfg = LoRaConfig(bw, sf, 4, False, 8)
    rng = np.random.default_rng(12)
    symbols = rng.integers(0, 2 ** sf, 40)
    stream = LoRaSymbolStream(symbols, sf, False)
    shifted = apply_cfo(lora_modulate(stream, cfg), 0.45 * bw / 2 ** sf)
    out = lora_demodulate(shifted, cfg)
    assert np.array_equal(out.symbols, symbols)


def test_single_corrupted_symbol_corrected_at_rate_half():
    cfg = settings_registry()[SettingId("LoRa", 4)].config
    rng = np.random.default_rng(5)
    for _ in range(25):
        payload = rng.integers(0, 256, 8, dtype=np.uint8).tobytes()
        stream = lora_encode(payload, cfg)
        corrupted = stream.symbols.copy()
        pos = rng.integers(0, corrupted.size)
        corrupted[pos] = (corrupted[pos] + 4 * rng.integers(1, 2 ** 9)) % 2 ** 11
        bad = LoRaSymbolStream(corrupted, cfg.sf_exponent, cfg.ldro_enabled)
        decoded, _ = lora_decode(bad, cfg)
        assert decoded == payload


def test_all_zero_stream_fails_against_nonzero_payload():
    cfg = settings_registry()[SettingId("LoRa", 4)].config
    payload = bytes(range(8))
    zeros = LoRaSymbolStream(np.zeros(24, dtype=int), cfg.sf_exponent, True)
    decoded, ok = lora_decode(zeros, cfg, expected=payload)
    assert not ok and decoded != payload


def test_decode_rejects_wrong_stream_length():
    cfg = settings_registry()[SettingId("LoRa", 4)].config
    with pytest.raises(ValueError):
        lora_decode(LoRaSymbolStream(np.zeros(23, dtype=int), 11, True), cfg)


def test_demodulate_rejects_misaligned_signal():
    cfg = settings_registry()[SettingId("LoRa", 4)].config
    with pytest.raises(ValueError):
        lora_demodulate(BasebandSignal(np.ones(2047), 20e3), cfg)
