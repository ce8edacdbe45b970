"""Closed-form frame parameters for the two chirp waveforms.

Everything in here is pure arithmetic on static configurations: symbol
counts, frame timing, data rate, overhead and the tolerable CFO/drift
limits, plus a registry of the twelve named settings (LS-1..LS-6 for the
LoRa-like waveform, US-1..US-6 for the pause-coded DBPSK chirp waveform)
used throughout the simulations.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

# LDRO becomes mandatory at this symbol duration (SX126x rule).
LDRO_SYMBOL_TIME_S = 0.01638

_REQUIRED_SNR_LORA = {1: -12.5, 2: -12.5, 3: -15.0, 4: -17.5, 5: -20.0, 6: -20.0}
_REQUIRED_SNR_UCSS = {1: -12.6, 2: -12.6, 3: -15.0, 4: -17.5, 5: -20.0, 6: -20.0}


@dataclass(frozen=True)
class LoRaConfig:
    """Static parameters of one LoRa-like transmission setting.

    bandwidth_hz is also the (baseband) sample rate. sf_exponent is the
    spreading exponent, i.e. a symbol spans 2**sf_exponent samples and
    carries sf_exponent bits (two fewer with LDRO). cr_index is the value
    added to 4 in the code-rate denominator: rate = 4/(4+cr_index), so 4
    means rate 1/2 and 0 means uncoded.
    """

    bandwidth_hz: float
    sf_exponent: int
    cr_index: int
    ldro_enabled: bool
    payload_bytes: int
    preamble_symbols: float = 12.25

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive")
        if not 5 <= self.sf_exponent <= 12:
            raise ValueError("sf_exponent must be in 5..12")
        if not 0 <= self.cr_index <= 4:
            raise ValueError("cr_index must be in 0..4")
        if self.payload_bytes < 1:
            raise ValueError("payload_bytes must be >= 1")
        if self.symbol_duration_s >= LDRO_SYMBOL_TIME_S and not self.ldro_enabled:
            raise ValueError(
                "symbol duration %.4f s requires ldro_enabled=True"
                % self.symbol_duration_s
            )

    @property
    def spreading(self) -> int:
        return 2 ** self.sf_exponent

    @property
    def symbol_duration_s(self) -> float:
        return self.spreading / self.bandwidth_hz

    @property
    def ldro(self) -> int:
        return 1 if self.ldro_enabled else 0

    @property
    def bits_per_symbol(self) -> int:
        return self.sf_exponent - 2 * self.ldro


@dataclass(frozen=True)
class UcssConfig:
    """Static parameters of one pause-coded chirp (UCSS) setting.

    chirp_length is the spreading factor in samples per chirp; every chirp
    carries one differentially-encoded bit.
    """

    bandwidth_hz: float
    chirp_length: int
    code_rate: Fraction
    payload_bytes: int
    crc_bits: int = 3
    preamble_symbols: int = 6

    def __post_init__(self):
        # allow passing e.g. 0.5 or "1/2"
        object.__setattr__(self, "code_rate", Fraction(self.code_rate))
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive")
        if self.chirp_length < 2:
            raise ValueError("chirp_length must be >= 2")
        if not 0 < self.code_rate <= 1:
            raise ValueError("code_rate must be in (0, 1]")
        if self.payload_bytes < 1:
            raise ValueError("payload_bytes must be >= 1")
        if self.crc_bits < 0:
            raise ValueError("crc_bits must be >= 0")
        total = Fraction(self.payload_bytes * 8 + self.crc_bits) / self.code_rate
        if total.denominator != 1:
            raise ValueError(
                "(payload_bytes*8 + crc_bits)/code_rate must be an integer, got %s"
                % total
            )

    @property
    def symbol_duration_s(self) -> float:
        return self.chirp_length / self.bandwidth_hz


@dataclass(frozen=True)
class FrameTiming:
    """Derived timing and robustness figures for one frame.

    Durations in seconds, rates in bit/s, CFO in Hz, drift in Hz/s.
    tone_spacing_hz is meaningful for the MFSK waveform only (None for
    UCSS). Both drift-limit conventions are exposed: the packet-duration
    divisor (datasheet style) and the payload-duration divisor.
    """

    symbol_count: int
    symbol_duration_s: float
    payload_duration_s: float
    preamble_duration_s: float
    pause_duration_s: float
    packet_duration_s: float
    data_rate_bps: float
    overhead_fraction: float
    max_cfo_hz: float
    max_drift_hz_per_s_packet: float
    max_drift_hz_per_s_payload: float
    tone_spacing_hz: float | None = None

    def __post_init__(self):
        parts = (
            self.preamble_duration_s
            + self.payload_duration_s
            + self.pause_duration_s
        )
        assert abs(self.packet_duration_s - parts) < 1e-12 * max(1.0, parts)
        assert 0 <= self.overhead_fraction < 1


@dataclass(frozen=True, order=True)
class SettingId:
    """Named setting, e.g. SettingId('LoRa', 4) prints as LS-4."""

    family: str  # "LoRa" | "UCSS"
    index: int

    def __post_init__(self):
        if self.family not in ("LoRa", "UCSS"):
            raise ValueError("family must be 'LoRa' or 'UCSS'")
        if not 1 <= self.index <= 6:
            raise ValueError("index must be in 1..6")

    @classmethod
    def parse(cls, text: str) -> "SettingId":
        name = text.strip().upper()
        fam = {"LS": "LoRa", "US": "UCSS"}.get(name[:2])
        if fam is None or len(name) < 4 or name[2] != "-":
            raise ValueError("setting id must look like LS-4 or US-2, got %r" % text)
        return cls(fam, int(name[3:]))

    def __str__(self) -> str:
        return ("LS-" if self.family == "LoRa" else "US-") + str(self.index)


@dataclass(frozen=True)
class Setting:
    """Registry entry: configuration, derived timing and required SNR."""

    id: SettingId
    config: LoRaConfig | UcssConfig
    timing: FrameTiming
    required_snr_db: float


def lora_symbol_count(cfg: LoRaConfig) -> int:
    """Number of payload symbols (implicit header, payload CRC included)."""
    num = 8 * cfg.payload_bytes - 4 * cfg.sf_exponent + 24
    den = 4 * (cfg.sf_exponent - 2 * cfg.ldro)
    return 8 + max(math.ceil(num / den) * (cfg.cr_index + 4), 0)


def lora_timing(cfg: LoRaConfig) -> FrameTiming:
    """All derived frame quantities for a LoRa-like setting."""
    n_sym = lora_symbol_count(cfg)
    t_s = cfg.symbol_duration_s
    t_pay = t_s * n_sym
    t_pre = t_s * cfg.preamble_symbols
    t_pac = t_pre + t_pay
    if cfg.ldro_enabled:
        tone_spacing = cfg.bandwidth_hz / 2 ** (cfg.sf_exponent - 2)
        max_cfo = 16 * cfg.bandwidth_hz / (3 * cfg.spreading)
    else:
        tone_spacing = cfg.bandwidth_hz / cfg.spreading
        max_cfo = cfg.bandwidth_hz / (3 * cfg.spreading)
    return FrameTiming(
        symbol_count=n_sym,
        symbol_duration_s=t_s,
        payload_duration_s=t_pay,
        preamble_duration_s=t_pre,
        pause_duration_s=0.0,
        packet_duration_s=t_pac,
        data_rate_bps=8 * cfg.payload_bytes / t_pac,
        overhead_fraction=1 - t_pay / t_pac,
        max_cfo_hz=max_cfo,
        max_drift_hz_per_s_packet=max_cfo / t_pac,
        max_drift_hz_per_s_payload=max_cfo / t_pay,
        tone_spacing_hz=tone_spacing,
    )


def ucss_symbol_count(cfg: UcssConfig) -> int:
    """Number of data chirps in one frame: (8*PL + CRC)/code_rate."""
    total = Fraction(cfg.payload_bytes * 8 + cfg.crc_bits) / cfg.code_rate
    if total.denominator != 1:
        raise ValueError("symbol count is not an integer for %r" % (cfg,))
    return int(total)


def ucss_timing(cfg: UcssConfig) -> FrameTiming:
    """All derived frame quantities for a UCSS setting.

    The pause budget between chirps is ceil(N/2)**2 samples in total; the
    tolerable CFO is set by the chirp time shift, 0.5*B/chirp_length.
    """
    n_sym = ucss_symbol_count(cfg)
    t_s = cfg.symbol_duration_s
    t_pay = t_s * n_sym
    t_pause = math.ceil(n_sym / 2) ** 2 / cfg.bandwidth_hz
    t_pre = t_s * cfg.preamble_symbols
    t_pac = t_pre + t_pay + t_pause
    max_cfo = 0.5 * cfg.bandwidth_hz / cfg.chirp_length
    return FrameTiming(
        symbol_count=n_sym,
        symbol_duration_s=t_s,
        payload_duration_s=t_pay,
        preamble_duration_s=t_pre,
        pause_duration_s=t_pause,
        packet_duration_s=t_pac,
        data_rate_bps=8 * cfg.payload_bytes / t_pac,
        overhead_fraction=1 - t_pay / t_pac,
        max_cfo_hz=max_cfo,
        max_drift_hz_per_s_packet=max_cfo / t_pac,
        max_drift_hz_per_s_payload=max_cfo / t_pay,
    )


def settings_registry() -> Mapping[SettingId, Setting]:
    """The twelve named settings with timing and required SNR.

    Equal indices across the two families mark settings with similar
    sensitivity (required SNR), which is what makes them comparable in the
    drift experiments.
    """
    lora_rows = {
        1: LoRaConfig(62e3, 9, 4, False, 16),
        2: LoRaConfig(20e3, 9, 4, True, 8),
        3: LoRaConfig(20e3, 10, 4, True, 8),
        4: LoRaConfig(20e3, 11, 4, True, 8),
        5: LoRaConfig(20e3, 12, 4, True, 8),
        6: LoRaConfig(20e3, 12, 0, True, 4),
    }
    ucss_rows = {
        1: UcssConfig(62e3, 67, Fraction(1, 2), 8),
        2: UcssConfig(20e3, 67, Fraction(1, 2), 8),
        3: UcssConfig(20e3, 117, Fraction(1, 2), 8),
        4: UcssConfig(20e3, 211, Fraction(1, 2), 8),
        5: UcssConfig(20e3, 373, Fraction(1, 2), 8),
        6: UcssConfig(20e3, 373, Fraction(1, 2), 4),
    }
    registry: dict[SettingId, Setting] = {}
    for idx, cfg in lora_rows.items():
        sid = SettingId("LoRa", idx)
        registry[sid] = Setting(sid, cfg, lora_timing(cfg), _REQUIRED_SNR_LORA[idx])
    for idx, cfg in ucss_rows.items():
        sid = SettingId("UCSS", idx)
        registry[sid] = Setting(sid, cfg, ucss_timing(cfg), _REQUIRED_SNR_UCSS[idx])
    return registry


def get_setting(setting: SettingId | str) -> Setting:
    """Look up one registry entry by id or by name like 'US-4'."""
    if isinstance(setting, str):
        setting = SettingId.parse(setting)
    return settings_registry()[setting]


# Column order of the rendered table. Durations in ms, rates in bit/s,
# drift in Hz/s; names follow the FrameTiming fields.
_TABLE_COLUMNS = (
    ("setting", None),
    ("bandwidth_hz", "%.0f"),
    ("spreading", "%d"),
    ("symbol_count", "%d"),
    ("symbol_duration_ms", "%.2f"),
    ("payload_duration_ms", "%.2f"),
    ("preamble_duration_ms", "%.2f"),
    ("pause_duration_ms", "%.2f"),
    ("packet_duration_ms", "%.2f"),
    ("required_snr_db", "%.1f"),
    ("data_rate_bps", "%.1f"),
    ("overhead_fraction", "%.3f"),
    ("tone_spacing_hz", "%.2f"),
    ("max_cfo_hz", "%.1f"),
    ("max_drift_hz_per_s_packet", "%.1f"),
    ("max_drift_hz_per_s_payload", "%.1f"),
)


def _table_rows(registry: Mapping[SettingId, Setting]) -> list[dict]:
    rows = []
    for sid in sorted(registry, key=lambda s: (s.family, s.index)):
        entry = registry[sid]
        cfg, t = entry.config, entry.timing
        spreading = cfg.spreading if isinstance(cfg, LoRaConfig) else cfg.chirp_length
        rows.append(
            {
                "setting": str(sid),
                "bandwidth_hz": cfg.bandwidth_hz,
                "spreading": spreading,
                "symbol_count": t.symbol_count,
                "symbol_duration_ms": t.symbol_duration_s * 1e3,
                "payload_duration_ms": t.payload_duration_s * 1e3,
                "preamble_duration_ms": t.preamble_duration_s * 1e3,
                "pause_duration_ms": t.pause_duration_s * 1e3,
                "packet_duration_ms": t.packet_duration_s * 1e3,
                "required_snr_db": entry.required_snr_db,
                "data_rate_bps": t.data_rate_bps,
                "overhead_fraction": t.overhead_fraction,
                "tone_spacing_hz": t.tone_spacing_hz,
                "max_cfo_hz": t.max_cfo_hz,
                "max_drift_hz_per_s_packet": t.max_drift_hz_per_s_packet,
                "max_drift_hz_per_s_payload": t.max_drift_hz_per_s_payload,
            }
        )
    return rows


def render_table(
    registry: Mapping[SettingId, Setting] | None = None, fmt: str = "csv"
) -> str:
    """Render the settings table as 'csv' or aligned 'text'.

    CSV uses decimal points and one row per setting; the empty
    tone-spacing column of UCSS rows stays blank.
    """
    if registry is None:
        registry = settings_registry()
    rows = _table_rows(registry)
    names = [name for name, _ in _TABLE_COLUMNS]

    def cell(row, name, spec):
        value = row[name]
        if value is None:
            return ""
        if spec is None:
            return str(value)
        return spec % value

    if fmt == "csv":
        buf = io.StringIO()
        buf.write(",".join(names) + "\n")
        for row in rows:
            buf.write(",".join(cell(row, n, s) for n, s in _TABLE_COLUMNS) + "\n")
        return buf.getvalue()
    if fmt == "text":
        cells = [names] + [
            [cell(row, n, s) for n, s in _TABLE_COLUMNS] for row in rows
        ]
        widths = [max(len(r[i]) for r in cells) for i in range(len(names))]
        lines = [
            "  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in cells
        ]
        return "\n".join(lines) + "\n"
    raise ValueError("fmt must be 'csv' or 'text'")
