"""Link-level simulator for two ultra-narrow-band chirp waveforms."""

from .params import (
    FrameTiming,
    LoRaConfig,
    Setting,
    SettingId,
    UcssConfig,
    get_setting,
    lora_symbol_count,
    lora_timing,
    render_table,
    settings_registry,
    ucss_symbol_count,
    ucss_timing,
)
from .baseband import BasebandSignal, read_iq, write_iq

__all__ = [
    "BasebandSignal",
    "FrameTiming",
    "LoRaConfig",
    "Setting",
    "SettingId",
    "UcssConfig",
    "get_setting",
    "lora_symbol_count",
    "lora_timing",
    "read_iq",
    "render_table",
    "settings_registry",
    "ucss_symbol_count",
    "ucss_timing",
    "write_iq",
]

__version__ = "0.1.0"
