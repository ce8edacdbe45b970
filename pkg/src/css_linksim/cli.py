"""Command-line front end.

Verbs: table (parameter table), loopback (single noiseless trial),
pn-verify (synthesized phase-noise PSD vs target), fer-snr / fer-drift /
fer-triangle (Monte Carlo sweeps to CSV). Exit codes: 0 success, 2 bad
arguments, 1 runtime failure. CSS_LINKSIM_SEED provides the default seed.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import channel as ch
from . import simkit
from .params import SettingId, render_table, settings_registry


def _default_seed() -> int:
    return int(os.environ.get("CSS_LINKSIM_SEED", "1"))


def _parse_grid(text: str, log: bool = False) -> tuple[float, ...]:
    """start:stop:count, inclusive endpoints; 'count' linear (or log) steps."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("grid must be start:stop:count, got %r" % text)
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1 or stop < start:
        raise ValueError("grid needs stop >= start and count >= 1")
    if count == 1:
        return (start,)
    if log:
        if start <= 0:
            raise ValueError("log grid needs start > 0")
        return tuple(np.geomspace(start, stop, count))
    return tuple(np.linspace(start, stop, count))


def _setting(text: str) -> SettingId:
    try:
        return SettingId.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_sweep_args(sub: argparse.ArgumentParser, drift: bool) -> None:
    sub.add_argument("--setting", type=_setting, required=True, help="e.g. LS-4 or US-2")
    sub.add_argument("--grid", required=True, help="start:stop:count")
    sub.add_argument("--log-grid", action="store_true", help="log-spaced grid")
    sub.add_argument("--trials", type=int, default=500)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--threads", type=int, default=1, help="worker cap")
    sub.add_argument("--out", type=Path, default=None, help="CSV path (default stdout)")
    if drift:
        sub.add_argument("--snr-margin", type=float, default=3.0)
    else:
        sub.add_argument("--profile", default=None, help="phase-noise preset pn1..pn7")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="css-linksim",
        description="Chirp-waveform link simulator: parameter tables and "
        "frame-error-rate experiments",
    )
    subs = parser.add_subparsers(dest="verb", required=True)

    p_table = subs.add_parser("table", help="print the settings table")
    p_table.add_argument("--format", choices=("csv", "text"), default="text")
    p_table.add_argument("--out", type=Path, default=None)

    p_loop = subs.add_parser("loopback", help="noiseless single-frame round trip")
    p_loop.add_argument("--setting", type=_setting, required=True)
    p_loop.add_argument("--trials", type=int, default=1)
    p_loop.add_argument("--seed", type=int, default=None)
    p_loop.add_argument(
        "--dump-iq", type=Path, default=None, help="write the frame as float32 I/Q"
    )

    p_pn = subs.add_parser("pn-verify", help="phase-noise PSD check")
    p_pn.add_argument("--profile", required=True, help="preset name or profile file")
    p_pn.add_argument("--fs", type=float, default=20e3)
    p_pn.add_argument("--n", type=int, default=2 ** 20)
    p_pn.add_argument("--seeds", type=int, default=100)
    p_pn.add_argument("--seed", type=int, default=None)
    p_pn.add_argument("--out", type=Path, default=None)

    help_text = {
        "fer-snr": "FER vs SNR sweep -> CSV",
        "fer-drift": "FER vs linear drift rate at required SNR + margin -> CSV",
        "fer-triangle": "FER vs swept-oscillator drift rate (same payload-"
        "normalized rate axis as fer-drift) -> CSV",
    }
    for verb, drift in (("fer-snr", False), ("fer-drift", True), ("fer-triangle", True)):
        sub = subs.add_parser(verb, help=help_text[verb])
        _add_sweep_args(sub, drift)
        if verb == "fer-triangle":
            sub.add_argument(
                "--max-cfo",
                type=float,
                default=None,
                help="triangle amplitude in Hz (default bandwidth/4)",
            )
    return parser


def _cmd_table(args) -> int:
    text = render_table(settings_registry(), fmt=args.format)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_loopback(args) -> int:
    from . import lora_phy, ucss_phy
    from .baseband import write_iq
    from .params import LoRaConfig, get_setting

    seed = args.seed if args.seed is not None else _default_seed()
    entry = get_setting(args.setting)
    cfg = entry.config
    failures = 0
    for trial in range(args.trials):
        rng = simkit.trial_rng(seed, 0, trial)
        ok, _ = simkit.run_trial(args.setting, ch.ChannelSpec(), rng, code_seed=seed)
        failures += not ok
    if args.dump_iq:
        rng = simkit.trial_rng(seed, 0, 0)
        payload = rng.integers(0, 256, cfg.payload_bytes, dtype=np.uint8).tobytes()
        if isinstance(cfg, LoRaConfig):
            sig = lora_phy.lora_modulate(
                lora_phy.lora_encode(payload, cfg), cfg, include_preamble=True
            )
        else:
            sched = ucss_phy.ucss_slot_schedule(cfg, seed)
            sig = ucss_phy.ucss_modulate(
                ucss_phy.ucss_build_frame(payload, cfg), sched, cfg
            )
        write_iq(sig, args.dump_iq)
    print(
        "%s loopback: %d/%d frames ok"
        % (args.setting, args.trials - failures, args.trials)
    )
    return 0 if failures == 0 else 1


def _cmd_pn_verify(args) -> int:
    if args.profile in ch.PRESET_PROFILES:
        profile = ch.phase_noise_preset(args.profile)
    elif Path(args.profile).exists():
        profile = ch.PhaseNoiseProfile.from_file(args.profile)
    else:
        print("unknown profile %r" % args.profile, file=sys.stderr)
        return 2
    seed = args.seed if args.seed is not None else _default_seed()
    acc = None
    for k in range(args.seeds):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))
        theta = ch.synth_phase_noise(profile, args.n, args.fs, rng)
        freqs, psd = ch.estimate_phase_noise_psd(theta, args.fs)
        acc = psd if acc is None else acc + psd
    acc /= args.seeds
    lines = ["offset_hz,target_dbc_hz,estimated_dbc_hz,deviation_db"]
    worst = 0.0
    for f0, level in profile.points:
        if f0 > args.fs / 2:
            continue
        est = 10 * np.log10(np.interp(f0, freqs, acc))
        dev = est - level
        worst = max(worst, abs(dev))
        lines.append("%.10g,%.10g,%.4f,%.4f" % (f0, level, est, dev))
    text = "\n".join(lines) + "\n"
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    print("max deviation: %.2f dB" % worst, file=sys.stderr)
    return 0


def _cmd_sweep(args, triangle: bool = False, snr: bool = False) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    grid = _parse_grid(args.grid, log=args.log_grid)
    spec = simkit.ExperimentSpec(
        setting=args.setting,
        sweep=simkit.SWEEP_SNR if snr else simkit.SWEEP_DRIFT,
        grid=grid,
        trials_per_point=args.trials,
        master_seed=seed,
        phase_noise=(
            ch.phase_noise_preset(args.profile)
            if (snr and args.profile)
            else None
        ),
        triangle=triangle,
        max_cfo_hz=getattr(args, "max_cfo", None),
        snr_margin_db=getattr(args, "snr_margin", 3.0),
    )
    curve = simkit.run_sweep(spec, workers=max(1, args.threads))
    text = simkit.curve_to_csv(spec, curve)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "table":
            return _cmd_table(args)
        if args.verb == "loopback":
            return _cmd_loopback(args)
        if args.verb == "pn-verify":
            return _cmd_pn_verify(args)
        if args.verb == "fer-snr":
            return _cmd_sweep(args, snr=True)
        if args.verb == "fer-drift":
            return _cmd_sweep(args)
        if args.verb == "fer-triangle":
            return _cmd_sweep(args, triangle=True)
    except (ValueError, KeyError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    raise AssertionError("unhandled verb")


if __name__ == "__main__":
    sys.exit(main())
