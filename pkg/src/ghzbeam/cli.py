"""
Command-line driver.

Subcommands:
    compile    parse a bench file, show its circuit before and after
               simplification, and verify they are equivalent
    prepare    run the preparation bench and print the resulting state
    mermin     run the four-setting experiment; writes summary, CSV, images
    sweep-phi  phase sweep of the interferometer with a one-path probe
    render     write the per-setting output-port images

Exit codes: 0 success, 2 bench parse/compile error, 3 configuration error,
4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import BenchParseError, parse
from .compiler import CompileError, compile_bench, rewrite
from .circuit import equivalent
from .elements import s_waveplate_state
from .mermin import (
    SETTINGS,
    ImperfectionConfig,
    fidelity_with_target,
    frames_csv,
    output_state,
    prepare_ghz,
    run_experiment,
    summary_text,
    table1_preset,
)
from .mzim import phi_sweep
from .render import render_port, write_pgm

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CONFIG = 3
EXIT_INTERNAL = 4


class ConfigError(Exception):
    pass


_CONFIG_KEYS = (
    "bs_transmittance",
    "angle_jitter_deg",
    "visibility",
    "detector_efficiency",
    "dark_noise",
    "seed",
)
_PHASE_KEYS = {f"residual_phase_{s.lower()}": s for s in SETTINGS}


def load_config(path: str | None, seed_override: int | None = None) -> ImperfectionConfig:
    """Read a flat key=value config file (see docs/formats.md for the keys)."""
    values: dict[str, str] = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()

    preset = values.pop("preset", "ideal")
    if preset == "ideal":
        cfg = ImperfectionConfig.ideal()
    elif preset == "table1":
        cfg = table1_preset()
    else:
        raise ConfigError(f"unknown preset {preset!r}; use 'ideal' or 'table1'")

    kwargs: dict = {}
    phases = dict(cfg.residual_phase)
    for key, value in values.items():
        try:
            if key in _CONFIG_KEYS:
                kwargs[key] = int(value) if key == "seed" else float(value)
            elif key in _PHASE_KEYS:
                phases[_PHASE_KEYS[key]] = float(value)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    if seed_override is not None:
        kwargs["seed"] = seed_override
    try:
        cfg = ImperfectionConfig(**{
            "bs_transmittance": kwargs.get("bs_transmittance", cfg.bs_transmittance),
            "angle_jitter_deg": kwargs.get("angle_jitter_deg", cfg.angle_jitter_deg),
            "visibility": kwargs.get("visibility", cfg.visibility),
            "detector_efficiency": kwargs.get("detector_efficiency", cfg.detector_efficiency),
            "dark_noise": kwargs.get("dark_noise", cfg.dark_noise),
            "seed": kwargs.get("seed", cfg.seed),
            "residual_phase": phases,
        })
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def _ensure_out(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_images(state, cfg: ImperfectionConfig | None, out: Path,
                  grid: int, extent: float) -> list[Path]:
    written = []
    for setting in SETTINGS:
        final = output_state(state, setting, cfg)
        for port in (0, 1):
            img = render_port(final, port, n=grid, extent=extent,
                              label=f"{setting}_port{port}")
            written.append(write_pgm(img, out / f"{setting}_port{port}.pgm"))
    return written


def cmd_compile(args) -> int:
    try:
        text = Path(args.bench).read_text()
    except OSError as exc:
        print(f"error: cannot read {args.bench}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        program = parse(text)
        ir = compile_bench(program)
    except (BenchParseError, CompileError) as exc:
        print(f"{args.bench}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    simplified = rewrite(ir)
    report = equivalent(ir, simplified)
    print("# compiled circuit")
    print(ir.dump())
    print()
    print("# simplified circuit")
    print(simplified.dump())
    print()
    if report.equal:
        phase = report.phase
        shown = f"{phase.real:.6g}" if abs(phase.imag) < 1e-12 else f"{phase:.6g}"
        print(f"equivalent (phase {shown})")
        return EXIT_OK
    print(f"NOT equivalent (max deviation {report.max_abs_diff:.3e})", file=sys.stderr)
    return EXIT_INTERNAL


def cmd_prepare(args) -> int:
    cfg = None
    if args.config is not None or args.seed is not None:
        cfg = load_config(args.config, args.seed)
    state = prepare_ghz(cfg)
    print("index  p P M  amplitude")
    for idx in range(8):
        p, pol, mode = (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
        a = state.amps[idx]
        print(f"{idx:5d}  {p} {pol} {mode}  {a.real:+.6f}{a.imag:+.6f}j")
    print(f"fidelity with target state: {fidelity_with_target(state):.12f}")
    return EXIT_OK


def cmd_mermin(args) -> int:
    cfg = load_config(args.config, args.seed)
    if args.frames < 1:
        raise ConfigError("--frames must be at least 1")
    result = run_experiment(cfg, n_frames=args.frames)
    out = _ensure_out(args.out)
    (out / "summary.txt").write_text(summary_text(result))
    (out / "frames.csv").write_text(frames_csv(result))
    _write_images(prepare_ghz(), cfg, out, args.grid, args.extent)
    print(summary_text(result), end="")
    print(f"wrote {out / 'summary.txt'}, {out / 'frames.csv'} and port images")
    return EXIT_OK


def cmd_sweep_phi(args) -> int:
    if args.steps < 2:
        raise ConfigError("--steps must be at least 2")
    cfg = load_config(args.config, args.seed)
    probe = s_waveplate_state("V", path=0)
    phis = np.linspace(args.phi_min, args.phi_max, args.steps)
    records = phi_sweep(cfg.mzim_model(), probe, phis)
    lines = ["phi,i0,i1"]
    for record in records:
        lines.append(f"{record.phi:.12g},{record.i0:.12g},{record.i1:.12g}")
    text = "\n".join(lines) + "\n"
    if args.out is not None:
        out = _ensure_out(args.out)
        (out / "sweep.csv").write_text(text)
        print(f"wrote {out / 'sweep.csv'}")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_render(args) -> int:
    cfg = load_config(args.config, args.seed)
    out = _ensure_out(args.out)
    state = prepare_ghz()
    written = _write_images(state, cfg, out, args.grid, args.extent)
    print(f"wrote {len(written)} images to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghzbeam",
        description="Simulate a tripartite non-separable laser beam bench.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_compile = sub.add_parser("compile", help="compile and simplify a bench file")
    p_compile.add_argument("bench", help="bench source path")
    p_compile.set_defaults(func=cmd_compile)

    def common(p, out_default="out"):
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=out_default, help="output directory")

    p_prepare = sub.add_parser("prepare", help="run the preparation bench")
    p_prepare.add_argument("--config", default=None)
    p_prepare.add_argument("--seed", type=int, default=None)
    p_prepare.set_defaults(func=cmd_prepare)

    p_mermin = sub.add_parser("mermin", help="run the four-setting experiment")
    common(p_mermin)
    p_mermin.add_argument("--frames", type=int, default=9, help="camera frames per setting")
    p_mermin.add_argument("--grid", type=int, default=128, help="image pixels per side")
    p_mermin.add_argument("--extent", type=float, default=3.0, help="image half-width in waists")
    p_mermin.set_defaults(func=cmd_mermin)

    p_sweep = sub.add_parser("sweep-phi", help="interferometer phase sweep")
    p_sweep.add_argument("--config", default=None)
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--steps", type=int, default=101)
    p_sweep.add_argument("--phi-min", type=float, default=0.0)
    p_sweep.add_argument("--phi-max", type=float, default=2.0 * math.pi)
    p_sweep.set_defaults(func=cmd_sweep_phi)

    p_render = sub.add_parser("render", help="write output-port images")
    common(p_render)
    p_render.add_argument("--grid", type=int, default=256)
    p_render.add_argument("--extent", type=float, default=3.0)
    p_render.set_defaults(func=cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionError as exc:  # internal invariant
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
