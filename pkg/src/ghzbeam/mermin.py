"""
The four parity measurements and the Mermin quantity M.

M = <ZZZ> - <ZXX> - <XZX> - <XXZ> is bounded by 2 for any local
outcome-assignment model and reaches its algebraic maximum 4 on the
prepared non-separable state. Each term is estimated the way the bench
does it: rotate X-wires into the Z basis with a Hadamard stage (beam
splitter on p, half-wave plate at 22.5 deg on P, Dove prism at 22.5 deg
on M), send the beam through the interferometer at phi = 0, and read the
port contrast (I0 - I1)/(I0 + I1) after dark-noise subtraction.

Imperfections are collected in `ImperfectionConfig`. Randomness is drawn
from numpy's default PCG64 generator seeded with the config seed, in a
fixed order per frame: three standard normals for the preparation stage
(when a frame re-prepares the beam), then, for each setting in the order
ZZZ, XXZ, XZX, ZXX, two standard normals for the measurement waveplate and
Dove-prism jitter (drawn even when the setting uses neither). This makes
every run bit-reproducible from (config, frame count) alone.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .elements import beam_splitter, dove_prism, hwp, s_waveplate, splitter
from .mzim import MzimModel, PortIntensities, mzim_unitary, read_ports
from .state import (
    Operator8,
    TriState,
    apply,
    controlled,
    expectation,
    fidelity,
    ghz_state,
    hadamard,
    lift,
    pauli_string,
)

SETTINGS = ("ZZZ", "XXZ", "XZX", "ZXX")
_HADAMARD_ANGLE = 22.5  # waveplate/prism angle realizing a Hadamard


def check_setting(setting: str) -> str:
    if len(setting) != 3 or any(c not in "ZX" for c in setting):
        raise ValueError(f"bad measurement setting {setting!r}; need 3 chars from Z, X")
    return setting


@dataclass(frozen=True)
class ImperfectionConfig:
    """Physical error knobs for the whole bench.

    bs_transmittance    intensity transmittance of every beam splitter
    angle_jitter_deg    std dev of zero-mean orientation error of SWP,
                        waveplates and Dove prism, resampled per frame
    visibility          interferometer fringe contrast
    detector_efficiency camera efficiency applied to port intensities
    dark_noise          background level added to (and subtracted from)
                        each port, as a fraction of full intensity
    seed                PCG64 seed; fixes every random draw of a run
    residual_phase      optional per-setting leftover interferometer phase
                        (radians), for benches calibrated per measurement
    """

    bs_transmittance: float = 0.5
    angle_jitter_deg: float = 0.0
    visibility: float = 1.0
    detector_efficiency: float = 1.0
    dark_noise: float = 0.0
    seed: int = 0
    residual_phase: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.bs_transmittance < 1.0:
            raise ValueError("bs_transmittance must lie strictly between 0 and 1")
        if self.angle_jitter_deg < 0.0:
            raise ValueError("angle_jitter_deg must be non-negative")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError("visibility must lie in [0, 1]")
        if not 0.0 < self.detector_efficiency <= 1.0:
            raise ValueError("detector_efficiency must lie in (0, 1]")
        if self.dark_noise < 0.0:
            raise ValueError("dark_noise must be non-negative")
        for key in self.residual_phase:
            check_setting(key)

    @classmethod
    def ideal(cls, seed: int = 0) -> "ImperfectionConfig":
        return cls(seed=seed)

    @property
    def is_ideal(self) -> bool:
        return (
            self.bs_transmittance == 0.5
            and self.angle_jitter_deg == 0.0
            and self.visibility == 1.0
            and self.detector_efficiency == 1.0
            and self.dark_noise == 0.0
            and not any(self.residual_phase.values())
        )

    def phase_for(self, setting: str) -> float:
        return self.residual_phase.get(setting, 0.0)

    def mzim_model(self, setting: str = "ZZZ") -> MzimModel:
        r = 1.0 - self.bs_transmittance
        return MzimModel(phi=self.phase_for(setting), bs1_reflectivity=r,
                         bs2_reflectivity=r, visibility=self.visibility)


def table1_preset(seed: int = 424242) -> ImperfectionConfig:
    """Committed imperfection preset reproducing the published run.

    The parameters were obtained by fitting the four measured expectation
    values (+0.87, -0.53, -0.63, -0.59); they are a sufficient explanation,
    not a claim about the original bench. See docs/formats.md for the fit.
    """
    return ImperfectionConfig(
        bs_transmittance=0.495,
        angle_jitter_deg=2.0,
        visibility=0.8707,
        detector_efficiency=0.98,
        dark_noise=0.02,
        seed=seed,
        residual_phase={
            "ZZZ": 0.0,
            "XXZ": 0.9129,
            "XZX": 0.7533,
            "ZXX": 0.8105,
        },
    )


TABLE1_TARGETS = {"ZZZ": 0.87, "XXZ": -0.53, "XZX": -0.63, "ZXX": -0.59}


# --- preparation --------------------------------------------------------

def prepare_ghz(cfg: ImperfectionConfig | None = None,
                rng: np.random.Generator | None = None) -> TriState:
    """Run the preparation bench: s-waveplate, splitter, one waveplate per arm.

    Without a config this returns the target state exactly. With one, the
    s-waveplate and both waveplates receive jittered orientations (three
    standard-normal draws) and the splitter uses the configured
    transmittance.
    """
    if cfg is None:
        frag = s_waveplate("V")
        bs_gate = beam_splitter()
        h0, h1 = hwp(0.0), hwp(-45.0)
    else:
        if rng is None:
            rng = np.random.default_rng(cfg.seed)
        d_swp, d0, d1 = rng.standard_normal(3) * cfg.angle_jitter_deg
        rad = math.radians(d_swp)
        frag = math.cos(2 * rad) * s_waveplate("V") + math.sin(2 * rad) * s_waveplate("H")
        bs_gate = splitter(cfg.bs_transmittance)
        h0, h1 = hwp(0.0 + d0), hwp(-45.0 + d1)

    amps = np.zeros(8, dtype=complex)
    amps[0:4] = frag
    state = TriState(amps)
    state = apply(lift(bs_gate), state)
    state = apply(controlled("p", h0, value=0), state)
    state = apply(controlled("p", h1, value=1), state)
    return state


# --- measurement --------------------------------------------------------

@functools.lru_cache(maxsize=None)
def basis_change(setting: str) -> Operator8:
    """Hadamard on every X wire, identity on every Z wire (ideal optics)."""
    check_setting(setting)
    u = Operator8.identity()
    for wire, label in zip(("p", "P", "M"), setting):
        if label == "X":
            u = lift(hadamard(wire)) @ u
    return u


def _imperfect_basis_change(setting: str, cfg: ImperfectionConfig,
                            rng: np.random.Generator) -> Operator8:
    # Two draws per setting regardless of which wires need rotating, so the
    # random stream does not depend on the setting.
    d_hwp, d_dp = rng.standard_normal(2) * cfg.angle_jitter_deg
    u = Operator8.identity()
    if setting[0] == "X":
        u = lift(splitter(cfg.bs_transmittance)) @ u
    if setting[1] == "X":
        u = lift(hwp(_HADAMARD_ANGLE + d_hwp)) @ u
    if setting[2] == "X":
        u = lift(dove_prism(_HADAMARD_ANGLE + d_dp)) @ u
    return u


def _measure_once(s: TriState, setting: str, cfg: ImperfectionConfig | None,
                  rng: np.random.Generator | None) -> tuple[float, PortIntensities]:
    if cfg is None:
        rotated = apply(basis_change(setting), s)
        ports = read_ports(MzimModel.ideal(), rotated)
    else:
        assert rng is not None
        rotated = apply(_imperfect_basis_change(setting, cfg, rng), s)
        ports = read_ports(cfg.mzim_model(setting), rotated, noise=cfg)
    return ports.contrast(), ports


def measure_setting(s: TriState, setting: str,
                    cfg: ImperfectionConfig | None = None,
                    rng: np.random.Generator | None = None) -> float:
    """One-frame estimate of <setting> from the output-port contrast."""
    check_setting(setting)
    if cfg is not None and rng is None:
        rng = np.random.default_rng(cfg.seed)
    value, _ = _measure_once(s, setting, cfg, rng)
    return value


def output_state(s: TriState, setting: str,
                 cfg: ImperfectionConfig | None = None) -> TriState:
    """Coherent beam state at the interferometer output for one setting.

    Uses the nominal (jitter-free) chain; this is what the port images are
    rendered from.
    """
    check_setting(setting)
    rotated = apply(basis_change(setting), s)
    model = MzimModel.ideal() if cfg is None else cfg.mzim_model(setting)
    return apply(mzim_unitary(model), rotated)


# --- the Mermin experiment ----------------------------------------------

@dataclass(frozen=True)
class FrameMeasurement:
    frame: int
    setting: str
    i0: float
    i1: float
    b0: float
    b1: float
    value: float


@dataclass(frozen=True)
class MerminResult:
    """Per-setting expectation estimates and the Mermin quantity."""

    means: dict[str, float]
    stderrs: dict[str, float]
    m_value: float
    m_stderr: float
    frames: tuple[FrameMeasurement, ...]

    @property
    def n_frames(self) -> int:
        return len(self.frames) // len(SETTINGS)


def _mermin_from_means(means: dict[str, float]) -> float:
    return means["ZZZ"] - means["ZXX"] - means["XZX"] - means["XXZ"]


def _collect(per_setting: dict[str, list[float]],
             frames: list[FrameMeasurement]) -> MerminResult:
    means = {s: float(np.mean(v)) for s, v in per_setting.items()}
    stderrs = {
        s: float(np.std(v, ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0
        for s, v in per_setting.items()
    }
    m_err = math.sqrt(sum(e * e for e in stderrs.values()))
    return MerminResult(
        means=means,
        stderrs=stderrs,
        m_value=_mermin_from_means(means),
        m_stderr=m_err,
        frames=tuple(frames),
    )


def mermin_m(s: TriState, cfg: ImperfectionConfig | None = None,
             n_samples: int = 1) -> MerminResult:
    """Estimate M on a fixed input state over `n_samples` frames.

    Measurement-stage jitter is resampled each frame; the input state is
    reused as given. Use `run_experiment` to also re-prepare per frame.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = np.random.default_rng(cfg.seed) if cfg is not None else None
    per_setting: dict[str, list[float]] = {s_: [] for s_ in SETTINGS}
    frames: list[FrameMeasurement] = []
    for f in range(n_samples):
        for setting in SETTINGS:
            value, ports = _measure_once(s, setting, cfg, rng)
            per_setting[setting].append(value)
            frames.append(FrameMeasurement(f, setting, ports.i0, ports.i1,
                                           ports.b0, ports.b1, value))
    return _collect(per_setting, frames)


def run_experiment(cfg: ImperfectionConfig, n_frames: int = 9) -> MerminResult:
    """Full bench run: each frame prepares the beam afresh, then measures
    all four settings. This mirrors how independent camera frames arise."""
    if n_frames < 1:
        raise ValueError("n_frames must be at least 1")
    rng = np.random.default_rng(cfg.seed)
    per_setting: dict[str, list[float]] = {s_: [] for s_ in SETTINGS}
    frames: list[FrameMeasurement] = []
    for f in range(n_frames):
        state = prepare_ghz(cfg, rng)
        for setting in SETTINGS:
            value, ports = _measure_once(state, setting, cfg, rng)
            per_setting[setting].append(value)
            frames.append(FrameMeasurement(f, setting, ports.i0, ports.i1,
                                           ports.b0, ports.b1, value))
    return _collect(per_setting, frames)


def algebraic_mermin(s: TriState) -> float:
    """M from operator expectation values (the oracle for the intensities)."""
    return _mermin_from_means({k: expectation(s, pauli_string(k)) for k in SETTINGS})


def fidelity_with_target(s: TriState) -> float:
    """Fidelity of a prepared state with the ideal non-separable target."""
    return fidelity(s, ghz_state())


# --- classical bound -----------------------------------------------------

def assignment_value(z, x) -> float:
    """M for one local outcome assignment.

    z and x hold the values each degree of freedom would report for a Z or
    an X measurement. Deterministic local models assign plus or minus one
    to both, independently; the scan relaxes this to the cube [-1, 1]^6,
    whose extreme points are exactly those assignments. Quantum product
    states are the sub-region z^2 + x^2 <= 1 and reach at most 1.
    """
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    return float(
        z[0] * z[1] * z[2]
        - z[0] * x[1] * x[2]
        - x[0] * z[1] * x[2]
        - x[0] * x[1] * z[2]
    )


def classical_bound_scan(n_restarts: int = 10_000, n_steps: int = 25,
                         seed: int = 0) -> float:
    """Maximize M over local outcome assignments by random restarts plus
    coordinate ascent; the result approaches but never exceeds 2."""
    if n_restarts < 1 or n_steps < 1:
        raise ValueError("n_restarts and n_steps must be at least 1")
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1.0, 1.0, size=(3, n_restarts))
    x = rng.uniform(-1.0, 1.0, size=(3, n_restarts))
    for _ in range(n_steps):
        for i in range(3):
            if i == 0:
                a = z[1] * z[2] - x[1] * x[2]
                b = -(z[1] * x[2] + x[1] * z[2])
            elif i == 1:
                a = z[0] * z[2] - x[0] * x[2]
                b = -(z[0] * x[2] + x[0] * z[2])
            else:
                a = z[0] * z[1] - x[0] * x[1]
                b = -(z[0] * x[1] + x[0] * z[1])
            z[i] = np.where(a >= 0.0, 1.0, -1.0)
            x[i] = np.where(b >= 0.0, 1.0, -1.0)
    m = (z[0] * z[1] * z[2] - z[0] * x[1] * x[2]
         - x[0] * z[1] * x[2] - x[0] * x[1] * z[2])
    return float(m.max())


# --- fitting the published run -------------------------------------------

class FitInfeasibleError(RuntimeError):
    """The target expectations cannot be met at the requested tolerance."""

    def __init__(self, best_config: ImperfectionConfig,
                 residuals: dict[str, float], tolerance: float):
        self.best_config = best_config
        self.residuals = residuals
        self.tolerance = tolerance
        worst = max(residuals.values())
        super().__init__(
            f"no configuration found within tolerance {tolerance}; "
            f"best residuals {residuals} (worst {worst:.4f})"
        )


_FIT_RANGES = {
    "bs_transmittance": (0.05, 0.95),
    "angle_jitter_deg": (0.0, 30.0),
    "visibility": (0.0, 1.0),
    "detector_efficiency": (0.05, 1.0),
    "dark_noise": (0.0, 0.45),
}


def _with_knob(cfg: ImperfectionConfig, name: str, value: float) -> ImperfectionConfig:
    if name.startswith("residual:"):
        setting = name.split(":", 1)[1]
        phases = dict(cfg.residual_phase)
        phases[setting] = value
        return replace(cfg, residual_phase=phases)
    return replace(cfg, **{name: value})


def fit_table1(targets: dict[str, float], tolerance: float,
               include_residual_phase: bool = False, n_frames: int = 9,
               seed: int = 424242, rounds: int = 3) -> ImperfectionConfig:
    """Search imperfection knobs so the simulated means hit the targets.

    Coordinate descent with a fixed seed: each knob in turn gets a zooming
    grid line search. Global knobs descend on the summed squared residual;
    a per-setting residual phase only influences its own setting, so it is
    scored on that residual alone (with `include_residual_phase` the four
    phases are searched first, since they decouple the settings). Success
    means the worst per-setting residual is within `tolerance`; otherwise
    FitInfeasibleError reports the best residuals found.
    """
    if set(targets) != set(SETTINGS):
        raise ValueError(f"targets must cover exactly the settings {SETTINGS}")
    for k, v in targets.items():
        if not -1.0 <= v <= 1.0:
            raise ValueError(f"target {k}={v} is outside [-1, 1]")

    state = ghz_state()

    def residuals_of(cfg: ImperfectionConfig) -> dict[str, float]:
        res = mermin_m(state, cfg, n_samples=n_frames)
        return {k: abs(res.means[k] - targets[k]) for k in SETTINGS}

    knobs: dict[str, tuple[float, float]] = {}
    if include_residual_phase:
        for s_ in SETTINGS:
            knobs[f"residual:{s_}"] = (0.0, math.pi / 2)
    knobs.update(_FIT_RANGES)

    def knob_score(residuals: dict[str, float], name: str) -> float:
        if name.startswith("residual:"):
            return residuals[name.split(":", 1)[1]]
        return sum(r * r for r in residuals.values())

    best = ImperfectionConfig.ideal(seed=seed)
    best_res = residuals_of(best)
    if max(best_res.values()) <= tolerance:
        return best

    for _ in range(rounds):
        for name, (lo, hi) in knobs.items():
            span = hi - lo
            center = None
            best_knob = knob_score(best_res, name)
            for _zoom in range(3):
                if center is None:
                    grid = np.linspace(lo, hi, 13)
                else:
                    grid = np.clip(np.linspace(center - span, center + span, 13), lo, hi)
                for value in grid:
                    cand = _with_knob(best, name, float(value))
                    cand_res = residuals_of(cand)
                    s_ = knob_score(cand_res, name)
                    if s_ < best_knob:
                        best, best_res, best_knob = cand, cand_res, s_
                        center = float(value)
                if center is None:
                    break
                span /= 6.0
        if max(best_res.values()) <= tolerance:
            return best

    raise FitInfeasibleError(best, best_res, tolerance)


# --- export formats ------------------------------------------------------

CSV_HEADER = "frame,setting,i0,i1,b0,b1,expectation"


def frames_csv(result: MerminResult) -> str:
    """Per-frame port intensities as CSV (columns documented in docs/formats.md)."""
    lines = [CSV_HEADER]
    for fm in result.frames:
        lines.append(
            f"{fm.frame},{fm.setting},{fm.i0:.12g},{fm.i1:.12g},"
            f"{fm.b0:.12g},{fm.b1:.12g},{fm.value:.12g}"
        )
    return "\n".join(lines) + "\n"


def summary_text(result: MerminResult) -> str:
    """Fixed-width summary: one value row and one error row, like Table 1."""
    cols = [""] + list(SETTINGS) + ["M"]
    values = [f"{result.means[s_]:+.4f}" for s_ in SETTINGS] + [f"{result.m_value:+.4f}"]
    errors = [f"{result.stderrs[s_]:.4f}" for s_ in SETTINGS] + [f"{result.m_stderr:.4f}"]
    rows = [cols, ["value"] + values, ["stderr"] + errors]
    rows[0] = ["setting"] + cols[1:]
    widths = [max(len(r[i]) for r in rows) for i in range(len(cols))]
    out = []
    for row in rows:
        out.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    return "\n".join(out) + "\n"
