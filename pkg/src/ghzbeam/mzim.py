"""
Mach-Zehnder interferometer with an additional mirror (MZIM).

The device is modelled in bench order as

    BS1 -> relative phase phi in arm 1 -> double reflection in arm 1
        (a -1 on P and on M when p = 1) -> BS2

At phi = 0 it routes every basis component |p P M> to output port
p XOR P XOR M, so the port contrast (I0 - I1)/(I0 + I1) measures the
three-way parity correlation.

Imperfections:
- Unbalanced splitters keep a real amplitude matrix parameterized by the
  intensity transmittance t = 1 - reflectivity (0.5 = balanced).
- Residual misalignment is a single fringe-visibility knob v: output
  intensities are v * (coherent result) + (1 - v) * (incoherent per-arm
  sum). Both parts are lossless, so I0 + I1 = 1 for a normalized input.
- Detector efficiency and dark noise scale and offset the raw intensities;
  the configured background is stored alongside so the contrast can be
  computed after subtraction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import numpy as np

from .elements import mirror_pair, phase_shifter, splitter
from .state import Gate2, Operator8, TriState, apply, lift

if TYPE_CHECKING:  # pragma: no cover
    from .mermin import ImperfectionConfig


class MeasurementError(RuntimeError):
    """No measurable intensity at the output ports (blockage or misconfig)."""


@dataclass(frozen=True)
class MzimModel:
    """Interferometer parameters; the default instance is the ideal preset."""

    phi: float = 0.0
    bs1_reflectivity: float = 0.5
    bs2_reflectivity: float = 0.5
    visibility: float = 1.0

    def __post_init__(self):
        for name in ("bs1_reflectivity", "bs2_reflectivity"):
            r = getattr(self, name)
            if not 0.0 < r < 1.0:
                raise ValueError(f"{name} must lie strictly between 0 and 1")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError("visibility must lie in [0, 1]")

    @classmethod
    def ideal(cls) -> "MzimModel":
        return cls()

    def with_phi(self, phi: float) -> "MzimModel":
        return replace(self, phi=phi)

    def _bs1(self) -> Gate2:
        return splitter(1.0 - self.bs1_reflectivity)

    def _bs2(self) -> Gate2:
        return splitter(1.0 - self.bs2_reflectivity)


@dataclass(frozen=True)
class PortIntensities:
    """Raw output-port intensities with the configured background levels."""

    i0: float
    i1: float
    b0: float = 0.0
    b1: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if min(self.i0, self.i1, self.b0, self.b1) < 0.0:
            raise ValueError("intensities and backgrounds must be non-negative")

    def intensity(self, port: int) -> float:
        if port not in (0, 1):
            raise ValueError("port must be 0 or 1")
        return self.i0 if port == 0 else self.i1

    def net(self) -> tuple[float, float]:
        """Dark-noise-subtracted intensities, floored at zero."""
        return max(self.i0 - self.b0, 0.0), max(self.i1 - self.b1, 0.0)

    def contrast(self, min_total: float = 1e-12) -> float:
        """(I0 - I1)/(I0 + I1) after background subtraction."""
        n0, n1 = self.net()
        total = n0 + n1
        if total < min_total:
            raise MeasurementError("total output intensity is zero; blocked or misconfigured")
        return (n0 - n1) / total

    def to_text(self) -> str:
        return (f"I0={self.i0:.12g} I1={self.i1:.12g} "
                f"b0={self.b0:.12g} b1={self.b1:.12g} phi={self.phi:.12g}")


def mzim_unitary(m: MzimModel) -> Operator8:
    """The coherent interferometer unitary (visibility plays no role here)."""
    return (
        lift(m._bs2())
        @ mirror_pair()
        @ lift(phase_shifter(m.phi))
        @ lift(m._bs1())
    )


def _bs_matrix(reflectivity: float) -> np.ndarray:
    t = math.sqrt(1.0 - reflectivity)
    r = math.sqrt(reflectivity)
    return np.array([[t, r], [r, -t]])


# mirror-pair signs on the (P, M) components of the p=1 arm: (-1)^(P+M)
_ARM1_PARITY = np.array([1.0, -1.0, -1.0, 1.0])


def read_ports(m: MzimModel, s: TriState,
               noise: "ImperfectionConfig | None" = None) -> PortIntensities:
    """Output-port intensities for a normalized input state.

    The coherent and incoherent (per-arm) results are mixed by the model's
    visibility; detector efficiency and dark noise from `noise` are applied
    to the mixed intensities. Everything before the second splitter is
    path-diagonal, so the arms are propagated as two 4-vectors; the result
    matches applying `mzim_unitary` (the tests pin this down).
    """
    mid = _bs_matrix(m.bs1_reflectivity) @ s.amps.reshape(2, 4)
    mid[1] *= np.exp(1j * m.phi) * _ARM1_PARITY
    b2 = _bs_matrix(m.bs2_reflectivity)
    out = b2 @ mid  # rows are output ports

    coherent = np.sum(np.abs(out) ** 2, axis=1)
    arm_mass = np.sum(np.abs(mid) ** 2, axis=1)
    incoherent = (b2 * b2) @ arm_mass
    v = m.visibility
    i0, i1 = v * coherent + (1.0 - v) * incoherent

    b = 0.0
    if noise is not None:
        eta = noise.detector_efficiency
        b = noise.dark_noise
        i0 = eta * i0 + b
        i1 = eta * i1 + b
    return PortIntensities(i0=float(i0), i1=float(i1), b0=b, b1=b, phi=m.phi)


def phi_sweep(m: MzimModel, probe: TriState, phis: np.ndarray,
              noise: "ImperfectionConfig | None" = None) -> list[PortIntensities]:
    """Evaluate the output intensities over a sequence of phase values."""
    return [read_ports(m.with_phi(float(phi)), probe, noise) for phi in phis]


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def _golden_max(f, a: float, b: float, tol: float) -> float:
    """Golden-section maximum of a unimodal f on [a, b] to width tol."""
    h = b - a
    c, d = a + _INVPHI2 * h, a + _INVPHI * h
    yc, yd = f(c), f(d)
    while h > tol:
        if yc > yd:
            b, d, yd = d, c, yc
            h = _INVPHI * h
            c = a + _INVPHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = _INVPHI * h
            d = a + _INVPHI * h
            yd = f(d)
    return 0.5 * (a + b)


def calibrate(m: MzimModel, probe: TriState, target_port: int,
              resolution: float = 1e-8) -> float:
    """Phase that maximizes the target-port intensity for a one-path probe.

    Emulates the piezo adjustment done with one input blocked: the probe
    must occupy a single input path. A coarse scan over [0, 2*pi) brackets
    the optimum and a golden-section refinement pins it down; the result is
    reported in [0, 2*pi).
    """
    if target_port not in (0, 1):
        raise ValueError("target_port must be 0 or 1")
    p0, p1 = probe.path_probabilities()
    if min(p0, p1) > 1e-12:
        raise ValueError("calibration probe must occupy a single input path; block the other")

    two_pi = 2.0 * math.pi

    def f(phi: float) -> float:
        return read_ports(m.with_phi(phi % two_pi), probe).intensity(target_port)

    n_coarse = 64
    grid = np.arange(n_coarse) * (two_pi / n_coarse)
    values = [f(g) for g in grid]
    k = int(np.argmax(values))
    h = two_pi / n_coarse
    best = _golden_max(f, grid[k] - h, grid[k] + h, resolution)
    return best % two_pi
