"""
Catalog of optical elements and the gates they implement.

Each constructor returns the 2x2 gate (or lifted 8x8 operator) acting on the
wire the physical element addresses:

    half-wave plate (hwp)        -> polarization wire P
    Dove prism (dove_prism)      -> transverse-mode wire M
    beam splitter (beam_splitter)-> path wire p
    phase shifter (phase_shifter)-> path wire p
    mirror pair (mirror_pair)    -> CZ(p,P) * CZ(p,M)
    s-waveplate (s_waveplate)    -> state constructor on (P, M)
    blocker (block_path)         -> non-unitary projector, see below

Conventions (all fixed here, consumers must not re-derive them):
- hwp(theta) = [[cos 2t, sin 2t], [sin 2t, -cos 2t]] with t = theta in
  degrees from the horizontal. hwp(22.5) is the Hadamard, hwp(0) is Z,
  hwp(45) is X and hwp(-45) is -X; the -X sign is what makes the
  preparation bench land on `ghzbeam.state.ghz_state` exactly.
- The Dove prism uses the same matrix family on the (HG01, HG10) basis;
  its physical image-flip handedness is absorbed as a global sign so that
  dove_prism(22.5) is exactly the Hadamard.
- The beam splitter is modelled as a real Hadamard ("hadamard" convention).
  The symmetric i-reflection convention is available behind
  `bs_convention="symmetric"` but nothing in this package uses it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .state import (
    Gate2,
    Operator8,
    TriState,
    controlled,
    lift,
    pauli_x,
    pauli_z,
    phase_matrix,
)

ELEMENT_KINDS = ("SWP", "BS", "HWP", "DP", "MirrorPair", "PhaseShifter", "Blocker")


class TotalBlockageError(RuntimeError):
    """All amplitude sits on the blocked path; no beam remains."""


def _rotation_doubled(theta_deg: float) -> np.ndarray:
    t = np.deg2rad(theta_deg)
    c, s = np.cos(2 * t), np.sin(2 * t)
    return np.array([[c, s], [s, -c]], dtype=complex)


def hwp(theta_deg: float) -> Gate2:
    """Half-wave plate rotated by theta degrees from the horizontal."""
    return Gate2(_rotation_doubled(theta_deg), "P")


def dove_prism(theta_deg: float) -> Gate2:
    """Dove prism rotated by theta degrees; transverse-mode analogue of hwp."""
    return Gate2(_rotation_doubled(theta_deg), "M")


def beam_splitter(bs_convention: str = "hadamard") -> Gate2:
    """Balanced beam splitter on the path wire."""
    if bs_convention == "hadamard":
        m = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    elif bs_convention == "symmetric":
        m = np.array([[1, 1j], [1j, 1]], dtype=complex) / np.sqrt(2)
    else:
        raise ValueError(f"unknown bs_convention {bs_convention!r}")
    return Gate2(m, "p")


def splitter(transmittance: float) -> Gate2:
    """Unbalanced beam splitter with intensity transmittance t.

    The amplitude matrix is kept real, [[sqrt(t), sqrt(r)], [sqrt(r), -sqrt(t)]]
    with r = 1 - t; t = 0.5 reproduces beam_splitter().
    """
    if not 0.0 < transmittance < 1.0:
        raise ValueError("transmittance must lie strictly between 0 and 1")
    t, r = np.sqrt(transmittance), np.sqrt(1.0 - transmittance)
    return Gate2(np.array([[t, r], [r, -t]], dtype=complex), "p")


def phase_shifter(phi: float) -> Gate2:
    """Relative phase diag(1, e^(i*phi)) between the two paths."""
    return Gate2(phase_matrix(phi), "p")


def mirror_pair() -> Operator8:
    """Double reflection in path 1: a -1 on both P and M when p = 1."""
    return controlled("p", pauli_z("P")) @ controlled("p", pauli_z("M"))


_SQ2 = 1.0 / np.sqrt(2.0)
# (P, M) fragments, indexed 2*P + M
_SWP_OUT = {
    "V": np.array([_SQ2, 0, 0, _SQ2], dtype=complex),  # (|0_P 0_M> + |1_P 1_M>)/sqrt(2)
    "H": np.array([0, _SQ2, _SQ2, 0], dtype=complex),  # (|0_P 1_M> + |1_P 0_M>)/sqrt(2)
}


def s_waveplate(input_pol: str = "V") -> np.ndarray:
    """(P, M) amplitudes produced from a fundamental-mode linear input beam.

    A vertical input yields the non-separable (|0_P 0_M> + |1_P 1_M>)/sqrt(2);
    a horizontal input yields the partner (|0_P 1_M> + |1_P 0_M>)/sqrt(2).
    Only H and V inputs are handled.
    """
    if input_pol not in _SWP_OUT:
        raise ValueError(f"unsupported input polarization {input_pol!r}; use 'H' or 'V'")
    return _SWP_OUT[input_pol].copy()


def s_waveplate_state(input_pol: str = "V", path: int = 0) -> TriState:
    """Full beam state with the s-waveplate output injected on one path."""
    frag = s_waveplate(input_pol)
    a = np.zeros(8, dtype=complex)
    a[4 * path : 4 * path + 4] = frag
    return TriState(a)


def s_waveplate_unitary() -> Operator8:
    """Unitary extension of the s-waveplate for bench compilation.

    Defined as CNOT(P -> M) . H(P): it maps the abstract |0_P 0_M> input to
    the vertical-input output and |0_P 1_M> to the horizontal-input output.
    """
    from .state import hadamard  # local import to keep module top small

    return controlled("P", pauli_x("M")) @ lift(hadamard("P"))


def block_path(path: int, s: TriState) -> tuple[TriState, float]:
    """Block one path; returns the renormalized remainder and the discarded
    intensity fraction. Raises TotalBlockageError when nothing survives."""
    if path not in (0, 1):
        raise ValueError("path must be 0 or 1")
    a = s.amps.copy()
    blocked = float(np.sum(np.abs(a[4 * path : 4 * path + 4]) ** 2))
    a[4 * path : 4 * path + 4] = 0.0
    remaining = 1.0 - blocked
    if remaining <= 1e-15:
        raise TotalBlockageError(f"all intensity was on the blocked path {path}")
    return TriState.normalize(a), blocked


@dataclass(frozen=True)
class ElementOp:
    """A placed optical element: kind, parameters and the wires it acts on.

    `arm` restricts single-wire elements to one path (None acts on both).
    `lifted()` returns the element's 8x8 unitary; the blocker is the one
    non-unitary element and raises instead.
    """

    kind: str
    angle_deg: float | None = None
    phi: float | None = None
    arm: int | None = None

    def __post_init__(self):
        if self.kind not in ELEMENT_KINDS:
            raise ValueError(f"unknown element kind {self.kind!r}")
        if self.arm not in (None, 0, 1):
            raise ValueError("arm must be 0, 1 or None")

    def gate(self) -> Gate2:
        """The bare single-wire gate, where one exists."""
        if self.kind == "HWP":
            return hwp(self._angle())
        if self.kind == "DP":
            return dove_prism(self._angle())
        if self.kind == "BS":
            return beam_splitter()
        if self.kind == "PhaseShifter":
            return phase_shifter(self._phi())
        raise ValueError(f"{self.kind} has no single-wire gate form")

    def lifted(self) -> Operator8:
        if self.kind == "Blocker":
            raise ValueError("the blocker is not unitary; use block_path")
        if self.kind == "MirrorPair":
            return mirror_pair()
        if self.kind == "SWP":
            return s_waveplate_unitary()
        if self.kind == "PhaseShifter":
            # The shifter sits in one arm; its action is already path-diagonal.
            if self.arm == 0:
                m = np.array([[np.exp(1j * self._phi()), 0], [0, 1]], dtype=complex)
                return lift(Gate2(m, "p"))
            return lift(phase_shifter(self._phi()))
        if self.kind == "BS":
            if self.arm is not None:
                raise ValueError("a beam splitter acts on the path itself; it cannot sit in one arm")
            return lift(beam_splitter())
        g = self.gate()
        if self.arm is None:
            return lift(g)
        return controlled("p", g, value=self.arm)

    def _angle(self) -> float:
        if self.angle_deg is None:
            raise ValueError(f"{self.kind} requires an angle")
        return self.angle_deg

    def _phi(self) -> float:
        if self.phi is None:
            raise ValueError(f"{self.kind} requires a phase")
        return self.phi
